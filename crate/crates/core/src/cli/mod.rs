//! Command-line front end: argument parsing, configuration, artifact
//! persistence and plot-data emission.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod plot;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{dry_run, planar_estimate, run, StageError, CACHE_ENV};
pub use config::{Command, ConfigFile, LambdaSource, Number, NumberList, RunConfig};
pub use manifest::{read_manifest, verify_outputs, ArtifactWriter, RunManifest};
pub use plot::{emit_plotdata, PlotStyle};

use crate::error::Error;

const AFTER_HELP: &str = "\
Defaults: L = 6; kind = rhombus (ellipse for solve3d); n = 5 for modes, 3 otherwise;
H = 25,50,100,200 (section), 50,100,200,400 (trials, certify), 1,2,4,8 (sweep), 1 (solve3d);
spacing = 1/64 (planar), 1/32 (section, grid method), 1/16 (solve3d, sweep);
planar-spacing = 1/64; lambda = from-planar; k = 2; seed = 3; out = ./out.
Config files use the same keys (H, L, kind, spacing, spacing_z, planar_spacing, n, k,
lambda, method, sector, tolerance, coarse_check, seed, out, [width_table]).
Cached planar results live in $CRUCISPEC_CACHE (default ./.crucispec-cache).
Exit codes: 0 ok, 1 i/o, 2 config or domain error, 3 resource budget,
4 convergence or accuracy failure, 5 consistency flag.";

#[derive(Debug, Parser)]
#[command(name = "crucispec", version, about = "Spectra of cruciform quantum waveguides", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Bound state of the planar cross and its two-grid estimate.
    Planar(RunArgs),
    /// Thresholds of the stretched cross-section over a list of H.
    Section(RunArgs),
    /// Eigenpairs of the 1D model operator.
    Modes(RunArgs),
    /// Gram matrices of the trial family over a list of H.
    Trials(RunArgs),
    /// Max-min certificates over a list of H.
    Certify(RunArgs),
    /// Sector-by-sector spectrum of the truncated waveguide at one H.
    Solve3d(RunArgs),
    /// solve3d over a list of H with counts and a spectrum ladder.
    Sweep(RunArgs),
    /// Verifies a finished run and writes plot files to <out>/plot.
    Report(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML config; command-line values override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Profile kind: rhombus, ellipse or custom.
    #[arg(long)]
    pub kind: Option<String>,
    /// Elongation(s), comma separated; ratios like 1/2 allowed.
    #[arg(long = "H", value_delimiter = ',')]
    pub elongation: Option<Vec<String>>,
    /// Arm half-length of the truncation.
    #[arg(long = "L")]
    pub arm_halflength: Option<String>,
    /// Lattice spacing, e.g. 1/64.
    #[arg(long)]
    pub spacing: Option<String>,
    /// Lattice spacing along the stretched direction.
    #[arg(long)]
    pub spacing_z: Option<String>,
    /// Finer spacing of the planar estimate used by downstream commands.
    #[arg(long)]
    pub planar_spacing: Option<String>,
    /// Number of modes or trial functions.
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial eigenpairs per sector.
    #[arg(long)]
    pub k: Option<usize>,
    /// Lambda_Pi value, or from-planar.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Threshold method: channel or grid.
    #[arg(long)]
    pub method: Option<String>,
    /// Sectors: all, or a comma list such as a1_even_z,odd_z.
    #[arg(long)]
    pub sector: Option<String>,
    /// Absolute residual tolerance of the eigensolver.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Skip the coarser-lattice solve used for counting margins.
    #[arg(long)]
    pub no_coarse_check: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (for report: the run directory to read).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print the resolved plan without computing.
    #[arg(long)]
    pub dry_run: bool,
}

impl RunArgs {
    fn overrides(&self) -> ConfigFile {
        let num = |s: &Option<String>| s.clone().map(Number::Text);
        ConfigFile {
            kind: self.kind.clone(),
            elongation: self
                .elongation
                .clone()
                .map(|v| NumberList::Many(v.into_iter().map(Number::Text).collect())),
            arm_halflength: num(&self.arm_halflength),
            sector: self.sector.clone(),
            spacing: num(&self.spacing),
            spacing_z: num(&self.spacing_z),
            planar_spacing: num(&self.planar_spacing),
            n: self.n,
            k: self.k,
            lambda: num(&self.lambda),
            method: self.method.clone(),
            tolerance: self.tolerance,
            coarse_check: self.no_coarse_check.then_some(false),
            seed: self.seed,
            out: self.out.clone(),
            width_table: None,
        }
    }

    pub fn resolve(&self, command: Command) -> crate::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        RunConfig::resolve(command, base.merged(self.overrides()))
    }
}

impl Sub {
    pub fn split(&self) -> (Command, &RunArgs) {
        match self {
            Sub::Planar(a) => (Command::Planar, a),
            Sub::Section(a) => (Command::Section, a),
            Sub::Modes(a) => (Command::Modes, a),
            Sub::Trials(a) => (Command::Trials, a),
            Sub::Certify(a) => (Command::Certify, a),
            Sub::Solve3d(a) => (Command::Solve3d, a),
            Sub::Sweep(a) => (Command::Sweep, a),
            Sub::Report(a) => (Command::Report, a),
        }
    }
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, args) = cli.command.split();
    let cfg = match args.resolve(command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("crucispec: cli: {e}");
            return e.exit_code();
        }
    };
    if let Some(t) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("crucispec: cli: cannot size the worker pool: {e}");
            return Error::config("threads").exit_code();
        }
    }
    if args.dry_run {
        return match dry_run(&cfg) {
            Ok(plan) => {
                // A closed pipe (`| head`) is not an error.
                let _ = writeln!(std::io::stdout(), "{plan}");
                0
            }
            Err(e) => {
                eprintln!("crucispec: cli: {e}");
                e.exit_code()
            }
        };
    }
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("crucispec: {e}");
            e.error.exit_code()
        }
    }
}
