//! One function per subcommand. Each writes its artifacts through an
//! [`ArtifactWriter`] and returns the error that decides the exit status.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{Command, LambdaSource, RunConfig};
use super::manifest::{read_manifest, verify_outputs, ArtifactWriter};
use super::plot::{emit_plotdata, PlotStyle};
use crate::error::{Error, Result};
use crate::geometry::grid::planned_box_nodes;
use crate::geometry::{CruciformDomain, PlanarCross, Sector};
use crate::numerics::loglog_fit;
use crate::planar::section::default_z_spacing;
use crate::planar::{
    estimate_lambda_pi, fit_threshold, half_section_threshold, mu_dagger, solve_cross_section_with, threshold_sweep,
    write_sweep_csv, ArmTail, ChannelOptions, CrossMoments, PlanarEstimate, SweepRow, ThresholdFit, ThresholdMethod,
};
use crate::specfun::modes::solve as solve_modes;
use crate::trial::{gram_pair, model_potential, theorem1_sweep, write_theorem1_csv, GramPair, LambdaPi, QuadratureSpec, SweepOptions, Theorem1Table, TrialFamily};
use crate::waveguide3d::{analyze, DiscreteSpectrumReport, HalfGuideResult, WaveguideOptions};

pub const CACHE_ENV: &str = "CRUCISPEC_CACHE";
const DEFAULT_CACHE_DIR: &str = ".crucispec-cache";

/// Error tagged with the module that raised it.
#[derive(Debug)]
pub struct StageError {
    pub module: &'static str,
    pub error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.module, self.error)
    }
}

trait Stage<T> {
    fn stage(self, module: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, module: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { module, error })
    }
}

type StageResult<T> = std::result::Result<T, StageError>;

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from)
}

fn planar_cache_path(l: f64, fine_spacing: f64) -> PathBuf {
    let key = serde_json::json!({
        "stage": "planar",
        "L": l,
        "spacing": fine_spacing,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let hash = hex::encode(Sha256::digest(key.to_string().as_bytes()));
    cache_dir().join(format!("planar-{}.json", &hash[..16]))
}

/// `Lambda_Pi` from the spacings `2 h` and `h`, read from the cache when a
/// result for the same `(L, h)` is there and computed (then stored) otherwise.
pub fn planar_estimate(l: f64, fine_spacing: f64, w: Option<&mut ArtifactWriter>) -> Result<PlanarEstimate> {
    let path = planar_cache_path(l, fine_spacing);
    let cached = std::fs::read(&path)
        .ok()
        .and_then(|b| serde_json::from_slice::<PlanarEstimate>(&b).ok());
    let est = match cached {
        Some(e) => e,
        None => {
            let e = estimate_lambda_pi(l, 2.0 * fine_spacing)?;
            std::fs::create_dir_all(cache_dir())?;
            let tmp = path.with_extension("json.tmp");
            std::fs::write(&tmp, serde_json::to_vec(&e)?)?;
            std::fs::rename(&tmp, &path)?;
            e
        }
    };
    if let Some(w) = w {
        w.input("planar", &path)?;
    }
    Ok(est)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarSummary {
    pub lambda_pi: f64,
    pub error_bar: f64,
    #[serde(rename = "L")]
    pub arm_halflength: f64,
    pub spacings: [f64; 2],
    pub grid_values: [f64; 2],
    pub order: f64,
    pub residual: f64,
    pub decay_rate_observed: f64,
    pub decay_rate_model: f64,
    pub count_below_cutoff: usize,
    pub tail: ArmTail,
    pub moments: CrossMoments,
}

impl From<&PlanarEstimate> for PlanarSummary {
    fn from(e: &PlanarEstimate) -> Self {
        Self {
            lambda_pi: e.lambda,
            error_bar: e.error_bar,
            arm_halflength: e.fine.arm_halflength,
            spacings: e.spacings,
            grid_values: e.grid_values,
            order: e.order,
            residual: e.fine.residual,
            decay_rate_observed: e.fine.decay_rate_observed,
            decay_rate_model: e.fine.decay_rate_model,
            count_below_cutoff: e.fine.count_below_cutoff,
            tail: e.fine.tail,
            moments: e.fine.moments,
        }
    }
}

fn lambda_pi(cfg: &RunConfig, est: &PlanarEstimate) -> LambdaPi {
    match cfg.lambda {
        LambdaSource::FromPlanar => LambdaPi {
            value: est.lambda,
            error_bar: est.error_bar,
        },
        LambdaSource::Value(v) => LambdaPi { value: v, error_bar: 0.0 },
    }
}

fn planar(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let est = w
        .time("planar", || planar_estimate(cfg.arm_halflength, cfg.spacing, None))
        .stage("planar")?;
    let summary = PlanarSummary::from(&est);
    w.json("planar.json", &summary).stage("cli")?;
    w.text("u_pi.csv", |b| est.fine.u.write_triples(b, "x1,x2,u")).stage("cli")?;
    println!(
        "Lambda_Pi = {:.8} +- {:.2e}  (h = {}: {:.8}, h = {}: {:.8})",
        est.lambda, est.error_bar, est.spacings[0], est.grid_values[0], est.spacings[1], est.grid_values[1]
    );
    println!(
        "decay rate {:.6} (model {:.6}), eigenvalues below pi^2: {}",
        est.fine.decay_rate_observed, est.fine.decay_rate_model, est.fine.count_below_cutoff
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SectionOutput {
    rows: Vec<SweepRow>,
    fit: Option<ThresholdFit>,
    mu_dagger: Option<f64>,
}

fn section(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let base = cfg.profile(cfg.elongations[0]).stage("geometry")?;
    let rows = w
        .time("section", || match cfg.method {
            ThresholdMethod::Channel => threshold_sweep(&base, &cfg.elongations, &ChannelOptions::default()),
            ThresholdMethod::Grid => cfg
                .elongations
                .iter()
                .map(|&h| {
                    let p = base.with_elongation(h)?;
                    let dz = cfg.spacing_z.unwrap_or_else(|| default_z_spacing(&p, cfg.spacing));
                    let t = solve_cross_section_with(&p, cfg.spacing, dz)?;
                    let residual_scaled = t
                        .asymptotic_prediction
                        .map(|pred| (t.lambda_dagger - pred) / h.powf(-2.0 * t.alpha));
                    Ok(SweepRow { threshold: t, residual_scaled })
                })
                .collect(),
        })
        .stage("planar")?;
    let fit = if rows.len() >= 2 { fit_threshold(&rows, base.alpha()).ok() } else { None };
    w.text("threshold_sweep.csv", |b| write_sweep_csv(&rows, b)).stage("cli")?;
    let out = SectionOutput {
        fit,
        mu_dagger: mu_dagger(base.kind).ok(),
        rows,
    };
    w.json("section.json", &out).stage("cli")?;
    println!("{:>8} {:>16} {:>16}", "H", "lambda_dagger", "prediction");
    for r in &out.rows {
        let t = &r.threshold;
        println!(
            "{:>8} {:>16.10} {:>16}",
            t.elongation,
            t.lambda_dagger,
            t.asymptotic_prediction.map_or("-".into(), |p| format!("{p:.10}"))
        );
    }
    if let Some(f) = &out.fit {
        println!("log-log slope {:.4}, prefactor {:.4}", f.loglog.slope, f.prefactor);
    }
    Ok(())
}

fn modes(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let lambda = match cfg.lambda {
        LambdaSource::Value(v) => v,
        LambdaSource::FromPlanar => {
            planar_estimate(cfg.arm_halflength, cfg.planar_spacing, Some(&mut *w))
                .stage("planar")?
                .lambda
        }
    };
    let potential = model_potential(cfg.kind).stage("specfun")?;
    let fam = w.time("modes", || solve_modes(potential, lambda, cfg.n, None)).stage("specfun")?;
    w.text("modes.csv", |b| fam.write_eigenvalue_csv(b)).stage("cli")?;
    w.text("mode_samples.csv", |b| {
        let names: Vec<String> = fam.modes.iter().map(|m| format!("w_{}", m.index)).collect();
        writeln!(b, "zeta,{}", names.join(","))?;
        for (i, z) in fam.grid.nodes().iter().enumerate() {
            let vals: Vec<String> = fam.modes.iter().map(|m| format!("{:.12e}", m.samples[i])).collect();
            writeln!(b, "{z:.12e},{}", vals.join(","))?;
        }
        Ok(())
    })
    .stage("cli")?;
    for m in &fam.modes {
        println!("n = {:>2}  {:<4}  mu = {:.12}", m.index, m.parity.to_string(), m.eigenvalue);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrialsOutput {
    lambda_pi: LambdaPi,
    grams: Vec<GramPair>,
    mass_slope: Option<f64>,
    stiffness_slope: Option<f64>,
    j2_slope: Option<f64>,
}

fn j2_max(g: &GramPair) -> f64 {
    g.terms.j2.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn trials(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let est = planar_estimate(cfg.arm_halflength, cfg.planar_spacing, Some(&mut *w)).stage("planar")?;
    let lp = lambda_pi(cfg, &est);
    let planar = Arc::new(est.fine);
    let grams = w
        .time("trials", || {
            cfg.elongations
                .iter()
                .map(|&h| {
                    let fam = TrialFamily::new(&cfg.profile(h)?, cfg.n, lp.value, planar.clone())?;
                    gram_pair(&fam, &QuadratureSpec::default())
                })
                .collect::<Result<Vec<_>>>()
        })
        .stage("trial")?;
    let hs: Vec<f64> = grams.iter().map(|g| g.elongation).collect();
    let slope = |ys: Vec<f64>| loglog_fit(&hs, &ys).ok().map(|f| f.slope);
    let out = TrialsOutput {
        lambda_pi: lp,
        mass_slope: slope(grams.iter().map(|g| g.mass_deviation).collect()),
        stiffness_slope: slope(grams.iter().map(|g| g.stiffness_deviation).collect()),
        j2_slope: slope(grams.iter().map(j2_max).collect()),
        grams,
    };
    w.text("gram_deviations.csv", |b| {
        writeln!(b, "H,mass_deviation,stiffness_deviation,j2_max")?;
        for g in &out.grams {
            writeln!(b, "{},{:.12e},{:.12e},{:.12e}", g.elongation, g.mass_deviation, g.stiffness_deviation, j2_max(g))?;
        }
        Ok(())
    })
    .stage("cli")?;
    w.json("trials.json", &out).stage("cli")?;
    println!("{:>8} {:>14} {:>14} {:>14}", "H", "|M - I|", "|K - L I|", "|J2|");
    for g in &out.grams {
        println!("{:>8} {:>14.6e} {:>14.6e} {:>14.6e}", g.elongation, g.mass_deviation, g.stiffness_deviation, j2_max(g));
    }
    let f = |s: Option<f64>| s.map_or("-".into(), |v| format!("{v:.4}"));
    println!("slopes: mass {}, stiffness {}, J2 {}", f(out.mass_slope), f(out.stiffness_slope), f(out.j2_slope));
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CertifyOutput {
    table: Theorem1Table,
    /// Log-log slope of `theta_n - Lambda_Pi` against `H`, per `n`.
    gap_slopes: Vec<Option<f64>>,
}

fn certify(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let est = planar_estimate(cfg.arm_halflength, cfg.planar_spacing, Some(&mut *w)).stage("planar")?;
    let lp = lambda_pi(cfg, &est);
    let planar = Arc::new(est.fine);
    let base = cfg.profile(cfg.elongations[0]).stage("geometry")?;
    let table = w
        .time("certify", || theorem1_sweep(&base, cfg.n, &cfg.elongations, lp, planar, &SweepOptions::default()))
        .stage("trial")?;
    let hs: Vec<f64> = table.rows.iter().map(|r| r.certificate.elongation).collect();
    let gap_slopes = (0..cfg.n)
        .map(|j| {
            let gaps: Vec<f64> = table.rows.iter().map(|r| r.certificate.theta[j] - lp.value).collect();
            loglog_fit(&hs, &gaps).ok().map(|f| f.slope)
        })
        .collect();
    w.text("theorem1.csv", |b| write_theorem1_csv(&table, b)).stage("cli")?;
    let out = CertifyOutput { table, gap_slopes };
    w.json("certify.json", &out).stage("cli")?;
    println!("Lambda_Pi = {:.8} +- {:.2e}", lp.value, lp.error_bar);
    println!("{:>8} {:>14} {:>10} {:>6}  theta", "H", "lambda_dagger", "certified", "chain");
    for r in &out.table.rows {
        let th: Vec<String> = r.certificate.theta.iter().map(|t| format!("{t:.8}")).collect();
        println!(
            "{:>8} {:>14.8} {:>10} {:>6}  {}",
            r.certificate.elongation,
            r.certificate.lambda_dagger,
            r.certificate.certified_count,
            r.chain_holds,
            th.join(" ")
        );
    }
    let s: Vec<String> = out.gap_slopes.iter().map(|s| s.map_or("-".into(), |v| format!("{v:.4}"))).collect();
    println!("gap slopes per n: {}", s.join(" "));
    Ok(())
}

fn waveguide_options(cfg: &RunConfig, profile: &crate::geometry::CrossSectionProfile) -> WaveguideOptions {
    let mut o = WaveguideOptions::new(
        cfg.arm_halflength,
        cfg.spacing,
        cfg.spacing_z.unwrap_or_else(|| default_z_spacing(profile, cfg.spacing)),
    );
    o.k = cfg.k;
    o.coarse_check = cfg.coarse_check;
    o.tolerance = cfg.tolerance;
    o.seed = cfg.seed;
    o
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Solve3dOutput {
    report: DiscreteSpectrumReport,
    halfguide: Option<HalfGuideResult>,
}

fn write_spectrum_csv(report: &DiscreteSpectrumReport, b: &mut Vec<u8>) -> Result<()> {
    writeln!(b, "sector,multiplicity,index,eigenvalue,residual,decay_rate,status")?;
    for s in &report.sectors {
        let slice = &s.solution.slice;
        for (i, v) in slice.eigenvalues.iter().enumerate() {
            let status = if report.certified.iter().any(|c| c.sector == s.solution.sector && c.eigenvalue == *v) {
                "discrete"
            } else if report.ambiguous.iter().any(|c| c.sector == s.solution.sector && c.eigenvalue == *v) {
                "ambiguous"
            } else {
                "above"
            };
            let rate = s.solution.decay_rates.get(i).copied().flatten();
            writeln!(
                b,
                "{},{},{},{:.12e},{:.3e},{},{}",
                s.solution.sector,
                s.multiplicity,
                i + 1,
                v,
                slice.residuals[i],
                rate.map_or_else(String::new, |r| format!("{r:.6e}")),
                status
            )?;
        }
    }
    Ok(())
}

fn solve3d(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let profile = cfg.profile(cfg.elongations[0]).stage("geometry")?;
    let opts = waveguide_options(cfg, &profile);
    let sectors = cfg.sectors().stage("cli")?;
    let all = sectors.is_none();
    let report = w.time("solve3d", || analyze(&profile, &opts, sectors)).stage("waveguide3d")?;
    let halfguide = if all {
        let lambda_plus = report
            .sectors
            .iter()
            .filter(|s| s.solution.sector.ends_with("odd_z"))
            .filter_map(|s| s.solution.slice.eigenvalues.first().copied())
            .fold(f64::INFINITY, f64::min);
        let half = half_section_threshold(&profile, opts.spacing_xy, opts.spacing_z).stage("planar")?;
        Some(HalfGuideResult {
            lambda_plus,
            lambda_dagger_half: half,
            lambda_dagger: report.cutoff,
        })
    } else {
        None
    };
    w.text("spectrum.csv", |b| write_spectrum_csv(&report, b)).stage("cli")?;
    let flag = report.existence_flag && all;
    let out = Solve3dOutput { report, halfguide };
    w.json("report.json", &out).stage("cli")?;
    out.report.write_table(std::io::stdout()).stage("cli")?;
    if let Some(h) = &out.halfguide {
        println!(
            "lambda_plus = {:.8}  (full threshold {:.8}, half-section threshold {:.8})",
            h.lambda_plus, h.lambda_dagger, h.lambda_dagger_half
        );
    }
    if flag {
        return Err(Error::Consistency("no eigenvalue certified below the cutoff, although at least one must exist".into()))
            .stage("waveguide3d");
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepOutput {
    reports: Vec<DiscreteSpectrumReport>,
    counts: Vec<usize>,
    nondecreasing: bool,
}

fn sweep(cfg: &RunConfig, w: &mut ArtifactWriter) -> StageResult<()> {
    let sectors = cfg.sectors().stage("cli")?;
    let all = sectors.is_none();
    let mut reports = Vec::new();
    for &h in &cfg.elongations {
        let profile = cfg.profile(h).stage("geometry")?;
        let opts = waveguide_options(cfg, &profile);
        let r = w
            .time(&format!("H={h}"), || analyze(&profile, &opts, sectors.clone()))
            .stage("waveguide3d")?;
        println!("H = {h}: count {} ambiguous {}", r.total_count, r.ambiguous.len());
        reports.push(r);
    }
    let counts: Vec<usize> = reports.iter().map(|r| r.total_count).collect();
    let out = SweepOutput {
        nondecreasing: counts.windows(2).all(|p| p[1] >= p[0]),
        counts,
        reports,
    };
    w.text("ladder.csv", |b| {
        writeln!(b, "H,n,lambda,cutoff")?;
        for r in &out.reports {
            for (n, v) in r.merged_eigenvalues().iter().enumerate() {
                writeln!(b, "{},{},{:.12e},{:.12e}", r.elongation, n + 1, v, r.cutoff)?;
            }
        }
        Ok(())
    })
    .stage("cli")?;
    w.text("counts.csv", |b| {
        writeln!(b, "H,count,ambiguous,cutoff,existence_flag")?;
        for r in &out.reports {
            writeln!(b, "{},{},{},{:.12e},{}", r.elongation, r.total_count, r.ambiguous.len(), r.cutoff, r.existence_flag)?;
        }
        Ok(())
    })
    .stage("cli")?;
    w.json("sweep.json", &out).stage("cli")?;
    if all && out.reports.iter().any(|r| r.existence_flag) {
        return Err(Error::Consistency("a swept geometry shows no eigenvalue below the cutoff".into())).stage("waveguide3d");
    }
    Ok(())
}

/// Plot files derived from each known artifact of a finished run.
pub fn plot_plan(name: &str) -> Vec<(&'static str, PlotStyle)> {
    let cols = |c: &[&str], block: Option<&str>| PlotStyle::Columns {
        columns: c.iter().map(|s| s.to_string()).collect(),
        block_on: block.map(str::to_string),
    };
    let ll = |x: &str, y: &str| PlotStyle::LogLog { x: x.into(), y: y.into() };
    match name {
        "gram_deviations.csv" => vec![
            ("gram_mass.dat", ll("H", "mass_deviation")),
            ("gram_stiffness.dat", ll("H", "stiffness_deviation")),
            ("gram_j2.dat", ll("H", "j2_max")),
        ],
        "u_pi.csv" => vec![("u_pi.dat", cols(&["x1", "x2", "u"], Some("x1")))],
        "ladder.csv" => vec![("ladder.dat", cols(&["H", "n", "lambda", "cutoff"], None))],
        "threshold_sweep.csv" => vec![("threshold.dat", cols(&["H", "lambda_dagger", "prediction"], None))],
        "theorem1.csv" => vec![(
            "theorem1.dat",
            cols(&["H", "n", "theta_n", "predicted_LamH", "lambda_dagger_numeric"], None),
        )],
        "modes.csv" => vec![("modes.dat", cols(&["n", "mu"], None))],
        _ => Vec::new(),
    }
}

fn report(cfg: &RunConfig, w: &mut ArtifactWriter, source: &Path) -> StageResult<()> {
    let manifest = read_manifest(source).stage("cli")?;
    let bad = verify_outputs(source, &manifest).stage("cli")?;
    if !bad.is_empty() {
        return Err(Error::Consistency(format!("outputs differ from the manifest: {}", bad.join(", ")))).stage("cli");
    }
    w.input("manifest", &source.join(super::manifest::MANIFEST_FILE)).stage("cli")?;
    println!(
        "{}: command {}, config hash {}, {} outputs",
        source.display(),
        manifest.command,
        manifest.config_hash,
        manifest.outputs.len()
    );
    for o in &manifest.outputs {
        for (name, style) in plot_plan(&o.name) {
            let out = w.dir().join(name);
            emit_plotdata(&source.join(&o.path), &style, &out).stage("cli")?;
            w.input(name, &out).stage("cli")?;
            println!("  {} -> {}", o.name, out.display());
        }
    }
    let _ = cfg;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct PlanStage {
    stage: String,
    detail: String,
    box_nodes: usize,
    /// Rough upper bound: index map, stencil and Krylov basis.
    memory_estimate_bytes: usize,
}

fn plan_nodes(nodes: usize) -> usize {
    nodes * 8 * 48
}

/// The resolved plan printed by `--dry-run`.
pub fn dry_run(cfg: &RunConfig) -> Result<String> {
    let mut stages = Vec::new();
    let planar_stage = |h: f64, stages: &mut Vec<PlanStage>| {
        let cross = PlanarCross {
            arm_halflength: cfg.arm_halflength,
        };
        let a1 = Sector::square_class("a1").unwrap();
        for s in [2.0 * h, h] {
            let n = planned_box_nodes(&cross, &[s, s], a1);
            stages.push(PlanStage {
                stage: "planar".into(),
                detail: format!("spacing {s}, L {}", cfg.arm_halflength),
                box_nodes: n,
                memory_estimate_bytes: plan_nodes(n),
            });
        }
    };
    let cached = |h: f64| planar_cache_path(cfg.arm_halflength, h).exists();
    match cfg.command {
        Command::Planar => planar_stage(cfg.spacing, &mut stages),
        Command::Modes | Command::Trials | Command::Certify => {
            let needs = cfg.command != Command::Modes || cfg.lambda == LambdaSource::FromPlanar;
            if needs && !cached(cfg.planar_spacing) {
                planar_stage(cfg.planar_spacing, &mut stages);
            }
            stages.push(PlanStage {
                stage: cfg.command.name().into(),
                detail: format!("1D reductions for H = {:?}, n = {}", cfg.elongations, cfg.n),
                box_nodes: 0,
                memory_estimate_bytes: 0,
            });
        }
        Command::Section => stages.push(PlanStage {
            stage: "section".into(),
            detail: format!("{:?} thresholds for H = {:?}", cfg.method, cfg.elongations),
            box_nodes: 0,
            memory_estimate_bytes: 0,
        }),
        Command::Solve3d | Command::Sweep => {
            let sectors = cfg.sectors()?.unwrap_or_else(Sector::partition_3d);
            for &h in &cfg.elongations {
                let profile = cfg.profile(h)?;
                let o = waveguide_options(cfg, &profile);
                for &(sector, _) in &sectors {
                    let d = CruciformDomain::new(profile.clone(), cfg.arm_halflength, sector)?;
                    let n = planned_box_nodes(&d, &[o.spacing_xy, o.spacing_xy, o.spacing_z], sector);
                    stages.push(PlanStage {
                        stage: "waveguide3d".into(),
                        detail: format!("H {h}, sector {sector}, spacing ({}, {})", o.spacing_xy, o.spacing_z),
                        box_nodes: n,
                        memory_estimate_bytes: plan_nodes(n),
                    });
                }
            }
        }
        Command::Report => {}
    }
    let plan = serde_json::json!({
        "config": cfg,
        "config_hash": cfg.hash(),
        "out": cfg.out,
        "planar_cached": cached(cfg.planar_spacing),
        "stages": stages,
        "total_memory_estimate_bytes": stages.iter().map(|s| s.memory_estimate_bytes).max().unwrap_or(0),
    });
    Ok(serde_json::to_string_pretty(&plan)?)
}

/// Runs a resolved configuration and writes its manifest.
pub fn run(cfg: &RunConfig) -> StageResult<()> {
    let (out_dir, source) = match cfg.command {
        Command::Report => (cfg.out.join("plot"), Some(cfg.out.clone())),
        _ => (cfg.out.clone(), None),
    };
    let mut w = ArtifactWriter::new(&out_dir, &cfg.hash()).stage("cli")?;
    let result = match cfg.command {
        Command::Planar => planar(cfg, &mut w),
        Command::Section => section(cfg, &mut w),
        Command::Modes => modes(cfg, &mut w),
        Command::Trials => trials(cfg, &mut w),
        Command::Certify => certify(cfg, &mut w),
        Command::Solve3d => solve3d(cfg, &mut w),
        Command::Sweep => sweep(cfg, &mut w),
        Command::Report => report(cfg, &mut w, source.as_deref().unwrap()),
    };
    // Consistency flags still leave a complete set of artifacts behind.
    match &result {
        Ok(()) => {}
        Err(e) if matches!(e.error, Error::Consistency(_)) => {}
        Err(_) => return result,
    }
    w.finish(cfg).stage("cli")?;
    result
}
