//! Plot-ready text files from CSV artifacts: whitespace-separated columns
//! with `#` header comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::loglog_fit;

#[derive(Debug, Clone, PartialEq)]
pub enum PlotStyle {
    /// Two columns for log-log axes; the fitted slope goes in the header.
    LogLog { x: String, y: String },
    /// Selected columns as they are. With `block_on` set, a blank line
    /// separates runs of equal values in that column (grid heatmaps).
    Columns { columns: Vec<String>, block_on: Option<String> },
}

struct Table {
    comments: Vec<String>,
    names: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::config(format!("artifact {}: {e}", path.display())))?;
    let mut comments = Vec::new();
    let mut lines = text.lines().filter(|l| {
        if let Some(c) = l.strip_prefix('#') {
            comments.push(c.trim().to_string());
            false
        } else {
            !l.trim().is_empty()
        }
    });
    let names = lines
        .next()
        .ok_or_else(|| Error::config(format!("artifact {} has no header row", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
    Ok(Table { comments, names, rows })
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::config(format!("artifact has no column {name:?} (columns: {})", self.names.join(","))))
    }
}

/// Converts the CSV artifact at `artifact` into a plot file at `out`.
pub fn emit_plotdata(artifact: &Path, style: &PlotStyle, out: &Path) -> Result<()> {
    let table = read_csv(artifact)?;
    let mut s = String::new();
    for c in &table.comments {
        writeln!(s, "# {c}").unwrap();
    }
    writeln!(s, "# source = {}", artifact.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())).unwrap();
    match style {
        PlotStyle::LogLog { x, y } => {
            let (ix, iy) = (table.column(x)?, table.column(y)?);
            let pts: Vec<(f64, f64)> = table
                .rows
                .iter()
                .filter_map(|r| Some((r.get(ix)?.parse().ok()?, r.get(iy)?.parse::<f64>().ok()?)))
                .filter(|&(a, b)| a > 0.0 && b > 0.0)
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            match loglog_fit(&xs, &ys) {
                Ok(f) => writeln!(s, "# loglog slope = {:.6} intercept = {:.6} r2 = {:.6}", f.slope, f.intercept, f.r_squared),
                Err(_) => writeln!(s, "# loglog slope = n/a"),
            }
            .unwrap();
            writeln!(s, "# {x} {y}").unwrap();
            for (a, b) in pts {
                writeln!(s, "{a:.12e} {b:.12e}").unwrap();
            }
        }
        PlotStyle::Columns { columns, block_on } => {
            let idx: Vec<usize> = columns.iter().map(|c| table.column(c)).collect::<Result<_>>()?;
            let block = block_on.as_deref().map(|b| table.column(b)).transpose()?;
            writeln!(s, "# {}", columns.join(" ")).unwrap();
            let mut last: Option<&str> = None;
            for r in &table.rows {
                if let Some(b) = block {
                    let v = r.get(b).map(String::as_str);
                    if last.is_some() && v != last {
                        s.push('\n');
                    }
                    last = v;
                }
                let vals: Vec<&str> = idx.iter().map(|&i| r.get(i).map_or("nan", |v| if v.is_empty() { "nan" } else { v })).collect();
                writeln!(s, "{}", vals.join(" ")).unwrap();
            }
        }
    }
    if let Some(parent) = out.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(out, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_header_carries_the_slope() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("dev.csv");
        fs::write(&a, "# manifest=manifest.json config_hash=x\nH,dev\n10,0.1\n100,0.01\n1000,0.001\n").unwrap();
        let o = dir.path().join("dev.dat");
        emit_plotdata(&a, &PlotStyle::LogLog { x: "H".into(), y: "dev".into() }, &o).unwrap();
        let text = fs::read_to_string(&o).unwrap();
        assert!(text.contains("config_hash=x"));
        assert!(text.contains("slope = -1.000000"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }

    #[test]
    fn heatmap_blocks_are_separated() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("u.csv");
        fs::write(&a, "x1,x2,u\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n").unwrap();
        let o = dir.path().join("u.dat");
        let style = PlotStyle::Columns {
            columns: vec!["x1".into(), "x2".into(), "u".into()],
            block_on: Some("x1".into()),
        };
        emit_plotdata(&a, &style, &o).unwrap();
        let text = fs::read_to_string(&o).unwrap();
        assert_eq!(text.matches("\n\n").count(), 1);
    }

    #[test]
    fn missing_artifact_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let style = PlotStyle::LogLog { x: "a".into(), y: "b".into() };
        assert!(emit_plotdata(&dir.path().join("nope.csv"), &style, &dir.path().join("o")).is_err());
    }
}
