//! CSV and JSON rendering plus file writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use distorder::GridSpec;
use serde::Serialize;

use crate::CliError;

/// One file produced by a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Artifact { name: name.into(), contents: contents.into() }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Self {
        Artifact::new(name, to_json(value))
    }
}

/// `{:.16e}` prints 17 significant digits, enough to round-trip any f64.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn describe_grid(g: &GridSpec) -> String {
    let kind = if g.uniform { "uniform" } else { "custom" };
    format!("{kind} grid of {} points on [{}, {}]", g.count, g.lo + g.edge_margin, g.hi - g.edge_margin)
}

/// A two-column curve preceded by a comment row naming the functional and the grid.
pub fn curve_csv(var: &str, functional: &str, grid: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = format!("# {functional}; {grid}\n{var},value\n");
    for (x, v) in rows {
        let _ = writeln!(out, "{},{}", number(x), number(v));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    let io = |path: &Path, source| CliError::Io { path: path.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.contents).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789, 0.0] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(0.125), "1.2500000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let s = curve_csv("t", "f(t)", "three points", [(1.0, 2.0)]);
        assert_eq!(s, "# f(t); three points\nt,value\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
