//! File formats: CSV tables, PGM images, matrix JSON and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryPoint;
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// `{dim, entries: [[re, im], ...]}`, row-major.
pub fn read_matrix_json(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_matrix_json(path: &Path, m: &ComplexMatrix) -> Result<()> {
    write_bytes(path, serde_json::to_string_pretty(m)?.as_bytes())
}

/// Columns `t,re,im,separable,purity,min_pt_eig`.
pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut s = String::from("t,re,im,separable,purity,min_pt_eig\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.t,
            p.z.re,
            p.z.im,
            u8::from(p.separable),
            p.purity,
            p.min_pt_eigenvalue
        );
    }
    s
}

/// Columns `re,im`.
pub fn points_csv(points: &[Complex64]) -> String {
    let mut s = String::from("re,im\n");
    for z in points {
        let _ = writeln!(s, "{},{}", z.re, z.im);
    }
    s
}

/// Record of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
    pub argv: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_owned(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: Vec::new(),
            duration_secs: 0.0,
            argv: std::env::args().collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_bytes(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/m.json");
        let m = crate::catalog::lookup("A2").unwrap().matrix;
        write_matrix_json(&path, &m).unwrap();
        assert_eq!(read_matrix_json(&path).unwrap(), m);
        assert!(matches!(read_matrix_json(&dir.path().join("missing.json")), Err(Error::Io { .. })));
    }

    #[test]
    fn trajectory_columns() {
        let p = TrajectoryPoint {
            t: 3,
            z: Complex64::new(0.5, -0.25),
            separable: true,
            purity: 0.75,
            min_pt_eigenvalue: 0.125,
        };
        assert_eq!(trajectory_csv(&[p]), "t,re,im,separable,purity,min_pt_eig\n3,0.5,-0.25,1,0.75,0.125\n");
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("shadow", serde_json::json!({"n": 10}), 42);
        m.outputs.push(dir.path().join("a.csv"));
        let path = dir.path().join("manifest.json");
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);
    }
}
