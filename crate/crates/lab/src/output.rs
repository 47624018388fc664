//! Artifact files: CSV with 17 significant digits, pretty JSON, and a
//! manifest holding the config echo and a SHA-256 per artifact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::LabError;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => u8::from(*b).to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), measured, bound, pass: measured <= bound }
    }

    pub fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), measured, bound, pass: measured >= bound }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check { name: name.into(), measured: f64::from(u8::from(ok)), bound: 1.0, pass: ok }
    }
}

#[derive(Serialize)]
struct ArtifactEntry {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    config: &'a std::collections::BTreeMap<String, String>,
    artifacts: Vec<ArtifactEntry>,
}

/// Collects artifacts in memory; nothing touches the disk until `finish`.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Self {
        Artifacts { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn csv<R, C>(&mut self, name: &str, header: &[&str], rows: R) -> Result<(), LabError>
    where
        R: IntoIterator<Item = C>,
        C: IntoIterator<Item = Cell>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            let rec: Vec<String> = row.into_iter().map(|c| c.render()).collect();
            if rec.len() != header.len() {
                return Err(LabError::Io(format!("{name}: row has {} cells for {} columns", rec.len(), header.len())));
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), LabError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Writes every artifact plus `summary.json` and `manifest.json`.
    pub fn finish(mut self, subcommand: &str, config: &Config, checks: &[Check]) -> Result<PathBuf, LabError> {
        self.json("summary.json", &serde_json::json!({ "subcommand": subcommand, "checks": checks }))?;
        fs::create_dir_all(&self.dir)?;
        let mut entries = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            fs::write(self.dir.join(name), bytes)?;
            entries.push(ArtifactEntry { file: name.clone(), sha256: hex(&Sha256::digest(bytes)) });
        }
        let manifest = Manifest { subcommand, config: config.entries(), artifacts: entries };
        let path = self.dir.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(&path, bytes)?;
        Ok(path)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn manifest_hashes_match_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(dir.path());
        a.csv("t.csv", &["x", "ok"], vec![vec![Cell::from(0.5), Cell::from(true)]]).unwrap();
        assert!(a.csv("bad.csv", &["x"], vec![vec![Cell::from(1.0), Cell::from(2.0)]]).is_err());
        let mut cfg = Config::default();
        cfg.set("grid", 3);
        let m = a.finish("demo", &cfg, &[Check::flag("fine", true)]).unwrap();
        let manifest: serde_json::Value = serde_json::from_slice(&fs::read(m).unwrap()).unwrap();
        assert_eq!(manifest["config"]["grid"], "3");
        for e in manifest["artifacts"].as_array().unwrap() {
            let bytes = fs::read(dir.path().join(e["file"].as_str().unwrap())).unwrap();
            assert_eq!(e["sha256"], hex(&Sha256::digest(&bytes)));
        }
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "x,ok\n5.0000000000000000e-1,1\n");
    }
}
