//! CSV and JSON output. Every file carries the configuration that produced
//! it: as a `#` comment block in CSV, as the `config` field in JSON.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{DiagnosticSet, DiagnosticsRecord, DissipationReport};
use crate::harness::{EnsembleReport, Verdicts};
use crate::spectral::SpectralField;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: schema version {found}, expected {expected}", path.display())]
    Schema {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
}

/// Diagnostic columns of a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Columns {
    pub highfreq_k: Vec<i32>,
    pub besov_k: Vec<i32>,
    pub tail_n: Vec<u32>,
}

impl Columns {
    pub fn new(set: &DiagnosticSet, n: usize, length: f64) -> Self {
        let probe = SpectralField::zeros(n, length).expect("validated grid");
        let (lo, hi) = probe.dyadic_range(n as f64 / 2.0);
        Self {
            highfreq_k: set.highfreq_k.clone(),
            besov_k: (lo..=hi).collect(),
            tail_n: set.tail_n.clone(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string(), "I".into(), "mean_u".into()];
        h.extend(self.highfreq_k.iter().map(|k| format!("I_gt_{k}")));
        h.extend(self.besov_k.iter().map(|k| format!("besov_{k}")));
        h.extend(self.tail_n.iter().map(|n| format!("J_{n}")));
        h.push("residual".into());
        h.push("h2".into());
        h
    }

    pub fn row(&self, r: &DiagnosticsRecord) -> Vec<f64> {
        let mut v = vec![r.t, r.energy, r.mean_u];
        v.extend(self.highfreq_k.iter().map(|k| r.highfreq.get(k).copied().unwrap_or(f64::NAN)));
        v.extend(self.besov_k.iter().map(|k| r.besov_blocks.get(k).copied().unwrap_or(f64::NAN)));
        v.extend(self.tail_n.iter().map(|n| r.tail.get(n).copied().unwrap_or(f64::NAN)));
        v.push(r.conservation_residual);
        v.push(r.h2_norm);
        v
    }
}

/// 17 significant digits: enough to round-trip any double.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(
    mut w: W,
    config: &str,
    columns: &Columns,
    records: &[DiagnosticsRecord],
) -> io::Result<()> {
    writeln!(w, "# schema_version = {SCHEMA_VERSION}")?;
    for line in config.lines() {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{}", columns.header().join(","))?;
    for r in records {
        let row: Vec<String> = columns.row(r).into_iter().map(format_number).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn save_csv(
    path: &Path,
    config: &str,
    columns: &Columns,
    records: &[DiagnosticsRecord],
) -> Result<(), IoError> {
    let file_err = |source| IoError::File {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, config, columns, records).map_err(file_err)?;
    fs::write(path, buf).map_err(file_err)
}

/// Final state on the grid, for restarts and plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub t: f64,
    pub length: f64,
    pub values: Vec<f64>,
}

impl FinalState {
    pub fn new(t: f64, u: &SpectralField) -> Self {
        Self {
            t,
            length: u.length(),
            values: u.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub schema_version: u32,
    pub config: String,
    pub columns: Columns,
    pub records: Vec<DiagnosticsRecord>,
    pub dissipation: Option<DissipationReport>,
    pub final_state: Option<FinalState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDocument {
    pub schema_version: u32,
    pub config: String,
    pub report: EnsembleReport,
    pub verdicts: Verdicts,
}

trait Versioned {
    fn version(&self) -> u32;
}

impl Versioned for RunDocument {
    fn version(&self) -> u32 {
        self.schema_version
    }
}

impl Versioned for EnsembleDocument {
    fn version(&self) -> u32 {
        self.schema_version
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T: DeserializeOwned + Versioned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: T = serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if doc.version() != SCHEMA_VERSION {
        return Err(IoError::Schema {
            path: path.to_path_buf(),
            found: doc.version(),
            expected: SCHEMA_VERSION,
        });
    }
    Ok(doc)
}

pub fn load_run(path: &Path) -> Result<RunDocument, IoError> {
    load(path)
}

pub fn load_ensemble(path: &Path) -> Result<EnsembleDocument, IoError> {
    load(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn record() -> DiagnosticsRecord {
        let u = SpectralField::from_fn(32, 1.0, |x| (2.0 * PI * x).sin()).unwrap();
        let set = DiagnosticSet {
            highfreq_k: vec![0, 1],
            tail_n: vec![],
        };
        DiagnosticsRecord::compute(0.5, &u, &set).unwrap()
    }

    fn columns() -> Columns {
        let set = DiagnosticSet {
            highfreq_k: vec![0, 1],
            tail_n: vec![],
        };
        Columns::new(&set, 32, 1.0)
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, "mode = \"viscous\"", &columns(), &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].starts_with("t,I,mean_u,I_gt_0,I_gt_1,besov_0"));
        assert!(lines[0].ends_with("residual,h2"));
        assert!(text.contains("# mode = \"viscous\""));
    }

    #[test]
    fn one_row_matches_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, "", &columns(), &[record()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines.len(), 2);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), lines[0].split(',').count());
        let energy: f64 = cells[1].parse().unwrap();
        assert_eq!(energy, record().energy);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, PI * 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_round_trip_and_schema_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let doc = RunDocument {
            schema_version: SCHEMA_VERSION,
            config: "mode = \"viscous\"\n".into(),
            columns: columns(),
            records: vec![record()],
            dissipation: None,
            final_state: Some(FinalState::new(
                0.5,
                &SpectralField::from_fn(8, 1.0, |x| x).unwrap(),
            )),
        };
        save_json(&path, &doc).unwrap();
        assert_eq!(load_run(&path).unwrap(), doc);
        let mut old = doc.clone();
        old.schema_version = 0;
        save_json(&path, &old).unwrap();
        assert!(matches!(load_run(&path), Err(IoError::Schema { .. })));
        let missing = dir.path().join("nope.json");
        let err = load_run(&missing).unwrap_err();
        assert!(err.to_string().contains("nope.json"));
    }
}
