//! Machine-readable result records.
//!
//! CSV columns, always with a header row:
//!
//! ```text
//! method,M,N,d,r,phi,noise_sigma,realizations,L1,L2,seed,Q_mean,Q_stderr,Q_imag,wall_time_s
//! ```
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the identical `f64`. `wall_time_s` is left empty unless timing output is
//! requested, which keeps files byte-identical across reruns of the same seed.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimateResult, Method};
use crate::experiments::{RSweepRow, ScanResult, ScanSpec};

pub const CSV_HEADER: [&str; 15] = [
    "method",
    "M",
    "N",
    "d",
    "r",
    "phi",
    "noise_sigma",
    "realizations",
    "L1",
    "L2",
    "seed",
    "Q_mean",
    "Q_stderr",
    "Q_imag",
    "wall_time_s",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    /// One JSON object per line.
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            other => Err(Error::InvalidSpec(format!("unknown output format '{other}'"))),
        }
    }
}

/// One output row: the full resolved configuration plus the estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub method: Method,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: u32,
    pub r: f64,
    pub phi: f64,
    pub noise_sigma: f64,
    pub realizations: usize,
    #[serde(rename = "L1")]
    pub l1: usize,
    #[serde(rename = "L2")]
    pub l2: usize,
    pub seed: u64,
    #[serde(rename = "Q_mean")]
    pub q_mean: f64,
    #[serde(rename = "Q_stderr")]
    pub q_stderr: f64,
    #[serde(rename = "Q_imag")]
    pub q_imag: f64,
    #[serde(rename = "wall_time_s")]
    pub wall_time: Option<f64>,
    /// `Q/Q(φ≈0)` within the originating scan; JSON output only.
    #[serde(rename = "Q_normalized", skip_serializing_if = "Option::is_none", default)]
    pub q_normalized: Option<f64>,
}

impl Record {
    fn from_spec(spec: &ScanSpec, phi: f64, mean: f64, stderr: f64, imag: f64, wall: f64) -> Self {
        Record {
            method: spec.method,
            m: spec.m,
            n: spec.order,
            d: spec.d,
            r: spec.radius,
            phi,
            noise_sigma: spec.noise_sigma,
            realizations: spec.realizations,
            l1: spec.l1,
            l2: spec.l2,
            seed: spec.seed,
            q_mean: mean,
            q_stderr: stderr,
            q_imag: imag,
            wall_time: Some(wall),
            q_normalized: None,
        }
    }

    /// Record for a single estimate produced under `spec` at `phi`.
    pub fn from_estimate(spec: &ScanSpec, phi: f64, est: &EstimateResult) -> Self {
        Self::from_spec(spec, phi, est.mean, est.stderr, est.imag_diagnostic, est.wall_time)
    }
}

pub fn scan_records(result: &ScanResult) -> Vec<Record> {
    let normalized = result.normalized();
    result
        .rows
        .iter()
        .zip(normalized)
        .map(|(row, norm)| Record {
            q_normalized: Some(norm),
            ..Record::from_spec(&result.spec, row.phi, row.q_mean, row.q_stderr, row.q_imag, row.wall_time)
        })
        .collect()
}

/// Records for an r-sweep; `template` supplies M, N, φ and the remaining fields.
pub fn r_sweep_records(template: &ScanSpec, phi: f64, rows: &[RSweepRow]) -> Vec<Record> {
    rows.iter()
        .map(|row| {
            let spec = ScanSpec {
                radius: row.radius,
                method: Method::Vcp,
                ..template.clone()
            };
            Record::from_estimate(&spec, phi, &row.estimate)
        })
        .collect()
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_records<W: Write>(records: &[Record], format: Format, timing: bool, writer: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(CSV_HEADER)?;
            for r in records {
                let wall = match (timing, r.wall_time) {
                    (true, Some(t)) => fmt_f64(t),
                    _ => String::new(),
                };
                w.write_record([
                    r.method.as_str().to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.d.to_string(),
                    fmt_f64(r.r),
                    fmt_f64(r.phi),
                    fmt_f64(r.noise_sigma),
                    r.realizations.to_string(),
                    r.l1.to_string(),
                    r.l2.to_string(),
                    r.seed.to_string(),
                    fmt_f64(r.q_mean),
                    fmt_f64(r.q_stderr),
                    fmt_f64(r.q_imag),
                    wall,
                ])?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = writer;
            for r in records {
                let r = Record {
                    wall_time: r.wall_time.filter(|_| timing),
                    ..r.clone()
                };
                serde_json::to_writer(&mut w, &r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Writes a scan to `path` in the requested format.
pub fn write_results(result: &ScanResult, format: Format, path: &Path, timing: bool) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_records(&scan_records(result), format, timing, file)
}

/// Parses CSV written by [`write_records`].
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Record>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidSpec(format!("unexpected CSV header: {header:?}")));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let f = |i: usize| -> Result<f64> {
                field(i)
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad float in column {}: '{}'", CSV_HEADER[i], field(i))))
            };
            let u = |i: usize| -> Result<u64> {
                field(i)
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad integer in column {}: '{}'", CSV_HEADER[i], field(i))))
            };
            Ok(Record {
                method: field(0).parse()?,
                m: u(1)? as usize,
                n: u(2)? as usize,
                d: u(3)? as u32,
                r: f(4)?,
                phi: f(5)?,
                noise_sigma: f(6)?,
                realizations: u(7)? as usize,
                l1: u(8)? as usize,
                l2: u(9)? as usize,
                seed: u(10)?,
                q_mean: f(11)?,
                q_stderr: f(12)?,
                q_imag: f(13)?,
                wall_time: if field(14).is_empty() { None } else { Some(f(14)?) },
                q_normalized: None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{fringe_scan, phi_grid};
    use proptest::prelude::*;

    fn to_string(records: &[Record], format: Format, timing: bool) -> String {
        let mut buf = Vec::new();
        write_records(records, format, timing, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_scan_is_header_only() {
        let result = ScanResult {
            spec: ScanSpec::new(4, Method::Conjecture),
            rows: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_results(&result, Format::Csv, &path, false).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn single_conjecture_row() {
        let spec = ScanSpec::new(10, Method::Conjecture).with_phis(vec![0.0]);
        let records = scan_records(&fringe_scan(&spec).unwrap());
        let text = to_string(&records, Format::Csv, false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(row.len(), 15);
        assert_eq!(row[0], "conjecture");
        assert_eq!(row[11].parse::<f64>().unwrap(), 1.0);
        assert_eq!(row[12].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[14], "");
    }

    #[test]
    fn csv_round_trip_recovers_config() {
        let spec = ScanSpec::new(5, Method::Qcp)
            .with_phis(phi_grid(-0.1, 0.1, 3))
            .with_ensemble(4, 10)
            .with_noise(0.1, 2)
            .with_seed(u64::MAX - 3);
        let records = scan_records(&fringe_scan(&spec).unwrap());
        let text = to_string(&records, Format::Csv, true);
        let back = read_csv(text.as_bytes()).unwrap();
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(Record { q_normalized: None, ..a.clone() }, *b);
        }
    }

    #[test]
    fn jsonl_lines_parse() {
        let spec = ScanSpec::new(3, Method::Exact).with_phis(vec![0.0, 0.2]);
        let records = scan_records(&fringe_scan(&spec).unwrap());
        let text = to_string(&records, Format::Jsonl, false);
        let parsed: Vec<Record> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].q_mean, records[1].q_mean);
        assert_eq!(parsed[0].q_normalized, Some(1.0));
        assert!(parsed[0].wall_time.is_none());
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn float_fields_round_trip_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
