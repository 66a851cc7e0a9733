//! Check records, reports and their JSON / CSV serialisations.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Non-finite values become `null` in JSON and
//! `NaN` / `inf` in CSV.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::RunConfig;

/// Formats `x` with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn raw_float(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format_float(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn serialize_float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw_float(*x).serialize(s)
}

/// One check; `pass` holds exactly when `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    #[serde(serialize_with = "serialize_float")]
    pub residual: f64,
    #[serde(serialize_with = "serialize_float")]
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, paper_anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            paper_anchor: paper_anchor.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// A check that could not be evaluated. The residual is NaN, so it fails.
    pub fn failed(name: impl Into<String>, paper_anchor: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, paper_anchor, f64::NAN, tolerance)
    }
}

/// Extra scalar output of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Float(x) => raw_float(*x).serialize(s),
            Quantity::Int(i) => s.serialize_i64(*i),
            Quantity::Bool(b) => s.serialize_bool(*b),
            Quantity::Text(t) => s.serialize_str(t),
        }
    }
}

/// Named quantities, kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Quantities(Vec<(String, Quantity)>);

impl Quantities {
    pub fn push(&mut self, name: impl Into<String>, value: Quantity) {
        self.0.push((name.into(), value));
    }

    pub fn float(&mut self, name: impl Into<String>, x: f64) {
        self.push(name, Quantity::Float(x));
    }

    pub fn get(&self, name: &str) -> Option<&Quantity> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, q)| q)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for Quantities {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub quantities: Quantities,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<CheckRecord>, quantities: Quantities, wall_time_ms: u64) -> Self {
        let pass = checks.iter().filter(|c| c.pass).count();
        let summary = Summary {
            pass,
            fail: checks.len() - pass,
            wall_time_ms,
        };
        Self {
            config,
            checks,
            summary,
            quantities,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
            w.write_record(["name", "paper_anchor", "residual", "tolerance", "pass"])?;
            for c in &self.checks {
                w.write_record([
                    c.name.as_str(),
                    c.paper_anchor.as_str(),
                    &format_float(c.residual),
                    &format_float(c.tolerance),
                    if c.pass { "true" } else { "false" },
                ])?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flushed")).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, FactorSpec, Format, ScanCheck};

    fn config() -> RunConfig {
        RunConfig {
            command: Command::VerifyProduct,
            p: 1,
            q: 1,
            a: "0.5".parse().unwrap(),
            b: "1.5".parse().unwrap(),
            factor: FactorSpec::Round,
            factor_prime: FactorSpec::Deformed(0.5),
            tol_algebraic: 1e-12,
            tol_fd: 1e-4,
            seed: 0,
            samples: 3,
            check: ScanCheck::Einstein,
            format: Format::Json,
            out: None,
            timing: false,
        }
    }

    #[test]
    fn empty_report_has_zero_summary() {
        let r = Report::new(config(), vec![], Quantities::default(), 0);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["summary"]["pass"], 0);
        assert_eq!(v["summary"]["fail"], 0);
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert!(r.all_pass());
    }

    #[test]
    fn single_passing_record() {
        let r = Report::new(
            config(),
            vec![CheckRecord::new("x", "J^2 = -I", 1e-15, 1e-12)],
            Quantities::default(),
            0,
        );
        assert_eq!(r.summary.pass, 1);
        assert!(r.all_pass());
    }

    #[test]
    fn json_keys_in_stable_order() {
        let r = Report::new(config(), vec![CheckRecord::new("x", "anchor", 0.1, 1.0)], Quantities::default(), 0);
        let s = r.to_json();
        let pos = |k: &str| s.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("config") < pos("checks") && pos("checks") < pos("summary") && pos("summary") < pos("quantities"));
        assert!(pos("name") < pos("paper_anchor") && pos("paper_anchor") < pos("residual") && pos("residual") < pos("tolerance"));
        assert!(s.contains("\"residual\": 1.0000000000000001e-1"));
        assert!(s.contains("\"factor_prime\": \"deformed:0.5\""));
    }

    #[test]
    fn floats_round_trip_through_both_formats() {
        let values = [0.1, 1.0 / 3.0, 2f64.sqrt() * 1e-13, 123456.789, 0.0];
        let checks: Vec<CheckRecord> = values.iter().map(|&x| CheckRecord::new("x", "a", x, 1e-4)).collect();
        let r = Report::new(config(), checks, Quantities::default(), 0);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for (i, x) in values.iter().enumerate() {
            assert_eq!(v["checks"][i]["residual"].as_f64().unwrap(), *x);
        }
        let text = r.to_csv();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        for (row, x) in rd.records().zip(values) {
            let row = row.unwrap();
            assert_eq!(row[2].parse::<f64>().unwrap(), x);
            assert_eq!(&row[4] == "true", x <= 1e-4);
        }
    }

    #[test]
    fn failed_record_is_null_in_json() {
        let r = Report::new(
            config(),
            vec![CheckRecord::failed("chart", "chart exists", 1e-4)],
            Quantities::default(),
            0,
        );
        assert!(!r.all_pass());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v["checks"][0]["residual"].is_null());
        assert_eq!(v["checks"][0]["pass"], false);
        assert!(r.to_csv().contains("NaN"));
    }

    #[test]
    fn quantities_keep_insertion_order() {
        let mut q = Quantities::default();
        q.float("zeta", 1.0);
        q.push("alpha", Quantity::Bool(true));
        let r = Report::new(config(), vec![], q, 0);
        let s = r.to_json();
        assert!(s.find("zeta").unwrap() < s.find("alpha").unwrap());
    }
}
