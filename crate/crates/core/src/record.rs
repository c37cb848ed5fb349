//! Result rows and their CSV / JSON serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OtocError, Result};
use crate::otoc::{Method, OtocValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocRecord {
    pub t: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "G1")]
    pub g1: Option<f64>,
    #[serde(rename = "G2")]
    pub g2: Option<f64>,
    pub method: Method,
    pub seed: Option<u64>,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl OtocRecord {
    pub fn new(t: f64, g: f64, method: Method) -> Self {
        Self { t, g, g1: None, g2: None, method, seed: None, extra: BTreeMap::new() }
    }

    pub fn from_value(t: f64, v: &OtocValue, seed: Option<u64>) -> Self {
        let mut r = Self { t, g: v.g, g1: v.g1, g2: v.g2, method: v.method, seed, extra: BTreeMap::new() };
        if let Some(se) = v.std_err {
            r.extra.insert("SE".into(), se);
        }
        r
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    /// `|G − (G1 − G2)|` when both parts are present.
    pub fn split_defect(&self) -> Option<f64> {
        Some((self.g - (self.g1? - self.g2?)).abs())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

fn check_records(records: &[OtocRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(OtocError::InvalidArgument("no records to write".into()));
    }
    if records.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(OtocError::InvalidArgument("records must be sorted by t".into()));
    }
    for r in records {
        if let Some(defect) = r.split_defect() {
            if defect > 1e-9 {
                return Err(OtocError::InvalidArgument(format!("G != G1 - G2 at t = {} (defect {defect:.3e})", r.t)));
            }
        }
    }
    Ok(())
}

/// Header `t,G,G1,G2,method,seed` followed by the union of extra keys in
/// lexicographic order. Missing values are left empty.
pub fn to_csv(records: &[OtocRecord]) -> Result<String> {
    check_records(records)?;
    let keys: std::collections::BTreeSet<&str> =
        records.iter().flat_map(|r| r.extra.keys().map(String::as_str)).collect();
    let mut out = String::from("t,G,G1,G2,method,seed");
    for k in &keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            format_float(r.t),
            format_float(r.g),
            opt(r.g1),
            opt(r.g2),
            r.method.as_str(),
            r.seed.map(|s| s.to_string()).unwrap_or_default()
        );
        for k in &keys {
            out.push(',');
            out.push_str(&opt(r.extra.get(*k).copied()));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn to_json(records: &[OtocRecord]) -> Result<String> {
    check_records(records)?;
    let mut s = serde_json::to_string_pretty(records)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| OtocError::Io { path: dir.display().to_string(), source: e })?;
        }
    }
    std::fs::write(path, text).map_err(|e| OtocError::Io { path: path.display().to_string(), source: e })
}

pub fn emit_csv(records: &[OtocRecord], path: &Path) -> Result<()> {
    write_text(path, &to_csv(records)?)
}

pub fn emit_json(records: &[OtocRecord], path: &Path) -> Result<()> {
    write_text(path, &to_json(records)?)
}
