//! Spectrum report records and their CSV / JSON serializations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use delay_spectra::asymptotics::AsymptoticPrediction;
use delay_spectra::Root;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "family,n,k,re,im,residual,method,certified";

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub family: String,
    pub n: u64,
    pub k: Option<i64>,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub method: String,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rouche_margin: Option<f64>,
}

impl From<&Root> for RootRecord {
    fn from(r: &Root) -> Self {
        Self {
            family: r.family.kind.token().to_string(),
            n: r.n,
            k: r.k,
            re: r.lambda.re,
            im: r.lambda.im,
            residual: r.residual,
            method: r.method.token().to_string(),
            certified: r.certified,
            rouche_margin: r.rouche_margin,
        }
    }
}

impl RootRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_float(self.re),
            fmt_float(self.im),
            fmt_float(self.residual),
            self.method,
            self.certified
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub family: String,
    pub n: u64,
    pub k: Option<i64>,
    pub x_pred: f64,
    pub y_pred: f64,
    pub order_note: String,
}

impl From<&AsymptoticPrediction> for PredictionRecord {
    fn from(p: &AsymptoticPrediction) -> Self {
        Self {
            family: p.family.kind.token().to_string(),
            n: p.n,
            k: p.k,
            x_pred: p.x_pred,
            y_pred: p.y_pred,
            order_note: p.order_note.clone(),
        }
    }
}

/// Effective settings and provenance echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub family: String,
    pub h: f64,
    pub theta: f64,
    pub settings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub meta: ReportMeta,
    pub roots: Vec<RootRecord>,
    pub predictions: Vec<PredictionRecord>,
}

impl SpectrumReport {
    pub fn new(meta: ReportMeta, mut roots: Vec<RootRecord>, predictions: Vec<PredictionRecord>) -> Self {
        roots.sort_by(|a, b| {
            a.n.cmp(&b.n).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im))
        });
        Self { meta, roots, predictions }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.roots.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.roots {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}
