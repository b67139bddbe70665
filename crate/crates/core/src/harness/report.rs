use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(n, value)` point of an experiment series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub tolerance: f64,
    /// Human-readable statement of what `pass` certifies.
    pub rule: String,
}

/// Outcome of one harness experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub series: Vec<SeriesPoint>,
    pub fitted_rate: Option<f64>,
    /// Scalar side results, such as the control distance of the lattice run.
    pub metrics: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub(crate) fn new(experiment: &str, series: Vec<SeriesPoint>, verdict: Verdict) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::InvalidArgument(format!("{experiment}: empty series")));
        }
        Ok(Self {
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            series,
            fitted_rate: None,
            metrics: BTreeMap::new(),
            verdict,
            notes: Vec::new(),
            artifacts: Vec::new(),
        })
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn note(mut self, text: &str) -> Self {
        self.notes.push(text.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.pass
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The series as CSV with header `n,sup_error`.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("n,sup_error\n");
        for p in &self.series {
            out.push_str(&format!("{},{}\n", p.n, p.value));
        }
        out
    }
}

/// Least-squares slope of `ln value` against `ln n`, dropping the smallest
/// `n` when at least three points remain. `None` if fewer than two usable
/// (positive) points are left.
pub fn fit_loglog_slope(series: &[SeriesPoint]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|p| p.n > 0 && p.value > 0.0)
        .map(|p| ((p.n as f64).ln(), p.value.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() >= 3 {
        pts.remove(0);
    }
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Points of the sup-norm grids.
pub const GRID_POINTS: usize = 2001;
const BRANCH_EXCLUSION: f64 = 1e-9;

/// `GRID_POINTS` uniform points on `[−0.5, edge + 0.5]`, minus those within
/// `1e−9` of a branch point.
pub fn sup_grid(edge: f64, branch_points: &[f64]) -> Vec<f64> {
    let lo = -0.5;
    let hi = edge + 0.5;
    let h = (hi - lo) / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS)
        .map(|i| lo + h * i as f64)
        .filter(|x| branch_points.iter().all(|b| (x - b).abs() > BRANCH_EXCLUSION))
        .collect()
}
