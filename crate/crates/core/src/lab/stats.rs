use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let radius = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - radius).max(0.0), (centre + radius).min(1.0))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub success: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub runtime_ms: u64,
    #[serde(flatten)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, params: BTreeMap<String, f64>, rows: Vec<TrialRow>, metrics: BTreeMap<String, f64>) -> Self {
        let trials = rows.len() as u64;
        let successes = rows.iter().filter(|r| r.success).count() as u64;
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        Self {
            experiment: experiment.to_string(),
            params,
            trials,
            successes,
            estimate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            runtime_ms: 0,
            metrics,
            rows,
        }
    }

    /// One-sided check of `Pr >= bound - slack`: the whole interval must
    /// clear it.
    pub fn at_least(&self, bound: f64, slack: f64) -> bool {
        self.ci_low >= bound - slack
    }

    /// One-sided check of `Pr <= bound + slack`.
    pub fn at_most(&self, bound: f64, slack: f64) -> bool {
        self.ci_high <= bound + slack
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "experiment,trial,success,value")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", self.experiment, r.trial, u8::from(r.success), r.value)?;
        }
        Ok(())
    }
}
