//! Experiment reports: per-threshold rows plus metadata, and their CSV,
//! plot-data and JSON forms.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::dobrushin::fmt_f64;
use crate::error::{domain, Result};

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return domain("Wilson interval needs at least one trial");
    }
    if successes > trials {
        return domain(format!("{successes} successes exceed {trials} trials"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return domain(format!("confidence must lie in (0, 1), got {confidence}"));
    }
    let z = normal_quantile(confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((low, high))
}

/// Two-sided standard normal quantile `z` with `P(|Z| ≤ z) = confidence`.
pub fn normal_quantile(confidence: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

/// One threshold of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub curve: String,
    pub t: f64,
    /// Frequency of `g - centre ≥ t`.
    pub upper_freq: f64,
    /// Frequency of `centre - g ≥ t`.
    pub lower_freq: f64,
    /// Frequency of the event the curve bounds.
    pub tested_freq: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `None` when the curve's hypotheses fail.
    pub bound: Option<f64>,
    /// `ci_low ≤ bound`.
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: String,
    pub seed: u64,
    pub replicas: usize,
    /// Draws used to estimate the centre.
    pub pilot_replicas: usize,
    /// Draws used for the frequencies.
    pub measured_replicas: usize,
    pub confidence: f64,
    /// What the deviations are measured from: `mean`, `median` or `none`.
    pub centre_kind: String,
    /// Where the centre came from: `pilot`, `exact` or `none`.
    pub centre_source: String,
    pub centre: f64,
    /// Mean and median of the functional over the pilot draws.
    pub pilot_mean: f64,
    pub pilot_median: f64,
    /// Some hypothesis of a curve fails; the rows are informational only.
    pub hypothesis_violated: bool,
    pub warnings: Vec<String>,
    /// Named auxiliary quantities such as certified norms.
    pub extras: BTreeMap<String, f64>,
    pub rows: Vec<ReportRow>,
    /// Wall-clock seconds; kept out of the CSV so that it stays reproducible.
    pub runtime_secs: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl ExperimentReport {
    /// Every row with a bound is satisfied and no hypothesis is violated.
    pub fn all_satisfied(&self) -> bool {
        !self.hypothesis_violated && self.rows.iter().all(|r| r.satisfied)
    }

    /// Largest `tested_freq - bound` over rows with a bound.
    pub fn worst_excess(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.bound.map(|b| r.tested_freq - b))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `curve,t,upper_freq,lower_freq,tested_freq,ci_low,ci_high,bound,satisfied`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "curve",
            "t",
            "upper_freq",
            "lower_freq",
            "tested_freq",
            "ci_low",
            "ci_high",
            "bound",
            "satisfied",
        ])?;
        for r in &self.rows {
            wtr.write_record([
                r.curve.clone(),
                fmt_f64(r.t),
                fmt_f64(r.upper_freq),
                fmt_f64(r.lower_freq),
                fmt_f64(r.tested_freq),
                fmt_f64(r.ci_low),
                fmt_f64(r.ci_high),
                opt(r.bound),
                r.satisfied.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Plot-ready columns `curve,t,empirical,ci_low,ci_high,bound`.
    pub fn write_plot_data<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["curve", "t", "empirical", "ci_low", "ci_high", "bound"])?;
        for r in &self.rows {
            wtr.write_record([
                r.curve.clone(),
                fmt_f64(r.t),
                fmt_f64(r.tested_freq),
                fmt_f64(r.ci_low),
                fmt_f64(r.ci_high),
                opt(r.bound),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} seed={} replicas={} ({} pilot, {} measured) centre={} ({}, {})\n",
            self.kind,
            self.seed,
            self.replicas,
            self.pilot_replicas,
            self.measured_replicas,
            self.centre,
            self.centre_kind,
            self.centre_source
        );
        if self.hypothesis_violated {
            s.push_str("hypothesis violated: rows are informational\n");
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        for r in &self.rows {
            s.push_str(&format!(
                "{:<14} t={:<10.4} freq={:<10.6} ci=[{:.6}, {:.6}] bound={} {}\n",
                r.curve,
                r.t,
                r.tested_freq,
                r.ci_low,
                r.ci_high,
                r.bound.map(|b| format!("{b:.6}")).unwrap_or_else(|| "-".into()),
                match (r.bound, r.satisfied) {
                    (None, _) => "informational",
                    (Some(_), true) => "ok",
                    (Some(_), false) => "EXCEEDED",
                }
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 5e-4 && (hi - 0.5962).abs() < 5e-4);
        assert_eq!(wilson_interval(100, 100, 0.95).unwrap().1, 1.0);
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!(wilson_interval(3, 2, 0.95).is_err());
    }
}
