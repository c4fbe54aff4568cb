//! Estimators for trial frequencies.
//!
//! Rates come with normal-approximation standard errors; the Wilson score
//! interval is reported alongside for small or extreme counts.

use serde::{Deserialize, Serialize};

/// A binomial proportion estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: u64,
    pub of: u64,
    pub estimate: f64,
    /// Normal-approximation standard error `sqrt(p(1-p)/n)`.
    pub std_error: f64,
    /// 95% Wilson score interval.
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl Rate {
    pub fn from_counts(count: u64, of: u64) -> Rate {
        if of == 0 {
            return Rate { count, of, estimate: 0.0, std_error: 0.0, wilson_low: 0.0, wilson_high: 1.0 };
        }
        let n = of as f64;
        let p = count as f64 / n;
        let std_error = (p * (1.0 - p) / n).sqrt();
        let (wilson_low, wilson_high) = wilson(p, n, 1.96);
        Rate { count, of, estimate: p, std_error, wilson_low, wilson_high }
    }

    /// `estimate - k * std_error`, the usual acceptance-gate lower edge.
    pub fn lower(&self, k: f64) -> f64 {
        self.estimate - k * self.std_error
    }
}

fn wilson(p: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Streaming step statistics, mergeable across trial chunks.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub mean: f64,
    pub p50: u64,
    pub p90: u64,
    pub max: u64,
}

pub fn step_stats(mut steps: Vec<u64>) -> StepStats {
    if steps.is_empty() {
        return StepStats::default();
    }
    steps.sort_unstable();
    let total: u128 = steps.iter().map(|&s| s as u128).sum();
    let pct = |q: f64| steps[((steps.len() - 1) as f64 * q).round() as usize];
    StepStats {
        mean: total as f64 / steps.len() as f64,
        p50: pct(0.5),
        p90: pct(0.9),
        max: *steps.last().unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_basics() {
        let r = Rate::from_counts(50, 100);
        assert!((r.estimate - 0.5).abs() < 1e-12);
        assert!((r.std_error - 0.05).abs() < 1e-12);
        assert!(r.wilson_low < 0.5 && 0.5 < r.wilson_high);
    }

    #[test]
    fn steps_percentiles() {
        let s = step_stats((1..=100).collect());
        assert_eq!(s.p50, 51, "nearest-rank on an even count rounds up");
        assert_eq!(s.p90, 90);
        assert_eq!(s.max, 100);
    }
}
