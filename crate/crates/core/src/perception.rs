//! Parameter-free anomaly kernel over Euclidean deviations from the median.
//!
//! Deviations from the coordinate-wise median are modelled as uniform noise
//! on `[0, support]` with `support = 2 * mean deviation`. Among `n` such
//! points, a spacing of at least `g` occurs with expectation
//! `n * (1 - g / support)^(n - 1)`; `gap_star` is the spacing at which that
//! expectation is exactly one.
//!
//! Fitting sorts the deviations and looks for the anomalous tail: the first
//! spacing in the upper half of the sorted deviations that is both wider
//! than `gap_star` and at least as wide as the uniform support of everything
//! below it. Points past that spacing cannot be produced by the retained
//! points' own noise model. The largest retained deviation is the `edge`
//! and `cutoff = edge + gap_star` is where the expectation of occurrence
//! drops below one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{coordinate_median, distance_unchecked};

/// Largest f64 strictly below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Member,
    Anomaly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionModel {
    median: Vec<f64>,
    n: usize,
    mu: f64,
    support: f64,
    gap_star: f64,
    edge: f64,
    cutoff: f64,
}

/// A fitted model together with the per-point deviations it was fitted on.
#[derive(Debug, Clone)]
pub struct Fit {
    pub model: PerceptionModel,
    /// Deviation of each input point, in input order.
    pub deviations: Vec<f64>,
    /// Input indices of the anomalous tail, ascending.
    pub tail: Vec<usize>,
}

/// Spacing whose expectation of occurrence among `n` uniform points on
/// `[0, support]` is exactly one: `support * (1 - n^(-1/(n-1)))`.
pub fn gap_star(support: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let exponent = -(n as f64).ln() / (n - 1) as f64;
    support * -exponent.exp_m1()
}

/// Index of the first tail element in ascending `sorted` deviations, or
/// `sorted.len()` if there is no tail. At least half the points are always
/// retained.
pub fn tail_start(sorted: &[f64], gap_star: f64) -> usize {
    let n = sorted.len();
    let half = n.div_ceil(2);
    let mut prefix_sum: f64 = sorted.iter().take(half).sum();
    for idx in half..n {
        let gap = sorted[idx] - sorted[idx - 1];
        let prefix_support = 2.0 * prefix_sum / idx as f64;
        if gap > gap_star && gap >= prefix_support {
            return idx;
        }
        prefix_sum += sorted[idx];
    }
    n
}

impl PerceptionModel {
    pub fn fit<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        Ok(Self::fit_report(points)?.model)
    }

    pub fn fit_report<P: AsRef<[f64]>>(points: &[P]) -> Result<Fit> {
        let median = coordinate_median(points)?;
        let deviations: Vec<f64> = points
            .iter()
            .map(|p| distance_unchecked(p.as_ref(), &median))
            .collect();
        let n = deviations.len();
        let mu = deviations.iter().sum::<f64>() / n as f64;
        let support = 2.0 * mu;
        let gap_star = gap_star(support, n);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| deviations[a].total_cmp(&deviations[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| deviations[i]).collect();
        let start = tail_start(&sorted, gap_star);
        let edge = sorted[start - 1];
        let mut tail = order[start..].to_vec();
        tail.sort_unstable();

        let model = PerceptionModel {
            median,
            n,
            mu,
            support,
            gap_star,
            edge,
            cutoff: edge + gap_star,
        };
        debug_assert!(tail.iter().all(|&i| deviations[i] > model.cutoff));
        Ok(Fit {
            model,
            deviations,
            tail,
        })
    }

    /// Rebuilds a model from stored parameters, checking its invariants.
    pub fn from_parts(
        median: Vec<f64>,
        n: usize,
        mu: f64,
        support: f64,
        gap_star: f64,
        edge: f64,
        cutoff: f64,
    ) -> Result<Self> {
        let bad = |what: &str| Err(Error::Model(format!("invalid model: {what}")));
        if median.is_empty() || median.iter().any(|v| !v.is_finite()) {
            return bad("median");
        }
        if n == 0 {
            return bad("n must be >= 1");
        }
        let params = [mu, support, gap_star, edge, cutoff];
        if params.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("parameters must be finite and non-negative");
        }
        if support != 2.0 * mu || gap_star > support || edge > cutoff {
            return bad("inconsistent parameters");
        }
        Ok(PerceptionModel {
            median,
            n,
            mu,
            support,
            gap_star,
            edge,
            cutoff,
        })
    }

    pub fn median(&self) -> &[f64] {
        &self.median
    }

    pub fn dim(&self) -> usize {
        self.median.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn gap_star(&self) -> f64 {
        self.gap_star
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn deviation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.median.len() {
            return Err(Error::DimensionMismatch {
                expected: self.median.len(),
                got: x.len(),
            });
        }
        Ok(distance_unchecked(x, &self.median))
    }

    /// Expected number of occurrences of a deviation `d`.
    pub fn expectation(&self, d: f64) -> Result<f64> {
        // Rejects NaN as well.
        if d.is_nan() || d < 0.0 {
            return Err(Error::NegativeDeviation(d));
        }
        Ok(self.expectation_unchecked(d))
    }

    // Snapped at the cutoff so that `E < 1` and `d > cutoff` agree exactly
    // despite rounding in the power.
    pub(crate) fn expectation_unchecked(&self, d: f64) -> f64 {
        let n = self.n as f64;
        let raw = if d <= self.edge {
            n
        } else if self.support <= 0.0 || d >= self.edge + self.support {
            0.0
        } else {
            let x = (d - self.edge) / self.support;
            if x >= 1.0 {
                0.0
            } else {
                n * ((n - 1.0) * (-x).ln_1p()).exp()
            }
        };
        if d <= self.cutoff {
            raw.max(1.0)
        } else {
            raw.min(BELOW_ONE)
        }
    }

    pub fn verdict(&self, d: f64) -> Verdict {
        if d > self.cutoff {
            Verdict::Anomaly
        } else {
            Verdict::Member
        }
    }

    pub fn classify(&self, x: &[f64]) -> Result<(Verdict, f64)> {
        let d = self.deviation(x)?;
        Ok((self.verdict(d), self.expectation_unchecked(d)))
    }
}
