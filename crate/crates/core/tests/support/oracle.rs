//! Brute-force reference for the 1-D tail cut. Shares no code with the
//! library: the median, deviations, supports and expectations are all
//! recomputed here from their definitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Expected occurrences of a spacing `g` among `n` uniform points on
/// `[0, support]`.
pub fn spacing_expectation(g: f64, support: f64, n: usize) -> f64 {
    if g >= support {
        0.0
    } else {
        n as f64 * (1.0 - g / support).powi(n as i32 - 1)
    }
}

/// Input indices of the tail. Scans every suffix of the sorted deviations
/// that keeps at least half the points; the first suffix whose leading
/// spacing is expected less than once under the full-set model and not at
/// all under the model of the retained prefix is the tail.
pub fn tail(xs: &[f64]) -> Vec<usize> {
    let n = xs.len();
    let m = median(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - m).abs()).collect();
    let mut sorted = dev.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let support = 2.0 * sorted.iter().sum::<f64>() / n as f64;
    if support == 0.0 {
        return vec![];
    }
    for j in n.div_ceil(2)..n {
        let g = sorted[j] - sorted[j - 1];
        let full = spacing_expectation(g, support, n);
        let prefix_support = 2.0 * sorted[..j].iter().sum::<f64>() / j as f64;
        let prefix = spacing_expectation(g, prefix_support, j);
        if full < 1.0 && prefix == 0.0 {
            let threshold = sorted[j];
            return (0..n).filter(|&i| dev[i] >= threshold).collect();
        }
    }
    vec![]
}

/// Closed-form meaningful spacing.
pub fn gap_star(support: f64, n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        support * (1.0 - (n as f64).powf(-1.0 / (n as f64 - 1.0)))
    }
}

/// Random 1-D instances with n <= 12 and values in [-100, 100]: plain
/// uniform draws, tight groups with outliers, and small integers (ties).
pub fn instances(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(1..=12);
            match k % 3 {
                0 => (0..n).map(|_| rng.random_range(-100.0..=100.0)).collect(),
                1 => {
                    let center = rng.random_range(-50.0..=50.0);
                    let width = rng.random_range(0.01..=5.0);
                    let outliers = rng.random_range(0..=n / 2);
                    (0..n)
                        .map(|i| {
                            if i < outliers {
                                rng.random_range(-100.0..=100.0)
                            } else {
                                center + rng.random_range(-width..=width)
                            }
                        })
                        .collect()
                }
                _ => (0..n)
                    .map(|_| f64::from(rng.random_range(-10i32..=10)))
                    .collect(),
            }
        })
        .collect()
}
