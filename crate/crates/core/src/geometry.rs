//! Robust geometry primitives shared by the kernel and the engine.
//!
//! Every reduction runs left to right over its input so that results are
//! bit-reproducible for a given input order.

use crate::error::{Error, Result};

fn check_dims<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let dim = points.first().ok_or(Error::EmptyCluster)?.as_ref().len();
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.as_ref().len(),
            });
        }
    }
    Ok(dim)
}

/// Median of a scratch buffer; reorders the buffer.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (left, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Coordinate-wise median. Even counts average the two middle order
/// statistics, so the result does not depend on point order.
pub fn coordinate_median<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<f64>> {
    let dim = check_dims(points)?;
    let mut column = Vec::with_capacity(points.len());
    let mut median = Vec::with_capacity(dim);
    for k in 0..dim {
        column.clear();
        column.extend(points.iter().map(|p| p.as_ref()[k]));
        median.push(median_in_place(&mut column));
    }
    Ok(median)
}

#[inline]
pub(crate) fn squared_distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| {
        let d = x - y;
        acc + d * d
    })
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    squared_distance_unchecked(a, b).sqrt()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(distance_unchecked(a, b))
}

/// Mean of squared distances to the coordinate-wise median; the
/// concentration measure used to order clusters.
pub fn mean_squared_deviation<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    let median = coordinate_median(points)?;
    let total = points.iter().fold(0.0, |acc, p| {
        acc + squared_distance_unchecked(p.as_ref(), &median)
    });
    Ok(total / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn median_single_point() {
        assert_eq!(coordinate_median(&[[7.0, -2.0]]).unwrap(), vec![7.0, -2.0]);
    }

    #[test]
    fn median_even_count_averages_middle_pair() {
        let pts = [[1.0], [2.0], [3.0], [100.0]];
        assert_eq!(coordinate_median(&pts).unwrap(), vec![2.5]);
    }

    #[test]
    fn median_is_per_coordinate() {
        let pts = [[0.0, 0.0], [2.0, 10.0], [4.0, 2.0]];
        assert_eq!(coordinate_median(&pts).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn median_errors() {
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(
            coordinate_median(&empty),
            Err(Error::EmptyCluster)
        ));
        let ragged: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(
            coordinate_median(&ragged),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(euclidean_distance(&[1.5, 2.0], &[1.5, 2.0]).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean_distance(&[7.0], &[4.0]).unwrap(), 3.0);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn msd_examples() {
        assert_eq!(mean_squared_deviation(&[[3.0], [3.0], [3.0]]).unwrap(), 0.0);
        assert_close(
            mean_squared_deviation(&[[1.0], [2.0], [3.0]]).unwrap(),
            2.0 / 3.0,
            1e-12,
        );
        assert_close(
            mean_squared_deviation(&[[10.0], [12.0], [14.0]]).unwrap(),
            8.0 / 3.0,
            1e-12,
        );
        let empty: [[f64; 1]; 0] = [];
        assert!(mean_squared_deviation(&empty).is_err());
    }
}
