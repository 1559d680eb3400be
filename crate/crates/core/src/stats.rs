//! Ordinary least-squares line fits.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// `y ≈ slope * x + intercept`, with the standard error of the slope when
/// at least three points are available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub slope_stderr: Option<T>,
    pub points: usize,
}

/// Least-squares fit; `None` with fewer than two points or no spread in `x`.
pub fn linear_regression<T: Scalar>(xs: &[T], ys: &[T]) -> Option<LinearFit<T>> {
    assert_eq!(xs.len(), ys.len(), "x and y lengths differ");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let count = T::from_usize(n)?;
    let mean_x = xs.iter().copied().sum::<T>() / count;
    let mean_y = ys.iter().copied().sum::<T>() / count;
    let sxx: T = xs.iter().map(|&x| (x - mean_x) * (x - mean_x)).sum();
    if sxx <= T::zero() {
        return None;
    }
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let slope_stderr = (n > 2).then(|| {
        let ssr: T = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        (ssr / T::from_usize(n - 2).expect("small count") / sxx).sqrt()
    });
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let fit = linear_regression::<f64>(&[10.0, 20.0, 30.0], &[5.0, 10.0, 15.0]).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert!(fit.slope_stderr.unwrap() < 1e-12);
    }

    #[test]
    fn stderr_matches_closed_form() {
        // residuals (+1, -2, +1) around slope 1 through (0,0),(1,1),(2,2)
        let fit = linear_regression(&[0.0f64, 1.0, 2.0], &[1.0, -1.0, 3.0]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        // ssr = 6, n - 2 = 1, sxx = 2
        assert!((fit.slope_stderr.unwrap() - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_regression::<f64>(&[1.0], &[1.0]).is_none());
        assert!(linear_regression(&[2.0, 2.0], &[1.0, 3.0]).is_none());
        assert!(linear_regression(&[1.0f32, 2.0], &[1.0, 3.0]).unwrap().slope_stderr.is_none());
    }
}
