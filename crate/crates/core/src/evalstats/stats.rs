//! Pearson correlation with a two-sided t-test p-value.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Sample Pearson correlation between `x` and `y`.
///
/// The two-sided p-value comes from `t = r·√((n−2)/(1−r²))` against
/// Student's t with n−2 degrees of freedom, evaluated through a numerically
/// stable incomplete-beta CDF. |r| = 1 yields p = 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::CountMismatch {
            what: "correlation input lengths",
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 points, got {n}"
        )));
    }
    let mean_x = x.iter().sum::<f64>() / n as f64;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "a constant vector has no correlation",
        ));
    }
    let r = (cov / (var_x.sqrt() * var_y.sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationResult {
        r,
        p_value: correlation_p_value(r, n),
        n,
    })
}

/// Two-sided p-value for a sample correlation `r` over `n` points.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    assert!(n >= 3, "p-value needs at least 3 points");
    let df = (n - 2) as f64;
    if 1.0 - r * r <= 0.0 {
        return 0.0;
    }
    let t = r.abs() * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
    (2.0 * dist.cdf(-t)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_linearity() {
        let res = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((res.r - 1.0).abs() < 1e-12);
        assert!(res.p_value < 1e-6, "p = {}", res.p_value);
    }

    #[test]
    fn hand_computed_half() {
        let res = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 4.0]).unwrap();
        assert!((res.r - 0.5).abs() < 1e-9, "r = {}", res.r);
    }

    #[test]
    fn negative_slope() {
        let res = pearson(&[1.0, 2.0, 3.0, 4.0], &[8.0, 6.0, 4.0, 2.0]).unwrap();
        assert!((res.r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_vector_undefined() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::UndefinedCorrelation(_)
        ));
    }

    #[test]
    fn length_mismatch_and_short_input() {
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn strong_correlations_at_n31_are_significant() {
        for r in [0.971, 0.929, 0.953] {
            let p = correlation_p_value(r, 31);
            assert!(p < 1e-5, "r = {r}: p = {p}");
        }
        // A weak correlation at the same n is not.
        assert!(correlation_p_value(0.2, 31) > 0.05);
    }

    proptest! {
        #[test]
        fn affine_images_correlate_exactly(
            xs in proptest::collection::vec(-100.0f64..100.0, 3..30),
            a in 0.1f64..10.0,
            b in -5.0f64..5.0,
        ) {
            let distinct = xs.iter().any(|&v| (v - xs[0]).abs() > 1e-6);
            prop_assume!(distinct);
            let ys: Vec<f64> = xs.iter().map(|&v| a * v + b).collect();
            let res = pearson(&xs, &ys).unwrap();
            prop_assert!((res.r - 1.0).abs() < 1e-12);
            let neg: Vec<f64> = xs.iter().map(|&v| -a * v + b).collect();
            let res = pearson(&xs, &neg).unwrap();
            prop_assert!((res.r + 1.0).abs() < 1e-12);
        }

        #[test]
        fn symmetric_in_arguments(
            xs in proptest::collection::vec(-50.0f64..50.0, 5..20),
            ys in proptest::collection::vec(-50.0f64..50.0, 5..20),
        ) {
            let n = xs.len().min(ys.len());
            let (xs, ys) = (&xs[..n], &ys[..n]);
            let fwd = pearson(xs, ys);
            let rev = pearson(ys, xs);
            match (fwd, rev) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((a.r - b.r).abs() < 1e-12);
                    prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "asymmetric: {a:?} vs {b:?}"),
            }
        }
    }
}
