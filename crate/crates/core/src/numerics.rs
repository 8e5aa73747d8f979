//! Small numerical helpers shared across modules.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Sample mean and standard error of the mean (n - 1 denominator).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

/// Probabilists' Gauss–Hermite rule: nodes `t` and weights `w` with
/// `sum_k w_k g(t_k) ≈ ∫ φ(t) g(t) dt`, weights summing to one.
///
/// Golub–Welsch: eigen-decomposition of the Jacobi matrix of the He_n
/// recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(t, w)| (t, w / total)).unzip()
}

/// The 41-node rule used for Gaussian smoothing integrals.
pub fn gauss_hermite_41() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(41))
}

/// Least-squares slope of `ln y` on `ln x`. Every input must be positive.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Lower (inverse-ECDF) quantile of sorted data: the smallest value whose
/// empirical CDF is at least `p`.
pub fn lower_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Formats a value with 17 significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_cdf_reference_values() {
        assert_relative_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-16);
        assert_relative_eq!(normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
        assert_relative_eq!(
            normal_cdf(-3.0),
            0.001_349_898_031_630_094_6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        let (t, w) = gauss_hermite_41();
        let moment = |p: i32| t.iter().zip(w).map(|(t, w)| w * t.powi(p)).sum::<f64>();
        assert_relative_eq!(moment(0), 1.0, epsilon = 1e-14);
        assert!(moment(1).abs() < 1e-13);
        assert_relative_eq!(moment(2), 1.0, epsilon = 1e-12);
        assert_relative_eq!(moment(4), 3.0, epsilon = 1e-11);
        assert_relative_eq!(moment(6), 15.0, epsilon = 1e-10);
        // E cos(t) = exp(-1/2)
        let c: f64 = t.iter().zip(w).map(|(t, w)| w * t.cos()).sum();
        assert_relative_eq!(c, (-0.5f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert_relative_eq!(log_log_slope(&xs, &ys), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lower_quantile_hits_extremes_for_small_samples() {
        let s = [0.0, 0.25, 0.5, 1.0];
        assert_eq!(lower_quantile(&s, 0.001), 0.0);
        assert_eq!(lower_quantile(&s, 0.999), 1.0);
        assert_eq!(lower_quantile(&s, 0.5), 0.25);
    }

    #[test]
    fn fmt17_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 123456.789] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }
}
