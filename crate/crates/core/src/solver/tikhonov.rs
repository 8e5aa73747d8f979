//! Tikhonov regularization in standard form.
//!
//! Minimizes `‖Aθ - b‖² + λ²‖Lθ‖²` for `L` the identity or the second
//! difference operator. With `W` a basis of the null space of `L`, `L⁺` its
//! pseudoinverse and `P` the orthogonal projector onto `range(AW)`, every
//! candidate splits as `θ = L⁺ξ + W c`. The optimal `c` is
//! `(AW)⁺ (b - A L⁺ ξ)` and `ξ` solves the standard-form problem
//!
//! ```text
//! min ‖Ā ξ - b̄‖² + λ² ‖ξ‖²,   Ā = (I - P) A L⁺,   b̄ = (I - P) b
//! ```
//!
//! whose solution is a filtered SVD expansion. One factorization serves every
//! `λ` on the selection ladder.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative singular-value cutoff for the unregularized (`λ = 0`) solve.
pub const TRUNCATION_TOL: f64 = 1e-12;
/// Number of `λ` values on the selection ladder.
pub const LADDER_LEN: usize = 64;
/// The ladder spans `[LADDER_FLOOR σ₁, σ₁]`.
pub const LADDER_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Penalty {
    Identity,
    #[default]
    SecondDifference,
}

impl Penalty {
    /// The penalty operator on a grid of `j` points.
    pub fn matrix(self, j: usize) -> DMatrix<f64> {
        match self {
            Penalty::Identity => DMatrix::identity(j, j),
            Penalty::SecondDifference => {
                DMatrix::from_fn(j.saturating_sub(2), j, |r, c| match c.wrapping_sub(r) {
                    0 | 2 => 1.0,
                    1 => -2.0,
                    _ => 0.0,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSolution {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub penalty_kind: Penalty,
    /// `‖Aθ - b‖`.
    pub residual_norm: f64,
    /// `‖Lθ‖`.
    pub solution_seminorm: f64,
    /// Singular values of the standard-form matrix, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Number of retained singular values on the `λ = 0` path.
    pub truncation_rank: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaMethod {
    Discrepancy,
    LCurve,
}

/// Outcome of automatic parameter selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub requested: LambdaMethod,
    /// Rule that produced `lambda`; differs from `requested` after a fallback.
    pub used: LambdaMethod,
    /// Set when the discrepancy rule fell back to the L-curve because no
    /// noise level was available.
    pub fallback: bool,
    /// Set when no ladder value reached the discrepancy target; the largest
    /// ladder value is returned.
    pub target_unreached: bool,
}

/// A factorized Tikhonov problem, reusable across `λ`.
#[derive(Debug, Clone)]
pub struct TikhonovProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    penalty: Penalty,
    l: DMatrix<f64>,
    /// `None` for the identity penalty, where `L⁺ = I`.
    llt: Option<Cholesky<f64, Dyn>>,
    w: DMatrix<f64>,
    aw_pinv: DMatrix<f64>,
    /// `I - P`.
    complement: DMatrix<f64>,
    a_lpinv: DMatrix<f64>,
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    vt: DMatrix<f64>,
}

/// Pseudoinverse with a relative singular-value cutoff.
fn pinv(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = SVD::new(m.clone(), true, true);
    let smax = svd.singular_values.max();
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_tol * smax && s > 0.0 {
            out += vt.row(k).transpose() * u.column(k).transpose() / s;
        }
    }
    out
}

/// Thin SVD with singular values sorted in nonincreasing order.
fn sorted_svd(m: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (DMatrix::zeros(rows, 0), Vec::new(), DMatrix::zeros(0, cols));
    }
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let su = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let svt = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    let s = order
        .iter()
        .map(|&k| svd.singular_values[k].max(0.0))
        .collect();
    (su, s, svt)
}

impl TikhonovProblem {
    pub fn new(a: DMatrix<f64>, b: &[f64], penalty: Penalty) -> Result<Self> {
        let (rows, j) = a.shape();
        if b.len() != rows {
            return Err(Error::Dimension {
                context: "right-hand side",
                expected: rows,
                found: b.len(),
            });
        }
        if j == 0 || rows == 0 {
            return Err(Error::validation("system", "design matrix is empty"));
        }
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "non-finite entries in the linear system".into(),
            ));
        }
        if a.iter().all(|&v| v == 0.0) && b.iter().any(|&v| v != 0.0) {
            return Err(Error::NoInformation);
        }
        let b = DVector::from_column_slice(b);
        let l = penalty.matrix(j);
        let (llt, w, a_l) = match penalty {
            Penalty::Identity => (None, DMatrix::zeros(j, 0), a.clone()),
            Penalty::SecondDifference => {
                if j < 3 {
                    return Err(Error::validation(
                        "system",
                        "second-difference penalty needs at least 3 grid points",
                    ));
                }
                let llt = Cholesky::new(&l * l.transpose()).ok_or_else(|| {
                    Error::Numerical(
                        "second-difference Gram matrix is not positive definite".into(),
                    )
                })?;
                // A L⁺ = (A Lᵀ)(L Lᵀ)⁻¹
                let a_lt = &a * l.transpose();
                let a_l = llt.solve(&a_lt.transpose()).transpose();
                let scale = (j as f64 - 1.0) / 2.0;
                let w = DMatrix::from_fn(j, 2, |r, c| {
                    if c == 0 {
                        1.0
                    } else {
                        (r as f64 - scale) / scale
                    }
                });
                (Some(llt), w, a_l)
            }
        };
        let aw = &a * &w;
        let aw_pinv = pinv(&aw, TRUNCATION_TOL);
        let complement = DMatrix::identity(rows, rows) - &aw * &aw_pinv;
        let (u, sigma, vt) = sorted_svd(&complement * &a_l);
        Ok(TikhonovProblem {
            a,
            b,
            penalty,
            l,
            llt,
            w,
            aw_pinv,
            complement,
            a_lpinv: a_l,
            u,
            sigma,
            vt,
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn penalty(&self) -> Penalty {
        self.penalty
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.a
    }

    fn l_pinv_apply(&self, xi: &DVector<f64>) -> DVector<f64> {
        match &self.llt {
            None => xi.clone(),
            Some(llt) => self.l.transpose() * llt.solve(xi),
        }
    }

    /// Regularized solution for an arbitrary right-hand side; `θ` is linear in `b`.
    fn theta_for(&self, b: &DVector<f64>, lambda: f64) -> (DVector<f64>, Option<usize>) {
        let bbar = &self.complement * b;
        let beta = self.u.transpose() * &bbar;
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        let mut xi = DVector::zeros(self.vt.ncols());
        let mut rank = 0;
        for (k, &s) in self.sigma.iter().enumerate() {
            let coef = if lambda == 0.0 {
                if s > TRUNCATION_TOL * smax && s > 0.0 {
                    rank += 1;
                    beta[k] / s
                } else {
                    0.0
                }
            } else {
                s * beta[k] / (s * s + lambda * lambda)
            };
            if coef != 0.0 {
                xi += self.vt.row(k).transpose() * coef;
            }
        }
        let base = self.l_pinv_apply(&xi);
        let theta = if self.w.ncols() > 0 {
            let c = &self.aw_pinv * (b - &self.a_lpinv * &xi);
            base + &self.w * c
        } else {
            base
        };
        (theta, (lambda == 0.0).then_some(rank))
    }

    pub fn solve(&self, lambda: f64) -> Result<RegularizedSolution> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::validation(
                "lambda",
                format!("must be nonnegative, got {lambda}"),
            ));
        }
        let (theta, truncation_rank) = self.theta_for(&self.b, lambda);
        let residual_norm = (&self.a * &theta - &self.b).norm();
        let solution_seminorm = (&self.l * &theta).norm();
        Ok(RegularizedSolution {
            theta: theta.iter().copied().collect(),
            lambda,
            penalty_kind: self.penalty,
            residual_norm,
            solution_seminorm,
            singular_values: self.sigma.clone(),
            truncation_rank,
        })
    }

    /// Log-spaced `λ` values from `LADDER_FLOOR σ₁` to `σ₁`, ascending.
    pub fn ladder(&self) -> Vec<f64> {
        let s1 = self.sigma.first().copied().unwrap_or(0.0);
        if s1 == 0.0 {
            return Vec::new();
        }
        let lo = LADDER_FLOOR.log10();
        (0..LADDER_LEN)
            .map(|k| s1 * 10f64.powf(lo * (1.0 - k as f64 / (LADDER_LEN - 1) as f64)))
            .collect()
    }

    /// `(λ, residual_norm, solution_seminorm)` along the ladder.
    pub fn ladder_path(&self) -> Result<Vec<(f64, f64, f64)>> {
        self.ladder()
            .into_iter()
            .map(|lam| {
                self.solve(lam)
                    .map(|s| (lam, s.residual_norm, s.solution_seminorm))
            })
            .collect()
    }

    pub fn select_lambda(&self, noise_scale: &[f64], method: LambdaMethod) -> Result<LambdaChoice> {
        if noise_scale.len() != self.b.len() {
            return Err(Error::Dimension {
                context: "noise_scale",
                expected: self.b.len(),
                found: noise_scale.len(),
            });
        }
        let path = self.ladder_path()?;
        let mut choice = LambdaChoice {
            lambda: 0.0,
            requested: method,
            used: method,
            fallback: false,
            target_unreached: false,
        };
        if path.is_empty() {
            // Standard-form operator is zero: nothing to regularize.
            return Ok(choice);
        }
        if method == LambdaMethod::Discrepancy {
            let target = noise_scale.iter().map(|s| s * s).sum::<f64>().sqrt();
            if target > 0.0 {
                match path.iter().find(|p| p.1 >= target) {
                    Some(p) => choice.lambda = p.0,
                    None => {
                        choice.lambda = path[path.len() - 1].0;
                        choice.target_unreached = true;
                    }
                }
                return Ok(choice);
            }
            // Zero noise level: the discrepancy equation is solvable at the
            // ladder minimum only when the system is consistent there.
            let bnorm = self.b.norm();
            if path[0].1 <= 1e-10 * bnorm.max(f64::MIN_POSITIVE) {
                choice.lambda = path[0].0;
                return Ok(choice);
            }
            choice.used = LambdaMethod::LCurve;
            choice.fallback = true;
        }
        choice.lambda = l_curve_corner(&path);
        Ok(choice)
    }

    /// Per-grid-point standard deviation of `θ̂` induced by independent
    /// right-hand-side errors with the given scales.
    pub fn propagated_noise(&self, lambda: f64, noise_scale: &[f64]) -> Result<Vec<f64>> {
        if noise_scale.len() != self.b.len() {
            return Err(Error::Dimension {
                context: "noise_scale",
                expected: self.b.len(),
                found: noise_scale.len(),
            });
        }
        let mut var = vec![0.0; self.a.ncols()];
        for (i, &s) in noise_scale.iter().enumerate() {
            let mut e = DVector::zeros(self.b.len());
            e[i] = 1.0;
            let (col, _) = self.theta_for(&e, lambda);
            for (v, c) in var.iter_mut().zip(col.iter()) {
                *v += (c * s).powi(2);
            }
        }
        Ok(var.into_iter().map(f64::sqrt).collect())
    }
}

/// Ladder point of maximum signed curvature of `(ln residual, ln seminorm)`
/// parametrized by `ln λ`. Ties go to the smaller `λ`.
fn l_curve_corner(path: &[(f64, f64, f64)]) -> f64 {
    let ln = |v: f64| v.max(1e-300).ln();
    let rho: Vec<f64> = path.iter().map(|p| ln(p.1)).collect();
    let eta: Vec<f64> = path.iter().map(|p| ln(p.2)).collect();
    let t: Vec<f64> = path.iter().map(|p| p.0.ln()).collect();
    let mut best = (f64::NEG_INFINITY, path[0].0);
    for k in 1..path.len().saturating_sub(1) {
        let h = 0.5 * (t[k + 1] - t[k - 1]);
        let d1r = (rho[k + 1] - rho[k - 1]) / (2.0 * h);
        let d1e = (eta[k + 1] - eta[k - 1]) / (2.0 * h);
        let d2r = (rho[k + 1] - 2.0 * rho[k] + rho[k - 1]) / (h * h);
        let d2e = (eta[k + 1] - 2.0 * eta[k] + eta[k - 1]) / (h * h);
        let denom = (d1r * d1r + d1e * d1e).powf(1.5);
        let kappa = if denom > 0.0 {
            (d1r * d2e - d2r * d1e) / denom
        } else {
            0.0
        };
        if kappa.is_finite() && kappa > best.0 {
            best = (kappa, path[k].0);
        }
    }
    best.1
}

pub fn solve_tikhonov(
    a: &DMatrix<f64>,
    b: &[f64],
    lambda: f64,
    penalty: Penalty,
) -> Result<RegularizedSolution> {
    TikhonovProblem::new(a.clone(), b, penalty)?.solve(lambda)
}

pub fn select_lambda(
    a: &DMatrix<f64>,
    b: &[f64],
    noise_scale: &[f64],
    method: LambdaMethod,
    penalty: Penalty,
) -> Result<LambdaChoice> {
    TikhonovProblem::new(a.clone(), b, penalty)?.select_lambda(noise_scale, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn objective(
        a: &DMatrix<f64>,
        b: &[f64],
        l: &DMatrix<f64>,
        lambda: f64,
        theta: &DVector<f64>,
    ) -> f64 {
        let r = a * theta - DVector::from_column_slice(b);
        r.norm_squared() + lambda * lambda * (l * theta).norm_squared()
    }

    #[test]
    fn identity_system_returns_rhs() {
        let a = DMatrix::identity(6, 6);
        let b = [0.3, -1.0, 2.0, 0.0, 5.5, -0.25];
        for p in [Penalty::Identity, Penalty::SecondDifference] {
            let s = solve_tikhonov(&a, &b, 0.0, p).unwrap();
            for (t, v) in s.theta.iter().zip(&b) {
                assert!((t - v).abs() < 1e-12, "{p:?}");
            }
            assert!(s.truncation_rank.is_some());
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let a = random_matrix(5, 20, 1);
        for p in [Penalty::Identity, Penalty::SecondDifference] {
            let s = solve_tikhonov(&a, &[0.0; 5], 0.7, p).unwrap();
            assert!(s.theta.iter().all(|&t| t == 0.0));
        }
    }

    #[test]
    fn zero_design_with_signal_has_no_information() {
        let a = DMatrix::zeros(3, 15);
        assert!(matches!(
            solve_tikhonov(&a, &[1.0, 0.0, 0.0], 0.1, Penalty::SecondDifference),
            Err(Error::NoInformation)
        ));
        let s = solve_tikhonov(&a, &[0.0; 3], 0.1, Penalty::SecondDifference).unwrap();
        assert!(s.theta.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn matches_normal_equations_on_random_systems() {
        for seed in 0..5 {
            let a = random_matrix(20, 30, seed);
            let b: Vec<f64> = random_matrix(20, 1, seed + 100).iter().copied().collect();
            for p in [Penalty::Identity, Penalty::SecondDifference] {
                let lambda = 0.5;
                let l = p.matrix(30);
                let lhs = a.transpose() * &a + (l.transpose() * &l) * (lambda * lambda);
                let rhs = a.transpose() * DVector::from_column_slice(&b);
                let oracle = lhs.lu().solve(&rhs).unwrap();
                let s = solve_tikhonov(&a, &b, lambda, p).unwrap();
                let diff = (DVector::from_column_slice(&s.theta) - &oracle).norm();
                assert!(diff <= 1e-8 * oracle.norm(), "{p:?} seed {seed}: {diff}");
            }
        }
    }

    #[test]
    fn solution_is_a_local_minimum() {
        let a = random_matrix(8, 25, 3);
        let b: Vec<f64> = (0..8).map(|i| (i as f64).cos()).collect();
        for p in [Penalty::Identity, Penalty::SecondDifference] {
            let lambda = 0.05;
            let s = solve_tikhonov(&a, &b, lambda, p).unwrap();
            let l = p.matrix(25);
            let theta = DVector::from_column_slice(&s.theta);
            let f0 = objective(&a, &b, &l, lambda, &theta);
            for j in 0..25 {
                for d in [1e-6, -1e-6] {
                    let mut t = theta.clone();
                    t[j] += d;
                    assert!(objective(&a, &b, &l, lambda, &t) >= f0 - 1e-12 * f0);
                }
            }
        }
    }

    #[test]
    fn reported_norms_are_recomputable() {
        let a = random_matrix(8, 40, 4);
        let b: Vec<f64> = (0..8).map(|i| 0.1 * i as f64).collect();
        let s = solve_tikhonov(&a, &b, 0.01, Penalty::SecondDifference).unwrap();
        let theta = DVector::from_column_slice(&s.theta);
        let res = (&a * &theta - DVector::from_column_slice(&b)).norm();
        let semi = (Penalty::SecondDifference.matrix(40) * &theta).norm();
        assert!((res - s.residual_norm).abs() <= 1e-10 * res);
        assert!((semi - s.solution_seminorm).abs() <= 1e-10 * semi);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn ladder_is_monotone() {
        let a = random_matrix(10, 60, 5);
        let b: Vec<f64> = random_matrix(10, 1, 6).iter().copied().collect();
        for p in [Penalty::Identity, Penalty::SecondDifference] {
            let path = TikhonovProblem::new(a.clone(), &b, p)
                .unwrap()
                .ladder_path()
                .unwrap();
            let floor = 1e-12 * b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_eq!(path.len(), LADDER_LEN);
            for w in path.windows(2) {
                assert!(w[1].1 >= w[0].1 - floor, "residual {p:?}");
                assert!(w[1].2 <= w[0].2 * (1.0 + 1e-12), "seminorm {p:?}");
            }
        }
    }

    #[test]
    fn noiseless_system_selects_ladder_minimum() {
        let a = random_matrix(6, 30, 7);
        let truth: Vec<f64> = (0..30).map(|j| (j as f64 * 0.2).sin()).collect();
        let b: Vec<f64> = (&a * DVector::from_column_slice(&truth))
            .iter()
            .copied()
            .collect();
        let problem = TikhonovProblem::new(a, &b, Penalty::SecondDifference).unwrap();
        let choice = problem
            .select_lambda(&[0.0; 6], LambdaMethod::Discrepancy)
            .unwrap();
        assert_eq!(choice.lambda, problem.ladder()[0]);
        assert!(!choice.fallback);
    }

    #[test]
    fn zero_noise_inconsistent_system_falls_back_to_l_curve() {
        // Tall system: b outside range(A).
        let a = random_matrix(12, 4, 8);
        let b: Vec<f64> = random_matrix(12, 1, 9).iter().copied().collect();
        let problem = TikhonovProblem::new(a, &b, Penalty::Identity).unwrap();
        let choice = problem
            .select_lambda(&[0.0; 12], LambdaMethod::Discrepancy)
            .unwrap();
        assert!(choice.fallback);
        assert_eq!(choice.used, LambdaMethod::LCurve);
    }

    #[test]
    fn noise_orthogonal_to_range_shrinks() {
        // Range of A is the first three coordinates.
        let mut a = DMatrix::zeros(5, 12);
        for i in 0..3 {
            for j in 0..12 {
                a[(i, j)] = ((i + 1) as f64 * j as f64 * 0.3).cos();
            }
        }
        let b = [0.0, 0.0, 0.0, 0.4, -0.7];
        let problem = TikhonovProblem::new(a, &b, Penalty::Identity).unwrap();
        let choice = problem
            .select_lambda(&[0.1; 5], LambdaMethod::Discrepancy)
            .unwrap();
        let reg = problem.solve(choice.lambda).unwrap();
        let pinv = problem.solve(0.0).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm(&reg.theta) <= norm(&pinv.theta) + 1e-15);
    }

    #[test]
    fn discrepancy_hits_the_noise_level() {
        let a = random_matrix(15, 40, 10);
        let truth: Vec<f64> = (0..40)
            .map(|j| (-(j as f64 - 20.0).powi(2) / 50.0).exp())
            .collect();
        let noise: Vec<f64> = random_matrix(15, 1, 11).iter().map(|v| 0.01 * v).collect();
        let b: Vec<f64> = (&a * DVector::from_column_slice(&truth))
            .iter()
            .zip(&noise)
            .map(|(x, e)| x + e)
            .collect();
        let scale = vec![0.01 / 3f64.sqrt(); 15];
        let problem = TikhonovProblem::new(a, &b, Penalty::SecondDifference).unwrap();
        let choice = problem
            .select_lambda(&scale, LambdaMethod::Discrepancy)
            .unwrap();
        let target = scale.iter().map(|s| s * s).sum::<f64>().sqrt();
        let ladder = problem.ladder();
        let idx = ladder.iter().position(|&l| l == choice.lambda).unwrap();
        assert!(problem.solve(choice.lambda).unwrap().residual_norm >= target);
        if idx > 0 {
            assert!(problem.solve(ladder[idx - 1]).unwrap().residual_norm < target);
        }
    }

    #[test]
    fn l_curve_picks_an_interior_corner() {
        // Smoothing operator with fast singular-value decay plus noise.
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64) / n as f64;
            (-d * d / 0.01).exp() / n as f64
        });
        let truth: Vec<f64> = (0..n).map(|j| (j as f64 / 6.0).sin()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b: Vec<f64> = (&a * DVector::from_column_slice(&truth))
            .iter()
            .map(|v| v + 1e-4 * rng.random_range(-1.0..1.0))
            .collect();
        let problem = TikhonovProblem::new(a, &b, Penalty::Identity).unwrap();
        let choice = problem
            .select_lambda(&vec![0.0; n], LambdaMethod::LCurve)
            .unwrap();
        let ladder = problem.ladder();
        assert!(
            choice.lambda > ladder[0] && choice.lambda < ladder[LADDER_LEN - 1],
            "{choice:?}"
        );
        let reg = problem.solve(choice.lambda).unwrap();
        let err: f64 = reg
            .theta
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let naive = problem.solve(ladder[0]).unwrap();
        let naive_err: f64 = naive
            .theta
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err < naive_err, "{err} vs {naive_err}");
    }

    #[test]
    fn propagated_noise_is_linear_in_scale() {
        let a = random_matrix(6, 30, 13);
        let problem = TikhonovProblem::new(a, &[0.0; 6], Penalty::SecondDifference).unwrap();
        let one = problem.propagated_noise(0.1, &[1.0; 6]).unwrap();
        let two = problem.propagated_noise(0.1, &[2.0; 6]).unwrap();
        for (x, y) in one.iter().zip(&two) {
            assert!((2.0 * x - y).abs() <= 1e-12 * y.max(1.0));
        }
    }
}
