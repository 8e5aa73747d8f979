//! Independent reference simulator for the reference scenario: its own
//! generator, its own formulas, no crate internals.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const C: f64 = 0.5;

pub fn s(t: f64) -> f64 {
    t + C * t.sin()
}

pub fn s_inv(x: f64) -> f64 {
    // s is increasing with s(t) - t bounded by C.
    let (mut lo, mut hi) = (x - 1.0, x + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if s(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn phi_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact `P(X(z) <= x)`.
pub fn cdf_x(x: f64, z: f64) -> f64 {
    phi_cdf(s_inv(x) - z)
}

pub struct Draw {
    pub x: f64,
    pub y: f64,
    pub u1: f64,
}

pub fn draws(z: f64, n: usize, seed: u64, coupling: f64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let ev: f64 = StandardNormal.sample(&mut rng);
            let eu: f64 = StandardNormal.sample(&mut rng);
            let e2: f64 = StandardNormal.sample(&mut rng);
            let u1 = 1.0 + 0.5 * (coupling * ev + (1.0 - coupling * coupling).sqrt() * eu);
            let x = s(z + ev);
            Draw {
                x,
                y: u1 * x.tanh() + e2,
                u1,
            }
        })
        .collect()
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Monte-Carlo `E Y(z)` from `n` reference draws.
pub fn mu_mc(z: f64, n: usize, seed: u64) -> (f64, f64) {
    let ys: Vec<f64> = draws(z, n, seed, 0.0).iter().map(|d| d.y).collect();
    mean_se(&ys)
}

/// Analytic effect of the reference scenario.
pub fn theta(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}
