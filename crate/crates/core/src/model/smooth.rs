//! Bounded smooth response shapes `h(x)` with analytic derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `h(x) = amplitude * shape(x / scale)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothFunctionSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub scale: f64,
    pub amplitude: f64,
}

/// Unit shapes. Each is bounded by one in absolute value and has first and
/// second derivatives that vanish quickly in the tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Tanh,
    /// `1 / (1 + exp(-4u))`, normalized to unit slope at the origin like `tanh`.
    Logistic,
    /// `exp(-u^2 / 2)`.
    GaussianBump,
    /// Clamped cubic spline through tabulated points, constant outside the knots.
    TabulatedSpline(Spline),
}

impl SmoothFunctionSpec {
    pub fn new(shape: Shape, scale: f64, amplitude: f64) -> Self {
        Self {
            shape,
            scale,
            amplitude,
        }
    }

    pub fn tanh(scale: f64, amplitude: f64) -> Self {
        Self::new(Shape::Tanh, scale, amplitude)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::validation(
                "smooth function",
                format!("scale must be positive, got {}", self.scale),
            ));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::validation(
                "smooth function",
                format!("amplitude must be nonnegative, got {}", self.amplitude),
            ));
        }
        if let Shape::TabulatedSpline(spline) = &self.shape {
            spline.check_bounded()?;
        }
        Ok(())
    }

    /// Returns `(h, h', h'')` at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let u = x / self.scale;
        let (s0, s1, s2) = match &self.shape {
            Shape::Tanh => {
                let t = u.tanh();
                let d = 1.0 - t * t;
                (t, d, -2.0 * t * d)
            }
            Shape::Logistic => {
                let v = 1.0 / (1.0 + (-4.0 * u).exp());
                let d = v * (1.0 - v);
                (v, 4.0 * d, 16.0 * d * (1.0 - 2.0 * v))
            }
            Shape::GaussianBump => {
                let e = (-0.5 * u * u).exp();
                (e, -u * e, (u * u - 1.0) * e)
            }
            Shape::TabulatedSpline(s) => s.eval_all(u),
        };
        let a = self.amplitude;
        (
            a * s0,
            a * s1 / self.scale,
            a * s2 / (self.scale * self.scale),
        )
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.eval_all(x).1
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.eval_all(x).2
    }
}

/// Serialized form of a tabulated spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineTable {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

/// Cubic spline with zero end slopes. Outside `[knots[0], knots[n-1]]` it is
/// continued by the end values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineTable", into = "SplineTable")]
pub struct Spline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

/// Knots must stay within this range so the tails are flat beyond ten scales.
const KNOT_LIMIT: f64 = 10.0;

impl TryFrom<SplineTable> for Spline {
    type Error = Error;

    fn try_from(table: SplineTable) -> Result<Self> {
        Spline::new(table.knots, table.values)
    }
}

impl From<Spline> for SplineTable {
    fn from(s: Spline) -> Self {
        SplineTable {
            knots: s.knots,
            values: s.values,
        }
    }
}

impl Spline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let what = "tabulated spline";
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::validation(
                what,
                format!(
                    "need at least two knots with one value each, got {} knots and {} values",
                    knots.len(),
                    values.len()
                ),
            ));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::validation(what, "knots and values must be finite"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation(what, "knots must be strictly increasing"));
        }
        if knots[0] < -KNOT_LIMIT || knots[knots.len() - 1] > KNOT_LIMIT {
            return Err(Error::validation(
                what,
                "knots must lie within [-10, 10] (unit scale)",
            ));
        }
        let second = clamped_second_derivatives(&knots, &values);
        let spline = Spline {
            knots,
            values,
            second,
        };
        spline.check_bounded()?;
        Ok(spline)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn check_bounded(&self) -> Result<()> {
        let (lo, hi) = (self.knots[0], self.knots[self.knots.len() - 1]);
        let steps = 20 * self.knots.len();
        let sup = (0..=steps)
            .map(|k| {
                self.eval_all(lo + (hi - lo) * k as f64 / steps as f64)
                    .0
                    .abs()
            })
            .fold(0.0, f64::max);
        if sup > 1.0 + 1e-12 {
            return Err(Error::validation(
                "tabulated spline",
                format!("spline must stay within [-1, 1]; grid scan found {sup}"),
            ));
        }
        Ok(())
    }

    fn eval_all(&self, u: f64) -> (f64, f64, f64) {
        let n = self.knots.len();
        if u <= self.knots[0] {
            return (self.values[0], 0.0, 0.0);
        }
        if u >= self.knots[n - 1] {
            return (self.values[n - 1], 0.0, 0.0);
        }
        let i = self.knots.partition_point(|&k| k <= u) - 1;
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - u) / h;
        let b = (u - self.knots[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d =
            (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        (v, d, a * m0 + b * m1)
    }
}

/// Second derivatives at the knots of the cubic spline with zero end slopes.
fn clamped_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    // Tridiagonal system, Thomas algorithm.
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let h0 = x[1] - x[0];
    diag[0] = h0 / 3.0;
    upper[0] = h0 / 6.0;
    rhs[0] = (y[1] - y[0]) / h0;
    for i in 1..n - 1 {
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        lower[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        upper[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    let hn = x[n - 1] - x[n - 2];
    lower[n - 1] = hn / 6.0;
    diag[n - 1] = hn / 3.0;
    rhs[n - 1] = -(y[n - 1] - y[n - 2]) / hn;

    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}
