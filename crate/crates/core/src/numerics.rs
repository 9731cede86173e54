//! Finite differences, bracketed root finding and power iteration.
//!
//! All defaults live in [`NumericsConfig`] so that every module shares one
//! numerical policy.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Base finite-difference step; Richardson pairs it with half of it.
    pub fd_step: f64,
    /// Tolerance for quantities that should vanish to finite-difference accuracy.
    pub fd_tolerance: f64,
    pub root_bisect_width: f64,
    pub root_residual: f64,
    pub root_max_secant: usize,
    pub power_tolerance: f64,
    pub power_max_iter: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            fd_step: 1e-2,
            fd_tolerance: 1e-6,
            root_bisect_width: 1e-6,
            root_residual: 1e-12,
            root_max_secant: 60,
            power_tolerance: 1e-12,
            power_max_iter: 10_000,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fd_step", self.fd_step),
            ("fd_tolerance", self.fd_tolerance),
            ("root_bisect_width", self.root_bisect_width),
            ("root_residual", self.root_residual),
            ("power_tolerance", self.power_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.fd_step > 0.1 {
            return Err(Error::Config(format!("fd_step {} exceeds 0.1", self.fd_step)));
        }
        if self.power_max_iter == 0 {
            return Err(Error::Config("power_max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Neumaier-compensated sum; long orbit sums otherwise leave rounding
/// noise that second differences amplify.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdResult {
    pub value: f64,
    /// Richardson gap between the extrapolated and the fine-step estimate.
    pub error: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// Parameter offsets (in units of the base step) at which [`combine`] expects values.
pub const STENCIL: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Richardson-extrapolated and fine-step derivatives from values at
/// `x + STENCIL[i] * step`.
pub fn combine_parts(values: &[f64; 7], step: f64, order: Order) -> (f64, f64) {
    let [m2, m1, mh, z, ph, p1, p2] = *values;
    match order {
        Order::First => {
            let coarse = (p1 - m1) / (2.0 * step);
            let fine = (ph - mh) / step;
            ((4.0 * fine - coarse) / 3.0, fine)
        }
        Order::Second => {
            let h = step;
            let coarse = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
            let g = step / 2.0;
            let fine = (-p1 + 16.0 * ph - 30.0 * z + 16.0 * mh - m1) / (12.0 * g * g);
            ((16.0 * fine - coarse) / 15.0, fine)
        }
    }
}

/// Richardson-extrapolated derivative from values at `x + STENCIL[i] * step`.
pub fn combine(values: &[f64; 7], step: f64, order: Order) -> FdResult {
    let (value, fine) = combine_parts(values, step, order);
    FdResult { value, error: (value - fine).abs(), step }
}

/// Corners of the cross stencil at steps `step` and `step / 2`:
/// `(+,+), (+,-), (-,+), (-,-)` for each.
pub fn cross_offsets(step: f64) -> [(f64, f64); 8] {
    let h = step;
    let g = step / 2.0;
    [(h, h), (h, -h), (-h, h), (-h, -h), (g, g), (g, -g), (-g, g), (-g, -g)]
}

/// Mixed partial from values at [`cross_offsets`].
pub fn combine_mixed(values: &[f64; 8], step: f64) -> FdResult {
    let coarse = (values[0] - values[1] - values[2] + values[3]) / (4.0 * step * step);
    let g = step / 2.0;
    let fine = (values[4] - values[5] - values[6] + values[7]) / (4.0 * g * g);
    let value = (4.0 * fine - coarse) / 3.0;
    FdResult { value, error: (value - fine).abs(), step }
}

fn wrap<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    f(x).map_err(|e| Error::EvaluatorFailure { at: x, source: Box::new(e) })
}

/// Central-difference derivative of `f` at `x` with Richardson extrapolation.
pub fn fd_derivative<F>(mut f: F, x: f64, order: Order, step: f64) -> Result<FdResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut values = [0.0; 7];
    for (v, o) in values.iter_mut().zip(STENCIL) {
        let needed = order == Order::Second || (o != 0.0 && o.abs() <= 1.0);
        if needed {
            *v = wrap(&mut f, x + o * step)?;
        }
    }
    Ok(combine(&values, step, order))
}

/// Mixed second partial of `f(x, y)` at `(x, y)` via the 4-point cross stencil.
pub fn fd_mixed<F>(mut f: F, x: f64, y: f64, step: f64) -> Result<FdResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut values = [0.0; 8];
    for (v, (dx, dy)) in values.iter_mut().zip(cross_offsets(step)) {
        *v = f(x + dx, y + dy).map_err(|e| Error::EvaluatorFailure { at: x + dx, source: Box::new(e) })?;
    }
    Ok(combine_mixed(&values, step))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Root of a function with a sign change on `[lo, hi]`: bisection down to
/// `width`, then a bracket-safeguarded secant iteration.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, width: f64, cfg: &NumericsConfig) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = wrap(&mut f, a)?;
    let mut fb = wrap(&mut f, b)?;
    let bracket = (lo, hi);
    let mut iterations = 2;
    if fa == 0.0 {
        return Ok(RootResult { root: a, residual: 0.0, iterations, bracket });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, residual: 0.0, iterations, bracket });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::BracketFailure { lo, hi, flo: fa, fhi: fb });
    }
    while (b - a).abs() > width {
        let m = 0.5 * (a + b);
        let fm = wrap(&mut f, m)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(RootResult { root: m, residual: 0.0, iterations, bracket });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let (mut best, mut fbest) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..cfg.root_max_secant {
        if fbest.abs() <= cfg.root_residual {
            break;
        }
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) || !x.is_finite() {
            x = 0.5 * (a + b);
        }
        let fx = wrap(&mut f, x)?;
        iterations += 1;
        if fx.abs() < fbest.abs() {
            best = x;
            fbest = fx;
        }
        if fx == 0.0 {
            break;
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * best.abs().max(1.0) {
            break;
        }
    }
    Ok(RootResult { root: best, residual: fbest.abs(), iterations, bracket })
}

/// A square linear operator that can be applied from either side.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = A^T x`.
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..self.nrows()).map(|i| self[(i, j)] * x[i]).sum();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Eigenvector `v` with `A v = lambda v`.
    Right,
    /// Eigenvector `v` with `v A = lambda v`.
    Left,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerResult {
    pub eigenvalue: f64,
    /// Unit Euclidean norm, oriented to have positive sum.
    pub vector: Vec<f64>,
    /// `||A v - lambda v||_inf / lambda`.
    pub residual: f64,
    /// Observed geometric decay rate of the residual (an estimate of `|lambda_2 / lambda|`).
    pub contraction: f64,
    pub iterations: usize,
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x *= sign / norm);
    }
    norm
}

/// Dominant eigenpair by power iteration.
pub fn power_iteration<A: LinearOperator + ?Sized>(
    a: &A,
    side: Side,
    start: Option<&[f64]>,
    cfg: &NumericsConfig,
) -> Result<PowerResult> {
    let n = a.dim();
    let mut v = match start {
        Some(s) if s.len() == n => s.to_vec(),
        _ => vec![1.0; n],
    };
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let apply = |x: &[f64], y: &mut [f64]| match side {
        Side::Right => a.apply(x, y),
        Side::Left => a.apply_transpose(x, y),
    };
    let mut residuals: Vec<f64> = Vec::new();
    let mut lambda = 0.0;
    for it in 1..=cfg.power_max_iter {
        apply(&v, &mut w);
        lambda = v.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>();
        let residual = if lambda > 0.0 {
            v.iter().zip(&w).map(|(x, y)| (y - lambda * x).abs()).fold(0.0, f64::max) / lambda
        } else {
            f64::INFINITY
        };
        residuals.push(residual);
        let norm = normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
        if norm == 0.0 {
            return Err(Error::NoConvergence { iterations: it, residual });
        }
        if residual <= cfg.power_tolerance {
            // `v` now holds A v_old normalized; its residual is no larger.
            return Ok(PowerResult {
                eigenvalue: lambda,
                vector: v,
                residual,
                contraction: contraction(&residuals),
                iterations: it,
            });
        }
    }
    let residual = *residuals.last().unwrap_or(&f64::INFINITY);
    let rho = contraction(&residuals);
    if rho >= 1.0 - 1e-6 {
        return Err(Error::NoSpectralGap(rho));
    }
    let _ = lambda;
    Err(Error::NoConvergence { iterations: cfg.power_max_iter, residual })
}

/// Geometric mean decay of the tail of a residual history.
fn contraction(residuals: &[f64]) -> f64 {
    let tail: Vec<f64> = residuals.iter().copied().filter(|r| *r > 0.0 && r.is_finite()).collect();
    if tail.len() < 3 {
        return 0.0;
    }
    let k = tail.len().min(12);
    let last = &tail[tail.len() - k..];
    let steps = (k - 1) as f64;
    (last[k - 1] / last[0]).powf(1.0 / steps).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_derivative_of_sin() {
        let r = fd_derivative(|x: f64| Ok(x.sin()), 0.0, Order::First, 1e-2).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!(r.error >= (r.value - 1.0).abs());
    }

    #[test]
    fn second_derivative_of_quartic() {
        let r = fd_derivative(|x: f64| Ok(x.powi(4)), 1.0, Order::Second, 1e-2).unwrap();
        assert!((r.value - 12.0).abs() < 1e-6);
    }

    #[test]
    fn mixed_partial_of_product() {
        let r = fd_mixed(|x, y| Ok(x * y), 0.3, -0.2, 1e-2).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn evaluator_failure_carries_location() {
        let r = fd_derivative(
            |x: f64| if x > 0.015 { Err(Error::DerivativeAtPole) } else { Ok(x) },
            0.0,
            Order::Second,
            1e-2,
        );
        match r {
            Err(Error::EvaluatorFailure { at, .. }) => assert!((at - 0.02).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn roots() {
        let cfg = NumericsConfig::default();
        let r = bracketed_root(|x| Ok(x * x - 2.0), 1.0, 2.0, cfg.root_bisect_width, &cfg).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-10);
        let r = bracketed_root(|x: f64| Ok((-x).exp() - 0.5), 0.0, 3.0, 1e-6, &cfg).unwrap();
        assert!((r.root - 2f64.ln()).abs() < 1e-10);
        assert!(matches!(
            bracketed_root(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-6, &cfg),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn power_small_cases() {
        let cfg = NumericsConfig::default();
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let r = power_iteration(&d, Side::Right, None, &cfg).unwrap();
        assert!((r.eigenvalue - 2.0).abs() < 1e-12);
        assert!((r.vector[0] - 1.0).abs() < 1e-12 && r.vector[1].abs() < 1e-12);
        let ones = DMatrix::from_element(2, 2, 1.0);
        let r = power_iteration(&ones, Side::Left, None, &cfg).unwrap();
        assert!((r.eigenvalue - 2.0).abs() < 1e-14);
        assert!((r.vector[0] - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn periodic_matrix_has_no_gap() {
        let cfg = NumericsConfig { power_max_iter: 200, ..Default::default() };
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = power_iteration(&p, Side::Right, Some(&[1.0, 0.2]), &cfg);
        assert!(matches!(r, Err(Error::NoSpectralGap(_))), "{r:?}");
    }
}
