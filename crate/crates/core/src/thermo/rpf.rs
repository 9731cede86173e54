use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{fd_derivative, power_iteration, LinearOperator, NumericsConfig, Order, Side};

use super::operator::{SparseMatrix, TransferOperator};

/// Leading eigendata of a transfer matrix.
#[derive(Clone, Debug, Serialize)]
pub struct RpfTriple {
    pub beta: f64,
    /// Right eigenvector, scaled so that `mu(h) = 1`.
    pub h: Vec<f64>,
    /// Left eigenvector with `mu(1) = 1`.
    pub mu: Vec<f64>,
    /// Estimate of `|lambda_2| / beta` from the contraction of the iterates.
    pub gap: f64,
    /// `||L h - beta h||_inf / (beta ||h||_inf)`.
    pub right_residual: f64,
    /// `||mu L - beta mu||_inf / (beta ||mu||_inf)`.
    pub left_residual: f64,
    pub iterations: usize,
}

/// Perron–Frobenius data by right and left power iteration.
pub fn rpf_leading_triple(l: &SparseMatrix, start: Option<&[f64]>, cfg: &NumericsConfig) -> Result<RpfTriple> {
    let right = power_iteration(l, Side::Right, start, cfg)?;
    let left = power_iteration(l, Side::Left, None, cfg)?;
    let beta = right.eigenvalue;
    if !(beta > 0.0) {
        return Err(Error::NoSpectralGap(1.0));
    }
    let total: f64 = left.vector.iter().sum();
    let mu: Vec<f64> = left.vector.iter().map(|x| x / total).collect();
    let pairing: f64 = mu.iter().zip(&right.vector).map(|(a, b)| a * b).sum();
    let h: Vec<f64> = right.vector.iter().map(|x| x / pairing).collect();
    let mut buf = vec![0.0; l.dim()];
    l.apply(&h, &mut buf);
    let right_residual = residual(&buf, &h, beta);
    l.apply_transpose(&mu, &mut buf);
    let left_residual = residual(&buf, &mu, beta);
    Ok(RpfTriple {
        beta,
        h,
        mu,
        gap: right.contraction.max(left.contraction),
        right_residual,
        left_residual,
        iterations: right.iterations + left.iterations,
    })
}

fn residual(image: &[f64], v: &[f64], beta: f64) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    image.iter().zip(v).map(|(a, b)| (a - beta * b).abs()).fold(0.0, f64::max) / (beta * scale)
}

/// `P(f) = log beta`, with the normalized right eigenvector for warm starts.
pub fn pressure(
    op: &TransferOperator,
    potential: &[f64],
    start: Option<&[f64]>,
    cfg: &NumericsConfig,
) -> Result<(f64, Vec<f64>)> {
    let r = power_iteration(&op.matrix(potential), Side::Right, start, cfg)?;
    if !(r.eigenvalue > 0.0) {
        return Err(Error::NoSpectralGap(1.0));
    }
    Ok((r.eigenvalue.ln(), r.vector))
}

/// Cylinder weights `m = h * mu` of a pressure-zero potential.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumMeasure {
    pub depth: usize,
    pub weights: Vec<f64>,
    /// `max_w |m(sigma^-1 [w]) - m([w])|`.
    pub invariance_residual: f64,
    /// `|sum m - 1|`.
    pub mass_defect: f64,
    /// Pressure removed from the potential before normalizing.
    pub pressure_shift: f64,
    triple: RpfTriple,
    potential: Vec<f64>,
}

impl EquilibriumMeasure {
    pub fn integrate(&self, g: &[f64]) -> f64 {
        self.weights.iter().zip(g).map(|(m, x)| m * x).sum()
    }

    pub fn triple(&self) -> &RpfTriple {
        &self.triple
    }

    /// The normalized (pressure-zero) potential.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `(P u)(v) = E[u(sigma x) | x in v]` for the cylinder Markov chain of `m`.
    fn forward(&self, l: &SparseMatrix, u: &[f64], buf: &mut [f64]) -> Vec<f64> {
        let mu = &self.triple.mu;
        let weighted: Vec<f64> = u.iter().zip(mu).map(|(a, b)| a * b).collect();
        l.apply_transpose(&weighted, buf);
        buf.iter().zip(mu).map(|(x, m)| x / (self.triple.beta * m)).collect()
    }

    /// Asymptotic variance `lim (1/n) int (S_n g - n int g)^2 dm`, summed
    /// over autocovariances of the cylinder chain.
    pub fn variance(&self, op: &TransferOperator, g: &[f64]) -> f64 {
        let l = op.matrix(&self.potential);
        let mean = self.integrate(g);
        let centered: Vec<f64> = g.iter().map(|x| x - mean).collect();
        let c0: f64 = self.weights.iter().zip(&centered).map(|(m, x)| m * x * x).sum();
        let mut total = c0;
        let mut u = centered.clone();
        let mut buf = vec![0.0; l.dim()];
        for _ in 0..100_000 {
            u = self.forward(&l, &u, &mut buf);
            let ck: f64 = self.weights.iter().zip(&centered).zip(&u).map(|((m, a), b)| m * a * b).sum();
            total += 2.0 * ck;
            if ck.abs() <= 1e-17 * c0.max(1e-300) {
                break;
            }
        }
        total
    }
}

/// Equilibrium measure of `f` on the cylinders of a cylinder-scheme operator,
/// after shifting `f` by `-P(f)`.
pub fn equilibrium_measure(op: &TransferOperator, f: &[f64], cfg: &NumericsConfig) -> Result<EquilibriumMeasure> {
    if !op.is_cylinder_scheme() {
        return Err(Error::DegenerateConfiguration("equilibrium measures need a cylinder discretization".into()));
    }
    let (p, start) = pressure(op, f, None, cfg)?;
    let potential: Vec<f64> = f.iter().map(|x| x - p).collect();
    let l = op.matrix(&potential);
    let triple = rpf_leading_triple(&l, Some(&start), cfg)?;
    let weights: Vec<f64> = triple.h.iter().zip(&triple.mu).map(|(a, b)| a * b).collect();
    let mut lh = vec![0.0; l.dim()];
    l.apply(&triple.h, &mut lh);
    let invariance_residual = lh
        .iter()
        .zip(&triple.mu)
        .zip(&weights)
        .map(|((x, m), w)| (m * x / triple.beta - w).abs())
        .fold(0.0, f64::max);
    let mass_defect = (weights.iter().sum::<f64>() - 1.0).abs();
    Ok(EquilibriumMeasure {
        depth: op.scheme.resolution(),
        weights,
        invariance_residual,
        mass_defect,
        pressure_shift: p,
        triple,
        potential,
    })
}

/// First and second derivatives of `t -> P(f + t g)` at `t = 0`, each
/// analytically and by finite differences.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PressureDerivatives {
    /// `int g dm`.
    pub integral: f64,
    pub fd1: f64,
    pub fd1_error: f64,
    /// Asymptotic variance of `g` under `m`.
    pub variance: f64,
    pub fd2: f64,
    pub fd2_error: f64,
}

/// Derivatives of pressure at `f` (normalized to pressure zero first) in the direction `g`.
pub fn pressure_derivatives(
    op: &TransferOperator,
    f: &[f64],
    g: &[f64],
    cfg: &NumericsConfig,
) -> Result<PressureDerivatives> {
    let m = equilibrium_measure(op, f, cfg)?;
    let base = m.potential().to_vec();
    let start = m.triple().h.clone();
    let p = |t: f64| {
        let pot: Vec<f64> = base.iter().zip(g).map(|(a, b)| a + t * b).collect();
        pressure(op, &pot, Some(&start), cfg).map(|r| r.0)
    };
    let scale = g.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    let step = cfg.fd_step / scale;
    let d1 = fd_derivative(p, 0.0, Order::First, step)?;
    let d2 = fd_derivative(p, 0.0, Order::Second, step)?;
    Ok(PressureDerivatives {
        integral: m.integrate(g),
        fd1: d1.value,
        fd1_error: d1.error,
        variance: m.variance(op, g),
        fd2: d2.value,
        fd2_error: d2.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::TransitionMatrix;

    fn first_symbol(c: &[f64]) -> impl Fn(&[u32]) -> f64 + '_ {
        move |w| c[w[0] as usize]
    }

    #[test]
    fn two_shift_zero_potential() {
        let cfg = NumericsConfig::default();
        let a = TransitionMatrix::full_shift(2).unwrap();
        for depth in 1..5 {
            let op = TransferOperator::shift(&a, depth, |_| 0.0).unwrap();
            let t = rpf_leading_triple(&op.matrix(op.phi()), None, &cfg).unwrap();
            assert!((t.beta - 2.0).abs() < 1e-14);
            let m = equilibrium_measure(&op, op.phi(), &cfg).unwrap();
            let mass = 0.5f64.powi(depth as i32);
            assert!(m.weights.iter().all(|w| (w - mass).abs() < 1e-14));
            assert!(m.invariance_residual < 1e-14);
        }
    }

    #[test]
    fn first_symbol_gibbs_measure() {
        let cfg = NumericsConfig::default();
        let a = TransitionMatrix::full_shift(2).unwrap();
        let e = std::f64::consts::E;
        let op = TransferOperator::shift(&a, 1, first_symbol(&[1.0, -1.0])).unwrap();
        let t = rpf_leading_triple(&op.matrix(op.phi()), None, &cfg).unwrap();
        assert!((t.beta - (e + 1.0 / e)).abs() < 1e-13);
        let m = equilibrium_measure(&op, op.phi(), &cfg).unwrap();
        assert!((m.weights[0] - e / (e + 1.0 / e)).abs() < 1e-13);
    }

    #[test]
    fn log_cosh_derivatives() {
        let cfg = NumericsConfig::default();
        let a = TransitionMatrix::full_shift(2).unwrap();
        let op = TransferOperator::shift(&a, 1, |_| -(2f64.ln())).unwrap();
        let g = op.sample_words(first_symbol(&[1.0, -1.0]));
        let d = pressure_derivatives(&op, op.phi(), &g, &cfg).unwrap();
        assert!(d.integral.abs() < 1e-14);
        assert!((d.variance - 1.0).abs() < 1e-12, "{}", d.variance);
        assert!(d.fd1.abs() < 1e-10);
        assert!((d.fd2 - 1.0).abs() < 1e-6);
        let c = op.sample_words(|_| 0.7);
        let d = pressure_derivatives(&op, op.phi(), &c, &cfg).unwrap();
        assert!((d.integral - 0.7).abs() < 1e-14 && d.variance.abs() < 1e-14);
    }

    #[test]
    fn markov_chain_variance_against_dense_oracle() {
        // Depth-2 potential on a non-backtracking shift; the oracle is the
        // second derivative of the dense leading eigenvalue.
        let cfg = NumericsConfig::default();
        let a = TransitionMatrix::full_shift_without_backtracking(4, |i| i ^ 1).unwrap();
        let f = |w: &[u32]| -0.3 * w[0] as f64 + 0.2 * (w[1] as f64).sin() - 1.0;
        let op = TransferOperator::shift(&a, 2, f).unwrap();
        let g = op.sample_words(|w| (w[0] as f64 - 1.5) * (1.0 + w[1] as f64));
        let d = pressure_derivatives(&op, op.phi(), &g, &cfg).unwrap();
        let dense_p = |t: f64| {
            let pot: Vec<f64> = op.phi().iter().zip(&g).map(|(a, b)| a + t * b).collect();
            let m = op.matrix(&pot).to_dense();
            m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max).ln()
        };
        let first = fd_derivative(|t| Ok(dense_p(t)), 0.0, Order::First, 1e-2).unwrap().value;
        let second = fd_derivative(|t| Ok(dense_p(t)), 0.0, Order::Second, 1e-2).unwrap().value;
        assert!((d.integral - first).abs() < 1e-6, "{} {}", d.integral, first);
        assert!((d.variance - second).abs() < 1e-5 * (1.0 + second.abs()), "{} {}", d.variance, second);
    }
}
