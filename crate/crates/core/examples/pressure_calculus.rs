//! Pressure, Gibbs measure and the first two pressure derivatives for a
//! potential on a subshift, checked against finite differences.

use limitset::coding::TransitionMatrix;
use limitset::numerics::NumericsConfig;
use limitset::thermo::{equilibrium_measure, pressure_derivatives, rpf_leading_triple, TransferOperator};

fn main() -> limitset::Result<()> {
    let cfg = NumericsConfig::default();
    // Free group on two generators: four symbols, no backtracking.
    let shift = TransitionMatrix::full_shift_without_backtracking(4, |i| i ^ 1)?;
    let op = TransferOperator::shift(&shift, 3, |w| -1.0 - 0.4 * w[0] as f64 + 0.1 * (w[1] * w[2]) as f64)?;

    let triple = rpf_leading_triple(&op.matrix(op.phi()), None, &cfg)?;
    println!("P(f) = {:.12}, |lambda_2|/beta ~ {:.3}", triple.beta.ln(), triple.gap);
    println!("eigen residuals {:.1e} / {:.1e}", triple.right_residual, triple.left_residual);

    let m = equilibrium_measure(&op, op.phi(), &cfg)?;
    println!("{} cylinders, invariance residual {:.1e}", m.weights.len(), m.invariance_residual);

    let g = op.sample_words(|w| if w[0] == w[2] { 1.0 } else { -0.5 });
    let d = pressure_derivatives(&op, op.phi(), &g, &cfg)?;
    println!("P'  = {:.10} (FD {:.10})", d.integral, d.fd1);
    println!("P'' = {:.10} (FD {:.10})", d.variance, d.fd2);
    Ok(())
}
