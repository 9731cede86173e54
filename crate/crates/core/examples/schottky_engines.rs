//! Two independent dimension estimates for a classical Schottky group:
//! the transfer operator on cylinders and periodic-orbit sums.

use limitset::coding::schottky_coding;
use limitset::groups::{build_schottky, Circle};
use limitset::numerics::NumericsConfig;
use limitset::thermo::{operator_dimension, OperatorSettings, OrbitEnsemble, DEFAULT_BRACKET};
use limitset::C64;

fn main() -> limitset::Result<()> {
    let circles = [
        Circle::new(C64::new(-3.0, 0.0), 1.0),
        Circle::new(C64::new(3.0, 0.0), 1.0),
        Circle::new(C64::new(0.0, -3.0), 1.0),
        Circle::new(C64::new(0.0, 3.0), 1.0),
    ];
    let group = build_schottky(&circles)?;
    let coding = schottky_coding(&group)?;

    let (op, _) = operator_dimension(&coding, &OperatorSettings::for_coding(&coding), &NumericsConfig::default())?;
    println!("operator: {:.10} at cylinder depth {}", op.s_star, op.resolution);

    // Level-n dimensions converge geometrically to the same value.
    let n_max = limitset::cli::default_n_max(&coding);
    let ensemble = OrbitEnsemble::build(&coding, n_max)?;
    let spectrum = ensemble.base_spectrum();
    for (level, s) in spectrum.levels.iter().zip(spectrum.dimensions(DEFAULT_BRACKET)?) {
        println!("  period {:>2}: {:>7} orbits, s_n = {s:.10}", level.period, level.lengths.len());
    }
    Ok(())
}
