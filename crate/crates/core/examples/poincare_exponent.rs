//! Critical exponent from orbit-point counting, compared with the
//! transfer-operator dimension.

use limitset::coding::schottky_coding;
use limitset::groups::{build_schottky, poincare_delta_estimate, Circle};
use limitset::numerics::NumericsConfig;
use limitset::thermo::{operator_dimension, OperatorSettings};
use limitset::C64;

fn main() -> limitset::Result<()> {
    let group = build_schottky(&[
        Circle::new(C64::new(-2.0, 0.0), 1.0),
        Circle::new(C64::new(2.0, 0.0), 1.0),
        Circle::new(C64::new(0.0, -2.2), 0.8),
        Circle::new(C64::new(0.0, 2.2), 0.8),
    ])?;
    let coding = schottky_coding(&group)?;
    let op = operator_dimension(&coding, &OperatorSettings::for_coding(&coding), &NumericsConfig::default())?.0;
    for len in [6, 8, 10] {
        let d = poincare_delta_estimate(&group.rho, len)?;
        println!(
            "words up to {len:>2}: {:>7} elements, complete to R = {:.1}, delta ~ {:.4}",
            d.elements, d.complete_radius, d.delta
        );
    }
    println!("operator dimension {:.6}", op.s_star);
    Ok(())
}
