//! Dimension of the limit set of the genus-2 octagon group, which is the
//! whole circle, so the answer should be 1.
//!
//! ```text
//! cargo run --release --example octagon_dimension
//! ```

use limitset::coding::build_bowen_series_partition;
use limitset::groups::build_regular_4g_gon_group;
use limitset::numerics::NumericsConfig;
use limitset::thermo::{operator_dimension, OperatorSettings};

fn main() -> limitset::Result<()> {
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    println!("{} sides, relator residual {:.1e}", pres.sides(), pres.relator_residual(&rho));

    let coding = build_bowen_series_partition(&pres, &rho)?;
    println!("{} cells, {} transitions", coding.n_cells(), coding.transitions.nnz());

    let settings = OperatorSettings::for_coding(&coding);
    let (result, steps) = operator_dimension(&coding, &settings, &NumericsConfig::default())?;
    for s in &steps {
        match s.pressure_change {
            Some(c) => println!("  resolution {:>3}: s* = {:.12}  (pressure moved {c:.1e})", s.resolution, s.s_star),
            None => println!("  resolution {:>3}: s* = {:.12}", s.resolution, s.s_star),
        }
    }
    println!("dimension {:.12}, |P(s* phi)| = {:.1e}", result.s_star, result.residual);
    Ok(())
}
