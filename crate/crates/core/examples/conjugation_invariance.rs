//! Moving a group by a Möbius map changes every matrix but no dimension.

use limitset::coding::build_bowen_series_partition;
use limitset::groups::build_regular_4g_gon_group;
use limitset::numerics::NumericsConfig;
use limitset::thermo::{operator_dimension, OperatorSettings};
use limitset::{MoebiusMap, C64};

fn main() -> limitset::Result<()> {
    let cfg = NumericsConfig::default();
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let base = operator_dimension(&coding, &OperatorSettings::for_coding(&coding), &cfg)?.0;

    let k = MoebiusMap::new(C64::new(1.2, 0.3), C64::new(-0.4, 0.9), C64::new(0.2, -0.1), C64::new(0.8, 0.0))?;
    let moved = coding.conjugated(&k)?;
    let first = moved.rho.generators()[0];
    println!("first generator now {first}");
    let s = operator_dimension(&moved, &OperatorSettings::for_coding(&moved), &cfg)?.0;
    println!("dimension {:.12} -> {:.12}", base.s_star, s.s_star);
    Ok(())
}
