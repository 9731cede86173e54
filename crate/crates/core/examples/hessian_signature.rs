//! Hessian of the dimension on the four-direction twist-bend chart of the
//! octagon group. Shears leave the group fuchsian; bends push the
//! dimension up, so the signature is two positive and two zero.

use limitset::coding::build_bowen_series_partition;
use limitset::groups::{build_regular_4g_gon_group, DeformationFamily, Tag};
use limitset::metrics::{hessian_signature, HessianQuantity, MetricEngine};
use limitset::numerics::NumericsConfig;
use limitset::thermo::OrbitEnsemble;

fn main() -> limitset::Result<()> {
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let ensemble = OrbitEnsemble::build(&coding, 6)?;
    let family = DeformationFamily::new(
        &pres,
        &rho,
        &[("x1", Tag::Shear), ("x1", Tag::Bend), ("x2", Tag::Shear), ("x2", Tag::Bend)],
    )?;
    let cfg = NumericsConfig::default();
    let engine = MetricEngine::new(&family, &ensemble, &cfg, 1.0)?;
    let chart: Vec<_> = (0..4).map(|i| family.tangent(i, &family.origin())).collect::<limitset::Result<_>>()?;

    for q in [HessianQuantity::Dimension, HessianQuantity::DimensionTimesLength] {
        let h = hessian_signature(&engine, &chart, q)?;
        println!("{q:?}: signature {:?}, threshold {:.1e}", h.signature, h.threshold);
        for (label, row) in h.labels.iter().zip(&h.matrix) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.2e}")).collect();
            println!("  {label:<9}{}", cells.join(""));
        }
        println!("  eigenvalues {:?}", h.eigenvalues.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>());
    }
    Ok(())
}
