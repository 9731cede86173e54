//! Pressure-metric norms on the twist-bend family of the octagon group,
//! at the fuchsian point and after bending one curve.

use limitset::coding::build_bowen_series_partition;
use limitset::groups::{build_regular_4g_gon_group, DeformationFamily, Tag};
use limitset::metrics::{degeneracy_probe, evaluate_direction, ConformalCheck, MetricEngine};
use limitset::numerics::NumericsConfig;
use limitset::thermo::OrbitEnsemble;

fn main() -> limitset::Result<()> {
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let ensemble = OrbitEnsemble::build(&coding, 6)?;
    let family = DeformationFamily::new(&pres, &rho, &[("x1", Tag::Shear), ("x1", Tag::Bend), ("x2", Tag::Shear)])?;
    let cfg = NumericsConfig::default();
    let engine = MetricEngine::new(&family, &ensemble, &cfg, 1.0)?;

    for base in [family.origin(), vec![0.0, 0.15, 0.0]] {
        println!("base {base:?}");
        for i in 0..family.dim() {
            let v = family.tangent(i, &base)?;
            let e = evaluate_direction(&engine, &v)?;
            let c = ConformalCheck::from_evaluation(&e);
            println!(
                "  {:<9} W = {:.4e} ± {:.1e}   G = {:.4e}   h W = {:.4e}",
                v.label, e.w.value, e.w.error, c.g, c.h_w
            );
        }
        let basis: Vec<_> = (0..family.dim()).map(|i| family.tangent(i, &base)).collect::<limitset::Result<_>>()?;
        let null: Vec<String> = degeneracy_probe(&engine, &basis)?.into_iter().filter(|d| d.null).map(|d| d.label).collect();
        println!("  null directions: {null:?}");
    }
    Ok(())
}
