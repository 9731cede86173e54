//! Derivatives of closed-geodesic lengths along a bend and a shear of the
//! octagon group, and reality of cross ratios of axis endpoints.

use limitset::coding::build_bowen_series_partition;
use limitset::groups::{build_regular_4g_gon_group, enumerate_conjugacy_classes, ClassFilter, DeformationFamily};
use limitset::metrics::{cross_ratio_reality, length_derivative_scan, shortest_classes, MetricEngine};
use limitset::numerics::NumericsConfig;
use limitset::thermo::OrbitEnsemble;

fn main() -> limitset::Result<()> {
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let ensemble = OrbitEnsemble::build(&coding, 5)?;
    let family = DeformationFamily::twist_bend(&pres, &rho, "x2")?;
    let cfg = NumericsConfig::default();
    let engine = MetricEngine::new(&family, &ensemble, &cfg, 1.0)?;

    let classes = enumerate_conjugacy_classes(rho.rank(), Some(&rho), 4, ClassFilter { primitive_only: true });
    let short = shortest_classes(&rho, &classes, 20)?;
    for i in 0..2 {
        let v = family.tangent(i, &family.origin())?;
        let scan = length_derivative_scan(&engine, &v, &short)?;
        println!("{}: k = {:.2e}", scan.label, scan.k_hat);
        for r in scan.rows.iter().take(6) {
            println!("  {:<14} L = {:.6}  L' = {:>10.3e}  (hL)' = {:>10.3e}", r.word, r.length, r.l_dot, r.hl_dot);
        }
    }
    let cr = cross_ratio_reality(&rho, &short, 200, 3)?;
    println!("max |Im cross ratio| over {} samples: {:.1e}", cr.samples, cr.max_imag);
    Ok(())
}
