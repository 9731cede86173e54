//! Dimension along a shear path and a bend path through the fuchsian
//! octagon group, printed as CSV.

use limitset::cli::{csv_table, CsvCell};
use limitset::coding::build_bowen_series_partition;
use limitset::groups::{build_regular_4g_gon_group, DeformationFamily};
use limitset::metrics::{hausdorff_path_scan, MetricEngine};
use limitset::numerics::NumericsConfig;
use limitset::thermo::{Engine, OrbitEnsemble};

fn main() -> limitset::Result<()> {
    let (pres, rho) = build_regular_4g_gon_group(2)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let ensemble = OrbitEnsemble::build(&coding, 6)?;
    let family = DeformationFamily::twist_bend(&pres, &rho, "x1")?;
    let cfg = NumericsConfig::default();
    let engine = MetricEngine::new(&family, &ensemble, &cfg, 1.0)?;
    let taus: Vec<f64> = (-4..=4).map(|k| 0.05 * k as f64).collect();

    let shear = hausdorff_path_scan(&engine, &family.tangent(0, &family.origin())?, &taus, Engine::Operator)?;
    let bend = hausdorff_path_scan(&engine, &family.tangent(1, &family.origin())?, &taus, Engine::Orbit)?;
    let rows: Vec<Vec<CsvCell>> = shear
        .samples
        .iter()
        .zip(&bend.samples)
        .map(|(s, b)| vec![CsvCell::Num(s.tau), CsvCell::Num(s.h), CsvCell::Num(b.h), CsvCell::Num(b.hf)])
        .collect();
    print!("{}", csv_table(&["tau", "h_shear", "h_bend", "hF_bend"], &rows));
    Ok(())
}
