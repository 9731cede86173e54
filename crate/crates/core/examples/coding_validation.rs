//! Markov, expansion and aperiodicity checks on the Bowen–Series coding of
//! a surface group. Pass a genus as the first argument (default 2).

use limitset::coding::{build_bowen_series_partition, validate_coding};
use limitset::groups::build_regular_4g_gon_group;

fn main() -> limitset::Result<()> {
    let genus = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let (pres, rho) = build_regular_4g_gon_group(genus)?;
    let coding = build_bowen_series_partition(&pres, &rho)?;
    let report = validate_coding(&coding, 4, 1000, 1)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
