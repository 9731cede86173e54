//! Groups round-trip through JSON documents, and the command-line runner
//! accepts them through a config file.

use limitset::cli::{run, Command, Overrides};
use limitset::groups::{build_schottky, Circle, Group};
use limitset::C64;

fn main() -> limitset::Result<()> {
    let schottky = build_schottky(&[
        Circle::new(C64::new(-2.5, 0.0), 1.0),
        Circle::new(C64::new(2.5, 0.0), 1.0),
        Circle::new(C64::new(0.0, -2.5), 1.0),
        Circle::new(C64::new(0.0, 2.5), 1.0),
    ])?;
    let group = Group::Schottky(schottky);
    let text = group.to_json();
    let back = Group::from_json(&text)?;
    println!("{} -> {}, residual {:.1e}", group.label(), back.label(), back.residual());

    let dir = std::env::temp_dir().join("limitset-group-files");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("group.json"), text)?;
    let config = format!(
        r#"{{"schema": "{}", "group_file": "group.json", "engine": "both", "out": "{}"}}"#,
        limitset::cli::SCHEMA,
        dir.join("out").display()
    );
    std::fs::write(dir.join("run.json"), config)?;
    let outcome = run(Command::Dimension, Some(&dir.join("run.json")), &Overrides::default())?;
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&outcome.files[0])?)?;
    for r in report["results"].as_array().into_iter().flatten() {
        println!("{:<9} s* = {}", r["engine"].as_str().unwrap_or("?"), r["s_star"]);
    }
    println!("agreement {} (tolerance {}), passed {}", report["agreement"], report["agreement_tolerance"], outcome.passed);
    Ok(())
}
