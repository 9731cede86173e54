use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use limitset::cli::{exit_code, run, Command, EngineChoice, Overrides};

#[derive(Parser)]
#[command(name = "limitset", version, about = "Limit-set dimensions and pressure metrics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    engine: Option<EngineChoice>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use the regular 4g-gon surface group of this genus.
    #[arg(long, global = true)]
    genus: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the group and its coding and check the coding.
    Validate,
    /// Hausdorff dimension of the limit set.
    Dimension,
    /// Pressure-metric report on a deformation family.
    Metrics,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Validate => Command::Validate,
        Cmd::Dimension => Command::Dimension,
        Cmd::Metrics => Command::Metrics,
    };
    let overrides = Overrides {
        engine: cli.engine,
        depth: cli.depth,
        n_max: cli.nmax,
        out: cli.out,
        seed: cli.seed,
        genus: cli.genus,
    };
    let result = run(command, cli.config.as_deref(), &overrides);
    match &result {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            if !o.passed {
                eprintln!("check failed; see the report");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
