use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qlayer_cli::commands;

/// Quantum-layer spectral toolkit.
#[derive(Parser)]
#[command(name = "qlayer", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the stages enabled in a config file and write the report.
    Run {
        config: PathBuf,
        /// Overrides `[output] dir` and QLAYER_OUTPUT_DIR.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Re-evaluate a stored certificate.
    Verify { certificate: PathBuf },
    /// Inspect the surface catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Describe { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.verb {
        Verb::Run { config, output_dir } => commands::run_verb(&config, output_dir.as_deref()),
        Verb::Verify { certificate } => commands::verify_verb(&certificate),
        Verb::Catalog { action: CatalogAction::List } => commands::catalog_list(),
        Verb::Catalog { action: CatalogAction::Describe { name } } => commands::catalog_describe(&name),
    };
    ExitCode::from(code)
}
