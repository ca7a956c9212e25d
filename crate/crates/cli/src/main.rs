// SPDX-License-Identifier: MIT OR Apache-2.0

//! `crh-kit`: seeded pipelines for cylindrical steering analysis.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crh_core::io::{Bundle, OutputFormat, RunConfig};
use crh_core::pipeline::{run_pipeline, Command};
use crh_core::CrhError;

#[derive(Parser, Debug)]
#[command(
    name = "crh-kit",
    version,
    about = "Cylindrical steering geometry: probing and steerability pipelines"
)]
struct Cli {
    /// Run configuration (.toml or .json). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "crh-out")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "CRH_KIT_THREADS")]
    threads: Option<usize>,

    /// Only errors on stderr; nothing on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Build the synthetic scenario and write contrastive ACTV1 pairs.
    GenScenario,
    /// Construct steering vectors with every configured method.
    BuildVectors,
    /// Split steering vectors into axial, in-plane and residual parts.
    Decompose,
    /// Budgeted optimization, cylinder fit and landscape sweep.
    Probe,
    /// Probe sweep repeated in a random orthonormal frame.
    NullControl,
    /// Penalty trade-off over a (rho, lambda) grid.
    Implication1,
    /// Exponent scan of steerability against the angular power law.
    Implication2,
    /// Similarity-transfer correlation under the null generator.
    Implication3,
    /// Seeded batches of the lemma, theorem and balance checks.
    VerifyTheory,
    /// Index and verify the manifests already in the output directory.
    Report,
    /// Print the default configuration as TOML.
    DefaultConfig,
}

impl Cmd {
    fn pipeline(self) -> Option<Command> {
        Some(match self {
            Cmd::GenScenario => Command::GenScenario,
            Cmd::BuildVectors => Command::BuildVectors,
            Cmd::Decompose => Command::Decompose,
            Cmd::Probe => Command::Probe,
            Cmd::NullControl => Command::NullControl,
            Cmd::Implication1 => Command::Implication1,
            Cmd::Implication2 => Command::Implication2,
            Cmd::Implication3 => Command::Implication3,
            Cmd::VerifyTheory => Command::VerifyTheory,
            Cmd::Report => Command::Report,
            Cmd::DefaultConfig => return None,
        })
    }
}

fn error_report(err: &CrhError) -> serde_json::Value {
    let class = err.class();
    serde_json::json!({
        "error": class.name(),
        "exit_code": class.exit_code(),
        "message": err.to_string(),
    })
}

fn run(cli: &Cli) -> Result<(), CrhError> {
    let Some(command) = cli.command.pipeline() else {
        let text = RunConfig::default().to_toml()?;
        print!("{text}");
        return Ok(());
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CrhError::InvalidArgument("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CrhError::InvalidArgument(e.to_string()))?;
    }
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    let bundle = Bundle::new(&cli.out, cli.format.into())?;
    let manifest = run_pipeline(&config, command, &bundle)?;
    if !cli.quiet {
        println!(
            "{} {} -> {}",
            manifest.command,
            &manifest.config_hash[..12],
            cli.out.display()
        );
        for o in &manifest.outputs {
            println!("  {o}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_report(&e));
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
