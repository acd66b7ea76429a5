use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapsim::analytic::{trapping_limits, ResonantGap};
use gapsim::cli::{preset, run_scenario, ComputationPath, Overrides, ScenarioConfig};
use gapsim::{Error, Result};

#[derive(Parser)]
#[command(name = "gapsim", version, about = "Atom in a band-gap reservoir: figure presets and scenario runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure preset (fig1a, fig1b, fig2a-d, fig3, fig4a, fig4b, fig5, fig7).
    Preset { name: String },
    /// Run a JSON scenario config.
    Run { config: PathBuf },
    /// Check a config and print the validation report.
    Validate { config: PathBuf },
    /// Print the long-time trapping limits for the config's reservoir.
    Limits { config: PathBuf },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides { out_dir: a.out_dir, tol: a.tol, modes: a.modes, cutoff: a.cutoff, t_max: a.t_max }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    overrides.apply(&mut cfg);
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32> {
    let overrides = Overrides::from(cli.overrides);
    let cfg = match cli.command {
        Command::Preset { name } => {
            let mut cfg = preset(&name)?;
            overrides.apply(&mut cfg);
            cfg
        }
        Command::Run { config } => load(&config, &overrides)?,
        Command::Validate { config } => {
            let cfg = load(&config, &overrides)?;
            let validation = cfg.spec.validate();
            println!("{}", serde_json::to_string_pretty(&validation).expect("serializes"));
            cfg.check()?;
            cfg.spec.ensure_valid()?;
            if cfg.has_path(ComputationPath::Analytic) {
                ResonantGap::new(&cfg.spec)?;
            }
            return Ok(0);
        }
        Command::Limits { config } => {
            let cfg = load(&config, &overrides)?;
            cfg.spec.ensure_valid()?;
            let limits = trapping_limits(&cfg.spec)?;
            println!("{}", serde_json::to_string_pretty(&limits).expect("serializes"));
            return Ok(0);
        }
    };
    let report = run_scenario(&cfg);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(err) = &report.error {
        eprintln!("error: {}", err.message);
    } else {
        println!("wrote {} files to {}", report.files.len() + 1, cfg.output_dir.display());
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = execute(cli).unwrap_or_else(|e: Error| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
