use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lambda_imprint::checks::run_checks;
use lambda_imprint::io::{
    parse_document, reproduce, run_bundle, sweep_bundle_for, write_results, Overrides, ResultBundle,
};
use lambda_imprint::scenarios::figures::FigureId;
use lambda_imprint::{Error, Result};

/// Storage, displacement and retrieval of optical pulses in a three-level
/// lambda medium.
#[derive(Debug, Parser)]
#[command(name = "lambda-imprint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single scenario from a TOML configuration.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the parameter sweep described in a TOML configuration.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Reproduce a figure or table: fig2, fig3, fig4a, fig4b, fig4c, fig5a,
    /// fig5b, fig5c, table1.
    Reproduce {
        id: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the invariant and convergence self-checks.
    Check,
}

#[derive(Debug, Args)]
struct RunOpts {
    /// Worker threads for sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the full (Z, T) envelope record.
    #[arg(long)]
    retain_fields: bool,
    /// Time step, tau_a.
    #[arg(long)]
    dt: Option<f64>,
    /// Space step, 1/kappa_a.
    #[arg(long)]
    dz: Option<f64>,
}

impl RunOpts {
    fn overrides(&self) -> Overrides {
        Overrides { workers: self.workers, dt: self.dt, dz: self.dz, retain_fields: self.retain_fields }
    }
}

const DEFAULT_OUT: &str = "results";

fn load(path: &Path, opts: &RunOpts) -> Result<(lambda_imprint::scenarios::ScenarioConfig, PathBuf)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_document(&text)?;
    let mut cfg = doc.to_config()?;
    opts.overrides().apply(&mut cfg);
    cfg.validate()?;
    let out = opts.out.clone().or(doc.output.dir).unwrap_or_else(|| DEFAULT_OUT.into());
    Ok((cfg, out))
}

/// Writes the bundle, reports it, and turns recorded failures into an error
/// after everything has been flushed.
fn finish(mut bundle: ResultBundle, out: &Path, started: Instant) -> Result<()> {
    bundle.manifest.runtime_seconds = started.elapsed().as_secs_f64();
    let files = write_results(&bundle, out)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    for a in &bundle.manifest.advisories {
        eprintln!("advisory: {a}");
    }
    match bundle.manifest.failures.len() {
        0 => Ok(()),
        n => {
            for f in &bundle.manifest.failures {
                eprintln!("failed: {f}");
            }
            Err(Error::Incomplete(format!("{n} run(s) failed; partial results written")))
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::Run { config, opts } => {
            let (cfg, out) = load(&config, &opts)?;
            finish(run_bundle(&cfg)?, &out, started)
        }
        Command::Sweep { config, opts } => {
            let (cfg, out) = load(&config, &opts)?;
            finish(sweep_bundle_for(&cfg)?, &out, started)
        }
        Command::Reproduce { id, opts } => {
            let id: FigureId = id.parse()?;
            let out = opts.out.clone().unwrap_or_else(|| DEFAULT_OUT.into());
            finish(reproduce(id, &opts.overrides())?, &out, started)
        }
        Command::Check => {
            let outcomes = run_checks()?;
            let mut failed = 0;
            for c in &outcomes {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Error::Incomplete(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
