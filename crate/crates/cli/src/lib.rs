//! Command-line front end for `kahler-core`: runs verification suites from a
//! TOML configuration and writes the report stream as JSON lines.

pub mod config;
pub mod output;
pub mod suites;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use kahler_core::geometry::ModelMetric;
use kahler_core::ma::{eps_sweep, sweep_report, write_grid_dump};
use kahler_core::report::VerificationReport;

use config::{RunConfig, Suite};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] kahler_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "kahler-verify", version, about = "Numerical verification of Kähler curvature identities and estimates")]
pub struct Cli {
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for `report.jsonl`, `timing.json` and auxiliary files.
    /// Without it the report stream goes to stdout and the summary to stderr.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run suites on separate threads.
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Multiply every tolerance by this factor.
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every suite.
    VerifyAll,
    /// One suite.
    Run {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// A single Monge–Ampère solve.
    Ma {
        #[arg(long, default_value = "perturbed-torus")]
        background: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        #[arg(long, default_value_t = kahler_core::ma::DEFAULT_EPS0)]
        eps0: f64,
        /// Write the solution as a binary grid dump.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// The randomized Royden sweep.
    Royden {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        max_nu: Option<usize>,
    },
    /// A decreasing sequence of ε on one background.
    Sweep {
        #[arg(long, default_value = "perturbed-torus")]
        background: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        /// Write whitespace-separated plot columns to this file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// List the claim registry as JSON lines.
    Claims,
}

impl Cli {
    /// The configuration file (or defaults) with command-line overrides.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol_scale {
            cfg.tol_scale = t;
        }
        if self.out.is_some() {
            cfg.out.clone_from(&self.out);
        }
        cfg.parallel |= self.parallel;
        match &self.command {
            Command::VerifyAll => cfg.suite = Suite::All,
            Command::Run { suite } => cfg.suite = *suite,
            Command::Royden { trials, max_n, max_nu } => {
                cfg.royden.trials = trials.unwrap_or(cfg.royden.trials);
                cfg.royden.max_n = max_n.unwrap_or(cfg.royden.max_n);
                cfg.royden.max_nu = max_nu.unwrap_or(cfg.royden.max_nu);
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn background(name: &str, dim: usize, amplitude: f64) -> Result<ModelMetric, CliError> {
    Ok(ModelMetric::from_name(name, dim, 1.0, amplitude)?)
}

/// Writes the reports (to `out/report.jsonl` or stdout) and the summary.
fn emit(reports: &[VerificationReport], out: Option<&Path>) -> Result<(), CliError> {
    let jsonl = output::to_jsonl(reports);
    let summary = output::summary_table(reports);
    match out {
        Some(dir) => {
            output::write_file(&dir.join("report.jsonl"), &jsonl)?;
            print!("{summary}");
        }
        None => {
            print!("{jsonl}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn emit_timings(timings: &[(Suite, f64)], out: Option<&Path>) -> Result<(), CliError> {
    let Some(dir) = out else { return Ok(()) };
    let map: serde_json::Map<String, serde_json::Value> =
        timings.iter().map(|(s, t)| (s.name().to_string(), serde_json::json!(t))).collect();
    let total: f64 = timings.iter().map(|(_, t)| t).sum();
    let doc = serde_json::json!({ "suites": map, "total_seconds": total });
    output::write_file(&dir.join("timing.json"), &format!("{doc:#}\n"))
}

/// Runs a parsed command line and returns the process exit code: 0 when
/// every report passes, 1 when any fails. Errors map to exit code 2.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.run_config()?;
    let out = cfg.out.clone();
    let out = out.as_deref();
    let mut reports = match &cli.command {
        Command::Claims => {
            for c in kahler_core::claims::REGISTRY {
                println!("{}", serde_json::to_string(c).expect("claims serialize"));
            }
            return Ok(0);
        }
        Command::VerifyAll | Command::Run { .. } => {
            let run = suites::run(&cfg);
            emit(&run.reports, out)?;
            emit_timings(&run.timings, out)?;
            return Ok(i32::from(output::any_failed(&run.reports)));
        }
        Command::Royden { .. } => {
            let r = &cfg.royden;
            vec![suites::royden_reports(r.trials, cfg.seed, r.max_n, r.max_nu, r.workers)]
        }
        Command::Ma {
            background: bg,
            dim,
            eps,
            grid,
            amplitude,
            eps0,
            dump,
        } => {
            let model = background(bg, *dim, *amplitude)?;
            let single = suites::ma_single(&model, *eps, *grid, cfg.ma.tol, cfg.ma.max_iter, *eps0)?;
            if let Some(path) = dump {
                write_grid_dump(path, &single.problem, &single.state)?;
            }
            if let Some(dir) = out {
                let lines: String = single
                    .state
                    .history
                    .iter()
                    .map(|h| serde_json::to_string(h).expect("records serialize") + "\n")
                    .collect();
                output::write_file(&dir.join("iterations.jsonl"), &lines)?;
            }
            single.reports
        }
        Command::Sweep {
            background: bg,
            dim,
            eps,
            grid,
            amplitude,
            plot,
        } => {
            let model = background(bg, *dim, *amplitude)?;
            let rec = eps_sweep(&model, *grid, eps, cfg.ma.tol, cfg.ma.max_iter)?;
            if let Some(path) = plot {
                output::emit_sweep_plotdata(&rec, path)?;
            }
            vec![sweep_report(&rec)]
        }
    };
    suites::finish(&mut reports, cfg.tol_scale);
    emit(&reports, out)?;
    Ok(i32::from(output::any_failed(&reports)))
}
