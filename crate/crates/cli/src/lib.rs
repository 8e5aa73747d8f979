//! Command-line pipelines: simulate, estimate, solve, validate, report.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ivie_core::solver::{LambdaRule, Penalty};

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "ivie",
    version,
    about = "Estimate a nonlinear causal effect from instrument-level data"
)]
pub struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples from the configured scenario into samples.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build kernel.csv and rhs.csv from a samples file or a config.
    Estimate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Samples CSV (`z,x,y`); drawn from the config when omitted.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Baseline level for samples files without a header.
        #[arg(long, default_value_t = 0.0)]
        baseline: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve for theta.csv and solution.json.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Defaults to kernel.csv in the output directory.
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Defaults to rhs.csv in the output directory.
        #[arg(long)]
        rhs: Option<PathBuf>,
        #[arg(long, value_parser = parse_penalty)]
        penalty: Option<Penalty>,
        /// A nonnegative number, `auto:discrepancy` or `auto:l-curve`.
        #[arg(long)]
        lambda: Option<LambdaRule>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all diagnostics and write report.json; exits 3 if a mandatory check fails.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write plotdata.csv and summary.txt for a run directory.
    Report {
        /// Directory holding theta.csv; defaults to the output directory.
        #[arg(long)]
        run: Option<PathBuf>,
        /// Supplies the scenario so the true effect can be tabulated.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_penalty(s: &str) -> Result<Penalty, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("expected `identity` or `second-difference`, got `{s}`"))
}

fn load(config: Option<&Path>, seed: Option<u64>) -> CliResult<Option<LoadedConfig>> {
    config.map(|p| LoadedConfig::load(p, seed)).transpose()
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&LoadedConfig>) -> PathBuf {
    flag.or_else(|| cfg.map(|c| c.config.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn say(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        println!("{}", msg.as_ref());
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let cfg = LoadedConfig::load(&config, seed)?;
            let out = out_dir(out, Some(&cfg));
            let path = commands::simulate(&cfg, &out)?;
            say(quiet, format!("wrote {}", path.display()));
        }
        Command::Estimate {
            config,
            samples,
            baseline,
            out,
            seed,
        } => {
            let cfg = load(config.as_deref(), seed)?;
            let out = out_dir(out, cfg.as_ref());
            let grid = cfg.as_ref().map(|c| c.config.grid).unwrap_or_default();
            let (set, mut stamp) = match (&samples, &cfg) {
                (Some(path), _) => commands::load_samples(path, baseline)?,
                (None, Some(c)) => (
                    ivie_core::model::draw_sample_set(
                        &c.scenario,
                        c.config.n_per_level,
                        c.config.seed,
                    )?,
                    artifacts::Stamp {
                        scenario_id: c.scenario.id.clone(),
                        seed: c.config.seed,
                        config_hash: c.hash.clone(),
                    },
                ),
                (None, None) => {
                    return Err(CliError::Usage(
                        "estimate needs --samples or --config".into(),
                    ))
                }
            };
            if let Some(c) = &cfg {
                stamp.config_hash = c.hash.clone();
            }
            let (kernel, _) = commands::estimate(&set, grid, &stamp, &out)?;
            say(
                quiet,
                format!(
                    "wrote {} and {} ({} levels, {} grid points)",
                    out.join(artifacts::KERNEL).display(),
                    out.join(artifacts::RHS).display(),
                    kernel.n_levels(),
                    kernel.x_grid.len()
                ),
            );
        }
        Command::Solve {
            config,
            kernel,
            rhs,
            penalty,
            lambda,
            out,
        } => {
            let cfg = load(config.as_deref(), None)?;
            let out = out_dir(out, cfg.as_ref());
            let kernel_path = kernel.unwrap_or_else(|| out.join(artifacts::KERNEL));
            let rhs_path = rhs.unwrap_or_else(|| out.join(artifacts::RHS));
            let (k, kprov) = commands::read_kernel(&kernel_path)?;
            let (r, rprov) = commands::read_rhs(&rhs_path)?;
            if kprov.seed != rprov.seed || kprov.config_hash != rprov.config_hash {
                return Err(ivie_core::Error::Parse {
                    source_name: rhs_path.display().to_string(),
                    line: 1,
                    detail: format!("provenance differs from {}", kernel_path.display()),
                }
                .into());
            }
            let mut solver = cfg.as_ref().map(|c| c.config.solver).unwrap_or_default();
            if let Some(p) = penalty {
                solver.penalty = p;
            }
            if let Some(l) = lambda {
                solver.lambda = l;
            }
            let stamp = artifacts::Stamp::from_provenance(&kprov);
            let rec = commands::solve(&k, &r, &stamp, solver, &out)?;
            if let Some(choice) = rec
                .lambda_choice
                .filter(|c| c.fallback || c.target_unreached)
            {
                eprintln!("warning: lambda selection fell back ({choice:?})");
            }
            say(
                quiet,
                format!(
                    "wrote {} (lambda {:.4e}, residual {:.4e}, noise {:.4e})",
                    out.join(artifacts::THETA).display(),
                    rec.lambda,
                    rec.residual_norm,
                    rec.noise_norm
                ),
            );
        }
        Command::Validate { config, out, seed } => {
            let cfg = LoadedConfig::load(&config, seed)?;
            let out = out_dir(out, Some(&cfg));
            let report = commands::validate(&cfg, &out)?;
            for c in &report.checks {
                let tag = if c.mandatory { "" } else { " (informational)" };
                say(
                    quiet,
                    format!(
                        "{:<24} {}{tag}",
                        c.name,
                        if c.pass { "PASS" } else { "FAIL" }
                    ),
                );
            }
            say(
                quiet,
                format!("wrote {}", out.join(artifacts::REPORT).display()),
            );
            let failed = report.failed_mandatory();
            if !failed.is_empty() {
                return Err(CliError::ChecksFailed {
                    failed: failed.len(),
                    names: failed.join(", "),
                });
            }
        }
        Command::Report { run, config, out } => {
            let cfg = load(config.as_deref(), None)?;
            let run = run.unwrap_or_else(|| out_dir(None, cfg.as_ref()));
            let out = out.unwrap_or_else(|| run.clone());
            let text = commands::report(
                &run,
                cfg.as_ref().map(|c| (&c.scenario, c.hash.as_str())),
                &out,
            )?;
            say(quiet, text.trim_end());
        }
    }
    Ok(())
}
