//! File formats written by the pipeline besides the core CSV tables.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ivie_core::estimation::Provenance;
use ivie_core::numerics::fmt17;
use ivie_core::solver::{LambdaChoice, Penalty};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SAMPLES: &str = "samples.csv";
pub const KERNEL: &str = "kernel.csv";
pub const RHS: &str = "rhs.csv";
pub const THETA: &str = "theta.csv";
pub const SOLUTION: &str = "solution.json";
pub const REPORT: &str = "report.json";
pub const PLOTDATA: &str = "plotdata.csv";
pub const SUMMARY: &str = "summary.txt";

/// Provenance header shared by every JSON artifact and CSV comment line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub scenario_id: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Stamp {
    pub fn from_provenance(p: &Provenance) -> Self {
        Stamp {
            scenario_id: p.scenario_id.clone(),
            seed: p.seed,
            config_hash: p.config_hash.clone().unwrap_or_default(),
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            scenario_id: self.scenario_id.clone(),
            seed: self.seed,
            config_hash: Some(self.config_hash.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub lambda: f64,
    pub lambda_rule: String,
    pub lambda_choice: Option<LambdaChoice>,
    pub penalty_kind: Penalty,
    pub residual_norm: f64,
    pub solution_seminorm: f64,
    pub noise_norm: f64,
    pub truncation_rank: Option<usize>,
    pub singular_values: Vec<f64>,
    /// Largest standard deviation of the solution induced by the
    /// right-hand-side noise.
    pub propagated_noise_max: f64,
}

pub fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn finish(mut w: BufWriter<File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<()> {
    let path = dir.join(name);
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(ivie_core::Error::from)?;
    writeln!(w).map_err(|e| CliError::io(&path, e))?;
    finish(w, &path)
}

/// `θ̂` on the grid with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    pub stamp: Stamp,
    pub x: Vec<f64>,
    pub theta_hat: Vec<f64>,
}

impl ThetaTable {
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join(THETA);
        let mut w = create(dir, THETA)?;
        let io = |e| CliError::io(&path, e);
        writeln!(
            w,
            "# {}",
            serde_json::to_string(&self.stamp).map_err(ivie_core::Error::from)?
        )
        .map_err(io)?;
        writeln!(w, "x,theta_hat").map_err(io)?;
        for (x, t) in self.x.iter().zip(&self.theta_hat) {
            writeln!(w, "{},{}", fmt17(*x), fmt17(*t)).map_err(io)?;
        }
        finish(w, &path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let source = path.display().to_string();
        let parse = |line: usize, detail: String| {
            CliError::Core(ivie_core::Error::Parse {
                source_name: source.clone(),
                line,
                detail,
            })
        };
        let mut stamp = None;
        let mut header = false;
        let (mut x, mut theta_hat) = (Vec::new(), Vec::new());
        for (idx, line) in open(path)?.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| CliError::io(path, e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if stamp.is_none() {
                    stamp = Some(
                        serde_json::from_str::<Stamp>(c.trim())
                            .map_err(|e| parse(lineno, format!("bad JSON header: {e}")))?,
                    );
                }
                continue;
            }
            if !header {
                if line != "x,theta_hat" {
                    return Err(parse(lineno, "expected header `x,theta_hat`".into()));
                }
                header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(parse(
                    lineno,
                    format!("expected 2 fields, found {}", fields.len()),
                ));
            }
            let num = |f: &str| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| parse(lineno, format!("not a number: `{}`", f.trim())))
            };
            x.push(num(fields[0])?);
            theta_hat.push(num(fields[1])?);
        }
        let stamp = stamp.ok_or_else(|| parse(1, "missing `# {json}` header comment".into()))?;
        if x.len() < 2 {
            return Err(parse(0, "need at least two grid points".into()));
        }
        Ok(ThetaTable {
            stamp,
            x,
            theta_hat,
        })
    }
}
