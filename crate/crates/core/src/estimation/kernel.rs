//! Empirical kernel `K(z, x)` and right-hand side `μ(z) - μ(z0)`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ecdf::EmpiricalCdf;
use super::mu::estimate_mu;
use crate::error::{Error, Result};
use crate::model::SampleSet;
use crate::numerics::fmt17;

/// `entries[(i, j)] = F(x_j | z0) - F(x_j | z_i)` over non-baseline levels.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub x_grid: Vec<f64>,
    pub z_levels: Vec<f64>,
    pub baseline_z: f64,
    pub entries: DMatrix<f64>,
}

/// `values[i] = μ(z_i) - μ(z0)`, with `noise_scale[i]` the root-sum-square of
/// the two group standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsVector {
    pub z_levels: Vec<f64>,
    pub baseline_z: f64,
    pub values: Vec<f64>,
    pub noise_scale: Vec<f64>,
}

impl RhsVector {
    pub fn noise_norm(&self) -> f64 {
        self.noise_scale.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

/// One kernel row on a grid.
pub fn kernel_row(baseline: &EmpiricalCdf, level: &EmpiricalCdf, x_grid: &[f64]) -> Vec<f64> {
    x_grid
        .iter()
        .map(|&x| baseline.eval(x) - level.eval(x))
        .collect()
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation(
            "x grid",
            "must be a nonempty list of finite values",
        ));
    }
    if x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("x grid", "must be strictly increasing"));
    }
    Ok(())
}

pub fn build_kernel(sample_set: &SampleSet, x_grid: &[f64]) -> Result<KernelMatrix> {
    check_grid(x_grid)?;
    let baseline = EmpiricalCdf::new(&sample_set.baseline()?.x)?;
    let mut z_levels = Vec::new();
    let mut rows = Vec::new();
    for g in sample_set.non_baseline() {
        z_levels.push(g.z);
        rows.push(kernel_row(&baseline, &EmpiricalCdf::new(&g.x)?, x_grid));
    }
    let entries = DMatrix::from_fn(rows.len(), x_grid.len(), |i, j| rows[i][j]);
    Ok(KernelMatrix {
        x_grid: x_grid.to_vec(),
        z_levels,
        baseline_z: sample_set.baseline_z,
        entries,
    })
}

pub fn build_rhs(sample_set: &SampleSet) -> Result<RhsVector> {
    let baseline = sample_set.baseline()?;
    let mu0 = estimate_mu(sample_set, baseline.z)?;
    let mut rhs = RhsVector {
        z_levels: Vec::new(),
        baseline_z: sample_set.baseline_z,
        values: Vec::new(),
        noise_scale: Vec::new(),
    };
    for g in sample_set.non_baseline() {
        let mu = estimate_mu(sample_set, g.z)?;
        rhs.z_levels.push(g.z);
        rhs.values.push(mu.mean - mu0.mean);
        rhs.noise_scale.push(mu.stderr.hypot(mu0.stderr));
    }
    Ok(rhs)
}

/// Header comment of the kernel and right-hand-side CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub format: String,
    pub baseline_z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<f64>>,
    pub scenario_id: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

/// Provenance stamped into every exported table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub scenario_id: String,
    pub seed: u64,
    pub config_hash: Option<String>,
}

impl Provenance {
    pub fn of(sample_set: &SampleSet, config_hash: Option<String>) -> Self {
        Provenance {
            scenario_id: sample_set.scenario_id.clone(),
            seed: sample_set.seed,
            config_hash,
        }
    }
}

type NumberedRows = Vec<(usize, Vec<f64>)>;

/// Splits a CSV stream into its JSON header comment and numeric rows.
fn read_table<R: BufRead>(
    r: R,
    source: &str,
    header_prefix: &str,
) -> Result<(MatrixMeta, NumberedRows)> {
    let mut meta: Option<MatrixMeta> = None;
    let mut header_seen = false;
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if meta.is_none() {
                meta =
                    Some(serde_json::from_str(c.trim()).map_err(|e| {
                        Error::parse(source, lineno, format!("bad JSON header: {e}"))
                    })?);
            }
            continue;
        }
        if !header_seen {
            if !line.starts_with(header_prefix) {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("expected header starting with `{header_prefix}`"),
                ));
            }
            header_seen = true;
            continue;
        }
        let vals = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::parse(source, lineno, format!("not a number: `{}`", f.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((lineno, vals));
    }
    let meta = meta.ok_or_else(|| Error::parse(source, 1, "missing `# {json}` header comment"))?;
    if !header_seen {
        return Err(Error::parse(source, 0, "missing column header"));
    }
    Ok((meta, rows))
}

impl KernelMatrix {
    pub fn n_levels(&self) -> usize {
        self.entries.nrows()
    }

    /// `# {meta}`, then `z,x_0,...,x_{J-1}`, then one row per level.
    pub fn write_csv<W: Write>(&self, mut w: W, prov: &Provenance) -> Result<()> {
        let meta = MatrixMeta {
            format: "kernel".into(),
            baseline_z: self.baseline_z,
            x_grid: Some(self.x_grid.clone()),
            scenario_id: prov.scenario_id.clone(),
            seed: prov.seed,
            config_hash: prov.config_hash.clone(),
        };
        writeln!(w, "# {}", serde_json::to_string(&meta)?)?;
        let header: Vec<String> = std::iter::once("z".to_string())
            .chain(self.x_grid.iter().map(|x| fmt17(*x)))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (i, z) in self.z_levels.iter().enumerate() {
            let row: Vec<String> = std::iter::once(fmt17(*z))
                .chain(self.entries.row(i).iter().map(|v| fmt17(*v)))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, source: &str) -> Result<(Self, Provenance)> {
        let (meta, rows) = read_table(r, source, "z")?;
        if meta.format != "kernel" {
            return Err(Error::parse(
                source,
                1,
                format!("expected kernel file, found `{}`", meta.format),
            ));
        }
        let x_grid = meta
            .x_grid
            .clone()
            .ok_or_else(|| Error::parse(source, 1, "kernel header lacks x_grid"))?;
        check_grid(&x_grid).map_err(|e| Error::parse(source, 1, e.to_string()))?;
        let j = x_grid.len();
        let mut z_levels = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * j);
        for (lineno, vals) in &rows {
            if vals.len() != j + 1 {
                return Err(Error::parse(
                    source,
                    *lineno,
                    format!("expected {} fields, found {}", j + 1, vals.len()),
                ));
            }
            z_levels.push(vals[0]);
            data.extend_from_slice(&vals[1..]);
        }
        let kernel = KernelMatrix {
            entries: DMatrix::from_row_slice(z_levels.len(), j, &data),
            x_grid,
            z_levels,
            baseline_z: meta.baseline_z,
        };
        let prov = Provenance {
            scenario_id: meta.scenario_id,
            seed: meta.seed,
            config_hash: meta.config_hash,
        };
        Ok((kernel, prov))
    }
}

impl RhsVector {
    /// `# {meta}`, then `z,value,noise_scale` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, prov: &Provenance) -> Result<()> {
        let meta = MatrixMeta {
            format: "rhs".into(),
            baseline_z: self.baseline_z,
            x_grid: None,
            scenario_id: prov.scenario_id.clone(),
            seed: prov.seed,
            config_hash: prov.config_hash.clone(),
        };
        writeln!(w, "# {}", serde_json::to_string(&meta)?)?;
        writeln!(w, "z,value,noise_scale")?;
        for ((z, v), s) in self
            .z_levels
            .iter()
            .zip(&self.values)
            .zip(&self.noise_scale)
        {
            writeln!(w, "{},{},{}", fmt17(*z), fmt17(*v), fmt17(*s))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, source: &str) -> Result<(Self, Provenance)> {
        let (meta, rows) = read_table(r, source, "z,value,noise_scale")?;
        if meta.format != "rhs" {
            return Err(Error::parse(
                source,
                1,
                format!("expected rhs file, found `{}`", meta.format),
            ));
        }
        let mut rhs = RhsVector {
            z_levels: Vec::new(),
            baseline_z: meta.baseline_z,
            values: Vec::new(),
            noise_scale: Vec::new(),
        };
        for (lineno, vals) in rows {
            if vals.len() != 3 {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("expected 3 fields, found {}", vals.len()),
                ));
            }
            if vals[2] < 0.0 {
                return Err(Error::parse(
                    source,
                    lineno,
                    "noise_scale must be nonnegative",
                ));
            }
            rhs.z_levels.push(vals[0]);
            rhs.values.push(vals[1]);
            rhs.noise_scale.push(vals[2]);
        }
        let prov = Provenance {
            scenario_id: meta.scenario_id,
            seed: meta.seed,
            config_hash: meta.config_hash,
        };
        Ok((rhs, prov))
    }
}
