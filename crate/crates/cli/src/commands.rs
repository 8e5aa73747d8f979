//! The five pipeline stages. Each reads its inputs from files or a config and
//! writes exactly its own artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use ivie_core::diagnostics::{
    antiderivative_identity, completeness_spectrum, condition5_grid, density_sup_estimate,
    error_metrics, forward_consistency, rate_check_phi, rate_check_sigma,
};
use ivie_core::estimation::{build_kernel, build_rhs, KernelMatrix, Provenance, RhsVector};
use ivie_core::model::{draw_sample_set, true_theta, SampleSet, Scenario};
use ivie_core::numerics::fmt17;
use ivie_core::solver::{make_grid, recover, solve_system, GridSpec};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::artifacts::{self, SolutionRecord, Stamp, ThetaTable};
use crate::config::{LoadedConfig, SolverSpec};
use crate::error::{CliError, CliResult};

fn stamp_for(cfg: &LoadedConfig) -> Stamp {
    Stamp {
        scenario_id: cfg.scenario.id.clone(),
        seed: cfg.config.seed,
        config_hash: cfg.hash.clone(),
    }
}

pub fn simulate(cfg: &LoadedConfig, out: &Path) -> CliResult<PathBuf> {
    let set = draw_sample_set(&cfg.scenario, cfg.config.n_per_level, cfg.config.seed)?;
    let path = out.join(artifacts::SAMPLES);
    let mut w = artifacts::create(out, artifacts::SAMPLES)?;
    set.write_csv(&mut w, Some(cfg.hash.clone()))?;
    artifacts::finish(w, &path)?;
    Ok(path)
}

/// Reads a samples CSV. Without a config hash in its header, the file's own
/// SHA-256 stands in for one.
pub fn load_samples(path: &Path, baseline: f64) -> CliResult<(SampleSet, Stamp)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let source = path.display().to_string();
    let set = SampleSet::read_csv(bytes.as_slice(), &source, baseline)?;
    let hash =
        first_comment_hash(&bytes).unwrap_or_else(|| format!("{:x}", Sha256::digest(&bytes)));
    let stamp = Stamp {
        scenario_id: set.scenario_id.clone(),
        seed: set.seed,
        config_hash: hash,
    };
    Ok((set, stamp))
}

fn first_comment_hash(bytes: &[u8]) -> Option<String> {
    let text = std::str::from_utf8(bytes).ok()?;
    let line = text.lines().find(|l| !l.trim().is_empty())?;
    let meta: Value = serde_json::from_str(line.trim().strip_prefix('#')?.trim()).ok()?;
    meta.get("config_hash")?.as_str().map(str::to_string)
}

pub fn estimate(
    set: &SampleSet,
    grid: GridSpec,
    stamp: &Stamp,
    out: &Path,
) -> CliResult<(KernelMatrix, RhsVector)> {
    let g = make_grid(set, grid.j_points, grid.pad_fraction)?;
    let kernel = build_kernel(set, &g.x_grid)?;
    let rhs = build_rhs(set)?;
    let prov = stamp.provenance();
    let mut w = artifacts::create(out, artifacts::KERNEL)?;
    kernel.write_csv(&mut w, &prov)?;
    artifacts::finish(w, &out.join(artifacts::KERNEL))?;
    let mut w = artifacts::create(out, artifacts::RHS)?;
    rhs.write_csv(&mut w, &prov)?;
    artifacts::finish(w, &out.join(artifacts::RHS))?;
    Ok((kernel, rhs))
}

pub fn read_kernel(path: &Path) -> CliResult<(KernelMatrix, Provenance)> {
    Ok(KernelMatrix::read_csv(
        artifacts::open(path)?,
        &path.display().to_string(),
    )?)
}

pub fn read_rhs(path: &Path) -> CliResult<(RhsVector, Provenance)> {
    Ok(RhsVector::read_csv(
        artifacts::open(path)?,
        &path.display().to_string(),
    )?)
}

pub fn solve(
    kernel: &KernelMatrix,
    rhs: &RhsVector,
    stamp: &Stamp,
    solver: SolverSpec,
    out: &Path,
) -> CliResult<SolutionRecord> {
    let solved = solve_system(kernel, rhs, solver.penalty, solver.lambda)?;
    let noise = solved.propagated_noise(&rhs.noise_scale)?;
    let sol = &solved.solution;
    let record = SolutionRecord {
        stamp: stamp.clone(),
        lambda: sol.lambda,
        lambda_rule: solver.lambda.to_string(),
        lambda_choice: solved.choice,
        penalty_kind: sol.penalty_kind,
        residual_norm: sol.residual_norm,
        solution_seminorm: sol.solution_seminorm,
        noise_norm: rhs.noise_norm(),
        truncation_rank: sol.truncation_rank,
        singular_values: sol.singular_values.clone(),
        propagated_noise_max: noise.iter().copied().fold(0.0, f64::max),
    };
    ThetaTable {
        stamp: stamp.clone(),
        x: solved.grid.x_grid.clone(),
        theta_hat: sol.theta.clone(),
    }
    .write(out)?;
    artifacts::write_json(out, artifacts::SOLUTION, &record)?;
    Ok(record)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub mandatory: bool,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub all_mandatory_pass: bool,
    pub checks: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn failed_mandatory(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.mandatory && !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn entry<T: Serialize>(
    name: &str,
    mandatory: bool,
    pass: bool,
    detail: &T,
) -> CliResult<CheckEntry> {
    Ok(CheckEntry {
        name: name.into(),
        mandatory,
        pass,
        detail: serde_json::to_value(detail).map_err(ivie_core::Error::from)?,
    })
}

/// Runs every diagnostic on the configured scenario and writes `report.json`.
pub fn validate(cfg: &LoadedConfig, out: &Path) -> CliResult<ValidationReport> {
    let c = &cfg.config;
    let v = &c.validation;
    let scenario = &cfg.scenario;
    let set = draw_sample_set(scenario, c.n_per_level, c.seed)?;
    let rec = recover(&set, c.grid, c.solver.penalty, c.solver.lambda)?;
    let grid = &rec.solved.grid;
    let truth: Vec<f64> = grid
        .x_grid
        .iter()
        .map(|&x| true_theta(scenario, x))
        .collect();

    let mut checks = Vec::new();
    let fc = forward_consistency(&rec.solved.design, &truth, &rec.rhs)?;
    checks.push(entry("forward-consistency", true, fc.pass, &fc)?);
    let ai = antiderivative_identity(&set, grid, &rec.solved.design, &truth)?;
    checks.push(entry("antiderivative-identity", true, ai.pass, &ai)?);

    let c3 = density_sup_estimate(scenario, v.density_n, c.seed)?;
    checks.push(entry("condition-3", true, c3.pass, &c3)?);
    let c5 = condition5_grid(scenario, &v.condition5_x, v.condition5_n, c.seed)?;
    checks.push(entry("condition-5", true, c5.pass, &c5)?);
    let c6 = completeness_spectrum(&rec.solved.design);
    checks.push(entry("condition-6", true, c6.pass, &c6)?);

    let rs = rate_check_sigma(scenario, v.rate_z, &v.sigma_ladder, v.rate_n, c.seed)?;
    checks.push(entry("rate-sigma", true, rs.pass, &rs)?);
    let rp = rate_check_phi(
        scenario,
        v.phi_x,
        v.rate_z,
        &v.sigma_ladder,
        v.rate_n,
        c.seed,
    )?;
    checks.push(entry("rate-phi", true, rp.pass, &rp)?);

    let (rel_l2, rel_linf) =
        error_metrics(&rec.solved.solution.theta, &truth, grid, v.central_fraction)?;
    let pass = rel_l2 <= v.max_rel_l2;
    checks.push(entry(
        "recovery-error",
        false,
        pass,
        &json!({
            "rel_l2": rel_l2,
            "rel_linf": rel_linf,
            "max_rel_l2": v.max_rel_l2,
            "central_fraction": v.central_fraction,
            "lambda": rec.solved.solution.lambda,
            "residual_norm": rec.solved.solution.residual_norm,
            "noise_norm": rec.rhs.noise_norm(),
        }),
    )?);

    let report = ValidationReport {
        stamp: stamp_for(cfg),
        all_mandatory_pass: checks.iter().all(|c| !c.mandatory || c.pass),
        checks,
    };
    artifacts::write_json(out, artifacts::REPORT, &report)?;
    Ok(report)
}

/// Writes `plotdata.csv` and `summary.txt` for a run directory. The true
/// effect is included when the scenario is known.
pub fn report(
    run_dir: &Path,
    scenario: Option<(&Scenario, &str)>,
    out: &Path,
) -> CliResult<String> {
    let theta = ThetaTable::read(&run_dir.join(artifacts::THETA))?;
    let truth: Option<Vec<f64>> =
        scenario.map(|(s, _)| theta.x.iter().map(|&x| true_theta(s, x)).collect());

    let path = out.join(artifacts::PLOTDATA);
    let mut w = artifacts::create(out, artifacts::PLOTDATA)?;
    let io = |e| CliError::io(&path, e);
    use std::io::Write;
    writeln!(
        w,
        "# {}",
        serde_json::to_string(&theta.stamp).map_err(ivie_core::Error::from)?
    )
    .map_err(io)?;
    match &truth {
        Some(t) => {
            writeln!(w, "x,theta_hat,theta_true").map_err(io)?;
            for ((x, h), tt) in theta.x.iter().zip(&theta.theta_hat).zip(t) {
                writeln!(w, "{},{},{}", fmt17(*x), fmt17(*h), fmt17(*tt)).map_err(io)?;
            }
        }
        None => {
            writeln!(w, "x,theta_hat").map_err(io)?;
            for (x, h) in theta.x.iter().zip(&theta.theta_hat) {
                writeln!(w, "{},{}", fmt17(*x), fmt17(*h)).map_err(io)?;
            }
        }
    }
    artifacts::finish(w, &path)?;

    let mut lines = vec![
        format!("scenario: {}", theta.stamp.scenario_id),
        format!("seed: {}", theta.stamp.seed),
        format!("config_hash: {}", theta.stamp.config_hash),
        format!(
            "grid: {} points on [{}, {}]",
            theta.x.len(),
            theta.x[0],
            theta.x[theta.x.len() - 1]
        ),
    ];
    if let Some((_, hash)) = scenario {
        if hash != theta.stamp.config_hash {
            lines.push(format!(
                "warning: config hash {hash} differs from the run's"
            ));
        }
    }
    let solution_path = run_dir.join(artifacts::SOLUTION);
    if solution_path.exists() {
        let sol: Value = read_json(&solution_path)?;
        for key in [
            "penalty_kind",
            "lambda",
            "residual_norm",
            "noise_norm",
            "solution_seminorm",
        ] {
            if let Some(v) = sol.get(key) {
                lines.push(format!("{key}: {v}"));
            }
        }
    }
    if let Some(t) = &truth {
        let grid = ivie_core::solver::QuadratureGrid::from_points(theta.x.clone())?;
        let (l2, linf) = error_metrics(&theta.theta_hat, t, &grid, 0.8)?;
        lines.push(format!("rel_l2 (central 80%): {l2:.6}"));
        lines.push(format!("rel_linf (central 80%): {linf:.6}"));
    }
    let report_path = run_dir.join(artifacts::REPORT);
    if report_path.exists() {
        let rep: Value = read_json(&report_path)?;
        if let Some(checks) = rep.get("checks").and_then(Value::as_array) {
            for c in checks {
                let name = c.get("name").and_then(Value::as_str).unwrap_or("?");
                let pass = c.get("pass").and_then(Value::as_bool).unwrap_or(false);
                let kind = if c.get("mandatory").and_then(Value::as_bool).unwrap_or(false) {
                    ""
                } else {
                    " (informational)"
                };
                lines.push(format!(
                    "check {name}: {}{kind}",
                    if pass { "PASS" } else { "FAIL" }
                ));
            }
        }
    }
    let text = lines.join("\n") + "\n";
    let path = out.join(artifacts::SUMMARY);
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    Ok(text)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}
