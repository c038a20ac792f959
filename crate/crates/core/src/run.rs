//! Run orchestration: configuration in, run directory out.
//!
//! A run directory holds `config.toml` (the effective configuration),
//! CSV series, optional checkpoints and reports, and `manifest.json` listing
//! every file with its SHA-256 checksum.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::deformation::checkpoint::write_checkpoint;
use crate::error::{Error, Result};
use crate::flow::{FlowSolver, FlowState, RunOutcome};
use crate::stationary::{stationary_fixed_point, uniqueness_probe, StationarySolution};
use crate::strain::growth_bounds_check;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the configured seed.
    pub seed: Option<u64>,
    /// Forces a checkpoint cadence (steps) when the config has none.
    pub emit_checkpoints: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub status: String,
    pub wall_seconds: f64,
    pub files: Vec<FileEntry>,
}

/// Outcome of [`run`]: the directory is written even when the solver failed.
#[derive(Debug)]
pub struct RunArtifact {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// Solver failure (abort, non-convergence, divergence), if any.
    pub failure: Option<Error>,
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_line(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    let line: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    writeln!(out, "{}", line.join(","))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Runs `config` and writes its artifact into `out_dir` (created if needed).
pub fn run(config: &RunConfig, out_dir: &Path, opts: &RunOptions) -> Result<RunArtifact> {
    let started = Instant::now();
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(every) = opts.emit_checkpoints {
        if config.output.checkpoint_every == 0 {
            config.output.checkpoint_every = every;
        }
    }
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("config.toml"), config.to_toml())?;

    if config.checks.growth_samples > 0 {
        write_growth_check(&config, out_dir)?;
    }
    let failure = if config.is_stationary() {
        run_stationary(&config, out_dir)?
    } else {
        run_transient(&config, out_dir)?
    };
    let status = match &failure {
        None => "ok".to_string(),
        Some(e) => format!("failed: {e}"),
    };
    let manifest = write_manifest(&config, out_dir, &status, started.elapsed().as_secs_f64())?;
    Ok(RunArtifact {
        dir: out_dir.to_path_buf(),
        manifest,
        failure,
    })
}

fn write_growth_check(config: &RunConfig, out_dir: &Path) -> Result<()> {
    let measure = config.measure()?;
    let d = match config.geometry {
        crate::config::GeometrySpec::Homogeneous { dim, .. } => dim,
        _ => 2,
    };
    let mut out = create(&out_dir.join("growth_check.txt"))?;
    match growth_bounds_check(&measure, d, config.checks.growth_samples, config.seed) {
        Ok(r) => {
            writeln!(out, "measure = {}", measure.name())?;
            writeln!(out, "samples = {}", r.samples)?;
            writeln!(out, "seed = {}", config.seed)?;
            writeln!(out, "value_ratio = {}", fmt_f64(r.value_ratio))?;
            writeln!(out, "derivative_ratio = {}", fmt_f64(r.derivative_ratio))?;
        }
        Err(e) => writeln!(out, "skipped: {e}")?,
    }
    Ok(())
}

fn run_transient(config: &RunConfig, out_dir: &Path) -> Result<Option<Error>> {
    let time = config.time.expect("validated transient config has [time]");
    let scenario = config.scenario()?;
    let grid = Arc::new(config.age_grid()?);
    let solver = FlowSolver::new(scenario.clone(), config.solver_options()).map_err(|e| Error::Config(e.to_string()))?;
    let state = FlowState::at_rest(&scenario, grid)?;
    let every = config.output.checkpoint_every;
    let ckpt_dir = out_dir.join("checkpoints");
    if every > 0 {
        fs::create_dir_all(&ckpt_dir)?;
    }
    let mut last_checkpoint: Option<PathBuf> = None;
    let mut hook = |s: &FlowState| -> Result<()> {
        if every > 0 && s.step % every as u64 == 0 {
            let path = ckpt_dir.join(format!("step_{:08}.csv", s.step));
            let mut w = create(&path)?;
            write_checkpoint(&s.gfield, s.step, &mut w)?;
            w.flush()?;
            last_checkpoint = Some(path);
        }
        Ok(())
    };
    let outcome = solver.time_advance(state, time.t_end, time.dt, &mut hook)?;
    write_transient_outputs(config, out_dir, &outcome)?;
    Ok(outcome.aborted.map(|e| match (e, &last_checkpoint) {
        (Error::Aborted { reason, t, step }, Some(p)) => Error::Aborted {
            reason: format!("{reason} (last checkpoint {})", p.display()),
            t,
            step,
        },
        (e, _) => e,
    }))
}

fn write_transient_outputs(config: &RunConfig, out_dir: &Path, outcome: &RunOutcome) -> Result<()> {
    let every = config.output.every as u64;
    let last_step = outcome.diagnostics.last().map_or(0, |d| d.step);
    let keep = |step: u64| step % every == 0 || step == last_step;

    let mut diag = create(&out_dir.join("diagnostics.csv"))?;
    writeln!(diag, "step,t,kinetic_energy,max_tau,picard_iters,divergence,det_drift")?;
    for d in outcome.diagnostics.iter().filter(|d| keep(d.step)) {
        writeln!(
            diag,
            "{},{},{},{},{},{},{}",
            d.step,
            fmt_f64(d.t),
            fmt_f64(d.kinetic_energy),
            fmt_f64(d.max_tau),
            d.picard_iters,
            fmt_f64(d.divergence),
            fmt_f64(d.det_drift)
        )?;
    }
    diag.flush()?;

    let mut stress = create(&out_dir.join("stress.csv"))?;
    writeln!(stress, "t,tau_xx,tau_xy,tau_yy,n1")?;
    for (s, d) in outcome.stress.iter().zip(&outcome.diagnostics) {
        if keep(d.step) {
            csv_line(&mut stress, &[s.t, s.tau_xx, s.tau_xy, s.tau_yy, s.n1()])?;
        }
    }
    stress.flush()?;

    let mut mon = create(&out_dir.join("monitor.csv"))?;
    writeln!(mon, "t,g_proxy,grad_proxy,bound,crossed")?;
    for r in outcome.monitor.records() {
        writeln!(
            mon,
            "{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.g_proxy),
            fmt_f64(r.grad_proxy),
            fmt_f64(r.bound),
            u8::from(r.crossed)
        )?;
    }
    mon.flush()?;
    Ok(())
}

fn run_stationary(config: &RunConfig, out_dir: &Path) -> Result<Option<Error>> {
    let section = config.stationary.expect("validated stationary config");
    let problem = config.stationary_problem()?;
    let grid = Arc::new(config.age_grid()?);
    let solution = match stationary_fixed_point(&problem, grid.clone(), section.tol, section.max_iters, None) {
        Ok(s) => s,
        Err(e @ (Error::NotConverged { .. } | Error::Divergent { .. })) => {
            fs::write(out_dir.join("convergence.txt"), format!("converged = false\nerror = {e}\n"))?;
            return Ok(Some(e));
        }
        Err(e @ Error::Inadmissible(_)) => return Err(Error::Config(e.to_string())),
        Err(e) => return Err(e),
    };
    write_profile(out_dir, &solution)?;
    let mut report = solution.report.to_text();
    if section.uniqueness_probe {
        match uniqueness_probe(&problem, grid, section.tol, section.max_iters) {
            Ok(diff) => report.push_str(&format!("uniqueness_difference = {}\n", fmt_f64(diff))),
            Err(e) => return Ok(Some(e)),
        }
    }
    fs::write(out_dir.join("convergence.txt"), report)?;
    Ok(None)
}

fn write_profile(out_dir: &Path, sol: &StationarySolution) -> Result<()> {
    let mut out = create(&out_dir.join("profile.csv"))?;
    if sol.v.is_empty() {
        writeln!(out, "tau_xx,tau_xy,tau_yy,n1")?;
        let t = sol.stress.tau[0];
        csv_line(&mut out, &[t[(0, 0)], t[(0, 1)], t[(1, 1)], t[(0, 0)] - t[(1, 1)]])?;
    } else {
        writeln!(out, "y,v,tau_xy,n1")?;
        for (j, y) in sol.y.iter().enumerate() {
            let t = sol.stress.tau[j];
            csv_line(&mut out, &[*y, sol.v[j], t[(0, 1)], t[(0, 0)] - t[(1, 1)]])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let p = e.path();
        if p.is_dir() {
            collect_files(&p, out)?;
        } else if p.file_name().is_some_and(|n| n != MANIFEST_NAME) {
            out.push(p);
        }
    }
    Ok(())
}

fn write_manifest(config: &RunConfig, out_dir: &Path, status: &str, wall: f64) -> Result<Manifest> {
    let mut paths = Vec::new();
    collect_files(out_dir, &mut paths)?;
    let files = paths
        .iter()
        .map(|p| {
            Ok(FileEntry {
                path: p
                    .strip_prefix(out_dir)
                    .expect("collected under the run directory")
                    .to_string_lossy()
                    .replace('\\', "/"),
                bytes: fs::metadata(p)?.len(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.scenario.name.clone(),
        seed: config.seed,
        status: status.to_string(),
        wall_seconds: wall,
        files,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.into()))?;
    fs::write(out_dir.join(MANIFEST_NAME), text + "\n")?;
    Ok(manifest)
}

/// Re-hashes every file listed in a run directory's manifest.
pub fn verify_manifest(dir: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::SchemaMismatch(format!("manifest: {e}")))?;
    for f in &manifest.files {
        let got = sha256_file(&dir.join(&f.path))?;
        if got != f.sha256 {
            return Err(Error::SchemaMismatch(format!("checksum mismatch for {}", f.path)));
        }
    }
    Ok(manifest)
}
