//! Deviation of a run's time series from a reference.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::{GeometrySpec, HomogeneousKind, MeasureSpec, RunConfig};
use crate::deformation::exact::{lcm_startup_closed_form, maxwell_ode, ucm_startup_closed_form, Convected};
use crate::deformation::HomogeneousFlow;
use crate::error::{Error, Result};
use crate::flow::{FlowSolver, FlowState, SolverOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Closed-form startup of simple shear for the run's convected model.
    StartupShear,
    /// RK4 solution of the upper convected Maxwell equation.
    UcmOde,
    /// RK4 solution of the lower convected Maxwell equation.
    LcmOde,
    /// The same run with the stress path disabled.
    Newtonian,
    /// Another run directory.
    Run(PathBuf),
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "startup-shear" => Ok(Oracle::StartupShear),
            "ucm-ode" => Ok(Oracle::UcmOde),
            "lcm-ode" => Ok(Oracle::LcmOde),
            "newtonian" => Ok(Oracle::Newtonian),
            _ => match s.strip_prefix("run:") {
                Some(dir) if !dir.is_empty() => Ok(Oracle::Run(PathBuf::from(dir))),
                _ => Err(Error::Config(format!(
                    "unknown oracle {s:?}; expected startup-shear, ucm-ode, lcm-ode, newtonian or run:<dir>"
                ))),
            },
        }
    }
}

impl std::fmt::Display for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Oracle::StartupShear => write!(f, "startup-shear"),
            Oracle::UcmOde => write!(f, "ucm-ode"),
            Oracle::LcmOde => write!(f, "lcm-ode"),
            Oracle::Newtonian => write!(f, "newtonian"),
            Oracle::Run(p) => write!(f, "run:{}", p.display()),
        }
    }
}

/// A CSV file with a header row and numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::SchemaMismatch(format!("cannot read {}: {e}", path.display())))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SchemaMismatch(format!("{} is empty", path.display())))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::SchemaMismatch(format!("{}: bad number in row {}", path.display(), n + 1)))?;
            if row.len() != columns.len() {
                return Err(Error::SchemaMismatch(format!(
                    "{}: row {} has {} fields, header has {}",
                    path.display(),
                    n + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Series { columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::SchemaMismatch(format!("missing column {name}")))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDeviation {
    pub name: String,
    pub max_abs: f64,
    /// Root mean square deviation.
    pub l2: f64,
    /// `max_abs` over the largest reference magnitude among compared columns.
    pub rel: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub oracle: String,
    pub rows: usize,
    pub tol: f64,
    pub columns: Vec<ColumnDeviation>,
    pub pass: bool,
}

impl CompareReport {
    pub fn max_rel(&self) -> f64 {
        self.columns.iter().map(|c| c.rel).fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "oracle = {}", self.oracle);
        let _ = writeln!(s, "rows = {}", self.rows);
        let _ = writeln!(s, "tolerance = {:e}", self.tol);
        let _ = writeln!(s, "column,max_abs,l2,rel");
        for c in &self.columns {
            let _ = writeln!(s, "{},{:.16e},{:.16e},{:.16e}", c.name, c.max_abs, c.l2, c.rel);
        }
        let _ = writeln!(s, "result = {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

fn deviations(names: &[&str], got: &[Vec<f64>], want: &[Vec<f64>], tol: f64, oracle: String) -> CompareReport {
    let peak = want
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let denom = if peak > 0.0 { peak } else { 1.0 };
    let columns: Vec<ColumnDeviation> = names
        .iter()
        .zip(got.iter().zip(want))
        .map(|(name, (g, w))| {
            let diffs: Vec<f64> = g.iter().zip(w).map(|(a, b)| (a - b).abs()).collect();
            let max_abs = diffs.iter().copied().fold(0.0, f64::max);
            let l2 = if diffs.is_empty() {
                0.0
            } else {
                (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt()
            };
            ColumnDeviation {
                name: name.to_string(),
                max_abs,
                l2,
                rel: max_abs / denom,
            }
        })
        .collect();
    let rows = got.first().map_or(0, Vec::len);
    let pass = columns.iter().all(|c| c.rel <= tol && c.max_abs.is_finite());
    CompareReport {
        oracle,
        rows,
        tol,
        columns,
        pass,
    }
}

fn shear_setup(cfg: &RunConfig) -> Result<(f64, usize)> {
    match cfg.geometry {
        GeometrySpec::Homogeneous {
            flow: HomogeneousKind::SimpleShear,
            rate,
            dim,
        } => Ok((rate, dim)),
        _ => Err(Error::SchemaMismatch(
            "this oracle needs a homogeneous simple-shear run".into(),
        )),
    }
}

/// Compares the run in `dir` against `oracle`; `scale` multiplies the
/// reference stress columns of a `run:` oracle.
pub fn compare(dir: &Path, oracle: &Oracle, tol: f64, scale: f64) -> Result<CompareReport> {
    let cfg = RunConfig::from_path(&dir.join("config.toml"))
        .map_err(|e| Error::SchemaMismatch(format!("run directory config: {e}")))?;
    let label = oracle.to_string();
    match oracle {
        Oracle::StartupShear | Oracle::UcmOde | Oracle::LcmOde => {
            let (rate, dim) = shear_setup(&cfg)?;
            let stress = Series::read(&dir.join("stress.csv"))?;
            let t = stress.column("t")?;
            let names = ["tau_xx", "tau_xy", "tau_yy"];
            let got: Vec<Vec<f64>> = names.iter().map(|n| stress.column(n)).collect::<Result<_>>()?;
            let (we, omega) = (cfg.fluid.we, cfg.fluid.omega);
            let want: Vec<Vec<f64>> = match oracle {
                Oracle::StartupShear => {
                    let lower = matches!(cfg.measure, MeasureSpec::Lcm { .. });
                    let vals: Vec<(f64, f64, f64)> = t
                        .iter()
                        .map(|t| {
                            if lower {
                                lcm_startup_closed_form(rate, we, omega, *t)
                            } else {
                                ucm_startup_closed_form(rate, we, omega, *t)
                            }
                        })
                        .collect();
                    vec![
                        vals.iter().map(|v| v.0).collect(),
                        vals.iter().map(|v| v.1).collect(),
                        vals.iter().map(|v| v.2).collect(),
                    ]
                }
                _ => {
                    let model = if *oracle == Oracle::UcmOde {
                        Convected::Upper
                    } else {
                        Convected::Lower
                    };
                    let dt = cfg
                        .time
                        .ok_or_else(|| Error::SchemaMismatch("ODE oracles need a transient run".into()))?
                        .dt;
                    let steps = (t.last().copied().unwrap_or(0.0) / dt).round() as usize;
                    let ode = maxwell_ode(model, &HomogeneousFlow::simple_shear(dim, rate), we, omega, dt, steps);
                    let idx = t
                        .iter()
                        .map(|t| {
                            let k = (t / dt).round();
                            if (k * dt - t).abs() > 1e-9 * t.abs().max(1.0) || k as usize >= ode.len() {
                                Err(Error::SchemaMismatch(format!("time {t} is not on the step grid")))
                            } else {
                                Ok(k as usize)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    vec![
                        idx.iter().map(|k| ode[*k][(0, 0)]).collect(),
                        idx.iter().map(|k| ode[*k][(0, 1)]).collect(),
                        idx.iter().map(|k| ode[*k][(1, 1)]).collect(),
                    ]
                }
            };
            Ok(deviations(&names, &got, &want, tol, label))
        }
        Oracle::Newtonian => {
            let time = cfg
                .time
                .ok_or_else(|| Error::SchemaMismatch("the Newtonian oracle needs a transient run".into()))?;
            let diag = Series::read(&dir.join("diagnostics.csv"))?;
            let steps = diag.column("step")?;
            let ke = diag.column("kinetic_energy")?;
            let scenario = cfg.scenario()?;
            let opts = SolverOptions {
                stress_enabled: false,
                ..cfg.solver_options()
            };
            let solver = FlowSolver::new(scenario.clone(), opts)?;
            let state = FlowState::at_rest(&scenario, std::sync::Arc::new(cfg.age_grid()?))?;
            let reference = solver.time_advance(state, time.t_end, time.dt, &mut |_| Ok(()))?;
            let want = steps
                .iter()
                .map(|s| {
                    reference
                        .diagnostics
                        .iter()
                        .find(|d| d.step as f64 == *s)
                        .map(|d| d.kinetic_energy)
                        .ok_or_else(|| Error::SchemaMismatch(format!("reference has no step {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(deviations(&["kinetic_energy"], &[ke], &[want], tol, label))
        }
        Oracle::Run(other) => {
            let file = if dir.join("stress.csv").exists() {
                "stress.csv"
            } else {
                "profile.csv"
            };
            let a = Series::read(&dir.join(file))?;
            let b = Series::read(&other.join(file))?;
            if a.columns != b.columns {
                return Err(Error::SchemaMismatch(format!(
                    "{file} columns differ: {:?} vs {:?}",
                    a.columns, b.columns
                )));
            }
            if a.rows.len() != b.rows.len() {
                return Err(Error::SchemaMismatch(format!(
                    "{file} has {} rows vs {}",
                    a.rows.len(),
                    b.rows.len()
                )));
            }
            let axis = a.columns[0].clone();
            let (ta, tb) = (a.column(&axis)?, b.column(&axis)?);
            if ta.iter().zip(&tb).any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0)) {
                return Err(Error::SchemaMismatch(format!("{axis} samples differ between runs")));
            }
            let names: Vec<&str> = a.columns[1..].iter().map(String::as_str).collect();
            let got: Vec<Vec<f64>> = names.iter().map(|n| a.column(n)).collect::<Result<_>>()?;
            let want: Vec<Vec<f64>> = names
                .iter()
                .map(|n| {
                    let k = if n.starts_with("tau") || *n == "n1" { scale } else { 1.0 };
                    b.column(n).map(|c| c.iter().map(|v| v * k).collect())
                })
                .collect::<Result<_>>()?;
            Ok(deviations(&names, &got, &want, tol, label))
        }
    }
}
