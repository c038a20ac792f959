//! Run configuration: a sectioned TOML file with strict key checking.
//!
//! ```toml
//! seed = 7
//!
//! [scenario]
//! name = "couette_startup_ucm"
//!
//! [geometry]
//! kind = "homogeneous"       # homogeneous | periodic_channel | couette | poiseuille
//! flow = "simple_shear"      # simple_shear | planar_extension | uniaxial_extension | rest
//! rate = 1.0
//!
//! [fluid]
//! re = 0.0
//! we = 1.0
//! omega = 0.5
//!
//! [kernel]
//! kind = "exponential"       # exponential | multi_mode | doi_edwards | power_law
//!
//! [measure]
//! kind = "ucm"               # ucm | lcm | kbkz | psm | psm_norm | wagner | currie
//!
//! [age_grid]
//! tail_tol = 1e-8
//! spacing = "matched"        # matched | uniform | graded
//!
//! [time]
//! t_end = 5.0
//! dt = 1e-3
//! ```

use serde::{Deserialize, Serialize};

use crate::deformation::HomogeneousFlow;
use crate::error::{Error, Result};
use crate::flow::{FluidParams, Geometry, Scenario, SolverOptions};
use crate::kernel::{
    build_age_grid_with, AgeGrid, AgeGridOptions, MemoryKernel, PowerMode,
    DEFAULT_DOI_EDWARDS_TERMS, DEFAULT_FIRST_INTERVAL, DEFAULT_GRADING_RATIO,
};
use crate::mesh::ChannelMesh;
use crate::stationary::{Smallness, StationaryGeometry, StationaryProblem};
use crate::strain::{Growth, MeasureVariant, ScalarFn, StrainMeasure};
use crate::tensor::Tensor2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub scenario: ScenarioSection,
    pub geometry: GeometrySpec,
    pub fluid: FluidSection,
    pub kernel: KernelSpec,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub age_grid: AgeGridSection,
    pub time: Option<TimeSection>,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub output: OutputSection,
    pub stationary: Option<StationarySection>,
    #[serde(default)]
    pub checks: ChecksSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneousKind {
    Rest,
    /// `u₁ = rate·x₂`
    SimpleShear,
    /// `κ = rate·diag(1, −1)`
    PlanarExtension,
    /// `κ = rate·diag(1, −½, −½)`
    UniaxialExtension,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Homogeneous {
        flow: HomogeneousKind,
        #[serde(default)]
        rate: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    PeriodicChannel {
        nx: usize,
        ny: usize,
        #[serde(default = "one")]
        length: f64,
        #[serde(default = "one")]
        height: f64,
    },
    Couette {
        nx: usize,
        ny: usize,
        #[serde(default = "one")]
        length: f64,
        #[serde(default = "one")]
        height: f64,
        wall_speed: f64,
    },
    Poiseuille {
        nx: usize,
        ny: usize,
        #[serde(default = "one")]
        length: f64,
        #[serde(default = "one")]
        height: f64,
        body_force: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn default_dim() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSection {
    #[serde(default)]
    pub re: f64,
    pub we: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Exponential,
    MultiMode { eta: Vec<f64>, lambda: Vec<f64> },
    DoiEdwards {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default = "default_terms")]
        terms: usize,
    },
    PowerLaw { modes: Vec<PowerMode>, s_min: f64 },
}

fn default_terms() -> usize {
    DEFAULT_DOI_EDWARDS_TERMS
}

/// A K-BKZ damping factor: a number, or `{ num = [..], den = [..] }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Constant(f64),
    Rational { num: [f64; 3], den: [f64; 3] },
}

impl From<ScalarSpec> for ScalarFn {
    fn from(s: ScalarSpec) -> Self {
        match s {
            ScalarSpec::Constant(c) => ScalarFn::Constant(c),
            ScalarSpec::Rational { num, den } => ScalarFn::Rational { num, den },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Ucm {
        growth: Option<Growth>,
    },
    Lcm {
        growth: Option<Growth>,
    },
    Kbkz {
        phi1: ScalarSpec,
        phi2: ScalarSpec,
        growth: Option<Growth>,
    },
    Psm {
        alpha: f64,
        beta: f64,
        growth: Option<Growth>,
    },
    PsmNorm {
        growth: Option<Growth>,
    },
    Wagner {
        alpha: f64,
        beta: f64,
        growth: Option<Growth>,
    },
    Currie {
        growth: Option<Growth>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Uniform with `h = dt/We` (transient runs) or the kernel default.
    Matched,
    Uniform,
    Graded,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeGridSection {
    #[serde(default = "default_tail")]
    pub tail_tol: f64,
    #[serde(default = "default_quad")]
    pub quad_tol: f64,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
    /// Node spacing for `spacing = "uniform"`.
    pub h: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_first")]
    pub first_fraction: f64,
    pub cap: Option<f64>,
}

fn default_tail() -> f64 {
    1e-8
}
fn default_quad() -> f64 {
    1e-6
}
fn default_spacing() -> Spacing {
    Spacing::Matched
}
fn default_ratio() -> f64 {
    DEFAULT_GRADING_RATIO
}
fn default_first() -> f64 {
    DEFAULT_FIRST_INTERVAL
}

impl Default for AgeGridSection {
    fn default() -> Self {
        AgeGridSection {
            tail_tol: default_tail(),
            quad_tol: default_quad(),
            spacing: default_spacing(),
            h: None,
            ratio: default_ratio(),
            first_fraction: default_first(),
            cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    #[serde(default)]
    pub forcing: [f64; 2],
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_picard")]
    pub max_picard: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub renormalize: bool,
    #[serde(default = "yes")]
    pub stress_enabled: bool,
    #[serde(default = "default_monitor_p")]
    pub monitor_p: f64,
    #[serde(default = "one")]
    pub monitor_c0: f64,
    #[serde(default = "default_monitor_interval")]
    pub monitor_interval: usize,
}

fn default_picard_tol() -> f64 {
    crate::flow::DEFAULT_PICARD_TOL
}
fn default_max_picard() -> usize {
    crate::flow::DEFAULT_MAX_PICARD
}
fn default_cfl() -> f64 {
    crate::deformation::DEFAULT_CFL
}
fn yes() -> bool {
    true
}
fn default_monitor_p() -> f64 {
    3.0
}
fn default_monitor_interval() -> usize {
    10
}

impl Default for FlowSection {
    fn default() -> Self {
        FlowSection {
            forcing: [0.0; 2],
            picard_tol: default_picard_tol(),
            max_picard: default_max_picard(),
            cfl: default_cfl(),
            renormalize: false,
            stress_enabled: true,
            monitor_p: default_monitor_p(),
            monitor_c0: 1.0,
            monitor_interval: default_monitor_interval(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Write every n-th step to the CSV series.
    #[serde(default = "default_every")]
    pub every: usize,
    /// Checkpoint every n-th step (0 disables checkpoints).
    #[serde(default)]
    pub checkpoint_every: usize,
}

fn default_every() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            every: 1,
            checkpoint_every: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarySection {
    #[serde(default = "default_stationary_tol")]
    pub tol: f64,
    #[serde(default = "default_stationary_iters")]
    pub max_iters: usize,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default = "default_f_cap")]
    pub f_cap: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Also run from a second starting profile and report the difference.
    #[serde(default)]
    pub uniqueness_probe: bool,
}

fn default_stationary_tol() -> f64 {
    1e-10
}
fn default_stationary_iters() -> usize {
    30
}
fn default_c0() -> f64 {
    Smallness::default().c0
}
fn default_r1() -> f64 {
    Smallness::default().r1
}
fn default_f_cap() -> f64 {
    Smallness::default().f_cap
}
fn default_p() -> f64 {
    Smallness::default().p
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    /// Random unimodular samples for the strain-measure growth check (0 skips it).
    #[serde(default)]
    pub growth_samples: usize,
}

fn cfg_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary.is_some()
    }

    /// Checks field ranges and cross-section compatibility.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.kernel()?;
        self.measure()?;
        self.geometry()?;
        let g = &self.age_grid;
        if !(g.tail_tol > 0.0 && g.tail_tol < 1.0) {
            return Err(cfg_err("age_grid.tail_tol", "must lie in (0, 1)"));
        }
        if !(g.quad_tol > 0.0) {
            return Err(cfg_err("age_grid.quad_tol", "must be positive"));
        }
        if g.spacing == Spacing::Uniform && !g.h.is_some_and(|h| h > 0.0) {
            return Err(cfg_err("age_grid.h", "uniform spacing needs a positive h"));
        }
        if self.output.every == 0 {
            return Err(cfg_err("output.every", "must be at least 1"));
        }
        match (&self.stationary, &self.time) {
            (None, None) => {
                return Err(cfg_err("time", "transient runs need a [time] section"));
            }
            (None, Some(t)) => {
                if !(t.dt > 0.0 && t.dt.is_finite()) {
                    return Err(cfg_err("time.dt", "must be positive"));
                }
                if !(t.t_end > 0.0 && t.t_end.is_finite()) {
                    return Err(cfg_err("time.t_end", "must be positive"));
                }
                if self.geometry.is_channel() && self.fluid.re <= 0.0 {
                    return Err(cfg_err("fluid.re", "transient channel runs need re > 0"));
                }
            }
            (Some(s), _) => {
                if !(s.tol > 0.0) {
                    return Err(cfg_err("stationary.tol", "must be positive"));
                }
                if s.max_iters == 0 {
                    return Err(cfg_err("stationary.max_iters", "must be at least 1"));
                }
                self.stationary_problem()?;
            }
        }
        let f = &self.flow;
        if !(f.picard_tol > 0.0) {
            return Err(cfg_err("flow.picard_tol", "must be positive"));
        }
        if f.max_picard == 0 {
            return Err(cfg_err("flow.max_picard", "must be at least 1"));
        }
        if !(f.cfl > 0.0) {
            return Err(cfg_err("flow.cfl", "must be positive"));
        }
        if !(f.monitor_p >= 1.0) {
            return Err(cfg_err("flow.monitor_p", "must be at least 1"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FluidParams> {
        FluidParams::new(self.fluid.re, self.fluid.we, self.fluid.omega)
            .map_err(|e| cfg_err("fluid", e))
    }

    pub fn kernel(&self) -> Result<MemoryKernel> {
        let k = match &self.kernel {
            KernelSpec::Exponential => Ok(MemoryKernel::single_exponential()),
            KernelSpec::MultiMode { eta, lambda } => MemoryKernel::multi_mode(eta.clone(), lambda.clone()),
            KernelSpec::DoiEdwards { lambda, terms } => MemoryKernel::doi_edwards(*lambda, *terms),
            KernelSpec::PowerLaw { modes, s_min } => MemoryKernel::power_law(modes.clone(), *s_min),
        };
        k.map_err(|e| cfg_err("kernel", e))
    }

    pub fn measure(&self) -> Result<StrainMeasure> {
        let (variant, growth) = match &self.measure {
            MeasureSpec::Ucm { growth } => (MeasureVariant::Ucm, growth),
            MeasureSpec::Lcm { growth } => (MeasureVariant::Lcm, growth),
            MeasureSpec::Kbkz { phi1, phi2, growth } => (
                MeasureVariant::Kbkz {
                    phi1: (*phi1).into(),
                    phi2: (*phi2).into(),
                },
                growth,
            ),
            MeasureSpec::Psm { alpha, beta, growth } => (
                MeasureVariant::Psm {
                    alpha: *alpha,
                    beta: *beta,
                },
                growth,
            ),
            MeasureSpec::PsmNorm { growth } => (MeasureVariant::PsmNorm, growth),
            MeasureSpec::Wagner { alpha, beta, growth } => (
                MeasureVariant::Wagner {
                    alpha: *alpha,
                    beta: *beta,
                },
                growth,
            ),
            MeasureSpec::Currie { growth } => (MeasureVariant::Currie, growth),
        };
        let m = StrainMeasure::new(variant).map_err(|e| cfg_err("measure", e))?;
        Ok(match growth {
            Some(g) => m.with_growth(*g),
            None => m,
        })
    }

    fn mesh(nx: usize, ny: usize, length: f64, height: f64) -> Result<ChannelMesh> {
        ChannelMesh::new(nx, ny, length, height).map_err(|e| cfg_err("geometry", e))
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Ok(match &self.geometry {
            GeometrySpec::Homogeneous { flow, rate, dim } => {
                if *dim != 2 && *dim != 3 {
                    return Err(cfg_err("geometry.dim", "must be 2 or 3"));
                }
                if !rate.is_finite() {
                    return Err(cfg_err("geometry.rate", "must be finite"));
                }
                let kappa = homogeneous_kappa(*flow, *rate, *dim)?;
                Geometry::HomogeneousBox(HomogeneousFlow::constant(kappa).map_err(|e| cfg_err("geometry", e))?)
            }
            GeometrySpec::PeriodicChannel { nx, ny, length, height } => {
                Geometry::PeriodicChannel(Self::mesh(*nx, *ny, *length, *height)?)
            }
            GeometrySpec::Couette {
                nx,
                ny,
                length,
                height,
                wall_speed,
            } => Geometry::Couette {
                mesh: Self::mesh(*nx, *ny, *length, *height)?,
                wall_speed: *wall_speed,
            },
            GeometrySpec::Poiseuille {
                nx,
                ny,
                length,
                height,
                body_force,
            } => Geometry::Poiseuille {
                mesh: Self::mesh(*nx, *ny, *length, *height)?,
                body_force: *body_force,
            },
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario {
            geometry: self.geometry()?,
            forcing: self.flow.forcing,
            params: self.params()?,
            kernel: self.kernel()?,
            measure: self.measure()?,
        })
    }

    pub fn solver_options(&self) -> SolverOptions {
        let f = &self.flow;
        SolverOptions {
            picard_tol: f.picard_tol,
            max_picard: f.max_picard,
            cfl: f.cfl,
            renormalize: f.renormalize,
            stress_enabled: f.stress_enabled,
            monitor_p: f.monitor_p,
            monitor_c0: f.monitor_c0,
            monitor_interval: f.monitor_interval,
            ..SolverOptions::default()
        }
    }

    /// The age grid of this run; `matched` spacing uses `dt/We` for transient
    /// runs with smooth kernels and the kernel's default otherwise.
    pub fn age_grid(&self) -> Result<AgeGrid> {
        let kernel = self.kernel()?;
        let g = &self.age_grid;
        let mut opts = AgeGridOptions::new(g.tail_tol, g.quad_tol);
        opts.ratio = g.ratio;
        opts.first_fraction = g.first_fraction;
        opts.cap = g.cap;
        match g.spacing {
            Spacing::Uniform => opts.spacing = g.h,
            Spacing::Graded => opts.spacing = None,
            Spacing::Matched => {
                if let (Some(t), None, false) = (&self.time, &self.stationary, kernel.prefers_graded_grid()) {
                    opts.spacing = Some(t.dt / self.fluid.we);
                }
            }
        }
        build_age_grid_with(&kernel, &opts).map_err(|e| cfg_err("age_grid", e))
    }

    pub fn stationary_problem(&self) -> Result<StationaryProblem> {
        let s = self
            .stationary
            .as_ref()
            .ok_or_else(|| cfg_err("stationary", "section missing"))?;
        let (geometry, forcing) = match &self.geometry {
            GeometrySpec::Homogeneous { flow, rate, dim } => (
                StationaryGeometry::Homogeneous {
                    kappa: homogeneous_kappa(*flow, *rate, *dim)?,
                },
                0.0,
            ),
            GeometrySpec::Poiseuille { ny, height, body_force, .. } => (
                StationaryGeometry::ParallelShear {
                    ny: *ny,
                    height: *height,
                },
                *body_force + self.flow.forcing[0],
            ),
            GeometrySpec::PeriodicChannel { ny, height, .. } => (
                StationaryGeometry::ParallelShear {
                    ny: *ny,
                    height: *height,
                },
                self.flow.forcing[0],
            ),
            GeometrySpec::Couette { .. } => {
                return Err(cfg_err(
                    "geometry.kind",
                    "stationary runs support homogeneous, periodic_channel and poiseuille",
                ))
            }
        };
        if self.flow.forcing[1] != 0.0 {
            return Err(cfg_err("flow.forcing", "stationary runs take streamwise forcing only"));
        }
        Ok(StationaryProblem {
            params: self.params()?,
            kernel: self.kernel()?,
            measure: self.measure()?,
            forcing,
            geometry,
            smallness: Smallness {
                c0: s.c0,
                r1: s.r1,
                f_cap: s.f_cap,
                p: s.p,
            },
        })
    }
}

impl GeometrySpec {
    pub fn is_channel(&self) -> bool {
        !matches!(self, GeometrySpec::Homogeneous { .. })
    }
}

fn homogeneous_kappa(kind: HomogeneousKind, rate: f64, d: usize) -> Result<Tensor2> {
    Ok(match kind {
        HomogeneousKind::Rest => Tensor2::zeros(d),
        HomogeneousKind::SimpleShear => Tensor2::unit(d, 1, 0).scale(rate),
        HomogeneousKind::PlanarExtension => {
            let mut k = Tensor2::zeros(d);
            k[(0, 0)] = rate;
            k[(1, 1)] = -rate;
            k
        }
        HomogeneousKind::UniaxialExtension => {
            if d != 3 {
                return Err(cfg_err("geometry.flow", "uniaxial extension needs dim = 3"));
            }
            Tensor2::diag(&[rate, -0.5 * rate, -0.5 * rate])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
name = "t"

[geometry]
kind = "homogeneous"
flow = "simple_shear"
rate = 1.0

[fluid]
we = 1.0
omega = 0.5

[kernel]
kind = "exponential"

[measure]
kind = "ucm"

[time]
t_end = 1.0
dt = 0.01
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.age_grid.tail_tol, 1e-8);
        assert_eq!(c.output.every, 1);
        let g = c.age_grid().unwrap();
        assert!((g.uniform_spacing().unwrap() - 0.01).abs() < 1e-15);
        assert!(matches!(c.geometry().unwrap(), Geometry::HomogeneousBox(_)));
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        let again = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let bad = MINIMAL.replace("omega = 0.5", "omega = 0.5\nomgea = 1.0");
        let e = RunConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(e.contains("omgea"), "{e}");
    }

    #[test]
    fn malformed_kernel_names_the_field() {
        let bad = MINIMAL.replace("kind = \"exponential\"", "kind = \"multi_mode\"\neta = [1.0]\nlambda = [-1.0]");
        let e = RunConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(e.contains("kernel"), "{e}");
        let bad = MINIMAL.replace("kind = \"exponential\"", "kind = \"gaussian\"");
        let e = RunConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(e.contains("gaussian"), "{e}");
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        assert!(RunConfig::from_toml(&MINIMAL.replace("omega = 0.5", "omega = 1.0")).is_err());
        assert!(RunConfig::from_toml(&MINIMAL.replace("dt = 0.01", "dt = 0.0")).is_err());
        let no_time = MINIMAL.split("[time]").next().unwrap().to_string();
        assert!(RunConfig::from_toml(&no_time).is_err());
    }

    #[test]
    fn kbkz_damping_forms() {
        let text = MINIMAL.replace(
            "kind = \"ucm\"",
            "kind = \"kbkz\"\nphi1 = 1.0\nphi2 = { num = [1.0, 0.0, 0.0], den = [1.0, 0.1, 0.0] }",
        );
        let c = RunConfig::from_toml(&text).unwrap();
        let m = c.measure().unwrap();
        assert_eq!(m.name(), "kbkz");
    }

    #[test]
    fn stationary_poiseuille_problem() {
        let text = r#"
[scenario]
name = "p"
[geometry]
kind = "poiseuille"
nx = 4
ny = 32
body_force = 0.05
[fluid]
re = 1.0
we = 1.0
omega = 0.1
[kernel]
kind = "exponential"
[measure]
kind = "ucm"
[stationary]
"#;
        let c = RunConfig::from_toml(text).unwrap();
        let p = c.stationary_problem().unwrap();
        assert_eq!(p.forcing, 0.05);
        assert_eq!(p.geometry, StationaryGeometry::ParallelShear { ny: 32, height: 1.0 });
    }
}
