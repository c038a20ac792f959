//! Coupled momentum / deformation / stress time stepping.
//!
//! Each step freezes the time-centred velocity and stress, solves an implicit
//! Stokes step with `g = −Re ū·∇ū + div τ̄ + f`, transports `G` with the new
//! velocity, reassembles `τ` and repeats (Picard) until the velocity settles.

pub mod fft_solvers;
pub mod mac;
pub mod stokes;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::deformation::monitor::{norm_monitor_update, NormMonitor};
use crate::deformation::{
    step_transport, AgeTimeField, HomogeneousFlow, Layout, TransportOptions, TransportStep,
    DEFAULT_CFL, DET_DRIFT_ABORT,
};
use crate::error::{Error, Result};
use crate::kernel::{build_age_grid_with, AgeGrid, AgeGridOptions, MemoryKernel};
use crate::mesh::ChannelMesh;
use crate::strain::StrainMeasure;
use crate::stress::{assemble_tau, StressField};
use crate::tensor::Tensor2;

pub use mac::{stress_divergence, MacVelocity};
pub use stokes::StokesSolver;

pub const DEFAULT_PICARD_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_PICARD: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub re: f64,
    pub we: f64,
    pub omega: f64,
}

impl FluidParams {
    pub fn new(re: f64, we: f64, omega: f64) -> Result<Self> {
        if !(re >= 0.0 && re.is_finite()) {
            return Err(Error::InvalidParams(format!("Re must be >= 0, got {re}")));
        }
        if !(we > 0.0 && we.is_finite()) {
            return Err(Error::InvalidParams(format!("We must be > 0, got {we}")));
        }
        if !(0.0..1.0).contains(&omega) {
            return Err(Error::InvalidParams(format!(
                "omega must lie in [0, 1) so that a solvent viscosity remains, got {omega}"
            )));
        }
        Ok(FluidParams { re, we, omega })
    }

    /// Solvent viscosity `1 − ω`.
    pub fn solvent(&self) -> f64 {
        1.0 - self.omega
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Spatially uniform kinematics with a prescribed velocity gradient.
    HomogeneousBox(HomogeneousFlow),
    PeriodicChannel(ChannelMesh),
    /// Top wall sliding at `wall_speed`, bottom wall at rest.
    Couette { mesh: ChannelMesh, wall_speed: f64 },
    /// Constant streamwise body force.
    Poiseuille { mesh: ChannelMesh, body_force: f64 },
}

impl Geometry {
    pub fn mesh(&self) -> Option<&ChannelMesh> {
        match self {
            Geometry::HomogeneousBox(_) => None,
            Geometry::PeriodicChannel(m)
            | Geometry::Couette { mesh: m, .. }
            | Geometry::Poiseuille { mesh: m, .. } => Some(m),
        }
    }

    pub fn layout(&self) -> Layout {
        match self.mesh() {
            None => Layout::Homogeneous,
            Some(m) => Layout::Channel(*m),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Geometry::HomogeneousBox(flow) => flow.dim(),
            _ => 2,
        }
    }

    pub fn walls(&self) -> (f64, f64) {
        match self {
            Geometry::Couette { wall_speed, .. } => (0.0, *wall_speed),
            _ => (0.0, 0.0),
        }
    }
}

/// Flow configuration: geometry, forcing and the constitutive model.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub geometry: Geometry,
    /// Body force added on top of any geometry-specific driving.
    pub forcing: [f64; 2],
    pub params: FluidParams,
    pub kernel: MemoryKernel,
    pub measure: StrainMeasure,
}

impl Scenario {
    fn body_force(&self) -> [f64; 2] {
        let extra = match self.geometry {
            Geometry::Poiseuille { body_force, .. } => body_force,
            _ => 0.0,
        };
        [self.forcing[0] + extra, self.forcing[1]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub picard_tol: f64,
    pub max_picard: usize,
    pub cfl: f64,
    pub renormalize: bool,
    /// `false` skips transport and assembly and keeps `τ ≡ 0`.
    pub stress_enabled: bool,
    /// Exponent and constant of the deformation norm monitor.
    pub monitor_p: f64,
    pub monitor_c0: f64,
    /// Monitor every this many steps (0 disables it).
    pub monitor_interval: usize,
    pub det_drift_abort: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            picard_tol: DEFAULT_PICARD_TOL,
            max_picard: DEFAULT_MAX_PICARD,
            cfl: DEFAULT_CFL,
            renormalize: false,
            stress_enabled: true,
            monitor_p: 3.0,
            monitor_c0: 1.0,
            monitor_interval: 10,
            det_drift_abort: DET_DRIFT_ABORT,
        }
    }
}

/// Uniform age grid with spacing `dt/We`, so that age characteristics land on nodes.
pub fn matched_age_grid(
    kernel: &MemoryKernel,
    tail_tol: f64,
    quad_tol: f64,
    dt: f64,
    we: f64,
) -> Result<AgeGrid> {
    build_age_grid_with(kernel, &AgeGridOptions::new(tail_tol, quad_tol).uniform(dt / we))
}

#[derive(Clone, Debug)]
pub struct FlowState {
    /// `None` for homogeneous boxes.
    pub u: Option<MacVelocity>,
    pub p: Vec<f64>,
    pub stress: StressField,
    pub gfield: AgeTimeField,
    /// `∇u` per cell at the last step's midpoint.
    pub kappa: Vec<Tensor2>,
    pub t: f64,
    pub step: u64,
}

impl FlowState {
    /// Quiescent start: `u = 0`, `G_old ≡ δ`.
    pub fn at_rest(scenario: &Scenario, grid: Arc<AgeGrid>) -> Result<Self> {
        let gfield = AgeTimeField::at_rest(
            grid,
            scenario.geometry.layout(),
            scenario.geometry.dim(),
            scenario.params.we,
        )?;
        Self::with_history(scenario, gfield)
    }

    /// Rest velocity with a given deformation history.
    pub fn with_history(scenario: &Scenario, gfield: AgeTimeField) -> Result<Self> {
        let d = scenario.geometry.dim();
        let n = gfield.n_cells();
        let u = scenario
            .geometry
            .mesh()
            .map(|m| MacVelocity::zeros(*m, scenario.geometry.walls()));
        let stress = assemble_tau(&gfield, &scenario.measure, scenario.params.omega, scenario.params.we)?;
        Ok(FlowState {
            u,
            p: vec![0.0; if scenario.geometry.mesh().is_some() { n } else { 0 }],
            stress,
            kappa: vec![Tensor2::zeros(d); n],
            t: gfield.time(),
            gfield,
            step: 0,
        })
    }

    /// Cell-averaged stress.
    pub fn mean_stress(&self) -> Tensor2 {
        let n = self.stress.tau.len() as f64;
        let mut acc = Tensor2::zeros(self.gfield.dim());
        for t in &self.stress.tau {
            acc += *t;
        }
        acc.scale(1.0 / n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub picard_iters: usize,
    pub converged: bool,
    pub last_change: f64,
    pub det_drift: f64,
}

/// One time step of the coupled system.
pub struct FlowSolver {
    pub scenario: Scenario,
    pub options: SolverOptions,
    stokes: Option<StokesSolver>,
}

fn average_tensors(a: &[Tensor2], b: &[Tensor2]) -> Vec<Tensor2> {
    a.iter().zip(b).map(|(x, y)| (*x + *y).scale(0.5)).collect()
}

impl FlowSolver {
    pub fn new(scenario: Scenario, options: SolverOptions) -> Result<Self> {
        if let Some(m) = scenario.geometry.mesh() {
            if scenario.params.re <= 0.0 {
                return Err(Error::InvalidParams(
                    "transient channel runs need Re > 0".into(),
                ));
            }
            if m.ny < 2 {
                return Err(Error::InvalidParams("channel needs at least two rows".into()));
            }
        }
        if options.max_picard == 0 {
            return Err(Error::InvalidParams("max_picard must be at least 1".into()));
        }
        let stokes = scenario.geometry.mesh().map(|m| StokesSolver::new(*m));
        Ok(FlowSolver {
            scenario,
            options,
            stokes,
        })
    }

    fn transport_and_assemble(
        &self,
        g: &AgeTimeField,
        vel: Option<&MacVelocity>,
        kappa: &[Tensor2],
        dt: f64,
    ) -> Result<(AgeTimeField, StressField, f64)> {
        let opts = TransportOptions {
            cfl: self.options.cfl,
            renormalize: self.options.renormalize,
        };
        let step = TransportStep {
            velocity: vel.map(|v| v as &dyn crate::deformation::VelocityField),
            kappa,
            dt,
        };
        let (next, stats) = step_transport(g, &step, &opts)?;
        let p = &self.scenario.params;
        let stress = assemble_tau(&next, &self.scenario.measure, p.omega, p.we)?;
        Ok((next, stress, stats.det_drift))
    }

    /// Picard iteration of the coupled map over one step of length `dt`.
    pub fn fixed_point_step(&self, state: &FlowState, dt: f64) -> Result<(FlowState, StepInfo)> {
        match &self.scenario.geometry {
            Geometry::HomogeneousBox(flow) => self.homogeneous_step(flow, state, dt),
            _ => self.channel_step(state, dt),
        }
    }

    fn homogeneous_step(
        &self,
        flow: &HomogeneousFlow,
        state: &FlowState,
        dt: f64,
    ) -> Result<(FlowState, StepInfo)> {
        let kappa = vec![flow.kappa_mid(state.t, dt)];
        let (gfield, stress, det_drift) = if self.options.stress_enabled {
            self.transport_and_assemble(&state.gfield, None, &kappa, dt)?
        } else {
            let mut g = state.gfield.clone();
            g.set_time(state.t + dt);
            (g, state.stress.clone(), 0.0)
        };
        let next = FlowState {
            u: None,
            p: Vec::new(),
            stress,
            gfield,
            kappa,
            t: state.t + dt,
            step: state.step + 1,
        };
        Ok((
            next,
            StepInfo {
                picard_iters: 1,
                converged: true,
                last_change: 0.0,
                det_drift,
            },
        ))
    }

    fn channel_step(&self, state: &FlowState, dt: f64) -> Result<(FlowState, StepInfo)> {
        let stokes = self.stokes.as_ref().expect("channel geometry has a Stokes solver");
        let un = state.u.as_ref().expect("channel state carries a velocity");
        let mesh = *stokes.mesh();
        let params = &self.scenario.params;
        let f = self.scenario.body_force();
        let walls = self.scenario.geometry.walls();

        let mut uk = un.clone();
        let mut tauk = state.stress.tau.clone();
        let mut gk = state.gfield.clone();
        let mut stressk = state.stress.clone();
        let mut pk = state.p.clone();
        let mut kappa = state.kappa.clone();
        let mut det_drift = 0.0;
        let mut change = f64::INFINITY;
        let mut iters = 0;
        let mut converged = false;

        while iters < self.options.max_picard {
            iters += 1;
            let ubar = MacVelocity::average(un, &uk);
            let taubar = average_tensors(&state.stress.tau, &tauk);
            let (au, av) = ubar.advection();
            let (du, dv) = stress_divergence(&mesh, &taubar);
            let gu: Vec<f64> = au
                .iter()
                .zip(&du)
                .map(|(a, d)| -params.re * a + d + f[0])
                .collect();
            let mut gv: Vec<f64> = av
                .iter()
                .zip(&dv)
                .map(|(a, d)| -params.re * a + d + f[1])
                .collect();
            let nx = mesh.nx;
            gv[..nx].iter_mut().for_each(|x| *x = 0.0);
            gv[nx * mesh.ny..].iter_mut().for_each(|x| *x = 0.0);

            let (unew, pnew) = stokes.step(un, &state.p, (&gu, &gv), params.re, params.solvent(), dt, walls)?;
            let umid = MacVelocity::average(un, &unew);
            kappa = umid.grad_cells();
            if self.options.stress_enabled {
                let (g, s, drift) = self.transport_and_assemble(&state.gfield, Some(&umid), &kappa, dt)?;
                gk = g;
                tauk = s.tau.clone();
                stressk = s;
                det_drift = drift;
            }
            change = unew.max_abs_diff(&uk);
            uk = unew;
            pk = pnew;
            if change < self.options.picard_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!(
                "Picard iteration stopped after {iters} iterations at t = {} (change {change:e})",
                state.t + dt
            );
        }
        if !self.options.stress_enabled {
            gk.set_time(state.t + dt);
        }
        Ok((
            FlowState {
                u: Some(uk),
                p: pk,
                stress: stressk,
                gfield: gk,
                kappa,
                t: state.t + dt,
                step: state.step + 1,
            },
            StepInfo {
                picard_iters: iters,
                converged,
                last_change: change,
                det_drift,
            },
        ))
    }

    /// Largest step allowed by the spatial CFL condition.
    pub fn cfl_limit(&self, state: &FlowState) -> f64 {
        match (&state.u, self.scenario.geometry.mesh()) {
            (Some(u), Some(m)) => {
                use crate::deformation::VelocityField;
                let umax = u.max_speed();
                if umax > 0.0 {
                    self.options.cfl * m.dx().min(m.dy()) / umax
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Steps from `state.t` to `t_end` with step `dt`, shortened when the CFL
    /// limit requires it. `on_step` sees every accepted state.
    pub fn time_advance(
        &self,
        state: FlowState,
        t_end: f64,
        dt: f64,
        on_step: &mut dyn FnMut(&FlowState) -> Result<()>,
    ) -> Result<RunOutcome> {
        if !(t_end > state.t) {
            return Err(Error::InvalidParams(format!(
                "t_end = {t_end} must exceed the current time {}",
                state.t
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        let mut monitor = NormMonitor::new(&state.gfield, self.options.monitor_p, self.options.monitor_c0);
        let mut diagnostics = vec![Diagnostics::of(&state, None)];
        let mut stress = vec![StressSample::of(&state)];
        let mut state = state;
        let mut aborted = None;
        let n_steps = ((t_end - state.t) / dt - 1e-9).ceil().max(1.0) as u64;
        let t0 = state.t;
        let mut pending_monitor = 0.0;
        for k in 1..=n_steps {
            let target = if k == n_steps { t_end } else { t0 + k as f64 * dt };
            let mut h = target - state.t;
            let limit = self.cfl_limit(&state);
            let substeps = if h > limit { (h / limit).ceil() as u64 } else { 1 };
            h /= substeps as f64;
            for _ in 0..substeps {
                match self.advance_one(&state, h) {
                    Ok((next, info)) => {
                        let grad_norm = next.kappa.iter().map(|k| k.norm()).fold(0.0, f64::max);
                        pending_monitor += grad_norm * h;
                        let interval = self.options.monitor_interval as u64;
                        if self.options.stress_enabled && interval > 0 && next.step % interval == 0 {
                            norm_monitor_update(&next.gfield, pending_monitor, 1.0, &mut monitor);
                            pending_monitor = 0.0;
                        }
                        diagnostics.push(Diagnostics::of(&next, Some(&info)));
                        stress.push(StressSample::of(&next));
                        state = next;
                        if let Err(e) = on_step(&state) {
                            aborted = Some(e);
                            break;
                        }
                    }
                    Err(e) => {
                        log::error!("run aborted at t = {}: {e}", state.t);
                        aborted = Some(Error::Aborted {
                            reason: e.to_string(),
                            t: state.t,
                            step: state.step,
                        });
                        break;
                    }
                }
            }
            if aborted.is_some() {
                break;
            }
        }
        Ok(RunOutcome {
            state,
            diagnostics,
            stress,
            monitor,
            aborted,
        })
    }

    fn advance_one(&self, state: &FlowState, dt: f64) -> Result<(FlowState, StepInfo)> {
        let (next, info) = self.fixed_point_step(state, dt)?;
        if info.det_drift > self.options.det_drift_abort {
            return Err(Error::InvalidFlow(format!(
                "deformation determinant drift {:e} exceeds {:e}",
                info.det_drift, self.options.det_drift_abort
            )));
        }
        if let Some(u) = &next.u {
            if !u.is_finite() {
                return Err(Error::InvalidFlow("velocity became non-finite".into()));
            }
        }
        if next.stress.tau.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidFlow("stress became non-finite".into()));
        }
        Ok((next, info))
    }
}

/// Per-step scalar diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub step: u64,
    pub t: f64,
    pub kinetic_energy: f64,
    pub max_tau: f64,
    pub picard_iters: usize,
    pub divergence: f64,
    pub det_drift: f64,
}

impl Diagnostics {
    fn of(state: &FlowState, info: Option<&StepInfo>) -> Self {
        let (ke, div) = match &state.u {
            Some(u) => (u.kinetic_energy(), u.max_divergence()),
            None => (0.0, 0.0),
        };
        Diagnostics {
            step: state.step,
            t: state.t,
            kinetic_energy: ke,
            max_tau: state.stress.max_norm(),
            picard_iters: info.map_or(0, |i| i.picard_iters),
            divergence: div,
            det_drift: info.map_or_else(|| state.gfield.det_drift(), |i| i.det_drift),
        }
    }
}

/// Cell-averaged stress components at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressSample {
    pub t: f64,
    pub tau_xx: f64,
    pub tau_xy: f64,
    pub tau_yy: f64,
}

impl StressSample {
    fn of(state: &FlowState) -> Self {
        let m = state.mean_stress();
        StressSample {
            t: state.t,
            tau_xx: m[(0, 0)],
            tau_xy: m[(0, 1)],
            tau_yy: m[(1, 1)],
        }
    }

    /// First normal stress difference.
    pub fn n1(&self) -> f64 {
        self.tau_xx - self.tau_yy
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    /// Last accepted state.
    pub state: FlowState,
    pub diagnostics: Vec<Diagnostics>,
    pub stress: Vec<StressSample>,
    pub monitor: NormMonitor,
    /// Set when the run stopped before `t_end`.
    pub aborted: Option<Error>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::exact::{lcm_startup_closed_form, ucm_startup_closed_form};

    fn channel(geometry: Geometry, omega: f64) -> Scenario {
        Scenario {
            geometry,
            forcing: [0.0, 0.0],
            params: FluidParams::new(1.0, 1.0, omega).unwrap(),
            kernel: MemoryKernel::single_exponential(),
            measure: StrainMeasure::ucm(),
        }
    }

    fn grid(dt: f64) -> Arc<AgeGrid> {
        Arc::new(matched_age_grid(&MemoryKernel::single_exponential(), 1e-3, 1e-6, dt, 1.0).unwrap())
    }

    #[test]
    fn params_validation() {
        assert!(FluidParams::new(1.0, 1.0, 1.0).is_err());
        assert!(FluidParams::new(-1.0, 1.0, 0.5).is_err());
        assert!(FluidParams::new(0.0, 0.0, 0.5).is_err());
        assert_eq!(FluidParams::new(0.0, 2.0, 0.25).unwrap().solvent(), 0.75);
    }

    #[test]
    fn rest_state_is_preserved_bitwise() {
        let mesh = ChannelMesh::new(6, 4, 1.0, 1.0).unwrap();
        let sc = channel(Geometry::PeriodicChannel(mesh), 0.3);
        let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
        let state = FlowState::at_rest(&sc, grid(0.1)).unwrap();
        let (next, info) = solver.fixed_point_step(&state, 0.1).unwrap();
        assert_eq!(info.picard_iters, 1);
        let u = next.u.unwrap();
        assert!(u.u.iter().chain(&u.v).all(|x| *x == 0.0));
        assert!(next.stress.tau.iter().all(|t| *t == Tensor2::zeros(2)));
        assert!(next.gfield.values().iter().all(|g| *g == Tensor2::identity(2)));
    }

    #[test]
    fn homogeneous_ucm_startup_matches_closed_form() {
        let dt = 0.01;
        let sc = Scenario {
            geometry: Geometry::HomogeneousBox(HomogeneousFlow::simple_shear(2, 1.0)),
            forcing: [0.0; 2],
            params: FluidParams::new(0.0, 1.0, 0.5).unwrap(),
            kernel: MemoryKernel::single_exponential(),
            measure: StrainMeasure::ucm(),
        };
        let g = Arc::new(matched_age_grid(&sc.kernel, 1e-8, 1e-6, dt, 1.0).unwrap());
        let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
        let out = solver
            .time_advance(FlowState::at_rest(&sc, g).unwrap(), 3.0, dt, &mut |_| Ok(()))
            .unwrap();
        assert!(out.aborted.is_none());
        for s in out.stress.iter().skip(1) {
            let (_, t12, _) = ucm_startup_closed_form(1.0, 1.0, 0.5, s.t);
            assert!((s.tau_xy - t12).abs() <= 1e-3 * t12.abs(), "t = {}", s.t);
        }
        let mut lcm = sc.clone();
        lcm.measure = StrainMeasure::lcm();
        let g = Arc::new(matched_age_grid(&lcm.kernel, 1e-8, 1e-6, dt, 1.0).unwrap());
        let solver = FlowSolver::new(lcm.clone(), SolverOptions::default()).unwrap();
        let out = solver
            .time_advance(FlowState::at_rest(&lcm, g).unwrap(), 3.0, dt, &mut |_| Ok(()))
            .unwrap();
        let last = out.stress.last().unwrap();
        let (_, t12, t22) = lcm_startup_closed_form(1.0, 1.0, 0.5, last.t);
        assert!((last.tau_xy - t12).abs() <= 1e-3 * t12.abs());
        assert!((last.tau_yy - t22).abs() <= 1e-3 * t22.abs());
    }

    #[test]
    fn newtonian_limit_matches_stress_free_run_bitwise() {
        let mesh = ChannelMesh::new(8, 6, 2.0, 1.0).unwrap();
        let sc = channel(Geometry::Poiseuille { mesh, body_force: 0.5 }, 0.0);
        let dt = 0.05;
        let run = |enabled: bool| {
            let opts = SolverOptions {
                stress_enabled: enabled,
                ..Default::default()
            };
            let solver = FlowSolver::new(sc.clone(), opts).unwrap();
            let st = FlowState::at_rest(&sc, grid(dt)).unwrap();
            solver.time_advance(st, 1.0, dt, &mut |_| Ok(())).unwrap()
        };
        let (a, b) = (run(true), run(false));
        assert_eq!(a.state.u, b.state.u);
        assert_eq!(a.state.p, b.state.p);
        assert!(a.state.stress.tau.iter().all(|t| *t == Tensor2::zeros(2)));
    }

    #[test]
    fn viscoelastic_poiseuille_stays_incompressible_and_bounded() {
        let mesh = ChannelMesh::new(8, 8, 1.0, 1.0).unwrap();
        let sc = channel(Geometry::Poiseuille { mesh, body_force: 0.2 }, 0.1);
        let dt = 0.05;
        let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
        let out = solver
            .time_advance(FlowState::at_rest(&sc, grid(dt)).unwrap(), 2.0, dt, &mut |_| Ok(()))
            .unwrap();
        assert!(out.aborted.is_none());
        assert!(out.diagnostics.iter().all(|d| d.divergence <= 1e-8));
        assert!(out.diagnostics.iter().all(|d| d.det_drift <= 1e-10));
        assert!(!out.monitor.any_crossing());
        let ke = out.diagnostics.last().unwrap().kinetic_energy;
        assert!(ke > 0.0 && ke < 1.0);
    }

    #[test]
    fn couette_startup_drives_flow_from_wall() {
        let mesh = ChannelMesh::new(4, 8, 1.0, 1.0).unwrap();
        let sc = channel(Geometry::Couette { mesh, wall_speed: 0.5 }, 0.2);
        let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
        let dt = 0.05;
        let out = solver
            .time_advance(FlowState::at_rest(&sc, grid(dt)).unwrap(), 5.0, dt, &mut |_| Ok(()))
            .unwrap();
        let u = out.state.u.unwrap();
        for j in 0..mesh.ny {
            let y = (j as f64 + 0.5) * mesh.dy();
            assert!((u.ui(0, j) - 0.5 * y).abs() < 1e-2, "{} at {y}", u.ui(0, j));
        }
        assert!(out.stress.last().unwrap().tau_xy > 0.0);
    }

    #[test]
    fn transient_channel_requires_inertia() {
        let mesh = ChannelMesh::new(4, 4, 1.0, 1.0).unwrap();
        let mut sc = channel(Geometry::PeriodicChannel(mesh), 0.1);
        sc.params.re = 0.0;
        assert!(FlowSolver::new(sc, SolverOptions::default()).is_err());
    }

    #[test]
    fn callback_error_stops_run() {
        let sc = Scenario {
            geometry: Geometry::HomogeneousBox(HomogeneousFlow::simple_shear(2, 1.0)),
            forcing: [0.0; 2],
            params: FluidParams::new(0.0, 1.0, 0.5).unwrap(),
            kernel: MemoryKernel::single_exponential(),
            measure: StrainMeasure::ucm(),
        };
        let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
        let st = FlowState::at_rest(&sc, grid(0.1)).unwrap();
        let out = solver
            .time_advance(st, 1.0, 0.1, &mut |s| {
                if s.step == 3 {
                    Err(Error::Checkpoint("disk full".into()))
                } else {
                    Ok(())
                }
            })
            .unwrap();
        assert!(out.aborted.is_some());
        assert_eq!(out.state.step, 3);
    }
}
