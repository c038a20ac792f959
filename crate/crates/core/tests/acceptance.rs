//! Acceptance checks. Each check prints one PASS/FAIL line with the measured
//! value and its pinned tolerance; the binary exits non-zero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use viscomem::config::RunConfig;
use viscomem::deformation::exact::{
    lcm_startup_closed_form, maxwell_ode, ucm_startup_closed_form, Convected,
};
use viscomem::deformation::gronwall::{gronwall_validate, GronwallMesh};
use viscomem::deformation::{
    step_transport, AgeTimeField, HomogeneousFlow, Layout, TransportOptions, TransportStep,
};
use viscomem::flow::{
    matched_age_grid, FlowSolver, FlowState, FluidParams, Geometry, Scenario, SolverOptions,
};
use viscomem::kernel::{
    build_age_grid, build_age_grid_with, doi_edwards_series_mass, AgeGrid, AgeGridOptions,
    MemoryKernel,
};
use viscomem::mesh::ChannelMesh;
use viscomem::scenarios::bundled;
use viscomem::stationary::{
    stationary_fixed_point, uniqueness_probe, Smallness, StationaryGeometry, StationaryProblem,
};
use viscomem::strain::{random_unimodular, MeasureVariant, StrainMeasure};
use viscomem::stress::{assemble_grad_tau, assemble_tau};
use viscomem::tensor::{finger, norm4, Tensor2, Tensor3};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn simple_shear_box(measure: StrainMeasure, we: f64, omega: f64) -> Scenario {
    Scenario {
        geometry: Geometry::HomogeneousBox(HomogeneousFlow::simple_shear(2, 1.0)),
        forcing: [0.0; 2],
        params: FluidParams::new(0.0, we, omega).unwrap(),
        kernel: MemoryKernel::single_exponential(),
        measure,
    }
}

fn homogeneous_run(sc: &Scenario, tail: f64, dt: f64, t_end: f64) -> viscomem::flow::RunOutcome {
    let grid = Arc::new(matched_age_grid(&sc.kernel, tail, 1e-6, dt, sc.params.we).unwrap());
    let solver = FlowSolver::new(sc.clone(), SolverOptions::default()).unwrap();
    let state = FlowState::at_rest(sc, grid).unwrap();
    solver.time_advance(state, t_end, dt, &mut |_| Ok(())).unwrap()
}

/// Start-up of simple shear for the upper and lower convected measures against
/// the closed form and an RK4 integration of the differential model.
fn startup_shear() -> Outcome {
    let (we, omega, dt, t_end) = (1.0, 0.5, 1e-3, 2.0);
    let tol = 1e-3;
    let budget = 10.0;
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for (measure, model) in [
        (StrainMeasure::ucm(), Convected::Upper),
        (StrainMeasure::lcm(), Convected::Lower),
    ] {
        let sc = simple_shear_box(measure, we, omega);
        let started = Instant::now();
        let out = homogeneous_run(&sc, 1e-8, dt, t_end);
        slowest = slowest.max(started.elapsed().as_secs_f64());
        assert!(out.aborted.is_none());
        let steps = out.stress.len() - 1;
        let ode = maxwell_ode(model, &HomogeneousFlow::simple_shear(2, 1.0), we, omega, dt, steps);
        for (k, s) in out.stress.iter().enumerate().skip(10) {
            let (c11, c12, c22) = match model {
                Convected::Upper => ucm_startup_closed_form(1.0, we, omega, s.t),
                Convected::Lower => lcm_startup_closed_form(1.0, we, omega, s.t),
            };
            let o = ode[k];
            let pairs = [
                (s.tau_xy, c12),
                (s.n1(), c11 - c22),
                (s.tau_xy, o[(0, 1)]),
                (s.n1(), o[(0, 0)] - o[(1, 1)]),
            ];
            for (num, exact) in pairs {
                worst = worst.max((num - exact).abs() / exact.abs());
            }
        }
    }
    outcome(
        worst <= tol && slowest < budget,
        format!(
            "startup shear UCM/LCM vs closed form and ODE to t = {t_end}: max rel err {worst:.2e} (tol {tol:.0e}), slowest run {slowest:.1}s (< {budget}s)"
        ),
    )
}

/// Shear stress and first normal stress difference after `t = 20 We`.
fn steady_shear() -> Outcome {
    let (we, omega, dt) = (1.0, 0.5, 0.01);
    let tol = 1e-4;
    let out = homogeneous_run(&simple_shear_box(StrainMeasure::ucm(), we, omega), 1e-8, dt, 20.0 * we);
    let last = out.stress.last().unwrap();
    let e12 = (last.tau_xy - omega).abs() / omega;
    let n1 = 2.0 * omega * we;
    let en1 = (last.n1() - n1).abs() / n1;
    let worst = e12.max(en1);
    outcome(
        worst <= tol,
        format!("steady shear at t = 20We: rel err tau12 {e12:.2e}, N1 {en1:.2e} (tol {tol:.0e})"),
    )
}

/// Bounds of the normalized Finger measure on random unimodular samples.
fn psm_norm_bounds() -> Outcome {
    let d = 3;
    let samples = 100_000;
    let measure = StrainMeasure::psm_norm();
    let deriv_cap = 2.0 * (1.0 + 3f64.sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (lo, hi) = ((d as f64).sqrt().ln(), 1e3f64.ln());
    let (mut s_max, mut ds_max, mut inv_min) = (0.0f64, 0.0f64, f64::INFINITY);
    for n in 0..samples {
        let frac = n as f64 / (samples - 1) as f64;
        let g = random_unimodular(d, (lo + frac * (hi - lo)).exp(), &mut rng);
        s_max = s_max.max(measure.evaluate(&g).unwrap().norm());
        ds_max = ds_max.max(g.norm() * norm4(&measure.derivative(&g).unwrap()));
        // I₂ = tr B⁻¹ = ((tr B)² − tr B²)/2 when det B = 1
        let b = finger(&g);
        let i1 = b.trace();
        let i2 = 0.5 * (i1 * i1 - (b * b).trace());
        inv_min = inv_min.min(i1).min(i2);
    }
    let slack = 1e-12;
    let pass = s_max <= 1.0 + slack && ds_max <= deriv_cap + slack && inv_min >= 3.0 - 1e-9;
    outcome(
        pass,
        format!(
            "normalized Finger bounds on {samples} det-1 samples: max|S| {s_max:.6} (<= 1), max|G||S'| {ds_max:.4} (<= {deriv_cap:.4}), min(I1,I2) {inv_min:.6} (>= 3)"
        ),
    )
}

/// Doi-Edwards series mass and the graded grid's quadrature mass.
fn doi_edwards_mass() -> Outcome {
    let series_err = (doi_edwards_series_mass(10_000) - 1.0).abs();
    let kernel = MemoryKernel::doi_edwards(1.0, 200).unwrap();
    let grid = build_age_grid(&kernel, 1e-8, 1e-6).unwrap();
    let captured = 1.0 - kernel.tail_mass(grid.s_max());
    let total_err = (grid.mass() + grid.tail_mass() - 1.0).abs();
    let grid_err = (grid.mass() - captured).abs();
    let pass = series_err <= 1e-4 && total_err <= 1e-6 && grid_err <= 1e-6;
    outcome(
        pass,
        format!(
            "Doi-Edwards mass: series K=1e4 err {series_err:.2e} (tol 1e-4), graded grid ({} nodes) err {:.2e} (tol 1e-6)",
            grid.len(),
            total_err.max(grid_err)
        ),
    )
}

/// Two-variable Gronwall equality case and bound on three data sets.
fn gronwall() -> Outcome {
    let tol = 1e-6;
    let mesh = GronwallMesh {
        we: 1.0,
        dt: 1e-3,
        t_end: 2.0,
        s_end: 3.0,
    };
    type Case = (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>);
    let cases: Vec<Case> = vec![
        (Box::new(|t: f64| t.cos().powi(2)), Box::new(|s: f64| 1.0 + s), Box::new(|_| 1.0)),
        (Box::new(|_| 0.5), Box::new(|s: f64| (-s).exp()), Box::new(|t: f64| 1.0 + t * t)),
        (
            Box::new(|t: f64| t / (1.0 + t)),
            Box::new(|s: f64| 2.0 + (3.0 * s).sin()),
            Box::new(|t: f64| 2.0 + t.sin()),
        ),
    ];
    let (mut eq, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for (f, age, time) in &cases {
        match gronwall_validate(f.as_ref(), age.as_ref(), time.as_ref(), &mesh, tol) {
            Ok(r) => {
                eq = eq.max(r.max_equality_error);
                excess = excess.max(r.max_bound_excess);
            }
            Err(e) => return outcome(false, format!("Gronwall validation: {e}")),
        }
    }
    outcome(
        eq <= tol && excess <= tol,
        format!("Gronwall, 3 data sets at dt 1e-3: equality err {eq:.2e}, bound excess {excess:.2e} (tol {tol:.0e})"),
    )
}

/// Determinant drift over a 1000-step coupled channel start-up.
fn channel_det_drift() -> Outcome {
    let tol = 1e-5;
    let cfg: RunConfig = bundled("channel_startup").unwrap();
    let sc = cfg.scenario().unwrap();
    let grid = Arc::new(cfg.age_grid().unwrap());
    let time = cfg.time.unwrap();
    let solver = FlowSolver::new(sc.clone(), cfg.solver_options()).unwrap();
    let started = Instant::now();
    let out = solver
        .time_advance(FlowState::at_rest(&sc, grid).unwrap(), time.t_end, time.dt, &mut |_| Ok(()))
        .unwrap();
    let steps = out.state.step;
    let drift = out.diagnostics.iter().map(|d| d.det_drift).fold(0.0, f64::max);
    outcome(
        out.aborted.is_none() && steps >= 1000 && drift <= tol,
        format!(
            "channel start-up, {steps} steps: max |det G - 1| {drift:.2e} (tol {tol:.0e}, {:.1}s)",
            started.elapsed().as_secs_f64()
        ),
    )
}

fn stretch_shear(t: f64) -> Tensor2 {
    let eps = 0.2 * t.cos();
    Tensor2::from_rows(&[&[eps, 0.0], &[1.0, -eps]])
}

/// `M(b)` for `M′ = M·κ(t)`, `M(a) = δ`, by RK4 with `n` substeps.
fn reference_propagator(a: f64, b: f64, n: usize) -> Tensor2 {
    let h = (b - a) / n as f64;
    let mut m = Tensor2::identity(2);
    for k in 0..n {
        let t = a + k as f64 * h;
        let f = |m: &Tensor2, t: f64| *m * stretch_shear(t);
        let k1 = f(&m, t);
        let k2 = f(&(m + k1.scale(0.5 * h)), t + 0.5 * h);
        let k3 = f(&(m + k2.scale(0.5 * h)), t + 0.5 * h);
        let k4 = f(&(m + k3.scale(h)), t + h);
        m += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
    }
    m
}

fn transport_error(dt: f64, t_end: f64) -> f64 {
    let we = 1.0;
    let grid = Arc::new(matched_age_grid(&MemoryKernel::single_exponential(), 1e-3, 1e-6, dt, we).unwrap());
    let mut field = AgeTimeField::at_rest(grid.clone(), Layout::Homogeneous, 2, we).unwrap();
    let steps = (t_end / dt).round() as usize;
    for n in 0..steps {
        let kappa = [stretch_shear((n as f64 + 0.5) * dt)];
        let step = TransportStep {
            velocity: None,
            kappa: &kappa,
            dt,
        };
        field = step_transport(&field, &step, &TransportOptions::default()).unwrap().0;
    }
    // reference built backwards from t_end one step at a time
    let mut p = Tensor2::identity(2);
    let mut err: f64 = 0.0;
    for (i, g) in field.column(0).iter().enumerate() {
        if i > 0 && i <= steps {
            let hi = t_end - (i - 1) as f64 * dt;
            p = reference_propagator(hi - dt, hi, 16) * p;
        }
        err = err.max(g.max_abs_diff(&p));
    }
    err
}

/// Self-convergence order of transport under a time-dependent, non-nilpotent
/// velocity gradient on matched grids.
fn transport_order() -> Outcome {
    let tol = 1.8;
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|dt| transport_error(*dt, 2.0)).collect();
    let order = (errs[1] / errs[2]).log2();
    outcome(
        order >= tol,
        format!(
            "transport order: errors {:.2e}, {:.2e}, {:.2e}; observed order {order:.3} (>= {tol})",
            errs[0], errs[1], errs[2]
        ),
    )
}

/// Stationary parallel shear: rest in one iteration, Poiseuille convergence and
/// the uniqueness probe.
fn stationary() -> Outcome {
    let tol = 1e-10;
    let problem = |f: f64| StationaryProblem {
        params: FluidParams::new(1.0, 1.0, 0.1).unwrap(),
        kernel: MemoryKernel::single_exponential(),
        measure: StrainMeasure::ucm(),
        forcing: f,
        geometry: StationaryGeometry::ParallelShear { ny: 32, height: 1.0 },
        smallness: Smallness::default(),
    };
    let grid = |k: &MemoryKernel| -> Arc<AgeGrid> {
        Arc::new(build_age_grid_with(k, &AgeGridOptions::new(1e-10, 1e-6).uniform(0.01)).unwrap())
    };
    let rest = problem(0.0);
    let rest_sol = match stationary_fixed_point(&rest, grid(&rest.kernel), tol, 30, None) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("stationary rest: {e}")),
    };
    let rest_ok = rest_sol.report.iterations == 1 && rest_sol.v.iter().all(|v| *v == 0.0);
    let pois = problem(0.05);
    let sol = match stationary_fixed_point(&pois, grid(&pois.kernel), tol, 30, None) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("stationary Poiseuille: {e}")),
    };
    let rate = sol.shear_rate();
    let tau_err = sol
        .stress
        .tau
        .iter()
        .zip(&rate)
        .map(|(t, r)| (t[(0, 1)] - 0.1 * r).abs())
        .fold(0.0, f64::max);
    let residual = sol.report.momentum_residual;
    let unique = uniqueness_probe(&pois, grid(&pois.kernel), tol, 50).unwrap_or(f64::INFINITY);
    let pass = rest_ok
        && sol.report.iterations <= 30
        && residual <= 1e-8
        && tau_err <= 1e-5
        && unique <= 10.0 * tol;
    outcome(
        pass,
        format!(
            "stationary: rest in {} iteration, Poiseuille in {} iterations (<= 30), residual {residual:.2e} (<= 1e-8), tau12 err {tau_err:.2e} (<= 1e-5), uniqueness {unique:.2e} (<= {:.0e})",
            rest_sol.report.iterations,
            sol.report.iterations,
            10.0 * tol
        ),
    )
}

/// With `ω = 0` the coupled solver reproduces the stress-free solver bitwise.
fn newtonian_bitwise() -> Outcome {
    let mesh = ChannelMesh::new(16, 8, 2.0, 1.0).unwrap();
    let sc = Scenario {
        geometry: Geometry::Poiseuille { mesh, body_force: 0.1 },
        forcing: [0.0; 2],
        params: FluidParams::new(1.0, 1.0, 0.0).unwrap(),
        kernel: MemoryKernel::single_exponential(),
        measure: StrainMeasure::ucm(),
    };
    let dt = 0.02;
    let grid = Arc::new(matched_age_grid(&sc.kernel, 1e-4, 1e-6, dt, 1.0).unwrap());
    let run = |enabled: bool| {
        let opts = SolverOptions {
            stress_enabled: enabled,
            ..Default::default()
        };
        let solver = FlowSolver::new(sc.clone(), opts).unwrap();
        let state = FlowState::at_rest(&sc, grid.clone()).unwrap();
        solver.time_advance(state, 200.0 * dt, dt, &mut |_| Ok(())).unwrap()
    };
    let (a, b) = (run(true), run(false));
    let same_fields = a.state.u == b.state.u && a.state.p == b.state.p;
    let same_energy = a
        .diagnostics
        .iter()
        .zip(&b.diagnostics)
        .all(|(x, y)| x.kinetic_energy.to_bits() == y.kinetic_energy.to_bits());
    outcome(
        same_fields && same_energy,
        format!(
            "Newtonian limit, {} steps: velocity/pressure bitwise equal {same_fields}, energy history bitwise equal {same_energy}",
            a.state.step
        ),
    )
}

/// Manufactured unimodular field `G(s; x, y)` and its spatial gradient.
fn manufactured(s: f64, x: f64, y: f64) -> (Tensor2, Tensor3) {
    let (ea, eb) = ((-s / 4.0).exp(), (-s / 3.0).exp());
    let p = 0.2 * s * ea * (x + 0.3).sin();
    let px = 0.2 * s * ea * (x + 0.3).cos();
    let py = 0.0;
    let q = 0.5 * s * eb * y.cos();
    let qx = 0.0;
    let qy = -0.5 * s * eb * y.sin();
    let r = 0.1 * s * (x + y).sin();
    let rx = 0.1 * s * (x + y).cos();
    let ry = rx;
    let w = 1.0 + p;
    let g22 = (1.0 + q * r) / w;
    let d22 = |dp: f64, dq: f64, dr: f64| ((dq * r + q * dr) * w - (1.0 + q * r) * dp) / (w * w);
    let g = Tensor2::from_rows(&[&[w, q], &[r, g22]]);
    let gx = Tensor2::from_rows(&[&[px, qx], &[rx, d22(px, qx, rx)]]);
    let gy = Tensor2::from_rows(&[&[py, qy], &[ry, d22(py, qy, ry)]]);
    let mut grad = Tensor3::zeros(2);
    grad.set_component(0, &gx);
    grad.set_component(1, &gy);
    (g, grad)
}

fn manufactured_field(grid: &Arc<AgeGrid>, x: f64, y: f64) -> AgeTimeField {
    let values = grid.nodes().iter().map(|s| manufactured(*s, x, y).0).collect();
    AgeTimeField::from_values(grid.clone(), Layout::Homogeneous, 1.0, 0.0, values).unwrap()
}

fn measure_catalog() -> Vec<StrainMeasure> {
    vec![
        StrainMeasure::ucm(),
        StrainMeasure::lcm(),
        StrainMeasure::psm_norm(),
        StrainMeasure::new(MeasureVariant::Psm { alpha: 4.0, beta: 1.0 }).unwrap(),
        StrainMeasure::new(MeasureVariant::Wagner { alpha: 0.5, beta: 0.3 }).unwrap(),
        StrainMeasure::new(MeasureVariant::Currie).unwrap(),
    ]
}

fn stress_grid() -> Arc<AgeGrid> {
    Arc::new(
        build_age_grid_with(
            &MemoryKernel::single_exponential(),
            &AgeGridOptions::new(1e-6, 1e-6).uniform(0.05),
        )
        .unwrap(),
    )
}

/// The stress is linear in `ω` for a frozen deformation field.
fn omega_linearity() -> Outcome {
    let tol = 1e-12;
    let grid = stress_grid();
    let field = manufactured_field(&grid, 0.4, 0.7);
    let mut worst: f64 = 0.0;
    for m in measure_catalog() {
        let a = assemble_tau(&field, &m, 0.3, 1.0).unwrap().tau[0];
        let b = assemble_tau(&field, &m, 0.6, 1.0).unwrap().tau[0];
        worst = worst.max(b.max_abs_diff(&a.scale(2.0)) / a.max_abs());
    }
    outcome(
        worst <= tol,
        format!("omega linearity over 6 measures: max rel deviation {worst:.2e} (tol {tol:.0e})"),
    )
}

/// Stress gradient assembled from `S′` against central differences of `τ`.
fn stress_gradient() -> Outcome {
    let tol = 1e-5;
    let h = 1e-4;
    let grid = stress_grid();
    let (x0, y0) = (0.4, 0.7);
    let field = manufactured_field(&grid, x0, y0);
    let grads: Vec<Tensor3> = grid.nodes().iter().map(|s| manufactured(*s, x0, y0).1).collect();
    let mut worst: f64 = 0.0;
    for m in measure_catalog() {
        let tau = |x: f64, y: f64| assemble_tau(&manufactured_field(&grid, x, y), &m, 0.5, 1.0).unwrap().tau[0];
        let fd = [
            (tau(x0 + h, y0) - tau(x0 - h, y0)).scale(0.5 / h),
            (tau(x0, y0 + h) - tau(x0, y0 - h)).scale(0.5 / h),
        ];
        let formula = assemble_grad_tau(&field, &grads, &m, 0.5, 1.0).unwrap()[0];
        for (i, fdi) in fd.iter().enumerate() {
            worst = worst.max(formula.component(i).max_abs_diff(fdi) / fdi.max_abs());
        }
    }
    outcome(
        worst <= tol,
        format!("stress gradient vs central differences over 6 measures: max rel err {worst:.2e} (tol {tol:.0e})"),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("AC01", startup_shear),
        ("AC02", steady_shear),
        ("AC03", psm_norm_bounds),
        ("AC04", doi_edwards_mass),
        ("AC05", gronwall),
        ("AC06", channel_det_drift),
        ("AC07", transport_order),
        ("AC08", stationary),
        ("AC09", newtonian_bitwise),
        ("AC10", omega_linearity),
        ("AC11", stress_gradient),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (id, check) in checks {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{id} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        checks.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
