//! Stationary solutions by fixed-point iteration, for flows whose age equation
//! closes without spatial advection: homogeneous kinematics and parallel shear.
//!
//! In both cases the stationary deformation is `G(s) = exp(We·s·κ)` per location.

use std::fmt::Write as _;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deformation::{AgeTimeField, Layout};
use crate::error::{Error, Result};
use crate::flow::fft_solvers::YOperator;
use crate::flow::FluidParams;
use crate::kernel::{AgeGrid, DecayEnvelope, MemoryKernel};
use crate::strain::{MeasureVariant, StrainMeasure};
use crate::stress::{assemble_tau, StressField};
use crate::tensor::{tensor_exp, Tensor2};

/// Smallness constants of the admissibility test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    pub c0: f64,
    /// Radius of the velocity ball the iteration is meant to stay in.
    pub r1: f64,
    /// Largest admissible forcing magnitude.
    pub f_cap: f64,
    /// Integrability exponent.
    pub p: f64,
}

impl Default for Smallness {
    fn default() -> Self {
        Smallness {
            c0: 0.1,
            r1: 0.1,
            f_cap: 0.1,
            p: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StationaryGeometry {
    Homogeneous { kappa: Tensor2 },
    /// Streamwise velocity `v(y)` between walls at `y = 0` and `y = height`,
    /// sampled at `ny` cell centres.
    ParallelShear { ny: usize, height: f64 },
}

#[derive(Clone, Debug)]
pub struct StationaryProblem {
    pub params: FluidParams,
    pub kernel: MemoryKernel,
    pub measure: StrainMeasure,
    /// Streamwise body force (parallel shear only).
    pub forcing: f64,
    pub geometry: StationaryGeometry,
    pub smallness: Smallness,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Admissibility {
    /// Exponential decay rate of the kernel, if it has one.
    pub alpha: Option<f64>,
    pub threshold: f64,
    pub admissible: bool,
}

/// Polynomial growth exponents `(a, b)` of `|S|` and `|S′|` used by the
/// stationary checks: the measure's own constants when set, otherwise
/// quadratic growth for the convected families and bounded growth elsewhere.
pub fn growth_exponents(measure: &StrainMeasure) -> (f64, f64) {
    if let Some(g) = measure.growth {
        return (g.a, g.b);
    }
    match measure.variant {
        MeasureVariant::Ucm | MeasureVariant::Lcm | MeasureVariant::Kbkz { .. } => (2.0, 1.0),
        _ => (0.0, -1.0),
    }
}

/// Checks `α > 3C₀·We·c·p·R₁` with `c = max(a, b + 1)` and the forcing cap.
pub fn check_admissibility(problem: &StationaryProblem) -> Result<Admissibility> {
    let sm = &problem.smallness;
    let (a, b) = growth_exponents(&problem.measure);
    let c = a.max(b + 1.0);
    let threshold = 3.0 * sm.c0 * problem.params.we * c * sm.p * sm.r1;
    let alpha = match problem.kernel.decay_envelope() {
        DecayEnvelope::Exponential { alpha, .. } => Some(alpha),
        DecayEnvelope::NotExponential => None,
    };
    let admissible = match alpha {
        _ if c <= 0.0 => true,
        Some(al) => al > threshold,
        None => false,
    };
    if !admissible {
        let why = match alpha {
            Some(al) => format!("kernel decay rate {al} does not exceed threshold {threshold}"),
            None => format!(
                "kernel has no exponential envelope but the measure grows (c = {c})"
            ),
        };
        return Err(Error::Inadmissible(why));
    }
    if problem.forcing.abs() > sm.f_cap {
        return Err(Error::Inadmissible(format!(
            "forcing {} exceeds the cap {}",
            problem.forcing, sm.f_cap
        )));
    }
    Ok(Admissibility {
        alpha,
        threshold,
        admissible,
    })
}

fn cbrt(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        z
    } else {
        z.powf(1.0 / 3.0)
    }
}

/// Largest real part among the eigenvalues of `κ`.
pub fn spectral_abscissa(kappa: &Tensor2) -> f64 {
    let d = kappa.dim();
    match d {
        1 => kappa[(0, 0)],
        2 => {
            let (tr, det) = (kappa.trace(), kappa.det());
            let disc = 0.25 * tr * tr - det;
            0.5 * tr + if disc > 0.0 { disc.sqrt() } else { 0.0 }
        }
        _ => {
            // λ³ − c2 λ² + c1 λ − c0, depressed with λ = μ + c2/3
            let c2 = kappa.trace();
            let sq = (*kappa * *kappa).trace();
            let c1 = 0.5 * (c2 * c2 - sq);
            let c0 = kappa.det();
            let p = c1 - c2 * c2 / 3.0;
            let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
            let disc = Complex64::new(q * q / 4.0 + p.powi(3) / 27.0, 0.0).sqrt();
            let u = cbrt(Complex64::new(-q / 2.0, 0.0) + disc);
            let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
            let mut best = f64::NEG_INFINITY;
            let mut uk = u;
            for _ in 0..3 {
                let mu = if uk.norm() > 1e-300 {
                    uk - Complex64::new(p / 3.0, 0.0) / uk
                } else {
                    Complex64::new(0.0, 0.0)
                };
                best = best.max(mu.re + c2 / 3.0);
                uk *= omega;
            }
            best
        }
    }
}

/// Errors with [`Error::Divergent`] when the stationary stress integral of a
/// homogeneous flow with gradient `κ` diverges: the integrand grows like
/// `exp(a·We·σ·s)` with `σ` the spectral abscissa of `±κ`.
pub fn divergence_check(kappa: &Tensor2, we: f64, kernel: &MemoryKernel, measure: &StrainMeasure) -> Result<f64> {
    let (a, _) = growth_exponents(measure);
    let sigma = spectral_abscissa(kappa).max(spectral_abscissa(&-*kappa)).max(0.0);
    let growth = a * we * sigma;
    let rounding = 1e-12 * (1.0 + we * kappa.norm());
    if growth <= rounding {
        return Ok(0.0);
    }
    match kernel.decay_envelope() {
        DecayEnvelope::Exponential { alpha, .. } if growth < alpha => Ok(growth),
        DecayEnvelope::Exponential { alpha, .. } => Err(Error::Divergent {
            growth,
            decay: alpha,
        }),
        DecayEnvelope::NotExponential => Err(Error::Divergent { growth, decay: 0.0 }),
    }
}

/// `G(s) = exp(We·s·κ)` at every location; `kappa` has one entry per cell.
pub fn stationary_age_solve(
    kappa: &[Tensor2],
    we: f64,
    grid: Arc<AgeGrid>,
    layout: Layout,
) -> Result<AgeTimeField> {
    if let Layout::Channel(m) = &layout {
        return Err(Error::GeometryUnsupported(format!(
            "stationary deformation needs x-independent kinematics, got a {}x{} channel",
            m.nx, m.ny
        )));
    }
    let n_cells = kappa.len();
    if n_cells == 0 {
        return Err(Error::InvalidParams("no locations given".into()));
    }
    let d = kappa[0].dim();
    let nodes = grid.nodes().to_vec();
    let mut values = Vec::with_capacity(n_cells * nodes.len());
    for k in kappa {
        for (a, s) in nodes.iter().enumerate() {
            values.push(if a == 0 {
                Tensor2::identity(d)
            } else {
                tensor_exp(k, we * s)
            });
        }
    }
    if layout.n_cells() != n_cells {
        return Err(Error::GridMismatch {
            samples: n_cells,
            nodes: layout.n_cells(),
        });
    }
    AgeTimeField::from_values(grid, layout, we, 0.0, values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub converged: bool,
    /// `max |vᵏ − vᵏ⁻¹|` per iteration.
    pub residuals: Vec<f64>,
    /// Ratios of successive residuals.
    pub contraction: Vec<f64>,
    /// Momentum residual of the returned profile.
    pub momentum_residual: f64,
    pub admissibility: Admissibility,
    pub growth_exponent: f64,
}

impl ConvergenceReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "converged = {}", self.converged);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "momentum_residual = {:.16e}", self.momentum_residual);
        match self.admissibility.alpha {
            Some(a) => {
                let _ = writeln!(s, "kernel_decay_rate = {a:.16e}");
            }
            None => {
                let _ = writeln!(s, "kernel_decay_rate = none");
            }
        }
        let _ = writeln!(s, "admissibility_threshold = {:.16e}", self.admissibility.threshold);
        let _ = writeln!(s, "growth_exponent = {:.16e}", self.growth_exponent);
        let _ = writeln!(s, "iteration,residual,contraction");
        for (k, r) in self.residuals.iter().enumerate() {
            let c = if k == 0 { f64::NAN } else { self.contraction[k - 1] };
            let _ = writeln!(s, "{},{:.16e},{:.16e}", k + 1, r, c);
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct StationarySolution {
    /// Cell-centre positions (empty for homogeneous problems).
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub stress: StressField,
    pub gfield: AgeTimeField,
    pub report: ConvergenceReport,
}

impl StationarySolution {
    /// `v′` at the cell centres.
    pub fn shear_rate(&self) -> Vec<f64> {
        if self.v.is_empty() {
            return Vec::new();
        }
        let h = self.y[0] * 2.0;
        derivative(&self.v, h, 0.0, 0.0)
    }
}

/// Centred first derivative of cell-centred samples with wall values `(lo, hi)`,
/// second order up to the walls.
fn derivative(v: &[f64], h: f64, lo: f64, hi: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| {
            if j == 0 {
                (v[1] / 3.0 + v[0] - 4.0 / 3.0 * lo) / h
            } else if j == n - 1 {
                -(v[n - 2] / 3.0 + v[n - 1] - 4.0 / 3.0 * hi) / h
            } else {
                (v[j + 1] - v[j - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Centred derivative of cell-centred data with one-sided second-order ends.
fn derivative_free(t: &[f64], h: f64) -> Vec<f64> {
    let n = t.len();
    (0..n)
        .map(|j| {
            if j == 0 {
                (-3.0 * t[0] + 4.0 * t[1] - t[2]) / (2.0 * h)
            } else if j == n - 1 {
                (3.0 * t[n - 1] - 4.0 * t[n - 2] + t[n - 3]) / (2.0 * h)
            } else {
                (t[j + 1] - t[j - 1]) / (2.0 * h)
            }
        })
        .collect()
}

fn thomas_real(op: &YOperator, scale: f64, rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut beta = scale * op.diag[0];
    rhs[0] /= beta;
    for j in 1..n {
        c[j] = scale * op.sup[j - 1] / beta;
        beta = scale * op.diag[j] - scale * op.sub[j] * c[j];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::LinearSolveFailure("zero pivot in profile solve".into()));
        }
        rhs[j] = (rhs[j] - scale * op.sub[j] * rhs[j - 1]) / beta;
    }
    for j in (0..n - 1).rev() {
        rhs[j] -= c[j + 1] * rhs[j + 1];
    }
    Ok(())
}

struct ShearMap<'a> {
    problem: &'a StationaryProblem,
    grid: Arc<AgeGrid>,
    op: YOperator,
    h: f64,
}

impl ShearMap<'_> {
    fn kinematics(&self, v: &[f64]) -> Vec<Tensor2> {
        derivative(v, self.h, 0.0, 0.0)
            .into_iter()
            .map(|r| Tensor2::unit(2, 1, 0).scale(r))
            .collect()
    }

    fn stress(&self, v: &[f64]) -> Result<(AgeTimeField, StressField)> {
        let kappa = self.kinematics(v);
        let layout = match self.problem.geometry {
            StationaryGeometry::ParallelShear { ny, height } => Layout::Profile { ny, height },
            StationaryGeometry::Homogeneous { .. } => Layout::Homogeneous,
        };
        let field = stationary_age_solve(&kappa, self.problem.params.we, self.grid.clone(), layout)?;
        let p = &self.problem.params;
        let stress = assemble_tau(&field, &self.problem.measure, p.omega, p.we)?;
        Ok((field, stress))
    }

    /// `−Re ū·∇ū` vanishes for parallel flow, leaving `−(1−ω)v″ = f + ∂ᵧτ₁₂`.
    fn apply(&self, stress: &StressField) -> Result<Vec<f64>> {
        let t12: Vec<f64> = stress.tau.iter().map(|t| t[(0, 1)]).collect();
        let mut rhs: Vec<f64> = derivative_free(&t12, self.h)
            .into_iter()
            .map(|d| self.problem.forcing + d)
            .collect();
        thomas_real(&self.op, -self.problem.params.solvent(), &mut rhs)?;
        Ok(rhs)
    }

    fn momentum_residual(&self, v: &[f64], stress: &StressField) -> f64 {
        let n = v.len();
        let t12: Vec<f64> = stress.tau.iter().map(|t| t[(0, 1)]).collect();
        let dt = derivative_free(&t12, self.h);
        let nu = self.problem.params.solvent();
        (0..n)
            .map(|j| {
                let mut lap = self.op.diag[j] * v[j];
                if j > 0 {
                    lap += self.op.sub[j] * v[j - 1];
                }
                if j + 1 < n {
                    lap += self.op.sup[j] * v[j + 1];
                }
                (nu * lap + self.problem.forcing + dt[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Fixed-point iteration `v ↦ Stokes⁻¹(f + div τ(G(v)))` from the initial
/// iterate `v0` (zero when `None`).
pub fn stationary_fixed_point(
    problem: &StationaryProblem,
    grid: Arc<AgeGrid>,
    tol: f64,
    max_iters: usize,
    v0: Option<&[f64]>,
) -> Result<StationarySolution> {
    let admissibility = check_admissibility(problem)?;
    let p = &problem.params;
    match &problem.geometry {
        StationaryGeometry::Homogeneous { kappa } => {
            let growth = divergence_check(kappa, p.we, &problem.kernel, &problem.measure)?;
            let field = stationary_age_solve(&[*kappa], p.we, grid, Layout::Homogeneous)?;
            let stress = assemble_tau(&field, &problem.measure, p.omega, p.we)?;
            Ok(StationarySolution {
                y: Vec::new(),
                v: Vec::new(),
                stress,
                gfield: field,
                report: ConvergenceReport {
                    iterations: 1,
                    converged: true,
                    residuals: vec![0.0],
                    contraction: Vec::new(),
                    momentum_residual: 0.0,
                    admissibility,
                    growth_exponent: growth,
                },
            })
        }
        StationaryGeometry::ParallelShear { ny, height } => {
            let ny = *ny;
            if ny < 3 {
                return Err(Error::InvalidParams("parallel shear needs at least 3 cells".into()));
            }
            if !(*height > 0.0) {
                return Err(Error::InvalidParams("channel height must be positive".into()));
            }
            let h = height / ny as f64;
            let map = ShearMap {
                problem,
                grid,
                op: YOperator::wall_parallel(ny, h),
                h,
            };
            let mut v = match v0 {
                Some(v0) if v0.len() == ny => v0.to_vec(),
                Some(v0) => {
                    return Err(Error::GridMismatch {
                        samples: v0.len(),
                        nodes: ny,
                    })
                }
                None => vec![0.0; ny],
            };
            let (mut field, mut stress) = map.stress(&v)?;
            let mut residuals = Vec::new();
            let mut contraction = Vec::new();
            let mut converged = false;
            while residuals.len() < max_iters {
                let next = map.apply(&stress)?;
                let change = next
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if let Some(prev) = residuals.last() {
                    contraction.push(if *prev > 0.0 { change / prev } else { 0.0 });
                }
                residuals.push(change);
                v = next;
                (field, stress) = map.stress(&v)?;
                if change < tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NotConverged {
                    iterations: residuals.len(),
                    contraction: contraction.last().copied().unwrap_or(f64::NAN),
                });
            }
            let momentum_residual = map.momentum_residual(&v, &stress);
            Ok(StationarySolution {
                y: (0..ny).map(|j| (j as f64 + 0.5) * h).collect(),
                v,
                stress,
                gfield: field,
                report: ConvergenceReport {
                    iterations: residuals.len(),
                    converged,
                    residuals,
                    contraction,
                    momentum_residual,
                    admissibility,
                    growth_exponent: 0.0,
                },
            })
        }
    }
}

/// Runs the iteration from two different starting profiles and returns the
/// largest difference between the two limits.
pub fn uniqueness_probe(
    problem: &StationaryProblem,
    grid: Arc<AgeGrid>,
    tol: f64,
    max_iters: usize,
) -> Result<f64> {
    let a = stationary_fixed_point(problem, grid.clone(), tol, max_iters, None)?;
    let ny = a.v.len();
    if ny == 0 {
        return Ok(0.0);
    }
    let bump: Vec<f64> = a
        .y
        .iter()
        .map(|y| 0.05 * (std::f64::consts::PI * y / (a.y[0] * 2.0 * ny as f64)).sin())
        .collect();
    let b = stationary_fixed_point(problem, grid, tol, max_iters, Some(&bump))?;
    Ok(a.v
        .iter()
        .zip(&b.v)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_age_grid_with, AgeGridOptions, PowerMode};

    fn grid(kernel: &MemoryKernel) -> Arc<AgeGrid> {
        Arc::new(build_age_grid_with(kernel, &AgeGridOptions::new(1e-10, 1e-6).uniform(0.01)).unwrap())
    }

    fn poiseuille(omega: f64, f: f64) -> StationaryProblem {
        StationaryProblem {
            params: FluidParams::new(1.0, 1.0, omega).unwrap(),
            kernel: MemoryKernel::single_exponential(),
            measure: StrainMeasure::ucm(),
            forcing: f,
            geometry: StationaryGeometry::ParallelShear { ny: 32, height: 1.0 },
            smallness: Smallness::default(),
        }
    }

    #[test]
    fn zero_forcing_is_rest_in_one_iteration() {
        let pr = poiseuille(0.1, 0.0);
        let sol = stationary_fixed_point(&pr, grid(&pr.kernel), 1e-10, 30, None).unwrap();
        assert_eq!(sol.report.iterations, 1);
        assert!(sol.v.iter().all(|v| *v == 0.0));
        assert!(sol.gfield.values().iter().all(|g| *g == Tensor2::identity(2)));
        assert!(sol.stress.tau.iter().all(|t| *t == Tensor2::zeros(2)));
    }

    #[test]
    fn poiseuille_matches_unit_viscosity_parabola() {
        let (omega, f) = (0.1, 0.05);
        let pr = poiseuille(omega, f);
        let sol = stationary_fixed_point(&pr, grid(&pr.kernel), 1e-10, 30, None).unwrap();
        assert!(sol.report.iterations <= 30);
        assert!(sol.report.momentum_residual < 1e-8);
        let rate = sol.shear_rate();
        for (j, y) in sol.y.iter().enumerate() {
            assert!((sol.v[j] - f * y * (1.0 - y) / 2.0).abs() < 1e-8);
            let t = sol.stress.tau[j];
            assert!((t[(0, 1)] - omega * rate[j]).abs() < 1e-7);
            let n1 = t[(0, 0)] - t[(1, 1)];
            assert!((n1 - 2.0 * omega * rate[j].powi(2)).abs() < 1e-7);
        }
        for w in sol.report.contraction.windows(1) {
            assert!(w[0] < 0.5);
        }
    }

    #[test]
    fn two_starts_reach_the_same_profile() {
        let pr = poiseuille(0.1, 0.05);
        let diff = uniqueness_probe(&pr, grid(&pr.kernel), 1e-10, 50).unwrap();
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn contraction_grows_with_omega() {
        let c = |omega: f64| {
            let pr = poiseuille(omega, 0.05);
            let sol = stationary_fixed_point(&pr, grid(&pr.kernel), 1e-10, 200, None).unwrap();
            sol.report.contraction[1]
        };
        assert!(c(0.1) < c(0.3));
        assert!(c(0.3) < c(0.45));
    }

    #[test]
    fn large_omega_does_not_converge() {
        let pr = poiseuille(0.6, 0.05);
        let r = stationary_fixed_point(&pr, grid(&pr.kernel), 1e-10, 30, None);
        assert!(matches!(r, Err(Error::NotConverged { .. })));
    }

    #[test]
    fn homogeneous_shear_is_nilpotent_exponential() {
        let k = MemoryKernel::single_exponential();
        let g = grid(&k);
        let kappa = Tensor2::unit(2, 1, 0).scale(0.7);
        let f = stationary_age_solve(&[kappa], 2.0, g.clone(), Layout::Homogeneous).unwrap();
        for (a, s) in g.nodes().iter().enumerate() {
            let want = Tensor2::identity(2) + kappa.scale(2.0 * s);
            assert!(f.get(0, a).max_abs_diff(&want) < 1e-12 * (1.0 + s));
        }
        let zero = stationary_age_solve(&[Tensor2::zeros(2)], 2.0, g, Layout::Homogeneous).unwrap();
        assert!(zero.values().iter().all(|g| *g == Tensor2::identity(2)));
    }

    #[test]
    fn elongation_divergence_threshold() {
        let k = MemoryKernel::single_exponential();
        let m = StrainMeasure::ucm();
        let e = |r: f64| Tensor2::diag(&[r, -r]);
        // exponent 2·We·ε̇ against α = 1
        assert!(divergence_check(&e(0.4), 1.0, &k, &m).is_ok());
        assert!(matches!(
            divergence_check(&e(0.5), 1.0, &k, &m),
            Err(Error::Divergent { .. })
        ));
        let bounded = StrainMeasure::psm_norm();
        assert_eq!(divergence_check(&e(5.0), 1.0, &k, &bounded).unwrap(), 0.0);
        let power = MemoryKernel::power_law(
            vec![PowerMode {
                eta: 1.0,
                beta: 0.5,
                lambda: 1.0,
            }],
            1e-3,
        )
        .unwrap();
        assert!(divergence_check(&e(0.1), 1.0, &power, &m).is_err());
    }

    #[test]
    fn spectral_abscissa_known_cases() {
        assert!((spectral_abscissa(&Tensor2::diag(&[0.3, -0.3])) - 0.3).abs() < 1e-14);
        assert_eq!(spectral_abscissa(&Tensor2::unit(2, 1, 0)), 0.0);
        let rot = Tensor2::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert_eq!(spectral_abscissa(&rot), 0.0);
        let uni = Tensor2::diag(&[2.0, -1.0, -1.0]);
        assert!((spectral_abscissa(&uni) - 2.0).abs() < 1e-12);
        assert!((spectral_abscissa(&-uni) - 1.0).abs() < 1e-12);
        let shear3 = Tensor2::unit(3, 1, 0);
        assert!(spectral_abscissa(&shear3).abs() < 1e-12);
    }

    #[test]
    fn admissibility_rejects_slow_kernels_and_strong_forcing() {
        let mut pr = poiseuille(0.1, 0.05);
        let a = check_admissibility(&pr).unwrap();
        assert!((a.threshold - 0.18).abs() < 1e-12);
        pr.params.we = 10.0;
        assert!(matches!(check_admissibility(&pr), Err(Error::Inadmissible(_))));
        let mut pr = poiseuille(0.1, 0.5);
        assert!(check_admissibility(&pr).is_err());
        pr.forcing = 0.05;
        pr.measure = StrainMeasure::psm_norm();
        pr.kernel = MemoryKernel::power_law(
            vec![PowerMode {
                eta: 1.0,
                beta: 0.5,
                lambda: 1.0,
            }],
            1e-3,
        )
        .unwrap();
        assert!(check_admissibility(&pr).unwrap().admissible);
    }

    #[test]
    fn channel_layout_is_unsupported() {
        let k = MemoryKernel::single_exponential();
        let mesh = crate::mesh::ChannelMesh::new(4, 4, 1.0, 1.0).unwrap();
        let r = stationary_age_solve(&[Tensor2::zeros(2); 16], 1.0, grid(&k), Layout::Channel(mesh));
        assert!(matches!(r, Err(Error::GeometryUnsupported(_))));
    }
}
