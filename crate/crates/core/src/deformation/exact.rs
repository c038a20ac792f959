//! Closed-form and ODE references for spatially homogeneous flows.

use crate::error::{Error, Result};
use crate::tensor::{finger, tensor_exp, Tensor2};

/// Piecewise-constant velocity gradient `κ(t)`; segment `k` starts at `starts[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousFlow {
    starts: Vec<f64>,
    kappas: Vec<Tensor2>,
}

impl HomogeneousFlow {
    pub fn constant(kappa: Tensor2) -> Result<Self> {
        Self::schedule(vec![(0.0, kappa)])
    }

    /// Simple shear `u₁ = γ̇ x₂`.
    pub fn simple_shear(d: usize, gamma_dot: f64) -> Self {
        Self::constant(Tensor2::unit(d, 1, 0).scale(gamma_dot)).expect("traceless")
    }

    /// Steps `(t_k, κ_k)`, with `t_0 = 0` and increasing start times.
    pub fn schedule(steps: Vec<(f64, Tensor2)>) -> Result<Self> {
        if steps.is_empty() || steps[0].0 != 0.0 {
            return Err(Error::InvalidFlow("schedule must start at t = 0".into()));
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidFlow("schedule times must increase".into()));
        }
        for (_, k) in &steps {
            let scale = k.norm().max(1.0);
            if k.trace().abs() > 1e-12 * scale {
                return Err(Error::InvalidFlow(format!(
                    "velocity gradient must be traceless, trace = {:e}",
                    k.trace()
                )));
            }
        }
        let (starts, kappas) = steps.into_iter().unzip();
        Ok(HomogeneousFlow { starts, kappas })
    }

    pub fn dim(&self) -> usize {
        self.kappas[0].dim()
    }

    /// `κ(t)`.
    pub fn kappa_at(&self, t: f64) -> Tensor2 {
        let k = self.starts.partition_point(|s| *s <= t).saturating_sub(1);
        self.kappas[k]
    }

    /// `κ` at the middle of `[t, t + dt]`.
    pub fn kappa_mid(&self, t: f64, dt: f64) -> Tensor2 {
        self.kappa_at(t + 0.5 * dt)
    }

    /// Ordered product `Π exp(Δₖκₖ)` over `[t0, t1]`: solution of `M′ = Mκ`, `M(t0) = δ`.
    pub fn propagator(&self, t0: f64, t1: f64) -> Tensor2 {
        let mut m = Tensor2::identity(self.dim());
        for k in 0..self.kappas.len() {
            let a = self.starts[k].max(t0);
            let b = self.starts.get(k + 1).copied().unwrap_or(f64::INFINITY).min(t1);
            if b > a {
                m = m * tensor_exp(&self.kappas[k], b - a);
            }
        }
        m
    }
}

/// `G(s, t)` for a homogeneous flow with history `g_old`.
pub fn exact_homogeneous(
    flow: &HomogeneousFlow,
    we: f64,
    g_old: &dyn Fn(f64) -> Tensor2,
    t: f64,
    s: f64,
) -> Tensor2 {
    if t > we * s {
        flow.propagator(t - we * s, t)
    } else {
        g_old(s - t / we) * flow.propagator(0.0, t)
    }
}

fn rk4(y: Tensor2, h: f64, f: impl Fn(&Tensor2) -> Tensor2) -> Tensor2 {
    let k1 = f(&y);
    let k2 = f(&(y + k1.scale(0.5 * h)));
    let k3 = f(&(y + k2.scale(0.5 * h)));
    let k4 = f(&(y + k3.scale(h)));
    y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// `B(sᵢ, t_end)` with `t_end = steps·dt` from RK4 integration of
/// `B′ = B·κ + κᵀ·B` along each characteristic (quiescent history).
pub fn finger_evolution_oracle(
    flow: &HomogeneousFlow,
    we: f64,
    dt: f64,
    steps: usize,
    ages: &[f64],
) -> Vec<Tensor2> {
    let t_end = steps as f64 * dt;
    ages.iter()
        .map(|s| {
            let start = (t_end - we * s).max(0.0);
            let span = t_end - start;
            let n = (span / dt).ceil() as usize;
            let mut b = Tensor2::identity(flow.dim());
            if n == 0 {
                return b;
            }
            let h = span / n as f64;
            for k in 0..n {
                let kappa = flow.kappa_mid(start + k as f64 * h, h);
                b = rk4(b, h, |b| *b * kappa + kappa.transpose() * *b);
            }
            b
        })
        .collect()
}

/// Finger tensor of the exact field, for comparison with [`finger_evolution_oracle`].
pub fn exact_finger(flow: &HomogeneousFlow, we: f64, t: f64, s: f64) -> Tensor2 {
    let d = flow.dim();
    finger(&exact_homogeneous(flow, we, &|_| Tensor2::identity(d), t, s))
}

/// Which convected Maxwell model to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convected {
    /// `We(τ̇ − κᵀτ − τκ) + τ = ω(κ + κᵀ)`
    Upper,
    /// `We(τ̇ + τκᵀ + κτ) + τ = ω(κ + κᵀ)`
    Lower,
}

/// RK4 solution of the differential Maxwell model from `τ(0) = 0`, sampled at
/// `t = k·dt` for `k = 0..=steps`.
pub fn maxwell_ode(
    model: Convected,
    flow: &HomogeneousFlow,
    we: f64,
    omega: f64,
    dt: f64,
    steps: usize,
) -> Vec<Tensor2> {
    let d = flow.dim();
    let mut tau = Tensor2::zeros(d);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(tau);
    for k in 0..steps {
        let kappa = flow.kappa_mid(k as f64 * dt, dt);
        let kt = kappa.transpose();
        let drive = (kappa + kt).scale(omega);
        tau = rk4(tau, dt, |tau| {
            let conv = match model {
                Convected::Upper => kt * *tau + *tau * kappa,
                Convected::Lower => -(*tau * kt + kappa * *tau),
            };
            conv + (drive - *tau).scale(1.0 / we)
        });
        out.push(tau);
    }
    out
}

/// UCM startup of steady shear from rest, integrated with RK4 at step `dt`.
pub fn ucm_stress_oracle(gamma_dot: f64, we: f64, omega: f64, t: f64) -> Tensor2 {
    let n = ((t / (1e-3 * we)).ceil() as usize).max(1);
    let flow = HomogeneousFlow::simple_shear(2, gamma_dot);
    *maxwell_ode(Convected::Upper, &flow, we, omega, t / n as f64, n)
        .last()
        .expect("non-empty")
}

/// Closed-form UCM startup stresses `(τ₁₁, τ₁₂, τ₂₂)` in simple shear.
pub fn ucm_startup_closed_form(gamma_dot: f64, we: f64, omega: f64, t: f64) -> (f64, f64, f64) {
    let x = t / we;
    let e = (-x).exp();
    let t12 = omega * gamma_dot * (1.0 - e);
    let t11 = 2.0 * omega * we * gamma_dot * gamma_dot * (1.0 - e * (1.0 + x));
    (t11, t12, 0.0)
}

/// Closed-form LCM startup stresses `(τ₁₁, τ₁₂, τ₂₂)` in simple shear.
pub fn lcm_startup_closed_form(gamma_dot: f64, we: f64, omega: f64, t: f64) -> (f64, f64, f64) {
    let (_, t12, _) = ucm_startup_closed_form(gamma_dot, we, omega, t);
    let (n1, _, _) = ucm_startup_closed_form(gamma_dot, we, omega, t);
    (0.0, t12, -n1)
}
