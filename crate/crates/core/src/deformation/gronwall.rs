//! Numerical check of the two-variable Gronwall bound for
//! `∂ₜy + (1/We)∂ₛy = f(t)·y`.
//!
//! With `ζ(s, t) = y0_age(s − t/We)` for `t ≤ We·s` and `y0_time(t − We·s)`
//! otherwise, the equality case is `y = ζ·exp(∫_{t₀}^t f)` where `t₀` is the
//! time the characteristic left its data, and the bound is `y ≤ ζ·exp(∫₀ᵗ f)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallMesh {
    pub we: f64,
    pub dt: f64,
    pub t_end: f64,
    pub s_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallReport {
    /// `max |y − ζ e^{∫f}| / (ζ e^{∫f})` over the final time slice.
    pub max_equality_error: f64,
    /// `max (y − ζ e^{∫₀ᵗ f}) / (ζ e^{∫₀ᵗ f})`, negative when the bound holds strictly.
    pub max_bound_excess: f64,
    pub nodes: usize,
    pub steps: usize,
}

/// Simpson integral of `f` over `[a, b]` with `n` (even) panels.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Marches `y` on the matched mesh `Δs = Δt/We`: each step shifts every node one
/// age cell along its characteristic and applies an RK4 step of `y′ = f(t)y`.
/// Returns the comparison against the equality case and the bound at `t_end`.
pub fn gronwall_validate(
    f: &dyn Fn(f64) -> f64,
    y0_age: &dyn Fn(f64) -> f64,
    y0_time: &dyn Fn(f64) -> f64,
    mesh: &GronwallMesh,
    tol: f64,
) -> Result<GronwallReport> {
    let GronwallMesh {
        we,
        dt,
        t_end,
        s_end,
    } = *mesh;
    if !(we > 0.0 && dt > 0.0 && t_end > 0.0 && s_end > 0.0) {
        return Err(Error::InvalidParams("Gronwall mesh values must be positive".into()));
    }
    let ds = dt / we;
    let n_age = (s_end / ds).round() as usize + 1;
    let steps = (t_end / dt).round() as usize;
    let mut y: Vec<f64> = (0..n_age).map(|i| y0_age(i as f64 * ds)).collect();
    let mut next = vec![0.0; n_age];
    for n in 0..steps {
        let t = n as f64 * dt;
        let (f0, fh, f1) = (f(t), f(t + 0.5 * dt), f(t + dt));
        // RK4 amplification for the linear scalar ODE
        let k1 = f0;
        let k2 = fh * (1.0 + 0.5 * dt * k1);
        let k3 = fh * (1.0 + 0.5 * dt * k2);
        let k4 = f1 * (1.0 + dt * k3);
        let amp = 1.0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        next[0] = y0_time(t + dt);
        for i in 1..n_age {
            next[i] = y[i - 1] * amp;
        }
        std::mem::swap(&mut y, &mut next);
    }

    let t = steps as f64 * dt;
    let fine = 20_000;
    let full = simpson(f, 0.0, t, fine);
    let mut report = GronwallReport {
        max_equality_error: 0.0,
        max_bound_excess: f64::NEG_INFINITY,
        nodes: n_age,
        steps,
    };
    for (i, yi) in y.iter().enumerate() {
        let s = i as f64 * ds;
        let (zeta, t0) = if t <= we * s {
            (y0_age(s - t / we), 0.0)
        } else {
            (y0_time(t - we * s), t - we * s)
        };
        let exact = zeta * simpson(f, t0, t, fine).exp();
        let bound = zeta * full.exp();
        let scale = exact.abs().max(f64::MIN_POSITIVE);
        report.max_equality_error = report.max_equality_error.max((yi - exact).abs() / scale);
        let excess = (yi - bound) / bound.abs().max(f64::MIN_POSITIVE);
        report.max_bound_excess = report.max_bound_excess.max(excess);
    }
    if report.max_bound_excess > tol {
        return Err(Error::BoundViolated {
            what: "Gronwall".into(),
            ratio: 1.0 + report.max_bound_excess,
            witness: None,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh(we: f64) -> GronwallMesh {
        GronwallMesh {
            we,
            dt: 1e-3,
            t_end: 2.0,
            s_end: 3.0,
        }
    }

    #[test]
    fn pure_transport_reproduces_data() {
        let r = gronwall_validate(
            &|_| 0.0,
            &|s| 1.0 + s * s,
            &|t| 1.0 + t,
            &mesh(1.0),
            1e-9,
        )
        .unwrap();
        assert!(r.max_equality_error < 1e-12);
        assert!(r.max_bound_excess <= 1e-12);
    }

    #[test]
    fn constant_rate() {
        let r = gronwall_validate(&|_| 1.0, &|_| 1.0, &|_| 1.0, &mesh(1.0), 1e-9).unwrap();
        assert!(r.max_equality_error < 1e-6, "{r:?}");
        assert!(r.max_bound_excess <= 0.0 + 1e-9);
    }

    #[test]
    fn linear_rate() {
        let r = gronwall_validate(&|t| t, &|_| 1.0, &|_| 1.0, &mesh(0.5), 1e-9).unwrap();
        assert!(r.max_equality_error < 1e-6, "{r:?}");
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(&|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
