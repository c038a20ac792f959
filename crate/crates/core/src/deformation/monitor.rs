//! Discrete norm proxies of the deformation field and their exponential bound
//! `ζ·exp(3C₀∫‖∇u‖dt)`.

use super::{AgeTimeField, Layout};

/// Relative slack before a proxy counts as crossing its bound.
pub const MONITOR_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonitorRecord {
    pub t: f64,
    /// `max over ages of ‖G(s, ·)‖_p`
    pub g_proxy: f64,
    /// `max over ages of ‖∇G(s, ·)‖_p`
    pub grad_proxy: f64,
    pub bound: f64,
    pub crossed: bool,
}

#[derive(Clone, Debug)]
pub struct NormMonitor {
    pub p: f64,
    pub c0: f64,
    zeta: f64,
    integral: f64,
    records: Vec<MonitorRecord>,
}

fn lp_over_cells(layout: &Layout, n_cells: usize, p: f64, norm_of: impl Fn(usize) -> f64) -> f64 {
    let area = match layout {
        Layout::Homogeneous => 1.0,
        Layout::Profile { ny, height } => height / *ny as f64,
        Layout::Channel(m) => m.cell_area(),
    };
    let sum: f64 = (0..n_cells).map(|c| norm_of(c).powf(p)).sum();
    (sum * area).powf(1.0 / p)
}

/// `(G proxy, ∇G proxy)` of a field.
pub fn proxies(field: &AgeTimeField, p: f64) -> (f64, f64) {
    let n_cells = field.n_cells();
    let n_ages = field.n_ages();
    let layout = field.layout();
    let mut g_max: f64 = 0.0;
    for a in 0..n_ages {
        g_max = g_max.max(lp_over_cells(layout, n_cells, p, |c| field.get(c, a).norm()));
    }
    let grad_max = match layout {
        Layout::Homogeneous => 0.0,
        Layout::Profile { .. } | Layout::Channel(_) => {
            let grad = field.spatial_gradient();
            let mut m: f64 = 0.0;
            for a in 0..n_ages {
                m = m.max(lp_over_cells(layout, n_cells, p, |c| grad[c * n_ages + a].norm()));
            }
            m
        }
    };
    (g_max, grad_max)
}

impl NormMonitor {
    /// Starts the bound at the larger of the initial field proxy and the
    /// proxy of the boundary value `δ`.
    pub fn new(field: &AgeTimeField, p: f64, c0: f64) -> Self {
        let (g0, grad0) = proxies(field, p);
        let boundary = lp_over_cells(field.layout(), field.n_cells(), p, |_| {
            (field.dim() as f64).sqrt()
        });
        let zeta = g0.max(boundary);
        NormMonitor {
            p,
            c0,
            zeta,
            integral: 0.0,
            records: vec![MonitorRecord {
                t: field.time(),
                g_proxy: g0,
                grad_proxy: grad0,
                bound: zeta,
                crossed: g0 > zeta * (1.0 + MONITOR_SLACK),
            }],
        }
    }

    pub fn records(&self) -> &[MonitorRecord] {
        &self.records
    }

    pub fn any_crossing(&self) -> bool {
        self.records.iter().any(|r| r.crossed)
    }

    pub fn latest(&self) -> &MonitorRecord {
        self.records.last().expect("monitor has an initial record")
    }
}

/// Advances the bound by `grad_u_norm·dt` and records the field's proxies.
pub fn norm_monitor_update(field: &AgeTimeField, grad_u_norm: f64, dt: f64, monitor: &mut NormMonitor) {
    monitor.integral += grad_u_norm * dt;
    let bound = monitor.zeta * (3.0 * monitor.c0 * monitor.integral).exp();
    let (g, grad) = proxies(field, monitor.p);
    let crossed = g > bound * (1.0 + MONITOR_SLACK);
    if crossed {
        log::warn!("deformation norm proxy {g:e} exceeds bound {bound:e} at t = {}", field.time());
    }
    monitor.records.push(MonitorRecord {
        t: field.time(),
        g_proxy: g,
        grad_proxy: grad,
        bound,
        crossed,
    });
}
