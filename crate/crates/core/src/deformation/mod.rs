//! Age-structured deformation field `G(s, t, x)` and its semi-Lagrangian
//! transport `∂ₜG + (1/We)∂ₛG + u·∇G = G·∇u`, `G|ₛ₌₀ = δ`.
//!
//! Velocity gradients follow `(∇u)ᵢⱼ = ∂uⱼ/∂xᵢ`, so simple shear `u₁ = γ̇x₂`
//! has `κ = ∇u = γ̇E₂₁` and `G = δ + We·s·γ̇E₂₁` in steady state.

pub mod checkpoint;
pub mod exact;
pub mod gronwall;
pub mod monitor;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::AgeGrid;
use crate::mesh::ChannelMesh;
use crate::tensor::{tensor_exp, Tensor2, Tensor3};

pub use exact::HomogeneousFlow;

/// Determinant drift that triggers a warning.
pub const DET_DRIFT_WARN: f64 = 1e-5;
/// Determinant drift that aborts a run.
pub const DET_DRIFT_ABORT: f64 = 1e-2;
pub const DEFAULT_CFL: f64 = 0.9;

/// Fractional positions closer than this to a node snap onto it.
const SNAP: f64 = 1e-9;

/// Nodes per parallel work item in transport and assembly.
const TRANSPORT_CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    /// A single spatially uniform column.
    Homogeneous,
    /// `ny` x-independent cells stacked between walls at `y = 0` and `y = height`.
    Profile { ny: usize, height: f64 },
    Channel(ChannelMesh),
}

impl Layout {
    pub fn n_cells(&self) -> usize {
        match self {
            Layout::Homogeneous => 1,
            Layout::Profile { ny, .. } => *ny,
            Layout::Channel(m) => m.n_cells(),
        }
    }
}

/// `G` at every (spatial cell, age node), stored cell-major.
#[derive(Clone, Debug)]
pub struct AgeTimeField {
    grid: Arc<AgeGrid>,
    layout: Layout,
    d: usize,
    we: f64,
    t: f64,
    values: Vec<Tensor2>,
}

/// A velocity field that can be sampled anywhere in the domain.
pub trait VelocityField: Sync {
    fn velocity(&self, x: f64, y: f64) -> [f64; 2];
    fn max_speed(&self) -> f64;
}

/// Inputs of one transport step.
pub struct TransportStep<'a> {
    /// Velocity at the middle of the step; `None` for homogeneous layouts.
    pub velocity: Option<&'a dyn VelocityField>,
    /// `∇u` per cell at the middle of the step.
    pub kappa: &'a [Tensor2],
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    pub cfl: f64,
    /// Rescale `G ← G/|det G|^{1/d}` after each step.
    pub renormalize: bool,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions {
            cfl: DEFAULT_CFL,
            renormalize: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TransportStats {
    /// `max |det G − 1|` over all nodes after the step.
    pub det_drift: f64,
}

impl AgeTimeField {
    /// Field initialised to `g_old(sᵢ)` in every cell.
    pub fn new(
        grid: Arc<AgeGrid>,
        layout: Layout,
        d: usize,
        we: f64,
        g_old: impl Fn(f64) -> Tensor2,
    ) -> Result<Self> {
        if !(we > 0.0 && we.is_finite()) {
            return Err(Error::InvalidParams(format!("We must be positive, got {we}")));
        }
        if !matches!(layout, Layout::Homogeneous) && d != 2 {
            return Err(Error::InvalidParams("channel layouts are two-dimensional".into()));
        }
        let column: Vec<Tensor2> = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, s)| if i == 0 { Tensor2::identity(d) } else { g_old(*s) })
            .collect();
        if column.iter().any(|g| g.dim() != d || !g.is_finite()) {
            return Err(Error::InvalidParams("initial deformation has wrong shape".into()));
        }
        let n_cells = layout.n_cells();
        let mut values = Vec::with_capacity(n_cells * column.len());
        for _ in 0..n_cells {
            values.extend_from_slice(&column);
        }
        Ok(AgeTimeField {
            grid,
            layout,
            d,
            we,
            t: 0.0,
            values,
        })
    }

    /// Quiescent history `G_old ≡ δ`.
    pub fn at_rest(grid: Arc<AgeGrid>, layout: Layout, d: usize, we: f64) -> Result<Self> {
        Self::new(grid, layout, d, we, |_| Tensor2::identity(d))
    }

    /// Builds a field from explicit values (cell-major).
    pub fn from_values(
        grid: Arc<AgeGrid>,
        layout: Layout,
        we: f64,
        t: f64,
        values: Vec<Tensor2>,
    ) -> Result<Self> {
        let n = layout.n_cells() * grid.len();
        if values.len() != n {
            return Err(Error::GridMismatch {
                samples: values.len(),
                nodes: n,
            });
        }
        let d = values[0].dim();
        Ok(AgeTimeField {
            grid,
            layout,
            d,
            we,
            t,
            values,
        })
    }

    pub fn grid(&self) -> &AgeGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<AgeGrid> {
        Arc::clone(&self.grid)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn we(&self) -> f64 {
        self.we
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn n_cells(&self) -> usize {
        self.layout.n_cells()
    }

    pub fn n_ages(&self) -> usize {
        self.grid.len()
    }

    pub fn values(&self) -> &[Tensor2] {
        &self.values
    }

    /// Age column of one cell.
    pub fn column(&self, cell: usize) -> &[Tensor2] {
        let n = self.n_ages();
        &self.values[cell * n..(cell + 1) * n]
    }

    pub fn get(&self, cell: usize, age: usize) -> Tensor2 {
        self.values[cell * self.n_ages() + age]
    }

    /// `G` at a fractional age position in one cell.
    fn age_interp(&self, cell: usize, i: usize, theta: f64) -> Tensor2 {
        let col = self.column(cell);
        if theta == 0.0 {
            col[i]
        } else if theta == 1.0 {
            col[i + 1]
        } else {
            col[i].scale(1.0 - theta) + col[i + 1].scale(theta)
        }
    }

    /// `max |det G − 1|` over all nodes.
    pub fn det_drift(&self) -> f64 {
        self.values
            .par_iter()
            .map(|g| (g.det() - 1.0).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// Spatial gradient `(∇G)_ijk = ∂ᵢG_jk` at every node: centred differences,
    /// periodic in x, one-sided next to the walls. Zero for homogeneous layouts;
    /// profiles only vary in y.
    pub fn spatial_gradient(&self) -> Vec<Tensor3> {
        let n_ages = self.n_ages();
        let d = self.d;
        match &self.layout {
            Layout::Homogeneous => vec![Tensor3::zeros(d); self.values.len()],
            Layout::Profile { ny, height } => {
                let (ny, dy) = (*ny, height / *ny as f64);
                let mut out = vec![Tensor3::zeros(d); self.values.len()];
                out.par_chunks_mut(n_ages).enumerate().for_each(|(j, col)| {
                    let (ym, yp, hy) = if j == 0 {
                        (0, 1, dy)
                    } else if j == ny - 1 {
                        (j - 1, j, dy)
                    } else {
                        (j - 1, j + 1, 2.0 * dy)
                    };
                    for (a, slot) in col.iter_mut().enumerate() {
                        let gy = (self.get(yp, a) - self.get(ym, a)).scale(1.0 / hy);
                        slot.set_component(1, &gy);
                    }
                });
                out
            }
            Layout::Channel(mesh) => {
                let mut out = vec![Tensor3::zeros(d); self.values.len()];
                out.par_chunks_mut(n_ages).enumerate().for_each(|(c, col)| {
                    let (i, j) = mesh.cell_ij(c);
                    let xp = mesh.cell((i + 1) % mesh.nx, j);
                    let xm = mesh.cell((i + mesh.nx - 1) % mesh.nx, j);
                    let (ym, yp, hy) = if j == 0 {
                        (c, mesh.cell(i, 1), mesh.dy())
                    } else if j == mesh.ny - 1 {
                        (mesh.cell(i, j - 1), c, mesh.dy())
                    } else {
                        (mesh.cell(i, j - 1), mesh.cell(i, j + 1), 2.0 * mesh.dy())
                    };
                    let hx = 2.0 * mesh.dx();
                    for (a, slot) in col.iter_mut().enumerate() {
                        let gx = (self.get(xp, a) - self.get(xm, a)).scale(1.0 / hx);
                        let gy = (self.get(yp, a) - self.get(ym, a)).scale(1.0 / hy);
                        slot.set_component(0, &gx);
                        slot.set_component(1, &gy);
                    }
                });
                out
            }
        }
    }

    /// Replaces every entry with `f(cell, age, s)`.
    pub fn fill(&mut self, f: impl Fn(usize, usize, f64) -> Tensor2 + Sync) {
        let n_ages = self.n_ages();
        let nodes = self.grid.nodes();
        self.values
            .par_chunks_mut(n_ages)
            .enumerate()
            .for_each(|(c, col)| {
                for (a, g) in col.iter_mut().enumerate() {
                    *g = f(c, a, nodes[a]);
                }
            });
    }

    pub fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

/// Bilinear interpolation of a per-cell tensor field.
fn interp_cells(mesh: &ChannelMesh, field: &[Tensor2], x: f64, y: f64) -> Tensor2 {
    let mut out = Tensor2::zeros(field[0].dim());
    for (c, w) in mesh.bilinear(x, y) {
        if w != 0.0 {
            out += field[c].scale(w);
        }
    }
    out
}

/// Foot of the age characteristic: node index and fraction, or `None` when the
/// characteristic was born at `s = 0` during the step.
fn age_foot(grid: &AgeGrid, s: f64, shift: f64) -> Option<(usize, f64)> {
    let foot = s - shift;
    if foot < -SNAP * shift.max(1e-300) {
        return None;
    }
    let (mut i, mut theta) = grid.locate(foot.max(0.0))?;
    if theta < SNAP {
        theta = 0.0;
    } else if theta > 1.0 - SNAP {
        i += 1;
        theta = 0.0;
    }
    Some((i, theta))
}

/// One semi-Lagrangian step of the deformation field.
///
/// Each node traces its characteristic back by `dt` in time, `dt/We` in age and
/// a midpoint-rule path in space, interpolates `G` at the foot (linear in age,
/// bilinear in space) and multiplies by `exp(dt·κ)` with `κ` sampled at the
/// path midpoint. Nodes younger than `dt/We` start from `δ` inside the step and
/// receive `exp(We·s·κ)` directly.
pub fn step_transport(
    field: &AgeTimeField,
    step: &TransportStep<'_>,
    opts: &TransportOptions,
) -> Result<(AgeTimeField, TransportStats)> {
    let dt = step.dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
    }
    let n_cells = field.n_cells();
    if step.kappa.len() != n_cells {
        return Err(Error::GridMismatch {
            samples: step.kappa.len(),
            nodes: n_cells,
        });
    }
    let d = field.d;
    let we = field.we;
    let shift = dt / we;
    let grid = field.grid();
    let nodes = grid.nodes();
    let n_ages = grid.len();

    // spatial foot and midpoint per cell
    let paths: Vec<Option<((f64, f64), Tensor2)>> = match (&field.layout, step.velocity) {
        // x-independent columns see no spatial advection from a parallel flow
        (Layout::Homogeneous | Layout::Profile { .. }, _) => vec![None],
        (Layout::Channel(mesh), Some(vel)) => {
            let umax = vel.max_speed();
            if umax > 0.0 {
                let limit = opts.cfl * mesh.dx().min(mesh.dy()) / umax;
                if dt > limit {
                    return Err(Error::CflViolation { dt, limit });
                }
            }
            (0..n_cells)
                .into_par_iter()
                .map(|c| {
                    let (x, y) = mesh.center(c);
                    let u = vel.velocity(x, y);
                    let (xh, yh) = mesh.wrap(x - 0.5 * dt * u[0], y - 0.5 * dt * u[1]);
                    let um = vel.velocity(xh, yh);
                    let (xm, ym) = mesh.wrap(x - 0.5 * dt * um[0], y - 0.5 * dt * um[1]);
                    let foot = mesh.wrap(x - dt * um[0], y - dt * um[1]);
                    let kappa = interp_cells(mesh, step.kappa, xm, ym);
                    Some((foot, kappa))
                })
                .collect()
        }
        (Layout::Channel(_), None) => {
            return Err(Error::InvalidFlow(
                "channel transport needs a velocity field".into(),
            ))
        }
    };

    let feet: Vec<Option<(usize, f64)>> = nodes.iter().map(|s| age_foot(grid, *s, shift)).collect();

    struct CellStep {
        kappa: Tensor2,
        source: Tensor2,
        weights: Option<[(usize, f64); 4]>,
    }
    let cells: Vec<CellStep> = (0..n_cells)
        .into_par_iter()
        .map(|c| {
            let (weights, kappa) = match (&field.layout, &paths[c.min(paths.len() - 1)]) {
                (Layout::Channel(mesh), Some(((x, y), k))) => (Some(mesh.bilinear(*x, *y)), *k),
                _ => (None, step.kappa[c]),
            };
            CellStep {
                kappa,
                source: tensor_exp(&kappa, dt),
                weights,
            }
        })
        .collect();

    // flat chunks keep single-column (homogeneous) fields parallel too
    let mut values = vec![Tensor2::zeros(d); field.values.len()];
    values
        .par_chunks_mut(TRANSPORT_CHUNK)
        .enumerate()
        .for_each(|(k, chunk)| {
            for (off, slot) in chunk.iter_mut().enumerate() {
                let idx = k * TRANSPORT_CHUNK + off;
                let (c, a) = (idx / n_ages, idx % n_ages);
                let cell = &cells[c];
                if a == 0 {
                    *slot = Tensor2::identity(d);
                    continue;
                }
                let mut g = match feet[a] {
                    None => tensor_exp(&cell.kappa, we * nodes[a]),
                    Some((i, theta)) => {
                        let g_foot = match &cell.weights {
                            None => field.age_interp(c, i, theta),
                            Some(ws) => {
                                let mut acc = Tensor2::zeros(d);
                                for (cc, w) in ws {
                                    if *w != 0.0 {
                                        acc += field.age_interp(*cc, i, theta).scale(*w);
                                    }
                                }
                                acc
                            }
                        };
                        g_foot * cell.source
                    }
                };
                if opts.renormalize {
                    let det = g.det();
                    if det > 0.0 {
                        g = g.scale(det.powf(-1.0 / d as f64));
                    }
                }
                *slot = g;
            }
        });

    let next = AgeTimeField {
        grid: Arc::clone(&field.grid),
        layout: field.layout.clone(),
        d,
        we,
        t: field.t + dt,
        values,
    };
    let det_drift = next.det_drift();
    if det_drift > DET_DRIFT_WARN {
        log::warn!("deformation determinant drift {det_drift:e} at t = {}", next.t);
    }
    Ok((next, TransportStats { det_drift }))
}
