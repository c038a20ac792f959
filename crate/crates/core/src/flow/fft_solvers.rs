//! Direct solvers for `(α − βΔ)φ = r` on a channel: FFT along the periodic x
//! direction and a tridiagonal (Thomas) solve in y for each wavenumber.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Second-difference operator in y for one staggered variable, scaled by `1/h²`.
#[derive(Clone, Debug)]
pub struct YOperator {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl YOperator {
    /// Velocity parallel to the walls at cell-centre rows, Dirichlet wall
    /// values imposed through the quadratic ghost `u₋₁ = (8u_w − 6u₀ + u₁)/3`.
    pub fn wall_parallel(rows: usize, h: f64) -> Self {
        let mut op = Self::interior(rows, h);
        let s = 1.0 / (h * h);
        op.diag[0] = -4.0 * s;
        op.sup[0] = 4.0 / 3.0 * s;
        op.diag[rows - 1] = -4.0 * s;
        op.sub[rows - 1] = 4.0 / 3.0 * s;
        op
    }

    /// Unknowns strictly between two rows with zero Dirichlet values.
    pub fn dirichlet(rows: usize, h: f64) -> Self {
        Self::interior(rows, h)
    }

    /// Cell-centred rows with homogeneous Neumann walls.
    pub fn neumann(rows: usize, h: f64) -> Self {
        let mut op = Self::interior(rows, h);
        let s = 1.0 / (h * h);
        op.diag[0] = -s;
        op.diag[rows - 1] = -s;
        op
    }

    fn interior(rows: usize, h: f64) -> Self {
        let s = 1.0 / (h * h);
        let mut sub = vec![s; rows];
        let mut sup = vec![s; rows];
        sub[0] = 0.0;
        sup[rows - 1] = 0.0;
        YOperator {
            sub,
            diag: vec![-2.0 * s; rows],
            sup,
        }
    }

    pub fn rows(&self) -> usize {
        self.diag.len()
    }
}

/// Reusable solver for one staggered variable.
pub struct ChannelHelmholtz {
    nx: usize,
    op: YOperator,
    lambda_x: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ChannelHelmholtz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChannelHelmholtz")
            .field("nx", &self.nx)
            .field("rows", &self.op.rows())
            .finish()
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [Complex64], work: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::LinearSolveFailure("zero pivot in tridiagonal solve".into()));
    }
    rhs[0] /= beta;
    for j in 1..n {
        work[j] = sup[j - 1] / beta;
        beta = diag[j] - sub[j] * work[j];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::LinearSolveFailure("zero pivot in tridiagonal solve".into()));
        }
        let prev = rhs[j - 1];
        rhs[j] = (rhs[j] - prev * sub[j]) / beta;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= next * work[j + 1];
    }
    Ok(())
}

impl ChannelHelmholtz {
    pub fn new(nx: usize, dx: f64, op: YOperator) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(nx);
        let inverse = planner.plan_fft_inverse(nx);
        let lambda_x = (0..nx)
            .map(|k| {
                let s = (std::f64::consts::PI * k as f64 / nx as f64).sin();
                -4.0 * s * s / (dx * dx)
            })
            .collect();
        ChannelHelmholtz {
            nx,
            op,
            lambda_x,
            forward,
            inverse,
        }
    }

    /// Solves `(α − βΔ)φ = rhs` in place; `rhs` is row-major `rows × nx`.
    ///
    /// With `α = 0` the zero wavenumber is singular (pure Neumann Poisson); it is
    /// solved with `φ = 0` in the first row and the result is shifted to zero mean.
    pub fn solve(&self, alpha: f64, beta: f64, rhs: &mut [f64]) -> Result<()> {
        let nx = self.nx;
        let rows = self.op.rows();
        if rhs.len() != nx * rows {
            return Err(Error::LinearSolveFailure(format!(
                "right-hand side has {} entries, expected {}",
                rhs.len(),
                nx * rows
            )));
        }
        let mut spec: Vec<Complex64> = rhs.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        for row in spec.chunks_mut(nx) {
            self.forward.process(row);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        let mut sub = vec![0.0; rows];
        let mut diag = vec![0.0; rows];
        let mut sup = vec![0.0; rows];
        let mut work = vec![0.0; rows];
        let singular_mean = alpha == 0.0;
        for k in 0..nx {
            for j in 0..rows {
                column[j] = spec[j * nx + k];
                sub[j] = -beta * self.op.sub[j];
                sup[j] = -beta * self.op.sup[j];
                diag[j] = alpha - beta * (self.lambda_x[k] + self.op.diag[j]);
            }
            if singular_mean && k == 0 {
                diag[0] = 1.0;
                sup[0] = 0.0;
                column[0] = Complex64::new(0.0, 0.0);
            }
            thomas(&sub, &diag, &sup, &mut column, &mut work)?;
            for j in 0..rows {
                spec[j * nx + k] = column[j];
            }
        }
        for row in spec.chunks_mut(nx) {
            self.inverse.process(row);
        }
        let norm = 1.0 / nx as f64;
        for (out, c) in rhs.iter_mut().zip(&spec) {
            *out = c.re * norm;
        }
        if singular_mean {
            let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
            rhs.iter_mut().for_each(|v| *v -= mean);
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolveFailure("non-finite solution".into()));
        }
        Ok(())
    }
}
