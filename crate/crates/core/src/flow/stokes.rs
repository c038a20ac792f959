//! One implicit step of the unsteady Stokes problem
//! `Re·∂ₜu + ∇p − (1−ω)Δu = g`, `div u = 0` by incremental pressure correction.

use super::fft_solvers::{ChannelHelmholtz, YOperator};
use super::mac::MacVelocity;
use crate::error::{Error, Result};
use crate::mesh::ChannelMesh;

/// Cached direct solvers for the three staggered variables of one mesh.
#[derive(Debug)]
pub struct StokesSolver {
    mesh: ChannelMesh,
    u_solver: ChannelHelmholtz,
    v_solver: ChannelHelmholtz,
    p_solver: ChannelHelmholtz,
}

impl StokesSolver {
    pub fn new(mesh: ChannelMesh) -> Self {
        let (nx, ny) = (mesh.nx, mesh.ny);
        let (dx, dy) = (mesh.dx(), mesh.dy());
        StokesSolver {
            mesh,
            u_solver: ChannelHelmholtz::new(nx, dx, YOperator::wall_parallel(ny, dy)),
            v_solver: ChannelHelmholtz::new(nx, dx, YOperator::dirichlet(ny - 1, dy)),
            p_solver: ChannelHelmholtz::new(nx, dx, YOperator::neumann(ny, dy)),
        }
    }

    pub fn mesh(&self) -> &ChannelMesh {
        &self.mesh
    }

    /// Advances `(uⁿ, pⁿ)` by `dt` with the source `g = (g_u, g_v)` given on the
    /// u-faces and v-faces. `walls` are the tangential wall speeds at the new time.
    pub fn step(
        &self,
        u: &MacVelocity,
        p: &[f64],
        g: (&[f64], &[f64]),
        re: f64,
        nu: f64,
        dt: f64,
        walls: (f64, f64),
    ) -> Result<(MacVelocity, Vec<f64>)> {
        if !(re > 0.0 && re.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "transient Stokes steps need Re > 0, got {re}"
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        let m = &self.mesh;
        let (nx, ny) = (m.nx, m.ny);
        let (dx, dy) = (m.dx(), m.dy());
        let alpha = re / dt;
        let xm = |i: usize| (i + nx - 1) % nx;

        let mut ru = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                ru[k] = alpha * u.u[k] + g.0[k] - (p[k] - p[j * nx + xm(i)]) / dx;
            }
        }
        let wall_term = nu * 8.0 / 3.0 / (dy * dy);
        for i in 0..nx {
            ru[i] += wall_term * walls.0;
            ru[(ny - 1) * nx + i] += wall_term * walls.1;
        }
        self.u_solver.solve(alpha, nu, &mut ru)?;

        let mut rv = vec![0.0; nx * (ny - 1)];
        for j in 1..ny {
            for i in 0..nx {
                let k = j * nx + i;
                rv[(j - 1) * nx + i] =
                    alpha * u.v[k] + g.1[k] - (p[k] - p[(j - 1) * nx + i]) / dy;
            }
        }
        self.v_solver.solve(alpha, nu, &mut rv)?;

        let mut star = MacVelocity::zeros(*m, walls);
        star.u = ru;
        star.v[nx..nx * ny].copy_from_slice(&rv);

        let mut phi: Vec<f64> = star.divergence().iter().map(|d| alpha * d).collect();
        self.p_solver.solve(0.0, -1.0, &mut phi)?;

        let mut next = star;
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                next.u[k] -= (phi[k] - phi[j * nx + xm(i)]) / (dx * alpha);
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let k = j * nx + i;
                next.v[k] -= (phi[k] - phi[(j - 1) * nx + i]) / (dy * alpha);
            }
        }
        let mut p_next: Vec<f64> = p.iter().zip(&phi).map(|(a, b)| a + b).collect();
        let mean = p_next.iter().sum::<f64>() / p_next.len() as f64;
        p_next.iter_mut().for_each(|v| *v -= mean);
        if !next.is_finite() {
            return Err(Error::LinearSolveFailure("Stokes step produced non-finite velocity".into()));
        }
        Ok((next, p_next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rest_stays_at_rest() {
        let mesh = ChannelMesh::new(8, 6, 1.0, 1.0).unwrap();
        let s = StokesSolver::new(mesh);
        let u = MacVelocity::zeros(mesh, (0.0, 0.0));
        let p = vec![0.0; mesh.n_cells()];
        let gu = vec![0.0; u.u.len()];
        let gv = vec![0.0; u.v.len()];
        let (next, pn) = s.step(&u, &p, (&gu, &gv), 1.0, 0.9, 0.1, (0.0, 0.0)).unwrap();
        assert!(next.u.iter().chain(&next.v).chain(&pn).all(|x| *x == 0.0));
    }

    #[test]
    fn poiseuille_steady_profile() {
        let mesh = ChannelMesh::new(4, 16, 1.0, 1.0).unwrap();
        let s = StokesSolver::new(mesh);
        let (nu, f) = (0.9, 0.3);
        let mut u = MacVelocity::zeros(mesh, (0.0, 0.0));
        let mut p = vec![0.0; mesh.n_cells()];
        let gu = vec![f; u.u.len()];
        let gv = vec![0.0; u.v.len()];
        for _ in 0..400 {
            (u, p) = s.step(&u, &p, (&gu, &gv), 1.0, nu, 0.05, (0.0, 0.0)).unwrap();
            assert!(u.max_divergence() < 1e-10);
        }
        for j in 0..mesh.ny {
            let y = (j as f64 + 0.5) * mesh.dy();
            let want = f * y * (1.0 - y) / (2.0 * nu);
            assert!((u.ui(1, j) - want).abs() < 1e-6, "{} vs {want}", u.ui(1, j));
        }
    }

    #[test]
    fn couette_steady_profile() {
        let mesh = ChannelMesh::new(4, 10, 2.0, 1.0).unwrap();
        let s = StokesSolver::new(mesh);
        let mut u = MacVelocity::zeros(mesh, (0.0, 1.5));
        let mut p = vec![0.0; mesh.n_cells()];
        let gu = vec![0.0; u.u.len()];
        let gv = vec![0.0; u.v.len()];
        for _ in 0..400 {
            (u, p) = s.step(&u, &p, (&gu, &gv), 1.0, 1.0, 0.05, (0.0, 1.5)).unwrap();
        }
        for j in 0..mesh.ny {
            let y = (j as f64 + 0.5) * mesh.dy();
            assert!((u.ui(0, j) - 1.5 * y).abs() < 1e-8);
        }
    }

    /// Steady manufactured solution from the stream function `sin(kx)·(y(1−y))²`.
    fn manufactured_error(n: usize) -> f64 {
        let (len, nu) = (1.0, 0.8);
        let k = 2.0 * PI / len;
        let mesh = ChannelMesh::new(n, n, len, 1.0).unwrap();
        let s = StokesSolver::new(mesh);
        let yy = |y: f64| y * (1.0 - y);
        let yp = |y: f64| 1.0 - 2.0 * y;
        let u_ex = |x: f64, y: f64| (k * x).sin() * 2.0 * yy(y) * yp(y);
        let v_ex = |x: f64, y: f64| -k * (k * x).cos() * yy(y).powi(2);
        let gu_ex = |x: f64, y: f64| {
            let sx = (k * x).sin();
            let uxx = -k * k * sx * 2.0 * yy(y) * yp(y);
            let uyy = sx * (-12.0 * yp(y));
            -nu * (uxx + uyy) - k * sx * y
        };
        let gv_ex = |x: f64, y: f64| {
            let cx = (k * x).cos();
            let vxx = k.powi(3) * cx * yy(y).powi(2);
            let vyy = -k * cx * 2.0 * (yp(y).powi(2) - 2.0 * yy(y));
            -nu * (vxx + vyy) + cx
        };
        let (dx, dy) = (mesh.dx(), mesh.dy());
        let mut gu = vec![0.0; n * n];
        let mut gv = vec![0.0; n * (n + 1)];
        for j in 0..n {
            for i in 0..n {
                gu[j * n + i] = gu_ex(i as f64 * dx, (j as f64 + 0.5) * dy);
            }
        }
        for j in 1..n {
            for i in 0..n {
                gv[j * n + i] = gv_ex((i as f64 + 0.5) * dx, j as f64 * dy);
            }
        }
        let mut u = MacVelocity::zeros(mesh, (0.0, 0.0));
        let mut p = vec![0.0; n * n];
        for _ in 0..5000 {
            let (next, pn) = s.step(&u, &p, (&gu, &gv), 1.0, nu, 0.5, (0.0, 0.0)).unwrap();
            let change = next.max_abs_diff(&u);
            (u, p) = (next, pn);
            if change < 1e-13 {
                break;
            }
        }
        let mut err = 0.0;
        for j in 0..n {
            for i in 0..n {
                let e = u.ui(i, j) - u_ex(i as f64 * dx, (j as f64 + 0.5) * dy);
                err += e * e;
            }
        }
        for j in 1..n {
            for i in 0..n {
                let e = u.vi(i, j) - v_ex((i as f64 + 0.5) * dx, j as f64 * dy);
                err += e * e;
            }
        }
        (err * dx * dy).sqrt()
    }

    #[test]
    fn manufactured_spatial_order() {
        let e: Vec<f64> = [16, 32, 64].iter().map(|n| manufactured_error(*n)).collect();
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "errors {e:?}, order {order}");
        }
    }
}
