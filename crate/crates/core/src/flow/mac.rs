//! Staggered (MAC) velocity storage and the explicit spatial operators.
//!
//! `u` lives on x-faces `(i·Δx, (j+½)Δy)` for `j < ny`; `v` lives on y-faces
//! `((i+½)Δx, j·Δy)` for `j ≤ ny`, with the wall rows `j = 0, ny` held at zero.

use crate::deformation::VelocityField;
use crate::mesh::ChannelMesh;
use crate::tensor::Tensor2;

#[derive(Clone, Debug, PartialEq)]
pub struct MacVelocity {
    pub mesh: ChannelMesh,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Tangential wall speeds `(bottom, top)`.
    pub walls: (f64, f64),
}

/// Second-order upwind derivative from five consecutive samples centred on `c`.
#[inline]
fn upwind2(m2: f64, m1: f64, c: f64, p1: f64, p2: f64, a: f64, h: f64) -> f64 {
    if a > 0.0 {
        (3.0 * c - 4.0 * m1 + m2) / (2.0 * h)
    } else if a < 0.0 {
        (-3.0 * c + 4.0 * p1 - p2) / (2.0 * h)
    } else {
        0.0
    }
}

impl MacVelocity {
    pub fn zeros(mesh: ChannelMesh, walls: (f64, f64)) -> Self {
        MacVelocity {
            mesh,
            u: vec![0.0; mesh.nx * mesh.ny],
            v: vec![0.0; mesh.nx * (mesh.ny + 1)],
            walls,
        }
    }

    #[inline]
    pub fn ui(&self, i: usize, j: usize) -> f64 {
        self.u[j * self.mesh.nx + i]
    }

    #[inline]
    pub fn vi(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.mesh.nx + i]
    }

    #[inline]
    fn xp(&self, i: usize, k: usize) -> usize {
        (i + k) % self.mesh.nx
    }

    #[inline]
    fn xm(&self, i: usize, k: usize) -> usize {
        (i + self.mesh.nx * 2 - k) % self.mesh.nx
    }

    /// `u` in row `j`, extended below/above the walls with the quadratic ghost.
    fn u_row(&self, i: usize, j: isize) -> f64 {
        let ny = self.mesh.ny as isize;
        if j >= 0 && j < ny {
            return self.ui(i, j as usize);
        }
        if j < 0 {
            let (w, u0, u1) = (self.walls.0, self.ui(i, 0), self.ui(i, 1));
            let g1 = (8.0 * w - 6.0 * u0 + u1) / 3.0;
            if j == -1 {
                g1
            } else {
                2.0 * w - u1
            }
        } else {
            let n = self.mesh.ny;
            let (w, u0, u1) = (self.walls.1, self.ui(i, n - 1), self.ui(i, n - 2));
            let g1 = (8.0 * w - 6.0 * u0 + u1) / 3.0;
            if j == ny {
                g1
            } else {
                2.0 * w - u1
            }
        }
    }

    /// `v` in row `j`, mirrored oddly through the walls.
    fn v_row(&self, i: usize, j: isize) -> f64 {
        let ny = self.mesh.ny as isize;
        if j < 0 {
            -self.vi(i, (-j) as usize)
        } else if j > ny {
            -self.vi(i, (2 * ny - j) as usize)
        } else {
            self.vi(i, j as usize)
        }
    }

    pub fn kinetic_energy(&self) -> f64 {
        let area = self.mesh.cell_area();
        let su: f64 = self.u.iter().map(|x| x * x).sum();
        let sv: f64 = self.v.iter().map(|x| x * x).sum();
        0.5 * (su + sv) * area
    }

    /// Discrete divergence per cell.
    pub fn divergence(&self) -> Vec<f64> {
        let m = &self.mesh;
        let mut out = vec![0.0; m.n_cells()];
        for j in 0..m.ny {
            for i in 0..m.nx {
                out[m.cell(i, j)] = (self.ui(self.xp(i, 1), j) - self.ui(i, j)) / m.dx()
                    + (self.vi(i, j + 1) - self.vi(i, j)) / m.dy();
            }
        }
        out
    }

    pub fn max_divergence(&self) -> f64 {
        self.divergence().iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let du = self.u.iter().zip(&other.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let dv = self.v.iter().zip(&other.v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        du.max(dv)
    }

    pub fn average(a: &Self, b: &Self) -> Self {
        MacVelocity {
            mesh: a.mesh,
            u: a.u.iter().zip(&b.u).map(|(x, y)| 0.5 * (x + y)).collect(),
            v: a.v.iter().zip(&b.v).map(|(x, y)| 0.5 * (x + y)).collect(),
            walls: (0.5 * (a.walls.0 + b.walls.0), 0.5 * (a.walls.1 + b.walls.1)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    /// `∇u` at cell centres, `(∇u)ᵢⱼ = ∂uⱼ/∂xᵢ`.
    pub fn grad_cells(&self) -> Vec<Tensor2> {
        let m = &self.mesh;
        let (dx, dy) = (m.dx(), m.dy());
        let mut out = vec![Tensor2::zeros(2); m.n_cells()];
        let ubar = |i: usize, j: isize| 0.5 * (self.u_row(i, j) + self.u_row(self.xp(i, 1), j));
        for j in 0..m.ny {
            for i in 0..m.nx {
                let mut k = Tensor2::zeros(2);
                k[(0, 0)] = (self.ui(self.xp(i, 1), j) - self.ui(i, j)) / dx;
                k[(1, 1)] = (self.vi(i, j + 1) - self.vi(i, j)) / dy;
                let jj = j as isize;
                k[(1, 0)] = if j == 0 {
                    (ubar(i, 1) / 3.0 + ubar(i, 0) - 4.0 / 3.0 * self.walls.0) / dy
                } else if j == m.ny - 1 {
                    -(ubar(i, jj - 1) / 3.0 + ubar(i, jj) - 4.0 / 3.0 * self.walls.1) / dy
                } else {
                    (ubar(i, jj + 1) - ubar(i, jj - 1)) / (2.0 * dy)
                };
                let vbar = |ii: usize| 0.5 * (self.vi(ii, j) + self.vi(ii, j + 1));
                k[(0, 1)] = (vbar(self.xp(i, 1)) - vbar(self.xm(i, 1))) / (2.0 * dx);
                out[m.cell(i, j)] = k;
            }
        }
        out
    }

    /// Convective term `(u·∇)u` on the u- and v-faces, second-order upwind.
    pub fn advection(&self) -> (Vec<f64>, Vec<f64>) {
        let m = &self.mesh;
        let (nx, ny) = (m.nx, m.ny);
        let (dx, dy) = (m.dx(), m.dy());
        let mut au = vec![0.0; nx * ny];
        let mut av = vec![0.0; nx * (ny + 1)];
        for j in 0..ny {
            let jj = j as isize;
            for i in 0..nx {
                let a = self.ui(i, j);
                let b = 0.25
                    * (self.vi(i, j) + self.vi(i, j + 1) + self.vi(self.xm(i, 1), j)
                        + self.vi(self.xm(i, 1), j + 1));
                let dudx = upwind2(
                    self.ui(self.xm(i, 2), j),
                    self.ui(self.xm(i, 1), j),
                    a,
                    self.ui(self.xp(i, 1), j),
                    self.ui(self.xp(i, 2), j),
                    a,
                    dx,
                );
                let dudy = upwind2(
                    self.u_row(i, jj - 2),
                    self.u_row(i, jj - 1),
                    a,
                    self.u_row(i, jj + 1),
                    self.u_row(i, jj + 2),
                    b,
                    dy,
                );
                au[j * nx + i] = a * dudx + b * dudy;
            }
        }
        for j in 1..ny {
            let jj = j as isize;
            for i in 0..nx {
                let b = self.vi(i, j);
                let a = 0.25
                    * (self.ui(i, j) + self.ui(self.xp(i, 1), j) + self.ui(i, j - 1)
                        + self.ui(self.xp(i, 1), j - 1));
                let dvdx = upwind2(
                    self.vi(self.xm(i, 2), j),
                    self.vi(self.xm(i, 1), j),
                    b,
                    self.vi(self.xp(i, 1), j),
                    self.vi(self.xp(i, 2), j),
                    a,
                    dx,
                );
                let dvdy = upwind2(
                    self.v_row(i, jj - 2),
                    self.v_row(i, jj - 1),
                    b,
                    self.v_row(i, jj + 1),
                    self.v_row(i, jj + 2),
                    b,
                    dy,
                );
                av[j * nx + i] = a * dvdx + b * dvdy;
            }
        }
        (au, av)
    }

    fn sample_u(&self, x: f64, y: f64) -> f64 {
        let m = &self.mesh;
        let fx = x / m.dx();
        let i0f = fx.floor();
        let tx = fx - i0f;
        let i0 = (i0f as i64).rem_euclid(m.nx as i64) as usize;
        let i1 = self.xp(i0, 1);
        // rows at (j+½)Δy plus wall values at y = 0 and y = H
        let fy = y / m.dy() - 0.5;
        let row = |i: usize, j: isize| -> (f64, f64) {
            if j < 0 {
                (self.walls.0, -0.5)
            } else if j >= m.ny as isize {
                (self.walls.1, m.ny as f64 - 0.5)
            } else {
                (self.ui(i, j as usize), j as f64)
            }
        };
        let j0 = fy.floor() as isize;
        let (lo, hi) = (j0.max(-1), (j0 + 1).min(m.ny as isize));
        let interp = |i: usize| {
            let (a, ya) = row(i, lo);
            let (b, yb) = row(i, hi);
            if yb == ya {
                a
            } else {
                let t = ((fy - ya) / (yb - ya)).clamp(0.0, 1.0);
                a + t * (b - a)
            }
        };
        (1.0 - tx) * interp(i0) + tx * interp(i1)
    }

    fn sample_v(&self, x: f64, y: f64) -> f64 {
        let m = &self.mesh;
        let fx = x / m.dx() - 0.5;
        let i0f = fx.floor();
        let tx = fx - i0f;
        let i0 = (i0f as i64).rem_euclid(m.nx as i64) as usize;
        let i1 = self.xp(i0, 1);
        let fy = (y / m.dy()).clamp(0.0, m.ny as f64);
        let j0 = (fy.floor() as usize).min(m.ny - 1);
        let ty = fy - j0 as f64;
        let col = |i: usize| (1.0 - ty) * self.vi(i, j0) + ty * self.vi(i, j0 + 1);
        (1.0 - tx) * col(i0) + tx * col(i1)
    }
}

impl VelocityField for MacVelocity {
    fn velocity(&self, x: f64, y: f64) -> [f64; 2] {
        [self.sample_u(x, y), self.sample_v(x, y)]
    }

    fn max_speed(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .chain([self.walls.0, self.walls.1].iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `div τ` on the u-faces (x component) and v-faces (y component) from
/// cell-centred stresses. Corner values of `τ_xy` are four-cell averages,
/// extrapolated linearly to the walls.
pub fn stress_divergence(mesh: &ChannelMesh, tau: &[Tensor2]) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (mesh.nx, mesh.ny);
    let (dx, dy) = (mesh.dx(), mesh.dy());
    let t = |i: usize, j: usize| &tau[mesh.cell(i % nx, j)];
    let xm = |i: usize| (i + nx - 1) % nx;
    // τ_xy at corner (i·Δx, j·Δy), j = 0..=ny
    let corner = |i: usize, j: usize| -> f64 {
        let avg = |jj: usize| 0.5 * (t(xm(i), jj)[(0, 1)] + t(i, jj)[(0, 1)]);
        if j == 0 {
            1.5 * avg(0) - 0.5 * avg(1)
        } else if j == ny {
            1.5 * avg(ny - 1) - 0.5 * avg(ny - 2)
        } else {
            0.5 * (avg(j - 1) + avg(j))
        }
    };
    let mut fu = vec![0.0; nx * ny];
    let mut fv = vec![0.0; nx * (ny + 1)];
    for j in 0..ny {
        for i in 0..nx {
            fu[j * nx + i] = (t(i, j)[(0, 0)] - t(xm(i), j)[(0, 0)]) / dx
                + (corner(i, j + 1) - corner(i, j)) / dy;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            fv[j * nx + i] = (corner(i + 1, j) - corner(i, j)) / dx
                + (t(i, j)[(1, 1)] - t(i, j - 1)[(1, 1)]) / dy;
        }
    }
    (fu, fv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh() -> ChannelMesh {
        ChannelMesh::new(8, 10, 2.0, 1.0).unwrap()
    }

    #[test]
    fn gradient_of_quadratic_profile() {
        let m = mesh();
        let mut vel = MacVelocity::zeros(m, (0.0, 0.0));
        for j in 0..m.ny {
            let y = (j as f64 + 0.5) * m.dy();
            for i in 0..m.nx {
                vel.u[j * m.nx + i] = y * (1.0 - y);
            }
        }
        let k = vel.grad_cells();
        for c in 0..m.n_cells() {
            let (_, y) = m.center(c);
            assert!((k[c][(1, 0)] - (1.0 - 2.0 * y)).abs() < 1e-12, "{y}");
            assert_eq!(k[c][(0, 0)], 0.0);
        }
        assert_eq!(vel.max_divergence(), 0.0);
    }

    #[test]
    fn sampling_matches_linear_shear_and_walls() {
        let m = mesh();
        let mut vel = MacVelocity::zeros(m, (0.0, 2.0));
        for j in 0..m.ny {
            let y = (j as f64 + 0.5) * m.dy();
            for i in 0..m.nx {
                vel.u[j * m.nx + i] = 2.0 * y;
            }
        }
        for (x, y) in [(0.3, 0.0), (1.1, 0.02), (0.7, 0.5), (1.95, 1.0)] {
            let [u, v] = vel.velocity(x, y);
            assert!((u - 2.0 * y).abs() < 1e-12);
            assert_eq!(v, 0.0);
        }
        assert_eq!(vel.max_speed(), 2.0);
    }

    #[test]
    fn advection_vanishes_for_parallel_flow() {
        let m = mesh();
        let mut vel = MacVelocity::zeros(m, (0.0, 0.0));
        for j in 0..m.ny {
            for i in 0..m.nx {
                vel.u[j * m.nx + i] = (j as f64).sin();
            }
        }
        let (au, av) = vel.advection();
        assert!(au.iter().chain(&av).all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn uniform_stream_has_no_advection() {
        let m = mesh();
        let mut vel = MacVelocity::zeros(m, (1.0, 1.0));
        vel.u.iter_mut().for_each(|x| *x = 1.0);
        let (au, _) = vel.advection();
        assert!(au.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn divergence_of_shear_stress_profile() {
        let m = mesh();
        let tau: Vec<Tensor2> = (0..m.n_cells())
            .map(|c| {
                let (_, y) = m.center(c);
                Tensor2::from_rows(&[&[0.0, 3.0 * y], &[3.0 * y, 0.0]])
            })
            .collect();
        let (fu, fv) = stress_divergence(&m, &tau);
        assert!(fu.iter().all(|x| (x - 3.0).abs() < 1e-12));
        assert!(fv.iter().all(|x| x.abs() < 1e-12));
    }
}
