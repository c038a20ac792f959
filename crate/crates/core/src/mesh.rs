//! Cell-centred channel mesh: periodic in x, walls at y = 0 and y = height.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelMesh {
    pub nx: usize,
    pub ny: usize,
    pub length: f64,
    pub height: f64,
}

impl ChannelMesh {
    pub fn new(nx: usize, ny: usize, length: f64, height: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParams(format!(
                "channel mesh needs at least 2x2 cells, got {nx}x{ny}"
            )));
        }
        if !(length > 0.0 && height > 0.0) {
            return Err(Error::InvalidParams("channel extents must be positive".into()));
        }
        Ok(ChannelMesh {
            nx,
            ny,
            length,
            height,
        })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.nx as f64
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        self.height / self.ny as f64
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn center(&self, c: usize) -> (f64, f64) {
        let (i, j) = self.cell_ij(c);
        ((i as f64 + 0.5) * self.dx(), (j as f64 + 0.5) * self.dy())
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Bilinear weights on cell centres; periodic in x, constant extrapolation
    /// in y beyond the first and last centre rows.
    pub fn bilinear(&self, x: f64, y: f64) -> [(usize, f64); 4] {
        let fx = x / self.dx() - 0.5;
        let i0f = fx.floor();
        let tx = fx - i0f;
        let nx = self.nx as i64;
        let i0 = (i0f as i64).rem_euclid(nx) as usize;
        let i1 = (i0 + 1) % self.nx;

        let fy = (y / self.dy() - 0.5).clamp(0.0, (self.ny - 1) as f64);
        let j0 = (fy.floor() as usize).min(self.ny - 2);
        let ty = fy - j0 as f64;
        let j1 = j0 + 1;
        [
            (self.cell(i0, j0), (1.0 - tx) * (1.0 - ty)),
            (self.cell(i1, j0), tx * (1.0 - ty)),
            (self.cell(i0, j1), (1.0 - tx) * ty),
            (self.cell(i1, j1), tx * ty),
        ]
    }

    /// Wraps x into `[0, length)` and clamps y into the channel.
    pub fn wrap(&self, x: f64, y: f64) -> (f64, f64) {
        (x.rem_euclid(self.length), y.clamp(0.0, self.height))
    }
}
