//! Dense small-dimension tensor algebra.
//!
//! Tensors are stored row-major in fixed 3×3 (or 3×3×3, 3×3×3×3) arrays with a
//! runtime dimension `d ∈ {2, 3}`; entries outside the active `d×d` block are
//! kept at zero.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative factor of the invertibility threshold `1e-12 · |b|^d`.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// A real `d×d` tensor.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tensor2 {
    d: usize,
    e: [[f64; 3]; 3],
}

impl fmt::Debug for Tensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.d).map(|i| &self.e[i][..self.d]).collect();
        write!(f, "Tensor2{:?}", rows)
    }
}

fn check_dim(d: usize) {
    assert!(d == 2 || d == 3, "tensor dimension must be 2 or 3, got {d}");
}

impl Tensor2 {
    pub fn zeros(d: usize) -> Self {
        check_dim(d);
        Tensor2 { d, e: [[0.0; 3]; 3] }
    }

    pub fn identity(d: usize) -> Self {
        let mut t = Self::zeros(d);
        for i in 0..d {
            t.e[i][i] = 1.0;
        }
        t
    }

    /// Canonical basis tensor `E_ij` (zero-based indices).
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut t = Self::zeros(d);
        t.e[i][j] = 1.0;
        t
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                t.e[i][j] = f(i, j);
            }
        }
        t
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut t = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            t.e[i][i] = *v;
        }
        t
    }

    /// Builds a tensor from row slices; the number of rows sets `d`.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        Self::from_fn(d, |i, j| {
            assert_eq!(rows[i].len(), d, "row {i} has wrong length");
            rows[i][j]
        })
    }

    /// Builds a tensor from `d*d` row-major entries.
    pub fn from_row_major(d: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), d * d);
        Self::from_fn(d, |i, j| entries[i * d + j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Row-major entries of the active block.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.d * self.d);
        for i in 0..self.d {
            out.extend_from_slice(&self.e[i][..self.d]);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.e[i][j] = self.e[j][i];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.e[i][i]).sum()
    }

    pub fn det(&self) -> f64 {
        let e = &self.e;
        match self.d {
            2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
            _ => {
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                    - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                    + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            }
        }
    }

    /// Frobenius norm `|A|² = Tr(AᵀA)`.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Double contraction `A : B = Σ A_ij B_ij`.
    pub fn dot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                s += self.e[i][j] * other.e[i][j];
            }
        }
        s
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= a;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.d).all(|i| (0..i).all(|j| (self.e[i][j] - self.e[j][i]).abs() <= tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Inverse via the adjugate. Fails when `|det| ≤ 1e-12 · |A|^d`.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let tol = SINGULAR_REL_TOL * self.norm().powi(self.d as i32);
        if !(det.abs() > tol) {
            return Err(Error::SingularTensor { det, tol });
        }
        let e = &self.e;
        let inv = match self.d {
            2 => Tensor2::from_rows(&[&[e[1][1], -e[0][1]], &[-e[1][0], e[0][0]]]),
            _ => Tensor2::from_fn(3, |i, j| {
                // cofactor of (j, i)
                let (r0, r1) = match j {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let (c0, c1) = match i {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let minor = e[r0][c0] * e[r1][c1] - e[r0][c1] * e[r1][c0];
                if (i + j) % 2 == 0 {
                    minor
                } else {
                    -minor
                }
            }),
        };
        Ok(inv.scale(1.0 / det))
    }

    /// Outer product `(A ⊗ B)_ijkl = A_ij B_kl`.
    pub fn outer(&self, other: &Self) -> Tensor4 {
        assert_eq!(self.d, other.d);
        let mut h = Tensor4::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                for k in 0..self.d {
                    for l in 0..self.d {
                        h[(i, j, k, l)] = self.e[i][j] * other.e[k][l];
                    }
                }
            }
        }
        h
    }

    /// `exp(t·self)`, see [`tensor_exp`].
    pub fn exp(&self, t: f64) -> Self {
        tensor_exp(self, t)
    }
}

impl Index<(usize, usize)> for Tensor2 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.d && j < self.d);
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor2 {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.d && j < self.d);
        &mut self.e[i][j]
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(self, rhs: Tensor2) -> Tensor2 {
        debug_assert_eq!(self.d, rhs.d);
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Tensor2 {
    fn add_assign(&mut self, rhs: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.e[i][j] += rhs.e[i][j];
            }
        }
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, rhs: Tensor2) -> Tensor2 {
        debug_assert_eq!(self.d, rhs.d);
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for Tensor2 {
    fn sub_assign(&mut self, rhs: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.e[i][j] -= rhs.e[i][j];
            }
        }
    }
}

impl Neg for Tensor2 {
    type Output = Tensor2;
    fn neg(self) -> Tensor2 {
        self.scale(-1.0)
    }
}

impl Mul for Tensor2 {
    type Output = Tensor2;
    #[inline]
    fn mul(self, rhs: Tensor2) -> Tensor2 {
        debug_assert_eq!(self.d, rhs.d);
        let (a, b) = (&self.e, &rhs.e);
        let mut out = Tensor2::zeros(self.d);
        if self.d == 2 {
            out.e[0][0] = a[0][0] * b[0][0] + a[0][1] * b[1][0];
            out.e[0][1] = a[0][0] * b[0][1] + a[0][1] * b[1][1];
            out.e[1][0] = a[1][0] * b[0][0] + a[1][1] * b[1][0];
            out.e[1][1] = a[1][0] * b[0][1] + a[1][1] * b[1][1];
            return out;
        }
        for i in 0..3 {
            for k in 0..3 {
                for j in 0..3 {
                    out.e[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }
}

impl Mul<Tensor2> for f64 {
    type Output = Tensor2;
    fn mul(self, rhs: Tensor2) -> Tensor2 {
        rhs.scale(self)
    }
}

/// A real `d×d×d` tensor, used for spatial gradients `(∇A)_ijk = ∂_i A_jk`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Tensor3 {
    d: usize,
    e: [[[f64; 3]; 3]; 3],
}

impl Tensor3 {
    pub fn zeros(d: usize) -> Self {
        check_dim(d);
        Tensor3 {
            d,
            e: [[[0.0; 3]; 3]; 3],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Slice along the first index: `∂_i A` as a 2-tensor.
    pub fn component(&self, i: usize) -> Tensor2 {
        Tensor2::from_fn(self.d, |j, k| self.e[i][j][k])
    }

    pub fn set_component(&mut self, i: usize, a: &Tensor2) {
        for j in 0..self.d {
            for k in 0..self.d {
                self.e[i][j][k] = a[(j, k)];
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.e.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m = m.max((self.e[i][j][k] - other.e[i][j][k]).abs());
                }
            }
        }
        m
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = *self;
        out.e.iter_mut().flatten().flatten().for_each(|v| *v *= a);
        out
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.e[i][j][k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.e[i][j][k]
    }
}

impl AddAssign for Tensor3 {
    fn add_assign(&mut self, rhs: Tensor3) {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    self.e[i][j][k] += rhs.e[i][j][k];
                }
            }
        }
    }
}

/// A real `d×d×d×d` tensor indexed `(i, j, k, l)`; houses `S′(G)_ijkl = ∂S_kl/∂G_ij`.
#[derive(Clone, PartialEq, Debug)]
pub struct Tensor4 {
    d: usize,
    e: [f64; 81],
}

impl Tensor4 {
    pub fn zeros(d: usize) -> Self {
        check_dim(d);
        Tensor4 { d, e: [0.0; 81] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// The 2-tensor `(k, l) ↦ H_ijkl` for fixed `(i, j)`.
    pub fn slice(&self, i: usize, j: usize) -> Tensor2 {
        Tensor2::from_fn(self.d, |k, l| self[(i, j, k, l)])
    }

    pub fn set_slice(&mut self, i: usize, j: usize, a: &Tensor2) {
        for k in 0..self.d {
            for l in 0..self.d {
                self[(i, j, k, l)] = a[(k, l)];
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.e
            .iter()
            .zip(other.e.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Contraction `Σ_ij A_ij H_ijkl`.
    pub fn contract_left(&self, a: &Tensor2) -> Tensor2 {
        let d = self.d;
        let mut out = Tensor2::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let aij = a[(i, j)];
                if aij == 0.0 {
                    continue;
                }
                for k in 0..d {
                    for l in 0..d {
                        out[(k, l)] += aij * self[(i, j, k, l)];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        &self.e[((i * 3 + j) * 3 + k) * 3 + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        &mut self.e[((i * 3 + j) * 3 + k) * 3 + l]
    }
}

/// Strain invariants of a Finger tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Invariants {
    /// `Tr(B)`
    pub i1: f64,
    /// `Tr(B⁻¹)`
    pub i2: f64,
    pub det_b: f64,
}

/// Finger tensor `B = gᵀ·g`.
pub fn finger(g: &Tensor2) -> Tensor2 {
    g.transpose() * *g
}

/// Cauchy-Green tensor `C = (gᵀ·g)⁻¹`.
pub fn cauchy_green(g: &Tensor2) -> Result<Tensor2> {
    finger(g).inverse()
}

pub fn invariants(b: &Tensor2) -> Result<Invariants> {
    let inv = b.inverse()?;
    Ok(Invariants {
        i1: b.trace(),
        i2: inv.trace(),
        det_b: b.det(),
    })
}

/// Matrix exponential `exp(t·a)` by scaling and squaring with a Taylor core.
///
/// The scaled argument has Frobenius norm ≤ 1/2, where the Taylor series is
/// summed until the term drops below double-precision resolution.
pub fn tensor_exp(a: &Tensor2, t: f64) -> Tensor2 {
    let d = a.dim();
    let x = a.scale(t);
    let n = x.norm();
    if n == 0.0 {
        return Tensor2::identity(d);
    }
    let squarings = if n > 0.5 {
        (n / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let xs = x.scale(0.5f64.powi(squarings));
    let mut sum = Tensor2::identity(d);
    let mut term = Tensor2::identity(d);
    for k in 1..40 {
        term = (term * xs).scale(1.0 / k as f64);
        sum += term;
        if term.max_abs() <= 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Algebra norm of a 4-tensor, `|H|² = Σ H²_ijkl`.
pub fn norm4(h: &Tensor4) -> f64 {
    h.e.iter().map(|v| v * v).sum::<f64>().sqrt()
}
