//! Strain measures `S(G)` and their derivatives `S′(G)_ijkl = ∂S_kl/∂G_ij`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{cauchy_green, finger, norm4, tensor_exp, Tensor2, Tensor4};

/// Relative finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Radicands above `−RADICAND_TOL·(1 + I₁ + I₂)` are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-10;

/// Scalar function of the invariants `(I₁, I₂)` used by K-BKZ damping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScalarFn {
    Constant(f64),
    /// `(n₀ + n₁I₁ + n₂I₂) / (d₀ + d₁I₁ + d₂I₂)`
    Rational { num: [f64; 3], den: [f64; 3] },
}

impl ScalarFn {
    pub fn eval(&self, i1: f64, i2: f64) -> f64 {
        match self {
            ScalarFn::Constant(c) => *c,
            ScalarFn::Rational { num, den } => {
                (num[0] + num[1] * i1 + num[2] * i2) / (den[0] + den[1] * i1 + den[2] * i2)
            }
        }
    }

    fn uses_i2(&self) -> bool {
        match self {
            ScalarFn::Constant(_) => false,
            ScalarFn::Rational { num, den } => num[2] != 0.0 || den[2] != 0.0,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, ScalarFn::Constant(c) if *c == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MeasureVariant {
    /// `B − δ`
    Ucm,
    /// `δ − C`
    Lcm,
    /// `φ₁(B − δ) + φ₂(δ − C)`
    Kbkz { phi1: ScalarFn, phi2: ScalarFn },
    /// `α/(α + βI₁ + (1−β)I₂ − d) · B`
    Psm { alpha: f64, beta: f64 },
    /// `B / (1 + Tr B)`
    PsmNorm,
    /// `exp(−α √(βI₁ + (1−β)I₂ − d)) · B`
    Wagner { alpha: f64, beta: f64 },
    /// `4/(3(J−1)) B − 4/(3(J−1)√(I₂+3.25)) C`, `J = I₁ + 2√(I₂+3.25)`
    Currie,
}

/// Polynomial growth constants: `|S(G)| ≤ c|G|^a`, `|S′(G)| ≤ c|G|^b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// How finite-difference derivatives perturb `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdMode {
    /// Perturb every entry independently.
    Unconstrained,
    /// Perturb within the tangent space of `det G = const` and rescale back onto it.
    Manifold,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrainMeasure {
    pub variant: MeasureVariant,
    pub growth: Option<Growth>,
}

impl StrainMeasure {
    /// Measure with its catalog growth constants, where known.
    pub fn new(variant: MeasureVariant) -> Result<Self> {
        match &variant {
            MeasureVariant::Psm { alpha, beta } | MeasureVariant::Wagner { alpha, beta } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidMeasure(format!("alpha must be positive, got {alpha}")));
                }
                if !(0.0..=1.0).contains(beta) {
                    return Err(Error::InvalidMeasure(format!("beta must lie in [0, 1], got {beta}")));
                }
            }
            _ => {}
        }
        let growth = match variant {
            MeasureVariant::Ucm => Some(Growth {
                a: 2.0,
                b: 1.0,
                c: 3.0,
            }),
            MeasureVariant::PsmNorm => Some(Growth {
                a: 0.0,
                b: -1.0,
                c: 2.0 * (1.0 + 3f64.sqrt()),
            }),
            _ => None,
        };
        Ok(StrainMeasure { variant, growth })
    }

    pub fn ucm() -> Self {
        Self::new(MeasureVariant::Ucm).expect("valid")
    }

    pub fn lcm() -> Self {
        Self::new(MeasureVariant::Lcm).expect("valid")
    }

    pub fn psm_norm() -> Self {
        Self::new(MeasureVariant::PsmNorm).expect("valid")
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = Some(growth);
        self
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            MeasureVariant::Ucm => "ucm",
            MeasureVariant::Lcm => "lcm",
            MeasureVariant::Kbkz { .. } => "kbkz",
            MeasureVariant::Psm { .. } => "psm",
            MeasureVariant::PsmNorm => "psm_norm",
            MeasureVariant::Wagner { .. } => "wagner",
            MeasureVariant::Currie => "currie",
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        matches!(
            self.variant,
            MeasureVariant::Ucm | MeasureVariant::Lcm | MeasureVariant::PsmNorm
        )
    }

    /// `S(G)`.
    pub fn evaluate(&self, g: &Tensor2) -> Result<Tensor2> {
        let d = g.dim();
        let dd = d as f64;
        let delta = Tensor2::identity(d);
        let b = finger(g);
        Ok(match &self.variant {
            MeasureVariant::Ucm => b - delta,
            MeasureVariant::Lcm => delta - cauchy_green(g)?,
            MeasureVariant::Kbkz { phi1, phi2 } => {
                let needs_c = !phi2.is_zero() || phi1.uses_i2() || phi2.uses_i2();
                if needs_c {
                    let c = b.inverse()?;
                    let (i1, i2) = (b.trace(), c.trace());
                    (b - delta).scale(phi1.eval(i1, i2)) + (delta - c).scale(phi2.eval(i1, i2))
                } else {
                    (b - delta).scale(phi1.eval(b.trace(), f64::NAN))
                }
            }
            MeasureVariant::Psm { alpha, beta } => {
                let i1 = b.trace();
                let i2 = b.inverse()?.trace();
                let h = alpha / (alpha + beta * i1 + (1.0 - beta) * i2 - dd);
                b.scale(h)
            }
            MeasureVariant::PsmNorm => b.scale(1.0 / (1.0 + b.trace())),
            MeasureVariant::Wagner { alpha, beta } => {
                let i1 = b.trace();
                let i2 = b.inverse()?.trace();
                let mut r = beta * i1 + (1.0 - beta) * i2 - dd;
                if r < 0.0 {
                    if r < -RADICAND_TOL * (1.0 + i1 + i2) {
                        return Err(Error::NegativeRadicand { value: r });
                    }
                    r = 0.0;
                }
                b.scale((-alpha * r.sqrt()).exp())
            }
            MeasureVariant::Currie => {
                let c = b.inverse()?;
                let i1 = b.trace();
                let q = (c.trace() + 3.25).sqrt();
                let j = i1 + 2.0 * q;
                let f = 4.0 / (3.0 * (j - 1.0));
                b.scale(f) - c.scale(f / q)
            }
        })
    }

    /// `S′(G)`: analytic where available, central differences otherwise.
    ///
    /// Wagner is only defined on `det G = 1` up to rounding, so its finite
    /// differences stay on that manifold.
    pub fn derivative(&self, g: &Tensor2) -> Result<Tensor4> {
        match self.variant {
            MeasureVariant::Ucm => Ok(ucm_derivative(g)),
            MeasureVariant::Lcm => lcm_derivative(g),
            MeasureVariant::PsmNorm => Ok(psm_norm_derivative(g)),
            MeasureVariant::Wagner { .. } => self.derivative_fd(g, FdMode::Manifold),
            _ => self.derivative_fd(g, FdMode::Unconstrained),
        }
    }

    /// Central finite-difference `S′(G)` with step `FD_STEP·max(1, |G|)`.
    pub fn derivative_fd(&self, g: &Tensor2, mode: FdMode) -> Result<Tensor4> {
        let d = g.dim();
        let h = FD_STEP * g.norm().max(1.0);
        let mut out = Tensor4::zeros(d);
        let (ginv_t, det) = match mode {
            FdMode::Manifold => (g.inverse()?.transpose(), g.det()),
            FdMode::Unconstrained => (Tensor2::zeros(d), 1.0),
        };
        for i in 0..d {
            for j in 0..d {
                let e = Tensor2::unit(d, i, j);
                let slice = match mode {
                    FdMode::Unconstrained => {
                        let sp = self.evaluate(&(*g + e.scale(h)))?;
                        let sm = self.evaluate(&(*g - e.scale(h)))?;
                        (sp - sm).scale(0.5 / h)
                    }
                    FdMode::Manifold => {
                        // normal of {det = const} at G is G⁻ᵀ
                        let n = ginv_t;
                        let dir = e - n.scale(e.dot(&n) / n.dot(&n));
                        let onto = |x: Tensor2| -> Tensor2 {
                            let r = (det / x.det()).abs().powf(1.0 / d as f64);
                            x.scale(r)
                        };
                        let sp = self.evaluate(&onto(*g + dir.scale(h)))?;
                        let sm = self.evaluate(&onto(*g - dir.scale(h)))?;
                        (sp - sm).scale(0.5 / h)
                    }
                };
                out.set_slice(i, j, &slice);
            }
        }
        Ok(out)
    }
}

pub fn evaluate_s(measure: &StrainMeasure, g: &Tensor2) -> Result<Tensor2> {
    measure.evaluate(g)
}

pub fn derivative_s(measure: &StrainMeasure, g: &Tensor2) -> Result<Tensor4> {
    measure.derivative(g)
}

fn ucm_derivative(g: &Tensor2) -> Tensor4 {
    let d = g.dim();
    let mut h = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut v = 0.0;
                    if k == j {
                        v += g[(i, l)];
                    }
                    if l == j {
                        v += g[(i, k)];
                    }
                    h[(i, j, k, l)] = v;
                }
            }
        }
    }
    h
}

fn lcm_derivative(g: &Tensor2) -> Result<Tensor4> {
    let d = g.dim();
    let c = cauchy_green(g)?;
    let gc = *g * c;
    let mut h = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    h[(i, j, k, l)] = c[(k, j)] * gc[(i, l)] + gc[(i, k)] * c[(j, l)];
                }
            }
        }
    }
    Ok(h)
}

fn psm_norm_derivative(g: &Tensor2) -> Tensor4 {
    let d = g.dim();
    let b = finger(g);
    let q = 1.0 + b.trace();
    let mut h = ucm_derivative(g);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    h[(i, j, k, l)] = h[(i, j, k, l)] / q - 2.0 * g[(i, j)] * b[(k, l)] / (q * q);
                }
            }
        }
    }
    h
}

/// Worst observed ratios of a growth-bound sweep.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub samples: usize,
    /// `max |S(g)| / (c|g|^a)`
    pub value_ratio: f64,
    /// `max |S′(g)| / (c|g|^b)`
    pub derivative_ratio: f64,
    pub value_witness: Tensor2,
    pub derivative_witness: Tensor2,
}

/// Random rotation `exp(W)` for a skew generator with entries in `(−π, π)`.
pub fn random_rotation(d: usize, rng: &mut impl Rng) -> Tensor2 {
    let mut w = Tensor2::zeros(d);
    for i in 0..d {
        for j in 0..i {
            let a = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            w[(i, j)] = a;
            w[(j, i)] = -a;
        }
    }
    tensor_exp(&w, 1.0)
}

/// Random `g = Q₁ diag(σ) Q₂` with `Π σ = 1` and `|g| = target ≥ √d`.
pub fn random_unimodular(d: usize, target: f64, rng: &mut impl Rng) -> Tensor2 {
    let dd = d as f64;
    // direction in the plane Σ log σ = 0
    let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = v.iter().sum::<f64>() / dd;
    v.iter_mut().for_each(|x| *x -= mean);
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if vn < 1e-12 {
        v = vec![0.0; d];
        v[0] = 1.0;
        v[1] = -1.0;
    } else {
        v.iter_mut().for_each(|x| *x /= vn);
    }
    let norm_at = |t: f64| v.iter().map(|x| (2.0 * t * x).exp()).sum::<f64>().sqrt();
    let target = target.max(dd.sqrt());
    let (mut lo, mut hi) = (0.0, 1.0);
    while norm_at(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let sigma: Vec<f64> = v.iter().map(|x| (t * x).exp()).collect();
    let q1 = random_rotation(d, rng);
    let q2 = random_rotation(d, rng);
    q1 * Tensor2::diag(&sigma) * q2
}

/// Samples det-1 tensors with norms log-spaced over `[√d, 10³]` and checks the
/// declared polynomial growth of `S` and `S′`.
pub fn growth_bounds_check(
    measure: &StrainMeasure,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<GrowthReport> {
    let growth = measure.growth.ok_or(Error::MissingGrowth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = (d as f64).sqrt().ln();
    let hi = 1e3f64.ln();
    let mut report = GrowthReport {
        samples,
        value_ratio: 0.0,
        derivative_ratio: 0.0,
        value_witness: Tensor2::identity(d),
        derivative_witness: Tensor2::identity(d),
    };
    for n in 0..samples {
        let frac = if samples > 1 {
            n as f64 / (samples - 1) as f64
        } else {
            0.0
        };
        let g = random_unimodular(d, (lo + frac * (hi - lo)).exp(), &mut rng);
        let gn = g.norm();
        let rv = measure.evaluate(&g)?.norm() / (growth.c * gn.powf(growth.a));
        let rd = norm4(&measure.derivative(&g)?) / (growth.c * gn.powf(growth.b));
        if rv > report.value_ratio {
            report.value_ratio = rv;
            report.value_witness = g;
        }
        if rd > report.derivative_ratio {
            report.derivative_ratio = rd;
            report.derivative_witness = g;
        }
    }
    if report.value_ratio > 1.0 {
        return Err(Error::BoundViolated {
            what: format!("{} value growth", measure.name()),
            ratio: report.value_ratio,
            witness: Some(report.value_witness),
        });
    }
    if report.derivative_ratio > 1.0 {
        return Err(Error::BoundViolated {
            what: format!("{} derivative growth", measure.name()),
            ratio: report.derivative_ratio,
            witness: Some(report.derivative_witness),
        });
    }
    Ok(report)
}
