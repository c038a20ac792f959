//! Memory functions `m(s)` and age-grid quadrature.
//!
//! Exponential families (single mode, multi-mode Maxwell, Doi-Edwards) are
//! stored as a list of modes `c·e^{−r s}` so that quadrature weights can be
//! computed exactly per mode. The power-law family is capped below `s_min`.
//!
//! Quadrature uses product-integration weights: on every age interval the
//! sample is interpolated linearly and integrated exactly against `m`. The
//! weight `μᵢ = ∫ m(s)·hatᵢ(s) ds` therefore already contains the kernel, and
//! `Σ μᵢ fᵢ` approximates `∫ m f ds`. This handles the integrable singularity
//! of the Doi-Edwards kernel at `s = 0` without evaluating `m(0)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest age the grid builder will truncate at.
pub const S_CAP: f64 = 1e3;
pub const DEFAULT_DOI_EDWARDS_TERMS: usize = 10_000;
pub const DEFAULT_GRADING_RATIO: f64 = 1.15;
pub const DEFAULT_FIRST_INTERVAL: f64 = 1e-6;

/// One algebraic mode `η β/λ (s/λ)^{−(β+1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMode {
    pub eta: f64,
    pub beta: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelVariant {
    SingleExponential,
    MultiModeMaxwell { eta: Vec<f64>, lambda: Vec<f64> },
    DoiEdwards { lambda: f64, terms: usize },
    PowerLaw { modes: Vec<PowerMode>, s_min: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    /// `Σ c e^{−r s}`, sorted by increasing `r`.
    Exponential(Vec<(f64, f64)>),
    /// `Σ η β/λ (s/λ)^{−(β+1)}` for `s ≥ s_min`, constant below.
    Power { modes: Vec<PowerMode>, s_min: f64 },
}

/// A memory function rescaled to unit mass.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryKernel {
    variant: KernelVariant,
    shape: Shape,
    /// Multiplier applied to the raw formula so the total mass is one.
    scale: f64,
    raw_mass: f64,
}

/// Exponential upper envelope `m(s) ≤ c e^{−α s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayEnvelope {
    Exponential { c: f64, alpha: f64 },
    NotExponential,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("{name} must be positive and finite, got {v}")))
    }
}

impl MemoryKernel {
    /// `m(s) = e^{−s}`.
    pub fn single_exponential() -> Self {
        Self::from_shape(KernelVariant::SingleExponential, Shape::Exponential(vec![(1.0, 1.0)]))
    }

    /// `m(s) = Σ ηₖ/λₖ² e^{−s/λₖ}`, rescaled to unit mass.
    pub fn multi_mode(eta: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        if eta.is_empty() || eta.len() != lambda.len() {
            return Err(Error::InvalidKernel(format!(
                "multi-mode kernel needs matching non-empty eta/lambda lists ({} vs {})",
                eta.len(),
                lambda.len()
            )));
        }
        for (e, l) in eta.iter().zip(&lambda) {
            check_positive("eta", *e)?;
            check_positive("lambda", *l)?;
        }
        let mut modes: Vec<(f64, f64)> = eta
            .iter()
            .zip(&lambda)
            .map(|(e, l)| (e / (l * l), 1.0 / l))
            .collect();
        modes.sort_by(|a, b| a.1.total_cmp(&b.1));
        Ok(Self::from_shape(
            KernelVariant::MultiModeMaxwell { eta, lambda },
            Shape::Exponential(modes),
        ))
    }

    /// `m(s) = 8/(π²λ) Σ_{k<K} e^{−(2k+1)² s/λ}`, rescaled to unit mass.
    pub fn doi_edwards(lambda: f64, terms: usize) -> Result<Self> {
        check_positive("lambda", lambda)?;
        if terms == 0 {
            return Err(Error::InvalidKernel("Doi-Edwards needs at least one term".into()));
        }
        let c = 8.0 / (PI * PI * lambda);
        let modes = (0..terms)
            .map(|k| {
                let n = (2 * k + 1) as f64;
                (c, n * n / lambda)
            })
            .collect();
        Ok(Self::from_shape(
            KernelVariant::DoiEdwards { lambda, terms },
            Shape::Exponential(modes),
        ))
    }

    /// Algebraic memory `Σ ηₖβₖ/λₖ (s/λₖ)^{−(βₖ+1)}`, held constant on `[0, s_min]`.
    pub fn power_law(modes: Vec<PowerMode>, s_min: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidKernel("power-law kernel needs at least one mode".into()));
        }
        check_positive("s_min", s_min)?;
        for m in &modes {
            check_positive("eta", m.eta)?;
            check_positive("lambda", m.lambda)?;
            if !(m.beta > 0.0 && m.beta < 1.0) {
                return Err(Error::InvalidKernel(format!(
                    "power-law beta must lie in (0, 1), got {}",
                    m.beta
                )));
            }
        }
        Ok(Self::from_shape(
            KernelVariant::PowerLaw {
                modes: modes.clone(),
                s_min,
            },
            Shape::Power { modes, s_min },
        ))
    }

    fn from_shape(variant: KernelVariant, shape: Shape) -> Self {
        let raw_mass = match &shape {
            Shape::Exponential(modes) => modes.iter().map(|(c, r)| c / r).sum(),
            Shape::Power { modes, s_min } => modes
                .iter()
                .map(|m| m.eta * (1.0 + m.beta) * (s_min / m.lambda).powf(-m.beta))
                .sum(),
        };
        MemoryKernel {
            variant,
            shape,
            scale: 1.0 / raw_mass,
            raw_mass,
        }
    }

    pub fn variant(&self) -> &KernelVariant {
        &self.variant
    }

    /// Mass of the formula before rescaling.
    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    /// Factor applied to the formula to reach unit mass.
    pub fn normalization(&self) -> f64 {
        self.scale
    }

    /// Whether `m` is unbounded at the origin.
    pub fn is_singular(&self) -> bool {
        matches!(self.variant, KernelVariant::DoiEdwards { .. })
    }

    /// Whether the kernel benefits from a geometrically graded grid near `s = 0`.
    pub fn prefers_graded_grid(&self) -> bool {
        matches!(
            self.variant,
            KernelVariant::DoiEdwards { .. } | KernelVariant::PowerLaw { .. }
        )
    }

    /// Shortest relaxation time, used to pick a default uniform spacing.
    pub fn shortest_time_scale(&self) -> f64 {
        match &self.shape {
            Shape::Exponential(modes) => 1.0 / modes.last().map_or(1.0, |m| m.1),
            Shape::Power { s_min, .. } => *s_min,
        }
    }

    /// Pointwise `m(s)` for the normalized kernel.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::InvalidKernel(format!("age must be non-negative, got {s}")));
        }
        if s == 0.0 && self.is_singular() {
            return Err(Error::SingularPoint);
        }
        let raw = match &self.shape {
            Shape::Exponential(modes) => {
                let mut sum = 0.0;
                for (c, r) in modes {
                    let x = r * s;
                    if x > 745.0 {
                        break;
                    }
                    sum += c * (-x).exp();
                }
                sum
            }
            Shape::Power { modes, s_min } => {
                let s = s.max(*s_min);
                modes
                    .iter()
                    .map(|m| m.eta * m.beta / m.lambda * (s / m.lambda).powf(-(m.beta + 1.0)))
                    .sum()
            }
        };
        Ok(self.scale * raw)
    }

    /// `∫_s^∞ m` in closed form.
    pub fn tail_mass(&self, s: f64) -> f64 {
        let raw: f64 = match &self.shape {
            Shape::Exponential(modes) => modes
                .iter()
                .take_while(|(_, r)| r * s <= 745.0)
                .map(|(c, r)| c / r * (-r * s).exp())
                .sum(),
            Shape::Power { modes, s_min } => {
                if s >= *s_min {
                    modes
                        .iter()
                        .map(|m| m.eta * (s / m.lambda).powf(-m.beta))
                        .sum()
                } else {
                    let flat: f64 = modes
                        .iter()
                        .map(|m| {
                            m.eta * m.beta / m.lambda * (s_min / m.lambda).powf(-(m.beta + 1.0))
                        })
                        .sum();
                    flat * (s_min - s)
                        + modes
                            .iter()
                            .map(|m| m.eta * (s_min / m.lambda).powf(-m.beta))
                            .sum::<f64>()
                }
            }
        };
        self.scale * raw
    }

    pub fn decay_envelope(&self) -> DecayEnvelope {
        match (&self.variant, &self.shape) {
            (KernelVariant::DoiEdwards { lambda, terms }, Shape::Exponential(modes)) => {
                DecayEnvelope::Exponential {
                    c: self.scale * modes[0].0 * *terms as f64,
                    alpha: 1.0 / lambda,
                }
            }
            (_, Shape::Exponential(modes)) => DecayEnvelope::Exponential {
                c: self.scale * modes.iter().map(|m| m.0).sum::<f64>(),
                alpha: modes[0].1,
            },
            (_, Shape::Power { .. }) => DecayEnvelope::NotExponential,
        }
    }

    /// `(∫_a^b m, ∫_a^b m·(s−a))` for the power-law shape, unnormalized.
    fn power_moments(modes: &[PowerMode], s_min: f64, a: f64, b: f64) -> (f64, f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        if a < s_min {
            let hi = b.min(s_min);
            let flat: f64 = modes
                .iter()
                .map(|m| m.eta * m.beta / m.lambda * (s_min / m.lambda).powf(-(m.beta + 1.0)))
                .sum();
            m0 += flat * (hi - a);
            m1 += flat * 0.5 * (hi - a) * (hi - a);
        }
        if b > s_min {
            let lo = a.max(s_min);
            for m in modes {
                // m(s) = η β λ^β s^{−β−1}
                let k = m.eta * m.beta * m.lambda.powf(m.beta);
                let p0 = |s: f64| -s.powf(-m.beta) / m.beta;
                let p1 = |s: f64| s.powf(1.0 - m.beta) / (1.0 - m.beta);
                let i0 = k * (p0(b) - p0(lo));
                let i1 = k * (p1(b) - p1(lo));
                m0 += i0;
                m1 += i1 - a * i0;
            }
        }
        (m0, m1)
    }

    /// Product-integration weights of the hat functions on `nodes`.
    fn hat_weights(&self, nodes: &[f64]) -> Vec<f64> {
        let n = nodes.len();
        let mut w = vec![0.0; n];
        match &self.shape {
            Shape::Exponential(modes) => {
                for (c, r) in modes {
                    for i in 0..n - 1 {
                        let a = nodes[i];
                        let h = nodes[i + 1] - a;
                        let ra = r * a;
                        if ra > 700.0 {
                            break;
                        }
                        let x = r * h;
                        let amp = c * (-ra).exp() * h;
                        let p2 = phi2(x);
                        w[i] += amp * (phi1(x) - p2);
                        w[i + 1] += amp * p2;
                    }
                }
            }
            Shape::Power { modes, s_min } => {
                for i in 0..n - 1 {
                    let (a, b) = (nodes[i], nodes[i + 1]);
                    let (m0, m1) = Self::power_moments(modes, *s_min, a, b);
                    let right = m1 / (b - a);
                    w[i] += m0 - right;
                    w[i + 1] += right;
                }
            }
        }
        w.iter_mut().for_each(|v| *v *= self.scale);
        w
    }
}

/// `(1 − e^{−x})/x`.
fn phi1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `(1 − e^{−x}(1 + x))/x²`.
fn phi2(x: f64) -> f64 {
    if x < 0.1 {
        // Σ (−x)ⁿ / (n! (n+2))
        let mut term = 1.0;
        let mut sum = 0.5;
        for n in 1..20 {
            term *= -x / n as f64;
            sum += term / (n + 2) as f64;
        }
        sum
    } else {
        (1.0 - (-x).exp() * (1.0 + x)) / (x * x)
    }
}

/// Node distribution of an age grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Grading {
    Uniform { h: f64 },
    Geometric { ratio: f64, first: f64, cap: f64 },
}

/// Knobs for [`build_age_grid_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgeGridOptions {
    pub tail_tol: f64,
    pub quad_tol: f64,
    /// Uniform spacing; `None` selects the kernel's default grading.
    pub spacing: Option<f64>,
    pub ratio: f64,
    /// First graded interval as a fraction of `s_max`.
    pub first_fraction: f64,
    /// Largest graded interval; `None` uses `s_max / 200`.
    pub cap: Option<f64>,
}

impl AgeGridOptions {
    pub fn new(tail_tol: f64, quad_tol: f64) -> Self {
        AgeGridOptions {
            tail_tol,
            quad_tol,
            spacing: None,
            ratio: DEFAULT_GRADING_RATIO,
            first_fraction: DEFAULT_FIRST_INTERVAL,
            cap: None,
        }
    }

    pub fn uniform(mut self, h: f64) -> Self {
        self.spacing = Some(h);
        self
    }
}

/// Truncated age axis with product-integration weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AgeGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    s_max: f64,
    grading: Grading,
    tail: f64,
}

impl AgeGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `μᵢ = ∫ m(s) hatᵢ(s) ds`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Kernel mass beyond the last node.
    pub fn tail_mass(&self) -> f64 {
        self.tail
    }

    /// `Σ μᵢ`, the mass captured by the grid.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Uniform spacing, if the grid is uniform.
    pub fn uniform_spacing(&self) -> Option<f64> {
        match self.grading {
            Grading::Uniform { h } => Some(h),
            Grading::Geometric { .. } => None,
        }
    }

    /// `Σ μᵢ samplesᵢ ≈ ∫ m(s) f(s) ds`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::GridMismatch {
                samples: samples.len(),
                nodes: self.nodes.len(),
            });
        }
        Ok(self.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
    }

    /// Index `i` and fraction `θ ∈ [0, 1]` with `s = (1−θ)sᵢ + θsᵢ₊₁`,
    /// or `None` beyond the last node.
    pub fn locate(&self, s: f64) -> Option<(usize, f64)> {
        let n = self.nodes.len();
        if s > self.nodes[n - 1] {
            return None;
        }
        if s <= 0.0 {
            return Some((0, 0.0));
        }
        let i = match self.grading {
            Grading::Uniform { h } => ((s / h).floor() as usize).min(n - 2),
            Grading::Geometric { .. } => self.nodes.partition_point(|x| *x <= s).saturating_sub(1).min(n - 2),
        };
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let theta = ((s - a) / (b - a)).clamp(0.0, 1.0);
        Some((i, theta))
    }
}

/// Grid with the kernel's default grading.
pub fn build_age_grid(kernel: &MemoryKernel, tail_tol: f64, quad_tol: f64) -> Result<AgeGrid> {
    build_age_grid_with(kernel, &AgeGridOptions::new(tail_tol, quad_tol))
}

pub fn build_age_grid_with(kernel: &MemoryKernel, opts: &AgeGridOptions) -> Result<AgeGrid> {
    for (name, v) in [("tail_tol", opts.tail_tol), ("quad_tol", opts.quad_tol)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidKernel(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let s_max = truncation_age(kernel, opts.tail_tol)?;

    let (nodes, grading) = match opts.spacing {
        Some(h) => {
            check_positive("age spacing", h)?;
            uniform_nodes(s_max, h)
        }
        None if kernel.prefers_graded_grid() => {
            let cap = opts.cap.unwrap_or(s_max / 200.0);
            check_positive("grading cap", cap)?;
            if !(opts.ratio > 1.0) {
                return Err(Error::InvalidKernel(format!(
                    "grading ratio must exceed 1, got {}",
                    opts.ratio
                )));
            }
            let first = opts.first_fraction * s_max;
            let nodes = graded_nodes(s_max, first, opts.ratio, cap);
            (
                nodes,
                Grading::Geometric {
                    ratio: opts.ratio,
                    first,
                    cap,
                },
            )
        }
        None => uniform_nodes(s_max, 0.01 * kernel.shortest_time_scale()),
    };

    let weights = kernel.hat_weights(&nodes);
    let last = *nodes.last().expect("grid has nodes");
    let tail = kernel.tail_mass(last);
    let grid = AgeGrid {
        nodes,
        weights,
        s_max: last,
        grading,
        tail,
    };
    let audit = grid.mass() + tail;
    if (audit - 1.0).abs() > opts.quad_tol {
        return Err(Error::QuadratureMass {
            mass: audit,
            quad_tol: opts.quad_tol,
        });
    }
    Ok(grid)
}

/// Smallest age with `∫_s^∞ m < tail_tol`, located by bisection on the closed-form tail.
pub fn truncation_age(kernel: &MemoryKernel, tail_tol: f64) -> Result<f64> {
    let tail_at_cap = kernel.tail_mass(S_CAP);
    if tail_at_cap >= tail_tol {
        return Err(Error::NoDecay {
            tail: tail_at_cap,
            tail_tol,
            s_cap: S_CAP,
        });
    }
    let (mut lo, mut hi) = (0.0, S_CAP);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kernel.tail_mass(mid) < tail_tol {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

fn uniform_nodes(s_max: f64, h: f64) -> (Vec<f64>, Grading) {
    let n = (s_max / h - 1e-9).ceil().max(1.0) as usize;
    ((0..=n).map(|i| i as f64 * h).collect(), Grading::Uniform { h })
}

fn graded_nodes(s_max: f64, first: f64, ratio: f64, cap: f64) -> Vec<f64> {
    let mut nodes = vec![0.0];
    let mut h = first.min(cap);
    let mut s = 0.0;
    while s < s_max {
        s += h;
        nodes.push(s);
        h = (h * ratio).min(cap);
    }
    nodes
}

/// Partial sum `8/π² Σ_{k<K} (2k+1)⁻²`, the raw Doi-Edwards mass.
pub fn doi_edwards_series_mass(terms: usize) -> f64 {
    // Summed from the small end for accuracy.
    let s: f64 = (0..terms)
        .rev()
        .map(|k| {
            let n = (2 * k + 1) as f64;
            1.0 / (n * n)
        })
        .sum();
    8.0 / (PI * PI) * s
}
