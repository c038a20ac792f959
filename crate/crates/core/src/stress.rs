//! Stress `τ = (ω/We) ∫ m(s) S(G(s)) ds` and its spatial gradient.

use rayon::prelude::*;

use crate::deformation::AgeTimeField;
use crate::error::{Error, Result};
use crate::strain::StrainMeasure;
use crate::tensor::{norm4, Tensor2, Tensor3};

/// Relative slack of the discrete bound checks (rounding in the sums).
const BOUND_SLACK: f64 = 1e-12;

/// Age nodes per work item for fields with few columns.
const ASSEMBLY_CHUNK: usize = 1024;
const CHUNKED_BELOW_CELLS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct StressField {
    pub tau: Vec<Tensor2>,
    pub grad_tau: Option<Vec<Tensor3>>,
    pub omega: f64,
    pub we: f64,
}

impl StressField {
    pub fn zeros(n_cells: usize, d: usize, omega: f64, we: f64) -> Self {
        StressField {
            tau: vec![Tensor2::zeros(d); n_cells],
            grad_tau: None,
            omega,
            we,
        }
    }

    /// `max |τ|` over cells.
    pub fn max_norm(&self) -> f64 {
        self.tau.iter().map(|t| t.norm()).fold(0.0, f64::max)
    }
}

fn prefactor(omega: f64, we: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&omega) || !(we > 0.0) {
        return Err(Error::InvalidParams(format!(
            "stress needs omega in [0, 1] and We > 0, got omega = {omega}, We = {we}"
        )));
    }
    Ok(omega / we)
}

fn column_sum(
    g: &[Tensor2],
    w: &[f64],
    measure: &StrainMeasure,
    cell: usize,
    first_age: usize,
) -> Result<Tensor2> {
    let mut acc = Tensor2::zeros(g[0].dim());
    for (a, (g, w)) in g.iter().zip(w).enumerate() {
        let s = measure.evaluate(g).map_err(|e| e.at(cell, first_age + a))?;
        acc += s.scale(*w);
    }
    Ok(acc)
}

/// Assembles `τ` cell by cell from the field's age grid.
///
/// For `ω = 0` the stress is exactly zero and `S` is never evaluated.
pub fn assemble_tau(
    field: &AgeTimeField,
    measure: &StrainMeasure,
    omega: f64,
    we: f64,
) -> Result<StressField> {
    let pre = prefactor(omega, we)?;
    let d = field.dim();
    let n_cells = field.n_cells();
    if pre == 0.0 {
        return Ok(StressField::zeros(n_cells, d, omega, we));
    }
    let weights = field.grid().weights();
    // the split depends only on the field shape, so sums are reproducible
    let tau = if n_cells >= CHUNKED_BELOW_CELLS {
        (0..n_cells)
            .into_par_iter()
            .map(|c| column_sum(field.column(c), weights, measure, c, 0).map(|t| t.scale(pre)))
            .collect::<Result<Vec<_>>>()?
    } else {
        // few columns: split each column into fixed chunks, summed in order
        let mut tau = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let col = field.column(c);
            let parts = col
                .par_chunks(ASSEMBLY_CHUNK)
                .zip(weights.par_chunks(ASSEMBLY_CHUNK))
                .enumerate()
                .map(|(k, (g, w))| column_sum(g, w, measure, c, k * ASSEMBLY_CHUNK))
                .collect::<Result<Vec<_>>>()?;
            let mut acc = Tensor2::zeros(d);
            for p in parts {
                acc += p;
            }
            tau.push(acc.scale(pre));
        }
        tau
    };
    Ok(StressField {
        tau,
        grad_tau: None,
        omega,
        we,
    })
}

/// `∂ᵢτⱼₖ = (ω/We) Σₐ μₐ Σ_ℓm ∂ᵢG_ℓm S′(Gₐ)_ℓmjk` with `grad_g` cell-major like the field.
pub fn assemble_grad_tau(
    field: &AgeTimeField,
    grad_g: &[Tensor3],
    measure: &StrainMeasure,
    omega: f64,
    we: f64,
) -> Result<Vec<Tensor3>> {
    let pre = prefactor(omega, we)?;
    let d = field.dim();
    let n_ages = field.n_ages();
    if grad_g.len() != field.values().len() {
        return Err(Error::GridMismatch {
            samples: grad_g.len(),
            nodes: field.values().len(),
        });
    }
    if pre == 0.0 {
        return Ok(vec![Tensor3::zeros(d); field.n_cells()]);
    }
    let weights = field.grid().weights();
    (0..field.n_cells())
        .into_par_iter()
        .map(|c| {
            let mut acc = Tensor3::zeros(d);
            for (a, (g, w)) in field.column(c).iter().zip(weights).enumerate() {
                let dg = &grad_g[c * n_ages + a];
                if dg.norm() == 0.0 {
                    continue;
                }
                let h = measure.derivative(g).map_err(|e| e.at(c, a))?;
                for i in 0..d {
                    let comp = h.contract_left(&dg.component(i)).scale(*w);
                    let mut cur = acc.component(i);
                    cur += comp;
                    acc.set_component(i, &cur);
                }
            }
            Ok(acc.scale(pre))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressBoundReport {
    /// `max |S(G)|` over the field.
    pub s0: f64,
    /// `max |S′(G)|` over the field (zero when gradients are not checked).
    pub s1: f64,
    pub max_grad_g: f64,
    pub max_tau: f64,
    pub max_grad_tau: f64,
    /// `max |τ| / ((ω/We) S₀ Σμ)`
    pub tau_ratio: f64,
    /// `max |∇τ| / ((ω/We) S₁ max|∇G| Σμ)`
    pub grad_ratio: f64,
}

fn ratio(value: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        value / bound
    } else if value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Checks `|τ| ≤ (ω/We)·S₀·Σμ` and, when gradients are present,
/// `|∇τ| ≤ (ω/We)·S₁·max|∇G|·Σμ` in every cell.
pub fn stress_bound_report(
    stress: &StressField,
    measure: &StrainMeasure,
    field: &AgeTimeField,
    grad_g: Option<&[Tensor3]>,
) -> Result<StressBoundReport> {
    let pre = prefactor(stress.omega, stress.we)?;
    let mass: f64 = field.grid().weights().iter().map(|w| w.abs()).sum();
    let s0 = field
        .values()
        .par_iter()
        .map(|g| measure.evaluate(g).map(|s| s.norm()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    let max_tau = stress.max_norm();
    let tau_ratio = ratio(max_tau, pre * s0 * mass);

    let (s1, max_grad_g, max_grad_tau, grad_ratio) = match (grad_g, &stress.grad_tau) {
        (Some(gg), Some(gt)) => {
            let s1 = field
                .values()
                .par_iter()
                .map(|g| measure.derivative(g).map(|h| norm4(&h)))
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
            let mg = gg.iter().map(|t| t.norm()).fold(0.0, f64::max);
            let mt = gt.iter().map(|t| t.norm()).fold(0.0, f64::max);
            (s1, mg, mt, ratio(mt, pre * s1 * mg * mass))
        }
        _ => (0.0, 0.0, 0.0, 0.0),
    };
    let report = StressBoundReport {
        s0,
        s1,
        max_grad_g,
        max_tau,
        max_grad_tau,
        tau_ratio,
        grad_ratio,
    };
    if tau_ratio > 1.0 + BOUND_SLACK {
        return Err(Error::BoundViolated {
            what: "stress magnitude".into(),
            ratio: tau_ratio,
            witness: None,
        });
    }
    if grad_ratio > 1.0 + BOUND_SLACK {
        return Err(Error::BoundViolated {
            what: "stress gradient".into(),
            ratio: grad_ratio,
            witness: None,
        });
    }
    Ok(report)
}
