//! Global negativity, K-way negativities and partial K-way negativities.
//!
//! Partial K-way negativities weigh each K-way transpose against the negative
//! subspace of the global transpose:
//!
//! ```text
//! E_K^p = -2/(d_p-1) Tr(P₋ ρ_K^{T_p})        P₋ = projector onto λ < 0 of ρ^{T_p}
//! E_0^p = -2(N-2)/(d_p-1) Tr(P₋ ρ)
//! E_1^p = -2/(d_p-1) Tr(P₋ (ρ_1^{T_p} - ρ))
//! N_G^p = Σ_{K≥2} E_K^p - E_0^p + E_1^p
//! ```
//!
//! `E_1` collects the coherences that differ only in the focus subsystem.
//! It vanishes whenever those coherences are real, and then the familiar rule
//! `N_G = Σ E_K - E_0` holds on its own.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ReIm};
use crate::state::DensityOperator;
use crate::tolerance::TOL;
use crate::transpose;

/// (‖M‖₁ - 1)/(d_p - 1) with the trace norm taken from singular values.
pub fn negativity_from_pt(m: &CMatrix, d_p: usize) -> Result<f64> {
    if d_p < 2 {
        return Err(Error::Argument(format!("focus dimension {d_p} < 2")));
    }
    Ok((linalg::trace_norm(m) - 1.0) / (d_p as f64 - 1.0))
}

/// 2/(d_p - 1) · Σ|λ₋|, the spectral route to the same number for a
/// Hermitian trace-one `m`.
pub fn negativity_from_spectrum(m: &CMatrix, d_p: usize) -> Result<f64> {
    if d_p < 2 {
        return Err(Error::Argument(format!("focus dimension {d_p} < 2")));
    }
    let es = linalg::hermitian_eigensystem(m)?;
    let neg: f64 = es
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum();
    Ok(2.0 * neg / (d_p as f64 - 1.0))
}

/// Eigenpairs of a Hermitian matrix with λ < -1e-10.
pub fn negative_subspace(m: &CMatrix) -> Result<Vec<(f64, CVector)>> {
    Ok(linalg::hermitian_eigensystem(m)?.negative_pairs(TOL.eig))
}

/// Projector onto the span of [`negative_subspace`].
pub fn negative_projector(m: &CMatrix) -> Result<CMatrix> {
    let pairs = negative_subspace(m)?;
    Ok(linalg::projector(pairs.iter().map(|(_, v)| v), m.nrows()))
}

fn weight(rho: &DensityOperator, p: usize) -> Result<f64> {
    rho.layout().check_subsystem(p)?;
    Ok(-2.0 / (rho.layout().dim(p) as f64 - 1.0))
}

/// Negative-subspace projector of ρ^{T_p}.
pub fn global_negative_projector(rho: &DensityOperator, p: usize) -> Result<CMatrix> {
    negative_projector(&transpose::global_pt(rho, p)?)
}

/// N_G^p.
pub fn global_negativity(rho: &DensityOperator, p: usize) -> Result<f64> {
    rho.layout().check_subsystem(p)?;
    negativity_from_pt(&transpose::global_pt(rho, p)?, rho.layout().dim(p))
}

/// N_K^p, the negativity of the K-way transpose itself.
pub fn kway_negativity(rho: &DensityOperator, k: usize, p: usize) -> Result<f64> {
    negativity_from_pt(&transpose::kway_pt(rho, k, p)?, rho.layout().dim(p))
}

/// E_K^p = -2/(d_p-1) Tr(P₋ ρ_K^{T_p}).
pub fn partial_kway_negativity(rho: &DensityOperator, k: usize, p: usize) -> Result<f64> {
    let w = weight(rho, p)?;
    let pk = transpose::kway_pt(rho, k, p)?;
    let proj = global_negative_projector(rho, p)?;
    Ok(w * linalg::trace_product_re(&proj, &pk))
}

/// E_0^p = -2(N-2)/(d_p-1) Tr(P₋ ρ).
pub fn e0_negativity(rho: &DensityOperator, p: usize) -> Result<f64> {
    let n = rho.num_subsystems();
    let w = weight(rho, p)?;
    if n <= 2 {
        return Ok(0.0);
    }
    let proj = global_negative_projector(rho, p)?;
    Ok(w * (n as f64 - 2.0) * linalg::trace_product_re(&proj, rho.matrix()))
}

/// E_1^p = -2/(d_p-1) Tr(P₋ (ρ_1^{T_p} - ρ)). Zero when every coherence that
/// differs only in the focus label is real.
pub fn e1_negativity(rho: &DensityOperator, p: usize) -> Result<f64> {
    let w = weight(rho, p)?;
    let diff = transpose::focus_coherence_pt(rho, p)? - rho.matrix();
    let proj = global_negative_projector(rho, p)?;
    Ok(w * linalg::trace_product_re(&proj, &diff))
}

/// E_2^{p-partner} for three subsystems:
/// `-2/(d_p-1) Tr(P₋ ρ_2^{T_{p-partner}}) + 1/(d_p-1) Tr(P₋ ρ)`.
///
/// The second term is half of the `ρ` the 2-way split subtracts, so the two
/// pair values always add up to E_2^p. It vanishes whenever the state is
/// orthogonal to the negative subspace, which is the case for canonical
/// three-qubit states.
pub fn pair_partial_negativity(rho: &DensityOperator, p: usize, partner: usize) -> Result<f64> {
    let w = weight(rho, p)?;
    let pp = transpose::pair_pt(rho, p, partner)?;
    let proj = global_negative_projector(rho, p)?;
    Ok(w * (linalg::trace_product_re(&proj, &pp)
        - 0.5 * linalg::trace_product_re(&proj, rho.matrix())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativePair {
    pub eigenvalue: f64,
    pub vector: Vec<ReIm>,
}

/// Everything the negative subspace of ρ^{T_p} says about one focus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub focus: usize,
    pub n_global: f64,
    /// N_K^p for K = 2..=N.
    pub n_kway: BTreeMap<usize, f64>,
    /// E_K^p for K = 2..=N.
    pub e_partial: BTreeMap<usize, f64>,
    pub e0: f64,
    /// Focus-only coherence term; zero for real coherences.
    pub e1: f64,
    /// E_2^{p-partner}, three subsystems only.
    pub pair_split: BTreeMap<usize, f64>,
    pub negative_eigenpairs: Vec<NegativePair>,
    /// |N_G - (Σ E_K - E_0)|.
    pub sum_residual: f64,
    /// |N_G - (Σ E_K - E_0 + E_1)|.
    pub extended_residual: f64,
    /// K values with E_K^p > N_G^p + 1e-9 while |E_0| ≤ 1e-9.
    pub inequality_violations: Vec<usize>,
}

impl NegativityReport {
    pub fn e(&self, k: usize) -> f64 {
        self.e_partial.get(&k).copied().unwrap_or(0.0)
    }
}

/// Builds the full report for focus `p`.
pub fn negativity_report(rho: &DensityOperator, p: usize) -> Result<NegativityReport> {
    let layout = rho.layout();
    layout.check_subsystem(p)?;
    let n = layout.num_subsystems();
    let d_p = layout.dim(p);
    let w = -2.0 / (d_p as f64 - 1.0);

    let global = transpose::global_pt(rho, p)?;
    let n_global = negativity_from_pt(&global, d_p)?;
    let pairs = negative_subspace(&global)?;
    let proj = linalg::projector(pairs.iter().map(|(_, v)| v), global.nrows());
    let overlap = linalg::trace_product_re(&proj, rho.matrix());

    let mut n_kway = BTreeMap::new();
    let mut e_partial = BTreeMap::new();
    for k in 2..=n {
        let pk = transpose::kway_pt(rho, k, p)?;
        n_kway.insert(k, negativity_from_pt(&pk, d_p)?);
        e_partial.insert(k, w * linalg::trace_product_re(&proj, &pk));
    }
    let e0 = if n > 2 {
        w * (n as f64 - 2.0) * overlap
    } else {
        0.0
    };
    let one = transpose::focus_coherence_pt(rho, p)? - rho.matrix();
    let e1 = w * linalg::trace_product_re(&proj, &one);

    let mut pair_split = BTreeMap::new();
    if n == 3 {
        for partner in (0..3).filter(|&q| q != p) {
            let pp = transpose::pair_pt(rho, p, partner)?;
            pair_split.insert(
                partner,
                w * (linalg::trace_product_re(&proj, &pp) - 0.5 * overlap),
            );
        }
    }

    let sum_e: f64 = e_partial.values().sum();
    let sum_residual = (n_global - (sum_e - e0)).abs();
    let extended_residual = (n_global - (sum_e - e0 + e1)).abs();
    let inequality_violations = if e0.abs() <= TOL.sum_rule {
        e_partial
            .iter()
            .filter(|(_, &e)| e > n_global + TOL.sum_rule)
            .map(|(&k, _)| k)
            .collect()
    } else {
        Vec::new()
    };

    Ok(NegativityReport {
        focus: p,
        n_global,
        n_kway,
        e_partial,
        e0,
        e1,
        pair_split,
        negative_eigenpairs: pairs
            .iter()
            .map(|(l, v)| NegativePair {
                eigenvalue: *l,
                vector: v.iter().map(|&z| z.into()).collect(),
            })
            .collect(),
        sum_residual,
        extended_residual,
        inequality_violations,
    })
}
