//! One-tangles, Wootters tangles of two-qubit states and the three tangle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::state::{DensityOperator, PureState};

/// τ_{p(rest)} = 4 det ρ^p of a pure state's single-qubit marginal.
pub fn one_tangle(psi: &PureState, p: usize) -> Result<f64> {
    psi.layout().check_subsystem(p)?;
    if psi.layout().dim(p) != 2 {
        return Err(Error::Argument(format!("subsystem {p} is not a qubit")));
    }
    let r = psi.reduced(&[p])?;
    let m = r.matrix();
    Ok(4.0 * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re)
}

fn sigma_yy() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    // σ_y ⊗ σ_y is real and anti-diagonal: (-1, 1, 1, -1) from top right
    s[(0, 3)] = c(-1.0, 0.0);
    s[(1, 2)] = c(1.0, 0.0);
    s[(2, 1)] = c(1.0, 0.0);
    s[(3, 0)] = c(-1.0, 0.0);
    s
}

fn check_two_qubit(rho: &DensityOperator) -> Result<()> {
    if !rho.layout().is_qubits() || rho.num_subsystems() != 2 {
        return Err(Error::Argument(format!(
            "expected a two-qubit operator, got dims {:?}",
            rho.layout().dims()
        )));
    }
    Ok(())
}

/// (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
pub fn spin_flip(rho: &DensityOperator) -> Result<CMatrix> {
    check_two_qubit(rho)?;
    let s = sigma_yy();
    Ok(&s * rho.matrix().conjugate() * &s)
}

/// Wootters λ's, descending, as the singular values of Xᵀ(σ_y⊗σ_y)X for
/// any factor ρ = XX†. Taking singular values directly avoids square roots
/// of tiny eigenvalues.
pub fn wootters_lambdas_from_factor(x: &CMatrix) -> Result<[f64; 4]> {
    if x.nrows() != 4 {
        return Err(Error::Argument(format!(
            "factor needs 4 rows, got {}",
            x.nrows()
        )));
    }
    let m = x.transpose() * sigma_yy() * x;
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let mut out = [0.0; 4];
    for (slot, v) in out.iter_mut().zip(sv) {
        *slot = v;
    }
    Ok(out)
}

/// Wootters λ's of a two-qubit density operator, from its spectral factor.
pub fn wootters_lambdas(rho: &DensityOperator) -> Result<[f64; 4]> {
    check_two_qubit(rho)?;
    let es = rho.eigensystem()?;
    let keep: Vec<usize> = (0..4).filter(|&i| es.eigenvalues[i] > 0.0).collect();
    let x = CMatrix::from_fn(4, keep.len(), |r, k| {
        let i = keep[k];
        es.eigenvectors[(r, i)] * es.eigenvalues[i].sqrt()
    });
    wootters_lambdas_from_factor(&x)
}

/// Factor of tr_rest |ψ⟩⟨ψ| on (p, q): rows are the (i_p, i_q) labels,
/// columns the label of the remaining qubit.
fn pair_factor(psi: &PureState, p: usize, q: usize) -> Result<CMatrix> {
    let r = (0..3).find(|&k| k != p && k != q).expect("three qubits");
    let mut x = CMatrix::zeros(4, 2);
    for (k, multi) in psi.layout().all_multi_indices().into_iter().enumerate() {
        x[(2 * multi[p] + multi[q], multi[r])] = psi.amplitudes()[k];
    }
    Ok(x)
}

/// Concurrence max{λ₁-λ₂-λ₃-λ₄, 0}.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// τ = concurrence².
pub fn wootters_tangle(rho: &DensityOperator) -> Result<f64> {
    Ok(concurrence(rho)?.powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangleReport {
    pub focus: usize,
    /// τ_{p(rest)}.
    pub tau_focus: f64,
    /// τ_{p,partner} keyed by partner.
    pub tau_pairs: BTreeMap<usize, f64>,
    pub tau3: f64,
}

/// τ₃ = τ_{A(BC)} - τ_{AB} - τ_{AC}.
pub fn three_tangle(psi: &PureState) -> Result<TangleReport> {
    three_tangle_focus(psi, 0)
}

/// Same decomposition with any qubit as focus.
pub fn three_tangle_focus(psi: &PureState, p: usize) -> Result<TangleReport> {
    if !psi.layout().is_qubits() || psi.num_subsystems() != 3 {
        return Err(Error::Argument(format!(
            "three tangle needs three qubits, got dims {:?}",
            psi.layout().dims()
        )));
    }
    psi.layout().check_subsystem(p)?;
    let tau_focus = one_tangle(psi, p)?;
    let mut tau_pairs = BTreeMap::new();
    for partner in (0..3).filter(|&q| q != p) {
        let l = wootters_lambdas_from_factor(&pair_factor(psi, p, partner)?)?;
        tau_pairs.insert(partner, (l[0] - l[1] - l[2] - l[3]).max(0.0).powi(2));
    }
    let tau3 = tau_focus - tau_pairs.values().sum::<f64>();
    Ok(TangleReport {
        focus: p,
        tau_focus,
        tau_pairs,
        tau3,
    })
}
