//! Global, K-way and pair-restricted partial transposes.
//!
//! A transpose with focus `p` replaces the element at `(|i⟩, |j⟩)` by the one
//! at `(|i'⟩, |j'⟩)` where `i'` and `j'` have their `p` components swapped.
//! The restricted variants only do this for elements whose bra and ket labels
//! differ in a prescribed set of subsystems and copy everything else.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{DensityOperator, SubsystemLayout};

/// Which matrix elements get transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransposeKind {
    Global,
    KWay(usize),
    PairRestricted { partner: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransposeSpec {
    pub kind: TransposeKind,
    pub focus: usize,
}

impl TransposeSpec {
    pub fn global(focus: usize) -> Self {
        Self {
            kind: TransposeKind::Global,
            focus,
        }
    }

    pub fn kway(k: usize, focus: usize) -> Self {
        Self {
            kind: TransposeKind::KWay(k),
            focus,
        }
    }

    pub fn pair(focus: usize, partner: usize) -> Self {
        Self {
            kind: TransposeKind::PairRestricted { partner },
            focus,
        }
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<CMatrix> {
        match self.kind {
            TransposeKind::Global => global_pt(rho, self.focus),
            TransposeKind::KWay(k) => kway_pt(rho, k, self.focus),
            TransposeKind::PairRestricted { partner } => pair_pt(rho, self.focus, partner),
        }
    }
}

/// Number of subsystems in which the labels of basis states `r` and `c` differ.
pub fn differing_count(r: usize, c: usize, layout: &SubsystemLayout) -> Result<usize> {
    let a = layout.multi_index(r)?;
    let b = layout.multi_index(c)?;
    Ok(a.iter().zip(&b).filter(|(x, y)| x != y).count())
}

/// Applies the focus swap to every element accepted by `select`, which sees
/// the two multi-indices.
fn transpose_where<F>(m: &CMatrix, layout: &SubsystemLayout, p: usize, select: F) -> Result<CMatrix>
where
    F: Fn(&[usize], &[usize]) -> bool,
{
    layout.check_subsystem(p)?;
    let n = layout.total_dim();
    if m.shape() != (n, n) {
        return Err(Error::Argument(format!(
            "matrix is {}x{}, layout needs {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    let multi = layout.all_multi_indices();
    let stride: usize = layout.dims()[p + 1..].iter().product();
    let mut out = m.clone();
    for r in 0..n {
        for c in 0..n {
            let (ir, ic) = (&multi[r], &multi[c]);
            if ir[p] == ic[p] || !select(ir, ic) {
                continue;
            }
            // swap the focus labels between bra and ket
            let src_r = r + ic[p] * stride - ir[p] * stride;
            let src_c = c + ir[p] * stride - ic[p] * stride;
            out[(r, c)] = m[(src_r, src_c)];
        }
    }
    let defect = linalg::hermiticity_defect(&out);
    if defect > 1e-14 {
        return Err(Error::Invariant(format!(
            "partial transpose lost Hermiticity (defect {defect:e})"
        )));
    }
    Ok(out)
}

fn count_differing(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// ρ^{T_p}: transpose of every index belonging to subsystem `p`.
pub fn global_pt(rho: &DensityOperator, p: usize) -> Result<CMatrix> {
    global_pt_matrix(rho.matrix(), rho.layout(), p)
}

pub fn global_pt_matrix(m: &CMatrix, layout: &SubsystemLayout, p: usize) -> Result<CMatrix> {
    transpose_where(m, layout, p, |_, _| true)
}

/// ρ_K^{T_p}: only elements whose labels differ in exactly `k` subsystems are
/// transposed. `2 ≤ k ≤ N`.
pub fn kway_pt(rho: &DensityOperator, k: usize, p: usize) -> Result<CMatrix> {
    let n = rho.num_subsystems();
    if k < 2 || k > n {
        return Err(Error::Argument(format!("K={k} outside 2..={n}")));
    }
    transpose_where(rho.matrix(), rho.layout(), p, |a, b| {
        count_differing(a, b) == k
    })
}

/// Transpose restricted to elements that differ in the focus alone. These are
/// the coherences the K-way transposes leave out; for a real density operator
/// the result equals ρ.
pub fn focus_coherence_pt(rho: &DensityOperator, p: usize) -> Result<CMatrix> {
    transpose_where(rho.matrix(), rho.layout(), p, |a, b| {
        count_differing(a, b) == 1
    })
}

/// 2-way transpose restricted to elements whose labels differ in exactly `p`
/// and `partner`. Three subsystems only.
pub fn pair_pt(rho: &DensityOperator, p: usize, partner: usize) -> Result<CMatrix> {
    let layout = rho.layout();
    if layout.num_subsystems() != 3 {
        return Err(Error::Unsupported(format!(
            "pair-restricted transpose needs 3 subsystems, got {}",
            layout.num_subsystems()
        )));
    }
    layout.check_subsystem(p)?;
    layout.check_subsystem(partner)?;
    if p == partner {
        return Err(Error::Argument(format!("partner equals focus ({p})")));
    }
    let third = 3 - p - partner;
    transpose_where(rho.matrix(), layout, p, |a, b| {
        count_differing(a, b) == 2 && a[third] == b[third]
    })
}
