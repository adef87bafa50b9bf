//! Multi-index bookkeeping, pure states, density operators and local
//! unitaries.
//!
//! Basis ordering is row-major with the last subsystem fastest, so for three
//! qubits amplitude `k` belongs to `|i₁i₂i₃⟩` with `k = 4·i₁ + 2·i₂ + i₃`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::rng;
use crate::tolerance::TOL;

/// Local dimensions of the subsystems, first subsystem slowest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    total_dim: usize,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Validation(
                "layout needs at least one subsystem".into(),
            ));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Validation(format!("subsystem dimension {d} < 2")));
        }
        let total_dim = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Validation("total dimension overflows".into()))?;
        Ok(Self { dims, total_dim })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit layout is valid")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, subsystem: usize) -> usize {
        self.dims[subsystem]
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    pub fn check_subsystem(&self, p: usize) -> Result<()> {
        if p >= self.dims.len() {
            return Err(Error::Index(format!(
                "subsystem {p} out of range for {} subsystems",
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Flat basis index of a multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.dims.len() {
            return Err(Error::Index(format!(
                "multi-index has {} components, layout has {}",
                multi.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (m, (&i, &d)) in multi.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(Error::Index(format!(
                    "component {m} is {i}, must be below {d}"
                )));
            }
            idx = idx * d + i;
        }
        Ok(idx)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn multi_index(&self, mut idx: usize) -> Result<Vec<usize>> {
        if idx >= self.total_dim {
            return Err(Error::Index(format!(
                "basis index {idx} out of range for dimension {}",
                self.total_dim
            )));
        }
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        Ok(out)
    }

    /// Multi-indices of every basis state, in basis order.
    pub fn all_multi_indices(&self) -> Vec<Vec<usize>> {
        (0..self.total_dim)
            .map(|k| self.multi_index(k).expect("in range"))
            .collect()
    }

    /// Layout restricted to the given subsystems (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            self.check_subsystem(k)?;
        }
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: CVector,
}

impl PureState {
    /// Validates length and normalization (within `1e-9`).
    pub fn new(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::Validation(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > TOL.norm {
            return Err(Error::Validation(format!(
                "state not normalized: norm={} (norm²={})",
                linalg::round_sig(norm, 12),
                linalg::round_sig(norm * norm, 12)
            )));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Scales the vector to unit norm first.
    pub fn normalized(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Validation(format!(
                "cannot normalize vector with norm={norm}"
            )));
        }
        Self::new(layout, amplitudes / C64::new(norm, 0.0))
    }

    pub fn from_real(layout: SubsystemLayout, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            layout,
            CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0))),
        )
    }

    /// Basis state `|multi⟩`.
    pub fn basis(layout: SubsystemLayout, multi: &[usize]) -> Result<Self> {
        let k = layout.flat_index(multi)?;
        let mut v = CVector::zeros(layout.total_dim());
        v[k] = c(1.0, 0.0);
        Self::new(layout, v)
    }

    /// (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
    pub fn ghz(n: usize) -> Self {
        let layout = SubsystemLayout::qubits(n);
        let mut v = CVector::zeros(layout.total_dim());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        v[0] = c(h, 0.0);
        v[layout.total_dim() - 1] = c(h, 0.0);
        Self::new(layout, v).expect("normalized")
    }

    /// Equal superposition of the single-excitation basis states on `n` qubits.
    pub fn w(n: usize) -> Self {
        let layout = SubsystemLayout::qubits(n);
        let mut v = CVector::zeros(layout.total_dim());
        let amp = 1.0 / (n as f64).sqrt();
        for m in 0..n {
            v[1 << (n - 1 - m)] = c(amp, 0.0);
        }
        Self::new(layout, v).expect("normalized")
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, multi: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.layout.flat_index(multi)?])
    }

    pub fn num_subsystems(&self) -> usize {
        self.layout.num_subsystems()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// |ψ⟩⟨ψ|.
    pub fn outer(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator {
            layout: self.layout.clone(),
            matrix: m,
        }
    }

    /// Reduced density operator on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        self.outer().partial_trace(keep)
    }

    pub fn apply_local_unitary(&self, u: &LocalUnitary) -> Result<PureState> {
        apply_local_unitary(self, u)
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: SubsystemLayout,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates shape, Hermiticity (1e-10), trace (1e-9) and positivity (λ_min ≥ -1e-9).
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Validation(format!(
                "matrix is {}x{}, layout needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        linalg::check_hermitian(&matrix, TOL.herm)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL.norm || tr.im.abs() > TOL.norm {
            return Err(Error::Validation(format!(
                "trace={} (expected 1)",
                linalg::round_sig(tr.re, 12)
            )));
        }
        let es = linalg::hermitian_eigensystem(&matrix)?;
        let min = es.eigenvalues[0];
        if min < -TOL.psd {
            return Err(Error::Validation(format!(
                "operator not positive semidefinite: smallest eigenvalue={min:e}"
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// Identity / total_dim.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        let matrix = CMatrix::identity(n, n) / c(n as f64, 0.0);
        Self { layout, matrix }
    }

    /// Σ p_i |ψ_i⟩⟨ψ_i| for states sharing a layout. Probabilities must sum to 1.
    pub fn mixture(members: &[(f64, PureState)]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Argument("empty mixture".into()))?;
        let layout = first.1.layout().clone();
        let n = layout.total_dim();
        let mut m = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for (p, psi) in members {
            if psi.layout() != &layout {
                return Err(Error::Validation(
                    "mixture members have different layouts".into(),
                ));
            }
            if *p < 0.0 {
                return Err(Error::Validation(format!("negative probability p={p}")));
            }
            total += p;
            m += psi.outer().matrix * c(*p, 0.0);
        }
        if (total - 1.0).abs() > TOL.norm {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Self::new(layout, m)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn num_subsystems(&self) -> usize {
        self.layout.num_subsystems()
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product_re(&self.matrix, &self.matrix)
    }

    pub fn eigensystem(&self) -> Result<linalg::EigenSystem> {
        linalg::hermitian_eigensystem(&self.matrix)
    }

    /// Trace over every subsystem not in `keep`. The output keeps the
    /// subsystems in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::Argument(
                "partial trace needs a nonempty keep set".into(),
            ));
        }
        let n_sub = self.layout.num_subsystems();
        let mut seen = vec![false; n_sub];
        for &k in keep {
            self.layout.check_subsystem(k)?;
            if seen[k] {
                return Err(Error::Argument(format!("subsystem {k} listed twice")));
            }
            seen[k] = true;
        }
        let out_layout = self.layout.restrict(keep)?;
        let traced: Vec<usize> = (0..n_sub).filter(|m| !seen[*m]).collect();
        let traced_layout = if traced.is_empty() {
            None
        } else {
            Some(self.layout.restrict(&traced)?)
        };
        let d_out = out_layout.total_dim();

        // Full multi-index from (kept, traced) parts.
        let compose = |kept: &[usize], tr: &[usize]| -> usize {
            let mut full = vec![0; n_sub];
            for (slot, &k) in keep.iter().enumerate() {
                full[k] = kept[slot];
            }
            for (slot, &t) in traced.iter().enumerate() {
                full[t] = tr[slot];
            }
            self.layout
                .flat_index(&full)
                .expect("valid by construction")
        };
        let kept_multi = out_layout.all_multi_indices();
        let tr_multi: Vec<Vec<usize>> = match &traced_layout {
            Some(l) => l.all_multi_indices(),
            None => vec![vec![]],
        };
        let mut out = CMatrix::zeros(d_out, d_out);
        for r in 0..d_out {
            for col in 0..d_out {
                let mut s = c(0.0, 0.0);
                for t in &tr_multi {
                    let i = compose(&kept_multi[r], t);
                    let j = compose(&kept_multi[col], t);
                    s += self.matrix[(i, j)];
                }
                out[(r, col)] = s;
            }
        }
        Ok(DensityOperator {
            layout: out_layout,
            matrix: out,
        })
    }

    /// Wraps a matrix already known to be a valid density operator (used for
    /// internally constructed results; skips the eigen check).
    pub(crate) fn from_trusted(layout: SubsystemLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }
}

/// Unitary acting on a single subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    target: usize,
    matrix: CMatrix,
}

impl LocalUnitary {
    /// Validates U†U = 1 within 1e-12.
    pub fn new(target: usize, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Validation("local unitary must be square".into()));
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect > TOL.unitary {
            return Err(Error::Validation(format!(
                "matrix not unitary: max |U^dagger U - 1| = {defect:e}"
            )));
        }
        Ok(Self { target, matrix })
    }

    pub fn identity(target: usize, dim: usize) -> Self {
        Self {
            target,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Real rotation `[[cos(α/2), sin(α/2)], [-sin(α/2), cos(α/2)]]`.
    pub fn rotation(target: usize, alpha: f64) -> Self {
        let (s, co) = (alpha / 2.0).sin_cos();
        Self {
            target,
            matrix: CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)]),
        }
    }

    /// Pauli X.
    pub fn bit_flip(target: usize) -> Self {
        Self {
            target,
            matrix: CMatrix::from_row_slice(
                2,
                2,
                &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            ),
        }
    }

    /// Haar-distributed unitary of side `dim` (QR of a complex Ginibre matrix
    /// with the phase correction on R's diagonal).
    pub fn haar_random<R: Rng + ?Sized>(target: usize, dim: usize, rng: &mut R) -> Self {
        Self {
            target,
            matrix: haar_unitary(dim, rng),
        }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

pub(crate) fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        c(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Applies `u` to its target subsystem.
pub fn apply_local_unitary(psi: &PureState, u: &LocalUnitary) -> Result<PureState> {
    let layout = psi.layout();
    layout.check_subsystem(u.target)?;
    let d = layout.dim(u.target);
    if u.matrix.nrows() != d {
        return Err(Error::Argument(format!(
            "unitary of side {} on subsystem of dimension {d}",
            u.matrix.nrows()
        )));
    }
    // stride of the target index
    let stride: usize = layout.dims()[u.target + 1..].iter().product();
    let block = d * stride;
    let amps = psi.amplitudes();
    let mut out = CVector::zeros(amps.len());
    for base in (0..amps.len()).step_by(block) {
        for low in 0..stride {
            for i in 0..d {
                let mut s = c(0.0, 0.0);
                for j in 0..d {
                    s += u.matrix[(i, j)] * amps[base + j * stride + low];
                }
                out[base + i * stride + low] = s;
            }
        }
    }
    Ok(PureState {
        layout: layout.clone(),
        amplitudes: out,
    })
}

/// Applies each unitary in turn.
pub fn apply_local_unitaries<'a>(
    psi: &PureState,
    us: impl IntoIterator<Item = &'a LocalUnitary>,
) -> Result<PureState> {
    us.into_iter()
        .try_fold(psi.clone(), |acc, u| apply_local_unitary(&acc, u))
}

/// Haar-random pure state: complex standard normals, normalized. The same
/// seed always yields the same amplitudes.
pub fn haar_random_pure(layout: &SubsystemLayout, seed: u64) -> PureState {
    let mut r = rng::stream(seed, 0);
    haar_random_pure_with(layout, &mut r)
}

pub fn haar_random_pure_with<R: Rng + ?Sized>(layout: &SubsystemLayout, rng: &mut R) -> PureState {
    let n = layout.total_dim();
    loop {
        let v = CVector::from_fn(n, |_, _| {
            c(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        });
        if v.norm() > 1e-12 {
            return PureState::normalized(layout.clone(), v).expect("nonzero vector");
        }
    }
}

/// Random mixed state of rank ≤ `rank`: mixture of `rank` Haar states with
/// uniform-simplex weights.
pub fn random_mixed_with<R: Rng + ?Sized>(
    layout: &SubsystemLayout,
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let rank = rank.max(1);
    let weights: Vec<f64> = (0..rank)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    let n = layout.total_dim();
    let mut m = CMatrix::zeros(n, n);
    for w in weights {
        let psi = haar_random_pure_with(layout, rng);
        m += psi.outer().matrix * c(w / total, 0.0);
    }
    DensityOperator::from_trusted(layout.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q3() -> SubsystemLayout {
        SubsystemLayout::qubits(3)
    }

    #[test]
    fn flat_index_examples() {
        let l = q3();
        assert_eq!(l.flat_index(&[0, 0, 0]).unwrap(), 0);
        assert_eq!(l.flat_index(&[1, 0, 1]).unwrap(), 5);
        assert_eq!(l.flat_index(&[1, 1, 0]).unwrap(), 6);
        assert!(matches!(l.flat_index(&[2, 0, 0]), Err(Error::Index(_))));
        assert!(matches!(l.flat_index(&[0, 0]), Err(Error::Index(_))));
    }

    #[test]
    fn layout_validation() {
        assert!(SubsystemLayout::new(vec![]).is_err());
        assert!(SubsystemLayout::new(vec![2, 1]).is_err());
        assert_eq!(SubsystemLayout::new(vec![2, 3, 2]).unwrap().total_dim(), 12);
    }

    proptest! {
        #[test]
        fn flat_index_is_bijective(dims in proptest::collection::vec(2usize..4, 1..5)) {
            let l = SubsystemLayout::new(dims).unwrap();
            for k in 0..l.total_dim() {
                let m = l.multi_index(k).unwrap();
                prop_assert_eq!(l.flat_index(&m).unwrap(), k);
            }
            prop_assert!(l.multi_index(l.total_dim()).is_err());
        }
    }

    #[test]
    fn outer_examples() {
        let zero = PureState::basis(q3(), &[0, 0, 0]).unwrap().outer();
        assert_eq!(zero.matrix()[(0, 0)], c(1.0, 0.0));
        assert!((zero.matrix().norm() - 1.0).abs() < 1e-15);

        let g = PureState::ghz(3).outer();
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((g.matrix()[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((g.matrix().norm() - 1.0).abs() < 1e-15);

        let r = haar_random_pure(&q3(), 42).outer();
        assert!((r.trace() - 1.0).abs() < 1e-12);
        assert!(DensityOperator::new(q3(), r.matrix().clone()).is_ok());
    }

    #[test]
    fn unnormalized_state_rejected() {
        let v = CVector::from_element(8, c(0.3, 0.0));
        let err = PureState::new(q3(), v).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn partial_trace_examples() {
        let ghz_ab = PureState::ghz(3).outer().partial_trace(&[0, 1]).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = c(0.5, 0.0);
        expect[(3, 3)] = c(0.5, 0.0);
        assert!(linalg::max_abs_diff(ghz_ab.matrix(), &expect) < 1e-15);

        let w_a = PureState::w(3).outer().partial_trace(&[0]).unwrap();
        assert!((w_a.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((w_a.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!(w_a.matrix()[(0, 1)].norm() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::from_real(q3(), &[h, h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let ab = plus.outer().partial_trace(&[0, 1]).unwrap();
        let mut e = CMatrix::zeros(4, 4);
        e[(0, 0)] = c(1.0, 0.0);
        assert!(linalg::max_abs_diff(ab.matrix(), &e) < 1e-15);

        assert!(matches!(
            PureState::ghz(3).outer().partial_trace(&[]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let psi = haar_random_pure(&q3(), 3);
        let ab = psi.outer().partial_trace(&[0, 1]).unwrap();
        let ba = psi.outer().partial_trace(&[1, 0]).unwrap();
        // swap of the two qubits: |ij⟩ ↔ |ji⟩
        let perm = [0, 2, 1, 3];
        for r in 0..4 {
            for col in 0..4 {
                assert!((ab.matrix()[(r, col)] - ba.matrix()[(perm[r], perm[col])]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn single_site_marginals_are_valid() {
        for seed in 0..20 {
            let rho = haar_random_pure(&SubsystemLayout::qubits(4), seed).outer();
            for k in 0..4 {
                let r = rho.partial_trace(&[k]).unwrap();
                assert!(DensityOperator::new(r.layout().clone(), r.matrix().clone()).is_ok());
            }
        }
    }

    #[test]
    fn local_unitary_examples() {
        let psi = PureState::ghz(3);
        let same = apply_local_unitary(&psi, &LocalUnitary::rotation(2, 0.0)).unwrap();
        assert_eq!(same, psi);

        let zero = PureState::basis(q3(), &[0, 0, 0]).unwrap();
        let flipped = apply_local_unitary(&zero, &LocalUnitary::bit_flip(0)).unwrap();
        assert_eq!(flipped, PureState::basis(q3(), &[1, 0, 0]).unwrap());

        let bad = LocalUnitary::identity(0, 3);
        assert!(matches!(
            apply_local_unitary(&zero, &bad),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            apply_local_unitary(&zero, &LocalUnitary::identity(5, 2)),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn local_unitaries_preserve_inner_products() {
        let mut r = rng::stream(9, 0);
        let l = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        for _ in 0..50 {
            let a = haar_random_pure_with(&l, &mut r);
            let b = haar_random_pure_with(&l, &mut r);
            let t = rand::Rng::random_range(&mut r, 0..3);
            let u = LocalUnitary::haar_random(t, l.dim(t), &mut r);
            assert!(linalg::unitarity_defect(u.matrix()) < 1e-12);
            let ua = apply_local_unitary(&a, &u).unwrap();
            let ub = apply_local_unitary(&b, &u).unwrap();
            assert!((ua.inner(&ub) - a.inner(&b)).norm() < 1e-12);
            assert!((ua.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_sampling_is_deterministic() {
        let l = q3();
        let a = haar_random_pure(&l, 17);
        let b = haar_random_pure(&l, 17);
        let other = haar_random_pure(&l, 18);
        assert_eq!(a, b);
        assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
        assert!(a.fidelity(&other) < 1.0);
    }

    #[test]
    fn rejects_invalid_density_operators() {
        let l = SubsystemLayout::qubits(1);
        let not_psd =
            CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityOperator::new(l.clone(), not_psd).is_err());
        let bad_trace = CMatrix::identity(2, 2);
        let err = DensityOperator::new(l, bad_trace).unwrap_err();
        assert!(err.to_string().contains("trace=2"));
    }
}
