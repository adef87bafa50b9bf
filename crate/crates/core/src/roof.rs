//! Convex-roof extensions of the global and K-way negativities.
//!
//! Decompositions of ρ = Σ λ_k |e_k⟩⟨e_k| are parameterized by isometries W:
//! the members `|φ_j⟩ = Σ_k W_jk √λ_k |e_k⟩` reproduce ρ for any W with
//! orthonormal columns. The search moves W by random Givens rotations of two
//! rows with a shrinking angle and keeps a move only if the ensemble average
//! drops. The reported value is therefore an upper bound on the roof.

use nalgebra::RowDVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::negativity;
use crate::rng;
use crate::state::{haar_unitary, DensityOperator, PureState, SubsystemLayout};

/// Probability-weighted pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    /// Probabilities must be positive and sum to 1 within 1e-9.
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Validation("ensemble has no members".into()));
        }
        let layout = members[0].1.layout();
        let mut total = 0.0;
        for (p, psi) in &members {
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::Validation(format!(
                    "member probability p={p} is not positive"
                )));
            }
            if psi.layout() != layout {
                return Err(Error::Validation(
                    "ensemble members have different layouts".into(),
                ));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Σ p_i |ψ_i⟩⟨ψ_i|.
    pub fn density(&self) -> DensityOperator {
        let layout = self.members[0].1.layout().clone();
        let n = layout.total_dim();
        let mut m = CMatrix::zeros(n, n);
        for (p, psi) in &self.members {
            m += psi.amplitudes() * psi.amplitudes().adjoint() * c(*p, 0.0);
        }
        DensityOperator::from_trusted(layout, m)
    }

    /// Frobenius distance between the ensemble's density and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityOperator) -> f64 {
        (self.density().matrix() - rho.matrix()).norm()
    }

    /// Σ p_i · measure(ψ_i).
    pub fn average<F>(&self, measure: F) -> Result<f64>
    where
        F: Fn(&PureState) -> Result<f64>,
    {
        let mut s = 0.0;
        for (p, psi) in &self.members {
            s += p * measure(psi)?;
        }
        Ok(s)
    }
}

/// Spectral decomposition, eigenvalues ≤ 1e-12 dropped.
pub fn eigen_ensemble(rho: &DensityOperator) -> Result<Ensemble> {
    let es = rho.eigensystem()?;
    let mut members = Vec::new();
    let kept: f64 = es.eigenvalues.iter().filter(|&&l| l > 1e-12).sum();
    for (i, &l) in es.eigenvalues.iter().enumerate().rev() {
        if l > 1e-12 {
            let psi = PureState::normalized(rho.layout().clone(), es.vector(i))?;
            members.push((l / kept, psi));
        }
    }
    Ensemble::new(members)
}

/// Nonzero eigenpairs scaled by √λ, as columns.
fn scaled_eigenvectors(rho: &DensityOperator) -> Result<CMatrix> {
    let es = rho.eigensystem()?;
    let keep: Vec<usize> = (0..es.len())
        .rev()
        .filter(|&i| es.eigenvalues[i] > 1e-12)
        .collect();
    let n = rho.dim();
    Ok(CMatrix::from_fn(n, keep.len(), |r, col| {
        let i = keep[col];
        es.eigenvectors[(r, i)] * es.eigenvalues[i].sqrt()
    }))
}

/// Rank of ρ as used by the ensemble parameterization (eigenvalues > 1e-12).
pub fn ensemble_rank(rho: &DensityOperator) -> Result<usize> {
    Ok(rho
        .eigensystem()?
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12)
        .count())
}

/// Members `|φ_j⟩ = Σ_k W_jk √λ_k |e_k⟩` for an isometry `w` with one
/// column per nonzero eigenvalue (largest first). The member count is the
/// number of rows of `w`; zero-weight members are dropped.
pub fn isometry_ensemble(rho: &DensityOperator, w: &CMatrix) -> Result<Ensemble> {
    let basis = scaled_eigenvectors(rho)?;
    members_from(rho, &basis, w)
}

fn members_from(rho: &DensityOperator, basis: &CMatrix, w: &CMatrix) -> Result<Ensemble> {
    let r = basis.ncols();
    if w.ncols() != r || w.nrows() < r {
        return Err(Error::Validation(format!(
            "isometry is {}x{}, need m x {r} with m ≥ {r}",
            w.nrows(),
            w.ncols()
        )));
    }
    let defect = linalg::unitarity_defect(w);
    if defect > 1e-10 {
        return Err(Error::Validation(format!(
            "columns not orthonormal: defect {defect:e}"
        )));
    }
    let mut members = Vec::new();
    for j in 0..w.nrows() {
        let phi = basis * w.row(j).transpose();
        let p = phi.norm_squared();
        if p > 1e-15 {
            members.push((p, PureState::normalized(rho.layout().clone(), phi)?));
        }
    }
    let total: f64 = members.iter().map(|(p, _)| p).sum();
    for m in &mut members {
        m.0 /= total;
    }
    Ensemble::new(members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoofMeasure {
    Global,
    /// K-way negativity N_K^p.
    KWay(usize),
}

impl RoofMeasure {
    /// Value on a pure state.
    pub fn pure_value(&self, psi: &PureState, p: usize) -> Result<f64> {
        self.value(&psi.outer(), p)
    }

    fn value(&self, rho: &DensityOperator, p: usize) -> Result<f64> {
        match *self {
            RoofMeasure::Global => negativity::global_negativity(rho, p),
            RoofMeasure::KWay(k) => negativity::kway_negativity(rho, k, p),
        }
    }
}

impl std::str::FromStr for RoofMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(RoofMeasure::Global),
            _ => match s.strip_prefix('k').and_then(|k| k.parse::<usize>().ok()) {
                Some(k) => Ok(RoofMeasure::KWay(k)),
                None => Err(Error::Argument(format!(
                    "measure must be global or kK, got {s:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoofBudget {
    pub restarts: usize,
    /// Ensemble size; `None` means min(2·rank, 8), never below the rank.
    pub members: Option<usize>,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for RoofBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            members: None,
            iterations: 600,
            seed: 0,
        }
    }
}

/// Outcome of the search. `value` is an upper bound on the convex roof.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub value: f64,
    pub certificate: Ensemble,
    pub restarts_used: usize,
    pub converged: bool,
    /// Average over the spectral decomposition, for reference.
    pub eigen_value: f64,
}

struct RestartOutcome {
    value: f64,
    w: CMatrix,
    converged: bool,
}

fn member_value(
    basis: &CMatrix,
    row: &RowDVector<C64>,
    measure: RoofMeasure,
    p: usize,
    layout: &SubsystemLayout,
) -> Result<f64> {
    let phi: CVector = basis * row.transpose();
    let weight = phi.norm_squared();
    if weight <= 1e-15 {
        return Ok(0.0);
    }
    let psi = phi / c(weight.sqrt(), 0.0);
    let rho = DensityOperator::from_trusted(layout.clone(), &psi * psi.adjoint());
    Ok(weight * measure.value(&rho, p)?)
}

fn run_restart(
    rho: &DensityOperator,
    basis: &CMatrix,
    m: usize,
    measure: RoofMeasure,
    p: usize,
    budget: &RoofBudget,
    index: usize,
) -> Result<RestartOutcome> {
    let r = basis.ncols();
    let layout = rho.layout();
    let mut gen = rng::stream(budget.seed, index as u64);
    // restart 0 starts from the spectral decomposition, the rest from random isometries
    let mut w = if index == 0 {
        CMatrix::identity(m, r)
    } else {
        haar_unitary(m, &mut gen).columns(0, r).into_owned()
    };
    let mut vals: Vec<f64> = (0..m)
        .map(|j| member_value(basis, &w.row(j).into_owned(), measure, p, layout))
        .collect::<Result<_>>()?;
    let mut best: f64 = vals.iter().sum();
    let tail_start = budget.iterations - budget.iterations / 5;
    let mut tail_gain = 0.0;
    let theta0 = std::f64::consts::FRAC_PI_2;
    for it in 0..budget.iterations {
        let scale = theta0 * (1e-5f64).powf(it as f64 / budget.iterations.max(1) as f64);
        let i = gen.random_range(0..m);
        let mut j = gen.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let theta = scale * gen.sample::<f64, _>(StandardNormal);
        let phase = gen.random::<f64>() * std::f64::consts::TAU;
        let (s, co) = theta.sin_cos();
        let e = C64::from_polar(1.0, phase);
        let row_i = w.row(i).into_owned();
        let row_j = w.row(j).into_owned();
        let new_i = &row_i * c(co, 0.0) - &row_j * (e * s);
        let new_j = &row_i * (e.conj() * s) + &row_j * c(co, 0.0);
        let vi = member_value(basis, &new_i, measure, p, layout)?;
        let vj = member_value(basis, &new_j, measure, p, layout)?;
        let candidate = best - vals[i] - vals[j] + vi + vj;
        if candidate < best {
            if it >= tail_start {
                tail_gain += best - candidate;
            }
            w.set_row(i, &new_i);
            w.set_row(j, &new_j);
            vals[i] = vi;
            vals[j] = vj;
            best = vals.iter().sum();
        }
    }
    Ok(RestartOutcome {
        value: best,
        w,
        converged: tail_gain < 1e-8,
    })
}

/// Upper bound on min Σ p_i N(ψ_i) over decompositions of ρ.
pub fn roof_negativity(
    rho: &DensityOperator,
    p: usize,
    measure: RoofMeasure,
    budget: &RoofBudget,
) -> Result<RoofResult> {
    if budget.restarts == 0 || budget.iterations == 0 {
        return Err(Error::Argument(
            "roof budget needs at least one restart and one iteration".into(),
        ));
    }
    rho.layout().check_subsystem(p)?;
    let eigen = eigen_ensemble(rho)?;
    let eigen_value = eigen.average(|psi| measure.pure_value(psi, p))?;
    if eigen.len() == 1 {
        return Ok(RoofResult {
            value: measure.value(rho, p)?,
            certificate: eigen,
            restarts_used: 0,
            converged: true,
            eigen_value,
        });
    }
    let basis = scaled_eigenvectors(rho)?;
    let r = basis.ncols();
    let m = budget.members.unwrap_or((2 * r).min(8)).max(r);
    let outcomes: Vec<RestartOutcome> = (0..budget.restarts)
        .into_par_iter()
        .map(|k| run_restart(rho, &basis, m, measure, p, budget, k))
        .collect::<Result<_>>()?;
    // min by value, ties to the lower restart index
    let (_, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    let certificate = members_from(rho, &basis, &best.w)?;
    Ok(RoofResult {
        value: best.value,
        certificate,
        restarts_used: budget.restarts,
        converged: best.converged,
        eigen_value,
    })
}

/// Global negativity of the two-party reduced state on `(p, partner)`, focus p.
pub fn reduced_pair_negativity(psi: &PureState, pair: (usize, usize)) -> Result<f64> {
    if psi.num_subsystems() != 3 {
        return Err(Error::Argument(
            "reduced pair negativity needs three subsystems".into(),
        ));
    }
    let reduced = psi.outer().partial_trace(&[pair.0, pair.1])?;
    negativity::global_negativity(&reduced, 0)
}

/// Convex-roof global negativity of the same reduced state.
pub fn roof_pair_negativity(
    psi: &PureState,
    pair: (usize, usize),
    budget: &RoofBudget,
) -> Result<RoofResult> {
    let reduced = psi.outer().partial_trace(&[pair.0, pair.1])?;
    roof_negativity(&reduced, 0, RoofMeasure::Global, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{haar_random_pure_with, random_mixed_with};
    use crate::tangle;

    fn q2() -> SubsystemLayout {
        SubsystemLayout::qubits(2)
    }

    fn small() -> RoofBudget {
        RoofBudget {
            restarts: 8,
            members: None,
            iterations: 400,
            seed: 3,
        }
    }

    #[test]
    fn eigen_ensemble_examples() {
        let psi = PureState::ghz(3);
        let e = eigen_ensemble(&psi.outer()).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.members()[0].0 - 1.0).abs() < 1e-12);
        let mm = DensityOperator::maximally_mixed(q2());
        let e = eigen_ensemble(&mm).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.members().iter().all(|(p, _)| (p - 0.25).abs() < 1e-12));
        let mut r = rng::stream(40, 0);
        for _ in 0..10 {
            let rho = random_mixed_with(&SubsystemLayout::qubits(3), 3, &mut r);
            assert!(eigen_ensemble(&rho).unwrap().reconstruction_error(&rho) <= 1e-12);
        }
    }

    #[test]
    fn isometry_ensemble_examples() {
        let mut r = rng::stream(41, 0);
        let rho = random_mixed_with(&SubsystemLayout::qubits(3), 3, &mut r);
        let rank = ensemble_rank(&rho).unwrap();
        let id = isometry_ensemble(&rho, &CMatrix::identity(rank, rank)).unwrap();
        let eig = eigen_ensemble(&rho).unwrap();
        for ((p, a), (q, b)) in id.members().iter().zip(eig.members()) {
            assert!((p - q).abs() < 1e-12 && (a.fidelity(b) - 1.0).abs() < 1e-12);
        }
        for m in [3, 5, 8] {
            let w = haar_unitary(m, &mut r).columns(0, rank).into_owned();
            assert!(
                isometry_ensemble(&rho, &w)
                    .unwrap()
                    .reconstruction_error(&rho)
                    <= 1e-10
            );
        }
        let bad = CMatrix::from_element(4, rank, c(1.0, 0.0));
        assert!(matches!(
            isometry_ensemble(&rho, &bad),
            Err(Error::Validation(_))
        ));

        // equal eigenvalues, π/4 rotation: two equal-probability members
        let half = DensityOperator::mixture(&[
            (0.5, PureState::basis(q2(), &[0, 0]).unwrap()),
            (0.5, PureState::basis(q2(), &[1, 1]).unwrap()),
        ])
        .unwrap();
        let (s, co) = std::f64::consts::FRAC_PI_4.sin_cos();
        let rot = CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]);
        let e = isometry_ensemble(&half, &rot).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.members().iter().all(|(p, _)| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn pure_input_is_direct() {
        let psi = haar_random_pure_with(&SubsystemLayout::qubits(3), &mut rng::stream(42, 0));
        let rho = psi.outer();
        let res = roof_negativity(&rho, 0, RoofMeasure::Global, &small()).unwrap();
        assert_eq!(res.value, negativity::global_negativity(&rho, 0).unwrap());
        assert_eq!(res.certificate.len(), 1);
        assert!(roof_negativity(
            &rho,
            0,
            RoofMeasure::Global,
            &RoofBudget {
                restarts: 0,
                ..small()
            }
        )
        .is_err());
    }

    #[test]
    fn separable_mixture_reaches_zero() {
        let rho = DensityOperator::mixture(&[
            (0.5, PureState::basis(q2(), &[0, 0]).unwrap()),
            (0.5, PureState::basis(q2(), &[1, 1]).unwrap()),
        ])
        .unwrap();
        let res = roof_negativity(&rho, 0, RoofMeasure::Global, &small()).unwrap();
        assert!(res.value <= 1e-6);
        for (_, psi) in res.certificate.members() {
            assert!(negativity::global_negativity(&psi.outer(), 0).unwrap() < 1e-5);
        }
    }

    #[test]
    fn two_qubit_roof_reaches_concurrence() {
        let mut r = rng::stream(43, 0);
        for _ in 0..5 {
            let rho = random_mixed_with(&q2(), 2, &mut r);
            let res = roof_negativity(&rho, 0, RoofMeasure::Global, &small()).unwrap();
            let conc = tangle::concurrence(&rho).unwrap();
            assert!(res.value >= conc - 1e-9, "{} < {conc}", res.value);
            assert!(res.value <= conc + 1e-4, "{} vs {conc}", res.value);
            assert!(res.value <= res.eigen_value + 1e-9);
            assert!(res.certificate.reconstruction_error(&rho) <= 1e-8);
        }
    }

    #[test]
    fn more_restarts_never_hurt_and_seed_fixes_result() {
        let rho = random_mixed_with(&SubsystemLayout::qubits(3), 2, &mut rng::stream(44, 0));
        let few = roof_negativity(
            &rho,
            0,
            RoofMeasure::KWay(3),
            &RoofBudget {
                restarts: 2,
                ..small()
            },
        )
        .unwrap();
        let many = roof_negativity(
            &rho,
            0,
            RoofMeasure::KWay(3),
            &RoofBudget {
                restarts: 6,
                ..small()
            },
        )
        .unwrap();
        assert!(many.value <= few.value);
        let again = roof_negativity(
            &rho,
            0,
            RoofMeasure::KWay(3),
            &RoofBudget {
                restarts: 6,
                ..small()
            },
        )
        .unwrap();
        assert_eq!(many.value.to_bits(), again.value.to_bits());
    }

    #[test]
    fn reduced_pair_examples() {
        assert!(
            reduced_pair_negativity(&PureState::ghz(3), (0, 1))
                .unwrap()
                .abs()
                < 1e-12
        );
        let w = reduced_pair_negativity(&PureState::w(3), (0, 1)).unwrap();
        assert!((w - (5f64.sqrt() - 1.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn measure_parsing() {
        assert_eq!(
            "global".parse::<RoofMeasure>().unwrap(),
            RoofMeasure::Global
        );
        assert_eq!("k3".parse::<RoofMeasure>().unwrap(), RoofMeasure::KWay(3));
        assert!("x".parse::<RoofMeasure>().is_err());
    }

    #[test]
    fn ghzw_double_root_pair_roof() {
        use crate::ghzw::{build_ghzw, double_root_q, GhzwParams, Sign};
        let psi = build_ghzw(&GhzwParams::new(double_root_q(), Sign::Minus).unwrap()).unwrap();
        let budget = RoofBudget::default();
        for pair in [(0, 1), (0, 2)] {
            let roof = roof_pair_negativity(&psi, pair, &budget).unwrap();
            let direct = reduced_pair_negativity(&psi, pair).unwrap();
            let conc = tangle::concurrence(&psi.outer().partial_trace(&[pair.0, pair.1]).unwrap())
                .unwrap();
            assert!(roof.value >= direct - 1e-9);
            assert!((roof.value - conc).abs() < 1e-4, "{} vs {conc}", roof.value);
            assert!(
                (roof.value.powi(2) - 0.4143).abs() < 5e-4,
                "{}",
                roof.value.powi(2)
            );
        }
    }
}
