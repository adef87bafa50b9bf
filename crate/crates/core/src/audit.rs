//! Monte Carlo audit of the negativity inequalities and CKW monogamy over
//! Haar-random pure qubit states, focus on the first qubit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::negativity::{self, NegativityReport};
use crate::rng;
use crate::state::{haar_random_pure_with, PureState, SubsystemLayout};
use crate::tangle;
use crate::tolerance::TOL;

/// Slack applied to every inequality.
pub const SLACK: f64 = 1e-9;

/// CSV header of [`AuditSummary::csv_row`].
pub const AUDIT_HEADER: [&str; 11] = [
    "qubits",
    "samples",
    "seed",
    "viol_ng_e2",
    "checked_ng_e3",
    "viol_ng_e3",
    "viol_ng_ek",
    "viol_ckw",
    "max_sum_residual",
    "max_extended_residual",
    "min_ckw_margin",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSample {
    pub ng_below_e2: bool,
    /// `None` when |E₀| > slack and the comparison is not made.
    pub ng_below_e3: Option<bool>,
    /// Any E_K above N_G while |E₀| ≤ slack.
    pub ng_below_ek: bool,
    pub ckw_margin: f64,
    pub sum_residual: f64,
    pub extended_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub qubits: usize,
    pub samples: usize,
    pub seed: u64,
    pub viol_ng_e2: usize,
    pub checked_ng_e3: usize,
    pub viol_ng_e3: usize,
    pub viol_ng_ek: usize,
    pub viol_ckw: usize,
    pub max_sum_residual: f64,
    pub max_extended_residual: f64,
    pub min_ckw_margin: f64,
}

impl AuditSummary {
    pub fn total_violations(&self) -> usize {
        self.viol_ng_e2 + self.viol_ng_e3 + self.viol_ng_ek + self.viol_ckw
    }

    pub fn csv_row(&self) -> Vec<String> {
        use crate::io::fmt_real;
        vec![
            self.qubits.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
            self.viol_ng_e2.to_string(),
            self.checked_ng_e3.to_string(),
            self.viol_ng_e3.to_string(),
            self.viol_ng_ek.to_string(),
            self.viol_ckw.to_string(),
            fmt_real(self.max_sum_residual),
            fmt_real(self.max_extended_residual),
            fmt_real(self.min_ckw_margin),
        ]
    }
}

/// τ_{A(rest)} − Σ_j τ_{Aj}.
pub fn ckw_margin(psi: &PureState) -> Result<f64> {
    let rho = psi.outer();
    let mut pairs = 0.0;
    for j in 1..psi.num_subsystems() {
        pairs += tangle::wootters_tangle(&rho.partial_trace(&[0, j])?)?;
    }
    Ok(tangle::one_tangle(psi, 0)? - pairs)
}

pub fn audit_state(psi: &PureState) -> Result<AuditSample> {
    let rep: NegativityReport = negativity::negativity_report(&psi.outer(), 0)?;
    let gated = rep.e0.abs() <= SLACK;
    Ok(AuditSample {
        ng_below_e2: rep.n_global + SLACK < rep.e(2),
        ng_below_e3: gated.then(|| rep.n_global + SLACK < rep.e(3)),
        ng_below_ek: gated && rep.e_partial.values().any(|&e| rep.n_global + SLACK < e),
        ckw_margin: ckw_margin(psi)?,
        sum_residual: rep.sum_residual,
        extended_residual: rep.extended_residual,
    })
}

/// Audits `samples` states; state i is drawn from RNG stream i of `seed`.
pub fn run_audit(samples: usize, seed: u64, qubits: usize) -> Result<AuditSummary> {
    if !(3..=4).contains(&qubits) {
        return Err(Error::Argument(format!(
            "audit supports 3 or 4 qubits, got {qubits}"
        )));
    }
    if samples == 0 {
        return Err(Error::Argument("audit needs at least one sample".into()));
    }
    let layout = SubsystemLayout::qubits(qubits);
    let results: Vec<AuditSample> = (0..samples)
        .into_par_iter()
        .map(|i| {
            audit_state(&haar_random_pure_with(
                &layout,
                &mut rng::stream(seed, i as u64),
            ))
        })
        .collect::<Result<_>>()?;
    let mut s = AuditSummary {
        qubits,
        samples,
        seed,
        viol_ng_e2: 0,
        checked_ng_e3: 0,
        viol_ng_e3: 0,
        viol_ng_ek: 0,
        viol_ckw: 0,
        max_sum_residual: 0.0,
        max_extended_residual: 0.0,
        min_ckw_margin: f64::INFINITY,
    };
    for r in &results {
        s.viol_ng_e2 += r.ng_below_e2 as usize;
        if let Some(v) = r.ng_below_e3 {
            s.checked_ng_e3 += 1;
            s.viol_ng_e3 += v as usize;
        }
        s.viol_ng_ek += r.ng_below_ek as usize;
        s.viol_ckw += (r.ckw_margin < -SLACK) as usize;
        s.max_sum_residual = s.max_sum_residual.max(r.sum_residual);
        s.max_extended_residual = s.max_extended_residual.max(r.extended_residual);
        s.min_ckw_margin = s.min_ckw_margin.min(r.ckw_margin);
    }
    Ok(s)
}

/// True when the exact decomposition held on every sample.
pub fn extended_identity_holds(s: &AuditSummary) -> bool {
    s.max_extended_residual <= TOL.sum_rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_and_w_samples() {
        let g = audit_state(&PureState::ghz(3)).unwrap();
        assert!(!g.ng_below_e2 && g.ng_below_e3 == Some(false));
        assert!(g.ckw_margin > 1.0 - 1e-12);
        let w = audit_state(&PureState::w(3)).unwrap();
        assert!(w.ckw_margin.abs() < 1e-12);
    }

    #[test]
    fn small_audit_is_clean_and_reproducible() {
        for qubits in [3, 4] {
            let a = run_audit(300, 7, qubits).unwrap();
            assert_eq!(a.total_violations(), 0, "{a:?}");
            assert!(extended_identity_holds(&a), "{a:?}");
            let b = run_audit(300, 7, qubits).unwrap();
            assert_eq!(a, b);
        }
        assert!(run_audit(10, 0, 5).is_err());
        assert!(run_audit(0, 0, 3).is_err());
    }
}
