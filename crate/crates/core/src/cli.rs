//! Command implementations behind the `kwayneg` binary. Each returns the
//! text written to stdout; errors carry the exit code through
//! [`Error::exit_code`].

use crate::audit::{self, AUDIT_HEADER};
use crate::canonical::{self, canonical_closed_forms, canonicalize3};
use crate::error::{Error, Result};
use crate::ghzw::{self, Sign, SweepRow};
use crate::io::{self, CanonicalSection, EnsembleMember, ReportDocument, RoofSection};
use crate::linalg::ReIm;
use crate::negativity::{self, NegativityReport};
use crate::roof::{self, RoofBudget, RoofMeasure};
use crate::state::PureState;
use crate::tangle;
use crate::tolerance::TOL;

/// `A`, `B`, ... or a zero-based index.
pub fn parse_focus(s: &str) -> Result<usize> {
    let t = s.trim();
    if let Ok(i) = t.parse::<usize>() {
        return Ok(i);
    }
    let mut chars = t.chars();
    match (chars.next(), chars.next()) {
        (Some(ch), None) if ch.is_ascii_alphabetic() => {
            Ok((ch.to_ascii_uppercase() as u8 - b'A') as usize)
        }
        _ => Err(Error::Argument(format!(
            "focus must be a letter A.. or an index, got {s:?}"
        ))),
    }
}

/// `start:end:steps`.
pub fn parse_q_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Argument(format!("--q expects start:end:steps, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start = parts[0].trim().parse().map_err(|_| bad())?;
    let end = parts[1].trim().parse().map_err(|_| bad())?;
    let steps = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((start, end, steps))
}

fn checked_report(rho: &crate::state::DensityOperator, p: usize) -> Result<NegativityReport> {
    let rep = negativity::negativity_report(rho, p)?;
    if rep.extended_residual.is_nan() || rep.extended_residual > TOL.sum_rule {
        return Err(Error::Invariant(format!(
            "sum-rule residual {:e} exceeds {:e} at focus {p}",
            rep.extended_residual, TOL.sum_rule
        )));
    }
    Ok(rep)
}

fn is_three_qubit(psi: &PureState) -> bool {
    psi.num_subsystems() == 3 && psi.layout().is_qubits()
}

fn canonical_section(psi: &PureState) -> Result<CanonicalSection> {
    let res = canonicalize3(psi)?;
    let closed_forms = canonical_closed_forms(&res.forms[0].form)?;
    Ok(CanonicalSection {
        forms: res.forms.iter().map(|b| b.form).collect(),
        residual: res.residual,
        closed_forms,
    })
}

/// Report for one focus (default A) with tangles, Δ and optionally the
/// canonical form when the input is a three-qubit pure state.
pub fn analyze(text: &str, focus: Option<usize>, with_canonical: bool) -> Result<ReportDocument> {
    let input = io::parse_state_file(text)?;
    let mut doc = ReportDocument::new("analyze", text, &input);
    let p = focus.unwrap_or(0);
    input.layout().check_subsystem(p)?;
    doc.reports.push(checked_report(&input.density(), p)?);
    if let Some(psi) = input.as_pure().filter(|psi| is_three_qubit(psi)) {
        doc.tangles = Some(tangle::three_tangle_focus(psi, p)?);
        doc.delta = Some(canonical::coherence_delta(psi)?);
        if with_canonical {
            doc.canonical = Some(canonical_section(psi)?);
        }
    } else if with_canonical {
        return Err(Error::Unsupported(
            "canonical form needs a three-qubit pure state".into(),
        ));
    }
    Ok(doc)
}

/// Canonical forms plus the focus-A report of the first one.
pub fn canonicalize(text: &str) -> Result<ReportDocument> {
    let input = io::parse_state_file(text)?;
    let psi = input
        .as_pure()
        .filter(|psi| is_three_qubit(psi))
        .ok_or_else(|| Error::Unsupported("canonicalize needs a three-qubit pure state".into()))?;
    let mut doc = ReportDocument::new("canonicalize", text, &input);
    let section = canonical_section(psi)?;
    let state = canonical::build_canonical_state(&section.forms[0])?;
    doc.reports.push(checked_report(&state.outer(), 0)?);
    doc.tangles = Some(tangle::three_tangle(&state)?);
    doc.delta = Some(canonical::coherence_delta(psi)?);
    doc.canonical = Some(section);
    Ok(doc)
}

/// Family rows on the grid. On the minus branch the located zero of τ₃ is
/// added as an extra row when it falls inside the range.
pub fn sweep_rows(sign: Sign, start: f64, end: f64, steps: usize) -> Result<Vec<SweepRow>> {
    let mut qs = ghzw::q_grid(start, end, steps)?;
    if sign == Sign::Minus {
        let z = ghzw::minus_branch_zero();
        if start <= z && z <= end && !qs.iter().any(|&q| (q - z).abs() < 1e-12) {
            let at = qs.partition_point(|&q| q < z);
            qs.insert(at, z);
        }
    }
    ghzw::sweep_points(sign, &qs)
}

pub fn sweep(family: &str, sign: Sign, range: &str) -> Result<String> {
    if family != "ghzw" {
        return Err(Error::Argument(format!(
            "unknown family {family:?}; only ghzw"
        )));
    }
    let (start, end, steps) = parse_q_range(range)?;
    io::emit_sweep_csv(&sweep_rows(sign, start, end, steps)?)
}

pub fn roof(
    text: &str,
    focus: usize,
    measure: RoofMeasure,
    restarts: usize,
    seed: u64,
) -> Result<ReportDocument> {
    let input = io::parse_state_file(text)?;
    let rho = input.density();
    let budget = RoofBudget {
        restarts,
        seed,
        ..RoofBudget::default()
    };
    let res = roof::roof_negativity(&rho, focus, measure, &budget)?;
    if !res.value.is_finite() {
        return Err(Error::Numerical(format!(
            "roof search produced {}",
            res.value
        )));
    }
    let mut doc = ReportDocument::new("roof", text, &input);
    doc.seeds.push(seed);
    doc.reports.push(checked_report(&rho, focus)?);
    doc.roof = Some(RoofSection {
        measure,
        focus,
        value: res.value,
        eigen_ensemble_value: res.eigen_value,
        restarts: res.restarts_used,
        converged: res.converged,
        certificate: res
            .certificate
            .members()
            .iter()
            .map(|(p, psi)| EnsembleMember {
                p: *p,
                amplitudes: psi.amplitudes().iter().map(|&z| ReIm::from(z)).collect(),
            })
            .collect(),
    });
    Ok(doc)
}

pub fn audit(samples: usize, seed: u64, qubits: usize) -> Result<String> {
    let s = audit::run_audit(samples, seed, qubits)?;
    if !audit::extended_identity_holds(&s) {
        return Err(Error::Invariant(format!(
            "sum-rule residual {:e} exceeds {:e}",
            s.max_extended_residual, TOL.sum_rule
        )));
    }
    io::emit_csv(&AUDIT_HEADER, &[s.csv_row()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::StateInput;

    #[test]
    fn focus_and_range_parsing() {
        assert_eq!(parse_focus("A").unwrap(), 0);
        assert_eq!(parse_focus("c").unwrap(), 2);
        assert_eq!(parse_focus("3").unwrap(), 3);
        assert!(parse_focus("AB").is_err());
        assert_eq!(parse_q_range("0:1:101").unwrap(), (0.0, 1.0, 101));
        assert!(parse_q_range("0:1").is_err());
    }

    #[test]
    fn ghz_analysis() {
        let text = io::state_file_json(&StateInput::Pure(PureState::ghz(3)));
        let doc = analyze(&text, None, true).unwrap();
        let r = &doc.reports[0];
        assert!((r.n_global - 1.0).abs() < 1e-12 && (r.e(3) - 1.0).abs() < 1e-12);
        assert!((doc.tangles.as_ref().unwrap().tau3 - 1.0).abs() < 1e-12);
        assert_eq!(doc.canonical.as_ref().unwrap().forms.len(), 1);
    }

    #[test]
    fn minus_sweep_contains_zero_row() {
        let rows = sweep_rows(Sign::Minus, 0.0, 1.0, 101).unwrap();
        assert_eq!(rows.len(), 102);
        assert!(rows.windows(2).all(|w| w[0].q < w[1].q));
        assert!(rows
            .iter()
            .any(|r| (r.q - 0.62685).abs() < 1e-4 && r.tau3_formula <= 1e-4));
        assert_eq!(sweep_rows(Sign::Plus, 0.0, 1.0, 101).unwrap().len(), 101);
    }
}
