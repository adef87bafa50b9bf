//! The GHZ+W superposition family
//! `Ψ^(±)(q) = √q |GHZ⟩ ± √(1-q) |W⟩`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, CanonicalBranch, CanonicalForm3Q, CanonicalizationResult};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::negativity;
use crate::state::{LocalUnitary, PureState, SubsystemLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Argument(format!(
                "sign must be plus or minus, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzwParams {
    pub q: f64,
    pub sign: Sign,
}

impl GhzwParams {
    pub fn new(q: f64, sign: Sign) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Argument(format!("q={q} outside [0, 1]")));
        }
        Ok(Self { q, sign })
    }

    /// √(q/2), the GHZ amplitude.
    pub fn a(&self) -> f64 {
        (self.q / 2.0).sqrt()
    }

    /// ±√((1-q)/3), the signed W amplitude.
    pub fn b(&self) -> f64 {
        self.sign.value() * ((1.0 - self.q) / 3.0).sqrt()
    }

    /// a/b.
    pub fn x(&self) -> f64 {
        self.a() / self.b()
    }
}

/// √q (|000⟩+|111⟩)/√2 ± √(1-q) (|100⟩+|010⟩+|001⟩)/√3.
pub fn build_ghzw(p: &GhzwParams) -> Result<PureState> {
    let p = GhzwParams::new(p.q, p.sign)?;
    let (a, b) = (p.a(), p.b());
    let mut v = CVector::zeros(8);
    v[0b000] = c(a, 0.0);
    v[0b111] = c(a, 0.0);
    for k in [0b100, 0b010, 0b001] {
        v[k] = c(b, 0.0);
    }
    PureState::new(SubsystemLayout::qubits(3), v)
}

/// |q² ± (8√6/9)√(q(1-q)³)|.
pub fn tau3_closed_form(p: &GhzwParams) -> f64 {
    tau3_signed(p).abs()
}

fn tau3_signed(p: &GhzwParams) -> f64 {
    let q = p.q;
    q * q + p.sign.value() * (8.0 * 6f64.sqrt() / 9.0) * (q * (1.0 - q).powi(3)).sqrt()
}

/// Zero of the minus-branch closed form inside (0, 1), by bisection.
pub fn minus_branch_zero() -> f64 {
    let h = |q: f64| {
        tau3_signed(&GhzwParams {
            q,
            sign: Sign::Minus,
        })
    };
    let (mut lo, mut hi) = (1e-6, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The q at which |x|³ = 4, i.e. 3q/(2(1-q)) = 4^{2/3}.
pub fn double_root_q() -> f64 {
    let k = 4f64.powf(2.0 / 3.0);
    2.0 * k / (3.0 + 2.0 * k)
}

/// Real solutions of α = βx²(1 ± √(1-4/x³))/2 with x = -a/b (negative on the
/// plus branch, positive on the minus branch), normalized to α² + β² = 1.
/// With these, `α T0 + β T1` of the `|0⟩_A`, `|1⟩_A` slices is singular.
/// Empty where both roots are complex.
pub fn closed_form_alpha_beta(p: &GhzwParams) -> Vec<(f64, f64)> {
    let x = -p.x();
    if !x.is_finite() {
        return Vec::new();
    }
    let inner = 1.0 - 4.0 / x.powi(3);
    if inner < -1e-12 {
        return Vec::new();
    }
    let s = inner.max(0.0).sqrt();
    let ratios: Vec<f64> = if s < 1e-9 {
        vec![x * x / 2.0]
    } else {
        vec![x * x * (1.0 + s) / 2.0, x * x * (1.0 - s) / 2.0]
    };
    ratios
        .into_iter()
        .map(|r| {
            let beta = 1.0 / (1.0 + r * r).sqrt();
            (r * beta, beta)
        })
        .collect()
}

/// αβa² - β²ab + α²b². Vanishes at (α, -β) for the pairs returned by
/// [`closed_form_alpha_beta`].
pub fn alpha_beta_constraint(p: &GhzwParams, alpha: f64, beta: f64) -> f64 {
    let (a, b) = (p.a(), p.b());
    alpha * beta * a * a - beta * beta * a * b + alpha * alpha * b * b
}

/// Canonical reduction of one family member.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzwCanonical {
    pub params: GhzwParams,
    pub result: CanonicalizationResult,
    /// |U^A₀₀| and |U^A₀₁| of the first branch.
    pub alpha: f64,
    pub beta: f64,
    /// Closed-form (α, β) pairs where they are real.
    pub closed_form: Vec<(f64, f64)>,
    pub double_root: bool,
}

fn exact_limit(p: &GhzwParams) -> Result<CanonicalizationResult> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = 1.0 / 3f64.sqrt();
    let id = |t| LocalUnitary::identity(t, 2);
    let (form, ua) = if p.q == 1.0 {
        (CanonicalForm3Q::real(h, 0.0, 0.0, 0.0, h)?, id(0))
    } else {
        // X on qubit A maps ±W to ±(|000⟩+|110⟩+|101⟩)/√3; the sign goes into U^A
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.0, 0.0),
                c(p.sign.value(), 0.0),
                c(p.sign.value(), 0.0),
                c(0.0, 0.0),
            ],
        );
        (
            CanonicalForm3Q::real(s, 0.0, s, s, 0.0)?,
            LocalUnitary::new(0, x)?,
        )
    };
    Ok(CanonicalizationResult {
        forms: vec![CanonicalBranch {
            form,
            unitaries: [ua, id(1), id(2)],
            residual: 0.0,
        }],
        residual: 0.0,
    })
}

/// Canonical form(s) of Ψ^(±)(q). The numeric reduction is authoritative;
/// the closed-form α, β are reported alongside where they are real.
pub fn ghzw_canonical_params(p: &GhzwParams) -> Result<GhzwCanonical> {
    let p = GhzwParams::new(p.q, p.sign)?;
    let mut result = if p.q == 0.0 || p.q == 1.0 {
        exact_limit(&p)?
    } else {
        canonical::canonicalize3(&build_ghzw(&p)?)?
    };
    let double_root = p.q > 0.0 && p.q < 1.0 && (p.x().abs().powi(3) - 4.0).abs() < 1e-9;
    if double_root {
        result.forms.truncate(1);
    }
    let ua = result.forms[0].unitaries[0].matrix();
    Ok(GhzwCanonical {
        params: p,
        alpha: ua[(0, 0)].norm(),
        beta: ua[(0, 1)].norm(),
        closed_form: closed_form_alpha_beta(&p),
        double_root,
        result,
    })
}

/// E₃^A = 2a₀₀₀a₁₁₁²/√(1 - a₀₀₀² - a₁₁₁²), as printed. Zero if either
/// amplitude vanishes.
///
/// The canonical closed form E₃ = 4a²f²/(2ag) gives 2a₀₀₀a₁₁₁²/g with
/// g² = 1 - a₀₀₀² - a₁₀₀², so this expression only agrees with it when
/// a₁₀₀ = a₁₁₁; see [`e3_from_canonical_amplitudes`].
pub fn e3_from_amplitudes(a000: f64, a111: f64) -> Result<f64> {
    if a000 == 0.0 || a111 == 0.0 {
        return Ok(0.0);
    }
    let arg = 1.0 - a000 * a000 - a111 * a111;
    if arg <= 0.0 {
        return Err(Error::Domain(format!(
            "1 - a000² - a111² = {arg} is not positive"
        )));
    }
    Ok(2.0 * a000 * a111 * a111 / arg.sqrt())
}

/// 2a₀₀₀a₁₁₁²/√(1 - a₀₀₀² - a₁₀₀²), the canonical closed form for E₃^A.
pub fn e3_from_canonical_amplitudes(a000: f64, a100: f64, a111: f64) -> Result<f64> {
    if a000 == 0.0 || a111 == 0.0 {
        return Ok(0.0);
    }
    let arg = 1.0 - a000 * a000 - a100 * a100;
    if arg <= 0.0 {
        return Err(Error::Domain(format!(
            "1 - a000² - a100² = {arg} is not positive"
        )));
    }
    Ok(2.0 * a000 * a111 * a111 / arg.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub n_global: f64,
    pub e2: f64,
    pub e3: f64,
    pub tau3_formula: f64,
    pub e3_times_ng: f64,
    pub delta: f64,
}

/// One row: E values from the first canonical branch, Δ from the raw state.
pub fn sweep_row(p: &GhzwParams) -> Result<SweepRow> {
    let canon = ghzw_canonical_params(p)?;
    let rho = canon.result.forms[0].state().outer();
    let rep = negativity::negativity_report(&rho, 0)?;
    let raw = build_ghzw(p)?;
    Ok(SweepRow {
        q: p.q,
        n_global: rep.n_global,
        e2: rep.e(2),
        e3: rep.e(3),
        tau3_formula: tau3_closed_form(p),
        e3_times_ng: rep.e(3) * rep.n_global,
        delta: canonical::coherence_delta(&raw)?,
    })
}

/// Uniform grid `q_start..=q_end` with `steps` points.
pub fn q_grid(q_start: f64, q_end: f64, steps: usize) -> Result<Vec<f64>> {
    if !(0.0 <= q_start && q_start < q_end && q_end <= 1.0) {
        return Err(Error::Argument(format!(
            "need 0 ≤ q_start < q_end ≤ 1, got {q_start}..{q_end}"
        )));
    }
    if steps < 2 {
        return Err(Error::Argument(format!("steps={steps} < 2")));
    }
    let h = (q_end - q_start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                q_end
            } else {
                q_start + h * i as f64
            }
        })
        .collect())
}

/// Rows for every grid point, in grid order. Rows are computed in parallel.
pub fn sweep_family(sign: Sign, q_start: f64, q_end: f64, steps: usize) -> Result<Vec<SweepRow>> {
    sweep_points(sign, &q_grid(q_start, q_end, steps)?)
}

/// Rows for explicit q values, in the order given.
pub fn sweep_points(sign: Sign, qs: &[f64]) -> Result<Vec<SweepRow>> {
    qs.par_iter()
        .map(|&q| sweep_row(&GhzwParams::new(q, sign)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle;

    #[test]
    fn build_limits() {
        let ghz = build_ghzw(&GhzwParams::new(1.0, Sign::Plus).unwrap()).unwrap();
        assert!((ghz.fidelity(&PureState::ghz(3)) - 1.0).abs() < 1e-15);
        let w = build_ghzw(&GhzwParams::new(0.0, Sign::Minus).unwrap()).unwrap();
        assert!((w.inner(&PureState::w(3)).re + 1.0).abs() < 1e-15);
        let mid = build_ghzw(&GhzwParams::new(0.3, Sign::Plus).unwrap()).unwrap();
        assert!((mid.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(GhzwParams::new(1.5, Sign::Plus).is_err());
    }

    #[test]
    fn tau3_examples() {
        assert!((tau3_closed_form(&GhzwParams::new(1.0, Sign::Plus).unwrap()) - 1.0).abs() < 1e-15);
        let half = tau3_closed_form(&GhzwParams::new(0.5, Sign::Plus).unwrap());
        assert!((half - (0.25 + 8.0 * 6f64.sqrt() / 9.0 * 0.25)).abs() < 1e-15);
        assert!((half - 0.794331).abs() < 1e-6);
        assert!(tau3_closed_form(&GhzwParams::new(0.62685, Sign::Minus).unwrap()) < 1e-4);
    }

    #[test]
    fn closed_form_tau3_matches_tangle_module() {
        for sign in [Sign::Plus, Sign::Minus] {
            for i in 0..=20 {
                let p = GhzwParams::new(i as f64 / 20.0, sign).unwrap();
                let t = tangle::three_tangle(&build_ghzw(&p).unwrap()).unwrap().tau3;
                assert!((t - tau3_closed_form(&p)).abs() < 1e-9, "q={} {t}", p.q);
            }
        }
    }

    #[test]
    fn zero_and_double_root_coincide() {
        let z = minus_branch_zero();
        assert!((z - 0.62685).abs() < 1e-4);
        assert!((z - double_root_q()).abs() < 1e-9);
        let p = GhzwParams::new(double_root_q(), Sign::Minus).unwrap();
        assert!((p.x().abs().powi(3) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn double_root_values() {
        let p = GhzwParams::new(double_root_q(), Sign::Minus).unwrap();
        let canon = ghzw_canonical_params(&p).unwrap();
        assert!(canon.double_root);
        assert_eq!(canon.result.forms.len(), 1);
        assert!((canon.alpha - 0.78327).abs() < 5e-5, "{}", canon.alpha);
        assert!((canon.beta - 0.62169).abs() < 5e-5, "{}", canon.beta);
        let (ca, cb) = canon.closed_form[0];
        assert!((ca - canon.alpha).abs() < 1e-6 && (cb - canon.beta).abs() < 1e-6);
        let rep = negativity::negativity_report(&canon.result.forms[0].state().outer(), 0).unwrap();
        assert!((rep.n_global - 0.9103).abs() < 5e-4);
        assert!((rep.e(2) - 0.9103).abs() < 5e-4);
        assert!(rep.e(3) < 1e-3);
    }

    #[test]
    fn closed_form_roots_solve_the_singularity_condition() {
        for (q, sign) in [
            (0.2, Sign::Plus),
            (0.7, Sign::Plus),
            (0.7, Sign::Minus),
            (0.8, Sign::Minus),
            (0.9, Sign::Minus),
        ] {
            let p = GhzwParams::new(q, sign).unwrap();
            let psi = build_ghzw(&p).unwrap();
            let roots = closed_form_alpha_beta(&p);
            assert_eq!(roots.len(), 2);
            for (alpha, beta) in roots {
                let v = psi.amplitudes();
                let t = |k: usize| v[k] * alpha + v[k + 4] * beta;
                let det = t(0) * t(3) - t(1) * t(2);
                assert!(det.norm() < 1e-12, "q={q} det={det}");
                assert!(alpha_beta_constraint(&p, alpha, -beta).abs() < 1e-12);
            }
        }
        // complex below the double root on the minus branch
        assert!(closed_form_alpha_beta(&GhzwParams::new(0.5, Sign::Minus).unwrap()).is_empty());
    }

    #[test]
    fn e3_formula_cases() {
        assert_eq!(e3_from_amplitudes(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(e3_from_amplitudes(0.5, 0.0).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(e3_from_amplitudes(h, h), Err(Error::Domain(_))));
        // GHZ through the canonical closed form: b = 0
        assert!((e3_from_canonical_amplitudes(h, 0.0, h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrected_e3_matches_projector_route() {
        for q in [0.2, 0.5, 0.8] {
            for sign in [Sign::Plus, Sign::Minus] {
                let p = GhzwParams::new(q, sign).unwrap();
                let canon = ghzw_canonical_params(&p).unwrap();
                for br in &canon.result.forms {
                    let f = br.form;
                    let e3 =
                        negativity::partial_kway_negativity(&br.state().outer(), 3, 0).unwrap();
                    let closed = e3_from_canonical_amplitudes(f.a, f.b, f.f).unwrap();
                    assert!((closed - e3).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep_family(Sign::Minus, 0.0, 1.0, 11).unwrap();
        assert_eq!(rows.len(), 11);
        let last = rows.last().unwrap();
        assert!(
            (last.n_global - 1.0).abs() < 1e-9
                && (last.e3 - 1.0).abs() < 1e-9
                && (last.tau3_formula - 1.0).abs() < 1e-9
        );
        for r in &rows {
            assert!((r.e3_times_ng - r.tau3_formula).abs() < 1e-6, "{r:?}");
        }
        assert!(sweep_family(Sign::Minus, 0.5, 0.2, 3).is_err());
        assert!(sweep_family(Sign::Minus, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn raw_states_carry_three_way_negativity() {
        for sign in [Sign::Plus, Sign::Minus] {
            for i in 1..20 {
                let psi = build_ghzw(&GhzwParams::new(i as f64 / 20.0, sign).unwrap()).unwrap();
                assert!(negativity::partial_kway_negativity(&psi.outer(), 3, 0).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn negativity_is_invariant_under_reduction() {
        for i in 1..20 {
            let p = GhzwParams::new(i as f64 / 20.0, Sign::Plus).unwrap();
            let raw = negativity::global_negativity(&build_ghzw(&p).unwrap().outer(), 0).unwrap();
            let canon = ghzw_canonical_params(&p).unwrap();
            for br in &canon.result.forms {
                let n = negativity::global_negativity(&br.state().outer(), 0).unwrap();
                assert!((n - raw).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn raw_e3_positive_inside_minus_branch() {
        for i in 1..100 {
            let p = GhzwParams::new(i as f64 / 100.0, Sign::Minus).unwrap();
            let rep = negativity::negativity_report(&build_ghzw(&p).unwrap().outer(), 0).unwrap();
            assert!(rep.e(3) > 0.0, "q={}", p.q);
        }
    }
}
