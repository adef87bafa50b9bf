//! Three-qubit canonical forms.
//!
//! Every three-qubit pure state is local-unitarily equivalent to
//!
//! ```text
//! a|000⟩ + b|100⟩ + c|110⟩ + d|101⟩ + f e^{iφ}|111⟩,   a, b, c, d, f ≥ 0
//! ```
//!
//! The single invariant phase sits on `|111⟩`. Diagonal local phases can move
//! it to `|100⟩` instead, but then the `|000⟩↔|100⟩` coherence is complex and
//! the K-way split of the negativity picks up a focus-only term; with the
//! phase on `|111⟩` the K-way values take the closed forms below for every φ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::negativity::{self, NegativityReport};
use crate::state::{
    apply_local_unitaries, DensityOperator, LocalUnitary, PureState, SubsystemLayout,
};
use crate::tangle::{self, TangleReport};
use crate::tolerance::TOL;

/// Canonical amplitudes and the phase on `|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm3Q {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    /// Phase of the `|111⟩` amplitude, in [0, 2π). `canonicalize3` sets it
    /// to 0 whenever b, c or d vanishes.
    pub phi: f64,
}

impl CanonicalForm3Q {
    pub fn new(a: f64, b: f64, c: f64, d: f64, f: f64, phi: f64) -> Result<Self> {
        let form = Self { a, b, c, d, f, phi };
        form.validate()?;
        Ok(form)
    }

    /// Real form, φ = 0.
    pub fn real(a: f64, b: f64, c: f64, d: f64, f: f64) -> Result<Self> {
        Self::new(a, b, c, d, f, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.a, self.b, self.c, self.d, self.f];
        if parts.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Validation(format!(
                "canonical amplitudes must be finite and nonnegative: {parts:?}"
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::Validation("phase is not finite".into()));
        }
        let norm2: f64 = parts.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > TOL.norm {
            return Err(Error::Validation(format!(
                "canonical form not normalized: norm={}",
                norm2.sqrt()
            )));
        }
        Ok(())
    }

    pub fn g(&self) -> f64 {
        (self.c * self.c + self.d * self.d + self.f * self.f).sqrt()
    }

    /// Uniformly random point of the form manifold.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        use rand_distr::StandardNormal;
        loop {
            let v: Vec<f64> = (0..5)
                .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                return Self {
                    a: v[0] / n,
                    b: v[1] / n,
                    c: v[2] / n,
                    d: v[3] / n,
                    f: v[4] / n,
                    phi,
                };
            }
        }
    }
}

/// a|000⟩ + b|100⟩ + c|110⟩ + d|101⟩ + f e^{iφ}|111⟩.
pub fn build_canonical_state(form: &CanonicalForm3Q) -> Result<PureState> {
    form.validate()?;
    let mut v = CVector::zeros(8);
    v[0b000] = c(form.a, 0.0);
    v[0b100] = c(form.b, 0.0);
    v[0b110] = c(form.c, 0.0);
    v[0b101] = c(form.d, 0.0);
    v[0b111] = C64::from_polar(form.f, form.phi);
    PureState::new(SubsystemLayout::qubits(3), v)
}

/// Analytic negativities and tangles of a canonical state, focus A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub n_global: f64,
    pub e3: f64,
    pub e2: f64,
    pub e2_ab: f64,
    pub e2_ac: f64,
    pub tau_focus: f64,
    pub tau_ab: f64,
    pub tau_ac: f64,
    pub tau3: f64,
}

/// N_G = 2ag, E₃ = 4a²f²/2ag, E₂ = 4a²(c²+d²)/2ag, pair splits 4a²c²/N_G and
/// 4a²d²/N_G, τ_{A(BC)} = 4a²g², τ_AB = 4a²c², τ_AC = 4a²d², τ₃ = 4a²f².
/// When ag = 0 the E values are 0.
pub fn canonical_closed_forms(form: &CanonicalForm3Q) -> Result<ClosedForms> {
    form.validate()?;
    let CanonicalForm3Q { a, c, d, f, .. } = *form;
    let g = form.g();
    let n = 2.0 * a * g;
    let a2 = 4.0 * a * a;
    let over = |num: f64| if n > 0.0 { num / n } else { 0.0 };
    Ok(ClosedForms {
        n_global: n,
        e3: over(a2 * f * f),
        e2: over(a2 * (c * c + d * d)),
        e2_ab: over(a2 * c * c),
        e2_ac: over(a2 * d * d),
        tau_focus: a2 * g * g,
        tau_ab: a2 * c * c,
        tau_ac: a2 * d * d,
        tau3: a2 * f * f,
    })
}

/// The same quantities from the numeric pipeline (transpose → negativity →
/// tangle) on an arbitrary three-qubit pure state.
pub fn numeric_closed_forms(
    psi: &PureState,
) -> Result<(ClosedForms, NegativityReport, TangleReport)> {
    let rho = psi.outer();
    let neg = negativity::negativity_report(&rho, 0)?;
    let tan = tangle::three_tangle(psi)?;
    let cf = ClosedForms {
        n_global: neg.n_global,
        e3: neg.e(3),
        e2: neg.e(2),
        e2_ab: neg.pair_split[&1],
        e2_ac: neg.pair_split[&2],
        tau_focus: tan.tau_focus,
        tau_ab: tan.tau_pairs[&1],
        tau_ac: tan.tau_pairs[&2],
        tau3: tan.tau3,
    };
    Ok((cf, neg, tan))
}

impl ClosedForms {
    pub fn max_abs_diff(&self, other: &ClosedForms) -> f64 {
        let a = self.as_array();
        let b = other.as_array();
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 9] {
        [
            self.n_global,
            self.e3,
            self.e2,
            self.e2_ab,
            self.e2_ac,
            self.tau_focus,
            self.tau_ab,
            self.tau_ac,
            self.tau3,
        ]
    }
}

/// One branch of the canonical reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBranch {
    pub form: CanonicalForm3Q,
    /// U^A, U^B, U^C, in that order.
    pub unitaries: [LocalUnitary; 3],
    /// Max |amplitude| outside {000, 100, 110, 101, 111} after the transform.
    pub residual: f64,
}

impl CanonicalBranch {
    pub fn state(&self) -> PureState {
        build_canonical_state(&self.form).expect("validated on construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalizationResult {
    /// One or two branches, larger `a` first, ties by larger `f`.
    pub forms: Vec<CanonicalBranch>,
    pub residual: f64,
}

const SUPPORT: [usize; 5] = [0b000, 0b100, 0b110, 0b101, 0b111];

fn slices(psi: &PureState) -> (CMatrix, CMatrix) {
    let v = psi.amplitudes();
    let t0 = CMatrix::from_fn(2, 2, |j, k| v[2 * j + k]);
    let t1 = CMatrix::from_fn(2, 2, |j, k| v[4 + 2 * j + k]);
    (t0, t1)
}

fn det2(m: &CMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Roots of `p2 z² + p1 z + p0` with the numerically stable formula. Returns
/// the roots and the discriminant.
fn quadratic_roots(p2: C64, p1: C64, p0: C64) -> (C64, C64, C64) {
    let disc = p1 * p1 - p2 * p0 * 4.0;
    let sq = disc.sqrt();
    let sq = if (p1.conj() * sq).re >= 0.0 { sq } else { -sq };
    let q = -(p1 + sq) * 0.5;
    let r1 = q / p2;
    let r2 = if q.norm() > 0.0 { p0 / q } else { r1 };
    (r1, r2, disc)
}

/// Solutions `(u, v)`, unit norm, of `det(u T0 + v T1) = 0` together with the
/// discriminant magnitude of the quadratic that produced them.
fn singular_directions(t0: &CMatrix, t1: &CMatrix) -> Result<(Vec<(C64, C64)>, f64)> {
    let d0 = det2(t0);
    let d1 = det2(t1);
    let x = t0[(0, 0)] * t1[(1, 1)] + t1[(0, 0)] * t0[(1, 1)]
        - t0[(0, 1)] * t1[(1, 0)]
        - t1[(0, 1)] * t0[(1, 0)];
    let scale = d0.norm().max(d1.norm()).max(x.norm());
    if scale < 1e-300 {
        // every combination is singular
        return Ok((vec![(c(1.0, 0.0), c(0.0, 0.0))], 0.0));
    }
    // det(u T0 + v T1) = d0 u² + x uv + d1 v²
    let (lead_is_d1, p2, p1, p0) = if d1.norm() >= d0.norm() {
        (true, d1, x, d0)
    } else {
        (false, d0, x, d1)
    };
    let mut dirs = Vec::new();
    let disc;
    if p2.norm() < 1e-14 * scale {
        // one root where the linear part vanishes, the other at infinity of the ratio
        disc = x.norm_sqr();
        let z = -p0 / p1;
        if lead_is_d1 {
            dirs.push((c(1.0, 0.0), z));
            dirs.push((c(0.0, 0.0), c(1.0, 0.0)));
        } else {
            dirs.push((z, c(1.0, 0.0)));
            dirs.push((c(1.0, 0.0), c(0.0, 0.0)));
        }
    } else {
        let (r1, r2, dsc) = quadratic_roots(p2, p1, p0);
        disc = dsc.norm();
        let polish = |r: C64| -> Result<C64> {
            let val = p2 * r * r + p1 * r + p0;
            let der = p2 * r * 2.0 + p1;
            let out = if der.norm() > 1e-300 {
                r - val / der
            } else {
                r
            };
            let after = (p2 * out * out + p1 * out + p0).norm();
            if !after.is_finite() || after > 1e-8 * scale.max(1.0) * (1.0 + out.norm_sqr()) {
                return Err(Error::Numerical(format!(
                    "singularity root polish failed (residual {after:e})"
                )));
            }
            Ok(out)
        };
        let roots = if disc < 1e-12 {
            vec![polish(r1)?]
        } else {
            vec![polish(r1)?, polish(r2)?]
        };
        for r in roots {
            // lead_is_d1: r = v/u ; else r = u/v
            dirs.push(if lead_is_d1 {
                (c(1.0, 0.0), r)
            } else {
                (r, c(1.0, 0.0))
            });
        }
    }
    let dirs = dirs
        .into_iter()
        .map(|(u, v)| {
            let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
            (u / n, v / n)
        })
        .collect();
    Ok((dirs, disc))
}

/// 2×2 unitary whose first row is `x†` (so it maps `x` to `e₀`).
fn unitary_with_first_row(x: &CVector) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[x[0].conj(), x[1].conj(), -x[1], x[0]])
}

fn branch_from_direction(psi: &PureState, u: C64, v: C64) -> Result<CanonicalBranch> {
    let (t0, t1) = slices(psi);
    let mut ua = CMatrix::from_row_slice(2, 2, &[u, v, -v.conj(), u.conj()]);
    let t0p = &t0 * u + &t1 * v;

    let (mut ub, mut uc) = (CMatrix::identity(2, 2), CMatrix::identity(2, 2));
    let sigma = t0p.norm();
    if sigma > 1e-14 {
        let es = linalg::hermitian_eigensystem(&(&t0p * t0p.adjoint()))?;
        let x = es.vector(1);
        let y = (t0p.adjoint() * &x).map(|z| z.conj());
        let y = &y / c(y.norm(), 0.0);
        ub = unitary_with_first_row(&x);
        uc = unitary_with_first_row(&y);
    }

    let apply =
        |ua: &CMatrix, ub: &CMatrix, uc: &CMatrix| -> Result<(PureState, [LocalUnitary; 3])> {
            let us = [
                LocalUnitary::new(0, ua.clone())?,
                LocalUnitary::new(1, ub.clone())?,
                LocalUnitary::new(2, uc.clone())?,
            ];
            Ok((apply_local_unitaries(psi, us.iter())?, us))
        };
    let (first, _) = apply(&ua, &ub, &uc)?;

    // Phase normalization: a, b, c, d real and nonnegative; what is left sits on |111⟩.
    let amp = |s: &PureState, k: usize| s.amplitudes()[k];
    let unit_phase = |z: C64| {
        if z.norm() > 1e-14 {
            (z / z.norm()).conj()
        } else {
            c(1.0, 0.0)
        }
    };
    let pa0 = unit_phase(amp(&first, 0b000));
    let pa1 = unit_phase(amp(&first, 0b100));
    let pb1 = unit_phase(amp(&first, 0b110) * pa1);
    let pc1 = unit_phase(amp(&first, 0b101) * pa1);
    for k in 0..2 {
        ua[(0, k)] *= pa0;
        ua[(1, k)] *= pa1;
        ub[(1, k)] *= pb1;
        uc[(1, k)] *= pc1;
    }
    let (mut out, mut unitaries) = apply(&ua, &ub, &uc)?;

    // With b, c or d zero the |111⟩ phase is not invariant; rotate it away.
    let f0 = amp(&out, 0b111);
    let zero = |k: usize| amp(&out, k).norm() < 1e-12;
    if f0.norm() > 1e-14 && (zero(0b100) || zero(0b110) || zero(0b101)) {
        let phi0 = f0.arg();
        // phases on |1⟩ of A, B, C
        let (ta, tb, tc) = if zero(0b110) {
            (0.0, -phi0, 0.0)
        } else if zero(0b101) {
            (0.0, 0.0, -phi0)
        } else {
            (phi0, -phi0, -phi0)
        };
        for k in 0..2 {
            ua[(1, k)] *= C64::from_polar(1.0, ta);
            ub[(1, k)] *= C64::from_polar(1.0, tb);
            uc[(1, k)] *= C64::from_polar(1.0, tc);
        }
        (out, unitaries) = apply(&ua, &ub, &uc)?;
    }
    let v = out.amplitudes();
    let residual = (0..8)
        .filter(|k| !SUPPORT.contains(k))
        .map(|k| v[k].norm())
        .fold(0.0, f64::max);
    let f = v[0b111];
    let mut phi = if f.norm() > 1e-14 { f.arg() } else { 0.0 };
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    if phi >= std::f64::consts::TAU {
        phi = 0.0;
    }
    let real = |z: C64| z.re.max(0.0);
    let mut form = CanonicalForm3Q {
        a: real(v[0b000]),
        b: real(v[0b100]),
        c: real(v[0b110]),
        d: real(v[0b101]),
        f: f.norm(),
        phi,
    };
    let norm = [form.a, form.b, form.c, form.d, form.f]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    form.a /= norm;
    form.b /= norm;
    form.c /= norm;
    form.d /= norm;
    form.f /= norm;
    Ok(CanonicalBranch {
        form,
        unitaries,
        residual,
    })
}

/// Local unitaries taking a three-qubit pure state to canonical form.
///
/// U^A is chosen so that the `|0⟩_A` slice becomes singular, a homogeneous
/// quadratic condition; both of its roots give a branch unless they coincide.
/// U^B and U^C are the singular vectors of that slice, and diagonal phases
/// finish the job.
pub fn canonicalize3(psi: &PureState) -> Result<CanonicalizationResult> {
    if !psi.layout().is_qubits() || psi.num_subsystems() != 3 {
        return Err(Error::Argument(format!(
            "canonicalization needs three qubits, got dims {:?}",
            psi.layout().dims()
        )));
    }
    let (t0, t1) = slices(psi);
    let (dirs, _) = singular_directions(&t0, &t1)?;
    let mut forms: Vec<CanonicalBranch> = Vec::new();
    for (u, v) in dirs {
        let br = branch_from_direction(psi, u, v)?;
        if br.residual > 1e-8 {
            return Err(Error::Numerical(format!(
                "canonical reduction left amplitude {:e} outside the support",
                br.residual
            )));
        }
        let dup = forms.iter().any(|o| {
            let (x, y) = (o.form, br.form);
            [x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d, x.f - y.f]
                .iter()
                .all(|e| e.abs() < 1e-10)
                && (x.f < 1e-10 || (x.phi - y.phi).abs() < 1e-10)
        });
        if !dup {
            forms.push(br);
        }
    }
    forms.sort_by(|x, y| {
        y.form
            .a
            .total_cmp(&x.form.a)
            .then(y.form.f.total_cmp(&x.form.f))
    });
    let residual = forms.iter().map(|b| b.residual).fold(0.0, f64::max);
    Ok(CanonicalizationResult { forms, residual })
}

/// Δ = E₃^A N_G^A − τ₃ evaluated on the state as given.
pub fn coherence_delta(psi: &PureState) -> Result<f64> {
    let rho = psi.outer();
    let e3 = negativity::partial_kway_negativity(&rho, 3, 0)?;
    let n = negativity::global_negativity(&rho, 0)?;
    Ok(e3 * n - tangle::three_tangle(psi)?.tau3)
}

/// a|000⟩ + √(1-a²)|111⟩.
pub fn ghz_like(a: f64) -> Result<PureState> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Argument(format!("a={a} outside (0, 1)")));
    }
    let g = (1.0 - a * a).sqrt();
    PureState::from_real(
        SubsystemLayout::qubits(3),
        &[a, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g],
    )
}

/// E₃^A(α) = (a√(1-a²)/2)(3 + cos 2α) and E₂^A(α) = (a√(1-a²)/2)(1 - cos 2α)
/// for the GHZ-like state after a rotation of qubit C by angle α.
pub fn ghz_rotation_profile(a: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Argument(format!("a={a} outside (0, 1)")));
    }
    let h = a * (1.0 - a * a).sqrt() / 2.0;
    let c2 = (2.0 * alpha).cos();
    Ok((h * (3.0 + c2), h * (1.0 - c2)))
}

/// Numeric (E₃^A, E₂^A) of U^C(α)|Ψ_a⟩.
pub fn ghz_rotation_numeric(a: f64, alpha: f64) -> Result<(f64, f64)> {
    let psi = ghz_like(a)?.apply_local_unitary(&LocalUnitary::rotation(2, alpha))?;
    let rep = negativity::negativity_report(&psi.outer(), 0)?;
    Ok((rep.e(3), rep.e(2)))
}

/// Density operator of a canonical form, convenience for callers that only
/// need ρ.
pub fn canonical_density(form: &CanonicalForm3Q) -> Result<DensityOperator> {
    Ok(build_canonical_state(form)?.outer())
}
