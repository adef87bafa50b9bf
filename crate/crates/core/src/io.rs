//! State files, report documents and their text encodings.
//!
//! State file:
//!
//! ```json
//! {"dims": [2, 2, 2], "amplitudes": [{"re": 0.7071067811865476, "im": 0}, ...]}
//! ```
//!
//! with exactly one of `amplitudes`, `matrix` (rows of `{re, im}`) or
//! `ensemble` (`[{"p": 0.5, "amplitudes": [...]}, ...]`). Amplitude k is the
//! basis label with the last subsystem fastest.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::canonical::{CanonicalForm3Q, ClosedForms};
use crate::error::{Error, Result};
use crate::ghzw::SweepRow;
use crate::linalg::{self, CMatrix, CVector, ReIm};
use crate::negativity::NegativityReport;
use crate::roof::{Ensemble, RoofMeasure};
use crate::state::{DensityOperator, PureState, SubsystemLayout};
use crate::tangle::TangleReport;
use crate::tolerance::Tolerances;

/// Significant digits of every real written by [`emit_json`] and the CSV writers.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Fixed header of the sweep table.
pub const SWEEP_HEADER: [&str; 7] = [
    "q",
    "n_global",
    "e2",
    "e3",
    "tau3_formula",
    "e3_times_ng",
    "delta",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    p: f64,
    amplitudes: Vec<ReIm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateFile {
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<ReIm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<ReIm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ensemble: Option<Vec<RawMember>>,
}

/// Parsed and validated content of a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityOperator),
    Ensemble(Ensemble),
}

impl StateInput {
    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            StateInput::Pure(psi) => psi.layout(),
            StateInput::Mixed(rho) => rho.layout(),
            StateInput::Ensemble(e) => e.members()[0].1.layout(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            StateInput::Pure(psi) => psi.outer(),
            StateInput::Mixed(rho) => rho.clone(),
            StateInput::Ensemble(e) => e.density(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateInput::Pure(psi) => Some(psi),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateInput::Pure(_) => "amplitudes",
            StateInput::Mixed(_) => "matrix",
            StateInput::Ensemble(_) => "ensemble",
        }
    }
}

fn vector(layout: &SubsystemLayout, amps: &[ReIm]) -> Result<CVector> {
    if amps.len() != layout.total_dim() {
        return Err(Error::Validation(format!(
            "{} amplitudes for dims {:?} (need {})",
            amps.len(),
            layout.dims(),
            layout.total_dim()
        )));
    }
    Ok(CVector::from_iterator(
        amps.len(),
        amps.iter().map(|&z| z.into()),
    ))
}

/// Parses and validates a state file.
pub fn parse_state_file(text: &str) -> Result<StateInput> {
    let raw: RawStateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let present = [
        raw.amplitudes.is_some(),
        raw.matrix.is_some(),
        raw.ensemble.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if present != 1 {
        return Err(Error::Parse(format!(
            "need exactly one of amplitudes, matrix, ensemble; found {present}"
        )));
    }
    let layout = SubsystemLayout::new(raw.dims)?;
    if let Some(amps) = raw.amplitudes {
        return Ok(StateInput::Pure(PureState::new(
            layout.clone(),
            vector(&layout, &amps)?,
        )?));
    }
    if let Some(rows) = raw.matrix {
        let n = layout.total_dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!(
                "matrix must be {n}x{n} for dims {:?}",
                layout.dims()
            )));
        }
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j].into());
        return Ok(StateInput::Mixed(DensityOperator::new(layout, m)?));
    }
    let members = raw
        .ensemble
        .unwrap_or_default()
        .into_iter()
        .map(|m| {
            Ok((
                m.p,
                PureState::new(layout.clone(), vector(&layout, &m.amplitudes)?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateInput::Ensemble(Ensemble::new(members)?))
}

/// Inverse of [`parse_state_file`], full precision.
pub fn state_file_json(input: &StateInput) -> String {
    let amps = |psi: &PureState| {
        psi.amplitudes()
            .iter()
            .map(|&z| ReIm::from(z))
            .collect::<Vec<_>>()
    };
    let dims = input.layout().dims().to_vec();
    let raw = match input {
        StateInput::Pure(psi) => RawStateFile {
            dims,
            amplitudes: Some(amps(psi)),
            matrix: None,
            ensemble: None,
        },
        StateInput::Mixed(rho) => {
            let m = rho.matrix();
            RawStateFile {
                dims,
                amplitudes: None,
                matrix: Some(
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
                        .collect(),
                ),
                ensemble: None,
            }
        }
        StateInput::Ensemble(e) => RawStateFile {
            dims,
            amplitudes: None,
            matrix: None,
            ensemble: Some(
                e.members()
                    .iter()
                    .map(|(p, psi)| RawMember {
                        p: *p,
                        amplitudes: amps(psi),
                    })
                    .collect(),
            ),
        },
    };
    serde_json::to_string(&raw).expect("state file serializes")
}

/// Lowercase hex SHA-256 of the input bytes.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Canonical reduction as reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSection {
    pub forms: Vec<CanonicalForm3Q>,
    pub residual: f64,
    /// Closed-form values of the first form.
    pub closed_forms: ClosedForms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub p: f64,
    pub amplitudes: Vec<ReIm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofSection {
    pub measure: RoofMeasure,
    pub focus: usize,
    pub value: f64,
    pub eigen_ensemble_value: f64,
    pub restarts: usize,
    pub converged: bool,
    pub certificate: Vec<EnsembleMember>,
}

/// Everything one command reports about one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input_digest: String,
    pub input_kind: String,
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub tolerances: Tolerances,
    pub reports: Vec<NegativityReport>,
    pub tangles: Option<TangleReport>,
    pub canonical: Option<CanonicalSection>,
    pub delta: Option<f64>,
    pub roof: Option<RoofSection>,
}

impl ReportDocument {
    pub fn new(command: &str, input_text: &str, input: &StateInput) -> Self {
        Self {
            tool: "kwayneg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            input_digest: digest(input_text),
            input_kind: input.kind().into(),
            dims: input.layout().dims().to_vec(),
            seeds: Vec::new(),
            tolerances: crate::tolerance::TOL,
            reports: Vec::new(),
            tangles: None,
            canonical: None,
            delta: None,
            roof: None,
        }
    }

    /// Copy with every real rounded as [`emit_json`] writes it.
    pub fn rounded(&self) -> Result<Self> {
        let v = serde_json::to_value(self).map_err(|e| Error::Invariant(e.to_string()))?;
        serde_json::from_value(round_value(v)).map_err(|e| Error::Invariant(e.to_string()))
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = linalg::round_sig(n.as_f64().unwrap_or(0.0), SIGNIFICANT_DIGITS) + 0.0;
            serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with reals at [`SIGNIFICANT_DIGITS`] and -0 written as 0.
/// Object keys come out sorted, so equal documents give identical text.
pub fn emit_json<T: Serialize>(doc: &T) -> Result<String> {
    let v = serde_json::to_value(doc).map_err(|e| Error::Invariant(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&round_value(v))
        .map_err(|e| Error::Invariant(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A real as written to CSV.
pub fn fmt_real(x: f64) -> String {
    let r = linalg::round_sig(x, SIGNIFICANT_DIGITS);
    if r == 0.0 {
        "0".into()
    } else if r.abs() < 1e-4 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Header plus rows, all reals through [`fmt_real`].
pub fn emit_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invariant(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Invariant(format!(
                "row has {} fields, header {}",
                r.len(),
                header.len()
            )));
        }
        w.write_record(r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Invariant(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

pub fn emit_sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [
                r.q,
                r.n_global,
                r.e2,
                r.e3,
                r.tau3_formula,
                r.e3_times_ng,
                r.delta,
            ]
            .iter()
            .map(|&x| fmt_real(x))
            .collect()
        })
        .collect();
    emit_csv(&SWEEP_HEADER, &body)
}

/// Reads a sweep table back; used to check the CSV round trip.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != SWEEP_HEADER {
        return Err(Error::Parse(format!("unexpected sweep header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
