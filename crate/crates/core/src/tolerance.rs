//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Central tolerance record. All thresholds used for validation and for
/// classifying eigenvalues live here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity check, max |M - M†| entry.
    pub herm: f64,
    /// Norm / trace check.
    pub norm: f64,
    /// Eigenvalues below `-eig` count as negative.
    pub eig: f64,
    /// Smallest eigenvalue a density operator may have.
    pub psd: f64,
    /// Unitarity check, max |U†U - 1| entry.
    pub unitary: f64,
    /// Sum-rule and inequality slack.
    pub sum_rule: f64,
    /// Jacobi stop criterion on the off-diagonal Frobenius norm.
    pub jacobi_off: f64,
    /// Jacobi sweep limit.
    pub jacobi_max_sweeps: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        norm: 1e-9,
        eig: 1e-10,
        psd: 1e-9,
        unitary: 1e-12,
        sum_rule: 1e-9,
        jacobi_off: 1e-13,
        jacobi_max_sweeps: 100,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Shorthand for the default record.
pub const TOL: Tolerances = Tolerances::DEFAULT;
