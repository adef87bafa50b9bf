//! Global, K-way and partial K-way negativities for multi-qubit states,
//! together with Wootters tangles, the three tangle, three-qubit canonical
//! forms, the GHZ+W superposition family and convex-roof extensions for
//! mixed states.
//!
//! ```
//! use kway_negativity::{negativity, state::PureState};
//!
//! let rho = PureState::w(3).outer();
//! let report = negativity::negativity_report(&rho, 0).unwrap();
//! assert!((report.n_global - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-10);
//! assert!(report.e_partial[&3].abs() < 1e-12);
//! ```

pub mod audit;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod ghzw;
pub mod io;
pub mod linalg;
pub mod negativity;
pub mod rng;
pub mod roof;
pub mod state;
pub mod tangle;
pub mod tolerance;
pub mod transpose;

pub use error::{Error, Result};
