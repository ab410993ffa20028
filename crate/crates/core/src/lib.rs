//! Spin correlations of e⁺e⁻ pairs produced in two-photon collisions
//! (γγ → e⁺e⁻), and the Clauser–Horne indicator built from them.
//!
//! Probabilities come from two independent sources: closed-form expressions
//! for linear, circular and unpolarized photon preparations
//! ([`closed_form`]), and a numerical tree amplitude assembled from gamma
//! matrices and Dirac spinors ([`oracle`]). Either feeds the four-pair
//! normalization in [`probability`] and the indicator search in [`bell`].

pub mod bell;
pub mod closed_form;
pub mod fixtures;
pub mod format;
pub mod kinematics;
pub mod linalg;
pub mod oracle;
pub mod probability;
pub mod report;
pub mod spinors;

pub use closed_form::{CircularUnits, Mode};
pub use kinematics::{ProcessKinematics, DEFAULT_ELECTRON_MASS_MEV};

/// Library version, echoed in JSON output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
