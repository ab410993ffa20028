//! Closed-form amplitudes and joint probabilities for the three photon
//! preparations: linear (both polarization planes at π/4 to the x-axis),
//! circular (right ⊗ left) and unpolarized.
//!
//! These are implemented exactly as published, independent of the numerical
//! amplitude in [`crate::oracle`]. The circular expressions mix the photon
//! energy in MeV with dimensionless numbers; [`CircularUnits`] selects whether
//! ω enters in MeV as written or in units of m_e.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kinematics::ProcessKinematics;
use crate::linalg::{Mat, Mat2, C64, I, ONE, ZERO};
use crate::probability::{SourceLabel, SpinIntensity};
use crate::spinors::{xi, TwoSpinor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Circular,
    Unpolarized,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Linear, Mode::Circular, Mode::Unpolarized];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Circular => "circular",
            Mode::Unpolarized => "unpolarized",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Mode::Linear),
            "circular" => Ok(Mode::Circular),
            "unpolarized" | "unpolarised" => Ok(Mode::Unpolarized),
            other => Err(format!(
                "unknown mode `{other}` (expected linear, circular or unpolarized)"
            )),
        }
    }
}

/// How ω enters the circular-mode expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircularUnits {
    /// ω in MeV, as printed.
    #[default]
    Mev,
    /// ω in units of the lepton mass.
    Normalized,
}

impl CircularUnits {
    pub fn as_str(&self) -> &'static str {
        match self {
            CircularUnits::Mev => "mev",
            CircularUnits::Normalized => "normalized",
        }
    }

    fn energy(&self, kin: &ProcessKinematics) -> f64 {
        match self {
            CircularUnits::Mev => kin.omega,
            CircularUnits::Normalized => kin.omega / kin.m_e,
        }
    }
}

impl fmt::Display for CircularUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CircularUnits {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mev" => Ok(CircularUnits::Mev),
            "normalized" | "normalised" => Ok(CircularUnits::Normalized),
            other => Err(format!(
                "unknown circular units `{other}` (expected mev or normalized)"
            )),
        }
    }
}

fn half_sin(x: f64) -> f64 {
    (0.5 * x).sin()
}

fn half_sin_sq(x: f64) -> f64 {
    let s = half_sin(x);
    s * s
}

/// Linear-mode amplitude:
/// i·r/(1+r)·sin((χ₁−χ₂)/2) − 1/(1+r)·sin((χ₁+χ₂)/2), with r = m_e/ω.
pub fn amp_linear(kin: &ProcessKinematics, chi1: f64, chi2: f64) -> C64 {
    let r = kin.mass_ratio();
    I * (r / (1.0 + r) * half_sin(chi1 - chi2)) - C64::from(half_sin(chi1 + chi2) / (1.0 + r))
}

/// Linear-mode joint probability.
pub fn p_linear(kin: &ProcessKinematics, chi1: f64, chi2: f64) -> f64 {
    let r = kin.mass_ratio();
    let denom = 2.0 * (1.0 + r * r);
    r * r * half_sin_sq(chi1 - chi2) / denom + half_sin_sq(chi1 + chi2) / denom
}

/// ω → ∞ limit of the linear joint probability, (1/2) sin²((χ₁+χ₂)/2).
pub fn p_linear_limit(chi1: f64, chi2: f64) -> f64 {
    0.5 * half_sin_sq(chi1 + chi2)
}

/// Circular-mode amplitude: ω cos((χ₁−χ₂)/2) + i β sin((χ₁−χ₂)/2).
pub fn amp_circular(kin: &ProcessKinematics, chi1: f64, chi2: f64, units: CircularUnits) -> C64 {
    let w = units.energy(kin);
    let d = 0.5 * (chi1 - chi2);
    C64::new(w * d.cos(), kin.beta * d.sin())
}

/// Circular-mode joint probability:
/// [ω² + ((1−ω²) − (m_e/ω)²) sin²(Δ/2)] / (2[2ω² + (1−ω²) − (m_e/ω)²]).
pub fn p_circular(kin: &ProcessKinematics, chi1: f64, chi2: f64, units: CircularUnits) -> f64 {
    let w = units.energy(kin);
    let w2 = w * w;
    let r = kin.mass_ratio();
    let k = (1.0 - w2) - r * r;
    (w2 + k * half_sin_sq(chi1 - chi2)) / (2.0 * (2.0 * w2 + k))
}

/// Unpolarized joint probability (1/2) sin²((χ₁−χ₂)/2).
pub fn p_unpolarized(chi1: f64, chi2: f64) -> f64 {
    0.5 * half_sin_sq(chi1 - chi2)
}

/// Closed-form single-spin probability; 1/2 in every mode.
pub fn marginals_closed_form(_mode: Mode) -> f64 {
    0.5
}

/// Two-particle spin state as a 2x2 coefficient matrix ψ[a][b], with `a`
/// indexing the electron two-spinor component and `b` the positron one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledPairState(pub Mat2);

impl EntangledPairState {
    /// Coefficients in the order (↑↑, ↑↓, ↓↑, ↓↓), electron first.
    pub fn coefficients(&self) -> [C64; 4] {
        let m = self.0 .0;
        [m[0][0], m[0][1], m[1][0], m[1][1]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients().iter().map(|c| c.norm_sqr()).sum()
    }

    /// ξ₂† ψ ξ₁
    pub fn project(&self, positron: &TwoSpinor, electron: &TwoSpinor) -> C64 {
        electron.components.inner(&self.0.apply(&positron.components))
    }

    /// ‖ψ ξ₁‖²: probability that the positron is found along ξ₁.
    pub fn positron_marginal(&self, positron: &TwoSpinor) -> f64 {
        self.0.apply(&positron.components).norm_sqr()
    }

    /// ‖ξ₂† ψ‖²: probability that the electron is found along ξ₂.
    pub fn electron_marginal(&self, electron: &TwoSpinor) -> f64 {
        let row = self.0.adjoint().apply(&electron.components);
        row.norm_sqr()
    }
}

/// (|↑⟩₂|↓⟩₁ + |↓⟩₂|↑⟩₁)/√2
pub fn unpolarized_state() -> EntangledPairState {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    EntangledPairState(Mat([[ZERO, ONE * s], [ONE * s, ZERO]]))
}

/// ‖ξ₂†ψξ₁‖² on the unpolarized state.
pub fn p_unpolarized_from_state(chi1: f64, chi2: f64) -> f64 {
    unpolarized_state().project(&xi(chi1), &xi(chi2)).norm_sqr()
}

/// Closed-form joint probability for `mode`.
pub fn p_joint(mode: Mode, kin: &ProcessKinematics, chi1: f64, chi2: f64, units: CircularUnits) -> f64 {
    match mode {
        Mode::Linear => p_linear(kin, chi1, chi2),
        Mode::Circular => p_circular(kin, chi1, chi2, units),
        Mode::Unpolarized => p_unpolarized(chi1, chi2),
    }
}

/// Closed-form amplitude for `mode`. The unpolarized amplitude is the
/// projection ξ₂†ψξ₁ onto the entangled state.
pub fn amplitude(mode: Mode, kin: &ProcessKinematics, chi1: f64, chi2: f64, units: CircularUnits) -> C64 {
    match mode {
        Mode::Linear => amp_linear(kin, chi1, chi2),
        Mode::Circular => amp_circular(kin, chi1, chi2, units),
        Mode::Unpolarized => unpolarized_state().project(&xi(chi1), &xi(chi2)),
    }
}

/// Closed-form joint probability used as a spin intensity. Since the
/// published expressions are already normalized, renormalizing them is an
/// identity up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormModel {
    pub mode: Mode,
    pub kin: ProcessKinematics,
    pub units: CircularUnits,
}

impl ClosedFormModel {
    pub fn new(mode: Mode, kin: ProcessKinematics) -> Self {
        ClosedFormModel {
            mode,
            kin,
            units: CircularUnits::default(),
        }
    }

    pub fn with_units(mut self, units: CircularUnits) -> Self {
        self.units = units;
        self
    }

    pub fn joint(&self, chi1: f64, chi2: f64) -> f64 {
        p_joint(self.mode, &self.kin, chi1, chi2, self.units)
    }
}

impl SpinIntensity for ClosedFormModel {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        self.joint(chi1, chi2)
    }

    fn label(&self) -> SourceLabel {
        SourceLabel {
            mode: Some(self.mode),
            omega: Some(self.kin.omega),
        }
    }

    fn shift_invariant(&self) -> bool {
        !matches!(self.mode, Mode::Linear)
    }
}

/// Closed-form amplitude (rather than probability) as a spin intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormAmplitude(pub ClosedFormModel);

impl SpinIntensity for ClosedFormAmplitude {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        let m = &self.0;
        amplitude(m.mode, &m.kin, chi1, chi2, m.units).norm_sqr()
    }

    fn label(&self) -> SourceLabel {
        self.0.label()
    }

    fn shift_invariant(&self) -> bool {
        self.0.shift_invariant()
    }
}
