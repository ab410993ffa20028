//! Normalized spin-measurement probabilities from any amplitude.
//!
//! Given an unnormalized intensity F(χ₁, χ₂) (usually |A|²) at fixed photon
//! preparation and energy, the joint probability is F divided by the sum of F
//! over the four antipodal pairs (χ₁,χ₂), (χ₁+π,χ₂), (χ₁,χ₂+π), (χ₁+π,χ₂+π).
//! Marginals are sums of two joint probabilities sharing an angle, and are
//! checked for independence from the free reference angle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::Mode;
use crate::linalg::C64;

/// Maximum tolerated dependence of a marginal on its reference angle.
pub const MARGINAL_REFERENCE_TOLERANCE: f64 = 1e-10;

/// Reference angles used when summing out the unmeasured spin.
pub const MARGINAL_REFERENCES: [f64; 2] = [0.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ProbabilityError {
    #[error("degenerate normalization at (χ₁, χ₂) = ({chi1}, {chi2}): antipodal intensity sum is {sum}")]
    DegenerateNormalization { chi1: f64, chi2: f64, sum: f64 },
    #[error(
        "marginal at angle {angle} depends on the reference angle: {first} vs {second} (|Δ| = {spread:e})"
    )]
    ReferenceDependentMarginal {
        angle: f64,
        first: f64,
        second: f64,
        spread: f64,
    },
}

/// Mode and energy tag carried along with computed probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SourceLabel {
    pub mode: Option<Mode>,
    pub omega: Option<f64>,
}

/// Unnormalized, nonnegative spin-correlation intensity F(χ₁, χ₂).
pub trait SpinIntensity {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64;

    fn label(&self) -> SourceLabel {
        SourceLabel::default()
    }

    /// True if F depends on the angles only through χ₁ − χ₂.
    fn shift_invariant(&self) -> bool {
        false
    }
}

impl<T: SpinIntensity + ?Sized> SpinIntensity for &T {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        (**self).intensity(chi1, chi2)
    }
    fn label(&self) -> SourceLabel {
        (**self).label()
    }
    fn shift_invariant(&self) -> bool {
        (**self).shift_invariant()
    }
}

/// Intensity |A(χ₁, χ₂)|² of a complex amplitude.
pub struct FromAmplitude<F>(pub F);

impl<F: Fn(f64, f64) -> C64> SpinIntensity for FromAmplitude<F> {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        (self.0)(chi1, chi2).norm_sqr()
    }
}

/// Intensity given directly as a real function.
pub struct FromIntensity<F>(pub F);

impl<F: Fn(f64, f64) -> f64> SpinIntensity for FromIntensity<F> {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        (self.0)(chi1, chi2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbability {
    pub value: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub label: SourceLabel,
}

/// N(ω): sum of F over the four antipodal angle pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationFactor {
    pub value: f64,
    pub label: SourceLabel,
}

/// The four antipodal intensities, in the order
/// (χ₁,χ₂), (χ₁+π,χ₂), (χ₁,χ₂+π), (χ₁+π,χ₂+π).
pub fn antipodal_intensities<I: SpinIntensity + ?Sized>(src: &I, chi1: f64, chi2: f64) -> [f64; 4] {
    [
        src.intensity(chi1, chi2),
        src.intensity(chi1 + PI, chi2),
        src.intensity(chi1, chi2 + PI),
        src.intensity(chi1 + PI, chi2 + PI),
    ]
}

fn checked_sum(f: &[f64; 4], chi1: f64, chi2: f64) -> Result<f64, ProbabilityError> {
    let sum: f64 = f.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        Ok(sum)
    } else {
        Err(ProbabilityError::DegenerateNormalization { chi1, chi2, sum })
    }
}

pub fn normalization_factor<I: SpinIntensity + ?Sized>(
    src: &I,
    chi1: f64,
    chi2: f64,
) -> Result<NormalizationFactor, ProbabilityError> {
    let f = antipodal_intensities(src, chi1, chi2);
    Ok(NormalizationFactor {
        value: checked_sum(&f, chi1, chi2)?,
        label: src.label(),
    })
}

/// P[χ₁, χ₂] = F(χ₁, χ₂) / N.
pub fn normalize<I: SpinIntensity + ?Sized>(
    src: &I,
    chi1: f64,
    chi2: f64,
) -> Result<JointProbability, ProbabilityError> {
    let f = antipodal_intensities(src, chi1, chi2);
    let n = checked_sum(&f, chi1, chi2)?;
    Ok(JointProbability {
        value: f[0] / n,
        chi1,
        chi2,
        label: src.label(),
    })
}

/// All four antipodal joint probabilities, same order as
/// [`antipodal_intensities`].
pub fn antipodal_probabilities<I: SpinIntensity + ?Sized>(
    src: &I,
    chi1: f64,
    chi2: f64,
) -> Result<[f64; 4], ProbabilityError> {
    let f = antipodal_intensities(src, chi1, chi2);
    let n = checked_sum(&f, chi1, chi2)?;
    Ok(f.map(|x| x / n))
}

fn marginal_at<I: SpinIntensity + ?Sized>(
    src: &I,
    angle: f64,
    positron: bool,
) -> Result<f64, ProbabilityError> {
    let mut values = [0.0; 2];
    for (slot, &reference) in values.iter_mut().zip(MARGINAL_REFERENCES.iter()) {
        let (chi1, chi2) = if positron {
            (angle, reference)
        } else {
            (reference, angle)
        };
        let p = antipodal_probabilities(src, chi1, chi2)?;
        // P[χ₁,−] = P[χ₁,χ₂] + P[χ₁,χ₂+π];  P[−,χ₂] = P[χ₁,χ₂] + P[χ₁+π,χ₂]
        *slot = if positron { p[0] + p[2] } else { p[0] + p[1] };
    }
    let spread = (values[0] - values[1]).abs();
    if spread > MARGINAL_REFERENCE_TOLERANCE {
        return Err(ProbabilityError::ReferenceDependentMarginal {
            angle,
            first: values[0],
            second: values[1],
            spread,
        });
    }
    Ok(values[0])
}

/// P[χ₁, −]: only the positron spin is measured.
pub fn marginal_left<I: SpinIntensity + ?Sized>(src: &I, chi1: f64) -> Result<f64, ProbabilityError> {
    marginal_at(src, chi1, true)
}

/// P[−, χ₂]: only the electron spin is measured.
pub fn marginal_right<I: SpinIntensity + ?Sized>(src: &I, chi2: f64) -> Result<f64, ProbabilityError> {
    marginal_at(src, chi2, false)
}

/// Joint probability with both marginals, as printed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    pub joint: JointProbability,
    pub marginal_left: f64,
    pub marginal_right: f64,
    /// Sum of the four antipodal joint probabilities (1 by construction).
    pub antipodal_sum: f64,
}

pub fn probability_record<I: SpinIntensity + ?Sized>(
    src: &I,
    chi1: f64,
    chi2: f64,
) -> Result<ProbabilityRecord, ProbabilityError> {
    let p = antipodal_probabilities(src, chi1, chi2)?;
    Ok(ProbabilityRecord {
        joint: JointProbability {
            value: p[0],
            chi1,
            chi2,
            label: src.label(),
        },
        marginal_left: marginal_left(src, chi1)?,
        marginal_right: marginal_right(src, chi2)?,
        antipodal_sum: p.iter().sum(),
    })
}

/// Dense evaluation of joint probabilities at the given angle pairs.
pub fn probability_surface<I: SpinIntensity + Sync + ?Sized>(
    src: &I,
    points: &[(f64, f64)],
) -> Result<Vec<JointProbability>, ProbabilityError> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|&(c1, c2)| normalize(src, c1, c2))
        .collect()
}

/// Row-major (χ₁, χ₂) grid of angle pairs.
pub fn angle_grid(chi1: &[f64], chi2: &[f64]) -> Vec<(f64, f64)> {
    chi1.iter()
        .flat_map(|&a| chi2.iter().map(move |&b| (a, b)))
        .collect()
}
