//! Center-of-mass kinematics of γ(k₁) γ(k₂) → e⁺(p₁) e⁻(p₂) and photon
//! polarization vectors.
//!
//! Photons travel along ±z with energy ω each; the positron leaves along +x
//! and the electron along −x. All energies and momenta are in MeV.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{C64, I, ONE, ZERO};

/// Electron mass in MeV used when none is configured.
pub const DEFAULT_ELECTRON_MASS_MEV: f64 = 0.510999;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KinematicsError {
    #[error(
        "photon energy {omega} MeV is below pair threshold: need 2ω ≥ 2m_e = {threshold:.3} MeV total (m_e = {m_e} MeV)",
        threshold = 2.0 * .m_e
    )]
    BelowThreshold { omega: f64, m_e: f64 },
    #[error("lepton mass must be finite and positive, got {0} MeV")]
    InvalidMass(f64),
    #[error("photon energy must be finite, got {0}")]
    InvalidEnergy(f64),
}

/// Real contravariant four-vector (E; px, py, pz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub e: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(e: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { e, x, y, z }
    }

    /// Upper-index components (p⁰, p¹, p², p³).
    pub fn components(&self) -> [f64; 4] {
        [self.e, self.x, self.y, self.z]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.e + o.e, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.e - o.e, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// a⁰b⁰ − a·b
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.e * b.e - a.x * b.x - a.y * b.y - a.z * b.z
}

/// Fixed kinematics of one center-of-mass configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessKinematics {
    /// Energy of each photon (MeV).
    pub omega: f64,
    /// Lepton mass (MeV).
    pub m_e: f64,
    /// Lepton speed √(1 − (m_e/ω)²).
    pub beta: f64,
    /// Small-to-large spinor component ratio √((ω − m_e)/(ω + m_e)).
    pub rho: f64,
    pub k1: FourVector,
    pub k2: FourVector,
    /// Positron momentum.
    pub p1: FourVector,
    /// Electron momentum.
    pub p2: FourVector,
}

impl ProcessKinematics {
    pub fn new(omega: f64, m_e: f64) -> Result<Self, KinematicsError> {
        if !(m_e.is_finite() && m_e > 0.0) {
            return Err(KinematicsError::InvalidMass(m_e));
        }
        if !omega.is_finite() {
            return Err(KinematicsError::InvalidEnergy(omega));
        }
        if omega < m_e {
            return Err(KinematicsError::BelowThreshold { omega, m_e });
        }
        let ratio = m_e / omega;
        let beta = (1.0 - ratio * ratio).sqrt();
        let rho = (1.0 - ratio).sqrt() / (1.0 + ratio).sqrt();
        let p = omega * beta;
        Ok(ProcessKinematics {
            omega,
            m_e,
            beta,
            rho,
            k1: FourVector::new(omega, 0.0, 0.0, omega),
            k2: FourVector::new(omega, 0.0, 0.0, -omega),
            p1: FourVector::new(omega, p, 0.0, 0.0),
            p2: FourVector::new(omega, -p, 0.0, 0.0),
        })
    }

    /// Kinematics with the default electron mass.
    pub fn with_default_mass(omega: f64) -> Result<Self, KinematicsError> {
        Self::new(omega, DEFAULT_ELECTRON_MASS_MEV)
    }

    /// m_e / ω
    pub fn mass_ratio(&self) -> f64 {
        self.m_e / self.omega
    }
}

/// Free-function form of [`ProcessKinematics::new`].
pub fn build_kinematics(omega: f64, m_e: f64) -> Result<ProcessKinematics, KinematicsError> {
    ProcessKinematics::new(omega, m_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Right,
    Left,
}

/// Which photon a polarization belongs to; photon 2 embeds with a sign flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Photon {
    First,
    Second,
}

/// Spatial polarization vector e⃗ of a photon, stored as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationVector(pub [C64; 3]);

impl PolarizationVector {
    pub fn from_real(v: [f64; 3]) -> Self {
        PolarizationVector(v.map(C64::from))
    }

    /// Cartesian basis vector ê_{i+1}.
    pub fn axis(i: usize) -> Self {
        let mut v = [ZERO; 3];
        v[i] = ONE;
        PolarizationVector(v)
    }

    pub fn components(&self) -> [C64; 3] {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn negated(&self) -> Self {
        PolarizationVector(self.0.map(|z| -z))
    }

    /// Complex dot product with a real direction (no conjugation).
    pub fn dot_real(&self, n: [f64; 3]) -> C64 {
        self.0.iter().zip(n).map(|(e, n)| e * n).sum()
    }

    /// Four-vector embedding: photon 1 → (0, e⃗), photon 2 → (0, −e⃗).
    pub fn embed(&self, photon: Photon) -> [C64; 4] {
        let sign = match photon {
            Photon::First => 1.0,
            Photon::Second => -1.0,
        };
        [ZERO, self.0[0] * sign, self.0[1] * sign, self.0[2] * sign]
    }

    /// Component-wise cross product e⃗ × f⃗ (bilinear, no conjugation).
    pub fn cross(&self, other: &PolarizationVector) -> [C64; 3] {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1]
    }
}

/// Linear polarization at angle φ from the x-axis in the transverse plane.
pub fn linear_polarization(phi: f64) -> PolarizationVector {
    PolarizationVector::from_real([phi.cos(), phi.sin(), 0.0])
}

/// Circular polarization: right → (1, i, 0)/√2, left → (1, −i, 0)/√2.
pub fn circular_polarization(handedness: Handedness) -> PolarizationVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let y = match handedness {
        Handedness::Right => I,
        Handedness::Left => -I,
    };
    PolarizationVector([C64::from(s), y * s, ZERO])
}

/// Direction of photon 1 (k̂₁ = +z).
pub const PHOTON1_DIRECTION: [f64; 3] = [0.0, 0.0, 1.0];
/// Direction of photon 2 (k̂₂ = −z).
pub const PHOTON2_DIRECTION: [f64; 3] = [0.0, 0.0, -1.0];

/// Polarization sum Σ e₂ⁱ e₁ʲ = δⁱʲ − n₂ⁱ n₁ʲ over the two photons.
pub fn polarization_basis_sum() -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            *entry = delta - PHOTON2_DIRECTION[i] * PHOTON1_DIRECTION[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn threshold_configuration() {
        let kin = ProcessKinematics::new(0.511, 0.511).unwrap();
        assert_eq!(kin.beta, 0.0);
        assert_eq!(kin.rho, 0.0);
        assert_eq!(kin.p1, FourVector::new(0.511, 0.0, 0.0, 0.0));
    }

    #[test]
    fn rho_squared_at_1_05() {
        let kin = ProcessKinematics::new(1.05, 0.511).unwrap();
        let expected = (1.05 - 0.511) / (1.05 + 0.511);
        assert!((kin.rho * kin.rho - expected).abs() < 1e-15);
        assert!((expected - 0.345291).abs() < 1e-6);
    }

    #[test]
    fn below_threshold_is_rejected() {
        let err = ProcessKinematics::new(0.3, DEFAULT_ELECTRON_MASS_MEV).unwrap_err();
        assert!(matches!(err, KinematicsError::BelowThreshold { .. }));
        assert!(err.to_string().contains("1.022"), "{err}");
        assert!(matches!(
            ProcessKinematics::new(1.0, 0.0),
            Err(KinematicsError::InvalidMass(_))
        ));
        assert!(matches!(
            ProcessKinematics::new(f64::NAN, 0.5),
            Err(KinematicsError::InvalidEnergy(_))
        ));
    }

    #[test]
    fn invariant_products() {
        let kin = ProcessKinematics::with_default_mass(3.7).unwrap();
        let w = kin.omega;
        assert_eq!(kin.k1.square(), 0.0);
        assert_eq!(kin.p1.dot(&kin.k1), w * w);
        assert_eq!(kin.p1.dot(&kin.k2), w * w);
        assert_eq!(kin.k1.dot(&kin.k2), 2.0 * w * w);
        let m2 = kin.m_e * kin.m_e;
        assert!((kin.p1.square() - m2).abs() <= 1e-9 * m2);
        assert_eq!(kin.k1 + kin.k2, kin.p1 + kin.p2);
    }

    #[test]
    fn linear_vectors() {
        let e = linear_polarization(0.0);
        assert_eq!(e, PolarizationVector::from_real([1.0, 0.0, 0.0]));
        let e = linear_polarization(FRAC_PI_2);
        assert!((e.0[0].re).abs() < 1e-15 && e.0[1] == ONE);
        let e = linear_polarization(FRAC_PI_4);
        assert!((e.0[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.0[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn circular_vectors() {
        let r = circular_polarization(Handedness::Right);
        let l = circular_polarization(Handedness::Left);
        assert_eq!(r.0[1], I * FRAC_1_SQRT_2);
        assert_eq!(l.0[1], -I * FRAC_1_SQRT_2);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(r.dot_real(PHOTON1_DIRECTION), ZERO);
    }

    #[test]
    fn photon_two_embeds_with_sign_flip() {
        let e = PolarizationVector::axis(0);
        assert_eq!(e.embed(Photon::First)[1], ONE);
        assert_eq!(e.embed(Photon::Second)[1], -ONE);
        assert_eq!(e.embed(Photon::Second)[0], ZERO);
    }

    #[test]
    fn basis_sum_entries() {
        let s = polarization_basis_sum();
        assert_eq!(s[0][0], 1.0);
        assert_eq!(s[1][1], 1.0);
        assert_eq!(s[2][2], 2.0);
        assert_eq!(s[0][1], 0.0);
        assert_eq!(s[0][2], 0.0);
    }
}
