//! Two-spinors for spin axes in the x–z plane and the Dirac spinors of the
//! outgoing pair.
//!
//! The spin axis of the positron makes angle χ₁ with the z-axis, the
//! electron's makes χ₂. Both live in the x–z plane.

use crate::kinematics::ProcessKinematics;
use crate::linalg::{gamma, paulis, stack, CVec, Mat4, Vec2C, Vec4C, C64, I};

/// ξ(χ) = (−i cos(χ/2), sin(χ/2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinor {
    pub components: Vec2C,
    pub chi: f64,
}

impl TwoSpinor {
    /// ξ†(other)
    pub fn inner(&self, other: &TwoSpinor) -> C64 {
        self.components.inner(&other.components)
    }
}

pub fn xi(chi: f64) -> TwoSpinor {
    let half = 0.5 * chi;
    TwoSpinor {
        components: CVec([-I * half.cos(), C64::from(half.sin())]),
        chi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinorKind {
    /// u(p₂)
    Electron,
    /// v(p₁)
    Positron,
}

/// Dirac spinor split into a scalar prefactor and the bracketed 4-component
/// structure, so the prefactor can be dropped or rescaled independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracSpinor {
    pub kind: SpinorKind,
    pub prefactor: f64,
    pub reduced: Vec4C,
    pub chi: f64,
}

impl DiracSpinor {
    /// Full spinor, prefactor included.
    pub fn components(&self) -> Vec4C {
        self.reduced.scale(C64::from(self.prefactor))
    }

    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn bar(&self) -> DiracRow {
        ubar(self)
    }
}

/// Row spinor ψ̄ = ψ†γ⁰, stored as its (already conjugated) entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracRow(pub [C64; 4]);

impl DiracRow {
    /// ψ̄ · x (plain contraction, no further conjugation).
    pub fn dot(&self, x: &Vec4C) -> C64 {
        self.0.iter().zip(x.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// ψ̄ M x
    pub fn sandwich(&self, m: &Mat4, x: &Vec4C) -> C64 {
        self.dot(&m.apply(x))
    }
}

/// v(p₁) = √(ω/m_e) (ρσ₁ξ₁ ; ξ₁)
pub fn v_positron(chi1: f64, kin: &ProcessKinematics) -> DiracSpinor {
    let s1 = paulis()[0];
    let x = xi(chi1).components;
    let upper = (s1 * x).scale(C64::from(kin.rho));
    DiracSpinor {
        kind: SpinorKind::Positron,
        prefactor: (kin.omega / kin.m_e).sqrt(),
        reduced: stack(&upper, &x),
        chi: chi1,
    }
}

/// u(p₂) = √(ω/m_e) (ξ₂ ; −ρσ₁ξ₂)
pub fn u_electron(chi2: f64, kin: &ProcessKinematics) -> DiracSpinor {
    let s1 = paulis()[0];
    let x = xi(chi2).components;
    let lower = (s1 * x).scale(C64::from(-kin.rho));
    DiracSpinor {
        kind: SpinorKind::Electron,
        prefactor: (kin.omega / kin.m_e).sqrt(),
        reduced: stack(&x, &lower),
        chi: chi2,
    }
}

/// ū = u†γ⁰
pub fn ubar(u: &DiracSpinor) -> DiracRow {
    let g0 = gamma(0).expect("index in range");
    let c = u.components();
    let mut row = [C64::new(0.0, 0.0); 4];
    for (j, r) in row.iter_mut().enumerate() {
        *r = (0..4).map(|k| c.0[k].conj() * g0.0[k][j]).sum();
    }
    DiracRow(row)
}
