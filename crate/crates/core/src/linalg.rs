//! Fixed-size complex linear algebra.
//!
//! Every object in the two-photon pair problem is a 2x2 or 4x4 complex matrix,
//! a 2- or 4-component spinor, or a real four-vector, so storage is dense
//! and sized at compile time.
//!
//! Gamma matrices use the Dirac (standard) representation with metric
//! signature (+,-,-,-):
//!
//! ```text
//! γ⁰ = | 1   0 |      γᵏ = |  0   σₖ |
//!      | 0  -1 |           | -σₖ  0  |
//! ```
//!
//! where each block is 2x2 and σₖ are the Pauli matrices
//!
//! ```text
//! σ₁ = | 0 1 |   σ₂ = | 0 -i |   σ₃ = | 1  0 |
//!      | 1 0 |        | i  0 |        | 0 -1 |
//! ```

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::kinematics::FourVector;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Diagonal of the Minkowski metric g^{μν}.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("Pauli index {0} out of range (expected 1, 2 or 3)")]
    PauliIndex(usize),
    #[error("gamma index {0} out of range (expected 0..=3)")]
    GammaIndex(usize),
}

/// Dense N x N complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

/// Dense N-component complex column vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;
pub type Vec2C = CVec<2>;
pub type Vec4C = CVec<4>;

impl<const N: usize> Mat<N> {
    pub fn zero() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zero();
        for (i, row) in m.0.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = f(i, j);
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn apply(&self, x: &CVec<N>) -> CVec<N> {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * x.0[j]).sum();
        }
        CVec(out)
    }

    /// Largest entry modulus; the natural yardstick for "equal within tolerance".
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Mat<N>;
    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        Mat::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Mul<CVec<N>> for Mat<N> {
    type Output = CVec<N>;
    fn mul(self, rhs: CVec<N>) -> CVec<N> {
        self.apply(&rhs)
    }
}

impl<const N: usize> Mul<C64> for Mat<N> {
    type Output = Mat<N>;
    fn mul(self, rhs: C64) -> Mat<N> {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for Mat<N> {
    type Output = Mat<N>;
    fn mul(self, rhs: f64) -> Mat<N> {
        self.scale(C64::from(rhs))
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Mat<N>;
    fn add(self, rhs: Mat<N>) -> Mat<N> {
        Mat::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Mat<N>;
    fn sub(self, rhs: Mat<N>) -> Mat<N> {
        Mat::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Mat<N>;
    fn neg(self) -> Mat<N> {
        Mat::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> CVec<N> {
    pub fn zero() -> Self {
        CVec([ZERO; N])
    }

    /// Unit basis vector with a one in slot `k`.
    pub fn basis(k: usize) -> Self {
        let mut v = Self::zero();
        v.0[k] = ONE;
        v
    }

    /// Hermitian inner product ⟨self, other⟩ = self† other.
    pub fn inner(&self, other: &CVec<N>) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CVec(self.0.map(|z| z * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl<const N: usize> Index<usize> for CVec<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> Add for CVec<N> {
    type Output = CVec<N>;
    fn add(self, rhs: CVec<N>) -> CVec<N> {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        CVec(out)
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = CVec<N>;
    fn sub(self, rhs: CVec<N>) -> CVec<N> {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        CVec(out)
    }
}

/// Stack two 2-spinors into an upper/lower Dirac 4-spinor.
pub fn stack(upper: &Vec2C, lower: &Vec2C) -> Vec4C {
    CVec([upper.0[0], upper.0[1], lower.0[0], lower.0[1]])
}

/// Assemble a 4x4 matrix from 2x2 blocks `[[a, b], [c, d]]`.
pub fn blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let block = match (i < 2, j < 2) {
            (true, true) => a,
            (true, false) => b,
            (false, true) => c,
            (false, false) => d,
        };
        block.0[i % 2][j % 2]
    })
}

fn pauli_table(k: usize) -> Mat2 {
    match k {
        1 => Mat([[ZERO, ONE], [ONE, ZERO]]),
        2 => Mat([[ZERO, -I], [I, ZERO]]),
        3 => Mat([[ONE, ZERO], [ZERO, -ONE]]),
        _ => unreachable!("pauli index checked by caller"),
    }
}

/// Pauli matrix σ_k for k in 1..=3.
pub fn pauli(k: usize) -> Result<Mat2, LinalgError> {
    if (1..=3).contains(&k) {
        Ok(pauli_table(k))
    } else {
        Err(LinalgError::PauliIndex(k))
    }
}

/// Dirac-representation γ^μ for μ in 0..=3.
pub fn gamma(mu: usize) -> Result<Mat4, LinalgError> {
    let z = Mat2::zero();
    match mu {
        0 => Ok(blocks(&Mat2::identity(), &z, &z, &-Mat2::identity())),
        1..=3 => {
            let s = pauli_table(mu);
            Ok(blocks(&z, &s, &-s, &z))
        }
        _ => Err(LinalgError::GammaIndex(mu)),
    }
}

/// All four gamma matrices, indexed by μ.
pub fn gammas() -> [Mat4; 4] {
    [0, 1, 2, 3].map(|mu| gamma(mu).expect("index in range"))
}

/// The three Pauli matrices; entry `k - 1` holds σ_k.
pub fn paulis() -> [Mat2; 3] {
    [1, 2, 3].map(pauli_table)
}

/// Feynman slash γ^μ p_μ = γ⁰p⁰ − γ·p.
pub fn slash(p: &FourVector) -> Mat4 {
    let g = gammas();
    let upper = p.components();
    (0..4).fold(Mat4::zero(), |acc, mu| acc + g[mu] * (METRIC[mu] * upper[mu]))
}

/// w† M x.
pub fn bilinear(w: &Vec4C, m: &Mat4, x: &Vec4C) -> C64 {
    w.inner(&m.apply(x))
}

/// Totally antisymmetric symbol with ε₁₂₃ = +1; indices are 1-based.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}
