//! Numerical tree amplitude for γγ → e⁺e⁻, built from gamma matrices and
//! Dirac spinors, plus the reduced two-spinor form and diagnostics comparing
//! the Dirac bilinears with their Pauli-matrix reductions.
//!
//! The full amplitude, up to an overall constant, is
//!
//! ```text
//! A = ū(p₂) [ γ^μ k̸₁ γ^ν/(2p₁·k₁) + γ^ν k̸₂ γ^μ/(2p₁·k₂)
//!           + γ^μ p₁^ν/(p₁·k₁)    + γ^ν p₁^μ/(p₁·k₂) ] v(p₁) e₁_ν e₂_μ
//! ```
//!
//! with e₁^μ = (0, e⃗₁) and e₂^μ = (0, −e⃗₂). Both propagator denominators
//! equal ω² in the center-of-mass frame, so there is no pole at threshold.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::Mode;
use crate::kinematics::{
    circular_polarization, linear_polarization, polarization_basis_sum, Handedness, Photon,
    PolarizationVector, ProcessKinematics, PHOTON1_DIRECTION,
};
use crate::linalg::{gammas, levi_civita, paulis, slash, Mat2, Mat4, C64, I, METRIC, ZERO};
use crate::probability::{SourceLabel, SpinIntensity};
use crate::spinors::{u_electron, v_positron, xi, DiracSpinor};

/// Which expression produced an amplitude value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Full Dirac-matrix evaluation.
    Direct,
    /// Two-spinor reduced form.
    Reduced,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Reduced => "reduced",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Route::Direct),
            "reduced" => Ok(Route::Reduced),
            other => Err(format!("unknown route `{other}` (expected direct or reduced)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRequest {
    pub kin: ProcessKinematics,
    pub e1: PolarizationVector,
    pub e2: PolarizationVector,
    pub chi1: f64,
    pub chi2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeValue {
    pub value: C64,
    pub provenance: Route,
}

/// Neumaier summation on real and imaginary parts separately.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: [f64; 2],
    carry: [f64; 2],
}

impl Compensated {
    fn add(&mut self, x: C64) {
        for (k, v) in [x.re, x.im].into_iter().enumerate() {
            let s = self.sum[k];
            let t = s + v;
            self.carry[k] += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
            self.sum[k] = t;
        }
    }

    fn value(&self) -> C64 {
        C64::new(self.sum[0] + self.carry[0], self.sum[1] + self.carry[1])
    }
}

fn lower(v: [C64; 4]) -> [C64; 4] {
    [0, 1, 2, 3].map(|mu| v[mu] * METRIC[mu])
}

/// Bracketed Dirac operator of the tree amplitude, contracted with fixed
/// photon polarization four-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeOperator {
    pub matrix: Mat4,
}

impl TreeOperator {
    /// Contract with spatial polarizations, embedding photon 2 with its sign flip.
    pub fn new(kin: &ProcessKinematics, e1: &PolarizationVector, e2: &PolarizationVector) -> Self {
        Self::from_four_vectors(kin, e1.embed(Photon::First), e2.embed(Photon::Second))
    }

    /// Contract with arbitrary (upper-index) polarization four-vectors.
    pub fn from_four_vectors(kin: &ProcessKinematics, eps1: [C64; 4], eps2: [C64; 4]) -> Self {
        let g = gammas();
        let k1s = slash(&kin.k1);
        let k2s = slash(&kin.k2);
        let pk1 = kin.p1.dot(&kin.k1);
        let pk2 = kin.p1.dot(&kin.k2);
        let p1 = kin.p1.components();
        let e1l = lower(eps1);
        let e2l = lower(eps2);

        // Entries of the bracket cancel down to O(m/ω) in some channels, so
        // each entry is summed with compensation: entries that agree
        // analytically then agree numerically too.
        let mut acc = [[Compensated::default(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let weight = e1l[nu] * e2l[mu];
                if weight == ZERO {
                    continue;
                }
                let terms = [
                    g[mu] * k1s * g[nu] * (1.0 / (2.0 * pk1)),
                    g[nu] * k2s * g[mu] * (1.0 / (2.0 * pk2)),
                    g[mu] * (p1[nu] / pk1),
                    g[nu] * (p1[mu] / pk2),
                ];
                for t in terms {
                    let t = t * weight;
                    for (row, trow) in acc.iter_mut().zip(t.0.iter()) {
                        for (a, x) in row.iter_mut().zip(trow.iter()) {
                            a.add(*x);
                        }
                    }
                }
            }
        }
        TreeOperator {
            matrix: Mat4::from_fn(|i, j| acc[i][j].value()),
        }
    }

    /// Weighted sum of operators; the amplitude is linear in the operator.
    pub fn combine(parts: impl IntoIterator<Item = (f64, TreeOperator)>) -> Self {
        let matrix = parts
            .into_iter()
            .fold(Mat4::zero(), |acc, (w, op)| acc + op.matrix * w);
        TreeOperator { matrix }
    }

    /// ū M v
    pub fn sandwich(&self, u: &DiracSpinor, v: &DiracSpinor) -> C64 {
        u.bar().sandwich(&self.matrix, &v.components())
    }

    /// ū M v through the 2×2 operator acting between ξ₂ and ξ₁. Equal to
    /// [`sandwich`](Self::sandwich) with the standard spinors, but the
    /// (1 − ρ²) cancellation near ρ → 1 happens once per entry instead of
    /// once per spinor component, which keeps high energies accurate.
    pub fn at_angles(&self, kin: &ProcessKinematics, chi1: f64, chi2: f64) -> C64 {
        let r = self.spin_block(kin.rho);
        let x1 = xi(chi1).components;
        let x2 = xi(chi2).components;
        x2.inner(&(r * x1)) * (kin.omega / kin.m_e)
    }

    /// R with ū M v = (ω/m) ξ₂† R ξ₁:
    /// R = M₁₂ + ρ² σ₁M₂₁σ₁ + ρ (M₁₁σ₁ + σ₁M₂₂).
    pub fn spin_block(&self, rho: f64) -> Mat2 {
        let m = &self.matrix.0;
        // ρ² = hi + lo exactly; a rounded ρ² would not match the ρ used
        // in the cross term and the cancellation would lose ω/m digits.
        let hi = rho * rho;
        let lo = rho.mul_add(rho, -hi);
        let fma = |a: C64, s: f64, b: C64| C64::new(s.mul_add(b.re, a.re), s.mul_add(b.im, a.im));
        Mat2::from_fn(|i, j| {
            // σ₁ swaps the row or column index.
            let outer = m[1 - i + 2][1 - j];
            let middle = m[i][1 - j] + m[1 - i + 2][j + 2];
            // M₁₂ + ρ²·outer in one rounding; it is O(1 − ρ²) smaller than either.
            let cancelled = fma(m[i][j + 2], hi, outer) + outer * lo;
            fma(cancelled, rho, middle)
        })
    }
}

/// Full tree amplitude from Dirac matrices.
pub fn amplitude_direct(req: &AmplitudeRequest) -> AmplitudeValue {
    let op = TreeOperator::new(&req.kin, &req.e1, &req.e2);
    AmplitudeValue {
        value: op.at_angles(&req.kin, req.chi1, req.chi2),
        provenance: Route::Direct,
    }
}

/// Pauli bilinears ξ₂†ξ₁ and ξ₂†σₖξ₁ (k = 1, 2, 3) for spin angles χ₁, χ₂.
pub fn spin_bilinears(chi1: f64, chi2: f64) -> (C64, [C64; 3]) {
    let x1 = xi(chi1).components;
    let x2 = xi(chi2).components;
    let s = paulis();
    (x2.inner(&x1), [0, 1, 2].map(|k| x2.inner(&(s[k] * x1))))
}

/// Reduced amplitude in two-spinor form, term by term as published:
///
/// ```text
/// −i(1−ρ²) k̂·(e⃗₁×e⃗₂) [ξ₂†ξ₁]
/// + (1−ρ²) β (e₁⁽¹⁾e₂⁽¹⁾ + e₂⁽¹⁾e₁⁽¹⁾) [ξ₂†σ₁ξ₁]
/// + (1+ρ²) β (e₁⁽²⁾e₂⁽¹⁾ + e₂⁽²⁾e₁⁽¹⁾) [ξ₂†σ₂ξ₁]
/// ```
pub fn reduced_terms(req: &AmplitudeRequest) -> [C64; 3] {
    let kin = &req.kin;
    let r2 = kin.rho * kin.rho;
    let beta = kin.beta;
    let e1 = req.e1.components();
    let e2 = req.e2.components();
    let (overlap, sigma) = spin_bilinears(req.chi1, req.chi2);

    let cross = req.e1.cross(&req.e2);
    let k_dot_cross: C64 = cross.iter().zip(PHOTON1_DIRECTION).map(|(c, n)| c * n).sum();

    let term1 = -I * (1.0 - r2) * k_dot_cross * overlap;
    // The middle bracket is symmetric as printed (it equals 2 e₁⁽¹⁾e₂⁽¹⁾).
    let term2 = (e1[0] * e2[0] + e2[0] * e1[0]) * ((1.0 - r2) * beta) * sigma[0];
    let term3 = (e1[1] * e2[0] + e2[1] * e1[0]) * ((1.0 + r2) * beta) * sigma[1];
    [term1, term2, term3]
}

pub fn amplitude_reduced(req: &AmplitudeRequest) -> AmplitudeValue {
    AmplitudeValue {
        value: reduced_terms(req).iter().sum(),
        provenance: Route::Reduced,
    }
}

pub fn amplitude(route: Route, req: &AmplitudeRequest) -> AmplitudeValue {
    match route {
        Route::Direct => amplitude_direct(req),
        Route::Reduced => amplitude_reduced(req),
    }
}

/// Photon polarization preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preparation {
    /// Explicit polarization vectors.
    Vectors {
        e1: PolarizationVector,
        e2: PolarizationVector,
    },
    /// Linear polarizations at angles φ₁, φ₂ to the x-axis.
    Linear { phi1: f64, phi2: f64 },
    /// Photon 1 right-handed, photon 2 left-handed.
    Circular,
    /// Unpolarized photons, summed with the polarization tensor.
    Unpolarized(PolarizationSum),
}

/// How unpolarized photon states are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationSum {
    /// Sum amplitudes weighted by Σ e₂ⁱe₁ʲ = δⁱʲ − n₂ⁱn₁ʲ, then square.
    #[default]
    Coherent,
    /// Sum |A|² over the four transverse basis configurations.
    Incoherent,
}

impl PolarizationSum {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolarizationSum::Coherent => "coherent",
            PolarizationSum::Incoherent => "incoherent",
        }
    }
}

impl FromStr for PolarizationSum {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "coherent" => Ok(PolarizationSum::Coherent),
            "incoherent" => Ok(PolarizationSum::Incoherent),
            other => Err(format!(
                "unknown polarization sum `{other}` (expected coherent or incoherent)"
            )),
        }
    }
}

impl Preparation {
    /// Preparation used by the closed-form expressions for `mode`:
    /// e⃗₁ = (1,1,0)/√2 = −e⃗₂ for linear, right ⊗ left for circular.
    pub fn for_mode(mode: Mode, sum: PolarizationSum) -> Self {
        match mode {
            Mode::Linear => {
                let e1 = linear_polarization(FRAC_PI_4);
                Preparation::Vectors { e1, e2: e1.negated() }
            }
            Mode::Circular => Preparation::Circular,
            Mode::Unpolarized => Preparation::Unpolarized(sum),
        }
    }

    fn definite_vectors(&self) -> Option<(PolarizationVector, PolarizationVector)> {
        match *self {
            Preparation::Vectors { e1, e2 } => Some((e1, e2)),
            Preparation::Linear { phi1, phi2 } => {
                Some((linear_polarization(phi1), linear_polarization(phi2)))
            }
            Preparation::Circular => Some((
                circular_polarization(Handedness::Right),
                circular_polarization(Handedness::Left),
            )),
            Preparation::Unpolarized(_) => None,
        }
    }
}

/// Weights of the basis pairs (e⃗₁ = êⱼ, e⃗₂ = êᵢ) in the coherent polarization
/// sum, i.e. the nonzero entries of Σ e₂ⁱ e₁ʲ.
fn coherent_weights() -> Vec<(f64, usize, usize)> {
    let b = polarization_basis_sum();
    let mut out = Vec::new();
    for (i, row) in b.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w != 0.0 {
                out.push((w, i, j));
            }
        }
    }
    out
}

/// Transverse basis used for the incoherent polarization average.
const TRANSVERSE_AXES: [usize; 2] = [0, 1];

#[derive(Debug, Clone)]
enum Kernel {
    /// Single amplitude operator (definite polarizations, or coherent sum).
    Direct(TreeOperator),
    /// Several operators whose squared amplitudes are added.
    DirectIncoherent(Vec<TreeOperator>),
    Reduced(Vec<(f64, PolarizationVector, PolarizationVector)>),
    ReducedIncoherent(Vec<(PolarizationVector, PolarizationVector)>),
}

/// Amplitude-based spin intensity at fixed energy and photon preparation.
#[derive(Debug, Clone)]
pub struct OracleModel {
    pub kin: ProcessKinematics,
    pub route: Route,
    pub preparation: Preparation,
    pub mode: Option<Mode>,
    kernel: Kernel,
}

impl OracleModel {
    pub fn new(kin: ProcessKinematics, route: Route, preparation: Preparation) -> Self {
        let kernel = match (route, preparation.definite_vectors(), preparation) {
            (Route::Direct, Some((e1, e2)), _) => Kernel::Direct(TreeOperator::new(&kin, &e1, &e2)),
            (Route::Reduced, Some((e1, e2)), _) => Kernel::Reduced(vec![(1.0, e1, e2)]),
            (Route::Direct, None, Preparation::Unpolarized(PolarizationSum::Coherent)) => {
                Kernel::Direct(TreeOperator::combine(coherent_weights().into_iter().map(
                    |(w, i, j)| {
                        let op = TreeOperator::new(
                            &kin,
                            &PolarizationVector::axis(j),
                            &PolarizationVector::axis(i),
                        );
                        (w, op)
                    },
                )))
            }
            (Route::Reduced, None, Preparation::Unpolarized(PolarizationSum::Coherent)) => {
                Kernel::Reduced(
                    coherent_weights()
                        .into_iter()
                        .map(|(w, i, j)| (w, PolarizationVector::axis(j), PolarizationVector::axis(i)))
                        .collect(),
                )
            }
            (route, None, _) => {
                let pairs: Vec<_> = TRANSVERSE_AXES
                    .iter()
                    .flat_map(|&a| TRANSVERSE_AXES.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| (PolarizationVector::axis(a), PolarizationVector::axis(b)))
                    .collect();
                match route {
                    Route::Direct => Kernel::DirectIncoherent(
                        pairs
                            .iter()
                            .map(|(e1, e2)| TreeOperator::new(&kin, e1, e2))
                            .collect(),
                    ),
                    Route::Reduced => Kernel::ReducedIncoherent(pairs),
                }
            }
        };
        OracleModel {
            kin,
            route,
            preparation,
            mode: None,
            kernel,
        }
    }

    /// Oracle model for one of the published preparations.
    pub fn for_mode(mode: Mode, kin: ProcessKinematics, route: Route, sum: PolarizationSum) -> Self {
        let mut model = Self::new(kin, route, Preparation::for_mode(mode, sum));
        model.mode = Some(mode);
        model
    }

    fn reduced_at(&self, e1: PolarizationVector, e2: PolarizationVector, chi1: f64, chi2: f64) -> C64 {
        amplitude_reduced(&AmplitudeRequest {
            kin: self.kin,
            e1,
            e2,
            chi1,
            chi2,
        })
        .value
    }

    /// Amplitude at the given spin angles, or `None` for incoherent sums,
    /// which have no single amplitude.
    pub fn amplitude(&self, chi1: f64, chi2: f64) -> Option<C64> {
        match &self.kernel {
            Kernel::Direct(op) => Some(op.at_angles(&self.kin, chi1, chi2)),
            Kernel::Reduced(parts) => Some(
                parts
                    .iter()
                    .map(|&(w, e1, e2)| self.reduced_at(e1, e2, chi1, chi2) * w)
                    .sum(),
            ),
            Kernel::DirectIncoherent(_) | Kernel::ReducedIncoherent(_) => None,
        }
    }
}

impl SpinIntensity for OracleModel {
    fn intensity(&self, chi1: f64, chi2: f64) -> f64 {
        match &self.kernel {
            Kernel::DirectIncoherent(ops) => {
                let u = u_electron(chi2, &self.kin);
                let v = v_positron(chi1, &self.kin);
                ops.iter().map(|op| op.sandwich(&u, &v).norm_sqr()).sum()
            }
            Kernel::ReducedIncoherent(pairs) => pairs
                .iter()
                .map(|&(e1, e2)| self.reduced_at(e1, e2, chi1, chi2).norm_sqr())
                .sum(),
            _ => self
                .amplitude(chi1, chi2)
                .expect("coherent kernel has an amplitude")
                .norm_sqr(),
        }
    }

    fn label(&self) -> SourceLabel {
        SourceLabel {
            mode: self.mode,
            omega: Some(self.kin.omega),
        }
    }

    // Circular and coherently summed amplitudes depend on χ₁ − χ₂ only.
    fn shift_invariant(&self) -> bool {
        matches!(
            self.preparation,
            Preparation::Circular | Preparation::Unpolarized(PolarizationSum::Coherent)
        )
    }
}

/// Normalized unpolarized probability from the coherent polarization sum.
pub fn coherent_unpolarized_probability(
    kin: &ProcessKinematics,
    chi1: f64,
    chi2: f64,
    route: Route,
) -> Result<f64, crate::probability::ProbabilityError> {
    let model = OracleModel::for_mode(Mode::Unpolarized, *kin, route, PolarizationSum::Coherent);
    Ok(crate::probability::normalize(&model, chi1, chi2)?.value)
}

/// Normalized unpolarized probability from the incoherent polarization average.
pub fn incoherent_unpolarized_probability(
    kin: &ProcessKinematics,
    chi1: f64,
    chi2: f64,
    route: Route,
) -> Result<f64, crate::probability::ProbabilityError> {
    let model = OracleModel::for_mode(Mode::Unpolarized, *kin, route, PolarizationSum::Incoherent);
    Ok(crate::probability::normalize(&model, chi1, chi2)?.value)
}

/// Relative change of the direct amplitude under e₁ → e₁ + λ k₁.
///
/// Reported for inspection only; a nonzero value does not fail anything.
pub fn gauge_residual(req: &AmplitudeRequest, lambda: f64) -> f64 {
    let eps1 = req.e1.embed(Photon::First);
    let eps2 = req.e2.embed(Photon::Second);
    let k1 = req.kin.k1.components();
    let shifted = [0, 1, 2, 3].map(|mu| eps1[mu] + C64::from(lambda * k1[mu]));
    let base = TreeOperator::from_four_vectors(&req.kin, eps1, eps2).at_angles(&req.kin, req.chi1, req.chi2);
    let moved =
        TreeOperator::from_four_vectors(&req.kin, shifted, eps2).at_angles(&req.kin, req.chi1, req.chi2);
    let scale = base.norm().max(f64::MIN_POSITIVE);
    (moved - base).norm() / scale
}

/// Family of Dirac bilinears compared against their two-spinor reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BilinearFamily {
    /// ū γⁱ γ⁰ γʲ v  vs  2ρ i εᵢⱼₖ [ξ₂†σₖσ₁ξ₁]
    TimeSandwich,
    /// ū γⁱ v  vs  (1∓ρ²)[ξ₂†σᵢξ₁]
    Vector,
    /// ū γⁱ γᵐ γʲ v  vs  the δ/ε combination of Pauli bilinears
    SpatialTriple,
}

impl BilinearFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            BilinearFamily::TimeSandwich => "gamma_i gamma_0 gamma_j",
            BilinearFamily::Vector => "gamma_i",
            BilinearFamily::SpatialTriple => "gamma_i gamma_m gamma_j",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearEntry {
    pub family: BilinearFamily,
    /// Spatial indices (1-based).
    pub indices: Vec<usize>,
    /// Value from gamma matrices and Dirac spinors.
    pub computed: C64,
    /// Value of the two-spinor structure it should be proportional to.
    pub structure: C64,
}

/// Summary of one family's proportionality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityCheck {
    pub family: BilinearFamily,
    /// Mean ratio computed/structure over entries where both are nonzero.
    pub ratio: Option<C64>,
    /// Largest |ratio − mean| / |mean|.
    pub relative_spread: f64,
    /// Entries where exactly one side vanishes.
    pub zero_mismatches: Vec<Vec<usize>>,
}

impl ProportionalityCheck {
    pub fn is_proportional(&self, tol: f64) -> bool {
        self.zero_mismatches.is_empty() && self.relative_spread <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixElementDiagnostics {
    pub chi1: f64,
    pub chi2: f64,
    pub omega: f64,
    pub entries: Vec<BilinearEntry>,
}

const ZERO_CUTOFF: f64 = 1e-12;

impl MatrixElementDiagnostics {
    pub fn family(&self, family: BilinearFamily) -> impl Iterator<Item = &BilinearEntry> {
        self.entries.iter().filter(move |e| e.family == family)
    }

    pub fn check(&self, family: BilinearFamily) -> ProportionalityCheck {
        check_entries(family, self.family(family))
    }
}

/// Proportionality check over entries pooled from any number of diagnostics.
pub fn check_entries<'a>(
    family: BilinearFamily,
    entries: impl IntoIterator<Item = &'a BilinearEntry>,
) -> ProportionalityCheck {
    let mut ratios = Vec::new();
    let mut mismatches = Vec::new();
    for e in entries {
        if e.family != family {
            continue;
        }
        let scale = e.computed.norm().max(e.structure.norm()).max(1.0);
        let lhs_zero = e.computed.norm() <= ZERO_CUTOFF * scale;
        let rhs_zero = e.structure.norm() <= ZERO_CUTOFF * scale;
        match (lhs_zero, rhs_zero) {
            (true, true) => {}
            (false, false) => ratios.push(e.computed / e.structure),
            _ => mismatches.push(e.indices.clone()),
        }
    }
    mismatches.sort();
    mismatches.dedup();
    let ratio = if ratios.is_empty() {
        None
    } else {
        Some(ratios.iter().sum::<C64>() / ratios.len() as f64)
    };
    let relative_spread = match ratio {
        Some(mean) => ratios
            .iter()
            .map(|r| (r - mean).norm() / mean.norm())
            .fold(0.0, f64::max),
        None => 0.0,
    };
    ProportionalityCheck {
        family,
        ratio,
        relative_spread,
        zero_mismatches: mismatches,
    }
}

fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Dirac bilinears ū Γ v alongside the two-spinor structures they reduce to.
pub fn matrix_element_diagnostics(kin: &ProcessKinematics, chi1: f64, chi2: f64) -> MatrixElementDiagnostics {
    let g = gammas();
    let s = paulis();
    let u = u_electron(chi2, kin);
    let v = v_positron(chi1, kin).components();
    let ub = u.bar();
    let r2 = kin.rho * kin.rho;
    let x1 = xi(chi1).components;
    let x2 = xi(chi2).components;
    let (overlap, sigma) = spin_bilinears(chi1, chi2);
    // (1−ρ²) for the σ₁ channel, (1+ρ²) for σ₂ and σ₃.
    let channel = |k: usize| if k == 1 { 1.0 - r2 } else { 1.0 + r2 };

    let mut entries = Vec::new();

    for i in 1..=3 {
        for j in 1..=3 {
            let computed = ub.sandwich(&(g[i] * g[0] * g[j]), &v);
            let structure: C64 = (1..=3)
                .map(|k| {
                    let eps = levi_civita(i, j, k);
                    if eps == 0.0 {
                        ZERO
                    } else {
                        I * (2.0 * kin.rho * eps) * x2.inner(&(s[k - 1] * s[0] * x1))
                    }
                })
                .sum();
            entries.push(BilinearEntry {
                family: BilinearFamily::TimeSandwich,
                indices: vec![i, j],
                computed,
                structure,
            });
        }
    }

    for i in 1..=3 {
        entries.push(BilinearEntry {
            family: BilinearFamily::Vector,
            indices: vec![i],
            computed: ub.sandwich(&g[i], &v),
            structure: sigma[i - 1] * channel(i),
        });
    }

    for i in 1..=3 {
        for m in 1..=3 {
            for j in 1..=3 {
                let computed = ub.sandwich(&(g[i] * g[m] * g[j]), &v);
                let mut structure = (1..=3)
                    .map(|k| {
                        let coeff = -kron(m, j) * kron(i, k) - kron(m, i) * kron(j, k)
                            + kron(j, i) * kron(m, k);
                        sigma[k - 1] * (coeff * channel(k))
                    })
                    .sum::<C64>();
                structure -= I * ((1.0 - r2) * levi_civita(m, j, i)) * overlap;
                entries.push(BilinearEntry {
                    family: BilinearFamily::SpatialTriple,
                    indices: vec![i, m, j],
                    computed,
                    structure,
                });
            }
        }
    }

    MatrixElementDiagnostics {
        chi1,
        chi2,
        omega: kin.omega,
        entries,
    }
}
