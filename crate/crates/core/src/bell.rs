//! Clauser–Horne indicator
//!
//! ```text
//! S = P[a₁,a₂] − P[a₁,a₂′] + P[a₁′,a₂] + P[a₁′,a₂′] − P[a₁′,−] − P[−,a₂]
//! ```
//!
//! Local hidden-variable models keep S inside [−1, 0]. Besides single
//! evaluations this module searches angle space for the extremal S (coarse
//! grid plus pattern-search refinement) and sweeps S over photon energy.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::{CircularUnits, ClosedFormModel, Mode};
use crate::kinematics::{KinematicsError, ProcessKinematics};
use crate::probability::{marginal_left, marginal_right, normalize, ProbabilityError, SpinIntensity};

/// Slack used when deciding whether S leaves [−1, 0].
pub const LHV_TOLERANCE: f64 = 1e-12;

/// S values closer than this are treated as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BellError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error("invalid search step {0}°: must divide into (0, 360]")]
    InvalidStep(f64),
}

fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Measurement configuration (a₁, a₂, a₁′, a₂′), in radians reduced to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleQuad {
    pub chi1: f64,
    pub chi2: f64,
    pub chi1p: f64,
    pub chi2p: f64,
}

impl AngleQuad {
    pub fn new(chi1: f64, chi2: f64, chi1p: f64, chi2p: f64) -> Self {
        AngleQuad {
            chi1: wrap(chi1),
            chi2: wrap(chi2),
            chi1p: wrap(chi1p),
            chi2p: wrap(chi2p),
        }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn from_degrees(a: [f64; 4]) -> Self {
        Self::from_array(a.map(f64::to_radians))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.chi1, self.chi2, self.chi1p, self.chi2p]
    }

    pub fn degrees(&self) -> [f64; 4] {
        self.as_array().map(f64::to_degrees)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|x| x.is_finite())
    }

    /// Same quad with every angle shifted by `c`.
    pub fn rotated(&self, c: f64) -> Self {
        Self::from_array(self.as_array().map(|x| x + c))
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        let a = self.as_array();
        let b = other.as_array();
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

/// The six probabilities entering S, unsigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct STerms {
    /// P[a₁, a₂]
    pub p11: f64,
    /// P[a₁, a₂′]
    pub p12: f64,
    /// P[a₁′, a₂]
    pub p21: f64,
    /// P[a₁′, a₂′]
    pub p22: f64,
    /// P[a₁′, −]
    pub m1: f64,
    /// P[−, a₂]
    pub m2: f64,
}

impl STerms {
    /// Signed contributions, in the order p11, −p12, p21, p22, −m1, −m2.
    pub fn signed(&self) -> [f64; 6] {
        [self.p11, -self.p12, self.p21, self.p22, -self.m1, -self.m2]
    }

    pub fn total(&self) -> f64 {
        self.signed().iter().sum()
    }
}

pub fn lhv_violated(s: f64) -> bool {
    s < -1.0 - LHV_TOLERANCE || s > LHV_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SResult {
    pub s: f64,
    pub quad: AngleQuad,
    pub omega: Option<f64>,
    pub mode: Option<Mode>,
    pub lhv_violated: bool,
    pub terms: STerms,
}

impl SResult {
    fn from_terms(terms: STerms, quad: AngleQuad, src: &(impl SpinIntensity + ?Sized)) -> Self {
        let s = terms.total();
        let label = src.label();
        SResult {
            s,
            quad,
            omega: label.omega,
            mode: label.mode,
            lhv_violated: lhv_violated(s),
            terms,
        }
    }
}

/// S for any spin intensity, via the normalization engine.
pub fn s_for_source<I: SpinIntensity + ?Sized>(src: &I, quad: AngleQuad) -> Result<SResult, ProbabilityError> {
    let q = quad;
    let terms = STerms {
        p11: normalize(src, q.chi1, q.chi2)?.value,
        p12: normalize(src, q.chi1, q.chi2p)?.value,
        p21: normalize(src, q.chi1p, q.chi2)?.value,
        p22: normalize(src, q.chi1p, q.chi2p)?.value,
        m1: marginal_left(src, q.chi1p)?,
        m2: marginal_right(src, q.chi2)?,
    };
    Ok(SResult::from_terms(terms, quad, src))
}

/// S from the closed-form probabilities of `mode`.
pub fn s_indicator(
    mode: Mode,
    kin: &ProcessKinematics,
    quad: AngleQuad,
    units: CircularUnits,
) -> Result<SResult, BellError> {
    let model = ClosedFormModel::new(mode, *kin).with_units(units);
    Ok(s_for_source(&model, quad)?)
}

/// S for every distinct placement of four angles into (a₁, a₂, a₁′, a₂′),
/// sorted ascending. Placements giving the same S (within the tie
/// tolerance) are collapsed into the lexicographically first one.
pub fn s_assignment_scan<I: SpinIntensity + ?Sized>(
    src: &I,
    angles: [f64; 4],
) -> Result<Vec<SResult>, ProbabilityError> {
    let mut out = Vec::with_capacity(24);
    for perm in permutations4() {
        let quad = AngleQuad::from_array(perm.map(|k| angles[k]));
        out.push(s_for_source(src, quad)?);
    }
    out.sort_by(|a, b| a.s.total_cmp(&b.s).then_with(|| a.quad.lex_cmp(&b.quad)));
    let mut kept: Vec<SResult> = Vec::new();
    for r in out {
        match kept.last() {
            Some(last) if (r.s - last.s).abs() <= TIE_TOLERANCE => {}
            _ => kept.push(r),
        }
    }
    Ok(kept)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&k| seen[k] = true);
                    if seen.iter().all(|&x| x) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Minimize,
    Maximize,
}

impl Objective {
    fn sign(&self) -> f64 {
        match self {
            Objective::Minimize => 1.0,
            Objective::Maximize => -1.0,
        }
    }
}

/// Parameters of the extremal-S search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    /// Grid spacing in degrees; 360 must be an integer multiple of it.
    pub step_deg: f64,
    /// Pattern-search stopping tolerance on S.
    pub tolerance: f64,
    /// Number of best grid points reported.
    pub top_k: usize,
    /// Number of best grid points used as refinement seeds.
    pub seeds: usize,
    pub objective: Objective,
    /// Pin a₁ = 0 on the grid when the source depends on angle differences only.
    pub exploit_shift: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            step_deg: 5.0,
            tolerance: 1e-8,
            top_k: 10,
            seeds: 3,
            objective: Objective::Minimize,
            exploit_shift: true,
        }
    }
}

impl SearchSpec {
    pub fn maximize() -> Self {
        SearchSpec {
            objective: Objective::Maximize,
            ..Self::default()
        }
    }

    fn grid_size(&self) -> Result<usize, BellError> {
        let n = 360.0 / self.step_deg;
        let rounded = n.round();
        if !(self.step_deg > 0.0) || rounded < 1.0 || (n - rounded).abs() > 1e-9 {
            return Err(BellError::InvalidStep(self.step_deg));
        }
        Ok(rounded as usize)
    }
}

/// Outcome of a grid-plus-refinement search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Best value after refinement.
    pub best: SResult,
    /// Best grid point (before refinement).
    pub grid_best: SResult,
    /// Best `top_k` grid points, best first.
    pub top: Vec<SResult>,
    /// Refined result from each seed, in seed order.
    pub refined: Vec<SResult>,
    pub spec: SearchSpec,
    pub grid_points: u64,
}

/// Joint and marginal probabilities tabulated on the angle grid.
struct GridTable {
    n: usize,
    angles: Vec<f64>,
    joint: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl GridTable {
    fn build<I: SpinIntensity + Sync + ?Sized>(src: &I, step_deg: f64, n: usize) -> Result<Self, ProbabilityError> {
        let angles: Vec<f64> = (0..n).map(|i| (i as f64 * step_deg).to_radians()).collect();
        let joint = (0..n * n)
            .into_par_iter()
            .map(|ij| normalize(src, angles[ij / n], angles[ij % n]).map(|p| p.value))
            .collect::<Result<Vec<_>, _>>()?;
        let left = angles
            .par_iter()
            .map(|&a| marginal_left(src, a))
            .collect::<Result<Vec<_>, _>>()?;
        let right = angles
            .par_iter()
            .map(|&a| marginal_right(src, a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridTable { n, angles, joint, left, right })
    }

    fn terms(&self, idx: [usize; 4]) -> STerms {
        let [i, j, k, l] = idx;
        let p = |a: usize, b: usize| self.joint[a * self.n + b];
        STerms {
            p11: p(i, j),
            p12: p(i, l),
            p21: p(k, j),
            p22: p(k, l),
            m1: self.left[k],
            m2: self.right[j],
        }
    }

    fn quad(&self, idx: [usize; 4]) -> AngleQuad {
        AngleQuad::from_array(idx.map(|i| self.angles[i]))
    }
}

/// Grid candidate ordered by signed S, then grid index (which orders quads
/// lexicographically since grid angles increase with index).
#[derive(Debug, Clone, Copy)]
struct Candidate {
    key: f64,
    idx: [usize; 4],
}

fn cand_cmp(a: &Candidate, b: &Candidate) -> Ordering {
    a.key.total_cmp(&b.key).then_with(|| a.idx.cmp(&b.idx))
}

fn push_top(top: &mut Vec<Candidate>, c: Candidate, k: usize) {
    if k == 0 {
        return;
    }
    if top.len() == k && cand_cmp(&c, top.last().expect("nonempty")) != Ordering::Less {
        return;
    }
    let pos = top.partition_point(|t| cand_cmp(t, &c) == Ordering::Less);
    top.insert(pos, c);
    top.truncate(k);
}

/// Scan every grid quad, returning the global minimum of the signed key,
/// the lexicographically first quad within the tie tolerance of it, and
/// the best `top_k` quads. Chunks are reduced in index order, so the result
/// is independent of the number of threads.
fn grid_scan(table: &GridTable, first_range: usize, sign: f64, top_k: usize) -> (Candidate, Vec<Candidate>) {
    let n = table.n;
    let key_at = |idx: [usize; 4]| sign * table.terms(idx).total();

    let chunks: Vec<(f64, Vec<Candidate>)> = (0..first_range)
        .into_par_iter()
        .map(|i| {
            let mut min = f64::INFINITY;
            let mut top = Vec::with_capacity(top_k + 1);
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let idx = [i, j, k, l];
                        let key = key_at(idx);
                        if key < min {
                            min = key;
                        }
                        push_top(&mut top, Candidate { key, idx }, top_k);
                    }
                }
            }
            (min, top)
        })
        .collect();

    let global_min = chunks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let threshold = global_min + TIE_TOLERANCE;

    let first = (0..first_range)
        .into_par_iter()
        .filter_map(|i| {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let idx = [i, j, k, l];
                        let key = key_at(idx);
                        if key <= threshold {
                            return Some(Candidate { key, idx });
                        }
                    }
                }
            }
            None
        })
        .min_by(|a, b| a.idx.cmp(&b.idx))
        .expect("grid is nonempty");

    let mut top: Vec<Candidate> = Vec::with_capacity(top_k * first_range);
    for (_, t) in chunks {
        for c in t {
            push_top(&mut top, c, top_k);
        }
    }
    (first, top)
}

/// Compass search on the signed objective, started from `start`. Only
/// strict improvements are accepted, so the result never exceeds the start.
fn refine<I: SpinIntensity + ?Sized>(
    src: &I,
    start: SResult,
    initial_step: f64,
    sign: f64,
    tolerance: f64,
) -> Result<SResult, ProbabilityError> {
    const MIN_STEP: f64 = 1e-11;
    const MAX_ITER: usize = 100_000;
    let mut best = start;
    let mut step = initial_step;
    let mut iter = 0;
    while step > MIN_STEP && iter < MAX_ITER {
        iter += 1;
        let base = best.quad.as_array();
        let mut improved: Option<SResult> = None;
        for d in 0..4 {
            for dir in [1.0, -1.0] {
                let mut a = base;
                a[d] += dir * step;
                let trial = s_for_source(src, AngleQuad::from_array(a))?;
                let current = improved.as_ref().unwrap_or(&best);
                if sign * trial.s < sign * current.s {
                    improved = Some(trial);
                }
            }
        }
        match improved {
            // Gains below the tolerance do not justify staying at this step.
            Some(r) if sign * (best.s - r.s) > tolerance * step => best = r,
            Some(r) => {
                best = r;
                step *= 0.5;
            }
            None => step *= 0.5,
        }
    }
    Ok(best)
}

/// Grid search over (a₁, a₂, a₁′, a₂′) followed by local refinement.
pub fn search<I: SpinIntensity + Sync + ?Sized>(src: &I, spec: &SearchSpec) -> Result<SearchOutcome, BellError> {
    let n = spec.grid_size()?;
    let table = GridTable::build(src, spec.step_deg, n)?;
    let first_range = if spec.exploit_shift && src.shift_invariant() { 1 } else { n };
    let sign = spec.objective.sign();

    let (first, top) = grid_scan(&table, first_range, sign, spec.top_k.max(spec.seeds));
    let grid_best = SResult::from_terms(table.terms(first.idx), table.quad(first.idx), src);

    let mut seeds = vec![grid_best];
    for c in &top {
        if seeds.len() >= spec.seeds.max(1) {
            break;
        }
        if c.idx != first.idx {
            seeds.push(SResult::from_terms(table.terms(c.idx), table.quad(c.idx), src));
        }
    }

    let step = spec.step_deg.to_radians() * 0.5;
    let refined = seeds
        .par_iter()
        .map(|&seed| refine(src, seed, step, sign, spec.tolerance))
        .collect::<Result<Vec<_>, _>>()?;

    let mut best = grid_best;
    for r in &refined {
        let better = sign * r.s < sign * best.s - TIE_TOLERANCE
            || ((r.s - best.s).abs() <= TIE_TOLERANCE && r.quad.lex_cmp(&best.quad) == Ordering::Less && sign * r.s <= sign * best.s);
        if better {
            best = *r;
        }
    }

    let top = top
        .iter()
        .take(spec.top_k)
        .map(|c| SResult::from_terms(table.terms(c.idx), table.quad(c.idx), src))
        .collect();
    let first_range = first_range as u64;
    let n = n as u64;
    Ok(SearchOutcome {
        best,
        grid_best,
        top,
        refined,
        spec: *spec,
        grid_points: first_range * n * n * n,
    })
}

/// Smallest S found for the closed-form probabilities of `mode`.
pub fn minimize_s(
    mode: Mode,
    kin: &ProcessKinematics,
    units: CircularUnits,
    spec: &SearchSpec,
) -> Result<SearchOutcome, BellError> {
    let spec = SearchSpec {
        objective: Objective::Minimize,
        ..*spec
    };
    search(&ClosedFormModel::new(mode, *kin).with_units(units), &spec)
}

/// Largest S found for the closed-form probabilities of `mode`.
pub fn maximize_s(
    mode: Mode,
    kin: &ProcessKinematics,
    units: CircularUnits,
    spec: &SearchSpec,
) -> Result<SearchOutcome, BellError> {
    let spec = SearchSpec {
        objective: Objective::Maximize,
        ..*spec
    };
    search(&ClosedFormModel::new(mode, *kin).with_units(units), &spec)
}

/// S at a fixed quad for each energy, in input order.
pub fn sweep_energy(
    mode: Mode,
    quad: AngleQuad,
    omegas: &[f64],
    m_e: f64,
    units: CircularUnits,
) -> Result<Vec<SResult>, BellError> {
    omegas
        .par_iter()
        .map(|&w| {
            let kin = ProcessKinematics::new(w, m_e)?;
            s_indicator(mode, &kin, quad, units)
        })
        .collect()
}
