//! Row-by-row comparison of the reference S values with S recomputed from
//! the closed-form probabilities.

use serde::Serialize;

use crate::bell::{s_assignment_scan, s_for_source, AngleQuad, BellError, SResult};
use crate::closed_form::{CircularUnits, ClosedFormModel, Mode};
use crate::fixtures::{all_fixtures, PaperFixture, TableId};
use crate::kinematics::ProcessKinematics;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyRow {
    pub table: u32,
    /// 1-based row within its table.
    pub row: usize,
    pub label: Option<&'static str>,
    pub mode: Mode,
    /// Energy actually used, MeV.
    pub omega: f64,
    pub omega_given: bool,
    pub angles_deg: [f64; 4],
    pub expected: f64,
    pub expected_text: &'static str,
    /// S with the angles placed in the order given.
    pub canonical: SResult,
    /// Placement of the same four angles whose S is closest to `expected`.
    pub closest: SResult,
    /// `closest.quad` in degrees.
    pub closest_angles_deg: [f64; 4],
    pub delta_canonical: f64,
    pub delta_closest: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportSummary {
    pub rows: usize,
    pub max_delta_canonical: f64,
    pub mean_delta_canonical: f64,
    pub max_delta_closest: f64,
    pub mean_delta_closest: f64,
    /// Rows whose canonical S lies outside [−1, 0].
    pub canonical_violations: usize,
    /// Rows whose reference S lies outside [−1, 0].
    pub expected_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub m_e: f64,
    pub circular_units: CircularUnits,
    pub rows: Vec<DiscrepancyRow>,
    pub summary: ReportSummary,
}

fn table_rows(fx: &PaperFixture, m_e: f64, units: CircularUnits) -> Result<Vec<DiscrepancyRow>, BellError> {
    let mut out = Vec::with_capacity(fx.rows.len());
    for (i, r) in fx.rows.iter().enumerate() {
        let omega = r.omega_or_default();
        let kin = ProcessKinematics::new(omega, m_e)?;
        let model = ClosedFormModel::new(fx.mode, kin).with_units(units);
        let quad = AngleQuad::from_degrees(r.angles_deg);
        let canonical = s_for_source(&model, quad)?;
        let scan = s_assignment_scan(&model, quad.as_array())?;
        // The scan is sorted by S, so the first among equally close entries wins.
        let closest = scan
            .iter()
            .copied()
            .reduce(|best, c| {
                if (c.s - r.expected_s).abs() < (best.s - r.expected_s).abs() {
                    c
                } else {
                    best
                }
            })
            .expect("assignment scan is nonempty");
        out.push(DiscrepancyRow {
            table: fx.table.number(),
            row: i + 1,
            label: r.label,
            mode: fx.mode,
            omega,
            omega_given: r.omega.is_some(),
            angles_deg: r.angles_deg,
            expected: r.expected_s,
            expected_text: r.expected_text,
            canonical,
            closest,
            closest_angles_deg: closest.quad.degrees(),
            delta_canonical: (canonical.s - r.expected_s).abs(),
            delta_closest: (closest.s - r.expected_s).abs(),
        });
    }
    Ok(out)
}

fn summarize(rows: &[DiscrepancyRow]) -> ReportSummary {
    let n = rows.len().max(1) as f64;
    let max = |f: fn(&DiscrepancyRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let mean = |f: fn(&DiscrepancyRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    ReportSummary {
        rows: rows.len(),
        max_delta_canonical: max(|r| r.delta_canonical),
        mean_delta_canonical: mean(|r| r.delta_canonical),
        max_delta_closest: max(|r| r.delta_closest),
        mean_delta_closest: mean(|r| r.delta_closest),
        canonical_violations: rows.iter().filter(|r| r.canonical.lhv_violated).count(),
        expected_violations: rows
            .iter()
            .filter(|r| crate::bell::lhv_violated(r.expected))
            .count(),
    }
}

/// Recompute every reference row.
pub fn discrepancy_report(m_e: f64, units: CircularUnits) -> Result<DiscrepancyReport, BellError> {
    let mut rows = Vec::new();
    for fx in all_fixtures() {
        rows.extend(table_rows(&fx, m_e, units)?);
    }
    let summary = summarize(&rows);
    Ok(DiscrepancyReport {
        m_e,
        circular_units: units,
        rows,
        summary,
    })
}

/// Rows of one table only.
pub fn table_report(table: TableId, m_e: f64, units: CircularUnits) -> Result<Vec<DiscrepancyRow>, BellError> {
    table_rows(&crate::fixtures::fixture(table), m_e, units)
}
