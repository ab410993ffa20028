//! Reference S values for fixed measurement angles, stored verbatim.
//!
//! These numbers are expected values to compare against, never asserted:
//! they are not reproduced by the probabilities implemented here, and the
//! report in [`crate::report`] documents the gap row by row. Every row has
//! a₁ = 0.

use serde::{Deserialize, Serialize};

use crate::closed_form::Mode;

/// Energy used for rows given as energy independent.
pub const INDEPENDENT_OMEGA_MEV: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixtureRow {
    /// Curve label attached to the row, if any.
    pub label: Option<&'static str>,
    /// Photon energy in MeV; `None` where the row is given for all energies.
    pub omega: Option<f64>,
    /// (a₁, a₂, a₁′, a₂′) in degrees.
    pub angles_deg: [f64; 4],
    pub expected_s: f64,
    /// Expected value exactly as given, digit grouping included.
    pub expected_text: &'static str,
}

impl FixtureRow {
    pub fn omega_or_default(&self) -> f64 {
        self.omega.unwrap_or(INDEPENDENT_OMEGA_MEV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    LinearAngles,
    CircularAngles,
    CircularEnergies,
    UnpolarizedAngles,
}

impl TableId {
    pub const ALL: [TableId; 4] = [
        TableId::LinearAngles,
        TableId::CircularAngles,
        TableId::CircularEnergies,
        TableId::UnpolarizedAngles,
    ];

    /// Reference table number.
    pub fn number(&self) -> u32 {
        match self {
            TableId::LinearAngles => 1,
            TableId::CircularAngles => 2,
            TableId::CircularEnergies => 3,
            TableId::UnpolarizedAngles => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperFixture {
    pub table: TableId,
    pub mode: Mode,
    pub rows: Vec<FixtureRow>,
    pub note: &'static str,
}

const fn row(label: Option<&'static str>, omega: Option<f64>, a: [f64; 4], s: f64, text: &'static str) -> FixtureRow {
    FixtureRow {
        label,
        omega,
        angles_deg: a,
        expected_s: s,
        expected_text: text,
    }
}

pub fn fixture(table: TableId) -> PaperFixture {
    match table {
        TableId::LinearAngles => PaperFixture {
            table,
            mode: Mode::Linear,
            note: "linearly polarized photons, a1 = 0",
            rows: vec![
                row(None, Some(1.05), [0.0, 45.0, 15.0, 180.0], -1.37576, "-1.37576"),
                row(Some("R"), Some(1.05), [0.0, 45.0, 30.0, 140.0], -1.36279, "-1.36279"),
                row(Some("B"), Some(1.05), [0.0, 45.0, 30.0, 153.5], -1.35814, "-1.35814"),
                row(Some("G"), Some(1.05), [0.0, 45.0, 67.0, 213.0], -1.30592, "-1.30592"),
                row(Some("O"), Some(1.05), [0.0, 45.0, 90.0, 270.0], -1.03585, "-1.03585"),
                row(None, Some(5.0), [0.0, 45.0, 15.0, 180.0], -1.39234, "-1.39234"),
                row(None, Some(10.0), [0.0, 45.0, 15.0, 180.0], -1.39304, "-1.39304"),
                row(None, Some(35.0), [0.0, 45.0, 15.0, 180.0], -1.39326, "-1.39326"),
                row(None, Some(46.60e3), [0.0, 45.0, 15.0, 180.0], -1.39328, "-1.39328"),
            ],
        },
        TableId::CircularAngles => PaperFixture {
            table,
            mode: Mode::Circular,
            note: "circularly polarized photons, a1 = 0",
            rows: vec![
                row(Some("R"), Some(1.05), [0.0, 155.0, 15.0, 50.0], -1.32878, "-1.32878"),
                row(Some("G"), Some(1.05), [0.0, 155.0, 45.0, 10.0], -1.30828, "-1.30828"),
                row(Some("B"), Some(1.05), [0.0, 155.0, 85.0, 50.0], -1.05177, "-1.05177"),
                row(Some("O"), Some(1.05), [0.0, 155.0, 90.0, 55.0], -1.01432, "-1.01432"),
            ],
        },
        TableId::CircularEnergies => PaperFixture {
            table,
            mode: Mode::Circular,
            note: "circularly polarized photons, angles (0, 155, 15, 50), varying energy",
            rows: vec![
                row(None, Some(1.05), [0.0, 155.0, 15.0, 50.0], -1.3287849599597406, "-1.328 784 959 959 7406"),
                row(None, Some(5.0), [0.0, 155.0, 15.0, 50.0], -1.3287849599604962, "-1.328 784 959 960 4962"),
                row(None, Some(10.0), [0.0, 155.0, 15.0, 50.0], -1.3287849599605301, "-1.328 784 959 960 5301"),
                row(None, Some(35.0), [0.0, 155.0, 15.0, 50.0], -1.3287849599605410, "-1.328 784 959 960 5410"),
                row(None, Some(46.60e3), [0.0, 155.0, 15.0, 50.0], -1.3287849599605420, "-1.328 784 959 960 5420"),
            ],
        },
        TableId::UnpolarizedAngles => PaperFixture {
            table,
            mode: Mode::Unpolarized,
            note: "unpolarized photons, a1 = 0, energy independent",
            rows: vec![
                row(None, None, [0.0, 85.0, 25.0, 181.0], -1.14675, "-1.14675"),
                row(None, None, [0.0, 67.0, 55.0, 181.0], -1.34218, "-1.34218"),
                row(None, None, [0.0, 23.0, 45.0, 180.0], -1.46192, "-1.46192"),
            ],
        },
    }
}

pub fn all_fixtures() -> Vec<PaperFixture> {
    TableId::ALL.iter().map(|&t| fixture(t)).collect()
}
