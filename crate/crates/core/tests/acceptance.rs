//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bw_spin::bell::{maximize_s, minimize_s, sweep_energy, AngleQuad, SearchSpec, LHV_TOLERANCE};
use bw_spin::closed_form::{p_joint, p_linear, ClosedFormAmplitude, ClosedFormModel};
use bw_spin::fixtures::all_fixtures;
use bw_spin::kinematics::FourVector;
use bw_spin::linalg::{gammas, paulis, slash, Mat2, Mat4, I, METRIC};
use bw_spin::oracle::{coherent_unpolarized_probability, Route};
use bw_spin::probability::{antipodal_probabilities, marginal_left, marginal_right, normalize};
use bw_spin::report::discrepancy_report;
use bw_spin::spinors::{u_electron, v_positron};
use bw_spin::{CircularUnits, Mode, ProcessKinematics, DEFAULT_ELECTRON_MASS_MEV as ME};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn angle(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(0.0..2.0 * PI)
}

/// Log-uniform photon energy between threshold and 10⁴ MeV.
fn energy(r: &mut ChaCha8Rng) -> f64 {
    let t: f64 = r.gen_range(0.0..1.0);
    (ME.ln() + t * (1e4f64.ln() - ME.ln())).exp().max(ME)
}

fn within_time(start: Instant, limit: Duration) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.3}s (limit {}s)", e.as_secs_f64(), limit.as_secs()))
}

fn max_abs_diff2(a: &Mat2, b: &Mat2) -> f64 {
    (*a - *b).max_abs()
}

fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    (*a - *b).max_abs()
}

fn c1_algebra() -> Outcome {
    let start = Instant::now();
    let g = gammas();
    let s = paulis();
    let mut worst = 0.0f64;

    for mu in 0..4 {
        for nu in 0..4 {
            let lhs = g[mu] * g[nu] + g[nu] * g[mu];
            let rhs = Mat4::identity() * if mu == nu { 2.0 * METRIC[mu] } else { 0.0 };
            worst = worst.max(max_abs_diff4(&lhs, &rhs));
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let lhs = s[i] * s[j] + s[j] * s[i];
            let rhs = Mat2::identity() * if i == j { 2.0 } else { 0.0 };
            worst = worst.max(max_abs_diff2(&lhs, &rhs));
        }
    }

    let mut r = rng(1);
    for _ in 0..1000 {
        let a: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let b: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let pa = FourVector::new(a[0], a[1], a[2], a[3]);
        let pb = FourVector::new(b[0], b[1], b[2], b[3]);
        let ab = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
        let lhs = slash(&pa) * slash(&pb) + slash(&pb) * slash(&pa);
        worst = worst.max(max_abs_diff4(&lhs, &(Mat4::identity() * (2.0 * ab))));
        // a̸a̸ = a² 1
        worst = worst.max(max_abs_diff4(&(slash(&pa) * slash(&pa)), &(Mat4::identity() * pa.square())));

        // (σ·x)(σ·y) = (x·y) 1 + i σ·(x × y)
        let x = [a[1], a[2], a[3]];
        let y = [b[1], b[2], b[3]];
        let sx = s[0] * x[0] + s[1] * x[1] + s[2] * x[2];
        let sy = s[0] * y[0] + s[1] * y[1] + s[2] * y[2];
        let cross = [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
        let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let rhs = Mat2::identity() * dot + (s[0] * cross[0] + s[1] * cross[1] + s[2] * cross[2]) * I;
        worst = worst.max(max_abs_diff2(&(sx * sy), &rhs));
    }
    let (fast, t) = within_time(start, Duration::from_secs(1));
    outcome(worst <= 1e-12 && fast, format!("max deviation {worst:.2e}, {t}"))
}

fn c2_dirac() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let w = energy(&mut r);
        let kin = ProcessKinematics::new(w, ME).unwrap();
        let (c1, c2) = (angle(&mut r), angle(&mut r));
        let m = Mat4::identity() * ME;
        let u = u_electron(c2, &kin).components();
        let v = v_positron(c1, &kin).components();
        let ru = (slash(&kin.p2) - m).apply(&u).max_abs() / (w * u.max_abs());
        let rv = (slash(&kin.p1) + m).apply(&v).max_abs() / (w * v.max_abs());
        worst = worst.max(ru).max(rv);
    }
    let (fast, t) = within_time(start, Duration::from_secs(1));
    outcome(worst <= 1e-12 && fast, format!("max relative residual {worst:.2e}, {t}"))
}

fn c3_normalization() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    let mut worst_sum = 0.0f64;
    let mut worst_marg = 0.0f64;
    for mode in Mode::ALL {
        for _ in 0..1000 {
            let kin = ProcessKinematics::new(energy(&mut r), ME).unwrap();
            let (c1, c2) = (angle(&mut r), angle(&mut r));
            let model = ClosedFormModel::new(mode, kin);
            let p = antipodal_probabilities(&model, c1, c2).unwrap();
            worst_sum = worst_sum.max((p.iter().sum::<f64>() - 1.0).abs());
            let ml = marginal_left(&model, c1).unwrap();
            let mr = marginal_right(&model, c2).unwrap();
            worst_marg = worst_marg.max((ml - 0.5).abs()).max((mr - 0.5).abs());
        }
    }
    let (fast, t) = within_time(start, Duration::from_secs(5));
    outcome(
        worst_sum <= 1e-12 && worst_marg <= 1e-12 && fast,
        format!("antipodal sum dev {worst_sum:.2e}, marginal dev {worst_marg:.2e}, {t}"),
    )
}

fn c4_chain() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for (mode, units) in [
        (Mode::Linear, CircularUnits::Mev),
        (Mode::Circular, CircularUnits::Mev),
        (Mode::Circular, CircularUnits::Normalized),
    ] {
        for _ in 0..1000 {
            let kin = ProcessKinematics::new(energy(&mut r), ME).unwrap();
            let (c1, c2) = (angle(&mut r), angle(&mut r));
            let amp = ClosedFormAmplitude(ClosedFormModel::new(mode, kin).with_units(units));
            let chained = normalize(&amp, c1, c2).unwrap().value;
            worst = worst.max((chained - p_joint(mode, &kin, c1, c2, units)).abs());
        }
    }
    let (fast, t) = within_time(start, Duration::from_secs(5));
    outcome(worst <= 1e-12 && fast, format!("max |normalized amplitude - joint| {worst:.2e}, {t}"))
}

fn c5_oracle_unpolarized() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for route in [Route::Direct, Route::Reduced] {
        for _ in 0..1000 {
            let kin = ProcessKinematics::new(energy(&mut r), ME).unwrap();
            let (c1, c2) = (angle(&mut r), angle(&mut r));
            let p = coherent_unpolarized_probability(&kin, c1, c2, route).unwrap();
            let want = 0.5 * (0.5 * (c1 - c2)).sin().powi(2);
            worst = worst.max((p - want).abs());
        }
    }
    let (fast, t) = within_time(start, Duration::from_secs(10));
    outcome(worst <= 1e-12 && fast, format!("max deviation from sin² form {worst:.2e}, {t}"))
}

fn c6_unpolarized_extrema() -> Outcome {
    let start = Instant::now();
    let kin = ProcessKinematics::new(1.05, ME).unwrap();
    let spec = SearchSpec::default();
    let lo = minimize_s(Mode::Unpolarized, &kin, CircularUnits::Mev, &spec).unwrap().best.s;
    let hi = maximize_s(Mode::Unpolarized, &kin, CircularUnits::Mev, &spec).unwrap().best.s;
    let want_lo = -(1.0 + 2f64.sqrt()) / 2.0;
    let want_hi = (2f64.sqrt() - 1.0) / 2.0;
    let ok = (lo - want_lo).abs() <= 1e-5 && (hi - want_hi).abs() <= 1e-5;
    let (fast, t) = within_time(start, Duration::from_secs(30));
    outcome(ok && fast, format!("S_min {lo:.9}, S_max {hi:.9}, {t}"))
}

fn c7_violation_existence() -> Outcome {
    let start = Instant::now();
    let spec = SearchSpec::default();
    let mut all = true;
    let mut parts = Vec::new();
    for mode in Mode::ALL {
        let mut cells = Vec::new();
        for w in [1.05, 5.0, 10.0, 35.0] {
            let kin = ProcessKinematics::new(w, ME).unwrap();
            let best = minimize_s(mode, &kin, CircularUnits::default(), &spec).unwrap().best;
            let found = best.s < -1.0 - LHV_TOLERANCE;
            all &= found;
            cells.push(format!("{w}:{:.4}{}", best.s, if found { "" } else { "(none)" }));
        }
        parts.push(format!("{mode} [{}]", cells.join(" ")));
    }
    let (fast, t) = within_time(start, Duration::from_secs(60));
    outcome(all && fast, format!("{}; {t}", parts.join("; ")))
}

fn c8_energy_independence() -> Outcome {
    let q = AngleQuad::from_degrees([0.0, 23.0, 45.0, 180.0]);
    let series = sweep_energy(Mode::Unpolarized, q, &[1.05, 5.0, 10.0, 35.0, 46600.0], ME, CircularUnits::Mev).unwrap();
    let s: Vec<f64> = series.iter().map(|r| r.s).collect();
    let spread = s.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - s.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    outcome(spread <= 1e-14, format!("spread {spread:.2e} over 5 energies, S = {:.9}", s[0]))
}

fn c9_asymptotics() -> Outcome {
    let mut r = rng(9);
    let far = ProcessKinematics::new(1e6, ME).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (c1, c2) = (angle(&mut r), angle(&mut r));
        let limit = 0.5 * (0.5 * (c1 + c2)).sin().powi(2);
        worst = worst.max((p_linear(&far, c1, c2) - limit).abs());
    }

    let q = AngleQuad::from_degrees([0.0, 45.0, 15.0, 180.0]);
    let omegas: Vec<f64> = (0..15).map(|k| 10.0 * 2f64.powi(k)).collect();
    let s: Vec<f64> = sweep_energy(Mode::Linear, q, &omegas, ME, CircularUnits::Mev)
        .unwrap()
        .iter()
        .map(|r| r.s)
        .collect();
    let steps: Vec<f64> = s.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let monotone = steps.windows(2).all(|d| d[1] < d[0]);
    outcome(
        worst <= 1e-6 && monotone,
        format!(
            "max |p(1e6) - limit| {worst:.2e}; |S(2w)-S(w)| decreasing over 10..{:.0} MeV: {monotone}",
            omegas[omegas.len() - 1]
        ),
    )
}

/// Linear joint probability written out independently of the library.
fn hand_linear(w: f64, c1: f64, c2: f64) -> f64 {
    let r = ME / w;
    let d = (0.5 * (c1 - c2)).sin().powi(2);
    let s = (0.5 * (c1 + c2)).sin().powi(2);
    (r * r * d + s) / (2.0 * (1.0 + r * r))
}

fn hand_s(p: impl Fn(f64, f64) -> f64, deg: [f64; 4]) -> f64 {
    let [a1, a2, b1, b2] = deg.map(f64::to_radians);
    p(a1, a2) - p(a1, b2) + p(b1, a2) + p(b1, b2) - 0.5 - 0.5
}

fn c10_report() -> Outcome {
    let start = Instant::now();
    let rep = discrepancy_report(ME, CircularUnits::Mev).unwrap();
    let expected_rows: usize = all_fixtures().iter().map(|f| f.rows.len()).sum();
    let mut keys: Vec<(u32, usize)> = rep.rows.iter().map(|r| (r.table, r.row)).collect();
    keys.sort();
    keys.dedup();
    let tables: Vec<u32> = {
        let mut t: Vec<u32> = keys.iter().map(|k| k.0).collect();
        t.dedup();
        t
    };
    let deltas_ok = rep
        .rows
        .iter()
        .all(|r| r.delta_canonical.is_finite() && r.delta_canonical >= 0.0 && r.delta_closest >= 0.0);

    let t1 = rep.rows.iter().find(|r| r.table == 1 && r.row == 1).unwrap().canonical.s;
    let t5 = rep.rows.iter().find(|r| r.table == 5 && r.row == 3).unwrap().canonical.s;
    let hand1 = hand_s(|a, b| hand_linear(1.05, a, b), [0.0, 45.0, 15.0, 180.0]);
    let hand5 = hand_s(|a, b| 0.5 * (0.5 * (a - b)).sin().powi(2), [0.0, 23.0, 45.0, 180.0]);
    let values_ok = (t1 - hand1).abs() <= 1e-4
        && (t1 + 0.82782).abs() <= 1e-4
        && (t5 - hand5).abs() <= 1e-4
        && (t5 + 1.03514).abs() <= 1e-4;

    let cli = Command::new(env!("CARGO_BIN_EXE_bw-spin")).args(["verify-paper", "--format", "json"]).output().unwrap();
    let cli_ok = cli.status.success() && {
        let v: serde_json::Value = serde_json::from_slice(&cli.stdout).unwrap();
        v["results"].as_array().map(|a| a.len()) == Some(expected_rows)
    };

    let ok = rep.rows.len() == expected_rows
        && keys.len() == expected_rows
        && tables == vec![1, 2, 3, 5]
        && deltas_ok
        && values_ok
        && cli_ok;
    let (fast, t) = within_time(start, Duration::from_secs(10));
    outcome(
        ok && fast,
        format!(
            "{} rows over tables {tables:?}; table 1 row 1 {t1:.6} (hand {hand1:.6}); table 5 row 3 {t5:.6} (hand {hand5:.6}); {t}",
            rep.rows.len()
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_bw-spin")).args(args).output().unwrap();
    let mut bytes = out.status.code().unwrap_or(-1).to_string().into_bytes();
    bytes.extend(out.stdout);
    bytes.extend(out.stderr);
    bytes
}

fn c11_determinism() -> Outcome {
    let suite: Vec<Vec<&str>> = vec![
        vec!["prob", "--mode", "linear", "--omega", "1.05", "--chi1", "0", "--chi2", "45"],
        vec!["prob", "--mode", "circular", "--omega", "2", "--chi1", "10", "--chi2", "155", "--format", "json"],
        vec!["bell", "--mode", "unpolarized", "--chi1", "0", "--chi2", "23", "--chi1p", "45", "--chi2p", "180", "--assignments"],
        vec!["scan", "--mode", "linear", "--omega", "1.05", "--jobs", "1"],
        vec!["scan", "--mode", "linear", "--omega", "1.05", "--jobs", "4"],
        vec!["scan", "--mode", "unpolarized", "--maximize", "--format", "json"],
        vec!["sweep", "--mode", "circular", "--chi1", "0", "--chi2", "155", "--chi1p", "15", "--chi2p", "50", "--from", "1.05", "--to", "46600", "--points", "20", "--log"],
        vec!["verify-paper"],
        vec!["verify-paper", "--format", "json"],
        vec!["oracle-compare", "--mode", "circular", "--samples", "200"],
        vec!["prob", "--mode", "linear", "--omega", "0.3", "--chi1", "0", "--chi2", "45"],
    ];
    let first: Vec<Vec<u8>> = suite.iter().map(|a| run_cli(a)).collect();
    let second: Vec<Vec<u8>> = suite.iter().map(|a| run_cli(a)).collect();
    let repeat_ok = first == second;
    // Serial and parallel scans must agree byte for byte.
    let parallel_ok = first[3] == first[4];
    outcome(
        repeat_ok && parallel_ok,
        format!(
            "{} invocations repeated identically: {repeat_ok}; scan --jobs 1 vs --jobs 4 identical: {parallel_ok}",
            suite.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Clifford/Pauli algebra", c1_algebra),
        ("Dirac-equation residuals", c2_dirac),
        ("normalization and marginals", c3_normalization),
        ("closed-form chain consistency", c4_chain),
        ("oracle equivalence (unpolarized)", c5_oracle_unpolarized),
        ("unpolarized Bell extremum", c6_unpolarized_extrema),
        ("violation existence, all modes and energies", c7_violation_existence),
        ("energy independence (unpolarized)", c8_energy_independence),
        ("asymptotics (linear)", c9_asymptotics),
        ("verify-paper report", c10_report),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
