use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use bw_spin::bell::{
    s_assignment_scan, s_for_source, search, AngleQuad, BellError, Objective, SResult, SearchSpec,
};
use bw_spin::closed_form::ClosedFormModel;
use bw_spin::format::{fmt_num, json_num, Cell, Csv};
use bw_spin::kinematics::{KinematicsError, ProcessKinematics};
use bw_spin::oracle::OracleModel;
use bw_spin::probability::{normalize, probability_record, ProbabilityError, SpinIntensity};
use bw_spin::report::discrepancy_report;
use bw_spin::{CircularUnits, Mode, VERSION};

use crate::{Cli, Command, Format, QuadArgs, SourceArg, SourceArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Kinematics(KinematicsError),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Kinematics(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Other(m) => f.write_str(m),
            CliError::Kinematics(e) => write!(f, "{e}"),
        }
    }
}

impl From<KinematicsError> for CliError {
    fn from(e: KinematicsError) -> Self {
        CliError::Kinematics(e)
    }
}

impl From<ProbabilityError> for CliError {
    fn from(e: ProbabilityError) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<BellError> for CliError {
    fn from(e: BellError) -> Self {
        match e {
            BellError::Kinematics(k) => CliError::Kinematics(k),
            BellError::InvalidStep(_) => CliError::Usage(e.to_string()),
            BellError::Probability(p) => p.into(),
        }
    }
}

/// Text for stdout plus an optional note for stderr.
pub struct Output {
    pub stdout: String,
    pub stderr: Option<String>,
}

/// Rows shared by the CSV and JSON emitters, so both carry the same numbers.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut c = Csv::with_header(&self.header);
        for r in &self.rows {
            c.row(r);
        }
        c.finish()
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(r.iter())
                        .map(|(k, v)| (k.to_string(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    units: CircularUnits,
}

impl Ctx<'_> {
    fn angle_in(&self, x: f64) -> Result<f64, CliError> {
        if !x.is_finite() {
            return Err(CliError::Usage(format!("angle {x} is not finite")));
        }
        Ok(if self.cli.radians { x } else { x.to_radians() })
    }

    fn angle_out(&self, rad: f64) -> f64 {
        if self.cli.radians {
            rad
        } else {
            rad.to_degrees()
        }
    }

    fn angle_units(&self) -> &'static str {
        if self.cli.radians {
            "radians"
        } else {
            "degrees"
        }
    }

    fn kin(&self, omega: f64) -> Result<ProcessKinematics, CliError> {
        Ok(ProcessKinematics::new(omega, self.cli.m_e)?)
    }

    fn quad(&self, q: &QuadArgs) -> Result<AngleQuad, CliError> {
        Ok(AngleQuad::new(
            self.angle_in(q.chi1)?,
            self.angle_in(q.chi2)?,
            self.angle_in(q.chi1p)?,
            self.angle_in(q.chi2p)?,
        ))
    }

    fn source(&self, mode: Mode, kin: ProcessKinematics, src: &SourceArgs) -> Box<dyn SpinIntensity + Sync> {
        match src.source.route() {
            None => Box::new(ClosedFormModel::new(mode, kin).with_units(self.units)),
            Some(route) => Box::new(OracleModel::for_mode(mode, kin, route, src.sum.into())),
        }
    }

    fn config(&self, extra: Value) -> Value {
        let mut cfg = json!({
            "m_e": json_num(self.cli.m_e),
            "angle_units": self.angle_units(),
            "format": match self.cli.format { Format::Csv => "csv", Format::Json => "json" },
            "circular_units": self.units.as_str(),
            "jobs": self.cli.jobs,
        });
        if let (Value::Object(base), Value::Object(more)) = (&mut cfg, extra) {
            base.extend(more);
        }
        cfg
    }

    fn emit(&self, command: &str, config: Value, table: &Table, summary: Option<Value>) -> Output {
        match self.cli.format {
            Format::Csv => Output {
                stdout: table.csv(),
                stderr: summary.map(|s| format!("{}\n", summary_line(&s))),
            },
            Format::Json => Output {
                stdout: self.json_text(command, config, table, summary),
                stderr: None,
            },
        }
    }

    fn json_text(&self, command: &str, config: Value, table: &Table, summary: Option<Value>) -> String {
        let mut top = json!({
            "version": VERSION,
            "command": command,
            "config": self.config(config),
            "results": table.json(),
        });
        if let Some(s) = summary {
            top["summary"] = s;
        }
        format!("{}\n", serde_json::to_string_pretty(&top).expect("serializable"))
    }

    fn s_cells(&self, r: &SResult) -> Vec<Cell> {
        let q = r.quad;
        let t = r.terms;
        vec![
            r.s.into(),
            self.angle_out(q.chi1).into(),
            self.angle_out(q.chi2).into(),
            self.angle_out(q.chi1p).into(),
            self.angle_out(q.chi2p).into(),
            t.p11.into(),
            t.p12.into(),
            t.p21.into(),
            t.p22.into(),
            t.m1.into(),
            t.m2.into(),
            r.lhv_violated.into(),
        ]
    }
}

fn summary_line(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", v.to_string().trim_matches('"')))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn source_name(src: &SourceArgs, mode: Mode) -> String {
    match (src.source, mode) {
        (SourceArg::Closed, _) => "closed".to_string(),
        (s, Mode::Unpolarized) => format!("{}-{}", s.route().expect("amplitude route").as_str(), match src.sum {
            crate::SumArg::Coherent => "coherent",
            crate::SumArg::Incoherent => "incoherent",
        }),
        (s, _) => s.route().expect("amplitude route").as_str().to_string(),
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.m_e > 0.0) || !cli.m_e.is_finite() {
        return Err(KinematicsError::InvalidMass(cli.m_e).into());
    }
    let ctx = Ctx {
        cli,
        units: cli.circular_units.into(),
    };
    if cli.jobs == 0 {
        return dispatch(&ctx);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&ctx))
}

fn dispatch(ctx: &Ctx) -> Result<Output, CliError> {
    match &ctx.cli.command {
        Command::Prob { mode, omega, chi1, chi2, source } => cmd_prob(ctx, (*mode).into(), *omega, *chi1, *chi2, source),
        Command::Bell { mode, omega, quad, assignments, source } => {
            cmd_bell(ctx, (*mode).into(), *omega, quad, *assignments, source)
        }
        Command::Scan {
            mode,
            omega,
            step,
            tolerance,
            top_k,
            seeds,
            maximize,
            no_shift,
            source,
        } => {
            let spec = SearchSpec {
                step_deg: *step,
                tolerance: *tolerance,
                top_k: *top_k,
                seeds: *seeds,
                objective: if *maximize { Objective::Maximize } else { Objective::Minimize },
                exploit_shift: !*no_shift,
            };
            cmd_scan(ctx, (*mode).into(), *omega, spec, source)
        }
        Command::Sweep { mode, quad, omegas, from, to, points, log } => {
            let list = energy_list(omegas.as_deref(), *from, *to, *points, *log)?;
            cmd_sweep(ctx, (*mode).into(), quad, &list)
        }
        Command::VerifyPaper { json_out } => cmd_verify_paper(ctx, json_out.as_deref()),
        Command::OracleCompare { mode, omega, samples, seed, route, sum } => {
            cmd_oracle_compare(ctx, (*mode).into(), *omega, *samples, *seed, *route, (*sum).into())
        }
    }
}

fn cmd_prob(ctx: &Ctx, mode: Mode, omega: f64, chi1: f64, chi2: f64, source: &SourceArgs) -> Result<Output, CliError> {
    let kin = ctx.kin(omega)?;
    let src = ctx.source(mode, kin, source);
    let rec = probability_record(src.as_ref(), ctx.angle_in(chi1)?, ctx.angle_in(chi2)?)?;
    let mut t = Table::new(&[
        "mode",
        "source",
        "omega_mev",
        "chi1",
        "chi2",
        "joint",
        "marginal_left",
        "marginal_right",
        "antipodal_sum",
    ]);
    t.push(vec![
        mode.as_str().into(),
        source_name(source, mode).into(),
        omega.into(),
        ctx.angle_out(rec.joint.chi1).into(),
        ctx.angle_out(rec.joint.chi2).into(),
        rec.joint.value.into(),
        rec.marginal_left.into(),
        rec.marginal_right.into(),
        rec.antipodal_sum.into(),
    ]);
    let cfg = json!({"mode": mode.as_str(), "omega_mev": json_num(omega), "source": source_name(source, mode)});
    Ok(ctx.emit("prob", cfg, &t, None))
}

const S_COLUMNS: [&str; 12] = [
    "s", "chi1", "chi2", "chi1p", "chi2p", "p11", "p12", "p21", "p22", "m1", "m2", "lhv_violated",
];

fn cmd_bell(
    ctx: &Ctx,
    mode: Mode,
    omega: f64,
    quad: &QuadArgs,
    assignments: bool,
    source: &SourceArgs,
) -> Result<Output, CliError> {
    let kin = ctx.kin(omega)?;
    let src = ctx.source(mode, kin, source);
    let q = ctx.quad(quad)?;
    let r = s_for_source(src.as_ref(), q)?;

    let mut header = vec!["kind"];
    header.extend(S_COLUMNS);
    let mut t = Table::new(&header);
    let mut row = vec![Cell::from("canonical")];
    row.extend(ctx.s_cells(&r));
    t.push(row);
    if assignments {
        for a in s_assignment_scan(src.as_ref(), q.as_array())? {
            let mut row = vec![Cell::from("assignment")];
            row.extend(ctx.s_cells(&a));
            t.push(row);
        }
    }
    let cfg = json!({"mode": mode.as_str(), "omega_mev": json_num(omega), "source": source_name(source, mode)});
    Ok(ctx.emit("bell", cfg, &t, None))
}

fn cmd_scan(ctx: &Ctx, mode: Mode, omega: f64, spec: SearchSpec, source: &SourceArgs) -> Result<Output, CliError> {
    if !(spec.tolerance > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", spec.tolerance)));
    }
    let kin = ctx.kin(omega)?;
    let src = ctx.source(mode, kin, source);
    let out = search(src.as_ref(), &spec)?;

    let mut header = vec!["kind", "rank"];
    header.extend(S_COLUMNS);
    let mut t = Table::new(&header);
    let mut push = |kind: &str, rank: usize, r: &SResult| {
        let mut row = vec![Cell::from(kind), Cell::from(rank)];
        row.extend(ctx.s_cells(r));
        t.push(row);
    };
    push("best", 0, &out.best);
    push("grid", 0, &out.grid_best);
    for (i, r) in out.top.iter().enumerate() {
        push("top", i + 1, r);
    }
    let objective = match spec.objective {
        Objective::Minimize => "minimize",
        Objective::Maximize => "maximize",
    };
    let cfg = json!({
        "mode": mode.as_str(),
        "omega_mev": json_num(omega),
        "source": source_name(source, mode),
        "step_deg": json_num(spec.step_deg),
        "tolerance": json_num(spec.tolerance),
        "top_k": spec.top_k,
        "seeds": spec.seeds,
        "objective": objective,
        "exploit_shift": spec.exploit_shift,
    });
    let summary = json!({
        "best_s": json_num(out.best.s),
        "grid_points": out.grid_points,
        "lhv_violated": out.best.lhv_violated,
    });
    Ok(ctx.emit("scan", cfg, &t, Some(summary)))
}

fn energy_list(
    omegas: Option<&[f64]>,
    from: Option<f64>,
    to: Option<f64>,
    points: usize,
    log: bool,
) -> Result<Vec<f64>, CliError> {
    if let Some(list) = omegas {
        if list.is_empty() {
            return Err(CliError::Usage("--omegas is empty".into()));
        }
        return Ok(list.to_vec());
    }
    let (Some(a), Some(b)) = (from, to) else {
        return Err(CliError::Usage("give --omegas or both --from and --to".into()));
    };
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(CliError::Usage("--log needs positive --from and --to".into()));
    }
    if points == 1 {
        return Ok(vec![a]);
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if log {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else {
                a + t * (b - a)
            }
        })
        .collect())
}

fn cmd_sweep(ctx: &Ctx, mode: Mode, quad: &QuadArgs, omegas: &[f64]) -> Result<Output, CliError> {
    let q = ctx.quad(quad)?;
    let series = bw_spin::bell::sweep_energy(mode, q, omegas, ctx.cli.m_e, ctx.units)?;
    let mut t = Table::new(&["omega_mev", "s", "p11", "p12", "p21", "p22", "m1", "m2"]);
    for (r, &w) in series.iter().zip(omegas) {
        let x = r.terms;
        t.push(vec![w.into(), r.s.into(), x.p11.into(), x.p12.into(), x.p21.into(), x.p22.into(), x.m1.into(), x.m2.into()]);
    }
    let cfg = json!({
        "mode": mode.as_str(),
        "quad": q.as_array().map(|a| json_num(ctx.angle_out(a))),
    });
    Ok(ctx.emit("sweep", cfg, &t, None))
}

fn cmd_verify_paper(ctx: &Ctx, json_out: Option<&std::path::Path>) -> Result<Output, CliError> {
    let rep = discrepancy_report(ctx.cli.m_e, ctx.units)?;
    let mut t = Table::new(&[
        "table",
        "row",
        "label",
        "mode",
        "omega_mev",
        "omega_given",
        "chi1",
        "chi2",
        "chi1p",
        "chi2p",
        "expected",
        "expected_text",
        "canonical_s",
        "canonical_violated",
        "delta_canonical",
        "closest_s",
        "closest_chi1",
        "closest_chi2",
        "closest_chi1p",
        "closest_chi2p",
        "delta_closest",
    ]);
    for r in &rep.rows {
        let a = r.angles_deg.map(|d| ctx.angle_out(d.to_radians()));
        let c = r.closest.quad.as_array().map(|x| ctx.angle_out(x));
        t.push(vec![
            (r.table as usize).into(),
            r.row.into(),
            r.label.unwrap_or("").into(),
            r.mode.as_str().into(),
            r.omega.into(),
            r.omega_given.into(),
            a[0].into(),
            a[1].into(),
            a[2].into(),
            a[3].into(),
            r.expected.into(),
            r.expected_text.into(),
            r.canonical.s.into(),
            r.canonical.lhv_violated.into(),
            r.delta_canonical.into(),
            r.closest.s.into(),
            c[0].into(),
            c[1].into(),
            c[2].into(),
            c[3].into(),
            r.delta_closest.into(),
        ]);
    }
    let s = &rep.summary;
    let summary = json!({
        "rows": s.rows,
        "max_delta_canonical": json_num(s.max_delta_canonical),
        "mean_delta_canonical": json_num(s.mean_delta_canonical),
        "max_delta_closest": json_num(s.max_delta_closest),
        "mean_delta_closest": json_num(s.mean_delta_closest),
        "canonical_violations": s.canonical_violations,
        "expected_violations": s.expected_violations,
    });

    let json_text = ctx.json_text("verify-paper", json!({}), &t, Some(summary.clone()));
    if let Some(path) = json_out {
        std::fs::write(path, &json_text)
            .map_err(|e| CliError::Other(format!("writing {}: {e}", path.display())))?;
    }
    let stdout = match ctx.cli.format {
        Format::Json => json_text,
        Format::Csv => verify_text(ctx, &t, &summary),
    };
    Ok(Output { stdout, stderr: None })
}

/// Human-readable report: one aligned line per reference row.
fn verify_text(ctx: &Ctx, t: &Table, summary: &Value) -> String {
    let mut out = format!(
        "Reference S comparison (m_e = {} MeV, circular units = {}, angles in {})\n\n",
        fmt_num(ctx.cli.m_e),
        ctx.units.as_str(),
        ctx.angle_units()
    );
    let idx = |name: &str| t.header.iter().position(|h| *h == name).expect("column exists");
    let cols = [
        ("table", 5),
        ("row", 3),
        ("label", 5),
        ("mode", 11),
        ("omega_mev", 10),
        ("chi1", 6),
        ("chi2", 6),
        ("chi1p", 6),
        ("chi2p", 6),
        ("expected", 20),
        ("canonical_s", 16),
        ("delta_canonical", 16),
        ("closest_s", 16),
        ("delta_closest", 16),
    ];
    let line = |cells: Vec<String>| {
        cols.iter()
            .zip(cells)
            .map(|((_, w), c)| format!("{c:>w$}", w = *w))
            .collect::<Vec<_>>()
            .join(" ")
            .trim_end()
            .to_string()
    };
    out.push_str(&line(cols.iter().map(|(n, _)| n.to_string()).collect()));
    out.push('\n');
    for r in &t.rows {
        let cells = cols
            .iter()
            .map(|(n, _)| {
                let c = &r[idx(n)];
                match (c, *n) {
                    (_, "expected") => match &r[idx("expected_text")] {
                        Cell::Text(s) => s.replace(' ', ""),
                        _ => unreachable!(),
                    },
                    (Cell::Num(x), _) => fmt_num(*x),
                    (Cell::Int(i), _) => i.to_string(),
                    (Cell::Bool(b), _) => b.to_string(),
                    (Cell::Text(s), _) if s.is_empty() => "-".to_string(),
                    (Cell::Text(s), _) => s.clone(),
                }
            })
            .collect();
        out.push_str(&line(cells));
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!("summary: {}\n", summary_line(summary)));
    out
}

fn cmd_oracle_compare(
    ctx: &Ctx,
    mode: Mode,
    omega: f64,
    samples: usize,
    seed: u64,
    route: SourceArg,
    sum: bw_spin::oracle::PolarizationSum,
) -> Result<Output, CliError> {
    let Some(route) = route.route() else {
        return Err(CliError::Usage("--route must be direct or reduced".into()));
    };
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let kin = ctx.kin(omega)?;
    let closed = ClosedFormModel::new(mode, kin).with_units(ctx.units);
    let oracle = OracleModel::for_mode(mode, kin, route, sum);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut t = Table::new(&["chi1_deg", "chi2_deg", "p_closed", "p_oracle", "delta"]);
    let (mut max_delta, mut sxy, mut sxx) = (0.0f64, 0.0, 0.0);
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a: f64 = rng.gen_range(0.0..360.0);
        let b: f64 = rng.gen_range(0.0..360.0);
        let pc = normalize(&closed, a.to_radians(), b.to_radians())?.value;
        let po = normalize(&oracle, a.to_radians(), b.to_radians())?.value;
        let d = (po - pc).abs();
        max_delta = max_delta.max(d);
        sxy += pc * po;
        sxx += pc * pc;
        pairs.push((pc, po));
        t.push(vec![a.into(), b.into(), pc.into(), po.into(), d.into()]);
    }
    // Least-squares p_oracle ≈ c · p_closed
    let ratio = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let residual = pairs.iter().map(|(pc, po)| (po - ratio * pc).abs()).fold(0.0, f64::max);
    let cfg = json!({
        "mode": mode.as_str(),
        "omega_mev": json_num(omega),
        "samples": samples,
        "seed": seed,
        "route": route.as_str(),
        "sum": sum.as_str(),
    });
    let summary = json!({
        "omega_mev": json_num(omega),
        "max_delta": json_num(max_delta),
        "fit_ratio": json_num(ratio),
        "fit_residual": json_num(residual),
    });
    Ok(ctx.emit("oracle-compare", cfg, &t, Some(summary)))
}
