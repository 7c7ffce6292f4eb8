//! Configuration files and the `solve` / `compare` / `validate` / `oracle`
//! commands behind the `handsoff` binary.
//!
//! Configuration is TOML:
//!
//! ```toml
//! T = 5.0
//! N = 1000
//! x0 = [1.0, -1.0]
//! output_dir = "out/dblint"
//!
//! [system]
//! A = [[0.0, 1.0], [0.0, 0.0]]
//! B = [[0.0], [1.0]]
//!
//! [[penalty]]
//! kind = "l1l2"
//! lambda = 0.1
//!
//! [dca]
//! warm_start = "l1"
//! ```
//!
//! Every command returns a process exit code; see [`exit_code`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dca::{cost_jd, run_dca, solve_l1, ControlSignal, DcaConfig, DcaResult, WarmStart};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{
    brute_force_l0, double_integrator_certificate, make_exact_instance, CertificateReport,
    CertificateTolerances, MAX_BRUTE_FORCE_SAMPLES,
};
use crate::penalty::{AssumptionReport, Penalty, PenaltySpec, DEFAULT_GRID};
use crate::system::{build_discrete, simulate, ControlProblem, DiscreteProblem, LinearSystem};

/// Largest `bob_deviation` still counted as bang-off-bang.
pub const BOB_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ASSUMPTION: i32 = 4;
pub const EXIT_ORACLE_SIZE: i32 = 5;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Dimension(_) | Error::Domain(_) | Error::Parameter { .. } | Error::Config(_) => {
            EXIT_CONFIG
        }
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        Error::Numerical { .. } => EXIT_NUMERICAL,
        Error::AssumptionViolated { .. } => EXIT_ASSUMPTION,
        Error::OracleSize(_) => EXIT_ORACLE_SIZE,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> Default for OneOrMany<T> {
    fn default() -> Self {
        OneOrMany::Many(Vec::new())
    }
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(t) => vec![t.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PlantedSamples {
    Scalar(Vec<f64>),
    Vector(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Grid signal with entries in {−1, 0, 1}; `x0` is derived from it.
    pub planted: Option<PlantedSamples>,
    /// Number of nonzero samples of a random planted signal (uses `--seed`).
    pub planted_support: Option<usize>,
    /// Feasibility tolerance of the exhaustive search.
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub steps: usize,
    #[serde(default)]
    pub penalty: OneOrMany<PenaltySpec>,
    #[serde(default)]
    pub dca: DcaConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub oracle: OracleConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.steps == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if !(cfg.horizon > 0.0) {
            return Err(Error::Config(format!("T must be positive, got {}", cfg.horizon)));
        }
        cfg.dca.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn linear_system(&self) -> Result<LinearSystem> {
        let a = Matrix::from_rows(&self.system.a)
            .map_err(|e| Error::Config(format!("system.A: {e}")))?;
        let b = Matrix::from_rows(&self.system.b)
            .map_err(|e| Error::Config(format!("system.B: {e}")))?;
        LinearSystem::new(a, b).map_err(|e| Error::Config(format!("system: {e}")))
    }

    pub fn control_problem(&self) -> Result<ControlProblem> {
        let x0 = self
            .x0
            .clone()
            .ok_or_else(|| Error::Config("missing x0".into()))?;
        ControlProblem::new(self.linear_system()?, x0, self.horizon)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn penalties(&self) -> Result<Vec<Penalty>> {
        self.penalty.to_vec().iter().map(PenaltySpec::build).collect()
    }
}

/// Command-line overrides shared by the commands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub penalty: Option<Penalty>,
    pub warm_start: Option<WarmStart>,
    pub seed: u64,
}

impl Overrides {
    fn output_dir(&self, cfg: &RunConfig) -> PathBuf {
        self.output
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn dca(&self, cfg: &RunConfig) -> DcaConfig {
        let mut d = cfg.dca;
        if let Some(ws) = self.warm_start {
            d.warm_start = ws;
        }
        d
    }
}

/// Per-run report written as `summary.json` and as comparison rows.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub penalty: String,
    pub equivalence_constant: f64,
    pub warm_start: WarmStart,
    pub steps: usize,
    pub delta: f64,
    pub iterations: usize,
    pub lp_solves: usize,
    pub stop_reason: crate::dca::StopReason,
    pub cost_history: Vec<f64>,
    pub iterate_residuals: Vec<f64>,
    pub l0: f64,
    pub cost: f64,
    pub feas_residual: f64,
    pub bob_deviation: f64,
    pub complementarity_violation: f64,
    pub kkt_residual: f64,
    pub certificate: Option<CertificateReport>,
    pub wall_time_s: f64,
}

fn certificate_for(
    problem: &ControlProblem,
    u: &ControlSignal,
) -> Result<Option<CertificateReport>> {
    if !problem.system.is_double_integrator() {
        return Ok(None);
    }
    let tols = CertificateTolerances::for_steps(u.steps());
    double_integrator_certificate(u, &problem.x0, problem.horizon, &tols).map(Some)
}

fn summarize(
    label: String,
    c: f64,
    cfg: &DcaConfig,
    dp: &DiscreteProblem,
    problem: &ControlProblem,
    res: &DcaResult,
    started: Instant,
) -> Result<RunSummary> {
    Ok(RunSummary {
        penalty: label,
        equivalence_constant: c,
        warm_start: cfg.warm_start,
        steps: dp.steps,
        delta: dp.delta,
        iterations: res.iterations,
        lp_solves: res.lp_solves,
        stop_reason: res.stop_reason,
        cost_history: res.cost_history.clone(),
        iterate_residuals: res.iterate_residuals.clone(),
        l0: res.l0,
        cost: res.cost_history.last().copied().unwrap_or(f64::NAN),
        feas_residual: res.feas_residual,
        bob_deviation: res.bob_deviation,
        complementarity_violation: res.complementarity_violation,
        kkt_residual: res.kkt_residual,
        certificate: certificate_for(problem, &res.u_star)?,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Formats with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Trajectory table: `t, u_1..u_m, x_1..x_n`, one row per grid point
/// `t = kΔ`, `k = 0..=N`. The control columns of the final row are empty
/// since the input is only defined on `[0, T)`.
pub fn trajectory_csv(dp: &DiscreteProblem, res: &DcaResult) -> Result<String> {
    let m = dp.inputs;
    let n = dp.states();
    let states = simulate(dp, &dp.x0, &res.z_star.z)?;
    let mut out = String::from("t");
    for j in 1..=m {
        out.push_str(&format!(",u_{j}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    out.push('\n');
    for (k, x) in states.iter().enumerate() {
        out.push_str(&num(k as f64 * dp.delta));
        match res.u_star.samples.get(k) {
            Some(u) => u.iter().for_each(|v| out.push_str(&format!(",{}", num(*v)))),
            None => (0..m).for_each(|_| out.push(',')),
        }
        for v in x {
            out.push_str(&format!(",{}", num(*v)));
        }
        out.push('\n');
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn report<W: Write>(out: &mut W, result: Result<i32>) -> i32 {
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs the DC algorithm for the configured (or overriding) penalty and
/// writes `trajectory.csv` and `summary.json`.
pub fn run_solve(cfg: &RunConfig, ov: &Overrides) -> Result<RunSummary> {
    let started = Instant::now();
    let pen = match ov.penalty {
        Some(p) => p,
        None => *cfg
            .penalties()?
            .first()
            .ok_or_else(|| Error::Config("no penalty given".into()))?,
    };
    let problem = cfg.control_problem()?;
    let dp = build_discrete(&problem, cfg.steps)?;
    let dca = ov.dca(cfg);
    let res = run_dca(&dp, &pen, &dca)?;
    let c = pen.equivalence_constant()?;
    let summary = summarize(pen.to_string(), c, &dca, &dp, &problem, &res, started)?;
    let dir = ov.output_dir(cfg);
    write_file(&dir, "trajectory.csv", &trajectory_csv(&dp, &res)?)?;
    write_file(&dir, "summary.json", &to_json(&summary))?;
    Ok(summary)
}

pub fn cmd_solve<W: Write>(config_path: &Path, ov: &Overrides, out: &mut W) -> i32 {
    let result = RunConfig::load(config_path).and_then(|cfg| {
        let s = run_solve(&cfg, ov)?;
        let _ = writeln!(
            out,
            "{}: l0 = {:.6} s, {} LP solves, stop = {:?}",
            s.penalty, s.l0, s.lp_solves, s.stop_reason
        );
        Ok(EXIT_OK)
    });
    report(out, result)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub penalty: String,
    pub status: String,
    pub summary: Option<RunSummary>,
}

impl ComparisonRow {
    fn csv_line(&self) -> String {
        match &self.summary {
            Some(s) => {
                let cert = match &s.certificate {
                    Some(c) if c.passed => "pass",
                    Some(_) => "fail",
                    None => "",
                };
                format!(
                    "{},{},{},{},{},{},{},{},{}",
                    self.penalty,
                    self.status,
                    num(s.l0),
                    num(s.cost),
                    num(s.equivalence_constant),
                    s.iterations,
                    s.lp_solves,
                    num(s.bob_deviation),
                    cert
                )
            }
            None => format!("{},{},,,,,,,", self.penalty, self.status),
        }
    }
}

/// Baseline ℓ¹ run followed by one DCA run per configured penalty.
///
/// Rows run concurrently; a failing penalty is recorded in its row and does
/// not stop the others. Writes `trajectory_<label>.csv` per successful row,
/// `comparison.csv` and `comparison.json`.
pub fn run_compare(cfg: &RunConfig, ov: &Overrides) -> Result<Vec<ComparisonRow>> {
    let problem = cfg.control_problem()?;
    let dp = build_discrete(&problem, cfg.steps)?;
    let dca = ov.dca(cfg);
    let dir = ov.output_dir(cfg);

    let started = Instant::now();
    let base = solve_l1(&dp, &dca)?;
    let base_summary = summarize("l1".into(), 1.0, &dca, &dp, &problem, &base, started)?;
    write_file(&dir, "trajectory_l1.csv", &trajectory_csv(&dp, &base)?)?;
    let mut rows = vec![ComparisonRow {
        penalty: "l1".into(),
        status: "ok".into(),
        summary: Some(base_summary),
    }];

    let mut pens: Vec<Result<Penalty>> = cfg.penalty.to_vec().iter().map(PenaltySpec::build).collect();
    if let Some(p) = ov.penalty {
        pens.push(Ok(p));
    }
    let outcomes: Vec<Result<(RunSummary, String)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pens
            .iter()
            .map(|pen| {
                let (dp, problem) = (&dp, &problem);
                scope.spawn(move || -> Result<(RunSummary, String)> {
                    let pen = pen.clone()?;
                    let started = Instant::now();
                    let res = run_dca(dp, &pen, &dca)?;
                    let c = pen.equivalence_constant()?;
                    let s = summarize(pen.to_string(), c, &dca, dp, problem, &res, started)?;
                    Ok((s, trajectory_csv(dp, &res)?))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("comparison worker panicked"))
            .collect()
    });

    for (i, (pen, outcome)) in pens.iter().zip(outcomes).enumerate() {
        let label = match pen {
            Ok(p) => p.to_string(),
            Err(_) => format!("penalty_{i}"),
        };
        match outcome {
            Ok((s, csv)) => {
                let kind = pen.as_ref().map(|p| p.kind().name()).unwrap_or("invalid");
                write_file(&dir, &format!("trajectory_{}_{}.csv", i + 1, kind), &csv)?;
                rows.push(ComparisonRow {
                    penalty: label,
                    status: "ok".into(),
                    summary: Some(s),
                });
            }
            Err(e) => rows.push(ComparisonRow {
                penalty: label,
                status: format!("error: {}", e.to_string().replace(',', ";")),
                summary: None,
            }),
        }
    }

    let mut table = String::from(
        "penalty,status,l0,cost,equivalence_constant,iterations,lp_solves,bob_deviation,certificate\n",
    );
    for r in &rows {
        table.push_str(&r.csv_line());
        table.push('\n');
    }
    write_file(&dir, "comparison.csv", &table)?;
    write_file(&dir, "comparison.json", &to_json(&rows))?;
    Ok(rows)
}

pub fn cmd_compare<W: Write>(config_path: &Path, ov: &Overrides, out: &mut W) -> i32 {
    let result = RunConfig::load(config_path).and_then(|cfg| {
        for r in run_compare(&cfg, ov)? {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        Ok(EXIT_OK)
    });
    report(out, result)
}

/// Prints the assumption report for an inline penalty spec. Exit 0 when the
/// assumption holds, 4 when it is violated, 1 for a malformed or
/// out-of-range spec.
pub fn cmd_validate<W: Write>(spec: &str, out: &mut W) -> i32 {
    let result = spec.parse::<Penalty>().map(|pen| {
        let rep: AssumptionReport = pen.validate_assumption(DEFAULT_GRID);
        #[derive(Serialize)]
        struct Out<'a> {
            penalty: String,
            #[serde(flatten)]
            report: &'a AssumptionReport,
        }
        let _ = write!(
            out,
            "{}",
            to_json(&Out {
                penalty: pen.to_string(),
                report: &rep
            })
        );
        if rep.passed {
            EXIT_OK
        } else {
            EXIT_ASSUMPTION
        }
    });
    report(out, result)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub penalty: String,
    pub status: String,
    pub dca_l0: Option<f64>,
    pub bang_off_bang: bool,
    /// `|J_d(z*) − c·l0/Δ|`, meaningful for bang-off-bang outputs.
    pub identity_residual: Option<f64>,
    pub agrees: bool,
    pub certificate: Option<CertificateReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub mode: String,
    pub x0: Vec<f64>,
    pub delta: f64,
    pub planted_l0: Option<f64>,
    pub oracle_min_l0: Option<f64>,
    pub oracle_minimizers: usize,
    pub rows: Vec<OracleRow>,
    pub agreement_rate: f64,
}

/// Random planted signal with `support` nonzero samples of random sign.
pub fn random_planted(steps: usize, inputs: usize, support: usize, delta: f64, seed: u64) -> Result<ControlSignal> {
    let slots = steps * inputs;
    if support > slots {
        return Err(Error::Config(format!(
            "planted support {support} exceeds {slots} samples"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flat = vec![0.0; slots];
    for i in sample(&mut rng, slots, support) {
        flat[i] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    ControlSignal::new(delta, flat.chunks(inputs).map(<[f64]>::to_vec).collect())
}

fn planted_signal(cfg: &RunConfig, sys: &LinearSystem, seed: u64) -> Result<Option<ControlSignal>> {
    let delta = cfg.horizon / cfg.steps as f64;
    match (&cfg.oracle.planted, cfg.oracle.planted_support) {
        (Some(_), Some(_)) => Err(Error::Config(
            "give either oracle.planted or oracle.planted_support".into(),
        )),
        (Some(PlantedSamples::Scalar(s)), None) => ControlSignal::scalar(delta, s).map(Some),
        (Some(PlantedSamples::Vector(s)), None) => ControlSignal::new(delta, s.clone()).map(Some),
        (None, Some(k)) => random_planted(cfg.steps, sys.inputs(), k, delta, seed).map(Some),
        (None, None) => Ok(None),
    }
}

/// Compares DCA output against exhaustive search (small instances) or the
/// analytic double-integrator certificate.
pub fn run_oracle(cfg: &RunConfig, ov: &Overrides) -> Result<OracleReport> {
    let sys = cfg.linear_system()?;
    let planted = planted_signal(cfg, &sys, ov.seed)?;
    if let Some(p) = &planted {
        if p.samples.iter().flatten().any(|v| ![-1.0, 0.0, 1.0].contains(v)) {
            return Err(Error::Config("planted entries must be -1, 0 or 1".into()));
        }
    }
    let problem = match &planted {
        Some(p) => make_exact_instance(&sys, cfg.horizon, cfg.steps, p)?,
        None => cfg.control_problem()?,
    };
    let dp = build_discrete(&problem, cfg.steps)?;
    let dca = ov.dca(cfg);
    let mut pens = cfg.penalties()?;
    if let Some(p) = ov.penalty {
        pens.push(p);
    }

    let small = dp.inputs * dp.steps <= MAX_BRUTE_FORCE_SAMPLES;
    if !small && !sys.is_double_integrator() {
        return Err(Error::OracleSize(format!(
            "{} input samples exceed the exhaustive-search limit of {} and the system is not the double integrator",
            dp.inputs * dp.steps,
            MAX_BRUTE_FORCE_SAMPLES
        )));
    }

    let (mode, oracle_min, minimizers) = if small {
        let eps = cfg.oracle.eps.unwrap_or(if planted.is_some() {
            1e-8
        } else {
            1e-3 * dp.zeta.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
        });
        let bf = brute_force_l0(&dp, eps)?;
        ("brute_force", bf.min_l0, bf.minimizers.len())
    } else {
        ("certificate", Some(-problem.x0[1]), 0)
    };

    let mut rows = Vec::new();
    for pen in pens {
        let row = match run_dca(&dp, &pen, &dca) {
            Ok(res) => {
                let certificate = if small { None } else { certificate_for(&problem, &res.u_star)? };
                let agrees = match (&certificate, oracle_min) {
                    (Some(c), _) => c.passed,
                    (None, Some(min)) => (res.l0 - min).abs() <= 0.5 * dp.delta,
                    (None, None) => false,
                };
                let identity = cost_jd(&pen, &res.z_star)? - pen.equivalence_constant()? * res.l0 / dp.delta;
                OracleRow {
                    penalty: pen.to_string(),
                    status: "ok".into(),
                    dca_l0: Some(res.l0),
                    bang_off_bang: res.bob_deviation <= BOB_TOL,
                    identity_residual: Some(identity.abs()),
                    agrees,
                    certificate,
                }
            }
            Err(e) => OracleRow {
                penalty: pen.to_string(),
                status: format!("error: {e}"),
                dca_l0: None,
                bang_off_bang: false,
                identity_residual: None,
                agrees: false,
                certificate: None,
            },
        };
        rows.push(row);
    }
    let agreement_rate = if rows.is_empty() {
        0.0
    } else {
        rows.iter().filter(|r| r.agrees).count() as f64 / rows.len() as f64
    };
    let report = OracleReport {
        mode: mode.into(),
        x0: problem.x0.clone(),
        delta: dp.delta,
        planted_l0: planted.as_ref().map(|p| crate::dca::l0_measure(p, 0.5)),
        oracle_min_l0: oracle_min,
        oracle_minimizers: minimizers,
        rows,
        agreement_rate,
    };
    write_file(&ov.output_dir(cfg), "oracle.json", &to_json(&report))?;
    Ok(report)
}

pub fn cmd_oracle<W: Write>(config_path: &Path, ov: &Overrides, out: &mut W) -> i32 {
    let result = RunConfig::load(config_path).and_then(|cfg| {
        let rep = run_oracle(&cfg, ov)?;
        let _ = write!(out, "{}", to_json(&rep));
        Ok(EXIT_OK)
    });
    report(out, result)
}
