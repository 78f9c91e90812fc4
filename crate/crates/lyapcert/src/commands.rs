//! Subcommand drivers. Each returns an [`Outcome`] carrying the exit code and
//! the fields of the one-line status written to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lyapcert_core::cones::{cone_orthant_sections, PolyhedralCone};
use lyapcert_core::conic::{
    default_schedule, initial_partitions, run_hierarchy_observed, ConicSystem, HierarchyOptions, HierarchyOutcome, Level,
    RationalCandidate,
};
use lyapcert_core::flow::{simulate, FlowSystem, Trajectory};
use lyapcert_core::oracle::{sample_set, verify_conic, verify_sos, ConicOracleOptions, Report, SosOracleOptions};
use lyapcert_core::poly::{parse_polynomial, FloatPoly};
use lyapcert_core::sos::{solve_certificate, DecreaseMargin, SemialgebraicSystem, SosOptions, SosOutcome, SosProgram, Tier};

use crate::certfile::{self, StoredCandidate};
use crate::spec::{read_spec, Spec, System};

#[derive(Debug, Parser)]
#[command(name = "lyapcert", version, about = "Lyapunov certificates for projected polynomial dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Cap on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conic LP hierarchy on a polyhedral cone
    FindLyapCone(ConeArgs),
    /// SOS hierarchy on a basic semialgebraic set
    FindLyapSos(SosArgs),
    /// Sample-based check of a candidate or certificate
    Verify(VerifyArgs),
    /// Projected Euler trajectories
    Simulate(SimulateArgs),
    /// Write the simplicial partitions of the cone sections
    PartitionDump(DumpArgs),
}

#[derive(Debug, Args)]
pub struct ConeArgs {
    pub spec: PathBuf,
    /// Degree of h; runs a single level instead of the schedule
    #[arg(long)]
    pub deg: Option<u32>,
    /// Exponent r of the denominator ‖x‖^{2r}
    #[arg(long)]
    pub r: Option<u32>,
    /// Refinement sweeps per level
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Acceptance threshold on the LP margin
    #[arg(long)]
    pub margin: Option<f64>,
    /// Write every LP in LP text format
    #[arg(long)]
    pub dump_lp: bool,
}

#[derive(Debug, Args)]
pub struct SosArgs {
    pub spec: PathBuf,
    /// Largest degree of V; even degrees from 2 up are tried in turn
    #[arg(long)]
    pub deg: Option<u32>,
    #[arg(long, value_parser = parse_tier_arg)]
    pub tier: Option<Tier>,
    /// Positive-definiteness weight on ‖x‖²
    #[arg(long)]
    pub eps_pd: Option<f64>,
    /// Decrease margin ε·‖x‖² (default: weak decrease)
    #[arg(long)]
    pub margin: Option<f64>,
    /// Seed of the sampling oracle
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write every SDP in SDPA sparse format
    #[arg(long)]
    pub dump_sdpa: bool,
    /// Write every DSOS LP in LP text format
    #[arg(long)]
    pub dump_lp: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub spec: PathBuf,
    /// Candidate polynomial (h on a cone, V on a semialgebraic set)
    #[arg(long, conflicts_with = "certificate", allow_hyphen_values = true)]
    pub candidate: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    /// Certificate file written by find-lyap-*
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub spec: PathBuf,
    /// Initial state, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Random feasible starts (ignored when --x0 is given)
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long = "T", default_value_t = 20.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluate this candidate along the trajectories
    #[arg(long, conflicts_with = "certificate", allow_hyphen_values = true)]
    pub candidate: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Drop the constraint and integrate ẋ = f(x)
    #[arg(long)]
    pub unconstrained: bool,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    pub spec: PathBuf,
    /// Global refinement sweeps
    #[arg(long, default_value_t = 0)]
    pub sweeps: usize,
}

fn parse_tier_arg(s: &str) -> Result<Tier, String> {
    crate::spec::parse_tier(s).ok_or_else(|| format!("unknown tier '{s}' (expected dsos or sdp)"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 1,
        }
    }
}

fn solver(e: lyapcert_core::Error) -> CliError {
    CliError::Solver(e.to_string())
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub status: &'static str,
    pub fields: Vec<(String, String)>,
}

impl Outcome {
    fn new(code: i32, status: &'static str) -> Self {
        Outcome { code, status, fields: Vec::new() }
    }

    fn field(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    /// `status=<s> command=<c> key=value ...`
    pub fn status_line(&self, command: &str) -> String {
        let mut s = format!("status={} command={command}", self.status);
        for (k, v) in &self.fields {
            let _ = write!(s, " {k}={}", v.replace(char::is_whitespace, "_"));
        }
        s
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FindLyapCone(_) => "find-lyap-cone",
            Command::FindLyapSos(_) => "find-lyap-sos",
            Command::Verify(_) => "verify",
            Command::Simulate(_) => "simulate",
            Command::PartitionDump(_) => "partition-dump",
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::FindLyapCone(a) => find_cone(a, &cli.out),
        Command::FindLyapSos(a) => find_sos(a, &cli.out),
        Command::Verify(a) => verify(a, &cli.out),
        Command::Simulate(a) => simulate_cmd(a, &cli.out),
        Command::PartitionDump(a) => partition_dump(a, &cli.out),
    }
}

fn load(path: &Path) -> Result<Spec, CliError> {
    read_spec(path).map_err(input)
}

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out).map_err(|e| input(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "system".into(), |s| s.to_string_lossy().into_owned())
}

fn conic_system(spec: &Spec, command: &str) -> Result<ConicSystem, CliError> {
    match &spec.system {
        System::Cone(s) => Ok(s.clone()),
        System::Semialgebraic(_) => Err(CliError::Input(format!("{command} needs a spec with 'cone' rows"))),
    }
}

fn semialgebraic_system(spec: &Spec, command: &str) -> Result<SemialgebraicSystem, CliError> {
    match &spec.system {
        System::Semialgebraic(s) => Ok(s.clone()),
        System::Cone(_) => Err(CliError::Input(format!("{command} needs a spec with 'g' generators"))),
    }
}

fn schedule(spec: &Spec, a: &ConeArgs) -> Vec<Level> {
    let mut levels = match a.deg {
        Some(d) => vec![Level { d, r: a.r.unwrap_or(0), sweeps: a.sweeps.unwrap_or(6) }],
        None => spec.options.schedule.clone().unwrap_or_else(default_schedule),
    };
    for l in &mut levels {
        if let Some(r) = a.r {
            l.r = r;
        }
        if let Some(s) = a.sweeps {
            l.sweeps = s;
        }
    }
    levels
}

fn find_cone(a: &ConeArgs, out: &Path) -> Result<Outcome, CliError> {
    let spec = load(&a.spec)?;
    let system = conic_system(&spec, "find-lyap-cone")?;
    let levels = schedule(&spec, a);
    let mut opts = HierarchyOptions::default();
    if let Some(m) = a.margin.or(spec.options.margin) {
        opts.margin = m;
    }
    let mut dump_error = None;
    let outcome = run_hierarchy_observed(&system, &levels, &opts, &mut |ev| {
        if a.dump_lp {
            let name = format!("lp_d{}_r{}_sweep{}.lp", ev.level.d, ev.level.r, ev.sweep);
            if let Err(e) = write(out, &name, &ev.lp.lp.to_lp_format()) {
                dump_error.get_or_insert(e);
            }
        }
    })
    .map_err(solver)?;
    if let Some(e) = dump_error {
        return Err(e);
    }
    match outcome {
        HierarchyOutcome::Certificate(cert) => {
            let report = verify_conic(&cert.candidate, &system, &ConicOracleOptions::default()).map_err(solver)?;
            let text = certfile::write_conic(&spec.echo, &cert, &report);
            let path = write(out, &format!("{}.cert", stem(&a.spec)), &text)?;
            let (code, status) = if report.pass() { (0, "certified") } else { (1, "oracle-fail") };
            Ok(Outcome::new(code, status)
                .field("d", cert.d)
                .field("r", cert.candidate.r)
                .field("margin", format!("{:e}", cert.margin))
                .field("sweeps", cert.sweeps)
                .field("certificate", path.display()))
        }
        HierarchyOutcome::Exhausted(reports) => {
            let mut text = String::from("# schedule exhausted\n");
            for r in &reports {
                let _ = writeln!(
                    text,
                    "level d={} r={} sweeps_run={} best_margin={}",
                    r.level.d,
                    r.level.r,
                    r.sweeps_run,
                    r.best_margin.map_or_else(|| "none".into(), |m| format!("{m:e}"))
                );
            }
            write(out, &format!("{}.exhausted", stem(&a.spec)), &text)?;
            let best = reports.iter().filter_map(|r| r.best_margin).fold(f64::NEG_INFINITY, f64::max);
            Ok(Outcome::new(1, "exhausted").field("levels", reports.len()).field("best_margin", format!("{best:e}")))
        }
    }
}

fn sos_options(spec: &Spec, a: &SosArgs) -> SosOptions {
    let mut opts = SosOptions::default();
    if let Some(e) = a.eps_pd.or(spec.options.eps_pd) {
        opts.eps_pd = e;
    }
    if let Some(eps) = a.margin.or(spec.options.margin) {
        opts.margin = DecreaseMargin::Power { eps, q: 1 };
    }
    opts
}

fn sos_oracle(seed: Option<u64>) -> SosOracleOptions {
    SosOracleOptions { seed: seed.unwrap_or(0), ..SosOracleOptions::default() }
}

fn find_sos(a: &SosArgs, out: &Path) -> Result<Outcome, CliError> {
    let spec = load(&a.spec)?;
    let system = semialgebraic_system(&spec, "find-lyap-sos")?;
    let max_deg = a.deg.or(spec.options.deg).unwrap_or(2);
    if max_deg < 2 {
        return Err(CliError::Input("--deg must be at least 2".into()));
    }
    let tier = a.tier.or(spec.options.tier).unwrap_or(Tier::Sdp);
    let opts = sos_options(&spec, a);
    let seed = a.seed.or(spec.options.seed);
    let mut last = Outcome::new(1, "infeasible");
    for deg in (2..=max_deg).step_by(2) {
        if a.dump_sdpa || a.dump_lp {
            let program = SosProgram::assemble(&system, deg, &opts, 0).map_err(solver)?;
            if a.dump_sdpa {
                write(out, &format!("sos_deg{deg}.dat-s"), &program.to_sdp().to_sdpa())?;
            }
            if a.dump_lp {
                write(out, &format!("dsos_deg{deg}.lp"), &program.to_dsos_lp().to_lp_format())?;
            }
        }
        log::info!("degree {deg}: solving ({tier:?})");
        match solve_certificate(&system, deg, tier, &opts) {
            Ok(SosOutcome::Certificate(cert)) => {
                let report = verify_sos(&cert.v, &system, &sos_oracle(seed)).map_err(solver)?;
                let text = certfile::write_sos(&spec.echo, &cert, &report);
                let path = write(out, &format!("{}.cert", stem(&a.spec)), &text)?;
                let (code, status) = if report.pass() { (0, "certified") } else { (1, "oracle-fail") };
                return Ok(Outcome::new(code, status)
                    .field("deg", deg)
                    .field("t", format!("{:e}", cert.t))
                    .field("max_residual", format!("{:e}", cert.max_residual()))
                    .field("min_eig", format!("{:e}", cert.min_gram_eigenvalue()))
                    .field("certificate", path.display()));
            }
            Ok(SosOutcome::Infeasible { best_t, .. }) => {
                log::info!("degree {deg}: infeasible (best t {best_t:?})");
                last = Outcome::new(1, "infeasible").field("deg", deg);
                if let Some(t) = best_t {
                    last = last.field("best_t", format!("{t:e}"));
                }
            }
            Ok(SosOutcome::MaxIter { t, .. }) => {
                log::warn!("degree {deg}: solver hit its iteration limit (t {t:?})");
                last = Outcome::new(1, "max-iter").field("deg", deg);
            }
            Err(e @ lyapcert_core::Error::DegreeSchedule { .. }) => {
                log::warn!("degree {deg}: {e}");
                last = Outcome::new(1, "degree-schedule").field("deg", deg);
            }
            Err(e) => return Err(solver(e)),
        }
    }
    Ok(last)
}

enum Candidate {
    Conic(RationalCandidate),
    Sos(FloatPoly),
}

fn candidate(spec: &Spec, text: Option<&str>, r: u32, certificate: Option<&Path>) -> Result<Option<Candidate>, CliError> {
    let dim = spec.system.dim();
    let stored = match (text, certificate) {
        (Some(t), _) => {
            let p = parse_polynomial(t, dim).map_err(|e| input(format!("candidate: {e}")))?.to_f64();
            match spec.system {
                System::Cone(_) => {
                    StoredCandidate::Conic(RationalCandidate::new(p, r).map_err(|e| input(format!("candidate: {e}")))?)
                }
                System::Semialgebraic(_) => StoredCandidate::Sos(p),
            }
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
            certfile::read_candidate(&text, dim).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Ok(None),
    };
    Ok(Some(match (stored, &spec.system) {
        (StoredCandidate::Conic(c), System::Cone(_)) => Candidate::Conic(c),
        (StoredCandidate::Sos(v), System::Semialgebraic(_)) => Candidate::Sos(v),
        // a polynomial V is the r = 0 rational candidate
        (StoredCandidate::Sos(v), System::Cone(_)) => {
            Candidate::Conic(RationalCandidate::new(v, 0).map_err(|e| input(format!("candidate: {e}")))?)
        }
        (StoredCandidate::Conic(c), System::Semialgebraic(_)) => {
            if c.r != 0 {
                return Err(CliError::Input("rational candidates need a cone spec".into()));
            }
            Candidate::Sos(c.h)
        }
    }))
}

fn verify(a: &VerifyArgs, out: &Path) -> Result<Outcome, CliError> {
    let spec = load(&a.spec)?;
    let cand = candidate(&spec, a.candidate.as_deref(), a.r, a.certificate.as_deref())?
        .ok_or_else(|| CliError::Input("verify needs --candidate or --certificate".into()))?;
    let report: Report = match (&cand, &spec.system) {
        (Candidate::Conic(c), System::Cone(sys)) => verify_conic(c, sys, &ConicOracleOptions::default()).map_err(solver)?,
        (Candidate::Sos(v), System::Semialgebraic(sys)) => {
            verify_sos(v, sys, &sos_oracle(a.seed.or(spec.options.seed))).map_err(solver)?
        }
        _ => unreachable!("candidate() matches the system kind"),
    };
    print!("{}", report.summary());
    let path = write(out, &format!("{}.verify", stem(&a.spec)), &report.summary())?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let outcome = if report.pass() { Outcome::new(0, "pass") } else { Outcome::new(1, "fail").field("failed", failed.join(",")) };
    Ok(outcome.field("checks", report.checks.len()).field("report", path.display()))
}

fn parse_point(s: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let x: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--x0: invalid number '{}'", t.trim()))))
        .collect::<Result<_, _>>()?;
    if x.len() != dim {
        return Err(CliError::Input(format!("--x0: expected {dim} coordinates, found {}", x.len())));
    }
    Ok(x)
}

/// A random point of the cone: a section sample scaled by a radius in [0.5, 2].
fn cone_start(k: &PolyhedralCone, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, CliError> {
    let sections = cone_orthant_sections(k).map_err(solver)?;
    if sections.is_empty() {
        return Err(CliError::Input("the cone has no full-dimensional section".into()));
    }
    let s = &sections[rng.gen_range(0..sections.len())];
    let radius = rng.gen_range(0.5..2.0);
    Ok(s.simplex.sample(rng).into_iter().map(|x| x * radius).collect())
}

fn simulate_cmd(a: &SimulateArgs, out: &Path) -> Result<Outcome, CliError> {
    let spec = load(&a.spec)?;
    let dim = spec.system.dim();
    let mut flow = match &spec.system {
        System::Cone(s) => FlowSystem::from_conic(s),
        System::Semialgebraic(s) => FlowSystem::from_semialgebraic(s),
    };
    if a.unconstrained {
        flow = flow.unconstrained();
    }
    let cand = candidate(&spec, a.candidate.as_deref(), a.r, a.certificate.as_deref())?;
    let v: Option<Box<dyn Fn(&[f64]) -> f64 + Sync>> = match cand {
        Some(Candidate::Conic(c)) => Some(Box::new(move |x: &[f64]| c.value(x))),
        Some(Candidate::Sos(p)) => Some(Box::new(move |x: &[f64]| p.eval(x))),
        None => None,
    };
    let starts = match &a.x0 {
        Some(s) => vec![parse_point(s, dim)?],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.or(spec.options.seed).unwrap_or(0));
            let mut xs = Vec::with_capacity(a.starts);
            for _ in 0..a.starts.max(1) {
                xs.push(match &spec.system {
                    System::Cone(s) => cone_start(s.cone(), &mut rng)?,
                    System::Semialgebraic(s) => sample_set(s, 1, &mut rng).map_err(solver)?.remove(0),
                });
            }
            xs
        }
    };
    for x in &starts {
        let viol = flow.violation(x);
        if viol > 1e-8 {
            return Err(CliError::Input(format!("start {x:?} violates the constraints by {viol:e}")));
        }
    }
    let vref = v.as_deref();
    let runs: Vec<Result<Trajectory, lyapcert_core::Error>> = starts
        .par_iter()
        .map(|x0| simulate(&flow, x0, a.t_end, a.dt, vref.map(|f| f as &dyn Fn(&[f64]) -> f64)))
        .collect();
    let mut max_violation: f64 = 0.0;
    let mut max_increase = f64::NEG_INFINITY;
    let mut max_final: f64 = 0.0;
    let single = runs.len() == 1;
    for (k, run) in runs.into_iter().enumerate() {
        let traj = run.map_err(solver)?;
        for x in &traj.states {
            max_violation = max_violation.max(flow.violation(x));
        }
        if let Some(inc) = traj.max_v_increase() {
            max_increase = max_increase.max(inc);
        }
        let last = traj.last().unwrap_or(&[]);
        max_final = max_final.max(last.iter().map(|v| v * v).sum::<f64>().sqrt());
        let name = if single { "trajectory.csv".to_string() } else { format!("trajectory_{k}.csv") };
        write(out, &name, &certfile::trajectory_csv(&traj))?;
    }
    let mut outcome = Outcome::new(0, "done")
        .field("starts", starts.len())
        .field("max_violation", format!("{max_violation:e}"))
        .field("max_final_norm", format!("{max_final:e}"));
    if vref.is_some() {
        outcome = outcome.field("max_v_increase", format!("{max_increase:e}"));
    }
    Ok(outcome)
}

fn partition_dump(a: &DumpArgs, out: &Path) -> Result<Outcome, CliError> {
    let spec = load(&a.spec)?;
    let system = conic_system(&spec, "partition-dump")?;
    let mut parts = initial_partitions(system.cone()).map_err(solver)?;
    for _ in 0..a.sweeps {
        for p in &mut parts {
            if p.partition.refinable() {
                p.partition.refine_all().map_err(solver)?;
            }
        }
    }
    let text = certfile::format_partitions(&parts);
    print!("{text}");
    let path = write(out, &format!("{}.partition", stem(&a.spec)), &text)?;
    let cells: usize = parts.iter().map(|p| p.partition.len()).sum();
    Ok(Outcome::new(0, "done").field("sections", parts.len()).field("cells", cells).field("dump", path.display()))
}
