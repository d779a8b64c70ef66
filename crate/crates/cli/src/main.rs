//! `oppenheim`: counting experiments, orbit scans, correspondence checks,
//! transversality reports, games and the HTTP service.

mod game;
mod output;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oppenheim_core::counting::{
    count_congruence, count_with_cutoff, fit_growth, four_term_count, min_abs_in_shell, shrinking_target_run, CountRecord,
    Cutoff, FourTermParams, Interval, MinTarget, Norm, Shell, ShrinkingTarget,
};
use oppenheim_core::lattices::{choose_v, correspondence_scan, orbit_scan, transversality_check_mv, CorrespondenceParams};
use oppenheim_core::Error;
use oppenheim_service::{FormSpec, LatticeSpec};
use serde::Serialize;

use output::{fmt17, fmt_vec, Out};

#[derive(Parser, Debug)]
#[command(name = "oppenheim", version, about = "Values of quadratic forms, lattice orbits and Diophantine games")]
struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count integer points with Q_ξ(y) in an interval.
    Count(CountArgs),
    /// Counts for shrinking windows around a target value.
    Shrink(ShrinkArgs),
    /// Minimum of |F(x + θ)| over a sup-norm shell.
    Minsearch(MinArgs),
    /// Four-term inequality count.
    Fourterm(FourTermArgs),
    /// Systole and distance to v along the diagonal flow.
    Orbit(OrbitArgs),
    /// Compare the value gap at s with the orbit gap to M_v.
    Correspond(CorrespondArgs),
    /// Transversality conditions for M_v.
    Transversal(TransversalArgs),
    /// Play a game between engine strategies or a human on the terminal.
    Game(game::GameArgs),
    /// Re-check a transcript and print the final state.
    Replay(game::ReplayArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum NormArg {
    Euclidean,
    Sup,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Euclidean => Norm::Euclidean,
            NormArg::Sup => Norm::Sup,
        }
    }
}

pub(crate) fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = parse_list(s)?;
    <[f64; 2]>::try_from(v).map_err(|_| "expected two comma-separated numbers".into())
}

/// A preset name or inline JSON.
fn parse_form(s: &str) -> Result<FormSpec, String> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| e.to_string())
    } else {
        Ok(FormSpec::Named(s.to_string()))
    }
}

fn parse_lattice(s: &str) -> Result<LatticeSpec, String> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| e.to_string())
    } else {
        Ok(LatticeSpec::Named(s.to_string()))
    }
}

#[derive(Args, Debug, Serialize)]
struct FormArgs {
    /// Preset (q0, pell, golden, ternary-sqrt2) or JSON `{"dim":n,"coeffs":[…]}`.
    #[arg(long, value_parser = parse_form)]
    form: FormSpec,
    /// Shift ξ, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    shift: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "euclidean")]
    norm: NormArg,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    /// `lo,hi`; open unless --closed.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    interval: [f64; 2],
    #[arg(long)]
    closed: bool,
    /// Cutoff radius, or a comma-separated list for a growth fit.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Use ‖y‖ < t instead of ‖y‖ ≤ t.
    #[arg(long)]
    strict: bool,
    /// Congruence class p with --modulus q: count y ≡ p (mod q).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "modulus")]
    residue: Option<Vec<i64>>,
    #[arg(long, requires = "residue")]
    modulus: Option<i64>,
}

#[derive(Args, Debug, Serialize)]
struct ShrinkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    form: FormArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    target: f64,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    kappa: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct MinArgs {
    /// Form target (preset or JSON).
    #[arg(long, value_parser = parse_form, conflicts_with = "degree")]
    form: Option<FormSpec>,
    /// Degree k of the diagonal target x₁ᵏ − α₂x₂ᵏ − …
    #[arg(long, requires = "alphas")]
    degree: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// `inner,outer` for inner ≤ ‖x‖∞ < outer.
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    shell: Option<Vec<i64>>,
    /// Dyadic shell [n, 2n).
    #[arg(long)]
    n: Option<i64>,
    /// Only points whose coordinate at this index is nonzero.
    #[arg(long)]
    require_nonzero: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct FourTermArgs {
    #[arg(long)]
    m: i64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta2: f64,
    #[arg(long)]
    delta: f64,
}

#[derive(Args, Debug, Serialize)]
struct LatticeArgs {
    /// Preset (z2, golden, golden-gap) or JSON `{"g":[[a,b],[c,d]],"w":[x,y]}`.
    #[arg(long, value_parser = parse_lattice)]
    lattice: LatticeSpec,
}

#[derive(Args, Debug, Serialize)]
struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    lattice: LatticeArgs,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, conflicts_with = "s")]
    v: Option<[f64; 2]>,
    /// Use v = choose_v(s).
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    t_max: f64,
    #[arg(long)]
    dt: f64,
}

#[derive(Args, Debug, Serialize)]
struct CorrespondArgs {
    #[command(flatten)]
    #[serde(flatten)]
    lattice: LatticeArgs,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, default_value_t = 1000.0)]
    radius: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long)]
    witness_eps: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct TransversalArgs {
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, conflicts_with = "s")]
    v: Option<[f64; 2]>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, env = "OPPENHEIM_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, env = "OPPENHEIM_DATA_DIR", default_value = "oppenheim-data")]
    data_dir: PathBuf,
    /// Concurrent jobs (default: all cores).
    #[arg(long, env = "OPPENHEIM_WORKERS")]
    workers: Option<usize>,
}

/// Failure of a command, with its exit code.
pub(crate) enum Failure {
    Kernel(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Kernel(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

pub(crate) type CmdResult = Result<(), Failure>;

pub(crate) struct Ctx {
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Ctx {
    pub fn out<P: Serialize>(&self, command: &str, params: &P) -> std::io::Result<Out> {
        let mut o = Out::open(self.output.as_deref())?;
        o.header(command, params, self.threads)?;
        Ok(o)
    }
}

fn interval(a: &CountArgs) -> oppenheim_core::Result<Interval> {
    let [lo, hi] = a.interval;
    if a.closed {
        Interval::closed(lo, hi)
    } else {
        Interval::open(lo, hi)
    }
}

fn count(ctx: &Ctx, a: &CountArgs) -> CmdResult {
    if a.t.is_empty() {
        return Err(Error::invalid("cutoff", "give at least one --t").into());
    }
    let i = interval(a)?;
    let norm: Norm = a.form.norm.into();
    let mut records = Vec::new();
    for &t in &a.t {
        let cutoff = if a.strict { Cutoff::strict(t, norm) } else { Cutoff::closed(t, norm) };
        let n = match (&a.residue, a.modulus) {
            (Some(p), Some(q)) => {
                if a.form.shift.is_some() {
                    return Err(Error::invalid("congruence", "congruence counts take a homogeneous form").into());
                }
                count_congruence(&a.form.form.resolve()?, &i, cutoff, p, q)?
            }
            _ => count_with_cutoff(&a.form.form.with_shift(a.form.shift.as_deref())?, &i, cutoff)?,
        };
        records.push(CountRecord::new(t, n, i.length()));
    }
    let mut o = ctx.out("count", a)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![fmt17(r.t), r.count.to_string(), fmt17(r.interval_length)])
        .collect();
    o.csv(&["t", "count", "interval_length"], &rows)?;
    if records.len() >= 3 {
        match fit_growth(&records) {
            Ok(f) => o.comment(&format!(
                "fit: exponent={} coefficient={} max_residual={}",
                fmt17(f.exponent),
                fmt17(f.coefficient),
                fmt17(f.max_residual)
            ))?,
            Err(e) => o.comment(&format!("fit: unavailable ({e})"))?,
        }
    }
    Ok(o.finish()?)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn shrink(ctx: &Ctx, a: &ShrinkArgs) -> CmdResult {
    let spec = ShrinkingTarget {
        target: a.target,
        c: a.c,
        kappa: a.kappa,
        norm: a.form.norm.into(),
    };
    let records = shrinking_target_run(&a.form.form.with_shift(a.form.shift.as_deref())?, &spec, &a.t)?;
    let mut o = ctx.out("shrink", a)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                fmt17(r.t),
                r.count.to_string(),
                fmt17(r.interval_length),
                opt(r.predicted),
                opt(r.residual),
            ]
        })
        .collect();
    o.csv(&["t", "count", "interval_length", "predicted", "residual"], &rows)?;
    Ok(o.finish()?)
}

fn minsearch(ctx: &Ctx, a: &MinArgs) -> CmdResult {
    let target = match (&a.form, a.degree, &a.alphas) {
        (Some(f), None, _) => MinTarget::Form { form: f.resolve()? },
        (None, Some(k), Some(alphas)) => MinTarget::Diagonal {
            k,
            alphas: alphas.clone(),
        },
        _ => return Err(Error::invalid("target", "give --form or --degree with --alphas").into()),
    };
    let shell = match (&a.shell, a.n) {
        (Some(s), None) if s.len() == 2 => Shell::new(s[0], s[1])?,
        (None, Some(n)) => Shell::dyadic(n)?,
        _ => return Err(Error::invalid("shell", "give --shell inner,outer or --n").into()),
    };
    let theta = a.theta.clone().unwrap_or_else(|| vec![0.0; target.dim()]);
    let r = min_abs_in_shell(&target, &theta, shell, a.require_nonzero)?;
    let mut o = ctx.out("minsearch", a)?;
    let argmin: Vec<String> = r.argmin.iter().map(|x| x.to_string()).collect();
    o.csv(
        &["min_abs_value", "argmin", "multiplicity", "points_scanned"],
        &[vec![
            fmt17(r.min_abs_value),
            argmin.join(";"),
            r.multiplicity.to_string(),
            r.points_scanned.to_string(),
        ]],
    )?;
    Ok(o.finish()?)
}

fn fourterm(ctx: &Ctx, a: &FourTermArgs) -> CmdResult {
    let p = FourTermParams {
        m: a.m,
        alpha: a.alpha,
        beta_coef: a.beta,
        theta1: a.theta1,
        theta2: a.theta2,
        delta: a.delta,
    };
    let n = four_term_count(&p)?;
    let mut o = ctx.out("fourterm", a)?;
    o.csv(&["count", "bound"], &[vec![n.to_string(), fmt17(p.bound())]])?;
    Ok(o.finish()?)
}

fn pick_v(v: Option<[f64; 2]>, s: Option<f64>) -> oppenheim_core::Result<[f64; 2]> {
    match (v, s) {
        (Some(v), _) => Ok(v),
        (None, Some(s)) => choose_v(s),
        (None, None) => Err(Error::invalid("vector", "give --v or --s")),
    }
}

fn orbit(ctx: &Ctx, a: &OrbitArgs) -> CmdResult {
    let v = pick_v(a.v, a.s)?;
    let rows = orbit_scan(&a.lattice.lattice.resolve()?, v, a.t_min, a.t_max, a.dt)?;
    let mut o = ctx.out("orbit", a)?;
    o.comment(&format!("v: {}", fmt_vec(&v)))?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt17(r.t), fmt17(r.systole), fmt17(r.dist_to_mv)])
        .collect();
    o.csv(&["t", "systole", "dist_to_mv"], &rows)?;
    Ok(o.finish()?)
}

fn correspond(ctx: &Ctx, a: &CorrespondArgs) -> CmdResult {
    let mut p = CorrespondenceParams::new(a.s, a.radius, a.t_max, a.dt);
    if let Some(e) = a.witness_eps {
        p.witness_eps = e;
    }
    let r = correspondence_scan(&a.lattice.lattice.resolve()?, &p)?;
    let mut o = ctx.out("correspond", a)?;
    o.json(&r)?;
    Ok(o.finish()?)
}

fn transversal(ctx: &Ctx, a: &TransversalArgs) -> CmdResult {
    let v = pick_v(a.v, a.s)?;
    let r = transversality_check_mv(v);
    let mut o = ctx.out("transversal", a)?;
    o.csv(
        &["v1", "v2", "f_condition", "hplus_condition", "hminus_condition", "all"],
        &[vec![
            fmt17(v[0]),
            fmt17(v[1]),
            r.f_condition.to_string(),
            r.hplus_condition.to_string(),
            r.hminus_condition.to_string(),
            r.all().to_string(),
        ]],
    )?;
    Ok(o.finish()?)
}

fn serve(a: &ServeArgs) -> CmdResult {
    let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    let mut config = oppenheim_service::Config {
        addr: a.addr,
        data_dir: a.data_dir.clone(),
        ..Default::default()
    };
    if let Some(w) = a.workers {
        if w == 0 {
            return Err(Error::invalid("workers", "worker count must be positive").into());
        }
        config.workers = w;
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    Ok(rt.block_on(oppenheim_service::serve(config))?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error [threads]: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    let ctx = Ctx {
        threads,
        output: cli.output.clone(),
    };
    let result = match &cli.command {
        Command::Count(a) => count(&ctx, a),
        Command::Shrink(a) => shrink(&ctx, a),
        Command::Minsearch(a) => minsearch(&ctx, a),
        Command::Fourterm(a) => fourterm(&ctx, a),
        Command::Orbit(a) => orbit(&ctx, a),
        Command::Correspond(a) => correspond(&ctx, a),
        Command::Transversal(a) => transversal(&ctx, a),
        Command::Game(a) => game::run(&ctx, a),
        Command::Replay(a) => game::replay_cmd(&ctx, a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Kernel(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error [io]: {e}");
            ExitCode::from(1)
        }
    }
}
