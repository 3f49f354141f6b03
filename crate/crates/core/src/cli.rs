//! Command-line front end.
//!
//! Every subcommand reads the same flat parameter set. A JSON file passed
//! with `--config` supplies defaults and explicit flags override it. Output
//! floats are rounded to 12 significant digits so reruns are byte-identical.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::crosstalk::{colors_required, pulse_count, total_crosstalk, Convention};
use crate::echo::{verify_cancellation, walsh_sequence};
use crate::eldredge::{benchmark_time, linear_fit, run_schedule, EldredgeFit};
use crate::error::{Error, Result};
use crate::hybrid::{optimize, HybridPlan};
use crate::lattice::{CouplingModel, Lattice};
use crate::qsim::{run_eldredge_protocol, run_tran_step};
use crate::tiling::tile_and_color;

/// Environment variable naming the exact-run cache directory.
pub const CACHE_ENV: &str = "POWERLAWST_CACHE";

const DEFAULT_R0: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "powerlawst", version, about = "GHZ-growth protocols on power-law lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Greedy cascaded-CNOT schedule on an r^d hypercube from a corner.
    Eldredge(Flags),
    /// Hybrid dynamic program over r = 2..=rmax.
    Hybrid(Flags),
    /// Crosstalk error budget.
    Crosstalk(Flags),
    /// Smallest color count meeting an error target.
    Colors(Flags),
    /// Echo pulse counts for n colors.
    Pulses(Flags),
    /// Walsh-style echo sequence for n colors.
    Echo(Flags),
    /// Cross-color cancellation check on a colored tiling.
    EchoVerify(Flags),
    /// State-vector verification of a protocol.
    Verify {
        #[arg(value_enum)]
        protocol: Protocol,
        #[command(flatten)]
        flags: Flags,
    },
    /// Exact runs, fit and dynamic program, with the headline numbers.
    Reproduce(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Protocol {
    Eldredge,
    Tran,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ConventionArg {
    Published,
    Draft,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Published => Convention::Published,
            ConventionArg::Draft => Convention::Draft,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    rmax: Option<usize>,
    #[arg(long)]
    r0: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Block edge for `verify tran`.
    #[arg(long)]
    r1: Option<usize>,
    /// Blocks per axis for `verify tran`.
    #[arg(long)]
    m: Option<usize>,
    /// Block edge for `echo-verify`.
    #[arg(long)]
    block_length: Option<usize>,
    /// Total echo time.
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Also write the event list as CSV (eldredge only).
    #[arg(long, value_enum)]
    emit_events: Option<Emit>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parameters accepted in a `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub d: Option<usize>,
    pub r: Option<usize>,
    pub rmax: Option<usize>,
    pub r0: Option<usize>,
    pub n: Option<usize>,
    pub eps: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub convention: Option<Convention>,
    pub emit: Option<String>,
    pub out: Option<PathBuf>,
    pub extents: Option<Vec<usize>>,
    pub prefactor: Option<f64>,
    pub source: Option<usize>,
    /// `[re, im]`
    pub a: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
    pub r1: Option<usize>,
    pub m: Option<usize>,
    pub block_length: Option<usize>,
    pub fit_window: Option<[usize; 2]>,
}

enum Failure {
    /// Bad or missing flags: exit 2.
    Usage(String),
    /// Domain error: exit 1.
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn missing(name: &str) -> Failure {
    Failure::Usage(format!("missing required parameter --{name}"))
}

struct Params {
    cfg: RunConfig,
    emit: Emit,
    emit_events: Option<Emit>,
}

impl Params {
    fn load(flags: Flags) -> CliResult<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        let emit_cfg = match cfg.emit.as_deref() {
            None => None,
            Some("json") => Some(Emit::Json),
            Some("csv") => Some(Emit::Csv),
            Some(other) => return Err(Failure::Usage(format!("config emit must be json or csv, got {other}"))),
        };
        macro_rules! merge {
            ($($f:ident),*) => { $( if flags.$f.is_some() { cfg.$f = flags.$f; } )* };
        }
        merge!(alpha, d, r, rmax, r0, n, eps, r1, m, block_length, t, out);
        if let Some(c) = flags.convention {
            cfg.convention = Some(c.into());
        }
        Ok(Self { emit: flags.emit.or(emit_cfg).unwrap_or(Emit::Json), emit_events: flags.emit_events, cfg })
    }

    fn alpha(&self) -> CliResult<f64> {
        self.cfg.alpha.ok_or_else(|| missing("alpha"))
    }
    fn d(&self) -> CliResult<usize> {
        self.cfg.d.ok_or_else(|| missing("d"))
    }
    fn r(&self) -> CliResult<usize> {
        self.cfg.r.ok_or_else(|| missing("r"))
    }
    fn n(&self) -> CliResult<usize> {
        self.cfg.n.ok_or_else(|| missing("n"))
    }
    fn r0(&self) -> usize {
        self.cfg.r0.unwrap_or(DEFAULT_R0)
    }
    fn convention(&self) -> Convention {
        self.cfg.convention.unwrap_or(Convention::Published)
    }
    fn amplitudes(&self) -> (Complex64, Complex64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = self.cfg.a.unwrap_or([h, 0.0]);
        let b = self.cfg.b.unwrap_or([h, 0.0]);
        (Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
    }
}

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn num(x: f64) -> Value {
    let v = sig12(x);
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn fmt_csv(x: f64) -> String {
    format!("{}", sig12(x))
}

/// Default fitting window per dimension; keeps the largest exact run near 12k sites.
pub fn default_fit_window(d: usize) -> (usize, usize) {
    match d {
        3 => (13, 23),
        _ => (60, 110),
    }
}

/// Directory holding cached exact benchmark times.
pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("powerlawst"))
}

fn cache_file(dir: &Path, alpha: f64, d: usize) -> PathBuf {
    dir.join(format!("eldredge_alpha{alpha}_d{d}.json"))
}

/// Exact benchmark times for `2..=r_hi`, read from and written back to the cache.
pub fn cached_benchmark_times(alpha: f64, d: usize, r_hi: usize) -> Result<BTreeMap<usize, f64>> {
    let dir = cache_dir();
    let path = cache_file(&dir, alpha, d);
    let mut times: BTreeMap<usize, f64> = std::fs::read_to_string(&path)
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or_default();
    let mut dirty = false;
    for r in 2..=r_hi {
        if let std::collections::btree_map::Entry::Vacant(e) = times.entry(r) {
            e.insert(benchmark_time(r, alpha, d)?);
            dirty = true;
        }
    }
    if dirty && std::fs::create_dir_all(&dir).is_ok() {
        // a failed cache write only costs a rerun
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if let Ok(text) = serde_json::to_string(&times) {
            if std::fs::write(&tmp, text).is_ok() {
                let _ = std::fs::rename(&tmp, &path);
            }
        }
    }
    Ok((2..=r_hi).map(|r| (r, times[&r])).collect())
}

fn fit_for(p: &Params, alpha: f64, d: usize) -> CliResult<EldredgeFit> {
    let window = p.cfg.fit_window.map(|[a, b]| (a, b)).unwrap_or_else(|| default_fit_window(d));
    if window.0 < 2 || window.1 <= window.0 {
        return Err(Failure::Usage(format!("fit window {window:?} must satisfy 2 <= lo < hi")));
    }
    let exact = cached_benchmark_times(alpha, d, window.1)?;
    Ok(EldredgeFit::from_exact(alpha, d, exact, window)?)
}

/// Parse `argv` (including the program name), run, and return the exit status.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    macro_rules! go {
        ($flags:expr, |$p:ident| $body:expr) => {{
            let $p = Params::load($flags)?;
            let text = $body;
            ($p, text)
        }};
    }
    let (p, text) = match cli.command {
        Command::Eldredge(f) => go!(f, |p| cmd_eldredge(&p, out)?),
        Command::Hybrid(f) => go!(f, |p| cmd_hybrid(&p)?),
        Command::Crosstalk(f) => go!(f, |p| cmd_crosstalk(&p)?),
        Command::Colors(f) => go!(f, |p| cmd_colors(&p)?),
        Command::Pulses(f) => go!(f, |p| cmd_pulses(&p)?),
        Command::Echo(f) => go!(f, |p| cmd_echo(&p)?),
        Command::EchoVerify(f) => go!(f, |p| cmd_echo_verify(&p)?),
        Command::Verify { protocol: Protocol::Eldredge, flags } => go!(flags, |p| cmd_verify_eldredge(&p)?),
        Command::Verify { protocol: Protocol::Tran, flags } => go!(flags, |p| cmd_verify_tran(&p)?),
        Command::Reproduce(f) => go!(f, |p| cmd_reproduce(&p)?),
    };
    emit(&p, out, &text)
}

fn emit(p: &Params, out: &mut dyn Write, text: &str) -> CliResult<()> {
    match &p.cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Domain(format!("write failed: {e}"))),
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => *v = num(x.as_f64().expect("f64 number")),
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn to_json(v: &Value) -> String {
    let mut v = v.clone();
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_eldredge(p: &Params, out: &mut dyn Write) -> CliResult<String> {
    let (r, alpha, d) = (p.r()?, p.alpha()?, p.d()?);
    let lattice = Lattice::hypercube(d, r)?;
    let model = CouplingModel::with_prefactor(alpha, p.cfg.prefactor.unwrap_or(1.0))?;
    let source = p.cfg.source.unwrap_or(lattice.corner());
    let sched = run_schedule(&lattice, &model, source)?;
    let mut csv = String::from("event_index,time,site\n");
    for (k, e) in sched.events.iter().enumerate() {
        csv.push_str(&format!("{k},{},{}\n", fmt_csv(e.time), e.site));
    }
    if p.emit_events == Some(Emit::Csv) && p.emit == Emit::Json {
        out.write_all(csv.as_bytes()).map_err(|e| Failure::Domain(format!("write failed: {e}")))?;
    }
    if p.emit == Emit::Csv {
        return Ok(csv);
    }
    Ok(to_json(&json!({
        "r": r,
        "alpha": num(alpha),
        "d": d,
        "sites": lattice.num_sites(),
        "source": source,
        "total_time": num(sched.total_time),
        "state_transfer_time": num(sched.state_transfer_time()),
    })))
}

fn plan_for(p: &Params, default_rmax: usize) -> CliResult<(EldredgeFit, HybridPlan)> {
    let (alpha, d) = (p.alpha()?, p.d()?);
    let r_max = p.cfg.rmax.unwrap_or(default_rmax);
    let fit = fit_for(p, alpha, d)?;
    let plan = optimize(&fit, r_max, alpha, d)?;
    Ok((fit, plan))
}

fn m_loglog_slope(plan: &HybridPlan, lo: usize, hi: usize) -> Option<f64> {
    let hi = hi.min(plan.r_max);
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter_map(|r| plan.m(r).map(|m| ((r as f64).ln(), m.ln())))
        .collect();
    linear_fit(&pts).map(|(s, _)| s)
}

fn plan_summary(fit: &EldredgeFit, plan: &HybridPlan) -> Value {
    let onsets: BTreeMap<String, Value> = (2..=6u32)
        .filter_map(|k| plan.depth_onset(k).map(|r| (k.to_string(), json!(r))))
        .collect();
    json!({
        "alpha": num(fit.alpha),
        "d": fit.d,
        "rmax": plan.r_max,
        "crossover": plan.crossover(),
        "single_split_m_range": plan.single_split_m_range().map(|(a, b)| vec![num(a), num(b)]),
        "depth_onsets": onsets,
        "m_loglog_slope": m_loglog_slope(plan, 10_000, 1_000_000).map(num),
        "eldredge_fit": {
            "window": [fit.fit_window.0, fit.fit_window.1],
            "slope": num(fit.fit_slope),
            "intercept": num(fit.fit_intercept),
            "max_relative_residual": num(fit.max_relative_residual()),
            "loglog_exponent": fit.loglog_exponent().map(num),
        },
    })
}

fn cmd_hybrid(p: &Params) -> CliResult<String> {
    let rmax = p.cfg.rmax.ok_or_else(|| missing("rmax"))?;
    let (fit, plan) = plan_for(p, rmax)?;
    if p.emit == Emit::Json {
        return Ok(to_json(&plan_summary(&fit, &plan)));
    }
    let mut csv = String::from("r,best_time,eldredge_time,best_split,depth\n");
    for r in 2..=plan.r_max {
        csv.push_str(&format!(
            "{r},{},{},{},{}\n",
            fmt_csv(plan.best_time(r)),
            fmt_csv(plan.eldredge_time[r]),
            plan.best_split(r).unwrap_or(0),
            plan.depth(r)
        ));
    }
    Ok(csv)
}

fn cmd_reproduce(p: &Params) -> CliResult<String> {
    let (fit, plan) = plan_for(p, 1_000_000)?;
    Ok(to_json(&plan_summary(&fit, &plan)))
}

fn cmd_crosstalk(p: &Params) -> CliResult<String> {
    let (r, alpha, d) = (p.r()?, p.alpha()?, p.d()?);
    let b = total_crosstalk(r as f64, p.r0() as f64, p.n()? as u128, alpha, d, p.convention())?;
    if p.emit == Emit::Csv {
        let mut csv = String::from("level,L,eps\n");
        for (i, (l, e)) in b.per_level.iter().enumerate() {
            csv.push_str(&format!("{i},{},{}\n", fmt_csv(*l), fmt_csv(*e)));
        }
        return Ok(csv);
    }
    Ok(to_json(&json!({
        "convention": b.convention,
        "r": r,
        "r0": p.r0(),
        "alpha": num(alpha),
        "d": d,
        "n": p.n()?,
        "i_max": b.i_max,
        "per_level": b.per_level.iter().map(|(l, e)| json!([num(*l), num(*e)])).collect::<Vec<_>>(),
        "total": num(b.total),
        "analytic_bound": num(b.analytic_bound),
    })))
}

fn cmd_colors(p: &Params) -> CliResult<String> {
    let (r, alpha, d) = (p.r()?, p.alpha()?, p.d()?);
    let eps = p.cfg.eps.ok_or_else(|| missing("eps"))?;
    let req = colors_required(r as f64, p.r0() as f64, eps, alpha, d, p.convention())?;
    Ok(to_json(&json!({
        "convention": p.convention(),
        "r": r,
        "r0": p.r0(),
        "alpha": num(alpha),
        "d": d,
        "eps": num(eps),
        "n": req.n.to_string(),
        "total": num(req.total),
        "analytic_class": req.analytic_class,
    })))
}

fn cmd_pulses(p: &Params) -> CliResult<String> {
    let n = p.n()?;
    let n32 = u32::try_from(n).map_err(|_| Failure::Domain(format!("color count {n} too large")))?;
    let pc = pulse_count(n32)?;
    Ok(to_json(&json!({ "n": n, "per_color": pc.per_color, "total": pc.total })))
}

fn cmd_echo(p: &Params) -> CliResult<String> {
    let n = p.n()?;
    let seq = walsh_sequence(n, p.cfg.t.unwrap_or(1.0))?;
    if p.emit == Emit::Csv {
        let mut csv = String::from("segment,duration");
        for c in 1..=n {
            csv.push_str(&format!(",color_{c}"));
        }
        csv.push('\n');
        for k in 0..seq.num_segments() {
            csv.push_str(&format!("{k},{}", fmt_csv(seq.segment_durations[k])));
            for row in &seq.signs {
                csv.push_str(&format!(",{}", row[k]));
            }
            csv.push('\n');
        }
        return Ok(csv);
    }
    Ok(to_json(&json!({
        "n": n,
        "total_time": num(seq.total_time),
        "segments": seq.num_segments(),
        "pulses_of_color": seq.pulses_of_color,
        "distinct_pulse_times": seq.distinct_pulse_times(),
    })))
}

fn lattice_from(p: &Params) -> CliResult<(Lattice, CouplingModel)> {
    let extents = match (&p.cfg.extents, p.cfg.d, p.cfg.r) {
        (Some(e), _, _) => e.clone(),
        (None, Some(d), Some(r)) => vec![r; d],
        _ => return Err(missing("extents (or d and r)")),
    };
    if let Some(d) = p.cfg.d {
        if d != extents.len() {
            return Err(Failure::Domain(format!("d={d} but {} extents given", extents.len())));
        }
    }
    let model = CouplingModel::with_prefactor(p.alpha()?, p.cfg.prefactor.unwrap_or(1.0))?;
    Ok((Lattice::new(&extents)?, model))
}

fn cmd_echo_verify(p: &Params) -> CliResult<String> {
    let (lattice, model) = lattice_from(p)?;
    let n = p.n()?;
    let l = p.cfg.block_length.ok_or_else(|| missing("block_length"))?;
    let tiling = tile_and_color(&lattice, l, n)?;
    let seq = walsh_sequence(n, p.cfg.t.unwrap_or(1.0))?;
    let rep = verify_cancellation(&seq, &tiling, &lattice, &model)?;
    Ok(to_json(&json!({
        "n": n,
        "colors_used": tiling.colors_used(),
        "block_length": l,
        "total_time": num(rep.total_time),
        "cross_color_pairs": rep.cross_color_pairs,
        "same_color_pairs": rep.same_color_pairs,
        "max_cross_residual": num(rep.max_cross_residual),
        "max_cross_relative": num(rep.max_cross_relative),
        "retained_total": num(rep.retained_total),
        "same_color_raw_total": num(rep.same_color_raw_total),
        "cancels": rep.cancels(1e-12),
    })))
}

fn cmd_verify_eldredge(p: &Params) -> CliResult<String> {
    let (lattice, model) = lattice_from(p)?;
    let (a, b) = p.amplitudes();
    let source = p.cfg.source.unwrap_or(lattice.corner());
    let run = run_eldredge_protocol(&lattice, &model, source, a, b)?;
    Ok(to_json(&json!({
        "protocol": "eldredge",
        "qubits": lattice.num_sites(),
        "source": source,
        "fidelity": num(run.overlap.fidelity),
        "outside_population": num(run.overlap.outside_population),
        "total_time": num(run.total_time),
    })))
}

fn cmd_verify_tran(p: &Params) -> CliResult<String> {
    let (alpha, d) = (p.alpha()?, p.d()?);
    let r1 = p.cfg.r1.ok_or_else(|| missing("r1"))?;
    let m = p.cfg.m.ok_or_else(|| missing("m"))?;
    let model = CouplingModel::with_prefactor(alpha, p.cfg.prefactor.unwrap_or(1.0))?;
    let (a, b) = p.amplitudes();
    let run = run_tran_step(&model, d, r1, m, a, b)?;
    Ok(to_json(&json!({
        "protocol": "tran",
        "qubits": run.state.num_qubits(),
        "fidelity": num(run.overlap.fidelity),
        "outside_population": num(run.overlap.outside_population),
        "t1": num(run.t1),
        "t2": num(run.t2),
        "total_time": num(run.total_time()),
    })))
}
