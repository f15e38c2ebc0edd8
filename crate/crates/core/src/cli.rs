//! The `pooldata` command line.
//!
//! Exit codes: 0 on success, 2 for argument or configuration errors, 3 for
//! runtime failures such as a simplification that gives up.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::decoder::bounds::{entropy, required_queries};
use crate::design::{admissibility_warning, generate, to_edge_list, DesignSpec, Family};
use crate::error::{Error, Result};
use crate::experiment::{run_sweep_with_workers, run_trial_detailed, write_csv, RunManifest, SweepConfig, TrialConfig};
use crate::model::{ChannelMatrix, Prior};
use crate::seed::substream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "POOLDATA_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "pooldata", version, about = "Noisy pooled data simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Query bounds, exponents and tail bounds for one parameter point.
    Bounds(BoundsArgs),
    /// Draw a pooling graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run a single trial and print a JSON report.
    Simulate(SimulateArgs),
    /// Run a sweep described by a TOML file and write CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ChannelArgs {
    /// Probability that a one is read as one.
    #[arg(long, default_value_t = 1.0)]
    pub s11: f64,
    /// Probability that a zero is read as one.
    #[arg(long, default_value_t = 0.0)]
    pub s01: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Print JSON instead of `key = value` lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub gamma: usize,
    #[arg(long, default_value = "doubly_regular")]
    pub family: Family,
    /// Allow multi-edges (not available for the Bernoulli family).
    #[arg(long)]
    pub multi: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Fixed number of one-bits.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    pub k: Option<usize>,
    /// Bernoulli prior probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Prior used by the decoder; defaults to k/n or p.
    #[arg(long)]
    pub p_threshold: Option<f64>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Include the estimated bit of every agent.
    #[arg(long)]
    pub decisions: bool,
    /// Include the score, centre and threshold of every agent.
    #[arg(long)]
    pub dump_scores: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep description.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output; the manifest goes next to it with a `.manifest.json`
    /// extension.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::DegenerateChannel
        | Error::ThresholdUndefined { .. }
        | Error::Parse { .. } => EXIT_USAGE,
        Error::UndefinedMetric(_) | Error::SimplificationFailed { .. } | Error::Io(_) => EXIT_RUNTIME,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

fn arg_error(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::invalid(format!("--{flag}: {msg}"))
}

fn open_unit(flag: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(arg_error(flag, format!("{x} must lie in (0, 1)")))
    }
}

fn channel(a: &ChannelArgs) -> Result<ChannelMatrix> {
    ChannelMatrix::new(a.s11, a.s01).map_err(|e| arg_error("s11/--s01", e))
}

fn design(a: &DesignArgs) -> Result<DesignSpec> {
    DesignSpec::new(a.n, a.m, a.gamma, a.family, a.multi).map_err(|e| arg_error("gamma", e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundsOutput {
    n: usize,
    p: f64,
    epsilon: f64,
    delta: f64,
    s11: f64,
    s01: f64,
    l: f64,
    rhs: f64,
    m_min: u64,
    m_floor: u64,
    alpha_star: f64,
    n_alpha: f64,
    p_alpha: f64,
    fp_tail: f64,
    fn_tail: f64,
    m_pd: Option<f64>,
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<()> {
    if a.n == 0 {
        return Err(arg_error("n", "must be positive"));
    }
    let p = open_unit("p", a.p)?;
    let eps = open_unit("eps", a.eps)?;
    let delta = open_unit("delta", a.delta)?;
    let ch = channel(&a.channel)?;
    let r = required_queries(a.n, p, eps, delta, &ch)?;
    let n = a.n as f64;
    let k = n * p;
    let m_pd = (k >= 2.0).then(|| 2.0 * n * entropy(p) * (1.0 / p).ln() / k.ln());
    let out = BoundsOutput {
        n: a.n,
        p,
        epsilon: eps,
        delta,
        s11: ch.s11(),
        s01: ch.s01(),
        l: r.l,
        rhs: r.rhs,
        m_min: r.m_min,
        m_floor: r.m_floor,
        alpha_star: r.alpha_star,
        n_alpha: r.n_alpha,
        p_alpha: r.p_alpha,
        fp_tail: r.fp_tail,
        fn_tail: r.fn_tail,
        m_pd,
    };
    let text = if a.json {
        to_json(&out)? + "\n"
    } else {
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        line("n", out.n.to_string());
        line("p", out.p.to_string());
        line("epsilon", out.epsilon.to_string());
        line("delta", out.delta.to_string());
        line("s11", out.s11.to_string());
        line("s01", out.s01.to_string());
        line("L", out.l.to_string());
        line("rhs", out.rhs.to_string());
        line("m_min", out.m_min.to_string());
        line("m_floor", out.m_floor.to_string());
        line("alpha_star", out.alpha_star.to_string());
        line("N_alpha", out.n_alpha.to_string());
        line("P_alpha", out.p_alpha.to_string());
        line("fp_tail", out.fp_tail.to_string());
        line("fn_tail", out.fn_tail.to_string());
        line("m_PD", out.m_pd.map_or_else(|| "n/a (np < 2)".to_string(), |v| v.to_string()));
        s
    };
    emit(None, &text)
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let spec = design(&a.design)?;
    let graph = generate(&spec, &mut substream(a.seed, &[]))?;
    emit(a.output.as_deref(), &to_edge_list(&graph))
}

#[derive(Serialize)]
struct ScoreDump<'a> {
    psi: &'a [u64],
    center: &'a [f64],
    threshold: &'a [f64],
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    manifest: RunManifest,
    result: &'a crate::experiment::TrialResult,
    report: Option<&'a crate::model::RecoveryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decisions: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<ScoreDump<'a>>,
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let spec = design(&a.design)?;
    let prior = match (a.k, a.p) {
        (Some(k), None) => Prior::Fixed(k),
        (None, Some(p)) => Prior::Bernoulli(p),
        _ => return Err(arg_error("k", "give exactly one of --k or --p")),
    };
    prior.validate(spec.n).map_err(|e| arg_error(if a.k.is_some() { "k" } else { "p" }, e))?;
    if let Some(pt) = a.p_threshold {
        open_unit("p-threshold", pt)?;
    }
    if !(a.eps > 0.0) {
        return Err(arg_error("eps", "must be positive"));
    }
    let config = TrialConfig {
        design: spec,
        prior,
        channel: channel(&a.channel)?,
        p_for_threshold: a.p_threshold,
        epsilon: a.eps,
        base_seed: a.seed,
    };
    let p = config.threshold_p();
    open_unit("p-threshold", p)?;
    if let Some(w) = admissibility_warning(&spec, p) {
        eprintln!("warning: {w}");
    }
    let record = run_trial_detailed(&config, spec.m, a.trial)?;
    let out = SimulateOutput {
        manifest: RunManifest::new("simulate", a.seed, a)?,
        result: &record.result,
        report: record.report.as_ref(),
        decisions: if a.decisions {
            record.estimate.as_ref().map(|e| e.iter().map(|&b| b as u8).collect())
        } else {
            None
        },
        scores: if a.dump_scores {
            record.scores.as_ref().map(|s| ScoreDump {
                psi: &s.psi,
                center: &s.center,
                threshold: &s.threshold,
            })
        } else {
            None
        },
    };
    emit(a.output.as_deref(), &(to_json(&out)? + "\n"))
}

/// Path of the manifest written next to a sweep's CSV.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Error::invalid(format!("--config {}: {e}", a.config.display())))?;
    let cfg = SweepConfig::from_toml(&text)?;
    let trial = cfg.trial_config()?;
    let families = cfg.family_list()?;
    let workers = match a.workers {
        Some(0) => return Err(arg_error("workers", "must be positive")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    for &(f, multi) in &families {
        let spec = trial.with_family(f, multi).design;
        for &m in &cfg.m {
            if let Some(w) = admissibility_warning(&DesignSpec { m, ..spec }, trial.threshold_p()) {
                eprintln!("warning: {f}{}: {w}", if multi { ":multi" } else { "" });
                break;
            }
        }
    }
    let rows = run_sweep_with_workers(&trial, &cfg.m, &families, cfg.trials, workers)?;
    let csv = write_csv(&cfg, &rows)?;
    let manifest = to_json(&RunManifest::new("sweep", cfg.seed, &cfg)?)? + "\n";
    fs::write(&a.output, csv)?;
    fs::write(manifest_path(&a.output), manifest)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(format!("cannot serialise output: {e}")))
}
