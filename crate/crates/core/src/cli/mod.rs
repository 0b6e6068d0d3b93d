//! Command-line front end.
//!
//! ```text
//! dmqkd converge   --config sweep.json [--out DIR]
//! dmqkd covariance --config cov.json   [--out DIR]
//! dmqkd security   --config sec.json   [--out DIR]
//! dmqkd simulate   --config run.json   [--out DIR] [--seed N]
//! ```
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 numerical
//! or runtime failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::bipartite::covariance_sweep;
use crate::constellation::Constellation;
use crate::convergence::{self, convergence_sweep, ConvergenceReport};
use crate::protocol::{run_protocol, ProtocolRun, ProtocolTranscript};
use crate::security::{compose_budget, min_dim_for_eps};
use crate::Error;

use config::{ConstellationSource, ConvergeConfig, CovarianceConfig, SecurityConfig, SimulateConfig};
use output::{num, opt_num, render_csv, render_json, write_atomic, RunMeta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Convention label for the Bob-side variance printed with covariance rows.
pub const VB_CONVENTION: &str = "2*tau*mbar+1+tau*xi";
/// Channel model assumed by the Monte Carlo.
pub const CHANNEL_MODEL: &str = "gaussian-thermal-loss";

#[derive(Debug, Parser)]
#[command(name = "dmqkd", version, about = "Discrete-modulation CV-QKD numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constellation vs thermal state convergence sweep.
    Converge(Common),
    /// Purification and covariance-entry sweep.
    Covariance(Common),
    /// Energy-test security budget, printed as JSON.
    Security(Common),
    /// Prepare-and-measure Monte Carlo.
    Simulate(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the seed given in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(e) => write!(f, "numeric error [{}]: {e}", e.kind()),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, dispatches, reports errors on stderr and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dmqkd: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Converge(a) => cmd_converge(a),
        Command::Covariance(a) => cmd_covariance(a),
        Command::Security(a) => cmd_security(a).map(|json| print!("{json}")),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> CliResult<(T, Vec<u8>)> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((cfg, bytes))
}

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn convergence_header(branches: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "m",
        "mbar",
        "dim",
        "trace_dist",
        "tail_eps",
        "bound_6eps",
        "spectral_dist",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((0..branches).map(|k| format!("eig_gap_{k}")));
    h.extend((0..branches).map(|k| format!("proj_gap_{k}")));
    h.extend(
        ["spacing", "nu", "deficit", "bound_informative"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

fn convergence_row(r: &ConvergenceReport, branches: usize) -> Vec<String> {
    let mut row = vec![
        r.m.to_string(),
        num(r.mbar),
        r.dim.to_string(),
        num(r.trace_dist),
        num(r.tail_eps),
        num(r.bound_6eps),
        num(r.spectral_dist),
    ];
    row.extend((0..branches).map(|k| opt_num(r.eig_gap.get(k).copied())));
    row.extend((0..branches).map(|k| opt_num(r.proj_gap.get(k).copied().flatten())));
    row.push(opt_num(r.spacing));
    row.push(opt_num(r.nu));
    row.push(num(r.deficit));
    row.push(r.bound_informative.to_string());
    row
}

pub fn cmd_converge(a: &Common) -> CliResult<()> {
    let (cfg, bytes): (ConvergeConfig, _) = load(&a.config)?;
    cfg.validate().map_err(CliError::Config)?;
    let dim = cfg.dim();
    let branches = cfg.branches().min(dim);
    let rows = convergence_sweep(&cfg.orders, cfg.mbar, dim, branches, cfg.spacing)?;

    let meta = RunMeta::new(&bytes, a.seed).with("dim", dim);
    let header = convergence_header(branches);
    let body: Vec<Vec<String>> = rows.iter().map(|r| convergence_row(r, branches)).collect();
    prepare_out(&a.out)?;
    write_atomic(&a.out.join("converge.csv"), &render_csv(&meta, &header, &body)?)?;
    let json = serde_json::to_value(&rows).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&a.out.join("converge.json"), &render_json(&meta, "rows", json)?)?;
    Ok(())
}

pub fn cmd_covariance(a: &Common) -> CliResult<()> {
    let (cfg, bytes): (CovarianceConfig, _) = load(&a.config)?;
    cfg.validate().map_err(CliError::Config)?;
    let dim = cfg.dim();
    let ch = cfg.channel();
    let rows = covariance_sweep(&cfg.orders, cfg.mbar, dim, &ch, cfg.w, cfg.spacing)?;

    let meta = RunMeta::new(&bytes, a.seed)
        .with("dim", dim)
        .with("w", cfg.w)
        .with("vb_convention", VB_CONVENTION);
    let header: Vec<String> = [
        "m",
        "mbar",
        "tau",
        "xi",
        "w",
        "z_ch",
        "z_star",
        "cm_distance",
        "purification_trace_dist",
        "dim",
        "va",
        "vb",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|p| {
            vec![
                p.m.to_string(),
                num(p.mbar),
                num(p.tau),
                num(p.xi),
                num(p.w),
                num(p.z_ch),
                num(p.z_star),
                num(p.cm_distance),
                num(p.purification_trace_dist),
                p.dim.to_string(),
                num(p.covariance.va),
                num(p.covariance.vb),
            ]
        })
        .collect();
    prepare_out(&a.out)?;
    write_atomic(&a.out.join("covariance.csv"), &render_csv(&meta, &header, &body)?)?;
    let json = serde_json::to_value(&rows).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&a.out.join("covariance.json"), &render_json(&meta, "rows", json)?)?;
    Ok(())
}

/// Returns the budget JSON; the caller prints it.
pub fn cmd_security(a: &Common) -> CliResult<String> {
    let (cfg, _): (SecurityConfig, _) = load(&a.config)?;
    cfg.validate().map_err(CliError::Config)?;
    let dim = match (cfg.dim, cfg.eps_target) {
        (Some(d), _) => d,
        (None, Some(e)) => min_dim_for_eps(cfg.mbar, e)?,
        (None, None) => unreachable!("validated"),
    };
    let budget = compose_budget(cfg.eps_tilde, cfg.mbar, dim)?;
    let mut json = serde_json::to_string_pretty(&budget).map_err(|e| CliError::Io(e.to_string()))?;
    json.push('\n');
    Ok(json)
}

fn load_constellation(cfg: &SimulateConfig, config_path: &Path) -> CliResult<Constellation> {
    match &cfg.constellation {
        ConstellationSource::Shaped(s) => {
            let dim = s.dim.unwrap_or_else(|| config::default_dim(s.mbar, 1));
            Ok(convergence::build_qam(s.order, s.mbar, s.spacing, dim)?)
        }
        ConstellationSource::File(f) => {
            let path = config::resolve(config_path, &f.file);
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Constellation::from_json(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn per_round_csv(meta: &RunMeta, t: &ProtocolTranscript) -> std::io::Result<Vec<u8>> {
    let header: Vec<String> = [
        "x_re",
        "x_im",
        "y_re",
        "y_im",
        "test_flag",
        "decision_map",
        "decision_md",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let body: Vec<Vec<String>> = t
        .rounds
        .iter()
        .map(|r| {
            vec![
                num(r.x.re),
                num(r.x.im),
                num(r.y.re),
                num(r.y.im),
                (r.test as u8).to_string(),
                r.decision_map.to_string(),
                r.decision_md.to_string(),
            ]
        })
        .collect();
    render_csv(meta, &header, &body)
}

pub fn cmd_simulate(a: &Common) -> CliResult<()> {
    let (cfg, bytes): (SimulateConfig, _) = load(&a.config)?;
    cfg.validate().map_err(CliError::Config)?;
    let seed = a
        .seed
        .or(cfg.seed)
        .ok_or_else(|| CliError::Config("simulate needs a seed (config or --seed)".into()))?;
    let c = load_constellation(&cfg, &a.config)?;
    let run = ProtocolRun {
        channel: cfg.channel,
        rounds: cfg.rounds,
        test_fraction: cfg.test_fraction,
        seed,
        abort: cfg.abort,
    };
    let t = run_protocol(&run, &c)?;

    let meta = RunMeta::new(&bytes, Some(seed))
        .with("channel_model", CHANNEL_MODEL)
        .with("order", c.order());
    prepare_out(&a.out)?;
    let json = serde_json::to_value(&t.result).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&a.out.join("simulate.json"), &render_json(&meta, "result", json)?)?;
    if cfg.per_round_csv {
        write_atomic(&a.out.join("rounds.csv"), &per_round_csv(&meta, &t)?)?;
    }
    Ok(())
}
