//! Command-line front end for `mutsel`: equilibria, figure data, raw
//! simulation output and the verification suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod svg;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mutsel::analytics::g_at_equilibrium;
use mutsel::ctmc::{
    sample_d_final, sample_l_outcomes, sample_r_final, simulate_d, simulate_l, simulate_r, CtmcPath, Outcome,
    DEFAULT_CAP,
};
use mutsel::harness::{format_sig, run_suite, CheckReport, SuiteConfig, CSV_HEADER};
use mutsel::montecarlo::replicate_rng;
use mutsel::pdmp::{sample_pdmp, simulate_pdmp, Boundary, PdmpOutcome, PdmpPath};
use mutsel::{classify_l_regime, classify_r_absorption, equilibria, ModelParams, DEFAULT_SEED};

pub const FIG2_HEADER: &str = "u_over_s,y_bar,y_star";
pub const FIG5_HEADER: &str = "u_over_s,g_eq";
pub const SIMULATE_HEADER: &str = "replicate,terminal,time,final_state";
pub const EVENTS_HEADER: &str = "replicate,time,state,kind";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] mutsel::Error),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code: 2 for unusable configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(mutsel::Error::Config(_)) | CliError::ReadConfig { .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "mutsel", version, about = "Mutation-selection dynamics and their ancestral processes")]
pub struct Cli {
    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the equilibria and regime classification.
    Equilibria(ParamArgs),
    /// Equilibria as functions of u/s.
    Fig2(FigureArgs),
    /// Probability of an unfit ancestral type at equilibrium as a function of u/s.
    Fig5(FigureArgs),
    /// Simulate one of the processes and print per-replicate outcomes.
    Simulate(SimulateArgs),
    /// Run the verification suite and print one report line per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub u: f64,
    #[arg(long)]
    pub nu0: f64,
}

impl ParamArgs {
    pub fn params(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(self.s, self.u, self.nu0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub nu0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub umin: f64,
    #[arg(long, default_value_t = 1.4)]
    pub umax: f64,
    #[arg(long, default_value_t = 140)]
    pub steps: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessKind {
    R,
    L,
    D,
    Pdmp,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub process: ProcessKind,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Initial line count for r, l and d.
    #[arg(long, default_value_t = 1)]
    pub n0: u64,
    /// Initial state for pdmp.
    #[arg(long, default_value_t = 0.5)]
    pub y0: f64,
    /// Time horizon.
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// State cap for r and d.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Print every transition instead of one outcome per replicate.
    #[arg(long)]
    pub events: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// TOML suite configuration; the built-in grid is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn cmd_equilibria(p: &ModelParams) -> String {
    let eq = equilibria(p);
    let y_star = eq.y_star.map_or_else(|| "none".to_string(), format_sig);
    format!(
        "y_bar={}\ny_star={y_star}\nL={}\nR={}\n",
        format_sig(eq.y_bar),
        classify_l_regime(p),
        classify_r_absorption(p)
    )
}

/// Values of `u` from `umin` to `umax` in `steps` equal steps. Points with
/// `u <= 0` are dropped since the model needs a positive mutation rate.
fn u_grid(args: &FigureArgs) -> CliResult<Vec<f64>> {
    if !(args.s > 0.0) {
        return Err(CliError::Usage("figures need s > 0".into()));
    }
    if args.steps == 0 || !(args.umax >= args.umin) {
        return Err(CliError::Usage("need steps >= 1 and umax >= umin".into()));
    }
    Ok((0..=args.steps)
        .map(|i| args.umin + (args.umax - args.umin) * f64::from(i) / f64::from(args.steps))
        .filter(|&u| u > 0.0)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row {
    pub u_over_s: f64,
    pub y_bar: f64,
    pub y_star: f64,
}

pub fn fig2_rows(args: &FigureArgs) -> CliResult<Vec<Fig2Row>> {
    u_grid(args)?
        .into_iter()
        .map(|u| {
            let eq = equilibria(&ModelParams::new(args.s, u, args.nu0)?);
            Ok(Fig2Row {
                u_over_s: u / args.s,
                y_bar: eq.y_bar,
                y_star: eq.y_star.expect("s > 0 has an unstable root"),
            })
        })
        .collect()
}

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = format!("{FIG2_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", format_sig(r.u_over_s), format_sig(r.y_bar), format_sig(r.y_star));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig5Row {
    pub u_over_s: f64,
    pub g_eq: f64,
}

pub fn fig5_rows(args: &FigureArgs) -> CliResult<Vec<Fig5Row>> {
    u_grid(args)?
        .into_iter()
        .map(|u| {
            let p = ModelParams::new(args.s, u, args.nu0)?;
            Ok(Fig5Row { u_over_s: u / args.s, g_eq: g_at_equilibrium(&p) })
        })
        .collect()
}

pub fn fig5_csv(rows: &[Fig5Row]) -> String {
    let mut out = format!("{FIG5_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", format_sig(r.u_over_s), format_sig(r.g_eq));
    }
    out
}

fn outcome_row(out: &mut String, i: u64, o: &Outcome) {
    let _ = writeln!(out, "{i},{},{},{}", o.terminal, format_sig(o.time), o.state);
}

fn pdmp_row(out: &mut String, i: u64, path: &PdmpPath) {
    let (name, time, state) = match path.terminal {
        PdmpOutcome::AbsorbedZero(t) => ("AbsorbedZero", t, 0.0),
        PdmpOutcome::AbsorbedOne(t) => ("AbsorbedOne", t, 1.0),
        PdmpOutcome::RunningAtHorizon(y) => ("RunningAtHorizon", path.horizon, y),
    };
    let _ = writeln!(out, "{i},{name},{},{}", format_sig(time), format_sig(state));
}

fn event_rows(out: &mut String, i: u64, path: &CtmcPath) {
    for e in &path.events {
        let _ = writeln!(out, "{i},{},{},{:?}", format_sig(e.time), e.state, e.kind);
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let p = args.params.params()?;
    if args.reps == 0 {
        return Err(CliError::Usage("need at least one replicate".into()));
    }
    if args.events {
        return simulate_events(args, &p);
    }
    let mut out = format!("{SIMULATE_HEADER}\n");
    match args.process {
        ProcessKind::R => {
            for (i, o) in sample_r_final(&p, args.n0, args.t, args.cap, args.reps, args.seed)?.iter().enumerate() {
                outcome_row(&mut out, i as u64, o);
            }
        }
        ProcessKind::L => {
            for (i, o) in sample_l_outcomes(&p, args.n0, args.t, args.reps, args.seed)?.iter().enumerate() {
                outcome_row(&mut out, i as u64, o);
            }
        }
        ProcessKind::D => {
            for (i, o) in sample_d_final(&p, args.n0, args.t, args.cap, args.reps, args.seed)?.iter().enumerate() {
                outcome_row(&mut out, i as u64, o);
            }
        }
        ProcessKind::Pdmp => {
            for (i, path) in sample_pdmp(&p, args.y0, args.t, args.reps, args.seed)?.iter().enumerate() {
                pdmp_row(&mut out, i as u64, path);
            }
        }
    }
    Ok(out)
}

fn simulate_events(args: &SimulateArgs, p: &ModelParams) -> CliResult<String> {
    let mut out = format!("{EVENTS_HEADER}\n");
    for i in 0..args.reps {
        let mut rng = replicate_rng(args.seed, i);
        match args.process {
            ProcessKind::R => event_rows(&mut out, i, &simulate_r(p, args.n0, args.t, args.cap, &mut rng)?),
            ProcessKind::L => event_rows(&mut out, i, &simulate_l(p, args.n0, args.t, &mut rng)?),
            ProcessKind::D => event_rows(&mut out, i, &simulate_d(p, args.n0, args.t, args.cap, &mut rng)?),
            ProcessKind::Pdmp => {
                let path = simulate_pdmp(p, args.y0, args.t, &mut rng)?;
                for &(t, target) in &path.jumps {
                    let state = if target == Boundary::One { 1 } else { 0 };
                    let _ = writeln!(out, "{i},{},{state},Jump", format_sig(t));
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of `verify`: the report text and whether any check failed.
pub struct Verification {
    pub reports: Vec<CheckReport>,
    pub csv: String,
}

impl Verification {
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().any(CheckReport::failed) {
            1
        } else {
            0
        }
    }
}

pub fn load_config(args: &VerifyArgs) -> CliResult<SuiteConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.clone(), source })?;
            SuiteConfig::from_toml(&text)?
        }
        None => SuiteConfig::default_grid(),
    };
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    Ok(config)
}

pub fn cmd_verify(config: &SuiteConfig) -> CliResult<Verification> {
    let reports = run_suite(config)?;
    let mut csv = format!("{CSV_HEADER}\n");
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    Ok(Verification { reports, csv })
}

/// Runs a parsed command, writing its output, and returns the exit code.
pub fn run(cli: &Cli) -> CliResult<i32> {
    let (text, code) = match &cli.command {
        Command::Equilibria(args) => (cmd_equilibria(&args.params()?), 0),
        Command::Fig2(args) => {
            let rows = fig2_rows(args)?;
            let text = match args.format {
                Format::Csv => fig2_csv(&rows),
                Format::Svg => svg::fig2_svg(&rows, args.nu0),
            };
            (text, 0)
        }
        Command::Fig5(args) => {
            let rows = fig5_rows(args)?;
            let text = match args.format {
                Format::Csv => fig5_csv(&rows),
                Format::Svg => svg::fig5_svg(&rows, args.nu0),
            };
            (text, 0)
        }
        Command::Simulate(args) => (cmd_simulate(args)?, 0),
        Command::Verify(args) => {
            let v = cmd_verify(&load_config(args)?)?;
            let code = v.exit_code();
            (v.csv, code)
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}
