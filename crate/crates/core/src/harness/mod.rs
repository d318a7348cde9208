//! Seeded pass/fail checks of the duality identities and their corollaries.
//!
//! Every check returns a [`CheckReport`]. Monte Carlo checks pass when the
//! estimate lies within `z` standard errors of the target; for two-sided
//! comparisons the target is the second estimate and the standard error is
//! the combined one. Checks whose statement needs a regime are skipped
//! outside it.

mod suite;

pub use suite::{run_suite, ReplicateCounts, SuiteConfig, SUITE_SEED};

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::analytics::{geometric_p, tail_a};
use crate::ctmc::{
    default_spacing, estimate_l_functional, estimate_r_absorb_zero, pow, sample_d_final, sample_l_final,
    sample_l_stationary, sample_r_final, sample_r_functional, simulate_coupled_l, ExtendedCount, Terminal, DEFAULT_CAP,
};
use crate::error::{Error, Result};
use crate::flow::flow;
use crate::model::{classify_l_regime, equilibria, LRegime, ModelParams};
use crate::montecarlo::{derive_seed, run_replicates, MonteCarloEstimate};
use crate::pdmp::estimate_pdmp_moment;
use crate::stats::{empirical_total_variation, lumped_geometric, total_variation};

/// Default number of standard errors allowed by statistical checks.
pub const DEFAULT_Z: f64 = 3.0;
/// Largest total-variation distance accepted against the stationary law.
pub const STATIONARY_TV_TOL: f64 = 0.01;
/// Largest total-variation distance accepted between `D - 1` and the swapped `R`.
pub const SWAP_TV_TOL: f64 = 0.02;

/// Formats `x` with 12 significant digits, dropping trailing zeros.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-6..DIGITS).contains(&exponent) {
        return format!("{:.*e}", (DIGITS - 1) as usize, x);
    }
    let decimals = (DIGITS - 1 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Ordered key/value description of where a check was evaluated.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GridPoint(Vec<(String, String)>);

impl GridPoint {
    pub fn new() -> Self {
        GridPoint(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_params(self, p: &ModelParams) -> Self {
        self.with("s", format_sig(p.s())).with("u", format_sig(p.u())).with("nu0", format_sig(p.nu0()))
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.0
    }
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(';')?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Estimate {
    MonteCarlo(MonteCarloEstimate),
    Exact(f64),
}

impl Estimate {
    pub fn mean(&self) -> f64 {
        match self {
            Estimate::MonteCarlo(e) => e.mean,
            Estimate::Exact(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Passed,
    Failed,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Option<ModelParams>,
    pub grid_point: GridPoint,
    /// `None` for skipped checks.
    pub estimate: Option<Estimate>,
    pub target: f64,
    /// Standard error the tolerance is built from; zero for exact checks.
    pub se: f64,
    pub tolerance: f64,
    /// Observed `(mean - target) / se` for statistical checks.
    pub z: Option<f64>,
    pub status: CheckStatus,
    pub wall_time: Duration,
}

/// Header matching [`CheckReport::csv_row`].
pub const CSV_HEADER: &str = "name,grid,mean,se,target,z,passed";

impl CheckReport {
    fn base(name: &str, p: Option<&ModelParams>, grid_point: GridPoint) -> Self {
        CheckReport {
            name: name.to_string(),
            params: p.copied(),
            grid_point,
            estimate: None,
            target: f64::NAN,
            se: 0.0,
            tolerance: 0.0,
            z: None,
            status: CheckStatus::Failed,
            wall_time: Duration::ZERO,
        }
    }

    /// Passes iff `|estimate - target| <= z_max * se`.
    pub fn statistical(
        name: &str,
        p: Option<&ModelParams>,
        grid_point: GridPoint,
        estimate: Estimate,
        target: f64,
        se: f64,
        z_max: f64,
    ) -> Self {
        let diff = estimate.mean() - target;
        let tolerance = z_max * se;
        let z = if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        let passed = diff.abs() <= tolerance;
        CheckReport {
            estimate: Some(estimate),
            target,
            se,
            tolerance,
            z: Some(z),
            status: if passed { CheckStatus::Passed } else { CheckStatus::Failed },
            ..Self::base(name, p, grid_point)
        }
    }

    /// Passes iff `|value - target| <= tolerance`.
    pub fn deterministic(
        name: &str,
        p: Option<&ModelParams>,
        grid_point: GridPoint,
        value: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        let passed = (value - target).abs() <= tolerance;
        CheckReport {
            estimate: Some(Estimate::Exact(value)),
            target,
            tolerance,
            status: if passed { CheckStatus::Passed } else { CheckStatus::Failed },
            ..Self::base(name, p, grid_point)
        }
    }

    pub fn skipped(name: &str, p: Option<&ModelParams>, grid_point: GridPoint, reason: impl Into<String>) -> Self {
        CheckReport { status: CheckStatus::Skipped(reason.into()), ..Self::base(name, p, grid_point) }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Failed
    }

    /// One CSV record in the [`CSV_HEADER`] layout. Skipped checks leave the
    /// numeric fields empty.
    pub fn csv_row(&self) -> String {
        let status = match self.status {
            CheckStatus::Passed => "true",
            CheckStatus::Failed => "false",
            CheckStatus::Skipped(_) => "skipped",
        };
        let grid = format!("\"{}\"", self.grid_point);
        match &self.estimate {
            None => format!("{},{grid},,,,,{status}", self.name),
            Some(e) => format!(
                "{},{grid},{},{},{},{},{status}",
                self.name,
                format_sig(e.mean()),
                format_sig(self.se),
                format_sig(self.target),
                self.z.map(format_sig).unwrap_or_default(),
            ),
        }
    }
}

fn timed(f: impl FnOnce() -> Result<CheckReport>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut report = f()?;
    report.wall_time = start.elapsed();
    Ok(report)
}

fn mean_of(values: &[f64], seed: u64) -> MonteCarloEstimate {
    MonteCarloEstimate::from_samples(values, seed)
}

fn two_sided(
    name: &str,
    p: &ModelParams,
    grid: GridPoint,
    a: MonteCarloEstimate,
    b: MonteCarloEstimate,
) -> CheckReport {
    let se = a.combined_se(&b);
    let target = b.mean;
    CheckReport::statistical(name, Some(p), grid, Estimate::MonteCarlo(a), target, se, DEFAULT_Z)
}

/// Cap beyond which a chain drifting upwards with up/down rate ratio
/// `ratio > 1` returns below its start with probability under `1e-12`.
fn escape_cap(start: u64, ratio: f64) -> u64 {
    if ratio > 1.0 {
        start + 1 + (12.0 * std::f64::consts::LN_10 / ratio.ln()).ceil() as u64
    } else {
        DEFAULT_CAP
    }
}

/// `E[y0^{R_t} | R_0 = n]` against `y(t; y0)^n`.
pub fn check_moment_duality_r(p: &ModelParams, y0: f64, n: u64, t: f64, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let est = sample_r_functional(p, y0, n, t, reps, DEFAULT_CAP, seed)?;
        let target = pow(flow(p, y0, t), n);
        let grid = GridPoint::new().with_params(p).with("y0", format_sig(y0)).with("n", n).with("t", format_sig(t));
        let se = est.std_error;
        Ok(CheckReport::statistical(
            "moment_duality_r",
            Some(p),
            grid,
            Estimate::MonteCarlo(est),
            target,
            se,
            DEFAULT_Z,
        ))
    })
}

/// `E[y_bar^{R_r} | R_0 = n]` against `y_bar^n` at each time in `times`.
pub fn check_martingale(p: &ModelParams, n: u64, times: &[f64], reps: u64, seed: u64) -> Result<Vec<CheckReport>> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("martingale check needs at least one time".into()));
    }
    let y_bar = equilibria(p).y_bar;
    let target = pow(y_bar, n);
    times
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            timed(|| {
                let est = sample_r_functional(p, y_bar, n, r, reps, DEFAULT_CAP, derive_seed(seed, i as u64))?;
                let grid = GridPoint::new().with_params(p).with("n", n).with("r", format_sig(r));
                let se = est.std_error;
                Ok(CheckReport::statistical(
                    "martingale",
                    Some(p),
                    grid,
                    Estimate::MonteCarlo(est),
                    target,
                    se,
                    DEFAULT_Z,
                ))
            })
        })
        .collect()
}

/// `P(m <= L_t | L_0 = n)` against `P(D_t <= n | D_0 = m)`, each side from
/// its own simulator.
pub fn check_siegmund(p: &ModelParams, n: u64, m: u64, t: f64, reps: u64, seed: u64) -> Result<CheckReport> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("Siegmund check needs n, m >= 1".into()));
    }
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("n", n).with("m", m).with("t", format_sig(t));
        if t == 0.0 {
            let v = if m <= n { 1.0 } else { 0.0 };
            return Ok(CheckReport::deterministic("siegmund", Some(p), grid, v, v, 0.0));
        }
        let l_side: Vec<f64> = sample_l_final(p, n, t, reps, derive_seed(seed, 1))?
            .into_iter()
            .map(|l| if m <= l { 1.0 } else { 0.0 })
            .collect();
        let d_side: Vec<f64> = sample_d_final(p, m, t, DEFAULT_CAP, reps, derive_seed(seed, 2))?
            .into_iter()
            .map(|o| if o.state <= ExtendedCount::Count(n) { 1.0 } else { 0.0 })
            .collect();
        Ok(two_sided(
            "siegmund",
            p,
            grid,
            mean_of(&l_side, derive_seed(seed, 1)),
            mean_of(&d_side, derive_seed(seed, 2)),
        ))
    })
}

fn regime_gate(name: &str, p: &ModelParams, grid: GridPoint) -> Option<CheckReport> {
    let regime = classify_l_regime(p);
    (regime != LRegime::PositiveRecurrent)
        .then(|| CheckReport::skipped(name, Some(p), grid, format!("WrongRegime: L is {regime}")))
}

/// Probability that `D` from `n + 1` is absorbed at 1, against the tail
/// coefficient `a_n`.
pub fn check_l_d_tail_absorption(p: &ModelParams, n: u64, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("n", n);
        if let Some(skip) = regime_gate("l_d_tail_absorption", p, grid.clone()) {
            return Ok(skip);
        }
        let cap = escape_cap(n + 1, p.deleterious_rate() / p.s());
        let hits: Vec<f64> = sample_d_final(p, n + 1, f64::INFINITY, cap, reps, seed)?
            .into_iter()
            .map(|o| if o.terminal == Terminal::AbsorbedOne { 1.0 } else { 0.0 })
            .collect();
        let est = mean_of(&hits, seed);
        let se = est.std_error;
        Ok(CheckReport::statistical(
            "l_d_tail_absorption",
            Some(p),
            grid,
            Estimate::MonteCarlo(est),
            tail_a(p, n),
            se,
            DEFAULT_Z,
        ))
    })
}

/// Number of cells used for the stationary total-variation comparison:
/// states `1..n_tv` plus the lumped tail, sized so the tail mass is about 1%.
pub fn stationary_cells(p_geom: f64) -> u64 {
    if p_geom <= 0.0 {
        return 2;
    }
    ((0.01f64.ln() / p_geom.ln()).ceil() as u64 + 1).max(2)
}

/// Total-variation distance between the empirical stationary law of `L` and
/// `Geom(1 - p)`, tail lumped.
pub fn check_stationary_geometric(p: &ModelParams, n_samples: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("samples", n_samples);
        if let Some(skip) = regime_gate("stationary_geometric", p, grid.clone()) {
            return Ok(skip);
        }
        let p_geom = geometric_p(p)?;
        let cells = stationary_cells(p_geom);
        let spacing = default_spacing(p);
        let sample = sample_l_stationary(p, 20.0 * spacing, n_samples, spacing, seed)?;
        let tv = total_variation(&sample.lumped_pmf(cells), &lumped_geometric(p_geom, cells));
        Ok(CheckReport::deterministic(
            "stationary_geometric",
            Some(p),
            grid.with("cells", cells),
            tv,
            0.0,
            STATIONARY_TV_TOL,
        ))
    })
}

/// `E[Ỹ_t^n | Ỹ_0 = y0]` against `E[y0^{L_t} | L_0 = n]`.
pub fn check_pdmp_duality(p: &ModelParams, y0: f64, n: u64, t: f64, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("y0", format_sig(y0)).with("n", n).with("t", format_sig(t));
        let pdmp = estimate_pdmp_moment(p, y0, n, t, reps, derive_seed(seed, 1))?;
        let lines = estimate_l_functional(p, y0, n, t, reps, derive_seed(seed, 2))?;
        Ok(two_sided("pdmp_duality", p, grid, pdmp, lines))
    })
}

/// Runs `paths` coupled pairs `(L, L̄)` for `nu0(low) <= nu0(high)` up to
/// `horizon`. Passes iff no pair ever has `L̄ > L` and the means of
/// `y0^{L_horizon}` are ordered for `y0` in `{0.25, 0.5, 0.75}`.
///
/// The reported value is the number of violating pairs plus the number of
/// misordered means.
pub fn check_monotone_coupling(
    p_low: &ModelParams,
    p_high: &ModelParams,
    horizon: f64,
    paths: u64,
    seed: u64,
) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new()
            .with_params(p_low)
            .with("nu0_high", format_sig(p_high.nu0()))
            .with("horizon", format_sig(horizon))
            .with("paths", paths);
        let runs = run_replicates(seed, paths, |_, rng| match simulate_coupled_l(p_low, p_high, horizon, rng) {
            Ok(pair) => Ok(Some((pair.low.final_state, pair.high.final_state))),
            Err(Error::CouplingViolation { .. }) => Ok(None),
            Err(e) => Err(e),
        });
        let mut finals = Vec::with_capacity(runs.len());
        let mut violations = 0u64;
        for run in runs {
            match run? {
                Some(pair) => finals.push(pair),
                None => violations += 1,
            }
        }
        let mut misordered = 0u64;
        for y0 in [0.25, 0.5, 0.75] {
            let low: Vec<f64> = finals.iter().map(|(l, _)| l.moment(y0)).collect();
            let high: Vec<f64> = finals.iter().map(|(_, h)| h.moment(y0)).collect();
            let (low, high) = (mean_of(&low, seed), mean_of(&high, seed));
            if low.mean > high.mean + DEFAULT_Z * low.combined_se(&high) {
                misordered += 1;
            }
        }
        Ok(CheckReport::deterministic(
            "monotone_coupling",
            Some(p_low),
            grid,
            (violations + misordered) as f64,
            0.0,
            0.0,
        ))
    })
}

/// Probability that `R` from one line is absorbed in 0, against `y_bar`.
pub fn check_r_absorption(p: &ModelParams, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("n0", 1);
        let cap = if p.nu0() == 0.0 { escape_cap(1, p.s() / p.u()) } else { DEFAULT_CAP };
        let est = estimate_r_absorb_zero(p, 1, reps, cap, f64::INFINITY, seed)?.estimate;
        let se = est.std_error;
        Ok(CheckReport::statistical(
            "r_absorption",
            Some(p),
            grid,
            Estimate::MonteCarlo(est),
            equilibria(p).y_bar,
            se,
            DEFAULT_Z,
        ))
    })
}

/// Total-variation distance between the laws of `D_t - 1` from `D_0 = 2`
/// and of the killed ASG with swapped rates from one line.
pub fn check_rate_swap(p: &ModelParams, t: f64, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let grid = GridPoint::new().with_params(p).with("t", format_sig(t));
        let swapped = match p.swapped() {
            Ok(q) => q,
            Err(e) => return Ok(CheckReport::skipped("rate_swap", Some(p), grid, e.to_string())),
        };
        let shifted: Vec<ExtendedCount> = sample_d_final(p, 2, t, DEFAULT_CAP, reps, derive_seed(seed, 1))?
            .into_iter()
            .map(|o| match o.state {
                ExtendedCount::Count(d) => ExtendedCount::Count(d - 1),
                ExtendedCount::Delta => ExtendedCount::Delta,
            })
            .collect();
        let killed: Vec<ExtendedCount> = sample_r_final(&swapped, 1, t, DEFAULT_CAP, reps, derive_seed(seed, 2))?
            .into_iter()
            .map(|o| o.state)
            .collect();
        let tv = empirical_total_variation(&shifted, &killed);
        Ok(CheckReport::deterministic("rate_swap", Some(p), grid, tv, 0.0, SWAP_TV_TOL))
    })
}

/// Times at which the null-recurrent trend is sampled.
pub const TREND_TIMES: [f64; 3] = [10.0, 40.0, 160.0];

/// In the null-recurrent regime, `P_1(L_r > 5)` must increase strictly over
/// [`TREND_TIMES`]. The reported value is the number of non-increasing steps.
pub fn check_null_recurrent_trend(p: &ModelParams, reps: u64, seed: u64) -> Result<CheckReport> {
    timed(|| {
        let mut grid = GridPoint::new().with_params(p).with("level", 5);
        let regime = classify_l_regime(p);
        if regime != LRegime::NullRecurrent {
            return Ok(CheckReport::skipped(
                "null_recurrent_trend",
                Some(p),
                grid,
                format!("WrongRegime: L is {regime}"),
            ));
        }
        let mut tails = Vec::with_capacity(TREND_TIMES.len());
        for (i, &r) in TREND_TIMES.iter().enumerate() {
            let finals = sample_l_final(p, 1, r, reps, derive_seed(seed, i as u64))?;
            let tail = finals.iter().filter(|&&l| l > 5).count() as f64 / reps as f64;
            grid = grid.with(&format!("tail_r{}", format_sig(r)), format_sig(tail));
            tails.push(tail);
        }
        let flat = tails.windows(2).filter(|w| w[1] <= w[0]).count();
        Ok(CheckReport::deterministic("null_recurrent_trend", Some(p), grid, flat as f64, 0.0, 0.0))
    })
}
