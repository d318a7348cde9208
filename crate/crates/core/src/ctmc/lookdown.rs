//! Line-counting process `L` of the pruned lookdown ASG.
//!
//! Events are generated per level: each of the `n` levels carries branching
//! (rate `s`), deleterious mutations (rate `u nu1`) and beneficial mutations
//! (rate `u nu0`). A branching adds a line; a deleterious mutation removes
//! its line unless it sits at the top; a beneficial mutation at level `i`
//! prunes every line above `i`. Events that leave the count unchanged are
//! not recorded.

use rand::Rng;
use rand_distr::Exp1;

use super::{estimate_mean, pow, CtmcPath, EventKind, ExtendedCount, Outcome, Process, Recorder, Terminal};
use crate::error::{Error, Result};
use crate::model::{classify_l_regime, LRegime, ModelParams};
use crate::montecarlo::{replicate_rng, run_replicates, MonteCarloEstimate};

/// Number of batches for batch-means standard errors of stationary samples.
const BATCHES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LevelEvent {
    Branch,
    Deleterious,
    Beneficial,
}

#[inline]
fn draw_event<R: Rng + ?Sized>(p: &ModelParams, n: u64, rng: &mut R) -> (u64, LevelEvent) {
    let level = rng.random_range(1..=n);
    let x = rng.random::<f64>() * (p.s() + p.u());
    let kind = if x < p.s() {
        LevelEvent::Branch
    } else if x < p.s() + p.deleterious_rate() {
        LevelEvent::Deleterious
    } else {
        LevelEvent::Beneficial
    };
    (level, kind)
}

/// New count after `event` hits `level` in a graph with `n` lines, or
/// `None` when the count is unchanged.
#[inline]
fn apply(n: u64, level: u64, event: LevelEvent) -> Option<(u64, EventKind)> {
    match event {
        LevelEvent::Branch => Some((n + 1, EventKind::Branch)),
        LevelEvent::Deleterious if level < n => Some((n - 1, EventKind::DeleteriousPrune)),
        LevelEvent::Beneficial if level < n => Some((level, EventKind::BeneficialKillOrCut)),
        _ => None,
    }
}

pub(crate) fn run_l<R: Rng + ?Sized, Rec: Recorder>(
    p: &ModelParams,
    n0: u64,
    horizon: f64,
    rng: &mut R,
    rec: &mut Rec,
) -> Outcome {
    let rate_per_line = p.s() + p.u();
    let mut n = n0;
    let mut t = 0.0;
    loop {
        if n == 1 && p.s() == 0.0 {
            return Outcome { terminal: Terminal::AbsorbedOne, time: t, state: ExtendedCount::Count(1) };
        }
        let dt = rng.sample::<f64, _>(Exp1) / (n as f64 * rate_per_line);
        if t + dt > horizon {
            return Outcome { terminal: Terminal::HorizonReached, time: horizon, state: ExtendedCount::Count(n) };
        }
        t += dt;
        let (level, event) = draw_event(p, n, rng);
        if let Some((next, kind)) = apply(n, level, event) {
            n = next;
            rec.record(t, ExtendedCount::Count(n), kind);
        }
    }
}

fn check_l_args(n0: u64, horizon: f64) -> Result<()> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("L starts from at least one line".into()));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("L needs a finite horizon, got {horizon}")));
    }
    Ok(())
}

/// Simulates one path of `L` from `n0 >= 1` lines up to `horizon`.
pub fn simulate_l<R: Rng + ?Sized>(p: &ModelParams, n0: u64, horizon: f64, rng: &mut R) -> Result<CtmcPath> {
    check_l_args(n0, horizon)?;
    let mut events = Vec::new();
    let out = run_l(p, n0, horizon, rng, &mut events);
    Ok(CtmcPath::from_outcome(Process::L, *p, ExtendedCount::Count(n0), events, out))
}

/// Outcomes of `reps` independent runs up to `t`, in replicate order.
pub fn sample_l_outcomes(p: &ModelParams, n0: u64, t: f64, reps: u64, seed: u64) -> Result<Vec<Outcome>> {
    check_l_args(n0, t)?;
    Ok(run_replicates(seed, reps, |_, rng| run_l(p, n0, t, rng, &mut ())))
}

/// States `L_t` of `reps` independent runs, in replicate order.
pub fn sample_l_final(p: &ModelParams, n0: u64, t: f64, reps: u64, seed: u64) -> Result<Vec<u64>> {
    check_l_args(n0, t)?;
    Ok(run_replicates(seed, reps, |_, rng| run_l(p, n0, t, rng, &mut ()).state.count().expect("L never enters Δ")))
}

/// Monte Carlo mean of `y0^{L_t}` given `L_0 = n0`.
pub fn estimate_l_functional(
    p: &ModelParams,
    y0: f64,
    n0: u64,
    t: f64,
    reps: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidArgument(format!("y0={y0} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(MonteCarloEstimate::exact(pow(y0, n0), reps, seed));
    }
    let finals = sample_l_final(p, n0, t, reps, seed)?;
    Ok(estimate_mean(&finals, seed, |&n| pow(y0, n)))
}

/// Coupled pLD-ASG line counts for two beneficial-mutation probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPaths {
    /// Path for the smaller `nu0`; dominates `high`.
    pub low: CtmcPath,
    /// Path for the larger `nu0`.
    pub high: CtmcPath,
}

/// Simulates `(L, L̄)` for `nu0 <= nu0_bar` from one line each, such that
/// `L̄ <= L` at all times.
///
/// Events are generated on the levels of `L`. Those at levels `<= L̄` act on
/// both graphs, except that a deleterious mutation is passed to `L̄` as a
/// deleterious one with probability `nu1_bar / nu1` and as a beneficial one
/// otherwise. Events above `L̄` act on `L` only.
pub fn simulate_coupled_l<R: Rng + ?Sized>(
    p_low: &ModelParams,
    p_high: &ModelParams,
    horizon: f64,
    rng: &mut R,
) -> Result<CoupledPaths> {
    if p_low.s() != p_high.s() || p_low.u() != p_high.u() {
        return Err(Error::InvalidArgument("coupled processes must share s and u".into()));
    }
    if p_low.nu0() > p_high.nu0() {
        return Err(Error::InvalidArgument("coupling needs nu0(low) <= nu0(high)".into()));
    }
    check_l_args(1, horizon)?;
    // nu1(low) > 0 whenever nu0(low) < nu0(high) <= 1
    let keep_deleterious = if p_low.nu1() > 0.0 { p_high.nu1() / p_low.nu1() } else { 1.0 };
    let rate_per_line = p_low.s() + p_low.u();

    let mut low_events = Vec::new();
    let mut high_events = Vec::new();
    let (mut n, mut m) = (1u64, 1u64);
    let mut t = 0.0;
    loop {
        if n == 1 && p_low.s() == 0.0 {
            break;
        }
        let dt = rng.sample::<f64, _>(Exp1) / (n as f64 * rate_per_line);
        if t + dt > horizon {
            break;
        }
        t += dt;
        let (level, event) = draw_event(p_low, n, rng);
        if let Some((next, kind)) = apply(n, level, event) {
            n = next;
            low_events.push(crate::ctmc::PathEvent { time: t, state: ExtendedCount::Count(n), kind });
        }
        if level <= m {
            let shared = match event {
                LevelEvent::Deleterious if rng.random::<f64>() >= keep_deleterious => LevelEvent::Beneficial,
                other => other,
            };
            if let Some((next, kind)) = apply(m, level, shared) {
                m = next;
                high_events.push(crate::ctmc::PathEvent { time: t, state: ExtendedCount::Count(m), kind });
            }
        }
        if m > n {
            return Err(Error::CouplingViolation { time: t, low: n, high: m });
        }
    }
    let finish = |state: u64| Outcome {
        terminal: if p_low.s() == 0.0 && state == 1 { Terminal::AbsorbedOne } else { Terminal::HorizonReached },
        time: if p_low.s() == 0.0 && state == 1 { t } else { horizon },
        state: ExtendedCount::Count(state),
    };
    Ok(CoupledPaths {
        low: CtmcPath::from_outcome(Process::L, *p_low, ExtendedCount::Count(1), low_events, finish(n)),
        high: CtmcPath::from_outcome(Process::L, *p_high, ExtendedCount::Count(1), high_events, finish(m)),
    })
}

/// States of one long `L` path sampled at `burn_in + k * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySample {
    pub samples: Vec<u64>,
    pub seed: u64,
}

impl StationarySample {
    /// Empirical `P(L > n)` with a batch-means standard error.
    pub fn tail_estimate(&self, n: u64) -> MonteCarloEstimate {
        let indicator: Vec<f64> = self.samples.iter().map(|&l| if l > n { 1.0 } else { 0.0 }).collect();
        self.batch_means(&indicator)
    }

    fn batch_means(&self, values: &[f64]) -> MonteCarloEstimate {
        let total = values.len();
        let mean = values.iter().sum::<f64>() / total as f64;
        let batches = BATCHES.min(total);
        let size = total / batches;
        let std_error = if batches > 1 && size > 0 {
            let means: Vec<f64> =
                values.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
            let grand = means.iter().sum::<f64>() / batches as f64;
            let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (batches - 1) as f64;
            (var / batches as f64).sqrt()
        } else {
            0.0
        };
        MonteCarloEstimate { mean, std_error, n_samples: total as u64, seed: self.seed }
    }

    /// Empirical probabilities of `{1, ..., n_max - 1}` with the tail
    /// `{n >= n_max}` lumped into the last entry.
    pub fn lumped_pmf(&self, n_max: u64) -> Vec<f64> {
        let mut counts = vec![0u64; n_max as usize];
        for &l in &self.samples {
            let idx = (l.min(n_max) - 1) as usize;
            counts[idx] += 1;
        }
        let total = self.samples.len() as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }
}

/// Samples the stationary law of `L` from one long path started at one line.
///
/// Consecutive samples are `spacing` apart; the first is taken at `burn_in`.
pub fn sample_l_stationary(
    p: &ModelParams,
    burn_in: f64,
    n_samples: u64,
    spacing: f64,
    seed: u64,
) -> Result<StationarySample> {
    let regime = classify_l_regime(p);
    if regime != LRegime::PositiveRecurrent {
        return Err(Error::WrongRegime(format!("L is {regime}, not positive recurrent")));
    }
    if !(spacing > 0.0) || !(burn_in >= 0.0) || n_samples == 0 {
        return Err(Error::InvalidArgument("need spacing > 0, burn_in >= 0, n_samples >= 1".into()));
    }
    let mut rng = replicate_rng(seed, 0);
    let state = |o: Outcome| o.state.count().expect("L never enters Δ");
    // exponential clocks are memoryless, so restarting them at each sampling
    // time leaves the law of the path unchanged
    let mut n = state(run_l(p, 1, burn_in, &mut rng, &mut ()));
    let mut samples = Vec::with_capacity(n_samples as usize);
    samples.push(n);
    for _ in 1..n_samples {
        n = state(run_l(p, n, spacing, &mut rng, &mut ()));
        samples.push(n);
    }
    Ok(StationarySample { samples, seed })
}

/// Default spacing between stationary samples, `10 / (s + u)`.
pub fn default_spacing(p: &ModelParams) -> f64 {
    10.0 / (p.s() + p.u())
}
