//! Line-counting process `R` of the killed ASG.
//!
//! From `k` lines: `k -> k + 1` at rate `k s`, `k -> k - 1` at rate
//! `k u nu1`, `k -> Δ` at rate `k u nu0`. Both 0 and `Δ` are absorbing.

use rand::Rng;
use rand_distr::Exp1;

use super::{estimate_mean, pow, CtmcPath, EventKind, ExtendedCount, Outcome, Process, Recorder, Terminal};
use crate::error::{Error, Result};
use crate::model::{classify_r_absorption, ModelParams, RAbsorption};
use crate::montecarlo::{run_replicates, AbsorptionEstimate, MonteCarloEstimate};

/// Largest tolerated share of replicates without a decided fate.
const MAX_INDETERMINATE_SHARE: f64 = 0.01;

pub(crate) fn run_r<R: Rng + ?Sized, Rec: Recorder>(
    p: &ModelParams,
    n0: u64,
    horizon: f64,
    cap: u64,
    rng: &mut R,
    rec: &mut Rec,
) -> Outcome {
    let rate_per_line = p.s() + p.u();
    let up = p.s();
    let down = up + p.deleterious_rate();
    let mut k = n0;
    let mut t = 0.0;
    loop {
        if k == 0 {
            return Outcome { terminal: Terminal::AbsorbedZero, time: t, state: ExtendedCount::Count(0) };
        }
        if k >= cap {
            return Outcome { terminal: Terminal::CapReached, time: t, state: ExtendedCount::Count(k) };
        }
        let dt = rng.sample::<f64, _>(Exp1) / (k as f64 * rate_per_line);
        if t + dt > horizon {
            return Outcome { terminal: Terminal::HorizonReached, time: horizon, state: ExtendedCount::Count(k) };
        }
        t += dt;
        let x = rng.random::<f64>() * rate_per_line;
        if x < up {
            k += 1;
            rec.record(t, ExtendedCount::Count(k), EventKind::Branch);
        } else if x < down {
            k -= 1;
            let kind = if k == 0 { EventKind::Absorb } else { EventKind::DeleteriousPrune };
            rec.record(t, ExtendedCount::Count(k), kind);
        } else {
            rec.record(t, ExtendedCount::Delta, EventKind::Absorb);
            return Outcome { terminal: Terminal::AbsorbedDelta, time: t, state: ExtendedCount::Delta };
        }
    }
}

fn check_cap(n0: u64, cap: u64, horizon: f64) -> Result<()> {
    if cap < n0 {
        return Err(Error::InvalidArgument(format!("cap {cap} below initial state {n0}")));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

/// Simulates one path of `R` from `n0` lines until absorption, the cap or
/// the horizon.
pub fn simulate_r<R: Rng + ?Sized>(p: &ModelParams, n0: u64, horizon: f64, cap: u64, rng: &mut R) -> Result<CtmcPath> {
    check_cap(n0, cap, horizon)?;
    let mut events = Vec::new();
    let out = run_r(p, n0, horizon, cap, rng, &mut events);
    Ok(CtmcPath::from_outcome(Process::R, *p, ExtendedCount::Count(n0), events, out))
}

/// Outcomes of `reps` independent runs of `R`, in replicate order.
pub fn sample_r_final(p: &ModelParams, n0: u64, horizon: f64, cap: u64, reps: u64, seed: u64) -> Result<Vec<Outcome>> {
    check_cap(n0, cap, horizon)?;
    Ok(run_replicates(seed, reps, |_, rng| run_r(p, n0, horizon, cap, rng, &mut ())))
}

/// Probability that `R` started from `n0` is eventually absorbed in 0.
///
/// Paths stopped at `cap` or `horizon` count as decided when the absorption
/// class makes their fate certain. Otherwise a path at the cap counts as
/// escaping to infinity when that is possible, and any other stopped path is
/// excluded and reported as indeterminate.
pub fn estimate_r_absorb_zero(
    p: &ModelParams,
    n0: u64,
    reps: u64,
    cap: u64,
    horizon: f64,
    seed: u64,
) -> Result<AbsorptionEstimate> {
    if reps < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 replicates, got {reps}")));
    }
    let class = classify_r_absorption(p);
    let outcomes = sample_r_final(p, n0, horizon, cap, reps, seed)?;
    let decided: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match o.terminal {
            Terminal::AbsorbedZero => Some(1.0),
            Terminal::AbsorbedDelta => Some(0.0),
            Terminal::CapReached | Terminal::HorizonReached => match class {
                RAbsorption::AlwaysDelta => Some(0.0),
                RAbsorption::AlwaysZero => Some(1.0),
                RAbsorption::ZeroWithProbLessOne if o.terminal == Terminal::CapReached => Some(0.0),
                _ => None,
            },
            Terminal::AbsorbedOne => unreachable!("R has no state-one absorption"),
        })
        .collect();
    let indeterminate = reps - decided.len() as u64;
    if indeterminate as f64 > MAX_INDETERMINATE_SHARE * reps as f64 || decided.is_empty() {
        return Err(Error::IndeterminateFraction { indeterminate, total: reps });
    }
    Ok(AbsorptionEstimate { estimate: MonteCarloEstimate::from_samples(&decided, seed), indeterminate })
}

/// Monte Carlo mean of `y0^{R_t}` given `R_0 = n0`, with `y0^Δ = 0`.
/// Paths stopped at the cap contribute `y0^cap`.
pub fn sample_r_functional(
    p: &ModelParams,
    y0: f64,
    n0: u64,
    t: f64,
    reps: u64,
    cap: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidArgument(format!("y0={y0} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(MonteCarloEstimate::exact(pow(y0, n0), reps, seed));
    }
    let outcomes = sample_r_final(p, n0, t, cap, reps, seed)?;
    Ok(estimate_mean(&outcomes, seed, |o| o.state.moment(y0)))
}
