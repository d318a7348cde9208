//! The Siegmund dual `D` of `L`.
//!
//! From `d`: `d -> d - 1` at rate `(d - 1) s`, `d -> d + 1` at rate
//! `(d - 1) u nu1`, `d -> Δ` at rate `(d - 1) u nu0`. State 1 and `Δ` are
//! absorbing.

use rand::Rng;
use rand_distr::Exp1;

use super::{CtmcPath, EventKind, ExtendedCount, Outcome, Process, Recorder, Terminal};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::montecarlo::run_replicates;

pub(crate) fn run_d<R: Rng + ?Sized, Rec: Recorder>(
    p: &ModelParams,
    m0: u64,
    horizon: f64,
    cap: u64,
    rng: &mut R,
    rec: &mut Rec,
) -> Outcome {
    let rate = p.s() + p.u();
    let down = p.s();
    let up = down + p.deleterious_rate();
    let mut d = m0;
    let mut t = 0.0;
    loop {
        if d == 1 {
            return Outcome { terminal: Terminal::AbsorbedOne, time: t, state: ExtendedCount::Count(1) };
        }
        if d >= cap {
            return Outcome { terminal: Terminal::CapReached, time: t, state: ExtendedCount::Count(d) };
        }
        let dt = rng.sample::<f64, _>(Exp1) / ((d - 1) as f64 * rate);
        if t + dt > horizon {
            return Outcome { terminal: Terminal::HorizonReached, time: horizon, state: ExtendedCount::Count(d) };
        }
        t += dt;
        let x = rng.random::<f64>() * rate;
        if x < down {
            d -= 1;
            let kind = if d == 1 { EventKind::Absorb } else { EventKind::Branch };
            rec.record(t, ExtendedCount::Count(d), kind);
        } else if x < up {
            d += 1;
            rec.record(t, ExtendedCount::Count(d), EventKind::DeleteriousPrune);
        } else {
            rec.record(t, ExtendedCount::Delta, EventKind::Absorb);
            return Outcome { terminal: Terminal::AbsorbedDelta, time: t, state: ExtendedCount::Delta };
        }
    }
}

fn check_args(m0: u64, horizon: f64, cap: u64) -> Result<()> {
    if m0 == 0 {
        return Err(Error::InvalidArgument("D starts from at least one".into()));
    }
    if cap < m0 {
        return Err(Error::InvalidArgument(format!("cap {cap} below initial state {m0}")));
    }
    if !(horizon >= 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be nonnegative, got {horizon}")));
    }
    Ok(())
}

/// Simulates one path of `D` from `m0 >= 1`.
pub fn simulate_d<R: Rng + ?Sized>(p: &ModelParams, m0: u64, horizon: f64, cap: u64, rng: &mut R) -> Result<CtmcPath> {
    check_args(m0, horizon, cap)?;
    let mut events = Vec::new();
    let out = run_d(p, m0, horizon, cap, rng, &mut events);
    Ok(CtmcPath::from_outcome(Process::D, *p, ExtendedCount::Count(m0), events, out))
}

/// Outcomes of `reps` independent runs of `D`, in replicate order.
pub fn sample_d_final(p: &ModelParams, m0: u64, horizon: f64, cap: u64, reps: u64, seed: u64) -> Result<Vec<Outcome>> {
    check_args(m0, horizon, cap)?;
    Ok(run_replicates(seed, reps, |_, rng| run_d(p, m0, horizon, cap, rng, &mut ())))
}
