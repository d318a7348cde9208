//! The piecewise-deterministic process `Ỹ`: it follows the forward flow and
//! jumps once, to 1 at rate `u nu0 y / (1 - y)` or to 0 at rate
//! `u nu1 (1 - y) / y`, after which it is absorbed.
//!
//! Jump times are drawn exactly by inverting the cumulative hazard along the
//! deterministic trajectory. All paths from the same `y0` share that
//! trajectory, so a [`HazardProfile`] tabulates the cumulative hazard once and
//! each replicate only inverts it on one short interval.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::ctmc::pow;
use crate::error::{Error, Result};
use crate::flow::flow;
use crate::model::{equilibria, ModelParams};
use crate::montecarlo::{run_replicates, AbsorptionEstimate, MonteCarloEstimate};

const QUADRATURE_REL_TOL: f64 = 1e-9;
const TIME_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 40;
/// Largest tolerated share of paths that have not jumped by the horizon.
const MAX_RUNNING_SHARE: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Boundary {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PdmpOutcome {
    AbsorbedZero(f64),
    AbsorbedOne(f64),
    RunningAtHorizon(f64),
}

impl PdmpOutcome {
    /// State of the process once the outcome is reached.
    pub fn state(&self) -> f64 {
        match *self {
            PdmpOutcome::AbsorbedZero(_) => 0.0,
            PdmpOutcome::AbsorbedOne(_) => 1.0,
            PdmpOutcome::RunningAtHorizon(y) => y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdmpPath {
    pub params: ModelParams,
    pub y0: f64,
    pub horizon: f64,
    /// At most one entry.
    pub jumps: Vec<(f64, Boundary)>,
    pub terminal: PdmpOutcome,
}

impl PdmpPath {
    /// State at time `t <= horizon`.
    pub fn state_at(&self, t: f64) -> f64 {
        match self.jumps.first() {
            Some(&(tj, Boundary::Zero)) if tj <= t => 0.0,
            Some(&(tj, Boundary::One)) if tj <= t => 1.0,
            _ => flow(&self.params, self.y0, t),
        }
    }
}

/// Jump rates `(to 0, to 1)` at state `y`. A term whose mutation rate is
/// zero is zero even at the boundary where its factor diverges.
pub fn jump_rates(p: &ModelParams, y: f64) -> (f64, f64) {
    let to_zero = if p.deleterious_rate() > 0.0 { p.deleterious_rate() * (1.0 - y) / y } else { 0.0 };
    let to_one = if p.beneficial_rate() > 0.0 { p.beneficial_rate() * y / (1.0 - y) } else { 0.0 };
    (to_zero, to_one)
}

/// Total jump rate at state `y`.
pub fn total_hazard(p: &ModelParams, y: f64) -> f64 {
    let (a, b) = jump_rates(p, y);
    a + b
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 || !delta.is_finite() {
        return None;
    }
    Some(
        adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?
            + adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?,
    )
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    adaptive_simpson_rec(&f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::HazardIntegrationFailure(format!("no convergence on [{a}, {b}]")))
}

/// Cumulative hazard along the deterministic trajectory from `y0`,
/// tabulated on `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct HazardProfile {
    params: ModelParams,
    y0: f64,
    horizon: f64,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

impl HazardProfile {
    pub fn new(p: &ModelParams, y0: f64, horizon: f64) -> Result<Self> {
        if !(y0 > 0.0 && y0 < 1.0) {
            return Err(Error::InvalidArgument(format!("hazard profile needs y0 in (0, 1), got {y0}")));
        }
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon must be finite and nonnegative, got {horizon}")));
        }
        let mut profile = HazardProfile { params: *p, y0, horizon, knots: vec![0.0], cumulative: vec![0.0] };
        let mut t = 0.0;
        let mut acc = 0.0;
        while t < horizon {
            // keep the expected number of jumps per interval below one half
            let step = 0.5 / profile.hazard_at(t).max(1.0);
            let next = (t + step).min(horizon);
            acc += profile.integrate(t, next)?;
            profile.knots.push(next);
            profile.cumulative.push(acc);
            t = next;
        }
        Ok(profile)
    }

    /// Total jump rate at time `t` along the trajectory.
    pub fn hazard_at(&self, t: f64) -> f64 {
        total_hazard(&self.params, flow(&self.params, self.y0, t))
    }

    fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        adaptive_simpson(|t| self.hazard_at(t), a, b, QUADRATURE_REL_TOL)
    }

    /// Cumulative hazard `Λ(t)` for `t <= horizon`.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        let t = t.min(self.horizon);
        let k = self.knots.partition_point(|&x| x <= t) - 1;
        Ok(self.cumulative[k] + self.integrate(self.knots[k], t)?)
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("profile has a knot")
    }

    /// Largest total hazard seen at the tabulation knots.
    pub fn max_hazard(&self) -> f64 {
        self.knots.iter().map(|&t| self.hazard_at(t)).fold(0.0, f64::max)
    }

    /// Solves `Λ(t) = level`, or `None` if the level is not reached by the
    /// horizon.
    pub fn invert(&self, level: f64) -> Result<Option<f64>> {
        if level >= self.total() {
            return Ok(None);
        }
        let k = self.cumulative.partition_point(|&c| c <= level) - 1;
        let (mut lo, mut hi) = (self.knots[k], self.knots[k + 1]);
        let base = self.cumulative[k];
        let span = self.cumulative[k + 1] - base;
        let mut t = lo + (hi - lo) * ((level - base) / span).clamp(0.0, 1.0);
        for _ in 0..200 {
            let excess = base + self.integrate(self.knots[k], t)? - level;
            if excess > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let rate = self.hazard_at(t);
            let newton = t - excess / rate;
            let next = if rate > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let moved = (next - t).abs();
            t = next;
            if moved < TIME_TOL || hi - lo < TIME_TOL {
                return Ok(Some(t));
            }
        }
        Err(Error::HazardIntegrationFailure(format!("jump-time inversion did not converge near t={t}")))
    }

    /// Draws one path using this profile.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PdmpPath> {
        let level: f64 = rng.sample(Exp1);
        let p = &self.params;
        let (jumps, terminal) = match self.invert(level)? {
            None => (vec![], PdmpOutcome::RunningAtHorizon(flow(p, self.y0, self.horizon))),
            Some(t) => {
                let (to_zero, to_one) = jump_rates(p, flow(p, self.y0, t));
                if rng.random::<f64>() * (to_zero + to_one) < to_one {
                    (vec![(t, Boundary::One)], PdmpOutcome::AbsorbedOne(t))
                } else {
                    (vec![(t, Boundary::Zero)], PdmpOutcome::AbsorbedZero(t))
                }
            }
        };
        Ok(PdmpPath { params: *p, y0: self.y0, horizon: self.horizon, jumps, terminal })
    }
}

fn boundary_path(p: &ModelParams, y0: f64, horizon: f64) -> Option<PdmpPath> {
    let terminal = if y0 == 0.0 {
        PdmpOutcome::AbsorbedZero(0.0)
    } else if y0 == 1.0 {
        PdmpOutcome::AbsorbedOne(0.0)
    } else {
        return None;
    };
    Some(PdmpPath { params: *p, y0, horizon, jumps: vec![], terminal })
}

/// Simulates one path of `Ỹ` from `y0` up to `horizon`.
pub fn simulate_pdmp<R: Rng + ?Sized>(p: &ModelParams, y0: f64, horizon: f64, rng: &mut R) -> Result<PdmpPath> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidArgument(format!("y0={y0} outside [0, 1]")));
    }
    if let Some(path) = boundary_path(p, y0, horizon) {
        return Ok(path);
    }
    HazardProfile::new(p, y0, horizon)?.sample(rng)
}

/// Runs `reps` independent paths from `y0`, in replicate order.
pub fn sample_pdmp(p: &ModelParams, y0: f64, horizon: f64, reps: u64, seed: u64) -> Result<Vec<PdmpPath>> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidArgument(format!("y0={y0} outside [0, 1]")));
    }
    if let Some(path) = boundary_path(p, y0, horizon) {
        return Ok(vec![path; reps as usize]);
    }
    let profile = HazardProfile::new(p, y0, horizon)?;
    run_replicates(seed, reps, |_, rng| profile.sample(rng)).into_iter().collect()
}

/// Horizon after which a path from any start has jumped except with
/// probability about `e^-20`: 40 relaxation times of the flow plus 20 mean
/// waiting times at the equilibrium hazard.
pub fn default_horizon(p: &ModelParams) -> Result<f64> {
    let eq = equilibria(p);
    let relax = match eq.y_star {
        Some(y_star) => p.s() * (y_star - eq.y_bar),
        None => p.u(),
    };
    let rate_at_eq = total_hazard(p, eq.y_bar);
    if !(relax > 0.0) || !(rate_at_eq > 0.0) || !rate_at_eq.is_finite() {
        return Err(Error::WrongRegime(format!("{p}: jump is not almost surely finite")));
    }
    Ok(40.0 / relax + 20.0 / rate_at_eq)
}

/// Probability that `Ỹ` from `y0` is absorbed at 1.
pub fn estimate_pdmp_absorb_one(
    p: &ModelParams,
    y0: f64,
    reps: u64,
    horizon: Option<f64>,
    seed: u64,
) -> Result<AbsorptionEstimate> {
    if !(p.nu0() > 0.0 && p.nu0() < 1.0) {
        return Err(Error::WrongRegime(format!("absorption estimate needs nu0 in (0, 1), got {}", p.nu0())));
    }
    if reps == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let horizon = match horizon {
        Some(h) => h,
        None => default_horizon(p)?,
    };
    let paths = sample_pdmp(p, y0, horizon, reps, seed)?;
    let decided: Vec<f64> = paths
        .iter()
        .filter_map(|path| match path.terminal {
            PdmpOutcome::AbsorbedOne(_) => Some(1.0),
            PdmpOutcome::AbsorbedZero(_) => Some(0.0),
            PdmpOutcome::RunningAtHorizon(_) => None,
        })
        .collect();
    let indeterminate = reps - decided.len() as u64;
    if indeterminate as f64 > MAX_RUNNING_SHARE * reps as f64 || decided.is_empty() {
        return Err(Error::IndeterminateFraction { indeterminate, total: reps });
    }
    Ok(AbsorptionEstimate { estimate: MonteCarloEstimate::from_samples(&decided, seed), indeterminate })
}

/// Monte Carlo mean of `Ỹ_t^n` given `Ỹ_0 = y0`.
pub fn estimate_pdmp_moment(
    p: &ModelParams,
    y0: f64,
    n: u64,
    t: f64,
    reps: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    if t == 0.0 {
        return Ok(MonteCarloEstimate::exact(pow(y0, n), reps, seed));
    }
    let paths = sample_pdmp(p, y0, t, reps, seed)?;
    let values: Vec<f64> = paths.iter().map(|path| pow(path.terminal.state(), n)).collect();
    Ok(MonteCarloEstimate::from_samples(&values, seed))
}
