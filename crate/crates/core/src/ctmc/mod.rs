//! Exact event-by-event simulation of the line-counting chains: the killed
//! ASG `R`, the pLD-ASG `L` (alone and as a coupled pair) and its Siegmund
//! dual `D`.
//!
//! Each chain has a single core loop that is generic over a [`Recorder`], so
//! the path-recording simulators and the replicate estimators share one
//! implementation while the latter skip allocating event lists.

mod killed;
mod lookdown;
mod siegmund;

pub use killed::{estimate_r_absorb_zero, sample_r_final, sample_r_functional, simulate_r};
pub use lookdown::{
    default_spacing, estimate_l_functional, sample_l_final, sample_l_outcomes, sample_l_stationary, simulate_coupled_l,
    simulate_l, CoupledPaths, StationarySample,
};
pub use siegmund::{sample_d_final, simulate_d};

use serde::Serialize;

use crate::model::ModelParams;
use crate::montecarlo::MonteCarloEstimate;

/// Default state cap for `R` and `D` paths.
pub const DEFAULT_CAP: u64 = 10_000;

/// A line count or the cemetery state `Δ`, ordered with `n < Δ` for all `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ExtendedCount {
    Count(u64),
    Delta,
}

impl ExtendedCount {
    pub fn count(self) -> Option<u64> {
        match self {
            ExtendedCount::Count(n) => Some(n),
            ExtendedCount::Delta => None,
        }
    }

    /// The duality function `y^n`, with `y^Δ = 0`.
    pub fn moment(self, y: f64) -> f64 {
        match self {
            ExtendedCount::Count(n) => pow(y, n),
            ExtendedCount::Delta => 0.0,
        }
    }
}

impl std::fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedCount::Count(n) => write!(f, "{n}"),
            ExtendedCount::Delta => f.write_str("Delta"),
        }
    }
}

pub(crate) fn pow(y: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        y.powi(n as i32)
    } else {
        y.powf(n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Process {
    R,
    L,
    D,
}

/// Mechanism of a recorded transition. Transitions into an absorbing state
/// are recorded as `Absorb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    Branch,
    DeleteriousPrune,
    BeneficialKillOrCut,
    Absorb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Terminal {
    AbsorbedZero,
    AbsorbedDelta,
    AbsorbedOne,
    CapReached,
    HorizonReached,
}

impl std::fmt::Display for Terminal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Terminal::AbsorbedZero => "AbsorbedZero",
            Terminal::AbsorbedDelta => "AbsorbedDelta",
            Terminal::AbsorbedOne => "AbsorbedOne",
            Terminal::CapReached => "CapReached",
            Terminal::HorizonReached => "HorizonReached",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEvent {
    pub time: f64,
    pub state: ExtendedCount,
    pub kind: EventKind,
}

/// How a single run ended: the terminal class, the time it was reached
/// (the horizon for `HorizonReached`) and the state at that time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub terminal: Terminal,
    pub time: f64,
    pub state: ExtendedCount,
}

/// A recorded jump sequence of `R`, `L` or `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtmcPath {
    pub process: Process,
    pub params: ModelParams,
    pub initial: ExtendedCount,
    pub events: Vec<PathEvent>,
    pub terminal: Terminal,
    pub end_time: f64,
    pub final_state: ExtendedCount,
}

impl CtmcPath {
    fn from_outcome(
        process: Process,
        params: ModelParams,
        initial: ExtendedCount,
        events: Vec<PathEvent>,
        out: Outcome,
    ) -> Self {
        CtmcPath {
            process,
            params,
            initial,
            events,
            terminal: out.terminal,
            end_time: out.time,
            final_state: out.state,
        }
    }

    /// State of the path at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> ExtendedCount {
        let idx = self.events.partition_point(|e| e.time <= t);
        if idx == 0 {
            self.initial
        } else {
            self.events[idx - 1].state
        }
    }

    /// Holding times paired with the state they were spent in. The last,
    /// censored sojourn is excluded.
    pub fn sojourns(&self) -> Vec<(ExtendedCount, f64)> {
        let mut out = Vec::with_capacity(self.events.len());
        let mut state = self.initial;
        let mut since = 0.0;
        for e in &self.events {
            out.push((state, e.time - since));
            state = e.state;
            since = e.time;
        }
        out
    }
}

pub(crate) trait Recorder {
    fn record(&mut self, time: f64, state: ExtendedCount, kind: EventKind);
}

impl Recorder for () {
    #[inline]
    fn record(&mut self, _: f64, _: ExtendedCount, _: EventKind) {}
}

impl Recorder for Vec<PathEvent> {
    fn record(&mut self, time: f64, state: ExtendedCount, kind: EventKind) {
        self.push(PathEvent { time, state, kind });
    }
}

/// Mean of `f` over samples, as an estimate.
pub(crate) fn estimate_mean<T>(samples: &[T], seed: u64, f: impl Fn(&T) -> f64) -> MonteCarloEstimate {
    let values: Vec<f64> = samples.iter().map(f).collect();
    MonteCarloEstimate::from_samples(&values, seed)
}
