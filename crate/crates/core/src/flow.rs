//! The deterministic mutation-selection flow `y(t; y0)`.
//!
//! The right-hand side `-s y (1 - y) - u nu0 y + u nu1 (1 - y)` factors as
//! `s (y - y_bar)(y - y_star)` for `s > 0`, which gives the closed forms
//! below. [`integrate_rk4`] is an independent classical Runge-Kutta route
//! used to cross-check them.

use crate::error::{Error, Result};
use crate::model::{equilibria, ModelParams};

pub const DEFAULT_RK4_STEP: f64 = 1e-3;

const OVERSHOOT_TOL: f64 = 1e-12;

/// Right-hand side of the forward equation.
pub fn drift(p: &ModelParams, y: f64) -> f64 {
    -p.s() * y * (1.0 - y) - p.beneficial_rate() * y + p.deleterious_rate() * (1.0 - y)
}

/// Exact solution of the forward equation at time `t` from `y0`.
pub fn flow(p: &ModelParams, y0: f64, t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&y0), "y0 outside [0, 1]: {y0}");
    debug_assert!(t >= 0.0);
    if t == 0.0 {
        return y0;
    }
    let eq = equilibria(p);
    let y = match eq.y_star {
        None => {
            let nu1 = p.nu1();
            nu1 + (y0 - nu1) * (-p.u() * t).exp()
        }
        Some(y_star) if y_star == eq.y_bar => {
            // double root at 1 (nu0 = 0, u = s)
            let z0 = y0 - y_star;
            y_star + z0 / (1.0 - p.s() * z0 * t)
        }
        Some(y_star) => {
            let y_bar = eq.y_bar;
            if y0 == y_star || y0 == y_bar {
                return y0;
            }
            let decay = (-p.s() * (y_star - y_bar) * t).exp();
            let num = y_bar * (y_star - y0) - y_star * (y_bar - y0) * decay;
            let den = (y_star - y0) - (y_bar - y0) * decay;
            num / den
        }
    };
    y.clamp(0.0, 1.0)
}

/// Sampled solution of the forward equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ModelParams,
    pub samples: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64) {
        *self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Classical fourth-order Runge-Kutta integration with step `h`, sampled at
/// `0, h, 2h, ...` and at `t_end` itself.
pub fn integrate_rk4(p: &ModelParams, y0: f64, t_end: f64, h: f64) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidArgument(format!("y0={y0} outside [0, 1]")));
    }
    if !(h > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("need h > 0 and finite t_end >= 0, got h={h}, t_end={t_end}")));
    }
    let full_steps = (t_end / h + 1e-9).floor() as u64;
    let mut samples = Vec::with_capacity(full_steps as usize + 2);
    samples.push((0.0, y0));
    let mut y = y0;
    let mut t_prev = 0.0;
    let step = |y: f64, dt: f64| {
        let k1 = drift(p, y);
        let k2 = drift(p, y + 0.5 * dt * k1);
        let k3 = drift(p, y + 0.5 * dt * k2);
        let k4 = drift(p, y + dt * k3);
        y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let push = |t: f64, y: f64, samples: &mut Vec<(f64, f64)>| -> Result<f64> {
        if !(-OVERSHOOT_TOL..=1.0 + OVERSHOOT_TOL).contains(&y) || !y.is_finite() {
            return Err(Error::NumericalInstability(format!("RK4 sample y={y} at t={t} left [0, 1]")));
        }
        let y = y.clamp(0.0, 1.0);
        samples.push((t, y));
        Ok(y)
    };
    for i in 1..=full_steps {
        let t = (i as f64 * h).min(t_end);
        y = push(t, step(y, t - t_prev), &mut samples)?;
        t_prev = t;
    }
    if t_end - t_prev > 1e-12 * t_end.max(1.0) {
        push(t_end, step(y, t_end - t_prev), &mut samples)?;
    }
    Ok(Trajectory { params: *p, samples })
}
