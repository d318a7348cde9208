//! Closed-form ancestral quantities: absorption probabilities of the killed
//! ASG, tail coefficients of the pLD-ASG and the probability of an unfit
//! representative ancestral type.

use crate::ctmc::{estimate_l_functional, pow};
use crate::error::{Error, Result};
use crate::model::{classify_l_regime, equilibria, quadratic_roots, LRegime, ModelParams};
use crate::montecarlo::MonteCarloEstimate;

/// Probability that the killed ASG started from one line is absorbed in 0.
pub fn w1(p: &ModelParams) -> f64 {
    equilibria(p).y_bar
}

/// Absorption probability in 0 from `n` lines, `w1^n`.
pub fn w_n(p: &ModelParams, n: u64) -> f64 {
    pow(w1(p), n)
}

/// Parameter `p = P(L_∞ > 1)` of the stationary law of `L`, which is
/// geometric on `{1, 2, ...}` with `P(L_∞ > n) = p^n`.
pub fn geometric_p(p: &ModelParams) -> Result<f64> {
    let regime = classify_l_regime(p);
    if regime != LRegime::PositiveRecurrent {
        return Err(Error::WrongRegime(format!("geometric parameter needs a positive recurrent L, got {regime}")));
    }
    if p.nu1() > 0.0 {
        Ok(p.s() * equilibria(p).y_bar / p.deleterious_rate())
    } else {
        Ok(p.s() / (p.u() + p.s()))
    }
}

/// The stable equilibrium with the roles of `s` and `u nu1` interchanged.
pub fn breve_ybar(p: &ModelParams) -> f64 {
    if p.nu1() == 0.0 {
        return p.s() / (p.u() + p.s());
    }
    // lower root of (u nu1) y^2 - (u + s) y + s = 0; same discriminant as the
    // forward equilibrium equation
    let d = p.u() - p.s();
    let disc = d * d + 4.0 * p.s() * p.u() * p.nu0();
    let (lower, _) = quadratic_roots(p.deleterious_rate(), p.u() + p.s(), p.s(), disc);
    lower.min(1.0)
}

/// Asymptotic tail `a_n = lim P_1(L_r > n)`.
pub fn tail_a(p: &ModelParams, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    match classify_l_regime(p) {
        LRegime::AbsorbsAtOne => 0.0,
        LRegime::Transient | LRegime::NullRecurrent => 1.0,
        LRegime::PositiveRecurrent => pow(geometric_p(p).expect("regime checked"), n),
    }
}

/// Probability that the ancestor in the distant past of an individual from a
/// population with unfit frequency `y0` is unfit.
pub fn g_infinity(p: &ModelParams, y0: f64) -> f64 {
    match classify_l_regime(p) {
        LRegime::AbsorbsAtOne => y0,
        LRegime::Transient | LRegime::NullRecurrent => {
            if y0 < 1.0 {
                0.0
            } else {
                1.0
            }
        }
        LRegime::PositiveRecurrent => {
            let q = geometric_p(p).expect("regime checked");
            (1.0 - q) * y0 / (1.0 - q * y0)
        }
    }
}

/// Monte Carlo estimate of `g_r(y0) = E_1[y0^{L_r}]`.
pub fn g_finite_mc(p: &ModelParams, y0: f64, r: f64, reps: u64, seed: u64) -> Result<MonteCarloEstimate> {
    estimate_l_functional(p, y0, 1, r, reps, seed)
}

/// Probability of an unfit ancestral type for a population at equilibrium.
pub fn g_at_equilibrium(p: &ModelParams) -> f64 {
    g_infinity(p, equilibria(p).y_bar)
}
