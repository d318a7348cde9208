//! Model parameters, equilibria of the mutation-selection equation and the
//! regime classifications of the ancestral processes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Selection rate `s`, total mutation rate `u` and beneficial-mutation
/// probability `nu0`. The deleterious probability `nu1 = 1 - nu0` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    s: f64,
    u: f64,
    nu0: f64,
    nu1: f64,
}

impl ModelParams {
    pub fn new(s: f64, u: f64, nu0: f64) -> Result<Self> {
        validate_params(s, u, nu0)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    /// Per-line rate of beneficial mutations, `u * nu0`.
    pub fn beneficial_rate(&self) -> f64 {
        self.u * self.nu0
    }

    /// Per-line rate of deleterious mutations, `u * nu1`.
    pub fn deleterious_rate(&self) -> f64 {
        self.u * self.nu1
    }

    /// Parameters with the selection rate and the deleterious mutation rate
    /// interchanged: `s' = u nu1`, `u' = u nu0 + s`, `nu0' = u nu0 / u'`.
    ///
    /// The killed ASG under these parameters is distributed as `D - 1`.
    pub fn swapped(&self) -> Result<Self> {
        let u_swapped = self.beneficial_rate() + self.s;
        if u_swapped <= 0.0 {
            return Err(Error::InvalidParams("swapped mutation rate u*nu0 + s must be positive".into()));
        }
        let nu0 = (self.beneficial_rate() / u_swapped).clamp(0.0, 1.0);
        validate_params(self.deleterious_rate(), u_swapped, nu0)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            s: f64,
            u: f64,
            nu0: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        validate_params(raw.s, raw.u, raw.nu0).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for ModelParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s={} u={} nu0={}", self.s, self.u, self.nu0)
    }
}

/// Checks the standing assumptions `s >= 0`, `u > 0`, `nu0 in [0, 1]`.
pub fn validate_params(s: f64, u: f64, nu0: f64) -> Result<ModelParams> {
    if !s.is_finite() || !u.is_finite() || !nu0.is_finite() {
        return Err(Error::InvalidParams("parameters must be finite".into()));
    }
    if s < 0.0 {
        return Err(Error::InvalidParams("s must be nonnegative".into()));
    }
    if u <= 0.0 {
        return Err(Error::InvalidParams("u must be positive".into()));
    }
    if !(0.0..=1.0).contains(&nu0) {
        return Err(Error::InvalidParams("nu0 must lie in [0, 1]".into()));
    }
    Ok(ModelParams { s, u, nu0, nu1: 1.0 - nu0 })
}

/// Stable and (for `s > 0`) unstable equilibrium of the forward equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibria {
    pub y_bar: f64,
    pub y_star: Option<f64>,
}

/// Roots of `a y^2 - b y + c = 0` with `a > 0`, `b > 0`, `c >= 0` and a
/// nonnegative discriminant `disc`. The larger root is formed first and the
/// smaller one recovered from the product `c / a`, avoiding cancellation.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64, disc: f64) -> (f64, f64) {
    let sum = b + disc.max(0.0).sqrt();
    (2.0 * c / sum, sum / (2.0 * a))
}

/// Discriminant of `s y^2 - (u + s) y + u nu1`, written as a sum of
/// nonnegative terms: `(u - s)^2 + 4 s u nu0`.
pub(crate) fn equilibrium_discriminant(p: &ModelParams) -> f64 {
    let d = p.u - p.s;
    d * d + 4.0 * p.s * p.u * p.nu0
}

pub fn equilibria(p: &ModelParams) -> Equilibria {
    if p.s == 0.0 {
        return Equilibria { y_bar: p.nu1, y_star: None };
    }
    if p.nu0 == 0.0 {
        // error-threshold branch, exact
        let ratio = p.u / p.s;
        return Equilibria { y_bar: ratio.min(1.0), y_star: Some(ratio.max(1.0)) };
    }
    let (y_bar, y_star) = quadratic_roots(p.s, p.u + p.s, p.deleterious_rate(), equilibrium_discriminant(p));
    Equilibria { y_bar: y_bar.clamp(0.0, 1.0), y_star: Some(y_star) }
}

/// Asymptotic behaviour of the pLD-ASG line-counting process `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LRegime {
    AbsorbsAtOne,
    Transient,
    NullRecurrent,
    PositiveRecurrent,
}

pub fn classify_l_regime(p: &ModelParams) -> LRegime {
    if p.s == 0.0 {
        LRegime::AbsorbsAtOne
    } else if p.nu0 == 0.0 && p.u < p.s {
        LRegime::Transient
    } else if p.nu0 == 0.0 && p.u == p.s {
        LRegime::NullRecurrent
    } else {
        LRegime::PositiveRecurrent
    }
}

/// Where the killed ASG line-counting process `R` is eventually absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RAbsorption {
    /// `nu0 = 1`: absorbed in the cemetery almost surely.
    AlwaysDelta,
    /// `nu0 in (0, 1)`: absorbed in `{0, Δ}` almost surely.
    AlwaysZeroOrDelta,
    /// `nu0 = 0, u < s`: absorbed in 0 with probability `< 1`, otherwise grows to infinity.
    ZeroWithProbLessOne,
    /// `nu0 = 0, u >= s`: absorbed in 0 almost surely.
    AlwaysZero,
}

pub fn classify_r_absorption(p: &ModelParams) -> RAbsorption {
    if p.nu0 == 1.0 {
        RAbsorption::AlwaysDelta
    } else if p.nu0 > 0.0 {
        RAbsorption::AlwaysZeroOrDelta
    } else if p.u < p.s {
        RAbsorption::ZeroWithProbLessOne
    } else {
        RAbsorption::AlwaysZero
    }
}

impl std::fmt::Display for LRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LRegime::AbsorbsAtOne => "AbsorbsAtOne",
            LRegime::Transient => "Transient",
            LRegime::NullRecurrent => "NullRecurrent",
            LRegime::PositiveRecurrent => "PositiveRecurrent",
        };
        f.write_str(name)
    }
}

impl std::fmt::Display for RAbsorption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            RAbsorption::AlwaysDelta => "AlwaysDelta",
            RAbsorption::AlwaysZeroOrDelta => "AlwaysZeroOrDelta",
            RAbsorption::ZeroWithProbLessOne => "ZeroWithProbLessOne",
            RAbsorption::AlwaysZero => "AlwaysZero",
        };
        f.write_str(name)
    }
}
