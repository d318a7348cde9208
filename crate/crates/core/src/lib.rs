//! Forward dynamics and ancestral processes of the two-type haploid
//! mutation-selection equation.
//!
//! * [`model`]: parameters, equilibria and regime classification.
//! * [`flow`]: the deterministic flow, in closed form and by RK4.
//! * [`ctmc`]: exact simulation of the line-counting chains `R`, `L`, `D`.
//! * [`analytics`]: closed-form ancestral quantities.
//! * [`pdmp`]: the piecewise-deterministic process whose absorption
//!   probability gives the ancestral type distribution.
//! * [`harness`]: seeded pass/fail checks of every duality identity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod ctmc;
pub mod error;
pub mod flow;
pub mod harness;
pub mod model;
pub mod montecarlo;
pub mod pdmp;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    classify_l_regime, classify_r_absorption, equilibria, validate_params, Equilibria, LRegime, ModelParams,
    RAbsorption,
};
pub use montecarlo::{AbsorptionEstimate, MonteCarloEstimate, DEFAULT_SEED};
