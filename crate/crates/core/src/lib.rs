//! Optimal control band policies for spectrally positive jump diffusions.
//!
//! The crate covers the full pipeline for the cash-management control problem
//! with fixed-plus-proportional intervention costs and a quadratic running
//! cost:
//!
//! * [`model`] — parameters, intervention and running costs, Laplace exponent;
//! * [`scale`] — `W^(q)` / `Z^(q)` scale functions by partial-fraction
//!   inversion of the rational transform;
//! * [`candidate`], [`solver`], [`verify`] — the candidate value function, the
//!   seven smooth-pasting equations for the band thresholds, and the numerical
//!   certification of the optimality conditions;
//! * [`exit`] — killed exit probabilities, transient law at an independent
//!   exponential time, and the stationary law of the controlled process;
//! * [`sim`] — Monte Carlo simulation of the controlled process, used as the
//!   independent oracle for every analytic quantity.

pub mod candidate;
pub mod config;
pub mod exit;
pub mod model;
pub mod numeric;
pub mod policy;
pub mod scale;
pub mod sim;
pub mod solver;
pub mod verify;

pub use candidate::CandidateValueFunction;
pub use config::ProblemConfig;
pub use exit::{StationaryLaw, TransientQuery};
pub use model::{CostParams, ModelParams, ValidatedModel};
pub use policy::BandPolicy;
pub use scale::{build_scale_basis, closed_form_w0, eval_scale, ExpMixture};
pub use sim::{PathRecord, SimConfig};
pub use solver::{solve_bands, BandSolution};
pub use verify::VerificationReport;
