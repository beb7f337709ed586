//! Killed exit functionals, the law of the controlled process at an
//! independent exponential time, and its stationary law.
//!
//! Everything reduces to the scale functions through the classical two-sided
//! exit identities for the dual spectrally negative process. Downward passage
//! is continuous (the process creeps down), so the `W`-ratio prices the
//! down-exit; the `Z` combination prices the up-exit, which may overshoot by
//! a jump. Integrals of the potential density are evaluated in closed form
//! from the exponential mixture.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelParams;
use crate::policy::BandPolicy;
use crate::scale::{build_scale_basis, ExpMixture, ScaleError};

/// Law of the controlled process at an independent exponential(q) time,
/// started from `x`, queried on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientQuery {
    pub q: f64,
    pub x: f64,
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExitError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("two-by-two restart system is numerically singular")]
    SingularSystem,
    #[error("stationary normalizer is not positive (numerical failure)")]
    DegenerateChain,
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
}

/// Probabilities of leaving the band before an exponential clock, split by
/// exit side: `p_down_lt = P[clock >= exit, exit below]`,
/// `p_up_lt = P[clock >= exit, exit above]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitSplit {
    pub p_down_lt: f64,
    pub p_up_lt: f64,
}

/// Density `u^(q)(x, y)` of the potential measure of the process killed on
/// leaving `[a, b]`: `W(b-x) W(y-a) / W(b-a) - W(y-x)`.
pub fn potential_density(basis: &ExpMixture, x: f64, y: f64, bands: &BandPolicy) -> f64 {
    let (a, b) = (bands.a, bands.b);
    basis.w(b - x) * basis.w(y - a) / basis.w(b - a) - basis.w(y - x)
}

/// Closed-form `int_{lo}^{hi} u^(q)(x, y) dy` (clipped to the band).
pub fn potential_mass(basis: &ExpMixture, x: f64, interval: (f64, f64), bands: &BandPolicy) -> f64 {
    let (a, b) = (bands.a, bands.b);
    let lo = interval.0.max(a);
    let hi = interval.1.min(b);
    if hi <= lo {
        return 0.0;
    }
    let ratio = basis.w(b - x) / basis.w(b - a);
    ratio * (basis.w_integral(hi - a) - basis.w_integral(lo - a))
        - (basis.w_integral(hi - x) - basis.w_integral(lo - x))
}

/// Killed exit probabilities from `x` inside `[a, b]`.
pub fn exit_functionals(basis: &ExpMixture, x: f64, bands: &BandPolicy) -> ExitSplit {
    let (a, b) = (bands.a, bands.b);
    let ratio = basis.w(b - x) / basis.w(b - a);
    ExitSplit {
        p_down_lt: ratio,
        p_up_lt: basis.z(b - x) - basis.z(b - a) * ratio,
    }
}

/// Expected first exit time from the band, `int_{[a,b]} u^(0)(x, y) dy`.
pub fn expected_exit_time(basis_q0: &ExpMixture, x: f64, bands: &BandPolicy) -> f64 {
    potential_mass(basis_q0, x, (bands.a, bands.b), bands)
}

/// Applies the instantaneous reset to starting points on or outside the
/// thresholds before querying.
fn effective_start(x: f64, bands: &BandPolicy) -> f64 {
    bands.reset_target(x).unwrap_or(x)
}

/// `P_x[X at exponential(q) time lies in the interval]` for the controlled
/// process, assembled from the potential mass and the restart system at the
/// two reset points.
pub fn transient_distribution(
    model: &ModelParams,
    bands: &BandPolicy,
    query: &TransientQuery,
) -> Result<f64, ExitError> {
    if !(query.q > 0.0) {
        return Err(ExitError::InvalidQuery("q must be positive"));
    }
    if query.interval.0 > query.interval.1 {
        return Err(ExitError::InvalidQuery("interval must be ordered"));
    }
    let basis = build_scale_basis(model, query.q)?;
    let x0 = effective_start(query.x, bands);
    let (alpha, beta) = (bands.alpha, bands.beta);

    let t_alpha = query.q * potential_mass(&basis, alpha, query.interval, bands);
    let t_beta = query.q * potential_mass(&basis, beta, query.interval, bands);
    let s_alpha = exit_functionals(&basis, alpha, bands);
    let s_beta = exit_functionals(&basis, beta, bands);

    let det = (1.0 - s_alpha.p_down_lt) * (1.0 - s_beta.p_up_lt)
        - s_alpha.p_up_lt * s_beta.p_down_lt;
    if det <= 1e-14 {
        return Err(ExitError::SingularSystem);
    }
    let e_alpha = (t_alpha * (1.0 - s_beta.p_up_lt) + t_beta * s_alpha.p_up_lt) / det;
    let e_beta = (t_alpha * s_beta.p_down_lt + t_beta * (1.0 - s_alpha.p_down_lt)) / det;

    let t_x = query.q * potential_mass(&basis, x0, query.interval, bands);
    let s_x = exit_functionals(&basis, x0, bands);
    Ok(t_x + e_alpha * s_x.p_down_lt + e_beta * s_x.p_up_lt)
}

/// The stationary law of the controlled process: a mixture of the killed
/// potential measures from the two reset points, weighted by the stationary
/// distribution of the embedded restart chain and normalized by the mean
/// cycle length `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryLaw {
    pub bands: BandPolicy,
    /// Normalizing constant (mean cycle length under the restart chain).
    pub normalizer: f64,
    basis: ExpMixture,
    weight_alpha: f64,
    weight_beta: f64,
}

impl StationaryLaw {
    /// Stationary density at `y` in `[a, b]`.
    pub fn density(&self, y: f64) -> f64 {
        (self.weight_alpha * potential_density(&self.basis, self.bands.alpha, y, &self.bands)
            + self.weight_beta * potential_density(&self.basis, self.bands.beta, y, &self.bands))
            / self.normalizer
    }

    /// Stationary mass of an interval.
    pub fn measure(&self, interval: (f64, f64)) -> f64 {
        (self.weight_alpha * potential_mass(&self.basis, self.bands.alpha, interval, &self.bands)
            + self.weight_beta
                * potential_mass(&self.basis, self.bands.beta, interval, &self.bands))
            / self.normalizer
    }

    /// Unnormalized mixture mass of an interval (equals the normalizer on the
    /// full band).
    pub fn numerator(&self, interval: (f64, f64)) -> f64 {
        self.weight_alpha * potential_mass(&self.basis, self.bands.alpha, interval, &self.bands)
            + self.weight_beta * potential_mass(&self.basis, self.bands.beta, interval, &self.bands)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        self.measure((self.bands.a, y))
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.weight_alpha, self.weight_beta)
    }
}

/// Builds the stationary law for a spectrally positive model under a band
/// policy.
pub fn stationary_law(model: &ModelParams, bands: &BandPolicy) -> Result<StationaryLaw, ExitError> {
    let basis = build_scale_basis(model, 0.0)?;
    let w_ba = basis.w(bands.b - bands.a);
    let r_alpha = basis.w(bands.b - bands.alpha) / w_ba;
    let r_beta = basis.w(bands.b - bands.beta) / w_ba;
    // Embedded restart chain: from a reset point the next reset is at alpha
    // with the down-exit probability r, at beta otherwise; its stationary
    // weights are (r_beta, 1 - r_alpha) up to normalization.
    let weight_alpha = r_beta;
    let weight_beta = 1.0 - r_alpha;
    let mean_alpha = expected_exit_time(&basis, bands.alpha, bands);
    let mean_beta = expected_exit_time(&basis, bands.beta, bands);
    let normalizer = weight_alpha * mean_alpha + weight_beta * mean_beta;
    if !(normalizer > 1e-12 * bands.width().max(1.0)) {
        return Err(ExitError::DegenerateChain);
    }
    Ok(StationaryLaw {
        bands: *bands,
        normalizer,
        basis,
        weight_alpha,
        weight_beta,
    })
}

/// Stationary mass of an interval.
pub fn stationary_measure(
    model: &ModelParams,
    bands: &BandPolicy,
    interval: (f64, f64),
) -> Result<f64, ExitError> {
    Ok(stationary_law(model, bands)?.measure(interval))
}
