//! Model and cost parameters of the controlled cash process.
//!
//! The uncontrolled state is a jump diffusion `Y_t = x + mu*t + sigma*W_t + N_t`
//! where `N_t` is compound Poisson with arrival rate `jump_rate` and
//! exponential(jump_scale) upward jump sizes, so every jump is positive.
//! Running cost is quadratic around `target`, interventions pay a fixed plus
//! proportional charge in each direction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dynamics of the uncontrolled process plus discounting and the cost target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Drift per unit time.
    pub mu: f64,
    /// Brownian volatility (>= 0).
    pub sigma: f64,
    /// Jump arrival rate (>= 0).
    pub jump_rate: f64,
    /// Rate of the exponential jump-size law (> 0); mean jump is `1 / jump_scale`.
    pub jump_scale: f64,
    /// Discount rate (> 0).
    pub discount: f64,
    /// Target level of the quadratic running cost.
    pub target: f64,
}

/// Fixed and proportional intervention charges, by direction of the move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Fixed charge for any upward adjustment (> 0).
    pub fixed_up: f64,
    /// Charge per unit moved upward (>= 0).
    pub prop_up: f64,
    /// Fixed charge for any downward adjustment (> 0).
    pub fixed_down: f64,
    /// Charge per unit moved downward (>= 0).
    pub prop_down: f64,
}

/// A single violated parameter constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ParamViolation {
    #[error("fixed intervention costs must be strictly positive")]
    NonPositiveFixedCost,
    #[error("proportional intervention costs must be non-negative")]
    NegativeProportionalCost,
    #[error("discount rate must be strictly positive")]
    NonPositiveDiscount,
    #[error("jump-size rate must be strictly positive")]
    NonPositiveJumpScale,
    #[error("volatility must be non-negative")]
    NegativeSigma,
    #[error("jump arrival rate must be non-negative")]
    NegativeJumpRate,
    #[error("parameters must be finite")]
    NonFinite,
}

/// All constraints violated by a parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameters: {0:?}")]
pub struct InvalidParams(pub Vec<ParamViolation>);

/// A model/cost pair that passed [`validate_model`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedModel {
    pub model: ModelParams,
    pub costs: CostParams,
}

/// Checks every standing assumption and returns either a validated bundle or
/// the full list of violations.
pub fn validate_model(model: ModelParams, costs: CostParams) -> Result<ValidatedModel, InvalidParams> {
    let mut violations = Vec::new();
    let fields = [
        model.mu,
        model.sigma,
        model.jump_rate,
        model.jump_scale,
        model.discount,
        model.target,
        costs.fixed_up,
        costs.prop_up,
        costs.fixed_down,
        costs.prop_down,
    ];
    if fields.iter().any(|v| !v.is_finite()) {
        violations.push(ParamViolation::NonFinite);
    }
    if !(costs.fixed_up > 0.0) || !(costs.fixed_down > 0.0) {
        violations.push(ParamViolation::NonPositiveFixedCost);
    }
    if costs.prop_up < 0.0 || costs.prop_down < 0.0 {
        violations.push(ParamViolation::NegativeProportionalCost);
    }
    if !(model.discount > 0.0) {
        violations.push(ParamViolation::NonPositiveDiscount);
    }
    if !(model.jump_scale > 0.0) {
        violations.push(ParamViolation::NonPositiveJumpScale);
    }
    if model.sigma < 0.0 {
        violations.push(ParamViolation::NegativeSigma);
    }
    if model.jump_rate < 0.0 {
        violations.push(ParamViolation::NegativeJumpRate);
    }
    if violations.is_empty() {
        Ok(ValidatedModel { model, costs })
    } else {
        Err(InvalidParams(violations))
    }
}

/// Evaluation outside the domain of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("Laplace exponent is finite only for s < jump_scale")]
    LaplaceExponentPole,
}

impl ModelParams {
    /// Quadratic running cost `(x - target)^2`.
    pub fn opportunity_cost(&self, x: f64) -> f64 {
        let d = x - self.target;
        d * d
    }

    /// Cumulant `log E[exp(s Y_1)]` of the uncontrolled process started at 0:
    /// `mu*s + sigma^2 s^2 / 2 + jump_rate * s / (jump_scale - s)`.
    ///
    /// The jump transform diverges at `s = jump_scale`, so any `s` at or past
    /// the pole is rejected while jumps are present.
    pub fn laplace_exponent(&self, s: f64) -> Result<f64, DomainError> {
        if self.jump_rate > 0.0 && s >= self.jump_scale {
            return Err(DomainError::LaplaceExponentPole);
        }
        let diffusion = self.mu * s + 0.5 * self.sigma * self.sigma * s * s;
        let jumps = if self.jump_rate > 0.0 {
            self.jump_rate * s / (self.jump_scale - s)
        } else {
            0.0
        };
        Ok(diffusion + jumps)
    }

    /// Mean increment per unit time, `psi'(0) = mu + jump_rate / jump_scale`.
    pub fn mean_rate(&self) -> f64 {
        self.mu + self.jump_rate / self.jump_scale
    }
}

impl CostParams {
    /// Intervention charge for an adjustment of size `xi`: fixed plus
    /// proportional in the direction moved, zero for no move.
    pub fn intervention_cost(&self, xi: f64) -> f64 {
        if xi > 0.0 {
            self.fixed_up + self.prop_up * xi
        } else if xi < 0.0 {
            self.fixed_down - self.prop_down * xi
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_model() -> ModelParams {
        ModelParams {
            mu: 0.0,
            sigma: 1.0,
            jump_rate: 1.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        }
    }

    fn base_costs() -> CostParams {
        CostParams {
            fixed_up: 1.0,
            prop_up: 0.1,
            fixed_down: 1.0,
            prop_down: 0.1,
        }
    }

    #[test]
    fn valid_parameters_pass() {
        assert!(validate_model(base_model(), base_costs()).is_ok());
    }

    #[test]
    fn zero_fixed_cost_rejected() {
        let mut costs = base_costs();
        costs.fixed_up = 0.0;
        let err = validate_model(base_model(), costs).unwrap_err();
        assert!(err.0.contains(&ParamViolation::NonPositiveFixedCost));
    }

    #[test]
    fn zero_discount_rejected() {
        let mut model = base_model();
        model.discount = 0.0;
        let err = validate_model(model, base_costs()).unwrap_err();
        assert!(err.0.contains(&ParamViolation::NonPositiveDiscount));
    }

    #[test]
    fn multiple_violations_all_reported() {
        let mut model = base_model();
        model.discount = -1.0;
        model.jump_scale = 0.0;
        let mut costs = base_costs();
        costs.prop_down = -0.5;
        let err = validate_model(model, costs).unwrap_err();
        assert_eq!(err.0.len(), 3);
    }

    #[test]
    fn intervention_cost_matches_definition() {
        let costs = CostParams {
            fixed_up: 1.0,
            prop_up: 0.5,
            fixed_down: 2.0,
            prop_down: 0.5,
        };
        assert_eq!(costs.intervention_cost(0.0), 0.0);
        assert_eq!(costs.intervention_cost(2.0), 2.0);
        assert_eq!(costs.intervention_cost(-3.0), 3.5);
    }

    #[test]
    fn intervention_cost_bounded_below_by_fixed_charges() {
        let costs = base_costs();
        let floor = costs.fixed_up.min(costs.fixed_down);
        for i in 1..200 {
            let xi = -5.0 + 0.05 * i as f64;
            if xi != 0.0 {
                assert!(costs.intervention_cost(xi) >= floor);
            }
        }
    }

    #[test]
    fn opportunity_cost_quadratic_around_target() {
        let mut model = base_model();
        model.target = 0.7;
        assert_eq!(model.opportunity_cost(0.7), 0.0);
        assert_eq!(model.opportunity_cost(2.7), 4.0);
        assert_eq!(model.opportunity_cost(-1.3), 4.0);
    }

    #[test]
    fn laplace_exponent_zero_at_origin() {
        assert_eq!(base_model().laplace_exponent(0.0).unwrap(), 0.0);
    }

    #[test]
    fn laplace_exponent_pure_drift_plus_jumps() {
        // mu = -2, sigma = 0, rate 1, scale 1 at s = 1/2: -1 + 0.5/0.5 = 0.
        let model = ModelParams {
            mu: -2.0,
            sigma: 0.0,
            jump_rate: 1.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        };
        let v = model.laplace_exponent(0.5).unwrap();
        assert!(v.abs() < 1e-15, "psi(0.5) = {v}");
    }

    #[test]
    fn laplace_exponent_rejects_pole() {
        assert_eq!(
            base_model().laplace_exponent(1.0),
            Err(DomainError::LaplaceExponentPole)
        );
    }

    #[test]
    fn laplace_exponent_convex_on_sample_grid() {
        let model = base_model();
        let psi = |s: f64| model.laplace_exponent(s).unwrap();
        // Chord test on triples inside the domain.
        let grid: Vec<f64> = (0..40).map(|i| -3.0 + 0.09 * i as f64).collect();
        for w in grid.windows(3) {
            let (s1, s2, s3) = (w[0], w[1], w[2]);
            let t = (s2 - s1) / (s3 - s1);
            let chord = (1.0 - t) * psi(s1) + t * psi(s3);
            assert!(psi(s2) <= chord + 1e-12);
        }
    }
}
