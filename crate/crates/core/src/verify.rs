//! Numerical certification of the optimality conditions.
//!
//! A candidate is certified when, on dense grids, the equation residual
//! vanishes inside the band, no intervention improves on waiting, the
//! inequality holds outside, the pasting and matching relations are met, the
//! free coefficients are non-positive, the thresholds are ordered and the
//! derivative follows the required slope pattern.

use serde::{Deserialize, Serialize};

use crate::candidate::CandidateValueFunction;
use crate::policy::BandPolicy;

/// Grid densities and tolerances of the certification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Points on the open band for the equality and intervention checks.
    pub interior_points: usize,
    /// Points on each side outside the band for the inequality check.
    pub exterior_points: usize,
    /// Exterior reach in units of the mean jump size.
    pub reach_mean_jumps: f64,
    /// Tolerance for residuals normalized by `1 + |h|`.
    pub tol_equality: f64,
    /// Tolerance for the one-sided inequality residual.
    pub tol_inequality: f64,
    /// Tolerance for the pasting/matching identities (solver-level).
    pub tol_pasting: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            interior_points: 1000,
            exterior_points: 500,
            reach_mean_jumps: 10.0,
            tol_equality: 1e-6,
            tol_inequality: 1e-6,
            tol_pasting: 1e-9,
        }
    }
}

/// One certified condition with its worst residual and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub worst_location: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<ConditionCheck>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Worst {
    value: f64,
    location: f64,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, location: f64::NAN }
    }

    fn update(&mut self, value: f64, location: f64) {
        if value > self.value || self.location.is_nan() {
            self.value = value;
            self.location = location;
        }
    }
}

/// Runs all eight condition checks on dense grids and reports worst residuals.
pub fn verify_conditions(cand: &CandidateValueFunction, grid: &GridConfig) -> VerificationReport {
    let model = cand.model();
    let BandPolicy { a, alpha, beta, b } = cand.bands;
    let theta = model.jump_scale;
    let lambda = model.discount;
    let c = cand.costs.prop_up;
    let d = cand.costs.prop_down;
    let mut checks = Vec::with_capacity(8);

    let norm = |x: f64, r: f64| {
        let h = cand.eval(x, 0).expect("order 0");
        r / (1.0 + h.abs())
    };

    // (i) equation residual on the open band.
    let mut worst = Worst::new();
    for i in 0..grid.interior_points {
        let x = a + (b - a) * (i as f64 + 0.5) / grid.interior_points as f64;
        let r = cand.qvi_residual(&model, x).expect("interior point");
        worst.update(norm(x, r.abs()), x);
    }
    checks.push(ConditionCheck {
        name: "qvi_equality".into(),
        pass: worst.value <= grid.tol_equality,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // (ii) no intervention improves on the candidate inside the band.
    let mut worst = Worst::new();
    for i in 0..grid.interior_points {
        let x = a + (b - a) * (i as f64 + 0.5) / grid.interior_points as f64;
        let gap = cand.eval(x, 0).unwrap() - cand.apply_m(x);
        worst.update(norm(x, gap), x);
    }
    checks.push(ConditionCheck {
        name: "value_below_intervention".into(),
        pass: worst.value <= grid.tol_equality,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // (iii) inequality residual outside the band. The grids extend past the
    // stationary points of the outside residual, beyond which the quadratic
    // running cost dominates and the residual increases without bound.
    let mut worst = Worst::new();
    let reach = grid.reach_mean_jumps / theta;
    let left_end = (a - reach).min(model.target - 0.5 * lambda * c - 1.0);
    let right_end = (b + reach).max(model.target + 0.5 * lambda * d + 1.0);
    for i in 0..grid.exterior_points {
        let t = (i as f64 + 0.5) / grid.exterior_points as f64;
        for x in [left_end + (a - left_end) * t, b + (right_end - b) * t] {
            let r = cand.qvi_residual(&model, x).expect("exterior point");
            worst.update(norm(x, (-r).max(0.0)), x);
        }
    }
    checks.push(ConditionCheck {
        name: "qvi_inequality".into(),
        pass: worst.value <= grid.tol_inequality,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // (iv) value matching across each reset.
    let mut worst = Worst::new();
    let match_low =
        cand.f(a, 0) - cand.f(alpha, 0) - cand.costs.fixed_up - c * (alpha - a);
    let match_high =
        cand.f(b, 0) - cand.f(beta, 0) - cand.costs.fixed_down - d * (b - beta);
    worst.update(match_low.abs(), a);
    worst.update(match_high.abs(), b);
    checks.push(ConditionCheck {
        name: "value_matching".into(),
        pass: worst.value <= grid.tol_pasting,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // (v) smooth pasting: candidate slopes equal the linear extension slopes.
    let mut worst = Worst::new();
    worst.update((cand.f(a, 1) + c).abs(), a);
    worst.update((cand.f(alpha, 1) + c).abs(), alpha);
    worst.update((cand.f(b, 1) - d).abs(), b);
    worst.update((cand.f(beta, 1) - d).abs(), beta);
    checks.push(ConditionCheck {
        name: "smooth_pasting".into(),
        pass: worst.value <= grid.tol_pasting,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // Sign conditions on the free coefficients.
    let mut worst = Worst::new();
    for (i, l) in [cand.l1, cand.l2, cand.l3].iter().enumerate() {
        worst.update(l.max(0.0), i as f64 + 1.0);
    }
    checks.push(ConditionCheck {
        name: "coefficient_signs".into(),
        pass: worst.value <= 1e-9,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    // Threshold ordering.
    let margin = (alpha - a).min(beta - alpha).min(b - beta);
    checks.push(ConditionCheck {
        name: "ordering".into(),
        pass: cand.bands.is_ordered(),
        worst_residual: (-margin).max(0.0),
        worst_location: a,
    });

    // Slope pattern of the derivative across the three band segments.
    let mut worst = Worst::new();
    let seg_points = grid.interior_points / 3 + 2;
    let mut segment = |lo: f64, hi: f64, viol: &dyn Fn(f64) -> f64| {
        for i in 0..=seg_points {
            let x = lo + (hi - lo) * i as f64 / seg_points as f64;
            let hp = cand.f(x, 1);
            worst.update(viol(hp), x);
        }
    };
    segment(a, alpha, &|hp| hp + c);
    segment(beta, b, &|hp| d - hp);
    segment(alpha, beta, &|hp| (-c - hp).max(hp - d));
    checks.push(ConditionCheck {
        name: "slope_pattern".into(),
        pass: worst.value <= grid.tol_equality,
        worst_residual: worst.value,
        worst_location: worst.location,
    });

    let all_pass = checks.iter().all(|c| c.pass);
    VerificationReport { checks, all_pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostParams, ModelParams};

    fn model() -> ModelParams {
        ModelParams {
            mu: 0.0,
            sigma: 1.0,
            jump_rate: 1.0,
            jump_scale: 1.0,
            discount: 1.0,
            target: 0.0,
        }
    }

    fn costs() -> CostParams {
        CostParams {
            fixed_up: 1.0,
            prop_up: 0.1,
            fixed_down: 1.0,
            prop_down: 0.1,
        }
    }

    #[test]
    fn arbitrary_candidate_fails_certification() {
        let bands = BandPolicy::new(-2.0, -1.0, 1.0, 2.0).unwrap();
        let cand =
            CandidateValueFunction::new(&model(), &costs(), bands, [-0.1, -0.2, -0.01]).unwrap();
        let report = verify_conditions(&cand, &GridConfig::default());
        assert!(!report.all_pass);
        assert!(report.check("qvi_equality").is_some());
        assert_eq!(report.checks.len(), 8);
        for check in &report.checks {
            assert!(check.worst_residual.is_finite());
        }
    }

    #[test]
    fn flipped_sign_detected() {
        let bands = BandPolicy::new(-2.0, -1.0, 1.0, 2.0).unwrap();
        let cand =
            CandidateValueFunction::new(&model(), &costs(), bands, [-0.1, -0.2, 0.01]).unwrap();
        let report = verify_conditions(&cand, &GridConfig::default());
        assert!(!report.check("coefficient_signs").unwrap().pass);
    }
}
