//! The four-threshold control band policy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Thresholds `a < alpha <= beta < b`: the state is pushed up to `alpha` on
/// reaching or undershooting `a`, and down to `beta` on reaching or
/// overshooting `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPolicy {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("band thresholds must satisfy a < alpha <= beta < b")]
pub struct OrderingViolation;

impl BandPolicy {
    pub fn new(a: f64, alpha: f64, beta: f64, b: f64) -> Result<Self, OrderingViolation> {
        let policy = BandPolicy { a, alpha, beta, b };
        if policy.is_ordered() {
            Ok(policy)
        } else {
            Err(OrderingViolation)
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.a < self.alpha && self.alpha <= self.beta && self.beta < self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Post-intervention state for a pre-reset level outside `(a, b)`, or
    /// `None` if no intervention is triggered.
    pub fn reset_target(&self, state: f64) -> Option<f64> {
        if state <= self.a {
            Some(self.alpha)
        } else if state >= self.b {
            Some(self.beta)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_enforced() {
        assert!(BandPolicy::new(0.0, 0.5, 1.5, 2.0).is_ok());
        assert!(BandPolicy::new(0.0, 1.0, 1.0, 2.0).is_ok());
        assert!(BandPolicy::new(0.0, 0.0, 1.0, 2.0).is_err());
        assert!(BandPolicy::new(0.0, 1.5, 0.5, 2.0).is_err());
        assert!(BandPolicy::new(0.0, 0.5, 2.0, 2.0).is_err());
    }

    #[test]
    fn reset_targets() {
        let p = BandPolicy::new(0.0, 0.5, 1.5, 2.0).unwrap();
        assert_eq!(p.reset_target(-1.0), Some(0.5));
        assert_eq!(p.reset_target(0.0), Some(0.5));
        assert_eq!(p.reset_target(1.0), None);
        assert_eq!(p.reset_target(2.0), Some(1.5));
        assert_eq!(p.reset_target(5.0), Some(1.5));
    }
}
