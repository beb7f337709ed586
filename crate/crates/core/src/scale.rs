//! Two-sided exit machinery: the scale functions `W^(q)` and `Z^(q)` of the
//! spectrally positive process, realized as finite exponential mixtures.
//!
//! For the Brownian-plus-exponential-jump family the Laplace transform
//! `1/(psi(-s) - q)` is rational, so `W^(q)` is recovered exactly by partial
//! fractions: the poles are the roots of `(psi(-s) - q)(jump_scale + s)` and
//! the weights are the residues. Internally this is the scale function of the
//! dual process `-Y` (which is spectrally negative, the textbook orientation);
//! the exposed evaluation follows the arguments `W(b - x)`, `W(y - a)` used by
//! the exit and stationary formulas downstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelParams;
use crate::numeric::{self, RootError};

/// One `weight * x^xpow * exp(rate * x)` term of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub rate: f64,
    pub weight: f64,
    /// 0 for a simple pole, 1 for the extra term of a merged double pole.
    pub xpow: u8,
}

/// `W^(q)` as a finite mixture of (possibly polynomial-weighted) exponentials,
/// together with the transform parameter `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpMixture {
    pub q: f64,
    pub terms: Vec<MixtureTerm>,
    /// Set when two poles were merged into a double root.
    pub repeated_root: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScaleError {
    #[error("process is a subordinator (sigma = 0, mu >= 0, upward jumps only)")]
    Subordinator,
    #[error("pole isolation failed: {0}")]
    RootFinding(#[from] RootError),
    #[error("parameters outside the domain of the closed form")]
    Domain,
}

impl ExpMixture {
    /// `W^(q)(x)`; zero for negative arguments by convention.
    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|t| {
                let e = (t.rate * x).exp();
                if t.xpow == 0 {
                    t.weight * e
                } else {
                    t.weight * x * e
                }
            })
            .sum()
    }

    /// `int_0^x W^(q)(u) du`; zero for non-positive arguments.
    pub fn w_integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|t| term_integral(t, x)).sum()
    }

    /// `Z^(q)(x) = 1 + q int_0^x W^(q)`.
    pub fn z(&self, x: f64) -> f64 {
        1.0 + self.q * self.w_integral(x)
    }

    /// Term-wise Laplace transform `sum w/(s - r) (+ w/(s - r)^2)`; equals
    /// `1/(psi(-s) - q)` for `s` beyond the largest pole.
    pub fn transform(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let d = s - t.rate;
                if t.xpow == 0 {
                    t.weight / d
                } else {
                    t.weight / (d * d)
                }
            })
            .sum()
    }

    /// Largest pole; the transform identity holds for `s` above this.
    pub fn max_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn term_integral(t: &MixtureTerm, x: f64) -> f64 {
    let r = t.rate;
    if t.xpow == 0 {
        if r == 0.0 {
            t.weight * x
        } else {
            t.weight * (r * x).exp_m1() / r
        }
    } else if r == 0.0 {
        t.weight * 0.5 * x * x
    } else if (r * x).abs() < 1e-6 {
        // int_0^x u e^{ru} du expanded around r = 0.
        let rx = r * x;
        t.weight * x * x * (0.5 + rx / 3.0 + rx * rx / 8.0 + rx * rx * rx / 30.0)
    } else {
        t.weight * (x * (r * x).exp() / r - (r * x).exp_m1() / (r * r))
    }
}

/// Convenience pair `(W^(q)(x), Z^(q)(x))`.
pub fn eval_scale(basis: &ExpMixture, x: f64) -> (f64, f64) {
    (basis.w(x), basis.z(x))
}

/// Builds the exponential-mixture representation of `W^(q)` for the model.
///
/// The denominator polynomial in the transform variable `s` is
/// `(psi(-s) - q) * (jump_scale + s)` cleared of its pole (cubic for
/// `sigma > 0`, quadratic for `sigma = 0`); with no jumps the factor is not
/// introduced. Poles within relative distance 1e-8 are merged into a double
/// root carried by an `x * exp(rate x)` term.
pub fn build_scale_basis(model: &ModelParams, q: f64) -> Result<ExpMixture, ScaleError> {
    assert!(q >= 0.0, "transform parameter must be non-negative");
    if model.sigma == 0.0 && model.mu >= 0.0 {
        return Err(ScaleError::Subordinator);
    }

    let theta = model.jump_scale;
    let eta = model.jump_rate;
    let sig2 = model.sigma * model.sigma;
    let has_jumps = eta > 0.0;

    // Ascending coefficients of the cleared denominator.
    let den: Vec<f64> = if has_jumps {
        if model.sigma > 0.0 {
            vec![
                -q * theta,
                -(model.mu * theta + q + eta),
                0.5 * sig2 * theta - model.mu,
                0.5 * sig2,
            ]
        } else {
            vec![-q * theta, -(model.mu * theta + q + eta), -model.mu]
        }
    } else if model.sigma > 0.0 {
        vec![-q, -model.mu, 0.5 * sig2]
    } else {
        vec![-q, -model.mu]
    };

    let roots = numeric::real_poly_roots(&den)?;

    // Cluster poles within relative distance 1e-8 into multiplicity groups.
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &r in &roots {
        match groups.last_mut() {
            Some((v, m)) if (r - *v).abs() <= 1e-8 * v.abs().max(1.0) => {
                *v = (*v * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => groups.push((r, 1)),
        }
    }
    // q = 0 has the exact pole s = 0; snap it so the rate-zero branches of the
    // antiderivatives apply.
    if q == 0.0 {
        if let Some((v, _)) = groups
            .iter_mut()
            .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
        {
            if v.abs() < 1e-9 {
                *v = 0.0;
            }
        }
    }

    let lead = *den.last().unwrap();
    let num = |s: f64| if has_jumps { theta + s } else { 1.0 };
    let num_d = if has_jumps { 1.0 } else { 0.0 };

    let mut terms = Vec::new();
    let mut repeated_root = false;
    for gi in 0..groups.len() {
        let (r, mult) = groups[gi];
        match mult {
            1 => {
                // Simple pole: residue num(r) / den'(r).
                let dp = poly_derivative_at(&den, r);
                terms.push(MixtureTerm { rate: r, weight: num(r) / dp, xpow: 0 });
            }
            2 => {
                repeated_root = true;
                // den(s) = g(s) (s - r)^2 with g linear or constant.
                let (g_r, g_d) = match groups.iter().enumerate().find(|(j, _)| *j != gi) {
                    Some((_, &(r3, 1))) => (lead * (r - r3), lead),
                    Some(_) => return Err(ScaleError::RootFinding(RootError::Degenerate)),
                    None => (lead, 0.0),
                };
                terms.push(MixtureTerm { rate: r, weight: num(r) / g_r, xpow: 1 });
                terms.push(MixtureTerm {
                    rate: r,
                    weight: (num_d * g_r - num(r) * g_d) / (g_r * g_r),
                    xpow: 0,
                });
            }
            // A triple pole cannot occur in this family.
            _ => return Err(ScaleError::RootFinding(RootError::Degenerate)),
        }
    }
    terms.sort_by(|a, b| (a.rate, a.xpow).partial_cmp(&(b.rate, b.xpow)).unwrap());
    if terms.iter().any(|t| !t.weight.is_finite()) {
        return Err(ScaleError::RootFinding(RootError::Degenerate));
    }
    Ok(ExpMixture { q, terms, repeated_root })
}

fn poly_derivative_at(coeffs: &[f64], x: f64) -> f64 {
    let mut dp = 0.0;
    let mut p = 0.0;
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    dp
}

/// Closed-form `W^(0)` for the pure-drift-plus-jump process with drift
/// `drift < 0`, unit jump rate and jump-size rate `theta`.
///
/// For `theta * drift = -1` the generic expression degenerates to a double
/// pole at the origin; this returns its repeated-root limit
/// `(theta x + 1) / |drift|`, which stays non-negative.
pub fn closed_form_w0(drift: f64, theta: f64, x: f64) -> Result<f64, ScaleError> {
    if drift >= 0.0 || theta <= 0.0 || x < 0.0 {
        return Err(ScaleError::Domain);
    }
    let denom = theta * drift + 1.0;
    if denom.abs() <= 1e-8 * (1.0 + (theta * drift).abs()) {
        return Ok((theta * x + 1.0) / (-drift));
    }
    let constant = -theta / denom;
    let coeff = 1.0 / drift - theta / denom;
    Ok(constant - coeff * (-denom * x / drift).exp())
}
