//! The candidate value function of the band problem.
//!
//! On `[a, b]` the candidate is
//! `f(x) = K1 (x-rho)^2 + K2 (x-rho) + K3 + sum_i L_i exp((theta + c_i) x)`
//! where `c_1 < -theta < c_2 < 0 < c_3` are the roots of the characteristic
//! cubic of the integro-differential equation; outside the band it continues
//! linearly with slopes `-c` (left) and `d` (right). The coefficient formulas
//! hardcode unit jump rate and zero drift, which is checked at construction.

use thiserror::Error;

use crate::model::{CostParams, ModelParams};
use crate::numeric;
use crate::policy::BandPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CandidateError {
    #[error("band machinery requires {0}")]
    UnsupportedModel(&'static str),
    #[error("characteristic cubic lost its sign pattern (parameter corruption)")]
    BracketFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("second derivative is undefined at the band edges")]
    SecondDerivativeAtKink,
}

/// Coefficients of the particular solution: `K1 = 1/lambda`,
/// `K2 = 2/(theta lambda^2)`, `K3 = (2 lambda + 2 + theta^2 lambda sigma^2) /
/// (lambda^3 theta^2)`.
pub fn particular_coefficients(model: &ModelParams) -> (f64, f64, f64) {
    let lambda = model.discount;
    let theta = model.jump_scale;
    let sig2 = model.sigma * model.sigma;
    let k1 = 1.0 / lambda;
    let k2 = 2.0 / (theta * lambda * lambda);
    let k3 = (2.0 * lambda + 2.0 + theta * theta * lambda * sig2)
        / (lambda * lambda * lambda * theta * theta);
    (k1, k2, k3)
}

/// Roots of `P(x) = sigma^2/2 x^3 + sigma^2 theta x^2 +
/// (sigma^2 theta^2 / 2 - lambda - 1) x - theta`, ordered
/// `c1 < -theta < c2 < 0 < c3`.
pub fn characteristic_roots(model: &ModelParams) -> Result<(f64, f64, f64), CandidateError> {
    let theta = model.jump_scale;
    let lambda = model.discount;
    let sig2 = model.sigma * model.sigma;
    let coeffs = [
        -theta,
        0.5 * sig2 * theta * theta - lambda - 1.0,
        sig2 * theta,
        0.5 * sig2,
    ];
    let roots = numeric::real_poly_roots(&coeffs).map_err(|_| CandidateError::BracketFailure)?;
    if roots.len() != 3 {
        return Err(CandidateError::BracketFailure);
    }
    let (c1, c2, c3) = (roots[0], roots[1], roots[2]);
    if !(c1 < -theta && -theta < c2 && c2 < 0.0 && 0.0 < c3) {
        return Err(CandidateError::BracketFailure);
    }
    Ok((c1, c2, c3))
}

/// A fully specified candidate: coefficients, free parameters, bands and the
/// cost slopes of its linear extensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateValueFunction {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub bands: BandPolicy,
    /// Tail integral `exp(-theta b) (f(b) + d/theta)` of the seventh equation.
    pub zeta: f64,
    pub costs: CostParams,
    rho: f64,
    lambda: f64,
    sigma: f64,
    theta: f64,
    /// Exponents `theta + c_i` of the candidate on `[a, b]`.
    exponents: [f64; 3],
}

/// Rejects models outside the solvable family.
pub fn require_band_model(model: &ModelParams) -> Result<(), CandidateError> {
    if model.sigma <= 0.0 {
        return Err(CandidateError::UnsupportedModel("sigma > 0"));
    }
    if model.jump_rate != 1.0 {
        return Err(CandidateError::UnsupportedModel("unit jump rate"));
    }
    if model.mu != 0.0 {
        return Err(CandidateError::UnsupportedModel("zero drift"));
    }
    Ok(())
}

impl CandidateValueFunction {
    pub fn new(
        model: &ModelParams,
        costs: &CostParams,
        bands: BandPolicy,
        l: [f64; 3],
    ) -> Result<Self, CandidateError> {
        require_band_model(model)?;
        let (k1, k2, k3) = particular_coefficients(model);
        let (c1, c2, c3) = characteristic_roots(model)?;
        let theta = model.jump_scale;
        let mut cand = CandidateValueFunction {
            k1,
            k2,
            k3,
            c1,
            c2,
            c3,
            l1: l[0],
            l2: l[1],
            l3: l[2],
            bands,
            zeta: 0.0,
            costs: *costs,
            rho: model.target,
            lambda: model.discount,
            sigma: model.sigma,
            theta,
            exponents: [theta + c1, theta + c2, theta + c3],
        };
        cand.zeta =
            (-theta * bands.b).exp() * (cand.f(bands.b, 0) + costs.prop_down / theta);
        Ok(cand)
    }

    /// The smooth component on `[a, b]`; derivative orders 0..=3.
    pub fn f(&self, x: f64, order: u8) -> f64 {
        let d = x - self.rho;
        let poly = match order {
            0 => self.k1 * d * d + self.k2 * d + self.k3,
            1 => 2.0 * self.k1 * d + self.k2,
            2 => 2.0 * self.k1,
            _ => 0.0,
        };
        let ls = [self.l1, self.l2, self.l3];
        let mut acc = poly;
        for (l, m) in ls.iter().zip(self.exponents) {
            acc += l * m.powi(order as i32) * (m * x).exp();
        }
        acc
    }

    /// The candidate value function with its linear extensions; `order` 0, 1
    /// or 2. Second derivatives at the band edges are rejected.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64, EvalError> {
        debug_assert!(order <= 2);
        let BandPolicy { a, b, .. } = self.bands;
        if order == 2 && (x == a || x == b) {
            return Err(EvalError::SecondDerivativeAtKink);
        }
        Ok(if x < a {
            match order {
                0 => self.f(a, 0) - self.costs.prop_up * (x - a),
                1 => -self.costs.prop_up,
                _ => 0.0,
            }
        } else if x > b {
            match order {
                0 => self.f(b, 0) + self.costs.prop_down * (x - b),
                1 => self.costs.prop_down,
                _ => 0.0,
            }
        } else {
            self.f(x, order)
        })
    }

    fn h(&self, x: f64) -> f64 {
        self.eval(x, 0).expect("order 0 never fails")
    }

    /// Interior roots of `f'(y) = slope` on `[a, b]`, by sign scan plus
    /// bisection refinement.
    fn slope_roots(&self, slope: f64) -> Vec<f64> {
        let BandPolicy { a, b, .. } = self.bands;
        let g = |y: f64| self.f(y, 1) - slope;
        let n = 600;
        let mut roots = Vec::new();
        let mut prev_y = a;
        let mut prev_g = g(a);
        for i in 1..=n {
            let y = a + (b - a) * i as f64 / n as f64;
            let gy = g(y);
            if prev_g == 0.0 {
                roots.push(prev_y);
            } else if prev_g.signum() != gy.signum() {
                if let Some(r) = numeric::bisect(&g, prev_y, y, 1e-13) {
                    roots.push(r);
                }
            }
            prev_y = y;
            prev_g = gy;
        }
        roots
    }

    /// The intervention operator
    /// `M h(x) = inf over nonzero moves of h(x + move) + move cost`, split
    /// into the up and down branches; inner infima are located at the
    /// stationarity slopes `-c` and `d` plus the piece endpoints.
    pub fn apply_m(&self, x: f64) -> f64 {
        let BandPolicy { a, b, .. } = self.bands;
        let c = self.costs.prop_up;
        let d = self.costs.prop_down;

        // Up branch: minimize h(y) + c y over y >= x (limit y -> x included).
        let mut up_candidates = vec![x, b.max(x)];
        if a > x {
            up_candidates.push(a);
        }
        for r in self.slope_roots(-c) {
            if r > x {
                up_candidates.push(r);
            }
        }
        let up = up_candidates
            .into_iter()
            .map(|y| self.h(y) + c * y)
            .fold(f64::INFINITY, f64::min);
        let b_up = self.costs.fixed_up + up - c * x;

        // Down branch: minimize h(y) - d y over y <= x.
        let mut down_candidates = vec![x, a.min(x)];
        if b < x {
            down_candidates.push(b);
        }
        for r in self.slope_roots(d) {
            if r < x {
                down_candidates.push(r);
            }
        }
        let down = down_candidates
            .into_iter()
            .map(|y| self.h(y) - d * y)
            .fold(f64::INFINITY, f64::min);
        let b_down = self.costs.fixed_down + down + d * x;

        b_up.min(b_down)
    }

    /// Generator of the uncontrolled process applied to the candidate:
    /// `sigma^2/2 h''(x) + mu h'(x) + jump_rate * E[h(x + J) - h(x)]` with
    /// `J ~ exponential(theta)`. The jump average is integrated piecewise
    /// (splitting at the band edges) with the linear tail in closed form.
    pub fn apply_generator(&self, model: &ModelParams, x: f64) -> Result<f64, EvalError> {
        let theta = model.jump_scale;
        let hpp = self.eval(x, 2)?;
        let hp = self.eval(x, 1)?;
        let hx = self.h(x);

        let jump_part = if model.jump_rate > 0.0 {
            let BandPolicy { a, b, .. } = self.bands;
            // Offsets where the integrand changes piece, then a linear tail.
            let tail_start = (b - x).max(0.0);
            let mut cuts = vec![0.0];
            if a - x > 0.0 && a - x < tail_start {
                cuts.push(a - x);
            }
            cuts.push(tail_start);
            let mut avg = 0.0;
            for seg in cuts.windows(2) {
                let (lo, hi) = (seg[0], seg[1]);
                avg += numeric::integrate(
                    &|y: f64| self.h(x + y) * theta * (-theta * y).exp(),
                    lo,
                    hi,
                    1e-11,
                );
            }
            // Beyond the band h is linear with slope d:
            // int_T^inf h(x+y) theta e^{-theta y} dy = e^{-theta T} (h(x+T) + d/theta).
            let h_at = self.f(b, 0) + self.costs.prop_down * (x + tail_start - b);
            avg += (-theta * tail_start).exp() * (h_at + self.costs.prop_down / theta);
            model.jump_rate * (avg - hx)
        } else {
            0.0
        };

        Ok(0.5 * model.sigma * model.sigma * hpp + model.mu * hp + jump_part)
    }

    /// `A h(x) - lambda h(x) + (x - rho)^2`: zero on `(a, b)` and
    /// non-negative outside at a true solution.
    pub fn qvi_residual(&self, model: &ModelParams, x: f64) -> Result<f64, EvalError> {
        Ok(self.apply_generator(model, x)? - model.discount * self.h(x)
            + model.opportunity_cost(x))
    }

    /// The model this candidate was constructed under (drift and jump rate
    /// are pinned by construction).
    pub fn model(&self) -> ModelParams {
        ModelParams {
            mu: 0.0,
            sigma: self.sigma,
            jump_rate: 1.0,
            jump_scale: self.theta,
            discount: self.lambda,
            target: self.rho,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn exponents(&self) -> [f64; 3] {
        self.exponents
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn sample_candidate() -> CandidateValueFunction {
        let bands = BandPolicy::new(-2.0, -1.0, 1.0, 2.0).unwrap();
        CandidateValueFunction::new(&model(), &costs(), bands, [-0.1, -0.2, -0.01]).unwrap()
    }

    #[test]
    fn particular_coefficients_examples() {
        let (k1, k2, k3) = particular_coefficients(&model());
        assert_eq!((k1, k2, k3), (1.0, 2.0, 5.0));
        let mut m = model();
        m.discount = 2.0;
        m.sigma = 0.0;
        let (_, _, k3) = particular_coefficients(&m);
        assert!((k3 - 0.75).abs() < 1e-15);
        for lambda in [0.3, 1.0, 2.5] {
            m.discount = lambda;
            let (k1, _, _) = particular_coefficients(&m);
            assert!((k1 * lambda - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn characteristic_roots_ordered_and_accurate() {
        let (c1, c2, c3) = characteristic_roots(&model()).unwrap();
        assert!(c1 < -1.0 && -1.0 < c2 && c2 < 0.0 && 0.0 < c3);
        let p = |x: f64| 0.5 * x.powi(3) + x * x + (0.5 - 2.0) * x - 1.0;
        for c in [c1, c2, c3] {
            assert!(p(c).abs() < 1e-12, "P({c}) = {}", p(c));
        }
        // Vieta: sum of roots = -sigma^2 theta / (sigma^2 / 2) = -2 theta.
        assert!((c1 + c2 + c3 + 2.0).abs() < 1e-10);
    }

    #[test]
    fn roots_match_bisection_oracle() {
        let m = model();
        let (c1, c2, c3) = characteristic_roots(&m).unwrap();
        let p = |x: f64| 0.5 * x.powi(3) + x * x - 1.5 * x - 1.0;
        let r1 = numeric::bisect(&p, -10.0, -1.0, 1e-13).unwrap();
        let r2 = numeric::bisect(&p, -1.0, 0.0, 1e-13).unwrap();
        let r3 = numeric::bisect(&p, 0.0, 10.0, 1e-13).unwrap();
        assert!((c1 - r1).abs() < 1e-10);
        assert!((c2 - r2).abs() < 1e-10);
        assert!((c3 - r3).abs() < 1e-10);
    }

    #[test]
    fn exponents_solve_discount_equation() {
        // theta + c_i solves psi(m) = lambda (for the two exponents inside the
        // domain of the exponent).
        let m = model();
        let cand = sample_candidate();
        for e in cand.exponents() {
            if e < m.jump_scale {
                let psi = m.laplace_exponent(e).unwrap();
                assert!((psi - m.discount).abs() < 1e-10, "psi({e}) = {psi}");
            }
        }
    }

    #[test]
    fn rejects_unsupported_models() {
        let mut m = model();
        m.sigma = 0.0;
        assert!(require_band_model(&m).is_err());
        let mut m = model();
        m.jump_rate = 2.0;
        assert!(require_band_model(&m).is_err());
        let mut m = model();
        m.mu = -1.0;
        assert!(require_band_model(&m).is_err());
    }

    #[test]
    fn linear_extensions_have_cost_slopes() {
        let cand = sample_candidate();
        assert_eq!(cand.eval(-3.0, 1).unwrap(), -0.1);
        assert_eq!(cand.eval(4.0, 1).unwrap(), 0.1);
        assert_eq!(cand.eval(-3.0, 2).unwrap(), 0.0);
        assert!(cand.eval(-2.0, 2).is_err());
        assert!(cand.eval(2.0, 2).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cand = sample_candidate();
        let h = 1e-6;
        for x in [-1.4, 0.3, 0.9] {
            let fd1 = (cand.f(x + h, 0) - cand.f(x - h, 0)) / (2.0 * h);
            assert!((fd1 - cand.f(x, 1)).abs() < 1e-7);
            let fd2 = (cand.f(x + h, 1) - cand.f(x - h, 1)) / (2.0 * h);
            assert!((fd2 - cand.f(x, 2)).abs() < 1e-6);
        }
    }

    #[test]
    fn generator_linear_tail_closed_form() {
        // To the right of the band the candidate is linear with slope d, so
        // A h = mu d + jump_rate * d / theta there (constants cancel).
        let m = model();
        let cand = sample_candidate();
        let expect = m.mu * 0.1 + m.jump_rate * 0.1 / m.jump_scale;
        for x in [2.5, 4.0, 7.0] {
            let got = cand.apply_generator(&m, x).unwrap();
            assert!((got - expect).abs() < 1e-9, "x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn generator_matches_brute_force_quadrature() {
        let m = model();
        let cand = sample_candidate();
        for x in [-1.5, 0.0, 1.2] {
            let direct = cand.apply_generator(&m, x).unwrap();
            // Independent route: one adaptive quadrature over a long truncated
            // range plus the analytic remainder of the linear tail.
            let theta = m.jump_scale;
            let y_max = 50.0;
            let avg = numeric::integrate(
                &|y: f64| cand.eval(x + y, 0).unwrap() * theta * (-theta * y).exp(),
                0.0,
                y_max,
                1e-12,
            ) + (-theta * y_max).exp()
                * (cand.eval(x + y_max, 0).unwrap() + cand.costs.prop_down / theta);
            let brute = 0.5 * m.sigma * m.sigma * cand.eval(x, 2).unwrap()
                + m.jump_rate * (avg - cand.eval(x, 0).unwrap());
            assert!((direct - brute).abs() < 1e-8, "x={x}: {direct} vs {brute}");
        }
    }

    #[test]
    fn m_operator_bounded_by_any_member() {
        let cand = sample_candidate();
        for x in [-1.5, 0.0, 0.7, 3.0] {
            let m_val = cand.apply_m(x);
            let member = cand.eval(x + 1.0, 0).unwrap() + cand.costs.intervention_cost(1.0);
            assert!(m_val <= member + 1e-12);
            let member = cand.eval(x - 0.7, 0).unwrap() + cand.costs.intervention_cost(-0.7);
            assert!(m_val <= member + 1e-12);
        }
    }
}
