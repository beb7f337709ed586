//! Small numerical kernels shared across modules: polynomial root finding,
//! adaptive quadrature and bracketed bisection.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is identically degenerate (all leading coefficients ~ 0)")]
    Degenerate,
    #[error("complex root pair encountered where real roots were expected (im = {0})")]
    ComplexPair(f64),
    #[error("root polish did not reach residual tolerance (residual = {0})")]
    PolishFailed(f64),
}

/// Real roots of a polynomial with ascending coefficients `p[0] + p[1] x + ...`,
/// degree at most 3. Roots come from the companion-matrix eigenvalues and are
/// then polished by Newton until the residual, scaled by the leading
/// coefficient, drops below 1e-12. Returned sorted ascending.
pub fn real_poly_roots(coeffs: &[f64]) -> Result<Vec<f64>, RootError> {
    let mut c = coeffs.to_vec();
    while let Some(&last) = c.last() {
        if last == 0.0 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let n = c.len() - 1;
    if n == 0 {
        return Err(RootError::Degenerate);
    }
    let lead = c[n];
    if lead == 0.0 || !lead.is_finite() {
        return Err(RootError::Degenerate);
    }
    if n == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }

    // Companion matrix of the monic polynomial.
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let eig = m.complex_eigenvalues();

    let scale: f64 = c.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    let mut roots = Vec::with_capacity(n);
    for ev in eig.iter() {
        if ev.im.abs() > 1e-6 * (1.0 + ev.re.abs()) {
            return Err(RootError::ComplexPair(ev.im));
        }
        roots.push(polish_root(&c, ev.re, scale)?);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

fn poly_eval(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn polish_root(coeffs: &[f64], mut x: f64, scale: f64) -> Result<f64, RootError> {
    let tol = 1e-12 * scale * (1.0 + x.abs()).powi((coeffs.len() - 1) as i32);
    for _ in 0..60 {
        let (p, dp) = poly_eval(coeffs, x);
        if p.abs() <= tol {
            return Ok(x);
        }
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    let (p, _) = poly_eval(coeffs, x);
    if p.abs() <= tol.max(1e-10 * scale) {
        Ok(x)
    } else {
        Err(RootError::PolishFailed(p.abs() / scale))
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Pairwise summation with a fixed reduction tree: the result depends only on
/// the slice contents, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must differ in sign.
/// Used both as a solver for interior stationarity equations and as the
/// independent root oracle in tests.
pub fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() <= tol {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
