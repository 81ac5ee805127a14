//! Brute-force integration oracles: adaptive Gauss-Kronrod quadrature for
//! (oscillatory) 1-D integrands and trapezoidal inner products on 2-D grids.

mod gk;
mod grid;

pub use gk::{integrate_adaptive, QuadOptions};
pub use grid::{inner_product_2d, Field2D, Grid2D};

use num_complex::Complex64;

use crate::error::{check_finite, domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// Radius of the finite window used for an infinite range, if any.
    pub truncation_radius: Option<f64>,
}

/// Adaptive integral of `f` over [a, b] to absolute tolerance `tol`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    check_interval(a, b, tol)?;
    integrate_adaptive(&f, &[a, b], &QuadOptions::absolute(tol))
}

/// Real-valued convenience wrapper around [`integrate_1d`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_1d(|x| Complex64::new(f(x), 0.0), a, b, tol).map(|r| r.value.re)
}

/// Ground-truth value of int_a^b f(x) exp(i lambda phi(x)) dx.
///
/// Initial panels satisfy lambda |phi'| w <= 3 before adaptive refinement starts.
pub fn oscillatory_integral<A, P>(
    amplitude: A,
    phase: P,
    lambda: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    check_interval(a, b, tol)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive and finite, got {lambda}"));
    }
    let panels = oscillation_panels(&phase, lambda, a, b)?;
    let f = |x: f64| amplitude(x) * Complex64::from_polar(1.0, lambda * phase(x));
    integrate_adaptive(&f, &panels, &QuadOptions::absolute(tol))
}

/// Oscillatory integral over the whole real line for amplitudes that need not
/// decay. The window [a, b] is integrated by quadrature and the two tails are
/// added by a two-term integration-by-parts expansion, which requires phi' to
/// stay away from zero outside the window.
pub fn oscillatory_integral_line<A, P>(
    amplitude: A,
    phase: P,
    lambda: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let mut r = oscillatory_integral(&amplitude, &phase, lambda, a, b, tol)?;
    let upper = ibp_tail(&amplitude, &phase, lambda, b)?;
    let lower = ibp_tail(&amplitude, &phase, lambda, a)?;
    r.value += -upper + lower;
    r.evaluations += 16;
    r.truncation_radius = Some(a.abs().max(b.abs()));
    Ok(r)
}

/// Boundary term B(c) with int_c^inf g e^{i lambda phi} = -B(c) + O(lambda^-3).
fn ibp_tail<A, P>(g: &A, phi: &P, lambda: f64, c: f64) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let h = 1e-3 * c.abs().max(1.0);
    let dphi = |x: f64| (phi(x + h) - phi(x - h)) / (2.0 * h);
    let w = |x: f64| 1.0 / (Complex64::i() * lambda * dphi(x));
    let d = dphi(c);
    if d.abs() * lambda < 1.0 {
        return domain(format!("phase is stationary near the truncation point {c}"));
    }
    let gw = |x: f64| g(x) * w(x);
    let dgw = (gw(c + h) - gw(c - h)) / (2.0 * h);
    let value = Complex64::from_polar(1.0, lambda * phi(c)) * w(c) * (g(c) - dgw);
    if !value.re.is_finite() || !value.im.is_finite() {
        return domain("non-finite tail correction");
    }
    Ok(value)
}

/// Integral over the real line of `f`, truncated symmetrically about `center`
/// where the envelope falls below tol/100 on both sides.
pub fn integrate_line<F, E>(f: F, envelope: E, center: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
    E: Fn(f64) -> f64,
{
    let radius = truncation_radius(&envelope, center, tol)?;
    let mut r = integrate_1d(f, center - radius, center + radius, tol)?;
    r.truncation_radius = Some(radius);
    Ok(r)
}

/// Smallest radius R = 2^k such that the envelope is below tol/100 at every
/// sample of [R, 2R] on both sides of `center`.
pub fn truncation_radius<E>(envelope: &E, center: f64, tol: f64) -> Result<f64>
where
    E: Fn(f64) -> f64,
{
    let floor = tol / 100.0;
    let mut r = 1.0;
    for _ in 0..40 {
        let quiet = (0..=32).all(|i| {
            let y = r * (1.0 + i as f64 / 32.0);
            envelope(center + y) < floor && envelope(center - y) < floor
        });
        if quiet {
            return Ok(2.0 * r);
        }
        r *= 2.0;
    }
    domain("integrand envelope does not decay; cannot truncate the infinite range")
}

/// Breakpoints for [a, b] such that lambda |phi'| w <= 3 on every panel.
fn oscillation_panels<P: Fn(f64) -> f64>(phase: &P, lambda: f64, a: f64, b: f64) -> Result<Vec<f64>> {
    const MAX_PANELS: usize = 4_000_000;
    let len = b - a;
    let h = 1e-7 * len.max(1e-3);
    let dphi = |x: f64| {
        let lo = (x - h).max(a);
        let hi = (x + h).min(b);
        ((phase(hi) - phase(lo)) / (hi - lo)).abs()
    };
    let mut points = vec![a];
    let mut x = a;
    let max_w = len / 4.0;
    while x < b {
        let mut w = max_w;
        for _ in 0..4 {
            let rate = lambda * dphi(x).max(dphi((x + w).min(b))).max(dphi((x + 0.5 * w).min(b)));
            let target = if rate > 0.0 { 3.0 / rate } else { max_w };
            if target >= w {
                break;
            }
            w = target;
        }
        x = (x + w).min(b);
        if b - x < 1e-12 * len {
            x = b;
        }
        points.push(x);
        if points.len() > MAX_PANELS {
            return domain("oscillation too fast for the panel budget");
        }
    }
    Ok(points)
}

fn check_interval(a: f64, b: f64, tol: f64) -> Result<()> {
    check_finite("lower limit", a)?;
    check_finite("upper limit", b)?;
    if !(a < b) {
        return domain(format!("integration interval requires a < b, got [{a}, {b}]"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

impl QuadratureResult {
    /// Value if converged; the best estimate from a non-convergence error otherwise.
    pub fn value_or_best(r: Result<QuadratureResult>) -> Result<Complex64> {
        match r {
            Ok(r) => Ok(r.value),
            Err(Error::NoConvergence { estimate, .. }) => Ok(estimate),
            Err(e) => Err(e),
        }
    }
}
