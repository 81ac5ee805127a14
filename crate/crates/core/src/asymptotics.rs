//! Stationary-phase asymptotics: the simple stationary-point formula, the
//! uniform Chester-Friedman-Ursell formula for two coalescing points, and
//! Berry's semiclassical Wigner function of a WKB state.
//!
//! Integrals are I(lambda) = int f(x) e^{i lambda phi(x)} dx.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, domain, Error, Result};
use crate::schrodinger::{check_epsilon, InitialData};
use crate::specialfn::airy_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Simple,
    Double,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub location: f64,
    pub phase_value: f64,
    pub second_derivative: f64,
    pub kind: PointKind,
}

/// Threshold on |phi''| below which a point counts as degenerate.
pub fn degeneracy_threshold(lambda: f64) -> f64 {
    1e-8 * lambda.cbrt()
}

fn d1<P: Fn(f64) -> f64>(phase: &P, x: f64) -> f64 {
    let h = 1e-5 * (1.0 + x.abs());
    (phase(x - 2.0 * h) - 8.0 * phase(x - h) + 8.0 * phase(x + h) - phase(x + 2.0 * h)) / (12.0 * h)
}

fn d2<P: Fn(f64) -> f64>(phase: &P, x: f64) -> f64 {
    let h = 1e-3 * (1.0 + x.abs());
    (-phase(x - 2.0 * h) + 16.0 * phase(x - h) - 30.0 * phase(x) + 16.0 * phase(x + h) - phase(x + 2.0 * h))
        / (12.0 * h * h)
}

fn d3<P: Fn(f64) -> f64>(phase: &P, x: f64) -> f64 {
    let h = 1e-2 * (1.0 + x.abs());
    (phase(x + 2.0 * h) - 2.0 * phase(x + h) + 2.0 * phase(x - h) - phase(x - 2.0 * h)) / (2.0 * h * h * h)
}

impl StationaryPoint {
    /// Point with analytically known data.
    pub fn new(location: f64, phase_value: f64, second_derivative: f64, lambda: f64) -> Self {
        let kind = if second_derivative.abs() > degeneracy_threshold(lambda) {
            PointKind::Simple
        } else {
            PointKind::Double
        };
        Self {
            location,
            phase_value,
            second_derivative,
            kind,
        }
    }

    /// Point at `location` with phase data from finite differences.
    pub fn at<P: Fn(f64) -> f64>(phase: &P, location: f64, lambda: f64) -> Self {
        Self::new(location, phase(location), d2(phase, location), lambda)
    }
}

/// Real stationary points of `phase` in [a, b] by sign changes of phi' on a
/// uniform sample and bisection. Near-zero minima of |phi'| without a sign
/// change are reported as complex pairs.
pub fn find_stationary_points<P>(phase: P, lambda: f64, a: f64, b: f64) -> Result<Vec<StationaryPoint>>
where
    P: Fn(f64) -> f64,
{
    check_finite("a", a)?;
    check_finite("b", b)?;
    if !(b > a) {
        return domain(format!("search interval requires a < b, got [{a}, {b}]"));
    }
    let n = 4000;
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * f64::from(i) / f64::from(n)).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| d1(&phase, x)).collect();
    let scale = ds.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-300);
    let mut out = Vec::new();
    for i in 0..n as usize {
        if ds[i] == 0.0 || ds[i] * ds[i + 1] < 0.0 {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            let slo = ds[i].signum();
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if d1(&phase, mid).signum() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(StationaryPoint::at(&phase, 0.5 * (lo + hi), lambda));
        } else if i > 0
            && ds[i].abs() < ds[i - 1].abs()
            && ds[i].abs() < ds[i + 1].abs()
            && ds[i - 1] * ds[i + 1] > 0.0
            && ds[i].abs() < 1e-3 * scale
        {
            let mut p = StationaryPoint::at(&phase, xs[i], lambda);
            p.kind = PointKind::ComplexPair;
            out.push(p);
        }
    }
    Ok(out)
}

/// f(c) e^{i lambda phi(c) + i delta pi/4} sqrt(2 pi/(lambda |phi''(c)|)), delta = sign phi''(c).
pub fn stationary_phase_simple<A>(amplitude: A, lambda: f64, point: &StationaryPoint) -> Result<Complex64>
where
    A: Fn(f64) -> f64,
{
    if point.kind != PointKind::Simple {
        return Err(Error::Degenerate(format!(
            "phi''({}) = {:e} is degenerate; use the uniform (CFU) formula",
            point.location, point.second_derivative
        )));
    }
    let s = point.second_derivative;
    let mag = amplitude(point.location) * (2.0 * PI / (lambda * s.abs())).sqrt();
    Ok(Complex64::from_polar(mag, lambda * point.phase_value + s.signum() * PI / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfuData {
    pub phi0: f64,
    pub xi: f64,
    pub a0: f64,
    pub b0: f64,
}

/// Coefficients of the uniform formula for stationary points x1 (phi'' < 0)
/// and x2 (phi'' > 0). When lambda^{2/3} xi is below 1e-8 the coalesced limits
/// A0 = f (2/|phi'''|)^{1/3}, B0 = f' sign(phi''') (2/|phi'''|)^{2/3} are used.
pub fn cfu_data<A, P>(amplitude: A, phase: P, lambda: f64, x1: &StationaryPoint, x2: &StationaryPoint) -> Result<CfuData>
where
    A: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let coalesced = (x1.location - x2.location).abs() < 1e-12 * (1.0 + x1.location.abs());
    if !coalesced && !(x1.second_derivative < 0.0 && x2.second_derivative > 0.0) {
        return domain("CFU requires phi''(x1) < 0 < phi''(x2)");
    }
    let diff = x1.phase_value - x2.phase_value;
    if diff < 0.0 {
        return domain(format!(
            "negative radicand {diff:e} in xi: the stationary points are complex"
        ));
    }
    let xi = (0.75 * diff).powf(2.0 / 3.0);
    let phi0 = 0.5 * (x1.phase_value + x2.phase_value);
    if coalesced || lambda.powf(2.0 / 3.0) * xi < 1e-8 {
        let x0 = 0.5 * (x1.location + x2.location);
        let c = d3(&phase, x0);
        if c == 0.0 {
            return Err(Error::Degenerate("phi''' vanishes at the coalescence point".into()));
        }
        let h = 1e-4 * (1.0 + x0.abs());
        let fp = (amplitude(x0 + h) - amplitude(x0 - h)) / (2.0 * h);
        let r = 2.0 / c.abs();
        return Ok(CfuData {
            phi0: phase(x0),
            xi: 0.0,
            a0: amplitude(x0) * r.cbrt(),
            b0: fp * c.signum() * r.powf(2.0 / 3.0),
        });
    }
    let g1 = amplitude(x1.location) / x1.second_derivative.abs().sqrt();
    let g2 = amplitude(x2.location) / x2.second_derivative.abs().sqrt();
    let q = xi.powf(0.25);
    Ok(CfuData {
        phi0,
        xi,
        a0: std::f64::consts::FRAC_1_SQRT_2 * q * (g1 + g2),
        b0: -std::f64::consts::FRAC_1_SQRT_2 / q * (g1 - g2),
    })
}

/// Evaluates e^{i lambda phi0}[2 pi A0 lambda^{-1/3} Ai(-lambda^{2/3} xi) - 2 pi i B0 lambda^{-2/3} Ai'(-lambda^{2/3} xi)].
pub fn cfu_evaluate(d: &CfuData, lambda: f64) -> Complex64 {
    let ai = airy_unchecked(-lambda.powf(2.0 / 3.0) * d.xi);
    let main = Complex64::new(2.0 * PI * d.a0 * lambda.powf(-1.0 / 3.0) * ai.ai, 0.0);
    let corr = Complex64::new(0.0, -2.0 * PI * d.b0 * lambda.powf(-2.0 / 3.0) * ai.ai_prime);
    Complex64::from_polar(1.0, lambda * d.phi0) * (main + corr)
}

/// Leading-order uniform approximation of I(lambda) for two real stationary points.
pub fn cfu_uniform<A, P>(amplitude: A, phase: P, lambda: f64, x1: &StationaryPoint, x2: &StationaryPoint) -> Result<Complex64>
where
    A: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let d = cfu_data(amplitude, phase, lambda, x1, x2)?;
    Ok(cfu_evaluate(&d, lambda))
}

/// Derivatives of phi(x, alpha) at the coalescence point x = 0, alpha = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalescenceDerivatives {
    pub phi_xa: f64,
    pub phi_xxx: f64,
    pub phi_at_origin: f64,
}

/// Uniform formula with the small-alpha substitutions
/// xi = -phi_xa (phi_xxx/2)^{-1/3} alpha and A0 = (2/|phi_xxx|)^{1/3} f(0), B0 = 0.
/// A negative xi gives the formal exponentially small continuation.
pub fn cfu_near_coalescence(d: &CoalescenceDerivatives, amplitude_at_origin: f64, alpha: f64, lambda: f64) -> Result<Complex64> {
    if d.phi_xxx == 0.0 {
        return Err(Error::Degenerate("phi_xxx = 0 at the coalescence point".into()));
    }
    let xi = -d.phi_xa * (d.phi_xxx / 2.0).cbrt().recip() * alpha;
    let data = CfuData {
        phi0: d.phi_at_origin,
        xi,
        a0: (2.0 / d.phi_xxx.abs()).cbrt() * amplitude_at_origin,
        b0: 0.0,
    };
    Ok(cfu_evaluate(&data, lambda))
}

/// Berry's semiclassical Wigner function from local data A(x), S'(x), S'''(x):
/// (2^{2/3}/eps^{2/3}) (2/|S'''|)^{1/3} A^2 Ai(-(2^{2/3}/eps^{2/3}) (2/S''')^{1/3} (p - S')).
pub fn berry_from_local(amplitude: f64, s1: f64, s3: f64, epsilon: f64, p: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if s3 == 0.0 || !s3.is_finite() {
        return Err(Error::Degenerate("S''' = 0: use the delta-line form for quadratic phases".into()));
    }
    let c = 2f64.powf(2.0 / 3.0) / epsilon.powf(2.0 / 3.0);
    let r = (2.0 / s3).cbrt();
    Ok(c * r.abs() * amplitude * amplitude * airy_unchecked(-c * r * (p - s1)).ai)
}

/// Berry's semiclassical Wigner function of the WKB datum at (x, p).
pub fn berry_semiclassical_wigner(data: &InitialData, x: f64, p: f64) -> Result<f64> {
    check_finite("x", x)?;
    check_finite("p", p)?;
    berry_from_local(
        data.amplitude.value(x),
        data.phase.derivative(1, x),
        data.phase.derivative(3, x),
        data.epsilon,
        p,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::oscillatory_integral_line;
    use crate::schrodinger::{Amplitude, Phase};
    use crate::specialfn::airy_ai;

    fn canonical(alpha: f64) -> impl Fn(f64) -> f64 {
        move |x: f64| x * x * x / 3.0 - alpha * x
    }

    fn canonical_points(alpha: f64, lambda: f64) -> (StationaryPoint, StationaryPoint) {
        let r = alpha.sqrt();
        let phi = canonical(alpha);
        (
            StationaryPoint::new(-r, phi(-r), -2.0 * r, lambda),
            StationaryPoint::new(r, phi(r), 2.0 * r, lambda),
        )
    }

    #[test]
    fn simple_formula_against_oracle() {
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let lambda = 100.0;
        let point = StationaryPoint::new(0.0, 0.0, 2.0, lambda);
        let sp = stationary_phase_simple(f, lambda, &point).unwrap();
        assert!((sp - Complex64::from_polar((PI / 100.0).sqrt(), PI / 4.0)).norm() < 1e-14);
        let oracle = oscillatory_integral_line(|x| Complex64::new(f(x), 0.0), |x| x * x, lambda, -10.0, 10.0, 1e-10).unwrap();
        assert!((sp - oracle.value).norm() / oracle.value.norm() <= 2e-2);
    }

    #[test]
    fn simple_formula_conjugates_for_negative_curvature() {
        let p1 = StationaryPoint::new(0.0, 0.0, 2.0, 50.0);
        let p2 = StationaryPoint::new(0.0, 0.0, -2.0, 50.0);
        let a = stationary_phase_simple(|_| 1.0, 50.0, &p1).unwrap();
        let b = stationary_phase_simple(|_| 1.0, 50.0, &p2).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn simple_formula_rejects_degenerate() {
        let p = StationaryPoint::new(0.0, 0.0, 0.0, 50.0);
        assert!(matches!(stationary_phase_simple(|_| 1.0, 50.0, &p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn simple_formula_fresnel_limit() {
        let mut last = f64::INFINITY;
        for lambda in [1e2, 1e3, 1e4] {
            let p = StationaryPoint::new(0.0, 0.0, 2.0, lambda);
            let sp = stationary_phase_simple(|_| 1.0, lambda, &p).unwrap();
            let o = oscillatory_integral_line(|_| Complex64::new(1.0, 0.0), |x| x * x, lambda, -3.0, 3.0, 1e-11).unwrap();
            let err = (sp / o.value - 1.0).norm();
            assert!(err <= last.max(1e-9));
            last = err;
        }
    }

    #[test]
    fn finds_canonical_points() {
        let pts = find_stationary_points(canonical(0.25), 100.0, -3.0, 3.0).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].location + 0.5).abs() < 1e-9 && (pts[1].location - 0.5).abs() < 1e-9);
        assert!(pts[0].second_derivative < 0.0 && pts[1].second_derivative > 0.0);
        let complex = find_stationary_points(|x: f64| x * x * x / 3.0 + 1e-4 * x, 100.0, -1.0, 1.0).unwrap();
        assert!(complex.iter().any(|p| p.kind == PointKind::ComplexPair));
    }

    #[test]
    fn cfu_canonical_exact() {
        let lambda = 100.0;
        for alpha in [0.05, 0.25, 1.0] {
            let (x1, x2) = canonical_points(alpha, lambda);
            let v = cfu_uniform(|_| 1.0, canonical(alpha), lambda, &x1, &x2).unwrap();
            let exact = 2.0 * PI * lambda.powf(-1.0 / 3.0) * airy_ai(-lambda.powf(2.0 / 3.0) * alpha).unwrap();
            assert!((v - Complex64::new(exact, 0.0)).norm() <= 1e-12 * exact.abs().max(1e-3));
            let d = cfu_data(|_| 1.0, canonical(alpha), lambda, &x1, &x2).unwrap();
            assert!((d.xi - alpha).abs() < 1e-12 && (d.a0 - 1.0).abs() < 1e-12 && d.b0.abs() < 1e-12);
        }
    }

    #[test]
    fn cfu_linear_amplitude_uses_derivative_term() {
        let lambda = 100.0;
        let alpha = 0.3;
        let (x1, x2) = canonical_points(alpha, lambda);
        let v = cfu_uniform(|x| x, canonical(alpha), lambda, &x1, &x2).unwrap();
        let exact = Complex64::new(0.0, -2.0 * PI * lambda.powf(-2.0 / 3.0))
            * crate::specialfn::airy_ai_prime(-lambda.powf(2.0 / 3.0) * alpha).unwrap();
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn cfu_sign_and_radicand_errors() {
        let (x1, x2) = canonical_points(0.25, 100.0);
        assert!(cfu_uniform(|_| 1.0, canonical(0.25), 100.0, &x2, &x1).is_err());
        let mut bad = x1;
        bad.phase_value = x2.phase_value - 1.0;
        assert!(cfu_uniform(|_| 1.0, canonical(0.25), 100.0, &bad, &x2).is_err());
    }

    #[test]
    fn cfu_continuous_through_coalescence() {
        let lambda = 100.0;
        let f = |x: f64| (0.5 * x).exp() / (1.0 + x * x);
        let at = |alpha: f64| {
            let (x1, x2) = canonical_points(alpha, lambda);
            cfu_uniform(f, canonical(alpha), lambda, &x1, &x2).unwrap()
        };
        let limit = at(0.0);
        let near = at(1e-4);
        assert!((near - limit).norm() / limit.norm() <= 2.0 * lambda.powf(2.0 / 3.0) * 1e-4);
        let mut prev = at(1e-2);
        let mut alpha = 1e-2;
        while alpha > 1e-9 {
            let step = 0.3 * alpha;
            alpha -= step;
            let cur = at(alpha);
            assert!((cur - prev).norm() / prev.norm() <= 2.0 * lambda.powf(2.0 / 3.0) * step + 1e-7);
            prev = cur;
        }
        let tiny = at(1e-12);
        assert!((tiny - limit).norm() / limit.norm() < 1e-6);
    }

    #[test]
    fn cfu_far_field_matches_simple_terms() {
        let lambda = 100.0;
        let alpha = 1.0;
        let (x1, x2) = canonical_points(alpha, lambda);
        assert!(lambda.powf(2.0 / 3.0) * alpha >= 10.0);
        let u = cfu_uniform(|_| 1.0, canonical(alpha), lambda, &x1, &x2).unwrap();
        let s = stationary_phase_simple(|_| 1.0, lambda, &x1).unwrap() + stationary_phase_simple(|_| 1.0, lambda, &x2).unwrap();
        assert!((u - s).norm() / u.norm() <= 10.0 / lambda);
    }

    #[test]
    fn near_coalescence_formula() {
        let d = CoalescenceDerivatives {
            phi_xa: -1.0,
            phi_xxx: 2.0,
            phi_at_origin: 0.0,
        };
        let v = cfu_near_coalescence(&d, 1.0, 0.0, 100.0).unwrap();
        assert!((v.re - 2.0 * PI * 100f64.powf(-1.0 / 3.0) * crate::specialfn::AI0).abs() < 1e-14);
        let lambda = 200.0;
        let (x1, x2) = canonical_points(0.01, lambda);
        let u = cfu_uniform(|_| 1.0, canonical(0.01), lambda, &x1, &x2).unwrap();
        let n = cfu_near_coalescence(&d, 1.0, 0.01, lambda).unwrap();
        assert!((u - n).norm() / u.norm() <= 1e-3);
        let neg = CoalescenceDerivatives {
            phi_xa: 1.0,
            phi_xxx: -2.0,
            phi_at_origin: -0.3,
        };
        let pos = CoalescenceDerivatives {
            phi_xa: -1.0,
            phi_xxx: 2.0,
            phi_at_origin: 0.3,
        };
        let a = cfu_near_coalescence(&pos, 0.8, 0.02, lambda).unwrap();
        let b = cfu_near_coalescence(&neg, 0.8, 0.02, lambda).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        let zero = CoalescenceDerivatives { phi_xxx: 0.0, ..pos };
        assert!(cfu_near_coalescence(&zero, 1.0, 0.0, lambda).is_err());
    }

    fn cubic_unit(eps: f64) -> InitialData {
        InitialData::new(Amplitude::Unit, Phase::Cubic, eps).unwrap()
    }

    #[test]
    fn berry_on_curve_and_decay() {
        let eps = 0.01;
        let data = cubic_unit(eps);
        let x = 1.0;
        let v = berry_semiclassical_wigner(&data, x, -0.5 * x * x).unwrap();
        let expect = 2f64.powf(2.0 / 3.0) / eps.powf(2.0 / 3.0) * 2f64.cbrt() * crate::specialfn::AI0;
        assert!((v - expect).abs() < 1e-12 * expect);
        assert!(berry_semiclassical_wigner(&data, x, 5.0).unwrap().abs() < 1e-8);
        let quad = InitialData::new(Amplitude::Unit, Phase::Quadratic { sign: 1.0 }, eps).unwrap();
        assert!(matches!(berry_semiclassical_wigner(&quad, 0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn berry_scaling_collapse() {
        let x = 0.7;
        let s1 = -0.5 * x * x;
        for z in [-1.5, -0.3, 0.8] {
            let a = berry_semiclassical_wigner(&cubic_unit(0.01), x, s1 + z * 0.01f64.powf(2.0 / 3.0)).unwrap() * 0.01f64.powf(2.0 / 3.0);
            let b = berry_semiclassical_wigner(&cubic_unit(0.001), x, s1 + z * 0.001f64.powf(2.0 / 3.0)).unwrap() * 0.001f64.powf(2.0 / 3.0);
            assert!((a - b).abs() < 1e-12 * a.abs().max(1e-3));
        }
    }

    #[test]
    fn berry_marginal_is_intensity() {
        let data = InitialData::new(Amplitude::Gaussian, Phase::Cubic, 0.01).unwrap();
        let x = 0.4;
        let r = crate::quadrature::integrate_real(|p| berry_semiclassical_wigner(&data, x, p).unwrap(), -6.0, 3.0, 1e-12).unwrap();
        let a2 = data.amplitude.value(x).powi(2);
        assert!((r - a2).abs() < 0.01f64.cbrt() * a2);
    }
}
