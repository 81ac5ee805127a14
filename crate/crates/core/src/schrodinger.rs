//! Configuration-space layer: exact harmonic-oscillator eigenstates, WKB
//! eigenfunctions, Bohr-Sommerfeld quantization for single wells, initial
//! data of WKB type and the eigenfunction-series solution of the
//! Schrodinger Cauchy problem.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_finite, domain, Error, Result};
use crate::quadrature::{integrate_1d, integrate_adaptive, integrate_real, truncation_radius, QuadOptions};
use crate::specialfn::hermite_function;

/// Which energy enters asymptotic formulas: the exact (n + 1/2) eps or the
/// large-n identification n eps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyConvention {
    #[default]
    HalfInteger,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenState {
    pub n: u32,
    pub energy: f64,
    pub epsilon: f64,
}

impl EigenState {
    /// Largest index supported by the closed-form evaluators.
    pub const MAX_INDEX: u32 = 200;

    /// Harmonic-oscillator state with E = (n + 1/2) eps.
    pub fn harmonic(n: u32, epsilon: f64) -> Result<Self> {
        Self::with_convention(n, epsilon, EnergyConvention::HalfInteger)
    }

    pub fn with_convention(n: u32, epsilon: f64, convention: EnergyConvention) -> Result<Self> {
        check_epsilon(epsilon)?;
        let shift = match convention {
            EnergyConvention::HalfInteger => 0.5,
            EnergyConvention::Integer => 0.0,
        };
        Ok(Self {
            n,
            energy: (f64::from(n) + shift) * epsilon,
            epsilon,
        })
    }

    /// Classical turning point sqrt(2E).
    pub fn turning_point(&self) -> f64 {
        (2.0 * self.energy).sqrt()
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        domain(format!("epsilon must be positive and finite, got {epsilon}"))
    }
}

/// Normalized harmonic-oscillator eigenfunction
/// v_n(x) = e^{-x^2/2eps} H_n(x/sqrt(eps)) / ((pi eps)^{1/4} sqrt(2^n n!)).
pub fn exact_eigenfunction(state: &EigenState, x: f64) -> Result<f64> {
    if state.n > EigenState::MAX_INDEX {
        return domain(format!(
            "eigenfunction index {} exceeds the cap {}",
            state.n,
            EigenState::MAX_INDEX
        ));
    }
    check_epsilon(state.epsilon)?;
    check_finite("x", x)?;
    Ok(eigenfunction_unchecked(state.n, state.epsilon, x))
}

pub(crate) fn eigenfunction_unchecked(n: u32, epsilon: f64, x: f64) -> f64 {
    let s = epsilon.sqrt();
    hermite_function(n, x / s) / s.sqrt()
}

/// Two-phase WKB decomposition of a harmonic-oscillator eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbPieces {
    pub n: u32,
    pub energy: f64,
    pub epsilon: f64,
    pub turning_points: (f64, f64),
}

impl WkbPieces {
    pub fn harmonic(state: &EigenState) -> Self {
        let a = state.turning_point();
        Self {
            n: state.n,
            energy: state.energy,
            epsilon: state.epsilon,
            turning_points: (-a, a),
        }
    }

    fn a(&self) -> f64 {
        self.turning_points.1
    }

    /// Real amplitude (1/2) sqrt(2/pi) (2E - x^2)^{-1/4} shared by both phases.
    pub fn amplitude(&self, x: f64) -> f64 {
        0.5 * (2.0 / PI).sqrt() * (2.0 * self.energy - x * x).powf(-0.25)
    }

    pub fn amplitude_plus(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude(x), PI / 4.0)
    }

    pub fn amplitude_minus(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude(x), -PI / 4.0)
    }

    /// S+(x) = integral from the right turning point to x of sqrt(2E - t^2).
    pub fn phase_plus(&self, x: f64) -> f64 {
        let a = self.a();
        let xc = x.clamp(-a, a);
        let r = (a * a - xc * xc).max(0.0).sqrt();
        0.5 * (xc * r + a * a * (xc / a).clamp(-1.0, 1.0).asin()) - a * a * PI / 4.0
    }

    pub fn phase_minus(&self, x: f64) -> f64 {
        -self.phase_plus(x)
    }

    /// Exponentially decaying form outside the well, continuous in order of
    /// magnitude with the interior cosine form.
    pub fn tail(&self, x: f64) -> f64 {
        let a = self.a();
        let z = x.abs();
        let r = (z * z - a * a).max(0.0).sqrt();
        let action = 0.5 * (z * r - a * a * ((z + r) / a).ln());
        let v = (2.0 * PI).powf(-0.5) * r.powf(-0.5) * (-action / self.epsilon).exp();
        if x < 0.0 && self.n % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Interior cosine form sqrt(2/pi) (2E - x^2)^{-1/4} cos(S/eps + pi/4).
    pub fn interior(&self, x: f64) -> f64 {
        2.0 * self.amplitude(x) * (self.phase_plus(x) / self.epsilon + PI / 4.0).cos()
    }
}

/// Default turning-point margin eps^{2/3}.
pub fn turning_margin(epsilon: f64) -> f64 {
    epsilon.powf(2.0 / 3.0)
}

/// Region-dispatched WKB approximation of v_n with the default margin.
pub fn wkb_eigenfunction(state: &EigenState, x: f64) -> Result<f64> {
    wkb_eigenfunction_with_margin(state, x, turning_margin(state.epsilon))
}

pub fn wkb_eigenfunction_with_margin(state: &EigenState, x: f64, margin: f64) -> Result<f64> {
    check_finite("x", x)?;
    let w = WkbPieces::harmonic(state);
    let a = w.a();
    if (x.abs() - a).abs() < margin {
        return domain(format!(
            "x = {x} lies within the turning-point margin {margin} of +-{a}"
        ));
    }
    Ok(if x.abs() < a { w.interior(x) } else { w.tail(x) })
}

/// Energy E with int_{x-}^{x+} sqrt(2(E - V)) dx = pi (n + 1/2) eps for a
/// single-well potential, searched inside `bracket`.
pub fn bohr_sommerfeld<V>(potential: V, n: u32, epsilon: f64, bracket: (f64, f64)) -> Result<f64>
where
    V: Fn(f64) -> f64,
{
    check_epsilon(epsilon)?;
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) {
        return Err(Error::NotBracketed(format!("empty energy bracket [{lo}, {hi}]")));
    }
    let x0 = well_minimum(&potential);
    let target = PI * (f64::from(n) + 0.5) * epsilon;
    let f = |e: f64| -> Result<f64> { Ok(action_integral(&potential, x0, e)? - target) };
    let (mut flo, fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > 0.0 {
        return Err(Error::NotBracketed(format!(
            "action minus target has the same sign at both ends of [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 || (hi - lo) < 1e-14 * mid.abs().max(1e-300) {
            return Ok(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Location of the minimum of a single well by golden-section search.
fn well_minimum<V: Fn(f64) -> f64>(v: &V) -> f64 {
    let (mut a, mut b) = (-1e3, 1e3);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while (b - a).abs() > 1e-12 {
        if v(c) < v(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// int_{x-}^{x+} sqrt(2(E - V)) dx using x = c + h sin(theta).
pub fn action_integral<V: Fn(f64) -> f64>(v: &V, x0: f64, energy: f64) -> Result<f64> {
    if energy <= v(x0) {
        return Ok(0.0);
    }
    let right = turning_point(v, x0, energy, 1.0)?;
    let left = turning_point(v, x0, energy, -1.0)?;
    let c = 0.5 * (left + right);
    let h = 0.5 * (right - left);
    integrate_real(
        |t| {
            let x = c + h * t.sin();
            (2.0 * (energy - v(x))).max(0.0).sqrt() * h * t.cos()
        },
        -PI / 2.0,
        PI / 2.0,
        1e-13,
    )
}

fn turning_point<V: Fn(f64) -> f64>(v: &V, x0: f64, energy: f64, dir: f64) -> Result<f64> {
    let mut step = 1e-3;
    let mut inner = x0;
    let mut outer = x0 + dir * step;
    while v(outer) < energy {
        inner = outer;
        step *= 2.0;
        outer = x0 + dir * step;
        if step > 1e8 {
            return domain(format!("no turning point found for E = {energy}"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (inner + outer);
        if v(mid) < energy {
            inner = mid;
        } else {
            outer = mid;
        }
        if (outer - inner).abs() < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (inner + outer))
}

/// Amplitude A0 of WKB initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    Unit,
    /// e^{-x^2/2}.
    Gaussian,
    /// Smooth bump e^{1 - 1/(1 - s^2)}, s = (x - center)/width, zero for |s| >= 1.
    CompactBump { center: f64, width: f64 },
}

impl Amplitude {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Amplitude::Unit => 1.0,
            Amplitude::Gaussian => (-0.5 * x * x).exp(),
            Amplitude::CompactBump { center, width } => {
                let s = (x - center) / width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }
}

pub type PhaseFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Phase S0 of WKB initial data.
#[derive(Clone)]
pub enum Phase {
    Zero,
    /// S0 = sign x^2/2.
    Quadratic { sign: f64 },
    /// S0 = -x^3/6.
    Cubic,
    Custom(PhaseFn),
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Zero => write!(f, "Zero"),
            Phase::Quadratic { sign } => write!(f, "Quadratic {{ sign: {sign} }}"),
            Phase::Cubic => write!(f, "Cubic"),
            Phase::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Phase {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::Quadratic { sign } => sign * 0.5 * x * x,
            Phase::Cubic => -x * x * x / 6.0,
            Phase::Custom(f) => f(x),
        }
    }

    /// k-th derivative for k in 1..=3.
    pub fn derivative(&self, k: u8, x: f64) -> f64 {
        match (self, k) {
            (Phase::Zero, _) => 0.0,
            (Phase::Quadratic { sign }, 1) => sign * x,
            (Phase::Quadratic { sign }, 2) => *sign,
            (Phase::Quadratic { .. }, _) => 0.0,
            (Phase::Cubic, 1) => -0.5 * x * x,
            (Phase::Cubic, 2) => -x,
            (Phase::Cubic, _) => -1.0,
            (Phase::Custom(f), k) => {
                let h = 1e-3 * (1.0 + x.abs());
                match k {
                    1 => (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h),
                    2 => (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h),
                    _ => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
                }
            }
        }
    }
}

/// Oscillatory initial datum u0(x) = A0(x) e^{i S0(x)/eps}.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub amplitude: Amplitude,
    pub phase: Phase,
    pub epsilon: f64,
}

impl InitialData {
    pub fn new(amplitude: Amplitude, phase: Phase, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if let Amplitude::CompactBump { width, center } = amplitude {
            if !(width > 0.0) || !center.is_finite() {
                return domain(format!("bump needs finite center and positive width, got {center}, {width}"));
            }
        }
        Ok(Self {
            amplitude,
            phase,
            epsilon,
        })
    }

    pub fn value(&self, x: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude.value(x), self.phase.value(x) / self.epsilon)
    }

    /// Finite window containing the amplitude support up to `tol`.
    pub fn window(&self, tol: f64) -> Result<(f64, f64)> {
        match self.amplitude {
            Amplitude::Unit => domain("unit amplitude is not square integrable"),
            Amplitude::CompactBump { center, width } => Ok((center - width, center + width)),
            Amplitude::Gaussian => {
                let r = truncation_radius(&|x: f64| self.amplitude.value(x), 0.0, tol)?;
                Ok((-r, r))
            }
        }
    }

    /// Integral of |u0|^2.
    pub fn norm_sqr(&self) -> Result<f64> {
        let (a, b) = self.window(1e-16)?;
        integrate_real(|x| self.amplitude.value(x).powi(2), a, b, 1e-14)
    }

    /// Classical energy of the WKB datum, int A^2 (S'^2 + x^2)/2 / int A^2.
    pub fn classical_energy(&self) -> Result<f64> {
        let (a, b) = self.window(1e-16)?;
        let num = integrate_real(
            |x| {
                let s1 = self.phase.derivative(1, x);
                self.amplitude.value(x).powi(2) * 0.5 * (s1 * s1 + x * x)
            },
            a,
            b,
            1e-14,
        )?;
        Ok(num / self.norm_sqr()?)
    }

    /// Projection (u0, v_n) = int u0 v_n dx.
    pub fn project(&self, n: u32) -> Result<Complex64> {
        if n > EigenState::MAX_INDEX {
            return domain(format!("projection index {n} exceeds the cap"));
        }
        let (a, b) = self.window(1e-17)?;
        let eps = self.epsilon;
        let panels = projection_panels(self, n, a, b);
        let f = |x: f64| self.value(x) * eigenfunction_unchecked(n, eps, x);
        let r = integrate_adaptive(&f, &panels, &QuadOptions::absolute(1e-14));
        crate::quadrature::QuadratureResult::value_or_best(r)
    }
}

/// Breakpoints resolving both the datum phase and the eigenfunction oscillation.
fn projection_panels(data: &InitialData, n: u32, a: f64, b: f64) -> Vec<f64> {
    let eps = data.epsilon;
    let k_eig = ((2.0 * f64::from(n) + 1.0) / eps).sqrt();
    let mut points = vec![a];
    let mut x = a;
    while x < b {
        let rate = data.phase.derivative(1, x).abs() / eps + k_eig;
        let w = (3.0 / rate).min((b - a) / 8.0);
        x = (x + w).min(b);
        points.push(x);
    }
    points
}

/// Truncated eigenfunction expansion of the Schrodinger solution.
#[derive(Debug, Clone)]
pub struct WaveSeries {
    pub epsilon: f64,
    /// Retained (state, c_n) pairs in increasing n.
    pub terms: Vec<(EigenState, Complex64)>,
    /// 1 - sum |c_n|^2 / ||u0||^2.
    pub truncation_defect: f64,
    pub warning: Option<String>,
}

impl WaveSeries {
    /// Projects `data` onto eigenstates, scanning outward from the classical
    /// energy and keeping |c_n|^2 above 1e-10 of the captured mass.
    pub fn from_data(data: &InitialData) -> Result<Self> {
        let eps = data.epsilon;
        let center = (data.classical_energy()? / eps - 0.5).round().clamp(0.0, f64::from(EigenState::MAX_INDEX)) as u32;
        let mut coeffs: Vec<Option<Complex64>> = vec![None; EigenState::MAX_INDEX as usize + 1];
        let mut total = 0.0;
        let threshold = 1e-10;
        for dir in [1i64, -1] {
            let mut quiet = 0;
            let mut n = i64::from(center) + if dir < 0 { -1 } else { 0 };
            while (0..=i64::from(EigenState::MAX_INDEX)).contains(&n) && quiet < 12 {
                let c = data.project(n as u32)?;
                coeffs[n as usize] = Some(c);
                total += c.norm_sqr();
                if c.norm_sqr() < threshold * total {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                n += dir;
            }
        }
        let terms: Vec<(EigenState, Complex64)> = coeffs
            .iter()
            .enumerate()
            .filter_map(|(n, c)| c.map(|c| (n as u32, c)))
            .filter(|(_, c)| c.norm_sqr() >= threshold * total)
            .map(|(n, c)| EigenState::harmonic(n, eps).map(|s| (s, c)))
            .collect::<Result<_>>()?;
        Self::from_terms(data, terms)
    }

    /// Projects `data` onto the given states only.
    pub fn from_states(data: &InitialData, states: &[EigenState]) -> Result<Self> {
        let terms = states
            .iter()
            .map(|s| Ok((*s, data.project(s.n)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(data, terms)
    }

    fn from_terms(data: &InitialData, terms: Vec<(EigenState, Complex64)>) -> Result<Self> {
        let norm = data.norm_sqr()?;
        let captured: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        let defect = 1.0 - captured / norm;
        let warning = (defect > 0.01).then(|| {
            format!("truncation leaves {:.3}% of the initial mass unaccounted", 100.0 * defect)
        });
        Ok(Self {
            epsilon: data.epsilon,
            terms,
            truncation_defect: defect,
            warning,
        })
    }

    /// sum c_n v_n(x) e^{-i E_n t/eps}.
    pub fn evaluate(&self, x: f64, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(s, c)| c * eigenfunction_unchecked(s.n, s.epsilon, x) * Complex64::from_polar(1.0, -s.energy * t / self.epsilon))
            .sum()
    }

    /// L2 norm of the solution at time t by quadrature.
    pub fn norm_at(&self, t: f64, window: (f64, f64)) -> Result<f64> {
        let r = integrate_1d(|x| Complex64::new(self.evaluate(x, t).norm_sqr(), 0.0), window.0, window.1, 1e-12)?;
        Ok(r.value.re.sqrt())
    }
}

/// Value at (x, t) of the series solution restricted to `states`.
pub fn wave_series_solution(data: &InitialData, states: &[EigenState], x: f64, t: f64) -> Result<Complex64> {
    Ok(WaveSeries::from_states(data, states)?.evaluate(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(n: u32, eps: f64) -> EigenState {
        EigenState::harmonic(n, eps).unwrap()
    }

    #[test]
    fn energies() {
        assert_eq!(st(3, 0.1).energy, (3.5f64) * 0.1);
        let i = EigenState::with_convention(3, 0.1, EnergyConvention::Integer).unwrap();
        assert!((i.energy - 0.3).abs() < 1e-15);
        assert!(EigenState::harmonic(1, 0.0).is_err());
    }

    #[test]
    fn ground_state_and_parity() {
        assert!((exact_eigenfunction(&st(0, 1.0), 0.0).unwrap() - PI.powf(-0.25)).abs() < 1e-15);
        assert!(exact_eigenfunction(&st(1, 1.0), 0.0).unwrap().abs() < 1e-15);
        assert!(exact_eigenfunction(&st(201, 1.0), 0.0).is_err());
    }

    #[test]
    fn orthonormality() {
        for eps in [1.0, 0.3] {
            for n in 0..=15u32 {
                for m in n..=15u32 {
                    let r = integrate_real(
                        |x| eigenfunction_unchecked(n, eps, x) * eigenfunction_unchecked(m, eps, x),
                        -15.0,
                        15.0,
                        1e-13,
                    )
                    .unwrap();
                    let expect = if n == m { 1.0 } else { 0.0 };
                    assert!((r - expect).abs() < 1e-8, "({n},{m}) eps={eps}: {r}");
                }
            }
        }
    }

    #[test]
    fn eigen_residual_is_second_order() {
        let eps = 0.5;
        let residual = |h: f64| {
            let s = st(4, eps);
            let mut acc = 0.0;
            let mut x = -4.0;
            while x <= 4.0 {
                let v = |y: f64| eigenfunction_unchecked(4, eps, y);
                let lap = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
                let hv = -0.5 * eps * eps * lap + 0.5 * x * x * v(x);
                acc += (hv - s.energy * v(x)).powi(2) * 0.01;
                x += 0.01;
            }
            acc.sqrt()
        };
        let order = (residual(0.02) / residual(0.01)).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn wkb_phase_structure() {
        let w = WkbPieces::harmonic(&st(6, 0.1));
        let a = w.turning_points.1;
        assert!(w.phase_plus(a).abs() < 1e-15);
        assert!((w.phase_plus(0.0) + PI * w.energy / 2.0).abs() < 1e-14);
        for &x in &[-1.0, -0.2, 0.4, 1.05] {
            assert!((w.phase_plus(x) + w.phase_minus(x)).abs() < 1e-12);
        }
        let near = w.amplitude(a - 1e-8) / w.amplitude(a - 1e-4);
        assert!(near > 9.0);
    }

    #[test]
    fn wkb_midpoint_closed_form() {
        let s = st(8, 0.1);
        let v = wkb_eigenfunction(&s, 0.0).unwrap();
        let expect = (2.0 / PI).sqrt() * (2.0 * s.energy).powf(-0.25) * (-PI * s.energy / 2.0 / s.epsilon + PI / 4.0).cos();
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn wkb_margin_and_tails() {
        let s = st(10, 0.1);
        let a = s.turning_point();
        assert!(wkb_eigenfunction(&s, a + 0.5 * turning_margin(0.1)).is_err());
        assert!(wkb_eigenfunction(&s, 3.0 * a).unwrap().abs() < 1e-8);
        let odd = st(3, 0.1);
        let b = odd.turning_point();
        assert!(wkb_eigenfunction(&odd, -2.0 * b).unwrap() < 0.0);
    }

    #[test]
    fn wkb_agreement_improves_with_n() {
        let err = |n: u32| {
            let s = st(n, 1.0 / (f64::from(n) + 0.5));
            let a = s.turning_point();
            (0..=400)
                .map(|i| -0.8 * a + 1.6 * a * f64::from(i) / 400.0)
                .map(|x| (exact_eigenfunction(&s, x).unwrap() - wkb_eigenfunction(&s, x).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let (e10, e20, e80) = (err(10), err(20), err(80));
        assert!(e20 < e10 && e80 < e20, "{e10} {e20} {e80}");
    }

    #[test]
    fn bohr_sommerfeld_harmonic() {
        let v = |x: f64| 0.5 * x * x;
        assert!((bohr_sommerfeld(v, 3, 0.1, (0.0, 2.0)).unwrap() - 0.35).abs() < 1e-10);
        assert!((bohr_sommerfeld(v, 0, 1.0, (0.01, 2.0)).unwrap() - 0.5).abs() < 1e-10);
        for n in [0u32, 17, 55, 100] {
            let e = bohr_sommerfeld(v, n, 0.01, (1e-4, 5.0)).unwrap();
            assert!((e - (f64::from(n) + 0.5) * 0.01).abs() < 1e-10);
        }
        assert!(matches!(bohr_sommerfeld(v, 3, 0.1, (1.0, 2.0)), Err(Error::NotBracketed(_))));
    }

    #[test]
    fn bohr_sommerfeld_quartic_against_dense_sampling() {
        let v = |x: f64| 0.25 * x.powi(4);
        let e = bohr_sommerfeld(v, 5, 0.05, (0.01, 5.0)).unwrap();
        // Independent inversion: midpoint-rule action on a dense energy table.
        let action = |en: f64| {
            let a = (4.0 * en).powf(0.25);
            let m = 200_000;
            let h = 2.0 * a / m as f64;
            (0..m)
                .map(|i| {
                    let x = -a + (i as f64 + 0.5) * h;
                    (2.0 * (en - v(x))).max(0.0).sqrt() * h
                })
                .sum::<f64>()
        };
        let target = PI * 5.5 * 0.05;
        let (mut lo, mut hi) = (0.01, 5.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if action(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((e - lo).abs() < 1e-5 * e, "{e} vs {lo}");
    }

    fn gaussian_chirp(eps: f64) -> InitialData {
        InitialData::new(Amplitude::Gaussian, Phase::Quadratic { sign: 1.0 }, eps).unwrap()
    }

    #[test]
    fn series_reconstructs_and_conserves() {
        let data = gaussian_chirp(0.25);
        let ws = WaveSeries::from_data(&data).unwrap();
        assert!(ws.warning.is_none(), "{:?}", ws.warning);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            assert!((ws.evaluate(x, 0.0) - data.value(x)).norm() < 1e-4);
        }
        let n0 = ws.norm_at(0.0, (-10.0, 10.0)).unwrap();
        let n1 = ws.norm_at(1.0, (-10.0, 10.0)).unwrap();
        assert!((n0 - n1).abs() < 1e-8);
        for &x in &[-0.7, 0.3, 1.1] {
            let a = ws.evaluate(x, 0.0).norm();
            let b = ws.evaluate(x, 2.0 * PI).norm();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn series_from_explicit_states_warns_when_truncated() {
        let data = gaussian_chirp(0.25);
        let states: Vec<_> = (0..3).map(|n| st(n, 0.25)).collect();
        let ws = WaveSeries::from_states(&data, &states).unwrap();
        assert!(ws.warning.is_some());
        assert!(wave_series_solution(&data, &states, 0.1, 0.0).unwrap().norm() > 0.0);
    }

    #[test]
    fn compact_bump_support() {
        let a = Amplitude::CompactBump { center: 0.2, width: 0.5 };
        assert_eq!(a.value(0.71), 0.0);
        assert_eq!(a.value(-0.4), 0.0);
        assert!((a.value(0.2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_phase_derivatives() {
        let p = Phase::Custom(Arc::new(|x: f64| -x * x * x / 6.0));
        for &x in &[-1.0, 0.5, 2.0] {
            assert!((p.derivative(1, x) - Phase::Cubic.derivative(1, x)).abs() < 1e-9);
            assert!((p.derivative(2, x) - Phase::Cubic.derivative(2, x)).abs() < 1e-7);
            assert!((p.derivative(3, x) - Phase::Cubic.derivative(3, x)).abs() < 1e-5);
        }
    }
}
