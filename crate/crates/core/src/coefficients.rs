//! Expansion coefficients c_nm = (W0, W_nm) of an initial Wigner function in
//! the Wigner eigenbasis: numeric projections by two independent routes, and
//! the Airy-based closed and semi-closed approximations C~_nm, together with
//! the Airy integral identities they rest on.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy_eigen::airy_wigner_offdiag;
use crate::asymptotics::berry_semiclassical_wigner;
use crate::error::{check_finite, domain, Error, Result};
use crate::quadrature::{integrate_1d, integrate_adaptive, integrate_real, Field2D, Grid2D, QuadOptions};
use crate::schrodinger::{check_epsilon, turning_margin, Amplitude, EigenState, InitialData, Phase};
use crate::specialfn::{ai, ln_airy_ai};
use crate::wigner::{exact_unchecked, wigner_transform, WignerEigenIndex};

/// Relative route discrepancy above which a numeric entry is flagged.
pub const ROUTE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    NumericProjection,
    ClosedForm,
    SemiClosed,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::NumericProjection => "numeric_projection",
            Provenance::ClosedForm => "closed_form",
            Provenance::SemiClosed => "semi_closed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffEntry {
    /// Factorized value for numeric entries; the approximation otherwise.
    pub value: Complex64,
    pub provenance: Provenance,
    /// Phase-space projection value for numeric entries.
    pub alternate: Option<Complex64>,
    /// |factorized - projection|.
    pub discrepancy: Option<f64>,
    pub consistent: bool,
}

impl CoeffEntry {
    pub fn approximate(value: Complex64, provenance: Provenance) -> Self {
        Self {
            value,
            provenance,
            alternate: None,
            discrepancy: None,
            consistent: true,
        }
    }

    fn from_routes(factorized: Complex64, projection: Complex64, floor: f64) -> Self {
        let d = (factorized - projection).norm();
        Self {
            value: factorized,
            provenance: Provenance::NumericProjection,
            alternate: Some(projection),
            discrepancy: Some(d),
            consistent: d <= ROUTE_TOLERANCE * factorized.norm() + floor,
        }
    }
}

/// Dense coefficient matrix, row-major in n.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    pub n_max: u32,
    pub m_max: u32,
    pub epsilon: f64,
    entries: Vec<CoeffEntry>,
}

impl CoeffMatrix {
    pub fn new(n_max: u32, m_max: u32, epsilon: f64, entries: Vec<CoeffEntry>) -> Result<Self> {
        let expected = (n_max as usize + 1) * (m_max as usize + 1);
        if entries.len() != expected {
            return domain(format!("expected {expected} entries, got {}", entries.len()));
        }
        Ok(Self {
            n_max,
            m_max,
            epsilon,
            entries,
        })
    }

    pub fn get(&self, n: u32, m: u32) -> Option<&CoeffEntry> {
        if n > self.n_max || m > self.m_max {
            return None;
        }
        self.entries.get(n as usize * (self.m_max as usize + 1) + m as usize)
    }

    pub fn value(&self, n: u32, m: u32) -> Complex64 {
        self.get(n, m).map_or(Complex64::default(), |e| e.value)
    }

    /// (n, m, entry) in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &CoeffEntry)> {
        let cols = self.m_max + 1;
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, e)| (k as u32 / cols, k as u32 % cols, e))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.norm()))
    }

    /// max |c_nm - conj(c_mn)| over the square part.
    pub fn hermitian_defect(&self) -> f64 {
        let k = self.n_max.min(self.m_max);
        let mut worst = 0.0f64;
        for n in 0..=k {
            for m in 0..=k {
                worst = worst.max((self.value(n, m) - self.value(m, n).conj()).norm());
            }
        }
        worst
    }

    /// sum_n (2 pi eps) Re c_nn.
    pub fn coherent_mass(&self) -> f64 {
        let k = self.n_max.min(self.m_max);
        (0..=k).map(|n| 2.0 * PI * self.epsilon * self.value(n, n).re).sum()
    }

    /// max |factorized - projection| / max |c| over numeric entries.
    pub fn route_discrepancy(&self) -> Option<f64> {
        let scale = self.max_abs();
        let worst = self.entries.iter().filter_map(|e| e.discrepancy).fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))?;
        Some(if scale > 0.0 { worst / scale } else { worst })
    }

    pub fn all_consistent(&self) -> bool {
        self.entries.iter().all(|e| e.consistent)
    }
}

/// Numeric Wigner function W(u0, u0) of the initial datum on `grid`.
pub fn initial_wigner_field(data: &InitialData, grid: Grid2D, tol: f64) -> Result<Field2D> {
    let eps = data.epsilon;
    Field2D::try_from_fn(grid, |x, p| {
        wigner_transform(|y| data.value(y), |y| data.value(y), eps, x, p, tol).map(|w| Complex64::new(w.re, 0.0))
    })
}

/// W0 on `grid` by the y-trapezoid rule: each x row samples
/// u0(x + y/2) conj(u0(x - y/2)) once and sums every p node by a phase recurrence.
/// Spectrally accurate for smooth data decaying to `tol` inside `data.window(tol)`.
pub fn initial_wigner_field_sampled(data: &InitialData, grid: Grid2D, tol: f64) -> Result<Field2D> {
    let eps = data.epsilon;
    let (a, b) = data.window(tol)?;
    let s_max = (0..=256)
        .map(|i| data.phase.derivative(1, a + (b - a) * f64::from(i) / 256.0).abs())
        .fold(0.0, f64::max);
    let p_max = grid.p_min.abs().max(grid.p_max.abs());
    let dy = (0.05f64).min(0.5 * PI * eps / (s_max + p_max + 10.0 * eps));
    let hp = grid.hp();
    let rows: Vec<Vec<Complex64>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            let half = 2.0 * (x - a).min(b - x);
            let mut row = vec![Complex64::default(); grid.np];
            if half <= 0.0 {
                return row;
            }
            let k_max = (half / dy).ceil() as i64;
            for k in -k_max..=k_max {
                let y = k as f64 * dy;
                let f = data.value(x + 0.5 * y) * data.value(x - 0.5 * y).conj();
                if f == Complex64::default() {
                    continue;
                }
                let mut phase = Complex64::from_polar(1.0, -grid.p_min * y / eps);
                let step = Complex64::from_polar(1.0, -hp * y / eps);
                for (j, r) in row.iter_mut().enumerate() {
                    if j % 64 == 0 {
                        phase = Complex64::from_polar(1.0, -grid.p(j) * y / eps);
                    }
                    *r += f * phase;
                    phase *= step;
                }
            }
            let scale = dy / (2.0 * PI * eps);
            row.iter().map(|v| Complex64::new(v.re * scale, 0.0)).collect()
        })
        .collect();
    Field2D::new(grid, rows.into_iter().flatten().collect())
}

/// Trapezoidal (W0, W_nm) with the exact eigenfunction generated on the fly.
fn project_field(w0: &Field2D, n: u32, m: u32, eps: f64) -> Complex64 {
    let g = w0.grid;
    (0..g.nx)
        .into_par_iter()
        .map(|i| {
            let mut s = Complex64::default();
            for j in 0..g.np {
                let v = w0.get(i, j);
                if v != Complex64::default() {
                    s += v * exact_unchecked(n, m, eps, g.x(i), g.p(j)).conj() * g.weight(i, j);
                }
            }
            s
        })
        .sum()
}

fn route_floor(eps: f64) -> f64 {
    1e-9 / (2.0 * PI * eps)
}

/// c_nm by the phase-space projection of the numeric W0 and by the factorized
/// (2 pi eps)^{-1} (u0, v_n) conj((u0, v_m)); the factorized value is returned
/// as `value`, the projection as `alternate`.
pub fn coeff_numeric(data: &InitialData, idx: &WignerEigenIndex, grid: Grid2D) -> Result<CoeffEntry> {
    if (idx.epsilon - data.epsilon).abs() > 1e-15 * data.epsilon {
        return domain("index and initial data use different epsilon");
    }
    let w0 = initial_wigner_field_sampled(data, grid, 1e-13)?;
    let eps = data.epsilon;
    let factorized = data.project(idx.n)? * data.project(idx.m)?.conj() / (2.0 * PI * eps);
    let projection = project_field(&w0, idx.n, idx.m, eps);
    Ok(CoeffEntry::from_routes(factorized, projection, route_floor(eps)))
}

/// Numeric coefficient matrix for 0 <= n, m <= n_max; W0 is sampled once.
pub fn coeff_matrix_numeric(data: &InitialData, n_max: u32, grid: Grid2D) -> Result<CoeffMatrix> {
    if n_max > EigenState::MAX_INDEX {
        return domain(format!("n_max {n_max} exceeds the cap"));
    }
    let eps = data.epsilon;
    let w0 = initial_wigner_field_sampled(data, grid, 1e-13)?;
    let proj: Vec<Complex64> = (0..=n_max).into_par_iter().map(|n| data.project(n)).collect::<Result<_>>()?;
    let k = n_max as usize + 1;
    let floor = route_floor(eps);
    let entries: Vec<CoeffEntry> = (0..k * k)
        .into_par_iter()
        .map(|q| {
            let (n, m) = ((q / k) as u32, (q % k) as u32);
            let factorized = proj[n as usize] * proj[m as usize].conj() / (2.0 * PI * eps);
            CoeffEntry::from_routes(factorized, project_field(&w0, n, m, eps), floor)
        })
        .collect();
    CoeffMatrix::new(n_max, n_max, eps, entries)
}

/// c_nm of an arbitrary wave function supported in `support` by both routes;
/// the factorized value uses int psi v_n dx.
pub fn coeff_from_wavefunction<F>(psi: F, epsilon: f64, n: u32, m: u32, support: (f64, f64), grid: Grid2D) -> Result<CoeffEntry>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let idx = WignerEigenIndex::new(n, m, epsilon)?;
    let w0 = Field2D::try_from_fn(grid, |x, p| wigner_transform(&psi, &psi, epsilon, x, p, 1e-11))?;
    let project = |k: u32| -> Result<Complex64> {
        let v = |x: f64| psi(x) * crate::schrodinger::eigenfunction_unchecked(k, epsilon, x);
        Ok(integrate_1d(v, support.0, support.1, 1e-14)?.value)
    };
    let factorized = project(idx.n)? * project(idx.m)?.conj() / (2.0 * PI * epsilon);
    let projection = project_field(&w0, idx.n, idx.m, epsilon);
    Ok(CoeffEntry::from_routes(factorized, projection, route_floor(epsilon)))
}

/// Factorized coefficient matrix (2 pi eps)^{-1} (u0, v_n) conj((u0, v_m)) only.
pub fn coeff_matrix_factorized(data: &InitialData, n_max: u32) -> Result<CoeffMatrix> {
    let eps = data.epsilon;
    let proj: Vec<Complex64> = (0..=n_max).into_par_iter().map(|n| data.project(n)).collect::<Result<_>>()?;
    let k = n_max as usize + 1;
    let entries = (0..k * k)
        .map(|q| {
            let v = proj[q / k] * proj[q % k].conj() / (2.0 * PI * eps);
            CoeffEntry::approximate(v, Provenance::NumericProjection)
        })
        .collect();
    CoeffMatrix::new(n_max, n_max, eps, entries)
}

/// Square grid covering W0 and every W_nm with n <= n_max.
pub fn default_grid(data: &InitialData, n_max: u32) -> Result<Grid2D> {
    let eps = data.epsilon;
    let (a, b) = data.window(1e-8)?;
    let x_reach = a.abs().max(b.abs());
    let p_reach = (0..=64)
        .map(|i| data.phase.derivative(1, a + (b - a) * f64::from(i) / 64.0).abs())
        .fold(0.0, f64::max)
        + 6.0 * eps;
    let r = (2.0 * (f64::from(n_max) + 0.5) * eps).sqrt() + 6.0 * eps.sqrt();
    let half = x_reach.max(p_reach).max(r);
    let h = 0.2 * eps;
    Grid2D::square(half, h)
}

fn airy_scale(energy: f64, eps: f64) -> f64 {
    eps.powf(2.0 / 3.0) * (2.0 * energy).cbrt()
}

/// int_a^b f over `panels` uniform panels with relative tolerance.
fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> Result<f64> {
    let pts: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    let scale = pts.iter().fold(0.0f64, |m, &x| m.max(f(x).abs())) * (b - a).abs();
    let g = |x: f64| Complex64::new(f(x), 0.0);
    integrate_adaptive(&g, &pts, &QuadOptions::relative(1e-14 * scale, 1e-12)).map(|r| r.value.re)
}

/// Number of panels resolving Ai(-t) for t up to `t_max` at one panel per radian.
fn airy_panels(t_max: f64) -> usize {
    (2.0 / 3.0 * t_max.max(0.0).powf(1.5)).ceil() as usize * 2 + 16
}

/// C~_nn for quadratic phase: pi^{-1} s^{-1} int A^2(x) Ai((2x^2 - 2E)/s) dx with
/// s = eps^{2/3} (2E)^{1/3}. For A = 1 the closed form
/// 2^{1/6} eps^{-1/3} (2E)^{-1/6} Ai^2(-(2E)^{2/3}/(2^{2/3} eps^{2/3})) is returned.
pub fn coeff_quadratic_phase(n: u32, epsilon: f64, amplitude: Amplitude) -> Result<CoeffEntry> {
    let state = EigenState::harmonic(n, epsilon)?;
    let e = state.energy;
    if amplitude == Amplitude::Unit {
        let y = (2.0 * e).powf(2.0 / 3.0) / (2f64.powf(2.0 / 3.0) * epsilon.powf(2.0 / 3.0));
        let v = 2f64.powf(1.0 / 6.0) * epsilon.powf(-1.0 / 3.0) * (2.0 * e).powf(-1.0 / 6.0) * ai(-y).powi(2);
        return Ok(CoeffEntry::approximate(Complex64::new(v, 0.0), Provenance::ClosedForm));
    }
    let v = quadratic_phase_integral(e, epsilon, |x| amplitude.value(x).powi(2))?;
    Ok(CoeffEntry::approximate(Complex64::new(v, 0.0), Provenance::SemiClosed))
}

/// The 1-D Airy-weighted integral of `a2` behind [`coeff_quadratic_phase`].
pub fn quadratic_phase_integral<F: Fn(f64) -> f64>(energy: f64, epsilon: f64, a2: F) -> Result<f64> {
    check_epsilon(epsilon)?;
    let s = airy_scale(energy, epsilon);
    let reach = (energy + 20.0 * s).sqrt();
    let panels = airy_panels(2.0 * energy / s);
    integrate_panels(|x| a2(x) * ai((2.0 * x * x - 2.0 * energy) / s) / (PI * s), -reach, reach, panels)
}

/// Classical limit (A^2(sqrt E) + A^2(-sqrt E))/(4 pi sqrt E) of the quadratic-phase C~_nn.
pub fn quadratic_phase_classical_limit(n: u32, epsilon: f64, amplitude: Amplitude) -> Result<f64> {
    let e = EigenState::harmonic(n, epsilon)?.energy;
    let r = e.sqrt();
    Ok((amplitude.value(r).powi(2) + amplitude.value(-r).powi(2)) / (4.0 * PI * r))
}

/// Closed approximation for Gaussian amplitude e^{-x^2/2}:
/// (sqrt(pi) e^{1/(96 b^6)}/(2ab)) (e^{a/(4b^3)} Ai(a/b + 1/(16 b^4)) + e^{-a/(4b^3)} Ai(-a/b + 1/(16 b^4)))
/// with a = sqrt(E), b = eps^{2/3} (2E)^{1/3}/2, evaluated in log space.
pub fn coeff_gaussian(n: u32, epsilon: f64) -> Result<CoeffEntry> {
    let e = EigenState::harmonic(n, epsilon)?.energy;
    let a = e.sqrt();
    let b = 0.5 * airy_scale(e, epsilon);
    let base = 0.5 * PI.ln() + 1.0 / (96.0 * b.powi(6)) - (2.0 * a * b).ln();
    let shift = 1.0 / (16.0 * b.powi(4));
    let (s1, l1) = ln_airy_ai(a / b + shift)?;
    let (s2, l2) = ln_airy_ai(-a / b + shift)?;
    let t1 = l1 + a / (4.0 * b.powi(3));
    let t2 = l2 - a / (4.0 * b.powi(3));
    let top = t1.max(t2);
    let mix = s1 * (t1 - top).exp() + s2 * (t2 - top).exp();
    if mix == 0.0 {
        return Ok(CoeffEntry::approximate(Complex64::default(), Provenance::ClosedForm));
    }
    let log_value = base + top + mix.abs().ln();
    if log_value > f64::MAX.ln() {
        return Err(Error::Overflow(format!("Gaussian closed form overflows (log value {log_value:.3e})")));
    }
    let v = mix.signum() * log_value.exp();
    Ok(CoeffEntry::approximate(Complex64::new(v, 0.0), Provenance::ClosedForm))
}

/// Constant kappa in the cubic-phase denominator |sqrt(2E) - kappa|^{1/3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicConstant {
    /// kappa = 1/8.
    Verbatim,
    /// kappa = |S'''|/8 from the Airy scale algebra.
    FromThirdDerivative(f64),
}

impl CubicConstant {
    pub fn kappa(&self) -> f64 {
        match *self {
            CubicConstant::Verbatim => 0.125,
            CubicConstant::FromThirdDerivative(s3) => s3.abs() / 8.0,
        }
    }
}

/// (Q_n+(x), Q_n-(x)) = pi eps^{-2/3} D^{-1} Ai(eps^{-2/3}(-x^2/2 +- sqrt(2E - x^2))/D),
/// D = |sqrt(2E) - kappa|^{1/3}.
pub fn q_plus_minus(energy: f64, epsilon: f64, x: f64, constant: CubicConstant) -> Result<(f64, f64)> {
    let d = ((2.0 * energy).sqrt() - constant.kappa()).abs().cbrt();
    if d == 0.0 {
        return Err(Error::Degenerate("sqrt(2E) equals the cubic constant".into()));
    }
    let root = (2.0 * energy - x * x).max(0.0).sqrt();
    let c = epsilon.powf(-2.0 / 3.0);
    let q = |sign: f64| PI * c / d * ai(c * (-0.5 * x * x + sign * root) / d);
    Ok((q(1.0), q(-1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficient {
    pub value: f64,
    /// int A^2 (2E - x^2)^{-1/2} Q_n+.
    pub plus_part: f64,
    /// int A^2 (2E - x^2)^{-1/2} Q_n-.
    pub minus_part: f64,
}

/// C~_nn = int A^2 (2E - x^2)^{-1/2} (Q_n+ + Q_n-) dx over the amplitude
/// support intersected with |x| < sqrt(2E) - eps^{2/3}.
pub fn coeff_cubic_phase<A>(n: u32, epsilon: f64, amplitude: A, support: (f64, f64), constant: CubicConstant) -> Result<CubicCoefficient>
where
    A: Fn(f64) -> f64,
{
    let e = EigenState::harmonic(n, epsilon)?.energy;
    let edge = (2.0 * e).sqrt() - turning_margin(epsilon);
    let a = support.0.max(-edge);
    let b = support.1.min(edge);
    if !(b > a) {
        return domain("the turning-point margin swallows the amplitude support");
    }
    let t_max = epsilon.powf(-2.0 / 3.0) * (2.0 * e).sqrt() * 2.0;
    let panels = airy_panels(t_max).min(20_000);
    let part = |sign: usize| {
        integrate_panels(
            |x| {
                let (qp, qm) = q_plus_minus(e, epsilon, x, constant).unwrap_or((f64::NAN, f64::NAN));
                let q = if sign == 0 { qp } else { qm };
                amplitude(x).powi(2) * q / (2.0 * e - x * x).sqrt()
            },
            a,
            b,
            panels,
        )
    };
    q_plus_minus(e, epsilon, 0.0, constant)?;
    let plus_part = part(0)?;
    let minus_part = part(1)?;
    Ok(CubicCoefficient {
        value: plus_part + minus_part,
        plus_part,
        minus_part,
    })
}

/// Brute-force (W~0, W~nn) for cubic phase S0 = -x^3/6: the double integral of
/// the Berry function (2/eps^{2/3}) A^2 Ai((2/eps^{2/3})(p + x^2/2)) against the
/// diagonal Airy approximation.
pub fn coeff_cubic_brute<A>(n: u32, epsilon: f64, amplitude: A, support: (f64, f64)) -> Result<f64>
where
    A: Fn(f64) -> f64 + Sync,
{
    let state = EigenState::harmonic(n, epsilon)?;
    let e = state.energy;
    let s = airy_scale(e, epsilon);
    let c = 2.0 / epsilon.powf(2.0 / 3.0);
    let inner = |x: f64| -> Result<f64> {
        let a2 = amplitude(x).powi(2);
        if a2 == 0.0 {
            return Ok(0.0);
        }
        let reach = (2.0 * e + 40.0 * s).sqrt();
        let lo = -reach;
        let hi = (-0.5 * x * x + 40.0 / c).max(lo + 1e-3);
        let t_max = (2.0 * e / s).max(c * (0.5 * x * x + reach));
        integrate_panels(
            |p| c * ai(c * (p + 0.5 * x * x)) * crate::airy_eigen::airy_wigner_diag(&state, x, p),
            lo,
            hi,
            airy_panels(t_max).min(20_000),
        )
        .map(|v| a2 * v)
    };
    let xs = 400;
    let (a, b) = support;
    let h = (b - a) / xs as f64;
    let vals: Vec<f64> = (0..=xs).into_par_iter().map(|i| inner(a + h * i as f64)).collect::<Result<_>>()?;
    let simpson: f64 = vals
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == xs { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * v
        })
        .sum();
    Ok(simpson * h / 3.0)
}

/// C~_nm = (W~0, W~nm). Phases with S''' = 0 use the line measure
/// A^2(x) delta(p - S'(x)); other phases sample Berry's W~0 on `grid`.
pub fn coeff_offdiag_airy(idx: &WignerEigenIndex, data: &InitialData, grid: Grid2D) -> Result<CoeffEntry> {
    if (idx.epsilon - data.epsilon).abs() > 1e-15 * data.epsilon {
        return domain("index and initial data use different epsilon");
    }
    let slope = match data.phase {
        Phase::Zero => Some(0.0),
        Phase::Quadratic { sign } => Some(sign),
        _ => None,
    };
    if let Some(slope) = slope {
        if idx.n == idx.m && slope != 0.0 {
            return coeff_quadratic_phase(idx.n, idx.epsilon, data.amplitude);
        }
        let (e_n, e_m) = idx.energies();
        let big = 0.25 * ((2.0 * e_n).sqrt() + (2.0 * e_m).sqrt()).powi(2);
        let s = airy_scale(e_n.max(e_m), idx.epsilon);
        let reach = ((big + 40.0 * s) / (1.0 + slope * slope)).sqrt();
        let panels = airy_panels(big / s) + 4 * idx.n.abs_diff(idx.m) as usize;
        let pts: Vec<f64> = (0..=panels).map(|i| -reach + 2.0 * reach * i as f64 / panels as f64).collect();
        let f = |x: f64| data.amplitude.value(x).powi(2) * airy_wigner_offdiag(idx, x, slope * x).value.conj();
        let v = integrate_adaptive(&f, &pts, &QuadOptions::relative(1e-300, 1e-12))?.value;
        return Ok(CoeffEntry::approximate(v, Provenance::SemiClosed));
    }
    let w0 = Field2D::try_from_fn(grid, |x, p| berry_semiclassical_wigner(data, x, p).map(|v| Complex64::new(v, 0.0)))?;
    let a = Field2D::from_fn(grid, |x, p| airy_wigner_offdiag(idx, x, p).value);
    let v = crate::quadrature::inner_product_2d(&w0, &a)?;
    Ok(CoeffEntry::approximate(v, Provenance::SemiClosed))
}

/// Numeric verification of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let abs_error = (lhs - rhs).abs();
        Self {
            lhs,
            rhs,
            abs_error,
            rel_error: abs_error / rhs.abs().max(f64::MIN_POSITIVE),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.abs_error <= tol || self.rel_error <= tol
    }
}

/// int Ai(z^2 - y) dz against 2^{2/3} pi Ai^2(-y/2^{2/3}).
pub fn check_aisq(y: f64) -> Result<IdentityCheck> {
    check_finite("y", y)?;
    let reach = (y.max(0.0) + 40.0).sqrt();
    let lhs = integrate_panels(|z| ai(z * z - y), -reach, reach, airy_panels(y))?;
    let rhs = 2f64.powf(2.0 / 3.0) * PI * ai(-y / 2f64.powf(2.0 / 3.0)).powi(2);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Airy transform of the Gaussian,
/// (1/|alpha|) int e^{-y^2} Ai((x - y)/alpha) dy = (sqrt(pi)/|alpha|) e^{x/(4 alpha^3) + 1/(96 alpha^6)} Ai(x/alpha + 1/(16 alpha^4)).
pub fn gaussian_airy_transform(x: f64, alpha: f64) -> Result<f64> {
    if alpha == 0.0 || !alpha.is_finite() {
        return domain("alpha must be finite and nonzero");
    }
    let (s, l) = ln_airy_ai(x / alpha + 1.0 / (16.0 * alpha.powi(4)))?;
    let log = 0.5 * PI.ln() - alpha.abs().ln() + x / (4.0 * alpha.powi(3)) + 1.0 / (96.0 * alpha.powi(6)) + l;
    Ok(s * log.exp())
}

pub fn check_gaussian_airy_transform(x: f64, alpha: f64) -> Result<IdentityCheck> {
    let rhs = gaussian_airy_transform(x, alpha)?;
    let lhs = integrate_real(|y| (-y * y).exp() * ai((x - y) / alpha) / alpha.abs(), -9.0, 9.0, 1e-14)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// (1/|alpha beta|) int Ai((z+a)/alpha) Ai((z+b)/beta) dz for alpha != beta:
/// |beta^3 - alpha^3|^{-1/3} Ai((b - a)/(beta^3 - alpha^3)^{1/3}).
pub fn airy_product_integral(a: f64, b: f64, alpha: f64, beta: f64) -> Result<f64> {
    let d = beta.powi(3) - alpha.powi(3);
    if d == 0.0 {
        return Err(Error::Degenerate("equal scales give a delta function".into()));
    }
    Ok(ai((b - a) / d.cbrt()) / d.abs().cbrt())
}

/// Checks [`airy_product_integral`] by quadrature. The left side converges only
/// conditionally, so it is computed with a Gaussian damping e^{-delta z^2} at
/// delta = d0, d0/2, d0/4 and Richardson-extrapolated to delta = 0.
pub fn check_airy_product(a: f64, b: f64, alpha: f64, beta: f64) -> Result<IdentityCheck> {
    let rhs = airy_product_integral(a, b, alpha, beta)?;
    let damped = |delta: f64| -> Result<f64> {
        let lo = -(36.0 / delta).sqrt();
        let hi = 40.0 * alpha.abs().max(beta.abs()) + a.abs().max(b.abs());
        let t_max = -lo / alpha.abs().min(beta.abs());
        integrate_panels(
            |z| ai((z + a) / alpha) * ai((z + b) / beta) * (-delta * z * z).exp() / (alpha * beta).abs(),
            lo,
            hi,
            airy_panels(t_max).min(200_000),
        )
    };
    let d0 = 4e-3;
    let (i1, i2, i3) = (damped(d0)?, damped(d0 / 2.0)?, damped(d0 / 4.0)?);
    let r1 = 2.0 * i2 - i1;
    let r2 = 2.0 * i3 - i2;
    let lhs = (4.0 * r2 - r1) / 3.0;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Weak form of the equal-scale product identity: for the probe
/// g(b) = e^{-((b - c)/w)^2}, int g(b) [(1/alpha^2) int Ai((z+a)/alpha) Ai((z+b)/alpha) dz] db
/// against g(a). The inner b-integral uses the Gaussian Airy transform.
pub fn check_airy_product_delta(a: f64, alpha: f64, center: f64, width: f64) -> Result<IdentityCheck> {
    if !(alpha > 0.0) || !(width > 0.0) {
        return domain("alpha and width must be positive");
    }
    let beta = -alpha / width;
    let h = |z: f64| gaussian_airy_transform(-(z + center) / width, beta).map(|v| v * width * beta.abs());
    let decay = width * width / (4.0 * alpha.powi(3));
    let lo = -(center.abs() + 45.0 / decay);
    let hi = 40.0 * alpha + a.abs() + center.abs() + 4.0 * width;
    let t_max = -lo / alpha;
    let lhs = integrate_panels(
        |z| ai((z + a) / alpha) * h(z).unwrap_or(f64::NAN) / (alpha * alpha),
        lo,
        hi,
        airy_panels(t_max).min(100_000),
    )?;
    let rhs = (-((a - center) / width).powi(2)).exp();
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Weak defect int g(x) [eps^{-1} Ai((x^2 - alpha^2)/eps)
/// - (2 alpha)^{-1} eps^{-1} (Ai((x + alpha)/eps) + Ai((x - alpha)/eps))] dx.
pub fn airy_decomposition_defect<G: Fn(f64) -> f64>(alpha: f64, epsilon: f64, g: G, reach: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    let panels = airy_panels(alpha * alpha / epsilon + reach / epsilon).min(200_000);
    let lhs = integrate_panels(|x| g(x) * ai((x * x - alpha * alpha) / epsilon) / epsilon, -reach, reach, panels)?;
    let rhs = integrate_panels(
        |x| g(x) * (ai((x + alpha) / epsilon) + ai((x - alpha) / epsilon)) / (2.0 * alpha * epsilon),
        -reach,
        reach,
        panels,
    )?;
    Ok(lhs - rhs)
}
