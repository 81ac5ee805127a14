//! Acceptance suites: each runs one numbered validation criterion and returns
//! the measured quantities together with a pass/fail verdict.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy_eigen::{airy_wigner_diag, airy_wigner_offdiag};
use crate::asymptotics::{berry_semiclassical_wigner, cfu_uniform, stationary_phase_simple, StationaryPoint};
use crate::coefficients::{check_airy_product, check_aisq, check_gaussian_airy_transform, coeff_matrix_numeric, initial_wigner_field};
use crate::error::{domain, Error, Result};
use crate::moyal::{eigen_residuals, measured_order};
use crate::quadrature::{integrate_real, oscillatory_integral_line, Field2D, Grid2D};
use crate::schrodinger::{Amplitude, EigenState, InitialData, Phase};
use crate::series::{SeriesSolution, DEFAULT_BAND};
use crate::wigner::{exact_unchecked, exact_wigner_eigen, wigner_transform, wigner_transform_eigen, WignerEigenIndex};

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "oracle",
    "spectral",
    "identities",
    "cfu",
    "berry",
    "airy-diag",
    "airy-offdiag",
    "rotation",
    "structure",
    "coeff-routes",
];

/// One measured quantity against its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when value <= threshold.
    pub fn at_most(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            label: label.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn flag(label: impl Into<String>, value: f64, passed: bool) -> Self {
        Self {
            label: label.into(),
            value,
            threshold: f64::NAN,
            passed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub criterion: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(criterion: u8) -> Self {
        Self {
            criterion,
            name: SUITES[criterion as usize - 1],
            checks: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// `PASS 3 identities (0.4 s): 9/9 checks`.
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!(
            "{} {} {} ({:.1} s): {}/{} checks",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.elapsed.as_secs_f64(),
            ok,
            self.checks.len()
        )
    }

    /// Summary line followed by one indented line per check and note.
    pub fn detail(&self) -> String {
        let mut out = self.summary_line();
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.threshold.is_nan() {
                out.push_str(&format!("\n  {mark} {}: {:.6e}", c.label, c.value));
            } else {
                out.push_str(&format!("\n  {mark} {}: {:.6e} (limit {:.3e})", c.label, c.value, c.threshold));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("\n  note: {n}"));
        }
        out
    }
}

/// Runs the suite with the given name.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match SUITES.iter().position(|s| *s == name) {
        Some(i) => run_criterion(i as u8 + 1),
        None => domain(format!("unknown suite '{name}'; expected one of {}", SUITES.join(", "))),
    }
}

/// Runs criterion `k` in 1..=10. Numeric failures inside a suite are
/// recorded as a failed check rather than returned.
pub fn run_criterion(k: u8) -> Result<SuiteReport> {
    if !(1..=10).contains(&k) {
        return domain(format!("criterion {k} is outside 1..=10"));
    }
    let start = Instant::now();
    let mut report = SuiteReport::new(k);
    let outcome = match k {
        1 => oracle(&mut report),
        2 => spectral(&mut report),
        3 => identities(&mut report),
        4 => cfu(&mut report),
        5 => berry(&mut report),
        6 => airy_diag(&mut report),
        7 => airy_offdiag(&mut report),
        8 => rotation(&mut report),
        9 => structure(&mut report),
        _ => coeff_routes(&mut report),
    };
    if let Err(e) = outcome {
        report.push(Check::flag(format!("suite error: {e}"), f64::NAN, false));
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

fn oracle(r: &mut SuiteReport) -> Result<()> {
    let start = Instant::now();
    let grid = Grid2D::new(-3.0, 3.0, 21, -3.0, 3.0, 21)?;
    let pairs: Vec<(u32, u32)> = (0..=5).flat_map(|n| (0..=5).map(move |m| (n, m))).collect();
    let worst: Vec<f64> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let idx = WignerEigenIndex::new(n, m, 1.0)?;
            let mut w = 0.0f64;
            for i in 0..grid.nx {
                for j in 0..grid.np {
                    let (x, p) = (grid.x(i), grid.p(j));
                    let q = wigner_transform_eigen(&idx, x, p, 1e-12)?;
                    w = w.max((q - exact_wigner_eigen(&idx, x, p)?).norm());
                }
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    let max = worst.iter().cloned().fold(0.0, f64::max);
    r.push(Check::at_most("max |closed form - quadrature|, n,m <= 5", max, 1e-8));
    r.push(Check::at_most("runtime seconds", start.elapsed().as_secs_f64(), 120.0));
    Ok(())
}

fn spectral(r: &mut SuiteReport) -> Result<()> {
    let hs = [0.04, 0.02, 0.01];
    let pairs: Vec<(u32, u32)> = (0..=5).flat_map(|n| (0..=5).map(move |m| (n, m))).collect();
    let orders: Vec<(u32, u32, f64, f64)> = pairs
        .iter()
        .map(|&(n, m)| {
            let idx = WignerEigenIndex::new(n, m, 1.0)?;
            let mut l = Vec::new();
            let mut mm = Vec::new();
            for &h in &hs {
                let (rl, rm) = eigen_residuals(&idx, Grid2D::square(3.0, h)?)?;
                l.push((h, rl));
                mm.push((h, rm));
            }
            Ok((n, m, measured_order(&l), measured_order(&mm)))
        })
        .collect::<Result<_>>()?;
    let in_band = |o: f64| (1.8..=4.5).contains(&o);
    let lo_l = orders.iter().map(|o| o.2).fold(f64::INFINITY, f64::min);
    let hi_l = orders.iter().map(|o| o.2).fold(f64::NEG_INFINITY, f64::max);
    let lo_m = orders.iter().map(|o| o.3).fold(f64::INFINITY, f64::min);
    let hi_m = orders.iter().map(|o| o.3).fold(f64::NEG_INFINITY, f64::max);
    r.push(Check::flag("min order of the sine-bracket residual", lo_l, in_band(lo_l)));
    r.push(Check::flag("max order of the sine-bracket residual", hi_l, in_band(hi_l)));
    r.push(Check::flag("min order of the cosine-bracket residual", lo_m, in_band(lo_m)));
    r.push(Check::flag("max order of the cosine-bracket residual", hi_m, in_band(hi_m)));
    Ok(())
}

fn identities(r: &mut SuiteReport) -> Result<()> {
    for y in [-1.0, 0.5, 3.0] {
        let c = check_aisq(y)?;
        r.push(Check::at_most(format!("Ai(z^2 - y) integral, y = {y}"), c.abs_error.min(c.rel_error), 1e-6));
    }
    for (x, a) in [(0.3, 0.7), (-1.0, 1.2), (0.5, -0.8)] {
        let c = check_gaussian_airy_transform(x, a)?;
        r.push(Check::at_most(format!("Gaussian Airy transform, x = {x}, alpha = {a}"), c.abs_error.min(c.rel_error), 1e-6));
    }
    for (a, b, al, be) in [(0.2, -0.4, 0.5, 0.9), (0.0, 0.3, 0.8, 0.6), (-0.5, 0.1, 1.0, 0.7)] {
        let c = check_airy_product(a, b, al, be)?;
        r.push(Check::at_most(
            format!("Airy product integral, (a, b, alpha, beta) = ({a}, {b}, {al}, {be})"),
            c.abs_error.min(c.rel_error),
            1e-6,
        ));
    }
    Ok(())
}

fn cfu(r: &mut SuiteReport) -> Result<()> {
    let lambda = 100.0;
    for alpha in [0.0, 0.05, 0.25, 1.0] {
        let phase = move |x: f64| x * x * x / 3.0 - alpha * x;
        let s = alpha.sqrt();
        let x1 = StationaryPoint::new(-s, phase(-s), -2.0 * s, lambda);
        let x2 = StationaryPoint::new(s, phase(s), 2.0 * s, lambda);
        let u = cfu_uniform(|_| 1.0, phase, lambda, &x1, &x2)?;
        let q = oscillatory_integral_line(|_| Complex64::new(1.0, 0.0), phase, lambda, -6.0, 6.0, 1e-12)?.value;
        r.push(Check::at_most(format!("CFU vs quadrature, alpha = {alpha}"), (u - q).norm() / q.norm(), 1e-6));
        if alpha == 1.0 {
            let sp = stationary_phase_simple(|_| 1.0, lambda, &x1)? + stationary_phase_simple(|_| 1.0, lambda, &x2)?;
            r.push(Check::at_most("two simple terms vs CFU, alpha = 1", (sp - u).norm() / u.norm(), 10.0 / lambda));
        }
    }
    Ok(())
}

fn berry(r: &mut SuiteReport) -> Result<()> {
    let eps = 0.01;
    let data = InitialData::new(Amplitude::Gaussian, Phase::Cubic, eps)?;
    let scale = 2.0 / eps.powf(2.0 / 3.0);
    let probes: Vec<(f64, f64)> = [-0.6, -0.2, 0.2, 0.6, 1.0]
        .iter()
        .flat_map(|&x| [-1.5, 0.5].into_iter().map(move |z| (x, z)))
        .collect();
    let mut worst = 0.0f64;
    for (x, z) in probes {
        let p = -0.5 * x * x + z / scale;
        let b = berry_semiclassical_wigner(&data, x, p)?;
        let w = wigner_transform(|y| data.value(y), |y| data.value(y), eps, x, p, 1e-9)?.re;
        let rel = (b - w).abs() / w.abs();
        r.note(format!("x = {x}, Airy argument {z}: Berry {b:.6e}, quadrature {w:.6e}, rel {rel:.3e}"));
        worst = worst.max(rel);
    }
    r.push(Check::at_most("max relative error over 10 probes", worst, 0.05));
    Ok(())
}

/// Relative L2 error of the diagonal Airy function over r^2 in [lo, hi].
pub fn diag_annulus_error(n: u32, epsilon: f64, lo: f64, hi: f64) -> Result<f64> {
    let state = EigenState::harmonic(n, epsilon)?;
    let ra = lo.sqrt();
    let rb = hi.sqrt();
    let panels = 64 * (n as usize + 1);
    let integrate = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let h = (rb - ra) / panels as f64;
        (0..panels)
            .map(|i| integrate_real(|r| f(r) * r, ra + h * i as f64, ra + h * (i + 1) as f64, 1e-15))
            .sum()
    };
    let exact = |r: f64| exact_unchecked(n, n, epsilon, r, 0.0).re;
    let diff = integrate(&|r: f64| (airy_wigner_diag(&state, r, 0.0) - exact(r)).powi(2))?;
    let norm = integrate(&|r: f64| exact(r).powi(2))?;
    Ok((diff / norm).sqrt())
}

fn airy_diag(r: &mut SuiteReport) -> Result<()> {
    let ns = [10u32, 20, 40];
    let mut errs = Vec::new();
    for &n in &ns {
        let eps = 1.0 / (f64::from(n) + 0.5);
        let e = diag_annulus_error(n, eps, 0.5, 3.0)?;
        r.push(Check::flag(format!("annulus 0.5 <= r^2 <= 3 relative L2 error, n = {n}"), e, true));
        errs.push(e);
        let s = eps.powf(2.0 / 3.0) * 2f64.cbrt();
        let layer = diag_annulus_error(n, eps, 2.0 - 2.0 * s, 2.0 + 2.0 * s)?;
        r.note(format!("n = {n}: Airy layer |r^2 - 2E| <= 2 eps^(2/3) (2E)^(1/3) relative L2 error {layer:.4e}"));
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    r.push(Check::flag("errors decrease monotonically in n", f64::from(u8::from(monotone)), monotone));
    Ok(())
}

fn airy_offdiag(r: &mut SuiteReport) -> Result<()> {
    let mut wind_ok = true;
    let mut worst_sym = 0.0f64;
    for n in [1u32, 5, 10, 20, 40] {
        for k in 1..=3u32.min(n) {
            for (a, b) in [(n, n - k), (n - k, n)] {
                let eps = 1.0 / (f64::from(n.max(b)) + 0.5);
                let idx = WignerEigenIndex::new(a, b, eps)?;
                let (ea, eb) = idx.energies();
                let radius = 0.5 * ((2.0 * ea).sqrt() + (2.0 * eb).sqrt());
                let steps = 720;
                let mut turns = 0.0;
                let mut prev = airy_wigner_offdiag(&idx, radius, 0.0).value;
                for s in 1..=steps {
                    let th = 2.0 * PI * f64::from(s) / f64::from(steps);
                    let cur = airy_wigner_offdiag(&idx, radius * th.cos(), radius * th.sin()).value;
                    turns += (cur / prev).arg();
                    prev = cur;
                }
                let winding = turns / (2.0 * PI);
                let expect = -(f64::from(a) - f64::from(b));
                if (winding - expect).abs() > 1e-9 {
                    wind_ok = false;
                    r.note(format!("({a},{b}): winding {winding}"));
                }
                for rad in [0.5 * radius, radius, 1.2 * radius] {
                    let base = airy_wigner_offdiag(&idx, rad, 0.0).value.norm();
                    for s in 0..64 {
                        let th = 2.0 * PI * f64::from(s) / 64.0;
                        let v = airy_wigner_offdiag(&idx, rad * th.cos(), rad * th.sin()).value.norm();
                        worst_sym = worst_sym.max((v - base).abs() / base.max(f64::MIN_POSITIVE));
                    }
                }
            }
        }
    }
    r.push(Check::flag("winding equals -(n - m) for all pairs", f64::from(u8::from(wind_ok)), wind_ok));
    r.push(Check::at_most("max relative angular variation of the modulus", worst_sym, 1e-10));
    Ok(())
}

/// Gaussian amplitude with phase x^2/2, the initial datum of the series criteria.
pub fn gaussian_quadratic(epsilon: f64) -> Result<InitialData> {
    InitialData::new(Amplitude::Gaussian, Phase::Quadratic { sign: 1.0 }, epsilon)
}

fn relative_gap(a: &Field2D, b: &Field2D) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm() / b.l2_norm())
}

fn rotation(r: &mut SuiteReport) -> Result<()> {
    let start = Instant::now();
    let eps = 0.25;
    let data = gaussian_quadratic(eps)?;
    let sol = SeriesSolution::exact_from_data(&data)?;
    r.note(format!("retained n <= {}", sol.n_max()));
    let grid = Grid2D::square(4.5, 0.05)?;
    let w0 = initial_wigner_field(&data, grid, 1e-11)?;
    let s0 = sol.field(grid, 0.0);
    r.push(Check::at_most("t = 0 reconstruction, relative L2", relative_gap(&s0, &w0)?, 0.01));
    for t in [PI / 2.0, PI] {
        let (c, s) = (t.cos(), t.sin());
        let rotated = Field2D::from_fn(grid, |x, p| sol.evaluate(x * c - p * s, x * s + p * c, 0.0));
        let st = sol.field(grid, t);
        r.push(Check::at_most(format!("rotation identity at t = {t:.4}, relative L2"), relative_gap(&st, &rotated)?, 0.01));
    }
    r.push(Check::at_most("runtime seconds", start.elapsed().as_secs_f64(), 300.0));
    Ok(())
}

/// int int f over the disc of radius `reach` in polar coordinates; the angular
/// trapezoid rule is exact for the angular harmonics present.
fn polar_integral<F: Fn(f64, f64) -> Complex64 + Sync>(f: F, reach: f64, nr: usize, ntheta: usize) -> Complex64 {
    let h = reach / nr as f64;
    let dth = 2.0 * PI / ntheta as f64;
    (0..nr)
        .into_par_iter()
        .map(|i| {
            let nodes = [(-(3f64 / 5.0).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((3f64 / 5.0).sqrt(), 5.0 / 9.0)];
            let mut s = Complex64::default();
            for (z, w) in nodes {
                let rr = h * (i as f64 + 0.5 + 0.5 * z);
                let ring: Complex64 = (0..ntheta).map(|j| f(rr * (dth * j as f64).cos(), rr * (dth * j as f64).sin())).sum();
                s += ring * (w * 0.5 * h * rr * dth);
            }
            s
        })
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

fn structure(r: &mut SuiteReport) -> Result<()> {
    let eps = 0.25;
    let data = gaussian_quadratic(eps)?;
    let exact = SeriesSolution::exact_from_data(&data)?;
    let grid = Grid2D::square(4.5, 0.1)?;
    let mut split = 0.0f64;
    for (x, p, t) in [(0.3, -0.2, 0.7), (-1.1, 0.8, 2.5), (0.0, 1.5, 5.0)] {
        let total = exact.evaluate(x, p, t);
        let parts = exact.coherent_part(x, p) + exact.incoherent_part(x, p, t);
        split = split.max((total - parts).norm() / total.norm().max(1e-300));
    }
    r.push(Check::at_most("coherent + incoherent = total (relative)", split, 1e-12));

    let reach = 4.5;
    let exact_mass = polar_integral(|x, p| exact.incoherent_part(x, p, 0.9), reach, 24, 192).norm();
    r.push(Check::at_most("int int incoherent, exact backend", exact_mass, 1e-6));
    let airy = SeriesSolution::airy_from_data(&data, DEFAULT_BAND, grid)?;
    let airy_mass = polar_integral(|x, p| airy.incoherent_part(x, p, 0.9), reach, 24, 192).norm();
    r.push(Check::at_most("int int incoherent, Airy backend", airy_mass, 1e-6));

    let c1 = exact.coherent_field(grid);
    let _ = exact.field(grid, 3.0);
    let c2 = exact.coherent_field(grid);
    let same = c1.values.iter().zip(&c2.values).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    r.push(Check::flag("coherent field byte-identical across t", f64::from(u8::from(same)), same));

    let mut worst = 0.0f64;
    let peak = (0..=30).map(|i| airy.energy_density_coherent(0.1 * f64::from(i)).unwrap_or(0.0).abs()).fold(0.0, f64::max);
    for x in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let closed = airy.energy_density_coherent(x)?;
        let quad = airy.energy_density_coherent_quadrature(x)?;
        worst = worst.max((closed - quad).abs() / closed.abs().max(1e-3 * peak));
    }
    r.push(Check::at_most("coherent density closed form vs p-quadrature", worst, 1e-4));

    let mut worst = 0.0f64;
    for n in 1..=8u32.min(airy.n_max()) {
        for k in 1..=2u32.min(n) {
            let closed = airy.incoherent_x0_term(n, n - k)?;
            let idx = WignerEigenIndex::new(n, n - k, eps)?;
            let reach = (2.0 * idx.energies().0).sqrt() + 40.0 * eps.powf(2.0 / 3.0);
            let quad = integrate_real(|p| airy_wigner_offdiag(&idx, 0.0, p).value.re, -reach, reach, 1e-13)?;
            let scale = closed.abs().max(1e-6);
            worst = worst.max((closed - quad).abs() / scale);
        }
    }
    r.push(Check::at_most("incoherent x = 0 terms closed form vs p-quadrature", worst, 1e-4));
    Ok(())
}

fn coeff_routes(r: &mut SuiteReport) -> Result<()> {
    let eps = 0.25;
    let data = gaussian_quadratic(eps)?;
    let m = coeff_matrix_numeric(&data, 8, Grid2D::square(4.5, 0.05)?)?;
    let d = m.route_discrepancy().ok_or_else(|| Error::Domain("no numeric entries".into()))?;
    r.push(Check::at_most("max |projection - factorized| / max |c|, n,m <= 8", d, 1e-6));
    r.push(Check::at_most("Hermitian defect / max |c|", m.hermitian_defect() / m.max_abs(), 1e-12));
    r.note(format!("coherent mass (2 pi eps) sum c_nn = {:.12}", m.coherent_mass()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope").is_err());
        assert!(run_criterion(0).is_err());
        assert!(run_criterion(11).is_err());
    }

    #[test]
    fn identities_suite_passes() {
        let r = run_suite("identities").unwrap();
        assert!(r.passed(), "{}", r.detail());
        assert!(r.summary_line().starts_with("PASS 3 identities"));
    }

    #[test]
    fn polar_integral_kills_angular_harmonics() {
        let v = polar_integral(|x, p| Complex64::new(x * x - p * p, x * p) * (-(x * x + p * p)).exp(), 5.0, 100, 16);
        assert!(v.norm() < 1e-14);
        let g = polar_integral(|x, p| Complex64::new((-(x * x + p * p)).exp(), 0.0), 6.0, 200, 8);
        assert!((g.re - PI).abs() < 1e-10);
    }
}
