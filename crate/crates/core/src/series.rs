//! Wigner eigenfunction series of the evolving Wigner function: evaluation,
//! coherent/incoherent split, time averages, energy densities and the
//! exact-versus-Airy error report.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy_eigen::{airy_wigner_offdiag, PhaseSpaceGeometry};
use crate::coefficients::{coeff_matrix_factorized, coeff_offdiag_airy, CoeffEntry, CoeffMatrix, Provenance};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_adaptive, Field2D, Grid2D, QuadOptions};
use crate::schrodinger::{InitialData, WaveSeries};
use crate::specialfn::{ai, ln_factorial};
use crate::wigner::WignerEigenIndex;

/// Default bandwidth |n - m| <= DEFAULT_BAND of the Airy-backend double sum.
pub const DEFAULT_BAND: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    ExactEigen,
    AiryEigen,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::ExactEigen => "exact",
            Backend::AiryEigen => "airy",
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), v: f64) {
    let t = acc.0 + v;
    if acc.0.abs() >= v.abs() {
        acc.1 += (acc.0 - t) + v;
    } else {
        acc.1 += (v - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn add(&mut self, v: Complex64) {
        neumaier(&mut self.re, v.re);
        neumaier(&mut self.im, v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// All W_{m+k,m}(x, p) for 0 <= m <= n_max - k, 0 <= k <= band, indexed [k][m],
/// from the three-term Laguerre recurrence in m.
pub fn exact_wigner_block(n_max: u32, band: u32, eps: f64, x: f64, p: f64) -> Vec<Vec<Complex64>> {
    let big_x = 2.0 * (x * x + p * p) / eps;
    let phi = p.atan2(x);
    let band = band.min(n_max);
    (0..=band)
        .map(|k| {
            let kf = f64::from(k);
            let count = (n_max - k) as usize + 1;
            let log_pre = if k == 0 { -0.5 * big_x } else { 0.5 * kf * big_x.ln() - 0.5 * big_x - 0.5 * ln_factorial(k) };
            let pre = Complex64::from_polar(log_pre.exp() / (PI * eps), -kf * phi);
            let mut out = Vec::with_capacity(count);
            let (mut q_prev, mut q) = (0.0, 1.0);
            for m in 0..count {
                let mf = m as f64;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out.push(pre * (sign * q));
                let next = ((2.0 * mf + 1.0 + kf - big_x) * q - (mf * (mf + kf)).sqrt() * q_prev) / ((mf + 1.0) * (mf + 1.0 + kf)).sqrt();
                q_prev = q;
                q = next;
            }
            out
        })
        .collect()
}

/// Truncated eigenfunction series sum (2 pi eps) c_nm e^{-i(E_n - E_m)t/eps} W_nm.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub coeffs: CoeffMatrix,
    pub epsilon: f64,
    pub backend: Backend,
    pub energies: Vec<f64>,
    /// Retained bandwidth |n - m| <= band.
    pub band: u32,
}

impl SeriesSolution {
    pub fn new(coeffs: CoeffMatrix, backend: Backend, band: u32) -> Result<Self> {
        if coeffs.n_max != coeffs.m_max {
            return domain("the series needs a square coefficient matrix");
        }
        let eps = coeffs.epsilon;
        let energies = (0..=coeffs.n_max).map(|n| (f64::from(n) + 0.5) * eps).collect();
        Ok(Self {
            epsilon: eps,
            energies,
            band: band.min(coeffs.n_max),
            coeffs,
            backend,
        })
    }

    /// Exact backend over the decay-rule truncation of the projections, full band.
    pub fn exact_from_data(data: &InitialData) -> Result<Self> {
        let n_max = decay_truncation(data)?;
        Self::new(coeff_matrix_factorized(data, n_max)?, Backend::ExactEigen, n_max)
    }

    /// Airy backend with C~_nm for |n - m| <= band over the decay-rule truncation.
    pub fn airy_from_data(data: &InitialData, band: u32, grid: Grid2D) -> Result<Self> {
        let n_max = decay_truncation(data)?;
        let eps = data.epsilon;
        let k = n_max as usize + 1;
        let upper: Vec<Option<Complex64>> = (0..k * k)
            .into_par_iter()
            .map(|q| {
                let (n, m) = ((q / k) as u32, (q % k) as u32);
                if n > m || m - n > band {
                    return Ok(None);
                }
                coeff_offdiag_airy(&WignerEigenIndex::new(n, m, eps)?, data, grid).map(|e| Some(e.value))
            })
            .collect::<Result<_>>()?;
        let entries = (0..k * k)
            .map(|q| {
                let (n, m) = (q / k, q % k);
                let v = if n <= m { upper[q] } else { upper[m * k + n].map(|v| v.conj()) };
                CoeffEntry::approximate(v.unwrap_or_default(), Provenance::SemiClosed)
            })
            .collect();
        Self::new(CoeffMatrix::new(n_max, n_max, eps, entries)?, Backend::AiryEigen, band)
    }

    pub fn n_max(&self) -> u32 {
        self.coeffs.n_max
    }

    fn weight(&self, n: u32, m: u32, t: f64) -> Complex64 {
        let de = self.energies[n as usize] - self.energies[m as usize];
        2.0 * PI * self.epsilon * self.coeffs.value(n, m) * Complex64::from_polar(1.0, -de * t / self.epsilon)
    }

    /// Basis values W_nm(x, p) for n >= m and n - m <= band, indexed [k][m] with n = m + k.
    fn basis(&self, x: f64, p: f64, band: u32) -> Vec<Vec<Complex64>> {
        let n_max = self.n_max();
        match self.backend {
            Backend::ExactEigen => exact_wigner_block(n_max, band, self.epsilon, x, p),
            Backend::AiryEigen => (0..=band)
                .map(|k| {
                    (0..=n_max - k)
                        .map(|m| {
                            let idx = WignerEigenIndex { n: m + k, m, epsilon: self.epsilon };
                            airy_wigner_offdiag(&idx, x, p).value
                        })
                        .collect()
                })
                .collect(),
        }
    }

    fn diagonal_sum(&self, basis: &[Vec<Complex64>]) -> f64 {
        let mut acc = CompensatedSum::default();
        for (m, w) in basis[0].iter().enumerate() {
            acc.add(self.weight(m as u32, m as u32, 0.0) * w);
        }
        acc.value().re
    }

    fn offdiag_sum(&self, basis: &[Vec<Complex64>], t: f64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        let scale = 2.0 * PI * self.epsilon;
        for (k, row) in basis.iter().enumerate().skip(1) {
            for (m, w) in row.iter().enumerate() {
                let n = m + k;
                let rot = Complex64::from_polar(1.0, -(self.energies[n] - self.energies[m]) * t / self.epsilon);
                let c_nm = self.coeffs.value(n as u32, m as u32);
                let c_mn = self.coeffs.value(m as u32, n as u32);
                acc.add(scale * c_nm * rot * w);
                acc.add(scale * c_mn * rot.conj() * w.conj());
            }
        }
        acc.value()
    }

    /// Diagonal sub-series; independent of t.
    pub fn coherent_part(&self, x: f64, p: f64) -> f64 {
        self.diagonal_sum(&self.basis(x, p, 0))
    }

    /// Off-diagonal sub-series at time t.
    pub fn incoherent_part(&self, x: f64, p: f64, t: f64) -> Complex64 {
        self.offdiag_sum(&self.basis(x, p, self.band), t)
    }

    /// coherent_part + incoherent_part.
    pub fn evaluate(&self, x: f64, p: f64, t: f64) -> Complex64 {
        let b = self.basis(x, p, self.band);
        self.diagonal_sum(&b) + self.offdiag_sum(&b, t)
    }

    pub fn field(&self, grid: Grid2D, t: f64) -> Field2D {
        Field2D::from_fn(grid, |x, p| self.evaluate(x, p, t))
    }

    pub fn coherent_field(&self, grid: Grid2D) -> Field2D {
        Field2D::from_fn(grid, |x, p| Complex64::new(self.coherent_part(x, p), 0.0))
    }

    pub fn incoherent_field(&self, grid: Grid2D, t: f64) -> Field2D {
        Field2D::from_fn(grid, |x, p| self.incoherent_part(x, p, t))
    }

    /// (1/T) int_0^T incoherent_part dt, integrated termwise in closed form.
    pub fn incoherent_time_average(&self, x: f64, p: f64, horizon: f64) -> Result<Complex64> {
        if !(horizon > 0.0) {
            return domain("the averaging horizon must be positive");
        }
        let basis = self.basis(x, p, self.band);
        let mut acc = CompensatedSum::default();
        for (k, row) in basis.iter().enumerate().skip(1) {
            for (m, w) in row.iter().enumerate() {
                let (n, m) = ((m + k) as u32, m as u32);
                let omega = (self.energies[n as usize] - self.energies[m as usize]) / self.epsilon;
                let avg = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -omega * horizon)) / Complex64::new(0.0, omega * horizon);
                let scale = 2.0 * PI * self.epsilon;
                acc.add(scale * self.coeffs.value(n, m) * avg * w);
                acc.add(scale * self.coeffs.value(m, n) * avg.conj() * w.conj());
            }
        }
        Ok(acc.value())
    }

    fn require_airy(&self) -> Result<()> {
        if self.backend != Backend::AiryEigen {
            return domain("energy-density closed forms need the Airy backend");
        }
        Ok(())
    }

    /// sum_n (2 pi eps) C~_nn 2^{2/3} eps^{-1/3} (2E_n)^{-1/6}
    /// Ai^2(-(2E_n - x^2)/(2^{2/3} eps^{2/3} (2E_n)^{1/3})).
    pub fn energy_density_coherent(&self, x: f64) -> Result<f64> {
        self.require_airy()?;
        let eps = self.epsilon;
        let c = 2f64.powf(2.0 / 3.0);
        let mut acc = CompensatedSum::default();
        for (n, &e) in self.energies.iter().enumerate() {
            let two_e = 2.0 * e;
            let s = eps.powf(2.0 / 3.0) * two_e.cbrt();
            let term = c * s.powf(-0.5) * ai(-(two_e - x * x) / (c * s)).powi(2);
            acc.add(2.0 * PI * eps * self.coeffs.value(n as u32, n as u32) * term);
        }
        Ok(acc.value().re)
    }

    /// p-quadrature of the coherent part at x.
    pub fn energy_density_coherent_quadrature(&self, x: f64) -> Result<f64> {
        p_quadrature(|p| Complex64::new(self.coherent_part(x, p), 0.0), self.p_reach(), self.epsilon).map(|v| v.re)
    }

    /// Closed series at x = 0: sum over retained n != m of (2 pi eps) C~_nm
    /// e^{-i(E_n - E_m)t/eps} cos((n - m) pi/2) 2^{2/3} s^{-1/2} Ai^2(-R^2/(2^{2/3} s)),
    /// s = eps^{2/3} R^{4/3} (R^2 - rho^2)^{-1/3}.
    pub fn energy_density_incoherent_x0(&self, t: f64) -> Result<Complex64> {
        self.require_airy()?;
        let mut acc = CompensatedSum::default();
        for k in 1..=self.band {
            for m in 0..=self.n_max() - k {
                let n = m + k;
                let term = self.incoherent_x0_term(n, m)?;
                acc.add(self.weight(n, m, t) * term);
                acc.add(self.weight(m, n, t) * term);
            }
        }
        Ok(acc.value())
    }

    /// int W~_nm(0, p) dp in closed form.
    pub fn incoherent_x0_term(&self, n: u32, m: u32) -> Result<f64> {
        let g = PhaseSpaceGeometry::new(self.energies[n as usize], self.energies[m as usize])?;
        let big = g.r_nm * g.r_nm;
        let s = self.epsilon.powf(2.0 / 3.0) * g.r_nm.powf(4.0 / 3.0) / (big - g.rho_nm * g.rho_nm).cbrt();
        let c = 2f64.powf(2.0 / 3.0);
        let angular = (f64::from(n.abs_diff(m)) * PI / 2.0).cos();
        let angular = if angular.abs() < 1e-12 { 0.0 } else { angular };
        Ok(angular * c * s.powf(-0.5) * ai(-big / (c * s)).powi(2))
    }

    /// p-quadrature of the incoherent part at x = 0.
    pub fn energy_density_incoherent_x0_quadrature(&self, t: f64) -> Result<Complex64> {
        p_quadrature(|p| self.incoherent_part(0.0, p, t), self.p_reach(), self.epsilon)
    }

    /// |p| beyond which every retained basis function is negligible.
    fn p_reach(&self) -> f64 {
        let two_e = 2.0 * self.energies[self.n_max() as usize];
        match self.backend {
            Backend::AiryEigen => (two_e + 40.0 * self.epsilon.powf(2.0 / 3.0) * two_e.cbrt()).sqrt(),
            Backend::ExactEigen => two_e.sqrt() + 8.0 * self.epsilon.sqrt(),
        }
    }
}

fn p_quadrature<F: Fn(f64) -> Complex64>(f: F, reach: f64, eps: f64) -> Result<Complex64> {
    let panels = ((2.0 * reach * reach / eps).ceil() as usize).clamp(32, 20_000);
    let pts: Vec<f64> = (0..=panels).map(|i| -reach + 2.0 * reach * i as f64 / panels as f64).collect();
    Ok(integrate_adaptive(&f, &pts, &QuadOptions::relative(1e-14, 1e-11))?.value)
}

/// Largest index retained by the projection decay rule of [`WaveSeries::from_data`].
pub fn decay_truncation(data: &InitialData) -> Result<u32> {
    let ws = WaveSeries::from_data(data)?;
    ws.terms
        .iter()
        .map(|(s, _)| s.n)
        .max()
        .ok_or_else(|| crate::error::Error::Domain("no projection survived truncation".into()))
}

/// Norms of the gap between two series on a shared grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesErrorReport {
    pub t: f64,
    pub l2: f64,
    pub relative_l2: f64,
    pub linf: f64,
    /// |int int (A - B)|.
    pub mass_defect: f64,
}

pub fn series_error_report(a: &SeriesSolution, b: &SeriesSolution, grid: Grid2D, t: f64) -> Result<SeriesErrorReport> {
    if (a.epsilon - b.epsilon).abs() > 1e-15 * a.epsilon {
        return domain("series use different epsilon");
    }
    let fa = a.field(grid, t);
    let fb = b.field(grid, t);
    let d = fa.sub(&fb)?;
    let l2 = d.l2_norm();
    let base = fa.l2_norm();
    Ok(SeriesErrorReport {
        t,
        l2,
        relative_l2: if base > 0.0 { l2 / base } else { l2 },
        linf: d.max_abs(),
        mass_defect: d.integral().norm(),
    })
}
