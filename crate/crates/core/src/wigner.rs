//! Wigner transforms: brute-force cross-Wigner quadrature of arbitrary
//! wavefunctions and the closed-form Laguerre Wigner eigenfunctions of the
//! harmonic oscillator.
//!
//! Convention: W(f, g)(x, p) = (2 pi eps)^{-1} int e^{-ipy/eps} f(x + y/2) conj(g(x - y/2)) dy
//! and W_nm = W(v_n, v_m).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, domain, Result};
use crate::quadrature::{oscillatory_integral, truncation_radius, Field2D, Grid2D};
use crate::schrodinger::{check_epsilon, eigenfunction_unchecked, EigenState};
use crate::specialfn::laguerre_function;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerEigenIndex {
    pub n: u32,
    pub m: u32,
    pub epsilon: f64,
}

impl WignerEigenIndex {
    pub fn new(n: u32, m: u32, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { n, m, epsilon })
    }

    pub fn energies(&self) -> (f64, f64) {
        (
            (f64::from(self.n) + 0.5) * self.epsilon,
            (f64::from(self.m) + 0.5) * self.epsilon,
        )
    }
}

/// Numeric cross-Wigner transform W(psi, psi2)(x, p) to absolute tolerance `tol`.
pub fn wigner_transform<F, G>(psi: F, psi2: G, epsilon: f64, x: f64, p: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    check_epsilon(epsilon)?;
    check_finite("x", x)?;
    check_finite("p", p)?;
    let scale = 2.0 * PI * epsilon;
    let inner_tol = tol * scale;
    let envelope = |y: f64| psi(x + 0.5 * y).norm() * psi2(x - 0.5 * y).norm();
    let radius = truncation_radius(&envelope, 0.0, inner_tol)?;
    let r = oscillatory_integral(
        |y| psi(x + 0.5 * y) * psi2(x - 0.5 * y).conj(),
        |y| -p * y,
        1.0 / epsilon,
        -radius,
        radius,
        inner_tol,
    )?;
    Ok(r.value / scale)
}

/// Same transform written with sigma = y/2 and prefactor (pi eps)^{-1}.
pub fn wigner_transform_sigma<F, G>(psi: F, psi2: G, epsilon: f64, x: f64, p: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    check_epsilon(epsilon)?;
    let scale = PI * epsilon;
    let inner_tol = tol * scale;
    let envelope = |s: f64| psi(x + s).norm() * psi2(x - s).norm();
    let radius = truncation_radius(&envelope, 0.0, inner_tol)?;
    let r = oscillatory_integral(
        |s| psi(x + s) * psi2(x - s).conj(),
        |s| -2.0 * p * s,
        1.0 / epsilon,
        -radius,
        radius,
        inner_tol,
    )?;
    Ok(r.value / scale)
}

/// Numeric W(v_n, v_m) of exact Hermite states.
pub fn wigner_transform_eigen(idx: &WignerEigenIndex, x: f64, p: f64, tol: f64) -> Result<Complex64> {
    check_index(idx)?;
    let (n, m, eps) = (idx.n, idx.m, idx.epsilon);
    wigner_transform(
        |y| Complex64::new(eigenfunction_unchecked(n, eps, y), 0.0),
        |y| Complex64::new(eigenfunction_unchecked(m, eps, y), 0.0),
        eps,
        x,
        p,
        tol,
    )
}

fn check_index(idx: &WignerEigenIndex) -> Result<()> {
    check_epsilon(idx.epsilon)?;
    let cap = EigenState::MAX_INDEX;
    if idx.n > cap || idx.m > cap {
        return domain(format!("Wigner index ({}, {}) exceeds the cap {cap}", idx.n, idx.m));
    }
    Ok(())
}

/// Closed-form Wigner eigenfunction
/// W_nm = ((-1)^m'/(pi eps)) sqrt(m'!/n'!) X^{k/2} e^{-X/2} L_m'^{(k)}(X) e^{-i(n-m) phi},
/// with m' = min(n, m), n' = max(n, m), k = |n - m|, X = 2(x^2 + p^2)/eps and
/// phi the full-plane angle of (x, p).
pub fn exact_wigner_eigen(idx: &WignerEigenIndex, x: f64, p: f64) -> Result<Complex64> {
    check_index(idx)?;
    check_finite("x", x)?;
    check_finite("p", p)?;
    Ok(exact_unchecked(idx.n, idx.m, idx.epsilon, x, p))
}

pub(crate) fn exact_unchecked(n: u32, m: u32, eps: f64, x: f64, p: f64) -> Complex64 {
    let lo = n.min(m);
    let k = n.max(m) - lo;
    let big_x = 2.0 * (x * x + p * p) / eps;
    let sign = if lo.is_multiple_of(2) { 1.0 } else { -1.0 };
    let radial = sign / (PI * eps) * laguerre_function(lo, k, big_x);
    if n == m {
        return Complex64::new(radial, 0.0);
    }
    let winding = f64::from(n) - f64::from(m);
    Complex64::from_polar(radial, -winding * p.atan2(x))
}

/// A sampled field with support diagnostics.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub field: Field2D,
    /// Fraction of the unit mass of W_nn missing from the grid (diagonal only).
    pub mass_defect: f64,
    pub warning: Option<String>,
}

/// Samples the closed-form W_nm on a grid.
pub fn wigner_field(idx: &WignerEigenIndex, grid: Grid2D) -> Result<SampledField> {
    check_index(idx)?;
    let (n, m, eps) = (idx.n, idx.m, idx.epsilon);
    let field = Field2D::from_fn(grid, |x, p| exact_unchecked(n, m, eps, x, p));
    let support = ((2.0 * f64::from(n.max(m)) + 1.0) * eps).sqrt();
    let reach = grid.x_min.abs().min(grid.x_max.abs()).min(grid.p_min.abs()).min(grid.p_max.abs());
    let mass_defect = if n == m { (1.0 - field.integral().re).abs() } else { 0.0 };
    let warning = if mass_defect > 0.01 || reach < support {
        Some(format!(
            "grid half-width {reach} clips the support radius {support:.4} (mass defect {mass_defect:.3e})"
        ))
    } else {
        None
    };
    Ok(SampledField {
        field,
        mass_defect,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{inner_product_2d, integrate_real};

    fn idx(n: u32, m: u32, eps: f64) -> WignerEigenIndex {
        WignerEigenIndex::new(n, m, eps).unwrap()
    }

    #[test]
    fn ground_state_values() {
        let g = |y: f64| Complex64::new(eigenfunction_unchecked(0, 1.0, y), 0.0);
        let w = wigner_transform(g, g, 1.0, 0.0, 0.0, 1e-12).unwrap();
        assert!((w.re - 1.0 / PI).abs() < 1e-10 && w.im.abs() < 1e-12);
        let w = wigner_transform(g, g, 1.0, 1.0, 1.0, 1e-12).unwrap();
        assert!((w.re - (-2.0f64).exp() / PI).abs() < 1e-10);
    }

    #[test]
    fn diagonal_transform_is_real() {
        for &(x, p) in &[(0.3, -1.2), (-1.0, 0.5), (2.0, 2.0)] {
            let w = wigner_transform_eigen(&idx(3, 3, 1.0), x, p, 1e-12).unwrap();
            assert!(w.im.abs() < 1e-11);
        }
    }

    #[test]
    fn sigma_form_equals_y_form() {
        let f = |y: f64| Complex64::new(eigenfunction_unchecked(2, 0.5, y), 0.0);
        let g = |y: f64| Complex64::new(eigenfunction_unchecked(1, 0.5, y), 0.0);
        for &(x, p) in &[(0.2, 0.4), (-0.9, 1.1)] {
            let a = wigner_transform(f, g, 0.5, x, p, 1e-12).unwrap();
            let b = wigner_transform_sigma(f, g, 0.5, x, p, 1e-12).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert!((exact_wigner_eigen(&idx(0, 0, 1.0), 0.0, 0.0).unwrap().re - 1.0 / PI).abs() < 1e-15);
        assert!((exact_wigner_eigen(&idx(1, 1, 1.0), 0.0, 0.0).unwrap().re + 1.0 / PI).abs() < 1e-15);
        assert!(exact_wigner_eigen(&idx(201, 0, 1.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature_small_indices() {
        for &(n, m) in &[(2, 0), (0, 2), (3, 1), (1, 1)] {
            for &(x, p) in &[(0.4, -0.7), (-1.5, 0.9), (2.2, 1.3)] {
                let q = wigner_transform_eigen(&idx(n, m, 1.0), x, p, 1e-12).unwrap();
                let c = exact_wigner_eigen(&idx(n, m, 1.0), x, p).unwrap();
                assert!((q - c).norm() < 1e-9, "({n},{m}) at ({x},{p}): {q} vs {c}");
            }
        }
    }

    #[test]
    fn hermitian_symmetry_and_parity() {
        for &(x, p) in &[(0.3, 0.8), (-1.1, 0.2)] {
            let a = exact_wigner_eigen(&idx(5, 2, 0.7), x, p).unwrap();
            let b = exact_wigner_eigen(&idx(2, 5, 0.7), x, p).unwrap();
            assert!((a - b.conj()).norm() < 1e-15);
            let d1 = exact_wigner_eigen(&idx(4, 4, 0.7), x, p).unwrap();
            let d2 = exact_wigner_eigen(&idx(4, 4, 0.7), -x, -p).unwrap();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn real_part_zero_crossings_count_winding() {
        let (n, m) = (6u32, 2u32);
        let r = 1.3;
        let k = 4096;
        let mut crossings = 0;
        let mut prev = exact_wigner_eigen(&idx(n, m, 1.0), r, 0.0).unwrap().re;
        for i in 1..=k {
            let t = 2.0 * PI * f64::from(i) / f64::from(k) + 1e-3;
            let v = exact_wigner_eigen(&idx(n, m, 1.0), r * t.cos(), r * t.sin()).unwrap().re;
            if v * prev < 0.0 {
                crossings += 1;
            }
            prev = v;
        }
        assert_eq!(crossings, 2 * (n - m));
    }

    #[test]
    fn normalization_orthogonality_and_isometry() {
        let grid = Grid2D::square(7.0, 0.05).unwrap();
        let eps = 1.0;
        let fields: Vec<Vec<SampledField>> = (0..=3)
            .map(|n| (0..=3).map(|m| wigner_field(&idx(n, m, eps), grid).unwrap()).collect())
            .collect();
        for n in 0..=3usize {
            for m in 0..=3usize {
                let mass = fields[n][m].field.integral();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((mass - Complex64::new(expect, 0.0)).norm() < 1e-6);
            }
        }
        for (a, b, c, d) in [(0, 0, 0, 0), (2, 1, 2, 1), (2, 1, 1, 2), (3, 0, 3, 1), (1, 3, 1, 3)] {
            let ip = inner_product_2d(&fields[a][b].field, &fields[c][d].field).unwrap() * (2.0 * PI * eps);
            let expect = if a == c && b == d { 1.0 } else { 0.0 };
            assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-4, "({a}{b},{c}{d}) {ip}");
        }
        for n in 4..=10 {
            let f = wigner_field(&idx(n, n, eps), grid).unwrap();
            assert!((f.field.integral().re - 1.0).abs() < 1e-6);
            assert!(f.warning.is_none());
        }
    }

    #[test]
    fn clipped_grid_warns() {
        let grid = Grid2D::square(1.0, 0.1).unwrap();
        assert!(wigner_field(&idx(6, 6, 1.0), grid).unwrap().warning.is_some());
    }

    #[test]
    fn marginal_is_position_density() {
        for n in [0u32, 3, 10] {
            for &x in &[0.0, 0.7, -1.9] {
                let marg = integrate_real(|p| exact_unchecked(n, n, 1.0, x, p).re, -12.0, 12.0, 1e-13).unwrap();
                let v = eigenfunction_unchecked(n, 1.0, x);
                assert!((marg - v * v).abs() < 1e-6);
            }
        }
    }
}
