//! Moyal sine and cosine bracket operators for the quadratic Hamiltonian
//! H = (x^2 + p^2)/2, realized with 4th-order central differences:
//! L = p d/dx - x d/dp and M = H - (eps^2/8)(d^2/dx^2 + d^2/dp^2).
//!
//! Output fields carry zeros on a boundary ring of [`BOUNDARY_RING`] cells,
//! which must be excluded from norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::quadrature::{Field2D, Grid2D};
use crate::specialfn::hermite;
use crate::wigner::{exact_unchecked, WignerEigenIndex};

pub const BOUNDARY_RING: usize = 2;

fn check_stencil(grid: &Grid2D) -> Result<()> {
    if grid.nx < 2 * BOUNDARY_RING + 1 || grid.np < 2 * BOUNDARY_RING + 1 {
        return domain(format!(
            "grid {}x{} is too coarse for a 5-point stencil",
            grid.nx, grid.np
        ));
    }
    Ok(())
}

fn apply<F>(field: &Field2D, op: F) -> Result<Field2D>
where
    F: Fn(&Field2D, usize, usize) -> Complex64 + Sync,
{
    let g = field.grid;
    check_stencil(&g)?;
    let rows: Vec<Vec<Complex64>> = (0..g.nx)
        .into_par_iter()
        .map(|i| {
            (0..g.np)
                .map(|j| {
                    let interior = i >= BOUNDARY_RING
                        && i < g.nx - BOUNDARY_RING
                        && j >= BOUNDARY_RING
                        && j < g.np - BOUNDARY_RING;
                    if interior {
                        op(field, i, j)
                    } else {
                        Complex64::default()
                    }
                })
                .collect()
        })
        .collect();
    Field2D::new(g, rows.into_iter().flatten().collect())
}

fn dx(f: &Field2D, i: usize, j: usize) -> Complex64 {
    let h = f.grid.hx();
    (f.get(i - 2, j) - f.get(i - 1, j) * 8.0 + f.get(i + 1, j) * 8.0 - f.get(i + 2, j)) / (12.0 * h)
}

fn dp(f: &Field2D, i: usize, j: usize) -> Complex64 {
    let h = f.grid.hp();
    (f.get(i, j - 2) - f.get(i, j - 1) * 8.0 + f.get(i, j + 1) * 8.0 - f.get(i, j + 2)) / (12.0 * h)
}

fn dxx(f: &Field2D, i: usize, j: usize) -> Complex64 {
    let h = f.grid.hx();
    (-f.get(i - 2, j) + f.get(i - 1, j) * 16.0 - f.get(i, j) * 30.0 + f.get(i + 1, j) * 16.0 - f.get(i + 2, j))
        / (12.0 * h * h)
}

fn dpp(f: &Field2D, i: usize, j: usize) -> Complex64 {
    let h = f.grid.hp();
    (-f.get(i, j - 2) + f.get(i, j - 1) * 16.0 - f.get(i, j) * 30.0 + f.get(i, j + 1) * 16.0 - f.get(i, j + 2))
        / (12.0 * h * h)
}

/// (p d/dx - x d/dp) field. The sine series truncates exactly for the oscillator,
/// so `epsilon` does not enter.
pub fn liouville_apply(field: &Field2D, _epsilon: f64) -> Result<Field2D> {
    apply(field, |f, i, j| {
        let (x, p) = (f.grid.x(i), f.grid.p(j));
        dx(f, i, j) * p - dp(f, i, j) * x
    })
}

/// H field - (eps^2/8) Laplacian(field).
pub fn cosine_bracket_apply(field: &Field2D, epsilon: f64) -> Result<Field2D> {
    apply(field, |f, i, j| {
        let (x, p) = (f.grid.x(i), f.grid.p(j));
        f.get(i, j) * (0.5 * (x * x + p * p)) - (dxx(f, i, j) + dpp(f, i, j)) * (epsilon * epsilon / 8.0)
    })
}

/// Relative interior L2 residuals of L W_nm = (i/eps)(En - Em) W_nm and
/// M W_nm = ((En + Em)/2) W_nm on the given grid.
pub fn eigen_residuals(idx: &WignerEigenIndex, grid: Grid2D) -> Result<(f64, f64)> {
    let (n, m, eps) = (idx.n, idx.m, idx.epsilon);
    let (en, em) = idx.energies();
    let w = Field2D::from_fn(grid, |x, p| exact_unchecked(n, m, eps, x, p));
    let norm = w.interior_l2_norm(BOUNDARY_RING);
    let l = liouville_apply(&w, eps)?;
    let expect_l = Complex64::new(0.0, (en - em) / eps);
    let rl = residual(&l, &w, expect_l);
    let mm = cosine_bracket_apply(&w, eps)?;
    let rm = residual(&mm, &w, Complex64::new(0.5 * (en + em), 0.0));
    Ok((rl / norm, rm / norm))
}

fn residual(applied: &Field2D, w: &Field2D, eigenvalue: Complex64) -> f64 {
    let diff = Field2D {
        grid: w.grid,
        values: applied.values.iter().zip(&w.values).map(|(a, b)| a - b * eigenvalue).collect(),
    };
    diff.interior_l2_norm(BOUNDARY_RING)
}

/// Least-squares slope of log(residual) against log(h).
pub fn measured_order(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (sx, sy) = samples
        .iter()
        .fold((0.0, 0.0), |(a, b), &(h, r)| (a + h.ln(), b + r.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = samples.iter().fold((0.0, 0.0), |(a, b), &(h, r)| {
        let dx = h.ln() - mx;
        (a + dx * (r.ln() - my), b + dx * dx)
    });
    num / den
}

/// Phase-space symbol with exact partial derivatives d^a/dx^a d^b/dp^b.
trait Symbol {
    fn derivative(&self, a: usize, b: usize, x: f64, p: f64) -> f64;
}

struct GroundWigner {
    epsilon: f64,
}

impl GroundWigner {
    fn d1(&self, a: usize, t: f64) -> f64 {
        let e = self.epsilon;
        let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * e.powf(-(a as f64) / 2.0) * hermite(a as i64, t / e.sqrt()).unwrap_or(f64::NAN) * (-t * t / e).exp()
    }
}

impl Symbol for GroundWigner {
    fn derivative(&self, a: usize, b: usize, x: f64, p: f64) -> f64 {
        self.d1(a, x) * self.d1(b, p) / (PI * self.epsilon)
    }
}

struct Constant(f64);

impl Symbol for Constant {
    fn derivative(&self, a: usize, b: usize, _x: f64, _p: f64) -> f64 {
        if a == 0 && b == 0 {
            self.0
        } else {
            0.0
        }
    }
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Moyal product f * g truncated after the term of order eps^order.
fn star_series(f: &dyn Symbol, g: &dyn Symbol, epsilon: f64, order: usize, x: f64, p: f64) -> Complex64 {
    let mut total = Complex64::default();
    let mut factorial = 1.0;
    for k in 0..=order {
        if k > 0 {
            factorial *= k as f64;
        }
        let mut s = 0.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += binomial(k, j) * sign * f.derivative(k - j, j, x, p) * g.derivative(j, k - j, x, p);
        }
        total += Complex64::new(0.0, epsilon / 2.0).powu(k as u32) / factorial * s;
    }
    total
}

/// Max-abs defect of (2 pi eps) W00 * W00 - W00 on [-4, 4]^2 (201^2 nodes),
/// with the star product truncated at `order`.
pub fn moyal_star_gaussian_check(epsilon: f64, order: usize) -> f64 {
    let w = GroundWigner { epsilon };
    let n = 201;
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let x = -4.0 + 8.0 * (k / n) as f64 / (n - 1) as f64;
            let p = -4.0 + 8.0 * (k % n) as f64 / (n - 1) as f64;
            let star = star_series(&w, &w, epsilon, order, x, p) * (2.0 * PI * epsilon);
            (star - w.derivative(0, 0, x, p)).norm()
        })
        .reduce(|| 0.0, f64::max)
}

/// Max-abs defect of f * 1 - f for f = W00 at the given truncation order.
pub fn moyal_unit_defect(epsilon: f64, order: usize) -> f64 {
    let w = GroundWigner { epsilon };
    let one = Constant(1.0);
    let mut worst: f64 = 0.0;
    for i in 0..41 {
        for j in 0..41 {
            let (x, p) = (-4.0 + 0.2 * i as f64, -4.0 + 0.2 * j as f64);
            let d = star_series(&w, &one, epsilon, order, x, p) - w.derivative(0, 0, x, p);
            worst = worst.max(d.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64) -> Grid2D {
        Grid2D::square(5.0, h).unwrap()
    }

    #[test]
    fn constant_field() {
        let g = grid(0.1);
        let c = Field2D::from_fn(g, |_, _| Complex64::new(2.5, 0.0));
        let l = liouville_apply(&c, 1.0).unwrap();
        assert!(l.interior_l2_norm(BOUNDARY_RING) < 1e-10);
        let m = cosine_bracket_apply(&c, 1.0).unwrap();
        for i in 2..g.nx - 2 {
            for j in 2..g.np - 2 {
                let (x, p) = (g.x(i), g.p(j));
                assert!((m.get(i, j).re - 2.5 * 0.5 * (x * x + p * p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn radial_field_is_annihilated() {
        let res = |h: f64| {
            let f = Field2D::from_fn(grid(h), |x, p| Complex64::new((-(x * x + p * p)).exp() * (x * x + p * p), 0.0));
            liouville_apply(&f, 1.0).unwrap().interior_l2_norm(BOUNDARY_RING)
        };
        let (a, b) = (res(0.1), res(0.05));
        assert!(b < 1e-4 && (a / b).log2() > 3.5);
    }

    #[test]
    fn real_fields_stay_real_and_skew() {
        let f = Field2D::from_fn(grid(0.05), |x, p| Complex64::new((-(x * x + 2.0 * p * p)).exp() * (1.0 + x), 0.0));
        let l = liouville_apply(&f, 1.0).unwrap();
        assert!(l.max_imag() == 0.0);
        let mut s = 0.0;
        let g = f.grid;
        for i in 2..g.nx - 2 {
            for j in 2..g.np - 2 {
                s += f.get(i, j).re * l.get(i, j).re;
            }
        }
        assert!(s.abs() * g.hx() * g.hp() < 1e-8);
    }

    #[test]
    fn hamiltonian_is_invariant() {
        let f = Field2D::from_fn(grid(0.1), |x, p| Complex64::new(0.5 * (x * x + p * p), 0.0));
        assert!(liouville_apply(&f, 1.0).unwrap().interior_l2_norm(BOUNDARY_RING) < 1e-9);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = Grid2D::new(0.0, 1.0, 4, 0.0, 1.0, 9).unwrap();
        assert!(liouville_apply(&Field2D::zeros(g), 1.0).is_err());
    }

    #[test]
    fn eigen_relations_converge() {
        for &(n, m) in &[(0u32, 0u32), (3, 1), (2, 5), (4, 4)] {
            let idx = WignerEigenIndex::new(n, m, 1.0).unwrap();
            let s: Vec<(f64, (f64, f64))> = [0.08, 0.04, 0.02]
                .iter()
                .map(|&h| (h, eigen_residuals(&idx, grid(h)).unwrap()))
                .collect();
            let ol = measured_order(&s.iter().map(|(h, r)| (*h, r.0)).collect::<Vec<_>>());
            let om = measured_order(&s.iter().map(|(h, r)| (*h, r.1)).collect::<Vec<_>>());
            if n != m {
                assert!(ol >= 2.0, "L order {ol} for ({n},{m})");
            }
            assert!(om >= 2.0, "M order {om} for ({n},{m})");
        }
    }

    #[test]
    fn order_fit() {
        let s = [(0.1, 3e-4), (0.05, 3e-4 / 16.0), (0.025, 3e-4 / 256.0)];
        assert!((measured_order(&s) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unit_symbol_is_neutral() {
        for order in 0..=6 {
            assert!(moyal_unit_defect(1.0, order) == 0.0);
        }
    }

    #[test]
    fn gaussian_defect_does_not_grow_with_order() {
        let d: Vec<f64> = (0..=6).map(|k| moyal_star_gaussian_check(1.0, k)).collect();
        for w in d.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "{d:?}");
        }
    }
}
