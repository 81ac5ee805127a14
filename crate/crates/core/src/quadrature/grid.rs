//! Uniform phase-space grids, complex fields sampled on them, and
//! trapezoidal integrals over those fields.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, nx: usize, p_min: f64, p_max: f64, np: usize) -> Result<Self> {
        if nx < 2 || np < 2 {
            return domain(format!("grid needs at least 2 points per axis, got {nx}x{np}"));
        }
        if !(x_max > x_min) || !(p_max > p_min) || !(x_min.is_finite() && x_max.is_finite() && p_min.is_finite() && p_max.is_finite()) {
            return domain(format!("invalid grid bounds [{x_min}, {x_max}] x [{p_min}, {p_max}]"));
        }
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        })
    }

    /// Square grid [-half, half]^2 with spacing h (rounded to fit).
    pub fn square(half: f64, h: f64) -> Result<Self> {
        let n = (2.0 * half / h).round() as usize + 1;
        Self::new(-half, half, n, -half, half, n)
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j == self.np - 1 {
            self.p_max
        } else {
            self.p_min + j as f64 * self.hp()
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trapezoid weight of node (i, j).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wp = if j == 0 || j == self.np - 1 { 0.5 } else { 1.0 };
        wx * wp * self.hx() * self.hp()
    }
}

/// Complex field on a grid, row-major with x outer and p inner.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("field has {} values for a grid of {}", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    /// Samples `f(x, p)` at every node in parallel.
    pub fn from_fn<F>(grid: Grid2D, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.x(k / grid.np), grid.p(k % grid.np)))
            .collect();
        Self { grid, values }
    }

    /// Fallible variant of [`Field2D::from_fn`]; the first error in node order wins.
    pub fn try_from_fn<F>(grid: Grid2D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<Complex64> + Sync,
    {
        let values: Vec<Result<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.x(k / grid.np), grid.p(k % grid.np)))
            .collect();
        let values = values.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.np + j
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.index(i, j)]
    }

    pub fn map<F: Fn(Complex64) -> Complex64 + Sync>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.zip(other, |a, b| a + b)
    }

    fn zip<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Field2D, f: F) -> Result<Field2D> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Trapezoidal integral over the whole grid.
    pub fn integral(&self) -> Complex64 {
        let g = &self.grid;
        let rows: Vec<Complex64> = (0..g.nx)
            .map(|i| {
                let mut s = Complex64::default();
                for j in 0..g.np {
                    s += self.get(i, j) * g.weight(i, j);
                }
                s
            })
            .collect();
        rows.iter().sum()
    }

    /// Trapezoidal L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.interior_l2_norm(0)
    }

    /// L2 norm over nodes at least `ring` cells away from the boundary.
    pub fn interior_l2_norm(&self, ring: usize) -> f64 {
        let g = &self.grid;
        if g.nx <= 2 * ring || g.np <= 2 * ring {
            return 0.0;
        }
        let mut s = 0.0;
        for i in ring..g.nx - ring {
            let mut row = 0.0;
            for j in ring..g.np - ring {
                let wx = if i == ring || i == g.nx - 1 - ring { 0.5 } else { 1.0 };
                let wp = if j == ring || j == g.np - 1 - ring { 0.5 } else { 1.0 };
                row += wx * wp * self.get(i, j).norm_sqr();
            }
            s += row;
        }
        (s * g.hx() * g.hp()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

fn same_grid(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

/// Trapezoidal approximation of the integral of f * conj(g).
pub fn inner_product_2d(f: &Field2D, g: &Field2D) -> Result<Complex64> {
    same_grid(&f.grid, &g.grid)?;
    let grid = f.grid;
    let rows: Vec<Complex64> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let mut s = Complex64::default();
            for j in 0..grid.np {
                s += f.get(i, j) * g.get(i, j).conj() * grid.weight(i, j);
            }
            s
        })
        .collect();
    Ok(rows.iter().sum())
}
