//! Globally adaptive 7/15-point Gauss-Kronrod quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::QuadratureResult;
use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_panels: 200_000,
        }
    }

    pub fn relative(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.norm() * WGK[7];
    let mut fv = [(Complex64::default(), Complex64::default()); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += (f1 + f2) * WGK[j];
        abs_k += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }
    let value = kron * half;
    if !value.re.is_finite() || !value.im.is_finite() {
        return domain(format!("integrand is not finite on [{a}, {b}]"));
    }
    let resasc = asc * half.abs();
    let resabs = abs_k * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let at_floor = floor >= err;
    if at_floor {
        err = floor;
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
        at_floor,
    })
}

/// Pairwise sum of panel values in position order.
fn pairwise(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::default(),
        1 => values[0],
        n => pairwise(&values[..n / 2]) + pairwise(&values[n / 2..]),
    }
}

/// Globally adaptive integration over consecutive panels `breakpoints`.
pub fn integrate_adaptive<F>(f: &F, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if breakpoints.len() < 2 {
        return domain("at least two breakpoints are required");
    }
    let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut settled = Vec::new();
    let mut total_err = 0.0;
    let mut total = Complex64::default();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let p = kronrod(f, w[0], w[1])?;
            total_err += p.error;
            total += p.value;
            heap.push(p);
        }
    }
    let mut evaluations = 15 * heap.len();
    let limit = opts.max_panels.max(heap.len());
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.at_floor || (worst.b - worst.a) < 1e-14 * span.abs() || !(mid > worst.a && mid < worst.b) {
            settled.push(worst);
            continue;
        }
        if heap.len() + settled.len() + 1 >= limit {
            heap.push(worst);
            let mut all: Vec<Panel> = heap.into_vec();
            all.extend(settled);
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            let vals: Vec<Complex64> = all.iter().map(|p| p.value).collect();
            return Err(Error::NoConvergence {
                estimate: pairwise(&vals),
                error_estimate: total_err,
            });
        }
        let left = kronrod(f, worst.a, mid)?;
        let right = kronrod(f, mid, worst.b)?;
        evaluations += 30;
        total_err += left.error + right.error - worst.error;
        total += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
    }
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(settled);
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let vals: Vec<Complex64> = all.iter().map(|p| p.value).collect();
    let err: f64 = all.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value: pairwise(&vals),
        abs_error_estimate: err,
        evaluations,
        truncation_radius: None,
    })
}
