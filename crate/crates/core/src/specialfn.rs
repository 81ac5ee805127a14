//! Special functions: Airy Ai and Ai', Hermite and associated Laguerre
//! polynomials, log-gamma, and overflow-safe normalized variants of the
//! polynomials used by the oscillator eigenfunctions.
//!
//! Airy evaluation uses three regimes: the Maclaurin series for |x| <= 2, a
//! table of Taylor expansions of the Airy equation on nodes 0.25 apart for
//! 2 < |x| < 8, and the classical asymptotic expansions for |x| >= 8.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{check_finite, domain, Result};

/// Ai(0).
pub const AI0: f64 = 0.355_028_053_887_817_239;
/// -Ai'(0).
pub const AIP0_NEG: f64 = 0.258_819_403_792_806_798;

const SERIES_EDGE: f64 = 2.0;
const ASYMPTOTIC_EDGE: f64 = 8.0;
const NODE_STEP: f64 = 0.25;
const NODE_COUNT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
}

/// Ai(x) and Ai'(x) together.
pub fn airy(x: f64) -> Result<AiryValue> {
    check_finite("airy argument", x)?;
    Ok(airy_unchecked(x))
}

pub fn airy_ai(x: f64) -> Result<f64> {
    airy(x).map(|v| v.ai)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy(x).map(|v| v.ai_prime)
}

/// Ai(x) for arguments already known to be finite. NaN propagates.
pub(crate) fn ai(x: f64) -> f64 {
    airy_unchecked(x).ai
}

pub(crate) fn airy_unchecked(x: f64) -> AiryValue {
    if x.is_nan() {
        return AiryValue {
            ai: f64::NAN,
            ai_prime: f64::NAN,
        };
    }
    let ax = x.abs();
    if ax <= SERIES_EDGE {
        maclaurin(x)
    } else if ax < ASYMPTOTIC_EDGE {
        let t = tables();
        let nodes = if x > 0.0 { &t.positive } else { &t.negative };
        let j = ((ax - SERIES_EDGE) / NODE_STEP).round() as usize;
        let j = j.min(NODE_COUNT - 1);
        let c = x.signum() * (SERIES_EDGE + j as f64 * NODE_STEP);
        taylor_step(c, nodes[j], x - c)
    } else if x > 0.0 {
        asymptotic_positive(x)
    } else {
        asymptotic_negative(ax)
    }
}

fn maclaurin(x: f64) -> AiryValue {
    let x3 = x * x * x;
    let (mut f, mut g, mut fp, mut gp) = (1.0, x, 0.0, 1.0);
    let (mut t, mut s) = (1.0, x);
    let (mut u, mut w) = (x * x / 2.0, 1.0);
    fp += u;
    for k in 1..60 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf - 1.0) * 3.0 * kf);
        s *= x3 / (3.0 * kf * (3.0 * kf + 1.0));
        w *= x3 / ((3.0 * kf - 2.0) * 3.0 * kf);
        f += t;
        g += s;
        gp += w;
        if k >= 2 {
            u *= x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp += u;
        }
        if t.abs() + s.abs() + u.abs() + w.abs() < 1e-18 {
            break;
        }
    }
    AiryValue {
        ai: AI0 * f - AIP0_NEG * g,
        ai_prime: AI0 * fp - AIP0_NEG * gp,
    }
}

/// Taylor expansion of a solution of y'' = x y about `c`, evaluated at c + t.
fn taylor_step(c: f64, at_c: AiryValue, t: f64) -> AiryValue {
    let mut a = [0.0f64; 80];
    a[0] = at_c.ai;
    a[1] = at_c.ai_prime;
    a[2] = c * a[0] / 2.0;
    for k in 1..a.len() - 2 {
        a[k + 2] = (c * a[k] + a[k - 1]) / (((k + 1) * (k + 2)) as f64);
    }
    let (mut y, mut yp) = (0.0, 0.0);
    let mut tk = 1.0;
    let scale = a[0].abs() + a[1].abs();
    for k in 0..a.len() - 1 {
        y += a[k] * tk;
        yp += (k + 1) as f64 * a[k + 1] * tk;
        tk *= t;
        if k > 8 && (a[k].abs() + a[k + 1].abs()) * tk.abs() < 1e-18 * scale {
            break;
        }
    }
    AiryValue { ai: y, ai_prime: yp }
}

struct Tables {
    positive: [AiryValue; NODE_COUNT],
    negative: [AiryValue; NODE_COUNT],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut positive = [AiryValue { ai: 0.0, ai_prime: 0.0 }; NODE_COUNT];
        let mut negative = positive;
        // Ai is recessive for x > 0, so the positive side is built backward
        // from the asymptotic value and the negative side forward from the series.
        positive[NODE_COUNT - 1] = asymptotic_positive(ASYMPTOTIC_EDGE);
        for j in (0..NODE_COUNT - 1).rev() {
            let c = SERIES_EDGE + (j + 1) as f64 * NODE_STEP;
            positive[j] = taylor_step(c, positive[j + 1], -NODE_STEP);
        }
        negative[0] = maclaurin(-SERIES_EDGE);
        for j in 1..NODE_COUNT {
            let c = -(SERIES_EDGE + (j - 1) as f64 * NODE_STEP);
            negative[j] = taylor_step(c, negative[j - 1], -NODE_STEP);
        }
        Tables { positive, negative }
    })
}

fn asymptotic_coefficients() -> &'static ([f64; 40], [f64; 40]) {
    static COEFFS: OnceLock<([f64; 40], [f64; 40])> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = [0.0; 40];
        let mut v = [0.0; 40];
        u[0] = 1.0;
        v[0] = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        (u, v)
    })
}

/// Sums sum_k sign(k) c_k zeta^{-k} over the indices `start, start+step, ...`,
/// stopping at the smallest term.
fn asymptotic_sum(c: &[f64; 40], zeta: f64, start: usize, step: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut k = start;
    let mut sign = 1.0;
    while k < c.len() {
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += sign * term;
        last = term.abs();
        if last < 1e-17 * sum.abs() {
            break;
        }
        if alternate {
            sign = -sign;
        }
        k += step;
    }
    sum
}

fn asymptotic_positive(x: f64) -> AiryValue {
    let (u, v) = asymptotic_coefficients();
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let e = (-zeta).exp();
    let q = x.powf(0.25);
    let pre = e / (2.0 * PI.sqrt());
    AiryValue {
        ai: pre / q * asymptotic_sum(u, zeta, 0, 1, true),
        ai_prime: -pre * q * asymptotic_sum(v, zeta, 0, 1, true),
    }
}

fn asymptotic_negative(z: f64) -> AiryValue {
    let (u, v) = asymptotic_coefficients();
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let q = z.powf(0.25);
    let arg = zeta + PI / 4.0;
    let (s, c) = arg.sin_cos();
    let pu = asymptotic_sum(u, zeta, 0, 2, true);
    let qu = asymptotic_sum(u, zeta, 1, 2, true);
    let pv = asymptotic_sum(v, zeta, 0, 2, true);
    let qv = asymptotic_sum(v, zeta, 1, 2, true);
    let rp = PI.sqrt();
    AiryValue {
        ai: (s * pu - c * qu) / (rp * q),
        ai_prime: -q / rp * (c * pv + s * qv),
    }
}

/// (sign, ln|Ai(x)|), finite for arguments where Ai itself underflows.
pub fn ln_airy_ai(x: f64) -> Result<(f64, f64)> {
    check_finite("x", x)?;
    if x >= ASYMPTOTIC_EDGE {
        let (u, _) = asymptotic_coefficients();
        let zeta = 2.0 / 3.0 * x * x.sqrt();
        let series = asymptotic_sum(u, zeta, 0, 1, true);
        return Ok((1.0, -zeta - (2.0 * PI.sqrt()).ln() - 0.25 * x.ln() + series.ln()));
    }
    let a = ai(x);
    Ok((a.signum(), a.abs().ln()))
}

/// ln Gamma(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_finite("ln_gamma argument", x)?;
    if x <= 0.0 {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    if x.fract() == 0.0 && x <= 171.0 {
        let mut s = 0.0;
        let mut k = 2.0;
        while k < x {
            s += f64::ln(k);
            k += 1.0;
        }
        return s;
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// ln n!.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma_pos(f64::from(n) + 1.0)
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
pub fn hermite(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return domain(format!("hermite degree must be >= 0, got {n}"));
    }
    check_finite("hermite argument", x)?;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence.
pub fn laguerre(n: i64, k: i64, x: f64) -> Result<f64> {
    if n < 0 || k < 0 {
        return domain(format!("laguerre indices must be >= 0, got n={n}, k={k}"));
    }
    check_finite("laguerre argument", x)?;
    let kf = k as f64;
    let (mut l0, mut l1) = (1.0, 1.0 + kf - x);
    if n == 0 {
        return Ok(l0);
    }
    for j in 1..n {
        let jf = j as f64;
        let l2 = ((2.0 * jf + kf + 1.0 - x) * l1 - (jf + kf) * l0) / (jf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    Ok(l1)
}

/// A value represented as `mantissa * exp(log_scale)` so recurrences can run
/// far beyond the floating-point range.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl Scaled {
    const LIMIT: f64 = 1e150;

    fn renormalize(&mut self) {
        let m = self.cur.abs().max(self.prev.abs());
        if m > Self::LIMIT || (m < 1.0 / Self::LIMIT && m > 0.0) {
            let e = m.ln();
            let f = (-e).exp();
            self.prev *= f;
            self.cur *= f;
            self.log_scale += e;
        }
    }

    fn value(&self) -> f64 {
        if self.cur == 0.0 {
            0.0
        } else {
            self.cur.signum() * (self.cur.abs().ln() + self.log_scale).exp()
        }
    }
}

/// Normalized Hermite function psi_n(xi) = H_n(xi) e^{-xi^2/2} / sqrt(2^n n! sqrt(pi)),
/// computed by the orthonormal recurrence without overflow or premature underflow.
pub fn hermite_function(n: u32, xi: f64) -> f64 {
    let log0 = -0.25 * PI.ln() - 0.5 * xi * xi;
    let mut s = Scaled {
        prev: 0.0,
        cur: 1.0,
        log_scale: log0,
    };
    for j in 1..=n {
        let jf = f64::from(j);
        let next = (2.0 / jf).sqrt() * xi * s.cur - ((jf - 1.0) / jf).sqrt() * s.prev;
        s.prev = s.cur;
        s.cur = next;
        s.renormalize();
    }
    s.value()
}

/// Laguerre function sqrt(m!/(m+k)!) X^{k/2} e^{-X/2} L_m^{(k)}(X) for X >= 0,
/// computed by the normalized recurrence with log-scale tracking.
pub fn laguerre_function(m: u32, k: u32, big_x: f64) -> f64 {
    if big_x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = f64::from(k);
    let log0 = 0.5 * kf * big_x.ln() - 0.5 * big_x - 0.5 * ln_factorial(k);
    let mut s = Scaled {
        prev: 0.0,
        cur: 1.0,
        log_scale: log0,
    };
    for j in 0..m {
        let jf = f64::from(j);
        let next = ((2.0 * jf + kf + 1.0 - big_x) * s.cur - (jf * (jf + kf)).sqrt() * s.prev)
            / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
        s.prev = s.cur;
        s.cur = next;
        s.renormalize();
    }
    s.value()
}
