//! Phase-space geometry of the harmonic-oscillator Wigner eigenfunctions
//! (Lagrangian circles, dual circles, menisci, chord stationary points) and
//! their uniform Airy approximations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, domain, Error, Result};
use crate::quadrature::{oscillatory_integral, QuadratureResult};
use crate::schrodinger::{EigenState, WkbPieces};
use crate::specialfn::ai;
use crate::wigner::WignerEigenIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGeometry {
    pub e_n: f64,
    pub e_m: f64,
    /// (sqrt(2 E_n) + sqrt(2 E_m))/2.
    pub r_nm: f64,
    /// (sqrt(2 E_n) - sqrt(2 E_m))/2, nonnegative for E_n >= E_m.
    pub rho_nm: f64,
    /// (E_n + E_m)/2.
    pub e_mean: f64,
    /// (E_n - E_m)/2.
    pub e_diff: f64,
}

impl PhaseSpaceGeometry {
    pub fn new(e_n: f64, e_m: f64) -> Result<Self> {
        check_finite("E_n", e_n)?;
        check_finite("E_m", e_m)?;
        if e_n < 0.0 || e_m < 0.0 {
            return domain(format!("energies must be nonnegative, got ({e_n}, {e_m})"));
        }
        let (a, b) = ((2.0 * e_n).sqrt(), (2.0 * e_m).sqrt());
        Ok(Self {
            e_n,
            e_m,
            r_nm: 0.5 * (a + b),
            rho_nm: 0.5 * (a - b),
            e_mean: 0.5 * (e_n + e_m),
            e_diff: 0.5 * (e_n - e_m),
        })
    }

    pub fn from_index(idx: &WignerEigenIndex) -> Self {
        let (e_n, e_m) = idx.energies();
        Self::new(e_n, e_m).expect("eigen energies are positive")
    }

    pub fn is_diagonal(&self) -> bool {
        self.e_n == self.e_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Outside the outer Lagrangian circle x^2 + p^2 = R^2.
    Exterior,
    /// Within 1e-12 (relative) of the outer Lagrangian circle.
    OnCurve,
    MeniscusUpper,
    MeniscusLower,
    /// Inside the dual curve: real chord points belong to the cross branches 3, 4.
    InsideDual,
    /// Inside the inner circle x^2 + p^2 = rho^2 (off-diagonal only).
    InsideInner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub region: Region,
    /// sqrt(x^2 + p^2) - R.
    pub distance: f64,
}

/// Residual of the stationarity condition of branch 1 or 2 at a root sigma:
/// sqrt(2E_n - (x+s)^2) + sqrt(2E_m - (x-s)^2) - 2|p|.
fn direct_residual(g: &PhaseSpaceGeometry, x: f64, p: f64, s: f64) -> f64 {
    let a = (2.0 * g.e_n - (x + s).powi(2)).max(0.0).sqrt();
    let b = (2.0 * g.e_m - (x - s).powi(2)).max(0.0).sqrt();
    a + b - 2.0 * p.abs()
}

/// Region of (x, p). The diagonal case uses the explicit dual circles
/// (x -+ sqrt(E/2))^2 + p^2 = E/2; the off-diagonal case assigns the ring
/// points by which branch pair solves the stationarity condition.
pub fn classify_region(geom: &PhaseSpaceGeometry, x: f64, p: f64) -> Classification {
    let r2 = x * x + p * p;
    let big = geom.r_nm * geom.r_nm;
    let distance = r2.sqrt() - geom.r_nm;
    let region = if (r2 - big).abs() <= 1e-12 * big.max(1.0) {
        Region::OnCurve
    } else if r2 > big {
        Region::Exterior
    } else if geom.is_diagonal() {
        let c = (geom.e_n / 2.0).sqrt();
        let inside = |cx: f64| (x - cx).powi(2) + p * p <= geom.e_n / 2.0 * (1.0 + 1e-12);
        if inside(c) || inside(-c) {
            Region::InsideDual
        } else if p > 0.0 {
            Region::MeniscusUpper
        } else {
            Region::MeniscusLower
        }
    } else if r2 < geom.rho_nm * geom.rho_nm {
        Region::InsideInner
    } else {
        match chord_roots(geom, x, p) {
            Some(ChordRoots::Real(s1, s2)) => {
                let scale = geom.r_nm.max(1.0) * 1e-8;
                if p != 0.0
                    && direct_residual(geom, x, p, s1).abs() <= scale
                    && direct_residual(geom, x, p, s2).abs() <= scale
                {
                    if p > 0.0 {
                        Region::MeniscusUpper
                    } else {
                        Region::MeniscusLower
                    }
                } else {
                    Region::InsideDual
                }
            }
            _ => Region::InsideDual,
        }
    };
    Classification { region, distance }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChordRoots {
    Real(f64, f64),
    /// re +- i im.
    ComplexPair { re: f64, im: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordStationaryPoints {
    pub roots: ChordRoots,
    pub region: Region,
}

fn chord_roots(g: &PhaseSpaceGeometry, x: f64, p: f64) -> Option<ChordRoots> {
    let r2 = x * x + p * p;
    if r2 == 0.0 {
        return None;
    }
    let center = x * g.e_diff / r2;
    let radicand = r2 * (2.0 * g.e_mean - r2) - g.e_diff * g.e_diff;
    let half = p.abs() / r2 * radicand.abs().sqrt();
    Some(if radicand >= 0.0 {
        ChordRoots::Real(center + half, center - half)
    } else {
        ChordRoots::ComplexPair { re: center, im: half }
    })
}

/// Stationary points sigma_{1,2} = x e/(x^2+p^2) +- |p| sqrt((x^2+p^2)(2E - x^2 - p^2) - e^2)/(x^2+p^2);
/// for E_n = E_m this is +-(p/r) sqrt(2E - r^2).
pub fn chord_points(geom: &PhaseSpaceGeometry, x: f64, p: f64) -> Result<ChordStationaryPoints> {
    check_finite("x", x)?;
    check_finite("p", p)?;
    let roots = chord_roots(geom, x, p).ok_or_else(|| Error::Degenerate("chord points are undefined at the origin".into()))?;
    Ok(ChordStationaryPoints {
        roots,
        region: classify_region(geom, x, p).region,
    })
}

/// Double point x e/(x^2 + p^2) reached on the Lagrangian circles.
pub fn double_point(geom: &PhaseSpaceGeometry, x: f64, p: f64) -> Result<f64> {
    let r2 = x * x + p * p;
    if r2 == 0.0 {
        return Err(Error::Degenerate("double point is undefined at the origin".into()));
    }
    Ok(x * geom.e_diff / r2)
}

/// pi^{-1} eps^{-2/3} (2E)^{-1/3} Ai((x^2 + p^2 - 2E)/(eps^{2/3} (2E)^{1/3})).
pub fn airy_wigner_diag(state: &EigenState, x: f64, p: f64) -> f64 {
    airy_diag_value(state.energy, state.epsilon, x, p)
}

fn airy_diag_value(energy: f64, eps: f64, x: f64, p: f64) -> f64 {
    let two_e = 2.0 * energy;
    let scale = eps.powf(2.0 / 3.0) * two_e.cbrt();
    ai((x * x + p * p - two_e) / scale) / (PI * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryApprox {
    pub value: Complex64,
    /// False outside the standing assumptions |n - m| <= max(n, m)/4 and eps max(n, m) in [0.5, 2].
    pub regime_ok: bool,
    /// True outside the outer Lagrangian circle, where the formula is a formal continuation.
    pub formal_exterior: bool,
}

/// pi^{-1} e^{-i(n-m)phi} eps^{-2/3} R^{-4/3} (R^2 - rho^2)^{1/3}
/// Ai((x^2 + p^2 - R^2)/(eps^{2/3} R^{4/3} (R^2 - rho^2)^{-1/3})),
/// with phi the full-plane angle of (x, p). For n = m this is the diagonal formula.
pub fn airy_wigner_offdiag(idx: &WignerEigenIndex, x: f64, p: f64) -> AiryApprox {
    let g = PhaseSpaceGeometry::from_index(idx);
    let eps = idx.epsilon;
    let r2 = x * x + p * p;
    let big = g.r_nm * g.r_nm;
    let hi = f64::from(idx.n.max(idx.m));
    let k = f64::from(idx.n.abs_diff(idx.m));
    let regime_ok = k <= hi / 4.0 && (0.5..=2.0).contains(&(eps * hi));
    let formal_exterior = r2 > big;
    let value = if idx.n == idx.m {
        Complex64::new(airy_diag_value(g.e_n, eps, x, p), 0.0)
    } else {
        let gap = (big - g.rho_nm * g.rho_nm).cbrt();
        let scale = eps.powf(2.0 / 3.0) * g.r_nm.powf(4.0 / 3.0) / gap;
        let modulus = ai((r2 - big) / scale) / (PI * scale);
        let winding = f64::from(idx.n) - f64::from(idx.m);
        Complex64::from_polar(modulus, -winding * p.atan2(x))
    };
    AiryApprox {
        value,
        regime_ok,
        formal_exterior,
    }
}

/// Which of the four WKB Wigner integrals to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    One,
    Two,
    Three,
    Four,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::One, Branch::Two, Branch::Three, Branch::Four];

    pub fn from_index(l: u8) -> Result<Self> {
        match l {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            3 => Ok(Branch::Three),
            4 => Ok(Branch::Four),
            _ => domain(format!("branch must be in 1..=4, got {l}")),
        }
    }
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Sigma-window of the branch integrals: x +- sigma stays `margin` inside the
/// turning points and the window edges are closed by a smooth taper of width `taper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbWindow {
    pub margin: f64,
    pub taper: f64,
}

impl WkbWindow {
    /// No margin and a taper of width a/5 for turning points +-a, which
    /// suppresses the edge contributions of the singular WKB amplitude.
    pub fn default_for(turning_point: f64) -> Self {
        Self {
            margin: 0.0,
            taper: 0.2 * turning_point,
        }
    }
}

/// Branch integral (pi eps)^{-1} int D_l(sigma) e^{i F_l(sigma)/eps} dsigma with
/// D = A_n(x+s) A_m(x-s) times 1, 1, i, -i and
/// F_1 = S_n(x+s) - S_m(x-s) - 2ps, F_2 = -(S_n(x+s) - S_m(x-s) + 2ps),
/// F_3 = S_n(x+s) + S_m(x-s) - 2ps, F_4 = -(S_n(x+s) + S_m(x-s) + 2ps),
/// over the default sigma-window.
pub fn wkb_wigner_integral(idx: &WignerEigenIndex, branch: Branch, x: f64, p: f64, tol: f64) -> Result<QuadratureResult> {
    let (e_n, e_m) = idx.energies();
    let a = (2.0 * e_n.min(e_m)).sqrt();
    wkb_wigner_integral_windowed(idx, branch, x, p, tol, WkbWindow::default_for(a))
}

pub fn wkb_wigner_integral_windowed(
    idx: &WignerEigenIndex,
    branch: Branch,
    x: f64,
    p: f64,
    tol: f64,
    window: WkbWindow,
) -> Result<QuadratureResult> {
    check_finite("x", x)?;
    check_finite("p", p)?;
    let eps = idx.epsilon;
    let wn = WkbPieces::harmonic(&EigenState::harmonic(idx.n, eps)?);
    let wm = WkbPieces::harmonic(&EigenState::harmonic(idx.m, eps)?);
    let an = wn.turning_points.1 - window.margin;
    let am = wm.turning_points.1 - window.margin;
    let lo = (-an - x).max(x - am);
    let hi = (an - x).min(x + am);
    if !(hi > lo) {
        return domain(format!("({x}, {p}) leaves no admissible sigma-window"));
    }
    let taper = window.taper.min(0.25 * (hi - lo));
    let chi = move |s: f64| {
        if taper <= 0.0 {
            1.0
        } else {
            smooth_step((s - lo) / taper) * smooth_step((hi - s) / taper)
        }
    };
    let factor = match branch {
        Branch::One | Branch::Two => Complex64::new(1.0, 0.0),
        Branch::Three => Complex64::i(),
        Branch::Four => -Complex64::i(),
    } / (PI * eps);
    let amplitude = |s: f64| {
        let c = chi(s);
        if c == 0.0 {
            Complex64::default()
        } else {
            factor * (wn.amplitude(x + s) * wm.amplitude(x - s) * c)
        }
    };
    let phase = |s: f64| {
        let sn = wn.phase_plus(x + s);
        let sm = wm.phase_plus(x - s);
        match branch {
            Branch::One => sn - sm - 2.0 * p * s,
            Branch::Two => -(sn - sm + 2.0 * p * s),
            Branch::Three => sn + sm - 2.0 * p * s,
            Branch::Four => -(sn + sm + 2.0 * p * s),
        }
    };
    oscillatory_integral(amplitude, phase, 1.0 / eps, lo, hi, tol)
}

/// Sum of the four branch integrals.
pub fn wkb_wigner_total(idx: &WignerEigenIndex, x: f64, p: f64, tol: f64) -> Result<Complex64> {
    Branch::ALL.iter().try_fold(Complex64::default(), |acc, &b| {
        Ok(acc + wkb_wigner_integral(idx, b, x, p, tol)?.value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::AI0;
    use crate::wigner::exact_wigner_eigen;

    fn geom(n: u32, m: u32, eps: f64) -> PhaseSpaceGeometry {
        PhaseSpaceGeometry::from_index(&WignerEigenIndex::new(n, m, eps).unwrap())
    }

    #[test]
    fn geometry_identities() {
        for (n, m) in [(3, 1), (10, 7), (40, 37), (5, 5)] {
            let g = geom(n, m, 0.05);
            assert!((g.r_nm.powi(2) + g.rho_nm.powi(2) - (g.e_n + g.e_m)).abs() < 1e-12);
            assert!((g.r_nm * g.rho_nm - g.e_diff).abs() < 1e-12);
            assert!(g.r_nm >= g.rho_nm && g.rho_nm >= 0.0);
        }
        let d = PhaseSpaceGeometry::new(1.0, 1.0).unwrap();
        assert_eq!(d.rho_nm, 0.0);
        assert!((d.r_nm - 2f64.sqrt()).abs() < 1e-15);
        assert!(PhaseSpaceGeometry::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let d = PhaseSpaceGeometry::new(1.0, 1.0).unwrap();
        assert_eq!(classify_region(&d, 0.0, 0.0).region, Region::InsideDual);
        let on = classify_region(&d, 0.0, 2f64.sqrt());
        assert_eq!(on.region, Region::OnCurve);
        assert!(on.distance.abs() < 1e-15);
        assert_eq!(classify_region(&d, 0.0, 1.2).region, Region::MeniscusUpper);
        assert_eq!(classify_region(&d, 0.0, -1.2).region, Region::MeniscusLower);
        assert_eq!(classify_region(&d, 3.0, 0.0).region, Region::Exterior);
        let o = PhaseSpaceGeometry::new(2.0, 0.5).unwrap();
        assert!((o.r_nm - 1.5).abs() < 1e-15 && (o.rho_nm - 0.5).abs() < 1e-15);
        let c = classify_region(&o, 0.0, 1.0).region;
        assert!(matches!(c, Region::MeniscusUpper | Region::InsideDual));
        assert_eq!(classify_region(&o, 0.1, 0.1).region, Region::InsideInner);
    }

    #[test]
    fn diagonal_classification_matches_root_test() {
        let d = PhaseSpaceGeometry::new(1.0, 1.0).unwrap();
        for i in 1..40 {
            for j in 1..40 {
                let x = -1.4 + 2.8 * f64::from(i) / 40.0;
                let p = -1.4 + 2.8 * f64::from(j) / 40.0;
                let c = classify_region(&d, x, p).region;
                if let (Region::MeniscusUpper | Region::MeniscusLower, Ok(cp)) = (c, chord_points(&d, x, p)) {
                    let ChordRoots::Real(s1, s2) = cp.roots else { panic!("complex roots in meniscus") };
                    assert!(direct_residual(&d, x, p, s1).abs() < 1e-9);
                    assert!(direct_residual(&d, x, p, s2).abs() < 1e-9);
                }
                if c == Region::InsideDual && p.abs() > 1e-9 {
                    let ChordRoots::Real(s1, _) = chord_points(&d, x, p).unwrap().roots else { continue };
                    assert!(direct_residual(&d, x, p, s1).abs() > 1e-9);
                }
            }
        }
    }

    #[test]
    fn chord_examples() {
        let d = PhaseSpaceGeometry::new(2.0, 2.0).unwrap();
        let cp = chord_points(&d, 0.0, 1.0).unwrap();
        assert_eq!(cp.roots, ChordRoots::Real(3f64.sqrt(), -(3f64.sqrt())));
        let on = chord_points(&d, 1.2, (4.0f64 - 1.44).sqrt()).unwrap();
        let ChordRoots::Real(a, b) = on.roots else { panic!() };
        assert!(a.abs() < 1e-7 && b.abs() < 1e-7);
        assert!(matches!(chord_points(&d, 0.0, 0.0), Err(Error::Degenerate(_))));
        assert!(matches!(chord_points(&d, 3.0, 0.5).unwrap().roots, ChordRoots::ComplexPair { .. }));
    }

    #[test]
    fn chord_vieta_and_double_point() {
        let g = geom(12, 9, 0.1);
        for k in 0..10 {
            let t = 0.3 + 0.55 * f64::from(k);
            let (x, p) = (g.r_nm * t.cos(), g.r_nm * t.sin());
            let (a, b) = match chord_points(&g, x, p).unwrap().roots {
                ChordRoots::Real(a, b) => (a, b),
                ChordRoots::ComplexPair { re, im } => (re + im, re - im),
            };
            let s0 = double_point(&g, x, p).unwrap();
            assert!((a - s0).abs() < 1e-6 && (b - s0).abs() < 1e-6);
        }
        for (x, p) in [(0.4, 0.9), (-0.7, 0.8), (1.0, -0.3)] {
            let r2: f64 = x * x + p * p;
            let ChordRoots::Real(a, b) = chord_points(&g, x, p).unwrap().roots else { continue };
            assert!((a + b - 2.0 * x * g.e_diff / r2).abs() < 1e-12);
            let rad = r2 * (2.0 * g.e_mean - r2) - g.e_diff.powi(2);
            let prod = (x * x * g.e_diff.powi(2) - p * p * rad) / (r2 * r2);
            assert!((a * b - prod).abs() < 1e-12);
        }
    }

    #[test]
    fn chord_coalescence_rate() {
        let g = geom(12, 9, 0.1);
        let t: f64 = 0.9;
        let gap = |d: f64| {
            let r = g.r_nm - d;
            match chord_points(&g, r * t.cos(), r * t.sin()).unwrap().roots {
                ChordRoots::Real(a, b) => (a - b).abs(),
                ChordRoots::ComplexPair { im, .. } => 2.0 * im,
            }
        };
        let ratio = gap(1e-6) / gap(4e-6);
        assert!((ratio - 0.5).abs() < 1e-3);
    }

    #[test]
    fn diag_on_curve_and_radial() {
        let s = EigenState::harmonic(20, 1.0 / 20.5).unwrap();
        let r = (2.0 * s.energy).sqrt();
        let v = airy_wigner_diag(&s, r * 0.3f64.cos(), r * 0.3f64.sin());
        let expect = AI0 / (PI * s.epsilon.powf(2.0 / 3.0) * (2.0 * s.energy).cbrt());
        assert!((v - expect).abs() < 1e-12 * expect);
        assert!((airy_wigner_diag(&s, 0.3, 0.4) - airy_wigner_diag(&s, 0.5, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn offdiag_degenerates_to_diag_and_is_hermitian() {
        let eps = 0.05;
        let d = WignerEigenIndex::new(20, 20, eps).unwrap();
        let s = EigenState::harmonic(20, eps).unwrap();
        assert_eq!(airy_wigner_offdiag(&d, 0.3, 0.7).value.re, airy_wigner_diag(&s, 0.3, 0.7));
        let a = WignerEigenIndex::new(22, 20, eps).unwrap();
        let b = WignerEigenIndex::new(20, 22, eps).unwrap();
        for (x, p) in [(0.3, 0.7), (-1.1, 0.2), (0.0, -1.3)] {
            let va = airy_wigner_offdiag(&a, x, p).value;
            let vb = airy_wigner_offdiag(&b, x, p).value;
            assert!((va - vb.conj()).norm() < 1e-12 * va.norm().max(1.0));
            let (xr, pr) = (x * 0.6 - p * 0.8, x * 0.8 + p * 0.6);
            assert!((va.norm() - airy_wigner_offdiag(&a, xr, pr).value.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn offdiag_flags() {
        let ok = airy_wigner_offdiag(&WignerEigenIndex::new(22, 20, 0.05).unwrap(), 0.1, 0.1);
        assert!(ok.regime_ok && !ok.formal_exterior);
        let bad = airy_wigner_offdiag(&WignerEigenIndex::new(8, 2, 0.05).unwrap(), 3.0, 0.0);
        assert!(!bad.regime_ok && bad.formal_exterior);
    }

    #[test]
    fn offdiag_winding() {
        let idx = WignerEigenIndex::new(23, 20, 0.05).unwrap();
        let g = PhaseSpaceGeometry::from_index(&idx);
        let steps = 4000;
        let mut total = 0.0;
        let mut prev = airy_wigner_offdiag(&idx, g.r_nm, 0.0).value;
        for k in 1..=steps {
            let t = 2.0 * PI * f64::from(k) / f64::from(steps);
            let cur = airy_wigner_offdiag(&idx, g.r_nm * t.cos(), g.r_nm * t.sin()).value;
            total += (cur / prev).arg();
            prev = cur;
        }
        assert!((total + 2.0 * PI * 3.0).abs() < 1e-6);
        let exact = |t: f64| exact_wigner_eigen(&idx, g.r_nm * t.cos(), g.r_nm * t.sin()).unwrap();
        let mut te = 0.0;
        let mut pe = exact(0.0);
        for k in 1..=steps {
            let cur = exact(2.0 * PI * f64::from(k) / f64::from(steps));
            te += (cur / pe).arg();
            pe = cur;
        }
        assert!((te - total).abs() < 1e-6);
    }

    #[test]
    fn branch_symmetry() {
        let idx = WignerEigenIndex::new(20, 20, 1.0 / 20.5).unwrap();
        let f1 = wkb_wigner_integral(&idx, Branch::One, 0.3, -1.2, 1e-10).unwrap().value;
        let f2 = wkb_wigner_integral(&idx, Branch::Two, 0.3, 1.2, 1e-10).unwrap().value;
        assert!((f1 - f2.conj()).norm() < 1e-8);
        let f3 = wkb_wigner_integral(&idx, Branch::Three, 0.3, -0.2, 1e-10).unwrap().value;
        let f4 = wkb_wigner_integral(&idx, Branch::Four, 0.3, 0.2, 1e-10).unwrap().value;
        assert!((f3 - f4.conj()).norm() < 1e-8);
        assert!(Branch::from_index(5).is_err());
    }

    fn diag_case(n: u32) -> (WignerEigenIndex, EigenState) {
        let eps = 1.0 / (f64::from(n) + 0.5);
        (WignerEigenIndex::new(n, n, eps).unwrap(), EigenState::harmonic(n, eps).unwrap())
    }

    #[test]
    fn branch_one_matches_airy_on_upper_branch() {
        let (idx, s) = diag_case(20);
        let p = (2.0 * s.energy).sqrt();
        let b1 = wkb_wigner_integral(&idx, Branch::One, 0.0, p, 1e-9).unwrap().value;
        let a = airy_wigner_diag(&s, 0.0, p);
        assert!((b1.re / a - 1.0).abs() <= 0.1 && b1.im.abs() < 1e-8);
        let err = |n: u32| {
            let (idx, s) = diag_case(n);
            let x = 0.3;
            let p = (2.0 * s.energy - x * x).sqrt();
            (wkb_wigner_integral(&idx, Branch::One, x, p, 1e-9).unwrap().value.re / airy_wigner_diag(&s, x, p) - 1.0).abs()
        };
        assert!(err(160) < 0.02 && err(160) < err(20));
    }

    #[test]
    fn cross_branches_inside_dual_track_exact() {
        let (idx, _) = diag_case(80);
        let g = PhaseSpaceGeometry::from_index(&idx);
        for (x, p) in [(0.3, 0.0), (0.5, 0.1), (-0.6, 0.2)] {
            assert_eq!(classify_region(&g, x, p).region, Region::InsideDual);
            let b = wkb_wigner_integral(&idx, Branch::Three, x, p, 1e-9).unwrap().value
                + wkb_wigner_integral(&idx, Branch::Four, x, p, 1e-9).unwrap().value;
            let e = exact_wigner_eigen(&idx, x, p).unwrap();
            assert!((b - e).norm() <= 0.15 * e.norm());
        }
    }

    #[test]
    fn cross_branches_small_outside() {
        let (idx, s) = diag_case(40);
        let a = airy_wigner_diag(&s, 0.0, (2.0 * s.energy).sqrt());
        for &b in &[Branch::Three, Branch::Four] {
            let v = wkb_wigner_integral(&idx, b, 0.3, 2.0, 1e-10).unwrap().value;
            assert!(v.norm() < 1e-3 * a);
        }
    }
}
