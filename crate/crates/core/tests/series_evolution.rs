use std::f64::consts::PI;

use semiwigner::coefficients::initial_wigner_field;
use semiwigner::schrodinger::{Amplitude, InitialData, Phase};
use semiwigner::series::{series_error_report, SeriesSolution};
use semiwigner::Grid2D;

fn data(eps: f64) -> InitialData {
    InitialData::new(Amplitude::Gaussian, Phase::Quadratic { sign: 1.0 }, eps).unwrap()
}

#[test]
fn mass_is_conserved_in_time() {
    let d = data(0.5);
    let s = SeriesSolution::exact_from_data(&d).unwrap();
    let grid = Grid2D::square(5.0, 0.05).unwrap();
    let norm = d.norm_sqr().unwrap();
    assert!((norm - PI.sqrt()).abs() < 1e-10);
    for t in [0.0, 0.7, 2.5, 5.0] {
        let mass = s.field(grid, t).integral();
        assert!((mass.re - norm).abs() < 1e-5 * norm, "t = {t}: {mass}");
        assert!(mass.im.abs() < 1e-10);
    }
}

#[test]
fn reconstructs_initial_wigner_function() {
    let d = data(0.5);
    let s = SeriesSolution::exact_from_data(&d).unwrap();
    let grid = Grid2D::square(4.0, 0.1).unwrap();
    let series = s.field(grid, 0.0);
    let direct = initial_wigner_field(&d, grid, 1e-12).unwrap();
    let rel = series.sub(&direct).unwrap().l2_norm() / direct.l2_norm();
    assert!(rel < 1e-4, "relative L2 {rel}");
}

#[test]
fn evolution_is_periodic() {
    let s = SeriesSolution::exact_from_data(&data(0.5)).unwrap();
    let grid = Grid2D::square(3.0, 0.1).unwrap();
    let a = s.field(grid, 0.9);
    let b = s.field(grid, 0.9 + 2.0 * PI);
    assert!(a.sub(&b).unwrap().max_abs() < 1e-10 * a.max_abs());
    let same = series_error_report(&s, &s, grid, 1.3).unwrap();
    assert_eq!(same.l2, 0.0);
}
