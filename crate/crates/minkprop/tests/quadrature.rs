//! Adaptive quadrature engines against closed-form integrals.

use minkprop::quadrature::{integrate_1d, integrate_pv, integrate_radial3, integrate_semi_infinite, integrate_sphere};
use minkprop::{QuadConfig, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

#[test]
fn closed_interval_examples() {
    let r = integrate_1d(|x| c(x * x), 0.0, 3.0, &cfg());
    assert!((r.value.re - 9.0).abs() < 1e-13 && r.converged);
    let r = integrate_1d(|x| c(x.sin()), PI, 0.0, &cfg());
    assert!((r.value.re + 2.0).abs() < 1e-12, "reversed limits flip the sign");
    let r = integrate_1d(|x| C64::from_polar(1.0, x), 0.0, 2.0 * PI, &cfg());
    assert!(r.value.norm() < 1e-12);
}

#[test]
fn narrow_feature_on_a_wide_interval_is_found() {
    // Vanishes at the midpoint, so a single-panel first pass would see nothing.
    let r = integrate_1d(|x| c(x * x * (-x * x / 2.0).exp()), -50.0, 50.0, &cfg());
    assert!((r.value.re - (2.0 * PI).sqrt()).abs() < 1e-10, "{:?}", r);
}

#[test]
fn error_estimates_are_honest() {
    let r = integrate_1d(|x| c((3.0 * x).cos() * (-x * x).exp()), -10.0, 10.0, &cfg());
    let exact = PI.sqrt() * (-9.0f64 / 4.0).exp();
    assert!((r.value.re - exact).abs() <= r.abs_err.max(1e-14) * 10.0);
    assert!(r.evaluations > 0);
}

#[test]
fn semi_infinite_gaussian() {
    let r = integrate_semi_infinite(|x| c((-x * x / 2.0).exp()), 0.0, 0.0, 1.0, &cfg());
    assert!((r.value.re - 1.253_314_137_315_500_3).abs() < 1e-11);
    // Shifted and oscillating: ∫₀^∞ e^{−(x−3)²/2} cos(x) dx against a long finite integral.
    let f = |x: f64| c((-(x - 3.0) * (x - 3.0) / 2.0).exp() * x.cos());
    let a = integrate_semi_infinite(f, 0.0, 3.0, 1.0, &cfg());
    let b = integrate_1d(f, 0.0, 60.0, &cfg());
    assert!((a.value - b.value).norm() < 1e-11);
}

#[test]
fn radial_gaussian_volume() {
    let r = integrate_radial3(|rho, _| c((-rho * rho).exp()), 0.0, 12.0, &[0.0, 0.0, 1.0], &cfg());
    assert!((r.value.re - PI.powf(1.5)).abs() < 1e-10, "{:?}", r);
}

#[test]
fn sphere_examples() {
    let area = integrate_sphere(|_| c(1.0), &[0.0, 0.0, 1.0], &cfg());
    assert!((area.value.re - 4.0 * PI).abs() < 1e-12);
    // ∫ n_z² dΩ = 4π/3 regardless of the polar axis.
    for axis in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8]] {
        let r = integrate_sphere(|n| c(n[2] * n[2]), &axis, &cfg());
        assert!((r.value.re - 4.0 * PI / 3.0).abs() < 1e-11);
    }
}

#[test]
fn plane_wave_angular_average() {
    // ∫ e^{i r n·k̂} dΩ = 4π sin(r)/r.
    let k = [0.0, 0.6, 0.8];
    for r in [0.3, 2.0, 7.5] {
        let got = integrate_sphere(|n| C64::from_polar(1.0, r * (n[0] * k[0] + n[1] * k[1] + n[2] * k[2])), &k, &cfg());
        assert!((got.value - c(4.0 * PI * r.sin() / r)).norm() < 1e-10);
        let tilted = integrate_sphere(|n| C64::from_polar(1.0, r * (n[0] * k[0] + n[1] * k[1] + n[2] * k[2])), &[0.0, 0.0, 1.0], &cfg());
        assert!((tilted.value - got.value).norm() < 1e-9);
    }
}

#[test]
fn principal_value_examples() {
    let r = integrate_pv(|_| c(1.0), 1.0, 0.0, 2.0, &cfg()).unwrap();
    assert!(r.value.norm() < 1e-10);
    let r = integrate_pv(|_| c(1.0), 1.0, 0.0, 3.0, &cfg()).unwrap();
    assert!((r.value.re - 2f64.ln()).abs() < 1e-9);
    // pv∫₋₁¹ eˣ/x dx = 2·Shi(1).
    let r = integrate_pv(|x| c(x.exp()), 0.0, -1.0, 1.0, &cfg()).unwrap();
    assert!((r.value.re - 2.114_501_750_751_457).abs() < 1e-9, "{:?}", r);
    // Pole outside the interval: an ordinary integral.
    let r = integrate_pv(|_| c(1.0), -1.0, 0.0, 1.0, &cfg()).unwrap();
    assert!((r.value.re - 2f64.ln()).abs() < 1e-12);
    assert!(integrate_pv(|_| c(1.0), 0.5, 1.0, 1.0, &cfg()).is_err());
}

#[test]
fn config_validation() {
    assert!(cfg().validate().is_ok());
    assert!(QuadConfig { abs_tol: 0.0, ..cfg() }.validate().is_err());
    assert!(QuadConfig { pv_ratio: 1.0, ..cfg() }.validate().is_err());
    assert!(QuadConfig { pv_count: 3, ..cfg() }.validate().is_err());
    let ladder = cfg().ladder();
    assert_eq!(ladder.len(), cfg().pv_count);
    assert!(ladder.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integration_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, shift in -3.0f64..3.0) {
        let f = |x: f64| c((-(x - shift).powi(2)).exp());
        let g = |x: f64| C64::from_polar(1.0, x) * (-x * x / 2.0).exp();
        let lhs = integrate_1d(|x| f(x) * a + g(x) * b, -20.0, 20.0, &cfg()).value;
        let rhs = integrate_1d(f, -20.0, 20.0, &cfg()).value * a + integrate_1d(g, -20.0, 20.0, &cfg()).value * b;
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn pv_of_an_odd_symmetric_numerator_vanishes(pole in -1.0f64..1.0, half in 0.5f64..3.0) {
        let r = integrate_pv(|_| c(1.0), pole, pole - half, pole + half, &cfg()).unwrap();
        prop_assert!(r.value.norm() < 1e-9);
    }
}
