//! Mass-shell densities: closed-form pairings, support, symmetries and the
//! `ō` inversion identities.

use minkprop::mass_shell::{check_opp_decomposition, pair, MomShellDist, ShellFamily, Space};
use minkprop::quadrature::integrate_1d;
use minkprop::{Mass, QuadConfig, Sign, TestFn, C64};
use std::f64::consts::PI;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn mass(m: f64) -> Mass {
    Mass::new(m).unwrap()
}

fn mom(family: ShellFamily, m: f64, u: &TestFn) -> C64 {
    pair(&MomShellDist::momentum(family, mass(m)), u, &cfg()).unwrap().value
}

/// `e^{−p²/2}` in four dimensions (Euclidean square).
fn gauss4() -> TestFn {
    TestFn::standard(4)
}

#[test]
fn leray_density_on_the_unit_gaussian() {
    // ∫d³p e^{−(E² + |p|²)/2} with E² = 1 + |p|²  =  e^{−1/2} π^{3/2}.
    let v = mom(ShellFamily::OmegaLeray(Sign::Plus), 1.0, &gauss4());
    assert!((v.re - 3.377_361_653_414_662_3).abs() < 1e-9 && v.im.abs() < 1e-12, "{v}");
    let w = mom(ShellFamily::OmegaLeray(Sign::Minus), 1.0, &gauss4());
    assert!((w - v).norm() < 1e-12, "the Gaussian is even in p₀");
}

#[test]
fn omega_matches_a_radial_oracle() {
    for m in [0.0, 0.5, 1.0] {
        let e = |r: f64| (r * r + m * m).sqrt();
        let oracle =
            integrate_1d(|r| C64::new(4.0 * PI * r * r / (2.0 * e(r)) * (-(e(r).powi(2) + r * r) / 2.0).exp(), 0.0), 0.0, 30.0, &cfg()).value;
        let om = mom(ShellFamily::Omega(Sign::Plus), m, &gauss4());
        assert!((om - oracle).norm() < 1e-9, "m = {m}: {om} vs {oracle}");
        let eps = mom(ShellFamily::Eps(Sign::Plus), m, &gauss4());
        assert!((eps * (2.0 * PI) - om).norm() < 1e-10);
        let om_minus = mom(ShellFamily::Omega(Sign::Minus), m, &gauss4());
        assert!((om_minus + om).norm() < 1e-10, "ω⁻ carries the opposite sign");
    }
}

#[test]
fn densities_live_on_their_shell() {
    // A narrow packet at p = 0 barely reaches the m = 1 shell.
    let u = TestFn::gaussian(vec![0.0; 4], vec![0.1; 4], vec![0.0; 4]).unwrap();
    for fam in [ShellFamily::OmegaLeray(Sign::Plus), ShellFamily::Eps(Sign::Minus)] {
        assert!(mom(fam, 1.0, &u).norm() < 1e-18);
    }
    // The same packet moved onto the future shell is seen by ε⁺ only.
    let on = u.translate(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(mom(ShellFamily::Eps(Sign::Plus), 1.0, &on).norm() > 1e-4);
    assert!(mom(ShellFamily::Eps(Sign::Minus), 1.0, &on).norm() < 1e-18);
}

#[test]
fn time_reflection_exchanges_the_shells() {
    let flip = [true, false, false, false];
    for u in TestFn::random_family(5, 4, 3) {
        let r = u.reflect_axes(&flip).unwrap();
        for m in [0.0, 1.0] {
            let a = mom(ShellFamily::Omega(Sign::Minus), m, &u);
            let b = mom(ShellFamily::Omega(Sign::Plus), m, &r);
            assert!((a + b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }
}

#[test]
fn e_is_even() {
    for u in TestFn::random_family(9, 4, 3) {
        for m in [0.0, 1.0] {
            let a = mom(ShellFamily::EFull, m, &u);
            let b = mom(ShellFamily::EFull, m, &u.reflect());
            assert!((a - b).norm() < 1e-7 * (1.0 + a.norm()), "m = {m}: {a} vs {b}");
        }
    }
}

#[test]
fn massless_position_shell_on_a_gaussian() {
    // ε⁺ = δ(t − r)/(4πr): ∫d³x e^{−r²}/(4πr) = 1/2.
    let d = MomShellDist::position(ShellFamily::Eps(Sign::Plus));
    let v = pair(&d, &gauss4(), &cfg()).unwrap().value;
    assert!((v - C64::new(0.5, 0.0)).norm() < 1e-10, "{v}");
}

#[test]
fn names_round_trip() {
    for name in ["omega+", "leray-", "eps+", "epv-", "e", "opp+-", "eps-@pos"] {
        let m = if name.ends_with("@pos") { Mass::zero() } else { mass(1.0) };
        let d = MomShellDist::parse(name, m).unwrap();
        assert_eq!(d.to_string(), name);
    }
    assert_eq!(MomShellDist::parse("e@pos", Mass::zero()).unwrap().space, Space::Position);
    assert!(MomShellDist::parse("eps+@pos", mass(1.0)).is_err());
    assert!(MomShellDist::parse("opp+", mass(1.0)).is_err());
    assert!(MomShellDist::parse("foo+", mass(1.0)).is_err());
}

#[test]
fn wrong_dimension_is_rejected() {
    let d = MomShellDist::momentum(ShellFamily::Eps(Sign::Plus), mass(1.0));
    assert!(pair(&d, &TestFn::standard(3), &cfg()).is_err());
}

#[test]
fn pole_densities_decompose() {
    for m in [0.0, 1.0] {
        for line in check_opp_decomposition(mass(m), 3, 2, &cfg()).unwrap() {
            assert!(line.pass, "{line:?}");
        }
    }
}
