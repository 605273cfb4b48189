//! Distributional Fourier transforms by adjointness and the mass-shell
//! transform identities.

use minkprop::fourier::{
    digamma_pairing, pair_transformed, verify_corollary, verify_ehat_identities, verify_f_perp_lemma, verify_massless_table_on, Base, Partial,
    TransformedDist,
};
use minkprop::mass_shell::{pair, MomShellDist, ShellFamily};
use minkprop::{FourVector, Mass, QuadConfig, Sign, TestFn, C64};
use std::f64::consts::PI;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn mass(m: f64) -> Mass {
    Mass::new(m).unwrap()
}

fn assert_lines(lines: &[minkprop::report::CheckLine]) {
    assert!(!lines.is_empty());
    for l in lines {
        assert!(l.pass, "{l:?}");
    }
}

#[test]
fn transform_of_the_point_mass() {
    // ⟨F⁺δ₀, u⟩ = F⁺u(0) = (2π)^{−2} ∫u; the standard Gaussian integrates to (2π)².
    let t = TransformedDist::full(Base::Delta(FourVector([0.0; 4])), Sign::Plus);
    let v = pair_transformed(&t, &TestFn::standard(4), &cfg()).unwrap().value;
    assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
    // At b ≠ 0 the transform is the plane wave (2π)^{−2} e^{−i⟨b,x⟩}.
    let b = FourVector([0.5, -0.2, 0.1, 0.3]);
    let t = TransformedDist::full(Base::Delta(b), Sign::Plus);
    let v = pair_transformed(&t, &TestFn::standard(4), &cfg()).unwrap().value;
    let expected = (-b.pairing(&b) / 2.0).exp();
    assert!((v - C64::new(expected, 0.0)).norm() < 1e-15);
}

#[test]
fn transforming_back_recovers_the_density() {
    // ⟨θ, F⁺F⁻u⟩ = ⟨θ, u⟩ for a shell density.
    let d = MomShellDist::momentum(ShellFamily::Eps(Sign::Plus), mass(1.0));
    for u in TestFn::random_family(12, 4, 2) {
        let round = u.fourier_analytic(Sign::Minus).fourier_analytic(Sign::Plus);
        let a = pair(&d, &u, &cfg()).unwrap().value;
        let b = pair(&d, &round, &cfg()).unwrap().value;
        assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
    }
}

#[test]
fn partial_transforms_compose_to_the_full_transform() {
    let t = [true, false, false, false];
    let s = [false, true, true, true];
    let d = MomShellDist::momentum(ShellFamily::Eps(Sign::Minus), mass(0.5));
    for u in TestFn::random_family(14, 4, 3) {
        for sign in [Sign::Plus, Sign::Minus] {
            let ts = u.fourier_axes(sign, &t).unwrap().fourier_axes(sign, &s).unwrap();
            let st = u.fourier_axes(sign, &s).unwrap().fourier_axes(sign, &t).unwrap();
            let full = u.fourier_analytic(sign);
            for x in [[0.1, 0.2, -0.3, 0.4], [1.0, -0.5, 0.0, 0.7]] {
                let f = full.eval(&x).unwrap();
                assert!((ts.eval(&x).unwrap() - f).norm() < 1e-13);
                assert!((st.eval(&x).unwrap() - f).norm() < 1e-13);
            }
            // The same statement at pairing level.
            let whole = pair_transformed(&TransformedDist::full(Base::Shell(d), sign), &u, &cfg()).unwrap().value;
            let composed = pair(&d, &ts, &cfg()).unwrap().value;
            assert!((whole - composed).norm() < 1e-10);
        }
    }
}

#[test]
fn partial_transform_pairing_uses_the_right_axes() {
    let d = MomShellDist::momentum(ShellFamily::Eps(Sign::Plus), mass(1.0));
    let u = &TestFn::random_family(15, 4, 1)[0];
    let td = TransformedDist { base: Base::Shell(d), sign: Sign::Plus, partial: Partial::Spatial };
    let direct = pair_transformed(&td, u, &cfg()).unwrap().value;
    let manual = pair(&d, &u.fourier_axes(Sign::Plus, &[false, true, true, true]).unwrap(), &cfg()).unwrap().value;
    assert_eq!(direct, manual);
    let one_d = TransformedDist { base: Base::OneD(minkprop::densities_1d::Dist1d::SignFn), sign: Sign::Plus, partial: Partial::Temporal };
    assert!(pair_transformed(&one_d, &TestFn::standard(1), &cfg()).is_err());
}

#[test]
fn corollary_and_spatial_lemma() {
    for m in [0.0, 1.0] {
        assert_lines(&verify_corollary(mass(m), 3, 2, &cfg()).unwrap());
        assert_lines(&verify_f_perp_lemma(mass(m), 3, 2, &cfg()).unwrap());
    }
}

#[test]
fn e_hat_identities() {
    for m in [0.0, 0.5] {
        assert_lines(&verify_ehat_identities(mass(m), 4, 2, &cfg()).unwrap());
    }
}

#[test]
fn massless_table() {
    assert_lines(&verify_massless_table_on(&TestFn::random_family(5, 4, 2), &cfg()).unwrap());
}

#[test]
fn digamma_on_the_unit_gaussian_at_mass_one() {
    // ⟨F⁺ε⁺₁, g⟩ = ⟨ε⁺₁, g⟩ for the self-dual Gaussian, so the digamma route
    // must reproduce the shell pairing 0.1830055121939088.
    let g = TestFn::standard(4);
    let dg = digamma_pairing(mass(1.0), Sign::Plus, std::slice::from_ref(&g), &cfg()).unwrap()[0].value;
    let via = dg / (4.0 * PI * PI);
    assert!((via - C64::new(0.183_005_512_193_908_76, 0.0)).norm() < 1e-9, "{via}");
}
