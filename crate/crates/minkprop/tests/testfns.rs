//! The Gaussian–Hermite test family: evaluation, derivatives, the
//! d'Alembertian, affine maps and analytic Fourier transforms.

use minkprop::quadrature::integrate_1d;
use minkprop::testfns::Term;
use minkprop::{Mass, QuadConfig, Sign, TestFn, C64};
use proptest::prelude::*;
use rand::SeedableRng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit(dim: usize) -> TestFn {
    TestFn::standard(dim)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn eval_examples() {
    assert_eq!(unit(4).eval(&[0.0; 4]).unwrap(), c(1.0, 0.0));
    let v = unit(4).eval(&[2f64.sqrt(), 0.0, 0.0, 0.0]).unwrap();
    assert!((v - c((-1f64).exp(), 0.0)).norm() < 1e-15);
    let odd = unit(4).with_terms(vec![Term { coeff: c(1.0, 0.0), alpha: vec![0, 1, 0, 0] }]).unwrap();
    assert_eq!(odd.eval(&[0.0; 4]).unwrap().norm(), 0.0);
    assert!(unit(4).eval(&[0.0; 3]).is_err());
}

#[test]
fn decays_far_from_center() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let f = TestFn::random(&mut rng, 4);
        let smax = f.widths().iter().cloned().fold(0.0, f64::max);
        let mut x = f.center().to_vec();
        x[1] += 10.0 * smax;
        x[0] += 10.0 * smax;
        let at_c = f.eval(f.center()).unwrap().norm();
        assert!(f.eval(&x).unwrap().norm() < 1e-18 * (at_c + 1.0));
    }
}

#[test]
fn invalid_widths_are_rejected() {
    assert!(TestFn::gaussian(vec![0.0], vec![0.0], vec![0.0]).is_err());
    assert!(TestFn::gaussian(vec![0.0], vec![-1.0], vec![0.0]).is_err());
    assert!(TestFn::gaussian(vec![0.0, 0.0], vec![1.0], vec![0.0]).is_err());
}

#[test]
fn derivative_examples() {
    let d0 = unit(4).derivative(0).unwrap();
    assert_eq!(d0.eval(&[0.0; 4]).unwrap().norm(), 0.0);
    let k = 1.7;
    let f = TestFn::gaussian(vec![0.3, 0.1, -0.2, 0.5], vec![1.0, 0.8, 1.2, 1.5], vec![k, 0.0, 0.0, 0.0]).unwrap();
    let at = f.center().to_vec();
    let got = f.derivative(0).unwrap().eval(&at).unwrap();
    assert!(rel(got, c(0.0, k) * f.eval(&at).unwrap()) < 1e-14);
}

#[test]
fn derivative_matches_finite_differences_with_second_order() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let f = TestFn::random(&mut rng, 4);
        let x: Vec<f64> = f.center().iter().map(|c| c + 0.37).collect();
        for axis in 0..4 {
            let exact = f.derivative(axis).unwrap().eval(&x).unwrap();
            let fd = |h: f64| {
                let (mut a, mut b) = (x.clone(), x.clone());
                a[axis] += h;
                b[axis] -= h;
                (f.eval(&a).unwrap() - f.eval(&b).unwrap()) / (2.0 * h)
            };
            let (e1, e2) = ((fd(1e-2) - exact).norm(), (fd(5e-3) - exact).norm());
            if e1 > 1e-9 {
                let order = (e1 / e2).log2();
                assert!(order >= 1.9, "observed order {order}");
            }
            assert!(e2 < 1e-3 * (1.0 + exact.norm()));
        }
    }
}

#[test]
fn dalembertian_at_the_peak() {
    let w = [0.9, 1.1, 1.3, 0.7];
    let f = TestFn::gaussian(vec![0.0; 4], w.to_vec(), vec![0.0; 4]).unwrap();
    let g = f.dalembertian_plus_m2(Mass::zero()).unwrap();
    // ∂²_i e^{−x²/2σ²} at the peak is −1/σ²; the metric signs give (−1,+1,+1,+1).
    let expected = -1.0 / (w[0] * w[0]) + w[1..].iter().map(|s| 1.0 / (s * s)).sum::<f64>();
    assert!((g.eval(&[0.0; 4]).unwrap() - c(expected, 0.0)).norm() < 1e-14);
    assert!(unit(3).dalembertian_plus_m2(Mass::zero()).is_err());
}

#[test]
fn dalembertian_of_an_on_shell_wide_packet_is_small() {
    let m = Mass::new(1.0).unwrap();
    let k = [0.3, -0.4, 0.5];
    let e = minkprop::energy_on_shell(m, &k);
    let sigma = 200.0;
    let f = TestFn::gaussian(vec![0.0; 4], vec![sigma; 4], vec![e, k[0], k[1], k[2]]).unwrap();
    let g = f.dalembertian_plus_m2(m).unwrap();
    let x = [0.5, 0.2, -0.1, 0.3];
    // The leading term m² − g(k,k) vanishes; what remains is O(|k|/σ) relative.
    assert!(g.eval(&x).unwrap().norm() < 1e-4 * f.eval(&x).unwrap().norm());
}

#[test]
fn dalembertian_is_linear() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let m = Mass::new(0.5).unwrap();
    let f = TestFn::random(&mut rng, 4);
    // A second function on the same envelope so that the sum is representable.
    let g = f.with_terms(vec![Term { coeff: c(0.3, -0.2), alpha: vec![1, 0, 1, 0] }]).unwrap();
    let (a, b) = (c(0.7, 0.1), c(-0.4, 1.2));
    let lhs = f.scale(a).add(&g.scale(b)).unwrap().dalembertian_plus_m2(m).unwrap();
    let (bf, bg) = (f.dalembertian_plus_m2(m).unwrap(), g.dalembertian_plus_m2(m).unwrap());
    for _ in 0..10 {
        let x: Vec<f64> = (0..4).map(|i| f.center()[i] + rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let r = bf.eval(&x).unwrap() * a + bg.eval(&x).unwrap() * b;
        assert!(rel(lhs.eval(&x).unwrap(), r) < 1e-13);
    }
}

#[test]
fn affine_maps() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let f = TestFn::random(&mut rng, 4);
    assert_eq!(f.reflect().reflect(), f);
    let b = [0.3, -1.1, 0.4, 2.0];
    let t = f.translate(&b).unwrap();
    for _ in 0..10 {
        let x: Vec<f64> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
        let xb: Vec<f64> = x.iter().zip(&b).map(|(x, b)| x - b).collect();
        assert!(rel(t.eval(&x).unwrap(), f.eval(&xb).unwrap()) < 1e-14);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(rel(f.reflect().eval(&x).unwrap(), f.eval(&neg).unwrap()) < 1e-14);
        assert!(rel(f.conjugate().eval(&x).unwrap(), f.eval(&x).unwrap().conj()) < 1e-14);
    }
    let cj = f.conjugate();
    for (a, b) in cj.phase().iter().zip(f.phase()) {
        assert_eq!(*a, -b);
    }
    for (a, b) in cj.terms().iter().zip(f.terms()) {
        assert_eq!(a.coeff, b.coeff.conj());
    }
}

#[test]
fn standard_gaussian_is_self_dual() {
    let g = unit(1);
    let fg = g.fourier_analytic(Sign::Plus);
    for y in [-2.0, -0.5, 0.0, 1.3] {
        assert!((fg.eval(&[y]).unwrap() - g.eval(&[y]).unwrap()).norm() < 1e-15);
    }
    // Quadrature oracle for the classical Gaussian integral.
    let cfg = QuadConfig::default();
    let inv = (2.0 * std::f64::consts::PI).sqrt().recip();
    for y in [0.0, 0.7, -1.9] {
        let q = integrate_1d(|x| g.eval_unchecked(&[x]) * C64::from_polar(inv, -x * y), -40.0, 40.0, &cfg).value;
        assert!((q - fg.eval(&[y]).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn fourier_inverse_pairs_are_inverse() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for dim in [1, 3, 4] {
        for _ in 0..5 {
            let f = TestFn::random(&mut rng, dim);
            for s in [Sign::Plus, Sign::Minus] {
                let back = f.fourier_analytic(s).fourier_analytic(s.flip());
                for (a, b) in back.center().iter().zip(f.center()) {
                    assert!((a - b).abs() < 1e-13);
                }
                for (a, b) in back.phase().iter().zip(f.phase()) {
                    assert!((a - b).abs() < 1e-13);
                }
                for (a, b) in back.widths().iter().zip(f.widths()) {
                    assert!((a - b).abs() < 1e-13);
                }
                let x: Vec<f64> = f.center().iter().map(|c| c + 0.2).collect();
                assert!(rel(back.eval(&x).unwrap(), f.eval(&x).unwrap()) < 1e-12);
            }
        }
    }
}

#[test]
fn fourier_of_derivative() {
    // F±(∂₀f)(y) = ±i y₀ F±f(y).
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let f = TestFn::random(&mut rng, 4);
    for s in [Sign::Plus, Sign::Minus] {
        let lhs = f.derivative(0).unwrap().fourier_analytic(s);
        let rhs = f.fourier_analytic(s);
        for _ in 0..5 {
            let y: Vec<f64> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, -1.5..1.5)).collect();
            let expected = rhs.eval(&y).unwrap() * c(0.0, s.value() * y[0]);
            assert!((lhs.eval(&y).unwrap() - expected).norm() < 1e-12 * (1.0 + expected.norm()));
        }
    }
}

#[test]
fn fourier_matches_quadrature_in_one_dimension() {
    let cfg = QuadConfig::default();
    let inv = (2.0 * std::f64::consts::PI).sqrt().recip();
    for (i, f) in TestFn::random_family(17, 1, 20).iter().enumerate() {
        let s = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let ff = f.fourier_analytic(s);
        let (c0, w) = (f.center()[0], f.widths()[0]);
        for y in [-1.3, 0.0, 0.9] {
            let q = integrate_1d(|x| f.eval_unchecked(&[x]) * C64::from_polar(inv, -s.value() * x * y), c0 - 40.0 * w, c0 + 40.0 * w, &cfg);
            let err = (q.value - ff.eval(&[y]).unwrap()).norm();
            assert!(err < 1e-9, "function {i}, y = {y}: error {err:e}, estimate {:e}", q.abs_err);
        }
    }
}

#[test]
fn parseval() {
    let cfg = QuadConfig::default();
    let fs = TestFn::random_family(8, 1, 6);
    for pair in fs.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let l2 = |a: &TestFn, b: &TestFn| integrate_1d(|x| a.eval_unchecked(&[x]).conj() * b.eval_unchecked(&[x]), -60.0, 60.0, &cfg).value;
        let direct = l2(f, g);
        let transformed = l2(&f.fourier_analytic(Sign::Plus), &g.fourier_analytic(Sign::Plus));
        assert!((direct - transformed).norm() <= 1e-10 * direct.norm().max(1e-3));
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    for f in TestFn::random_family(33, 4, 10) {
        let back = TestFn::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }
    let text = r#"{"dim":4,"terms":[{"re":1.0,"im":0.0,"alpha":[0,0,0,0]}],"center":[0,0,0,0],"widths":[1,1,1,1],"phase":[0,0,0,0]}"#;
    assert_eq!(TestFn::from_json(text).unwrap(), unit(4));
    assert!(TestFn::from_json(r#"{"dim":2}"#).is_err());
}

proptest! {
    #[test]
    fn random_functions_are_closed_under_operations(seed in 0u64..10_000) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = TestFn::random(&mut rng, 4);
        prop_assert!(f.widths().iter().all(|w| *w >= 0.5 && *w <= 2.0));
        prop_assert!(f.degree() <= 2);
        for axis in 0..4 {
            prop_assert_eq!(f.derivative(axis).unwrap().dim(), 4);
        }
        prop_assert!(f.dalembertian_plus_m2(Mass::new(1.0).unwrap()).unwrap().degree() <= 4);
        prop_assert_eq!(f.fourier_analytic(Sign::Plus).dim(), 4);
        prop_assert_eq!(f.reflect().reflect(), f);
    }
}
