//! The symbolic Fock algebra: generator relations, Wick reordering, the
//! dense-matrix oracle, free fields and the commutator-to-propagator bridge.

use minkprop::fock::{
    ccr_suite, commutator_value, commutator_value_expanded, commutator_vs_propagator, matrix_realize, random_expr, Field, GenKind, LatticeSpec,
    Monomial, OpExpr, Statistics, Which, BRIDGE_LADDER, BRIDGE_SIGMA, BRIDGE_TOL,
};
use minkprop::{FourVector, Mass, QuadConfig, C64};
use proptest::prelude::*;
use rand::SeedableRng;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn spec(dp: f64, n_half: usize, st: Statistics) -> LatticeSpec {
    LatticeSpec::new(dp, n_half, Mass::new(1.0).unwrap(), st).unwrap()
}

const BOTH: [Statistics; 2] = [Statistics::Boson, Statistics::Fermion];

#[test]
fn lattice_geometry() {
    let s = spec(0.5, 1, Statistics::Boson);
    assert_eq!(s.modes(), 27);
    assert_eq!(s.slots(), 54);
    assert_eq!(s.contraction(), 8.0);
    assert_eq!(s.momentum(0), [-0.5, -0.5, -0.5]);
    assert_eq!(s.momentum(13), [0.0, 0.0, 0.0]);
    assert_eq!(s.four_momentum(13).time(), 1.0);
    assert!(LatticeSpec::new(0.0, 1, Mass::zero(), Statistics::Boson).is_err());
    assert!(LatticeSpec::new(0.1, 1000, Mass::zero(), Statistics::Boson).is_err());
    assert!(s.generator(GenKind::EmitParticle, 27).is_err());
}

#[test]
fn statistics_names() {
    for st in BOTH {
        assert_eq!(st.to_string().parse::<Statistics>().unwrap(), st);
    }
    assert!("anyon".parse::<Statistics>().is_err());
    assert_eq!(Statistics::Fermion.swap_sign(), -1.0);
}

#[test]
fn generator_relations() {
    for st in BOTH {
        let s = spec(0.5, 1, st);
        let a = s.generator(GenKind::AbsorbParticle, 3).unwrap();
        let ad = s.generator(GenKind::EmitParticle, 3).unwrap();
        let b = s.generator(GenKind::AbsorbAnti, 3).unwrap();
        let bd_other = s.generator(GenKind::EmitAnti, 4).unwrap();
        assert_eq!(s.graded_commutator(&a, &ad).unwrap(), OpExpr::scalar(C64::new(s.contraction(), 0.0)));
        assert!(s.graded_commutator(&a, &s.generator(GenKind::EmitAnti, 3).unwrap()).unwrap().is_zero());
        assert!(s.graded_commutator(&b, &bd_other).unwrap().is_zero());
        assert!(s.graded_commutator(&a, &b).unwrap().is_zero());
        assert!(s.graded_commutator(&ad, &ad).unwrap().is_zero());
    }
}

#[test]
fn fermion_generators_are_nilpotent() {
    let f = spec(0.5, 0, Statistics::Fermion);
    let e = f.generator(GenKind::EmitAnti, 0).unwrap();
    assert!(f.multiply(&e, &e).is_zero());
    let b = spec(0.5, 0, Statistics::Boson);
    let e = b.generator(GenKind::EmitAnti, 0).unwrap();
    assert_eq!(b.multiply(&e, &e).len(), 1);
}

#[test]
fn wick_product_is_free_product_plus_contraction() {
    for st in BOTH {
        let s = spec(0.5, 0, st);
        let a = s.generator(GenKind::AbsorbParticle, 0).unwrap();
        let ad = s.generator(GenKind::EmitParticle, 0).unwrap();
        let full = s.multiply(&a, &ad);
        let free = s.normal_order_free(&a, &ad);
        let diff = full.add_scaled(&free, C64::new(-1.0, 0.0));
        assert_eq!(diff, OpExpr::scalar(C64::new(s.contraction(), 0.0)));
        // a·a† reorders to ±a†a.
        assert_eq!(free, s.multiply(&ad, &a).scale(C64::new(st.swap_sign(), 0.0)));
    }
}

#[test]
fn fermion_emissions_anticommute() {
    let s = spec(0.5, 1, Statistics::Fermion);
    let e1 = s.generator(GenKind::EmitParticle, 1).unwrap();
    let e2 = s.generator(GenKind::EmitAnti, 5).unwrap();
    let ab = s.normal_order_free(&e1, &e2);
    let ba = s.normal_order_free(&e2, &e1);
    assert_eq!(ab, ba.scale(C64::new(-1.0, 0.0)));
    let b = spec(0.5, 1, Statistics::Boson);
    let (e1, e2) = (b.generator(GenKind::EmitParticle, 1).unwrap(), b.generator(GenKind::EmitAnti, 5).unwrap());
    assert_eq!(b.normal_order_free(&e1, &e2), b.normal_order_free(&e2, &e1));
}

#[test]
fn number_operator_counts_particles() {
    for st in BOTH {
        let s = spec(0.5, 0, st);
        let mut n = OpExpr::zero();
        for slot in 0..s.slots() as u32 {
            let m = Monomial { emit: vec![slot], absorb: vec![slot] };
            n = n.add_scaled(&OpExpr::from_terms([(m, one())]), C64::new(s.cell(), 0.0));
        }
        let mat = matrix_realize(&s, &n, 3).unwrap();
        for (i, state) in mat.states.iter().enumerate() {
            let total: f64 = state.iter().map(|&o| o as f64).sum();
            for j in 0..mat.dim() {
                let expected = if i == j { total } else { 0.0 };
                assert!((mat.get(i, j) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn dense_oracle_matches_symbolic_products() {
    for st in BOTH {
        let s = spec(0.7, 0, st);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_expr(&mut rng, &s, 2, 1);
            let b = random_expr(&mut rng, &s, 2, 1);
            let headroom = 3 - a.max_emissions() - b.max_emissions();
            let (ma, mb) = (matrix_realize(&s, &a, 3).unwrap(), matrix_realize(&s, &b, 3).unwrap());
            let prod = matrix_realize(&s, &s.multiply(&a, &b), 3).unwrap();
            assert!(prod.headroom_diff(&ma.mul(&mb), headroom) < 1e-12 * s.contraction());
        }
    }
}

#[test]
fn jacobi_identity_for_bosons() {
    let s = spec(0.5, 0, Statistics::Boson);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let (a, b, c) = (random_expr(&mut rng, &s, 2, 2), random_expr(&mut rng, &s, 2, 1), random_expr(&mut rng, &s, 2, 2));
        let cm = |x: &OpExpr, y: &OpExpr| s.graded_commutator(x, y).unwrap();
        let total = cm(&a, &cm(&b, &c)).add_scaled(&cm(&b, &cm(&c, &a)), one()).add_scaled(&cm(&c, &cm(&a, &b)), one());
        assert!(total.max_abs() < 1e-12 * s.contraction().powi(2), "{}", total.max_abs());
    }
}

#[test]
fn field_structure() {
    for st in BOTH {
        let s = spec(0.5, 1, st);
        let phi = s.field(&FourVector::zero());
        assert_eq!(phi.len(), 2 * s.modes());
        for (m, c) in phi.terms() {
            assert_eq!(m.len(), 1);
            assert!(c.im == 0.0 && c.re > 0.0, "mode functions at the origin are real and positive");
        }
        // φ̃ carries the statistics sign on its absorptions.
        let tilde = s.antifield(&FourVector::zero());
        for (m, c) in tilde.terms() {
            let sign = if m.absorb.is_empty() { 1.0 } else { st.antifield_sign() };
            assert!(c.re * sign > 0.0);
        }
        // φ* conjugates the mode functions of φ.
        let x = FourVector::new(0.3, -0.2, 0.5, 0.1);
        let (p, ps) = (s.field(&x), s.field_expr(Field::PhiStar, &x, false));
        assert_eq!(p.len(), ps.len());
        for ((m1, c1), (m2, c2)) in p.terms().zip(ps.terms()) {
            assert_eq!(m1, m2);
            assert!((c1.norm() - c2.norm()).abs() < 1e-15);
        }
    }
}

#[test]
fn equal_time_field_commutators() {
    for st in BOTH {
        let s = spec(0.5, 2, st);
        let x = FourVector::new(0.4, 0.1, -0.3, 0.2);
        let y = FourVector::new(0.4, -0.5, 0.6, 0.0);
        let d = [y.0[1] - x.0[1], y.0[2] - x.0[2], y.0[3] - x.0[3]];
        let delta = s.lattice_delta(&d);
        let pi = commutator_value(&x, &y, Which::FieldAntifieldDt, &s).unwrap();
        assert!((pi - C64::new(0.0, delta)).norm() < 1e-12 * s.lattice_delta(&[0.0; 3]));
        let rev = commutator_value(&x, &y, Which::DtFieldAntifield, &s).unwrap();
        assert!((rev + C64::new(0.0, delta)).norm() < 1e-12 * s.lattice_delta(&[0.0; 3]));
        for w in [Which::FieldField, Which::FieldFieldStar] {
            assert_eq!(commutator_value_expanded(&x, &y, w, &s).unwrap(), C64::new(0.0, 0.0));
        }
        assert!(s.graded_commutator(&s.field(&x), &s.field(&y)).unwrap().is_zero());
    }
}

#[test]
fn unequal_time_commutator_is_the_lattice_propagator() {
    let s = spec(0.5, 2, Statistics::Boson);
    let x = FourVector::new(1.2, 0.1, 0.0, -0.4);
    let y = FourVector::new(-0.3, 0.5, 0.2, 0.1);
    let fast = commutator_value(&x, &y, Which::FieldAntifield, &s).unwrap();
    let wick = commutator_value_expanded(&x, &y, Which::FieldAntifield, &s).unwrap();
    assert!((fast - wick).norm() < 1e-12 * s.contraction());
    assert!((fast - s.lattice_propagator(&x, &y)).norm() < 1e-12 * s.lattice_delta(&[0.0; 3]));
}

#[test]
fn non_central_values_are_reported() {
    let s = spec(0.5, 0, Statistics::Boson);
    let a = s.generator(GenKind::AbsorbParticle, 0).unwrap();
    assert!(a.central_value().is_err());
    assert!(s.linear_commutator(&s.multiply(&a, &a), &a).is_err());
}

#[test]
fn ccr_suites_pass() {
    for st in BOTH {
        let lines = ccr_suite(&spec(0.5, 1, st), 3).unwrap();
        assert_eq!(lines.len(), 8);
        assert!(lines.iter().all(|l| l.pass), "{lines:?}");
    }
}

#[test]
fn commutator_converges_to_the_propagator() {
    let cfg = QuadConfig::default();
    let x = FourVector::new(1.0, 0.0, 0.0, 0.0);
    let r =
        commutator_vs_propagator(&x, &FourVector::zero(), Mass::new(1.0).unwrap(), Statistics::Boson, &BRIDGE_LADDER, BRIDGE_SIGMA, &cfg).unwrap();
    assert!(r.pass && r.monotone, "{r:?}");
    assert!(r.rows.iter().all(|row| row.dp * row.n_half as f64 >= 6.0));
    assert!(r.rows.last().unwrap().deviation <= BRIDGE_TOL);
    let f = commutator_vs_propagator(&x, &FourVector::zero(), Mass::new(1.0).unwrap(), Statistics::Fermion, &[0.8], BRIDGE_SIGMA, &cfg).unwrap();
    assert!((f.rows[0].lattice - r.rows[0].lattice).norm() < 1e-12, "the smeared φ–φ̃ commutator is statistics independent");
    assert!(commutator_vs_propagator(&x, &FourVector::zero(), Mass::zero(), Statistics::Boson, &[], 0.5, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn commutator_is_graded_antisymmetric(seed in 0u64..10_000, fermion in any::<bool>(), da in 1usize..3, db in 1usize..3) {
        let st = if fermion { Statistics::Fermion } else { Statistics::Boson };
        let s = spec(0.5, 0, st);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_expr(&mut rng, &s, 2, da), random_expr(&mut rng, &s, 2, db));
        let sign = if s.grade(&a).unwrap() * s.grade(&b).unwrap() == 1 { 1.0 } else { -1.0 };
        let ab = s.graded_commutator(&a, &b).unwrap();
        let ba = s.graded_commutator(&b, &a).unwrap();
        prop_assert!(ab.add_scaled(&ba, C64::new(-sign, 0.0)).max_abs() < 1e-12);
    }
}
