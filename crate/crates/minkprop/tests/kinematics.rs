//! Minkowski square and on-shell energy.

use minkprop::{energy_on_shell, minkowski_square, FourVector, Mass};
use proptest::prelude::*;

#[test]
fn minkowski_square_examples() {
    assert_eq!(minkowski_square(&FourVector::new(1.0, 0.0, 0.0, 0.0)), 1.0);
    assert_eq!(minkowski_square(&FourVector::new(0.0, 1.0, 0.0, 0.0)), -1.0);
    assert_eq!(minkowski_square(&FourVector::new(3.0, 2.0, 1.0, 0.0)), 4.0);
}

#[test]
fn energy_examples() {
    assert_eq!(energy_on_shell(Mass::zero(), &[3.0, 4.0, 0.0]), 5.0);
    assert_eq!(energy_on_shell(Mass::new(1.0).unwrap(), &[0.0; 3]), 1.0);
    let e = energy_on_shell(Mass::new(2.0).unwrap(), &[1.0, 2.0, 2.0]);
    assert!((e - 13f64.sqrt()).abs() < 1e-15);
}

#[test]
fn negative_or_nan_mass_is_rejected() {
    assert!(Mass::new(-0.1).is_err());
    assert!(Mass::new(f64::NAN).is_err());
}

proptest! {
    #[test]
    fn square_is_even(p in prop::array::uniform4(-100.0f64..100.0)) {
        let p = FourVector(p);
        prop_assert_eq!(minkowski_square(&-p), minkowski_square(&p));
    }

    #[test]
    fn energy_is_on_shell(m in 0.0f64..10.0, p in prop::array::uniform3(-10.0f64..10.0)) {
        let e = energy_on_shell(Mass::new(m).unwrap(), &p);
        let p2 = p.iter().map(|x| x * x).sum::<f64>();
        prop_assert!(e >= m);
        prop_assert!((e * e - p2 - m * m).abs() <= 1e-14 * (e * e).max(1.0));
    }
}
