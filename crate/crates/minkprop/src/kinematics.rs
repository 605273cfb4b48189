//! Minkowski kinematics: four-vectors, the metric of signature (+,−,−,−) and
//! the on-shell energy.
//!
//! Natural units are used throughout (c = ħ = 1); a mass is a nonnegative
//! inverse length.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

use crate::Error;

/// A four-vector `(x⁰, x¹, x², x³)` or covector `(p₀, p₁, p₂, p₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    /// Builds a four-vector from its components.
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self([x0, x1, x2, x3])
    }

    /// The zero vector.
    pub const fn zero() -> Self {
        Self([0.0; 4])
    }

    /// Time (or energy) component.
    pub fn time(&self) -> f64 {
        self.0[0]
    }

    /// Spatial part as a 3-vector.
    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Euclidean length of the spatial part (`r` or `ρ`).
    pub fn spatial_norm(&self) -> f64 {
        norm3(&self.spatial())
    }

    /// The plain dual pairing `Σ_λ p_λ x^λ` (no metric involved).
    pub fn pairing(&self, other: &FourVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|v| -v))
    }
}

/// The Minkowski metric `diag(+1, −1, −1, −1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metric;

impl Metric {
    /// Diagonal entry `g^{λλ}` (equal to `g_{λλ}` for this metric).
    pub const fn diag(lambda: usize) -> f64 {
        if lambda == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `g(p, q) = p₀q₀ − p⊥·q⊥`.
    pub fn inner(p: &FourVector, q: &FourVector) -> f64 {
        p.0[0] * q.0[0] - p.0[1] * q.0[1] - p.0[2] * q.0[2] - p.0[3] * q.0[3]
    }
}

/// A nonnegative mass (inverse length in natural units).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Mass(f64);

impl Mass {
    /// Validates and wraps a mass value.
    pub fn new(m: f64) -> Result<Self, Error> {
        if m.is_finite() && m >= 0.0 {
            Ok(Self(m))
        } else {
            Err(Error::InvalidArgument(format!("mass must be finite and nonnegative, got {m}")))
        }
    }

    /// The massless case.
    pub const fn zero() -> Self {
        Self(0.0)
    }

    /// The numeric value.
    pub const fn value(&self) -> f64 {
        self.0
    }
}

/// `p² = p₀² − |p⊥|²`.
pub fn minkowski_square(p: &FourVector) -> f64 {
    Metric::inner(p, p)
}

/// `E_m(p⊥) = √(m² + |p⊥|²)`.
pub fn energy_on_shell(m: Mass, p_perp: &[f64; 3]) -> f64 {
    energy(m.value(), norm3(p_perp))
}

/// On-shell energy from the mass value and the spatial momentum magnitude.
pub(crate) fn energy(m: f64, rho: f64) -> f64 {
    m.hypot(rho)
}

/// Euclidean norm of a 3-vector, robust against overflow.
pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    v[0].hypot(v[1]).hypot(v[2])
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn mass_rejects_negative_and_nan() {
        assert!(Mass::new(-0.1).is_err());
        assert!(Mass::new(f64::NAN).is_err());
    }
}
