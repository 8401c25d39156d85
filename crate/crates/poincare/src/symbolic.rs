//! Edge lengths and point residues on a chain of loops live in a finitely
//! generated Q-module over a declared list of generators `{1, u_1, ..., u_t}`
//! asserted Q-linearly independent.  A value is a rational coefficient
//! vector over that basis mod nothing; congruences modulo a loop length
//! become exact linear systems componentwise, which reproduces the usual
//! genericity arguments without real arithmetic.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::{rat_floor, Rational};

/// A Q-linear combination of the symbolic generators; index 0 is the
/// rational part (coefficient of 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicLength {
    coeffs: Vec<Rational>,
}

impl SymbolicLength {
    pub fn zero(width: usize) -> Self {
        SymbolicLength {
            coeffs: vec![Rational::zero(); width],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        SymbolicLength { coeffs }
    }

    pub fn rational(width: usize, value: Rational) -> Self {
        let mut s = Self::zero(width);
        s.coeffs[0] = value;
        s
    }

    /// Pure generator term `c * u_g` (generator index 0 is the rational 1).
    pub fn generator(width: usize, g: usize, c: Rational) -> Self {
        let mut s = Self::zero(width);
        s.coeffs[g] = c;
        s
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when the value has no irrational component.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.width(), other.width());
        SymbolicLength {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.width(), other.width());
        SymbolicLength {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SymbolicLength {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        SymbolicLength {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&Rational::from_integer(k.clone()))
    }

    /// The integer `m` with `self = m * other`, if one exists.
    pub fn integral_ratio(&self, other: &Self) -> Option<BigInt> {
        assert_eq!(self.width(), other.width());
        let pivot = other.coeffs.iter().position(|c| !c.is_zero())?;
        let ratio = &self.coeffs[pivot] / &other.coeffs[pivot];
        if !ratio.is_integer() {
            return None;
        }
        if self == &other.scale(&ratio) {
            Some(ratio.to_integer())
        } else {
            None
        }
    }

    /// Canonical representative modulo `Z * modulus`: subtract the floor
    /// multiple along the first nonzero coordinate of the modulus.
    pub fn reduce_mod(&self, modulus: &Self) -> Self {
        assert_eq!(self.width(), modulus.width());
        let pivot = modulus
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .expect("modulus must be nonzero");
        let q = rat_floor(&(&self.coeffs[pivot] / &modulus.coeffs[pivot]));
        self.sub(&modulus.scale_int(&q))
    }

    /// Congruence test modulo `Z * modulus`.
    pub fn congruent(&self, other: &Self, modulus: &Self) -> bool {
        let diff = self.sub(other);
        if diff.is_zero() {
            return true;
        }
        diff.integral_ratio(modulus).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_from_int;

    fn sym(vals: &[i64]) -> SymbolicLength {
        SymbolicLength::from_coeffs(vals.iter().map(|&x| rat_from_int(x)).collect())
    }

    #[test]
    fn ratio_and_congruence() {
        let l = sym(&[0, 1]); // one generator u
        let x = sym(&[0, 3]);
        assert_eq!(x.integral_ratio(&l), Some(BigInt::from(3)));
        assert_eq!(sym(&[1, 3]).integral_ratio(&l), None);
        assert!(x.congruent(&sym(&[0, 0]), &l));
        assert!(!sym(&[1, 0]).congruent(&sym(&[0, 0]), &l));
    }

    #[test]
    fn reduction_is_canonical() {
        let l = SymbolicLength::from_coeffs(vec![rat_from_int(1), rat_from_int(0)]);
        let a = SymbolicLength::from_coeffs(vec![
            Rational::new(BigInt::from(7), BigInt::from(2)),
            rat_from_int(0),
        ]);
        let r = a.reduce_mod(&l);
        assert_eq!(r.coeff(0), &Rational::new(BigInt::from(1), BigInt::from(2)));
        // congruent values share the canonical form
        let b = a.add(&l.scale_int(&BigInt::from(-5)));
        assert_eq!(b.reduce_mod(&l), r);
    }

    #[test]
    fn irrational_modulus_reduction() {
        let l = sym(&[0, 2]); // 2u
        let a = sym(&[3, 5]);
        let r = a.reduce_mod(&l);
        assert!(a.congruent(&r, &l));
        assert!(r.coeff(1) >= &Rational::zero() && r.coeff(1) < &rat_from_int(2));
    }
}
