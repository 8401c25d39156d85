//! Arbitrary-precision rationals, re-exported from `num` with a couple of
//! helpers used throughout the crate.  `BigRational` already maintains the
//! invariants we need: always reduced, denominator positive.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_from_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Floor of a rational as a BigInt.
pub fn rat_floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Parse "p/q", "p" or a plain integer rendering into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Render as "p" or "p/q" with positive denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(rs: &[Rational]) -> BigInt {
    let mut l = BigInt::one();
    for r in rs {
        l = num_integer::lcm(l, r.denom().abs());
    }
    l
}
