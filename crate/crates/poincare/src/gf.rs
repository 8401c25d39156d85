//! Rational generating functions: a sparse integer numerator over a multiset
//! of binomial factors `1 - z^b`.  Denominators are never expanded; equality
//! is decided by cross-multiplication and power-series extraction works on
//! the normalized form.
//!
//! Normalized form: every denominator exponent vector is non-negative and
//! nonzero, so the denominator has constant term 1 and the geometric
//! expansion of every factor is supported in `N^k`.  Factors with
//! non-positive exponents are flipped through `1 - z^b = -z^b (1 - z^{-b})`;
//! mixed-sign factors must divide the numerator exactly and are cancelled.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::MultivariatePoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalGF {
    vars: usize,
    numerator: MultivariatePoly,
    denominator: Vec<Vec<i64>>,
}

impl RationalGF {
    pub fn zero(vars: usize) -> Self {
        RationalGF {
            vars,
            numerator: MultivariatePoly::zero(vars),
            denominator: vec![],
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::from_poly(MultivariatePoly::one(vars))
    }

    pub fn monomial(exp: Vec<i64>, coeff: BigInt) -> Self {
        Self::from_poly(MultivariatePoly::monomial(exp, coeff))
    }

    pub fn from_poly(numerator: MultivariatePoly) -> Self {
        RationalGF {
            vars: numerator.vars(),
            numerator,
            denominator: vec![],
        }
    }

    pub fn new(numerator: MultivariatePoly, denominator: Vec<Vec<i64>>) -> Self {
        let vars = numerator.vars();
        assert!(denominator.iter().all(|b| b.len() == vars));
        let mut gf = RationalGF {
            vars,
            numerator,
            denominator,
        };
        gf.denominator.sort();
        if gf.numerator.is_zero() {
            gf.denominator.clear();
        }
        gf
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn numerator(&self) -> &MultivariatePoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Vec<i64>] {
        &self.denominator
    }

    pub fn is_zero_form(&self) -> bool {
        self.numerator.is_zero()
    }

    fn denominator_counts(&self) -> BTreeMap<Vec<i64>, usize> {
        let mut m = BTreeMap::new();
        for b in &self.denominator {
            *m.entry(b.clone()).or_insert(0) += 1;
        }
        m
    }

    fn product_of(vars: usize, factors: &[Vec<i64>]) -> MultivariatePoly {
        let mut p = MultivariatePoly::one(vars);
        for b in factors {
            let f = MultivariatePoly::from_terms(
                vars,
                vec![
                    (vec![0; vars], BigInt::one()),
                    (b.clone(), -BigInt::one()),
                ],
            );
            p = p.mul(&f);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        if self.is_zero_form() {
            return other.clone();
        }
        if other.is_zero_form() {
            return self.clone();
        }
        let ca = self.denominator_counts();
        let cb = other.denominator_counts();
        let mut union: BTreeMap<Vec<i64>, usize> = ca.clone();
        for (b, &n) in &cb {
            let e = union.entry(b.clone()).or_insert(0);
            *e = (*e).max(n);
        }
        let mut extra_a = Vec::new();
        let mut extra_b = Vec::new();
        let mut denominator = Vec::new();
        for (b, &n) in &union {
            let na = ca.get(b).copied().unwrap_or(0);
            let nb = cb.get(b).copied().unwrap_or(0);
            for _ in 0..n - na {
                extra_a.push(b.clone());
            }
            for _ in 0..n - nb {
                extra_b.push(b.clone());
            }
            for _ in 0..n {
                denominator.push(b.clone());
            }
        }
        let na = self.numerator.mul(&Self::product_of(self.vars, &extra_a));
        let nb = other.numerator.mul(&Self::product_of(self.vars, &extra_b));
        Self::new(na.add(&nb), denominator)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.numerator.neg(), self.denominator.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.numerator.scale(k), self.denominator.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut den = self.denominator.clone();
        den.extend(other.denominator.iter().cloned());
        Self::new(self.numerator.mul(&other.numerator), den)
    }

    /// Multiply by the bare monomial `coeff * z^exp`.
    pub fn mul_monomial(&self, exp: &[i64], coeff: &BigInt) -> Self {
        Self::new(
            self.numerator.mul_monomial(exp, coeff),
            self.denominator.clone(),
        )
    }

    /// Normalized form: flips non-positive factors and cancels mixed-sign
    /// factors that divide the numerator.  Mixed-sign factors that do not
    /// cancel are kept in place; `is_normalized` reports whether any remain
    /// (expansion requires that none do).
    pub fn normalize(&self) -> Self {
        if self.numerator.is_zero() {
            return Self::zero(self.vars);
        }
        let mut numerator = self.numerator.clone();
        let mut kept: Vec<Vec<i64>> = Vec::new();
        let mut mixed: Vec<Vec<i64>> = Vec::new();
        for b in &self.denominator {
            assert!(b.iter().any(|&x| x != 0), "denominator factor 1 - z^0 vanishes");
            if b.iter().all(|&x| x >= 0) {
                kept.push(b.clone());
            } else if b.iter().all(|&x| x <= 0) {
                let flipped: Vec<i64> = b.iter().map(|&x| -x).collect();
                numerator = numerator.mul_monomial(&flipped, &BigInt::from(-1));
                kept.push(flipped);
            } else {
                mixed.push(b.clone());
            }
        }
        for b in &mixed {
            match numerator.div_binomial(b) {
                Some(q) => numerator = q,
                None => kept.push(b.clone()),
            }
        }
        Self::new(numerator, kept)
    }

    pub fn is_normalized(&self) -> bool {
        self.denominator
            .iter()
            .all(|b| b.iter().all(|&x| x >= 0) && b.iter().any(|&x| x > 0))
    }

    /// Exact semantic equality by cross-multiplication of cleared forms.
    pub fn equal(&self, other: &Self) -> bool {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let ca = self.denominator_counts();
        let cb = other.denominator_counts();
        // cancel shared factors first
        let mut only_a = Vec::new();
        let mut only_b = Vec::new();
        for (b, &n) in &ca {
            let m = cb.get(b).copied().unwrap_or(0);
            for _ in 0..n.saturating_sub(m) {
                only_a.push(b.clone());
            }
        }
        for (b, &n) in &cb {
            let m = ca.get(b).copied().unwrap_or(0);
            for _ in 0..n.saturating_sub(m) {
                only_b.push(b.clone());
            }
        }
        let lhs = self.numerator.mul(&Self::product_of(self.vars, &only_b));
        let rhs = other.numerator.mul(&Self::product_of(self.vars, &only_a));
        lhs == rhs
    }

    /// Euler operator `z_i d/dz_i` applied to the rational function.
    pub fn euler_derivative(&self, i: usize) -> Self {
        assert!(i < self.vars);
        let mut out = Self::new(self.numerator.euler_derivative(i), self.denominator.clone());
        for (j, b) in self.denominator.iter().enumerate() {
            if b[i] == 0 {
                continue;
            }
            let mut den = self.denominator.clone();
            den.push(self.denominator[j].clone());
            let num = self.numerator.mul_monomial(b, &BigInt::from(b[i]));
            out = out.add(&Self::new(num, den));
        }
        out
    }

    /// Exponent substitution `z^e -> z^(offset + e * basis)` applied to the
    /// whole function (the offset multiplies in once, via the numerator).
    pub fn substitute_exponents(
        &self,
        offset: &[i64],
        basis: &[Vec<i64>],
        out_vars: usize,
    ) -> Self {
        let numerator = self.numerator.substitute_exponents(offset, basis, out_vars);
        let zero = vec![0i64; out_vars];
        let denominator: Vec<Vec<i64>> = self
            .denominator
            .iter()
            .map(|b| {
                let img = MultivariatePoly::monomial(b.clone(), BigInt::one())
                    .substitute_exponents(&zero, basis, out_vars);
                let (e, _) = img.terms().next().expect("monomial image");
                assert!(
                    e.iter().any(|&x| x != 0),
                    "denominator direction collapses to 1"
                );
                e.clone()
            })
            .collect();
        Self::new(numerator, denominator)
    }

    /// All coefficients of total degree at most `bound`, by truncated
    /// geometric expansion of each denominator factor.
    pub fn expand(&self, bound: i64) -> Result<TruncatedSeries> {
        assert!(bound >= 0);
        let f = self.normalize();
        if !f.is_normalized() && !f.is_zero_form() {
            return Err(Error::validation(
                "expansion not supported: denominator has non-cancelling mixed-orientation factors",
            ));
        }
        if f.numerator.has_negative_exponent() {
            return Err(Error::validation(
                "expansion not supported: numerator has negative exponents after normalization",
            ));
        }
        let mut coeffs: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
        for (e, c) in f.numerator.terms() {
            if total_degree(e) <= bound {
                coeffs.insert(e.clone(), c.clone());
            }
        }
        for b in &f.denominator {
            let step: i64 = total_degree(b);
            debug_assert!(step >= 1);
            let mut next: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
            for (e, c) in &coeffs {
                let mut cur = e.clone();
                let mut deg = total_degree(e);
                loop {
                    *next.entry(cur.clone()).or_insert_with(BigInt::zero) += c;
                    deg += step;
                    if deg > bound {
                        break;
                    }
                    for (x, y) in cur.iter_mut().zip(b) {
                        *x += y;
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            coeffs = next;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(TruncatedSeries {
            vars: self.vars,
            bound,
            coeffs,
        })
    }
}

pub fn total_degree(e: &[i64]) -> i64 {
    e.iter().sum()
}

/// A truncated power series: all coefficients with total degree up to the
/// bound, exponents non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: usize,
    bound: i64,
    coeffs: BTreeMap<Vec<i64>, BigInt>,
}

impl TruncatedSeries {
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn coeff(&self, e: &[i64]) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.coeffs.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(entries: &[(&[i64], i64)]) -> MultivariatePoly {
        MultivariatePoly::from_terms(
            entries[0].0.len(),
            entries
                .iter()
                .map(|(e, c)| (e.to_vec(), BigInt::from(*c)))
                .collect(),
        )
    }

    #[test]
    fn add_cancels() {
        let x = RationalGF::monomial(vec![1], BigInt::one());
        assert!(x.add(&x.neg()).is_zero_form());
    }

    #[test]
    fn equal_examples() {
        // 1/(1-z) == (1+z)/(1-z^2)
        let a = RationalGF::new(poly(&[(&[0], 1)]), vec![vec![1]]);
        let b = RationalGF::new(poly(&[(&[0], 1), (&[1], 1)]), vec![vec![2]]);
        assert!(a.equal(&b));
        // perturb a coefficient at degree 5
        let c = RationalGF::new(
            poly(&[(&[0], 1), (&[1], 1), (&[5], 1)]),
            vec![vec![2]],
        );
        assert!(!a.equal(&c));
    }

    #[test]
    fn expand_geometric() {
        let a = RationalGF::new(poly(&[(&[0], 1)]), vec![vec![1]]);
        let s = a.expand(3).unwrap();
        for n in 0..=3 {
            assert_eq!(s.coeff(&[n]), BigInt::one());
        }

        let two = RationalGF::new(poly(&[(&[0, 0], 1)]), vec![vec![1, 0], vec![0, 1]]);
        let s2 = two.expand(2).unwrap();
        for e in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
            assert_eq!(s2.coeff(&e), BigInt::one(), "{e:?}");
        }
    }

    #[test]
    fn normalize_flip_and_cancel() {
        // z^2/(1-z^{-1}) = -z^3/(1-z)
        let a = RationalGF::new(poly(&[(&[2], 1)]), vec![vec![-1]]);
        let n = a.normalize();
        assert!(n.is_normalized());
        assert!(n.equal(&RationalGF::new(poly(&[(&[3], -1)]), vec![vec![1]])));

        // Brion sum for the segment [0, 2]: 1/(1-z) + z^2/(1-z^{-1}) = 1+z+z^2
        let b = RationalGF::new(poly(&[(&[0], 1)]), vec![vec![1]]);
        let seg = b.add(&a).normalize();
        assert!(seg.equal(&RationalGF::from_poly(poly(&[(&[0], 1), (&[1], 1), (&[2], 1)]))));

        // mixed-sign factor that cancels: (1 - z1 z2^{-1}) divides z2 - z1
        let m = RationalGF::new(poly(&[(&[0, 1], 1), (&[1, 0], -1)]), vec![vec![1, -1]]);
        let nm = m.normalize();
        assert!(nm.equal(&RationalGF::monomial(vec![0, 1], BigInt::one())));

        // and one that cannot cancel stays mixed and refuses to expand
        let bad = RationalGF::new(poly(&[(&[0, 0], 1)]), vec![vec![1, -1]]);
        assert!(!bad.normalize().is_normalized());
        assert!(bad.expand(3).is_err());
    }

    #[test]
    fn normalization_preserves_expansion() {
        let f = RationalGF::new(
            poly(&[(&[0, 1], 1), (&[1, 0], -1)]),
            vec![vec![1, -1], vec![1, 0]],
        );
        let n = f.normalize();
        let s = n.expand(4).unwrap();
        // f = z2/(1-z1) after cancellation
        let g = RationalGF::new(poly(&[(&[0, 1], 1)]), vec![vec![1, 0]]);
        assert_eq!(s, g.expand(4).unwrap());
    }

    #[test]
    fn euler_derivative_matches_series() {
        // theta(1/(1-z)) = z/(1-z)^2 = sum n z^n
        let a = RationalGF::new(poly(&[(&[0], 1)]), vec![vec![1]]);
        let t = a.euler_derivative(0);
        let s = t.expand(5).unwrap();
        for n in 0..=5i64 {
            assert_eq!(s.coeff(&[n]), BigInt::from(n));
        }
    }
}
