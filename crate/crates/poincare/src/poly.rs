//! Sparse multivariate Laurent polynomials with integer coefficients.
//! Exponent vectors may be negative in intermediates; the public numerators
//! of normalized rational functions end up with non-negative exponents.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultivariatePoly {
    vars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl MultivariatePoly {
    pub fn zero(vars: usize) -> Self {
        MultivariatePoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::monomial(vec![0; vars], BigInt::from(1))
    }

    pub fn monomial(exp: Vec<i64>, coeff: BigInt) -> Self {
        let vars = exp.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        MultivariatePoly { vars, terms }
    }

    pub fn from_terms(vars: usize, entries: Vec<(Vec<i64>, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in entries {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[i64]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, exp: Vec<i64>, coeff: BigInt) {
        assert_eq!(exp.len(), self.vars);
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * k;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiply by the monomial `coeff * z^exp`.
    pub fn mul_monomial(&self, exp: &[i64], coeff: &BigInt) -> Self {
        assert_eq!(exp.len(), self.vars);
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let shifted: Vec<i64> = e.iter().zip(exp).map(|(a, b)| a + b).collect();
            out.add_term(shifted, c * coeff);
        }
        out
    }

    /// Euler derivative in variable `i`: sends `c z^e` to `c e_i z^e`.
    pub fn euler_derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * BigInt::from(e[i]));
        }
        out
    }

    pub fn min_exponent(&self) -> Option<Vec<i64>> {
        if self.terms.is_empty() {
            return None;
        }
        let mut min = vec![i64::MAX; self.vars];
        for e in self.terms.keys() {
            for (m, x) in min.iter_mut().zip(e) {
                *m = (*m).min(*x);
            }
        }
        Some(min)
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|e| e.iter().any(|&x| x < 0))
    }

    /// Remap exponents through a linear-affine substitution:
    /// `z^e` goes to `z^(offset + e * basis)` (basis rows are images of the
    /// unit exponent directions).
    pub fn substitute_exponents(&self, offset: &[i64], basis: &[Vec<i64>], out_vars: usize) -> Self {
        assert_eq!(basis.len(), self.vars);
        let mut out = Self::zero(out_vars);
        for (e, c) in &self.terms {
            let mut img = offset.to_vec();
            for (k, b) in e.iter().zip(basis) {
                for (o, x) in img.iter_mut().zip(b) {
                    *o += k * x;
                }
            }
            out.add_term(img, c.clone());
        }
        out
    }

    /// Exact division by the binomial `1 - z^b`, or `None` when not
    /// divisible.  Terms are grouped by residue class of the exponent modulo
    /// `Z b`; within one class the problem is a univariate division by
    /// `1 - T`, which is exact iff the class coefficient sum vanishes.
    pub fn div_binomial(&self, b: &[i64]) -> Option<Self> {
        assert_eq!(b.len(), self.vars);
        assert!(b.iter().any(|&x| x != 0), "zero binomial exponent");
        let pivot = b.iter().position(|&x| x != 0).unwrap();
        let mut classes: BTreeMap<Vec<i64>, BTreeMap<i64, BigInt>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let m = e[pivot].div_euclid(b[pivot]);
            let base: Vec<i64> = e.iter().zip(b).map(|(x, y)| x - m * y).collect();
            *classes.entry(base).or_default().entry(m).or_insert_with(BigInt::zero) += c;
        }
        let mut out = Self::zero(self.vars);
        for (base, slice) in classes {
            let total: BigInt = slice.values().sum();
            if !total.is_zero() {
                return None;
            }
            // N(T) = (1 - T) Q(T): q_m = sum_{m' <= m} n_{m'}
            let mut running = BigInt::zero();
            let max_m = *slice.keys().next_back().unwrap();
            let min_m = *slice.keys().next().unwrap();
            for m in min_m..max_m {
                if let Some(c) = slice.get(&m) {
                    running += c;
                }
                if !running.is_zero() {
                    let e: Vec<i64> = base.iter().zip(b).map(|(x, y)| x + m * y).collect();
                    out.add_term(e, running.clone());
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(entries: &[(&[i64], i64)]) -> MultivariatePoly {
        let vars = entries[0].0.len();
        MultivariatePoly::from_terms(
            vars,
            entries
                .iter()
                .map(|(e, c)| (e.to_vec(), BigInt::from(*c)))
                .collect(),
        )
    }

    #[test]
    fn mul_and_cancel() {
        let a = p(&[(&[1, 0], 1), (&[0, 1], -1)]);
        let b = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let ab = a.mul(&b);
        assert_eq!(ab, p(&[(&[2, 0], 1), (&[0, 2], -1)]));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn div_binomial_exact() {
        // 1 - z^3 = (1 - z)(1 + z + z^2)
        let n = p(&[(&[0], 1), (&[3], -1)]);
        let q = n.div_binomial(&[1]).unwrap();
        assert_eq!(q, p(&[(&[0], 1), (&[1], 1), (&[2], 1)]));
        // not divisible
        assert!(p(&[(&[0], 1)]).div_binomial(&[1]).is_none());
        // mixed-sign direction
        let n2 = p(&[(&[0, 5], 1), (&[6, -1], -1)]);
        let q2 = n2.div_binomial(&[1, -1]).unwrap();
        let recon = q2.mul(&p(&[(&[0, 0], 1), (&[1, -1], -1)]));
        assert_eq!(recon, n2);
    }

    #[test]
    fn div_binomial_squared() {
        let b = p(&[(&[0, 0], 1), (&[2, 1], -1)]);
        let n = b.mul(&b).mul(&p(&[(&[1, 1], 3), (&[0, 4], -2)]));
        let q = n.div_binomial(&[2, 1]).unwrap().div_binomial(&[2, 1]).unwrap();
        assert_eq!(q, p(&[(&[1, 1], 3), (&[0, 4], -2)]));
    }
}
