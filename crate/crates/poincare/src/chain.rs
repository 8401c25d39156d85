//! Chains of loops with symbolic edge lengths, and the reduction theory of
//! divisors on them: every divisor class has a unique representative with
//! one point per loop minus a multiple of the marked point, and the loop
//! components obey explicit residue congruences under class arithmetic.
//!
//! Loop `j` (1-based in the notation, 0-based in code) has total length
//! `len_j` and carries two special points: `w_j` at residue zero and `v_j`
//! at residue `arc_j` (the anticlockwise distance from `w_j`).  Bridges join
//! `w_j` to `v_{j+1}` and do not carry length data; the marked base point is
//! `w_g` on the last loop.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::symbolic::SymbolicLength;

#[derive(Debug, Clone)]
pub struct ChainOfLoops {
    genus: usize,
    generators: Vec<String>,
    loop_len: Vec<SymbolicLength>,
    arc: Vec<SymbolicLength>,
}

impl ChainOfLoops {
    pub fn new(
        generators: Vec<String>,
        loop_len: Vec<SymbolicLength>,
        arc: Vec<SymbolicLength>,
    ) -> Result<Self> {
        let genus = loop_len.len();
        if genus == 0 {
            return Err(Error::validation("chain must have at least one loop"));
        }
        if arc.len() != genus {
            return Err(Error::validation("arc count must match loop count"));
        }
        let width = generators.len() + 1;
        for l in loop_len.iter().chain(&arc) {
            if l.width() != width {
                return Err(Error::validation("length vector width mismatch"));
            }
        }
        for (j, l) in loop_len.iter().enumerate() {
            if l.is_zero() {
                return Err(Error::validation(format!("loop {} has zero length", j + 1)));
            }
        }
        Ok(ChainOfLoops {
            genus,
            generators,
            loop_len,
            arc,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn symbol_width(&self) -> usize {
        self.generators.len() + 1
    }

    pub fn loop_len(&self, j: usize) -> &SymbolicLength {
        &self.loop_len[j]
    }

    pub fn arc(&self, j: usize) -> &SymbolicLength {
        &self.arc[j]
    }

    /// True when every length and arc is rational.
    pub fn is_rational(&self) -> bool {
        self.loop_len
            .iter()
            .chain(&self.arc)
            .all(|l| l.is_rational())
    }

    pub fn point(&self, loop_idx: usize, residue: SymbolicLength) -> Result<LoopPoint> {
        if loop_idx >= self.genus {
            return Err(Error::validation(format!(
                "loop index {} out of range",
                loop_idx + 1
            )));
        }
        if residue.width() != self.symbol_width() {
            return Err(Error::validation("residue width mismatch"));
        }
        Ok(LoopPoint {
            loop_idx,
            residue: residue.reduce_mod(&self.loop_len[loop_idx]),
        })
    }

    pub fn marked_point(&self) -> LoopPoint {
        self.point(self.genus - 1, SymbolicLength::zero(self.symbol_width()))
            .expect("marked point is valid")
    }

    pub fn w_point(&self, j: usize) -> LoopPoint {
        self.point(j, SymbolicLength::zero(self.symbol_width()))
            .expect("w point is valid")
    }

    pub fn v_point(&self, j: usize) -> LoopPoint {
        self.point(j, self.arc[j].clone()).expect("v point is valid")
    }

    /// The unique point of loop `j` (0-based) whose class balances `j + 1`
    /// copies of `w` against `j` copies of `v` on that loop: residue
    /// `-(j) * arc_j` in 0-based indexing.
    pub fn special_point(&self, j: usize) -> LoopPoint {
        let coeff = BigInt::from(j as i64);
        let residue = self.arc[j].scale_int(&coeff).neg();
        self.point(j, residue).expect("special point is valid")
    }
}

/// A point on one loop, identified by its anticlockwise residue from the
/// loop's `w` point, canonically reduced modulo the loop length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopPoint {
    loop_idx: usize,
    residue: SymbolicLength,
}

impl LoopPoint {
    pub fn loop_idx(&self) -> usize {
        self.loop_idx
    }

    pub fn residue(&self) -> &SymbolicLength {
        &self.residue
    }
}

/// A divisor supported on loop points (the marked point is the residue-zero
/// point of the last loop).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDivisor {
    coeffs: BTreeMap<LoopPoint, BigInt>,
}

impl MetricDivisor {
    pub fn zero() -> Self {
        MetricDivisor {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add_point(&mut self, p: LoopPoint, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(p).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            let dead: Vec<LoopPoint> = self
                .coeffs
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.coeffs.remove(&k);
            }
        }
    }

    pub fn degree(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn points(&self) -> impl Iterator<Item = (&LoopPoint, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        MetricDivisor {
            coeffs: self
                .coeffs
                .iter()
                .map(|(p, c)| (p.clone(), c * k))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_point(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// Shift by `k` copies of the marked point.
    pub fn with_marked(chain: &ChainOfLoops, points: Vec<(LoopPoint, BigInt)>, marked: BigInt) -> Self {
        let mut d = Self::zero();
        for (p, c) in points {
            d.add_point(p, c);
        }
        d.add_point(chain.marked_point(), marked);
        d
    }
}

/// The unique reduced representative of a degree-zero class: one point per
/// loop, minus `genus` copies of the marked point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfluegerVector {
    components: Vec<LoopPoint>,
}

impl PfluegerVector {
    pub fn new(components: Vec<LoopPoint>) -> Self {
        for (j, p) in components.iter().enumerate() {
            assert_eq!(p.loop_idx(), j, "component on the wrong loop");
        }
        PfluegerVector { components }
    }

    pub fn identity(chain: &ChainOfLoops) -> Self {
        PfluegerVector {
            components: (0..chain.genus()).map(|j| chain.special_point(j)).collect(),
        }
    }

    pub fn components(&self) -> &[LoopPoint] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &LoopPoint {
        &self.components[j]
    }

    /// The divisor `sum (xi_j) - genus * (marked)` this vector represents.
    pub fn to_divisor(&self, chain: &ChainOfLoops) -> MetricDivisor {
        let mut d = MetricDivisor::zero();
        for p in &self.components {
            d.add_point(p.clone(), BigInt::one());
        }
        d.add_point(chain.marked_point(), -BigInt::from(chain.genus() as i64));
        d
    }
}

/// The unique point `p` on loop `j` with `E - (p)` principal on that loop,
/// for a degree-one divisor `E` supported there: the residue of `p` is the
/// coefficient-weighted residue sum of `E`.
pub fn loop_reduce_degree_one(
    chain: &ChainOfLoops,
    j: usize,
    terms: &[(SymbolicLength, BigInt)],
) -> Result<LoopPoint> {
    let total: BigInt = terms.iter().map(|(_, c)| c.clone()).sum();
    if !total.is_one() {
        return Err(Error::validation("loop reduction needs a degree-one divisor"));
    }
    let mut residue = SymbolicLength::zero(chain.symbol_width());
    for (r, c) in terms {
        residue = residue.add(&r.scale_int(c));
    }
    chain.point(j, residue)
}

/// Reduce a degree-zero divisor to its unique one-point-per-loop
/// representative, sweeping left to right: each loop is brought to degree
/// one by moving surplus across the bridge to the next loop.
pub fn pflueger_reduce(chain: &ChainOfLoops, d: &MetricDivisor) -> Result<PfluegerVector> {
    if !d.degree().is_zero() {
        return Err(Error::validation(
            "reduction expects a degree-zero divisor (subtract deg * marked first)",
        ));
    }
    let g = chain.genus();
    let mut per_loop: Vec<Vec<(SymbolicLength, BigInt)>> = vec![vec![]; g];
    for (p, c) in d.points() {
        per_loop[p.loop_idx()].push((p.residue().clone(), c.clone()));
    }
    let mut components = Vec::with_capacity(g);
    let mut push = BigInt::zero(); // coefficient arriving at v_{j} from the left
    for j in 0..g {
        let mut terms = per_loop[j].clone();
        if !push.is_zero() {
            terms.push((chain.arc(j).clone(), push.clone()));
        }
        let deg: BigInt = terms.iter().map(|(_, c)| c.clone()).sum();
        if j + 1 < g {
            // add (1 - deg) copies of w_j here, pushing (deg - 1) to v_{j+1}
            let adjust = BigInt::one() - &deg;
            if !adjust.is_zero() {
                terms.push((SymbolicLength::zero(chain.symbol_width()), adjust.clone()));
            }
            push = -adjust;
        } else {
            // last loop: absorb genus copies of the marked point
            terms.push((
                SymbolicLength::zero(chain.symbol_width()),
                BigInt::from(g as i64),
            ));
        }
        components.push(loop_reduce_degree_one(chain, j, &terms)?);
    }
    Ok(PfluegerVector::new(components))
}

/// Components of the class `sum alpha_i * [R_i]` directly from the residue
/// congruence, with no divisor-level sweep: component `j` has residue
/// `sum alpha_i tau_{i,j} + j (sum alpha_i - 1) arc_j` (0-based `j`).
pub fn class_combine(
    chain: &ChainOfLoops,
    reduced: &[PfluegerVector],
    alpha: &[BigInt],
) -> PfluegerVector {
    assert_eq!(reduced.len(), alpha.len());
    let g = chain.genus();
    let alpha_sum: BigInt = alpha.iter().sum();
    let mut components = Vec::with_capacity(g);
    for j in 0..g {
        let mut residue = SymbolicLength::zero(chain.symbol_width());
        for (r, a) in reduced.iter().zip(alpha) {
            residue = residue.add(&r.component(j).residue().scale_int(a));
        }
        let skew = BigInt::from(j as i64) * (&alpha_sum - BigInt::one());
        residue = residue.add(&chain.arc(j).scale_int(&skew));
        components.push(chain.point(j, residue).expect("valid component"));
    }
    PfluegerVector::new(components)
}

/// Convenience: generic-looking genus-`g` chain with one fresh irrational
/// generator per loop length and per arc.  Used by tests.
pub fn generic_chain(genus: usize) -> ChainOfLoops {
    let mut generators = Vec::new();
    for j in 0..genus {
        generators.push(format!("len{}", j + 1));
        generators.push(format!("arc{}", j + 1));
    }
    let width = generators.len() + 1;
    let mut loop_len = Vec::new();
    let mut arc = Vec::new();
    for j in 0..genus {
        loop_len.push(SymbolicLength::generator(width, 1 + 2 * j, Rational::one()));
        arc.push(SymbolicLength::generator(width, 2 + 2 * j, Rational::one()));
    }
    ChainOfLoops::new(generators, loop_len, arc).expect("generic chain is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_from_int;

    #[test]
    fn special_points() {
        let chain = generic_chain(3);
        // first loop: the special point is w_1 itself
        assert_eq!(chain.special_point(0), chain.w_point(0));
        // second loop: residue -arc_2
        let o2 = chain.special_point(1);
        assert!(o2
            .residue()
            .congruent(&chain.arc(1).neg(), chain.loop_len(1)));
        // degenerate loop with arc 0: special point is w
        let width = 2;
        let chain0 = ChainOfLoops::new(
            vec!["l".into()],
            vec![
                SymbolicLength::generator(width, 1, Rational::one()),
                SymbolicLength::generator(width, 1, Rational::one()),
            ],
            vec![SymbolicLength::zero(width), SymbolicLength::zero(width)],
        )
        .unwrap();
        assert_eq!(chain0.special_point(1), chain0.w_point(1));
    }

    #[test]
    fn loop_reduction_identity_and_weighted() {
        let chain = generic_chain(2);
        let p = chain.v_point(0);
        let r = loop_reduce_degree_one(&chain, 0, &[(p.residue().clone(), BigInt::one())]);
        assert_eq!(r.unwrap(), p);
    }

    #[test]
    fn rational_loop_reduction_cross_check() {
        // loop of length 1 with <a> = 1/3, <b> = 1/2: 2(a) - (b) reduces to 1/6
        let chain = ChainOfLoops::new(
            vec![],
            vec![SymbolicLength::rational(1, rat_from_int(1))],
            vec![SymbolicLength::rational(1, rat_from_int(0))],
        )
        .unwrap();
        let a = Rational::new(BigInt::one(), BigInt::from(3));
        let b = Rational::new(BigInt::one(), BigInt::from(2));
        let r = loop_reduce_degree_one(
            &chain,
            0,
            &[
                (SymbolicLength::rational(1, a), BigInt::from(2)),
                (SymbolicLength::rational(1, b), BigInt::from(-1)),
            ],
        )
        .unwrap();
        assert_eq!(
            r.residue(),
            &SymbolicLength::rational(1, Rational::new(BigInt::one(), BigInt::from(6)))
        );
    }

    #[test]
    fn reduce_zero_divisor_gives_identity() {
        let chain = generic_chain(3);
        let v = pflueger_reduce(&chain, &MetricDivisor::zero()).unwrap();
        assert_eq!(v, PfluegerVector::identity(&chain));
    }

    #[test]
    fn reduce_is_identity_on_reduced_form() {
        let chain = generic_chain(3);
        let width = chain.symbol_width();
        let xi: Vec<LoopPoint> = (0..3)
            .map(|j| {
                chain
                    .point(j, SymbolicLength::rational(width, rat_from_int(j as i64 + 1)))
                    .unwrap()
            })
            .collect();
        let vector = PfluegerVector::new(xi);
        let d = vector.to_divisor(&chain);
        assert_eq!(pflueger_reduce(&chain, &d).unwrap(), vector);
    }

    #[test]
    fn combine_matches_divisor_arithmetic() {
        let chain = generic_chain(3);
        let width = chain.symbol_width();
        let mk = |vals: [i64; 3]| {
            PfluegerVector::new(
                (0..3)
                    .map(|j| {
                        chain
                            .point(j, SymbolicLength::rational(width, rat_from_int(vals[j])))
                            .unwrap()
                    })
                    .collect(),
            )
        };
        let r1 = mk([1, 2, 3]);
        let r2 = mk([5, 1, 4]);
        for alpha in [[1i64, 0], [0, 1], [0, 0], [2, -1], [-3, 2], [1, 1]] {
            let a: Vec<BigInt> = alpha.iter().map(|&x| BigInt::from(x)).collect();
            let fast = class_combine(&chain, &[r1.clone(), r2.clone()], &a);
            let divisor = r1
                .to_divisor(&chain)
                .scale(&a[0])
                .add(&r2.to_divisor(&chain).scale(&a[1]));
            let slow = pflueger_reduce(&chain, &divisor).unwrap();
            assert_eq!(fast, slow, "alpha = {alpha:?}");
        }
    }

    #[test]
    fn combine_identity_cases() {
        let chain = generic_chain(2);
        let r = PfluegerVector::identity(&chain);
        // alpha = e_1 returns the input
        assert_eq!(
            class_combine(&chain, &[r.clone()], &[BigInt::one()]),
            r
        );
        // alpha = 0 gives the identity class
        assert_eq!(
            class_combine(&chain, &[r.clone()], &[BigInt::zero()]),
            PfluegerVector::identity(&chain)
        );
    }
}
