//! Subgroup tori of the Jacobian of a chain of loops and the translation of
//! Brill-Noether data into affine sublattices of the coefficient space.
//!
//! A coset fixes the reduced component on every loop outside its free set;
//! membership is componentwise residue equality.  Asking which integer
//! combinations `alpha` of a fixed divisor sequence land in a coset yields,
//! generator coordinate by generator coordinate, an integer linear system;
//! its solutions form an affine sublattice of `Z^k`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::chain::{ChainOfLoops, LoopPoint, PfluegerVector};
use crate::error::{Error, Result};
use crate::lattice::{AffineSublattice, Sublattice};
use crate::matrix::IntMatrix;
use crate::rational::{common_denominator, Rational};
use crate::smith::snf;

/// A coset of a subgroup torus: free loops plus the fixed reduced component
/// on every other loop.  With every fixed component at the loop's special
/// point this is the subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupTorusCoset {
    free: BTreeSet<usize>,
    fixed: BTreeMap<usize, LoopPoint>,
}

impl SubgroupTorusCoset {
    pub fn new(
        chain: &ChainOfLoops,
        free: BTreeSet<usize>,
        fixed: BTreeMap<usize, LoopPoint>,
    ) -> Result<Self> {
        let g = chain.genus();
        for &j in &free {
            if j >= g {
                return Err(Error::validation("free loop index out of range"));
            }
        }
        for (&j, p) in &fixed {
            if j >= g || p.loop_idx() != j {
                return Err(Error::validation("fixed component on the wrong loop"));
            }
        }
        for j in 0..g {
            match (free.contains(&j), fixed.contains_key(&j)) {
                (true, false) | (false, true) => {}
                _ => {
                    return Err(Error::validation(
                        "every loop must be exactly one of free or fixed",
                    ))
                }
            }
        }
        Ok(SubgroupTorusCoset { free, fixed })
    }

    /// The full Jacobian: every loop free.
    pub fn full(chain: &ChainOfLoops) -> Self {
        SubgroupTorusCoset {
            free: (0..chain.genus()).collect(),
            fixed: BTreeMap::new(),
        }
    }

    /// Standard-torus data: the fixed points are taken literally as the
    /// fixed reduced components of the coset.
    pub fn from_standard_torus(
        chain: &ChainOfLoops,
        fixed_points: BTreeMap<usize, LoopPoint>,
    ) -> Result<Self> {
        let free = (0..chain.genus())
            .filter(|j| !fixed_points.contains_key(j))
            .collect();
        Self::new(chain, free, fixed_points)
    }

    pub fn free(&self) -> &BTreeSet<usize> {
        &self.free
    }

    pub fn fixed(&self) -> &BTreeMap<usize, LoopPoint> {
        &self.fixed
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Componentwise membership test for a reduced class.
    pub fn contains(&self, class: &PfluegerVector) -> bool {
        self.fixed
            .iter()
            .all(|(&j, beta)| class.component(j) == beta)
    }
}

/// A declared decomposition of one Brill-Noether locus into torus cosets.
#[derive(Debug, Clone)]
pub struct BNLocusDecomposition {
    pub r: i64,
    pub d: i64,
    pub cosets: Vec<SubgroupTorusCoset>,
}

/// One kept coset of a Lang-style decomposition: a witness integer vector
/// whose class lies in the coset, plus the coset itself.
#[derive(Debug, Clone)]
pub struct LangDecomposition {
    pub kept: Vec<(Vec<BigInt>, SubgroupTorusCoset)>,
}

/// The set of integer vectors `alpha` whose divisor combination lands in
/// the coset, cut by the optional weighted-degree constraint: each fixed
/// loop contributes the congruence
/// `sum_i alpha_i tau_{i,j} + j (sum_i alpha_i) arc_j  =  beta_j + j arc_j
/// (mod len_j)`, expanded over the symbolic generator coordinates into an
/// integer linear system with one slack unknown per fixed loop.
pub fn affine_lattice_from_coset(
    chain: &ChainOfLoops,
    tau: &[PfluegerVector],
    degrees: &[i64],
    coset: &SubgroupTorusCoset,
    degree: Option<i64>,
) -> Option<AffineSublattice> {
    let k = tau.len();
    assert_eq!(degrees.len(), k);
    let width = chain.symbol_width();
    let fixed: Vec<usize> = coset.fixed.keys().copied().collect();
    let slots = k + fixed.len();

    // rational rows (alpha coefficients | slack coefficients) = rhs
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    if let Some(d) = degree {
        let mut row = vec![Rational::zero(); slots];
        for i in 0..k {
            row[i] = Rational::from_integer(BigInt::from(degrees[i]));
        }
        rows.push(row);
        rhs.push(Rational::from_integer(BigInt::from(d)));
    }
    for (slack, &j) in fixed.iter().enumerate() {
        let beta = &coset.fixed[&j];
        let jj = BigInt::from(j as i64);
        let arc = chain.arc(j);
        let len = chain.loop_len(j);
        for c in 0..width {
            let mut row = vec![Rational::zero(); slots];
            let mut nonzero = false;
            for i in 0..k {
                let coef = tau[i].component(j).residue().coeff(c)
                    + arc.coeff(c) * Rational::from_integer(jj.clone());
                if !coef.is_zero() {
                    nonzero = true;
                }
                row[i] = coef;
            }
            let slack_coef = -len.coeff(c);
            if !slack_coef.is_zero() {
                nonzero = true;
            }
            row[k + slack] = slack_coef;
            let target = beta.residue().coeff(c) + arc.coeff(c) * Rational::from_integer(jj.clone());
            if !nonzero && target.is_zero() {
                continue;
            }
            rows.push(row);
            rhs.push(target);
        }
    }
    if rows.is_empty() {
        // no constraints at all: everything
        return Some(AffineSublattice::new(
            vec![BigInt::zero(); k],
            Sublattice::full(k),
        ));
    }

    // clear denominators row by row
    let mut int_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut int_rhs: Vec<BigInt> = Vec::new();
    for (row, t) in rows.iter().zip(&rhs) {
        let mut all = row.clone();
        all.push(t.clone());
        let den = common_denominator(&all);
        let den_r = Rational::from_integer(den);
        int_rows.push(row.iter().map(|x| (x * &den_r).to_integer()).collect());
        int_rhs.push((t * &den_r).to_integer());
    }
    let m = IntMatrix::from_rows(int_rows);
    let dec = snf(&m);
    let solution = dec.solve(&int_rhs)?;
    let kernel = dec.kernel();
    let offset: Vec<BigInt> = solution[..k].to_vec();
    let gens: Vec<Vec<BigInt>> = kernel.iter().map(|v| v[..k].to_vec()).collect();
    Some(AffineSublattice::new(
        offset,
        Sublattice::from_generators(k, gens),
    ))
}

/// Keep the cosets of a declared decomposition that actually meet the image
/// of the divisor-combination map, recording a witness preimage for each.
pub fn lang_decompose(
    chain: &ChainOfLoops,
    w: &BNLocusDecomposition,
    tau: &[PfluegerVector],
    degrees: &[i64],
) -> LangDecomposition {
    let mut kept = Vec::new();
    for coset in &w.cosets {
        if let Some(lat) = affine_lattice_from_coset(chain, tau, degrees, coset, None) {
            kept.push((lat.offset().to_vec(), coset.clone()));
        }
    }
    LangDecomposition { kept }
}

/// Structural validation of a loci map: every `(r, d)` with
/// `0 <= r <= d <= 2g - 2` must be declared (an empty coset list declares an
/// empty locus).
pub fn validate_loci_cover(
    chain: &ChainOfLoops,
    loci: &BTreeMap<(i64, i64), BNLocusDecomposition>,
) -> Result<()> {
    let g = chain.genus() as i64;
    for d in 0..=(2 * g - 2).max(-1) {
        for r in 0..=d {
            if !loci.contains_key(&(r, d)) {
                return Err(Error::MissingLocus { r, d });
            }
        }
    }
    Ok(())
}

/// Unused-parameter-free helper for the subgroup itself.
pub fn subgroup_torus(chain: &ChainOfLoops, free: BTreeSet<usize>) -> SubgroupTorusCoset {
    let fixed = (0..chain.genus())
        .filter(|j| !free.contains(j))
        .map(|j| (j, chain.special_point(j)))
        .collect();
    SubgroupTorusCoset::new(chain, free, fixed).expect("subgroup coset is valid")
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use super::*;
    use crate::chain::{class_combine, generic_chain, pflueger_reduce};
    use crate::rational::rat_from_int;
    use crate::symbolic::SymbolicLength;

    #[test]
    fn membership_examples() {
        let chain = generic_chain(3);
        // the full Jacobian contains everything
        let full = SubgroupTorusCoset::full(&chain);
        assert!(full.contains(&PfluegerVector::identity(&chain)));
        // a singleton coset contains exactly its point
        let fixed: BTreeMap<usize, LoopPoint> =
            (0..3).map(|j| (j, chain.special_point(j))).collect();
        let singleton = SubgroupTorusCoset::new(&chain, BTreeSet::new(), fixed).unwrap();
        assert!(singleton.contains(&PfluegerVector::identity(&chain)));
        let width = chain.symbol_width();
        let other = PfluegerVector::new(
            (0..3)
                .map(|j| {
                    chain
                        .point(j, SymbolicLength::rational(width, rat_from_int(1)))
                        .unwrap()
                })
                .collect(),
        );
        assert!(!singleton.contains(&other));
    }

    #[test]
    fn subgroup_laws_via_combine() {
        // closure and inverses of the subgroup with free set {0, 2}
        let chain = generic_chain(3);
        let width = chain.symbol_width();
        let free: BTreeSet<usize> = [0usize, 2].into_iter().collect();
        let torus = subgroup_torus(&chain, free.clone());
        let member = |a: i64, c: i64| {
            let mut comps = Vec::new();
            for j in 0..3 {
                if free.contains(&j) {
                    let r = SymbolicLength::rational(width, rat_from_int(if j == 0 { a } else { c }));
                    comps.push(chain.point(j, r).unwrap());
                } else {
                    comps.push(chain.special_point(j));
                }
            }
            PfluegerVector::new(comps)
        };
        let x = member(2, 5);
        let y = member(-1, 7);
        let sum = class_combine(&chain, &[x.clone(), y.clone()], &[BigInt::one(), BigInt::one()]);
        assert!(torus.contains(&sum));
        let inv = class_combine(&chain, &[x], &[BigInt::from(-1)]);
        assert!(torus.contains(&inv));
    }

    #[test]
    fn affine_lattice_whole_hyperplane_for_full_jacobian() {
        let chain = generic_chain(2);
        let tau = vec![
            PfluegerVector::identity(&chain),
            PfluegerVector::identity(&chain),
        ];
        let coset = SubgroupTorusCoset::full(&chain);
        let lat = affine_lattice_from_coset(&chain, &tau, &[1, 2], &coset, Some(4)).unwrap();
        // {alpha : alpha_1 + 2 alpha_2 = 4}
        for (a, b) in [(4i64, 0i64), (2, 1), (0, 2), (-2, 3)] {
            assert!(lat.contains(&[BigInt::from(a), BigInt::from(b)]));
        }
        assert!(!lat.contains(&[BigInt::one(), BigInt::zero()]));
    }

    #[test]
    fn coset_lattice_consistency_with_membership() {
        // brute force: alpha in a box lies in the lattice iff the combined
        // class satisfies the componentwise membership test
        let chain = generic_chain(2);
        let width = chain.symbol_width();
        let d1 = PfluegerVector::new(vec![
            chain.point(0, SymbolicLength::rational(width, rat_from_int(1))).unwrap(),
            chain.point(1, SymbolicLength::rational(width, rat_from_int(2))).unwrap(),
        ]);
        let d2 = PfluegerVector::new(vec![
            chain.point(0, SymbolicLength::rational(width, rat_from_int(-1))).unwrap(),
            chain.point(1, SymbolicLength::rational(width, rat_from_int(1))).unwrap(),
        ]);
        let tau = vec![d1.clone(), d2.clone()];
        let degrees = [1i64, 1];
        // fix loop 0 at residue 0, leave loop 1 free
        let mut fixed = BTreeMap::new();
        fixed.insert(0usize, chain.w_point(0));
        let coset =
            SubgroupTorusCoset::new(&chain, [1usize].into_iter().collect(), fixed).unwrap();
        let lat = affine_lattice_from_coset(&chain, &tau, &degrees, &coset, None);
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let alpha = vec![BigInt::from(a), BigInt::from(b)];
                let class = class_combine(&chain, &tau, &alpha);
                let member = coset.contains(&class);
                let in_lat = lat.as_ref().map_or(false, |l| l.contains(&alpha));
                assert_eq!(member, in_lat, "alpha = ({a},{b})");
            }
        }
    }

    #[test]
    fn lang_keeps_reachable_cosets() {
        let chain = generic_chain(2);
        let tau = vec![PfluegerVector::identity(&chain)];
        let degrees = [0i64];
        // the full Jacobian: kept with witness 0
        let w = BNLocusDecomposition {
            r: 0,
            d: 0,
            cosets: vec![SubgroupTorusCoset::full(&chain)],
        };
        let lang = lang_decompose(&chain, &w, &tau, &degrees);
        assert_eq!(lang.kept.len(), 1);
        assert!(lang.kept[0].0.iter().all(|x| x.is_zero()));
        // the identity singleton: also kept with witness 0
        let w2 = BNLocusDecomposition {
            r: 0,
            d: 0,
            cosets: vec![subgroup_torus(&chain, BTreeSet::new())],
        };
        let lang2 = lang_decompose(&chain, &w2, &tau, &degrees);
        assert_eq!(lang2.kept.len(), 1);
        // an unreachable singleton: dropped
        let width = chain.symbol_width();
        let mut off_fixed = BTreeMap::new();
        for j in 0..2 {
            off_fixed.insert(
                j,
                chain
                    .point(j, SymbolicLength::generator(width, 1, rat_from_int(1) / rat_from_int(2)))
                    .unwrap(),
            );
        }
        let w3 = BNLocusDecomposition {
            r: 0,
            d: 0,
            cosets: vec![SubgroupTorusCoset::new(&chain, BTreeSet::new(), off_fixed).unwrap()],
        };
        assert!(lang_decompose(&chain, &w3, &tau, &degrees).kept.is_empty());
    }

    use crate::chain::MetricDivisor;

    #[test]
    fn combine_and_reduce_agree_on_random_symbolic_data() {
        // cross-path consistency on a few deterministic pseudo-random cases
        let chain = generic_chain(3);
        let width = chain.symbol_width();
        let mut seed = 7u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 33) % 7) as i64 - 3
        };
        for _ in 0..25 {
            let vectors: Vec<PfluegerVector> = (0..2)
                .map(|_| {
                    PfluegerVector::new(
                        (0..3)
                            .map(|j| {
                                chain
                                    .point(
                                        j,
                                        SymbolicLength::rational(width, rat_from_int(next())),
                                    )
                                    .unwrap()
                            })
                            .collect(),
                    )
                })
                .collect();
            let alpha = vec![BigInt::from(next()), BigInt::from(next())];
            let fast = class_combine(&chain, &vectors, &alpha);
            let mut divisor = MetricDivisor::zero();
            for (v, a) in vectors.iter().zip(&alpha) {
                divisor = divisor.add(&v.to_divisor(&chain).scale(a));
            }
            let slow = pflueger_reduce(&chain, &divisor).unwrap();
            assert_eq!(fast, slow);
        }
    }
}
