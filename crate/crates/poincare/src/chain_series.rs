//! Divisor ranks on a chain of loops from declared Brill-Noether data, an
//! independent rank oracle via graph subdivision for all-rational chains,
//! and the assembly of the chain Poincare series.
//!
//! The series splits by weighted degree: below `2g - 1` each `(r, d)` slice
//! contributes the orthant generating function of a finite union of affine
//! sublattices (one per reachable torus coset, combined by
//! inclusion-exclusion); everything above is the Riemann-Roch tail.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::chain::{pflueger_reduce, ChainOfLoops, MetricDivisor, PfluegerVector};
use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::graph::{GraphRankOracle, MultiGraph};
use crate::lattice::{intersect_affine, AffineSublattice};
use crate::orthant::orthant_affine_genfun;
use crate::rational::Rational;
use crate::tail::tail_term;
use crate::torus::{
    affine_lattice_from_coset, validate_loci_cover, BNLocusDecomposition, SubgroupTorusCoset,
};

pub type LociMap = BTreeMap<(i64, i64), BNLocusDecomposition>;

/// A divisor sequence on a chain together with the reduced forms of the
/// degree-shifted divisors, ready for membership and lattice computations.
pub struct ChainSeriesData {
    pub chain: ChainOfLoops,
    pub divisors: Vec<MetricDivisor>,
    pub degrees: Vec<i64>,
    pub tau: Vec<PfluegerVector>,
}

impl ChainSeriesData {
    pub fn new(chain: ChainOfLoops, divisors: Vec<MetricDivisor>) -> Result<Self> {
        if divisors.is_empty() {
            return Err(Error::validation("at least one divisor is required"));
        }
        let mut degrees = Vec::with_capacity(divisors.len());
        let mut tau = Vec::with_capacity(divisors.len());
        for d in &divisors {
            let deg: i64 = (&d.degree())
                .try_into()
                .map_err(|_| Error::validation("divisor degree exceeds machine range"))?;
            degrees.push(deg);
            let mut shifted = d.clone();
            shifted.add_point(chain.marked_point(), BigInt::from(-deg));
            tau.push(pflueger_reduce(&chain, &shifted)?);
        }
        Ok(ChainSeriesData {
            chain,
            divisors,
            degrees,
            tau,
        })
    }

    pub fn combination(&self, alpha: &[BigInt]) -> MetricDivisor {
        let mut d = MetricDivisor::zero();
        for (div, a) in self.divisors.iter().zip(alpha) {
            d = d.add(&div.scale(a));
        }
        d
    }
}

/// Rank of a divisor on the chain: negative degree gives -1, degree above
/// `2g - 2` is Riemann-Roch, and in between the reduced class is looked up
/// in the declared Brill-Noether loci.
pub fn rank_chain(
    chain: &ChainOfLoops,
    d: &MetricDivisor,
    loci: &LociMap,
) -> Result<i64> {
    let deg_big = d.degree();
    if deg_big.is_negative() {
        return Ok(-1);
    }
    let g = chain.genus() as i64;
    let deg: i64 = (&deg_big)
        .try_into()
        .map_err(|_| Error::validation("divisor degree exceeds machine range"))?;
    if deg > 2 * g - 2 {
        return Ok(deg - g);
    }
    let mut shifted = d.clone();
    shifted.add_point(chain.marked_point(), BigInt::from(-deg));
    let reduced = pflueger_reduce(chain, &shifted)?;
    for r in (0..=deg).rev() {
        let w = loci
            .get(&(r, deg))
            .ok_or(Error::MissingLocus { r, d: deg })?;
        if w.cosets.iter().any(|c| c.contains(&reduced)) {
            return Ok(r);
        }
    }
    Ok(-1)
}

/// Independent rank oracle for all-rational chains: scale lengths to
/// integers, build the unit-length subdivision model with the divisor on
/// vertices, and take the graph rank there.
pub fn subdivision_rank_oracle(chain: &ChainOfLoops, d: &MetricDivisor) -> Result<i64> {
    if !chain.is_rational() {
        return Err(Error::unsupported(
            "subdivision oracle requires an all-rational chain",
        ));
    }
    for (p, _) in d.points() {
        if !p.residue().is_rational() {
            return Err(Error::unsupported(
                "subdivision oracle requires rational point residues",
            ));
        }
    }
    let g = chain.genus();
    // common scale: all loop lengths, arcs and residues become integers
    let mut values: Vec<Rational> = Vec::new();
    for j in 0..g {
        values.push(chain.loop_len(j).coeff(0).clone());
        values.push(chain.arc(j).coeff(0).clone());
    }
    for (p, _) in d.points() {
        values.push(p.residue().coeff(0).clone());
    }
    let mut scale = crate::rational::common_denominator(&values);
    // every loop needs at least two vertices to avoid a self-loop model
    loop {
        let ok = (0..g).all(|j| {
            let n = chain.loop_len(j).coeff(0) * Rational::from_integer(scale.clone());
            n.to_integer() >= BigInt::from(2)
        });
        if ok {
            break;
        }
        scale *= 2;
    }

    let scale_r = Rational::from_integer(scale.clone());
    let mut sizes = Vec::with_capacity(g);
    let mut offsets = Vec::with_capacity(g);
    let mut total = 0i64;
    for j in 0..g {
        let n: i64 = (&(chain.loop_len(j).coeff(0) * &scale_r).to_integer())
            .try_into()
            .map_err(|_| Error::validation("subdivision size exceeds machine range"))?;
        sizes.push(n);
        offsets.push(total);
        total += n;
    }
    let vertex_of = |j: usize, residue: &Rational| -> usize {
        let pos = (residue * &scale_r).to_integer().mod_floor(&BigInt::from(sizes[j]));
        let pos: i64 = (&pos).try_into().expect("position in range");
        (offsets[j] + pos) as usize
    };
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for j in 0..g {
        for i in 0..sizes[j] {
            let a = (offsets[j] + i) as usize;
            let b = (offsets[j] + (i + 1) % sizes[j]) as usize;
            edges.push((a.min(b), a.max(b), 1));
        }
        if j + 1 < g {
            // bridge from w_j (residue 0) to v_{j+1}
            let w = vertex_of(j, &Rational::zero());
            let v = vertex_of(j + 1, chain.arc(j + 1).coeff(0));
            edges.push((w, v, 1));
        }
    }
    // merge duplicate cycle edges (a two-vertex loop doubles its edge)
    let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (a, b, m) in edges {
        *merged.entry((a, b)).or_insert(0) += m;
    }
    let edge_list: Vec<(usize, usize, u64)> =
        merged.into_iter().map(|((a, b), m)| (a, b, m)).collect();
    let graph = MultiGraph::new(total as usize, &edge_list)?;
    let mut divisor = vec![BigInt::zero(); total as usize];
    for (p, c) in d.points() {
        divisor[vertex_of(p.loop_idx(), p.residue().coeff(0))] += c;
    }
    let oracle = GraphRankOracle::new(graph);
    Ok(oracle.rank(&divisor))
}

/// The `(r, d)` slice of the series: the orthant generating function of the
/// union of the coset lattices in weighted degree `d`, by inclusion-
/// exclusion over non-empty intersections.
pub fn poincare_chain_slice(
    data: &ChainSeriesData,
    w: &BNLocusDecomposition,
) -> Result<RationalGF> {
    let k = data.divisors.len();
    let lattices: Vec<AffineSublattice> = w
        .cosets
        .iter()
        .filter_map(|c| {
            affine_lattice_from_coset(&data.chain, &data.tau, &data.degrees, c, Some(w.d))
        })
        .collect();
    union_orthant_genfun(k, &lattices)
}

/// Inclusion-exclusion over the non-empty intersections of a finite family
/// of affine sublattices.  Subsets with an empty pairwise intersection are
/// pruned early.
fn union_orthant_genfun(k: usize, lattices: &[AffineSublattice]) -> Result<RationalGF> {
    let m = lattices.len();
    let mut total = RationalGF::zero(k);
    if m == 0 {
        return Ok(total);
    }
    // pairwise intersection table for pruning
    let mut pair_empty = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let empty = intersect_affine(&lattices[i], &lattices[j]).is_none();
            pair_empty[i][j] = empty;
            pair_empty[j][i] = empty;
        }
    }
    'subset: for mask in 1u64..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if pair_empty[members[a]][members[b]] {
                    continue 'subset;
                }
            }
        }
        let mut inter = lattices[members[0]].clone();
        let mut alive = true;
        for &i in &members[1..] {
            match intersect_affine(&inter, &lattices[i]) {
                Some(next) => inter = next,
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if !alive {
            continue;
        }
        let gf = orthant_affine_genfun(&inter)?;
        total = if members.len() % 2 == 1 {
            total.add(&gf)
        } else {
            total.sub(&gf)
        };
    }
    Ok(total)
}

/// The full chain Poincare series: every `(r, d)` slice for
/// `0 <= r <= d <= 2g - 2` plus the Riemann-Roch tail, normalized.
pub fn poincare_chain(
    chain: &ChainOfLoops,
    divisors: &[MetricDivisor],
    loci: &LociMap,
) -> Result<RationalGF> {
    validate_loci_cover(chain, loci)?;
    let data = ChainSeriesData::new(chain.clone(), divisors.to_vec())?;
    let g = chain.genus() as i64;
    let mut total = tail_term(&data.degrees, g)?;
    for d in 0..=(2 * g - 2).max(-1) {
        for r in 0..=d {
            let w = loci.get(&(r, d)).ok_or(Error::MissingLocus { r, d })?;
            total = total.add(&poincare_chain_slice(&data, w)?);
        }
    }
    Ok(total.normalize())
}

/// Declared-loci validation, part two: on an all-rational chain, check coset
/// membership against the subdivision oracle on sampled classes.  For each
/// coset of each locus, a few classes inside it must have rank at least `r`,
/// and sampled classes outside every coset of the locus must have rank
/// strictly below `r`.
pub fn validate_loci_against_oracle(
    chain: &ChainOfLoops,
    loci: &LociMap,
    grid: &[Rational],
) -> Result<()> {
    if !chain.is_rational() {
        return Err(Error::unsupported("pointwise validation needs a rational chain"));
    }
    let width = chain.symbol_width();
    for w in loci.values() {
        for coset in &w.cosets {
            for sample in sample_classes(chain, coset, grid, width)? {
                let mut divisor = sample.to_divisor(chain);
                divisor.add_point(chain.marked_point(), BigInt::from(w.d));
                let rank = subdivision_rank_oracle(chain, &divisor)?;
                if rank < w.r {
                    return Err(Error::validation(format!(
                        "declared locus (r={}, d={}) contains a class of rank {}",
                        w.r, w.d, rank
                    )));
                }
            }
        }
        // classes on the grid missed by every coset must fall below rank r
        for sample in grid_classes(chain, grid, width)? {
            if w.cosets.iter().any(|c| c.contains(&sample)) {
                continue;
            }
            let mut divisor = sample.to_divisor(chain);
            divisor.add_point(chain.marked_point(), BigInt::from(w.d));
            let rank = subdivision_rank_oracle(chain, &divisor)?;
            if rank >= w.r {
                return Err(Error::validation(format!(
                    "declared locus (r={}, d={}) misses a class of rank {}",
                    w.r, w.d, rank
                )));
            }
        }
    }
    Ok(())
}

/// Classes inside a coset: fixed components as declared, free components
/// swept over the grid.
fn sample_classes(
    chain: &ChainOfLoops,
    coset: &SubgroupTorusCoset,
    grid: &[Rational],
    width: usize,
) -> Result<Vec<PfluegerVector>> {
    let g = chain.genus();
    let free: Vec<usize> = coset.free().iter().copied().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; free.len()];
    loop {
        let mut comps = Vec::with_capacity(g);
        for j in 0..g {
            if let Some(p) = coset.fixed().get(&j) {
                comps.push(p.clone());
            } else {
                let slot = free.iter().position(|&f| f == j).unwrap();
                let residue =
                    crate::symbolic::SymbolicLength::rational(width, grid[idx[slot]].clone());
                comps.push(chain.point(j, residue)?);
            }
        }
        out.push(PfluegerVector::new(comps));
        // odometer over the free components
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < grid.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// All classes with every component on the grid.
fn grid_classes(
    chain: &ChainOfLoops,
    grid: &[Rational],
    width: usize,
) -> Result<Vec<PfluegerVector>> {
    let g = chain.genus();
    let mut out = Vec::new();
    let mut idx = vec![0usize; g];
    loop {
        let mut comps = Vec::with_capacity(g);
        for j in 0..g {
            let residue = crate::symbolic::SymbolicLength::rational(width, grid[idx[j]].clone());
            comps.push(chain.point(j, residue)?);
        }
        out.push(PfluegerVector::new(comps));
        let mut i = 0;
        loop {
            if i == g {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < grid.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// The standard Brill-Noether loci that every chain shares in low degree:
/// the image of the degree-`d` symmetric power for `d < g` (free sets of
/// size `d`, the other components at explicitly computable points), the full
/// Jacobian for `g <= d <= 2g - 2` at `r = 0`, plus designated-rank loci
/// where Riemann-Roch forces them.  Only used to build test data; the
/// general pipeline consumes declared loci.
pub fn effective_locus_cosets(chain: &ChainOfLoops, d: i64) -> Vec<SubgroupTorusCoset> {
    let g = chain.genus() as i64;
    if d < 0 {
        return vec![];
    }
    if d >= g {
        return vec![SubgroupTorusCoset::full(chain)];
    }
    // free sets of size d; the component on a fixed loop m is pinned at
    // residue (|S < m| - m) * arc_m (0-based m)
    let gu = chain.genus();
    let mut out = Vec::new();
    for mask in 0u64..(1 << gu) {
        if mask.count_ones() as i64 != d {
            continue;
        }
        let free: std::collections::BTreeSet<usize> =
            (0..gu).filter(|&j| mask & (1 << j) != 0).collect();
        let mut fixed = BTreeMap::new();
        for m in 0..gu {
            if free.contains(&m) {
                continue;
            }
            let before = free.iter().filter(|&&j| j < m).count() as i64;
            let coeff = BigInt::from(before - m as i64);
            let residue = chain.arc(m).scale_int(&coeff);
            fixed.insert(m, chain.point(m, residue).expect("valid fixed point"));
        }
        out.push(SubgroupTorusCoset::new(chain, free, fixed).expect("valid coset"));
    }
    out
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use super::*;
    use crate::chain::generic_chain;
    use crate::rational::rat_from_int;
    use crate::symbolic::SymbolicLength;

    fn rational_chain(lens: &[(i64, i64)], arcs: &[(i64, i64)]) -> ChainOfLoops {
        let width = 1;
        let loop_len = lens
            .iter()
            .map(|&(p, q)| SymbolicLength::rational(width, Rational::new(p.into(), q.into())))
            .collect();
        let arc = arcs
            .iter()
            .map(|&(p, q)| SymbolicLength::rational(width, Rational::new(p.into(), q.into())))
            .collect();
        ChainOfLoops::new(vec![], loop_len, arc).unwrap()
    }

    #[test]
    fn oracle_single_loop_examples() {
        // single loop of length 1, divisor (p) with <p> = 1/2: rank 0
        let chain = rational_chain(&[(1, 1)], &[(0, 1)]);
        let p = chain
            .point(0, SymbolicLength::rational(1, Rational::new(1.into(), 2.into())))
            .unwrap();
        let mut d = MetricDivisor::zero();
        d.add_point(p, BigInt::one());
        assert_eq!(subdivision_rank_oracle(&chain, &d).unwrap(), 0);
        // negative degree
        let mut neg = MetricDivisor::zero();
        neg.add_point(chain.marked_point(), BigInt::from(-1));
        assert_eq!(subdivision_rank_oracle(&chain, &neg).unwrap(), -1);
        // degree 2 on a genus-1 curve: rank 1
        let mut two = MetricDivisor::zero();
        two.add_point(chain.marked_point(), BigInt::from(2));
        assert_eq!(subdivision_rank_oracle(&chain, &two).unwrap(), 1);
    }

    #[test]
    fn oracle_rejects_symbolic() {
        let chain = generic_chain(2);
        let d = MetricDivisor::zero();
        assert!(subdivision_rank_oracle(&chain, &d).is_err());
    }

    /// Loci for a genus-2 chain: effective loci in degrees 0..2 plus the
    /// canonical singleton at (1, 2).
    fn genus2_loci(chain: &ChainOfLoops) -> LociMap {
        let mut loci = LociMap::new();
        for d in 0..=2i64 {
            for r in 0..=d {
                loci.insert(
                    (r, d),
                    BNLocusDecomposition {
                        r,
                        d,
                        cosets: vec![],
                    },
                );
            }
        }
        for d in 0..=2i64 {
            loci.get_mut(&(0, d)).unwrap().cosets = effective_locus_cosets(chain, d);
        }
        // W^1_2 = the canonical class alone: components (w_1, v_2)
        let mut fixed = BTreeMap::new();
        fixed.insert(0usize, chain.w_point(0));
        fixed.insert(1usize, chain.v_point(1));
        loci.get_mut(&(1, 2)).unwrap().cosets = vec![SubgroupTorusCoset::new(
            chain,
            std::collections::BTreeSet::new(),
            fixed,
        )
        .unwrap()];
        loci
    }

    #[test]
    fn rank_chain_matches_oracle_on_rational_genus2() {
        let chain = rational_chain(&[(1, 1), (3, 2)], &[(1, 2), (1, 2)]);
        let loci = genus2_loci(&chain);
        let grid = [
            Rational::zero(),
            Rational::new(1.into(), 2.into()),
            Rational::one(),
        ];
        validate_loci_against_oracle(&chain, &loci, &grid).unwrap();
        // exhaustive over grid-supported divisors of degree <= 2
        let width = chain.symbol_width();
        let mut points = Vec::new();
        for j in 0..2usize {
            for r in &grid {
                points.push(
                    chain
                        .point(j, SymbolicLength::rational(width, r.clone()))
                        .unwrap(),
                );
            }
        }
        let mut checked = 0;
        for i in 0..points.len() {
            for jj in i..points.len() {
                for shift in -2i64..=1 {
                    let mut d = MetricDivisor::zero();
                    d.add_point(points[i].clone(), BigInt::one());
                    d.add_point(points[jj].clone(), BigInt::one());
                    d.add_point(chain.marked_point(), BigInt::from(shift));
                    if d.degree() > BigInt::from(2) {
                        continue;
                    }
                    let fast = rank_chain(&chain, &d, &loci).unwrap();
                    let slow = subdivision_rank_oracle(&chain, &d).unwrap();
                    assert_eq!(fast, slow, "divisor {d:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn genus1_series_single_marked_divisor() {
        // one loop, D = (w_1), degree 1: series 1 + z/(1-z)^2
        let chain = rational_chain(&[(1, 1)], &[(0, 1)]);
        let mut d = MetricDivisor::zero();
        d.add_point(chain.marked_point(), BigInt::one());
        let mut loci = LociMap::new();
        loci.insert(
            (0, 0),
            BNLocusDecomposition {
                r: 0,
                d: 0,
                cosets: effective_locus_cosets(&chain, 0),
            },
        );
        let gf = poincare_chain(&chain, &[d], &loci).unwrap();
        let series = gf.expand(6).unwrap();
        assert_eq!(series.coeff(&[0]), BigInt::one());
        for n in 1..=6i64 {
            assert_eq!(series.coeff(&[n]), BigInt::from(n), "n = {n}");
        }
    }

    #[test]
    fn missing_locus_is_reported() {
        let chain = rational_chain(&[(1, 1)], &[(0, 1)]);
        let mut d = MetricDivisor::zero();
        d.add_point(chain.marked_point(), BigInt::one());
        let err = poincare_chain(&chain, &[d], &LociMap::new()).unwrap_err();
        assert!(matches!(err, Error::MissingLocus { r: 0, d: 0 }));
    }

    #[test]
    fn degree_zero_effective_locus_is_identity_class() {
        let chain = generic_chain(2);
        let cosets = effective_locus_cosets(&chain, 0);
        assert_eq!(cosets.len(), 1);
        assert!(cosets[0].contains(&PfluegerVector::identity(&chain)));
        assert_eq!(cosets[0].dim(), 0);
    }
}
