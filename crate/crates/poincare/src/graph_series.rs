//! From divisor sequences on a multigraph to the Poincare series: the
//! Jacobian structure, the homomorphism sending an integer vector `n` to the
//! class of `sum n_i D_i`, its kernel and fibers, and the assembly of the
//! full series as a rational function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::graph::{divisor_degree, GraphDivisor, GraphRankOracle, MultiGraph};
use crate::lattice::{AffineSublattice, Sublattice};
use crate::matrix::IntMatrix;
use crate::orthant::orthant_affine_genfun;
use crate::smith::{integer_kernel, snf, solve_integer};
use crate::tail::tail_term;

/// Invariant factors of the Jacobian and the class coordinate map, all read
/// off the Smith normal form of the Laplacian.
pub struct JacobianData {
    invariant_factors: Vec<BigInt>,
    order: BigInt,
}

impl JacobianData {
    pub fn new(g: &MultiGraph) -> Self {
        let d = snf(&g.laplacian());
        let invariant_factors: Vec<BigInt> = d
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero() && !x.is_one())
            .collect();
        let order = invariant_factors.iter().product();
        JacobianData {
            invariant_factors,
            order,
        }
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }
}

/// The map `n -> [sum n_i D_i]` for a fixed divisor sequence, with its
/// kernel sublattice cached.
pub struct PhiGraph {
    oracle: GraphRankOracle,
    divisors: Vec<GraphDivisor>,
    degrees: Vec<i64>,
    kernel: Sublattice,
}

impl PhiGraph {
    pub fn new(graph: MultiGraph, divisors: Vec<GraphDivisor>) -> Result<Self> {
        if divisors.is_empty() {
            return Err(Error::validation("at least one divisor is required"));
        }
        let n = graph.vertex_count();
        for d in &divisors {
            if d.len() != n {
                return Err(Error::validation("divisor length does not match vertex count"));
            }
        }
        let degrees: Vec<i64> = divisors
            .iter()
            .map(|d| {
                (&divisor_degree(d))
                    .try_into()
                    .map_err(|_| Error::validation("divisor degree exceeds machine range"))
            })
            .collect::<Result<_>>()?;
        let oracle = GraphRankOracle::new(graph);
        let kernel = phi_kernel_of(&oracle, &divisors);
        Ok(PhiGraph {
            oracle,
            divisors,
            degrees,
            kernel,
        })
    }

    pub fn oracle(&self) -> &GraphRankOracle {
        &self.oracle
    }

    pub fn graph(&self) -> &MultiGraph {
        self.oracle.graph()
    }

    pub fn divisors(&self) -> &[GraphDivisor] {
        &self.divisors
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn kernel(&self) -> &Sublattice {
        &self.kernel
    }

    pub fn combination(&self, n: &[BigInt]) -> GraphDivisor {
        let verts = self.graph().vertex_count();
        let mut d = vec![BigInt::zero(); verts];
        for (coef, div) in n.iter().zip(&self.divisors) {
            for (acc, x) in d.iter_mut().zip(div) {
                *acc += coef * x;
            }
        }
        d
    }
}

/// Kernel of the class map: all integer vectors whose divisor combination
/// lies in the Laplacian lattice.  Membership reduces to congruences on the
/// Smith coordinates of the combination.
fn phi_kernel_of(oracle: &GraphRankOracle, divisors: &[GraphDivisor]) -> Sublattice {
    let k = divisors.len();
    let dec = oracle.laplacian_snf();
    let diag = dec.diagonal();
    // rows of `coords`: Smith coordinates of each divisor (columns indexed
    // by divisor)
    let verts = divisors[0].len();
    let mut coord_cols: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for d in divisors {
        coord_cols.push(dec.u_inv().mul_vec(d));
    }
    // constraints: for each Smith row i, sum_j n_j c_{j,i} = diag_i * m_i
    // (exactly zero when diag_i = 0)
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut slack_count = 0usize;
    let mut slack_of_row: Vec<Option<usize>> = Vec::new();
    for i in 0..verts {
        let s = &diag[i];
        if s.is_one() {
            slack_of_row.push(None);
            continue;
        }
        slack_of_row.push(if s.is_zero() {
            None
        } else {
            slack_count += 1;
            Some(slack_count - 1)
        });
        rows.push((0..k).map(|j| coord_cols[j][i].clone()).collect());
    }
    // widen rows with slack columns
    let mut mat_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut row_idx = 0;
    for i in 0..verts {
        let s = &diag[i];
        if s.is_one() {
            continue;
        }
        let mut row = rows[row_idx].clone();
        row_idx += 1;
        for t in 0..slack_count {
            let coef = match slack_of_row[i] {
                Some(idx) if idx == t => -s.clone(),
                _ => BigInt::zero(),
            };
            row.push(coef);
        }
        mat_rows.push(row);
    }
    if mat_rows.is_empty() {
        return Sublattice::full(k);
    }
    let m = IntMatrix::from_rows(mat_rows);
    let ker = integer_kernel(&m);
    let gens: Vec<Vec<BigInt>> = ker.iter().map(|v| v[..k].to_vec()).collect();
    Sublattice::from_generators(k, gens)
}

/// Least `m >= 1` with `m * d` principal, for a degree-zero divisor.
pub fn mu_order(oracle: &GraphRankOracle, d: &GraphDivisor) -> Result<BigInt> {
    if !divisor_degree(d).is_zero() {
        return Err(Error::validation("order is defined for degree-zero divisors"));
    }
    let dec = oracle.laplacian_snf();
    let coords = dec.u_inv().mul_vec(d);
    let diag = dec.diagonal();
    let mut m = BigInt::one();
    for (c, s) in coords.iter().zip(&diag) {
        if s.is_zero() {
            if !c.is_zero() {
                return Err(Error::validation(
                    "degree-zero divisor has unbounded class order",
                ));
            }
            continue;
        }
        let g = c.gcd(s);
        m = num_integer::lcm(m, s / g);
    }
    Ok(m)
}

/// The non-empty fibers of the class map meeting the hyperplane of weighted
/// degree `l`: one affine sublattice per class, together with a divisor
/// representative of that class.
pub fn class_fibers_at_degree(
    phi: &PhiGraph,
    l: i64,
) -> Vec<(GraphDivisor, AffineSublattice)> {
    let k = phi.divisors.len();
    let degrees = &phi.degrees;
    // particular solution of sum n_i d_i = l
    let dmat = IntMatrix::from_rows(vec![degrees.iter().map(|&x| BigInt::from(x)).collect()]);
    let Some(n0) = solve_integer(&dmat, &[BigInt::from(l)]) else {
        return vec![];
    };
    // lattice of the homogeneous hyperplane
    let hyper = Sublattice::from_generators(k, integer_kernel(&dmat));
    // coordinates of the kernel inside the hyperplane lattice
    let coords: Vec<Vec<BigInt>> = phi
        .kernel
        .basis()
        .iter()
        .map(|v| {
            hyper
                .coordinates(v)
                .expect("class-map kernel lies in the degree-zero hyperplane")
        })
        .collect();
    let r = hyper.rank();
    let quotient = Sublattice::from_generators(r, coords);
    assert_eq!(
        quotient.rank(),
        r,
        "class-map kernel has finite index in the degree-zero hyperplane"
    );
    // residue box of the quotient
    let mut residues: Vec<Vec<BigInt>> = vec![vec![]];
    for i in 0..r {
        let pivot: BigInt = quotient.basis()[i][i].clone();
        let mut next = Vec::new();
        for prefix in residues {
            let mut c = BigInt::zero();
            while &c < &pivot {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
                c += 1;
            }
        }
        residues = next;
    }
    let mut out = Vec::new();
    for res in residues {
        let mut offset = n0.clone();
        for (y, row) in res.iter().zip(hyper.basis()) {
            for (o, x) in offset.iter_mut().zip(row) {
                *o += y * x;
            }
        }
        let fiber = AffineSublattice::new(offset.clone(), phi.kernel.clone());
        let rep = phi.combination(fiber.offset());
        out.push((rep, fiber));
    }
    out.sort_by(|a, b| a.1.offset().cmp(b.1.offset()));
    out
}

/// The Poincare series of the divisor sequence as a normalized rational
/// function: the finitely many low-degree class fibers weighted by
/// `rank + 1`, plus the Riemann-Roch tail.
pub fn poincare_graph(graph: &MultiGraph, divisors: &[GraphDivisor]) -> Result<RationalGF> {
    let phi = PhiGraph::new(graph.clone(), divisors.to_vec())?;
    let g = graph.genus();
    let mut total = tail_term(phi.degrees(), g)?;
    for l in 0..=(2 * g - 2).max(-1) {
        for (rep, fiber) in class_fibers_at_degree(&phi, l) {
            let rank = phi.oracle().rank(&rep);
            if rank < 0 {
                continue;
            }
            let gf = orthant_affine_genfun(&fiber)?.scale(&BigInt::from(rank + 1));
            total = total.add(&gf);
        }
    }
    Ok(total.normalize())
}
