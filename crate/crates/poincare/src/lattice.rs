//! Sublattices of Z^k in canonical Hermite normal form, and affine
//! sublattices (lattice cosets) with canonically reduced offsets.
//!
//! The HNF convention used everywhere: the basis is in row echelon form with
//! pivot columns strictly increasing, positive pivots, and the entries above
//! each pivot reduced into `[0, pivot)`.  This form is unique for the row
//! span, so lattice equality is structural equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;
use crate::rational::Rational;

/// Hermite normal form of the row span of `m`: returns the canonical basis
/// rows (zero rows dropped).
pub fn hnf(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row_vec(i)).collect();
    hnf_rows(&mut rows, m.cols());
    rows
}

fn hnf_rows(rows: &mut Vec<Vec<BigInt>>, cols: usize) {
    let mut pivot_row = 0;
    for col in 0..cols {
        // gcd elimination below pivot_row in this column
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows.len() {
                if !rows[i][col].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if rows[i][col].abs() < rows[b][col].abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            rows.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..rows.len() {
                if !rows[i][col].is_zero() {
                    let q = div_floor_big(&rows[i][col], &rows[pivot_row][col]);
                    for j in 0..cols {
                        let sub = &q * &rows[pivot_row][j];
                        rows[i][j] -= sub;
                    }
                    if !rows[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][col].is_zero() {
            if rows[pivot_row][col].is_negative() {
                for j in 0..cols {
                    rows[pivot_row][j] = -rows[pivot_row][j].clone();
                }
            }
            // reduce entries above the pivot into [0, pivot)
            for i in 0..pivot_row {
                let q = div_floor_big(&rows[i][col], &rows[pivot_row][col]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &rows[pivot_row][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// A sublattice of Z^k, stored as its canonical HNF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_dim: usize,
    basis: Vec<Vec<BigInt>>,
}

impl Sublattice {
    pub fn from_generators(ambient_dim: usize, gens: Vec<Vec<BigInt>>) -> Self {
        assert!(gens.iter().all(|g| g.len() == ambient_dim));
        let mut rows = gens;
        hnf_rows(&mut rows, ambient_dim);
        Sublattice {
            ambient_dim,
            basis: rows,
        }
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        Sublattice {
            ambient_dim: m.cols(),
            basis: hnf(m),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Sublattice {
            ambient_dim,
            basis: vec![],
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_matrix(&IntMatrix::identity(ambient_dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.basis.clone())
    }

    fn pivot_col(&self, i: usize) -> usize {
        self.basis[i]
            .iter()
            .position(|x| !x.is_zero())
            .expect("zero basis row")
    }

    /// Reduce `v` modulo the lattice: the canonical coset representative.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut v = v.to_vec();
        for i in 0..self.basis.len() {
            let p = self.pivot_col(i);
            let q = div_floor_big(&v[p], &self.basis[i][p]);
            if !q.is_zero() {
                for j in 0..self.ambient_dim {
                    let sub = &q * &self.basis[i][j];
                    v[j] -= sub;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Integer coordinates of `v` in the basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut v = v.to_vec();
        let mut coords = vec![BigInt::zero(); self.basis.len()];
        for i in 0..self.basis.len() {
            let p = self.pivot_col(i);
            let (q, r) = v[p].div_rem(&self.basis[i][p]);
            if !r.is_zero() {
                return None;
            }
            coords[i] = q.clone();
            for j in 0..self.ambient_dim {
                let sub = &q * &self.basis[i][j];
                v[j] -= sub;
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    /// Rational coordinates of `v` in the basis, if `v` lies in the Q-span.
    pub fn rational_coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut v = v.to_vec();
        let mut coords = vec![Rational::zero(); self.basis.len()];
        for i in 0..self.basis.len() {
            let p = self.pivot_col(i);
            let q = &v[p] / Rational::from_integer(self.basis[i][p].clone());
            coords[i] = q.clone();
            for j in 0..self.ambient_dim {
                let sub = &q * Rational::from_integer(self.basis[i][j].clone());
                v[j] -= sub;
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    /// Index `[Z^k : L]`: `Some(det)` when full rank, `None` for infinite.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() != self.ambient_dim {
            return None;
        }
        let mut d = BigInt::one();
        for i in 0..self.basis.len() {
            d *= &self.basis[i][self.pivot_col(i)];
        }
        Some(d)
    }

    /// Smallest positive integer `t` with `t * dir` in the lattice, together
    /// with the resulting lattice vector.  `None` when `dir` is outside the
    /// Q-span of the lattice.
    pub fn primitive_multiple(&self, dir: &[Rational]) -> Option<(BigInt, Vec<BigInt>)> {
        let coords = self.rational_coordinates(dir)?;
        let mut t = BigInt::one();
        for c in &coords {
            t = num_integer::lcm(t, c.denom().abs());
        }
        let v: Vec<BigInt> = dir
            .iter()
            .map(|x| {
                let scaled = x * Rational::from_integer(t.clone());
                debug_assert!(scaled.denom().is_one());
                scaled.to_integer()
            })
            .collect();
        Some((t, v))
    }

    /// Intersection of this lattice with the Q-row-span of `span_rows`.
    pub fn intersect_span(&self, span_rows: &IntMatrix) -> Sublattice {
        assert_eq!(span_rows.cols(), self.ambient_dim);
        // normals to the span: integer kernel of span_rows (as a map on columns)
        let normals = crate::smith::integer_kernel(span_rows);
        if normals.is_empty() {
            return self.clone();
        }
        // constraints on basis coordinates c: (c * B) . n = 0 for each normal
        let b = self.basis_matrix();
        let mut constraint_rows: Vec<Vec<BigInt>> = Vec::new();
        for n in &normals {
            constraint_rows.push((0..b.rows()).map(|i| dot(b.row(i), n)).collect());
        }
        let cons = IntMatrix::from_rows(constraint_rows).transpose();
        // rows of `cons` are per-basis-vector; kernel over c
        let ker = crate::smith::integer_kernel(&cons.transpose());
        let gens: Vec<Vec<BigInt>> = ker
            .iter()
            .map(|c| IntMatrix::vec_mul(c, &b))
            .collect();
        Sublattice::from_generators(self.ambient_dim, gens)
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An affine sublattice `offset + L` of Z^k.  The offset is canonically
/// reduced modulo `L`, so equal sets have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSublattice {
    offset: Vec<BigInt>,
    lattice: Sublattice,
}

impl AffineSublattice {
    pub fn new(offset: Vec<BigInt>, lattice: Sublattice) -> Self {
        assert_eq!(offset.len(), lattice.ambient_dim());
        let offset = lattice.reduce(&offset);
        AffineSublattice { offset, lattice }
    }

    pub fn point(p: Vec<BigInt>) -> Self {
        let d = p.len();
        Self::new(p, Sublattice::zero(d))
    }

    pub fn offset(&self) -> &[BigInt] {
        &self.offset
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn ambient_dim(&self) -> usize {
        self.lattice.ambient_dim()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = v.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        self.lattice.contains(&diff)
    }
}

/// Exact intersection of two affine sublattices, `None` when empty.
///
/// Solves `o1 + x B1 = o2 + y B2` over the integers via the Smith normal
/// form of the stacked basis matrix; the intersection lattice comes from the
/// integer kernel of the same matrix.
pub fn intersect_affine(a: &AffineSublattice, b: &AffineSublattice) -> Option<AffineSublattice> {
    assert_eq!(a.ambient_dim(), b.ambient_dim(), "ambient dimension mismatch");
    let k = a.ambient_dim();
    let r1 = a.lattice.rank();
    let r2 = b.lattice.rank();
    // columns of the system: the k ambient coordinates; rows: r1 + r2 unknowns
    // system matrix M (k x (r1 + r2)): M * (x, y)^T = o2 - o1
    let mut m = IntMatrix::zero(k, r1 + r2);
    for (j, bas) in a.lattice.basis().iter().enumerate() {
        for i in 0..k {
            m[(i, j)] = bas[i].clone();
        }
    }
    for (j, bas) in b.lattice.basis().iter().enumerate() {
        for i in 0..k {
            m[(i, r1 + j)] = -bas[i].clone();
        }
    }
    let rhs: Vec<BigInt> = (0..k).map(|i| &b.offset[i] - &a.offset[i]).collect();
    let sol = crate::smith::solve_integer(&m, &rhs)?;
    let offset: Vec<BigInt> = (0..k)
        .map(|i| {
            let shift: BigInt = (0..r1).map(|j| &sol[j] * &a.lattice.basis()[j][i]).sum();
            &a.offset[i] + shift
        })
        .collect();
    let kernel = crate::smith::integer_kernel(&m);
    let gens: Vec<Vec<BigInt>> = kernel
        .iter()
        .map(|v| {
            (0..k)
                .map(|i| (0..r1).map(|j| &v[j] * &a.lattice.basis()[j][i]).sum())
                .collect()
        })
        .collect();
    Some(AffineSublattice::new(
        offset,
        Sublattice::from_generators(k, gens),
    ))
}
