//! Smith normal form with tracked unimodular transforms, plus the two
//! solvers built on it: particular integer solutions of `M x = b` and
//! integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::matrix::IntMatrix;

/// Decomposition `m = u * s * v` with `u`, `v` unimodular and `s` diagonal
/// with a divisibility chain (zeros last).  The inverse transforms are kept
/// because solving is done through them.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn u_inv(&self) -> &IntMatrix {
        &self.u_inv
    }

    pub fn v_inv(&self) -> &IntMatrix {
        &self.v_inv
    }

    /// Diagonal entries of `s`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Some particular integer solution of `m x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let rows = self.s.rows();
        let cols = self.s.cols();
        assert_eq!(b.len(), rows);
        // m x = b  <=>  s (v x) = u_inv b
        let c = self.u_inv.mul_vec(b);
        let mut y = vec![BigInt::zero(); cols];
        for i in 0..rows {
            let d = if i < cols {
                self.s[(i, i)].clone()
            } else {
                BigInt::zero()
            };
            if d.is_zero() {
                if !c[i].is_zero() {
                    return None;
                }
            } else {
                let (q, r) = c[i].div_rem(&d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
        }
        Some(self.v_inv.mul_vec(&y))
    }

    /// Basis of the integer kernel `{x : m x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let cols = self.s.cols();
        let rank = self.rank();
        (rank..cols).map(|j| self.v_inv.col_vec(j)).collect()
    }
}

/// Smith normal form of `m`.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // row op: row_i -= q * row_j on s corresponds to u := u * E^{-1}
    let row_sub = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        for c in 0..s.cols() {
            let sub = q * &s[(j, c)];
            s[(i, c)] -= sub;
        }
        // E = I - q e_i e_j^T applied on the left of s; u absorbs E^{-1} = I + q e_i e_j^T
        for r in 0..u.rows() {
            let add = q * &u[(r, i)];
            u[(r, j)] += add;
        }
        for c in 0..u_inv.cols() {
            let sub = q * &u_inv[(j, c)];
            u_inv[(i, c)] -= sub;
        }
    };
    let col_sub = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        // col_i -= q * col_j
        for r in 0..s.rows() {
            let sub = q * &s[(r, j)];
            s[(r, i)] -= sub;
        }
        for c in 0..v.cols() {
            let add = q * &v[(i, c)];
            v[(j, c)] += add;
        }
        for r in 0..v_inv.rows() {
            let sub = q * &v_inv[(r, j)];
            v_inv[(r, i)] -= sub;
        }
    };
    let row_swap = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, i: usize, j: usize| {
        for c in 0..s.cols() {
            let tmp = s[(i, c)].clone();
            s[(i, c)] = s[(j, c)].clone();
            s[(j, c)] = tmp;
        }
        for r in 0..u.rows() {
            let tmp = u[(r, i)].clone();
            u[(r, i)] = u[(r, j)].clone();
            u[(r, j)] = tmp;
        }
        for c in 0..u_inv.cols() {
            let tmp = u_inv[(i, c)].clone();
            u_inv[(i, c)] = u_inv[(j, c)].clone();
            u_inv[(j, c)] = tmp;
        }
    };
    let col_swap = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, i: usize, j: usize| {
        for r in 0..s.rows() {
            let tmp = s[(r, i)].clone();
            s[(r, i)] = s[(r, j)].clone();
            s[(r, j)] = tmp;
        }
        for c in 0..v.cols() {
            let tmp = v[(i, c)].clone();
            v[(i, c)] = v[(j, c)].clone();
            v[(j, c)] = tmp;
        }
        for r in 0..v_inv.rows() {
            let tmp = v_inv[(r, i)].clone();
            v_inv[(r, i)] = v_inv[(r, j)].clone();
            v_inv[(r, j)] = tmp;
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // find smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[(i, j)].is_zero() {
                        best = match best {
                            None => Some((i, j)),
                            Some((bi, bj)) => {
                                if s[(i, j)].abs() < s[(bi, bj)].abs() {
                                    Some((i, j))
                                } else {
                                    Some((bi, bj))
                                }
                            }
                        };
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            if bi != t {
                row_swap(&mut s, &mut u, &mut u_inv, t, bi);
            }
            if bj != t {
                col_swap(&mut s, &mut v, &mut v_inv, t, bj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if !s[(i, t)].is_zero() {
                    let q = s[(i, t)].div_floor(&s[(t, t)]);
                    if !q.is_zero() {
                        row_sub(&mut s, &mut u, &mut u_inv, i, t, &q);
                    }
                    if !s[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !s[(t, j)].is_zero() {
                    let q = s[(t, j)].div_floor(&s[(t, t)]);
                    if !q.is_zero() {
                        col_sub(&mut s, &mut v, &mut v_inv, j, t, &q);
                    }
                    if !s[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                // divisibility fix-up: s[t][t] must divide everything below-right
                let mut fixed = true;
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                            // fold row i into row t to mix the entries
                            let one = BigInt::from(-1);
                            row_sub(&mut s, &mut u, &mut u_inv, t, i, &one);
                            fixed = false;
                            break 'scan;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
        }
        if s[(t, t)].is_negative() {
            let two = BigInt::from(2);
            // negate row t: row_t -= 2 * row_t
            let q = two;
            for c in 0..cols {
                let sub = &q * &s[(t, c)];
                s[(t, c)] -= sub;
            }
            for r in 0..rows {
                let add = &q * &u[(r, t)];
                u[(r, t)] -= add;
            }
            for c in 0..u_inv.cols() {
                let sub = &q * &u_inv[(t, c)];
                u_inv[(t, c)] -= sub;
            }
        }
    }

    debug_assert!(u.mul(&u_inv).is_identity());
    debug_assert!(v.mul(&v_inv).is_identity());
    debug_assert_eq!(u.mul(&s).mul(&v), *m);
    SmithDecomposition { u, s, v, u_inv, v_inv }
}

/// Some integer solution of `m x = b`, or `None` when none exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    snf(m).solve(b)
}

/// Basis of the integer kernel of `m`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    snf(m).kernel()
}
