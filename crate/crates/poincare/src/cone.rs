//! Generating functions of simplicial cones with respect to a sublattice.
//!
//! The closed form for a simplicial cone with generators `g_1..g_d` that are
//! primitive lattice vectors is `sum_i z^{r_i} / prod_j (1 - z^{g_j})`, where
//! the `r_i` run over the lattice points of the half-open fundamental
//! parallelepiped spanned by the generators (shifted to the apex).  Rational
//! apexes are handled by passing to the cone over `(C, 1)` in one dimension
//! higher and extracting the coefficient of `t^1` afterwards.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::lattice::Sublattice;
use crate::matrix::IntMatrix;
use crate::poly::MultivariatePoly;
use crate::rational::{rat_from_big, Rational};

/// A simplicial cone term: apex, linearly independent generators (stored
/// primitive in the reference lattice), per-generator half-open flags
/// (`true` excludes the facet spanned by the other generators), and the
/// reference lattice.
#[derive(Debug, Clone)]
pub struct SimplicialConeTerm {
    apex: Vec<Rational>,
    generators: Vec<Vec<BigInt>>,
    half_open: Vec<bool>,
    lattice: Sublattice,
}

impl SimplicialConeTerm {
    pub fn new(
        apex: Vec<Rational>,
        directions: Vec<Vec<BigInt>>,
        half_open: Vec<bool>,
        lattice: Sublattice,
    ) -> Result<Self> {
        let k = lattice.ambient_dim();
        assert_eq!(apex.len(), k);
        assert_eq!(directions.len(), half_open.len());
        if !directions.is_empty() {
            let m = IntMatrix::from_rows(directions.clone());
            if m.rank() != directions.len() {
                return Err(Error::validation("cone generators are linearly dependent"));
            }
        }
        let mut generators = Vec::with_capacity(directions.len());
        for d in &directions {
            let dir: Vec<Rational> = d.iter().map(|x| rat_from_big(x.clone())).collect();
            let (_, prim) = lattice.primitive_multiple(&dir).ok_or_else(|| {
                Error::validation("cone generator outside the span of the reference lattice")
            })?;
            generators.push(prim);
        }
        Ok(SimplicialConeTerm {
            apex,
            generators,
            half_open,
            lattice,
        })
    }

    pub fn closed(
        apex: Vec<Rational>,
        directions: Vec<Vec<BigInt>>,
        lattice: Sublattice,
    ) -> Result<Self> {
        let flags = vec![false; directions.len()];
        Self::new(apex, directions, flags, lattice)
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }
}

/// Solve `alpha * g = u` for rational `alpha`, where the rows of `g` are
/// linearly independent; `None` when `u` is outside the row span.
fn coords_in_rows(g: &[Vec<BigInt>], u: &[Rational]) -> Option<Vec<Rational>> {
    let d = g.len();
    let k = u.len();
    if d == 0 {
        return if u.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        };
    }
    // Gaussian elimination on the k x (d+1) system g^T | u
    let mut a: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut row: Vec<Rational> = (0..d).map(|j| rat_from_big(g[j][i].clone())).collect();
            row.push(u[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..k).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for j in 0..=d {
            a[r][j] = &a[r][j] / &inv;
        }
        for i in 0..k {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=d {
                    let sub = &f * &a[r][j];
                    a[i][j] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    // consistency of the remaining rows
    for i in r..k {
        if !a[i][d].is_zero() {
            return None;
        }
    }
    let mut alpha = vec![Rational::zero(); d];
    for (row, col) in pivots {
        alpha[col] = a[row][d].clone();
    }
    Some(alpha)
}

/// Lattice points of the half-open fundamental parallelepiped
/// `apex + { sum alpha_j g_j }` with `alpha_j` in `[0,1)` (closed flag) or
/// `(0,1]` (open flag).
pub fn parallelepiped_points(
    apex: &[Rational],
    generators: &[Vec<BigInt>],
    half_open: &[bool],
    lattice: &Sublattice,
) -> Vec<Vec<BigInt>> {
    let k = lattice.ambient_dim();
    let d = generators.len();
    if d == 0 {
        // single point: apex itself, when integral and in the lattice
        if apex.iter().all(|x| x.denom().is_one()) {
            let v: Vec<BigInt> = apex.iter().map(|x| x.to_integer()).collect();
            if lattice.contains(&v) {
                return vec![v];
            }
        }
        return vec![];
    }

    // particular lattice point in apex + span(generators)
    let gmat = IntMatrix::from_rows(generators.to_vec());
    let normals = crate::smith::integer_kernel(&gmat);
    let b = lattice.basis_matrix();
    let x0: Vec<BigInt> = if normals.is_empty() {
        vec![BigInt::zero(); k]
    } else {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let mut rhs: Vec<BigInt> = Vec::new();
        for n in &normals {
            let target: Rational = apex
                .iter()
                .zip(n)
                .map(|(a, x)| a * rat_from_big(x.clone()))
                .sum();
            let den = target.denom().clone();
            let row: Vec<BigInt> = (0..b.rows())
                .map(|i| crate::lattice::dot(b.row(i), n) * &den)
                .collect();
            rows.push(row);
            rhs.push(target.numer().clone());
        }
        let m = IntMatrix::from_rows(rows);
        match crate::smith::solve_integer(&m, &rhs) {
            Some(c) => IntMatrix::vec_mul(&c, &b),
            None => return vec![],
        }
    };

    // lattice of admissible steps inside the span
    let step_lattice = lattice.intersect_span(&gmat);
    debug_assert_eq!(step_lattice.rank(), d, "span intersection rank");
    let hl = step_lattice.basis();

    // alpha-coordinates: alpha(x0 + y * HL) = alpha0 + y * T
    let base_diff: Vec<Rational> = (0..k)
        .map(|i| rat_from_big(x0[i].clone()) - &apex[i])
        .collect();
    let alpha0 = coords_in_rows(generators, &base_diff).expect("x0 - apex must lie in the span");
    let t_rows: Vec<Vec<Rational>> = hl
        .iter()
        .map(|row| {
            let u: Vec<Rational> = row.iter().map(|x| rat_from_big(x.clone())).collect();
            coords_in_rows(generators, &u).expect("step basis lies in the span")
        })
        .collect();

    // bounding box for y: y = (alpha - alpha0) * T^{-1}, alpha in [0,1]^d
    let t_inv = invert_rational(&t_rows);
    let mut lo = vec![Rational::zero(); d];
    let mut hi = vec![Rational::zero(); d];
    for i in 0..d {
        let mut lo_i = Rational::zero();
        let mut hi_i = Rational::zero();
        for j in 0..d {
            // contribution of alpha_j in [0,1] and of -alpha0_j
            let c = &t_inv[j][i];
            let shift = -(&alpha0[j]) * c;
            if c.is_negative() {
                lo_i += c;
            } else {
                hi_i += c;
            }
            lo_i += &shift;
            hi_i += shift;
        }
        lo[i] = lo_i;
        hi[i] = hi_i;
    }
    let lo_int: Vec<i64> = lo
        .iter()
        .map(|x| x.ceil().to_integer().try_into().expect("box bound overflow"))
        .collect();
    let hi_int: Vec<i64> = hi
        .iter()
        .map(|x| x.floor().to_integer().try_into().expect("box bound overflow"))
        .collect();

    let mut out = Vec::new();
    let mut y = lo_int.clone();
    'outer: loop {
        // alpha = alpha0 + y * T
        let mut alpha = alpha0.clone();
        for j in 0..d {
            for (a, t) in alpha.iter_mut().zip(&t_rows[j]) {
                *a += rat_from_int_i64(y[j]) * t;
            }
        }
        let inside = alpha.iter().zip(half_open).all(|(a, &open)| {
            if open {
                a.is_positive() && *a <= Rational::one()
            } else {
                !a.is_negative() && *a < Rational::one()
            }
        });
        if inside {
            let mut x = x0.clone();
            for j in 0..d {
                for (xi, h) in x.iter_mut().zip(&hl[j]) {
                    *xi += BigInt::from(y[j]) * h;
                }
            }
            out.push(x);
        }
        // advance odometer
        for i in 0..d {
            if y[i] < hi_int[i] {
                y[i] += 1;
                for ii in 0..i {
                    y[ii] = lo_int[ii];
                }
                continue 'outer;
            }
        }
        break;
    }
    out.sort();
    out
}

fn rat_from_int_i64(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Inverse of a small invertible rational matrix given by rows.
fn invert_rational(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            for j in 0..n {
                row.push(if i == j { Rational::one() } else { Rational::zero() });
            }
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).expect("singular matrix");
        a.swap(c, p);
        let inv = a[c][c].clone();
        for j in 0..2 * n {
            a[c][j] = &a[c][j] / &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let sub = &f * &a[c][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    (0..n).map(|i| a[i][n..].to_vec()).collect()
}

/// Generating function of a simplicial cone term by direct enumeration of
/// the (shifted) fundamental parallelepiped.
pub fn simplicial_cone_genfun(term: &SimplicialConeTerm) -> Result<RationalGF> {
    let k = term.lattice.ambient_dim();
    let pts = parallelepiped_points(&term.apex, &term.generators, &term.half_open, &term.lattice);
    let mut numerator = MultivariatePoly::zero(k);
    for p in pts {
        numerator.add_term(to_i64_vec(&p)?, BigInt::one());
    }
    let denominator: Vec<Vec<i64>> = term
        .generators
        .iter()
        .map(|g| to_i64_vec(g))
        .collect::<Result<_>>()?;
    Ok(RationalGF::new(numerator, denominator))
}

/// Generating function of the tangent cone `vertex + cone(rays)` with
/// respect to `lattice`, for a possibly non-integral rational vertex: pass
/// to the homogenized cone over `(cone, 1)`, compute its series, then
/// differentiate in the extra variable and evaluate at zero (equivalently,
/// extract the coefficient of `t^1`).
pub fn vertex_cone_genfun(
    vertex: &[Rational],
    rays: &[Vec<BigInt>],
    lattice: &Sublattice,
) -> Result<RationalGF> {
    vertex_cone_genfun_half_open(vertex, rays, &vec![false; rays.len()], lattice)
}

pub fn vertex_cone_genfun_half_open(
    vertex: &[Rational],
    rays: &[Vec<BigInt>],
    half_open: &[bool],
    lattice: &Sublattice,
) -> Result<RationalGF> {
    let k = lattice.ambient_dim();
    assert_eq!(vertex.len(), k);

    // homogenized lattice L x Z
    let mut hbasis: Vec<Vec<BigInt>> = lattice
        .basis()
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(BigInt::zero());
            v
        })
        .collect();
    let mut last = vec![BigInt::zero(); k + 1];
    last[k] = BigInt::one();
    hbasis.push(last);
    let hlattice = Sublattice::from_generators(k + 1, hbasis);

    let mut hdirections: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(BigInt::zero());
            v
        })
        .collect();
    let mut flags = half_open.to_vec();
    // the homogenization direction (vertex, 1)
    let den = crate::rational::common_denominator(vertex);
    let mut wdir: Vec<BigInt> = vertex
        .iter()
        .map(|x| (x * rat_from_big(den.clone())).to_integer())
        .collect();
    wdir.push(den.clone());
    hdirections.push(wdir);
    flags.push(false);

    let apex0 = vec![Rational::zero(); k + 1];
    let term = SimplicialConeTerm::new(apex0, hdirections, flags, hlattice)?;
    let homogenized = simplicial_cone_genfun(&term)?;
    Ok(extract_linear_coefficient(&homogenized, k))
}

/// Coefficient of `t^1` where `t` is the last variable: keeps numerator
/// terms with `t`-degree one, and shifts `t`-degree-zero terms by each
/// denominator factor carrying `t`-degree exactly one.  Factors with
/// positive `t`-degree drop out of the denominator.
fn extract_linear_coefficient(f: &RationalGF, out_vars: usize) -> RationalGF {
    let mut den_free: Vec<Vec<i64>> = Vec::new();
    let mut den_linear: Vec<Vec<i64>> = Vec::new();
    for b in f.denominator() {
        match b[out_vars] {
            0 => den_free.push(b[..out_vars].to_vec()),
            1 => den_linear.push(b[..out_vars].to_vec()),
            _ => {}
        }
    }
    let mut numerator = MultivariatePoly::zero(out_vars);
    for (e, c) in f.numerator().terms() {
        match e[out_vars] {
            1 => numerator.add_term(e[..out_vars].to_vec(), c.clone()),
            0 => {
                for b in &den_linear {
                    let shifted: Vec<i64> = e[..out_vars].iter().zip(b).map(|(x, y)| x + y).collect();
                    numerator.add_term(shifted, c.clone());
                }
            }
            _ => {}
        }
    }
    RationalGF::new(numerator, den_free)
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.try_into()
                .map_err(|_| Error::validation("exponent exceeds machine range"))
        })
        .collect()
}
