//! Rational polyhedra `{x : A x >= b}` and Brion's decomposition: the
//! lattice-point generating function of a pointed rational polyhedron is the
//! sum of the generating functions of its vertex tangent cones.  Tangent
//! cones that are not simplicial are triangulated into half-open simplicial
//! cones (pulling triangulation, openness decided by visibility from a
//! lexicographically perturbed interior point) so nothing is counted twice.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::cone::vertex_cone_genfun_half_open;
use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::lattice::{dot, Sublattice};
use crate::matrix::IntMatrix;
use crate::rational::{rat_from_big, Rational};

#[derive(Debug, Clone)]
pub struct RationalPolyhedron {
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
}

impl RationalPolyhedron {
    pub fn new(a: Vec<Vec<BigInt>>, b: Vec<BigInt>) -> Self {
        assert_eq!(a.len(), b.len(), "constraint count mismatch");
        RationalPolyhedron { a, b }
    }

    pub fn from_i64(a: &[Vec<i64>], b: &[i64]) -> Self {
        Self::new(
            a.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            b.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.a.iter().zip(&self.b).all(|(row, rhs)| {
            let lhs: Rational = row
                .iter()
                .zip(x)
                .map(|(c, v)| rat_from_big(c.clone()) * v)
                .sum();
            lhs >= rat_from_big(rhs.clone())
        })
    }

    /// The recession cone contains no line iff the constraint matrix has
    /// full column rank.
    pub fn is_pointed(&self) -> bool {
        let k = self.dim();
        if self.a.is_empty() {
            return k == 0;
        }
        IntMatrix::from_rows(self.a.clone()).rank() == k
    }

    /// All vertices, by enumerating maximal active sets.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let k = self.dim();
        let m = self.a.len();
        let mut found: Vec<Vec<Rational>> = Vec::new();
        if m < k || k == 0 {
            return found;
        }
        for subset in k_subsets(m, k) {
            if let Some(x) = self.solve_active(&subset) {
                if self.contains(&x) && !found.contains(&x) {
                    found.push(x);
                }
            }
        }
        found.sort();
        found
    }

    fn solve_active(&self, rows: &[usize]) -> Option<Vec<Rational>> {
        let k = self.dim();
        let mut aug: Vec<Vec<Rational>> = rows
            .iter()
            .map(|&i| {
                let mut r: Vec<Rational> = self.a[i]
                    .iter()
                    .map(|x| rat_from_big(x.clone()))
                    .collect();
                r.push(rat_from_big(self.b[i].clone()));
                r
            })
            .collect();
        for c in 0..k {
            let p = (c..k).find(|&i| !aug[i][c].is_zero())?;
            aug.swap(c, p);
            let inv = aug[c][c].clone();
            for j in 0..=k {
                aug[c][j] = &aug[c][j] / &inv;
            }
            for i in 0..k {
                if i != c && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in 0..=k {
                        let sub = &f * &aug[c][j];
                        aug[i][j] -= sub;
                    }
                }
            }
        }
        Some((0..k).map(|i| aug[i][k].clone()).collect())
    }

    fn active_rows(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.a.len())
            .filter(|&i| {
                let lhs: Rational = self.a[i]
                    .iter()
                    .zip(x)
                    .map(|(c, v)| rat_from_big(c.clone()) * v)
                    .sum();
                lhs == rat_from_big(self.b[i].clone())
            })
            .collect()
    }

    /// Extremal rays of the tangent cone at a vertex: primitive integer
    /// directions `u` with `A_act u >= 0` lying on `dim - 1` independent
    /// active hyperplanes.
    pub fn tangent_cone_rays(&self, vertex: &[Rational]) -> Vec<Vec<BigInt>> {
        let k = self.dim();
        let active = self.active_rows(vertex);
        let act_rows: Vec<Vec<BigInt>> = active.iter().map(|&i| self.a[i].clone()).collect();
        let mut rays: Vec<Vec<BigInt>> = Vec::new();
        let n = act_rows.len();
        if n == 0 || k == 0 {
            return rays;
        }
        for subset in k_subsets(n, k - 1) {
            let rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| act_rows[i].clone()).collect();
            let kernel: Vec<Vec<BigInt>> = if rows.is_empty() {
                // only for k = 1: the free direction
                vec![vec![BigInt::from(1)]]
            } else {
                if IntMatrix::from_rows(rows.clone()).rank() != k - 1 {
                    continue;
                }
                crate::smith::integer_kernel(&IntMatrix::from_rows(rows))
            };
            for u in kernel {
                let dir = primitive(&u);
                for cand in [dir.clone(), dir.iter().map(|x| -x).collect::<Vec<_>>()] {
                    if cand.iter().any(|x| !x.is_zero())
                        && act_rows.iter().all(|r| !dot(r, &cand).is_negative())
                        && !rays.contains(&cand)
                    {
                        rays.push(cand);
                    }
                }
            }
        }
        rays.sort();
        rays
    }

    pub fn active_functionals(&self, vertex: &[Rational]) -> Vec<Vec<BigInt>> {
        self.active_rows(vertex)
            .into_iter()
            .map(|i| self.a[i].clone())
            .collect()
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        if k == 0 {
            return out;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = num_integer::gcd(g, x.abs());
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Pulling triangulation of `cone(rays)` into simplicial subcones, recursing
/// through the facets supported by the given functionals.
fn triangulate(rays: &[Vec<BigInt>], functionals: &[Vec<BigInt>]) -> Vec<Vec<Vec<BigInt>>> {
    let d = if rays.is_empty() {
        0
    } else {
        IntMatrix::from_rows(rays.to_vec()).rank()
    };
    if rays.len() == d {
        return vec![rays.to_vec()];
    }
    let apex_ray = &rays[0];
    let mut seen_facets: Vec<Vec<Vec<BigInt>>> = Vec::new();
    let mut out = Vec::new();
    for f in functionals {
        if dot(f, apex_ray).is_positive() {
            let facet_rays: Vec<Vec<BigInt>> = rays
                .iter()
                .filter(|r| dot(f, r).is_zero())
                .cloned()
                .collect();
            if facet_rays.is_empty()
                || IntMatrix::from_rows(facet_rays.clone()).rank() != d - 1
                || seen_facets.contains(&facet_rays)
            {
                continue;
            }
            seen_facets.push(facet_rays.clone());
            for mut simplex in triangulate(&facet_rays, functionals) {
                simplex.push(apex_ray.clone());
                out.push(simplex);
            }
        }
    }
    debug_assert!(!out.is_empty(), "triangulation produced no simplices");
    out
}

fn coords_in_ray_basis(rays: &[Vec<BigInt>], x: &[Rational]) -> Vec<Rational> {
    // rays are linearly independent and x lies in their span
    let d = rays.len();
    let k = x.len();
    let mut aug: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut row: Vec<Rational> =
                (0..d).map(|j| rat_from_big(rays[j][i].clone())).collect();
            row.push(x[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(d);
    let mut r = 0;
    for c in 0..d {
        let p = (r..k)
            .find(|&i| !aug[i][c].is_zero())
            .expect("independent rays");
        aug.swap(r, p);
        let inv = aug[r][c].clone();
        for j in 0..=d {
            aug[r][j] = &aug[r][j] / &inv;
        }
        for i in 0..k {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=d {
                    let sub = &f * &aug[r][j];
                    aug[i][j] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let mut coords = vec![Rational::zero(); d];
    for (row, col) in pivots {
        coords[col] = aug[row][d].clone();
    }
    coords
}

/// Whether facet `facet` of the simplex is kept closed: the barycentric sign
/// of the perturbed interior point `p0 + eps r_1 + eps^2 r_2 + ...` decides.
fn facet_is_closed(
    simplex: &[Vec<BigInt>],
    facet: usize,
    p0: &[BigInt],
    perturbation: &[Vec<BigInt>],
) -> bool {
    let coord = |x: &[BigInt]| -> Rational {
        let xr: Vec<Rational> = x.iter().map(|v| rat_from_big(v.clone())).collect();
        coords_in_ray_basis(simplex, &xr)[facet].clone()
    };
    let first = coord(p0);
    if !first.is_zero() {
        return first.is_positive();
    }
    for r in perturbation {
        let c = coord(r);
        if !c.is_zero() {
            return c.is_positive();
        }
    }
    unreachable!("perturbed point cannot lie on a facet hyperplane");
}

/// Generating function of a (possibly non-simplicial) tangent cone at a
/// vertex, as a sum of half-open simplicial cone series.
pub fn tangent_cone_genfun(
    vertex: &[Rational],
    rays: &[Vec<BigInt>],
    functionals: &[Vec<BigInt>],
    lattice: &Sublattice,
) -> Result<RationalGF> {
    let k = lattice.ambient_dim();
    if rays.is_empty() {
        return vertex_cone_genfun_half_open(vertex, &[], &[], lattice);
    }
    let d = IntMatrix::from_rows(rays.to_vec()).rank();
    if rays.len() == d {
        return vertex_cone_genfun_half_open(vertex, rays, &vec![false; rays.len()], lattice);
    }
    let simplices = triangulate(rays, functionals);
    let mut p0 = vec![BigInt::zero(); k];
    for r in rays {
        for (a, b) in p0.iter_mut().zip(r) {
            *a += b;
        }
    }
    let mut total = RationalGF::zero(k);
    for simplex in &simplices {
        let flags: Vec<bool> = (0..simplex.len())
            .map(|i| !facet_is_closed(simplex, i, &p0, rays))
            .collect();
        let gf = vertex_cone_genfun_half_open(vertex, simplex, &flags, lattice)?;
        total = total.add(&gf);
    }
    Ok(total)
}

/// Brion's decomposition: the generating function of the lattice points of a
/// pointed rational polyhedron with respect to `lattice`, normalized.
pub fn brion_genfun(p: &RationalPolyhedron, lattice: &Sublattice) -> Result<RationalGF> {
    let k = p.dim();
    assert_eq!(lattice.ambient_dim(), k, "lattice dimension mismatch");
    if lattice.rank() != k {
        return Err(Error::validation(
            "reference lattice must have full rank for Brion summation",
        ));
    }
    if !p.is_pointed() {
        return Err(Error::validation("polyhedron contains a line"));
    }
    let mut total = RationalGF::zero(k);
    for v in &p.vertices() {
        let rays = p.tangent_cone_rays(v);
        let functionals = p.active_functionals(v);
        total = total.add(&tangent_cone_genfun(v, &rays, &functionals, lattice)?);
    }
    Ok(total.normalize())
}
