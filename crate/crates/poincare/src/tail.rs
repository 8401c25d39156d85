//! The high-degree part of a Poincare series.  Once the weighted degree
//! `sum n_i d_i` passes `2g - 1`, Riemann-Roch pins the rank to
//! `sum n_i d_i - g`, so that part of the series is
//! `sum_{n in Q} (sum n_i d_i - g + 1) z^n` over the rational polyhedron
//! `Q = {x >= 0, sum d_i x_i >= 2g - 1}`.  It is produced exactly by
//! applying the Euler-type operator `sum_i d_i z_i d/dz_i - (g - 1)` to the
//! lattice-point generating function of `Q`.
//!
//! `Q`'s vertices and tangent cones have a closed form: the cones are always
//! simplicial, so no triangulation is needed here.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cone::vertex_cone_genfun;
use crate::error::Result;
use crate::gf::RationalGF;
use crate::lattice::Sublattice;
use crate::rational::{rat_from_int, Rational};

/// Vertices of `Q = {x >= 0, sum d_i x_i >= 2g - 1}` with the rays of their
/// tangent cones.  Empty when `Q` is empty (`g >= 1` and every `d_i <= 0`).
pub fn orthant_halfspace_vertices(d: &[i64], g: i64) -> Vec<(Vec<Rational>, Vec<Vec<BigInt>>)> {
    assert!(g >= 0);
    let k = d.len();
    let threshold = 2 * g - 1;
    let unit = |i: usize, sign: i64| -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); k];
        v[i] = BigInt::from(sign);
        v
    };
    let mut out = Vec::new();
    if g == 0 {
        // the origin satisfies the halfspace strictly; its cone is the orthant
        let origin = vec![Rational::zero(); k];
        let rays = (0..k).map(|i| unit(i, 1)).collect();
        out.push((origin, rays));
    } else if d.iter().all(|&di| di <= 0) {
        return out;
    }
    // apex coordinate vertices: (2g-1)/d_i, present for d_i < 0 when g = 0
    // and for d_i > 0 when g >= 1
    for i in 0..k {
        let di = d[i];
        let wanted = if g == 0 { di < 0 } else { di > 0 };
        if !wanted {
            continue;
        }
        let mut vertex = vec![Rational::zero(); k];
        vertex[i] = rat_from_int(threshold) / rat_from_int(di);
        let mut rays = Vec::new();
        for j in 0..k {
            if j == i {
                // the coordinate direction along which the halfspace stays slack
                rays.push(unit(i, if g == 0 { -1 } else { 1 }));
            } else if d[j] == 0 {
                rays.push(unit(j, 1));
            } else {
                // direction inside the degree hyperplane toward coordinate j
                let mut r = vec![BigInt::zero(); k];
                let gcd = num_integer::gcd(di.unsigned_abs(), d[j].unsigned_abs()) as i64;
                r[i] = BigInt::from(-d[j] / gcd);
                r[j] = BigInt::from(di / gcd);
                if g == 0 {
                    // orient so the j-th coordinate grows
                    if di / gcd < 0 {
                        r[i] = BigInt::from(d[j] / gcd);
                        r[j] = BigInt::from(-di / gcd);
                    }
                }
                rays.push(r);
            }
        }
        out.push((vertex, rays));
    }
    out
}

/// Generating function of the lattice points of `Q` itself.
pub fn orthant_halfspace_genfun(d: &[i64], g: i64) -> Result<RationalGF> {
    let k = d.len();
    let lattice = Sublattice::full(k);
    let mut total = RationalGF::zero(k);
    for (vertex, rays) in orthant_halfspace_vertices(d, g) {
        total = total.add(&vertex_cone_genfun(&vertex, &rays, &lattice)?);
    }
    Ok(total)
}

/// The tail of the Poincare series: expansion coefficient
/// `sum n_i d_i - g + 1` exactly on `{n >= 0 : sum n_i d_i >= 2g - 1}` and
/// zero elsewhere, as a normalized rational function.
pub fn tail_term(d: &[i64], g: i64) -> Result<RationalGF> {
    let f = orthant_halfspace_genfun(d, g)?;
    let mut total = f.scale(&BigInt::from(1 - g));
    for (i, &di) in d.iter().enumerate() {
        if di != 0 {
            total = total.add(&f.euler_derivative(i).scale(&BigInt::from(di)));
        }
    }
    Ok(total.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::total_degree;
    use crate::poly::MultivariatePoly;
    use crate::polyhedron::{brion_genfun, RationalPolyhedron};
    use num_traits::One;

    #[test]
    fn vertex_structure_examples() {
        // k=1, d=(1), g=1: one vertex at 1 with ray e_1
        let v = orthant_halfspace_vertices(&[1], 1);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].0, vec![rat_from_int(1)]);
        assert_eq!(v[0].1, vec![vec![BigInt::one()]]);

        // k=2, d=(1,0), g=1: one vertex (1,0) with rays e_1 (inside the
        // degree constraint) and e_2
        let v2 = orthant_halfspace_vertices(&[1, 0], 1);
        assert_eq!(v2.len(), 1);
        assert_eq!(v2[0].0, vec![rat_from_int(1), rat_from_int(0)]);
        assert_eq!(
            v2[0].1,
            vec![
                vec![BigInt::one(), BigInt::zero()],
                vec![BigInt::zero(), BigInt::one()]
            ]
        );

        // all degrees non-positive with g >= 1: empty
        assert!(orthant_halfspace_vertices(&[-1, -1], 1).is_empty());
    }

    #[test]
    fn tail_univariate() {
        // d=(1), g=0: sum (n+1) z^n = 1/(1-z)^2
        let t = tail_term(&[1], 0).unwrap();
        let expect = RationalGF::new(MultivariatePoly::one(1), vec![vec![1], vec![1]]);
        assert!(t.equal(&expect));

        // d=(1), g=1: sum n z^n = z/(1-z)^2
        let t1 = tail_term(&[1], 1).unwrap();
        let expect1 = RationalGF::new(
            MultivariatePoly::monomial(vec![1], BigInt::one()),
            vec![vec![1], vec![1]],
        );
        assert!(t1.equal(&expect1));
    }

    #[test]
    fn tail_coefficient_contract_two_vars() {
        // d=(1,1), g=1: coefficient n1+n2 on n1+n2 >= 1
        let t = tail_term(&[1, 1], 1).unwrap();
        let s = t.expand(6).unwrap();
        for n1 in 0..=6i64 {
            for n2 in 0..=6 - n1 {
                let want = if n1 + n2 >= 1 { n1 + n2 } else { 0 };
                assert_eq!(s.coeff(&[n1, n2]), BigInt::from(want), "({n1},{n2})");
            }
        }
    }

    #[test]
    fn halfspace_genfun_agrees_with_general_brion() {
        // the specialized vertex/cone description must match the generic
        // polyhedron machinery on the same polyhedron
        for (d, g) in [
            (vec![1i64], 1i64),
            (vec![2, -1], 2),
            (vec![1, 1], 0),
            (vec![-2, 1, 0], 1),
            (vec![-1], 0),
        ] {
            let k = d.len();
            let special = orthant_halfspace_genfun(&d, g).unwrap();
            let mut rows: Vec<Vec<i64>> = (0..k)
                .map(|i| {
                    let mut r = vec![0; k];
                    r[i] = 1;
                    r
                })
                .collect();
            rows.push(d.clone());
            let mut rhs = vec![0i64; k];
            rhs.push(2 * g - 1);
            let p = RationalPolyhedron::from_i64(&rows, &rhs);
            let general = brion_genfun(&p, &Sublattice::full(k)).unwrap();
            assert!(
                special.normalize().equal(&general),
                "mismatch for d={d:?}, g={g}"
            );
        }
    }

    #[test]
    fn tail_mixed_signs() {
        let d = vec![2, -1];
        let g = 2;
        let t = tail_term(&d, g).unwrap();
        let s = t.expand(8).unwrap();
        for n1 in 0..=8i64 {
            for n2 in 0..=8 - n1 {
                let w = 2 * n1 - n2;
                let want = if w >= 2 * g - 1 { w - g + 1 } else { 0 };
                assert_eq!(s.coeff(&[n1, n2]), BigInt::from(want), "({n1},{n2})");
                assert!(total_degree(&[n1, n2]) <= 8);
            }
        }
    }
}
