//! Generating function of the non-negative orthant points of an affine
//! sublattice: substitute the lattice parametrization `n = offset + m B`,
//! run Brion on the resulting polyhedron in `m`-space (pointed because the
//! basis rows are independent), then map the exponents back through the
//! parametrization.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::lattice::AffineSublattice;
use crate::lattice::Sublattice;
use crate::polyhedron::{brion_genfun, RationalPolyhedron};

/// Series `sum z^n` over `n` in `N^k` intersected with the affine
/// sublattice, as a normalized rational function; zero when empty.
pub fn orthant_affine_genfun(a: &AffineSublattice) -> Result<RationalGF> {
    let k = a.ambient_dim();
    let offset = a.offset();
    let basis = a.lattice().basis();
    let r = basis.len();
    if r == 0 {
        return Ok(if offset.iter().all(|x| !x.is_negative()) {
            RationalGF::monomial(to_i64(offset)?, BigInt::from(1))
        } else {
            RationalGF::zero(k)
        });
    }
    // polyhedron in m-space: offset_i + sum_j m_j basis[j][i] >= 0
    let rows: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..r).map(|j| basis[j][i].clone()).collect())
        .collect();
    let rhs: Vec<BigInt> = offset.iter().map(|x| -x.clone()).collect();
    let poly = RationalPolyhedron::new(rows, rhs);
    let inner = brion_genfun(&poly, &Sublattice::full(r))?;
    // map m-space exponents back to z-space
    let offset_i64 = to_i64(offset)?;
    let basis_i64: Vec<Vec<i64>> = basis.iter().map(|b| to_i64(b)).collect::<Result<_>>()?;
    Ok(inner
        .substitute_exponents(&offset_i64, &basis_i64, k)
        .normalize())
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.try_into()
                .map_err(|_| Error::validation("affine sublattice coordinate exceeds machine range"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultivariatePoly;
    use num_traits::One;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn affine(offset: &[i64], gens: &[Vec<i64>]) -> AffineSublattice {
        let dim = offset.len();
        AffineSublattice::new(
            big(offset),
            Sublattice::from_generators(dim, gens.iter().map(|g| big(g)).collect()),
        )
    }

    #[test]
    fn whole_lattice() {
        let a = affine(&[0, 0], &[vec![1, 0], vec![0, 1]]);
        let gf = orthant_affine_genfun(&a).unwrap();
        let expect = RationalGF::new(MultivariatePoly::one(2), vec![vec![1, 0], vec![0, 1]]);
        assert!(gf.equal(&expect));
    }

    #[test]
    fn rank_one_line_through_standard_simplex() {
        // {(t, 0, 1-t)}: exactly two orthant points
        let a = affine(&[0, 0, 1], &[vec![1, 0, -1]]);
        let gf = orthant_affine_genfun(&a).unwrap();
        let expect = RationalGF::from_poly(MultivariatePoly::from_terms(
            3,
            vec![(vec![1, 0, 0], BigInt::one()), (vec![0, 0, 1], BigInt::one())],
        ));
        assert!(gf.equal(&expect));
    }

    #[test]
    fn mixed_free_and_bounded_directions() {
        // {(t1, t1, t1, t2, 3 - t2)}
        let a = affine(&[0, 0, 0, 0, 3], &[vec![1, 1, 1, 0, 0], vec![0, 0, 0, 1, -1]]);
        let gf = orthant_affine_genfun(&a).unwrap();
        let mut num = MultivariatePoly::zero(5);
        for t in 0..=3i64 {
            num.add_term(vec![0, 0, 0, t, 3 - t], BigInt::one());
        }
        let expect = RationalGF::new(num, vec![vec![1, 1, 1, 0, 0]]);
        assert!(gf.equal(&expect));
    }

    #[test]
    fn empty_and_point_cases() {
        let p = affine(&[2, 1], &[]);
        assert!(orthant_affine_genfun(&p)
            .unwrap()
            .equal(&RationalGF::monomial(vec![2, 1], BigInt::one())));
        let n = affine(&[-1, 0], &[]);
        assert!(orthant_affine_genfun(&n).unwrap().is_zero_form());
        // line missing the orthant entirely: offset (-1, -1) + span{(1, -1)}
        let m = affine(&[-1, -1], &[vec![1, -1]]);
        assert!(orthant_affine_genfun(&m).unwrap().is_zero_form());
    }

    #[test]
    fn congruence_sublattice_of_plane() {
        // N^2 points of {n1 = n2 mod 3} via the affine route
        let a = affine(&[0, 0], &[vec![1, 1], vec![0, 3]]);
        let gf = orthant_affine_genfun(&a).unwrap();
        let s = gf.expand(7).unwrap();
        for n1 in 0..=7i64 {
            for n2 in 0..=7 - n1 {
                let want = if (n1 - n2) % 3 == 0 { 1 } else { 0 };
                assert_eq!(s.coeff(&[n1, n2]), BigInt::from(want), "({n1},{n2})");
            }
        }
    }
}
