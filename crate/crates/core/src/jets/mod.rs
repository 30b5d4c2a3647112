//! Jet spaces, prolongation of formal maps and the universal chain-rule
//! polynomials.
//!
//! Jet coordinates are raw partials: `Lambda_{nu, j}` stands for
//! `d^nu F_j`, with no factorial normalization.

pub mod poly;
pub mod prolong;
pub mod universal;
pub mod value;

pub use poly::{JetCoord, JetMonomial, JetPolynomial, LambdaPoly};
pub use prolong::{
    expand_with_tables, ideal_prolong, jet_coords, jet_space_dim, prolong, test_jet_map, Expansion, JetMap,
};
pub use universal::{universal_polynomials, UniversalPolys};
pub use value::{jet_of_map, JetValue};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;
    use crate::powerseries::{MultiIndex, Series, SeriesMap};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::from_slice(e)
    }

    #[test]
    fn jet_of_square() {
        let x = Series::var(1, 0, 6);
        let f = SeriesMap::new(1, vec![x.mul(&x)]).unwrap();
        let j = jet_of_map(&f, 2, &[0]).unwrap();
        assert_eq!(j.entry(&mi(&[1])).unwrap()[0], x.scale(&Coefficient::from_int(2)).truncate(5));
        assert_eq!(j.entry(&mi(&[2])).unwrap()[0], Series::constant(1, 4, Coefficient::from_int(2)));
        assert!(jet_of_map(&f, 7, &[0]).is_err());
    }

    #[test]
    fn prolong_square() {
        // (y^2)^(1) = (L0^2, 2 L0 L1)
        let y = Series::var(1, 0, 5);
        let phi = SeriesMap::new(1, vec![y.mul(&y)]).unwrap();
        let p = prolong(&phi, 1, 1).unwrap();
        let d = p.component(&mi(&[1]), 0);
        let l1 = JetMonomial::coord(JetCoord::new(mi(&[1]), 0));
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.coeff(&l1), y.scale(&Coefficient::from_int(2)).truncate(4));
        assert!(p.is_triangular());
    }

    #[test]
    fn universal_small_cases() {
        let t = universal_polynomials(1, 1, 3);
        let (z, one, two) = (mi(&[0]), mi(&[1]), mi(&[2]));
        assert!(t.r_entry(&z, &z).is_one());
        assert!(t.r_entry(&one, &z).is_zero());
        // d^2 g(f) = g'' f'^2 + g' f''
        let l1 = LambdaPoly::coord(JetCoord::new(one.clone(), 0));
        let l2 = LambdaPoly::coord(JetCoord::new(two.clone(), 0));
        assert_eq!(t.r_entry(&two, &one), l2);
        assert_eq!(t.r_entry(&two, &two), l1.mul(&l1));
        assert!(t.p_entry(&two, &z, &two).is_one());
        let t2 = universal_polynomials(2, 1, 2);
        assert!(t2.p_entry(&mi(&[2, 0]), &mi(&[0]), &mi(&[2, 0])).is_one());
        assert!(std::sync::Arc::ptr_eq(&t2, &universal_polynomials(2, 1, 2)));
    }
}
