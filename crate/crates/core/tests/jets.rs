use crforge_core::fixtures;
use crforge_core::jets::{
    expand_with_tables, ideal_prolong, jet_coords, jet_of_map, jet_space_dim, prolong, test_jet_map, Expansion,
    JetCoord, JetMonomial, JetPolynomial,
};
use crforge_core::manifolds::SegreMapping;
use crforge_core::powerseries::{generic_rank, ideal_membership, invert_map, Membership, MultiIndex, Series, SeriesMap};
use crforge_core::Coefficient;
use proptest::prelude::*;

fn poly(nvars: usize, order: u32, terms: &[(Vec<u32>, i64, i64)]) -> Series {
    let mut s = Series::zero(nvars, order);
    for (e, re, im) in terms {
        s.add_term(MultiIndex::from_slice(e), &Coefficient::gaussian(*re, *im));
    }
    s
}

fn small_poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64, i64)>> {
    let monos: Vec<Vec<u32>> =
        MultiIndex::up_to_degree(nvars, max_deg).into_iter().filter(|m| !m.is_zero()).map(|m| m.exps()).collect();
    let n = monos.len();
    proptest::collection::vec((0..n, -3i64..=3, -2i64..=2), 1..5)
        .prop_map(move |v| v.into_iter().map(|(i, a, b)| (monos[i].clone(), a, b)).collect())
}

fn check_defining_identity(phi: &SeriesMap, f: &SeriesMap, base: &[usize], l: u32) {
    let lhs = jet_of_map(&phi.compose(f).unwrap(), l, base).unwrap();
    let pr = prolong(phi, l, base.len()).unwrap();
    let rhs = pr.evaluate(&jet_of_map(f, l, base).unwrap()).unwrap();
    for (nu, v) in &rhs {
        for (a, b) in lhs.entry(nu).unwrap().iter().zip(v) {
            assert!(a.sub(b).is_zero(), "nu={nu:?}: {a:?} vs {b:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn defining_identity_random(p1 in small_poly(2, 3), p2 in small_poly(2, 3), f1 in small_poly(2, 2), f2 in small_poly(2, 2)) {
        let order = 6;
        let phi = SeriesMap::new(2, vec![poly(2, order, &p1), poly(2, order, &p2)]).unwrap();
        let f = SeriesMap::new(2, vec![poly(2, order, &f1), poly(2, order, &f2)]).unwrap();
        check_defining_identity(&phi, &f, &[0, 1], 2);
    }

    #[test]
    fn prolongation_is_triangular(p1 in small_poly(2, 3)) {
        let phi = SeriesMap::new(2, vec![poly(2, 5, &p1)]).unwrap();
        prop_assert!(prolong(&phi, 2, 2).unwrap().is_triangular());
    }
}

#[test]
fn identity_prolongs_to_identity() {
    let id = SeriesMap::identity(2, 4);
    let p = prolong(&id, 2, 2).unwrap();
    for (nu, v) in &p.comps {
        for (j, c) in v.iter().enumerate() {
            let expect = if nu.is_zero() {
                JetPolynomial::from_series(Series::var(2, j, 4))
            } else {
                JetPolynomial::coord(JetCoord::new(nu.clone(), j), 2, 4)
            };
            assert!(c.agrees_with(&expect), "{nu:?} {j}");
        }
    }
}

#[test]
fn prolongation_of_inverse_is_inverse() {
    let order = 6;
    let x = Series::var(2, 0, order);
    let y = Series::var(2, 1, order);
    let phi = SeriesMap::new(2, vec![x.add(&y.mul(&y)), y.add(&x.mul(&y).scale(&Coefficient::gaussian(0, 1)))]).unwrap();
    let inv = invert_map(&phi).unwrap();
    let l = 2;
    let composed = prolong(&phi, l, 1).unwrap().after(&prolong(&inv, l, 1).unwrap()).unwrap();
    let id = prolong(&SeriesMap::identity(2, order), l, 1).unwrap();
    for (nu, v) in &composed.comps {
        for (a, b) in v.iter().zip(&id.comps[nu]) {
            assert!(a.agrees_with(b), "{nu:?}: {a:?}");
            assert!(a.order() >= order - 2 * l - 1);
        }
    }
}

#[test]
fn jet_with_parameters_two_orders() {
    // j_t(H(v^1(t))) against prolonged H evaluated on j_t v^1
    let m = fixtures::quadric(7).unwrap();
    let v1 = SegreMapping::standard(&m).iterate(1).unwrap();
    let h = fixtures::quadric_automorphism(
        crforge_core::Rat::from_int(1),
        Coefficient::one(),
        Coefficient::gaussian(1, 1),
        crforge_core::Rat::new(1, 2),
        7,
    )
    .unwrap();
    check_defining_identity(&h, &v1, &[0], 2);
    // parameter variant: base is one of two variables of v^2
    let v2 = SegreMapping::standard(&m).iterate(2).unwrap();
    check_defining_identity(&h, &v2, &[1], 2);
}

#[test]
fn coordinate_ideal_prolongs_to_coordinates() {
    let y = Series::var(1, 0, 4);
    let g = ideal_prolong(&SeriesMap::new(1, vec![y.clone()]).unwrap(), 1, 1).unwrap();
    assert_eq!(g.len(), 2);
    assert!(g[0].agrees_with(&JetPolynomial::from_series(y)));
    assert!(g[1].agrees_with(&JetPolynomial::coord(JetCoord::new(MultiIndex::from_slice(&[1]), 0), 1, 3)));
    let sq = Series::var(1, 0, 4).pow(2);
    assert!(ideal_prolong(&SeriesMap::new(1, vec![sq]).unwrap(), 1, 1).is_err());
}

#[test]
fn quadric_prolonged_generators() {
    let m = fixtures::quadric(6).unwrap();
    let rho = m.rho_tilde().unwrap();
    let g = ideal_prolong(&rho, 1, 2).unwrap();
    assert_eq!(g.len(), 3);
    // nu = 0: w - Q(z, zeta) with Q = tau + 2i z chi, variables (z, w, chi, tau)
    let base = g[0].as_series().unwrap();
    let expect = poly(4, 6, &[(vec![0, 1, 0, 0], 1, 0), (vec![0, 0, 0, 1], -1, 0), (vec![1, 0, 1, 0], 0, -2)]);
    assert!(base.sub(&expect).is_zero());
}

fn check_expansions(rho: &SeriesMap, n: usize, l: u32) {
    let direct = prolong(rho, l, n).unwrap();
    for route in [Expansion::ThroughSecond, Expansion::ThroughFirst] {
        let tab = expand_with_tables(rho, n, l, route).unwrap();
        for (nu, v) in &direct.comps {
            for (a, b) in v.iter().zip(&tab.comps[nu]) {
                assert!(a.agrees_with(b), "{route:?} nu={nu:?}");
            }
        }
    }
}

#[test]
fn table_expansions_match_prolongation() {
    let q = fixtures::quadric(6).unwrap();
    check_expansions(&q.rho_tilde().unwrap(), 2, 2);
    check_expansions(&q.rho_normal().unwrap(), 2, 2);
    check_expansions(q.defining(), 1, 2);
    let p = fixtures::product_hypersurface(6).unwrap();
    check_expansions(&p.rho_tilde().unwrap(), 3, 2);
    check_expansions(&p.rho_normal().unwrap(), 3, 1);
}

fn in_ideal(f: &JetPolynomial, gens: &[JetPolynomial], coords: &[JetCoord], order: u32) -> bool {
    let fs = f.to_series(coords).unwrap();
    let gs: Vec<Series> = gens.iter().map(|g| g.to_series(coords).unwrap()).collect();
    matches!(ideal_membership(&fs, &gs, order).unwrap(), Membership::Member { .. })
}

#[test]
fn both_generator_sets_give_the_same_prolonged_ideal() {
    let q = fixtures::quadric(6).unwrap();
    let (a, b) = (q.rho_tilde().unwrap(), q.rho_normal().unwrap());
    let ga = ideal_prolong(&a, 1, 1).unwrap();
    let gb = ideal_prolong(&b, 1, 1).unwrap();
    let coords = jet_coords(1, 4, 1);
    for f in &ga {
        assert!(in_ideal(f, &gb, &coords, 4));
    }
    for f in &gb {
        assert!(in_ideal(f, &ga, &coords, 4));
    }
    // a coordinate outside the ideal
    let x = JetPolynomial::coord(coords[0].clone(), 4, 5);
    assert!(!in_ideal(&x, &ga, &coords, 4));
}

#[test]
fn test_jet_map_has_full_rank() {
    for (k, r, l) in [(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1)] {
        let m = jet_space_dim(k, r, l);
        let order = (m as u32) * (l + 1) + 2;
        let phi = test_jet_map(k, r, l, order);
        assert_eq!(generic_rank(&phi).unwrap().rank, m, "k={k} r={r} l={l}");
    }
}

#[test]
fn monomial_ordering_is_graded() {
    let a = JetMonomial::coord(JetCoord::new(MultiIndex::from_slice(&[1, 0]), 1));
    let b = JetMonomial::coord(JetCoord::new(MultiIndex::from_slice(&[0, 2]), 0));
    assert!(a < b);
}
