mod common;

use std::sync::Arc;

use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use wbar::{Chain, Coeff, GroupHomomorphism, GroupModel, Simplex};

/// Boundary computed on full vertex lists `[v_0, ..., v_k]` with `v_0 = e`,
/// normalizing each face by left-multiplying with the inverse of its first vertex.
fn oracle_boundary(c: &Chain) -> Chain {
    let model = c.model().clone();
    let mut out = Chain::zero(model.clone(), c.degree() - 1);
    for (s, a) in c.iter() {
        let mut full = vec![model.identity()];
        full.extend(s.vertices().iter().cloned());
        for j in 0..full.len() {
            let mut face = full.clone();
            face.remove(j);
            let inv = model.inverse(&face[0]);
            let rebased = face[1..].iter().map(|g| model.multiply(&inv, g).unwrap());
            let sign = if j % 2 == 0 { a.clone() } else { -a.clone() };
            out.add_term(Simplex::new(rebased), sign).unwrap();
        }
    }
    out
}

#[test]
fn boundary_of_an_edge_and_a_triangle() {
    let m = free2();
    let e = Chain::basis(m.clone(), Simplex::parse(&m, &["ab"]).unwrap()).unwrap();
    // ∂[e, ab] = [ab] - [e] in degree 0, i.e. the empty tuple twice with opposite signs
    assert!(e.boundary().unwrap().is_zero());
    let t = Chain::basis(m.clone(), Simplex::parse(&m, &["a", "ab"]).unwrap()).unwrap();
    let dt = t.boundary().unwrap();
    let expect = |w: &str| Simplex::parse(&m, &[w]).unwrap();
    assert_eq!(dt.len(), 3);
    assert_eq!(dt.coefficient(&expect("b")), Some(&q(1, 1)));
    assert_eq!(dt.coefficient(&expect("ab")), Some(&q(-1, 1)));
    assert_eq!(dt.coefficient(&expect("a")), Some(&q(1, 1)));
}

#[test]
fn degree_zero_has_no_boundary() {
    assert!(Chain::basis(free2(), Simplex::new([])).unwrap().boundary().is_err());
}

#[test]
fn pushforward_of_a_projection() {
    let src = z2();
    let tgt = Arc::new(GroupModel::free_abelian(1).unwrap());
    let phi = GroupHomomorphism::parse(src.clone(), tgt.clone(), "1;0").unwrap();
    let mut c = Chain::zero(src.clone(), 1);
    c.add_term(Simplex::parse(&src, &["2,1"]).unwrap(), q(1, 2)).unwrap();
    c.add_term(Simplex::parse(&src, &["2,-3"]).unwrap(), q(1, 3)).unwrap();
    let image = phi.push_forward(&c).unwrap();
    assert_eq!(image.len(), 1);
    assert_eq!(image.coefficient(&Simplex::parse(&tgt, &["2"]).unwrap()), Some(&q(5, 6)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squares_to_zero_free(c in chain(free2(), 3, 3, 20)) {
        prop_assert!(c.boundary().unwrap().boundary().unwrap().is_zero());
    }

    #[test]
    fn boundary_squares_to_zero_abelian(c in chain(z2(), 3, 3, 20)) {
        prop_assert!(c.boundary().unwrap().boundary().unwrap().is_zero());
    }

    #[test]
    fn boundary_matches_oracle(c in chain(free2(), 2, 3, 12), d in chain(z2(), 3, 2, 12)) {
        prop_assert_eq!(c.boundary().unwrap(), oracle_boundary(&c));
        prop_assert_eq!(d.boundary().unwrap(), oracle_boundary(&d));
    }

    #[test]
    fn boundary_is_linear(a in chain(free2(), 2, 3, 10), b in chain(free2(), 2, 3, 10), l in coeff()) {
        let lhs = a.scale(&l).add(&b).unwrap().boundary().unwrap();
        let rhs = a.boundary().unwrap().scale(&l).add(&b.boundary().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_arithmetic(a in chain(z2(), 2, 2, 10), b in chain(z2(), 2, 2, 10)) {
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a.clone());
        prop_assert!(a.iter().all(|(_, x)| !x.is_zero()));
    }

    #[test]
    fn pushforward_commutes_with_boundary(c in chain(z2(), 2, 3, 12)) {
        let tgt = Arc::new(GroupModel::cyclic(5).unwrap());
        let phi = GroupHomomorphism::parse(z2(), tgt, "1;1").unwrap();
        let lhs = phi.push_forward(&c.boundary().unwrap()).unwrap();
        let rhs = phi.push_forward(&c).unwrap().boundary().unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phi.push_forward(&c).unwrap().total_coefficient(), c.total_coefficient());
    }

    #[test]
    fn json_round_trip(c in chain(free2(), 2, 3, 10)) {
        let back = Chain::from_json(c.model().clone(), Some(2), &c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn group_axioms(g in element(free2(), 4), h in element(free2(), 4), k in element(free2(), 4)) {
        let m = free2();
        let gh = m.multiply(&g, &h).unwrap();
        prop_assert_eq!(m.multiply(&gh, &k).unwrap(), m.multiply(&g, &m.multiply(&h, &k).unwrap()).unwrap());
        prop_assert!(m.is_identity(&m.multiply(&g, &m.inverse(&g)).unwrap()));
        prop_assert!(m.word_length(&gh) <= m.word_length(&g) + m.word_length(&h));
        prop_assert_eq!(m.distance(&g, &h).unwrap(), m.distance(&h, &g).unwrap());
        let s = Simplex::new([g.clone(), h.clone()]);
        let expected = [m.word_length(&g), m.word_length(&h), m.distance(&g, &h).unwrap()].into_iter().max().unwrap();
        prop_assert_eq!(s.diameter(&m), expected);
    }
}

#[test]
fn coefficient_zero_is_dropped() {
    let m = free2();
    let s = Simplex::parse(&m, &["a"]).unwrap();
    let mut c = Chain::zero(m.clone(), 1);
    c.add_term(s.clone(), q(1, 2)).unwrap();
    c.add_term(s, q(-1, 2)).unwrap();
    assert!(c.is_zero());
    assert_eq!(c.total_coefficient(), Coeff::zero());
}

proptest! {
    #[test]
    fn coefficient_sums_are_exact(xs in proptest::collection::vec((any::<i64>(), 1i64..=i64::MAX), 1..12)) {
        let m = free2();
        let s = Simplex::parse(&m, &["ab"]).unwrap();
        let mut c = Chain::zero(m.clone(), 1);
        let mut want = Coeff::zero();
        for (n, d) in xs {
            let a = Coeff::new(n.into(), d.into());
            want += &a;
            c.add_term(s.clone(), a.clone()).unwrap();
            let twice = c.add(&Chain::from_terms(m.clone(), 1, [(s.clone(), a)]).unwrap()).unwrap();
            prop_assert!(twice.iter().all(|(_, x)| !x.is_zero()));
        }
        prop_assert_eq!(c.coefficient(&s).cloned().unwrap_or_else(Coeff::zero), want);
    }
}
