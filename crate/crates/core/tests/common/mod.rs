#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use wbar::{Chain, Coeff, GroupElement, GroupModel, Simplex};

pub fn free2() -> Arc<GroupModel> {
    Arc::new(GroupModel::free(2).unwrap())
}

pub fn z2() -> Arc<GroupModel> {
    Arc::new(GroupModel::free_abelian(2).unwrap())
}

pub fn q(n: i64, d: i64) -> Coeff {
    Coeff::new(BigInt::from(n), BigInt::from(d))
}

/// Elements of word length at most `len` (free groups) or coordinates in `[-len, len]`.
pub fn element(model: Arc<GroupModel>, len: usize) -> BoxedStrategy<GroupElement> {
    let m = model.clone();
    if model.to_string().starts_with("free:") {
        proptest::collection::vec(prop::sample::select(vec!['a', 'A', 'b', 'B']), 0..=len)
            .prop_map(move |cs| m.parse_element(&cs.into_iter().collect::<String>()).unwrap())
            .boxed()
    } else {
        let l = len as i64;
        let rank = model.generators().len() / 2;
        proptest::collection::vec(-l..=l, rank)
            .prop_map(move |v| m.parse_element(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).unwrap())
            .boxed()
    }
}

pub fn coeff() -> impl Strategy<Value = Coeff> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

pub fn chain(model: Arc<GroupModel>, degree: usize, len: usize, max_support: usize) -> BoxedStrategy<Chain> {
    let simplex = proptest::collection::vec(element(model.clone(), len), degree).prop_map(Simplex::new);
    proptest::collection::vec((simplex, coeff()), 0..=max_support)
        .prop_map(move |terms| {
            let mut c = Chain::zero(model.clone(), degree);
            for (s, a) in terms {
                c.add_term(s, a).unwrap();
            }
            c
        })
        .boxed()
}

/// `c` with the simplices of diameter 0 removed.
pub fn nondegenerate(c: &Chain) -> Chain {
    let m = c.model().clone();
    let terms: Vec<_> = c.iter().filter(|(s, _)| s.diameter(&m) > 0).map(|(s, a)| (s.clone(), a.clone())).collect();
    Chain::from_terms(m, c.degree(), terms).unwrap()
}
