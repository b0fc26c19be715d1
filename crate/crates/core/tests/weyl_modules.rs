use std::collections::{BTreeSet, HashSet, VecDeque};

use oak_core::weyl::{apply, apply_neg_d2_power, straighten_highest, LaurentVector, ModuleDescriptor, WeylElement};
use oak_core::{Error, Scalar};
use proptest::prelude::*;

/// Product of generators: `0..n` are `t_i`, `n..2n` are `∂_i`.
fn weyl_word(n: usize, picks: &[usize]) -> WeylElement {
    picks.iter().fold(WeylElement::one(n), |acc, &k| {
        let k = k % (2 * n);
        let g = if k < n { WeylElement::t(n, k) } else { WeylElement::d(n, k - n) };
        acc.multiply(&g).unwrap()
    })
}

fn modules(n: usize) -> Vec<ModuleDescriptor> {
    let sym: Vec<Scalar> = (1..=n).map(|i| Scalar::symbol(&format!("a{i}"))).collect();
    let mut out = vec![ModuleDescriptor::FullLaurent(sym.clone()), ModuleDescriptor::ShaleWeil(n)];
    if n == 2 {
        out.push(ModuleDescriptor::quotient(vec![Scalar::zero(), sym[1].clone()], BTreeSet::from([0])).unwrap());
    }
    out
}

fn vector_in(module: &ModuleDescriptor, offsets: &[(i64, i64, i64)]) -> LaurentVector {
    let n = module.rank();
    let terms = offsets
        .iter()
        .map(|&(x, y, c)| (vec![x, y][..n].to_vec(), Scalar::from_int(c)))
        .filter(|(m, _)| module.contains(m));
    LaurentVector::from_terms(module.base(), terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn action_is_multiplicative(
        n in 1usize..=2,
        which in 0usize..3,
        p in prop::collection::vec(0usize..4, 0..=3),
        q in prop::collection::vec(0usize..4, 0..=3),
        offsets in prop::collection::vec((-3i64..=3, -3i64..=3, -4i64..=4), 1..=3),
    ) {
        let ms = modules(n);
        let module = &ms[which % ms.len()];
        let v = vector_in(module, &offsets);
        let (p, q) = (weyl_word(n, &p), weyl_word(n, &q));
        let lhs = apply(&p.multiply(&q).unwrap(), &v, module).unwrap();
        let rhs = apply(&p, &apply(&q, &v, module).unwrap(), module).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_relation_holds_on_modules(n in 1usize..=2, which in 0usize..3, i in 0usize..2,
        offsets in prop::collection::vec((-3i64..=3, -3i64..=3, -4i64..=4), 1..=3)) {
        let ms = modules(n);
        let module = &ms[which % ms.len()];
        let i = i % n;
        let v = vector_in(module, &offsets);
        let (t, d) = (WeylElement::t(n, i), WeylElement::d(n, i));
        let dt = apply(&d, &apply(&t, &v, module).unwrap(), module).unwrap();
        let td = apply(&t, &apply(&d, &v, module).unwrap(), module).unwrap();
        prop_assert_eq!(dt.sub(&td), v);
    }

    #[test]
    fn straightening_corrections_stay_on_support(
        k in 1usize..=3,
        comps in prop::collection::vec(prop::collection::vec((-4i64..=-1, -4i64..=4), 0..=3), 3),
    ) {
        let module = ModuleDescriptor::ShaleWeil(1);
        let w: Vec<LaurentVector> = comps[..k].iter().map(|c| {
            let terms: Vec<(i64, i64, i64)> = c.iter().map(|&(m, x)| (m, 0, x)).collect();
            vector_in(&module, &terms)
        }).collect();
        prop_assume!(w.iter().any(|c| !c.is_zero()));
        let out = straighten_highest(&w, 0, &module).unwrap();
        let t = WeylElement::t(1, 0);
        for c in &out {
            prop_assert!(apply(&t, c, &module).unwrap().is_zero());
        }
        // ∂^k t^k is diagonal on monomials, so w' − w lives on the support of w
        for (o, i) in out.iter().zip(&w) {
            let diff = o.sub(i);
            prop_assert!(diff.terms().keys().all(|m| i.terms().contains_key(m)));
        }
    }
}

#[test]
fn documented_examples() {
    let a = vec![Scalar::ratio(1, 3)];
    let f = ModuleDescriptor::FullLaurent(a.clone());
    let v = LaurentVector::basis(a.clone(), vec![0]).unwrap();
    let r = apply(&WeylElement::d(1, 0), &v, &f).unwrap();
    assert_eq!(r, LaurentVector::from_terms(a, [(vec![-1], Scalar::ratio(1, 3))]).unwrap());

    let s = ModuleDescriptor::ShaleWeil(1);
    let zero = vec![Scalar::zero()];
    let top = LaurentVector::basis(zero.clone(), vec![-1]).unwrap();
    assert!(apply(&WeylElement::t(1, 0), &top, &s).unwrap().is_zero());
    let d2 = WeylElement::d(1, 0).pow(2).unwrap();
    assert_eq!(
        apply(&d2, &top, &s).unwrap(),
        LaurentVector::from_terms(zero.clone(), [(vec![-3], Scalar::from_int(2))]).unwrap()
    );

    let w = vec![
        LaurentVector::basis(zero.clone(), vec![-2]).unwrap(),
        LaurentVector::basis(zero.clone(), vec![-1]).unwrap(),
    ];
    let out = straighten_highest(&w, 0, &s).unwrap();
    assert!(out[0].is_zero());
    assert_eq!(out[1], w[1]);
    assert!(straighten_highest(&w[..1], 0, &s).unwrap()[0].is_zero());
    assert!(matches!(
        straighten_highest(&[LaurentVector::zero(zero)], 0, &s),
        Err(Error::ZeroVector)
    ));
}

#[test]
fn inverse_of_neg_d_squared() {
    let a = vec![Scalar::symbol("a1")];
    let f = ModuleDescriptor::FullLaurent(a.clone());
    for m in -3..=3 {
        let v = LaurentVector::basis(a.clone(), vec![m]).unwrap();
        let there = apply_neg_d2_power(&v, 0, -2, &f).unwrap();
        assert_eq!(apply_neg_d2_power(&there, 0, 2, &f).unwrap(), v);
    }
    let s = ModuleDescriptor::ShaleWeil(1);
    let v = LaurentVector::basis(vec![Scalar::zero()], vec![-1]).unwrap();
    assert!(matches!(apply_neg_d2_power(&v, 0, -1, &s), Err(Error::DivisionByZero)));
}

/// Every basis vector of `S` in a box generates all of the box.
#[test]
fn shale_weil_is_cyclic_from_every_vector() {
    for n in 1..=2usize {
        let s = ModuleDescriptor::ShaleWeil(n);
        let zero = vec![Scalar::zero(); n];
        let gens: Vec<WeylElement> = (0..n).flat_map(|i| [WeylElement::t(n, i), WeylElement::d(n, i)]).collect();
        let in_box = |m: &Vec<i64>| m.iter().all(|&x| (-4..=-1).contains(&x));
        let all: Vec<Vec<i64>> = oak_core::weyl::box_points(&vec![-4; n], &vec![-1; n]);
        for start in &all {
            let mut seen: HashSet<Vec<i64>> = HashSet::from([start.clone()]);
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(m) = queue.pop_front() {
                let v = LaurentVector::basis(zero.clone(), m).unwrap();
                for g in &gens {
                    for (o, c) in apply(g, &v, &s).unwrap().terms() {
                        assert!(!c.is_zero());
                        if in_box(o) && seen.insert(o.clone()) {
                            queue.push_back(o.clone());
                        }
                    }
                }
            }
            assert_eq!(seen.len(), all.len(), "n={n}, start {start:?}");
        }
    }
}
