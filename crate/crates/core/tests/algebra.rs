use oak_core::lie::weight_vector;
use oak_core::uea::{
    act_on_verma, normal_order, normal_order_by, normal_order_with, PbwMonomial, Strategy, UEAElement, VermaVector,
};
use oak_core::{BasisElement, LieElement, Scalar, SymplecticOscillator, Weight};
use proptest::prelude::*;

fn word_from(n: usize, picks: &[usize]) -> Vec<BasisElement> {
    let alg = SymplecticOscillator::rank(n).unwrap();
    picks.iter().map(|&k| alg.basis()[k % alg.dim()].clone()).collect()
}

fn total_weight(n: usize, word: &[BasisElement]) -> Vec<i64> {
    let mut w = vec![0; n];
    for e in word {
        for (a, b) in w.iter_mut().zip(weight_vector(e, n)) {
            *a += b;
        }
    }
    w
}

fn monomial_weight(n: usize, m: &PbwMonomial) -> Vec<i64> {
    let alg = SymplecticOscillator::rank(n).unwrap();
    let word: Vec<BasisElement> = m.letters().iter().map(|&k| alg.element(k).clone()).collect();
    total_weight(n, &word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn strategies_agree(n in 1usize..=2, picks in prop::collection::vec(0usize..64, 0..=6), seed in any::<u64>()) {
        let word = word_from(n, &picks);
        let right = normal_order_with(&word, n, Strategy::RightmostFirst).unwrap();
        let left = normal_order_with(&word, n, Strategy::LeftmostFirst).unwrap();
        let mut state = seed;
        let random = normal_order_by(&word, n, &mut |inv: &[usize]| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize % inv.len()
        }).unwrap();
        prop_assert_eq!(&right, &left);
        prop_assert_eq!(&right, &random);
    }

    #[test]
    fn normal_order_respects_filtration(n in 1usize..=2, picks in prop::collection::vec(0usize..64, 0..=5)) {
        let word = word_from(n, &picks);
        let alg = SymplecticOscillator::rank(n).unwrap();
        let u = normal_order(&word, n).unwrap();
        prop_assert!(u.degree() <= word.len());
        // the leading symbol is the sorted word with coefficient one
        let mut sorted: Vec<u16> = word.iter().map(|e| alg.index_of(e).unwrap()).collect();
        sorted.sort();
        let top: Vec<(&PbwMonomial, &Scalar)> = u.terms().iter().filter(|(m, _)| m.degree() == word.len()).collect();
        prop_assert_eq!(top.len(), 1);
        prop_assert_eq!(top[0].0.letters(), &sorted[..]);
        prop_assert!(top[0].1.is_one());
    }

    #[test]
    fn normal_order_preserves_weight(n in 1usize..=2, picks in prop::collection::vec(0usize..64, 0..=5)) {
        let word = word_from(n, &picks);
        let w = total_weight(n, &word);
        for m in normal_order(&word, n).unwrap().terms().keys() {
            prop_assert_eq!(monomial_weight(n, m), w.clone());
        }
    }

    #[test]
    fn multiplication_is_associative(
        n in 1usize..=2,
        a in prop::collection::vec(0usize..64, 0..=3),
        b in prop::collection::vec(0usize..64, 0..=3),
        c in prop::collection::vec(0usize..64, 0..=3),
    ) {
        let (x, y, z) = (
            normal_order(&word_from(n, &a), n).unwrap(),
            normal_order(&word_from(n, &b), n).unwrap(),
            normal_order(&word_from(n, &c), n).unwrap(),
        );
        let lhs = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let rhs = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_of_generators_is_the_bracket(n in 1usize..=3, i in 0usize..64, j in 0usize..64) {
        let w = word_from(n, &[i, j]);
        let x = UEAElement::generator(n, &w[0]).unwrap();
        let y = UEAElement::generator(n, &w[1]).unwrap();
        let comm = x.multiply(&y).unwrap().sub(&y.multiply(&x).unwrap());
        let br = LieElement::basis(n, w[0].clone()).unwrap().bracket(&LieElement::basis(n, w[1].clone()).unwrap()).unwrap();
        prop_assert_eq!(comm, UEAElement::from_lie(&br).unwrap());
    }

    #[test]
    fn verma_action_is_a_module_action(
        n in 1usize..=2,
        a in prop::collection::vec(0usize..64, 0..=3),
        b in prop::collection::vec(0usize..64, 0..=3),
        l in prop::collection::vec(-5i64..=5, 2),
    ) {
        let lambda = Weight::new(l[..n].iter().map(|&x| Scalar::ratio(x, 2)).collect(), Scalar::s().pow(2));
        let v = VermaVector::highest(lambda).unwrap();
        let x = normal_order(&word_from(n, &a), n).unwrap();
        let y = normal_order(&word_from(n, &b), n).unwrap();
        let lhs = act_on_verma(&x.multiply(&y).unwrap(), &v).unwrap();
        let rhs = act_on_verma(&x, &act_on_verma(&y, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn bracket_linear_in_each_argument() {
    let n = 2;
    let alg = SymplecticOscillator::rank(n).unwrap();
    let b = alg.basis();
    let x = LieElement::from_terms(n, [(b[0].clone(), Scalar::from_int(2)), (b[5].clone(), Scalar::symbol("s"))]).unwrap();
    let y = LieElement::from_terms(n, [(b[3].clone(), Scalar::one()), (b[12].clone(), Scalar::ratio(-1, 3))]).unwrap();
    let mut expect = LieElement::zero(n);
    for (e, c) in x.terms() {
        for (f, d) in y.terms() {
            let br = alg.bracket_basis(e, f).unwrap();
            expect = expect.add(&br.scale(&(c * d)));
        }
    }
    assert_eq!(x.bracket(&y).unwrap(), expect);
}
