//! PBW normal ordering in `U(g_n)`, the central quotient `z ↦ s²`, and the
//! action on Verma modules.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};

use crate::error::{Error, ParseError, Result};
use crate::lie::{BasisElement, LieElement, SymplecticOscillator, Weight};
use crate::parse::{parse_expr, write_linear_combination, ExprContext, ScalarContext, SymbolSet};
use crate::scalar::{Scalar, Q};

/// A PBW monomial: basis indices in nondecreasing PBW order, with repetition.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PbwMonomial(pub(crate) Vec<u16>);

impl PbwMonomial {
    pub fn one() -> Self {
        PbwMonomial(Vec::new())
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Exponent vector over the ordered basis.
    pub fn exponents(&self, dim: usize) -> Vec<u32> {
        let mut e = vec![0; dim];
        for &k in &self.0 {
            e[k as usize] += 1;
        }
        e
    }

    fn display(&self, alg: &SymplecticOscillator) -> String {
        let mut parts = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let mut j = k;
            while j < self.0.len() && self.0[j] == self.0[k] {
                j += 1;
            }
            let name = alg.element(self.0[k]).to_string();
            if j - k == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{}", j - k));
            }
            k = j;
        }
        parts.join("*")
    }
}

/// Monomials are listed by degree, then lexicographically in PBW order.
impl Ord for PbwMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PbwMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which inversion the rewriting resolves next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Production strategy; results are memoized per rank.
    RightmostFirst,
    LeftmostFirst,
}

type NormalForm = Arc<Vec<(Vec<u16>, Q)>>;

fn inversions(word: &[u16]) -> Vec<usize> {
    (0..word.len().saturating_sub(1)).filter(|&i| word[i] > word[i + 1]).collect()
}

fn accumulate(acc: &mut HashMap<Vec<u16>, Q>, part: &[(Vec<u16>, Q)], scale: &Q) {
    for (m, c) in part {
        let e = acc.entry(m.clone()).or_insert_with(Q::zero);
        *e += c * scale;
    }
}

fn finish(acc: HashMap<Vec<u16>, Q>) -> NormalForm {
    let mut v: Vec<(Vec<u16>, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Arc::new(v)
}

/// One rewriting step at inversion `i`: `A x y B → A y x B + A [x,y] B`.
fn rewrite_children(alg: &SymplecticOscillator, word: &[u16], i: usize) -> (Vec<u16>, Vec<(Vec<u16>, Q)>) {
    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    let mut shorter = Vec::new();
    for (k, q) in alg.structure(word[i], word[i + 1]) {
        let mut w = Vec::with_capacity(word.len() - 1);
        w.extend_from_slice(&word[..i]);
        w.push(*k);
        w.extend_from_slice(&word[i + 2..]);
        shorter.push((w, q.clone()));
    }
    (swapped, shorter)
}

fn reduce_memo(alg: &SymplecticOscillator, word: &[u16]) -> NormalForm {
    let inv = inversions(word);
    let Some(&i) = inv.last() else {
        return Arc::new(vec![(word.to_vec(), Q::one())]);
    };
    if let Some(hit) = alg.normal_order_memo.read().expect("memo poisoned").get(word) {
        return hit.clone();
    }
    let (swapped, shorter) = rewrite_children(alg, word, i);
    let mut acc = HashMap::new();
    accumulate(&mut acc, &reduce_memo(alg, &swapped), &Q::one());
    for (w, q) in shorter {
        accumulate(&mut acc, &reduce_memo(alg, &w), &q);
    }
    let result = finish(acc);
    alg.normal_order_memo
        .write()
        .expect("memo poisoned")
        .entry(word.to_vec())
        .or_insert_with(|| result.clone());
    result
}

fn reduce_with(
    alg: &SymplecticOscillator,
    word: &[u16],
    choose: &mut dyn FnMut(&[usize]) -> usize,
    memo: &mut HashMap<Vec<u16>, NormalForm>,
    use_memo: bool,
) -> NormalForm {
    let inv = inversions(word);
    if inv.is_empty() {
        return Arc::new(vec![(word.to_vec(), Q::one())]);
    }
    if use_memo {
        if let Some(hit) = memo.get(word) {
            return hit.clone();
        }
    }
    let i = inv[choose(&inv) % inv.len()];
    let (swapped, shorter) = rewrite_children(alg, word, i);
    let mut acc = HashMap::new();
    let first = reduce_with(alg, &swapped, choose, memo, use_memo);
    accumulate(&mut acc, &first, &Q::one());
    for (w, q) in shorter {
        let part = reduce_with(alg, &w, choose, memo, use_memo);
        accumulate(&mut acc, &part, &q);
    }
    let result = finish(acc);
    if use_memo {
        memo.insert(word.to_vec(), result.clone());
    }
    result
}

fn word_indices(alg: &SymplecticOscillator, word: &[BasisElement]) -> Result<Vec<u16>> {
    word.iter().map(|e| alg.index_of(e)).collect()
}

fn from_normal_form(n: usize, nf: &[(Vec<u16>, Q)]) -> UEAElement {
    let mut out = UEAElement::zero(n);
    for (m, q) in nf {
        out.add_term(PbwMonomial(m.clone()), &Scalar::from(q));
    }
    out
}

/// The product of `word` in `U(g_n)`, as a canonical PBW combination.
pub fn normal_order(word: &[BasisElement], n: usize) -> Result<UEAElement> {
    normal_order_with(word, n, Strategy::RightmostFirst)
}

pub fn normal_order_with(word: &[BasisElement], n: usize, strategy: Strategy) -> Result<UEAElement> {
    let alg = SymplecticOscillator::rank(n)?;
    let w = word_indices(&alg, word)?;
    let nf = match strategy {
        Strategy::RightmostFirst => reduce_memo(&alg, &w),
        Strategy::LeftmostFirst => reduce_with(&alg, &w, &mut |_| 0, &mut HashMap::new(), true),
    };
    Ok(from_normal_form(n, &nf))
}

/// Normal ordering where `choose` picks which inversion to resolve: it gets
/// the positions of all current inversions and returns an index into them.
/// Nothing is memoized, so every choice is honoured.
pub fn normal_order_by(
    word: &[BasisElement],
    n: usize,
    choose: &mut dyn FnMut(&[usize]) -> usize,
) -> Result<UEAElement> {
    let alg = SymplecticOscillator::rank(n)?;
    let w = word_indices(&alg, word)?;
    let nf = reduce_with(&alg, &w, choose, &mut HashMap::new(), false);
    Ok(from_normal_form(n, &nf))
}

/// Element of `U(g_n)` in PBW normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct UEAElement {
    n: usize,
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl UEAElement {
    pub fn zero(n: usize) -> Self {
        UEAElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        UEAElement::scalar(n, Scalar::one())
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        let mut out = UEAElement::zero(n);
        out.add_term(PbwMonomial::one(), &c);
        out
    }

    pub fn generator(n: usize, e: &BasisElement) -> Result<Self> {
        let alg = SymplecticOscillator::rank(n)?;
        let k = alg.index_of(e)?;
        let mut out = UEAElement::zero(n);
        out.add_term(PbwMonomial(vec![k]), &Scalar::one());
        Ok(out)
    }

    pub fn from_lie(x: &LieElement) -> Result<Self> {
        let mut out = UEAElement::zero(x.rank());
        for (e, c) in x.terms() {
            out = out.add(&UEAElement::generator(x.rank(), e)?.scale(c));
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<PbwMonomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(PbwMonomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &PbwMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub(crate) fn add_term(&mut self, m: PbwMonomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let sum = &*v + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, other: &UEAElement) -> UEAElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &UEAElement) -> UEAElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> UEAElement {
        if c.is_zero() {
            return UEAElement::zero(self.n);
        }
        UEAElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn multiply(&self, other: &UEAElement) -> Result<UEAElement> {
        multiply(self, other)
    }

    /// Monomials as basis-element words, in the canonical listing order.
    pub fn monomial_words(&self) -> Result<Vec<(Vec<BasisElement>, Scalar)>> {
        let alg = SymplecticOscillator::rank(self.n)?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| (m.0.iter().map(|&k| alg.element(k).clone()).collect(), c.clone()))
            .collect())
    }

    /// `(monomial, coefficient)` strings in canonical order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let alg = SymplecticOscillator::rank(self.n).expect("rank validated at construction");
        self.terms
            .iter()
            .map(|(m, c)| {
                let name = if m.is_one() { "1".to_string() } else { m.display(&alg) };
                (name, c.to_string())
            })
            .collect()
    }

    pub fn parse(text: &str, n: usize, symbols: &SymbolSet) -> std::result::Result<Self, ParseError> {
        SymplecticOscillator::rank(n).map_err(|e| ParseError::new(e.to_string(), text, 1))?;
        parse_expr(text, &UeaContext { n, symbols })
    }
}

impl fmt::Display for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = SymplecticOscillator::rank(self.n).map_err(|_| fmt::Error)?;
        let items: Vec<(String, Scalar)> = self.terms.iter().map(|(m, c)| (m.display(&alg), c.clone())).collect();
        write_linear_combination(f, &items)
    }
}

impl fmt::Debug for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UEAElement({self})")
    }
}

struct UeaContext<'a> {
    n: usize,
    symbols: &'a SymbolSet,
}

impl ExprContext for UeaContext<'_> {
    type Value = UEAElement;

    fn scalar(&self, c: Scalar) -> UEAElement {
        UEAElement::scalar(self.n, c)
    }

    fn ident(&self, name: &str, col: usize) -> std::result::Result<UEAElement, ParseError> {
        let looks_basis = name == "z" || name.starts_with("X[") || (name.starts_with('h') && name[1..].parse::<usize>().is_ok());
        if looks_basis {
            let e = BasisElement::parse(name, self.n).map_err(|mut err| {
                err.position = col;
                err
            })?;
            return UEAElement::generator(self.n, &e).map_err(|err| ParseError::new(err.to_string(), name, col));
        }
        let s = ScalarContext {
            symbols: Some(self.symbols),
        }
        .symbol(name, col)?;
        Ok(UEAElement::scalar(self.n, s))
    }

    fn add(&self, a: UEAElement, b: UEAElement) -> UEAElement {
        a.add(&b)
    }

    fn neg(&self, a: UEAElement) -> UEAElement {
        a.scale(&Scalar::from_int(-1))
    }

    fn mul(&self, a: UEAElement, b: UEAElement, col: usize) -> std::result::Result<UEAElement, ParseError> {
        multiply(&a, &b).map_err(|e| ParseError::new(e.to_string(), "*", col))
    }

    fn as_scalar(&self, a: &UEAElement) -> Option<Scalar> {
        match a.terms.len() {
            0 => Some(Scalar::zero()),
            1 => a.terms.get(&PbwMonomial::one()).cloned(),
            _ => None,
        }
    }
}

/// Product in `U(g_n)`.
pub fn multiply(u: &UEAElement, v: &UEAElement) -> Result<UEAElement> {
    if u.n != v.n {
        return Err(Error::RankMismatch {
            expected: u.n,
            found: v.n,
        });
    }
    let alg = SymplecticOscillator::rank(u.n)?;
    let mut out = UEAElement::zero(u.n);
    for (mu, cu) in &u.terms {
        for (mv, cv) in &v.terms {
            let coeff = cu * cv;
            let mut word = mu.0.clone();
            word.extend_from_slice(&mv.0);
            for (m, q) in reduce_memo(&alg, &word).iter() {
                out.add_term(PbwMonomial(m.clone()), &(&coeff * &Scalar::from(q)));
            }
        }
    }
    Ok(out)
}

/// Image in `U(g_n)/⟨z − s²⟩`: every `z` factor becomes `s²`.
pub fn reduce_central(u: &UEAElement) -> UEAElement {
    let alg = SymplecticOscillator::rank(u.n).expect("rank validated at construction");
    let z = alg.central_index();
    let s2 = Scalar::s().pow(2);
    let mut out = UEAElement::zero(u.n);
    for (m, c) in &u.terms {
        let k = m.0.iter().filter(|&&x| x == z).count() as u32;
        let rest: Vec<u16> = m.0.iter().copied().filter(|&x| x != z).collect();
        out.add_term(PbwMonomial(rest), &(c * &s2.pow(k)));
    }
    out
}

/// A vector `Σ c·m·v_λ` of the Verma module `M(ż, λ)` with `ż = λ(z)`; each
/// monomial `m` uses only `n_-` letters.
#[derive(Clone, PartialEq, Eq)]
pub struct VermaVector {
    lambda: Weight,
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl VermaVector {
    /// The highest-weight vector `v_λ`.
    pub fn highest(lambda: Weight) -> Result<Self> {
        if lambda.rank() == 0 {
            return Err(Error::ZeroRank);
        }
        let mut terms = BTreeMap::new();
        terms.insert(PbwMonomial::one(), Scalar::one());
        Ok(VermaVector { lambda, terms })
    }

    pub fn zero(lambda: Weight) -> Self {
        VermaVector {
            lambda,
            terms: BTreeMap::new(),
        }
    }

    pub fn lambda(&self) -> &Weight {
        &self.lambda
    }

    pub fn rank(&self) -> usize {
        self.lambda.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<PbwMonomial, Scalar> {
        &self.terms
    }

    /// `u·v_λ` for `u ∈ U(n_-)`, given as a PBW element.
    pub fn from_lowering(u: &UEAElement, lambda: Weight) -> Result<Self> {
        act_on_verma(u, &VermaVector::highest(lambda)?)
    }

    /// The same vector viewed as the element `Σ c·m` of `U(n_-)`.
    pub fn as_uea(&self) -> UEAElement {
        UEAElement {
            n: self.rank(),
            terms: self.terms.clone(),
        }
    }

    /// Weight of each monomial as an ε-offset from λ.
    pub fn offsets(&self) -> Result<Vec<Vec<i64>>> {
        let alg = SymplecticOscillator::rank(self.rank())?;
        Ok(self
            .terms
            .keys()
            .map(|m| {
                let mut w = vec![0i64; self.rank()];
                for &k in &m.0 {
                    for (acc, x) in w.iter_mut().zip(alg.weight_of_index(k)) {
                        *acc += x;
                    }
                }
                w
            })
            .collect())
    }

    pub fn add(&self, other: &VermaVector) -> Result<VermaVector> {
        if self.lambda != other.lambda {
            return Err(Error::InvalidVector("vectors of different Verma modules".into()));
        }
        let mut out = self.clone();
        let mut u = out.as_uea();
        for (m, c) in &other.terms {
            u.add_term(m.clone(), c);
        }
        out.terms = u.terms;
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> VermaVector {
        VermaVector {
            lambda: self.lambda.clone(),
            terms: self.as_uea().scale(c).terms,
        }
    }
}

impl fmt::Display for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = SymplecticOscillator::rank(self.rank()).map_err(|_| fmt::Error)?;
        let items: Vec<(String, Scalar)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let name = if m.is_one() {
                    "v".to_string()
                } else {
                    format!("{}*v", m.display(&alg))
                };
                (name, c.clone())
            })
            .collect();
        write_linear_combination(f, &items)
    }
}

impl fmt::Debug for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VermaVector({self})")
    }
}

/// `u·v` in `M(ż, λ)`: normal order, drop monomials ending in an `n_+`
/// letter, evaluate `h_i` and `z` on `λ`.
pub fn act_on_verma(u: &UEAElement, v: &VermaVector) -> Result<VermaVector> {
    let n = v.rank();
    if u.n != n {
        return Err(Error::RankMismatch { expected: n, found: u.n });
    }
    let alg = SymplecticOscillator::rank(n)?;
    let neg = alg.negative_count() as u16;
    let z = alg.central_index();
    let mut out = UEAElement::zero(n);
    for (mu, cu) in &u.terms {
        for (mv, cv) in &v.terms {
            let coeff = cu * cv;
            let mut word = mu.0.clone();
            word.extend_from_slice(&mv.0);
            for (m, q) in reduce_memo(&alg, &word).iter() {
                if m.last().is_some_and(|&k| k > z) {
                    continue;
                }
                let split = m.iter().take_while(|&&k| k < neg).count();
                let mut c = &coeff * &Scalar::from(q);
                for &k in &m[split..] {
                    let val = v.lambda.value_on(alg.element(k)).expect("Cartan or central letter");
                    c = &c * &val;
                }
                out.add_term(PbwMonomial(m[..split].to_vec()), &c);
            }
        }
    }
    Ok(VermaVector {
        lambda: v.lambda.clone(),
        terms: out.terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str, n: usize) -> BasisElement {
        BasisElement::parse(s, n).unwrap()
    }

    fn u(s: &str, n: usize) -> UEAElement {
        UEAElement::parse(s, n, &SymbolSet::standard(n)).unwrap()
    }

    #[test]
    fn heisenberg_pair() {
        let r = normal_order(&[b("X[+e1]", 1), b("X[-e1]", 1)], 1).unwrap();
        assert_eq!(r.to_string(), "z + X[-e1]*X[+e1]");
    }

    #[test]
    fn sl2_pair() {
        let r = normal_order(&[b("X[+2e1]", 1), b("X[-2e1]", 1)], 1).unwrap();
        assert_eq!(r, u("X[-2e1]*X[+2e1] + 4*h1", 1));
    }

    #[test]
    fn ordered_word_is_unchanged() {
        let r = normal_order(&[b("h1", 1), b("h1", 1)], 1).unwrap();
        assert_eq!(r.to_string(), "h1^2");
        assert_eq!(normal_order(&[], 2).unwrap(), UEAElement::one(2));
    }

    #[test]
    fn strategies_agree() {
        let w = [b("X[+e1]", 2), b("X[+2e2]", 2), b("X[-e1-e2]", 2), b("X[-e2]", 2), b("h1", 2)];
        let r = normal_order(&w, 2).unwrap();
        assert_eq!(normal_order_with(&w, 2, Strategy::LeftmostFirst).unwrap(), r);
        let mut k = 0usize;
        let alt = normal_order_by(&w, 2, &mut |inv| {
            k += 1;
            k % inv.len()
        })
        .unwrap();
        assert_eq!(alt, r);
    }

    #[test]
    fn central_reduction() {
        assert_eq!(reduce_central(&u("z", 1)), u("s^2", 1));
        assert_eq!(reduce_central(&u("z^2 h1", 1)), u("s^4 h1", 1));
        assert_eq!(reduce_central(&u("X[-e1] X[+e1] + z", 1)), u("X[-e1]*X[+e1] + s^2", 1));
    }

    #[test]
    fn associativity_instance() {
        let x = u("X[+e1]", 1);
        let y = u("X[-e1]", 1);
        let left = multiply(&multiply(&x, &y).unwrap(), &x).unwrap();
        let right = multiply(&x, &multiply(&y, &x).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(multiply(&x, &UEAElement::one(1)).unwrap(), x);
    }

    #[test]
    fn verma_action_on_highest_vector() {
        let lambda = Weight::new(vec![Scalar::symbol("l1"), Scalar::symbol("l2")], Scalar::s().pow(2));
        let v = VermaVector::highest(lambda.clone()).unwrap();
        let r = act_on_verma(&u("h1", 2), &v).unwrap();
        assert_eq!(r, v.scale(&Scalar::symbol("l1")));
        let r = act_on_verma(&u("X[+e1] X[-e1]", 2), &v).unwrap();
        assert_eq!(r, v.scale(&Scalar::s().pow(2)));
        let r = act_on_verma(&u("X[+e1-e2] X[-e1]", 2), &v).unwrap();
        assert_eq!(r, act_on_verma(&u("-X[-e2]", 2), &v).unwrap());
        assert!(act_on_verma(&u("X[+e1]", 2), &v).unwrap().is_zero());
    }

    #[test]
    fn display_round_trips() {
        for text in ["X[-2e1]*X[+2e1] + 4*h1", "(s^2-1)/2*h1^2 - z", "3/4 + s*X[-e1]"] {
            let v = u(text, 1);
            assert_eq!(u(&v.to_string(), 1), v, "{text}");
        }
    }
}
