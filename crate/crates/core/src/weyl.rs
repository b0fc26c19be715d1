//! The rank-`n` Weyl algebra `D_n` and its weight modules `F(a)`, `G(a)`, `S`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, One};

use crate::error::{Error, ParseError, Result};
use crate::parse::{parse_expr, parse_int_list, write_linear_combination, ExprContext, ScalarContext, SymbolSet};
use crate::scalar::{Scalar, Q};

/// `t^α ∂^β` with all `t` factors on the left.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylMonomial {
    pub t: Vec<u32>,
    pub d: Vec<u32>,
}

impl WeylMonomial {
    pub fn one(n: usize) -> Self {
        WeylMonomial {
            t: vec![0; n],
            d: vec![0; n],
        }
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn degree(&self) -> u32 {
        self.t.iter().sum::<u32>() + self.d.iter().sum::<u32>()
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0
    }

    /// Weight under `ad(t_i ∂_i)`: `α − β`.
    pub fn weight(&self) -> Vec<i64> {
        self.t.iter().zip(&self.d).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    fn display(&self) -> String {
        let mut parts = Vec::new();
        for (letter, exps) in [("t", &self.t), ("d", &self.d)] {
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("{letter}{}", i + 1)),
                    _ => parts.push(format!("{letter}{}^{e}", i + 1)),
                }
            }
        }
        parts.join("*")
    }
}

impl Ord for WeylMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.t.cmp(&other.t))
            .then_with(|| self.d.cmp(&other.d))
    }
}

impl PartialOrd for WeylMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn falling(c: u32, k: u32) -> BigInt {
    (0..k).map(|j| BigInt::from(c - j)).product()
}

fn binom(b: u32, k: u32) -> BigInt {
    falling(b, k) / falling(k, k)
}

/// `∂^b t^c = Σ_k C(b,k) c!/(c−k)! t^{c−k} ∂^{b−k}` in one variable.
fn commute_one(b: u32, c: u32) -> Vec<(u32, u32, BigInt)> {
    (0..=b.min(c))
        .map(|k| (c - k, b - k, binom(b, k) * falling(c, k)))
        .collect()
}

/// Normally ordered element of `D_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    n: usize,
    terms: BTreeMap<WeylMonomial, Scalar>,
}

impl WeylElement {
    pub fn zero(n: usize) -> Self {
        WeylElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        let mut out = WeylElement::zero(n);
        out.add_term(WeylMonomial::one(n), &c);
        out
    }

    pub fn one(n: usize) -> Self {
        WeylElement::scalar(n, Scalar::one())
    }

    pub fn monomial(m: WeylMonomial, c: Scalar) -> Self {
        let mut out = WeylElement::zero(m.rank());
        out.add_term(m, &c);
        out
    }

    /// `t_i`, zero-based index.
    pub fn t(n: usize, i: usize) -> Self {
        let mut m = WeylMonomial::one(n);
        m.t[i] = 1;
        WeylElement::monomial(m, Scalar::one())
    }

    /// `∂_i`, zero-based index.
    pub fn d(n: usize, i: usize) -> Self {
        let mut m = WeylMonomial::one(n);
        m.d[i] = 1;
        WeylElement::monomial(m, Scalar::one())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<WeylMonomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(WeylMonomial::degree).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: WeylMonomial, c: &Scalar) {
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

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> WeylElement {
        if c.is_zero() {
            return WeylElement::zero(self.n);
        }
        WeylElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn multiply(&self, other: &WeylElement) -> Result<WeylElement> {
        weyl_multiply(self, other)
    }

    /// `pq − qp`.
    pub fn commutator(&self, other: &WeylElement) -> Result<WeylElement> {
        Ok(weyl_multiply(self, other)?.sub(&weyl_multiply(other, self)?))
    }

    pub fn pow(&self, k: u32) -> Result<WeylElement> {
        let mut acc = WeylElement::one(self.n);
        for _ in 0..k {
            acc = weyl_multiply(&acc, self)?;
        }
        Ok(acc)
    }

    /// `(monomial, coefficient)` strings, highest degree first.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let name = if m.is_one() { "1".to_string() } else { m.display() };
                (name, c.to_string())
            })
            .collect()
    }

    pub fn parse(text: &str, n: usize, symbols: &SymbolSet) -> std::result::Result<Self, ParseError> {
        if n == 0 {
            return Err(ParseError::new("rank must be at least 1", text, 1));
        }
        parse_expr(text, &WeylContext { n, symbols })
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(String, Scalar)> = self.terms.iter().rev().map(|(m, c)| (m.display(), c.clone())).collect();
        write_linear_combination(f, &items)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement({self})")
    }
}

struct WeylContext<'a> {
    n: usize,
    symbols: &'a SymbolSet,
}

impl ExprContext for WeylContext<'_> {
    type Value = WeylElement;

    fn scalar(&self, c: Scalar) -> WeylElement {
        WeylElement::scalar(self.n, c)
    }

    fn ident(&self, name: &str, col: usize) -> std::result::Result<WeylElement, ParseError> {
        let generator = name
            .strip_prefix('t')
            .map(|r| (true, r))
            .or_else(|| name.strip_prefix('d').map(|r| (false, r)));
        if let Some((is_t, idx)) = generator {
            if let Ok(i) = idx.parse::<usize>() {
                if i == 0 || i > self.n {
                    return Err(ParseError::new(format!("index out of range for rank {}", self.n), name, col));
                }
                return Ok(if is_t {
                    WeylElement::t(self.n, i - 1)
                } else {
                    WeylElement::d(self.n, i - 1)
                });
            }
        }
        let s = ScalarContext {
            symbols: Some(self.symbols),
        }
        .symbol(name, col)?;
        Ok(WeylElement::scalar(self.n, s))
    }

    fn add(&self, a: WeylElement, b: WeylElement) -> WeylElement {
        a.add(&b)
    }

    fn neg(&self, a: WeylElement) -> WeylElement {
        a.scale(&Scalar::from_int(-1))
    }

    fn mul(&self, a: WeylElement, b: WeylElement, col: usize) -> std::result::Result<WeylElement, ParseError> {
        weyl_multiply(&a, &b).map_err(|e| ParseError::new(e.to_string(), "*", col))
    }

    fn as_scalar(&self, a: &WeylElement) -> Option<Scalar> {
        match a.terms.len() {
            0 => Some(Scalar::zero()),
            1 => a.terms.get(&WeylMonomial::one(self.n)).cloned(),
            _ => None,
        }
    }
}

/// Product of monomials `(t^α ∂^β)(t^γ ∂^δ)` as a normal-ordered sum.
fn monomial_product(x: &WeylMonomial, y: &WeylMonomial) -> Vec<(WeylMonomial, BigInt)> {
    let n = x.rank();
    let mut acc: Vec<(WeylMonomial, BigInt)> = vec![(WeylMonomial::one(n), BigInt::one())];
    for i in 0..n {
        let expansion = commute_one(x.d[i], y.t[i]);
        let mut next = Vec::with_capacity(acc.len() * expansion.len());
        for (m, c) in &acc {
            for (tc, db, k) in &expansion {
                let mut m2 = m.clone();
                m2.t[i] = x.t[i] + tc;
                m2.d[i] = db + y.d[i];
                next.push((m2, c * k));
            }
        }
        acc = next;
    }
    acc
}

/// Normal form of `pq`.
pub fn weyl_multiply(p: &WeylElement, q: &WeylElement) -> Result<WeylElement> {
    if p.n != q.n {
        return Err(Error::RankMismatch {
            expected: p.n,
            found: q.n,
        });
    }
    let mut out = WeylElement::zero(p.n);
    for (mp, cp) in &p.terms {
        for (mq, cq) in &q.terms {
            let c = cp * cq;
            for (m, k) in monomial_product(mp, mq) {
                out.add_term(m, &(&c * &Scalar::from_rational(Q::from_integer(k))));
            }
        }
    }
    Ok(out)
}

/// The three families of weight `D_n`-modules realized here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleDescriptor {
    /// `F(a) = t^a C[t_1^{±1}, …, t_n^{±1}]`.
    FullLaurent(Vec<Scalar>),
    /// `G(a)`: the quotient of `F(a)` by the span of monomials with
    /// `m_i ≥ 0` for some `i` in `integral` (zero-based indices).
    Quotient { a: Vec<Scalar>, integral: BTreeSet<usize> },
    /// `S = (C[t^{±1}]/C[t])^{⊗n}`.
    ShaleWeil(usize),
}

impl ModuleDescriptor {
    pub fn quotient(a: Vec<Scalar>, integral: BTreeSet<usize>) -> Result<Self> {
        let m = ModuleDescriptor::Quotient { a, integral };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModuleDescriptor::ShaleWeil(0) => Err(Error::ZeroRank),
            ModuleDescriptor::FullLaurent(a) if a.is_empty() => Err(Error::ZeroRank),
            ModuleDescriptor::Quotient { a, integral } => {
                if a.is_empty() {
                    return Err(Error::ZeroRank);
                }
                for (i, ai) in a.iter().enumerate() {
                    if integral.contains(&i) && !ai.is_zero() {
                        return Err(Error::InvalidModule(format!(
                            "a{} must be 0 for a quotiented index",
                            i + 1
                        )));
                    }
                    if !integral.contains(&i) && ai.as_integer().is_some() {
                        return Err(Error::InvalidModule(format!(
                            "a{} is an integer, so index {} must be quotiented with a{} = 0",
                            i + 1,
                            i + 1,
                            i + 1
                        )));
                    }
                }
                if integral.iter().any(|&i| i >= a.len()) {
                    return Err(Error::InvalidModule("quotiented index out of range".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ModuleDescriptor::FullLaurent(a) | ModuleDescriptor::Quotient { a, .. } => a.len(),
            ModuleDescriptor::ShaleWeil(n) => *n,
        }
    }

    /// Base exponent `a`.
    pub fn base(&self) -> Vec<Scalar> {
        match self {
            ModuleDescriptor::FullLaurent(a) | ModuleDescriptor::Quotient { a, .. } => a.clone(),
            ModuleDescriptor::ShaleWeil(n) => vec![Scalar::zero(); *n],
        }
    }

    /// Zero-based indices along which the module is a quotient.
    pub fn integral(&self) -> BTreeSet<usize> {
        match self {
            ModuleDescriptor::FullLaurent(_) => BTreeSet::new(),
            ModuleDescriptor::Quotient { integral, .. } => integral.clone(),
            ModuleDescriptor::ShaleWeil(n) => (0..*n).collect(),
        }
    }

    /// Whether `t^{a+m}` is a nonzero basis vector.
    pub fn contains(&self, offset: &[i64]) -> bool {
        match self {
            ModuleDescriptor::FullLaurent(_) => true,
            ModuleDescriptor::Quotient { integral, .. } => integral.iter().all(|&i| offset[i] < 0),
            ModuleDescriptor::ShaleWeil(_) => offset.iter().all(|&m| m < 0),
        }
    }

    /// `F a1,a2`, `G a1,0`, `S` (rank taken from `n`). For `G`, entries that
    /// are exactly `0` mark the quotiented indices.
    pub fn parse(text: &str, n: usize, symbols: &SymbolSet) -> std::result::Result<Self, ParseError> {
        let t = text.trim();
        let (kind, rest) = t.split_at(t.find(char::is_whitespace).unwrap_or(t.len()));
        let rest_col = t.len() - rest.len() + 1;
        let parse_base = || -> std::result::Result<Vec<Scalar>, ParseError> {
            let a = crate::parse::parse_scalar_list(rest.trim(), Some(symbols)).map_err(|mut e| {
                e.position += rest_col;
                e
            })?;
            if a.len() != n {
                return Err(ParseError::new(format!("expected {n} exponents"), rest.trim(), rest_col + 1));
            }
            Ok(a)
        };
        let m = match kind {
            "S" if rest.trim().is_empty() => ModuleDescriptor::ShaleWeil(n),
            "F" => ModuleDescriptor::FullLaurent(parse_base()?),
            "G" => {
                let a = parse_base()?;
                let integral = a.iter().enumerate().filter(|(_, x)| x.is_zero()).map(|(i, _)| i).collect();
                ModuleDescriptor::Quotient { a, integral }
            }
            _ => return Err(ParseError::new("expected `F`, `G` or `S`", kind, 1)),
        };
        m.validate().map_err(|e| ParseError::new(e.to_string(), t, 1))?;
        Ok(m)
    }
}

impl fmt::Display for ModuleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |a: &[Scalar]| a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            ModuleDescriptor::FullLaurent(a) => write!(f, "F {}", list(a)),
            ModuleDescriptor::Quotient { a, .. } => write!(f, "G {}", list(a)),
            ModuleDescriptor::ShaleWeil(_) => f.write_str("S"),
        }
    }
}

/// `Σ c_m t^{a+m}` over integer offsets `m`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentVector {
    a: Vec<Scalar>,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl LaurentVector {
    pub fn zero(a: Vec<Scalar>) -> Self {
        LaurentVector {
            a,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(a: Vec<Scalar>, offset: Vec<i64>) -> Result<Self> {
        let mut v = LaurentVector::zero(a);
        v.check_offset(&offset)?;
        v.add_term(offset, &Scalar::one());
        Ok(v)
    }

    pub fn from_terms(a: Vec<Scalar>, terms: impl IntoIterator<Item = (Vec<i64>, Scalar)>) -> Result<Self> {
        let mut v = LaurentVector::zero(a);
        for (m, c) in terms {
            v.check_offset(&m)?;
            v.add_term(m, &c);
        }
        Ok(v)
    }

    fn check_offset(&self, m: &[i64]) -> Result<()> {
        if m.len() != self.a.len() {
            return Err(Error::RankMismatch {
                expected: self.a.len(),
                found: m.len(),
            });
        }
        Ok(())
    }

    pub fn base(&self) -> &[Scalar] {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[i64]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, m: Vec<i64>, c: &Scalar) {
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

    pub fn add(&self, other: &LaurentVector) -> LaurentVector {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &LaurentVector) -> LaurentVector {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> LaurentVector {
        let mut out = LaurentVector::zero(self.a.clone());
        for (m, k) in &self.terms {
            out.add_term(m.clone(), &(k * c));
        }
        out
    }

    /// Drops the terms that vanish in `module`.
    pub fn project(&self, module: &ModuleDescriptor) -> LaurentVector {
        LaurentVector {
            a: self.a.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| module.contains(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `(offset, coefficient)` pairs in offset order.
    pub fn to_pairs(&self) -> Vec<(Vec<i64>, String)> {
        self.terms.iter().map(|(m, c)| (m.clone(), c.to_string())).collect()
    }

    /// `m1,m2:coef;m1,m2:coef`; a missing `:coef` means coefficient 1.
    pub fn parse(text: &str, a: Vec<Scalar>, symbols: &SymbolSet) -> std::result::Result<Self, ParseError> {
        let mut v = LaurentVector::zero(a);
        let mut col = 1;
        for piece in text.split(';') {
            let (off, coef) = match piece.split_once(':') {
                Some((o, c)) => (o, Some(c)),
                None => (piece, None),
            };
            let m = parse_int_list(off).map_err(|mut e| {
                e.position += col - 1;
                e
            })?;
            if m.len() != v.rank() {
                return Err(ParseError::new(format!("expected {} offsets", v.rank()), off, col));
            }
            let c = match coef {
                Some(c) => crate::parse::parse_scalar(c, Some(symbols)).map_err(|mut e| {
                    e.position += col + off.chars().count();
                    e
                })?,
                None => Scalar::one(),
            };
            v.add_term(m, &c);
            col += piece.chars().count() + 1;
        }
        Ok(v)
    }
}

impl fmt::Display for LaurentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let off: Vec<String> = m.iter().map(|x| x.to_string()).collect();
                format!("{}:{}", off.join(","), c)
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(";"))
        }
    }
}

impl fmt::Debug for LaurentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentVector({self})")
    }
}

fn check_module(v: &LaurentVector, module: &ModuleDescriptor) -> Result<()> {
    module.validate()?;
    if v.rank() != module.rank() {
        return Err(Error::RankMismatch {
            expected: module.rank(),
            found: v.rank(),
        });
    }
    if v.a != module.base() {
        return Err(Error::InvalidVector("base exponent differs from the module's".into()));
    }
    Ok(())
}

/// `p·v` in `module`. The product is formed in `F(a)`; terms that vanish in
/// a quotient module are dropped from the result.
pub fn apply(p: &WeylElement, v: &LaurentVector, module: &ModuleDescriptor) -> Result<LaurentVector> {
    check_module(v, module)?;
    if p.rank() != v.rank() {
        return Err(Error::RankMismatch {
            expected: v.rank(),
            found: p.rank(),
        });
    }
    let n = v.rank();
    let mut out = LaurentVector::zero(v.a.clone());
    for (mono, cp) in &p.terms {
        for (off, cv) in &v.terms {
            let mut c = cp * cv;
            let mut m = off.clone();
            for i in 0..n {
                for _ in 0..mono.d[i] {
                    c = &c * &(&v.a[i] + &Scalar::from_int(m[i]));
                    m[i] -= 1;
                }
                m[i] += mono.t[i] as i64;
            }
            out.add_term(m, &c);
        }
    }
    Ok(out.project(module))
}

/// `(−∂_i²)^k·v` for any integer `k`; negative powers use
/// `(−∂_i²)^{-1} t^{c} = −t^{c+2}/((c+2)(c+1))` with `c = a_i + m_i`.
pub fn apply_neg_d2_power(v: &LaurentVector, i: usize, k: i64, module: &ModuleDescriptor) -> Result<LaurentVector> {
    check_module(v, module)?;
    if i >= v.rank() {
        return Err(Error::IndexOutOfRange(format!("d{}", i + 1), v.rank()));
    }
    let mut cur = v.clone();
    for _ in 0..k.unsigned_abs() {
        let mut next = LaurentVector::zero(v.a.clone());
        for (off, c) in &cur.terms {
            let base = &v.a[i] + &Scalar::from_int(off[i]);
            let mut m = off.clone();
            if k > 0 {
                let f = &base * &(&base - &Scalar::one());
                m[i] -= 2;
                next.add_term(m, &(-&(c * &f)));
            } else {
                let f = &(&base + &Scalar::from_int(2)) * &(&base + &Scalar::one());
                if f.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                m[i] += 2;
                next.add_term(m, &(-&c.checked_div(&f)?));
            }
        }
        cur = next.project(module);
    }
    Ok(cur)
}

/// Weights of the basis vectors with offsets in the box `lo ≤ m ≤ hi`,
/// under `h_i ↦ t_i ∂_i + ½`: the eigenvalue on `t^{a+m}` is `a_i + m_i + ½`.
pub fn support(module: &ModuleDescriptor, lo: &[i64], hi: &[i64]) -> Result<Vec<(Vec<i64>, Vec<Scalar>)>> {
    module.validate()?;
    let n = module.rank();
    if lo.len() != n || hi.len() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: lo.len().min(hi.len()),
        });
    }
    let a = module.base();
    let half = Scalar::ratio(1, 2);
    let mut out = Vec::new();
    for m in box_points(lo, hi) {
        if module.contains(&m) {
            let w = (0..n).map(|i| &(&a[i] + &Scalar::from_int(m[i])) + &half).collect();
            out.push((m, w));
        }
    }
    Ok(out)
}

/// Lattice points of `lo ≤ m ≤ hi` in lexicographic order.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo[k];
        }
    }
}

/// One step of highest-vector straightening along `t_i` (zero-based `i`) for
/// a vector of a direct sum of copies of `module`:
/// `w' = w + Σ_{k=1}^{l} (1/k!) ∂_i^k t_i^k w` with `l` minimal such that
/// `t_i^{l+1} w = 0`. Afterwards `t_i w' = 0`.
pub fn straighten_highest(w: &[LaurentVector], i: usize, module: &ModuleDescriptor) -> Result<Vec<LaurentVector>> {
    if w.iter().all(LaurentVector::is_zero) {
        return Err(Error::ZeroVector);
    }
    let n = module.rank();
    if i >= n {
        return Err(Error::IndexOutOfRange(format!("t{}", i + 1), n));
    }
    if !module.integral().contains(&i) {
        return Err(Error::Unsupported(format!("t{} does not act nilpotently on {module}", i + 1)));
    }
    let t = WeylElement::t(n, i);
    let d = WeylElement::d(n, i);
    // powers[k] = t_i^k w
    let mut powers = vec![w.to_vec()];
    loop {
        let last = powers.last().expect("nonempty");
        let next: Vec<LaurentVector> = last.iter().map(|c| apply(&t, c, module)).collect::<Result<_>>()?;
        if next.iter().all(LaurentVector::is_zero) {
            break;
        }
        powers.push(next);
    }
    let mut out = w.to_vec();
    let mut factorial = BigInt::one();
    for (k, tw) in powers.iter().enumerate().skip(1) {
        factorial *= k;
        let coeff = Scalar::from_rational(Q::new(BigInt::one(), factorial.clone()));
        let dk = d.pow(k as u32)?;
        for (o, c) in out.iter_mut().zip(tw) {
            *o = o.add(&apply(&dk, c, module)?.scale(&coeff));
        }
    }
    Ok(out)
}

/// Straightening along every `t_i` of the module, in ascending index order.
pub fn straighten_all(w: &[LaurentVector], module: &ModuleDescriptor) -> Result<Vec<LaurentVector>> {
    let mut cur = w.to_vec();
    for i in module.integral() {
        if cur.iter().all(LaurentVector::is_zero) {
            break;
        }
        cur = straighten_highest(&cur, i, module)?;
    }
    Ok(cur)
}
