//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in descending lexicographic monomial order, with
//! variable priority given by [`Symbol`] order (`s` first, then natural
//! order on names such as `a1 < a2 < a10 < b`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Q = BigRational;

/// An interned symbol name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(&'static str);

fn interner() -> &'static Mutex<HashMap<String, &'static str>> {
    static INTERNER: OnceLock<Mutex<HashMap<String, &'static str>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        let mut table = interner().lock().expect("symbol interner poisoned");
        if let Some(&s) = table.get(name) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        table.insert(name.to_owned(), leaked);
        Symbol(leaked)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }

    fn sort_key(&self) -> (u8, &str, u64, usize) {
        let name = self.0;
        let split = name
            .char_indices()
            .rev()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, _)| i)
            .unwrap_or(name.len());
        let (stem, digits) = name.split_at(split);
        let index = digits.parse::<u64>().unwrap_or(0);
        let class = if name == "s" { 0 } else { 1 };
        (class, stem, index, digits.len())
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        self.sort_key().cmp(&other.sort_key()).then_with(|| self.0.cmp(other.0))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// A power product, stored as `(symbol, exponent)` pairs sorted by symbol
/// with strictly positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(sym: Symbol, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(sym, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree_in(&self, sym: Symbol) -> u32 {
        self.0
            .iter()
            .find(|(s, _)| *s == sym)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(a, ea) in &self.0 {
            if j < other.0.len() && other.0[j].0 == a {
                let eb = other.0[j].1;
                if eb > ea {
                    return None;
                }
                if ea > eb {
                    out.push((a, ea - eb));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < a {
                return None;
            } else {
                out.push((a, ea));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, sym: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(s, _)| *s != sym).collect())
    }
}

/// Lexicographic order: compare exponents of the highest-priority symbol first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut i = 0;
        loop {
            match (self.0.get(i), other.0.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => i += 1,
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients, terms sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(sym: Symbol) -> Self {
        Poly {
            terms: vec![(Monomial::var(sym, 1), Q::one())],
        }
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(mut terms: Vec<(Monomial, Q)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Q)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.terms.is_empty() {
            Some(Q::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn leading_coefficient(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.0.iter().map(|(s, _)| *s))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn degree_in(&self, sym: Symbol) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(sym)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().cloned());
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // multiplication by a monomial preserves lex order
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.mul(m), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.mul(mb), ca * cb));
            }
        }
        Poly::from_terms(terms)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().cloned().expect("nonzero divisor");
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            rem = rem.sub(&divisor.mul_term(&m, &c));
            quot.push((m, c));
        }
        Some(Poly::from_terms(quot))
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `sym`.
    pub fn coefficients_in(&self, sym: Symbol) -> Vec<Poly> {
        let deg = self.degree_in(sym) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.degree_in(sym) as usize].push((m.without(sym), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn from_coefficients_in(sym: Symbol, coeffs: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul_term(&Monomial::var(sym, k as u32), &Q::one()));
            }
        }
        acc
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn substitute(&self, values: &dyn Fn(Symbol) -> Option<Q>) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(s, e) in &m.0 {
                match values(s) {
                    Some(v) => coeff *= num::pow::pow(v, e as usize),
                    None => rest.push((s, e)),
                }
            }
            acc = acc.add(&Poly::term(Monomial(rest), coeff));
        }
        acc
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| num::integer::lcm(acc, c.denom().clone()))
    }

    /// Gcd of the integer numerators (for polynomials with integer coefficients).
    pub fn numerator_gcd(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::zero(), |acc, (_, c)| num::integer::gcd(acc, c.numer().clone()))
    }
}

fn content_in(p: &Poly, sym: Symbol) -> Poly {
    p.coefficients_in(sym)
        .iter()
        .fold(Poly::zero(), |acc, c| gcd(&acc, c))
}

fn prem_in(a: &Poly, b: &Poly, sym: Symbol) -> Poly {
    let db = b.degree_in(sym);
    let lc_b = b.coefficients_in(sym).pop().expect("nonzero");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(sym) >= db {
        let dr = r.degree_in(sym);
        let lc_r = r.coefficients_in(sym).pop().expect("nonzero");
        let shift = Poly::term(Monomial::var(sym, dr - db), Q::one());
        r = r.mul(&lc_b).sub(&lc_r.mul(&shift).mul(b));
    }
    r
}

fn primitive_part_in(p: &Poly, sym: Symbol) -> Poly {
    let c = content_in(p, sym);
    p.div_exact(&c).expect("content divides polynomial")
}

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    syms.sort();
    syms.dedup();
    // pick the lowest-priority symbol so that contents recurse on higher ones
    let x = *syms.last().expect("non-constant polynomial has a symbol");
    let (da, db) = (a.degree_in(x), b.degree_in(x));
    if da == 0 {
        return gcd(a, &content_in(b, x));
    }
    if db == 0 {
        return gcd(&content_in(a, x), b);
    }
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let c = gcd(&ca, &cb);
    let mut r0 = a.div_exact(&ca).expect("content divides");
    let mut r1 = b.div_exact(&cb).expect("content divides");
    if r0.degree_in(x) < r1.degree_in(x) {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_zero() {
        let r = prem_in(&r0, &r1, x);
        r0 = r1;
        r1 = if r.is_zero() {
            r
        } else {
            primitive_part_in(&r, x)
        };
    }
    let g = if r0.degree_in(x) == 0 {
        Poly::one()
    } else {
        primitive_part_in(&r0, x)
    };
    c.mul(&g).monic()
}

fn fmt_rational_abs(c: &Q) -> String {
    let c = c.abs();
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { "-" } else { "+" })?;
            }
            let abs = fmt_rational_abs(c);
            if m.is_one() {
                f.write_str(&abs)?;
                continue;
            }
            if abs != "1" {
                write!(f, "{abs}*")?;
            }
            for (i, (s, e)) in m.0.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                if *e == 1 {
                    write!(f, "{s}")?;
                } else {
                    write!(f, "{s}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn x() -> Poly {
        Poly::var(Symbol::new("a1"))
    }

    fn y() -> Poly {
        Poly::var(Symbol::new("b"))
    }

    #[test]
    fn symbol_order_puts_s_first_and_sorts_indices_naturally() {
        let mut syms: Vec<Symbol> = ["b", "a10", "a2", "s", "a1"].iter().map(|n| Symbol::new(n)).collect();
        syms.sort();
        let names: Vec<_> = syms.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["s", "a1", "a2", "a10", "b"]);
    }

    #[test]
    fn monomial_division() {
        let a = Monomial::var(Symbol::new("s"), 3).mul(&Monomial::var(Symbol::new("a1"), 1));
        let b = Monomial::var(Symbol::new("s"), 1);
        let q = a.div(&b).unwrap();
        assert_eq!(q.degree_in(Symbol::new("s")), 2);
        assert!(b.div(&a).is_none());
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let f = x().add(&Poly::constant(q(1)));
        let g = x().sub(&y());
        let h = y().add(&Poly::constant(q(3)));
        let a = f.mul(&g).mul(&g);
        let b = g.mul(&h).mul(&f);
        assert_eq!(gcd(&a, &b), f.mul(&g).monic());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = x().mul(&x()).add(&Poly::constant(q(1)));
        let b = x().add(&Poly::constant(q(1)));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn exact_division_detects_remainder() {
        let a = x().mul(&x()).sub(&Poly::constant(q(1)));
        let b = x().sub(&Poly::constant(q(1)));
        assert_eq!(a.div_exact(&b).unwrap(), x().add(&Poly::constant(q(1))));
        assert!(a.div_exact(&x()).is_none());
    }

    #[test]
    fn display_is_compact() {
        let s = Poly::var(Symbol::new("s"));
        let p = s.mul(&s).scale(&q(2)).sub(&Poly::constant(q(1)));
        assert_eq!(p.to_string(), "2*s^2-1");
    }
}
