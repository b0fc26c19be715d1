//! Exact scalars: rational functions over the rationals in named symbols.
//!
//! The central charge is written `s^2`, so `s` is always available.
//! Every value is kept in lowest terms with a denominator whose leading
//! coefficient is one, which makes equality syntactic.

mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, One, Signed, ToPrimitive};

pub use poly::{gcd, Monomial, Poly, Symbol, Q};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Q::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(Q::new(n.into(), d.into()))
    }

    pub fn from_rational(q: Q) -> Self {
        Scalar::from_poly(Poly::constant(q))
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn symbol(name: &str) -> Self {
        Scalar::from_poly(Poly::var(Symbol::new(name)))
    }

    /// The central-charge parameter `s`.
    pub fn s() -> Self {
        Scalar::symbol("s")
    }

    /// `num / den` in lowest terms.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.constant_value() {
            return Scalar {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient().recip();
        Scalar {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|i| i.to_i64())
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = self.num.symbols();
        out.extend(self.den.symbols());
        out.sort();
        out.dedup();
        out
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self, Error> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        Scalar {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn powi(&self, e: i64) -> Result<Self, Error> {
        let p = self.pow(e.unsigned_abs() as u32);
        if e < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    /// Substitutes rational values for the given symbols. Symbols not in
    /// `values` stay symbolic.
    pub fn substitute(&self, values: &BTreeMap<Symbol, Q>) -> Result<Self, Error> {
        let lookup = |s: Symbol| values.get(&s).cloned();
        let num = self.num.substitute(&lookup);
        let den = self.den.substitute(&lookup);
        Scalar::fraction(num, den)
    }

    /// Full evaluation to a rational number.
    pub fn evaluate(&self, values: &BTreeMap<Symbol, Q>) -> Result<Q, Error> {
        let v = self.substitute(values)?;
        match v.as_rational() {
            Some(q) => Ok(q),
            None => Err(Error::UnboundSymbols(
                v.symbols().iter().map(|s| s.name().to_string()).collect(),
            )),
        }
    }

    /// `binomial(self, k) = self (self-1) ... (self-k+1) / k!`
    pub fn binomial(&self, k: u32) -> Self {
        let mut acc = Scalar::one();
        for i in 0..k {
            acc = &acc * &(self - &Scalar::from_int(i as i64));
        }
        let fact: BigInt = (1..=k as u64).map(BigInt::from).product();
        &acc * &Scalar::from_rational(Q::new(BigInt::one(), fact))
    }

    /// True when the leading numerator coefficient is negative.
    pub fn is_negative_leading(&self) -> bool {
        self.num.leading_coefficient().is_negative()
    }

    /// Whether printing this value as a coefficient needs parentheses.
    pub fn needs_parens(&self) -> bool {
        !(self.num.terms().len() <= 1)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::from_rational(q)
    }
}

impl From<&Q> for Scalar {
    fn from(q: &Q) -> Self {
        Scalar::from_rational(q.clone())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Scalar::from_poly(self.num.add(&rhs.num));
            }
            return Scalar::normalized(self.num.add(&rhs.num), self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Scalar::normalized(num, self.den.mul(&rhs.den))
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(self.num.mul(&rhs.num));
        }
        Scalar::normalized(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] for fallible division.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            return f.write_str("0");
        }
        // clear rational coefficients so both parts print with integers
        let l = num::integer::lcm(self.num.denominator_lcm(), self.den.denominator_lcm());
        let lq = Q::from_integer(l);
        let num = self.num.scale(&lq);
        let den = self.den.scale(&lq);
        let g = num::integer::gcd(num.numerator_gcd(), den.numerator_gcd());
        let gq = Q::from_integer(g).recip();
        let num = num.scale(&gq);
        let den = den.scale(&gq);
        if den.is_one() {
            return write!(f, "{num}");
        }
        let num_str = if num.terms().len() > 1 {
            format!("({num})")
        } else {
            num.to_string()
        };
        let den_is_plain_int = den
            .constant_value()
            .map(|c| c.is_integer() && c.is_positive())
            .unwrap_or(false);
        if den_is_plain_int {
            write!(f, "{num_str}/{den}")
        } else {
            write!(f, "{num_str}/({den})")
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        crate::parse::parse_scalar(&text, None).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn p(s: &str) -> Scalar {
        parse_scalar(s, None).unwrap()
    }

    #[test]
    fn canonical_form_makes_equality_syntactic() {
        assert_eq!(p("(a1^2-1)/(a1-1)"), p("a1+1"));
        assert_eq!(p("(2*s)/(4*s^2)"), p("1/(2*s)"));
        assert_eq!(p("1/2+1/3"), Scalar::ratio(5, 6));
    }

    #[test]
    fn display_uses_integer_coefficients() {
        assert_eq!(p("s^2/2-1/2").to_string(), "(s^2-1)/2");
        assert_eq!(p("-3/4").to_string(), "-3/4");
        assert_eq!(p("(a1+3)*(a1+4)/((a1+1)*(a1+2))").to_string(), "(a1^2+7*a1+12)/(a1^2+3*a1+2)");
        assert_eq!(p("s/(2*a1)").to_string(), "s/(2*a1)");
    }

    #[test]
    fn display_round_trips() {
        for text in ["(s^2-1)/2", "s/(2*a1)", "-3/4", "a1*b-7", "(a1^2+1)/(3*b+1)", "0"] {
            let v = p(text);
            assert_eq!(p(&v.to_string()), v, "{text}");
        }
    }

    #[test]
    fn evaluation_reports_division_by_zero() {
        let v = p("1/(a1-2)");
        let mut values = BTreeMap::new();
        values.insert(Symbol::new("a1"), Q::from_integer(2.into()));
        assert!(matches!(v.evaluate(&values), Err(Error::DivisionByZero)));
        values.insert(Symbol::new("a1"), Q::from_integer(3.into()));
        assert_eq!(v.evaluate(&values).unwrap(), Q::one());
    }

    #[test]
    fn binomial_is_polynomial_in_symbol() {
        let b = Scalar::symbol("b");
        assert_eq!(b.binomial(2), p("b*(b-1)/2"));
        assert_eq!(Scalar::from_int(3).binomial(2), Scalar::from_int(3));
        assert_eq!(Scalar::from_int(1).binomial(3), Scalar::zero());
    }

    #[test]
    fn field_axioms_on_samples() {
        let xs = [p("s"), p("a1+1/2"), p("(s^2-1)/(a1+1)"), p("b/3")];
        for a in &xs {
            for b in &xs {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!(&(a * b) / b, a.clone());
                for c in &xs {
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
            }
        }
    }
}
