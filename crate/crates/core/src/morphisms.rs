//! The Weyl realization `f` of `g_n`, the algebra map
//! `φ: U(g_n)/⟨z − s²⟩ → U(sp_2n) ⊗ D_n`, homomorphism checks, and the
//! localization twists `θ_b`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{bracket, BasisElement, LieElement, RootKind, SymplecticOscillator};
use crate::scalar::Scalar;
use crate::uea::{multiply, reduce_central, PbwMonomial, UEAElement};
use crate::weyl::{apply, apply_neg_d2_power, box_points, weyl_multiply, LaurentVector, ModuleDescriptor, WeylElement, WeylMonomial};

fn s() -> Scalar {
    Scalar::s()
}

/// Image of a basis element under `f`, with `√ż = s`.
pub fn f_basis(e: &BasisElement, n: usize) -> Result<WeylElement> {
    if !e.is_valid_for(n) {
        return Err(Error::IndexOutOfRange(e.to_string(), n));
    }
    let t = |i| WeylElement::t(n, i);
    let d = |i| WeylElement::d(n, i);
    Ok(match e {
        BasisElement::Central => WeylElement::scalar(n, s().pow(2)),
        BasisElement::Cartan(i) => weyl_multiply(&t(*i), &d(*i))?.add(&WeylElement::scalar(n, Scalar::ratio(1, 2))),
        BasisElement::RootVector(r) => match r.kind().expect("validated") {
            RootKind::Difference(i, j) => weyl_multiply(&t(i), &d(j))?,
            RootKind::Sum(i, j) => weyl_multiply(&t(i), &t(j))?,
            RootKind::NegSum(i, j) => weyl_multiply(&d(i), &d(j))?.scale(&Scalar::from_int(-1)),
            RootKind::Short(i) => t(i).scale(&s()),
            RootKind::NegShort(i) => d(i).scale(&-s()),
        },
    })
}

/// `f: g_n → D_n`, extended linearly.
pub fn f_map(x: &LieElement, n: usize) -> Result<WeylElement> {
    if x.rank() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: x.rank(),
        });
    }
    let mut out = WeylElement::zero(n);
    for (e, c) in x.terms() {
        out = out.add(&f_basis(e, n)?.scale(c));
    }
    Ok(out)
}

/// The algebra map `U(g_n) → D_n` extending `f`.
pub fn weyl_image(u: &UEAElement) -> Result<WeylElement> {
    let n = u.rank();
    let alg = SymplecticOscillator::rank(n)?;
    let images: Vec<WeylElement> = alg.basis().iter().map(|e| f_basis(e, n)).collect::<Result<_>>()?;
    let mut out = WeylElement::zero(n);
    for (m, c) in u.terms() {
        let mut acc = WeylElement::scalar(n, c.clone());
        for &k in m.letters() {
            acc = weyl_multiply(&acc, &images[k as usize])?;
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// Element of `U(sp_2n) ⊗ D_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    n: usize,
    terms: BTreeMap<(PbwMonomial, WeylMonomial), Scalar>,
}

impl TensorElement {
    pub fn zero(n: usize) -> Self {
        TensorElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        TensorElement::pure(&UEAElement::one(n), &WeylElement::one(n))
    }

    /// `u ⊗ w`.
    pub fn pure(u: &UEAElement, w: &WeylElement) -> Self {
        let mut out = TensorElement::zero(u.rank());
        for (mu, cu) in u.terms() {
            for (mw, cw) in w.terms() {
                out.add_term(mu.clone(), mw.clone(), &(cu * cw));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<(PbwMonomial, WeylMonomial), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, u: PbwMonomial, w: WeylMonomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (u, w);
        match self.terms.get_mut(&key) {
            Some(v) => {
                let sum = &*v + c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((u, w), c) in &other.terms {
            out.add_term(u.clone(), w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero(self.n);
        for ((u, w), k) in &self.terms {
            out.add_term(u.clone(), w.clone(), &(k * c));
        }
        out
    }

    /// `(u₁ ⊗ w₁)(u₂ ⊗ w₂) = u₁u₂ ⊗ w₁w₂`.
    pub fn multiply(&self, other: &TensorElement) -> Result<TensorElement> {
        if self.n != other.n {
            return Err(Error::RankMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut out = TensorElement::zero(n);
        for ((u1, w1), c1) in &self.terms {
            for ((u2, w2), c2) in &other.terms {
                let uu = multiply(&pbw(n, u1), &pbw(n, u2))?;
                let ww = weyl_multiply(
                    &WeylElement::monomial(w1.clone(), Scalar::one()),
                    &WeylElement::monomial(w2.clone(), Scalar::one()),
                )?;
                let c = c1 * c2;
                for (mu, cu) in uu.terms() {
                    for (mw, cw) in ww.terms() {
                        out.add_term(mu.clone(), mw.clone(), &(&c * &(cu * cw)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &TensorElement) -> Result<TensorElement> {
        Ok(self.multiply(other)?.sub(&other.multiply(self)?))
    }

    /// Coefficients keyed by the printed `(u, w)` pair.
    pub fn to_pairs(&self) -> Vec<(String, String, String)> {
        self.terms
            .iter()
            .map(|((u, w), c)| {
                let us = UEAElement::zero(self.n).add(&pbw(self.n, u)).to_string();
                let ws = WeylElement::monomial(w.clone(), Scalar::one()).to_string();
                (us, ws, c.to_string())
            })
            .collect()
    }
}

fn pbw(n: usize, m: &PbwMonomial) -> UEAElement {
    let mut u = UEAElement::zero(n);
    u.add_term(m.clone(), &Scalar::one());
    u
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .to_pairs()
            .into_iter()
            .map(|(u, w, c)| format!("({c})*[{u} ⊗ {w}]"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorElement({self})")
    }
}

/// Image of one basis element under `φ`: `x ⊗ 1 + 1 ⊗ f(x)` on `sp_2n`,
/// `1 ⊗ f(x)` on the Heisenberg part (so `z ↦ 1 ⊗ s²`).
pub fn phi_basis(e: &BasisElement, n: usize) -> Result<TensorElement> {
    let fx = TensorElement::pure(&UEAElement::one(n), &f_basis(e, n)?);
    if e.is_symplectic() {
        Ok(TensorElement::pure(&UEAElement::generator(n, e)?, &WeylElement::one(n)).add(&fx))
    } else {
        Ok(fx)
    }
}

fn extend_multiplicatively(u: &UEAElement, letter: &dyn Fn(&BasisElement) -> Result<TensorElement>) -> Result<TensorElement> {
    let n = u.rank();
    let alg = SymplecticOscillator::rank(n)?;
    let mut cache: BTreeMap<u16, TensorElement> = BTreeMap::new();
    let mut out = TensorElement::zero(n);
    for (m, c) in u.terms() {
        let mut acc = TensorElement::one(n).scale(c);
        for &k in m.letters() {
            let img = match cache.entry(k) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => e.insert(letter(alg.element(k))?),
            };
            acc = acc.multiply(img)?;
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// `φ`, extended multiplicatively over PBW monomials. Any `z` factor is
/// first replaced by `s²`.
pub fn phi_map(u: &UEAElement, n: usize) -> Result<TensorElement> {
    if u.rank() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: u.rank(),
        });
    }
    let reduced = reduce_central(u);
    extend_multiplicatively(&reduced, &|e| phi_basis(e, n))
}

/// `ι₁: U(sp_2n) → U(sp_2n) ⊗ D_n`.
pub fn iota1(u: &UEAElement) -> Result<TensorElement> {
    let n = u.rank();
    extend_multiplicatively(u, &|e| {
        if !e.is_symplectic() {
            return Err(Error::Unsupported(format!("{e} is not in sp_2n")));
        }
        phi_basis(e, n)
    })
}

/// `ι₂: U(H_n)/⟨z − s²⟩ → D_n`, as elements `1 ⊗ w`.
pub fn iota2(u: &UEAElement) -> Result<TensorElement> {
    let n = u.rank();
    extend_multiplicatively(u, &|e| {
        if e.is_symplectic() {
            return Err(Error::Unsupported(format!("{e} is not in H_n")));
        }
        phi_basis(e, n)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HomMap {
    F,
    Phi,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResidual {
    pub x: String,
    pub y: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LieHomReport {
    pub map: HomMap,
    pub rank: usize,
    pub pairs_checked: usize,
    pub violations: Vec<PairResidual>,
}

impl LieHomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `image([x, y]) = [image(x), image(y)]` over all unordered basis
/// pairs `{x, y}`, including `x = y`.
pub fn verify_lie_hom(map: HomMap, n: usize) -> Result<LieHomReport> {
    let alg = SymplecticOscillator::rank(n)?;
    let basis = alg.basis();
    let mut violations = Vec::new();
    let mut pairs = 0;
    match map {
        HomMap::F => {
            let img: Vec<WeylElement> = basis.iter().map(|e| f_basis(e, n)).collect::<Result<_>>()?;
            for i in 0..basis.len() {
                for j in i..basis.len() {
                    pairs += 1;
                    let br = bracket(&LieElement::basis(n, basis[i].clone())?, &LieElement::basis(n, basis[j].clone())?, n)?;
                    let residual = f_map(&br, n)?.sub(&img[i].commutator(&img[j])?);
                    if !residual.is_zero() {
                        violations.push(PairResidual {
                            x: basis[i].to_string(),
                            y: basis[j].to_string(),
                            residual: residual.to_string(),
                        });
                    }
                }
            }
        }
        HomMap::Phi => {
            let img: Vec<TensorElement> = basis.iter().map(|e| phi_basis(e, n)).collect::<Result<_>>()?;
            for i in 0..basis.len() {
                for j in i..basis.len() {
                    pairs += 1;
                    let br = bracket(&LieElement::basis(n, basis[i].clone())?, &LieElement::basis(n, basis[j].clone())?, n)?;
                    let lhs = phi_map(&UEAElement::from_lie(&br)?, n)?;
                    let residual = lhs.sub(&img[i].commutator(&img[j])?);
                    if !residual.is_zero() {
                        violations.push(PairResidual {
                            x: basis[i].to_string(),
                            y: basis[j].to_string(),
                            residual: residual.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(LieHomReport {
        map,
        rank: n,
        pairs_checked: pairs,
        violations,
    })
}

/// Twist data: zero-based indices `i_1 < … < i_k` and parameters `b_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSpec {
    indices: Vec<usize>,
    b: Vec<Scalar>,
}

impl TwistSpec {
    pub fn new(indices: Vec<usize>, b: Vec<Scalar>) -> Result<Self> {
        if indices.len() != b.len() {
            return Err(Error::InvalidTwist(format!(
                "{} indices but {} parameters",
                indices.len(),
                b.len()
            )));
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != indices.len() {
            return Err(Error::InvalidTwist("indices must be distinct".into()));
        }
        Ok(TwistSpec { indices, b })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn params(&self) -> &[Scalar] {
        &self.b
    }

    fn param_for(&self, i: usize) -> Option<&Scalar> {
        self.indices.iter().position(|&k| k == i).map(|l| &self.b[l])
    }
}

/// `Σ_r u_r · Π_l X_{−2ε_{i_l}}^{−r_l}`, an element of the localization
/// realized through its action on weight modules.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalizedOperator {
    n: usize,
    /// `(u, exponents)`: `exponents[i]` is the inverse power of `X_{−2ε_i}`.
    terms: Vec<(UEAElement, Vec<u32>)>,
}

impl LocalizedOperator {
    pub fn from_uea(u: UEAElement) -> Self {
        let n = u.rank();
        LocalizedOperator {
            n,
            terms: vec![(u, vec![0; n])],
        }
    }

    pub fn terms(&self) -> &[(UEAElement, Vec<u32>)] {
        &self.terms
    }

    /// Adds `u · Π X_{−2ε_i}^{−inv_i}`, cancelling trailing `X_{−2ε_i}`
    /// letters of each monomial against the inverse factors.
    fn push(&mut self, u: UEAElement, inv: Vec<u32>) {
        let n = self.n;
        let alg = SymplecticOscillator::rank(n).expect("rank validated at construction");
        let ys: Vec<u16> = (0..n).map(|i| alg.index_of(&neg_long(i, n)).expect("basis element")).collect();
        for (m, c) in u.terms() {
            let mut letters = m.letters().to_vec();
            let mut e = inv.clone();
            while let Some(&last) = letters.last() {
                match ys.iter().position(|&y| y == last) {
                    Some(i) if e[i] > 0 => {
                        letters.pop();
                        e[i] -= 1;
                    }
                    _ => break,
                }
            }
            let mut single = UEAElement::zero(n);
            single.add_term(PbwMonomial(letters), c);
            self.push_raw(single, e);
        }
    }

    fn push_raw(&mut self, u: UEAElement, inv: Vec<u32>) {
        if let Some(slot) = self.terms.iter_mut().find(|(_, e)| *e == inv) {
            slot.0 = slot.0.add(&u);
        } else {
            self.terms.push((u, inv));
            self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        }
        self.terms.retain(|(x, _)| !x.is_zero());
    }

    /// Action on `F(a)` (or a quotient) through `f`: inverse factors act
    /// first as `(−∂_i²)^{-r}`, then `u`.
    pub fn apply(&self, v: &LaurentVector, module: &ModuleDescriptor) -> Result<LaurentVector> {
        let mut out = LaurentVector::zero(v.base().to_vec());
        for (u, inv) in &self.terms {
            let mut w = v.clone();
            for (i, &r) in inv.iter().enumerate() {
                if r > 0 {
                    w = apply_neg_d2_power(&w, i, -(r as i64), module)?;
                }
            }
            out = out.add(&apply(&weyl_image(u)?, &w, module)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LocalizedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(u, inv)| {
                let mut s = format!("({u})");
                for (i, &r) in inv.iter().enumerate() {
                    if r > 0 {
                        s.push_str(&format!("*X[-2e{}]^-{r}", i + 1));
                    }
                }
                s
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

fn neg_long(i: usize, n: usize) -> BasisElement {
    BasisElement::root(RootKind::NegSum(i, i), n)
}

/// `θ_b(x) = Σ_j Π_l C(b_l, j_l) ad(X_{−2ε_{i_l}})^{j_l}(x) · Π_l X_{−2ε_{i_l}}^{−j_l}`
/// for `x ∈ g_n`; the series is finite since each `ad X_{−2ε_i}` is nilpotent.
pub fn theta_lie(x: &LieElement, spec: &TwistSpec) -> Result<LocalizedOperator> {
    let n = x.rank();
    if spec.indices.iter().any(|&i| i >= n) {
        return Err(Error::InvalidTwist(format!("twist index out of range for rank {n}")));
    }
    let mut partial: Vec<(LieElement, Scalar, Vec<u32>)> = vec![(x.clone(), Scalar::one(), vec![0; n])];
    for (&i, b) in spec.indices.iter().zip(&spec.b) {
        let y = LieElement::basis(n, neg_long(i, n))?;
        let mut next = Vec::new();
        for (el, coeff, inv) in partial {
            let mut cur = el;
            let mut j = 0u32;
            while !cur.is_zero() {
                let mut e = inv.clone();
                e[i] += j;
                next.push((cur.clone(), &coeff * &b.binomial(j), e));
                cur = bracket(&y, &cur, n)?;
                j += 1;
            }
        }
        partial = next;
    }
    let mut out = LocalizedOperator { n, terms: Vec::new() };
    for (el, coeff, inv) in partial {
        out.push(UEAElement::from_lie(&el)?.scale(&coeff), inv);
    }
    Ok(out)
}

fn twisted_index(g: &BasisElement, spec: &TwistSpec) -> Result<(usize, Scalar)> {
    let i = match g {
        BasisElement::RootVector(r) => match r.kind() {
            Some(RootKind::Short(i)) | Some(RootKind::NegShort(i)) | Some(RootKind::Sum(i, _)) if g_is_generator(r.kind()) => i,
            _ => return Err(Error::Unsupported(format!("{g} is not one of X[±e_i], X[+2e_i]"))),
        },
        _ => return Err(Error::Unsupported(format!("{g} is not one of X[±e_i], X[+2e_i]"))),
    };
    let b = spec.param_for(i).ok_or_else(|| Error::IndexNotInTwist(g.to_string()))?;
    Ok((i, b.clone()))
}

fn g_is_generator(kind: Option<RootKind>) -> bool {
    match kind {
        Some(RootKind::Short(_)) | Some(RootKind::NegShort(_)) => true,
        Some(RootKind::Sum(i, j)) => i == j,
        _ => false,
    }
}

/// `θ_b(g)` for `g ∈ {X_{−ε_i}, X_{ε_i}, X_{2ε_i}}` with `i` in the twist set,
/// computed from the defining series. The closed forms are
/// `θ_b(X_{−ε}) = X_{−ε}`, `θ_b(X_ε) = X_ε + 2b X_{−ε} X_{−2ε}^{-1}` and
/// `θ_b(X_{2ε}) = X_{2ε} − 4b(h + b − 1) X_{−2ε}^{-1}`.
pub fn theta_generator(g: &BasisElement, spec: &TwistSpec, n: usize) -> Result<LocalizedOperator> {
    twisted_index(g, spec)?;
    theta_lie(&LieElement::basis(n, g.clone())?, spec)
}

/// The same three images in the form printed alongside the definition of
/// `θ_b`: `X_{−ε}`, `X_ε + b X_{−ε} X_{−2ε}^{-1}`,
/// `X_{2ε} + 2b(b − 1 − 2h) X_{−2ε}^{-1}`. These differ from the series
/// (by `b X_{−ε}X_{−2ε}^{-1}` and by `−6b(b−1) X_{−2ε}^{-1}` respectively),
/// so they are kept only for comparison.
pub fn theta_generator_printed(g: &BasisElement, spec: &TwistSpec, n: usize) -> Result<LocalizedOperator> {
    let (i, b) = twisted_index(g, spec)?;
    let mut inv = vec![0u32; n];
    inv[i] = 1;
    let gen = UEAElement::generator(n, g)?;
    let mut out = LocalizedOperator::from_uea(gen);
    match g {
        BasisElement::RootVector(r) => match r.kind().expect("checked") {
            RootKind::NegShort(_) => {}
            RootKind::Short(_) => {
                let xm = UEAElement::generator(n, &BasisElement::root(RootKind::NegShort(i), n))?;
                out.push(xm.scale(&b), inv);
            }
            _ => {
                let h = UEAElement::generator(n, &BasisElement::Cartan(i))?;
                let poly = UEAElement::scalar(n, &b - &Scalar::one()).sub(&h.scale(&Scalar::from_int(2)));
                out.push(poly.scale(&(&Scalar::from_int(2) * &b)), inv);
            }
        },
        _ => unreachable!("checked by twisted_index"),
    }
    Ok(out)
}

/// `Π_l X_{−2ε_{i_l}}^{b_l} · g · Π_l X_{−2ε_{i_l}}^{−b_l}` acting on `v`,
/// for nonnegative integer `b`.
pub fn conjugation_oracle(g: &UEAElement, spec: &TwistSpec, v: &LaurentVector, module: &ModuleDescriptor) -> Result<LaurentVector> {
    let bs = integer_params(spec)?;
    let mut w = v.clone();
    for (&i, &b) in spec.indices.iter().zip(&bs) {
        w = apply_neg_d2_power(&w, i, -b, module)?;
    }
    w = apply(&weyl_image(g)?, &w, module)?;
    for (&i, &b) in spec.indices.iter().zip(&bs) {
        w = apply_neg_d2_power(&w, i, b, module)?;
    }
    Ok(w)
}

fn integer_params(spec: &TwistSpec) -> Result<Vec<i64>> {
    spec.b
        .iter()
        .map(|b| match b.as_i64() {
            Some(k) if k >= 0 => Ok(k),
            _ => Err(Error::InvalidTwist(format!("parameter {b} is not a nonnegative integer"))),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistMismatch {
    pub generator: String,
    pub offset: Vec<i64>,
    pub twisted: String,
    pub conjugated: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistReport {
    pub rank: usize,
    pub indices: Vec<usize>,
    pub b: Vec<String>,
    pub base: Vec<String>,
    pub depth: i64,
    pub checks: usize,
    pub mismatches: Vec<TwistMismatch>,
}

impl TwistReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `θ_b(g)` with conjugation by `Π X_{−2ε_{i_l}}^{b_l}` for every
/// twisted generator `g` and every `t^{a+m}` with `|m_i| ≤ depth`, in `F(a)`.
pub fn verify_theta_conjugation(spec: &TwistSpec, a: &[Scalar], depth: i64) -> Result<TwistReport> {
    verify_theta_with(spec, a, depth, theta_generator)
}

/// As [`verify_theta_conjugation`], but for any candidate image of the
/// generators (for instance [`theta_generator_printed`]).
pub fn verify_theta_with(
    spec: &TwistSpec,
    a: &[Scalar],
    depth: i64,
    theta: fn(&BasisElement, &TwistSpec, usize) -> Result<LocalizedOperator>,
) -> Result<TwistReport> {
    let n = a.len();
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    integer_params(spec)?;
    let module = ModuleDescriptor::FullLaurent(a.to_vec());
    let lo = vec![-depth; n];
    let hi = vec![depth; n];
    let points = box_points(&lo, &hi);
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for &i in &spec.indices {
        if i >= n {
            return Err(Error::InvalidTwist(format!("twist index out of range for rank {n}")));
        }
        for kind in [RootKind::NegShort(i), RootKind::Short(i), RootKind::Sum(i, i)] {
            let g = BasisElement::root(kind, n);
            let op = theta(&g, spec, n)?;
            let gu = UEAElement::generator(n, &g)?;
            for m in &points {
                checks += 1;
                let v = LaurentVector::basis(a.to_vec(), m.clone())?;
                let lhs = op.apply(&v, &module)?;
                let rhs = conjugation_oracle(&gu, spec, &v, &module)?;
                if lhs != rhs {
                    mismatches.push(TwistMismatch {
                        generator: g.to_string(),
                        offset: m.clone(),
                        twisted: lhs.to_string(),
                        conjugated: rhs.to_string(),
                    });
                }
            }
        }
    }
    Ok(TwistReport {
        rank: n,
        indices: spec.indices.iter().map(|i| i + 1).collect(),
        b: spec.b.iter().map(|x| x.to_string()).collect(),
        base: a.iter().map(|x| x.to_string()).collect(),
        depth,
        checks,
        mismatches,
    })
}
