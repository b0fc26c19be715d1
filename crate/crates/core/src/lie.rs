//! Root data, the distinguished basis, and the Lie bracket of the
//! symplectic oscillator algebra `g_n = sp_2n ⋉ H_n`.
//!
//! Structure constants are computed once per rank from the realization of
//! `g_n` on `C^{2n} ⊕ Cz`: `sp_2n` as `2n × 2n` matrices, the Heisenberg
//! vectors as column vectors, and `[e_i, e_{n+i}] = z`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::scalar::{Scalar, Q};

/// A root in ε-coordinates: `ε_i − ε_j` is stored as `e_i − e_j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root(Vec<i8>);

/// The shape of a root of `g_n`, indices zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    /// `ε_i − ε_j`, `i ≠ j`
    Difference(usize, usize),
    /// `ε_i + ε_j`, `i ≤ j`
    Sum(usize, usize),
    /// `−ε_i − ε_j`, `i ≤ j`
    NegSum(usize, usize),
    /// `ε_i`
    Short(usize),
    /// `−ε_i`
    NegShort(usize),
}

impl Root {
    pub fn new(coords: Vec<i8>) -> Self {
        Root(coords)
    }

    pub fn from_kind(kind: RootKind, n: usize) -> Self {
        let mut c = vec![0i8; n];
        match kind {
            RootKind::Difference(i, j) => {
                c[i] += 1;
                c[j] -= 1;
            }
            RootKind::Sum(i, j) => {
                c[i] += 1;
                c[j] += 1;
            }
            RootKind::NegSum(i, j) => {
                c[i] -= 1;
                c[j] -= 1;
            }
            RootKind::Short(i) => c[i] += 1,
            RootKind::NegShort(i) => c[i] -= 1,
        }
        Root(c)
    }

    pub fn coords(&self) -> &[i8] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    /// First nonzero coordinate positive.
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).map(|&c| c > 0).unwrap_or(false)
    }

    /// `None` when the vector is not a root of `g_n`.
    pub fn kind(&self) -> Option<RootKind> {
        let nz: Vec<(usize, i8)> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        match nz.as_slice() {
            [(i, 1)] => Some(RootKind::Short(*i)),
            [(i, -1)] => Some(RootKind::NegShort(*i)),
            [(i, 2)] => Some(RootKind::Sum(*i, *i)),
            [(i, -2)] => Some(RootKind::NegSum(*i, *i)),
            [(i, 1), (j, 1)] => Some(RootKind::Sum(*i, *j)),
            [(i, -1), (j, -1)] => Some(RootKind::NegSum(*i, *j)),
            [(i, 1), (j, -1)] => Some(RootKind::Difference(*i, *j)),
            [(i, -1), (j, 1)] => Some(RootKind::Difference(*j, *i)),
            _ => None,
        }
    }

    /// Long and medium roots `±ε_i ± ε_j` belong to `sp_2n`; `±ε_i` do not.
    pub fn is_symplectic(&self) -> bool {
        !matches!(self.kind(), Some(RootKind::Short(_)) | Some(RootKind::NegShort(_)))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            f.write_str(if c > 0 { "+" } else { "-" })?;
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "e{}", i + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Root({self})")
    }
}

/// An element of the distinguished basis `{X_α} ∪ {h_i} ∪ {z}`.
/// Cartan indices are zero-based internally and printed one-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BasisElement {
    RootVector(Root),
    Cartan(usize),
    Central,
}

impl BasisElement {
    pub fn root(kind: RootKind, n: usize) -> Self {
        BasisElement::RootVector(Root::from_kind(kind, n))
    }

    fn block(&self) -> u8 {
        match self {
            BasisElement::RootVector(r) if !r.is_positive() => 0,
            BasisElement::Cartan(_) => 1,
            BasisElement::Central => 2,
            BasisElement::RootVector(_) => 3,
        }
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        match self {
            BasisElement::RootVector(r) => r.rank() == n && r.kind().is_some(),
            BasisElement::Cartan(i) => *i < n,
            BasisElement::Central => true,
        }
    }

    /// Members of `sp_2n`: Cartan elements and root vectors for `±ε_i ± ε_j`.
    pub fn is_symplectic(&self) -> bool {
        match self {
            BasisElement::RootVector(r) => r.is_symplectic(),
            BasisElement::Cartan(_) => true,
            BasisElement::Central => false,
        }
    }

    pub fn parse(text: &str, n: usize) -> std::result::Result<Self, ParseError> {
        let t = text.trim();
        let bad = |msg: &str| ParseError::new(msg, t, 1);
        let elem = if t == "z" {
            BasisElement::Central
        } else if let Some(idx) = t.strip_prefix('h') {
            let i: usize = idx.parse().map_err(|_| bad("expected Cartan index"))?;
            if i == 0 {
                return Err(bad("Cartan indices start at 1"));
            }
            BasisElement::Cartan(i - 1)
        } else if let Some(inner) = t.strip_prefix("X[").and_then(|r| r.strip_suffix(']')) {
            BasisElement::RootVector(parse_root(inner, n).map_err(|m| bad(&m))?)
        } else {
            return Err(bad("unknown basis element"));
        };
        if !elem.is_valid_for(n) {
            return Err(bad(&format!("not a basis element for rank {n}")));
        }
        Ok(elem)
    }
}

fn parse_root(inner: &str, n: usize) -> std::result::Result<Root, String> {
    let mut coords = vec![0i64; n];
    let bytes = inner.as_bytes();
    let mut k = 0;
    if bytes.is_empty() {
        return Err("empty root".into());
    }
    while k < bytes.len() {
        let sign = match bytes[k] {
            b'+' => 1,
            b'-' => -1,
            _ if k == 0 => 1,
            _ => return Err("expected sign".into()),
        };
        if bytes[k] == b'+' || bytes[k] == b'-' {
            k += 1;
        }
        let start = k;
        while k < bytes.len() && bytes[k].is_ascii_digit() {
            k += 1;
        }
        let mult: i64 = if start == k {
            1
        } else {
            inner[start..k].parse().map_err(|_| "bad multiplicity")?
        };
        if k >= bytes.len() || bytes[k] != b'e' {
            return Err("expected `e<index>`".into());
        }
        k += 1;
        let start = k;
        while k < bytes.len() && bytes[k].is_ascii_digit() {
            k += 1;
        }
        let idx: usize = inner[start..k].parse().map_err(|_| "bad index")?;
        if idx == 0 || idx > n {
            return Err(format!("index e{idx} out of range for rank {n}"));
        }
        coords[idx - 1] += sign * mult;
    }
    if coords.iter().any(|c| c.abs() > 2) {
        return Err("not a root".into());
    }
    let root = Root(coords.iter().map(|&c| c as i8).collect());
    if root.kind().is_none() {
        return Err("not a root".into());
    }
    Ok(root)
}

/// Default PBW order: `n_-` first, then `h_1..h_n`, `z`, then `n_+`; roots
/// within a block are ordered lexicographically on ε-coordinates.
impl Ord for BasisElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.block().cmp(&other.block()).then_with(|| match (self, other) {
            (BasisElement::RootVector(a), BasisElement::RootVector(b)) => a.cmp(b),
            (BasisElement::Cartan(a), BasisElement::Cartan(b)) => a.cmp(b),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for BasisElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::RootVector(r) => write!(f, "X[{r}]"),
            BasisElement::Cartan(i) => write!(f, "h{}", i + 1),
            BasisElement::Central => f.write_str("z"),
        }
    }
}

impl fmt::Debug for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Weight of a basis element under `ad h_n`: its root, or `None` for zero.
pub fn weight_of(x: &BasisElement) -> Option<Root> {
    match x {
        BasisElement::RootVector(r) => Some(r.clone()),
        _ => None,
    }
}

/// Weight as an integer vector, zero for Cartan and central elements.
pub fn weight_vector(x: &BasisElement, n: usize) -> Vec<i64> {
    weight_of(x).map(|r| r.to_i64()).unwrap_or_else(|| vec![0; n])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    pub roots: Vec<Root>,
    pub positive: Vec<Root>,
}

/// `Δ = {±ε_i ± ε_j, ±ε_j} \ {0}` and its positive part.
pub fn root_system(n: usize) -> Result<RootSystem> {
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    let mut positive = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            positive.push(Root::from_kind(RootKind::Difference(i, j), n));
        }
    }
    for k in 0..n {
        for l in k..n {
            positive.push(Root::from_kind(RootKind::Sum(k, l), n));
        }
    }
    for k in 0..n {
        positive.push(Root::from_kind(RootKind::Short(k), n));
    }
    positive.sort();
    let mut roots: Vec<Root> = positive.iter().map(Root::neg).chain(positive.iter().cloned()).collect();
    roots.sort();
    Ok(RootSystem { roots, positive })
}

/// Positive roots of `sp_2n` (the long and medium ones).
pub fn symplectic_positive_roots(n: usize) -> Result<Vec<Root>> {
    Ok(root_system(n)?
        .positive
        .into_iter()
        .filter(Root::is_symplectic)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    /// `n_- ⊕ h_n ⊕ n_+`
    Standard,
    /// `g_n^- ⊕ g_n^0 ⊕ g_n^+` with `g_n^0 = h_n ⊕ gl_n` roots
    Parabolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub negative: Vec<BasisElement>,
    pub zero: Vec<BasisElement>,
    pub positive: Vec<BasisElement>,
}

pub fn decomposition_parts(n: usize, kind: DecompositionKind) -> Result<Decomposition> {
    let alg = SymplecticOscillator::rank(n)?;
    let mut d = Decomposition {
        negative: Vec::new(),
        zero: Vec::new(),
        positive: Vec::new(),
    };
    for e in alg.basis() {
        let part = match (kind, e) {
            (_, BasisElement::Cartan(_)) | (_, BasisElement::Central) => &mut d.zero,
            (DecompositionKind::Standard, BasisElement::RootVector(r)) => {
                if r.is_positive() {
                    &mut d.positive
                } else {
                    &mut d.negative
                }
            }
            (DecompositionKind::Parabolic, BasisElement::RootVector(r)) => match r.kind() {
                Some(RootKind::Difference(_, _)) => &mut d.zero,
                Some(RootKind::Sum(_, _)) | Some(RootKind::Short(_)) => &mut d.positive,
                _ => &mut d.negative,
            },
        };
        part.push(e.clone());
    }
    Ok(d)
}

/// Whether the span of `part` is closed under the bracket.
pub fn is_subalgebra(part: &[BasisElement], n: usize) -> Result<bool> {
    let alg = SymplecticOscillator::rank(n)?;
    let members: BTreeSet<&BasisElement> = part.iter().collect();
    for x in part {
        for y in part {
            let b = alg.bracket_basis(x, y)?;
            if b.terms.keys().any(|e| !members.contains(e)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sparse linear combination of basis elements with scalar coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    pub(crate) n: usize,
    pub(crate) terms: BTreeMap<BasisElement, Scalar>,
}

impl LieElement {
    pub fn zero(n: usize) -> Self {
        LieElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(n: usize, e: BasisElement) -> Result<Self> {
        if !e.is_valid_for(n) {
            return Err(Error::IndexOutOfRange(e.to_string(), n));
        }
        let mut terms = BTreeMap::new();
        terms.insert(e, Scalar::one());
        Ok(LieElement { n, terms })
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (BasisElement, Scalar)>) -> Result<Self> {
        let mut out = LieElement::zero(n);
        for (e, c) in terms {
            if !e.is_valid_for(n) {
                return Err(Error::IndexOutOfRange(e.to_string(), n));
            }
            out.add_term(e, &c);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<BasisElement, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, e: &BasisElement) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, e: BasisElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> LieElement {
        if c.is_zero() {
            return LieElement::zero(self.n);
        }
        LieElement {
            n: self.n,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn bracket(&self, other: &LieElement) -> Result<LieElement> {
        bracket(self, other, self.n)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(String, Scalar)> = self.terms.iter().map(|(e, c)| (e.to_string(), c.clone())).collect();
        crate::parse::write_linear_combination(f, &items)
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieElement({self})")
    }
}

/// `[x, y]` for elements of `g_n`.
pub fn bracket(x: &LieElement, y: &LieElement, n: usize) -> Result<LieElement> {
    for el in [x, y] {
        if el.n != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: el.n,
            });
        }
    }
    let alg = SymplecticOscillator::rank(n)?;
    let mut out = LieElement::zero(n);
    for (a, ca) in &x.terms {
        let ia = alg.index_of(a)?;
        for (b, cb) in &y.terms {
            let ib = alg.index_of(b)?;
            let coeff = ca * cb;
            for (k, q) in alg.structure(ia, ib) {
                out.add_term(alg.basis[*k as usize].clone(), &(&coeff * &Scalar::from(q)));
            }
        }
    }
    Ok(out)
}

/// A weight `λ ∈ h_n^*`: values on `h_1..h_n` and on `z`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Weight {
    pub h: Vec<Scalar>,
    pub z: Scalar,
}

impl Weight {
    pub fn new(h: Vec<Scalar>, z: Scalar) -> Self {
        Weight { h, z }
    }

    pub fn zero(n: usize) -> Self {
        Weight {
            h: vec![Scalar::zero(); n],
            z: Scalar::zero(),
        }
    }

    pub fn rank(&self) -> usize {
        self.h.len()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight {
            h: self.h.iter().zip(&other.h).map(|(a, b)| a + b).collect(),
            z: &self.z + &other.z,
        }
    }

    /// Adds an integer ε-offset to the Cartan part.
    pub fn shifted(&self, offset: &[i64]) -> Weight {
        Weight {
            h: self
                .h
                .iter()
                .zip(offset)
                .map(|(a, &o)| a + &Scalar::from_int(o))
                .collect(),
            z: self.z.clone(),
        }
    }

    /// `ρ_S = ½(ε_1 + ... + ε_n)` shift used throughout the Shale–Weil dictionary.
    pub fn half_sum(n: usize) -> Weight {
        Weight {
            h: vec![Scalar::ratio(1, 2); n],
            z: Scalar::zero(),
        }
    }

    pub fn neg(&self) -> Weight {
        Weight {
            h: self.h.iter().map(|a| -a).collect(),
            z: -&self.z,
        }
    }

    /// Value on a Cartan or central basis element.
    pub fn value_on(&self, e: &BasisElement) -> Option<Scalar> {
        match e {
            BasisElement::Cartan(i) => self.h.get(*i).cloned(),
            BasisElement::Central => Some(self.z.clone()),
            BasisElement::RootVector(_) => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.h.iter().map(|c| c.to_string()).collect();
        write!(f, "({}; z={})", h.join(","), self.z)
    }
}

/// Element of `g_n` as (matrix in `sp_2n`, vector in `C^{2n}`, central part).
#[derive(Clone, Debug, PartialEq)]
struct Realized {
    m: Vec<Vec<i64>>,
    v: Vec<i64>,
    c: i64,
}

impl Realized {
    fn zero(n: usize) -> Self {
        Realized {
            m: vec![vec![0; 2 * n]; 2 * n],
            v: vec![0; 2 * n],
            c: 0,
        }
    }

    fn of(e: &BasisElement, n: usize) -> Self {
        let mut r = Realized::zero(n);
        match e {
            BasisElement::Central => r.c = 1,
            BasisElement::Cartan(i) => {
                r.m[*i][*i] = 1;
                r.m[n + i][n + i] = -1;
            }
            BasisElement::RootVector(root) => match root.kind().expect("valid root") {
                RootKind::Short(i) => r.v[i] = 1,
                RootKind::NegShort(i) => r.v[n + i] = 1,
                RootKind::Sum(i, j) => {
                    r.m[i][n + j] += 1;
                    r.m[j][n + i] += 1;
                }
                RootKind::NegSum(i, j) => {
                    r.m[n + i][j] += 1;
                    r.m[n + j][i] += 1;
                }
                RootKind::Difference(i, j) => {
                    r.m[i][j] = 1;
                    r.m[n + j][n + i] = -1;
                }
            },
        }
        r
    }

    fn bracket(&self, other: &Realized, n: usize) -> Realized {
        let d = 2 * n;
        let mut out = Realized::zero(n);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0;
                for k in 0..d {
                    acc += self.m[i][k] * other.m[k][j] - other.m[i][k] * self.m[k][j];
                }
                out.m[i][j] = acc;
            }
            let mut acc = 0;
            for k in 0..d {
                acc += self.m[i][k] * other.v[k] - other.m[i][k] * self.v[k];
            }
            out.v[i] = acc;
        }
        // ω(u, v) = Σ_i u_i v_{n+i} − u_{n+i} v_i
        out.c = (0..n)
            .map(|i| self.v[i] * other.v[n + i] - self.v[n + i] * other.v[i])
            .sum();
        out
    }

    /// Coordinates in the distinguished basis.
    fn decompose(&self, n: usize) -> Vec<(BasisElement, Q)> {
        let mut out = Vec::new();
        let half = Q::new(1.into(), 2.into());
        let mut push = |e: BasisElement, q: Q| {
            if !q.is_zero() {
                out.push((e, q));
            }
        };
        for i in 0..n {
            push(BasisElement::Cartan(i), Q::from_integer(self.m[i][i].into()));
            for j in 0..n {
                if i != j {
                    push(
                        BasisElement::root(RootKind::Difference(i, j), n),
                        Q::from_integer(self.m[i][j].into()),
                    );
                }
                if i <= j {
                    let scale = if i == j { half.clone() } else { Q::one() };
                    push(
                        BasisElement::root(RootKind::Sum(i, j), n),
                        Q::from_integer(self.m[i][n + j].into()) * &scale,
                    );
                    push(
                        BasisElement::root(RootKind::NegSum(i, j), n),
                        Q::from_integer(self.m[n + i][j].into()) * &scale,
                    );
                }
            }
            push(BasisElement::root(RootKind::Short(i), n), Q::from_integer(self.v[i].into()));
            push(
                BasisElement::root(RootKind::NegShort(i), n),
                Q::from_integer(self.v[n + i].into()),
            );
        }
        push(BasisElement::Central, Q::from_integer(self.c.into()));
        out
    }
}

pub(crate) type NormalFormMemo = HashMap<Vec<u16>, Arc<Vec<(Vec<u16>, Q)>>>;

/// The algebra `g_n` for a fixed rank: ordered basis and cached structure
/// constants. Obtain instances through [`SymplecticOscillator::rank`].
pub struct SymplecticOscillator {
    n: usize,
    basis: Vec<BasisElement>,
    index: HashMap<BasisElement, u16>,
    table: Vec<Vec<Vec<(u16, Q)>>>,
    weights: Vec<Vec<i64>>,
    pub(crate) normal_order_memo: RwLock<NormalFormMemo>,
}

impl SymplecticOscillator {
    /// Shared instance for rank `n`, built on first use.
    pub fn rank(n: usize) -> Result<Arc<SymplecticOscillator>> {
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<SymplecticOscillator>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(a) = cache.read().expect("rank cache poisoned").get(&n) {
            return Ok(a.clone());
        }
        let built = Arc::new(SymplecticOscillator::build(n));
        let mut w = cache.write().expect("rank cache poisoned");
        Ok(w.entry(n).or_insert(built).clone())
    }

    fn build(n: usize) -> Self {
        let rs = root_system(n).expect("n >= 1");
        let mut basis: Vec<BasisElement> = rs.roots.iter().cloned().map(BasisElement::RootVector).collect();
        basis.extend((0..n).map(BasisElement::Cartan));
        basis.push(BasisElement::Central);
        basis.sort();
        let index: HashMap<BasisElement, u16> = basis.iter().enumerate().map(|(i, e)| (e.clone(), i as u16)).collect();
        let realized: Vec<Realized> = basis.iter().map(|e| Realized::of(e, n)).collect();
        let mut table = vec![vec![Vec::new(); basis.len()]; basis.len()];
        for (i, a) in realized.iter().enumerate() {
            for (j, b) in realized.iter().enumerate() {
                let br = a.bracket(b, n);
                let mut combo: Vec<(u16, Q)> = br.decompose(n).into_iter().map(|(e, q)| (index[&e], q)).collect();
                combo.sort_by_key(|(k, _)| *k);
                table[i][j] = combo;
            }
        }
        let weights = basis.iter().map(|e| weight_vector(e, n)).collect();
        SymplecticOscillator {
            n,
            basis,
            index,
            table,
            weights,
            normal_order_memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `dim g_n = n(2n+1) + 2n + 1`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis in PBW order.
    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, idx: u16) -> &BasisElement {
        &self.basis[idx as usize]
    }

    pub fn index_of(&self, e: &BasisElement) -> Result<u16> {
        self.index
            .get(e)
            .copied()
            .ok_or_else(|| Error::IndexOutOfRange(e.to_string(), self.n))
    }

    pub(crate) fn structure(&self, i: u16, j: u16) -> &[(u16, Q)] {
        &self.table[i as usize][j as usize]
    }

    pub(crate) fn weight_of_index(&self, i: u16) -> &[i64] {
        &self.weights[i as usize]
    }

    pub fn bracket_basis(&self, x: &BasisElement, y: &BasisElement) -> Result<LieElement> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        let mut out = LieElement::zero(self.n);
        for (k, q) in self.structure(i, j) {
            out.add_term(self.basis[*k as usize].clone(), &Scalar::from(q));
        }
        Ok(out)
    }

    /// Number of `n_-` elements; they occupy indices `0..count` in PBW order.
    pub fn negative_count(&self) -> usize {
        self.basis.iter().take_while(|e| e.block() == 0).count()
    }

    pub fn central_index(&self) -> u16 {
        self.index[&BasisElement::Central]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str, n: usize) -> LieElement {
        LieElement::basis(n, BasisElement::parse(s, n).unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_bracket() {
        let b = bracket(&el("X[+e1]", 2), &el("X[-e1]", 2), 2).unwrap();
        assert_eq!(b, el("z", 2));
        let b = bracket(&el("X[+e1]", 2), &el("X[-e2]", 2), 2).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn central_element_commutes_with_every_root_vector() {
        for n in 1..=3 {
            let alg = SymplecticOscillator::rank(n).unwrap();
            for e in alg.basis() {
                assert!(alg.bracket_basis(&BasisElement::Central, e).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn table_examples() {
        let b = bracket(&el("X[+e1-e2]", 2), &el("X[-e1+e2]", 2), 2).unwrap();
        assert_eq!(b, el("h1", 2).sub(&el("h2", 2)));
        let b = bracket(&el("X[+2e1]", 1), &el("X[-2e1]", 1), 1).unwrap();
        assert_eq!(b, el("h1", 1).scale(&Scalar::from_int(4)));
        let b = bracket(&el("X[+e1-e2]", 2), &el("X[+e2]", 2), 2).unwrap();
        assert_eq!(b, el("X[+e1]", 2));
    }

    #[test]
    fn root_system_sizes() {
        let rs = root_system(1).unwrap();
        assert_eq!(rs.positive, vec![Root::new(vec![1]), Root::new(vec![2])]);
        assert_eq!(rs.roots, vec![Root::new(vec![-2]), Root::new(vec![-1]), Root::new(vec![1]), Root::new(vec![2])]);
        for n in 1..=4 {
            let rs = root_system(n).unwrap();
            assert_eq!(rs.roots.len(), 2 * n * n + 2 * n);
        }
        assert!(matches!(root_system(0), Err(Error::ZeroRank)));
    }

    #[test]
    fn root_system_matches_enumeration() {
        // {±ε_i ± ε_j, ±ε_j} \ {0}
        for n in 1..=3 {
            let mut brute = BTreeSet::new();
            for i in 0..n {
                for j in 0..n {
                    for si in [-1i8, 1] {
                        for sj in [-1i8, 1] {
                            let mut c = vec![0i8; n];
                            c[i] += si;
                            c[j] += sj;
                            if c.iter().any(|&x| x != 0) {
                                brute.insert(c);
                            }
                        }
                    }
                    for sj in [-1i8, 1] {
                        let mut c = vec![0i8; n];
                        c[j] = sj;
                        brute.insert(c);
                    }
                }
            }
            let ours: BTreeSet<Vec<i8>> = root_system(n).unwrap().roots.iter().map(|r| r.coords().to_vec()).collect();
            assert_eq!(ours, brute);
        }
    }

    #[test]
    fn dimension_formula() {
        for n in 1..=4 {
            let alg = SymplecticOscillator::rank(n).unwrap();
            assert_eq!(alg.dim(), n * (2 * n + 1) + 2 * n + 1);
        }
    }

    #[test]
    fn decompositions_partition_and_close() {
        for n in 1..=3 {
            for kind in [DecompositionKind::Standard, DecompositionKind::Parabolic] {
                let d = decomposition_parts(n, kind).unwrap();
                let alg = SymplecticOscillator::rank(n).unwrap();
                assert_eq!(d.negative.len() + d.zero.len() + d.positive.len(), alg.dim());
                let all: BTreeSet<_> = d.negative.iter().chain(&d.zero).chain(&d.positive).collect();
                assert_eq!(all.len(), alg.dim());
                for part in [&d.negative, &d.zero, &d.positive] {
                    assert!(is_subalgebra(part, n).unwrap());
                }
            }
        }
        let d = decomposition_parts(1, DecompositionKind::Standard).unwrap();
        assert_eq!(d.positive, vec![el_b("X[+e1]", 1), el_b("X[+2e1]", 1)]);
        let d = decomposition_parts(2, DecompositionKind::Parabolic).unwrap();
        let zero: BTreeSet<_> = d.zero.iter().cloned().collect();
        let expected: BTreeSet<_> = ["h1", "h2", "z", "X[+e1-e2]", "X[-e1+e2]"].iter().map(|s| el_b(s, 2)).collect();
        assert_eq!(zero, expected);
        let d = decomposition_parts(1, DecompositionKind::Parabolic).unwrap();
        assert_eq!(d.positive, vec![el_b("X[+e1]", 1), el_b("X[+2e1]", 1)]);
    }

    fn el_b(s: &str, n: usize) -> BasisElement {
        BasisElement::parse(s, n).unwrap()
    }

    #[test]
    fn weights_of_basis_elements() {
        assert_eq!(weight_of(&el_b("X[+e1+e2]", 2)), Some(Root::new(vec![1, 1])));
        assert_eq!(weight_of(&el_b("h3", 3)), None);
        assert_eq!(weight_of(&BasisElement::Central), None);
    }

    #[test]
    fn invalid_indices_are_rejected() {
        assert!(BasisElement::parse("h3", 2).is_err());
        assert!(BasisElement::parse("X[+e3]", 2).is_err());
        assert!(BasisElement::parse("X[+e1+e2+e1]", 2).is_err());
        let bad = LieElement {
            n: 2,
            terms: [(BasisElement::Cartan(5), Scalar::one())].into_iter().collect(),
        };
        assert!(matches!(bracket(&bad, &el("h1", 2), 2), Err(Error::IndexOutOfRange(_, 2))));
    }

    #[test]
    fn element_syntax_round_trips() {
        let alg = SymplecticOscillator::rank(3).unwrap();
        for e in alg.basis() {
            assert_eq!(&BasisElement::parse(&e.to_string(), 3).unwrap(), e);
        }
        assert_eq!(el_b("X[+e1+e1]", 1), el_b("X[+2e1]", 1));
    }

    #[test]
    fn pbw_order_blocks() {
        let alg = SymplecticOscillator::rank(1).unwrap();
        let names: Vec<String> = alg.basis().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["X[-2e1]", "X[-e1]", "h1", "z", "X[+e1]", "X[+2e1]"]);
    }
}
