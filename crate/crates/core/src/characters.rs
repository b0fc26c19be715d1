//! Weight multiplicities: Kostant partition counts, Verma and generalized
//! Verma characters, characters of `S`, `F(a)`, `G(a)`, their convolutions,
//! and the flag sets `I, F, F⁺, F⁻` read off a support.
//!
//! A [`CharTable`] stores multiplicities at integer ε-offsets from a
//! reference weight inside a box, together with a [`SupportBound`]
//! describing where the support can lie outside the box. The bound is what
//! makes convolution exact on a computable sub-box.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{root_system, symplectic_positive_roots, Weight};
use crate::scalar::Scalar;
use crate::weyl::{box_points, ModuleDescriptor};

/// Counts `Z_+`-combinations of a fixed list of roots, memoized.
pub struct PartitionCounter {
    roots: Vec<Vec<i64>>,
    heights: Vec<i64>,
    weights: Vec<i64>,
    in_cone: bool,
    memo: HashMap<(Vec<i64>, usize), u64>,
}

impl PartitionCounter {
    /// Every root must have positive height under `(n, n−1, …, 1)`.
    pub fn new(roots: &[Vec<i64>]) -> Result<Self> {
        let n = roots.first().map(Vec::len).unwrap_or(0);
        let weights: Vec<i64> = (0..n).map(|i| (n - i) as i64).collect();
        let mut heights = Vec::new();
        for r in roots {
            if r.len() != n {
                return Err(Error::RankMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            let h = dot(r, &weights);
            if h <= 0 {
                return Err(Error::NonPositiveRoot(r.clone()));
            }
            heights.push(h);
        }
        let in_cone = roots.iter().all(|r| partial_sums(r).iter().all(|&p| p >= 0));
        Ok(PartitionCounter {
            roots: roots.to_vec(),
            heights,
            weights,
            in_cone,
            memo: HashMap::new(),
        })
    }

    pub fn count(&mut self, mu: &[i64]) -> u64 {
        if self.roots.is_empty() {
            return mu.iter().all(|&x| x == 0) as u64;
        }
        if mu.len() != self.weights.len() {
            return 0;
        }
        self.count_from(mu.to_vec(), 0)
    }

    fn count_from(&mut self, mu: Vec<i64>, k: usize) -> u64 {
        let h = dot(&mu, &self.weights);
        if h < 0 || (self.in_cone && partial_sums(&mu).iter().any(|&p| p < 0)) {
            return 0;
        }
        if k == self.roots.len() {
            return mu.iter().all(|&x| x == 0) as u64;
        }
        if h == 0 {
            return mu.iter().all(|&x| x == 0) as u64;
        }
        let key = (mu, k);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let (mu, _) = &key;
        let mut total = 0u64;
        let mut cur = mu.clone();
        let mut height = h;
        while height >= 0 {
            total += self.count_from(cur.clone(), k + 1);
            for (c, r) in cur.iter_mut().zip(&self.roots[k]) {
                *c -= r;
            }
            height -= self.heights[k];
        }
        self.memo.insert(key, total);
        total
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn partial_sums(v: &[i64]) -> Vec<i64> {
    v.iter()
        .scan(0i64, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Number of ways to write `mu` as a `Z_+`-combination of `roots`.
pub fn kostant_partition(mu: &[i64], roots: &[Vec<i64>]) -> Result<u64> {
    Ok(PartitionCounter::new(roots)?.count(mu))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    /// `g_n`
    G,
    /// `sp_2n`
    Sp,
}

/// Positive roots of the chosen algebra.
pub fn positive_roots(n: usize, algebra: Algebra) -> Result<Vec<Vec<i64>>> {
    let roots = match algebra {
        Algebra::G => root_system(n)?.positive,
        Algebra::Sp => symplectic_positive_roots(n)?,
    };
    Ok(roots.iter().map(|r| r.to_i64()).collect())
}

/// Negatives of the roots spanning `g_n^-` (or its `sp_2n` part):
/// `ε_i + ε_j` (`i ≤ j`), plus `ε_i` for `g_n`.
pub fn parabolic_roots(n: usize, algebra: Algebra) -> Result<Vec<Vec<i64>>> {
    Ok(positive_roots(n, algebra)?
        .into_iter()
        .filter(|r| r.iter().all(|&c| c >= 0))
        .collect())
}

/// Where the support may lie beyond the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SupportBound {
    /// The whole support is inside the box.
    Finite,
    /// Every supported offset `ν` has partial sums `ν_1 + … + ν_k ≤ cap_k`.
    Cone { cap: Vec<i64> },
    /// No information.
    Lattice,
}

/// Multiplicities at integer offsets from `reference`, exact in `lo ≤ ν ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    reference: Weight,
    lo: Vec<i64>,
    hi: Vec<i64>,
    mult: Vec<u64>,
    bound: SupportBound,
}

impl CharTable {
    pub fn new(reference: Weight, lo: Vec<i64>, hi: Vec<i64>, bound: SupportBound) -> Result<Self> {
        let n = reference.rank();
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        if lo.len() != n || hi.len() != n {
            return Err(Error::RankMismatch {
                expected: n,
                found: lo.len().min(hi.len()),
            });
        }
        if let SupportBound::Cone { cap } = &bound {
            if cap.len() != n {
                return Err(Error::RankMismatch {
                    expected: n,
                    found: cap.len(),
                });
            }
        }
        let size = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| if h >= l { (h - l + 1) as usize } else { 0 })
            .product();
        Ok(CharTable {
            reference,
            lo,
            hi,
            mult: vec![0; size],
            bound,
        })
    }

    /// Multiplicity one at the reference weight.
    pub fn delta(reference: Weight) -> Self {
        let n = reference.rank();
        let mut t = CharTable::new(reference, vec![0; n], vec![0; n], SupportBound::Finite).expect("rank ≥ 1");
        t.mult[0] = 1;
        t
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    pub fn reference(&self) -> &Weight {
        &self.reference
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn bound(&self) -> &SupportBound {
        &self.bound
    }

    pub fn in_box(&self, offset: &[i64]) -> bool {
        offset.len() == self.rank() && offset.iter().zip(&self.lo).zip(&self.hi).all(|((x, l), h)| l <= x && x <= h)
    }

    fn index(&self, offset: &[i64]) -> usize {
        offset
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .fold(0usize, |idx, (x, (l, h))| idx * (h - l + 1) as usize + (x - l) as usize)
    }

    /// Multiplicity at `offset`; `None` outside the box unless the bound
    /// says the support cannot reach it.
    pub fn get(&self, offset: &[i64]) -> Option<u64> {
        if self.in_box(offset) {
            return Some(self.mult[self.index(offset)]);
        }
        if offset.len() != self.rank() {
            return None;
        }
        match &self.bound {
            SupportBound::Finite => Some(0),
            SupportBound::Cone { cap } if partial_sums(offset).iter().zip(cap).any(|(p, c)| p > c) => Some(0),
            _ => None,
        }
    }

    /// Multiplicity at `offset`, zero outside the box.
    pub fn mult(&self, offset: &[i64]) -> u64 {
        if self.in_box(offset) {
            self.mult[self.index(offset)]
        } else {
            0
        }
    }

    pub fn set(&mut self, offset: &[i64], m: u64) -> Result<()> {
        if !self.in_box(offset) {
            return Err(Error::InvalidVector(format!("offset {offset:?} outside the box")));
        }
        let i = self.index(offset);
        self.mult[i] = m;
        Ok(())
    }

    /// Nonzero entries in lexicographic offset order.
    pub fn entries(&self) -> Vec<(Vec<i64>, u64)> {
        box_points(&self.lo, &self.hi)
            .into_iter()
            .filter_map(|p| {
                let m = self.mult[self.index(&p)];
                (m > 0).then_some((p, m))
            })
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.mult.iter().sum()
    }

    /// Absolute `h`-weight of an offset.
    pub fn weight_at(&self, offset: &[i64]) -> Vec<Scalar> {
        self.reference
            .h
            .iter()
            .zip(offset)
            .map(|(r, &o)| r + &Scalar::from_int(o))
            .collect()
    }

    /// The same character measured from another reference weight; the two
    /// must differ by an integer vector.
    pub fn rebased(&self, reference: &Weight) -> Result<CharTable> {
        let shift = integer_difference(&self.reference, reference)?;
        let lo = self.lo.iter().zip(&shift).map(|(l, s)| l + s).collect();
        let hi = self.hi.iter().zip(&shift).map(|(h, s)| h + s).collect();
        let bound = match &self.bound {
            SupportBound::Cone { cap } => SupportBound::Cone {
                cap: cap.iter().zip(partial_sums(&shift)).map(|(c, p)| c + p).collect(),
            },
            other => other.clone(),
        };
        Ok(CharTable {
            reference: reference.clone(),
            lo,
            hi,
            mult: self.mult.clone(),
            bound,
        })
    }

    /// Restriction to a sub-box (which must lie inside the current box).
    pub fn restricted(&self, lo: &[i64], hi: &[i64]) -> Result<CharTable> {
        let mut out = CharTable::new(self.reference.clone(), lo.to_vec(), hi.to_vec(), self.bound.clone())?;
        if matches!(out.bound, SupportBound::Finite) {
            out.bound = SupportBound::Lattice;
        }
        for p in box_points(lo, hi) {
            let m = self
                .get(&p)
                .ok_or_else(|| Error::InvalidVector(format!("offset {p:?} outside the known region")))?;
            out.set(&p, m)?;
        }
        Ok(out)
    }

    /// First offset in the common box where the two characters differ,
    /// after rebasing `other` onto this reference.
    pub fn first_difference(&self, other: &CharTable) -> Result<Option<(Vec<i64>, u64, u64)>> {
        let other = other.rebased(&self.reference)?;
        let lo: Vec<i64> = self.lo.iter().zip(&other.lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect();
        for p in box_points(&lo, &hi) {
            let (x, y) = (self.mult(&p), other.mult(&p));
            if x != y {
                return Ok(Some((p, x, y)));
            }
        }
        Ok(None)
    }
}

fn integer_difference(from: &Weight, to: &Weight) -> Result<Vec<i64>> {
    if from.rank() != to.rank() {
        return Err(Error::RankMismatch {
            expected: to.rank(),
            found: from.rank(),
        });
    }
    if from.z != to.z {
        return Err(Error::Unsupported(format!(
            "reference weights have different central values {} and {}",
            from.z, to.z
        )));
    }
    from.h
        .iter()
        .zip(&to.h)
        .map(|(a, b)| {
            (a - b)
                .as_i64()
                .ok_or_else(|| Error::Unsupported(format!("reference weights {from} and {to} differ by a non-integer")))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct BoxJson {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    offset: Vec<i64>,
    mult: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Vec<Scalar>>,
}

#[derive(Serialize, Deserialize)]
struct CharTableJson {
    reference_weight: Weight,
    #[serde(rename = "box")]
    bounds: BoxJson,
    support_bound: SupportBound,
    entries: Vec<EntryJson>,
}

impl CharTable {
    fn to_json_struct(&self, with_weights: bool) -> CharTableJson {
        CharTableJson {
            reference_weight: self.reference.clone(),
            bounds: BoxJson {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
            },
            support_bound: self.bound.clone(),
            entries: self
                .entries()
                .into_iter()
                .map(|(offset, mult)| EntryJson {
                    weight: with_weights.then(|| self.weight_at(&offset)),
                    offset,
                    mult,
                })
                .collect(),
        }
    }

    /// JSON object `{reference_weight, box, support_bound, entries}`; with
    /// `with_weights` each entry also carries its absolute weight.
    pub fn to_json(&self, with_weights: bool) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct(with_weights)).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<CharTable> {
        let j: CharTableJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidModule(format!("character table: {e}")))?;
        let mut t = CharTable::new(j.reference_weight, j.bounds.lo, j.bounds.hi, j.support_bound)?;
        for e in j.entries {
            t.set(&e.offset, e.mult)?;
        }
        Ok(t)
    }
}

impl Serialize for CharTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_struct(false).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CharTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        CharTable::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn cube(n: usize, r: i64) -> (Vec<i64>, Vec<i64>) {
    (vec![-r; n], vec![r; n])
}

/// Character of `U(n)·v` where `n` is spanned by the negatives of `roots`:
/// multiplicity at `ν` is the number of partitions of `−ν`.
pub fn partition_char(reference: Weight, roots: &[Vec<i64>], lo: &[i64], hi: &[i64]) -> Result<CharTable> {
    let n = reference.rank();
    let mut counter = PartitionCounter::new(roots)?;
    let mut t = CharTable::new(reference, lo.to_vec(), hi.to_vec(), SupportBound::Cone { cap: vec![0; n] })?;
    for p in box_points(lo, hi) {
        let mu: Vec<i64> = p.iter().map(|x| -x).collect();
        let c = counter.count(&mu);
        if c > 0 {
            t.set(&p, c)?;
        }
    }
    Ok(t)
}

/// Verma character of `M(λ)` for `g_n` or `sp_2n` on the box `|ν_i| ≤ depth`.
pub fn verma_char(lambda: &Weight, algebra: Algebra, depth: i64) -> Result<CharTable> {
    let (lo, hi) = cube(lambda.rank(), depth);
    verma_char_in(lambda, algebra, &lo, &hi)
}

pub fn verma_char_in(lambda: &Weight, algebra: Algebra, lo: &[i64], hi: &[i64]) -> Result<CharTable> {
    if lambda.rank() == 0 {
        return Err(Error::ZeroRank);
    }
    partition_char(lambda.clone(), &positive_roots(lambda.rank(), algebra)?, lo, hi)
}

/// Reference weight of a Weyl module's character under `h_i ↦ t_i∂_i + ½`.
/// For `S` it is `−½(ε_1 + … + ε_n)`, for `F(a)` it is `a + ½Σε`, and for
/// `G(a)` it is `−½` on quotiented indices and `a_i + ½` elsewhere.
pub fn module_reference(m: &ModuleDescriptor) -> Weight {
    let integral = m.integral();
    let half = Scalar::ratio(1, 2);
    let h = m
        .base()
        .iter()
        .enumerate()
        .map(|(i, a)| if integral.contains(&i) { -&half } else { a + &half })
        .collect();
    Weight::new(h, Scalar::zero())
}

/// Character of `S`, `F(a)` or `G(a)` on the box `|ν_i| ≤ depth`.
pub fn char_module(m: &ModuleDescriptor, depth: i64) -> Result<CharTable> {
    let (lo, hi) = cube(m.rank(), depth);
    char_module_in(m, &lo, &hi)
}

pub fn char_module_in(m: &ModuleDescriptor, lo: &[i64], hi: &[i64]) -> Result<CharTable> {
    m.validate()?;
    let n = m.rank();
    let integral = m.integral();
    let bound = if integral.len() == n {
        SupportBound::Cone { cap: vec![0; n] }
    } else {
        SupportBound::Lattice
    };
    let mut t = CharTable::new(module_reference(m), lo.to_vec(), hi.to_vec(), bound)?;
    for p in box_points(lo, hi) {
        if integral.iter().all(|&i| p[i] <= 0) {
            t.set(&p, 1)?;
        }
    }
    Ok(t)
}

fn finite_support_extent(t: &CharTable) -> Option<(Vec<i64>, Vec<i64>)> {
    let entries = t.entries();
    let first = entries.first()?;
    let mut lo = first.0.clone();
    let mut hi = first.0.clone();
    for (p, _) in &entries {
        for k in 0..p.len() {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    Some((lo, hi))
}

/// Whether `(A*B)(ν)` only involves entries inside both boxes.
fn safe_at(a: &CharTable, b: &CharTable, nu: &[i64]) -> bool {
    let n = nu.len();
    match (&a.bound, &b.bound) {
        (SupportBound::Finite, SupportBound::Finite) => true,
        (SupportBound::Finite, _) => a
            .entries()
            .iter()
            .all(|(alpha, _)| b.in_box(&nu.iter().zip(alpha).map(|(x, y)| x - y).collect::<Vec<_>>())),
        (_, SupportBound::Finite) => safe_at(b, a, nu),
        (SupportBound::Cone { cap: ca }, SupportBound::Cone { cap: cb }) => {
            let pn = partial_sums(nu);
            let lower: Vec<i64> = (0..n).map(|k| pn[k] - cb[k]).collect();
            let upper = ca;
            if (0..n).any(|k| lower[k] > upper[k]) {
                return true;
            }
            for k in 0..n {
                let (pl, pu) = if k == 0 { (0, 0) } else { (lower[k - 1], upper[k - 1]) };
                let amin = lower[k] - pu;
                let amax = upper[k] - pl;
                if amin < a.lo[k] || amax > a.hi[k] {
                    return false;
                }
                if nu[k] - amax < b.lo[k] || nu[k] - amin > b.hi[k] {
                    return false;
                }
            }
            true
        }
        _ => false,
    }
}

fn product_bound(a: &CharTable, b: &CharTable) -> Result<SupportBound> {
    Ok(match (&a.bound, &b.bound) {
        (SupportBound::Finite, SupportBound::Finite) => SupportBound::Finite,
        (SupportBound::Finite, SupportBound::Cone { cap }) | (SupportBound::Cone { cap }, SupportBound::Finite) => {
            let fin = if matches!(a.bound, SupportBound::Finite) { a } else { b };
            let n = cap.len();
            let mut best = vec![i64::MIN; n];
            for (p, _) in fin.entries() {
                for (bk, pk) in best.iter_mut().zip(partial_sums(&p)) {
                    *bk = (*bk).max(pk);
                }
            }
            if fin.entries().is_empty() {
                SupportBound::Finite
            } else {
                SupportBound::Cone {
                    cap: cap.iter().zip(best).map(|(c, b)| c + b).collect(),
                }
            }
        }
        (SupportBound::Cone { cap: ca }, SupportBound::Cone { cap: cb }) => SupportBound::Cone {
            cap: ca.iter().zip(cb).map(|(x, y)| x + y).collect(),
        },
        (SupportBound::Finite, SupportBound::Lattice) | (SupportBound::Lattice, SupportBound::Finite) => SupportBound::Lattice,
        _ => {
            return Err(Error::Unsupported(
                "convolution of two characters with unbounded support in opposite directions".into(),
            ))
        }
    })
}

/// `(A*B)(ν) = Σ_{α+β=ν} A(α)B(β)` on the box `lo ≤ ν ≤ hi`; fails with
/// [`Error::UnsafeConvolution`] if some `ν` there would need entries
/// outside the operands' boxes.
pub fn convolve_within(a: &CharTable, b: &CharTable, lo: &[i64], hi: &[i64]) -> Result<CharTable> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    let bound = product_bound(a, b)?;
    let reference = a.reference.add(&b.reference);
    let mut out = CharTable::new(reference, lo.to_vec(), hi.to_vec(), bound)?;
    let a_entries = a.entries();
    for nu in box_points(lo, hi) {
        if !safe_at(a, b, &nu) {
            return Err(Error::UnsafeConvolution(nu));
        }
        let mut total = 0u64;
        for (alpha, ma) in &a_entries {
            let beta: Vec<i64> = nu.iter().zip(alpha).map(|(x, y)| x - y).collect();
            total += ma * b.mult(&beta);
        }
        out.set(&nu, total)?;
    }
    if matches!(out.bound, SupportBound::Finite) {
        let covers = a.entries().iter().all(|(x, _)| {
            b.entries()
                .iter()
                .all(|(y, _)| out.in_box(&x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>()))
        });
        if !covers {
            out.bound = SupportBound::Lattice;
        }
    }
    Ok(out)
}

/// Convolution on the largest box this module can certify as exact.
pub fn convolve(a: &CharTable, b: &CharTable) -> Result<CharTable> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    let n = a.rank();
    let (lo, hi) = match (&a.bound, &b.bound) {
        (SupportBound::Finite, SupportBound::Finite) => (
            (0..n).map(|k| a.lo[k] + b.lo[k]).collect::<Vec<_>>(),
            (0..n).map(|k| a.hi[k] + b.hi[k]).collect::<Vec<_>>(),
        ),
        (SupportBound::Finite, _) | (_, SupportBound::Finite) => {
            let (fin, other) = if matches!(a.bound, SupportBound::Finite) { (a, b) } else { (b, a) };
            match finite_support_extent(fin) {
                None => (other.lo.clone(), other.hi.clone()),
                Some((flo, fhi)) => (
                    (0..n).map(|k| other.lo[k] + fhi[k]).collect(),
                    (0..n).map(|k| other.hi[k] + flo[k]).collect(),
                ),
            }
        }
        _ => {
            product_bound(a, b)?;
            let mut lo: Vec<i64> = (0..n).map(|k| a.lo[k] + b.lo[k]).collect();
            let mut hi: Vec<i64> = (0..n).map(|k| a.hi[k] + b.hi[k]).collect();
            loop {
                let bad: Vec<Vec<i64>> = box_points(&lo, &hi).into_iter().filter(|p| !safe_at(a, b, p)).collect();
                if bad.is_empty() {
                    break;
                }
                for k in 0..n {
                    if bad.iter().any(|p| p[k] == lo[k]) {
                        lo[k] += 1;
                    }
                    if bad.iter().any(|p| p[k] == hi[k]) {
                        hi[k] -= 1;
                    }
                }
            }
            (lo, hi)
        }
    };
    convolve_within(a, b, &lo, &hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub offset: Vec<i64>,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub rank: usize,
    pub depth: i64,
    pub reference_weight: Weight,
    pub offsets_checked: usize,
    pub mismatch: Option<Mismatch>,
}

impl FactorizationReport {
    pub fn ok(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn compare(lhs: &CharTable, rhs: &CharTable, depth: i64) -> Result<FactorizationReport> {
    let n = lhs.rank();
    let mismatch = lhs.first_difference(rhs)?.map(|(offset, l, r)| Mismatch { offset, lhs: l, rhs: r });
    Ok(FactorizationReport {
        rank: n,
        depth,
        reference_weight: lhs.reference.clone(),
        offsets_checked: (2 * depth as usize + 1).pow(n as u32),
        mismatch,
    })
}

/// `ch M(ż, λ) = ch M_{sp}(λ + ½Σε) · ch S` on the box `|ν_i| ≤ depth`.
pub fn verify_verma_factorization(lambda: &Weight, depth: i64) -> Result<FactorizationReport> {
    let n = lambda.rank();
    let lhs = verma_char(lambda, Algebra::G, depth)?;
    let rhs = factorized_verma_char(lambda, depth)?;
    let report = compare(&lhs, &rhs, depth)?;
    debug_assert_eq!(report.rank, n);
    Ok(report)
}

/// `ch M_{sp}(λ + ½Σε) · ch S` measured from `λ`, exact on `|ν_i| ≤ depth`.
pub fn factorized_verma_char(lambda: &Weight, depth: i64) -> Result<CharTable> {
    sp_times_shale_weil(lambda, depth, |lam, lo, hi| verma_char_in(lam, Algebra::Sp, lo, hi))?.rebased(lambda)
}

/// `X(λ') * ch S` on the box `|ν_i| ≤ depth` around `λ`, with operands
/// built on boxes large enough for the cone-by-cone product to be exact.
fn sp_times_shale_weil(
    lambda: &Weight,
    depth: i64,
    build: impl Fn(&Weight, &[i64], &[i64]) -> Result<CharTable>,
) -> Result<CharTable> {
    let n = lambda.rank();
    let lam_prime = lambda.add(&Weight::half_sum(n));
    let reach = depth * n as i64 + 1;
    let (lo, hi) = cube(n, reach);
    let a = build(&lam_prime, &lo, &hi)?;
    let s = char_module_in(&ModuleDescriptor::ShaleWeil(n), &lo, &hi)?;
    let (tlo, thi) = cube(n, depth);
    convolve_within(&a, &s, &tlo, &thi)
}

/// Character of a one-dimensional `gl_n`-module of weight `c(ε_1 + … + ε_n)`
/// with central value `z`.
pub fn one_dim_char(c: &Scalar, n: usize, z: Scalar) -> Result<CharTable> {
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(CharTable::delta(Weight::new(vec![c.clone(); n], z)))
}

/// `ch M(ż, V) = ch V · ch U(g_n^-)` (or the `sp_2n` analogue) on the box
/// `|ν_i| ≤ depth` around the reference of `V`.
pub fn generalized_verma_char(v: &CharTable, algebra: Algebra, depth: i64) -> Result<CharTable> {
    if !matches!(v.bound, SupportBound::Finite) {
        return Err(Error::Unsupported("V must have finite support".into()));
    }
    let n = v.rank();
    let (flo, fhi) = finite_support_extent(v).unwrap_or((vec![0; n], vec![0; n]));
    let lo: Vec<i64> = (0..n).map(|k| -depth - fhi[k]).collect();
    let hi: Vec<i64> = (0..n).map(|k| depth - flo[k]).collect();
    let p = partition_char(Weight::zero(n), &parabolic_roots(n, algebra)?, &lo, &hi)?;
    let (tlo, thi) = cube(n, depth);
    convolve_within(v, &p, &tlo, &thi)
}

/// `ch M(ż, V) = ch M_{sp}(V') · ch S` with `V' = V ⊗ C_{½Σε}`, for
/// `V` one-dimensional of weight `c·Σε`.
pub fn verify_generalized_verma_factorization(c: &Scalar, n: usize, z: Scalar, depth: i64) -> Result<FactorizationReport> {
    let v = one_dim_char(c, n, z)?;
    let lhs = generalized_verma_char(&v, Algebra::G, depth)?;
    let lambda = v.reference.clone();
    let rhs = sp_times_shale_weil(&lambda, depth, |lam, lo, hi| {
        let vp = CharTable::delta(lam.clone());
        let p = partition_char(Weight::zero(n), &parabolic_roots(n, Algebra::Sp)?, lo, hi)?;
        convolve_within(&vp, &p, lo, hi)
    })?;
    compare(&lhs, &rhs.rebased(&lambda)?, depth)
}

/// Signed permutations of `0..n` as `(perm, signs)`, with determinant.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<i64>, i64)> {
    fn perms(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            perms(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let mut ps = Vec::new();
    perms(&mut (0..n).collect(), 0, &mut ps);
    let mut out = Vec::new();
    for p in ps {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let psign = if inversions % 2 == 0 { 1 } else { -1 };
        for mask in 0..(1u32 << n) {
            let signs: Vec<i64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let det = psign * signs.iter().product::<i64>();
            out.push((p.clone(), signs, det));
        }
    }
    out
}

/// Character of the finite-dimensional simple `sp_2n`-module with dominant
/// integral highest weight `λ_1 ≥ … ≥ λ_n ≥ 0`, by Kostant's multiplicity
/// formula `m(μ) = Σ_w det(w) P(w(λ+ρ) − (μ+ρ))`, `ρ = (n, n−1, …, 1)`.
/// The reference weight is `0` with central value `z`.
pub fn finite_sp_char(lambda: &[i64], z: Scalar) -> Result<CharTable> {
    let n = lambda.len();
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) || lambda[n - 1] < 0 {
        return Err(Error::Unsupported(format!("{lambda:?} is not dominant integral for sp_2n")));
    }
    let rho: Vec<i64> = (0..n).map(|i| (n - i) as i64).collect();
    let lr: Vec<i64> = lambda.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut counter = PartitionCounter::new(&positive_roots(n, Algebra::Sp)?)?;
    let group = signed_permutations(n);
    let r = lambda[0];
    let mut t = CharTable::new(
        Weight::new(vec![Scalar::zero(); n], z),
        vec![-r; n],
        vec![r; n],
        SupportBound::Finite,
    )?;
    for mu in box_points(&vec![-r; n], &vec![r; n]) {
        let mut m: i64 = 0;
        for (perm, signs, det) in &group {
            let arg: Vec<i64> = (0..n).map(|i| signs[i] * lr[perm[i]] - mu[i] - rho[i]).collect();
            m += det * counter.count(&arg) as i64;
        }
        if m < 0 {
            return Err(Error::Unsupported(format!("negative multiplicity at {mu:?}")));
        }
        t.set(&mu, m as u64)?;
    }
    Ok(t)
}

/// `L_{sp}(V)` for `V` one-dimensional of weight `c·Σε`: finite-dimensional
/// when `c ∈ Z_+`; other values are not supported.
pub fn simple_sp_char_one_dim(c: &Scalar, n: usize, z: Scalar) -> Result<CharTable> {
    match c.as_i64() {
        Some(k) if k >= 0 => finite_sp_char(&vec![k; n], z),
        _ => Err(Error::Unsupported(format!(
            "simple sp characters are only available for c in Z_+, got {c}"
        ))),
    }
}

/// The flag sets `I, F, F⁺, F⁻` as one-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagSets {
    #[serde(rename = "I")]
    pub injective: BTreeSet<usize>,
    #[serde(rename = "F")]
    pub finite: BTreeSet<usize>,
    #[serde(rename = "F+")]
    pub finite_plus: BTreeSet<usize>,
    #[serde(rename = "F-")]
    pub finite_minus: BTreeSet<usize>,
    pub probe_depth: i64,
}

/// Default probe depth, overridable through `OAK_PROBE_DEPTH`.
pub fn default_probe_depth() -> i64 {
    std::env::var("OAK_PROBE_DEPTH")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&d: &i64| d >= 1)
        .unwrap_or(12)
}

/// Reads off which `X_{±2ε_i}` act injectively from a support.
///
/// Probes start at occupied offsets of the core box `lo + 2·depth ≤ ν ≤
/// hi − 2·depth`. Direction `d = ±1` along index `i` is unbounded when some
/// probe has `ν + 2kdε_i` occupied for `k = 1, …, depth`. Starting near the
/// reference matters: in a Verma module the `2ε_2`-strings through `ν` grow
/// with `−ν_1`, so distant starts would mimic injectivity.
pub fn classify_flags(table: &CharTable, depth: i64) -> Result<FlagSets> {
    let n = table.rank();
    for axis in 0..n {
        let have = (-table.lo[axis]).min(table.hi[axis]);
        if have < 2 * depth {
            return Err(Error::BoxTooSmall {
                axis: axis + 1,
                needed: 2 * depth,
                have,
            });
        }
    }
    let core_lo: Vec<i64> = table.lo.iter().map(|l| l + 2 * depth).collect();
    let core_hi: Vec<i64> = table.hi.iter().map(|h| h - 2 * depth).collect();
    let probes: Vec<Vec<i64>> = box_points(&core_lo, &core_hi)
        .into_iter()
        .filter(|p| table.mult(p) > 0)
        .collect();
    if probes.is_empty() {
        return Err(Error::Unsupported("no occupied weight in the probe core".into()));
    }
    let extends = |i: usize, d: i64| {
        probes.iter().any(|nu| {
            let mut p = nu.clone();
            (0..depth).all(|_| {
                p[i] += 2 * d;
                table.mult(&p) > 0
            })
        })
    };
    let mut flags = FlagSets {
        injective: BTreeSet::new(),
        finite: BTreeSet::new(),
        finite_plus: BTreeSet::new(),
        finite_minus: BTreeSet::new(),
        probe_depth: depth,
    };
    for i in 0..n {
        let (up, down) = (extends(i, 1), extends(i, -1));
        let set = match (up, down) {
            (true, true) => &mut flags.injective,
            (false, false) => &mut flags.finite,
            (false, true) => &mut flags.finite_plus,
            (true, false) => &mut flags.finite_minus,
        };
        set.insert(i + 1);
    }
    Ok(flags)
}
