//! Points of matrix models with entries in commutative semirings.
//!
//! A point is an assignment of semiring elements to the generators under which
//! every relation `Σ a_i ≡ Σ b_j` evaluates to an equality. No subtraction is
//! used, so the same test applies to rings and to semirings such as the natural
//! numbers, the Boolean semifield and the tropical semiring.

use crate::blueprint::{Monomial, Presentation, Relation};
use crate::catalog::{Cell, GroupModel, MatrixLayout};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;
use std::fmt::{Debug, Display};

/// A commutative semiring with zero and one.
pub trait Semiring: Sync {
    /// Element type.
    type Elem: Clone + PartialEq + Debug + Display + Send + Sync;
    /// Short name.
    fn name(&self) -> String;
    /// Additive identity.
    fn zero(&self) -> Self::Elem;
    /// Multiplicative identity.
    fn one(&self) -> Self::Elem;
    /// Addition.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplication.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// The element `−1`, when it exists.
    fn neg_one(&self) -> Option<Self::Elem> {
        None
    }
    /// All elements, for finite semirings.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }
    /// A random element from a small range, biased towards `0` and `1`.
    fn sample<R: Rng>(&self, rng: &mut R) -> Self::Elem;
    /// Candidate values tried when solving for a single entry.
    fn candidates(&self) -> Vec<Self::Elem>;
    /// Parses an element from JSON.
    fn parse(&self, v: &Value) -> Result<Self::Elem>;
    /// JSON form of an element.
    fn to_json(&self, a: &Self::Elem) -> Value;

    /// `a^e` for `e ≥ 0`.
    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }
}

/// Natural numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Naturals;

/// The Boolean semifield `B1 = {0, 1}` with `1 + 1 = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Boolean;

/// The tropical semiring `(Z ∪ {∞}, min, +)`: zero is `∞`, one is `0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Tropical;

/// The ring `Z/n`.
#[derive(Clone, Copy, Debug)]
pub struct ZMod(pub u64);

/// The ring of integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

/// A tropical number; `None` is `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Trop(pub Option<i64>);

impl Display for Trop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(x) => write!(f, "{x}"),
            None => write!(f, "inf"),
        }
    }
}

fn json_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::Eval(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| Error::Eval(format!("not an integer: {s}"))),
        other => Err(Error::Eval(format!("not an integer: {other}"))),
    }
}

impl Semiring for Naturals {
    type Elem = BigUint;
    fn name(&self) -> String {
        "naturals".into()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> BigUint {
        match rng.gen_range(0..10) {
            0..=3 => BigUint::zero(),
            4..=5 => BigUint::one(),
            _ => BigUint::from(rng.gen_range(2u32..8)),
        }
    }
    fn candidates(&self) -> Vec<BigUint> {
        (0u32..=40).map(BigUint::from).collect()
    }
    fn parse(&self, v: &Value) -> Result<BigUint> {
        json_int(v)?.to_biguint().ok_or_else(|| Error::Eval(format!("negative natural: {v}")))
    }
    fn to_json(&self, a: &BigUint) -> Value {
        match a.to_u64() {
            Some(x) => Value::from(x),
            None => Value::String(a.to_string()),
        }
    }
}

impl Semiring for Boolean {
    type Elem = bool;
    fn name(&self) -> String {
        "b1".into()
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn elements(&self) -> Option<Vec<bool>> {
        Some(vec![false, true])
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> bool {
        rng.gen_bool(0.5)
    }
    fn candidates(&self) -> Vec<bool> {
        vec![false, true]
    }
    fn parse(&self, v: &Value) -> Result<bool> {
        match v {
            Value::Bool(b) => Ok(*b),
            _ => match json_int(v)?.to_i64() {
                Some(0) => Ok(false),
                Some(1) => Ok(true),
                _ => Err(Error::Eval(format!("not a Boolean: {v}"))),
            },
        }
    }
    fn to_json(&self, a: &bool) -> Value {
        Value::from(u8::from(*a))
    }
}

impl Semiring for Tropical {
    type Elem = Trop;
    fn name(&self) -> String {
        "tropical".into()
    }
    fn zero(&self) -> Trop {
        Trop(None)
    }
    fn one(&self) -> Trop {
        Trop(Some(0))
    }
    fn add(&self, a: &Trop, b: &Trop) -> Trop {
        match (a.0, b.0) {
            (None, _) => *b,
            (_, None) => *a,
            (Some(x), Some(y)) => Trop(Some(x.min(y))),
        }
    }
    fn mul(&self, a: &Trop, b: &Trop) -> Trop {
        match (a.0, b.0) {
            (Some(x), Some(y)) => Trop(Some(x + y)),
            _ => Trop(None),
        }
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> Trop {
        if rng.gen_bool(0.35) {
            Trop(None)
        } else {
            Trop(Some(rng.gen_range(-6..=9)))
        }
    }
    fn candidates(&self) -> Vec<Trop> {
        std::iter::once(Trop(None)).chain((-30..=30).map(|x| Trop(Some(x)))).collect()
    }
    fn parse(&self, v: &Value) -> Result<Trop> {
        match v {
            Value::Null => Ok(Trop(None)),
            Value::String(s) if matches!(s.trim(), "inf" | "∞" | "infinity") => Ok(Trop(None)),
            _ => json_int(v)?.to_i64().map(|x| Trop(Some(x))).ok_or_else(|| Error::Eval(format!("out of range: {v}"))),
        }
    }
    fn to_json(&self, a: &Trop) -> Value {
        match a.0 {
            Some(x) => Value::from(x),
            None => Value::String("inf".into()),
        }
    }
}

impl Semiring for ZMod {
    type Elem = u64;
    fn name(&self) -> String {
        format!("z/{}", self.0)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn neg_one(&self) -> Option<u64> {
        Some(self.0 - 1)
    }
    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.0).collect())
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.0)
    }
    fn candidates(&self) -> Vec<u64> {
        (0..self.0.min(1000)).collect()
    }
    fn parse(&self, v: &Value) -> Result<u64> {
        let n = BigInt::from(self.0);
        let x = json_int(v)?;
        let r = ((x % &n) + &n) % &n;
        Ok(r.to_u64().expect("reduced residue fits"))
    }
    fn to_json(&self, a: &u64) -> Value {
        Value::from(*a)
    }
}

impl Semiring for Integers {
    type Elem = BigInt;
    fn name(&self) -> String {
        "integers".into()
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg_one(&self) -> Option<BigInt> {
        Some(-BigInt::one())
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> BigInt {
        BigInt::from(rng.gen_range(-5i64..=5))
    }
    fn candidates(&self) -> Vec<BigInt> {
        (-40i64..=40).map(BigInt::from).collect()
    }
    fn parse(&self, v: &Value) -> Result<BigInt> {
        json_int(v)
    }
    fn to_json(&self, a: &BigInt) -> Value {
        match a.to_i64() {
            Some(x) => Value::from(x),
            None => Value::String(a.to_string()),
        }
    }
}

/// A square matrix over a semiring with an optional value for the auxiliary generator.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMatrix<E> {
    /// Dimension.
    pub dim: usize,
    /// Entries in row-major order.
    pub entries: Vec<E>,
    /// Value of the auxiliary generator, when the model has one.
    pub aux: Option<E>,
}

impl<E: Clone> PointMatrix<E> {
    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.entries[i * self.dim + j]
    }
}

/// Identity matrix, with auxiliary value `1`.
pub fn identity<S: Semiring>(s: &S, dim: usize, with_aux: bool) -> PointMatrix<S::Elem> {
    let entries = (0..dim * dim).map(|k| if k / dim == k % dim { s.one() } else { s.zero() }).collect();
    PointMatrix { dim, entries, aux: with_aux.then(|| s.one()) }
}

/// Parses a row-major entry list (flat or nested) plus an optional `aux` value.
pub fn parse_matrix<S: Semiring>(s: &S, v: &Value) -> Result<PointMatrix<S::Elem>> {
    let (list, aux) = match v {
        Value::Object(m) => (
            m.get("entries").cloned().ok_or_else(|| Error::Eval("matrix object needs \"entries\"".into()))?,
            m.get("aux").map(|a| s.parse(a)).transpose()?,
        ),
        other => (other.clone(), None),
    };
    let flat: Vec<Value> = match list {
        Value::Array(rows) if rows.iter().all(|r| r.is_array()) && !rows.is_empty() => {
            rows.into_iter().flat_map(|r| r.as_array().cloned().unwrap_or_default()).collect()
        }
        Value::Array(xs) => xs,
        other => return Err(Error::Eval(format!("expected an entry list, got {other}"))),
    };
    let dim = (flat.len() as f64).sqrt().round() as usize;
    if dim * dim != flat.len() || dim == 0 {
        return Err(Error::Eval(format!("{} entries do not form a square matrix", flat.len())));
    }
    let entries = flat.iter().map(|x| s.parse(x)).collect::<Result<Vec<_>>>()?;
    Ok(PointMatrix { dim, entries, aux })
}

/// JSON form `{"entries": [...], "aux": ...}`.
pub fn matrix_to_json<S: Semiring>(s: &S, m: &PointMatrix<S::Elem>) -> Value {
    let mut o = serde_json::json!({ "entries": m.entries.iter().map(|x| s.to_json(x)).collect::<Vec<_>>() });
    if let Some(a) = &m.aux {
        o["aux"] = s.to_json(a);
    }
    o
}

fn eval_monomial<S: Semiring>(s: &S, t: &Monomial, vals: &[S::Elem]) -> Result<S::Elem> {
    if t.zero {
        return Ok(s.zero());
    }
    let mut acc = s.one();
    for (g, &e) in t.exps.iter().enumerate() {
        if e < 0 {
            return Err(Error::Eval("negative exponent needs an inverse".into()));
        }
        if e > 0 {
            acc = s.mul(&acc, &s.pow(&vals[g], e as u32));
        }
    }
    if t.sign % 2 == 1 {
        let m = s.neg_one().ok_or_else(|| Error::Eval(format!("{} has no -1", s.name())))?;
        acc = s.mul(&acc, &m);
    }
    Ok(acc)
}

fn eval_relation<S: Semiring>(s: &S, r: &Relation, vals: &[S::Elem]) -> Result<bool> {
    let side = |f: &crate::blueprint::FormalSum| -> Result<S::Elem> {
        f.terms.iter().try_fold(s.zero(), |acc, t| Ok(s.add(&acc, &eval_monomial(s, t, vals)?)))
    };
    Ok(side(&r.lhs)? == side(&r.rhs)?)
}

/// True when every relation holds under the assignment `vals` (one value per generator).
pub fn satisfies<S: Semiring>(s: &S, b: &Presentation, vals: &[S::Elem]) -> Result<bool> {
    if vals.len() != b.ngens() {
        return Err(Error::Eval(format!("{} values for {} generators", vals.len(), b.ngens())));
    }
    if b.annihilated.iter().any(|g| vals[g] != s.zero()) {
        return Ok(false);
    }
    for r in &b.relations {
        if !eval_relation(s, r, vals)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn layout_of(g: &GroupModel) -> Result<&MatrixLayout> {
    g.layout.as_ref().ok_or_else(|| Error::Unsupported(format!("{} is not a matrix model", g.name)))
}

/// Generator values read off a matrix, or `None` when a constant cell disagrees.
fn assignment<S: Semiring>(s: &S, g: &GroupModel, m: &PointMatrix<S::Elem>) -> Result<Option<Vec<S::Elem>>> {
    let lay = layout_of(g)?;
    if m.dim != lay.dim {
        return Err(Error::Eval(format!("matrix of size {} for a model of size {}", m.dim, lay.dim)));
    }
    let n = g.presentation.ngens();
    let mut vals: Vec<Option<S::Elem>> = vec![None; n];
    for (i, row) in lay.cells.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let x = m.get(i, j);
            match c {
                Cell::Gen(k) => vals[*k] = Some(x.clone()),
                Cell::Zero if *x != s.zero() => return Ok(None),
                Cell::One if *x != s.one() => return Ok(None),
                _ => {}
            }
        }
    }
    if let Some(a) = lay.aux {
        let v = m.aux.clone().ok_or_else(|| Error::MissingAux(g.presentation.names[a].clone()))?;
        vals[a] = Some(v);
    }
    vals.into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Eval(format!("generator {} has no matrix cell", g.presentation.names[k]))))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// True when `m` is a point of the model over `s`.
pub fn is_point<S: Semiring>(g: &GroupModel, m: &PointMatrix<S::Elem>, s: &S) -> Result<bool> {
    match assignment(s, g, m)? {
        Some(vals) => satisfies(s, &g.presentation, &vals),
        None => Ok(false),
    }
}

/// Matrix product; auxiliary values multiply.
pub fn multiply<S: Semiring>(m: &PointMatrix<S::Elem>, n: &PointMatrix<S::Elem>, s: &S) -> PointMatrix<S::Elem> {
    let d = m.dim;
    let entries = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            (0..d).fold(s.zero(), |acc, l| s.add(&acc, &s.mul(m.get(i, l), n.get(l, j))))
        })
        .collect();
    let aux = match (&m.aux, &n.aux) {
        (Some(a), Some(b)) => Some(s.mul(a, b)),
        _ => None,
    };
    PointMatrix { dim: d, entries, aux }
}

/// Exhaustive count of points over a finite semiring, refusing more than `bound`
/// assignments.
pub fn hom_count<S: Semiring>(g: &GroupModel, s: &S, bound: u64) -> Result<u64> {
    let elems = s.elements().ok_or_else(|| Error::Unsupported(format!("{} is infinite", s.name())))?;
    let n = g.presentation.ngens() as u32;
    let total = (elems.len() as u64).checked_pow(n).filter(|&t| t <= bound).ok_or_else(|| {
        Error::Unsupported(format!("{}^{} assignments exceed the bound {bound}", elems.len(), n))
    })?;
    let mut count = 0;
    let mut vals = vec![elems[0].clone(); n as usize];
    for code in 0..total {
        let mut c = code;
        for v in vals.iter_mut() {
            *v = elems[(c % elems.len() as u64) as usize].clone();
            c /= elems.len() as u64;
        }
        if satisfies(s, &g.presentation, &vals)? {
            count += 1;
        }
    }
    Ok(count)
}

/// A random point: random entries except one, which is solved for by scanning the
/// semiring's candidate values. Returns `None` after `tries` failed attempts.
pub fn sample_point<S: Semiring, R: Rng>(g: &GroupModel, s: &S, rng: &mut R, tries: usize) -> Result<Option<PointMatrix<S::Elem>>> {
    let lay = layout_of(g)?;
    let d = lay.dim;
    let cands = s.candidates();
    let positions: Vec<usize> = (0..d * d).filter(|&k| matches!(lay.cells[k / d][k % d], Cell::Gen(_))).collect();
    for _ in 0..tries {
        let mut m = identity(s, d, lay.aux.is_some());
        for &k in &positions {
            if rng.gen_bool(0.7) {
                m.entries[k] = s.sample(rng);
            }
        }
        if let Some(a) = m.aux.as_mut() {
            *a = s.sample(rng);
        }
        let pivot = positions[rng.gen_range(0..positions.len())];
        let mut sols = Vec::new();
        for c in &cands {
            m.entries[pivot] = c.clone();
            if is_point(g, &m, s)? {
                sols.push(c.clone());
            }
        }
        if !sols.is_empty() {
            m.entries[pivot] = sols[rng.gen_range(0..sols.len())].clone();
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Outcome of a closure check on sampled pairs.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ClosureReport {
    /// Model name.
    pub model: String,
    /// Semiring name.
    pub semiring: String,
    /// Pairs checked.
    pub pairs: usize,
    /// Pairs whose product is not a point.
    pub failures: usize,
}

/// Samples `pairs` pairs of points and checks that their products are points.
pub fn closure_check<S: Semiring, R: Rng>(g: &GroupModel, s: &S, pairs: usize, rng: &mut R) -> Result<ClosureReport> {
    let mut failures = 0;
    let mut done = 0;
    while done < pairs {
        let (Some(a), Some(b)) = (sample_point(g, s, rng, 500)?, sample_point(g, s, rng, 500)?) else {
            return Err(Error::Eval(format!("could not sample points of {} over {}", g.name, s.name())));
        };
        if !is_point(g, &multiply(&a, &b, s), s)? {
            failures += 1;
        }
        done += 1;
    }
    Ok(ClosureReport { model: g.name.clone(), semiring: s.name(), pairs, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::from_selector;
    use rand::SeedableRng;

    fn nat(xs: &[u32]) -> PointMatrix<BigUint> {
        PointMatrix { dim: 2, entries: xs.iter().map(|&x| BigUint::from(x)).collect(), aux: None }
    }

    #[test]
    fn sl2_points_over_naturals_and_tropical() {
        let g = from_selector("sl:2").unwrap();
        assert!(is_point(&g, &identity(&Naturals, 2, false), &Naturals).unwrap());
        assert!(is_point(&g, &nat(&[1, 1, 0, 1]), &Naturals).unwrap());
        assert!(!is_point(&g, &nat(&[1, 1, 1, 1]), &Naturals).unwrap());
        let t = PointMatrix { dim: 2, entries: vec![Trop(Some(0)), Trop(Some(5)), Trop(Some(7)), Trop(Some(0))], aux: None };
        assert!(is_point(&g, &t, &Tropical).unwrap());
    }

    #[test]
    fn counts() {
        let sl2 = from_selector("sl:2").unwrap();
        assert_eq!(hom_count(&sl2, &ZMod(2), 1 << 20).unwrap(), 6);
        assert_eq!(hom_count(&sl2, &Boolean, 1 << 20).unwrap(), 4);
        let gl1 = from_selector("gl:1").unwrap();
        assert_eq!(hom_count(&gl1, &ZMod(2), 1 << 20).unwrap(), 1);
    }

    #[test]
    fn missing_aux() {
        let gl2 = from_selector("gl:2").unwrap();
        let m = identity(&Naturals, 2, false);
        assert!(matches!(is_point(&gl2, &m, &Naturals), Err(Error::MissingAux(_))));
        assert!(is_point(&gl2, &identity(&Naturals, 2, true), &Naturals).unwrap());
    }

    #[test]
    fn products_are_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = from_selector("sl:2").unwrap();
        let r = closure_check(&g, &Naturals, 20, &mut rng).unwrap();
        assert_eq!(r.failures, 0);
    }
}
