//! Potential characteristics and twisted-lattice normal forms of blue fields.
//!
//! A presentation all of whose live generators are units is analysed through the
//! lattice `Z^cols ⊕ Z/2` of exponent vectors with a sign coordinate. Binomial
//! relations `a ≡ b` and `a + b ≡ 0` generate the relation lattice; every other
//! relation is tested against it.

use crate::blueprint::{GenSet, Monomial, Presentation, Relation};
use crate::lattice::{smith_normal_form, EchelonLattice, RationalSpan};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A set of characteristics; `0` and `1` are characteristics alongside the primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSet {
    /// When true the set is the complement of `set`.
    pub cofinite: bool,
    /// Listed (or excluded) characteristics.
    pub set: BTreeSet<u64>,
}

impl CharSet {
    /// Every characteristic.
    pub fn all() -> Self {
        CharSet { cofinite: true, set: BTreeSet::new() }
    }

    /// No characteristic.
    pub fn none() -> Self {
        CharSet { cofinite: false, set: BTreeSet::new() }
    }

    /// Every characteristic except those listed.
    pub fn all_except<I: IntoIterator<Item = u64>>(it: I) -> Self {
        CharSet { cofinite: true, set: it.into_iter().collect() }
    }

    /// Exactly the listed characteristics.
    pub fn only<I: IntoIterator<Item = u64>>(it: I) -> Self {
        CharSet { cofinite: false, set: it.into_iter().collect() }
    }

    /// Membership.
    pub fn contains(&self, p: u64) -> bool {
        self.set.contains(&p) != self.cofinite
    }

    /// True for the empty set.
    pub fn is_empty(&self) -> bool {
        !self.cofinite && self.set.is_empty()
    }

    /// Intersection.
    pub fn intersect(&self, o: &CharSet) -> CharSet {
        match (self.cofinite, o.cofinite) {
            (true, true) => CharSet { cofinite: true, set: self.set.union(&o.set).copied().collect() },
            (false, false) => CharSet { cofinite: false, set: self.set.intersection(&o.set).copied().collect() },
            (true, false) => CharSet { cofinite: false, set: o.set.difference(&self.set).copied().collect() },
            (false, true) => o.intersect(self),
        }
    }

    /// Union.
    pub fn union(&self, o: &CharSet) -> CharSet {
        match (self.cofinite, o.cofinite) {
            (true, true) => CharSet { cofinite: true, set: self.set.intersection(&o.set).copied().collect() },
            (false, false) => CharSet { cofinite: false, set: self.set.union(&o.set).copied().collect() },
            (true, false) => CharSet { cofinite: true, set: self.set.difference(&o.set).copied().collect() },
            (false, true) => o.union(self),
        }
    }

    /// Subset test.
    pub fn is_subset(&self, o: &CharSet) -> bool {
        self.intersect(o) == *self
    }

    /// Classification label.
    pub fn label(&self) -> String {
        match (self.cofinite, self.set.len()) {
            (true, 0) => "indefinite".into(),
            (true, 1) if self.set.contains(&1) => "all-but-1".into(),
            (true, _) => format!("all-but-{:?}", self.set),
            (false, _) => format!("{:?}", self.set),
        }
    }
}

/// Classification of potential characteristics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Characteristics {
    /// The set is determined (as an upper bound that is exact on the supported class).
    Known(CharSet),
    /// Not decided; the string explains why.
    Unknown(String),
}

impl Characteristics {
    /// True when every characteristic outside finitely many is potential.
    pub fn is_almost_indefinite(&self) -> bool {
        matches!(self, Characteristics::Known(c) if c.cofinite)
    }

    /// True when certainly empty.
    pub fn is_certainly_empty(&self) -> bool {
        matches!(self, Characteristics::Known(c) if c.is_empty())
    }
}

impl fmt::Display for Characteristics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Characteristics::Known(c) => write!(f, "{}", c.label()),
            Characteristics::Unknown(why) => write!(f, "unknown ({why})"),
        }
    }
}

fn prime_divisors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.insert(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

/// Lattice analysis of a presentation whose live generators are all units.
struct UnitLattice {
    cols: Vec<usize>,
    lattice: EchelonLattice,
    rows: Vec<Vec<i64>>,
    signs: Vec<u8>,
    sums: Vec<Relation>,
    zero: bool,
    minus_one: bool,
    collapse: bool,
}

impl UnitLattice {
    fn vector(&self, t: &Monomial) -> Vec<i64> {
        let mut v: Vec<i64> = self.cols.iter().map(|&i| t.exps[i] as i64).collect();
        v.push(t.sign as i64);
        v
    }

    fn build(b: &Presentation, cols: Vec<usize>) -> UnitLattice {
        let d = cols.len();
        let mut ul = UnitLattice {
            cols,
            lattice: EchelonLattice::new(d + 1),
            rows: Vec::new(),
            signs: Vec::new(),
            sums: Vec::new(),
            zero: false,
            minus_one: b.coeff_order == 2,
            collapse: false,
        };
        let mut two = vec![0i64; d + 1];
        two[d] = 2;
        ul.lattice.insert(&two);
        for r in &b.relations {
            let (l, rr) = (&r.lhs.terms, &r.rhs.terms);
            let (a, c, extra) = match (l.len(), rr.len()) {
                (1, 1) => (&l[0], &rr[0], 0),
                (2, 0) => (&l[0], &l[1], 1),
                (0, 2) => (&rr[0], &rr[1], 1),
                (1, 0) | (0, 1) => {
                    ul.zero = true;
                    continue;
                }
                _ => {
                    ul.sums.push(r.clone());
                    continue;
                }
            };
            if extra == 1 {
                ul.minus_one = true;
            }
            let va = ul.vector(a);
            let vc = ul.vector(c);
            let mut row: Vec<i64> = va.iter().zip(&vc).map(|(x, y)| x - y).collect();
            row[d] = (row[d] + extra).rem_euclid(2);
            ul.lattice.insert(&row);
            let sign = row[d] as u8;
            let mut exp = row[..d].to_vec();
            if exp.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                exp.iter_mut().for_each(|x| *x = -*x);
            }
            ul.rows.push(exp);
            ul.signs.push(sign);
        }
        let mut unit = vec![0i64; d + 1];
        unit[d] = 1;
        ul.collapse = ul.lattice.contains(&unit);
        ul
    }

    /// Canonical keys of a relation's terms after cancelling equal units across sides.
    fn cancelled(&self, r: &Relation) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let mut l: Vec<Vec<i64>> = r.lhs.terms.iter().map(|t| self.lattice.reduce(&self.vector(t))).collect();
        let mut rr: Vec<Vec<i64>> = r.rhs.terms.iter().map(|t| self.lattice.reduce(&self.vector(t))).collect();
        let mut i = 0;
        while i < l.len() {
            if let Some(j) = rr.iter().position(|x| *x == l[i]) {
                rr.remove(j);
                l.remove(i);
            } else {
                i += 1;
            }
        }
        if self.minus_one {
            self.cancel_opposites(&mut l);
            self.cancel_opposites(&mut rr);
        }
        (l, rr)
    }

    /// Removes pairs `u + (-u)` from one side of a relation.
    fn cancel_opposites(&self, side: &mut Vec<Vec<i64>>) {
        let d = self.cols.len();
        let mut i = 0;
        while i < side.len() {
            let mut neg = side[i].clone();
            neg[d] += 1;
            let neg = self.lattice.reduce(&neg);
            if let Some(j) = (0..side.len()).find(|&j| j != i && side[j] == neg) {
                let (a, c) = (i.max(j), i.min(j));
                side.remove(a);
                side.remove(c);
                i = 0;
            } else {
                i += 1;
            }
        }
    }

    /// Value `±1` of a reduced key when its exponent part vanishes.
    fn determined(&self, key: &[i64]) -> Option<i64> {
        let d = self.cols.len();
        if key[..d].iter().all(|&x| x == 0) {
            Some(if key[d] == 0 { 1 } else { -1 })
        } else {
            None
        }
    }

    fn exponent_span(&self) -> RationalSpan {
        let mut span = RationalSpan::default();
        for r in &self.rows {
            span.insert(r);
        }
        span
    }

    fn characteristics(&self, b: &Presentation) -> Characteristics {
        if self.zero {
            return Characteristics::Known(CharSet::none());
        }
        // characteristic 1: every unit maps to 1 in B1
        let c1 = b.coeff_order == 1
            && !self.minus_one
            && b.relations.iter().all(|r| r.lhs.is_empty() == r.rhs.is_empty());
        let mut fields = if self.collapse { CharSet::only([2]) } else { CharSet::all_except([1]) };
        let mut frees: Vec<Vec<i64>> = Vec::new();
        let mut pending: Option<(&Relation, &str)> = None;
        let span = self.exponent_span();
        'rels: for r in &self.sums {
            let (l, rr) = self.cancelled(r);
            if l.is_empty() && rr.is_empty() {
                continue;
            }
            // c·u + D ≡ 0 per free class u, with D the determined part
            let d = self.cols.len();
            let mut free: Vec<(Vec<i64>, i64)> = Vec::new();
            let mut det = 0i64;
            for (side, key) in l.iter().map(|k| (1i64, k)).chain(rr.iter().map(|k| (-1i64, k))) {
                match self.determined(key) {
                    Some(v) => det += side * v,
                    None => {
                        if span.contains(&key[..d]) {
                            pending.get_or_insert((r, "involves a torsion unit"));
                            continue 'rels;
                        }
                        let sign = if key[d] == 0 { 1 } else { -1 };
                        match free.iter_mut().find(|(k, _)| k[..] == key[..d]) {
                            Some((_, c)) => *c += side * sign,
                            None => free.push((key[..d].to_vec(), side * sign)),
                        }
                    }
                }
            }
            free.retain(|(_, c)| *c != 0);
            match free.len() {
                0 => {
                    let n = det.unsigned_abs();
                    if n != 0 {
                        fields = fields.intersect(&CharSet::only(prime_divisors(n)));
                    }
                }
                1 => {
                    let (key, c) = free.pop().expect("one free class");
                    let c = c.unsigned_abs();
                    let allowed = if det == 0 {
                        CharSet::only(prime_divisors(c))
                    } else {
                        let g = num_integer::gcd(c, det.unsigned_abs());
                        let mut bad = prime_divisors(c);
                        bad.extend(prime_divisors(det.unsigned_abs()));
                        CharSet::all_except(bad).union(&CharSet::only(prime_divisors(g)))
                    };
                    fields = fields.intersect(&allowed);
                    frees.push(key);
                }
                _ => {
                    pending.get_or_insert((r, "has several independent units"));
                }
            }
        }
        if let Some((r, what)) = pending {
            let why = format!("relation {} {what}", r.render(&b.names));
            // the constraints gathered so far still bound the characteristics from above
            return if fields.cofinite { Characteristics::Unknown(why) } else { Characteristics::Known(fields) };
        }
        if !frees.is_empty() && !fields.is_empty() {
            let mut ext = span.clone();
            if !frees.iter().all(|f| ext.insert(f)) {
                return Characteristics::Unknown("free units constrained by several relations".into());
            }
        }
        let out = if c1 { fields.union(&CharSet::only([1])) } else { fields };
        Characteristics::Known(out)
    }
}

/// Potential characteristics of a presentation.
///
/// Monoid blueprints are of indefinite characteristic, blue fields are analysed
/// through their unit lattice, and a constant relation `n·1 ≡ k·1` confines the
/// field characteristics to the prime divisors of `n − k`.
pub fn potential_characteristics(b: &Presentation) -> Characteristics {
    let n = b.ngens();
    let live = GenSet::full(n).minus(b.annihilated);
    let units = b.detect_units();
    if live.is_subset(units) {
        let ul = UnitLattice::build(b, live.iter().collect());
        return ul.characteristics(b);
    }
    for r in &b.relations {
        let total = r.lhs.len() + r.rhs.len();
        if total == 1 && r.terms().all(|t| t.support().is_subset(units)) {
            return Characteristics::Known(CharSet::none());
        }
    }
    let sums = b.relations.iter().any(|r| r.lhs.len() >= 2 || r.rhs.len() >= 2);
    if !sums {
        return Characteristics::Known(if b.coeff_order == 1 { CharSet::all() } else { CharSet::all_except([1]) });
    }
    for r in &b.relations {
        if r.terms().all(|t| t.is_constant()) {
            let val = |s: &crate::blueprint::FormalSum| s.terms.iter().map(|t| if t.sign == 1 { -1i64 } else { 1 }).sum::<i64>();
            let diff = (val(&r.lhs) - val(&r.rhs)).unsigned_abs();
            if diff != 0 {
                let mut set = prime_divisors(diff);
                if b.coeff_order == 1 && !r.lhs.is_empty() && !r.rhs.is_empty() {
                    set.insert(1);
                }
                return Characteristics::Known(CharSet::only(set));
            }
        }
    }
    Characteristics::Unknown("sums among non-units".into())
}

/// A blue field in twisted-lattice normal form `F_{1^ε}[Λ]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormBlueField {
    /// 2 when the field contains `−1`, else 1.
    pub epsilon: u8,
    /// Generator indices of the lattice columns.
    pub columns: Vec<usize>,
    /// Names of the lattice columns.
    pub column_names: Vec<String>,
    /// Exponent rows of the binomial relations.
    pub lattice: Vec<Vec<i64>>,
    /// Sign bit of each row: the row's monomial equals `(−1)^sign`.
    pub signs: Vec<u8>,
    /// Nontrivial elementary divisors.
    pub torsion: Vec<i64>,
    /// Rank of `Λ`.
    pub free_rank: usize,
    /// Set when `1 + 1 ≡ 0` holds.
    pub one_plus_one_zero: bool,
}

impl NormalFormBlueField {
    /// Sign assignments `column → Z/2` of the morphisms to `F_{1^m}`.
    pub fn sign_points(&self, m: u8) -> Vec<Vec<u8>> {
        if self.one_plus_one_zero {
            return Vec::new();
        }
        if m == 1 {
            return if self.epsilon == 1 { vec![vec![0; self.columns.len()]] } else { Vec::new() };
        }
        solve_gf2(&self.lattice, &self.signs, self.columns.len())
    }

    /// Number of morphisms to `F_{1^m}`.
    pub fn count_points(&self, m: u8) -> usize {
        self.sign_points(m).len()
    }
}

/// All solutions `x ∈ (Z/2)^n` of `rows · x = rhs` over GF(2).
pub fn solve_gf2(rows: &[Vec<i64>], rhs: &[u8], n: usize) -> Vec<Vec<u8>> {
    let mut m: Vec<(Vec<u8>, u8)> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &s)| (r.iter().map(|&x| x.rem_euclid(2) as u8).collect(), s % 2))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| m[i].0[col] == 1) else { continue };
        m.swap(row, p);
        for i in 0..m.len() {
            if i != row && m[i].0[col] == 1 {
                let (pr, ps) = m[row].clone();
                for (a, b) in m[i].0.iter_mut().zip(&pr) {
                    *a ^= b;
                }
                m[i].1 ^= ps;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|(_, s)| *s == 1) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut x = vec![0u8; n];
        for (k, &c) in free.iter().enumerate() {
            x[c] = (mask >> k & 1) as u8;
        }
        for (k, &pc) in pivots.iter().enumerate() {
            let (r, s) = &m[k];
            let mut v = *s;
            for &c in &free {
                v ^= r[c] & x[c];
            }
            x[pc] = v;
        }
        out.push(x);
    }
    out.sort();
    out
}

/// Normal form of a presentation whose live generators (outside `skip`) are units and
/// whose relations are binomial modulo the lattice they generate.
pub fn normalize(b: &Presentation, skip: GenSet) -> Result<NormalFormBlueField, String> {
    let n = b.ngens();
    let live = GenSet::full(n).minus(b.annihilated).minus(skip);
    let units = b.detect_units();
    if !live.is_subset(units) {
        let bad: Vec<&str> = live.minus(units).iter().map(|i| b.names[i].as_str()).collect();
        return Err(format!("non-unit generators: {}", bad.join(", ")));
    }
    let cols: Vec<usize> = live.iter().collect();
    let ul = UnitLattice::build(b, cols.clone());
    if ul.zero {
        return Err("zero blueprint".into());
    }
    for r in &ul.sums {
        let (l, rr) = ul.cancelled(r);
        if !(l.is_empty() && rr.is_empty()) {
            return Err(format!("relation {} is not binomial", r.render(&b.names)));
        }
    }
    let snf = smith_normal_form(&ul.rows);
    let mut order: Vec<usize> = (0..ul.rows.len()).collect();
    order.sort_by(|&a, &c| (&ul.rows[a], ul.signs[a]).cmp(&(&ul.rows[c], ul.signs[c])));
    order.dedup_by(|a, c| ul.rows[*a] == ul.rows[*c] && ul.signs[*a] == ul.signs[*c]);
    Ok(NormalFormBlueField {
        epsilon: if ul.minus_one || ul.collapse { 2 } else { 1 },
        column_names: cols.iter().map(|&i| b.names[i].clone()).collect(),
        columns: cols.clone(),
        lattice: order.iter().map(|&i| ul.rows[i].clone()).collect(),
        signs: order.iter().map(|&i| ul.signs[i]).collect(),
        torsion: snf.torsion(),
        free_rank: snf.free_rank(cols.len()),
        one_plus_one_zero: ul.collapse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blueprint::{mk_free, tensor};

    #[test]
    fn classifier_examples() {
        let t = mk_free(1, GenSet::from_indices([0]), 1).unwrap();
        assert_eq!(potential_characteristics(&t), Characteristics::Known(CharSet::all()));
        let f = mk_free(0, GenSet::EMPTY, 2).unwrap();
        assert_eq!(potential_characteristics(&f), Characteristics::Known(CharSet::all_except([1])));
        let f2 = Presentation::new(vec![], GenSet::EMPTY, 1, vec![Relation::new(vec![Monomial::one(0), Monomial::one(0)], vec![])]).unwrap();
        assert_eq!(potential_characteristics(&f2), Characteristics::Known(CharSet::only([2])));
        let g = tensor(&f, &f, Some(&[(Monomial::one(0), Monomial::minus_one(0))])).unwrap();
        assert_eq!(potential_characteristics(&g), Characteristics::Known(CharSet::only([2])));
        assert!(normalize(&g, GenSet::EMPTY).unwrap().one_plus_one_zero);
    }

    #[test]
    fn gf2_solutions() {
        assert_eq!(solve_gf2(&[vec![1, 1]], &[0], 2).len(), 2);
        assert_eq!(solve_gf2(&[vec![0, 0]], &[1], 2).len(), 0);
        assert_eq!(solve_gf2(&[], &[], 3).len(), 8);
    }
}
