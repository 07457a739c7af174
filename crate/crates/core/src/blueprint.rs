//! Blueprints presented by monomial generators and formal-sum relations.
//!
//! A presentation `B = A // R` has a free monoid `A` on named generators (some of
//! them inverted), a coefficient order `m ∈ {1, 2}` (adjoining `−1` when `m = 2`),
//! and a finite list of relations `∑ a_i ≡ ∑ b_j` between formal sums of
//! monomials. Generators listed as annihilated are identified with `0`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

/// Largest number of generators a presentation may carry.
pub const MAX_GENERATORS: usize = 64;

/// A subset of generators, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenSet(pub u64);

impl GenSet {
    /// The empty set.
    pub const EMPTY: GenSet = GenSet(0);

    /// Set containing every index in `iter`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = GenSet(0);
        for i in iter {
            s.insert(i);
        }
        s
    }

    /// The first `n` generators.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            GenSet(u64::MAX)
        } else {
            GenSet((1u64 << n) - 1)
        }
    }

    /// Membership test.
    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    /// Adds `i`.
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    /// Removes `i`.
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    /// Number of elements.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// True when empty.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Union.
    pub fn union(self, o: GenSet) -> GenSet {
        GenSet(self.0 | o.0)
    }

    /// Intersection.
    pub fn intersect(self, o: GenSet) -> GenSet {
        GenSet(self.0 & o.0)
    }

    /// Difference `self \ o`.
    pub fn minus(self, o: GenSet) -> GenSet {
        GenSet(self.0 & !o.0)
    }

    /// Subset test.
    pub fn is_subset(self, o: GenSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Bit string of length `n`, generator 0 first.
    pub fn to_bitstring(self, n: usize) -> String {
        (0..n)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }

    /// Parses a bit string produced by [`GenSet::to_bitstring`].
    pub fn from_bitstring(s: &str) -> Result<GenSet> {
        let mut g = GenSet(0);
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => g.insert(i),
                '0' => {}
                _ => return Err(Error::Invalid(format!("bad bitset character {c:?}"))),
            }
        }
        Ok(g)
    }

    /// Order used for listing points: by size, then by sorted index list.
    pub fn display_cmp(self, o: GenSet) -> Ordering {
        self.len()
            .cmp(&o.len())
            .then_with(|| self.iter().cmp(o.iter()))
    }
}

/// A monomial `±T^e` (or the zero element).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    /// Set for the zero element; then `sign` is 0 and all exponents vanish.
    pub zero: bool,
    /// Exponent of `−1`, reduced modulo the coefficient order.
    pub sign: u8,
    /// Exponent vector indexed by generators.
    pub exps: Vec<i32>,
}

impl Monomial {
    /// The constant `1` over `n` generators.
    pub fn one(n: usize) -> Self {
        Monomial { zero: false, sign: 0, exps: vec![0; n] }
    }

    /// The constant `−1` over `n` generators.
    pub fn minus_one(n: usize) -> Self {
        Monomial { zero: false, sign: 1, exps: vec![0; n] }
    }

    /// The zero element.
    pub fn zero(n: usize) -> Self {
        Monomial { zero: true, sign: 0, exps: vec![0; n] }
    }

    /// The generator `T_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut m = Monomial::one(n);
        m.exps[i] = 1;
        m
    }

    /// A monomial with the given sign exponent and exponents.
    pub fn new(sign: u8, exps: Vec<i32>) -> Self {
        Monomial { zero: false, sign: sign % 2, exps }
    }

    /// Product of generators listed with multiplicity.
    pub fn product(n: usize, gens: &[usize]) -> Self {
        let mut m = Monomial::one(n);
        for &g in gens {
            m.exps[g] += 1;
        }
        m
    }

    /// Total degree.
    pub fn degree(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum()
    }

    /// Generators with nonzero exponent.
    pub fn support(&self) -> GenSet {
        GenSet::from_indices(
            self.exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, _)| i),
        )
    }

    /// True for `±1`.
    pub fn is_constant(&self) -> bool {
        !self.zero && self.exps.iter().all(|&e| e == 0)
    }

    /// Product, with the sign reduced modulo `m`.
    pub fn mul(&self, o: &Monomial, m: u8) -> Monomial {
        if self.zero || o.zero {
            return Monomial::zero(self.exps.len());
        }
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect();
        Monomial { zero: false, sign: (self.sign + o.sign) % m.max(1), exps }
    }

    /// Quotient `self / o` if it is a monomial of `A` (nonnegative away from `inverted`).
    pub fn divide(&self, o: &Monomial, inverted: GenSet, m: u8) -> Option<Monomial> {
        if self.zero || o.zero {
            return None;
        }
        let mut exps = Vec::with_capacity(self.exps.len());
        for (i, (a, b)) in self.exps.iter().zip(&o.exps).enumerate() {
            let d = a - b;
            if d < 0 && !inverted.contains(i) {
                return None;
            }
            exps.push(d);
        }
        Some(Monomial { zero: false, sign: (self.sign + m.max(1) - o.sign % m.max(1)) % m.max(1), exps })
    }

    /// Renders the monomial with generator names.
    pub fn render(&self, names: &[String]) -> String {
        if self.zero {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
        if self.sign == 1 {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic on exponents, sign exponent last, zero first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .zero
            .cmp(&self.zero)
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| other.exps.cmp(&self.exps))
            .then_with(|| self.sign.cmp(&other.sign))
    }
}

/// A formal sum of nonzero monomials; the empty sum is `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalSum {
    /// Terms in canonical order.
    pub terms: Vec<Monomial>,
}

impl FormalSum {
    /// Builds a sum, dropping zero terms and sorting.
    pub fn new(mut terms: Vec<Monomial>) -> Self {
        terms.retain(|t| !t.zero);
        terms.sort();
        FormalSum { terms }
    }

    /// The empty sum.
    pub fn empty() -> Self {
        FormalSum { terms: Vec::new() }
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the empty sum.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies every term by `u`.
    pub fn scale(&self, u: &Monomial, m: u8) -> FormalSum {
        FormalSum::new(self.terms.iter().map(|t| t.mul(u, m)).collect())
    }

    /// Renders the sum with generator names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|t| t.render(names))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A relation `lhs ≡ rhs`, stored with the smaller side first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    /// Smaller side.
    pub lhs: FormalSum,
    /// Larger side.
    pub rhs: FormalSum,
}

impl Relation {
    /// Builds a relation in canonical orientation.
    pub fn new(a: Vec<Monomial>, b: Vec<Monomial>) -> Self {
        Relation::from_sums(FormalSum::new(a), FormalSum::new(b))
    }

    /// Builds a relation from two sums in canonical orientation.
    pub fn from_sums(a: FormalSum, b: FormalSum) -> Self {
        if a <= b {
            Relation { lhs: a, rhs: b }
        } else {
            Relation { lhs: b, rhs: a }
        }
    }

    /// True for `x ≡ x`.
    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    /// All terms of both sides.
    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.lhs.terms.iter().chain(self.rhs.terms.iter())
    }

    /// Renders `lhs ≡ rhs`.
    pub fn render(&self, names: &[String]) -> String {
        format!("{} ≡ {}", self.lhs.render(names), self.rhs.render(names))
    }
}

/// A blueprint presentation `A // R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    /// Generator names, unique.
    pub names: Vec<String>,
    /// Generators with an adjoined inverse.
    pub inverted: GenSet,
    /// Generators identified with zero.
    pub annihilated: GenSet,
    /// Coefficient order: 1 for F1, 2 for F_{1²}.
    pub coeff_order: u8,
    /// Relations in canonical order.
    pub relations: Vec<Relation>,
}

/// Outcome of a bounded entailment search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entailment {
    /// A derivation was found.
    Yes,
    /// No derivation within budget.
    Unknown,
}

/// Default step budget for entailment search.
pub const DEFAULT_BUDGET: usize = 10_000;

/// Free presentation `F_{1^m}[T_1, …, T_n]` with the given generators inverted.
pub fn mk_free(n: usize, inverted: GenSet, m: u8) -> Result<Presentation> {
    let names = (1..=n).map(|i| format!("T{i}")).collect();
    Presentation::new(names, inverted, m, Vec::new())
}

impl Presentation {
    /// Validates and canonicalizes a presentation.
    pub fn new(
        names: Vec<String>,
        inverted: GenSet,
        coeff_order: u8,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let n = names.len();
        if n > MAX_GENERATORS {
            return Err(Error::TooManyGenerators { count: n, max: MAX_GENERATORS });
        }
        if coeff_order != 1 && coeff_order != 2 {
            return Err(Error::Invalid(format!("coefficient order {coeff_order} not in {{1,2}}")));
        }
        let distinct: HashSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(Error::Invalid("generator names must be unique".into()));
        }
        if !inverted.is_subset(GenSet::full(n)) {
            return Err(Error::Invalid("inverted set out of range".into()));
        }
        for r in &relations {
            for t in r.terms() {
                if t.exps.len() != n {
                    return Err(Error::Invalid("monomial length differs from generator count".into()));
                }
                for (i, &e) in t.exps.iter().enumerate() {
                    if e < 0 && !inverted.contains(i) {
                        return Err(Error::Invalid(format!(
                            "negative exponent at non-inverted generator {}",
                            names[i]
                        )));
                    }
                }
                if coeff_order == 1 && t.sign != 0 {
                    return Err(Error::Invalid("sign exponent requires coefficient order 2".into()));
                }
            }
        }
        let mut p = Presentation {
            names,
            inverted,
            annihilated: GenSet::EMPTY,
            coeff_order,
            relations,
        };
        p.canonicalize();
        Ok(p)
    }

    /// Number of generators.
    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    /// Index of the generator called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Sorts, deduplicates and drops trivial relations; zeroes annihilated terms.
    pub fn canonicalize(&mut self) {
        let ann = self.annihilated;
        let m = self.coeff_order;
        let mut set = BTreeSet::new();
        for r in self.relations.drain(..) {
            let fix = |s: &FormalSum| {
                FormalSum::new(
                    s.terms
                        .iter()
                        .filter(|t| t.support().intersect(ann).is_empty())
                        .map(|t| Monomial { sign: t.sign % m, ..t.clone() })
                        .collect(),
                )
            };
            let r = Relation::from_sums(fix(&r.lhs), fix(&r.rhs));
            if !r.is_trivial() {
                set.insert(r);
            }
        }
        self.relations = set.into_iter().collect();
    }

    /// A monomial is a unit when it is nonzero and supported on inverted generators.
    pub fn is_unit_monomial(&self, t: &Monomial) -> bool {
        !t.zero && t.support().is_subset(self.inverted) && t.support().intersect(self.annihilated).is_empty()
    }

    /// Quotient by the ideal generated by `I`: monomials meeting `I` become 0.
    pub fn quotient_by_vars(&self, i: GenSet) -> Presentation {
        let mut p = self.clone();
        p.annihilated = p.annihilated.union(i);
        p.canonicalize();
        p
    }

    /// Marks the generators in `s` as inverted.
    pub fn localize(&self, s: GenSet) -> Presentation {
        let mut p = self.clone();
        p.inverted = p.inverted.union(s);
        p
    }

    /// Renames generators through `perm`: new index of old generator `i` is `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Presentation> {
        let n = self.ngens();
        if perm.len() != n || perm.iter().collect::<HashSet<_>>().len() != n || perm.iter().any(|&j| j >= n) {
            return Err(Error::Invalid("permutation has wrong shape".into()));
        }
        let mv = |g: GenSet| GenSet::from_indices(g.iter().map(|i| perm[i]));
        let mvm = |t: &Monomial| {
            let mut exps = vec![0; n];
            for (i, &e) in t.exps.iter().enumerate() {
                exps[perm[i]] = e;
            }
            Monomial { exps, ..t.clone() }
        };
        let mut names = vec![String::new(); n];
        for (i, name) in self.names.iter().enumerate() {
            names[perm[i]] = name.clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                Relation::new(
                    r.lhs.terms.iter().map(mvm).collect(),
                    r.rhs.terms.iter().map(mvm).collect(),
                )
            })
            .collect();
        let mut p = Presentation {
            names,
            inverted: mv(self.inverted),
            annihilated: mv(self.annihilated),
            coeff_order: self.coeff_order,
            relations,
        };
        p.canonicalize();
        Ok(p)
    }

    /// Equality ignoring generator names.
    pub fn same_structure(&self, o: &Presentation) -> bool {
        self.ngens() == o.ngens()
            && self.inverted == o.inverted
            && self.annihilated == o.annihilated
            && self.coeff_order == o.coeff_order
            && self.relations == o.relations
    }

    /// Generators that are units: inverted ones plus those forced by relations of
    /// shape `m ≡ u` or `m + u ≡ 0` with `u` already a unit.
    pub fn detect_units(&self) -> GenSet {
        let mut units = self.inverted.minus(self.annihilated);
        loop {
            let before = units;
            let is_unit = |t: &Monomial, units: GenSet| !t.zero && t.support().is_subset(units);
            for r in &self.relations {
                let (l, rr) = (&r.lhs.terms, &r.rhs.terms);
                let pairs: Vec<(&Monomial, &Monomial)> = match (l.len(), rr.len()) {
                    (1, 1) => vec![(&l[0], &rr[0]), (&rr[0], &l[0])],
                    (0, 2) => vec![(&rr[0], &rr[1]), (&rr[1], &rr[0])],
                    (2, 0) => vec![(&l[0], &l[1]), (&l[1], &l[0])],
                    _ => Vec::new(),
                };
                for (a, b) in pairs {
                    if is_unit(b, units) {
                        units = units.union(a.support());
                    }
                }
            }
            if units == before {
                return units;
            }
        }
    }

    /// The unit field: generators restricted to detected units, all inverted, with the
    /// relations whose terms are all units.
    pub fn unit_field(&self) -> Presentation {
        let units = self.detect_units();
        let keep: Vec<usize> = units.iter().collect();
        let n = keep.len();
        let restrict = |t: &Monomial| Monomial {
            zero: false,
            sign: t.sign,
            exps: keep.iter().map(|&i| t.exps[i]).collect(),
        };
        let relations = self
            .relations
            .iter()
            .filter(|r| r.terms().all(|t| t.support().is_subset(units)))
            .map(|r| {
                Relation::new(
                    r.lhs.terms.iter().map(restrict).collect(),
                    r.rhs.terms.iter().map(restrict).collect(),
                )
            })
            .collect();
        let mut p = Presentation {
            names: keep.iter().map(|&i| self.names[i].clone()).collect(),
            inverted: GenSet::full(n),
            annihilated: GenSet::EMPTY,
            coeff_order: self.coeff_order,
            relations,
        };
        p.canonicalize();
        p
    }

    /// Inverse closure for presentations whose generators are all units or annihilated.
    ///
    /// The coefficient order becomes 2 exactly when a relation `m + ∑ ≡ 0` with all
    /// terms units exhibits an additive inverse.
    pub fn inverse_closure(&self) -> Result<Presentation> {
        let units = self.detect_units();
        let live = GenSet::full(self.ngens()).minus(self.annihilated);
        if !live.is_subset(units) {
            let bad: Vec<&str> = live.minus(units).iter().map(|i| self.names[i].as_str()).collect();
            return Err(Error::Unsupported(format!(
                "inverse closure needs every generator to be a unit or zero; non-units: {}",
                bad.join(", ")
            )));
        }
        let mut p = self.clone();
        let exhibits = self.relations.iter().any(|r| {
            let (a, b) = (&r.lhs, &r.rhs);
            let sided = |s: &FormalSum, o: &FormalSum| {
                o.is_empty() && !s.is_empty() && s.terms.iter().all(|t| t.support().is_subset(units))
            };
            sided(a, b) || sided(b, a)
        });
        if exhibits {
            p.coeff_order = 2;
        }
        p.inverted = p.inverted.union(live);
        p.canonicalize();
        Ok(p)
    }

    /// Quotient by the intersection of the given primes; the zero presentation when empty.
    pub fn reduce(&self, primes: &[GenSet]) -> Presentation {
        if primes.is_empty() {
            return self.zero_presentation();
        }
        let nil = primes.iter().fold(GenSet::full(self.ngens()), |a, &p| a.intersect(p));
        self.quotient_by_vars(nil)
    }

    /// The zero blueprint on the same generators (`1 ≡ 0`).
    pub fn zero_presentation(&self) -> Presentation {
        let n = self.ngens();
        let mut p = self.clone();
        p.relations = vec![Relation::new(vec![Monomial::one(n)], vec![])];
        p.annihilated = GenSet::full(n);
        p
    }

    /// True when the presentation contains `1 ≡ 0` directly.
    pub fn is_visibly_zero(&self) -> bool {
        let n = self.ngens();
        self.relations.iter().any(|r| {
            r.lhs.is_empty() && r.rhs.terms == vec![Monomial::one(n)]
                || r.rhs.is_empty() && r.lhs.terms == vec![Monomial::one(n)]
        })
    }

    /// Bounded search for a derivation of `target` from the relations.
    ///
    /// Rewriting replaces a sub-sum `u·L` of the current sum by `u·R` for a relation
    /// `L ≡ R` (either direction) and monomial `u`. Each rewrite combines the three
    /// closure rules, so a found chain is a derivation; the search never claims more.
    pub fn relation_entailed(&self, target: &Relation, budget: usize) -> Entailment {
        let m = self.coeff_order;
        let n = self.ngens();
        let start = target.lhs.clone();
        let goal = target.rhs.clone();
        if start == goal {
            return Entailment::Yes;
        }
        let mut rules: Vec<(FormalSum, FormalSum)> = Vec::new();
        let mut rels = self.relations.clone();
        if m == 2 {
            rels.push(Relation::new(vec![Monomial::one(n), Monomial::minus_one(n)], vec![]));
        }
        for r in &rels {
            rules.push((r.lhs.clone(), r.rhs.clone()));
            rules.push((r.rhs.clone(), r.lhs.clone()));
        }
        let max_len = start.len().max(goal.len()) * 2 + 4;
        let goal_terms: Vec<Monomial> = goal.terms.iter().chain(start.terms.iter()).cloned().collect();
        let mut seen: HashSet<FormalSum> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        let mut steps = 0usize;
        while let Some(cur) = queue.pop_front() {
            for (from, to) in &rules {
                let mut factors: Vec<Monomial> = Vec::new();
                if from.is_empty() {
                    for gt in &goal_terms {
                        for tt in &to.terms {
                            if let Some(u) = gt.divide(tt, self.inverted, m) {
                                factors.push(u);
                            }
                        }
                    }
                } else {
                    for t in &cur.terms {
                        if let Some(u) = t.divide(&from.terms[0], self.inverted, m) {
                            factors.push(u);
                        }
                    }
                }
                factors.sort();
                factors.dedup();
                for u in factors {
                    let Some(next) = rewrite(&cur, &from.scale(&u, m), &to.scale(&u, m)) else {
                        continue;
                    };
                    steps += 1;
                    if next == goal {
                        return Entailment::Yes;
                    }
                    if steps >= budget {
                        return Entailment::Unknown;
                    }
                    if next.len() <= max_len && seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Entailment::Unknown
    }

    /// Renders all relations, one per line.
    pub fn render(&self) -> String {
        self.relations
            .iter()
            .map(|r| r.render(&self.names))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Serializable form.
    pub fn to_json(&self) -> PresentationJson {
        let side = |s: &FormalSum| s.terms.iter().map(|t| (t.sign, t.exps.clone())).collect();
        PresentationJson {
            generators: self.names.clone(),
            inverted: self.inverted.iter().map(|i| self.names[i].clone()).collect(),
            annihilated: self.annihilated.iter().map(|i| self.names[i].clone()).collect(),
            coeff_order: self.coeff_order,
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson { lhs: side(&r.lhs), rhs: side(&r.rhs) })
                .collect(),
        }
    }

    /// Parses the serializable form.
    pub fn from_json(j: &PresentationJson) -> Result<Presentation> {
        let idx = |name: &String| {
            j.generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| Error::Invalid(format!("unknown generator {name}")))
        };
        let inverted = GenSet::from_indices(j.inverted.iter().map(idx).collect::<Result<Vec<_>>>()?);
        let annihilated = GenSet::from_indices(j.annihilated.iter().map(idx).collect::<Result<Vec<_>>>()?);
        let side = |s: &Vec<(u8, Vec<i32>)>| s.iter().map(|(sg, e)| Monomial::new(*sg, e.clone())).collect();
        let rels = j.relations.iter().map(|r| Relation::new(side(&r.lhs), side(&r.rhs))).collect();
        let mut p = Presentation::new(j.generators.clone(), inverted, j.coeff_order, rels)?;
        p.annihilated = annihilated;
        p.canonicalize();
        Ok(p)
    }
}

/// Replaces the sub-multiset `from` of `cur` by `to`, if `from` occurs in `cur`.
fn rewrite(cur: &FormalSum, from: &FormalSum, to: &FormalSum) -> Option<FormalSum> {
    let mut rest = cur.terms.clone();
    for t in &from.terms {
        let pos = rest.iter().position(|x| x == t)?;
        rest.remove(pos);
    }
    rest.extend(to.terms.iter().cloned());
    Some(FormalSum::new(rest))
}

/// Tensor product `B ⊗ C` over F1, or over a base through paired unit monomials.
///
/// Each `base` entry `(f1, f2)` adds the identification `f1 ⊗ 1 ≡ 1 ⊗ f2`.
pub fn tensor(b: &Presentation, c: &Presentation, base: Option<&[(Monomial, Monomial)]>) -> Result<Presentation> {
    let (nb, nc) = (b.ngens(), c.ngens());
    let n = nb + nc;
    if n > MAX_GENERATORS {
        return Err(Error::TooManyGenerators { count: n, max: MAX_GENERATORS });
    }
    let clash = b.names.iter().any(|x| c.names.contains(x));
    let names: Vec<String> = if clash {
        b.names
            .iter()
            .map(|x| format!("{x}_1"))
            .chain(c.names.iter().map(|x| format!("{x}_2")))
            .collect()
    } else {
        b.names.iter().chain(c.names.iter()).cloned().collect()
    };
    let m = b.coeff_order.max(c.coeff_order);
    let left = |t: &Monomial| {
        let mut exps = t.exps.clone();
        exps.resize(n, 0);
        Monomial { exps, ..t.clone() }
    };
    let right = |t: &Monomial| {
        let mut exps = vec![0; nb];
        exps.extend_from_slice(&t.exps);
        Monomial { exps, ..t.clone() }
    };
    let mut relations = Vec::new();
    for r in &b.relations {
        relations.push(Relation::new(r.lhs.terms.iter().map(left).collect(), r.rhs.terms.iter().map(left).collect()));
    }
    for r in &c.relations {
        relations.push(Relation::new(r.lhs.terms.iter().map(right).collect(), r.rhs.terms.iter().map(right).collect()));
    }
    if let Some(pairs) = base {
        for (f1, f2) in pairs {
            if f1.exps.len() != nb || f2.exps.len() != nc {
                return Err(Error::Invalid("base map monomial has wrong length".into()));
            }
            if !b.is_unit_monomial(f1) {
                return Err(Error::NotUnit(f1.render(&b.names)));
            }
            if !c.is_unit_monomial(f2) {
                return Err(Error::NotUnit(f2.render(&c.names)));
            }
            relations.push(Relation::new(vec![left(f1)], vec![right(f2)]));
        }
    }
    let shift = |g: GenSet| GenSet(g.0 << nb);
    let mut p = Presentation {
        names,
        inverted: b.inverted.union(shift(c.inverted)),
        annihilated: b.annihilated.union(shift(c.annihilated)),
        coeff_order: m,
        relations,
    };
    p.canonicalize();
    Ok(p)
}

/// JSON form of a presentation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PresentationJson {
    /// Generator names.
    pub generators: Vec<String>,
    /// Names of inverted generators.
    pub inverted: Vec<String>,
    /// Names of generators identified with zero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annihilated: Vec<String>,
    /// 1 or 2.
    pub coeff_order: u8,
    /// Relations.
    pub relations: Vec<RelationJson>,
}

/// JSON form of a relation; each monomial is `[sign_exponent, [e1, …, ek]]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationJson {
    /// Left side.
    pub lhs: Vec<(u8, Vec<i32>)>,
    /// Right side.
    pub rhs: Vec<(u8, Vec<i32>)>,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_1^{}[{}]", self.coeff_order, self.names.join(", "))?;
        if !self.relations.is_empty() {
            write!(f, " // ⟨{}⟩", self.relations.iter().map(|r| r.render(&self.names)).collect::<Vec<_>>().join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> Presentation {
        let n = 4;
        Presentation::new(
            (1..=4).map(|i| format!("T{i}")).collect(),
            GenSet::EMPTY,
            1,
            vec![Relation::new(
                vec![Monomial::product(n, &[0, 3])],
                vec![Monomial::product(n, &[1, 2]), Monomial::one(n)],
            )],
        )
        .unwrap()
    }

    #[test]
    fn quotient_examples() {
        let b = sl2();
        let q = b.quotient_by_vars(GenSet::from_indices([1, 2]));
        assert_eq!(q.relations, vec![Relation::new(vec![Monomial::product(4, &[0, 3])], vec![Monomial::one(4)])]);
        let q = b.quotient_by_vars(GenSet::from_indices([0, 3]));
        assert_eq!(q.relations, vec![Relation::new(vec![Monomial::product(4, &[1, 2]), Monomial::one(4)], vec![])]);
        assert_eq!(b.quotient_by_vars(GenSet::EMPTY), b);
    }

    #[test]
    fn entailment_examples() {
        let b = sl2();
        let r = Relation::new(
            vec![Monomial::product(4, &[0, 1, 3])],
            vec![Monomial::product(4, &[1, 1, 2]), Monomial::var(4, 1)],
        );
        assert_eq!(b.relation_entailed(&r, 3), Entailment::Yes);
        assert_eq!(b.relation_entailed(&b.relations[0], 1), Entailment::Yes);
        let r = Relation::new(vec![Monomial::var(4, 0)], vec![Monomial::var(4, 1)]);
        assert_eq!(b.relation_entailed(&r, 10), Entailment::Unknown);
    }

    #[test]
    fn units_and_closure() {
        let b = sl2();
        assert_eq!(b.unit_field().ngens(), 0);
        let k = b.quotient_by_vars(GenSet::from_indices([0, 3])).localize(GenSet::from_indices([1, 2]));
        let c = k.inverse_closure().unwrap();
        assert_eq!(c.coeff_order, 2);
        assert_eq!(c.inverse_closure().unwrap(), c);
        assert!(b.inverse_closure().is_err());
        let uf = b.unit_field();
        assert_eq!(uf.unit_field(), uf);
    }

    #[test]
    fn tensor_of_f1_squared_over_torus_is_f2() {
        let f = mk_free(0, GenSet::EMPTY, 2).unwrap();
        let t = tensor(&f, &f, Some(&[(Monomial::one(0), Monomial::minus_one(0))])).unwrap();
        assert_eq!(t.relations.len(), 1);
        let plain = tensor(&f, &f, None).unwrap();
        assert!(plain.same_structure(&f));
    }

    #[test]
    fn json_round_trip() {
        let b = sl2().localize(GenSet::from_indices([0]));
        let j = b.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: PresentationJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Presentation::from_json(&back).unwrap(), b);
    }
}
