//! Prime ideals `p_I`, the finite spectrum with its order topology, residue
//! fields and closed subschemes.

use crate::blueprint::{FormalSum, GenSet, Presentation, Relation};
use crate::error::{Error, Result};
use crate::field::{normalize, potential_characteristics, Characteristics, NormalFormBlueField};
use rayon::prelude::*;
use std::fmt::Write as _;

/// Default cap on the number of generators for prime enumeration.
pub const DEFAULT_CAP: usize = 26;

/// A prime ideal `p_I`, identified with its generator set `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct PrimePoint {
    /// The generators contained in the ideal.
    pub vars: GenSet,
}

impl PrimePoint {
    /// Label such as `(T1,T4)`; the zero ideal is `(∅)`.
    pub fn label(&self, names: &[String]) -> String {
        if self.vars.is_empty() {
            "(∅)".into()
        } else {
            format!("({})", self.vars.iter().map(|i| names[i].as_str()).collect::<Vec<_>>().join(","))
        }
    }
}

/// Term masks of one relation; a zero mask is a constant term.
struct RelMasks {
    terms: Vec<u64>,
}

fn masks(b: &Presentation) -> Vec<RelMasks> {
    b.relations
        .iter()
        .map(|r| RelMasks { terms: r.terms().map(|t| t.support().0).collect() })
        .collect()
}

/// True when `p_I` is prime.
///
/// A relation with exactly one term outside `I` would force that term's support into
/// the ideal (or force `1` when the term is constant), so the forcing closure stays
/// inside `I` exactly when every relation has zero or at least two terms outside `I`.
/// Candidates passing this test are discarded when the residue field certainly has no
/// potential characteristic.
pub fn is_prime(b: &Presentation, i: GenSet) -> bool {
    is_prime_with(b, &masks(b), i)
}

fn is_prime_with(b: &Presentation, ms: &[RelMasks], i: GenSet) -> bool {
    let n = b.ngens();
    if !i.is_subset(GenSet::full(n)) || !i.intersect(b.inverted).is_empty() || !b.annihilated.is_subset(i) {
        return false;
    }
    if !generator_level(ms, i.0) {
        return false;
    }
    residue_is_nonzero(b, i)
}

fn generator_level(ms: &[RelMasks], inn: u64) -> bool {
    ms.iter().all(|r| r.terms.iter().filter(|&&t| t & inn == 0).count() != 1)
}

fn residue_is_nonzero(b: &Presentation, i: GenSet) -> bool {
    // the residue presentation, without canonical sorting
    let keep = |s: &FormalSum| FormalSum { terms: s.terms.iter().filter(|t| t.support().intersect(i).is_empty()).cloned().collect() };
    let k = Presentation {
        names: b.names.clone(),
        inverted: GenSet::full(b.ngens()).minus(i),
        annihilated: b.annihilated.union(i),
        coeff_order: b.coeff_order,
        relations: b
            .relations
            .iter()
            .map(|r| Relation { lhs: keep(&r.lhs), rhs: keep(&r.rhs) })
            .filter(|r| !r.is_trivial())
            .collect(),
    };
    match potential_characteristics(&k) {
        Characteristics::Known(c) if !c.cofinite => {
            // with finitely many candidates, some prime characteristic (or 0, 1) must keep
            // `I` closed under the relations reduced modulo that characteristic
            c.set.iter().any(|&p| p <= 1 || generator_level(&masks_mod(b, p), i.0))
        }
        _ => true,
    }
}

/// Term masks of the relations after reducing integer coefficients modulo `p`.
fn masks_mod(b: &Presentation, p: u64) -> Vec<RelMasks> {
    let p = p as i64;
    b.relations
        .iter()
        .map(|r| {
            let mut coeff: std::collections::BTreeMap<&[i32], i64> = std::collections::BTreeMap::new();
            for (side, sgn) in [(&r.lhs, 1i64), (&r.rhs, -1i64)] {
                for t in side.terms.iter().filter(|t| !t.zero) {
                    let v = if t.sign % 2 == 1 { -sgn } else { sgn };
                    *coeff.entry(&t.exps).or_insert(0) += v;
                }
            }
            let terms = coeff
                .into_iter()
                .filter(|(_, c)| c.rem_euclid(p) != 0)
                .map(|(e, _)| e.iter().enumerate().filter(|(_, &x)| x != 0).fold(0u64, |m, (g, _)| m | 1 << g))
                .collect();
            RelMasks { terms }
        })
        .collect()
}

/// `B` localized at the complement of `p` and quotiented by `p`.
pub fn residue_presentation(b: &Presentation, p: PrimePoint) -> Presentation {
    let rest = GenSet::full(b.ngens()).minus(p.vars);
    b.quotient_by_vars(p.vars).localize(rest)
}

/// Unit propagation on the partial assignment `(inn, out)`; `None` on conflict.
fn propagate(ms: &[RelMasks], mut inn: u64, mut out: u64) -> Option<(u64, u64)> {
    loop {
        let mut changed = false;
        for r in ms {
            let mut outside = 0;
            let mut undecided = Vec::new();
            for &t in &r.terms {
                if t & inn != 0 {
                    continue;
                }
                if t & !out == 0 {
                    outside += 1;
                } else {
                    undecided.push(t);
                }
            }
            match (undecided.len(), outside) {
                (0, 1) => return None,
                (1, 1) => {
                    // the last open term must leave the ideal
                    out |= undecided[0];
                    changed = true;
                }
                (1, 0) => {
                    let open = undecided[0] & !out;
                    if open.count_ones() == 1 {
                        inn |= open;
                        changed = true;
                    }
                }
                _ => {}
            }
        }
        if inn & out != 0 {
            return None;
        }
        if !changed {
            return Some((inn, out));
        }
    }
}

/// An undecided generator from the most constrained relation: one with at most one
/// term surely outside the ideal and the fewest undecided terms.
fn branch_generator(ms: &[RelMasks], inn: u64, out: u64) -> Option<usize> {
    let mut best: Option<(usize, u64)> = None;
    for r in ms {
        let mut outside = 0;
        let mut undecided = 0;
        let mut first = 0u64;
        for &t in &r.terms {
            if t & inn != 0 {
                continue;
            }
            if t & !out == 0 {
                outside += 1;
            } else {
                if undecided == 0 {
                    first = t & !out;
                }
                undecided += 1;
            }
        }
        if outside <= 1 && undecided > 0 && best.is_none_or(|(u, _)| undecided < u) {
            best = Some((undecided, first));
        }
    }
    best.map(|(_, t)| t.trailing_zeros() as usize)
}

fn search(b: &Presentation, ms: &[RelMasks], n: usize, inn: u64, out: u64, depth: usize) -> Vec<GenSet> {
    let Some((inn, out)) = propagate(ms, inn, out) else { return Vec::new() };
    let decided = inn | out;
    let Some(g) = branch_generator(ms, inn, out).or_else(|| (0..n).find(|&g| decided >> g & 1 == 0)) else {
        if generator_level(ms, inn) && residue_is_nonzero(b, GenSet(inn)) {
            return vec![GenSet(inn)];
        }
        return Vec::new();
    };
    let bit = 1u64 << g;
    if depth < 10 {
        let (mut a, c) = rayon::join(
            || search(b, ms, n, inn | bit, out, depth + 1),
            || search(b, ms, n, inn, out | bit, depth + 1),
        );
        a.extend(c);
        a
    } else {
        let mut a = search(b, ms, n, inn | bit, out, depth + 1);
        a.extend(search(b, ms, n, inn, out | bit, depth + 1));
        a
    }
}

/// All prime ideals, by branch-and-bound with forcing propagation.
pub fn enumerate_primes(b: &Presentation, cap: usize) -> Result<Vec<PrimePoint>> {
    let n = b.ngens();
    if n > cap {
        return Err(Error::CapExceeded { count: n, cap });
    }
    if !b.inverted.intersect(b.annihilated).is_empty() {
        return Ok(Vec::new());
    }
    let ms = masks(b);
    let mut found = search(b, &ms, n, b.annihilated.0, b.inverted.0, 0);
    found.sort_by(|x, y| x.display_cmp(*y));
    found.dedup();
    Ok(found.into_iter().map(|vars| PrimePoint { vars }).collect())
}

/// Reference enumeration: `is_prime` on every subset.
pub fn enumerate_primes_brute(b: &Presentation) -> Vec<PrimePoint> {
    let n = b.ngens();
    assert!(n <= 24, "brute force is for small presentations");
    let ms = masks(b);
    let mut out: Vec<GenSet> = (0u64..1 << n)
        .into_par_iter()
        .map(GenSet)
        .filter(|&s| is_prime_with(b, &ms, s))
        .collect();
    out.sort_by(|x, y| x.display_cmp(*y));
    out.into_iter().map(|vars| PrimePoint { vars }).collect()
}

/// A finite preordered space with the topology whose closed sets are the up-sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    /// Point labels.
    pub labels: Vec<String>,
    /// `leq[i][j]` means `i ≤ j`, i.e. `j` lies in the closure of `i`.
    pub leq: Vec<Vec<bool>>,
}

impl FiniteSpace {
    /// Builds a space from labels and generating pairs `(lower, higher)`; the order is
    /// the reflexive-transitive closure.
    pub fn from_pairs(labels: Vec<String>, pairs: &[(usize, usize)]) -> Self {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, c) in pairs {
            leq[a][c] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        FiniteSpace { labels, leq }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when there are no points.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Closure of a point: its up-set.
    pub fn closure(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.leq[i][j]).collect()
    }

    /// True when a subset is closed (up-closed).
    pub fn is_closed(&self, set: &[bool]) -> bool {
        (0..self.len()).all(|i| !set[i] || (0..self.len()).all(|j| !self.leq[i][j] || set[j]))
    }

    /// Covering pairs `(lower, higher)` of the strict order.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |i: usize, j: usize| self.leq[i][j] && !self.leq[j][i];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// Connected components, as a component index per point (numbered by first point).
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for i in 0..n {
            for j in 0..n {
                if self.leq[i][j] {
                    let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                    if a != c {
                        parent[a.max(c)] = a.min(c);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        let mut ids: Vec<usize> = Vec::new();
        roots
            .iter()
            .map(|r| match ids.iter().position(|x| x == r) {
                Some(k) => k,
                None => {
                    ids.push(*r);
                    ids.len() - 1
                }
            })
            .collect()
    }
}

/// True when every irreducible closed subset has a unique generic point.
///
/// In a finite space every irreducible closed set is the closure of a point, so the
/// check asks that no two distinct points have the same closure.
pub fn sobriety_check(s: &FiniteSpace) -> bool {
    let n = s.len();
    (0..n).all(|i| (0..n).filter(|&j| s.leq[i][j] && s.leq[j][i]).count() == 1)
}

/// Sobriety by exhaustive search over closed subsets (small spaces only).
pub fn sobriety_check_brute(s: &FiniteSpace) -> bool {
    let n = s.len();
    assert!(n <= 16);
    let closed: Vec<u32> = (0u32..1 << n)
        .filter(|&m| s.is_closed(&(0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .collect();
    for &c in &closed {
        if c == 0 {
            continue;
        }
        let reducible = closed
            .iter()
            .any(|&a| a != c && a & !c == 0 && closed.iter().any(|&d| d != c && d & !c == 0 && a | d == c));
        if reducible {
            continue;
        }
        let generic: Vec<usize> = (0..n)
            .filter(|&i| c >> i & 1 == 1 && (0..n).all(|j| (c >> j & 1 == 1) == s.leq[i][j]))
            .collect();
        if generic.len() != 1 {
            return false;
        }
    }
    true
}

/// Deterministic DOT rendering, edges from lower to higher points.
pub fn export_dot(s: &FiniteSpace) -> String {
    let mut out = String::from("digraph spectrum {\n  rankdir=BT;\n");
    for (i, l) in s.labels.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", l.replace('"', "\\\""));
    }
    for (a, c) in s.hasse() {
        let _ = writeln!(out, "  n{a} -> n{c};");
    }
    out.push_str("}\n");
    out
}

/// The spectrum of a presentation with the inclusion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumPoset {
    /// Generator names.
    pub names: Vec<String>,
    /// Points in display order.
    pub points: Vec<PrimePoint>,
    /// Covering pairs `(lower, higher)`.
    pub hasse: Vec<(usize, usize)>,
    /// Component index per point.
    pub components: Vec<usize>,
}

impl SpectrumPoset {
    /// Builds the poset of the given points under inclusion.
    pub fn new(names: Vec<String>, points: Vec<PrimePoint>) -> Self {
        let n = points.len();
        let mut by_size: Vec<usize> = (0..n).collect();
        by_size.sort_by_key(|&i| points[i].vars.len());
        // per generator, the size-ordered positions of the points containing it
        let words = n.div_ceil(64);
        let ngen = names.len();
        let mut holders = vec![vec![0u64; words]; ngen];
        for (pos, &j) in by_size.iter().enumerate() {
            for g in points[j].vars.iter() {
                holders[g][pos / 64] |= 1 << (pos % 64);
            }
        }
        let mut hasse: Vec<(usize, usize)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let p = points[i].vars;
                let mut above = vec![u64::MAX; words];
                for g in p.iter() {
                    above.iter_mut().zip(&holders[g]).for_each(|(a, h)| *a &= h);
                }
                let mut covers: Vec<GenSet> = Vec::new();
                let mut edges = Vec::new();
                for (w, &bits) in above.iter().enumerate() {
                    let mut bits = bits;
                    while bits != 0 {
                        let pos = w * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        if pos >= n {
                            break;
                        }
                        let j = by_size[pos];
                        let q = points[j].vars;
                        if q.len() <= p.len() || covers.iter().any(|c| c.is_subset(q)) {
                            continue;
                        }
                        covers.push(q);
                        edges.push((i, j));
                    }
                }
                edges
            })
            .collect();
        hasse.sort_unstable();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, c) in &hasse {
            let (ra, rc) = (find(&mut parent, a), find(&mut parent, c));
            if ra != rc {
                parent[ra.max(rc)] = ra.min(rc);
            }
        }
        let mut ids = std::collections::HashMap::new();
        let components = (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                let k = ids.len();
                *ids.entry(r).or_insert(k)
            })
            .collect();
        SpectrumPoset { hasse, components, names, points }
    }

    /// The underlying finite space, with a dense order matrix.
    pub fn space(&self) -> FiniteSpace {
        let n = self.points.len();
        let labels = self.points.iter().map(|p| p.label(&self.names)).collect();
        let leq = (0..n)
            .map(|i| (0..n).map(|j| self.points[i].vars.is_subset(self.points[j].vars)).collect())
            .collect();
        FiniteSpace { labels, leq }
    }

    /// Sobriety without the dense order: closures are up-sets under inclusion, so two
    /// points share a closure exactly when their generator sets coincide.
    pub fn is_sober(&self) -> bool {
        let mut v: Vec<u64> = self.points.iter().map(|p| p.vars.0).collect();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    /// Index of a point.
    pub fn index_of(&self, p: GenSet) -> Option<usize> {
        self.points.iter().position(|q| q.vars == p)
    }

    /// Upper covers of every point.
    pub fn up_covers(&self) -> Vec<Vec<usize>> {
        let mut up = vec![Vec::new(); self.points.len()];
        for &(a, c) in &self.hasse {
            up[a].push(c);
        }
        up
    }

    /// Deterministic DOT rendering of the Hasse diagram.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph spectrum {\n  rankdir=BT;\n");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", p.label(&self.names));
        }
        for &(a, c) in &self.hasse {
            let _ = writeln!(out, "  n{a} -> n{c};");
        }
        out.push_str("}\n");
        out
    }

    /// JSON dump `{"generators", "points", "labels", "hasse"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.names.len();
        serde_json::json!({
            "generators": self.names,
            "points": self.points.iter().map(|p| p.vars.to_bitstring(n)).collect::<Vec<_>>(),
            "labels": self.points.iter().map(|p| p.label(&self.names)).collect::<Vec<_>>(),
            "hasse": self.hasse.iter().map(|&(a, c)| [a, c]).collect::<Vec<_>>(),
        })
    }
}

/// Spectrum of a presentation.
pub fn spectrum(b: &Presentation, cap: usize) -> Result<SpectrumPoset> {
    Ok(SpectrumPoset::new(b.names.clone(), enumerate_primes(b, cap)?))
}

/// A residue field, in normal form when it is a twisted lattice blue field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    /// The localized quotient.
    pub presentation: Presentation,
    /// Normal form, when available.
    pub normal: Option<NormalFormBlueField>,
    /// Why the normal form is missing.
    pub note: Option<String>,
    /// Potential characteristics.
    pub characteristics: Characteristics,
}

/// The residue field `κ(p)`.
pub fn residue_field(b: &Presentation, p: PrimePoint) -> Residue {
    let k = residue_presentation(b, p);
    let characteristics = potential_characteristics(&k);
    match normalize(&k, GenSet::EMPTY) {
        Ok(nf) => Residue { presentation: k, normal: Some(nf), note: None, characteristics },
        Err(why) => Residue { presentation: k, normal: None, note: Some(why), characteristics },
    }
}

/// The reduced closed subscheme with support the closure of `p`.
///
/// Primes of the quotient are the primes containing `p`, whose intersection is `p`,
/// so the reduction step adds nothing beyond the quotient.
pub fn closed_subscheme(b: &Presentation, p: PrimePoint) -> Presentation {
    b.quotient_by_vars(p.vars).reduce(&[p.vars])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blueprint::{mk_free, Monomial, Relation};

    fn sl2() -> Presentation {
        Presentation::new(
            (1..=4).map(|i| format!("T{i}")).collect(),
            GenSet::EMPTY,
            1,
            vec![Relation::new(vec![Monomial::product(4, &[0, 3])], vec![Monomial::product(4, &[1, 2]), Monomial::one(4)])],
        )
        .unwrap()
    }

    #[test]
    fn sl2_points() {
        let b = sl2();
        let pts = enumerate_primes(&b, DEFAULT_CAP).unwrap();
        let labels: Vec<String> = pts.iter().map(|p| p.label(&b.names)).collect();
        assert_eq!(labels, ["(∅)", "(T1)", "(T2)", "(T3)", "(T4)", "(T1,T4)", "(T2,T3)"]);
        assert_eq!(pts, enumerate_primes_brute(&b));
        assert!(is_prime(&b, GenSet::from_indices([1, 2])));
        assert!(!is_prime(&b, GenSet::from_indices([0, 1])));
    }

    #[test]
    fn affine_plane_and_dot() {
        let a2 = mk_free(2, GenSet::EMPTY, 1).unwrap();
        let s = spectrum(&a2, DEFAULT_CAP).unwrap();
        assert_eq!(s.points.len(), 4);
        assert_eq!(s.hasse.len(), 4);
        let dot = export_dot(&s.space());
        assert_eq!(dot.matches("->").count(), 4);
        assert_eq!(export_dot(&FiniteSpace::from_pairs(vec![], &[])), "digraph spectrum {\n  rankdir=BT;\n}\n");
    }

    #[test]
    fn sobriety() {
        let s = spectrum(&sl2(), DEFAULT_CAP).unwrap().space();
        assert!(sobriety_check(&s) && sobriety_check_brute(&s));
        let two = FiniteSpace::from_pairs(vec!["a".into(), "b".into()], &[]);
        assert!(sobriety_check(&two));
        let broken = FiniteSpace::from_pairs(vec!["x".into(), "y".into(), "z".into()], &[(0, 1), (1, 0), (0, 2)]);
        assert!(!sobriety_check(&broken) && !sobriety_check_brute(&broken));
    }

    #[test]
    fn residues_of_sl2() {
        let b = sl2();
        let e = residue_field(&b, PrimePoint { vars: GenSet::from_indices([1, 2]) }).normal.unwrap();
        assert_eq!((e.epsilon, e.free_rank, e.lattice.clone()), (1, 1, vec![vec![1, 1]]));
        let s = residue_field(&b, PrimePoint { vars: GenSet::from_indices([0, 3]) }).normal.unwrap();
        assert_eq!((s.epsilon, s.free_rank), (2, 1));
    }
}
