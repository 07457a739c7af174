//! Pseudo-Hopf points, rank spaces, Weyl monoids and Tits points.

use crate::blueprint::{tensor, GenSet, Monomial, Presentation};
use crate::catalog::{GroupModel, MatrixLayout, RankFilter};
use crate::error::{Error, Result};
use crate::field::{normalize, Characteristics, NormalFormBlueField};
use crate::spectrum::{closed_subscheme, residue_field, spectrum, PrimePoint, SpectrumPoset};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Decision about a single point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopfStatus {
    /// Pseudo-Hopf, with the unit field of its closed subscheme.
    Certified { rank: usize, field: NormalFormBlueField },
    /// Certainly not pseudo-Hopf.
    Rejected(String),
    /// Neither certified nor refuted.
    Unknown(String),
    /// Lies strictly below the given certified point, so its rank exceeds that point's.
    Dominated(usize),
    /// Not a monomial-matrix pattern of a matrix model; the diagonal torus acts on its
    /// closure, so a pseudo-Hopf structure there has rank above the torus rank.
    Excluded(String),
}

impl HopfStatus {
    /// Short tag for reports.
    pub fn tag(&self) -> &'static str {
        match self {
            HopfStatus::Certified { .. } => "certified",
            HopfStatus::Rejected(_) => "rejected",
            HopfStatus::Unknown(_) => "unknown",
            HopfStatus::Dominated(_) => "dominated",
            HopfStatus::Excluded(_) => "excluded",
        }
    }
}

/// A point with its decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfPoint {
    /// The point.
    pub point: PrimePoint,
    /// Potential characteristics of its residue field.
    pub characteristics: String,
    /// Decision.
    pub status: HopfStatus,
}

/// Generators `g` of `q` given by a relation `g ≡ ∑ units` and occurring nowhere else.
fn eliminable(q: &Presentation, units: GenSet) -> (GenSet, Vec<usize>) {
    let n = q.ngens();
    let live = GenSet::full(n).minus(q.annihilated);
    let mut gens = GenSet::EMPTY;
    let mut rels = Vec::new();
    for g in live.minus(units).iter() {
        let var = Monomial::var(n, g);
        let holders: Vec<usize> =
            q.relations.iter().enumerate().filter(|(_, r)| r.terms().any(|t| t.support().contains(g))).map(|(k, _)| k).collect();
        if holders.len() != 1 {
            continue;
        }
        let r = &q.relations[holders[0]];
        let unit_side = |s: &crate::blueprint::FormalSum| {
            !s.is_empty() && s.terms.iter().all(|t| t.support().is_subset(units))
        };
        let ok = (r.lhs.terms == [var.clone()] && unit_side(&r.rhs)) || (r.rhs.terms == [var] && unit_side(&r.lhs));
        if ok {
            gens.insert(g);
            rels.push(holders[0]);
        }
    }
    (gens, rels)
}

/// Decides whether the point `p` of `b` is pseudo-Hopf.
///
/// Certification requires almost indefinite residue characteristics and a closed
/// subscheme whose live generators are units, or eliminable sums of units, with a
/// twisted-lattice normal form on the units.
pub fn analyze_point(b: &Presentation, p: PrimePoint) -> HopfPoint {
    let res = residue_field(b, p);
    let characteristics = res.characteristics.to_string();
    let status = match &res.characteristics {
        Characteristics::Known(c) if !c.cofinite => Some(HopfStatus::Rejected(format!(
            "potential characteristics {} are not almost indefinite",
            c.label()
        ))),
        _ => None,
    };
    let status = status.unwrap_or_else(|| {
        let q = closed_subscheme(b, p);
        if q.is_visibly_zero() {
            return HopfStatus::Rejected("closed subscheme is empty".into());
        }
        let units = q.detect_units();
        let (gone, rels) = eliminable(&q, units);
        let live = GenSet::full(q.ngens()).minus(q.annihilated).minus(gone);
        let stuck = live.minus(units);
        if !stuck.is_empty() {
            let names: Vec<&str> = stuck.iter().map(|i| q.names[i].as_str()).collect();
            return HopfStatus::Unknown(format!("non-unit generators {}", names.join(", ")));
        }
        let mut core = q.clone();
        core.relations = q.relations.iter().enumerate().filter(|(k, _)| !rels.contains(k)).map(|(_, r)| r.clone()).collect();
        core.annihilated = core.annihilated.union(gone);
        match normalize(&core, GenSet::EMPTY) {
            Err(why) => HopfStatus::Unknown(why),
            Ok(f) if f.one_plus_one_zero => HopfStatus::Rejected("unit field has 1 + 1 ≡ 0".into()),
            Ok(f) => match res.characteristics {
                Characteristics::Unknown(why) => HopfStatus::Unknown(format!("characteristics undecided: {why}")),
                Characteristics::Known(_) => HopfStatus::Certified { rank: f.free_rank, field: f },
            },
        }
    });
    HopfPoint { point: p, characteristics, status }
}

/// Decisions for every point, most special points first so that domination by a
/// certified point short-circuits the analysis of everything below it.
pub fn pseudo_hopf_points(b: &Presentation, s: &SpectrumPoset) -> Vec<HopfPoint> {
    let n = s.points.len();
    let mut out: Vec<Option<HopfPoint>> = vec![None; n];
    let up = s.up_covers();
    // a certified point at or above each processed point
    let mut witness: Vec<Option<usize>> = vec![None; n];
    let mut layers: BTreeMap<std::cmp::Reverse<usize>, Vec<usize>> = BTreeMap::new();
    for (i, p) in s.points.iter().enumerate() {
        layers.entry(std::cmp::Reverse(p.vars.len())).or_default().push(i);
    }
    for layer in layers.values() {
        let done: Vec<(usize, HopfPoint)> = layer
            .par_iter()
            .map(|&i| {
                let p = s.points[i];
                let dom = up[i].iter().find_map(|&j| witness[j]);
                let h = match dom {
                    Some(j) => HopfPoint {
                        point: p,
                        characteristics: String::new(),
                        status: HopfStatus::Dominated(j),
                    },
                    None => analyze_point(b, p),
                };
                (i, h)
            })
            .collect();
        for (i, h) in done {
            witness[i] = match h.status {
                HopfStatus::Certified { .. } => Some(i),
                HopfStatus::Dominated(k) => Some(k),
                _ => up[i].iter().find_map(|&j| witness[j]),
            };
            out[i] = Some(h);
        }
    }
    out.into_iter().map(|h| h.expect("every layer is processed")).collect()
}

/// A point of the rank space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSpacePoint {
    /// The pseudo-Hopf point of minimal rank.
    pub point: PrimePoint,
    /// Unit field of its closed subscheme.
    pub field: NormalFormBlueField,
    /// Its rank.
    pub rank: usize,
    /// Connected component of the spectrum.
    pub component: usize,
}

/// The rank space with the decisions it rests on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSpace {
    /// Generator names.
    pub names: Vec<String>,
    /// Number of generators.
    pub ngens: usize,
    /// Generators identified with zero in the presentation.
    pub annihilated: GenSet,
    /// Points sorted by display order of their ideals.
    pub points: Vec<RankSpacePoint>,
    /// Minimal rank per component that has a pseudo-Hopf point.
    pub component_ranks: BTreeMap<usize, usize>,
    /// Per-point decisions, aligned with the spectrum.
    pub decisions: Vec<HopfPoint>,
}

impl RankSpace {
    /// Rank: the largest component rank, 0 without pseudo-Hopf points.
    pub fn rank(&self) -> usize {
        self.component_ranks.values().copied().max().unwrap_or(0)
    }

    /// True when every component has the same rank.
    pub fn is_pure(&self) -> bool {
        self.component_ranks.values().collect::<BTreeSet<_>>().len() <= 1
    }

    /// Generators nonzero at a point.
    pub fn nonzero(&self, p: PrimePoint) -> GenSet {
        GenSet::full(self.ngens).minus(p.vars).minus(self.annihilated)
    }

    /// Index of the rank point with the given nonzero set.
    pub fn find_nonzero(&self, nz: GenSet) -> Option<usize> {
        self.points.iter().position(|r| self.nonzero(r.point) == nz)
    }

    /// Labels of the rank points.
    pub fn labels(&self) -> Vec<String> {
        self.points.iter().map(|r| r.point.label(&self.names)).collect()
    }

    /// JSON rendering.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.rank(),
            "points": self.points.iter().map(|r| json!({
                "pattern": r.point.vars.to_bitstring(self.ngens),
                "label": r.point.label(&self.names),
                "epsilon": r.field.epsilon,
                "columns": r.field.column_names,
                "lattice": r.field.lattice,
                "signs": r.field.signs,
                "torsion": r.field.torsion,
                "rank": r.rank,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Rank space of a presentation from its spectrum.
///
/// Per component, the minimal rank among certified points is taken. Any unknown point
/// that is not dominated by a certified point could still be of minimal rank, which
/// makes the rank space undecidable.
pub fn rank_space(b: &Presentation, s: &SpectrumPoset) -> Result<RankSpace> {
    rank_space_with(b, s, None)
}

/// Rank space where, for a matrix model, undecided points whose nonzero pattern is
/// not a monomial matrix are excluded from minimal rank.
pub fn rank_space_with(b: &Presentation, s: &SpectrumPoset, layout: Option<&MatrixLayout>) -> Result<RankSpace> {
    let mut decisions = pseudo_hopf_points(b, s);
    if let Some(layout) = layout {
        let all = GenSet::full(b.ngens()).minus(b.annihilated);
        for h in decisions.iter_mut() {
            if let HopfStatus::Unknown(why) = &h.status {
                if layout.permutation(all.minus(h.point.vars)).is_none() {
                    h.status = HopfStatus::Excluded(format!("not a monomial pattern ({why})"));
                }
            }
        }
    }
    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in s.components.iter().enumerate() {
        by_comp.entry(c).or_default().push(i);
    }
    let undecided: Vec<String> = decisions
        .iter()
        .filter_map(|h| match &h.status {
            HopfStatus::Unknown(why) => Some(format!("{}: {why}", h.point.label(&b.names))),
            _ => None,
        })
        .collect();
    if !undecided.is_empty() {
        return Err(Error::Undecidable { points: undecided });
    }
    let mut component_ranks = BTreeMap::new();
    let mut points = Vec::new();
    for (&c, members) in &by_comp {
        let certified: Vec<(usize, usize, &NormalFormBlueField)> = members
            .iter()
            .filter_map(|&i| match &decisions[i].status {
                HopfStatus::Certified { rank, field } => Some((i, *rank, field)),
                _ => None,
            })
            .collect();
        let Some(min) = certified.iter().map(|c| c.1).min() else { continue };
        component_ranks.insert(c, min);
        for (i, r, f) in certified {
            if r == min {
                points.push(RankSpacePoint { point: s.points[i], field: f.clone(), rank: r, component: c });
            }
        }
    }
    points.sort_by(|a, c| a.point.vars.display_cmp(c.point.vars));
    Ok(RankSpace {
        names: b.names.clone(),
        ngens: b.ngens(),
        annihilated: b.annihilated,
        points,
        component_ranks,
        decisions,
    })
}

/// Rank space of a group model, with its rank filter applied.
pub fn model_rank_space(g: &GroupModel, cap: usize) -> Result<RankSpace> {
    model_rank_space_from(g, &spectrum(&g.presentation, cap)?)
}

/// Rank space of a model from its already computed spectrum.
pub fn model_rank_space_from(g: &GroupModel, s: &SpectrumPoset) -> Result<RankSpace> {
    let mut rs = rank_space_with(&g.presentation, s, g.layout.as_ref())?;
    if let Some(RankFilter::EvenPermutations) = g.rank_filter {
        let layout = g
            .layout
            .as_ref()
            .ok_or_else(|| Error::Invalid("permutation filter needs a matrix layout".into()))?;
        let keep: Vec<RankSpacePoint> = rs
            .points
            .iter()
            .filter(|r| layout.permutation(rs.nonzero(r.point)).is_some_and(|p| permutation_sign(&p) == 1))
            .cloned()
            .collect();
        rs.points = keep;
    }
    Ok(rs)
}

/// Sign of a permutation, `1` or `−1`.
pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A finite monoid given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylMonoid {
    /// Labels of the elements (rank points).
    pub labels: Vec<String>,
    /// Nonzero generator sets of the elements.
    pub patterns: Vec<GenSet>,
    /// `table[a][b]` is the index of `a · b`.
    pub table: Vec<Vec<usize>>,
    /// Index of the identity.
    pub identity: usize,
}

impl WeylMonoid {
    /// Number of elements.
    pub fn order(&self) -> usize {
        self.table.len()
    }

    /// Associativity of the table.
    pub fn is_associative(&self) -> bool {
        is_associative(&self.table)
    }

    /// Identity law.
    pub fn is_unital(&self) -> bool {
        let e = self.identity;
        (0..self.order()).all(|a| self.table[e][a] == a && self.table[a][e] == a)
    }

    /// Every element has a two-sided inverse.
    pub fn is_group(&self) -> bool {
        let e = self.identity;
        self.is_associative()
            && self.is_unital()
            && (0..self.order()).all(|a| (0..self.order()).any(|b| self.table[a][b] == e && self.table[b][a] == e))
    }

    /// Commutativity.
    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// JSON rendering.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "order": self.order(),
            "labels": self.labels,
            "identity": self.identity,
            "group": self.is_group(),
            "abelian": self.is_abelian(),
            "weyl_table": self.table,
        })
    }
}

/// Associativity of a table.
pub fn is_associative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
}

/// Generators whose comultiplication image survives at the pair `(x, y)`.
pub fn surviving(g: &GroupModel, x: GenSet, y: GenSet) -> GenSet {
    GenSet::from_indices(
        g.comult.images.iter().enumerate().filter(|(_, img)| img.iter().any(|t| t.survives(x, y))).map(|(i, _)| i),
    )
    .minus(g.presentation.annihilated)
}

/// The monoid law induced by the comultiplication on the rank space.
pub fn induced_weyl_law(g: &GroupModel, rs: &RankSpace) -> Result<WeylMonoid> {
    let patterns: Vec<GenSet> = rs.points.iter().map(|r| rs.nonzero(r.point)).collect();
    let labels = rs.labels();
    let distinct: BTreeSet<u64> = patterns.iter().map(|p| p.0).collect();
    if distinct.len() != patterns.len() {
        return Err(Error::DuplicatePattern(format!("{labels:?}")));
    }
    let index: HashMap<GenSet, usize> = patterns.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = patterns.len();
    let rows: Vec<Result<Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let z = surviving(g, patterns[a], patterns[b]);
                    index.get(&z).copied().ok_or_else(|| Error::LawDoesNotDescend {
                        left: labels[a].clone(),
                        right: labels[b].clone(),
                        reason: format!(
                            "surviving generators {{{}}} match no rank point",
                            z.iter().map(|i| rs.names[i].as_str()).collect::<Vec<_>>().join(",")
                        ),
                    })
                })
                .collect()
        })
        .collect();
    let table = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let idp = g.identity.nonzero().minus(g.presentation.annihilated);
    let identity = *index
        .get(&idp)
        .ok_or_else(|| Error::Invalid(format!("identity pattern {} is not a rank point", idp.to_bitstring(rs.ngens))))?;
    Ok(WeylMonoid { labels, patterns, table, identity })
}

/// A Tits point: a rank point with a sign assignment on its unit-field columns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TitsPoint {
    /// Index into the Weyl monoid.
    pub element: usize,
    /// Sign exponent per column of the element's unit field.
    pub signs: Vec<u8>,
}

/// Tits points over `F_{1^m}` with their induced composition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitsPoints {
    /// Coefficient order.
    pub m: u8,
    /// The points.
    pub points: Vec<TitsPoint>,
    /// Composition table when the law is defined and closed on the points.
    pub table: Option<Vec<Vec<usize>>>,
    /// Why the table is missing.
    pub note: Option<String>,
}

impl TitsPoints {
    /// Number of points.
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Distinct Weyl elements hit by the points.
    pub fn image(&self) -> BTreeSet<usize> {
        self.points.iter().map(|p| p.element).collect()
    }

    /// JSON rendering.
    pub fn to_json(&self, w: &WeylMonoid) -> serde_json::Value {
        json!({
            "m": self.m,
            "count": self.count(),
            "points": self.points.iter().map(|p| json!({"element": w.labels[p.element], "signs": p.signs})).collect::<Vec<_>>(),
            "closed": self.table.is_some(),
            "table": self.table,
            "note": self.note,
        })
    }
}

/// Enumerates Tits points over `F_{1^m}`, `m ∈ {1, 2}`, and composes them through the
/// comultiplication when every generator has exactly one surviving term.
pub fn tits_points(g: &GroupModel, rs: &RankSpace, w: &WeylMonoid, m: u8) -> Result<TitsPoints> {
    if m != 1 && m != 2 {
        return Err(Error::Invalid(format!("m must be 1 or 2, got {m}")));
    }
    let mut points = Vec::new();
    for (e, r) in rs.points.iter().enumerate() {
        for s in r.field.sign_points(m) {
            points.push(TitsPoint { element: e, signs: s });
        }
    }
    let index: HashMap<&TitsPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let sign_of = |p: &TitsPoint, gen: usize| -> Option<u8> {
        let f = &rs.points[p.element].field;
        f.columns.iter().position(|&c| c == gen).map(|k| p.signs[k])
    };
    let mut table = vec![vec![0usize; points.len()]; points.len()];
    let mut note = None;
    'outer: for (a, pa) in points.iter().enumerate() {
        for (b, pb) in points.iter().enumerate() {
            let z = w.table[pa.element][pb.element];
            let (x, y) = (w.patterns[pa.element], w.patterns[pb.element]);
            let cols = &rs.points[z].field.columns;
            let mut signs = Vec::with_capacity(cols.len());
            for &c in cols {
                let live: Vec<_> = g.comult.images[c].iter().filter(|t| t.survives(x, y)).collect();
                if live.len() != 1 {
                    note = Some(format!("generator {} has {} surviving terms", rs.names[c], live.len()));
                    break 'outer;
                }
                let t = live[0];
                let mut s = 0u8;
                for &l in &t.left {
                    match sign_of(pa, l) {
                        Some(v) => s ^= v,
                        None => {
                            note = Some(format!("generator {} is not a unit-field column", rs.names[l]));
                            break 'outer;
                        }
                    }
                }
                for &r in &t.right {
                    match sign_of(pb, r) {
                        Some(v) => s ^= v,
                        None => {
                            note = Some(format!("generator {} is not a unit-field column", rs.names[r]));
                            break 'outer;
                        }
                    }
                }
                signs.push(s);
            }
            let prod = TitsPoint { element: z, signs };
            match index.get(&prod) {
                Some(&k) => table[a][b] = k,
                None => {
                    note = Some(format!("product of points {a} and {b} is not a Tits point"));
                    break 'outer;
                }
            }
        }
    }
    let table = if note.is_none() { Some(table) } else { None };
    Ok(TitsPoints { m, points, table, note })
}

/// Outcome of the product comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductReport {
    /// Ranks of the factors and the product.
    pub ranks: (usize, usize, usize),
    /// Number of rank points of the factors and the product.
    pub counts: (usize, usize, usize),
    /// Pairs expected but missing from the product's rank space (bitstrings).
    pub missing: Vec<String>,
    /// Product rank points that are not pairs.
    pub extra: Vec<String>,
    /// Pairs whose rank is not the sum of the factor ranks.
    pub rank_violations: Vec<String>,
}

impl ProductReport {
    /// True when no violation was found.
    pub fn ok(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.rank_violations.is_empty()
            && self.ranks.2 == self.ranks.0 + self.ranks.1
    }
}

/// Compares the rank space of `b1 ⊗ b2` with pairs of rank points of the factors.
pub fn product_check(b1: &Presentation, b2: &Presentation, cap: usize) -> Result<ProductReport> {
    let r1 = rank_space(b1, &spectrum(b1, cap)?)?;
    let r2 = rank_space(b2, &spectrum(b2, cap)?)?;
    let t = tensor(b1, b2, None)?;
    let rt = rank_space(&t, &spectrum(&t, cap)?)?;
    let off = b1.ngens();
    let n = t.ngens();
    let mut expected: BTreeMap<u64, usize> = BTreeMap::new();
    for x in &r1.points {
        for y in &r2.points {
            expected.insert(x.point.vars.0 | (y.point.vars.0 << off), x.rank + y.rank);
        }
    }
    let actual: BTreeMap<u64, usize> = rt.points.iter().map(|p| (p.point.vars.0, p.rank)).collect();
    let bits = |v: u64| GenSet(v).to_bitstring(n);
    Ok(ProductReport {
        ranks: (r1.rank(), r2.rank(), rt.rank()),
        counts: (r1.points.len(), r2.points.len(), rt.points.len()),
        missing: expected.keys().filter(|k| !actual.contains_key(k)).map(|&k| bits(k)).collect(),
        extra: actual.keys().filter(|k| !expected.contains_key(k)).map(|&k| bits(k)).collect(),
        rank_violations: expected
            .iter()
            .filter(|(k, r)| actual.get(k).is_some_and(|a| a != *r))
            .map(|(&k, _)| bits(k))
            .collect(),
    })
}

/// Permutations of `0..n` in lexicographic order with the table of `(σ·τ)(i) = τ(σ(i))`,
/// the law of permutation matrices under matrix multiplication.
pub fn symmetric_group(n: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let perms: Vec<Vec<usize>> = crate::catalog::permutations(n).into_iter().map(|p| p.0).collect();
    let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let table = perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| {
                    let c: Vec<usize> = s.iter().map(|&i| t[i]).collect();
                    index[&c]
                })
                .collect()
        })
        .collect();
    (perms, table)
}

fn identity_of(t: &[Vec<usize>]) -> Option<usize> {
    let n = t.len();
    (0..n).find(|&e| (0..n).all(|a| t[e][a] == a && t[a][e] == a))
}

fn element_order(t: &[Vec<usize>], e: usize, a: usize) -> usize {
    let (mut x, mut k) = (a, 1);
    while x != e {
        x = t[x][a];
        k += 1;
        if k > t.len() {
            return 0;
        }
    }
    k
}

/// An isomorphism `f` with `f(a·b) = f(a)·f(b)` between two finite groups, if any.
pub fn find_isomorphism(a: &[Vec<usize>], b: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    let (ea, eb) = (identity_of(a)?, identity_of(b)?);
    // generating set of `a`, greedily
    let mut gens = Vec::new();
    let mut span: BTreeSet<usize> = [ea].into();
    for x in 0..n {
        if !span.contains(&x) {
            gens.push(x);
            let mut frontier: Vec<usize> = span.iter().copied().collect();
            while let Some(y) = frontier.pop() {
                for &g in &gens {
                    for z in [a[y][g], a[g][y]] {
                        if span.insert(z) {
                            frontier.push(z);
                        }
                    }
                }
            }
        }
    }
    let orders_b: Vec<usize> = (0..n).map(|x| element_order(b, eb, x)).collect();
    fn extend(a: &[Vec<usize>], b: &[Vec<usize>], ea: usize, eb: usize, gens: &[usize], imgs: &[usize]) -> Option<Vec<usize>> {
        let n = a.len();
        let mut f = vec![usize::MAX; n];
        f[ea] = eb;
        let mut queue = vec![ea];
        while let Some(x) = queue.pop() {
            for (&g, &h) in gens.iter().zip(imgs) {
                let y = a[x][g];
                let fy = b[f[x]][h];
                if f[y] == usize::MAX {
                    f[y] = fy;
                    queue.push(y);
                } else if f[y] != fy {
                    return None;
                }
            }
        }
        let distinct: BTreeSet<usize> = f.iter().copied().collect();
        if distinct.len() != n || f.contains(&usize::MAX) {
            return None;
        }
        (0..n).all(|x| (0..n).all(|y| f[a[x][y]] == b[f[x]][f[y]])).then_some(f)
    }
    fn search(
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        ea: usize,
        eb: usize,
        gens: &[usize],
        orders_b: &[usize],
        imgs: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if imgs.len() == gens.len() {
            return extend(a, b, ea, eb, gens, imgs);
        }
        let want = element_order(a, ea, gens[imgs.len()]);
        for h in 0..b.len() {
            if orders_b[h] == want {
                imgs.push(h);
                if let Some(f) = search(a, b, ea, eb, gens, orders_b, imgs) {
                    return Some(f);
                }
                imgs.pop();
            }
        }
        None
    }
    search(a, b, ea, eb, &gens, &orders_b, &mut Vec::new())
}

/// Maps each Weyl element of a matrix model to its permutation.
pub fn weyl_permutations(g: &GroupModel, w: &WeylMonoid) -> Option<Vec<Vec<usize>>> {
    let layout = g.layout.as_ref()?;
    w.patterns.iter().map(|&p| layout.permutation(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blueprint::{mk_free, Relation};
    use crate::catalog::{sl, torus};
    use crate::spectrum::DEFAULT_CAP;

    #[test]
    fn sl2_rank_space() {
        let g = sl(2).unwrap();
        let rs = model_rank_space(&g, DEFAULT_CAP).unwrap();
        assert_eq!(rs.labels(), ["(T1,T4)", "(T2,T3)"]);
        assert_eq!(rs.rank(), 1);
        let eps: Vec<u8> = rs.points.iter().map(|r| r.field.epsilon).collect();
        assert_eq!(eps, [2, 1]);
        let w = induced_weyl_law(&g, &rs).unwrap();
        assert!(w.is_group());
        assert_eq!(w.order(), 2);
        assert_eq!(tits_points(&g, &rs, &w, 2).unwrap().count(), 4);
        let t1 = tits_points(&g, &rs, &w, 1).unwrap();
        assert_eq!(t1.count(), 1);
        assert!(t1.table.is_some());
    }

    #[test]
    fn small_examples() {
        // affine line: only the closed point
        let a1 = mk_free(1, GenSet::EMPTY, 1).unwrap();
        let rs = rank_space(&a1, &spectrum(&a1, DEFAULT_CAP).unwrap()).unwrap();
        assert_eq!(rs.labels(), ["(T1)"]);
        // T ≡ 1 + 1: only the generic point
        let n = 1;
        let b = Presentation::new(
            vec!["T".into()],
            GenSet::EMPTY,
            1,
            vec![Relation::new(vec![Monomial::var(n, 0)], vec![Monomial::one(n), Monomial::one(n)])],
        )
        .unwrap();
        let rs = rank_space(&b, &spectrum(&b, DEFAULT_CAP).unwrap()).unwrap();
        assert_eq!(rs.labels(), ["(∅)"]);
        assert_eq!(rs.rank(), 0);
        let t = torus(2).unwrap();
        let rs = model_rank_space(&t, DEFAULT_CAP).unwrap();
        assert_eq!((rs.points.len(), rs.rank()), (1, 2));
    }

    #[test]
    fn isomorphism_search() {
        let (_, s3) = symmetric_group(3);
        let f = find_isomorphism(&s3, &s3).unwrap();
        assert_eq!(f.len(), 6);
        let z6: Vec<Vec<usize>> = (0..6).map(|a| (0..6).map(|b| (a + b) % 6).collect()).collect();
        assert!(find_isomorphism(&s3, &z6).is_none());
        assert!(is_associative(&s3));
    }
}
