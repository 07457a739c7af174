//! Monomial relations of matrix groups given by a Laurent parametrization.
//!
//! Candidates are `1`, the matrix entries and products of two entries. Integer
//! relations among them are the kernel of the coefficient matrix over `Z`. Sparse
//! relations are found by hashing; further relations are added for every prime that
//! some kernel element refutes, until the spectrum is stable.

use crate::blueprint::{GenSet, Monomial, Presentation, Relation};
use crate::catalog::{entry_name, Cell, Comultiplication, Expected, GroupModel, IdentitySource, MatrixLayout, TensorTerm};
use crate::error::Result;
use crate::spectrum::{enumerate_primes, DEFAULT_CAP};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// Laurent polynomial over `Z` in a fixed number of parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Laurent(pub BTreeMap<Vec<i32>, i64>);

impl Laurent {
    /// The constant `c`.
    pub fn constant(nparams: usize, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(vec![0; nparams], c);
        }
        Laurent(m)
    }

    /// `c · ∏ p_i^{e_i}`.
    pub fn term(c: i64, exps: Vec<i32>) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(exps, c);
        }
        Laurent(m)
    }

    /// Sum.
    pub fn add(&self, o: &Laurent) -> Laurent {
        self.add_scaled(o, 1)
    }

    /// `self + c·o`.
    pub fn add_scaled(&self, o: &Laurent, c: i64) -> Laurent {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            let e = m.entry(k.clone()).or_insert(0);
            *e += c * v;
            if *e == 0 {
                m.remove(k);
            }
        }
        Laurent(m)
    }

    /// Product.
    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (k1, v1) in &self.0 {
            for (k2, v2) in &o.0 {
                let k: Vec<i32> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out = out.add(&Laurent::term(v1 * v2, k));
            }
        }
        out
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Primitive part with positive leading coefficient, and the scale factor.
    fn normalized(&self) -> (Laurent, i64) {
        let g = self.0.values().fold(0i64, |g, &v| g.gcd(&v));
        let lead = *self.0.values().next().expect("nonzero");
        let s = if lead < 0 { -g } else { g };
        (Laurent(self.0.iter().map(|(k, v)| (k.clone(), v / s)).collect()), s)
    }
}

/// A sublattice of `Z^d` in echelon form over big integers.
#[derive(Clone, Debug, Default)]
pub struct BigEchelon {
    rows: Vec<Vec<BigInt>>,
}

fn lead(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

impl BigEchelon {
    /// Adds a generator.
    pub fn insert(&mut self, v: Vec<BigInt>) {
        let mut v = v;
        while let Some(c) = lead(&v) {
            match self.rows.iter().position(|r| lead(r) == Some(c)) {
                Some(k) => {
                    let r = std::mem::take(&mut self.rows[k]);
                    let eg = r[c].extended_gcd(&v[c]);
                    let (g, x, y) = (eg.gcd, eg.x, eg.y);
                    let (rc, vc) = (&r[c] / &g, &v[c] / &g);
                    let nr: Vec<BigInt> = r.iter().zip(&v).map(|(a, b)| &x * a + &y * b).collect();
                    let nv: Vec<BigInt> = r.iter().zip(&v).map(|(a, b)| &rc * b - &vc * a).collect();
                    self.rows[k] = nr;
                    v = nv;
                }
                None => {
                    if v[c].is_negative() {
                        v.iter_mut().for_each(|x| *x = -x.clone());
                    }
                    self.rows.push(v);
                    self.rows.sort_by_key(|r| lead(r));
                    return;
                }
            }
        }
    }

    /// Reduces `v` against the rows whose leading position is below `upto`.
    pub fn reduce_prefix(&self, v: &mut [BigInt], upto: usize) {
        for r in &self.rows {
            let c = lead(r).expect("nonzero row");
            if c >= upto {
                break;
            }
            let q = v[c].div_floor(&r[c]);
            if !q.is_zero() {
                for (a, b) in v.iter_mut().zip(r) {
                    *a -= &q * b;
                }
            }
        }
    }

    /// Rows with leading position in `from..`.
    pub fn rows_from(&self, from: usize) -> impl Iterator<Item = &Vec<BigInt>> {
        self.rows.iter().filter(move |r| lead(r).is_some_and(|c| c >= from))
    }
}

/// A candidate monomial: `1`, an entry, or a product of two entries.
type Candidate = Vec<usize>;

struct Derivation {
    ngens: usize,
    cands: Vec<Candidate>,
    kernel: Vec<Vec<BigInt>>,
    seed: Vec<Vec<BigInt>>,
}

impl Derivation {
    fn new(entries: &[Laurent], nparams: usize) -> Self {
        let ngens = entries.len();
        let mut cands: Vec<Candidate> = vec![vec![]];
        cands.extend((0..ngens).map(|g| vec![g]));
        for g in 0..ngens {
            for h in g..ngens {
                cands.push(vec![g, h]);
            }
        }
        let polys: Vec<Laurent> = cands
            .iter()
            .map(|c| c.iter().fold(Laurent::constant(nparams, 1), |acc, &g| acc.mul(&entries[g])))
            .collect();
        let mons: BTreeSet<&Vec<i32>> = polys.iter().flat_map(|p| p.0.keys()).collect();
        let index: BTreeMap<&Vec<i32>, usize> = mons.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let (p, n) = (index.len(), cands.len());
        let mut ech = BigEchelon::default();
        for (j, poly) in polys.iter().enumerate() {
            let mut v = vec![BigInt::zero(); p + n];
            for (k, c) in &poly.0 {
                v[index[k]] = BigInt::from(*c);
            }
            v[p + j] = BigInt::one();
            ech.insert(v);
        }
        let kernel = ech.rows_from(p).map(|r| r[p..].to_vec()).collect();
        let mut d = Derivation { ngens, cands, kernel, seed: Vec::new() };
        d.kernel.sort();
        d.sparse_seed(&polys);
        d
    }

    /// Sparse kernel elements found by hashing, placed before the basis.
    fn sparse_seed(&mut self, polys: &[Laurent]) {
        let mut by_key: BTreeMap<Laurent, Vec<(usize, i64)>> = BTreeMap::new();
        for (j, p) in polys.iter().enumerate() {
            if !p.is_zero() {
                let (k, s) = p.normalized();
                by_key.entry(k).or_default().push((j, s));
            }
        }
        let n = polys.len();
        let mut found: BTreeSet<Vec<(usize, i64)>> = BTreeSet::new();
        let mut push = |mut terms: Vec<(usize, i64)>| {
            terms.sort();
            if terms.iter().all(|&(_, c)| c.abs() <= 2) && terms.iter().any(|&(_, c)| c.abs() == 1) {
                let flip = terms[0].1 < 0;
                found.insert(terms.into_iter().map(|(j, c)| (j, if flip { -c } else { c })).collect());
            }
        };
        for list in by_key.values() {
            for (a, &(i, si)) in list.iter().enumerate() {
                for &(j, sj) in &list[a + 1..] {
                    let g = si.gcd(&sj);
                    push(vec![(i, sj / g), (j, -si / g)]);
                }
            }
        }
        for i in 0..n {
            if polys[i].is_zero() {
                continue;
            }
            for j in i + 1..n {
                if polys[j].is_zero() {
                    continue;
                }
                for (ci, cj) in [(1, 1), (1, -1), (1, 2), (1, -2), (2, 1), (2, -1)] {
                    let q = Laurent::default().add_scaled(&polys[i], ci).add_scaled(&polys[j], cj);
                    if q.is_zero() {
                        continue;
                    }
                    let (key, sq) = q.normalized();
                    if let Some(list) = by_key.get(&key) {
                        for &(k, sk) in list {
                            if k != i && k != j && sq % sk == 0 {
                                push(vec![(i, ci), (j, cj), (k, -sq / sk)]);
                            }
                        }
                    }
                }
            }
        }
        let mut seed: Vec<Vec<BigInt>> = found
            .into_iter()
            .map(|terms| {
                let mut v = vec![BigInt::zero(); n];
                for (j, c) in terms {
                    v[j] += c;
                }
                v
            })
            .collect();
        seed.sort();
        seed.dedup();
        self.seed = seed;
    }
}

impl Derivation {
    fn relation(&self, v: &[BigInt]) -> Relation {
        let n = self.ngens;
        let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
        for (j, c) in v.iter().enumerate() {
            let m = Monomial::product(n, &self.cands[j]);
            let k: usize = c.abs().try_into().expect("small coefficient");
            let side = if c.is_positive() { &mut lhs } else { &mut rhs };
            side.extend(std::iter::repeat_n(m, k));
        }
        Relation::new(lhs, rhs)
    }

    /// Candidates avoiding `i`.
    fn outside(&self, i: GenSet) -> Vec<usize> {
        (0..self.cands.len()).filter(|&j| self.cands[j].iter().all(|&g| !i.contains(g))).collect()
    }

    /// Echelon of `[v|_O ‖ v]` over the kernel basis, coordinates of `O` in `order`.
    fn restricted(&self, order: &[usize]) -> BigEchelon {
        let mut e = BigEchelon::default();
        for v in &self.kernel {
            let mut w: Vec<BigInt> = order.iter().map(|&j| v[j].clone()).collect();
            w.extend(v.iter().cloned());
            e.insert(w);
        }
        e
    }

    /// Positions `m` with `e_m` in the rational span of the restricted kernel,
    /// tested modulo a large prime.
    fn unit_directions(&self, out: &[usize]) -> Vec<usize> {
        const P: u128 = (1 << 61) - 1;
        let k = out.len();
        let to_mod = |x: &BigInt| -> u128 {
            let r = x.mod_floor(&BigInt::from(P as u64));
            u64::try_from(r).expect("reduced") as u128
        };
        let pow = |mut b: u128, mut e: u128| {
            let mut acc = 1u128;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * b % P;
                }
                b = b * b % P;
                e >>= 1;
            }
            acc
        };
        let mut rows: Vec<Vec<u128>> = self
            .kernel
            .iter()
            .map(|v| out.iter().map(|&j| to_mod(&v[j])).collect::<Vec<u128>>())
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..k {
            let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, p);
            let inv = pow(rows[r][c], P - 2);
            for x in rows[r].iter_mut() {
                *x = *x * inv % P;
            }
            for i in 0..rows.len() {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in 0..k {
                        let sub = f * rows[r][j] % P;
                        rows[i][j] = (rows[i][j] + P - sub) % P;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
            .iter()
            .enumerate()
            .filter(|&(i, &c)| rows[i].iter().enumerate().all(|(j, &x)| j == c || x == 0))
            .map(|(_, &c)| c)
            .collect()
    }

    /// Kernel elements restricting to `g·e_m` with minimal `g > 0`, for each `m` with
    /// `e_m` in the rational span of the restriction.
    fn single_term_witnesses(&self, out: &[usize]) -> Vec<Vec<BigInt>> {
        let k = out.len();
        let mut found = Vec::new();
        for m in self.unit_directions(out) {
            let mut order: Vec<usize> = out.iter().copied().filter(|&j| j != out[m]).collect();
            order.push(out[m]);
            let e = self.restricted(&order);
            if let Some(r) = e.rows.iter().find(|r| lead(r) == Some(k - 1)) {
                found.push(r[k..].to_vec());
            }
        }
        found
    }

    /// Kernel elements restricting to `e_a ± e_b` on `out`.
    fn binomials(&self, out: &[usize]) -> Vec<Vec<BigInt>> {
        let k = out.len();
        let e = self.restricted(out);
        let mut found = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                for sign in [-1i64, 1] {
                    let mut t = vec![BigInt::zero(); k + self.cands.len()];
                    t[a] = BigInt::one();
                    t[b] = BigInt::from(sign);
                    e.reduce_prefix(&mut t, k);
                    if t[..k].iter().all(|x| x.is_zero()) {
                        found.push(t[k..].iter().map(|x| -x).collect());
                    }
                }
            }
        }
        found
    }
}

/// Relations defining the model: sparse seed, prime witnesses, and binomials at the
/// maximal primes.
fn derive_presentation(names: Vec<String>, entries: &[Laurent], nparams: usize) -> Result<Presentation> {
    let d = Derivation::new(entries, nparams);
    let mut rels: Vec<Relation> = d.seed.iter().map(|v| d.relation(v)).collect();
    let mut pres = Presentation::new(names.clone(), GenSet::EMPTY, 1, rels.clone())?;
    loop {
        let primes = enumerate_primes(&pres, DEFAULT_CAP)?;
        let new: Vec<Relation> = primes
            .iter()
            .flat_map(|p| d.single_term_witnesses(&d.outside(p.vars)))
            .map(|v| d.relation(&v))
            .filter(|r| !pres.relations.contains(r))
            .collect();
        if new.is_empty() {
            let maximal: Vec<GenSet> = primes
                .iter()
                .map(|p| p.vars)
                .filter(|&p| !primes.iter().any(|q| q.vars != p && p.is_subset(q.vars)))
                .collect();
            for p in maximal {
                rels.extend(d.binomials(&d.outside(p)).iter().map(|v| d.relation(v)));
            }
            return Presentation::new(names, GenSet::EMPTY, 1, rels);
        }
        rels.extend(new);
        pres = Presentation::new(names.clone(), GenSet::EMPTY, 1, rels.clone())?;
    }
}

fn matrix_model(name: &str, dim: usize, entries: Vec<Laurent>, nparams: usize, expected: Expected) -> Result<GroupModel> {
    let names: Vec<String> = (0..dim * dim).map(|g| entry_name(dim, g / dim, g % dim)).collect();
    let presentation = derive_presentation(names, &entries, nparams)?;
    let cells: Vec<Vec<Cell>> = (0..dim).map(|i| (0..dim).map(|j| Cell::Gen(i * dim + j)).collect()).collect();
    let images = (0..dim * dim)
        .map(|g| {
            let (i, j) = (g / dim, g % dim);
            (0..dim).map(|k| TensorTerm { left: vec![i * dim + k], right: vec![k * dim + j] }).collect()
        })
        .collect();
    let counit = (0..dim * dim).map(|g| u8::from(g / dim == g % dim)).collect();
    Ok(GroupModel {
        name: name.into(),
        presentation,
        comult: Comultiplication { images },
        identity: IdentitySource::Counit(counit),
        layout: Some(MatrixLayout { dim, cells, aux: None }),
        rank_filter: None,
        tits_weyl: None,
        expected,
    })
}

/// Entries of the conjugation representation on the chart `a ≠ 0`, `d = (1 + bc)/a`.
pub fn conj_entries() -> Vec<Laurent> {
    let p = |c: i64, a: i32, b: i32, cc: i32| Laurent::term(c, vec![a, b, cc]);
    let a = p(1, 1, 0, 0);
    let b = p(1, 0, 1, 0);
    let c = p(1, 0, 0, 1);
    let d = p(1, -1, 0, 0).add(&p(1, -1, 1, 1));
    let neg = |x: &Laurent| Laurent::constant(3, -1).mul(x);
    let m = |x: &Laurent, y: &Laurent| x.mul(y);
    vec![
        m(&a, &d), neg(&m(&a, &c)), m(&b, &d), neg(&m(&b, &c)),
        neg(&m(&a, &b)), m(&a, &a), neg(&m(&b, &b)), m(&a, &b),
        m(&c, &d), neg(&m(&c, &c)), m(&d, &d), neg(&m(&c, &d)),
        neg(&m(&b, &c)), m(&a, &c), neg(&m(&b, &d)), m(&a, &d),
    ]
}

/// Entries of the adjoint representation on the big cell, parameters `(λ, s, t)`.
pub fn adjoint_entries() -> Vec<Laurent> {
    let p = |c: i64, l: i32, s: i32, t: i32| Laurent::term(c, vec![l, s, t]);
    let sum = |xs: &[Laurent]| xs.iter().fold(Laurent::default(), |a, x| a.add(x));
    vec![
        p(1, -2, 2, 0),
        sum(&[p(-1, 0, 1, 0), p(1, -2, 2, 1)]),
        sum(&[p(-1, 2, 0, 0), p(2, 0, 1, 1), p(-1, -2, 2, 2)]),
        p(2, -2, 1, 0),
        sum(&[p(-1, 0, 0, 0), p(2, -2, 1, 1)]),
        sum(&[p(2, 0, 0, 1), p(-2, -2, 1, 2)]),
        p(-1, -2, 0, 0),
        p(-1, -2, 0, 1),
        p(1, -2, 0, 2),
    ]
}

/// `PGL_2` through conjugation on `2×2` matrices.
pub fn psl2_conj() -> Result<GroupModel> {
    static CELL: OnceLock<Result<GroupModel>> = OnceLock::new();
    CELL.get_or_init(|| {
        matrix_model("psl2-conj", 4, conj_entries(), 3, Expected { rank: Some(1), weyl_order: Some(2), points: Some(7) })
    })
    .clone()
}

/// `PGL_2` through the adjoint representation.
pub fn psl2_adjoint() -> Result<GroupModel> {
    static CELL: OnceLock<Result<GroupModel>> = OnceLock::new();
    CELL.get_or_init(|| {
        matrix_model("psl2-adj", 3, adjoint_entries(), 3, Expected { rank: Some(1), weyl_order: Some(2), points: Some(13) })
    })
    .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_determinant_identity() {
        let e = conj_entries();
        // T11 + T14 = ad − bc = 1
        assert_eq!(e[0].add(&e[3]), Laurent::constant(3, 1));
    }

    #[test]
    fn adjoint_relation() {
        let e = adjoint_entries();
        // T22·T31 + T31 = T21·T32
        let lhs = e[4].mul(&e[6]).add(&e[6]);
        assert_eq!(lhs, e[3].mul(&e[7]));
    }
}
