//! Group models: presentations paired with comultiplications, counits and matrix
//! layouts.

use crate::blueprint::{GenSet, Monomial, Presentation, Relation};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A term `(∏ left)' · (∏ right)''` of a comultiplication image.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorTerm {
    /// Generators of the first copy, with multiplicity.
    pub left: Vec<usize>,
    /// Generators of the second copy, with multiplicity.
    pub right: Vec<usize>,
}

impl TensorTerm {
    /// True when the term is nonzero at the pair of nonzero sets `(x, y)`.
    pub fn survives(&self, x: GenSet, y: GenSet) -> bool {
        self.left.iter().all(|&g| x.contains(g)) && self.right.iter().all(|&g| y.contains(g))
    }
}

/// Images `Δ(T_g)` as formal sums of tensor terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comultiplication {
    /// One formal sum per generator.
    pub images: Vec<Vec<TensorTerm>>,
}

/// A matrix cell: a generator or a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    /// The entry is the given generator.
    Gen(usize),
    /// The entry is 0.
    Zero,
    /// The entry is 1.
    One,
}

/// How generators sit in a square matrix, with an optional auxiliary `d = det⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixLayout {
    /// Matrix dimension.
    pub dim: usize,
    /// Cells in row-major order.
    pub cells: Vec<Vec<Cell>>,
    /// Index of the auxiliary generator.
    pub aux: Option<usize>,
}

impl MatrixLayout {
    /// The permutation `i ↦ σ(i)` whose cells are exactly the nonzero generator
    /// cells (plus constant one cells), if the pattern is a permutation matrix.
    pub fn permutation(&self, nonzero: GenSet) -> Option<Vec<usize>> {
        let n = self.dim;
        let mut sigma = Vec::with_capacity(n);
        for row in &self.cells {
            let live: Vec<usize> = (0..n)
                .filter(|&j| match row[j] {
                    Cell::Gen(g) => nonzero.contains(g),
                    Cell::One => true,
                    Cell::Zero => false,
                })
                .collect();
            if live.len() != 1 {
                return None;
            }
            sigma.push(live[0]);
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if std::mem::replace(&mut seen[s], true) {
                return None;
            }
        }
        Some(sigma)
    }
}

/// How the identity of the Weyl monoid is found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentitySource {
    /// Counit values (0 or 1) per generator.
    Counit(Vec<u8>),
    /// A declared nonzero set, for models without an `F1`-rational identity.
    Declared(GenSet),
}

impl IdentitySource {
    /// Nonzero set of the identity.
    pub fn nonzero(&self) -> GenSet {
        match self {
            IdentitySource::Counit(v) => GenSet::from_indices(v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i)),
            IdentitySource::Declared(s) => *s,
        }
    }
}

/// Extra selection applied to computed rank points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankFilter {
    /// Keep points whose pattern is a permutation of sign +1.
    EvenPermutations,
}

/// Reference values attached to a model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// Rank.
    pub rank: Option<usize>,
    /// Order of the Weyl group.
    pub weyl_order: Option<usize>,
    /// Number of spectrum points.
    pub points: Option<usize>,
}

/// A presentation with a comultiplication and its metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    /// Catalog name.
    pub name: String,
    /// The blueprint.
    pub presentation: Presentation,
    /// The comultiplication.
    pub comult: Comultiplication,
    /// Source of the identity.
    pub identity: IdentitySource,
    /// Matrix layout, for matrix models.
    pub layout: Option<MatrixLayout>,
    /// Extra rank-point selection.
    pub rank_filter: Option<RankFilter>,
    /// Whether the Weyl monoid is expected to realize the Weyl group of the group
    /// scheme (set for constant groups and semidirect products).
    pub tits_weyl: Option<bool>,
    /// Reference values.
    pub expected: Expected,
}

/// All permutations of `0..n` in lexicographic order with their parity (true = odd).
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, inv % 2 == 1)
        })
        .collect()
}

/// Generator name of a matrix entry: `T1..T4` for 2×2 matrices, `Tij` otherwise.
pub fn entry_name(dim: usize, i: usize, j: usize) -> String {
    if dim == 2 {
        format!("T{}", i * 2 + j + 1)
    } else if dim < 10 {
        format!("T{}{}", i + 1, j + 1)
    } else {
        format!("T{}_{}", i + 1, j + 1)
    }
}

/// Builder for matrix models.
struct MatrixBuilder {
    dim: usize,
    cells: Vec<Vec<Cell>>,
    names: Vec<String>,
    aux: Option<usize>,
}

impl MatrixBuilder {
    /// `var(i,j)` decides which cells are generators; others follow `fixed`.
    fn new(dim: usize, var: impl Fn(usize, usize) -> bool, fixed: impl Fn(usize, usize) -> Cell, aux: bool) -> Self {
        let mut names = Vec::new();
        let mut cells = vec![vec![Cell::Zero; dim]; dim];
        for (i, row) in cells.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = if var(i, j) {
                    names.push(entry_name(dim, i, j));
                    Cell::Gen(names.len() - 1)
                } else {
                    fixed(i, j)
                };
            }
        }
        let aux = aux.then(|| {
            names.push("d".into());
            names.len() - 1
        });
        MatrixBuilder { dim, cells, names, aux }
    }

    fn ngens(&self) -> usize {
        self.names.len()
    }

    fn gen(&self, i: usize, j: usize) -> usize {
        match self.cells[i][j] {
            Cell::Gen(g) => g,
            _ => panic!("cell ({i},{j}) is not a generator"),
        }
    }

    /// `Σ_even ∏ ≡ Σ_odd ∏ + 1`, multiplied by `d` when `with_aux`.
    fn det_relation(&self, with_aux: bool) -> Relation {
        let n = self.ngens();
        let (mut even, mut odd) = (Vec::new(), Vec::new());
        for (p, is_odd) in permutations(self.dim) {
            let mut gens = Vec::new();
            let mut zero = false;
            for (i, &j) in p.iter().enumerate() {
                match self.cells[i][j] {
                    Cell::Gen(g) => gens.push(g),
                    Cell::Zero => zero = true,
                    Cell::One => {}
                }
            }
            if zero {
                continue;
            }
            if with_aux {
                gens.push(self.aux.expect("aux generator"));
            }
            let m = Monomial::product(n, &gens);
            if is_odd {
                odd.push(m);
            } else {
                even.push(m);
            }
        }
        odd.push(Monomial::one(n));
        Relation::new(even, odd)
    }

    /// `T_ij ↦ Σ_k T'_ik T''_kj`, `d ↦ d'd''`.
    fn comult(&self) -> Comultiplication {
        let mut images = vec![Vec::new(); self.ngens()];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let Cell::Gen(g) = self.cells[i][j] else { continue };
                for k in 0..self.dim {
                    let (a, b) = (self.cells[i][k], self.cells[k][j]);
                    if a == Cell::Zero || b == Cell::Zero {
                        continue;
                    }
                    let left = if let Cell::Gen(x) = a { vec![x] } else { vec![] };
                    let right = if let Cell::Gen(x) = b { vec![x] } else { vec![] };
                    images[g].push(TensorTerm { left, right });
                }
            }
        }
        if let Some(d) = self.aux {
            images[d].push(TensorTerm { left: vec![d], right: vec![d] });
        }
        Comultiplication { images }
    }

    fn counit(&self) -> IdentitySource {
        let mut v = vec![0u8; self.ngens()];
        for i in 0..self.dim {
            if let Cell::Gen(g) = self.cells[i][i] {
                v[g] = 1;
            }
        }
        if let Some(d) = self.aux {
            v[d] = 1;
        }
        IdentitySource::Counit(v)
    }

    fn layout(&self) -> MatrixLayout {
        MatrixLayout { dim: self.dim, cells: self.cells.clone(), aux: self.aux }
    }

    fn model(self, name: String, relations: Vec<Relation>, expected: Expected) -> Result<GroupModel> {
        let presentation = Presentation::new(self.names.clone(), GenSet::EMPTY, 1, relations)?;
        Ok(GroupModel {
            name,
            comult: self.comult(),
            identity: self.counit(),
            layout: Some(self.layout()),
            presentation,
            rank_filter: None,
            tits_weyl: None,
            expected,
        })
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Invalid(format!("dimension {n} below {min}")));
    }
    if n * n + 1 > crate::blueprint::MAX_GENERATORS {
        return Err(Error::TooManyGenerators { count: n * n + 1, max: crate::blueprint::MAX_GENERATORS });
    }
    Ok(())
}

/// `SL_n`: the determinant relation on `n²` entries.
pub fn sl(n: usize) -> Result<GroupModel> {
    check_dim(n, 1)?;
    let b = MatrixBuilder::new(n, |_, _| true, |_, _| Cell::Zero, false);
    let rel = b.det_relation(false);
    b.model(
        format!("sl:{n}"),
        vec![rel],
        Expected { rank: Some(n - 1), weyl_order: Some(factorial(n)), points: None },
    )
}

/// `GL_n`: entries and `d` with `d·det ≡ 1`.
pub fn gl(n: usize) -> Result<GroupModel> {
    check_dim(n, 1)?;
    let b = MatrixBuilder::new(n, |_, _| true, |_, _| Cell::Zero, true);
    let rel = b.det_relation(true);
    b.model(format!("gl:{n}"), vec![rel], Expected { rank: Some(n), weyl_order: Some(factorial(n)), points: None })
}

/// Relation `Σ c_m·m ≡ 0` from integer coefficients, divided by their gcd, with
/// positive terms on the left.
fn signed_relation(ng: usize, coeffs: &BTreeMap<Vec<usize>, i64>) -> Option<Relation> {
    let g = coeffs.values().fold(0i64, |g, &c| num_integer::gcd(g, c));
    if g == 0 {
        return None;
    }
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    for (gens, &c) in coeffs {
        let m = Monomial::product(ng, gens);
        let side = if c > 0 { &mut lhs } else { &mut rhs };
        side.extend(std::iter::repeat_n(m, (c / g).unsigned_abs() as usize));
    }
    Some(Relation::new(lhs, rhs))
}

/// Relations of the group preserving the antidiagonal form `M` with
/// `M[k][n−1−k] = mu[k]`: `A^t M A = M`, `A N A^t = N` for `N ∝ M^{-1}` with
/// weights `nu`, and `d·adj(A) = M^{-1} A^t M`.
fn form_relations(b: &MatrixBuilder, mu: &[i64], nu: &[i64]) -> Vec<Relation> {
    let n = b.dim;
    let ng = b.ngens();
    let d = b.aux.expect("form models carry d");
    let mut rels = Vec::new();
    for (w, by_rows) in [(mu, false), (nu, true)] {
        let x = |i: usize, k: usize| if by_rows { b.gen(i, k) } else { b.gen(k, i) };
        for i in 0..n {
            for j in i..n {
                let mut c: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
                for k in 0..n {
                    let mut g = vec![x(i, k), x(j, n - 1 - k)];
                    g.sort();
                    *c.entry(g).or_default() += w[k];
                }
                if j == n - 1 - i {
                    *c.entry(vec![]).or_default() -= w[i];
                }
                c.retain(|_, v| *v != 0);
                rels.extend(signed_relation(ng, &c));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            // adj(A)_{ij} = (−1)^{i+j} det(A without row j and column i)
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let mut c: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
            for (p, odd) in permutations(n - 1) {
                let mut g: Vec<usize> = rows.iter().zip(&p).map(|(&r, &k)| b.gen(r, cols[k])).collect();
                g.push(d);
                g.sort();
                let sign = if odd ^ ((i + j) % 2 == 1) { -1 } else { 1 };
                *c.entry(g).or_default() += sign * mu[n - 1 - i];
            }
            *c.entry(vec![b.gen(n - 1 - j, n - 1 - i)]).or_default() -= mu[n - 1 - j];
            c.retain(|_, v| *v != 0);
            rels.extend(signed_relation(ng, &c));
        }
    }
    rels
}

/// `Sp_2n` as the subgroup of `GL_2n` preserving `J` with `J[k][2n−1−k] = ±1`.
pub fn sp(two_n: usize) -> Result<GroupModel> {
    if two_n % 2 != 0 || two_n == 0 {
        return Err(Error::Invalid(format!("sp needs a positive even dimension, got {two_n}")));
    }
    check_dim(two_n, 2)?;
    let n = two_n / 2;
    let b = MatrixBuilder::new(two_n, |_, _| true, |_, _| Cell::Zero, true);
    let mu: Vec<i64> = (0..two_n).map(|k| if k < n { 1 } else { -1 }).collect();
    let mut rels = vec![b.det_relation(true)];
    rels.extend(form_relations(&b, &mu, &mu));
    let w = (1 << n) * factorial(n);
    b.model(format!("sp:{two_n}"), rels, Expected { rank: Some(n), weyl_order: Some(w), points: None })
}

/// `O_n`: the group of the split form `Σ x_k x_{n−1−k} (+ x_m²)`.
fn orthogonal(n: usize, name: String, special_odd: bool, expected: Expected) -> Result<GroupModel> {
    check_dim(n, 2)?;
    let b = MatrixBuilder::new(n, |_, _| true, |_, _| Cell::Zero, true);
    let odd_mid = |k: usize| n % 2 == 1 && k == n / 2;
    let mu: Vec<i64> = (0..n).map(|k| if odd_mid(k) { 2 } else { 1 }).collect();
    let nu: Vec<i64> = (0..n).map(|k| if odd_mid(k) { 1 } else if n % 2 == 1 { 2 } else { 1 }).collect();
    let mut rels = vec![b.det_relation(true)];
    rels.extend(form_relations(&b, &mu, &nu));
    if special_odd {
        rels.push(b.det_relation(false));
    }
    b.model(name, rels, expected)
}

/// `SO_n`; for even `n` the rank points of `O_n` are filtered to even permutations.
pub fn so(n: usize) -> Result<GroupModel> {
    let m = n / 2;
    if n % 2 == 1 {
        let w = (1 << m) * factorial(m);
        orthogonal(n, format!("so:{n}"), true, Expected { rank: Some(m), weyl_order: Some(w), points: None })
    } else {
        let w = (1 << (m - 1)) * factorial(m);
        let mut g = orthogonal(n, format!("so:{n}"), false, Expected { rank: Some(m), weyl_order: Some(w), points: None })?;
        g.rank_filter = Some(RankFilter::EvenPermutations);
        Ok(g)
    }
}

/// `O_2m`.
pub fn o(two_m: usize) -> Result<GroupModel> {
    if two_m % 2 != 0 || two_m == 0 {
        return Err(Error::Invalid(format!("o needs a positive even dimension, got {two_m}")));
    }
    let m = two_m / 2;
    let w = (1 << m) * factorial(m);
    orthogonal(two_m, format!("o:{two_m}"), false, Expected { rank: Some(m), weyl_order: Some(w), points: None })
}

fn check_composition(n: usize, flag: &[usize]) -> Result<Vec<usize>> {
    if flag.iter().sum::<usize>() != n || flag.contains(&0) {
        return Err(Error::Invalid(format!("{flag:?} is not a composition of {n}")));
    }
    let mut block = Vec::with_capacity(n);
    for (b, &len) in flag.iter().enumerate() {
        block.extend(std::iter::repeat_n(b, len));
    }
    Ok(block)
}

/// Standard parabolic of `GL_n` with block sizes `flag`: entries below the blocks vanish.
pub fn parabolic(n: usize, flag: &[usize]) -> Result<GroupModel> {
    check_dim(n, 1)?;
    let block = check_composition(n, flag)?;
    let b = MatrixBuilder::new(n, |i, j| block[i] <= block[j], |_, _| Cell::Zero, true);
    let rel = b.det_relation(true);
    let w = flag.iter().map(|&k| factorial(k)).product();
    let name = format!("parabolic:{n}:{}", flag.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    b.model(name, vec![rel], Expected { rank: Some(n), weyl_order: Some(w), points: None })
}

/// Unipotent radical of the standard parabolic: identity diagonal blocks, free
/// entries above the blocks.
pub fn unipotent(n: usize, flag: &[usize]) -> Result<GroupModel> {
    check_dim(n, 1)?;
    let block = check_composition(n, flag)?;
    let b = MatrixBuilder::new(n, |i, j| block[i] < block[j], |i, j| if i == j { Cell::One } else { Cell::Zero }, false);
    let rel = b.det_relation(false);
    let name = format!("unipotent:{n}:{}", flag.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    b.model(name, vec![rel], Expected { rank: Some(0), weyl_order: Some(1), points: None })
}

/// Split torus of rank `r`.
pub fn torus(r: usize) -> Result<GroupModel> {
    if r > crate::blueprint::MAX_GENERATORS {
        return Err(Error::TooManyGenerators { count: r, max: crate::blueprint::MAX_GENERATORS });
    }
    let names: Vec<String> = (1..=r).map(|i| format!("T{i}")).collect();
    let presentation = Presentation::new(names, GenSet::full(r), 1, vec![])?;
    let mut cells = vec![vec![Cell::Zero; r]; r];
    for (i, row) in cells.iter_mut().enumerate() {
        row[i] = Cell::Gen(i);
    }
    Ok(GroupModel {
        name: format!("torus:{r}"),
        presentation,
        comult: Comultiplication { images: (0..r).map(|i| vec![TensorTerm { left: vec![i], right: vec![i] }]).collect() },
        identity: IdentitySource::Counit(vec![1; r]),
        layout: Some(MatrixLayout { dim: r, cells, aux: None }),
        rank_filter: None,
        tits_weyl: Some(true),
        expected: Expected { rank: Some(r), weyl_order: Some(1), points: Some(1) },
    })
}

/// A finite group by its multiplication table (element 0 need not be the identity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    /// `table[g][h] = gh`.
    pub table: Vec<Vec<usize>>,
}

impl GroupTable {
    /// Cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        GroupTable { table: (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect() }
    }

    /// Validates the group axioms and returns the identity.
    pub fn validate(&self) -> Result<usize> {
        let n = self.table.len();
        if n == 0 || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid("group table must be square with entries in range".into()));
        }
        let t = &self.table;
        let e = (0..n)
            .find(|&e| (0..n).all(|g| t[e][g] == g && t[g][e] == g))
            .ok_or_else(|| Error::Invalid("group table has no identity".into()))?;
        for g in 0..n {
            if !(0..n).any(|h| t[g][h] == e && t[h][g] == e) {
                return Err(Error::Invalid(format!("element {g} has no inverse")));
            }
            for h in 0..n {
                for k in 0..n {
                    if t[t[g][h]][k] != t[g][t[h][k]] {
                        return Err(Error::Invalid("group table is not associative".into()));
                    }
                }
            }
        }
        Ok(e)
    }
}

fn idempotent_relations(ng: usize, e: &[usize]) -> Vec<Relation> {
    let mut rels = Vec::new();
    for (a, &g) in e.iter().enumerate() {
        rels.push(Relation::new(vec![Monomial::product(ng, &[g, g])], vec![Monomial::var(ng, g)]));
        for &h in &e[a + 1..] {
            rels.push(Relation::new(vec![Monomial::product(ng, &[g, h])], vec![]));
        }
    }
    rels.push(Relation::new(e.iter().map(|&g| Monomial::var(ng, g)).collect(), vec![Monomial::one(ng)]));
    rels
}

/// The constant group scheme of a finite group.
pub fn constant_group(g: &GroupTable) -> Result<GroupModel> {
    let id = g.validate()?;
    let n = g.table.len();
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let e: Vec<usize> = (0..n).collect();
    let presentation = Presentation::new(names, GenSet::EMPTY, 1, idempotent_relations(n, &e))?;
    let mut images = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            images[g.table[a][b]].push(TensorTerm { left: vec![a], right: vec![b] });
        }
    }
    let mut counit = vec![0u8; n];
    counit[id] = 1;
    Ok(GroupModel {
        name: format!("const:{n}"),
        presentation,
        comult: Comultiplication { images },
        identity: IdentitySource::Counit(counit),
        layout: None,
        rank_filter: None,
        tits_weyl: Some(n == 1),
        expected: Expected { rank: Some(0), weyl_order: Some(n), points: Some(n) },
    })
}

/// Data of a semidirect product `G_m^r ⋊ Γ`: `exps[g]` is the integer matrix by
/// which `g` acts on the character lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectData {
    /// Torus rank.
    pub rank: usize,
    /// The finite group.
    pub group: GroupTable,
    /// One `rank × rank` matrix per group element.
    pub exps: Vec<Vec<Vec<i64>>>,
}

/// `G_m^r ⋊ Γ` with components indexed by `Γ`; on component `g` the coordinates are
/// `T_{g,i}` with inverses `S_{g,i}`.
pub fn semidirect(data: &SemidirectData) -> Result<GroupModel> {
    let id = data.group.validate()?;
    let n = data.group.table.len();
    let r = data.rank;
    let ok_shape = data.exps.len() == n && data.exps.iter().all(|a| a.len() == r && a.iter().all(|row| row.len() == r));
    if !ok_shape {
        return Err(Error::Invalid("semidirect action matrices have the wrong shape".into()));
    }
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..r).map(|i| (0..r).map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    for g in 0..n {
        for h in 0..n {
            if mul(&data.exps[g], &data.exps[h]) != data.exps[data.group.table[g][h]] {
                return Err(Error::Invalid("action matrices are not a homomorphism".into()));
            }
        }
    }
    let ng = n * (1 + 2 * r);
    if ng > crate::blueprint::MAX_GENERATORS {
        return Err(Error::TooManyGenerators { count: ng, max: crate::blueprint::MAX_GENERATORS });
    }
    let e = |g: usize| g;
    let t = |g: usize, i: usize| n + g * r + i;
    let s = |g: usize, i: usize| n + n * r + g * r + i;
    let mut names: Vec<String> = (0..n).map(|g| format!("e{g}")).collect();
    names.extend((0..n).flat_map(|g| (0..r).map(move |i| format!("T{g}_{}", i + 1))));
    names.extend((0..n).flat_map(|g| (0..r).map(move |i| format!("S{g}_{}", i + 1))));
    let es: Vec<usize> = (0..n).collect();
    let mut rels = idempotent_relations(ng, &es);
    for g in 0..n {
        for i in 0..r {
            rels.push(Relation::new(vec![Monomial::product(ng, &[t(g, i), s(g, i)])], vec![Monomial::var(ng, e(g))]));
            for h in (0..n).filter(|&h| h != g) {
                rels.push(Relation::new(vec![Monomial::product(ng, &[t(g, i), e(h)])], vec![]));
                rels.push(Relation::new(vec![Monomial::product(ng, &[s(g, i), e(h)])], vec![]));
            }
        }
    }
    let presentation = Presentation::new(names, GenSet::EMPTY, 1, rels)?;
    let mut images = vec![Vec::new(); ng];
    for g1 in 0..n {
        for g2 in 0..n {
            let g = data.group.table[g1][g2];
            images[e(g)].push(TensorTerm { left: vec![e(g1)], right: vec![e(g2)] });
            let a = &data.exps[g1];
            for i in 0..r {
                // (t1, g1)(t2, g2) = (t1 · g1(t2), g1 g2)
                for (coord, inverse) in [(t(g, i), false), (s(g, i), true)] {
                    let mut left = vec![if inverse { s(g1, i) } else { t(g1, i) }];
                    let mut right = Vec::new();
                    for j in 0..r {
                        let x = a[i][j] * if inverse { -1 } else { 1 };
                        let gen = if x >= 0 { t(g2, j) } else { s(g2, j) };
                        right.extend(std::iter::repeat_n(gen, x.unsigned_abs() as usize));
                    }
                    if right.is_empty() {
                        right.push(e(g2));
                    }
                    left.sort_unstable();
                    images[coord].push(TensorTerm { left, right });
                }
            }
        }
    }
    let mut counit = vec![0u8; ng];
    counit[e(id)] = 1;
    for i in 0..r {
        counit[t(id, i)] = 1;
        counit[s(id, i)] = 1;
    }
    let identity_matrix: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let faithful = (0..n).all(|g| g == id || data.exps[g] != identity_matrix);
    Ok(GroupModel {
        name: format!("semidirect:{r}:{n}"),
        presentation,
        comult: Comultiplication { images },
        identity: IdentitySource::Counit(counit),
        layout: None,
        rank_filter: None,
        tits_weyl: Some(faithful),
        expected: Expected { rank: Some(r), weyl_order: Some(n), points: None },
    })
}

/// The non-standard torus `F1[S, T^{±1}] // ⟨S ≡ 1 + 1⟩`.
pub fn nonstandard_torus() -> Result<GroupModel> {
    let names = vec!["S".to_string(), "T".to_string()];
    let rel = Relation::new(vec![Monomial::var(2, 0)], vec![Monomial::one(2), Monomial::one(2)]);
    let presentation = Presentation::new(names, GenSet::from_indices([1]), 1, vec![rel])?;
    Ok(GroupModel {
        name: "nstorus".into(),
        presentation,
        comult: Comultiplication {
            images: vec![
                vec![TensorTerm { left: vec![0], right: vec![] }],
                vec![TensorTerm { left: vec![1], right: vec![1] }],
            ],
        },
        identity: IdentitySource::Declared(GenSet::from_indices([0, 1])),
        layout: None,
        rank_filter: None,
        tits_weyl: None,
        expected: Expected { rank: Some(1), weyl_order: Some(1), points: Some(2) },
    })
}

/// Product model `G × H` on the tensor product of presentations.
pub fn product(a: &GroupModel, b: &GroupModel) -> Result<GroupModel> {
    let presentation = crate::blueprint::tensor(&a.presentation, &b.presentation, None)?;
    let off = a.presentation.ngens();
    let shift = |v: &[usize]| v.iter().map(|&g| g + off).collect::<Vec<_>>();
    let mut images = a.comult.images.clone();
    images.extend(
        b.comult
            .images
            .iter()
            .map(|img| img.iter().map(|t| TensorTerm { left: shift(&t.left), right: shift(&t.right) }).collect()),
    );
    let identity = match (&a.identity, &b.identity) {
        (IdentitySource::Counit(x), IdentitySource::Counit(y)) => {
            IdentitySource::Counit(x.iter().chain(y.iter()).copied().collect())
        }
        _ => IdentitySource::Declared(a.identity.nonzero().union(GenSet(b.identity.nonzero().0 << off))),
    };
    let add = |x: Option<usize>, y: Option<usize>| x.zip(y).map(|(x, y)| x + y);
    Ok(GroupModel {
        name: format!("{}*{}", a.name, b.name),
        presentation,
        comult: Comultiplication { images },
        identity,
        layout: None,
        rank_filter: None,
        tits_weyl: None,
        expected: Expected {
            rank: add(a.expected.rank, b.expected.rank),
            weyl_order: a.expected.weyl_order.zip(b.expected.weyl_order).map(|(x, y)| x * y),
            points: None,
        },
    })
}

/// Resolves a catalog selector such as `sl:3`, `parabolic:3:1,2` or `nstorus`.
///
/// `const:` and `semidirect:` take a JSON file path; `const:zN` builds a cyclic group.
pub fn from_selector(sel: &str) -> Result<GroupModel> {
    let parts: Vec<&str> = sel.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::UnknownModel(sel.to_string()));
    let flag = |s: &str| -> Result<Vec<usize>> { s.split(',').map(num).collect() };
    match parts.as_slice() {
        ["sl", n] => sl(num(n)?),
        ["gl", n] => gl(num(n)?),
        ["sp", n] => sp(num(n)?),
        ["so", n] => so(num(n)?),
        ["o", n] => o(num(n)?),
        ["torus", r] => torus(num(r)?),
        ["parabolic", n, f] => parabolic(num(n)?, &flag(f)?),
        ["unipotent", n, f] => unipotent(num(n)?, &flag(f)?),
        ["nstorus"] => nonstandard_torus(),
        ["psl2-conj"] => crate::relations::psl2_conj(),
        ["psl2-adj"] => crate::relations::psl2_adjoint(),
        ["const", rest @ ..] if !rest.is_empty() => {
            let arg = rest.join(":");
            if let Some(k) = arg.strip_prefix('z').and_then(|k| k.parse::<usize>().ok()) {
                return constant_group(&GroupTable::cyclic(k));
            }
            let text = std::fs::read_to_string(&arg).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
            let t: GroupTable = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
            constant_group(&t)
        }
        ["semidirect", rest @ ..] if !rest.is_empty() => {
            let arg = rest.join(":");
            let text = std::fs::read_to_string(&arg).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
            let d: SemidirectData = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
            semidirect(&d)
        }
        _ => Err(Error::UnknownModel(sel.to_string())),
    }
}

/// `G_m ⋊ Z/2` with the inversion action.
pub fn inversion_semidirect() -> SemidirectData {
    SemidirectData { rank: 1, group: GroupTable::cyclic(2), exps: vec![vec![vec![1]], vec![vec![-1]]] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_shape() {
        let g = sl(2).unwrap();
        assert_eq!(g.presentation.names, ["T1", "T2", "T3", "T4"]);
        assert_eq!(g.presentation.relations.len(), 1);
        assert_eq!(g.presentation.relations[0].render(&g.presentation.names), "1 + T2*T3 ≡ T1*T4");
        assert_eq!(g.comult.images[0].len(), 2);
        assert_eq!(g.identity.nonzero(), GenSet::from_indices([0, 3]));
    }

    #[test]
    fn sl3_leibniz() {
        let g = sl(3).unwrap();
        let r = &g.presentation.relations[0];
        assert_eq!(r.lhs.len() + r.rhs.len(), 7);
    }

    #[test]
    fn permutation_parity() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps.iter().filter(|(_, odd)| *odd).count(), 3);
    }

    #[test]
    fn unipotent_is_free() {
        let u = unipotent(3, &[1, 1, 1]).unwrap();
        assert_eq!(u.presentation.ngens(), 3);
        assert!(u.presentation.relations.is_empty());
    }

    #[test]
    fn bad_tables() {
        assert!(GroupTable { table: vec![vec![0, 0], vec![0, 1]] }.validate().is_err());
        assert!(from_selector("foo:1").is_err());
        let bad = SemidirectData { rank: 1, group: GroupTable::cyclic(2), exps: vec![vec![vec![1]], vec![vec![2]]] };
        assert!(semidirect(&bad).is_err());
    }
}
