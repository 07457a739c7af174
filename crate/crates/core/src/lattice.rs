//! Integer lattices: Smith normal form, echelon bases and canonical reduction.

use serde::{Deserialize, Serialize};

/// Result of a Smith normal form computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snf {
    /// Nonzero elementary divisors `d1 | d2 | …`, all positive.
    pub divisors: Vec<i64>,
    /// Number of nonzero divisors.
    pub rank: usize,
}

impl Snf {
    /// Free rank of the cokernel `Z^cols / rowspace`.
    pub fn free_rank(&self, cols: usize) -> usize {
        cols - self.rank
    }

    /// Nontrivial elementary divisors (the torsion invariants of the cokernel).
    pub fn torsion(&self) -> Vec<i64> {
        self.divisors.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// Smith normal form of an integer matrix given by rows.
pub fn smith_normal_form(rows: &[Vec<i64>]) -> Snf {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let nr = a.len();
    let nc = a.first().map_or(0, |r| r.len());
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < nr && t < nc {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..nr {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    for j in t..nc {
                        a[i][j] -= q * a[t][j];
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..nc {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                // divisibility: fold in any entry of the block not divisible by the pivot
                let p = a[t][t];
                let mut fix = None;
                'scan: for i in t + 1..nr {
                    for j in t + 1..nc {
                        if a[i][j] % p != 0 {
                            fix = Some(i);
                            break 'scan;
                        }
                    }
                }
                match fix {
                    Some(i) => {
                        for j in t..nc {
                            let v = a[i][j];
                            a[t][j] += v;
                        }
                    }
                    None => break,
                }
            }
        }
        divisors.push(a[t][t].abs() as i64);
        t += 1;
    }
    let rank = divisors.len();
    Snf { divisors, rank }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A sublattice of `Z^d` held in row echelon form (positive pivots).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EchelonLattice {
    dim: usize,
    rows: Vec<Vec<i128>>,
}

fn lead(v: &[i128]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

impl EchelonLattice {
    /// The zero lattice in `Z^dim`.
    pub fn new(dim: usize) -> Self {
        EchelonLattice { dim, rows: Vec::new() }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of the lattice.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a generator.
    pub fn insert(&mut self, v: &[i64]) {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        while let Some(c) = lead(&v) {
            match self.rows.iter().position(|r| lead(r) == Some(c)) {
                Some(k) => {
                    let r = self.rows[k].clone();
                    let (g, x, y) = egcd(r[c], v[c]);
                    let (rc, vc) = (r[c] / g, v[c] / g);
                    let nr: Vec<i128> = r.iter().zip(&v).map(|(a, b)| x * a + y * b).collect();
                    let nv: Vec<i128> = r.iter().zip(&v).map(|(a, b)| rc * b - vc * a).collect();
                    self.rows[k] = nr;
                    v = nv;
                }
                None => {
                    if v[c] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.rows.push(v);
                    self.rows.sort_by_key(|r| lead(r));
                    return;
                }
            }
        }
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for r in &self.rows {
            let c = lead(r).expect("rows are nonzero");
            let q = w[c].div_euclid(r[c]);
            if q != 0 {
                for (a, b) in w.iter_mut().zip(r) {
                    *a -= q * b;
                }
            }
        }
        w.into_iter().map(|x| x as i64).collect()
    }

    /// Membership test.
    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

/// Rank over Q of a set of integer rows.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut span = RationalSpan::default();
    rows.iter().filter(|r| span.insert(r)).count()
}

/// Echelon basis of a subspace of `Q^d`, kept as primitive integer rows.
#[derive(Clone, Debug, Default)]
pub struct RationalSpan {
    rows: Vec<(usize, Vec<i128>)>,
}

impl RationalSpan {
    /// Dimension.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduced(&self, v: &[i64]) -> Vec<i128> {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (p, r) in &self.rows {
            let c = v[*p];
            if c != 0 {
                let (a, b) = (r[*p], c);
                v.iter_mut().zip(r).for_each(|(x, y)| *x = a * *x - b * y);
                let g = v.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                if g > 1 {
                    v.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        v
    }

    /// True when `v` lies in the span.
    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduced(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let r = self.reduced(v);
        match r.iter().position(|&x| x != 0) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&[vec![1, 1]]);
        assert_eq!((s.rank, s.free_rank(2)), (1, 1));
        let s = smith_normal_form(&[vec![0, 0, 0]]);
        assert_eq!(s.free_rank(3), 3);
        let s = smith_normal_form(&[vec![2]]);
        assert_eq!(s.torsion(), vec![2]);
        let s = smith_normal_form(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(s.divisors, vec![2, 6, 12]);
    }

    #[test]
    fn echelon_membership() {
        let mut l = EchelonLattice::new(3);
        l.insert(&[2, 0, 0]);
        l.insert(&[1, 1, 0]);
        assert!(l.contains(&[0, 2, 0]));
        assert!(!l.contains(&[0, 1, 0]));
        assert!(l.contains(&[3, 1, 0]));
        assert_eq!(l.reduce(&[5, 5, 7]), l.reduce(&[1, 1, 7]));
    }
}
