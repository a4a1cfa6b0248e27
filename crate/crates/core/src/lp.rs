//! Exact rational linear programming: a dense two-phase simplex with
//! Bland's pivoting rule, so it always terminates and never rounds.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// One constraint `coeffs · x  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<Q>,
    pub sense: Sense,
    pub rhs: Q,
}

/// Maximize `objective · x` subject to `rows`, with `x ≥ 0` except for
/// the variables flagged in `free`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<Q>,
    pub rows: Vec<Row>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![Q::zero(); n_vars],
            rows: Vec::new(),
            free: vec![false; n_vars],
        }
    }

    pub fn push(&mut self, coeffs: Vec<Q>, sense: Sense, rhs: Q) {
        assert_eq!(coeffs.len(), self.n_vars, "row length must match variables");
        self.rows.push(Row { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: original (nonnegative parts), negative parts of
        // free variables, slacks/surpluses, artificials.
        let n = self.n_vars;
        let free_cols: Vec<usize> = (0..n).filter(|&j| self.free[j]).collect();
        let m = self.rows.len();
        let mut rows: Vec<(Vec<Q>, Sense, Q)> = self
            .rows
            .iter()
            .map(|r| {
                let mut coeffs = r.coeffs.clone();
                coeffs.extend(free_cols.iter().map(|&j| -&r.coeffs[j]));
                if r.rhs.is_negative() {
                    let sense = match r.sense {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    (coeffs.into_iter().map(|c| -c).collect(), sense, -&r.rhs)
                } else {
                    (coeffs, r.sense, r.rhs.clone())
                }
            })
            .collect();
        let base = n + free_cols.len();
        let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
        let width = base + n_slack + n_art;
        let mut tab = vec![vec![Q::zero(); width + 1]; m];
        let mut basis = vec![0usize; m];
        let (mut s, mut a) = (base, base + n_slack);
        for (i, (coeffs, sense, rhs)) in rows.iter_mut().enumerate() {
            for (j, c) in coeffs.iter().enumerate() {
                tab[i][j] = c.clone();
            }
            tab[i][width] = rhs.clone();
            match sense {
                Sense::Le => {
                    tab[i][s] = Q::one();
                    basis[i] = s;
                    s += 1;
                }
                Sense::Ge => {
                    tab[i][s] = -Q::one();
                    s += 1;
                    tab[i][a] = Q::one();
                    basis[i] = a;
                    a += 1;
                }
                Sense::Eq => {
                    tab[i][a] = Q::one();
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        let art_start = base + n_slack;
        let mut t = Tableau { tab, basis, width };

        if n_art > 0 {
            // Phase 1: maximize −Σ artificials.
            let mut cost = vec![Q::zero(); width];
            for c in cost.iter_mut().skip(art_start) {
                *c = -Q::one();
            }
            if t.optimize(&cost, width) != Status::Optimal {
                unreachable!("phase one is bounded");
            }
            if t.objective_value(&cost).is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis where possible.
            let mut i = 0;
            while i < t.tab.len() {
                if t.basis[i] >= art_start {
                    match (0..art_start).find(|&j| !t.tab[i][j].is_zero()) {
                        Some(j) => {
                            t.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            t.tab.remove(i);
                            t.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut cost = vec![Q::zero(); width];
        cost[..n].clone_from_slice(&self.objective[..n]);
        for (k, &j) in free_cols.iter().enumerate() {
            cost[n + k] = -&self.objective[j];
        }
        match t.optimize(&cost, art_start) {
            Status::Unbounded => LpOutcome::Unbounded,
            Status::Optimal => {
                let mut full = vec![Q::zero(); width];
                for (i, &b) in t.basis.iter().enumerate() {
                    full[b] = t.tab[i][width].clone();
                }
                let mut x: Vec<Q> = full[..n].to_vec();
                for (k, &j) in free_cols.iter().enumerate() {
                    x[j] = &x[j] - &full[n + k];
                }
                let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
                LpOutcome::Optimal { x, value }
            }
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Status {
    Optimal,
    Unbounded,
}

struct Tableau {
    tab: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Q::one() / &self.tab[r][c];
        for v in self.tab[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row = self.tab[r].clone();
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = &*v - &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn objective_value(&self, cost: &[Q]) -> Q {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| &cost[b] * &self.tab[i][self.width])
            .sum()
    }

    /// Maximizes `cost` using only columns below `limit` as entering
    /// candidates.
    fn optimize(&mut self, cost: &[Q], limit: usize) -> Status {
        loop {
            // Reduced cost of column j: cost_j − Σ_i cost_{basis i} tab[i][j].
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.tab[i][j].is_zero() {
                        reduced -= &cost[b] * &self.tab[i][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(c) = entering else {
                return Status::Optimal;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.tab.len() {
                let a = &self.tab[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.tab[i][self.width] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Status::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves the square system `a x = b` exactly; `None` if singular.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = Q::one() / &m[col][col];
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot) {
                *v = &*v - &f * p;
            }
        }
    }
    Some(
        m.into_iter()
            .map(|mut r| r.pop().expect("augmented column"))
            .collect(),
    )
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (v, p) in row.iter_mut().zip(&pivot) {
                *v = &*v - &f * p;
            }
        }
        r += 1;
    }
    r
}
