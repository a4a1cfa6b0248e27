//! Exhaustive census of scalings on small powerset algebras, up to
//! isomorphism.
//!
//! Two scalings are isomorphic when a permutation of the atoms carries one
//! onto the other followed by an order isomorphism of the images. Since the
//! relative complements of a scale are read off the algebra, such a map
//! preserves them automatically. The canonical encoding of a scaling is the
//! least, over all atom permutations, of the table of relations between
//! pairs of elements.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{Algebra, Mask};
use crate::scaling::{Rel, Scaling, StrictOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("census for {n} atoms with this filter is not supported")]
    UnsupportedSize { n: usize },
}

/// Which scalings to enumerate. `one_to_one: None` keeps both kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CensusFilter {
    pub one_to_one: Option<bool>,
    pub linear_only: bool,
}

impl CensusFilter {
    pub const ALL: Self = Self {
        one_to_one: None,
        linear_only: false,
    };
    pub const ONE_TO_ONE_LINEAR: Self = Self {
        one_to_one: Some(true),
        linear_only: true,
    };

    fn admits(&self, one_to_one: bool, linear: bool) -> bool {
        self.one_to_one.is_none_or(|o| o == one_to_one) && (linear || !self.linear_only)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CensusCounts {
    pub one_to_one_total: usize,
    pub one_to_one_linear: usize,
    pub many_to_one_total: usize,
    pub many_to_one_linear: usize,
}

impl CensusCounts {
    pub fn total(&self) -> usize {
        self.one_to_one_total + self.many_to_one_total
    }

    fn record(&mut self, one_to_one: bool, linear: bool) {
        match (one_to_one, linear) {
            (true, l) => {
                self.one_to_one_total += 1;
                self.one_to_one_linear += usize::from(l);
            }
            (false, l) => {
                self.many_to_one_total += 1;
                self.many_to_one_linear += usize::from(l);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub encoding: Vec<u8>,
    pub scaling: Scaling,
}

#[derive(Debug, Clone)]
pub struct CensusResult {
    pub n: usize,
    pub filter: CensusFilter,
    /// Counts up to atom permutation and image isomorphism. Categories
    /// excluded by the filter are zero.
    pub counts: CensusCounts,
    /// Counts up to image isomorphism alone, with atoms kept fixed.
    pub labelled_counts: CensusCounts,
    /// Canonical representatives in ascending order of encoding.
    pub representatives: Vec<CensusEntry>,
}

fn rel_code(r: Rel) -> u8 {
    match r {
        Rel::Lt => 0,
        Rel::Eq => 1,
        Rel::Gt => 2,
        Rel::Incomparable => 3,
    }
}

fn permute_bits(x: Mask, perm: &[usize]) -> Mask {
    perm.iter()
        .enumerate()
        .filter(|&(i, _)| x & (1 << i) != 0)
        .fold(0, |acc, (_, &p)| acc | (1 << p))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                go(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    go(n, &mut current, &mut used, &mut out);
    out
}

/// Relations between every pair `x < y` of elements after renaming atom
/// `i` to `perm[i]`.
fn encoding_under(s: &Scaling, perm: &[usize]) -> Vec<u8> {
    let size = s.algebra().size();
    let mut inverse = vec![0 as Mask; size];
    for x in 0..size as Mask {
        inverse[permute_bits(x, perm) as usize] = x;
    }
    let mut out = Vec::with_capacity(size * (size - 1) / 2);
    for x in 0..size {
        for y in x + 1..size {
            out.push(rel_code(s.rel_bits(inverse[x], inverse[y])));
        }
    }
    out
}

/// The least encoding over all atom permutations, with the permutation
/// attaining it.
pub fn canonical_encoding(s: &Scaling) -> (Vec<u8>, Vec<usize>) {
    permutations(s.algebra().atom_count())
        .into_iter()
        .map(|p| (encoding_under(s, &p), p))
        .min()
        .expect("at least one permutation")
}

/// Encoding with the atoms kept in place.
pub fn labelled_encoding(s: &Scaling) -> Vec<u8> {
    let n = s.algebra().atom_count();
    encoding_under(s, &(0..n).collect::<Vec<_>>())
}

/// The scaling obtained by renaming atom `i` to `perm[i]`.
pub fn relabel(s: &Scaling, perm: &[usize]) -> Scaling {
    let size = s.algebra().size();
    let mut assignment = vec![0; size];
    for x in 0..size as Mask {
        assignment[permute_bits(x, perm) as usize] = s.class_of_bits(x).0;
    }
    Scaling::build(s.algebra(), &assignment, &s.order().pairs(), None)
        .expect("relabelling preserves the axioms")
}

pub fn is_isomorphic(s: &Scaling, t: &Scaling) -> bool {
    s.algebra().atom_count() == t.algebra().atom_count()
        && canonical_encoding(s).0 == canonical_encoding(t).0
}

pub fn enumerate_scalings(n: usize, filter: CensusFilter) -> Result<CensusResult, CensusError> {
    let alg = Algebra::letters(n).map_err(|_| CensusError::UnsupportedSize { n })?;
    let found = match n {
        2 | 3 => all_scalings(&alg),
        4 if filter == CensusFilter::ONE_TO_ONE_LINEAR => linear_one_to_one(&alg),
        _ => return Err(CensusError::UnsupportedSize { n }),
    };
    let mut canonical: BTreeMap<Vec<u8>, Scaling> = BTreeMap::new();
    let mut labelled = CensusCounts::default();
    for s in found {
        let (one_to_one, linear) = (s.is_one_to_one(), s.is_linear());
        if !filter.admits(one_to_one, linear) {
            continue;
        }
        labelled.record(one_to_one, linear);
        let (code, perm) = canonical_encoding(&s);
        canonical.entry(code).or_insert_with(|| relabel(&s, &perm));
    }
    let mut counts = CensusCounts::default();
    let representatives: Vec<CensusEntry> = canonical
        .into_iter()
        .map(|(encoding, scaling)| {
            counts.record(scaling.is_one_to_one(), scaling.is_linear());
            CensusEntry { encoding, scaling }
        })
        .collect();
    Ok(CensusResult {
        n,
        filter,
        counts,
        labelled_counts: labelled,
        representatives,
    })
}

/// Every scaling on `alg`, one per (assignment, order) pair with classes
/// numbered by first occurrence.
fn all_scalings(alg: &Algebra) -> Vec<Scaling> {
    let size = alg.size();
    let full = alg.full_mask();
    let middle: Vec<Mask> = (1..full).collect();
    let mut out = Vec::new();
    let mut fibers: Vec<Vec<Mask>> = Vec::new();
    partitions(&middle, 0, &mut fibers, &mut |fibers| {
        let k = fibers.len() + 2;
        let mut assignment = vec![0usize; size];
        assignment[full as usize] = k - 1;
        for (i, fiber) in fibers.iter().enumerate() {
            for &x in fiber {
                assignment[x as usize] = i + 1;
            }
        }
        let mut forced = Vec::new();
        for x in 0..=full {
            for t in 0..alg.atom_count() {
                if x & (1 << t) == 0 {
                    forced.push((assignment[x as usize], assignment[(x | (1 << t)) as usize]));
                }
            }
        }
        let Ok(base) = StrictOrder::closure_of(k, &forced) else {
            return;
        };
        let open: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| base.rel(i, j) == Rel::Incomparable)
            .collect();
        orders(&base, &open, 0, &mut Vec::new(), &mut |order| {
            if let Ok(s) = Scaling::build(alg, &assignment, &order.pairs(), None) {
                out.push(s);
            }
        });
    });
    out
}

/// Set partitions of `items` into antichains under inclusion.
fn partitions(
    items: &[Mask],
    next: usize,
    fibers: &mut Vec<Vec<Mask>>,
    emit: &mut dyn FnMut(&[Vec<Mask>]),
) {
    if next == items.len() {
        emit(fibers);
        return;
    }
    let x = items[next];
    for i in 0..fibers.len() {
        if fibers[i].iter().all(|&y| x & y != x && x & y != y) {
            fibers[i].push(x);
            partitions(items, next + 1, fibers, emit);
            fibers[i].pop();
        }
    }
    fibers.push(vec![x]);
    partitions(items, next + 1, fibers, emit);
    fibers.pop();
}

/// Strict orders extending `order`, deciding each open pair as `<`, `>`
/// or incomparable.
fn orders(
    order: &StrictOrder,
    open: &[(usize, usize)],
    next: usize,
    apart: &mut Vec<(usize, usize)>,
    emit: &mut dyn FnMut(&StrictOrder),
) {
    if apart
        .iter()
        .any(|&(i, j)| order.rel(i, j) != Rel::Incomparable)
    {
        return;
    }
    let Some(&(i, j)) = open[next..]
        .iter()
        .find(|&&(i, j)| order.rel(i, j) == Rel::Incomparable)
    else {
        emit(order);
        return;
    };
    let after = next
        + open[next..]
            .iter()
            .position(|&p| p == (i, j))
            .expect("found above")
        + 1;
    for (a, b) in [(i, j), (j, i)] {
        let mut extended = order.clone();
        extended.set_lt(a, b);
        extended.close();
        orders(&extended, open, after, apart, emit);
    }
    apart.push((i, j));
    orders(order, open, after, apart, emit);
    apart.pop();
}

/// One-to-one scalings with a linearly ordered image: linear extensions
/// of inclusion, pruned by complement reversal on every interval.
fn linear_one_to_one(alg: &Algebra) -> Vec<Scaling> {
    let size = alg.size();
    let mut pos: Vec<Option<usize>> = vec![None; size];
    let mut seq: Vec<Mask> = Vec::with_capacity(size);
    let mut out = Vec::new();
    extend_linear(alg, &mut seq, &mut pos, &mut out);
    out
}

fn extend_linear(
    alg: &Algebra,
    seq: &mut Vec<Mask>,
    pos: &mut [Option<usize>],
    out: &mut Vec<Scaling>,
) {
    let size = alg.size();
    if seq.len() == size {
        let assignment: Vec<usize> = (0..size).collect();
        let chain: Vec<(usize, usize)> = seq
            .windows(2)
            .map(|w| (w[0] as usize, w[1] as usize))
            .collect();
        if let Ok(s) = Scaling::build(alg, &assignment, &chain, None) {
            out.push(s);
        }
        return;
    }
    for y in 0..size as Mask {
        let ready = pos[y as usize].is_none()
            && alg
                .members(y)
                .all(|t| pos[(y & !(1 << t)) as usize].is_some());
        if !ready {
            continue;
        }
        pos[y as usize] = Some(seq.len());
        seq.push(y);
        if reversal_consistent(alg, seq, pos) {
            extend_linear(alg, seq, pos, out);
        }
        seq.pop();
        pos[y as usize] = None;
    }
}

/// With `y` just placed above every earlier element `x`, each relative
/// complement of `y` must end up below the matching one of `x`, so it
/// must already be placed whenever that of `x` is.
fn reversal_consistent(alg: &Algebra, seq: &[Mask], pos: &[Option<usize>]) -> bool {
    let full = alg.full_mask();
    let y = *seq.last().expect("nonempty");
    seq[..seq.len() - 1].iter().all(|&x| {
        let lower = x & y;
        let upper = x | y;
        crate::algebra::submasks(lower).all(|a| {
            crate::algebra::submasks(full & !upper).all(|extra| {
                let b = upper | extra;
                let rx = a | (b & !x);
                let ry = a | (b & !y);
                match (pos[rx as usize], pos[ry as usize]) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(px), Some(py)) => py < px,
                }
            })
        })
    })
}
