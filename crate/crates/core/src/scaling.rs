//! Basic scalings: maps from a powerset algebra onto a strictly partially
//! ordered set of classes that are strictly increasing and preserve relative
//! complementation on every interval.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{relative_complement_bits, subset, Algebra, AlgebraError, Element, Mask};

/// Identifier of an equivalence class (a member of the scale).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub usize);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Relationship between two members of a partially ordered set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Eq,
    Gt,
    Incomparable,
}

impl Rel {
    pub fn flip(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Gt => Rel::Lt,
            other => other,
        }
    }
}

/// Strict partial order on `0..k`, stored as a dense `k × k` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrictOrder {
    k: usize,
    lt: Vec<bool>,
}

impl StrictOrder {
    pub fn empty(k: usize) -> Self {
        Self {
            k,
            lt: vec![false; k * k],
        }
    }

    /// Transitive closure of `pairs` (each `(lesser, greater)`).
    ///
    /// Returns `Err(i)` with a class lying on a cycle if the closure is not
    /// irreflexive.
    pub fn closure_of(k: usize, pairs: &[(usize, usize)]) -> Result<Self, usize> {
        let mut order = Self::empty(k);
        for &(a, b) in pairs {
            order.lt[a * k + b] = true;
        }
        order.close();
        match (0..k).find(|&i| order.lt[i * k + i]) {
            Some(i) => Err(i),
            None => Ok(order),
        }
    }

    /// Warshall closure in place.
    pub fn close(&mut self) {
        let k = self.k;
        for m in 0..k {
            for i in 0..k {
                if self.lt[i * k + m] {
                    for j in 0..k {
                        if self.lt[m * k + j] {
                            self.lt[i * k + j] = true;
                        }
                    }
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a * self.k + b]
    }

    #[inline]
    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b)
    }

    #[inline]
    pub fn rel(&self, a: usize, b: usize) -> Rel {
        if a == b {
            Rel::Eq
        } else if self.lt(a, b) {
            Rel::Lt
        } else if self.lt(b, a) {
            Rel::Gt
        } else {
            Rel::Incomparable
        }
    }

    pub fn set_lt(&mut self, a: usize, b: usize) {
        self.lt[a * self.k + b] = true;
    }

    pub fn is_linear(&self) -> bool {
        (0..self.k).all(|a| (0..self.k).all(|b| self.rel(a, b) != Rel::Incomparable))
    }

    /// All `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.k {
            for b in 0..self.k {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Hasse diagram edges.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.pairs()
            .into_iter()
            .filter(|&(a, b)| !(0..self.k).any(|m| self.lt(a, m) && self.lt(m, b)))
            .collect()
    }

    /// Reindexes so that old class `perm[i]` becomes class `i`.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::empty(self.k);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                out.lt[i * self.k + j] = self.lt(pi, pj);
            }
        }
        out
    }
}

const GREEK: [&str; 24] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi",
    "psi", "omega",
];

const GREEK_UNICODE: [&str; 24] = [
    "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ", "ν", "ξ", "ο", "π", "ρ", "σ", "τ",
    "υ", "φ", "χ", "ψ", "ω",
];

/// Default class names: `0`, greek letters in order, `1`.
///
/// Beyond 26 classes the interior ones are named `c1`, `c2`, ….
pub fn default_class_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            if i == 0 {
                "0".to_string()
            } else if i + 1 == k {
                "1".to_string()
            } else if k <= GREEK.len() + 2 {
                GREEK[i - 1].to_string()
            } else {
                format!("c{i}")
            }
        })
        .collect()
}

/// Unicode rendering of an ASCII greek letter name; other names unchanged.
pub fn unicode_name(name: &str) -> &str {
    GREEK
        .iter()
        .position(|g| *g == name)
        .map(|i| GREEK_UNICODE[i])
        .unwrap_or(name)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("class assignment covers {got} elements, algebra has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("class ids must be exactly 0..k; id {0} is unused")]
    UnusedClass(usize),
    #[error("order pair ({0}, {1}) references a class outside 0..{2}")]
    OrderOutOfRange(usize, usize, usize),
    #[error("the order has a cycle through class {0}")]
    CycleInOrder(usize),
    #[error("{0}")]
    AxiomViolation(AxiomViolation),
    #[error("expected {expected} class names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("no measures given")]
    NoMeasures,
    #[error("measure {index} has {got} atom masses, algebra has {expected} atoms")]
    MeasureLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("measure {index} gives atom {atom} a nonpositive mass")]
    NonPositiveMass { index: usize, atom: usize },
}

/// A single failed instance of the scaling axioms, as raw bit patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `x < y` in the algebra but `ρ(x) < ρ(y)` fails.
    NotStrictlyIncreasing { x: Mask, y: Mask },
    /// `x, y ∈ [a, b]`, `ρ(x) < ρ(y)` but the relative complements are not
    /// ordered the other way.
    ComplementNotReversed { a: Mask, b: Mask, x: Mask, y: Mask },
    /// `x, y ∈ [a, b]`, `ρ(x) = ρ(y)` but the relative complements differ.
    ComplementNotEqual { a: Mask, b: Mask, x: Mask, y: Mask },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomViolation::NotStrictlyIncreasing { x, y } => {
                write!(f, "axiom (a) violated: {x:#b} < {y:#b} but images not strictly ordered")
            }
            AxiomViolation::ComplementNotReversed { a, b, x, y } => write!(
                f,
                "axiom (b) violated: in [{a:#b},{b:#b}], rho({x:#b}) < rho({y:#b}) but relative complements not reversed"
            ),
            AxiomViolation::ComplementNotEqual { a, b, x, y } => write!(
                f,
                "axiom (b) violated: in [{a:#b},{b:#b}], rho({x:#b}) = rho({y:#b}) but relative complements differ"
            ),
        }
    }
}

/// Outcome of [`Scaling::verify_axioms`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Above this atom count the interval-by-interval check (`6^n` instances) is
/// replaced by the equivalent translation-plus-complement check.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 8;

/// A verified basic scaling on a powerset algebra.
///
/// Class ids are numbered along a topological order of the scale (ties
/// broken by the smallest member's bit pattern), so the class of `0` is
/// always `ClassId(0)` and the class of `1` is always the last one.
#[derive(Debug, Clone)]
pub struct Scaling {
    algebra: Algebra,
    class_of: Vec<usize>,
    members: Vec<Vec<Mask>>,
    order: StrictOrder,
    names: Vec<String>,
}

impl Scaling {
    /// Builds and verifies a scaling.
    ///
    /// `assignment[bits]` is the class of the element with that bit
    /// pattern; `order` lists `(lesser, greater)` class pairs whose
    /// transitive closure is taken. Optional `names` label the classes by
    /// their input ids.
    pub fn build(
        algebra: &Algebra,
        assignment: &[usize],
        order: &[(usize, usize)],
        names: Option<Vec<String>>,
    ) -> Result<Self, ScalingError> {
        let scaling = Self::assemble(algebra, assignment, order, names)?;
        let report = scaling.verify_axioms();
        match report.violations.first() {
            Some(v) => Err(ScalingError::AxiomViolation(*v)),
            None => Ok(scaling),
        }
    }

    /// Like [`Scaling::build`] but without the axiom check. The result may
    /// not be a scaling; callers are expected to inspect
    /// [`Scaling::verify_axioms`] themselves.
    pub fn assemble(
        algebra: &Algebra,
        assignment: &[usize],
        order: &[(usize, usize)],
        names: Option<Vec<String>>,
    ) -> Result<Self, ScalingError> {
        let size = algebra.size();
        if assignment.len() != size {
            return Err(ScalingError::AssignmentLength {
                expected: size,
                got: assignment.len(),
            });
        }
        let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<Mask>> = vec![Vec::new(); k];
        for (bits, &c) in assignment.iter().enumerate() {
            members[c].push(bits as Mask);
        }
        if let Some(unused) = members.iter().position(Vec::is_empty) {
            return Err(ScalingError::UnusedClass(unused));
        }
        for &(a, b) in order {
            if a >= k || b >= k {
                return Err(ScalingError::OrderOutOfRange(a, b, k));
            }
        }
        if let Some(names) = &names {
            if names.len() != k {
                return Err(ScalingError::NameCount {
                    expected: k,
                    got: names.len(),
                });
            }
        }
        let order = StrictOrder::closure_of(k, order).map_err(ScalingError::CycleInOrder)?;

        // Topological numbering, ties broken by smallest member.
        let mut placed = vec![false; k];
        let mut perm = Vec::with_capacity(k);
        for _ in 0..k {
            let next = (0..k)
                .filter(|&c| !placed[c] && (0..k).all(|p| placed[p] || !order.lt(p, c)))
                .min_by_key(|&c| members[c][0])
                .expect("acyclic order has a minimal class");
            placed[next] = true;
            perm.push(next);
        }
        let mut new_id = vec![0; k];
        for (i, &old) in perm.iter().enumerate() {
            new_id[old] = i;
        }
        let class_of: Vec<usize> = assignment.iter().map(|&c| new_id[c]).collect();
        let members: Vec<Vec<Mask>> = perm.iter().map(|&old| members[old].clone()).collect();
        let order = order.permuted(&perm);
        let names = match names {
            Some(names) => perm.iter().map(|&old| names[old].clone()).collect(),
            None => default_class_names(k),
        };
        Ok(Self {
            algebra: algebra.clone(),
            class_of,
            members,
            order,
            names,
        })
    }

    /// The scaling induced by a finite (hence convex-hull) family of
    /// strictly positive measures: `x ~ y` iff every measure agrees on
    /// them, `ρ(x) < ρ(y)` iff every measure has `μ(x) ≤ μ(y)` and one has
    /// strict inequality.
    pub fn from_measures(
        algebra: &Algebra,
        measures: &[Vec<BigRational>],
    ) -> Result<Self, ScalingError> {
        Self::from_measure_family(algebra, measures, true)
    }

    /// Like [`Scaling::from_measures`] for the corners of the closure of a
    /// convex set of positive measures, where masses may be zero. Comparing
    /// on the corners gives the same order as comparing on the open set.
    pub fn from_corner_measures(
        algebra: &Algebra,
        corners: &[Vec<BigRational>],
    ) -> Result<Self, ScalingError> {
        Self::from_measure_family(algebra, corners, false)
    }

    fn from_measure_family(
        algebra: &Algebra,
        measures: &[Vec<BigRational>],
        require_positive: bool,
    ) -> Result<Self, ScalingError> {
        if measures.is_empty() {
            return Err(ScalingError::NoMeasures);
        }
        let n = algebra.atom_count();
        for (index, m) in measures.iter().enumerate() {
            if m.len() != n {
                return Err(ScalingError::MeasureLength {
                    index,
                    expected: n,
                    got: m.len(),
                });
            }
            let bad = |v: &BigRational| v.is_negative() || (require_positive && v.is_zero());
            if let Some(atom) = m.iter().position(bad) {
                return Err(ScalingError::NonPositiveMass { index, atom });
            }
        }
        let size = algebra.size();
        let values: Vec<Vec<BigRational>> =
            measures.iter().map(|m| element_values(m, size)).collect();
        let mut ids: HashMap<Vec<&BigRational>, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut assignment = Vec::with_capacity(size);
        for bits in 0..size {
            let key: Vec<&BigRational> = values.iter().map(|v| &v[bits]).collect();
            let next = ids.len();
            let id = *ids.entry(key).or_insert_with(|| {
                reps.push(bits);
                next
            });
            assignment.push(id);
        }
        let mut pairs = Vec::new();
        for (i, &ri) in reps.iter().enumerate() {
            for (j, &rj) in reps.iter().enumerate() {
                if i == j {
                    continue;
                }
                let all_le = values.iter().all(|v| v[ri] <= v[rj]);
                let some_lt = values.iter().any(|v| v[ri] < v[rj]);
                if all_le && some_lt {
                    pairs.push((i, j));
                }
            }
        }
        Self::build(algebra, &assignment, &pairs, None)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    pub fn order(&self) -> &StrictOrder {
        &self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, c: ClassId) -> &str {
        &self.names[c.0]
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.names.iter().position(|n| n == name).map(ClassId)
    }

    /// Replaces the class names (indexed by canonical class id).
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, ScalingError> {
        if names.len() != self.class_count() {
            return Err(ScalingError::NameCount {
                expected: self.class_count(),
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn class_of(&self, x: Element) -> Result<ClassId, ScalingError> {
        if !self.algebra.contains(x) {
            return Err(AlgebraError::MixedAlgebras.into());
        }
        Ok(ClassId(self.class_of[x.bits() as usize]))
    }

    #[inline]
    pub fn class_of_bits(&self, bits: Mask) -> ClassId {
        ClassId(self.class_of[bits as usize])
    }

    pub fn assignment(&self) -> &[usize] {
        &self.class_of
    }

    /// Members of a class, ascending.
    pub fn members(&self, c: ClassId) -> &[Mask] {
        &self.members[c.0]
    }

    pub fn zero_class(&self) -> ClassId {
        ClassId(0)
    }

    pub fn one_class(&self) -> ClassId {
        ClassId(self.class_count() - 1)
    }

    #[inline]
    pub fn rel_bits(&self, x: Mask, y: Mask) -> Rel {
        self.order
            .rel(self.class_of[x as usize], self.class_of[y as usize])
    }

    pub fn rel(&self, x: Element, y: Element) -> Result<Rel, ScalingError> {
        Ok(self.order.rel(self.class_of(x)?.0, self.class_of(y)?.0))
    }

    pub fn is_one_to_one(&self) -> bool {
        self.class_count() == self.algebra.size()
    }

    pub fn is_linear(&self) -> bool {
        self.order.is_linear()
    }

    /// Checks both scaling axioms and lists every failed instance.
    ///
    /// Axiom (b) is checked interval by interval up to
    /// [`EXHAUSTIVE_AXIOM_LIMIT`] atoms and through
    /// [`Scaling::verify_axioms_reduced`] beyond that.
    pub fn verify_axioms(&self) -> AxiomReport {
        if self.algebra.atom_count() <= EXHAUSTIVE_AXIOM_LIMIT {
            self.verify_axioms_exhaustive()
        } else {
            self.verify_axioms_reduced()
        }
    }

    /// Axiom (a) on covering pairs, axiom (b) on every interval `[a, b]` and
    /// every `x, y ∈ [a, b]`, both the strict and the equality clause.
    pub fn verify_axioms_exhaustive(&self) -> AxiomReport {
        let mut violations = self.check_increasing();
        let full = self.algebra.full_mask();
        for b in 0..=full {
            for a in crate::algebra::submasks(b) {
                let free = b & !a;
                for xs in crate::algebra::submasks(free) {
                    let x = a | xs;
                    let cx = relative_complement_bits(x, a, b);
                    for ys in crate::algebra::submasks(free) {
                        let y = a | ys;
                        let cy = relative_complement_bits(y, a, b);
                        match self.rel_bits(x, y) {
                            Rel::Lt => {
                                if self.rel_bits(cx, cy) != Rel::Gt {
                                    violations.push(AxiomViolation::ComplementNotReversed {
                                        a,
                                        b,
                                        x,
                                        y,
                                    });
                                }
                            }
                            Rel::Eq if self.rel_bits(cx, cy) != Rel::Eq => {
                                violations.push(AxiomViolation::ComplementNotEqual { a, b, x, y });
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        AxiomReport { violations }
    }

    /// Equivalent form of axiom (b): relations between classes are
    /// invariant under adjoining a disjoint atom, and complementation on
    /// `[0, 1]` reverses them. Violations are reported as interval
    /// instances: a translation failure at `(x, y, t)` is the interval
    /// `[0, x ∨ y ∨ t]` instance on the pair that exposes it.
    pub fn verify_axioms_reduced(&self) -> AxiomReport {
        let mut violations = self.check_increasing();
        let full = self.algebra.full_mask();
        let n = self.algebra.atom_count();
        // Complement reversal on [0, 1].
        for x in 0..=full {
            for y in 0..=full {
                let (cx, cy) = (full & !x, full & !y);
                match self.rel_bits(x, y) {
                    Rel::Lt if self.rel_bits(cx, cy) != Rel::Gt => {
                        violations.push(AxiomViolation::ComplementNotReversed {
                            a: 0,
                            b: full,
                            x,
                            y,
                        })
                    }
                    Rel::Eq if self.rel_bits(cx, cy) != Rel::Eq => {
                        violations.push(AxiomViolation::ComplementNotEqual {
                            a: 0,
                            b: full,
                            x,
                            y,
                        })
                    }
                    _ => {}
                }
            }
        }
        // Translation invariance by a single atom.
        for t in 0..n {
            let bit = 1 << t;
            let rest = full & !bit;
            for x in crate::algebra::submasks(rest) {
                for y in crate::algebra::submasks(rest) {
                    let before = self.rel_bits(x, y);
                    let after = self.rel_bits(x | bit, y | bit);
                    if before == after {
                        continue;
                    }
                    // In [x∧y, x∨y∨t] the relative complements of x∨t and
                    // y∨t are y and x, and those of x and y are y∨t and x∨t.
                    let (a, b) = (x & y, x | y | bit);
                    let (u, v) = (x | bit, y | bit);
                    let v = match after {
                        Rel::Lt => AxiomViolation::ComplementNotReversed { a, b, x: u, y: v },
                        Rel::Gt => AxiomViolation::ComplementNotReversed { a, b, x: v, y: u },
                        Rel::Eq => AxiomViolation::ComplementNotEqual { a, b, x: u, y: v },
                        Rel::Incomparable => match before {
                            Rel::Lt => AxiomViolation::ComplementNotReversed { a, b, x, y },
                            Rel::Gt => AxiomViolation::ComplementNotReversed { a, b, x: y, y: x },
                            _ => AxiomViolation::ComplementNotEqual { a, b, x, y },
                        },
                    };
                    violations.push(v);
                }
            }
        }
        AxiomReport { violations }
    }

    fn check_increasing(&self) -> Vec<AxiomViolation> {
        let full = self.algebra.full_mask();
        let n = self.algebra.atom_count();
        let mut out = Vec::new();
        for x in 0..=full {
            for t in 0..n {
                let y = x | (1 << t);
                if y != x && self.rel_bits(x, y) != Rel::Lt {
                    out.push(AxiomViolation::NotStrictlyIncreasing { x, y });
                }
            }
        }
        out
    }

    /// The restriction to the relative algebra `[0, z]`, itself a basic
    /// scaling on the powerset of `z`'s atoms. Class names are inherited.
    pub fn restrict(&self, z: Element) -> Result<Scaling, ScalingError> {
        let z_bits = self.class_of(z).map(|_| z.bits())?;
        let atoms: Vec<usize> = self.algebra.members(z_bits).collect();
        if atoms.is_empty() {
            return Err(AlgebraError::SizeOutOfRange(0).into());
        }
        let labels: Vec<&str> = atoms
            .iter()
            .map(|&i| self.algebra.labels()[i].as_str())
            .collect();
        let sub = Algebra::powerset(&labels)?;
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut olds = Vec::new();
        let mut assignment = Vec::with_capacity(sub.size());
        for local in 0..sub.size() as Mask {
            let global = lift(local, &atoms);
            let old = self.class_of[global as usize];
            let next = ids.len();
            let id = *ids.entry(old).or_insert_with(|| {
                olds.push(old);
                next
            });
            assignment.push(id);
        }
        let mut pairs = Vec::new();
        for (i, &oi) in olds.iter().enumerate() {
            for (j, &oj) in olds.iter().enumerate() {
                if self.order.lt(oi, oj) {
                    pairs.push((i, j));
                }
            }
        }
        let names = olds.iter().map(|&o| self.names[o].clone()).collect();
        Scaling::build(&sub, &assignment, &pairs, Some(names))
    }

    /// Maps a global element below `z` to the bit pattern used by
    /// [`Scaling::restrict`]`(z)`.
    pub fn restrict_bits(z: Mask, x: Mask) -> Mask {
        let mut out = 0;
        let mut j = 0;
        for i in 0..32 {
            if z & (1 << i) != 0 {
                if x & (1 << i) != 0 {
                    out |= 1 << j;
                }
                j += 1;
            }
        }
        out
    }
}

fn lift(local: Mask, atoms: &[usize]) -> Mask {
    atoms
        .iter()
        .enumerate()
        .filter(|(j, _)| local & (1 << j) != 0)
        .fold(0, |acc, (_, &i)| acc | (1 << i))
}

/// Measure of every element, indexed by bit pattern.
pub fn element_values(masses: &[BigRational], size: usize) -> Vec<BigRational> {
    let mut values = vec![BigRational::zero(); size];
    for bits in 1..size {
        let low = bits.trailing_zeros() as usize;
        values[bits] = &values[bits & (bits - 1)] + &masses[low];
    }
    values
}

/// `true` iff `x ⊆ y`, for callers that only have raw masks.
pub fn is_subset(x: Mask, y: Mask) -> bool {
    subset(x, y)
}
