//! Scales: images of basic scalings together with their partial addition,
//! dual addition, subtraction, complement and relative complementation.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{relative_complement_bits, submasks, Mask};
use crate::scaling::{unicode_name, ClassId, Rel, Scaling, StrictOrder};

/// Largest atom count for which [`Scale::from_scaling`] tabulates the
/// operations (relative complementation visits `4^n` triples).
pub const MAX_TABULATED_ATOMS: usize = 12;

/// Largest class count of a tuple scale.
pub const MAX_TUPLE_CLASSES: u64 = 1 << 24;

/// Why a partial operation has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndefinedReason {
    /// The order-theoretic precondition (`ζ ≤ ∼η` for `+`, `ζ ≥ ∼η` for
    /// `⊕`) already fails.
    Boxtimes,
    /// The precondition holds but no witnesses exist in the algebra.
    Question,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefinedReason::Boxtimes => f.write_str("undefined (order precondition fails)"),
            UndefinedReason::Question => f.write_str("undefined (no witnesses)"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScaleError {
    #[error("{0} atoms is too many to tabulate (limit {MAX_TABULATED_ATOMS})")]
    TooLarge(usize),
    #[error("tuple scale with sizes {0:?} has too many classes")]
    TooManyClasses(Vec<u64>),
    #[error("class {0} is not in this scale")]
    UnknownClass(usize),
    #[error("{op} is not well defined: witnesses give {first} and {second}")]
    NotWellDefined {
        op: &'static str,
        first: usize,
        second: usize,
    },
    #[error("relative complement of {eta} in [{alpha}, {gamma}] is {found}, but alpha + (gamma - eta) gives {formula:?}")]
    RelativeComplementMismatch {
        eta: usize,
        alpha: usize,
        gamma: usize,
        found: usize,
        formula: Option<usize>,
    },
    #[error("{eta} is not inside [{alpha}, {gamma}]")]
    OutsideInterval {
        eta: usize,
        alpha: usize,
        gamma: usize,
    },
}

/// Which binary operation to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableOp {
    Add,
    DualAdd,
}

#[derive(Debug, Clone)]
enum Ops {
    Table {
        order: StrictOrder,
        add: Vec<Option<usize>>,
        dual: Vec<Option<usize>>,
        comp: Vec<usize>,
        rc: HashMap<(usize, usize, usize), usize>,
    },
    /// Componentwise-ordered tuples `0 ≤ v ≤ sizes`.
    Tuple { sizes: Vec<u64>, strides: Vec<u64> },
}

/// A scale with its operations.
///
/// Class ids follow a topological order: `ClassId(0)` is `0` and the last
/// id is `1`.
#[derive(Debug, Clone)]
pub struct Scale {
    k: usize,
    names: Vec<String>,
    ops: Ops,
}

impl Scale {
    /// Tabulates the operations of the image of `scaling`, checking along
    /// the way that every operation is independent of the witnesses chosen
    /// and that each relative complement agrees with `α + (γ − η)`.
    pub fn from_scaling(scaling: &Scaling) -> Result<Self, ScaleError> {
        let n = scaling.algebra().atom_count();
        if n > MAX_TABULATED_ATOMS {
            return Err(ScaleError::TooLarge(n));
        }
        let k = scaling.class_count();
        let full = scaling.algebra().full_mask();
        let cls = |bits: Mask| scaling.class_of_bits(bits).0;

        let mut comp = vec![usize::MAX; k];
        for x in 0..=full {
            record(&mut comp[cls(x)], cls(full & !x), "complement")?;
        }

        let mut add = vec![None; k * k];
        let mut dual = vec![None; k * k];
        for x in 0..=full {
            let cx = cls(x);
            for y in submasks(full & !x) {
                record_opt(&mut add[cx * k + cls(y)], cls(x | y), "addition")?;
            }
            for s in submasks(x) {
                let y = (full & !x) | s;
                record_opt(&mut dual[cx * k + cls(y)], cls(s), "dual addition")?;
            }
        }

        let mut rc: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for b in 0..=full {
            let cb = cls(b);
            for a in submasks(b) {
                let ca = cls(a);
                for xs in submasks(b & !a) {
                    let x = a | xs;
                    let value = cls(relative_complement_bits(x, a, b));
                    match rc.entry((cls(x), ca, cb)) {
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(value);
                        }
                        std::collections::hash_map::Entry::Occupied(e) => {
                            if *e.get() != value {
                                return Err(ScaleError::NotWellDefined {
                                    op: "relative complement",
                                    first: *e.get(),
                                    second: value,
                                });
                            }
                        }
                    }
                }
            }
        }

        let scale = Self {
            k,
            names: scaling.names().to_vec(),
            ops: Ops::Table {
                order: scaling.order().clone(),
                add,
                dual,
                comp,
                rc,
            },
        };
        if let Ops::Table { rc, .. } = &scale.ops {
            for (&(eta, alpha, gamma), &found) in rc {
                let formula = scale
                    .sub(ClassId(gamma), ClassId(eta))
                    .and_then(|d| scale.add(ClassId(alpha), d))
                    .ok()
                    .map(|c| c.0);
                if formula != Some(found) {
                    return Err(ScaleError::RelativeComplementMismatch {
                        eta,
                        alpha,
                        gamma,
                        found,
                        formula,
                    });
                }
            }
        }
        Ok(scale)
    }

    /// The scale of all tuples `0 ≤ v ≤ sizes` under the componentwise
    /// order, with `v + w` defined iff it stays within `sizes`. This is the
    /// image of a divided scaling whose classes have the given sizes.
    pub fn from_tuple_sizes(sizes: &[u64]) -> Result<Self, ScaleError> {
        let mut strides = vec![0u64; sizes.len()];
        let mut total: u64 = 1;
        for j in (0..sizes.len()).rev() {
            strides[j] = total;
            total = sizes[j]
                .checked_add(1)
                .and_then(|s| total.checked_mul(s))
                .filter(|&t| t <= MAX_TUPLE_CLASSES)
                .ok_or_else(|| ScaleError::TooManyClasses(sizes.to_vec()))?;
        }
        let k = total as usize;
        let names = (0..k)
            .map(|i| {
                let v = tuple_of(i as u64, sizes, &strides);
                if sizes.len() == 1 {
                    v[0].to_string()
                } else {
                    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                    format!("({})", parts.join(","))
                }
            })
            .collect();
        Ok(Self {
            k,
            names,
            ops: Ops::Tuple {
                sizes: sizes.to_vec(),
                strides,
            },
        })
    }

    pub fn class_count(&self) -> usize {
        self.k
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

    pub fn zero(&self) -> ClassId {
        ClassId(0)
    }

    pub fn one(&self) -> ClassId {
        ClassId(self.k - 1)
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> {
        (0..self.k).map(ClassId)
    }

    pub fn check(&self, c: ClassId) -> Result<ClassId, ScaleError> {
        if c.0 < self.k {
            Ok(c)
        } else {
            Err(ScaleError::UnknownClass(c.0))
        }
    }

    /// Tuple coordinates of a class, for tuple scales.
    pub fn tuple(&self, c: ClassId) -> Option<Vec<u64>> {
        match &self.ops {
            Ops::Tuple { sizes, strides } => Some(tuple_of(c.0 as u64, sizes, strides)),
            Ops::Table { .. } => None,
        }
    }

    /// Class with the given tuple coordinates, for tuple scales.
    pub fn class_of_tuple(&self, v: &[u64]) -> Option<ClassId> {
        match &self.ops {
            Ops::Tuple { sizes, strides } => {
                if v.len() != sizes.len() || v.iter().zip(sizes).any(|(a, s)| a > s) {
                    return None;
                }
                Some(ClassId(
                    v.iter().zip(strides).map(|(a, s)| a * s).sum::<u64>() as usize,
                ))
            }
            Ops::Table { .. } => None,
        }
    }

    /// Tuple sizes, for tuple scales.
    pub fn tuple_sizes(&self) -> Option<&[u64]> {
        match &self.ops {
            Ops::Tuple { sizes, .. } => Some(sizes),
            Ops::Table { .. } => None,
        }
    }

    pub fn rel(&self, a: ClassId, b: ClassId) -> Rel {
        match &self.ops {
            Ops::Table { order, .. } => order.rel(a.0, b.0),
            Ops::Tuple { sizes, strides } => {
                if a == b {
                    return Rel::Eq;
                }
                let (va, vb) = (
                    tuple_of(a.0 as u64, sizes, strides),
                    tuple_of(b.0 as u64, sizes, strides),
                );
                if va.iter().zip(&vb).all(|(x, y)| x <= y) {
                    Rel::Lt
                } else if va.iter().zip(&vb).all(|(x, y)| x >= y) {
                    Rel::Gt
                } else {
                    Rel::Incomparable
                }
            }
        }
    }

    pub fn lt(&self, a: ClassId, b: ClassId) -> bool {
        self.rel(a, b) == Rel::Lt
    }

    pub fn le(&self, a: ClassId, b: ClassId) -> bool {
        matches!(self.rel(a, b), Rel::Lt | Rel::Eq)
    }

    pub fn is_linear(&self) -> bool {
        self.classes()
            .all(|a| self.classes().all(|b| self.rel(a, b) != Rel::Incomparable))
    }

    /// Hasse diagram edges of the order.
    pub fn covers(&self) -> Vec<(ClassId, ClassId)> {
        let mut out = Vec::new();
        for a in self.classes() {
            for b in self.classes() {
                if self.lt(a, b) && !self.classes().any(|m| self.lt(a, m) && self.lt(m, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `∼ζ`.
    pub fn comp(&self, c: ClassId) -> ClassId {
        match &self.ops {
            Ops::Table { comp, .. } => ClassId(comp[c.0]),
            Ops::Tuple { .. } => ClassId(self.k - 1 - c.0),
        }
    }

    /// `ζ + η`.
    pub fn add(&self, a: ClassId, b: ClassId) -> Result<ClassId, UndefinedReason> {
        let value = match &self.ops {
            Ops::Table { add, .. } => add[a.0 * self.k + b.0].map(ClassId),
            Ops::Tuple { sizes, strides } => {
                let (va, vb) = (
                    tuple_of(a.0 as u64, sizes, strides),
                    tuple_of(b.0 as u64, sizes, strides),
                );
                if va.iter().zip(&vb).zip(sizes).all(|((x, y), s)| x + y <= *s) {
                    Some(ClassId(a.0 + b.0))
                } else {
                    None
                }
            }
        };
        value.ok_or_else(|| {
            if self.le(a, self.comp(b)) {
                UndefinedReason::Question
            } else {
                UndefinedReason::Boxtimes
            }
        })
    }

    /// `ζ ⊕ η`, the image of `x ∧ y` for `x ∨ y = 1`.
    pub fn dual_add(&self, a: ClassId, b: ClassId) -> Result<ClassId, UndefinedReason> {
        let value = match &self.ops {
            Ops::Table { dual, .. } => dual[a.0 * self.k + b.0].map(ClassId),
            Ops::Tuple { sizes, strides } => {
                let (va, vb) = (
                    tuple_of(a.0 as u64, sizes, strides),
                    tuple_of(b.0 as u64, sizes, strides),
                );
                if va.iter().zip(&vb).zip(sizes).all(|((x, y), s)| x + y >= *s) {
                    Some(ClassId(a.0 + b.0 - (self.k - 1)))
                } else {
                    None
                }
            }
        };
        value.ok_or_else(|| {
            if self.le(self.comp(b), a) {
                UndefinedReason::Question
            } else {
                UndefinedReason::Boxtimes
            }
        })
    }

    /// `ζ − η = ζ ⊕ ∼η`.
    pub fn sub(&self, a: ClassId, b: ClassId) -> Result<ClassId, UndefinedReason> {
        self.dual_add(a, self.comp(b))
    }

    /// `∼η` relative to `[α, γ]`: the image of `∼x_[a,b]` for some
    /// `a ≤ x ≤ b` with images `α, η, γ`, or `None` when no such witnesses
    /// exist.
    pub fn relative_complement(
        &self,
        eta: ClassId,
        alpha: ClassId,
        gamma: ClassId,
    ) -> Result<Option<ClassId>, ScaleError> {
        for c in [eta, alpha, gamma] {
            self.check(c)?;
        }
        if !self.le(alpha, eta) || !self.le(eta, gamma) {
            return Err(ScaleError::OutsideInterval {
                eta: eta.0,
                alpha: alpha.0,
                gamma: gamma.0,
            });
        }
        Ok(match &self.ops {
            Ops::Table { rc, .. } => rc.get(&(eta.0, alpha.0, gamma.0)).copied().map(ClassId),
            Ops::Tuple { .. } => Some(ClassId(alpha.0 + gamma.0 - eta.0)),
        })
    }

    /// Every defined relative complement as `(η, α, γ, ∼η_[α,γ])`.
    pub fn relative_complements(&self) -> Vec<(ClassId, ClassId, ClassId, ClassId)> {
        match &self.ops {
            Ops::Table { rc, .. } => {
                let mut out: Vec<_> = rc
                    .iter()
                    .map(|(&(e, a, g), &r)| (ClassId(e), ClassId(a), ClassId(g), ClassId(r)))
                    .collect();
                out.sort();
                out
            }
            Ops::Tuple { .. } => {
                let mut out = Vec::new();
                for a in self.classes() {
                    for g in self.classes() {
                        if !self.le(a, g) {
                            continue;
                        }
                        for e in self.classes() {
                            if self.le(a, e) && self.le(e, g) {
                                out.push((e, a, g, ClassId(a.0 + g.0 - e.0)));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Text grid of `+` or `⊕`. Undefined cells show `?` or `X` (`⊠` with
    /// `unicode`). Cells are left-aligned and separated by one space.
    pub fn render_table(&self, op: TableOp, unicode: bool) -> String {
        let label = |c: ClassId| -> String {
            if unicode {
                unicode_name(self.name(c)).to_string()
            } else {
                self.name(c).to_string()
            }
        };
        let corner = match (op, unicode) {
            (TableOp::Add, _) => "+",
            (TableOp::DualAdd, false) => "(+)",
            (TableOp::DualAdd, true) => "⊕",
        };
        let mut rows: Vec<Vec<String>> = Vec::with_capacity(self.k + 1);
        let mut header = vec![corner.to_string()];
        header.extend(self.classes().map(label));
        rows.push(header);
        for a in self.classes() {
            let mut row = vec![label(a)];
            for b in self.classes() {
                let value = match op {
                    TableOp::Add => self.add(a, b),
                    TableOp::DualAdd => self.dual_add(a, b),
                };
                row.push(match value {
                    Ok(c) => label(c),
                    Err(UndefinedReason::Question) => "?".to_string(),
                    Err(UndefinedReason::Boxtimes) => if unicode { "⊠" } else { "X" }.to_string(),
                });
            }
            rows.push(row);
        }
        let width = rows
            .iter()
            .flatten()
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        for row in rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(cell);
                for _ in cell.chars().count()..width {
                    line.push(' ');
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// A failed instance of the conditions for a map between scales to be a
/// scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMapViolation {
    /// Source class index out of range of the mapping.
    Unmapped {
        zeta: ClassId,
    },
    NotStrictlyIncreasing {
        zeta: ClassId,
        eta: ClassId,
    },
    ComplementNotReversed {
        alpha: ClassId,
        gamma: ClassId,
        zeta: ClassId,
        eta: ClassId,
    },
    ComplementNotEqual {
        alpha: ClassId,
        gamma: ClassId,
        zeta: ClassId,
        eta: ClassId,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScaleMapReport {
    pub violations: Vec<ScaleMapViolation>,
}

impl ScaleMapReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `f` (indexed by source class id) is strictly increasing and
/// preserves additive relative complementation wherever it is defined in
/// the source.
pub fn verify_scale_map(source: &Scale, target: &Scale, f: &[ClassId]) -> ScaleMapReport {
    let mut violations = Vec::new();
    if let Some(zeta) = source
        .classes()
        .find(|c| c.0 >= f.len() || f[c.0].0 >= target.k)
    {
        violations.push(ScaleMapViolation::Unmapped { zeta });
        return ScaleMapReport { violations };
    }
    for zeta in source.classes() {
        for eta in source.classes() {
            if source.lt(zeta, eta) && !target.lt(f[zeta.0], f[eta.0]) {
                violations.push(ScaleMapViolation::NotStrictlyIncreasing { zeta, eta });
            }
        }
    }
    let mut groups: HashMap<(ClassId, ClassId), Vec<(ClassId, ClassId)>> = HashMap::new();
    for (e, a, g, r) in source.relative_complements() {
        groups.entry((a, g)).or_default().push((e, r));
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort();
    for (alpha, gamma) in keys {
        let members = &groups[&(alpha, gamma)];
        for &(zeta, rz) in members {
            for &(eta, re) in members {
                match target.rel(f[zeta.0], f[eta.0]) {
                    Rel::Lt if target.rel(f[rz.0], f[re.0]) != Rel::Gt => {
                        violations.push(ScaleMapViolation::ComplementNotReversed {
                            alpha,
                            gamma,
                            zeta,
                            eta,
                        })
                    }
                    Rel::Eq if f[rz.0] != f[re.0] => {
                        violations.push(ScaleMapViolation::ComplementNotEqual {
                            alpha,
                            gamma,
                            zeta,
                            eta,
                        })
                    }
                    _ => {}
                }
            }
        }
    }
    ScaleMapReport { violations }
}

fn tuple_of(mut index: u64, sizes: &[u64], strides: &[u64]) -> Vec<u64> {
    let mut out = vec![0; sizes.len()];
    for j in 0..sizes.len() {
        out[j] = index / strides[j];
        index %= strides[j];
    }
    out
}

fn record(slot: &mut usize, value: usize, op: &'static str) -> Result<(), ScaleError> {
    if *slot == usize::MAX {
        *slot = value;
        Ok(())
    } else if *slot == value {
        Ok(())
    } else {
        Err(ScaleError::NotWellDefined {
            op,
            first: *slot,
            second: value,
        })
    }
}

fn record_opt(slot: &mut Option<usize>, value: usize, op: &'static str) -> Result<(), ScaleError> {
    match *slot {
        None => {
            *slot = Some(value);
            Ok(())
        }
        Some(v) if v == value => Ok(()),
        Some(v) => Err(ScaleError::NotWellDefined {
            op,
            first: v,
            second: value,
        }),
    }
}
