//! Finite powerset Boolean algebras.
//!
//! An [`Algebra`] is the Boolean algebra of all subsets of a finite set of
//! labelled atoms. Its members are [`Element`]s, bit patterns over the atom
//! indices tagged with the identity of the algebra they came from, so that
//! mixing elements of two different algebras is reported instead of silently
//! reinterpreted.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported atom count. Everything built on top of an algebra
/// enumerates its `2^n` elements (and often pairs of them).
pub const MAX_ATOMS: usize = 16;

/// Raw subset encoding: bit `i` set iff atom `i` belongs to the subset.
pub type Mask = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("duplicate atom label `{0}`")]
    DuplicateLabel(String),
    #[error("atom count {0} outside 1..={MAX_ATOMS}")]
    SizeOutOfRange(usize),
    #[error("unknown atom label `{0}`")]
    UnknownLabel(String),
    #[error("bit pattern {bits:#b} is not a subset of {atoms} atoms")]
    BitsOutOfRange { bits: Mask, atoms: usize },
    #[error("elements belong to different algebras")]
    MixedAlgebras,
    #[error("{x} is not inside the interval [{lo}, {hi}]")]
    OutsideInterval { x: String, lo: String, hi: String },
}

static NEXT_ALGEBRA_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(u32);

#[derive(Debug)]
struct AlgebraInner {
    id: AlgebraId,
    labels: Vec<String>,
}

/// The Boolean algebra of all subsets of a labelled atom set.
///
/// Cloning is cheap and preserves identity: clones accept each other's
/// elements.
#[derive(Debug, Clone)]
pub struct Algebra {
    inner: Arc<AlgebraInner>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.inner.id == other.inner.id
    }
}

impl Eq for Algebra {}

/// A member of an [`Algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    algebra: AlgebraId,
    bits: Mask,
}

/// Every binary lattice operation on a pair at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeOps {
    pub meet: Element,
    pub join: Element,
    pub complement: Element,
    pub leq: bool,
    pub lt: bool,
}

impl Algebra {
    /// Builds the powerset algebra over `labels`.
    pub fn powerset<S: AsRef<str>>(labels: &[S]) -> Result<Self, AlgebraError> {
        let n = labels.len();
        if n == 0 || n > MAX_ATOMS {
            return Err(AlgebraError::SizeOutOfRange(n));
        }
        let mut owned: Vec<String> = Vec::with_capacity(n);
        for label in labels {
            let label = label.as_ref();
            if owned.iter().any(|l| l == label) {
                return Err(AlgebraError::DuplicateLabel(label.to_string()));
            }
            owned.push(label.to_string());
        }
        let id = AlgebraId(NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed));
        Ok(Self {
            inner: Arc::new(AlgebraInner { id, labels: owned }),
        })
    }

    /// Powerset over the first `n` lower-case letters.
    pub fn letters(n: usize) -> Result<Self, AlgebraError> {
        if n == 0 || n > MAX_ATOMS {
            return Err(AlgebraError::SizeOutOfRange(n));
        }
        let labels: Vec<String> = (0..n)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect();
        Self::powerset(&labels)
    }

    pub fn id(&self) -> AlgebraId {
        self.inner.id
    }

    pub fn atom_count(&self) -> usize {
        self.inner.labels.len()
    }

    /// Number of elements, `2^n`.
    pub fn size(&self) -> usize {
        1usize << self.atom_count()
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn full_mask(&self) -> Mask {
        ((1u64 << self.atom_count()) - 1) as Mask
    }

    pub fn zero(&self) -> Element {
        self.wrap(0)
    }

    pub fn one(&self) -> Element {
        self.wrap(self.full_mask())
    }

    pub fn atom(&self, index: usize) -> Element {
        assert!(index < self.atom_count(), "atom index out of range");
        self.wrap(1 << index)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.atom_count()).map(move |i| self.atom(i))
    }

    pub fn element(&self, bits: Mask) -> Result<Element, AlgebraError> {
        if bits & !self.full_mask() != 0 {
            return Err(AlgebraError::BitsOutOfRange {
                bits,
                atoms: self.atom_count(),
            });
        }
        Ok(self.wrap(bits))
    }

    /// The element made of the named atoms.
    pub fn element_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Element, AlgebraError> {
        let mut bits = 0;
        for name in names {
            let name = name.as_ref();
            let idx = self
                .inner
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| AlgebraError::UnknownLabel(name.to_string()))?;
            bits |= 1 << idx;
        }
        Ok(self.wrap(bits))
    }

    /// All elements in increasing bit-pattern order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size() as Mask).map(move |b| self.wrap(b))
    }

    pub fn contains(&self, x: Element) -> bool {
        x.algebra == self.inner.id
    }

    fn wrap(&self, bits: Mask) -> Element {
        Element {
            algebra: self.inner.id,
            bits,
        }
    }

    fn check(&self, x: Element) -> Result<(), AlgebraError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(AlgebraError::MixedAlgebras)
        }
    }

    pub fn complement(&self, x: Element) -> Result<Element, AlgebraError> {
        self.check(x)?;
        Ok(self.wrap(!x.bits & self.full_mask()))
    }

    pub fn lattice_ops(&self, x: Element, y: Element) -> Result<LatticeOps, AlgebraError> {
        self.check(x)?;
        self.check(y)?;
        Ok(LatticeOps {
            meet: self.wrap(x.bits & y.bits),
            join: self.wrap(x.bits | y.bits),
            complement: self.wrap(!x.bits & self.full_mask()),
            leq: x.bits & !y.bits == 0,
            lt: x.bits & !y.bits == 0 && x.bits != y.bits,
        })
    }

    /// Complement of `x` relative to the interval `[a, b]`: `a ∨ (b ∧ ∼x)`.
    pub fn relative_complement(
        &self,
        x: Element,
        a: Element,
        b: Element,
    ) -> Result<Element, AlgebraError> {
        self.check(x)?;
        self.check(a)?;
        self.check(b)?;
        if !(subset(a.bits, x.bits) && subset(x.bits, b.bits)) {
            return Err(AlgebraError::OutsideInterval {
                x: self.format(x),
                lo: self.format(a),
                hi: self.format(b),
            });
        }
        Ok(self.wrap(relative_complement_bits(x.bits, a.bits, b.bits)))
    }

    /// One principal homomorphism onto `{0, 1}` per atom.
    pub fn two_valued_homomorphisms(&self) -> Vec<TwoValuedHom> {
        self.atoms()
            .map(|atom| TwoValuedHom {
                kind: HomKind::Principal,
                atom,
            })
            .collect()
    }

    /// `{a,b}` style rendering, atoms in index order.
    pub fn format(&self, x: Element) -> String {
        self.format_bits(x.bits)
    }

    pub fn format_bits(&self, bits: Mask) -> String {
        let names: Vec<&str> = self
            .members(bits)
            .map(|i| self.inner.labels[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Atom indices contained in `bits`.
    pub fn members(&self, bits: Mask) -> impl Iterator<Item = usize> {
        let n = self.atom_count();
        (0..n).filter(move |i| bits & (1 << i) != 0)
    }
}

impl Element {
    pub fn bits(self) -> Mask {
        self.bits
    }

    pub fn algebra_id(self) -> AlgebraId {
        self.algebra
    }

    pub fn cardinality(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    fn same(self, other: Element) -> Result<(), AlgebraError> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(AlgebraError::MixedAlgebras)
        }
    }

    pub fn meet(self, other: Element) -> Result<Element, AlgebraError> {
        self.same(other)?;
        Ok(Element {
            algebra: self.algebra,
            bits: self.bits & other.bits,
        })
    }

    pub fn join(self, other: Element) -> Result<Element, AlgebraError> {
        self.same(other)?;
        Ok(Element {
            algebra: self.algebra,
            bits: self.bits | other.bits,
        })
    }

    pub fn leq(self, other: Element) -> Result<bool, AlgebraError> {
        self.same(other)?;
        Ok(subset(self.bits, other.bits))
    }

    pub fn lt(self, other: Element) -> Result<bool, AlgebraError> {
        self.same(other)?;
        Ok(subset(self.bits, other.bits) && self.bits != other.bits)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomKind {
    Principal,
    /// Never produced for finite algebras; kept so callers can match on it.
    NonPrincipal,
}

/// A homomorphism from an algebra onto the two-element algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoValuedHom {
    pub kind: HomKind,
    pub atom: Element,
}

impl TwoValuedHom {
    /// Value at `y`: 1 iff the generating atom lies below `y`.
    pub fn eval(&self, y: Element) -> Result<bool, AlgebraError> {
        self.atom.leq(y)
    }
}

#[inline]
pub fn subset(x: Mask, y: Mask) -> bool {
    x & !y == 0
}

#[inline]
pub fn relative_complement_bits(x: Mask, a: Mask, b: Mask) -> Mask {
    a | (b & !x)
}

/// Iterates over every submask of `mask`, including `mask` and `0`.
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}
