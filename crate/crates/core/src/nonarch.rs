//! A computable model of the non-Archimedean scale on subsets of
//! `ℕ = {0, 1, 2, …}`: sets are compared by the sizes of their differences,
//! and equal finite differences make sets equivalent.
//!
//! Only ultimately periodic sets are represented. They form a Boolean
//! algebra on which every difference has a decidable cardinality, so the
//! order, galaxies, infinitesimals and the discontinuity at the finite
//! ideal can all be computed exactly. The full power set, and with it the
//! uncountable families of galaxies, is out of reach.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::scaling::Rel;

/// An ultimately periodic subset of `ℕ`: explicit membership below a
/// threshold `t`, then `n ∈ A` iff `residues[n mod period]`.
///
/// The normal form has the least period and then the least threshold, so
/// two sets are equal iff their representations are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPSet {
    prefix: Vec<bool>,
    residues: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    Finite(u64),
    Aleph0,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(k) => write!(f, "{k}"),
            Self::Aleph0 => write!(f, "aleph_0"),
        }
    }
}

impl UPSet {
    /// Builds and normalizes a set. `residues` must be nonempty.
    pub fn from_parts(prefix: Vec<bool>, residues: Vec<bool>) -> Self {
        assert!(!residues.is_empty(), "period must be positive");
        let mut out = Self { prefix, residues };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        let p = self.residues.len();
        if let Some(d) = (1..=p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (0..p).all(|i| self.residues[i] == self.residues[i % d]))
        {
            self.residues.truncate(d);
        }
        let p = self.residues.len();
        while let Some(&last) = self.prefix.last() {
            if last != self.residues[(self.prefix.len() - 1) % p] {
                break;
            }
            self.prefix.pop();
        }
    }

    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), vec![false])
    }

    pub fn naturals() -> Self {
        Self::from_parts(Vec::new(), vec![true])
    }

    /// `{n : n ≡ r mod m}`.
    pub fn residue_class(r: u64, m: u64) -> Self {
        assert!(m > 0, "modulus must be positive");
        let residues = (0..m).map(|i| i == r % m).collect();
        Self::from_parts(Vec::new(), residues)
    }

    pub fn evens() -> Self {
        Self::residue_class(0, 2)
    }

    pub fn odds() -> Self {
        Self::residue_class(1, 2)
    }

    /// `{n, n+1, n+2, …}`.
    pub fn tail(n: u64) -> Self {
        Self::from_parts(vec![false; n as usize], vec![true])
    }

    pub fn finite(points: impl IntoIterator<Item = u64>) -> Self {
        let mut prefix = Vec::new();
        for p in points {
            let p = p as usize;
            if prefix.len() <= p {
                prefix.resize(p + 1, false);
            }
            prefix[p] = true;
        }
        Self::from_parts(prefix, vec![false])
    }

    pub fn period(&self) -> usize {
        self.residues.len()
    }

    pub fn threshold(&self) -> usize {
        self.prefix.len()
    }

    pub fn residues(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.period()).filter(|&r| self.residues[r])
    }

    /// Points below the threshold added to the periodic pattern.
    pub fn insertions(&self) -> Vec<u64> {
        self.exceptions(true)
    }

    /// Points below the threshold removed from the periodic pattern.
    pub fn deletions(&self) -> Vec<u64> {
        self.exceptions(false)
    }

    fn exceptions(&self, present: bool) -> Vec<u64> {
        let p = self.period();
        (0..self.threshold())
            .filter(|&n| self.prefix[n] == present && self.residues[n % p] != present)
            .map(|n| n as u64)
            .collect()
    }

    pub fn contains(&self, n: u64) -> bool {
        let n = n as usize;
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.residues[n % self.period()],
        }
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let l = self.period().lcm(&other.period());
        let t = self.threshold().max(other.threshold());
        let at = |n: usize| op(self.contains(n as u64), other.contains(n as u64));
        let prefix = (0..t).map(at).collect();
        let residues = (0..l).map(|r| at(t + (r + l - t % l) % l)).collect();
        Self::from_parts(prefix, residues)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::from_parts(
            self.prefix.iter().map(|b| !b).collect(),
            self.residues.iter().map(|b| !b).collect(),
        )
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues().next().is_none()
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.is_finite() {
            Cardinality::Finite(self.prefix.iter().filter(|&&b| b).count() as u64)
        } else {
            Cardinality::Aleph0
        }
    }

    /// Members in increasing order; infinite for infinite sets.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let finite_end = self.is_finite().then_some(self.threshold() as u64);
        (0u64..)
            .take_while(move |&n| finite_end.is_none_or(|end| n < end))
            .filter(move |&n| self.contains(n))
    }

    /// The periodic pattern alone, without exceptions.
    pub fn core(&self) -> Self {
        Self::from_parts(Vec::new(), self.residues.clone())
    }

    pub fn galaxy(&self) -> GalaxyValue {
        let core = self.core();
        let plus = self.difference(&core).cardinality();
        let minus = core.difference(self).cardinality();
        match (plus, minus) {
            (Cardinality::Finite(p), Cardinality::Finite(m)) => GalaxyValue {
                core,
                offset: p as i64 - m as i64,
            },
            _ => unreachable!("a set differs from its core in finitely many points"),
        }
    }

    pub fn with_point(&self, n: u64) -> Self {
        self.union(&Self::finite([n]))
    }

    pub fn without_point(&self, n: u64) -> Self {
        self.difference(&Self::finite([n]))
    }
}

impl fmt::Display for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let residues: Vec<String> = self.residues().map(|r| r.to_string()).collect();
        write!(
            f,
            "{{n mod {} in {{{}}}}}",
            self.period(),
            residues.join(",")
        )?;
        let list = |v: Vec<u64>| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let (ins, del) = (self.insertions(), self.deletions());
        if !ins.is_empty() {
            write!(f, " + {{{}}}", list(ins))?;
        }
        if !del.is_empty() {
            write!(f, " - {{{}}}", list(del))?;
        }
        Ok(())
    }
}

/// The image `ρ(A)`: the periodic core `C` of `A` with the offset
/// `|A ∖ C| − |C ∖ A|`. Values with the same core form a galaxy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GalaxyValue {
    core: UPSet,
    offset: i64,
}

impl GalaxyValue {
    pub fn core(&self) -> &UPSet {
        &self.core
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The value of finite sets with `k` elements, `ρ(∅) + k`.
    pub fn finite(k: u64) -> Self {
        Self {
            core: UPSet::empty(),
            offset: k as i64,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.core.is_empty() && self.offset == 0
    }

    pub fn is_one(&self) -> bool {
        self.core == UPSet::naturals() && self.offset == 0
    }

    /// Compares cores by inclusion and, within a galaxy, by offset.
    pub fn compare(&self, other: &Self) -> Rel {
        if self.core == other.core {
            return match self.offset.cmp(&other.offset) {
                Ordering::Less => Rel::Lt,
                Ordering::Equal => Rel::Eq,
                Ordering::Greater => Rel::Gt,
            };
        }
        match (
            self.core.is_subset(&other.core),
            other.core.is_subset(&self.core),
        ) {
            (true, _) => Rel::Lt,
            (_, true) => Rel::Gt,
            _ => Rel::Incomparable,
        }
    }

    /// A set with this value: the core with the first `offset` missing
    /// points added, or its first `−offset` points removed.
    pub fn representative(&self) -> UPSet {
        let k = self.offset.unsigned_abs() as usize;
        if self.offset >= 0 {
            let add: Vec<u64> = self.core.complement().members().take(k).collect();
            self.core.union(&UPSet::finite(add))
        } else {
            let remove: Vec<u64> = self.core.members().take(k).collect();
            self.core.difference(&UPSet::finite(remove))
        }
    }

    /// Immediate successor `α + 1`; `None` only for `ρ(ℕ)`.
    pub fn succ(&self) -> Option<Self> {
        (!self.is_one()).then(|| Self {
            core: self.core.clone(),
            offset: self.offset + 1,
        })
    }

    /// Immediate predecessor `α − 1`; `None` only for `ρ(∅)`.
    pub fn pred(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self {
            core: self.core.clone(),
            offset: self.offset - 1,
        })
    }
}

impl fmt::Display for GalaxyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho({}) {:+}", self.core, self.offset)
    }
}

/// Boolean operations on a pair of sets with the size of the difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpsetOps {
    pub union: UPSet,
    pub intersection: UPSet,
    pub complement: UPSet,
    pub difference: UPSet,
    pub difference_cardinality: Cardinality,
}

/// Operations on `A` and `B`; `complement` is that of `A`.
pub fn upset_ops(a: &UPSet, b: &UPSet) -> UpsetOps {
    let difference = a.difference(b);
    UpsetOps {
        union: a.union(b),
        intersection: a.intersection(b),
        complement: a.complement(),
        difference_cardinality: difference.cardinality(),
        difference,
    }
}

/// `ρ(A) < ρ(B)` iff `|A ∖ B| < |B ∖ A|`; equal finite sizes give
/// equality and two infinite sizes incomparability.
pub fn nonarch_compare(a: &UPSet, b: &UPSet) -> Rel {
    let ab = a.difference(b).cardinality();
    let ba = b.difference(a).cardinality();
    match ab.cmp(&ba) {
        Ordering::Less => Rel::Lt,
        Ordering::Greater => Rel::Gt,
        Ordering::Equal if ab == Cardinality::Aleph0 => Rel::Incomparable,
        Ordering::Equal => Rel::Eq,
    }
}

/// The first `k` members of the pairwise disjoint family
/// `X_j = {n : n + 1 ≡ 2^(j−1) mod 2^j}`, split by the 2-adic valuation of
/// `n + 1`.
pub fn disjoint_family(k: u32) -> Vec<UPSet> {
    (1..=k)
        .map(|j| UPSet::residue_class((1u64 << (j - 1)) - 1, 1u64 << j))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infinitesimality {
    /// Every member of the infinite disjoint family lies above the value;
    /// the first few members are listed.
    Infinitesimal { family: Vec<UPSet> },
    /// Any set at or above the value contains all but finitely many of
    /// `{n : n ≡ residue mod period}`, so no two of them are disjoint.
    NotInfinitesimal { residue: u64, period: u64 },
}

impl Infinitesimality {
    pub fn is_infinitesimal(&self) -> bool {
        matches!(self, Self::Infinitesimal { .. })
    }
}

/// Number of family members listed in an infinitesimal witness.
pub const WITNESS_FAMILY_SIZE: u32 = 8;

/// Infinitesimal exactly on the initial galaxy of finite sets.
pub fn is_infinitesimal(v: &GalaxyValue) -> Infinitesimality {
    match v.core.residues().next() {
        Some(r) => Infinitesimality::NotInfinitesimal {
            residue: r as u64,
            period: v.core.period() as u64,
        },
        None => Infinitesimality::Infinitesimal {
            family: disjoint_family(WITNESS_FAMILY_SIZE),
        },
    }
}

/// Checks an infinitesimal witness: members pairwise disjoint and each
/// strictly above `v`.
pub fn validate_infinitesimal_witness(v: &GalaxyValue, family: &[UPSet]) -> bool {
    let rep = v.representative();
    let above = family.iter().all(|x| nonarch_compare(&rep, x) == Rel::Lt);
    let disjoint = family
        .iter()
        .enumerate()
        .all(|(i, x)| family[i + 1..].iter().all(|y| x.intersection(y).is_empty()));
    above && disjoint
}

/// For `ρ(A) < ρ(B)`, a subset `B₁ ⊆ B` with `ρ(B₁) = ρ(A)`: keep
/// `A ∩ B` and add the first `|A ∖ B|` points of `B ∖ A`. Returns `None`
/// when `ρ(A) < ρ(B)` fails or the result does not check out.
pub fn divided_witness(a: &UPSet, b: &UPSet) -> Option<UPSet> {
    if nonarch_compare(a, b) != Rel::Lt {
        return None;
    }
    let Cardinality::Finite(missing) = a.difference(b).cardinality() else {
        return None;
    };
    let extra: Vec<u64> = b.difference(a).members().take(missing as usize).collect();
    let b1 = a.intersection(b).union(&UPSet::finite(extra));
    (b1.is_subset(b) && b1 != *b && nonarch_compare(&b1, a) == Rel::Eq).then_some(b1)
}

/// The tails `T_n = {n, n+1, …}` have empty meet, yet every finite value,
/// `ρ(∅) + 5` among them, stays below all of them: the scaling is
/// discontinuous at the homomorphism that kills finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscontinuityReport {
    pub sampled: Vec<u64>,
    /// `ρ(T_n)` for each sampled `n`.
    pub tail_values: Vec<GalaxyValue>,
    /// The meet of all tails, `∅`: a point `m` misses `T_{m+1}`.
    pub meet: UPSet,
    pub meet_value: GalaxyValue,
    pub lower_bound: GalaxyValue,
    pub lower_bound_holds: bool,
    pub lower_bound_above_meet: bool,
    /// `ρ({0, …, k−1}) = ρ(∅) + k`, each strictly below `ρ(ℕ)`.
    pub partial_sums: Vec<GalaxyValue>,
    pub partial_sums_below_top: bool,
}

impl DiscontinuityReport {
    pub fn passed(&self) -> bool {
        self.lower_bound_holds
            && self.lower_bound_above_meet
            && self.meet.is_empty()
            && self.partial_sums_below_top
    }
}

pub fn discontinuity_witness(sampled: &[u64]) -> DiscontinuityReport {
    let tails: Vec<UPSet> = sampled.iter().map(|&n| UPSet::tail(n)).collect();
    // No point m lies in T_{m+1}, so only the empty set is below all tails.
    let meet = UPSet::empty();
    let lower_bound = GalaxyValue::finite(5);
    let lower_rep = lower_bound.representative();
    let lower_bound_holds = tails
        .iter()
        .all(|t| matches!(nonarch_compare(&lower_rep, t), Rel::Lt | Rel::Eq));
    let meet_value = meet.galaxy();
    let lower_bound_above_meet = meet_value.compare(&lower_bound) == Rel::Lt;
    let partial_sums: Vec<GalaxyValue> = (0..=sampled.len() as u64)
        .map(|k| UPSet::finite(0..k).galaxy())
        .collect();
    let top = UPSet::naturals().galaxy();
    let partial_sums_below_top = partial_sums.iter().all(|v| v.compare(&top) == Rel::Lt);
    DiscontinuityReport {
        sampled: sampled.to_vec(),
        tail_values: tails.iter().map(UPSet::galaxy).collect(),
        meet,
        meet_value,
        lower_bound,
        lower_bound_holds,
        lower_bound_above_meet,
        partial_sums,
        partial_sums_below_top,
    }
}

/// Shifting one galaxy by one preserves the order but not relative
/// complements: in `[∅, ℕ]`, `x = A` has complement `ℕ ∖ A`, while the
/// shifted image `ρ(A) + 1` has complement `ρ(ℕ ∖ A) − 1`, which differs
/// from the unshifted image of `ρ(ℕ ∖ A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftWitness {
    pub x: UPSet,
    pub shifted_complement: GalaxyValue,
    pub complement_of_shifted: GalaxyValue,
}

/// Returns the witness for shifting the galaxy of `x`, whose core must be
/// neither empty, all of `ℕ`, nor its own complement's core.
pub fn galaxy_shift_witness(x: &UPSet) -> Option<ShiftWitness> {
    let gx = x.galaxy();
    let complement = x.complement();
    let gc = complement.galaxy();
    if gx.core.is_empty() || gx.is_one() || gx.core == gc.core {
        return None;
    }
    let shift = |v: &GalaxyValue| {
        if v.core == gx.core {
            v.succ().expect("not the top")
        } else {
            v.clone()
        }
    };
    let shifted_x = shift(&gx).representative();
    let complement_of_shifted = shifted_x.complement().galaxy();
    let shifted_complement = shift(&gc);
    (complement_of_shifted != shifted_complement).then(|| ShiftWitness {
        x: x.clone(),
        shifted_complement,
        complement_of_shifted,
    })
}
