//! Belief systems: total preorders of degrees of belief on a powerset
//! algebra, one for each conditioning element, with the four axioms of
//! epistemic probability and an exhaustive check that they force the
//! unconditional preorder to be a scaling.
//!
//! The sure-thing axiom is checked for every conditioning element `z`
//! together with its complement. Axioms (5.1) and (5.2) are checked
//! unconditionally; [`AxiomSet::WITH_CONDITIONAL_CORPORA`] also applies
//! them under every conditioning element of positive belief, within the
//! relative algebra `[0, z]`.
//!
//! Under coherence and totality, (5.2) follows from the sure-thing axiom:
//! conditioning on `x ∧ y` and on its complement shows `P(x) < P(y)` iff
//! `P(x ∖ y) < P(y ∖ x)`, and `not y ∖ not x = x ∖ y`. Disabling (5.2)
//! alone therefore never yields a counterexample.

use thiserror::Error;

use crate::algebra::{submasks, Algebra, Mask};
use crate::census::permutations;
use crate::scaling::{AxiomViolation, Scaling};

/// Largest atom count accepted by [`derivation_counterexample_search`].
pub const MAX_SEARCH_ATOMS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BeliefError {
    #[error("belief systems need between 1 and 4 atoms, got {0}")]
    Size(usize),
    #[error("expected {expected} ranks, got {got}")]
    RankCount { expected: usize, got: usize },
    #[error("exhaustive search supports at most {MAX_SEARCH_ATOMS} atoms, got {0}")]
    SearchTooLarge(usize),
}

/// `ranks[z][x]` orders `P(x | z)`; lower ranks are less believed.
/// Totality is built into the representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefSystem {
    n: usize,
    ranks: Vec<Vec<u32>>,
}

impl BeliefSystem {
    fn check_size(n: usize) -> Result<usize, BeliefError> {
        if (1..=4).contains(&n) {
            Ok(1 << n)
        } else {
            Err(BeliefError::Size(n))
        }
    }

    /// The canonical system of a total preorder: `P(x | z)` ranks `x` by
    /// the unconditional rank of `x ∧ z`.
    pub fn from_unconditional(n: usize, ranks: Vec<u32>) -> Result<Self, BeliefError> {
        let size = Self::check_size(n)?;
        if ranks.len() != size {
            return Err(BeliefError::RankCount {
                expected: size,
                got: ranks.len(),
            });
        }
        let conditional = (0..size)
            .map(|z| (0..size).map(|x| ranks[x & z]).collect())
            .collect();
        Ok(Self {
            n,
            ranks: conditional,
        })
    }

    /// The canonical system of a positive measure given by integer weights
    /// on the atoms.
    pub fn from_weights(weights: &[u32]) -> Result<Self, BeliefError> {
        let n = weights.len();
        let size = Self::check_size(n)?;
        let ranks = (0..size)
            .map(|x| {
                weights
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| x & (1 << i) != 0)
                    .map(|(_, w)| w)
                    .sum()
            })
            .collect();
        Self::from_unconditional(n, ranks)
    }

    /// Replaces the preorder conditional on `z`.
    pub fn with_conditional(mut self, z: Mask, ranks: Vec<u32>) -> Result<Self, BeliefError> {
        let size = 1usize << self.n;
        if ranks.len() != size {
            return Err(BeliefError::RankCount {
                expected: size,
                got: ranks.len(),
            });
        }
        self.ranks[z as usize] = ranks;
        Ok(self)
    }

    pub fn atom_count(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> Mask {
        (1 << self.n) - 1
    }

    pub fn unconditional(&self) -> &[u32] {
        &self.ranks[self.full_mask() as usize]
    }

    pub fn conditional(&self, z: Mask) -> &[u32] {
        &self.ranks[z as usize]
    }

    fn rank(&self, z: Mask, x: Mask) -> u32 {
        self.ranks[z as usize][x as usize]
    }

    /// Whether `z` has more than zero belief unconditionally.
    pub fn is_positive(&self, z: Mask) -> bool {
        let p = self.unconditional();
        p[z as usize] > p[0]
    }

    /// `P₁` as a linearly ordered scaling candidate; `None` when the
    /// preorder does not even yield a strict order on classes.
    pub fn unconditional_scaling(&self) -> Option<Scaling> {
        let p = self.unconditional();
        let mut levels: Vec<u32> = p.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let assignment: Vec<usize> = p
            .iter()
            .map(|r| levels.binary_search(r).expect("present"))
            .collect();
        let chain: Vec<(usize, usize)> = (1..levels.len()).map(|i| (i - 1, i)).collect();
        let alg = Algebra::letters(self.n).ok()?;
        Scaling::assemble(&alg, &assignment, &chain, None).ok()
    }
}

/// Which axioms a check enforces. Disabling one is used to test that the
/// search can find counterexamples at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomSet {
    pub monotone: bool,
    pub negation: bool,
    pub sure_thing: bool,
    pub coherence: bool,
    /// Whether (5.1) and (5.2) are also applied under every positive
    /// conditioning element, not just unconditionally.
    pub conditional_corpora: bool,
}

impl AxiomSet {
    pub const ALL: Self = Self {
        monotone: true,
        negation: true,
        sure_thing: true,
        coherence: true,
        conditional_corpora: false,
    };

    /// All axioms, with (5.1) and (5.2) also applied conditionally.
    pub const WITH_CONDITIONAL_CORPORA: Self = Self {
        conditional_corpora: true,
        ..Self::ALL
    };

    pub fn without(self, name: BeliefAxiom) -> Self {
        let mut out = self;
        match name {
            BeliefAxiom::Monotone => out.monotone = false,
            BeliefAxiom::Negation => out.negation = false,
            BeliefAxiom::SureThing => out.sure_thing = false,
            BeliefAxiom::Coherence => out.coherence = false,
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeliefAxiom {
    /// (5.1) `x < y` implies `P(x) < P(y)`.
    Monotone,
    /// (5.2) `P(x) < P(y)` implies `P(not x) > P(not y)`.
    Negation,
    /// (5.3) conditional dominance on `z` and `not z` implies dominance.
    SureThing,
    /// `x ∧ z = y ∧ z` implies `P(x | z) = P(y | z)`.
    Coherence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeliefViolation {
    Monotone { corpus: Mask, x: Mask, y: Mask },
    Negation { corpus: Mask, x: Mask, y: Mask },
    SureThing { z: Mask, x: Mask, y: Mask },
    SureThingStrict { z: Mask, x: Mask, y: Mask },
    Coherence { z: Mask, x: Mask, y: Mask },
}

impl BeliefViolation {
    pub fn axiom(&self) -> BeliefAxiom {
        match self {
            Self::Monotone { .. } => BeliefAxiom::Monotone,
            Self::Negation { .. } => BeliefAxiom::Negation,
            Self::SureThing { .. } | Self::SureThingStrict { .. } => BeliefAxiom::SureThing,
            Self::Coherence { .. } => BeliefAxiom::Coherence,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BeliefReport {
    pub violations: Vec<BeliefViolation>,
}

impl BeliefReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_axioms(bs: &BeliefSystem) -> BeliefReport {
    check_axioms_with(bs, AxiomSet::ALL, usize::MAX)
}

/// Checks the enabled axioms, stopping after `limit` violations.
pub fn check_axioms_with(bs: &BeliefSystem, axioms: AxiomSet, limit: usize) -> BeliefReport {
    let mut violations = Vec::new();
    let full = bs.full_mask();
    let push = |v: BeliefViolation, out: &mut Vec<BeliefViolation>| {
        out.push(v);
        out.len() >= limit
    };
    let corpora: Vec<Mask> = (0..=full)
        .filter(|&z| z == full || (axioms.conditional_corpora && bs.is_positive(z)))
        .collect();
    if axioms.coherence {
        for z in 0..=full {
            for x in 0..=full {
                if bs.rank(z, x) != bs.rank(z, x & z)
                    && push(
                        BeliefViolation::Coherence { z, x, y: x & z },
                        &mut violations,
                    )
                {
                    return BeliefReport { violations };
                }
            }
        }
    }
    if axioms.monotone {
        for &c in &corpora {
            for y in submasks(c) {
                for x in submasks(y) {
                    if x != y
                        && bs.rank(c, x) >= bs.rank(c, y)
                        && push(
                            BeliefViolation::Monotone { corpus: c, x, y },
                            &mut violations,
                        )
                    {
                        return BeliefReport { violations };
                    }
                }
            }
        }
    }
    if axioms.negation {
        for &c in &corpora {
            for x in submasks(c) {
                for y in submasks(c) {
                    if bs.rank(c, x) < bs.rank(c, y)
                        && bs.rank(c, c & !x) <= bs.rank(c, c & !y)
                        && push(
                            BeliefViolation::Negation { corpus: c, x, y },
                            &mut violations,
                        )
                    {
                        return BeliefReport { violations };
                    }
                }
            }
        }
    }
    if axioms.sure_thing {
        for z in 0..=full {
            let nz = full & !z;
            for x in 0..=full {
                for y in 0..=full {
                    let (in_z, out_z) = (
                        bs.rank(z, x).cmp(&bs.rank(z, y)),
                        bs.rank(nz, x).cmp(&bs.rank(nz, y)),
                    );
                    if in_z.is_gt() || out_z.is_gt() {
                        continue;
                    }
                    let overall =
                        bs.unconditional()[x as usize].cmp(&bs.unconditional()[y as usize]);
                    let v = if overall.is_gt() {
                        Some(BeliefViolation::SureThing { z, x, y })
                    } else if overall.is_eq() && (in_z.is_lt() || out_z.is_lt()) {
                        Some(BeliefViolation::SureThingStrict { z, x, y })
                    } else {
                        None
                    };
                    if let Some(v) = v {
                        if push(v, &mut violations) {
                            return BeliefReport { violations };
                        }
                    }
                }
            }
        }
    }
    BeliefReport { violations }
}

/// A system satisfying the enabled axioms whose unconditional preorder is
/// not a scaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub system: BeliefSystem,
    pub violation: Option<AxiomViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub n: usize,
    pub examined: usize,
    pub satisfying: usize,
    pub counterexample: Option<Counterexample>,
}

/// Searches every total preorder on `P(n)` with its canonical conditional
/// preorders for a system that satisfies the axioms while its
/// unconditional preorder is not a scaling.
pub fn derivation_counterexample_search(n: usize) -> Result<SearchOutcome, BeliefError> {
    derivation_counterexample_search_with(n, AxiomSet::ALL)
}

pub fn derivation_counterexample_search_with(
    n: usize,
    axioms: AxiomSet,
) -> Result<SearchOutcome, BeliefError> {
    if n == 0 || n > MAX_SEARCH_ATOMS {
        return Err(BeliefError::SearchTooLarge(n));
    }
    let mut outcome = SearchOutcome {
        n,
        examined: 0,
        satisfying: 0,
        counterexample: None,
    };
    for_each_weak_order(1 << n, &mut |ranks| {
        outcome.examined += 1;
        let bs = BeliefSystem::from_unconditional(n, ranks.to_vec()).expect("size checked");
        if !check_axioms_with(&bs, axioms, 1).passed() {
            return true;
        }
        outcome.satisfying += 1;
        let violation = match bs.unconditional_scaling() {
            Some(s) => match s.verify_axioms_exhaustive().violations.first() {
                Some(v) => Some(*v),
                None => return true,
            },
            None => None,
        };
        outcome.counterexample = Some(Counterexample {
            system: bs,
            violation,
        });
        false
    });
    Ok(outcome)
}

/// Like [`derivation_counterexample_search_with`] but over strict linear
/// orders extending inclusion, which makes four atoms feasible. When
/// (5.2) is enabled, orders are pruned as they are built by complement
/// reversal on `[0, 1]`.
pub fn linear_counterexample_search(
    n: usize,
    axioms: AxiomSet,
) -> Result<SearchOutcome, BeliefError> {
    let size = BeliefSystem::check_size(n)?;
    let mut outcome = SearchOutcome {
        n,
        examined: 0,
        satisfying: 0,
        counterexample: None,
    };
    let full = (size - 1) as Mask;
    let mut pos: Vec<Option<u32>> = vec![None; size];
    let mut placed = 0u32;
    fn go(
        n: usize,
        full: Mask,
        pos: &mut [Option<u32>],
        placed: &mut u32,
        axioms: AxiomSet,
        outcome: &mut SearchOutcome,
    ) -> bool {
        let size = pos.len();
        if *placed as usize == size {
            outcome.examined += 1;
            let ranks: Vec<u32> = pos.iter().map(|p| p.expect("all placed")).collect();
            let bs = BeliefSystem::from_unconditional(n, ranks).expect("size checked");
            if !check_axioms_with(&bs, axioms, 1).passed() {
                return true;
            }
            outcome.satisfying += 1;
            let violation = bs
                .unconditional_scaling()
                .and_then(|s| s.verify_axioms().violations.first().copied());
            if violation.is_some() {
                outcome.counterexample = Some(Counterexample {
                    system: bs,
                    violation,
                });
                return false;
            }
            return true;
        }
        for y in 0..=full {
            let ready = pos[y as usize].is_none()
                && (0..n).all(|t| y & (1 << t) == 0 || pos[(y & !(1 << t)) as usize].is_some());
            if !ready {
                continue;
            }
            pos[y as usize] = Some(*placed);
            *placed += 1;
            // Every earlier x has P(x) < P(y), so not y must precede not x.
            let consistent = !axioms.negation
                || (0..=full).all(|x| {
                    x == y
                        || pos[x as usize].is_none()
                        || pos[(full & !x) as usize].is_none()
                        || pos[(full & !y) as usize]
                            .is_some_and(|ny| ny < pos[(full & !x) as usize].expect("checked"))
                });
            let keep_going = !consistent || go(n, full, pos, placed, axioms, outcome);
            *placed -= 1;
            pos[y as usize] = None;
            if !keep_going {
                return false;
            }
        }
        true
    }
    go(n, full, &mut pos, &mut placed, axioms, &mut outcome);
    Ok(outcome)
}

/// Calls `visit` with the ranks of every total preorder on `size` items
/// until it returns `false`. Blocks of a set partition are ranked in every
/// order.
pub fn for_each_weak_order(size: usize, visit: &mut dyn FnMut(&[u32]) -> bool) {
    let mut block = vec![0usize; size];
    let mut ranks = vec![0u32; size];
    let mut orders: Vec<Vec<Vec<usize>>> = vec![Vec::new(); size + 1];
    for (k, slot) in orders.iter_mut().enumerate().skip(1) {
        *slot = permutations(k);
    }
    fn go(
        i: usize,
        blocks: usize,
        block: &mut [usize],
        ranks: &mut [u32],
        orders: &[Vec<Vec<usize>>],
        visit: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if i == block.len() {
            for perm in &orders[blocks] {
                for (r, &b) in ranks.iter_mut().zip(block.iter()) {
                    *r = perm[b] as u32;
                }
                if !visit(ranks) {
                    return false;
                }
            }
            return true;
        }
        for b in 0..=blocks {
            block[i] = b;
            if !go(i + 1, blocks.max(b + 1), block, ranks, orders, visit) {
                return false;
            }
        }
        true
    }
    go(0, 0, &mut block, &mut ranks, &orders, visit);
}
