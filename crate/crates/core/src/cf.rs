//! Continued-fraction arithmetic on linearly ordered divided scales: formal
//! quotients, the canonical measure, partial multiplication and the
//! product rule for conditional probability.
//!
//! Finite scales have no nonzero infinitesimals, so the Archimedean
//! hypothesis of the expansion algorithm holds automatically and is not
//! checked.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, Mask};
use crate::divisibility::Measure;
use crate::scale::{verify_scale_map, Scale, ScaleError};
use crate::scaling::{ClassId, Scaling, ScalingError};
use crate::Algebra;

type Q = BigRational;

/// Largest refinement chain built by [`measure_refinement`].
pub const MAX_REFINEMENT_STEPS: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("scale is not linearly ordered")]
    NotLinear,
    #[error("scale is not divided: class {greater} minus class {lesser} is undefined")]
    NotDivided { lesser: usize, greater: usize },
    #[error("denominator is the zero class")]
    ZeroDenominator,
    #[error("conditioning element has probability zero")]
    ConditionOnZero,
    #[error("measure is not additive on class {0} + class {1}")]
    NotAdditive(usize, usize),
    #[error("measure is not strictly increasing on class {0} < class {1}")]
    NotMonotone(usize, usize),
    #[error("masses must be positive, one per atom, with total 1")]
    InvalidMeasure,
    #[error("refinement needs {0} steps, above the limit")]
    RefinementTooLarge(BigInt),
    #[error("refinement map is not a scale map")]
    RefinementNotFaithful,
}

/// Entries `n₁; n₂, n₃, …` of a continued fraction. Every entry after the
/// first is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    entries: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(entries: Vec<u64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Convergents `h_i / k_i`, the last of which is the value.
    pub fn convergents(&self) -> Vec<Q> {
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        let mut out = Vec::with_capacity(self.entries.len());
        for &n in &self.entries {
            let n = BigInt::from(n);
            let h = &n * &h1 + &h0;
            let k = &n * &k1 + &k0;
            out.push(Q::new(h.clone(), k.clone()));
            (h0, h1) = (h1, h);
            (k0, k1) = (k1, k);
        }
        out
    }

    pub fn value(&self) -> Q {
        self.convergents().pop().unwrap_or_else(Q::zero)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, n) in self.entries.iter().enumerate() {
            match i {
                0 => write!(f, "{n}")?,
                1 => write!(f, "; {n}")?,
                _ => write!(f, ", {n}")?,
            }
        }
        write!(f, "]")
    }
}

fn require_linear_divided(s: &Scale) -> Result<(), CfError> {
    if !s.is_linear() {
        return Err(CfError::NotLinear);
    }
    for a in s.classes() {
        for b in s.classes() {
            if s.le(a, b) && s.sub(b, a).is_err() {
                return Err(CfError::NotDivided {
                    lesser: a.0,
                    greater: b.0,
                });
            }
        }
    }
    Ok(())
}

/// Formal expansion of `η / ζ`: repeatedly subtract the smaller value from
/// the larger as often as the scale allows, then swap.
pub fn continued_fraction(
    s: &Scale,
    eta: ClassId,
    zeta: ClassId,
) -> Result<ContinuedFraction, CfError> {
    s.check(eta)?;
    s.check(zeta)?;
    require_linear_divided(s)?;
    expand(s, eta, zeta)
}

fn expand(s: &Scale, eta: ClassId, zeta: ClassId) -> Result<ContinuedFraction, CfError> {
    if zeta == s.zero() {
        return Err(CfError::ZeroDenominator);
    }
    let mut entries = Vec::new();
    let mut alpha = zeta;
    let mut beta = eta;
    loop {
        let mut n = 0u64;
        while let Ok(next) = s.sub(beta, alpha) {
            beta = next;
            n += 1;
        }
        entries.push(n);
        if beta == s.zero() {
            return Ok(ContinuedFraction::new(entries));
        }
        std::mem::swap(&mut alpha, &mut beta);
    }
}

/// The unique measure with `μ(1) = 1` on a linear divided scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalMeasure {
    values: Vec<Q>,
    sorted: Vec<(Q, ClassId)>,
}

impl CanonicalMeasure {
    fn from_values(values: Vec<Q>) -> Self {
        let mut sorted: Vec<(Q, ClassId)> = values
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, ClassId(i)))
            .collect();
        sorted.sort();
        Self { values, sorted }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn value(&self, c: ClassId) -> &Q {
        &self.values[c.0]
    }

    /// The class with measure `q`, if any.
    pub fn inverse(&self, q: &Q) -> Option<ClassId> {
        self.sorted
            .binary_search_by(|(v, _)| v.cmp(q))
            .ok()
            .map(|i| self.sorted[i].1)
    }

    /// `ζη = μ⁻¹(μ(ζ)μ(η))` when the product is a value of `μ`.
    pub fn multiply(&self, zeta: ClassId, eta: ClassId) -> Option<ClassId> {
        self.inverse(&(self.value(zeta) * self.value(eta)))
    }
}

/// Evaluates `continued_fraction(η, 1)` for every class and checks that the
/// result is strictly increasing and additive on every defined sum.
pub fn canonical_measure(s: &Scale) -> Result<CanonicalMeasure, CfError> {
    require_linear_divided(s)?;
    let one = s.one();
    let values = s
        .classes()
        .map(|c| expand(s, c, one).map(|cf| cf.value()))
        .collect::<Result<Vec<_>, _>>()?;
    for a in s.classes() {
        for b in s.classes() {
            if s.lt(a, b) && values[a.0] >= values[b.0] {
                return Err(CfError::NotMonotone(a.0, b.0));
            }
            if let Ok(c) = s.add(a, b) {
                if values[c.0] != &values[a.0] + &values[b.0] {
                    return Err(CfError::NotAdditive(a.0, b.0));
                }
            }
        }
    }
    Ok(CanonicalMeasure::from_values(values))
}

/// Product of two classes through the canonical measure; `None` when the
/// product of their measures is not a value of the scale.
pub fn scale_multiply(s: &Scale, zeta: ClassId, eta: ClassId) -> Result<Option<ClassId>, CfError> {
    s.check(zeta)?;
    s.check(eta)?;
    Ok(canonical_measure(s)?.multiply(zeta, eta))
}

/// `P(x | z)`: the canonical measure of the restriction of `s` to the
/// relative algebra `[0, z]`, evaluated at `x ∧ z`.
pub fn conditional_probability(s: &Scaling, x: Mask, z: Mask) -> Result<Q, CfError> {
    let full = Scale::from_scaling(s)?;
    require_linear_divided(&full)?;
    conditional_unchecked(s, x, z).map(|(q, _)| q)
}

fn conditional_unchecked(s: &Scaling, x: Mask, z: Mask) -> Result<(Q, ContinuedFraction), CfError> {
    let alg = s.algebra();
    let xz = alg.element(x & z)?.bits();
    let z_el = alg.element(z)?;
    if s.class_of_bits(z) == s.zero_class() {
        return Err(CfError::ConditionOnZero);
    }
    let restricted = s.restrict(z_el)?;
    let scale = Scale::from_scaling(&restricted)?;
    let mu = canonical_measure(&scale)?;
    let c = restricted.class_of_bits(Scaling::restrict_bits(z, xz));
    let cf = expand(&scale, c, scale.one())?;
    Ok((mu.value(c).clone(), cf))
}

/// Both sides of `P(x ∧ z) = P(x | z) P(z)` together with the expansions
/// of the formal quotients `P(x ∧ z) / P(z)` and `P(x | z) / 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRule {
    pub joint: Q,
    pub conditional: Q,
    pub marginal: Q,
    pub joint_over_marginal: ContinuedFraction,
    pub conditional_over_one: ContinuedFraction,
}

impl ProductRule {
    pub fn identity_holds(&self) -> bool {
        self.joint == &self.conditional * &self.marginal
    }

    pub fn expansions_agree(&self) -> bool {
        self.joint_over_marginal == self.conditional_over_one
    }

    pub fn passed(&self) -> bool {
        self.identity_holds() && self.expansions_agree()
    }
}

pub fn verify_product_rule(s: &Scaling, x: Mask, z: Mask) -> Result<ProductRule, CfError> {
    let full = Scale::from_scaling(s)?;
    let mu = canonical_measure(&full)?;
    let (conditional, conditional_over_one) = conditional_unchecked(s, x, z)?;
    let joint_class = s.class_of_bits(x & z);
    let z_class = s.class_of_bits(z);
    Ok(ProductRule {
        joint: mu.value(joint_class).clone(),
        conditional,
        marginal: mu.value(z_class).clone(),
        joint_over_marginal: expand(&full, joint_class, z_class)?,
        conditional_over_one,
    })
}

/// The scale of a single rational measure embedded in the chain
/// `0 < 1/N < 2/N < … < 1`, where `N` is the common denominator of the
/// masses. The chain is the scale of the uniform measure on `N` atoms, into
/// which the original algebra embeds by sending atom `t` to a block of
/// `N·m(t)` atoms; it is linear and divided even when the measure's own
/// scale is not.
#[derive(Debug, Clone)]
pub struct MeasureRefinement {
    measure: Measure,
    scaling: Scaling,
    source: Scale,
    chain: Scale,
    steps: u64,
    blocks: Vec<u64>,
    map: Vec<ClassId>,
}

pub fn measure_refinement(alg: &Algebra, masses: Vec<Q>) -> Result<MeasureRefinement, CfError> {
    if masses.len() != alg.atom_count()
        || masses.iter().any(|m| !m.is_positive())
        || masses.iter().sum::<Q>() != Q::one()
    {
        return Err(CfError::InvalidMeasure);
    }
    let denominator = masses
        .iter()
        .fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
    let steps = denominator
        .to_u64()
        .filter(|&n| n <= MAX_REFINEMENT_STEPS)
        .ok_or_else(|| CfError::RefinementTooLarge(denominator.clone()))?;
    let scaling = Scaling::from_measures(alg, std::slice::from_ref(&masses))?;
    let source = Scale::from_scaling(&scaling)?;
    let chain = Scale::from_tuple_sizes(&[steps])?;
    let measure = Measure::new(masses).ok_or(CfError::InvalidMeasure)?;
    let scaled = |q: Q| -> u64 {
        (q * Q::from_integer(denominator.clone()))
            .to_integer()
            .to_u64()
            .expect("fits the chain")
    };
    let blocks = measure.masses().iter().cloned().map(scaled).collect();
    let map = (0..scaling.class_count())
        .map(|c| {
            let rep = scaling.members(ClassId(c))[0];
            chain
                .class_of_tuple(&[scaled(measure.value(rep))])
                .expect("value within the chain")
        })
        .collect();
    let out = MeasureRefinement {
        measure,
        scaling,
        source,
        chain,
        steps,
        blocks,
        map,
    };
    if !verify_scale_map(&out.source, &out.chain, &out.map).passed() {
        return Err(CfError::RefinementNotFaithful);
    }
    Ok(out)
}

impl MeasureRefinement {
    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn source(&self) -> &Scale {
        &self.source
    }

    pub fn chain(&self) -> &Scale {
        &self.chain
    }

    /// The common denominator `N`.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of chain atoms each original atom is split into.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn map(&self) -> &[ClassId] {
        &self.map
    }

    /// The chain's canonical measure pulled back to the source classes.
    pub fn pulled_back_measure(&self) -> Result<Vec<Q>, CfError> {
        let mu = canonical_measure(&self.chain)?;
        Ok(self.map.iter().map(|&c| mu.value(c).clone()).collect())
    }

    /// Expansion of `η / ζ` for source classes, computed in the chain.
    pub fn continued_fraction(
        &self,
        eta: ClassId,
        zeta: ClassId,
    ) -> Result<ContinuedFraction, CfError> {
        self.source.check(eta)?;
        self.source.check(zeta)?;
        continued_fraction(&self.chain, self.map[eta.0], self.map[zeta.0])
    }

    /// Product of two source classes, defined when the product of their
    /// measures is the measure of a source class.
    pub fn multiply(&self, zeta: ClassId, eta: ClassId) -> Result<Option<ClassId>, CfError> {
        self.source.check(zeta)?;
        self.source.check(eta)?;
        let mu = canonical_measure(&self.chain)?;
        Ok(mu
            .multiply(self.map[zeta.0], self.map[eta.0])
            .and_then(|p| self.map.iter().position(|&c| c == p))
            .map(ClassId))
    }

    /// Image of `x` in the algebra of `N` atoms, where atom `t` occupies
    /// the `t`-th block. `None` when `N` exceeds the algebra size limit.
    pub fn embed_bits(&self, x: Mask) -> Option<Mask> {
        if self.steps > 16 {
            return None;
        }
        let mut out = 0;
        let mut offset = 0;
        for (t, &w) in self.blocks.iter().enumerate() {
            if x & (1 << t) != 0 {
                out |= ((1 << w) - 1) << offset;
            }
            offset += w;
        }
        Some(out)
    }
}
