//! Small named scalings used throughout the tests and the command line.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{Algebra, Mask};
use crate::scaling::{Scaling, ScalingError};

/// Class assignment of the six-class scale on `P({a,b,c})`:
/// `∅ → 0`, `{a},{b} → α`, `{a,b} → β`, `{c} → γ`, `{a,c},{b,c} → δ`,
/// `{a,b,c} → 1`.
pub const MIDDLESCALE_ASSIGNMENT: [usize; 8] = [0, 1, 1, 2, 3, 4, 4, 5];

/// Covering relations of the middlescale order.
pub const MIDDLESCALE_ORDER: [(usize, usize); 6] = [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)];

/// The six-class scaling with `β` and `γ` incomparable.
pub fn middlescale() -> Scaling {
    let alg = Algebra::letters(3).expect("three atoms");
    Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &MIDDLESCALE_ORDER, None)
        .expect("middlescale is a scaling")
}

/// The middlescale with `β < γ` added, making it linear.
pub fn linear_middlescale() -> Scaling {
    let alg = Algebra::letters(3).expect("three atoms");
    let mut order = MIDDLESCALE_ORDER.to_vec();
    order.push((2, 3));
    Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &order, None)
        .expect("linear middlescale is a scaling")
}

/// Class assignment of a seven-class scale on `P({a,b,c})` with
/// `ρ{b} = ρ{a,c}`: `{a} → α`, `{c} → β`, `{b},{a,c} → γ`, `{a,b} → δ`,
/// `{b,c} → ε`.
pub const QUASICOMPLEMENT_ASSIGNMENT: [usize; 8] = [0, 1, 3, 4, 2, 3, 5, 6];

/// Covering relations of the quasicomplement order: `α, β < γ < δ, ε`.
pub const QUASICOMPLEMENT_ORDER: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 3),
    (2, 3),
    (3, 4),
    (3, 5),
    (4, 6),
    (5, 6),
];

/// A scale where `α + (∼γ ⊕ ε) = γ` and `β + (∼γ ⊕ δ) = γ` exist although
/// the relative complements `∼γ` in `[α, ε]` and `[β, δ]` do not. The
/// order is reconstructed from those properties by search over all
/// scalings on three atoms; it is the only one up to isomorphism with
/// `α, β` incomparable.
pub fn quasicomplement() -> Scaling {
    let alg = Algebra::letters(3).expect("three atoms");
    Scaling::build(
        &alg,
        &QUASICOMPLEMENT_ASSIGNMENT,
        &QUASICOMPLEMENT_ORDER,
        None,
    )
    .expect("quasicomplement is a scaling")
}

/// Class names for a one-to-one scaling: `0`, `1`, and the members of
/// every other subset written without braces (`a`, `ab`, …).
pub fn subset_names(alg: &Algebra, masks: impl Iterator<Item = Mask>) -> Vec<String> {
    let full = alg.full_mask();
    masks
        .map(|m| {
            if m == 0 {
                "0".to_string()
            } else if m == full {
                "1".to_string()
            } else {
                alg.members(m).map(|i| alg.labels()[i].as_str()).collect()
            }
        })
        .collect()
}

/// The identity scaling on `P(letters)`, ordered by `A < B` iff
/// `|A| < |B|`.
pub fn balanced(n: usize) -> Result<Scaling, ScalingError> {
    let alg = Algebra::letters(n)?;
    let size = alg.size();
    let assignment: Vec<usize> = (0..size).collect();
    let mut order = Vec::new();
    for x in 0..size {
        for y in 0..size {
            if (x as Mask).count_ones() < (y as Mask).count_ones() {
                order.push((x, y));
            }
        }
    }
    let names = subset_names(&alg, 0..size as Mask);
    Scaling::build(&alg, &assignment, &order, Some(names))
}

/// The identity scaling on `P(letters)` ordered by inclusion.
pub fn boolean_identity(n: usize) -> Result<Scaling, ScalingError> {
    let alg = Algebra::letters(n)?;
    let size = alg.size();
    let assignment: Vec<usize> = (0..size).collect();
    let mut order = Vec::new();
    for x in 0..size as Mask {
        for t in 0..n {
            if x & (1 << t) == 0 {
                order.push((x as usize, (x | (1 << t)) as usize));
            }
        }
    }
    let names = subset_names(&alg, 0..size as Mask);
    Scaling::build(&alg, &assignment, &order, Some(names))
}

/// The scaling of the uniform measure on `n` atoms: `ρ(x) = |x|`.
pub fn uniform(n: usize) -> Result<Scaling, ScalingError> {
    let alg = Algebra::letters(n)?;
    let one = BigRational::new(BigInt::from(1), BigInt::from(n));
    let names = (0..=n).map(|i| i.to_string()).collect();
    Scaling::from_measures(&alg, &[vec![one; n]])?.with_names(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::{ClassId, Rel};

    #[test]
    fn middlescale_classes() {
        let s = middlescale();
        assert_eq!(s.names(), &["0", "alpha", "beta", "gamma", "delta", "1"]);
        assert_eq!(s.members(ClassId(1)), &[0b001, 0b010]);
        assert_eq!(s.members(ClassId(3)), &[0b100]);
        assert_eq!(s.order().rel(2, 3), Rel::Incomparable);
        assert!(linear_middlescale().is_linear());
    }

    #[test]
    fn balanced_is_not_a_lattice() {
        let s = balanced(3).unwrap();
        let a = s.class_of_bits(0b001);
        let b = s.class_of_bits(0b010);
        let upper: Vec<usize> = (0..s.class_count())
            .filter(|&c| s.order().le(a.0, c) && s.order().le(b.0, c))
            .collect();
        let least: Vec<&usize> = upper
            .iter()
            .filter(|&&c| upper.iter().all(|&d| s.order().le(c, d)))
            .collect();
        assert!(least.is_empty());
        assert_eq!(s.name(a), "a");
    }

    #[test]
    fn quasicomplement_properties() {
        use crate::scale::Scale;
        let s = quasicomplement();
        assert_eq!(
            s.names(),
            &["0", "alpha", "beta", "gamma", "delta", "epsilon", "1"]
        );
        let sc = Scale::from_scaling(&s).unwrap();
        let [a, b, g, d, e] = [1, 2, 3, 4, 5].map(ClassId);
        assert!(sc.lt(a, g) && sc.lt(g, e) && sc.lt(b, g) && sc.lt(g, d));
        assert_eq!(sc.relative_complement(g, a, e), Ok(None));
        assert_eq!(sc.relative_complement(g, b, d), Ok(None));
        let formula = |lo, hi| sc.dual_add(sc.comp(g), hi).and_then(|x| sc.add(lo, x));
        assert_eq!(formula(a, e), Ok(g));
        assert_eq!(formula(b, d), Ok(g));
    }

    #[test]
    fn uniform_names() {
        let s = uniform(3).unwrap();
        assert_eq!(s.names(), &["0", "1", "2", "3"]);
    }
}
