use proptest::prelude::*;
use scaled_boolean::belief::{
    check_axioms, derivation_counterexample_search, derivation_counterexample_search_with,
    for_each_weak_order, linear_counterexample_search, AxiomSet, BeliefAxiom, BeliefSystem,
    BeliefViolation,
};
use scaled_boolean::census::{enumerate_scalings, CensusFilter};
use scaled_boolean::scaling::AxiomViolation;

/// Naive check of complement reversal on every interval for a total
/// preorder given by ranks.
fn reverses_on_every_interval(n: usize, ranks: &[u32]) -> bool {
    let full = (1u32 << n) - 1;
    for b in 0..=full {
        for a in 0..=full {
            if a & !b != 0 {
                continue;
            }
            for x in 0..=full {
                for y in 0..=full {
                    let inside = |z: u32| z & a == a && z & !b == 0;
                    if !inside(x) || !inside(y) {
                        continue;
                    }
                    let (cx, cy) = ((a | (b & !x)) as usize, (a | (b & !y)) as usize);
                    let (x, y) = (x as usize, y as usize);
                    if ranks[x] < ranks[y] && ranks[cx] <= ranks[cy] {
                        return false;
                    }
                    if ranks[x] == ranks[y] && ranks[cx] != ranks[cy] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn weak_order_count_for_three_atoms() {
    let mut count = 0usize;
    for_each_weak_order(8, &mut |_| {
        count += 1;
        true
    });
    assert_eq!(count, 545_835);
}

#[test]
fn measure_systems_satisfy_the_axioms() {
    for weights in [[1, 1, 1], [1, 2, 3], [2, 3, 4], [1, 1, 5]] {
        let bs = BeliefSystem::from_weights(&weights).unwrap();
        assert!(check_axioms(&bs).passed());
    }
}

#[test]
fn equal_belief_in_nested_propositions_violates_monotonicity() {
    // {a} ⊂ {a,b} but both ranked equally.
    let bs = BeliefSystem::from_unconditional(2, vec![0, 1, 2, 1]).unwrap();
    let report = check_axioms(&bs);
    assert!(report.violations.contains(&BeliefViolation::Monotone {
        corpus: 3,
        x: 1,
        y: 3
    }));
}

#[test]
fn direct_sure_thing_violation() {
    // P(a) > P(b) unconditionally, but given {a} and given {b} the order
    // of a and b is reversed.
    let bs = BeliefSystem::from_unconditional(2, vec![0, 2, 1, 3])
        .unwrap()
        .with_conditional(0b01, vec![1, 0, 1, 0])
        .unwrap()
        .with_conditional(0b10, vec![0, 0, 1, 1])
        .unwrap();
    let report = check_axioms(&bs);
    assert!(report.violations.contains(&BeliefViolation::SureThing {
        z: 0b01,
        x: 0b01,
        y: 0b10
    }));
    assert!(report
        .violations
        .iter()
        .all(|v| v.axiom() != BeliefAxiom::Coherence));
}

#[test]
fn no_counterexample_on_two_and_three_atoms() {
    for (n, satisfying) in [(2, 3), (3, 31)] {
        let o = derivation_counterexample_search(n).unwrap();
        assert!(o.counterexample.is_none());
        assert_eq!(o.satisfying, satisfying);
        let strict =
            derivation_counterexample_search_with(n, AxiomSet::WITH_CONDITIONAL_CORPORA).unwrap();
        assert!(strict.counterexample.is_none());
        assert_eq!(strict.satisfying, satisfying);
    }
}

#[test]
fn satisfying_systems_are_the_linear_scalings() {
    // Oracle: labelled linear scalings from the census.
    let census = enumerate_scalings(3, CensusFilter::ALL).unwrap();
    let linear =
        census.labelled_counts.one_to_one_linear + census.labelled_counts.many_to_one_linear;
    assert_eq!(
        derivation_counterexample_search(3).unwrap().satisfying,
        linear
    );
}

#[test]
fn dropping_monotonicity_yields_counterexample() {
    for n in [2, 3] {
        let o =
            derivation_counterexample_search_with(n, AxiomSet::ALL.without(BeliefAxiom::Monotone))
                .unwrap();
        let c = o.counterexample.expect("counterexample");
        assert!(matches!(
            c.violation,
            Some(AxiomViolation::NotStrictlyIncreasing { .. })
        ));
    }
}

#[test]
fn dropping_sure_thing_yields_counterexample_on_four_atoms() {
    let o = linear_counterexample_search(4, AxiomSet::ALL.without(BeliefAxiom::SureThing)).unwrap();
    let c = o.counterexample.expect("counterexample");
    assert!(!reverses_on_every_interval(4, c.system.unconditional()));
    let intact = linear_counterexample_search(4, AxiomSet::ALL).unwrap();
    assert!(intact.counterexample.is_none());
    assert_eq!(intact.satisfying, 336);
}

#[test]
fn dropping_negation_yields_nothing() {
    let o = derivation_counterexample_search_with(3, AxiomSet::ALL.without(BeliefAxiom::Negation))
        .unwrap();
    assert!(o.counterexample.is_none());
    assert_eq!(o.satisfying, 31);
}

#[test]
fn conditional_order_tracks_joint_order() {
    for_each_weak_order(8, &mut |ranks| {
        let bs = BeliefSystem::from_unconditional(3, ranks.to_vec()).unwrap();
        if check_axioms(&bs).passed() {
            assert!(reverses_on_every_interval(3, ranks));
            for z in 0..8u32 {
                for x in 0..8u32 {
                    for y in 0..8u32 {
                        let joint = ranks[(x & z) as usize] <= ranks[(y & z) as usize];
                        let cond = bs.conditional(z)[x as usize] <= bs.conditional(z)[y as usize];
                        assert_eq!(joint, cond);
                    }
                }
            }
        }
        true
    });
}

proptest! {
    #[test]
    fn positive_measures_pass(weights in prop::collection::vec(1u32..50, 1..=4)) {
        let bs = BeliefSystem::from_weights(&weights).unwrap();
        prop_assert!(check_axioms(&bs).passed());
        let n = weights.len();
        prop_assert!(reverses_on_every_interval(n, bs.unconditional()));
    }
}
