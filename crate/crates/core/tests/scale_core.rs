use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use scaled_boolean::named::{
    balanced, boolean_identity, linear_middlescale, middlescale, MIDDLESCALE_ASSIGNMENT,
    MIDDLESCALE_ORDER,
};
use scaled_boolean::scaling::AxiomViolation;
use scaled_boolean::{
    verify_scale_map, Algebra, ClassId, Rel, Scale, Scaling, ScalingError, TableOp, UndefinedReason,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

const NAMES: [&str; 6] = ["0", "alpha", "beta", "gamma", "delta", "1"];

/// The addition table as printed, row by row, `X` for the cells whose
/// precondition fails.
const PUBLISHED_ADD: [[&str; 6]; 6] = [
    ["0", "alpha", "beta", "gamma", "delta", "1"],
    ["alpha", "beta", "?", "delta", "1", "X"],
    ["beta", "?", "X", "1", "X", "X"],
    ["gamma", "delta", "1", "X", "X", "X"],
    ["delta", "1", "X", "X", "X", "X"],
    ["1", "X", "X", "X", "X", "X"],
];

fn cell(scale: &Scale, v: Result<ClassId, UndefinedReason>) -> String {
    match v {
        Ok(c) => scale.name(c).to_string(),
        Err(UndefinedReason::Question) => "?".into(),
        Err(UndefinedReason::Boxtimes) => "X".into(),
    }
}

fn add_table_by_name(scale: &Scale) -> HashMap<(String, String), String> {
    let mut out = HashMap::new();
    for a in scale.classes() {
        for b in scale.classes() {
            out.insert(
                (scale.name(a).to_string(), scale.name(b).to_string()),
                cell(scale, scale.add(a, b)),
            );
        }
    }
    out
}

fn published_by_name() -> HashMap<(String, String), String> {
    let mut out = HashMap::new();
    for (i, row) in PUBLISHED_ADD.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            out.insert((NAMES[i].to_string(), NAMES[j].to_string()), c.to_string());
        }
    }
    out
}

#[test]
fn middlescale_order_is_the_unique_one_reproducing_the_table() {
    // Every strict order on the six classes: each of the 15 pairs is
    // unrelated, ordered one way or the other; keep the transitive ones.
    let alg = Algebra::letters(3).unwrap();
    let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
    let published = published_by_name();
    let pairs: Vec<(usize, usize)> = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .collect();
    let mut matches = Vec::new();
    let mut orders = 0u64;
    for code in 0..3u32.pow(15) {
        let mut rows = [0u8; 6];
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => rows[i] |= 1 << j,
                2 => rows[j] |= 1 << i,
                _ => {}
            }
            c /= 3;
        }
        let transitive = (0..6).all(|i| {
            (0..6)
                .filter(|&j| rows[i] & (1 << j) != 0)
                .all(|j| rows[j] & !rows[i] == 0)
        });
        if !transitive {
            continue;
        }
        orders += 1;
        let order: Vec<(usize, usize)> = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .filter(|&(i, j)| rows[i] & (1 << j) != 0)
            .collect();
        let Ok(s) = Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &order, Some(names.clone()))
        else {
            continue;
        };
        let scale = Scale::from_scaling(&s).unwrap();
        if add_table_by_name(&scale) == published {
            matches.push(order);
        }
    }
    // Number of labelled posets on six points.
    assert_eq!(orders, 130_023);
    assert_eq!(matches.len(), 1);
    let expected = Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &MIDDLESCALE_ORDER, None).unwrap();
    let found = Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &matches[0], None).unwrap();
    assert_eq!(expected.order(), found.order());
}

#[test]
fn dropping_alpha_below_gamma_breaks_complement_reversal() {
    let alg = Algebra::letters(3).unwrap();
    let mut order: Vec<_> = MIDDLESCALE_ORDER
        .iter()
        .copied()
        .filter(|&p| p != (1, 3))
        .collect();
    // Without any other change gamma is no longer above 0.
    let err = Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &order, None).unwrap_err();
    assert!(matches!(
        err,
        ScalingError::AxiomViolation(AxiomViolation::NotStrictlyIncreasing { x: 0, y: 0b100 })
    ));
    order.push((0, 3));
    let err = Scaling::build(&alg, &MIDDLESCALE_ASSIGNMENT, &order, None).unwrap_err();
    assert!(matches!(
        err,
        ScalingError::AxiomViolation(AxiomViolation::ComplementNotReversed { .. })
            | ScalingError::AxiomViolation(AxiomViolation::ComplementNotEqual { .. })
    ));
}

fn mid() -> (Scale, impl Fn(&str) -> ClassId) {
    let scale = Scale::from_scaling(&middlescale()).unwrap();
    let names = scale.names().to_vec();
    let lookup = move |n: &str| ClassId(names.iter().position(|m| m == n).unwrap());
    (scale, lookup)
}

#[test]
fn middlescale_operations() {
    let (s, c) = mid();
    assert_eq!(s.add(c("alpha"), c("alpha")), Ok(c("beta")));
    assert_eq!(s.add(c("alpha"), c("gamma")), Ok(c("delta")));
    assert_eq!(s.add(c("beta"), c("gamma")), Ok(c("1")));
    assert_eq!(s.add(c("alpha"), c("beta")), Err(UndefinedReason::Question));
    assert_eq!(s.add(c("beta"), c("beta")), Err(UndefinedReason::Boxtimes));
    for z in s.classes() {
        assert_eq!(s.add(z, c("0")), Ok(z));
        assert_eq!(s.sub(z, z), Ok(c("0")));
    }

    assert_eq!(s.dual_add(c("delta"), c("delta")), Ok(c("gamma")));
    assert_eq!(
        s.dual_add(c("delta"), c("gamma")),
        Err(UndefinedReason::Question)
    );
    for z in s.classes() {
        if let Ok(v) = s.dual_add(z, s.comp(z)) {
            assert_eq!(v, c("0"));
        }
    }

    assert_eq!(s.sub(c("beta"), c("alpha")), Ok(c("alpha")));
    assert_eq!(
        s.sub(c("gamma"), c("alpha")),
        Err(UndefinedReason::Question)
    );

    assert_eq!(
        s.relative_complement(c("alpha"), c("0"), c("beta"))
            .unwrap(),
        Some(c("alpha"))
    );
    assert_eq!(
        s.relative_complement(c("alpha"), c("0"), c("gamma"))
            .unwrap(),
        None
    );
    assert!(s
        .relative_complement(c("beta"), c("0"), c("gamma"))
        .is_err());
}

#[test]
fn middlescale_add_table_counts_and_rendering() {
    let (s, _) = mid();
    let text = s.render_table(TableOp::Add, false);
    let expected = "\
+     0     alpha beta  gamma delta 1
0     0     alpha beta  gamma delta 1
alpha alpha beta  ?     delta 1     X
beta  beta  ?     X     1     X     X
gamma gamma delta 1     X     X     X
delta delta 1     X     X     X     X
1     1     X     X     X     X     X
";
    assert_eq!(text, expected);
    let cells: Vec<&str> = text
        .lines()
        .skip(1)
        .flat_map(|l| l.split_whitespace().skip(1))
        .collect();
    assert_eq!(cells.len(), 36);
    assert_eq!(cells.iter().filter(|c| **c == "?").count(), 2);
    assert_eq!(cells.iter().filter(|c| **c == "X").count(), 16);
    assert_eq!(
        cells.iter().filter(|c| **c != "?" && **c != "X").count(),
        18
    );

    let unicode = s.render_table(TableOp::Add, true);
    assert!(unicode.starts_with("+ 0 α β γ δ 1\n"));
    assert!(unicode.contains("α β ? δ 1 ⊠"));
}

#[test]
fn dual_table_is_reflected_and_complemented() {
    // (∼ζ) ⊕ (∼η) = ∼(ζ + η), with undefined cells keeping their tag.
    let (s, _) = mid();
    for a in s.classes() {
        for b in s.classes() {
            let dual = s.dual_add(s.comp(a), s.comp(b));
            match s.add(a, b) {
                Ok(v) => assert_eq!(dual, Ok(s.comp(v))),
                Err(tag) => assert_eq!(dual, Err(tag)),
            }
        }
    }
    assert!(s
        .render_table(TableOp::DualAdd, false)
        .starts_with("(+)   0     alpha"));
}

#[test]
fn measure_scalings() {
    let alg = Algebra::letters(3).unwrap();
    let s = Scaling::from_measures(&alg, &[vec![q(1, 3), q(1, 3), q(1, 3)]]).unwrap();
    assert!(s.is_linear());
    assert_eq!(s.class_count(), 4);
    assert!(s.verify_axioms().passed());

    let two = [
        vec![q(2, 6), q(1, 6), q(3, 6)],
        vec![q(1, 6), q(2, 6), q(3, 6)],
    ];
    let s = Scaling::from_measures(&alg, &two).unwrap();
    // Oracle: compare the two measures directly.
    for x in 0..8u32 {
        for y in 0..8u32 {
            let mx: Vec<BigRational> = two
                .iter()
                .map(|m| {
                    (0..3)
                        .filter(|i| x & (1 << i) != 0)
                        .map(|i| m[i].clone())
                        .sum()
                })
                .collect();
            let my: Vec<BigRational> = two
                .iter()
                .map(|m| {
                    (0..3)
                        .filter(|i| y & (1 << i) != 0)
                        .map(|i| m[i].clone())
                        .sum()
                })
                .collect();
            let expected = if mx == my {
                Rel::Eq
            } else if mx.iter().zip(&my).all(|(a, b)| a <= b) {
                Rel::Lt
            } else if mx.iter().zip(&my).all(|(a, b)| a >= b) {
                Rel::Gt
            } else {
                Rel::Incomparable
            };
            assert_eq!(s.rel_bits(x, y), expected, "{x:b} vs {y:b}");
        }
    }
    assert_eq!(s.rel_bits(0b001, 0b010), Rel::Incomparable);
    assert_eq!(s.rel_bits(0b001, 0b100), Rel::Lt);
    assert_eq!(s.rel_bits(0b010, 0b100), Rel::Lt);
}

#[test]
fn identity_and_balanced_scalings_pass() {
    for n in 1..=4 {
        assert!(boolean_identity(n).unwrap().verify_axioms().passed());
    }
    let b = balanced(3).unwrap();
    let scale = Scale::from_scaling(&b).unwrap();
    // The complement of {a,b} in [{a}, {a,b,c}] is {a,c}.
    let cls = |bits| b.class_of_bits(bits);
    assert_eq!(
        scale
            .relative_complement(cls(0b011), cls(0b001), cls(0b111))
            .unwrap(),
        Some(cls(0b101))
    );
}

#[test]
fn scale_maps() {
    let mid_scale = Scale::from_scaling(&middlescale()).unwrap();
    let lin = Scale::from_scaling(&linear_middlescale()).unwrap();
    let identity: Vec<ClassId> = mid_scale.classes().collect();
    assert!(verify_scale_map(&mid_scale, &mid_scale, &identity).passed());
    // Class ids of both are named identically.
    let to_lin: Vec<ClassId> = mid_scale
        .classes()
        .map(|c| lin.class_by_name(mid_scale.name(c)).unwrap())
        .collect();
    assert!(verify_scale_map(&mid_scale, &lin, &to_lin).passed());
    // Collapsing alpha onto beta.
    let mut collapse = identity.clone();
    collapse[1] = ClassId(2);
    let report = verify_scale_map(&mid_scale, &mid_scale, &collapse);
    assert!(!report.passed());
}

fn measure_family() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (2usize..=5).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(1i64..6, n), 1..=3),
        )
    })
}

fn to_measures(weights: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    weights
        .iter()
        .map(|w| {
            let total: i64 = w.iter().sum();
            w.iter().map(|&x| q(x, total)).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_scales_satisfy_the_scale_laws((n, weights) in measure_family()) {
        let alg = Algebra::letters(n).unwrap();
        let s = Scaling::from_measures(&alg, &to_measures(&weights)).unwrap();
        prop_assert!(s.verify_axioms_exhaustive().passed());
        prop_assert!(s.verify_axioms_reduced().passed());
        let scale = Scale::from_scaling(&s).unwrap();
        for a in scale.classes() {
            prop_assert_eq!(scale.comp(scale.comp(a)), a);
            prop_assert_eq!(scale.add(a, scale.comp(a)), Ok(scale.one()));
            prop_assert_eq!(scale.dual_add(a, scale.comp(a)), Ok(scale.zero()));
            for b in scale.classes() {
                if scale.lt(a, b) {
                    prop_assert!(scale.lt(scale.comp(b), scale.comp(a)));
                }
                prop_assert_eq!(scale.add(a, b), scale.add(b, a));
                if let Ok(sum) = scale.add(a, b) {
                    prop_assert_eq!(scale.sub(sum, b), Ok(a));
                    prop_assert_eq!(
                        scale.dual_add(scale.comp(a), scale.comp(b)),
                        Ok(scale.comp(sum))
                    );
                } else if !scale.le(a, scale.comp(b)) {
                    prop_assert_eq!(scale.add(a, b), Err(UndefinedReason::Boxtimes));
                }
            }
        }
    }

    #[test]
    fn exhaustive_and_reduced_axiom_checks_agree(
        (n, weights) in measure_family(),
        extra in prop::collection::vec((0usize..32, 0usize..32), 0..3),
        merge in prop::option::of((0usize..32, 0usize..32)),
    ) {
        // Start from a valid scaling and perturb its order or its classes.
        let alg = Algebra::letters(n).unwrap();
        let s = Scaling::from_measures(&alg, &to_measures(&weights)).unwrap();
        let k = s.class_count();
        let mut assignment = s.assignment().to_vec();
        let mut order = s.order().pairs();
        for (a, b) in extra {
            order.push((a % k, b % k));
        }
        if let Some((a, b)) = merge {
            let (a, b) = (a % k, b % k);
            if a != b {
                let (keep, gone) = (a.min(b), a.max(b));
                for c in assignment.iter_mut() {
                    if *c == gone { *c = keep; } else if *c > gone { *c -= 1; }
                }
                order = order
                    .into_iter()
                    .map(|(x, y)| {
                        let f = |c: usize| if c == gone { keep } else if c > gone { c - 1 } else { c };
                        (f(x), f(y))
                    })
                    .filter(|(x, y)| x != y)
                    .collect();
            }
        }
        if let Ok(t) = Scaling::assemble(&alg, &assignment, &order, None) {
            prop_assert_eq!(
                t.verify_axioms_exhaustive().passed(),
                t.verify_axioms_reduced().passed()
            );
        }
    }
}
