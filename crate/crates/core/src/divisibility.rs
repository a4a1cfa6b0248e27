//! Dividedness, the tuple representation of divided scalings, agreeing
//! measures found by exact linear programming, and divisions built from
//! the corners of the polytope of agreeing measures.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{relative_complement_bits, submasks, Algebra, AlgebraError, Mask};
use crate::lp::{rank, solve_square, LinearProgram, LpOutcome, Sense, Q};
use crate::named::subset_names;
use crate::scale::{Scale, ScaleError, MAX_TABULATED_ATOMS};
use crate::scaling::{element_values, ClassId, Rel, Scaling, ScalingError, StrictOrder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivisibilityError {
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(
        "scaling is not divided: rho({x:#b}) < rho({y:#b}) but no proper part of {y:#b} matches"
    )]
    NotDivided { x: Mask, y: Mask },
    #[error("tuple representation disagrees with the scale on {x:#b}, {y:#b}")]
    OrderMismatch { x: Mask, y: Mask },
    #[error("equal or ordered images with wrong cardinalities: {x:#b}, {y:#b}")]
    CardinalityMismatch { x: Mask, y: Mask },
    #[error("the closed relaxation of the constraint system is empty")]
    EmptyPolytope,
    #[error(
        "embedding into the division does not preserve and reflect the order at {x:#b}, {y:#b}"
    )]
    EmbeddingNotFaithful { x: Mask, y: Mask },
    #[error("the order closure forces {0:#b} below itself")]
    ClosureCollapse(Mask),
    #[error("no positive measure satisfies the generating inequalities strictly")]
    GeneratorsInfeasible,
}

/// `None` if `s` is divided; otherwise the first `(x, y)` (by `y`, then
/// `x`, ascending bit patterns) with `ρ(x) < ρ(y)` and no `y₁ < y` of the
/// same image as `x`.
pub fn divided_counterexample(s: &Scaling) -> Option<(Mask, Mask)> {
    let full = s.algebra().full_mask();
    let k = s.class_count();
    let mut seen = vec![false; k];
    for y in 0..=full {
        let cy = s.class_of_bits(y).0;
        let mut marked = Vec::new();
        for sub in submasks(y).filter(|&sub| sub != y) {
            let c = s.class_of_bits(sub).0;
            if !seen[c] {
                seen[c] = true;
                marked.push(c);
            }
        }
        let witness = (0..k)
            .filter(|&c| !seen[c] && s.order().lt(c, cy))
            .map(|c| s.members(ClassId(c))[0])
            .min();
        for c in marked {
            seen[c] = false;
        }
        if let Some(x) = witness {
            return Some((x, y));
        }
    }
    None
}

pub fn is_divided(s: &Scaling) -> bool {
    divided_counterexample(s).is_none()
}

/// Which non-divided pathologies occur in a scale: an undefined `ζ + η`
/// with `ζ ≤ ∼η`, an undefined `ζ − η` with `ζ ≥ η`, and an undefined
/// `∼η_[ζ,θ]` with `ζ ≤ η ≤ θ`. The first two always occur together and
/// imply the third; the third can occur alone.
pub fn pathologies(scale: &Scale) -> [bool; 3] {
    let mut out = [false; 3];
    for a in scale.classes() {
        for b in scale.classes() {
            if scale.le(a, scale.comp(b)) && scale.add(a, b).is_err() {
                out[0] = true;
            }
            if scale.le(b, a) && scale.sub(a, b).is_err() {
                out[1] = true;
            }
            if scale.le(a, b) {
                for c in scale.classes() {
                    if scale.le(b, c) && scale.relative_complement(b, a, c) == Ok(None) {
                        out[2] = true;
                    }
                }
            }
        }
    }
    out
}

/// Partition of the atoms of a divided scaling into classes of atoms with
/// equal images; an element is represented by how many atoms it has in
/// each part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleRep {
    parts: Vec<Mask>,
}

impl TupleRep {
    pub fn parts(&self) -> &[Mask] {
        &self.parts
    }

    pub fn rep(&self, bits: Mask) -> Vec<u64> {
        self.parts
            .iter()
            .map(|&p| u64::from((bits & p).count_ones()))
            .collect()
    }
}

fn tuple_rel(a: &[u64], b: &[u64]) -> Rel {
    if a == b {
        Rel::Eq
    } else if a.iter().zip(b).all(|(x, y)| x <= y) {
        Rel::Lt
    } else if a.iter().zip(b).all(|(x, y)| x >= y) {
        Rel::Gt
    } else {
        Rel::Incomparable
    }
}

/// Builds the tuple representation of a divided scaling and checks, over
/// every pair of elements, the cardinality lemma and that the componentwise
/// order is exactly the scale order.
pub fn kleene_tuple_representation(s: &Scaling) -> Result<TupleRep, DivisibilityError> {
    if let Some((x, y)) = divided_counterexample(s) {
        return Err(DivisibilityError::NotDivided { x, y });
    }
    let n = s.algebra().atom_count();
    let mut parts: Vec<Mask> = Vec::new();
    for t in 0..n {
        let bit = 1 << t;
        match parts
            .iter_mut()
            .find(|p| s.class_of_bits(1 << p.trailing_zeros()) == s.class_of_bits(bit))
        {
            Some(p) => *p |= bit,
            None => parts.push(bit),
        }
    }
    let rep = TupleRep { parts };
    let full = s.algebra().full_mask();
    let tuples: Vec<Vec<u64>> = (0..=full).map(|x| rep.rep(x)).collect();
    for x in 0..=full {
        for y in 0..=full {
            let rel = s.rel_bits(x, y);
            let (cx, cy) = (x.count_ones(), y.count_ones());
            let cards_ok = match rel {
                Rel::Eq => cx == cy,
                Rel::Lt => cx < cy,
                _ => true,
            };
            if !cards_ok {
                return Err(DivisibilityError::CardinalityMismatch { x, y });
            }
            if tuple_rel(&tuples[x as usize], &tuples[y as usize]) != rel {
                return Err(DivisibilityError::OrderMismatch { x, y });
            }
        }
    }
    Ok(rep)
}

/// A strictly positive finitely additive measure given by its atom masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    masses: Vec<Q>,
}

impl Measure {
    /// Fails if some mass is not positive.
    pub fn new(masses: Vec<Q>) -> Option<Self> {
        masses
            .iter()
            .all(Signed::is_positive)
            .then_some(Self { masses })
    }

    pub fn masses(&self) -> &[Q] {
        &self.masses
    }

    pub fn value(&self, bits: Mask) -> Q {
        self.masses
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// Whether `μ` agrees with the scaling: equal images get equal
    /// measures, strictly ordered images strictly ordered measures.
    pub fn agrees_with(&self, s: &Scaling) -> bool {
        let values = element_values(&self.masses, s.algebra().size());
        let k = s.class_count();
        let reps: Vec<Mask> = (0..k).map(|c| s.members(ClassId(c))[0]).collect();
        (0..k).all(|c| {
            s.members(ClassId(c))
                .iter()
                .all(|&x| values[x as usize] == values[reps[c] as usize])
        }) && s
            .order()
            .pairs()
            .iter()
            .all(|&(a, b)| values[reps[a] as usize] < values[reps[b] as usize])
    }
}

/// One strict inequality `μ(lesser) < μ(greater)` for a pair of classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictRow {
    pub lesser: Mask,
    pub greater: Mask,
    pub classes: (ClassId, ClassId),
    /// Whether the class pair is a covering pair of the scale order.
    pub cover: bool,
}

/// Linear constraints on atom masses whose strict solutions are exactly the
/// agreeing measures: one strict inequality per ordered class pair (between
/// the smallest members), one equality per extra class member, positivity
/// of every atom, and total mass one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub atoms: usize,
    pub strict: Vec<StrictRow>,
    /// `μ(a) = μ(b)`.
    pub equalities: Vec<(Mask, Mask)>,
}

/// Coefficients of `μ(greater) − μ(lesser)`.
pub fn difference(n: usize, lesser: Mask, greater: Mask) -> Vec<i64> {
    (0..n)
        .map(|i| i64::from((greater >> i) & 1) - i64::from((lesser >> i) & 1))
        .collect()
}

pub fn build_constraints(s: &Scaling) -> ConstraintSystem {
    let k = s.class_count();
    let reps: Vec<Mask> = (0..k).map(|c| s.members(ClassId(c))[0]).collect();
    let covers = s.order().covers();
    let strict = s
        .order()
        .pairs()
        .into_iter()
        .map(|(a, b)| StrictRow {
            lesser: reps[a],
            greater: reps[b],
            classes: (ClassId(a), ClassId(b)),
            cover: covers.contains(&(a, b)),
        })
        .collect();
    let equalities = (0..k)
        .flat_map(|c| {
            let rep = reps[c];
            s.members(ClassId(c))[1..].iter().map(move |&m| (rep, m))
        })
        .collect();
    ConstraintSystem {
        atoms: s.algebra().atom_count(),
        strict,
        equalities,
    }
}

/// A strict-inequality row of a [`ConstraintSystem`] after merging rows
/// with identical coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedRow {
    pub lesser: Mask,
    pub greater: Mask,
    pub coeffs: Vec<i64>,
}

impl ConstraintSystem {
    /// Strict rows with distinct coefficient vectors. Of each group the row
    /// with the fewest atoms involved is kept (the disjoint reduced pair
    /// when it is present), ties going to the first.
    pub fn merged_strict_rows(&self) -> Vec<MergedRow> {
        let mut by_vector: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut out: Vec<MergedRow> = Vec::new();
        for row in &self.strict {
            let coeffs = difference(self.atoms, row.lesser, row.greater);
            let weight = (row.lesser | row.greater).count_ones();
            match by_vector.get(&coeffs) {
                Some(&i) => {
                    if weight < (out[i].lesser | out[i].greater).count_ones() {
                        out[i].lesser = row.lesser;
                        out[i].greater = row.greater;
                    }
                }
                None => {
                    by_vector.insert(coeffs.clone(), out.len());
                    out.push(MergedRow {
                        lesser: row.lesser,
                        greater: row.greater,
                        coeffs,
                    });
                }
            }
        }
        out
    }

    fn equality_vectors(&self) -> Vec<Vec<i64>> {
        self.equalities
            .iter()
            .map(|&(a, b)| difference(self.atoms, a, b))
            .collect()
    }

    /// Whether `masses` satisfies every constraint exactly (strictly where
    /// strict).
    pub fn is_satisfied_by(&self, masses: &[Q]) -> bool {
        let dot = |c: &[i64]| -> Q {
            c.iter()
                .zip(masses)
                .map(|(&a, m)| m * BigInt::from(a))
                .sum()
        };
        masses.len() == self.atoms
            && masses.iter().all(Signed::is_positive)
            && masses.iter().cloned().sum::<Q>() == Q::one()
            && self
                .strict
                .iter()
                .all(|r| dot(&difference(self.atoms, r.lesser, r.greater)).is_positive())
            && self.equality_vectors().iter().all(|e| dot(e).is_zero())
    }

    /// A point of the closed relaxation (strict rows and positivity made
    /// weak), if it is nonempty.
    pub fn closed_relaxation_point(&self) -> Option<Vec<Q>> {
        let n = self.atoms;
        let mut lp = LinearProgram::new(n);
        for r in self.merged_strict_rows() {
            lp.push(to_q(&r.coeffs), Sense::Ge, Q::zero());
        }
        for e in self.equality_vectors() {
            lp.push(to_q(&e), Sense::Eq, Q::zero());
        }
        lp.push(vec![Q::one(); n], Sense::Eq, Q::one());
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter()
        .map(|&a| Q::from_integer(BigInt::from(a)))
        .collect()
}

/// Nonnegative integer multipliers on the strict and positivity rows (and
/// arbitrary integer multipliers on the equalities) whose weighted sum of
/// coefficient vectors is zero. Since every strict row is positive at an
/// agreeing measure, such a combination proves `0 < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// `(row, multiplier)` on [`ConstraintSystem::merged_strict_rows`].
    pub strict: Vec<(MergedRow, BigInt)>,
    /// `(atom, multiplier)` on `μ(atom) > 0`.
    pub positivity: Vec<(usize, BigInt)>,
    /// `(equality, multiplier)`.
    pub equalities: Vec<((Mask, Mask), BigInt)>,
}

impl Certificate {
    /// Checks that the combination is nontrivial, sign-correct and sums to
    /// the zero vector.
    pub fn is_valid(&self, atoms: usize) -> bool {
        let mut total = vec![BigInt::zero(); atoms];
        let mut positive = false;
        for (row, y) in &self.strict {
            if y.is_negative() {
                return false;
            }
            positive |= y.is_positive();
            for (t, &c) in total.iter_mut().zip(&row.coeffs) {
                *t += y * c;
            }
        }
        for (atom, y) in &self.positivity {
            if y.is_negative() {
                return false;
            }
            positive |= y.is_positive();
            total[*atom] += y;
        }
        for ((a, b), z) in &self.equalities {
            let (a, b) = (*a, *b);
            for (t, c) in total.iter_mut().zip(difference(atoms, a, b)) {
                *t += z * c;
            }
        }
        positive && total.iter().all(Zero::is_zero)
    }
}

/// Result of [`find_agreeing_measure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Measurability {
    Measurable(Measure),
    NotMeasurable(Certificate),
}

/// Decides whether an agreeing measure exists.
///
/// Maximizes a slack `ε ≤ 1` with every strict row and every atom mass at
/// least `ε`; the system is strictly feasible iff the optimum is positive.
/// Otherwise a Motzkin-alternative certificate is computed by a second LP.
pub fn find_agreeing_measure(s: &Scaling) -> Measurability {
    find_agreeing_measure_for(&build_constraints(s))
}

pub fn find_agreeing_measure_for(system: &ConstraintSystem) -> Measurability {
    let n = system.atoms;
    let rows = system.merged_strict_rows();
    let equalities = system.equality_vectors();

    // Variables: m_0..m_{n-1}, ε (free).
    let mut lp = LinearProgram::new(n + 1);
    lp.free[n] = true;
    lp.objective[n] = Q::one();
    let with_eps = |coeffs: Vec<Q>| {
        let mut c = coeffs;
        c.push(-Q::one());
        c
    };
    for r in &rows {
        lp.push(with_eps(to_q(&r.coeffs)), Sense::Ge, Q::zero());
    }
    for t in 0..n {
        let mut unit = vec![Q::zero(); n];
        unit[t] = Q::one();
        lp.push(with_eps(unit), Sense::Ge, Q::zero());
    }
    for e in &equalities {
        let mut c = to_q(e);
        c.push(Q::zero());
        lp.push(c, Sense::Eq, Q::zero());
    }
    let mut total = vec![Q::one(); n];
    total.push(Q::zero());
    lp.push(total, Sense::Eq, Q::one());
    let mut cap = vec![Q::zero(); n];
    cap.push(Q::one());
    lp.push(cap, Sense::Le, Q::one());

    if let LpOutcome::Optimal { x, value } = lp.solve() {
        if value.is_positive() {
            let masses = x[..n].to_vec();
            debug_assert!(system.is_satisfied_by(&masses));
            return Measurability::Measurable(
                Measure::new(masses).expect("positive slack forces positive masses"),
            );
        }
    }

    // Certificate: y ≥ 0 on strict rows and positivity, z free on
    // equalities, Σ y_r a_r + y_t e_t + Σ z_e e_e = 0, Σ y = 1.
    let (nr, ne) = (rows.len(), equalities.len());
    let nv = nr + n + ne;
    let mut cert = LinearProgram::new(nv);
    for j in nr + n..nv {
        cert.free[j] = true;
    }
    for atom in 0..n {
        let mut c = vec![Q::zero(); nv];
        for (i, r) in rows.iter().enumerate() {
            c[i] = Q::from_integer(BigInt::from(r.coeffs[atom]));
        }
        c[nr + atom] = Q::one();
        for (i, e) in equalities.iter().enumerate() {
            c[nr + n + i] = Q::from_integer(BigInt::from(e[atom]));
        }
        cert.push(c, Sense::Eq, Q::zero());
    }
    let mut sum = vec![Q::one(); nr + n];
    sum.extend(std::iter::repeat_n(Q::zero(), ne));
    cert.push(sum, Sense::Eq, Q::one());
    let LpOutcome::Optimal { x, .. } = cert.solve() else {
        unreachable!("strict infeasibility implies a certificate exists");
    };
    let ints = to_integers(&x);
    let certificate = Certificate {
        strict: rows
            .into_iter()
            .zip(&ints[..nr])
            .filter(|(_, y)| !y.is_zero())
            .map(|(r, y)| (r, y.clone()))
            .collect(),
        positivity: (0..n)
            .filter(|&t| !ints[nr + t].is_zero())
            .map(|t| (t, ints[nr + t].clone()))
            .collect(),
        equalities: system
            .equalities
            .iter()
            .zip(&ints[nr + n..])
            .filter(|(_, z)| !z.is_zero())
            .map(|(&e, z)| (e, z.clone()))
            .collect(),
    };
    debug_assert!(certificate.is_valid(n));
    Measurability::NotMeasurable(certificate)
}

/// Smallest integer vector proportional to `v`.
fn to_integers(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|q| (q * Q::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|x| x / &gcd).collect()
}

/// Corners of the closed polytope of agreeing measures, sorted
/// lexicographically descending, with each corner's common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeVertices {
    pub vertices: Vec<Vec<Q>>,
    pub denominators: Vec<u64>,
}

/// Exact vertex enumeration of the closed relaxation: every choice of
/// tight inequality rows completing a basis of the equalities is solved and
/// kept if feasible. Only covering class pairs are used as inequality rows;
/// every other strict row is a sum of covering rows modulo the equalities.
pub fn enumerate_polytope_vertices(
    system: &ConstraintSystem,
) -> Result<PolytopeVertices, DivisibilityError> {
    let n = system.atoms;
    let mut equalities: Vec<Vec<Q>> = system.equality_vectors().iter().map(|e| to_q(e)).collect();
    equalities.push(vec![Q::one(); n]);
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut basis_rhs: Vec<Q> = Vec::new();
    for (i, e) in equalities.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(e.clone());
        if rank(&trial) > basis.len() {
            basis = trial;
            basis_rhs.push(if i + 1 == equalities.len() {
                Q::one()
            } else {
                Q::zero()
            });
        }
    }
    let mut inequalities: Vec<Vec<Q>> = Vec::new();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut candidates: Vec<Vec<i64>> = system
        .strict
        .iter()
        .filter(|r| r.cover)
        .map(|r| difference(n, r.lesser, r.greater))
        .collect();
    for t in 0..n {
        let mut unit = vec![0; n];
        unit[t] = 1;
        candidates.push(unit);
    }
    for c in candidates {
        if !seen.contains(&c) {
            inequalities.push(to_q(&c));
            seen.push(c);
        }
    }
    let all_strict: Vec<Vec<Q>> = system
        .strict
        .iter()
        .map(|r| to_q(&difference(n, r.lesser, r.greater)))
        .collect();
    let dot = |a: &[Q], b: &[Q]| -> Q { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let feasible = |p: &[Q]| {
        p.iter().all(|v| !v.is_negative())
            && all_strict.iter().all(|r| !dot(r, p).is_negative())
            && equalities[..equalities.len() - 1]
                .iter()
                .all(|e| dot(e, p).is_zero())
    };

    let need = n - basis.len();
    let mut vertices: Vec<Vec<Q>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(need);
    fn combos(
        start: usize,
        total: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == need {
            visit(chosen);
            return;
        }
        for i in start..total {
            if total - i < need - chosen.len() {
                break;
            }
            chosen.push(i);
            combos(i + 1, total, need, chosen, visit);
            chosen.pop();
        }
    }
    combos(0, inequalities.len(), need, &mut chosen, &mut |pick| {
        let mut a = basis.clone();
        let mut b = basis_rhs.clone();
        for &i in pick {
            a.push(inequalities[i].clone());
            b.push(Q::zero());
        }
        if let Some(p) = solve_square(&a, &b) {
            if feasible(&p) && !vertices.contains(&p) {
                vertices.push(p);
            }
        }
    });
    if vertices.is_empty() {
        return Err(DivisibilityError::EmptyPolytope);
    }
    vertices.sort_by(|a, b| b.cmp(a));
    let denominators = vertices
        .iter()
        .map(|v| {
            v.iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
                .to_u64()
                .expect("denominator fits in u64")
        })
        .collect();
    Ok(PolytopeVertices {
        vertices,
        denominators,
    })
}

/// Scaling induced by the convex set of all positive measures that satisfy
/// `μ(lesser) < μ(greater)` for every generator pair. The order is read off
/// the corners of the closure: `ρ(x) < ρ(y)` iff no corner puts `x` above
/// `y` and some corner puts it strictly below.
pub fn scaling_from_generators(
    algebra: &Algebra,
    generators: &[(Mask, Mask)],
) -> Result<Scaling, DivisibilityError> {
    let n = algebra.atom_count();
    for &(a, b) in generators {
        algebra.element(a)?;
        algebra.element(b)?;
    }
    let system = ConstraintSystem {
        atoms: n,
        strict: generators
            .iter()
            .map(|&(lesser, greater)| StrictRow {
                lesser,
                greater,
                classes: (ClassId(0), ClassId(0)),
                cover: true,
            })
            .collect(),
        equalities: Vec::new(),
    };
    if matches!(
        find_agreeing_measure_for(&system),
        Measurability::NotMeasurable(_)
    ) {
        return Err(DivisibilityError::GeneratorsInfeasible);
    }
    let corners = enumerate_polytope_vertices(&system)?;
    let s = Scaling::from_corner_measures(algebra, &corners.vertices)?;
    let names = subset_names(
        algebra,
        (0..s.class_count()).map(|c| s.members(ClassId(c))[0]),
    );
    Ok(s.with_names(names)?)
}

/// Generators of the three-atom scale whose polytope of measures has the
/// corners `(1/3,1/3,1/3)`, `(1/4,1/2,1/4)`, `(0,1/2,1/2)`, `(0,0,1)`:
/// `{a} < {b}`, `{a} < {c}`, `{b} < {a,c}`.
pub const POSET6_GENERATORS: [(Mask, Mask); 3] = [(0b001, 0b010), (0b001, 0b100), (0b010, 0b101)];

pub fn poset6() -> Scaling {
    let alg = Algebra::letters(3).expect("three atoms");
    scaling_from_generators(&alg, &POSET6_GENERATORS).expect("generators are consistent")
}

/// A divided scaling into which a measurable scaling embeds.
#[derive(Debug, Clone)]
pub struct Division {
    pub corners: PolytopeVertices,
    /// `σ({t})` for every original atom `t`.
    pub sigma: Vec<Vec<u64>>,
    /// Number of expanded atoms in each class (`d_c`).
    pub class_sizes: Vec<u64>,
    /// The divided scale: tuples below `class_sizes`.
    pub scale: Scale,
    /// Original class → tuple class.
    pub embedding: Vec<ClassId>,
    /// Expanded atoms as `(original atom, class, copy)`.
    pub expanded_atoms: Vec<(usize, usize, usize)>,
    /// The divided scaling on the expanded algebra, when it is small
    /// enough to tabulate.
    pub expanded: Option<Scaling>,
    /// Original atom → its copies in the expanded algebra.
    atom_images: Vec<Mask>,
}

impl Division {
    /// Image of an original element in the expanded algebra.
    pub fn embed_bits(&self, x: Mask) -> Mask {
        self.atom_images
            .iter()
            .enumerate()
            .filter(|(t, _)| x & (1 << t) != 0)
            .fold(0, |acc, (_, &m)| acc | m)
    }

    /// `ρ₁` of an original element, as a tuple.
    pub fn tuple_of_bits(&self, x: Mask) -> Vec<u64> {
        let mut out = vec![0; self.class_sizes.len()];
        for (t, s) in self.sigma.iter().enumerate() {
            if x & (1 << t) != 0 {
                for (o, v) in out.iter_mut().zip(s) {
                    *o += v;
                }
            }
        }
        out
    }
}

/// Outcome of [`construct_division`].
#[derive(Debug, Clone)]
pub enum DivisionOutcome {
    Divided(Box<Division>),
    Indivisible(Certificate),
}

/// Splits every atom according to the corners of the polytope of agreeing
/// measures: atom `t` gets `d_c · M_ct` copies in class `c`.
///
/// Validates that the original order is preserved and reflected by the
/// embedding and, when the expanded scaling is tabulated, that it is
/// divided and restricts to the original scaling.
pub fn construct_division(s: &Scaling) -> Result<DivisionOutcome, DivisibilityError> {
    let system = build_constraints(s);
    if let Measurability::NotMeasurable(c) = find_agreeing_measure_for(&system) {
        return Ok(DivisionOutcome::Indivisible(c));
    }
    let corners = enumerate_polytope_vertices(&system)?;
    let n = system.atoms;
    let m = corners.vertices.len();
    let sigma: Vec<Vec<u64>> = (0..n)
        .map(|t| {
            (0..m)
                .map(|c| {
                    (&corners.vertices[c][t] * Q::from_integer(corners.denominators[c].into()))
                        .to_integer()
                        .to_u64()
                        .expect("nonnegative integer entry")
                })
                .collect()
        })
        .collect();
    let class_sizes: Vec<u64> = (0..m).map(|c| sigma.iter().map(|s| s[c]).sum()).collect();
    let scale = Scale::from_tuple_sizes(&class_sizes)?;

    let tuple_of = |x: Mask| -> Vec<u64> {
        let mut out = vec![0; m];
        for (t, st) in sigma.iter().enumerate() {
            if x & (1 << t) != 0 {
                for (o, v) in out.iter_mut().zip(st) {
                    *o += v;
                }
            }
        }
        out
    };
    let k = s.class_count();
    let mut embedding = Vec::with_capacity(k);
    for c in 0..k {
        let members = s.members(ClassId(c));
        let t = tuple_of(members[0]);
        if let Some(&other) = members.iter().find(|&&x| tuple_of(x) != t) {
            return Err(DivisibilityError::EmbeddingNotFaithful {
                x: members[0],
                y: other,
            });
        }
        embedding.push(scale.class_of_tuple(&t).expect("tuple within class sizes"));
    }
    for a in 0..k {
        for b in 0..k {
            if s.order().rel(a, b) != scale.rel(embedding[a], embedding[b]) {
                return Err(DivisibilityError::EmbeddingNotFaithful {
                    x: s.members(ClassId(a))[0],
                    y: s.members(ClassId(b))[0],
                });
            }
        }
    }

    let mut expanded_atoms = Vec::new();
    for (t, st) in sigma.iter().enumerate() {
        for (c, &count) in st.iter().enumerate() {
            for copy in 0..count as usize {
                expanded_atoms.push((t, c, copy));
            }
        }
    }
    let mut atom_images = vec![0 as Mask; n];
    let expanded = if expanded_atoms.len() <= MAX_TABULATED_ATOMS {
        for (i, &(t, _, _)) in expanded_atoms.iter().enumerate() {
            atom_images[t] |= 1 << i;
        }
        let labels: Vec<String> = expanded_atoms
            .iter()
            .map(|&(t, c, copy)| format!("{}_{}.{}", s.algebra().labels()[t], c + 1, copy + 1))
            .collect();
        let alg = Algebra::powerset(&labels)?;
        let assignment: Vec<usize> = (0..alg.size() as Mask)
            .map(|u| {
                let mut v = vec![0u64; m];
                for (i, &(_, c, _)) in expanded_atoms.iter().enumerate() {
                    if u & (1 << i) != 0 {
                        v[c] += 1;
                    }
                }
                scale.class_of_tuple(&v).expect("count within class size").0
            })
            .collect();
        let order: Vec<(usize, usize)> = scale
            .classes()
            .flat_map(|a| {
                let t = scale.tuple(a).expect("tuple scale");
                let scale = &scale;
                (0..m).filter_map(move |c| {
                    let mut up = t.clone();
                    up[c] += 1;
                    scale.class_of_tuple(&up).map(|b| (a.0, b.0))
                })
            })
            .collect();
        let names = scale.names().to_vec();
        let expanded = Scaling::build(&alg, &assignment, &order, Some(names))?;
        if let Some((x, y)) = divided_counterexample(&expanded) {
            return Err(DivisibilityError::NotDivided { x, y });
        }
        Some(expanded)
    } else {
        None
    };
    let division = Division {
        corners,
        sigma,
        class_sizes,
        scale,
        embedding,
        expanded_atoms,
        expanded,
        atom_images,
    };
    if let Some(exp) = &division.expanded {
        let full = s.algebra().full_mask();
        for x in 0..=full {
            for y in 0..=full {
                if exp.rel_bits(division.embed_bits(x), division.embed_bits(y)) != s.rel_bits(x, y)
                {
                    return Err(DivisibilityError::EmbeddingNotFaithful { x, y });
                }
            }
        }
    }
    Ok(DivisionOutcome::Divided(Box::new(division)))
}

/// The four generating inequalities of the indivisible five-atom scale:
/// `{a,d} < {b,c}`, `{b,e} < {c,d}`, `{c} < {b,d}`, `{b,c,d} < {a,e}`.
pub const KPS_GENERATORS: [(Mask, Mask); 4] = [
    (0b01001, 0b00110),
    (0b10010, 0b01100),
    (0b00100, 0b01010),
    (0b01110, 0b10001),
];

/// Least strict order on `P({a,b,c,d,e})` containing strict inclusion and
/// the [`KPS_GENERATORS`], closed under transitivity and reversal of
/// relative complements in every interval.
pub fn kps_example() -> Result<Scaling, DivisibilityError> {
    let alg = Algebra::letters(5)?;
    let size = alg.size();
    let mut order = StrictOrder::empty(size);
    for x in 0..size as Mask {
        for y in 0..size as Mask {
            if x != y && x & !y == 0 {
                order.set_lt(x as usize, y as usize);
            }
        }
    }
    for &(a, b) in &KPS_GENERATORS {
        order.set_lt(a as usize, b as usize);
    }
    let full = alg.full_mask();
    loop {
        order.close();
        if let Some(x) = (0..size).find(|&x| order.lt(x, x)) {
            return Err(DivisibilityError::ClosureCollapse(x as Mask));
        }
        let mut added = false;
        for b in 0..=full {
            for a in submasks(b) {
                let free = b & !a;
                for xs in submasks(free) {
                    let x = a | xs;
                    for ys in submasks(free) {
                        let y = a | ys;
                        if order.lt(x as usize, y as usize) {
                            let (cx, cy) = (
                                relative_complement_bits(x, a, b),
                                relative_complement_bits(y, a, b),
                            );
                            if !order.lt(cy as usize, cx as usize) {
                                order.set_lt(cy as usize, cx as usize);
                                added = true;
                            }
                        }
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let assignment: Vec<usize> = (0..size).collect();
    let names = subset_names(&alg, 0..size as Mask);
    Ok(Scaling::build(
        &alg,
        &assignment,
        &order.pairs(),
        Some(names),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{boolean_identity, middlescale, uniform};
    use crate::testing::q;

    #[test]
    fn dividedness() {
        assert!(is_divided(&boolean_identity(3).unwrap()));
        assert!(is_divided(&uniform(2).unwrap()));
        assert_eq!(divided_counterexample(&middlescale()), Some((0b001, 0b100)));
    }

    #[test]
    fn kleene_tuples() {
        let id = kleene_tuple_representation(&boolean_identity(3).unwrap()).unwrap();
        assert_eq!(id.parts(), &[0b001, 0b010, 0b100]);
        assert_eq!(id.rep(0b101), vec![1, 0, 1]);
        let u = kleene_tuple_representation(&uniform(3).unwrap()).unwrap();
        assert_eq!(u.parts(), &[0b111]);
        assert_eq!(u.rep(0b110), vec![2]);
        assert!(matches!(
            kleene_tuple_representation(&middlescale()),
            Err(DivisibilityError::NotDivided { .. })
        ));
    }

    #[test]
    fn uniform_constraints_and_measure() {
        let s = uniform(3).unwrap();
        let c = build_constraints(&s);
        assert_eq!(
            c.equalities,
            vec![
                (0b001, 0b010),
                (0b001, 0b100),
                (0b011, 0b101),
                (0b011, 0b110)
            ]
        );
        match find_agreeing_measure(&s) {
            Measurability::Measurable(m) => {
                assert_eq!(m.masses(), &[q(1, 3), q(1, 3), q(1, 3)]);
                assert!(m.agrees_with(&s));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_atom_constraints() {
        let s = boolean_identity(1).unwrap();
        let c = build_constraints(&s);
        assert_eq!(c.strict.len(), 1);
        assert!(c.equalities.is_empty());
        match find_agreeing_measure(&s) {
            Measurability::Measurable(m) => assert_eq!(m.masses(), &[q(1, 1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_pair_vertices() {
        let v = enumerate_polytope_vertices(&build_constraints(&uniform(2).unwrap())).unwrap();
        assert_eq!(v.vertices, vec![vec![q(1, 2), q(1, 2)]]);
        assert_eq!(v.denominators, vec![2]);
    }

    #[test]
    fn split_atom_division() {
        // {a} < {b} on P({a,b}).
        let alg = Algebra::letters(2).unwrap();
        let s = scaling_from_generators(&alg, &[(0b01, 0b10)]).unwrap();
        let DivisionOutcome::Divided(d) = construct_division(&s).unwrap() else {
            panic!("measurable");
        };
        assert_eq!(
            d.corners.vertices,
            vec![vec![q(1, 2), q(1, 2)], vec![q(0, 1), q(1, 1)]]
        );
        assert_eq!(d.sigma, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(d.class_sizes, vec![2, 1]);
        let exp = d.expanded.as_ref().unwrap();
        assert_eq!(exp.algebra().labels(), &["a_1.1", "b_1.1", "b_2.1"]);
        assert!(is_divided(exp));
        assert!(!is_divided(&s));
    }
}
