//! Classical (Kolmogorovian) representability of coincidence statistics.
//!
//! A behavior is classical when it is a mixture of the 16 deterministic
//! hidden-variable assignments `lambda: {1,2,3,4} -> {+1,-1}`. Two questions
//! are answered by linear programming:
//!
//! * [`kolmogorov_feasibility`]: does some distribution over the 16 atoms
//!   reproduce every pairwise joint distribution of a table?
//! * [`correlation_membership`]: does a correlation vector lie in the convex
//!   hull of the 8 deterministic correlation vertices?
//!
//! [`chsh_facets`] evaluates the 8 CHSH functionals directly. It never feeds
//! the LP decisions; it supplies witnesses and serves as the independent
//! cross-check in [`facet_cross_check`].

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{map_reduce_chunks, Execution, CHUNK};
use crate::lp::{LinearProgram, LpOutcome};
use crate::rng::{substream, STREAM_CROSS_CHECK};
use crate::scalar::Scalar;
use crate::scenario::{
    classical_bound, correlation_vector, BehaviorTable, CoincidenceDistribution, CorrelationVector, Outcome, Pair,
};

/// Deterministic outcome assignment for the four observables.
///
/// Atoms are numbered 0..16 lexicographically in `(l1, l2, l3, l4)` with `+`
/// ordered before `-`; `l1` is the most significant position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HiddenVariableAtom(u8);

impl HiddenVariableAtom {
    pub const COUNT: usize = 16;

    pub fn new(index: u8) -> Option<Self> {
        (index < 16).then_some(HiddenVariableAtom(index))
    }

    pub fn all() -> impl Iterator<Item = HiddenVariableAtom> {
        (0..16).map(HiddenVariableAtom)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// `assignment()[k]` is the value of observable `k + 1`.
    pub fn assignment(self) -> [i8; 4] {
        [3, 2, 1, 0].map(|bit| if self.0 >> bit & 1 == 0 { 1 } else { -1 })
    }

    pub fn outcome(self, observable: u8) -> Outcome {
        Outcome::from_sign(self.assignment()[observable as usize - 1])
    }

    pub fn from_assignment(signs: [i8; 4]) -> Self {
        let idx = signs.iter().fold(0u8, |acc, &s| (acc << 1) | u8::from(s < 0));
        HiddenVariableAtom(idx)
    }

    /// Correlation signs `(l1 l3, l1 l4, l2 l3, l2 l4)`.
    pub fn correlation_signs(self) -> [i8; 4] {
        let l = self.assignment();
        [l[0] * l[2], l[0] * l[3], l[1] * l[2], l[1] * l[3]]
    }

    /// `"+-++"` style label.
    pub fn label(self) -> String {
        self.assignment().iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }

    pub fn from_label(label: &str) -> Option<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 4 {
            return None;
        }
        let mut signs = [0i8; 4];
        for (s, c) in signs.iter_mut().zip(chars) {
            *s = match c {
                '+' => 1,
                '-' => -1,
                _ => return None,
            };
        }
        Some(Self::from_assignment(signs))
    }
}

impl fmt::Display for HiddenVariableAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sign patterns of the 8 distinct deterministic correlation vectors, in
/// order of first appearance along the atom enumeration.
pub fn vertex_signs() -> Vec<[i8; 4]> {
    let mut out: Vec<[i8; 4]> = Vec::with_capacity(8);
    for atom in HiddenVariableAtom::all() {
        let s = atom.correlation_signs();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

pub fn deterministic_vertices<T: Scalar>() -> Vec<CorrelationVector<T>> {
    vertex_signs().into_iter().map(CorrelationVector::from_signs).collect()
}

/// `"(1,-1,-1,1)"` style label for a vertex.
pub fn vertex_label(signs: [i8; 4]) -> String {
    format!("({},{},{},{})", signs[0], signs[1], signs[2], signs[3])
}

pub fn parse_vertex_label(label: &str) -> Option<[i8; 4]> {
    let inner = label.trim().strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<i8> = inner.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    let signs: [i8; 4] = parts.try_into().ok()?;
    signs.iter().all(|s| s.abs() == 1).then_some(signs)
}

/// One CHSH functional `s . E` with `s1 s2 s3 s4 = -1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChshFacet<T: Scalar> {
    pub signs: [i8; 4],
    pub value: T,
}

/// The 8 sign patterns with an odd number of minus signs, lexicographic with
/// `+` first.
pub fn chsh_sign_patterns() -> Vec<[i8; 4]> {
    (0..16u8)
        .map(|bits| [3, 2, 1, 0].map(|b| if bits >> b & 1 == 0 { 1i8 } else { -1 }))
        .filter(|s| s.iter().map(|&x| x as i32).product::<i32>() == -1)
        .collect()
}

pub fn chsh_facets<T: Scalar>(e: &CorrelationVector<T>) -> Vec<ChshFacet<T>> {
    let comps = e.components();
    chsh_sign_patterns()
        .into_iter()
        .map(|signs| {
            let value = signs
                .iter()
                .zip(&comps)
                .fold(T::zero(), |acc, (&s, c)| if s > 0 { acc + c.clone() } else { acc - c.clone() });
            ChshFacet { signs, value }
        })
        .collect()
}

/// Facet with the largest value (first in pattern order on ties).
pub fn max_chsh_facet<T: Scalar>(e: &CorrelationVector<T>) -> ChshFacet<T> {
    let mut best: Option<ChshFacet<T>> = None;
    for f in chsh_facets(e) {
        if best.as_ref().is_none_or(|b| f.value > b.value) {
            best = Some(f);
        }
    }
    best.expect("eight facets")
}

/// Evidence that no classical model exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum Witness<T: Scalar> {
    /// A CHSH functional exceeding its classical bound 2.
    ChshFacet { signs: [i8; 4], value: T, bound: T },
    /// Two pairs disagree on the up-probability of a shared observable.
    MarginalInconsistency { observable: u8, pairs: [Pair; 2], up_probabilities: [T; 2] },
    /// Linear functional over the LP constraint rows that is at most `bound`
    /// on every classical point and equals `value > bound` on the input.
    SeparatingFunctional { coefficients: Vec<T>, value: T, bound: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase", bound = "")]
pub enum ClassicalityVerdict<T: Scalar> {
    /// Convex weights keyed by atom label (`"+-++"`) or vertex label
    /// (`"(1,1,-1,-1)"`); zero weights are omitted.
    Classical {
        weights: BTreeMap<String, T>,
    },
    NonClassical {
        witness: Witness<T>,
    },
}

impl<T: Scalar> ClassicalityVerdict<T> {
    pub fn is_classical(&self) -> bool {
        matches!(self, ClassicalityVerdict::Classical { .. })
    }

    pub fn weights(&self) -> Option<&BTreeMap<String, T>> {
        match self {
            ClassicalityVerdict::Classical { weights } => Some(weights),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        match self {
            ClassicalityVerdict::NonClassical { witness } => Some(witness),
            _ => None,
        }
    }
}

fn chsh_witness<T: Scalar>(e: &CorrelationVector<T>) -> Option<Witness<T>> {
    let best = max_chsh_facet(e);
    best.value.exceeds(&classical_bound()).then(|| Witness::ChshFacet {
        signs: best.signs,
        value: best.value,
        bound: classical_bound(),
    })
}

fn keep_nonzero<T: Scalar>(entries: impl IntoIterator<Item = (String, T)>) -> BTreeMap<String, T> {
    entries.into_iter().filter(|(_, w)| !w.is_negligible()).collect()
}

/// Hull membership of `e` in the correlation polytope.
///
/// Solves `lambda_k = t + s_k`, `sum lambda_k = 1`, `sum lambda_k v_k = e`,
/// `t, s >= 0`, maximizing `t`. The optimum is the most balanced convex
/// decomposition; it is uniform when `e = 0`. Because the vertices come in
/// antipodal pairs, `sum v_k = 0` and `t` drops out of the moment rows.
pub fn correlation_membership<T: Scalar>(e: &CorrelationVector<T>) -> ClassicalityVerdict<T> {
    let verts = vertex_signs();
    let k = verts.len();
    let comps = e.components();
    let mut a = Vec::with_capacity(5);
    let mut b = Vec::with_capacity(5);
    for (c, target) in comps.iter().enumerate() {
        let mut row = vec![T::zero()];
        row.extend(verts.iter().map(|v| T::from_i64(v[c] as i64)));
        a.push(row);
        b.push(target.clone());
    }
    let mut norm = vec![T::from_i64(k as i64)];
    norm.extend((0..k).map(|_| T::one()));
    a.push(norm);
    b.push(T::one());

    let mut objective = vec![T::zero(); k + 1];
    objective[0] = T::one();
    match LinearProgram::new(a, b).maximize(objective).solve() {
        LpOutcome::Optimal { x, .. } => {
            let t = x[0].clone();
            let weights =
                keep_nonzero(verts.iter().zip(&x[1..]).map(|(v, s)| (vertex_label(*v), t.clone() + s.clone())));
            ClassicalityVerdict::Classical { weights }
        }
        LpOutcome::Infeasible { farkas } => {
            let witness = chsh_witness(e).unwrap_or_else(|| {
                // f(x) = y_E . x separates: f(v_k) <= -y_0 < f(e)
                let coefficients = farkas[..4].to_vec();
                let value = coefficients.iter().zip(&comps).fold(T::zero(), |acc, (y, c)| acc + y.clone() * c.clone());
                Witness::SeparatingFunctional { coefficients, value, bound: -farkas[4].clone() }
            });
            ClassicalityVerdict::NonClassical { witness }
        }
        LpOutcome::Unbounded => unreachable!("t is bounded by 1/8"),
    }
}

/// Rows of the joint-distribution LP: the normalization row followed by the
/// indicator rows of each `(pair, outcome pair)`, in pair order and
/// `uu, ud, du, dd` order.
fn joint_rows<T: Scalar>() -> Vec<Vec<T>> {
    let mut rows = vec![vec![T::one(); HiddenVariableAtom::COUNT]];
    for pair in Pair::ALL {
        for (l, r) in [
            (Outcome::Up, Outcome::Up),
            (Outcome::Up, Outcome::Down),
            (Outcome::Down, Outcome::Up),
            (Outcome::Down, Outcome::Down),
        ] {
            rows.push(
                HiddenVariableAtom::all()
                    .map(
                        |a| {
                            if a.outcome(pair.left()) == l && a.outcome(pair.right()) == r {
                                T::one()
                            } else {
                                T::zero()
                            }
                        },
                    )
                    .collect(),
            );
        }
    }
    rows
}

/// Returns the first observable whose up-probability differs between the
/// two pairs that measure it.
pub fn marginal_inconsistency<T: Scalar>(table: &BehaviorTable<T>) -> Option<Witness<T>> {
    let checks: [(u8, Pair, Pair, bool); 4] = [
        (1, Pair::P13, Pair::P14, true),
        (2, Pair::P23, Pair::P24, true),
        (3, Pair::P13, Pair::P23, false),
        (4, Pair::P14, Pair::P24, false),
    ];
    checks.into_iter().find_map(|(obs, p, q, left)| {
        let up = |d: &CoincidenceDistribution<T>| if left { d.left_up() } else { d.right_up() };
        let (a, b) = (up(table.get(p)), up(table.get(q)));
        (!a.approx_eq(&b)).then_some(Witness::MarginalInconsistency {
            observable: obs,
            pairs: [p, q],
            up_probabilities: [a, b],
        })
    })
}

/// Searches for a distribution over the 16 atoms that reproduces every
/// pairwise joint distribution of `table`.
///
/// When none exists the witness is, in order of preference, a violated CHSH
/// facet, a marginal inconsistency, or the LP's separating functional.
pub fn kolmogorov_feasibility<T: Scalar>(table: &BehaviorTable<T>) -> ClassicalityVerdict<T> {
    let a = joint_rows::<T>();
    let mut b = vec![T::one()];
    for (_, d) in table.iter() {
        b.extend(d.entries());
    }
    match LinearProgram::new(a, b.clone()).solve() {
        LpOutcome::Optimal { x, .. } => ClassicalityVerdict::Classical {
            weights: keep_nonzero(HiddenVariableAtom::all().zip(x).map(|(atom, w)| (atom.label(), w))),
        },
        LpOutcome::Infeasible { farkas } => {
            let witness = chsh_witness(&correlation_vector(table))
                .or_else(|| marginal_inconsistency(table))
                .unwrap_or_else(|| {
                    let value = farkas.iter().zip(&b).fold(T::zero(), |acc, (y, v)| acc + y.clone() * v.clone());
                    Witness::SeparatingFunctional { coefficients: farkas, value, bound: T::zero() }
                });
            ClassicalityVerdict::NonClassical { witness }
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has no objective"),
    }
}

/// Behavior table induced by a distribution over the atoms
/// (`mu[atom.index()]`).
pub fn induced_table<T: Scalar>(mu: &[T]) -> BehaviorTable<T> {
    assert_eq!(mu.len(), HiddenVariableAtom::COUNT);
    let ds = Pair::ALL.map(|pair| {
        let mut e = [T::zero(), T::zero(), T::zero(), T::zero()];
        for atom in HiddenVariableAtom::all() {
            let slot = match (atom.outcome(pair.left()), atom.outcome(pair.right())) {
                (Outcome::Up, Outcome::Up) => 0,
                (Outcome::Up, Outcome::Down) => 1,
                (Outcome::Down, Outcome::Up) => 2,
                (Outcome::Down, Outcome::Down) => 3,
            };
            e[slot] = e[slot].clone() + mu[atom.index()].clone();
        }
        let [uu, ud, du, dd] = e;
        CoincidenceDistribution { uu, ud, du, dd }
    });
    BehaviorTable::new(ds).expect("a distribution over atoms induces a valid table")
}

/// Expands atom-labelled weights into a dense `mu` vector.
pub fn atom_weights_dense<T: Scalar>(weights: &BTreeMap<String, T>) -> Option<Vec<T>> {
    let mut mu = vec![T::zero(); HiddenVariableAtom::COUNT];
    for (label, w) in weights {
        mu[HiddenVariableAtom::from_label(label)?.index()] = w.clone();
    }
    Some(mu)
}

/// `sum_k w_k v_k` for vertex-labelled weights.
pub fn vertex_combination<T: Scalar>(weights: &BTreeMap<String, T>) -> Option<[T; 4]> {
    let mut acc = [T::zero(), T::zero(), T::zero(), T::zero()];
    for (label, w) in weights {
        let signs = parse_vertex_label(label)?;
        for (a, s) in acc.iter_mut().zip(signs) {
            *a = a.clone() + w.clone() * T::from_i64(s as i64);
        }
    }
    Some(acc)
}

/// Checks a membership verdict against its input: weights are nonnegative,
/// sum to one and reproduce `e`; or the witness evaluates above its bound.
pub fn verify_membership<T: Scalar>(e: &CorrelationVector<T>, verdict: &ClassicalityVerdict<T>) -> bool {
    match verdict {
        ClassicalityVerdict::Classical { weights } => {
            let sum = weights.values().fold(T::zero(), |a, w| a + w.clone());
            let nonneg = weights.values().all(|w| *w >= -T::tolerance());
            let Some(point) = vertex_combination(weights) else {
                return false;
            };
            nonneg && sum.approx_eq(&T::one()) && point.iter().zip(e.components()).all(|(p, c)| p.approx_eq(&c))
        }
        ClassicalityVerdict::NonClassical { witness } => match witness {
            Witness::ChshFacet { signs, value, bound } => {
                let recomputed = chsh_facets(e).into_iter().find(|f| f.signs == *signs);
                recomputed.is_some_and(|f| f.value.approx_eq(value)) && value.exceeds(bound)
            }
            Witness::SeparatingFunctional { coefficients, value, bound } => {
                let on_vertices = vertex_signs().into_iter().all(|v| {
                    let f = coefficients
                        .iter()
                        .zip(v)
                        .fold(T::zero(), |acc, (y, s)| acc + y.clone() * T::from_i64(s as i64));
                    !f.exceeds(bound)
                });
                on_vertices && value.exceeds(bound)
            }
            Witness::MarginalInconsistency { .. } => false,
        },
    }
}

/// Checks a joint-distribution verdict against its table.
pub fn verify_joint<T: Scalar>(table: &BehaviorTable<T>, verdict: &ClassicalityVerdict<T>) -> bool {
    match verdict {
        ClassicalityVerdict::Classical { weights } => {
            let Some(mu) = atom_weights_dense(weights) else {
                return false;
            };
            let sum = mu.iter().fold(T::zero(), |a, w| a + w.clone());
            if mu.iter().any(|w| *w < -T::tolerance()) || !sum.approx_eq(&T::one()) {
                return false;
            }
            let rebuilt = induced_table(&mu);
            table.iter().all(|(p, d)| d.entries().iter().zip(rebuilt.get(p).entries()).all(|(x, y)| x.approx_eq(&y)))
        }
        ClassicalityVerdict::NonClassical { witness } => match witness {
            Witness::ChshFacet { value, bound, .. } => value.exceeds(bound),
            Witness::MarginalInconsistency { up_probabilities, .. } => {
                !up_probabilities[0].approx_eq(&up_probabilities[1])
            }
            Witness::SeparatingFunctional { value, bound, .. } => value.exceeds(bound),
        },
    }
}

/// Outcome of the LP-versus-facet agreement sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckSummary {
    pub samples: u64,
    pub classical: u64,
    pub nonclassical: u64,
    /// Sample indices where the two routes disagree.
    pub disagreements: Vec<u64>,
}

impl CrossCheckSummary {
    fn merge(mut self, other: CrossCheckSummary) -> CrossCheckSummary {
        self.samples += other.samples;
        self.classical += other.classical;
        self.nonclassical += other.nonclassical;
        self.disagreements.extend(other.disagreements);
        self
    }
}

/// Uniform random point of `[-1, 1]^4` for sample `index`.
pub fn cross_check_sample(seed: u64, index: u64) -> CorrelationVector<f64> {
    let mut rng = substream(seed, STREAM_CROSS_CHECK, index);
    let mut draw = || 2.0 * rng.random::<f64>() - 1.0;
    CorrelationVector::new(draw(), draw(), draw(), draw()).expect("in range")
}

/// Compares LP hull membership against the max-of-8-facets test on
/// `samples` random correlation vectors.
pub fn facet_cross_check(samples: u64, seed: u64, exec: Execution) -> CrossCheckSummary {
    map_reduce_chunks(
        exec,
        samples,
        CHUNK,
        CrossCheckSummary::default(),
        |range| {
            let mut s = CrossCheckSummary::default();
            for i in range {
                let e = cross_check_sample(seed, i);
                let lp_classical = correlation_membership(&e).is_classical();
                let facet_classical = !max_chsh_facet(&e).value.exceeds(&classical_bound());
                s.samples += 1;
                if lp_classical {
                    s.classical += 1;
                } else {
                    s.nonclassical += 1;
                }
                if lp_classical != facet_classical {
                    s.disagreements.push(i);
                }
            }
            s
        },
        CrossCheckSummary::merge,
    )
}
