//! The four-observable coincidence scenario: outcomes, coincidence
//! distributions, behavior tables, expectation values and the Bell functional
//! `|E13 - E14| + |E23 + E24|`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ValidationError;
use crate::scalar::{Rational, Scalar};

/// Outcome of a dichotomic experiment. `Up` carries the value +1, `Down` -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Outcome {
        if sign >= 0 {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub fn from_bool(up: bool) -> Outcome {
        if up {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub fn is_up(self) -> bool {
        self == Outcome::Up
    }
}

/// One of the four compatible coincidence experiments `e_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pair {
    P13,
    P14,
    P23,
    P24,
}

impl Pair {
    pub const ALL: [Pair; 4] = [Pair::P13, Pair::P14, Pair::P23, Pair::P24];

    /// Observable measured on the left (1 or 2).
    pub fn left(self) -> u8 {
        match self {
            Pair::P13 | Pair::P14 => 1,
            Pair::P23 | Pair::P24 => 2,
        }
    }

    /// Observable measured on the right (3 or 4).
    pub fn right(self) -> u8 {
        match self {
            Pair::P13 | Pair::P23 => 3,
            Pair::P14 | Pair::P24 => 4,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            Pair::P13 => "13",
            Pair::P14 => "14",
            Pair::P23 => "23",
            Pair::P24 => "24",
        }
    }

    pub fn from_observables(left: u8, right: u8) -> Option<Pair> {
        Pair::ALL.into_iter().find(|p| p.left() == left && p.right() == right)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left(), self.right())
    }
}

impl FromStr for Pair {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').replace(',', "");
        let bytes = t.as_bytes();
        if bytes.len() == 2 {
            if let Some(p) = Pair::from_observables(bytes[0].wrapping_sub(b'0'), bytes[1].wrapping_sub(b'0')) {
                return Ok(p);
            }
        }
        Err(ValidationError::UnknownPair(s.to_string()))
    }
}

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The fixed CHSH-shaped scenario: observables 1..4, left ones {1,2}, right
/// ones {3,4}, and the four compatible pairs between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Scenario;

impl Scenario {
    pub fn observables(&self) -> [u8; 4] {
        [1, 2, 3, 4]
    }

    pub fn compatible_pairs(&self) -> [Pair; 4] {
        Pair::ALL
    }

    pub fn is_compatible(&self, left: u8, right: u8) -> bool {
        Pair::from_observables(left, right).is_some()
    }
}

/// Joint outcome distribution of a coincidence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CoincidenceDistribution<T: Scalar> {
    pub uu: T,
    pub ud: T,
    pub du: T,
    pub dd: T,
}

impl<T: Scalar> CoincidenceDistribution<T> {
    /// Validated constructor. Entries must be nonnegative and sum to one
    /// (exactly for rationals, within `1e-9` for floats).
    pub fn new(uu: T, ud: T, du: T, dd: T) -> Result<Self, ValidationError> {
        let d = CoincidenceDistribution { uu, ud, du, dd };
        d.validate(None)?;
        Ok(d)
    }

    /// Point mass on a single outcome pair.
    pub fn point(left: Outcome, right: Outcome) -> Self {
        let mut d = CoincidenceDistribution { uu: T::zero(), ud: T::zero(), du: T::zero(), dd: T::zero() };
        *d.entry_mut(left, right) = T::one();
        d
    }

    pub fn uniform() -> Self {
        let q = T::from_ratio(1, 4);
        CoincidenceDistribution { uu: q.clone(), ud: q.clone(), du: q.clone(), dd: q }
    }

    pub(crate) fn validate(&self, pair: Option<Pair>) -> Result<(), ValidationError> {
        let prefix = pair.map(|p| format!("{}.", p.tag())).unwrap_or_default();
        for (name, v) in self.named() {
            if *v < -T::tolerance() {
                return Err(ValidationError::NegativeProbability {
                    field: format!("{prefix}p_{name}"),
                    value: v.to_string(),
                });
            }
            if v.exceeds(&T::one()) {
                return Err(ValidationError::ProbabilityAboveOne {
                    field: format!("{prefix}p_{name}"),
                    value: v.to_string(),
                });
            }
        }
        let sum = self.total();
        if !sum.approx_eq(&T::one()) {
            return Err(ValidationError::SumNotOne {
                pair: pair.map(|p| p.tag().to_string()).unwrap_or_else(|| "?".into()),
                sum: sum.to_string(),
            });
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, &T); 4] {
        [("uu", &self.uu), ("ud", &self.ud), ("du", &self.du), ("dd", &self.dd)]
    }

    pub fn total(&self) -> T {
        self.uu.clone() + self.ud.clone() + self.du.clone() + self.dd.clone()
    }

    pub fn entry(&self, left: Outcome, right: Outcome) -> &T {
        match (left, right) {
            (Outcome::Up, Outcome::Up) => &self.uu,
            (Outcome::Up, Outcome::Down) => &self.ud,
            (Outcome::Down, Outcome::Up) => &self.du,
            (Outcome::Down, Outcome::Down) => &self.dd,
        }
    }

    fn entry_mut(&mut self, left: Outcome, right: Outcome) -> &mut T {
        match (left, right) {
            (Outcome::Up, Outcome::Up) => &mut self.uu,
            (Outcome::Up, Outcome::Down) => &mut self.ud,
            (Outcome::Down, Outcome::Up) => &mut self.du,
            (Outcome::Down, Outcome::Down) => &mut self.dd,
        }
    }

    /// Entries in the order uu, ud, du, dd.
    pub fn entries(&self) -> [T; 4] {
        [self.uu.clone(), self.ud.clone(), self.du.clone(), self.dd.clone()]
    }

    /// Probability that the left observable reads up.
    pub fn left_up(&self) -> T {
        self.uu.clone() + self.ud.clone()
    }

    /// Probability that the right observable reads up.
    pub fn right_up(&self) -> T {
        self.uu.clone() + self.du.clone()
    }

    /// `lambda * self + (1 - lambda) * other`
    pub fn mix(&self, other: &Self, lambda: &T) -> Self {
        let mu = T::one() - lambda.clone();
        let m = |a: &T, b: &T| lambda.clone() * a.clone() + mu.clone() * b.clone();
        CoincidenceDistribution {
            uu: m(&self.uu, &other.uu),
            ud: m(&self.ud, &other.ud),
            du: m(&self.du, &other.du),
            dd: m(&self.dd, &other.dd),
        }
    }
}

/// `E = p_uu + p_dd - p_ud - p_du`
pub fn expectation<T: Scalar>(dist: &CoincidenceDistribution<T>) -> T {
    dist.uu.clone() + dist.dd.clone() - dist.ud.clone() - dist.du.clone()
}

/// One coincidence distribution per compatible pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTable<T: Scalar> {
    scenario: Scenario,
    distributions: [CoincidenceDistribution<T>; 4],
}

impl<T: Scalar> BehaviorTable<T> {
    pub fn new(distributions: [CoincidenceDistribution<T>; 4]) -> Result<Self, ValidationError> {
        for (pair, d) in Pair::ALL.into_iter().zip(&distributions) {
            d.validate(Some(pair))?;
        }
        Ok(BehaviorTable { scenario: Scenario, distributions })
    }

    /// Builds a table from a pair-keyed map; every compatible pair must be
    /// present.
    pub fn from_map(mut map: BTreeMap<Pair, CoincidenceDistribution<T>>) -> Result<Self, ValidationError> {
        let mut take = |p: Pair| map.remove(&p).ok_or(ValidationError::MissingPair(p));
        let ds = [take(Pair::P13)?, take(Pair::P14)?, take(Pair::P23)?, take(Pair::P24)?];
        BehaviorTable::new(ds)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn get(&self, pair: Pair) -> &CoincidenceDistribution<T> {
        &self.distributions[pair.index()]
    }

    pub fn distributions(&self) -> &[CoincidenceDistribution<T>; 4] {
        &self.distributions
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, &CoincidenceDistribution<T>)> {
        Pair::ALL.into_iter().zip(self.distributions.iter())
    }

    /// Table of the deterministic outcome assignment `signs[k]` for
    /// observable `k + 1`.
    pub fn deterministic(signs: [i8; 4]) -> Self {
        let o = |obs: u8| Outcome::from_sign(signs[obs as usize - 1]);
        let ds = Pair::ALL.map(|p| CoincidenceDistribution::point(o(p.left()), o(p.right())));
        BehaviorTable { scenario: Scenario, distributions: ds }
    }

    pub fn uniform() -> Self {
        BehaviorTable { scenario: Scenario, distributions: Pair::ALL.map(|_| CoincidenceDistribution::uniform()) }
    }
}

/// The four correlations entering the Bell functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CorrelationVector<T: Scalar> {
    pub e13: T,
    pub e14: T,
    pub e23: T,
    pub e24: T,
}

impl<T: Scalar> CorrelationVector<T> {
    /// Validated constructor; components must lie in `[-1, 1]`.
    pub fn new(e13: T, e14: T, e23: T, e24: T) -> Result<Self, ValidationError> {
        let v = CorrelationVector { e13, e14, e23, e24 };
        v.validate()?;
        Ok(v)
    }

    pub fn from_array(e: [T; 4]) -> Result<Self, ValidationError> {
        let [a, b, c, d] = e;
        Self::new(a, b, c, d)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let one = T::one();
        for (name, v) in ["e13", "e14", "e23", "e24"].into_iter().zip(self.components()) {
            if v.abs().exceeds(&one) {
                return Err(ValidationError::ComponentOutOfRange { component: name.into(), value: v.to_string() });
            }
        }
        Ok(())
    }

    pub fn components(&self) -> [T; 4] {
        [self.e13.clone(), self.e14.clone(), self.e23.clone(), self.e24.clone()]
    }

    pub fn get(&self, pair: Pair) -> &T {
        match pair {
            Pair::P13 => &self.e13,
            Pair::P14 => &self.e14,
            Pair::P23 => &self.e23,
            Pair::P24 => &self.e24,
        }
    }

    pub fn from_signs(signs: [i8; 4]) -> Self {
        let [a, b, c, d] = signs.map(|s| T::from_i64(s as i64));
        CorrelationVector { e13: a, e14: b, e23: c, e24: d }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CorrelationVector<U> {
        CorrelationVector { e13: f(&self.e13), e14: f(&self.e14), e23: f(&self.e23), e24: f(&self.e24) }
    }
}

impl CorrelationVector<Rational> {
    pub fn to_f64(&self) -> CorrelationVector<f64> {
        self.map(|v| v.to_f64())
    }
}

pub fn correlation_vector<T: Scalar>(table: &BehaviorTable<T>) -> CorrelationVector<T> {
    let e = |p: Pair| expectation(table.get(p));
    CorrelationVector { e13: e(Pair::P13), e14: e(Pair::P14), e23: e(Pair::P23), e24: e(Pair::P24) }
}

/// `|E13 - E14| + |E23 + E24|`
pub fn bell_quantity<T: Scalar>(e: &CorrelationVector<T>) -> T {
    (e.e13.clone() - e.e14.clone()).abs() + (e.e23.clone() + e.e24.clone()).abs()
}

/// Classical bound of the Bell functional.
pub fn classical_bound<T: Scalar>() -> T {
    T::from_i64(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase", bound = "")]
pub enum BellVerdict<T: Scalar> {
    Satisfied(T),
    Violated(T),
}

impl<T: Scalar> BellVerdict<T> {
    pub fn value(&self) -> &T {
        match self {
            BellVerdict::Satisfied(v) | BellVerdict::Violated(v) => v,
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, BellVerdict::Violated(_))
    }
}

/// Violated iff the Bell quantity exceeds 2 by more than the scalar's
/// tolerance.
pub fn bell_verdict<T: Scalar>(e: &CorrelationVector<T>) -> BellVerdict<T> {
    let q = bell_quantity(e);
    if q.exceeds(&classical_bound()) {
        BellVerdict::Violated(q)
    } else {
        BellVerdict::Satisfied(q)
    }
}

/// A single coincidence-experiment record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomePair {
    pub pair: Pair,
    pub left: Outcome,
    pub right: Outcome,
}

impl OutcomePair {
    pub fn slot(&self) -> usize {
        match (self.left, self.right) {
            (Outcome::Up, Outcome::Up) => 0,
            (Outcome::Up, Outcome::Down) => 1,
            (Outcome::Down, Outcome::Up) => 2,
            (Outcome::Down, Outcome::Down) => 3,
        }
    }
}

/// Raw coincidence counts, indexed `[pair][uu, ud, du, dd]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountTable(pub [[u64; 4]; 4]);

impl CountTable {
    pub fn record(&mut self, sample: &OutcomePair) {
        self.0[sample.pair.index()][sample.slot()] += 1;
    }

    pub fn merge(mut self, other: &CountTable) -> CountTable {
        for (row, o) in self.0.iter_mut().zip(other.0.iter()) {
            for (c, x) in row.iter_mut().zip(o.iter()) {
                *c += x;
            }
        }
        self
    }

    pub fn pair_total(&self, pair: Pair) -> u64 {
        self.0[pair.index()].iter().sum()
    }

    pub fn get(&self, pair: Pair) -> [u64; 4] {
        self.0[pair.index()]
    }

    /// Relative frequencies as exact rationals.
    pub fn to_table(&self) -> Result<BehaviorTable<Rational>, ValidationError> {
        let uncovered: Vec<Pair> = Pair::ALL.into_iter().filter(|&p| self.pair_total(p) == 0).collect();
        if !uncovered.is_empty() {
            return Err(ValidationError::UncoveredPairs(uncovered));
        }
        let ds = Pair::ALL.map(|p| {
            let n = self.pair_total(p) as i64;
            let [a, b, c, d] = self.get(p).map(|k| Rational::new(k as i64, n));
            CoincidenceDistribution { uu: a, ud: b, du: c, dd: d }
        });
        BehaviorTable::new(ds)
    }
}

/// Relative-frequency table together with the raw counts it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTable {
    pub counts: CountTable,
    pub table: BehaviorTable<Rational>,
}

/// Aggregates coincidence samples into an exact relative-frequency table.
/// Every compatible pair needs at least one sample.
pub fn empirical_table<'a>(
    samples: impl IntoIterator<Item = &'a OutcomePair>,
) -> Result<EmpiricalTable, ValidationError> {
    let mut counts = CountTable::default();
    for s in samples {
        counts.record(s);
    }
    let table = counts.to_table()?;
    Ok(EmpiricalTable { counts, table })
}
