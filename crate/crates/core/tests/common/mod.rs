//! Property checks shared by the property test suite and the acceptance
//! harness. Each check drives a `TestRunner` and reports the minimal failing
//! input as a string.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use potentiality::classicality::{chsh_facets, HiddenVariableAtom};
use potentiality::entities::{soccer_sample, vessels_sample, Bribe, SoccerConfig, SplitDistribution, VesselsConfig};
use potentiality::quantum::{tensor_operator, HermitianOperator, Operator, ProjectorOperator, StateVector};
use potentiality::scalar::Rational;
use potentiality::scenario::{
    bell_quantity, correlation_vector, expectation, CoincidenceDistribution, CorrelationVector, Pair,
};

pub type C64 = Complex<f64>;

pub const CASES: u32 = 1000;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

/// Same as [`runner`] but with a fixed seed, for reproducible reports.
pub fn seeded_runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// strategies

pub fn distribution() -> impl Strategy<Value = CoincidenceDistribution<f64>> {
    prop::array::uniform4(0.0..1.0f64).prop_filter_map("all-zero weights", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| CoincidenceDistribution::new(w[0] / s, w[1] / s, w[2] / s, w[3] / s).unwrap())
    })
}

pub fn correlation() -> impl Strategy<Value = CorrelationVector<f64>> {
    prop::array::uniform4(-1.0..=1.0f64).prop_map(|e| CorrelationVector::from_array(e).unwrap())
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

pub fn matrix(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| DMatrix::from_row_slice(dim, dim, &v))
}

pub fn hermitian(max_dim: usize) -> impl Strategy<Value = HermitianOperator> {
    (1..=max_dim).prop_flat_map(matrix).prop_map(|m| {
        let h = (&m + m.adjoint()).unscale(2.0);
        HermitianOperator::new(Operator::from_matrix(h).unwrap()).unwrap()
    })
}

/// Random rank-`k` projector in dimension `d`, built from the orthonormal
/// columns of a QR factorization.
pub fn projector(max_dim: usize) -> impl Strategy<Value = ProjectorOperator> {
    (1..=max_dim).prop_flat_map(|d| (Just(d), 0..=d, matrix(d))).prop_map(|(d, k, m)| {
        let q = m.qr().q();
        let cols = q.columns(0, k);
        let p = if k == 0 { DMatrix::zeros(d, d) } else { cols * cols.adjoint() };
        ProjectorOperator::new(Operator::from_matrix(p).unwrap()).unwrap()
    })
}

pub fn state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), dim).prop_filter_map("zero vector", |v| StateVector::normalize(v).ok())
}

pub fn vessels_config() -> impl Strategy<Value = VesselsConfig> {
    let split = prop_oneof![
        Just(SplitDistribution::Uniform),
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| SplitDistribution::Interval { low: a.min(b), high: a.max(b) }),
        (0.0..=1.0f64).prop_map(|a| SplitDistribution::Fixed { amount: a }),
        prop::collection::vec(0.0..=1.0f64, 1..6).prop_map(|values| SplitDistribution::Discrete { values }),
        // the exact midpoint is the contested case
        Just(SplitDistribution::Fixed { amount: 0.5 }),
    ];
    (0.5..1000.0f64, split, any::<bool>()).prop_map(|(half, split, transparent)| {
        let total = 2.0 * half;
        // split amounts are drawn as fractions of the total
        let scale = |x: f64| x * total;
        let split_distribution = match split {
            SplitDistribution::Uniform => SplitDistribution::Uniform,
            SplitDistribution::Interval { low, high } => {
                SplitDistribution::Interval { low: scale(low), high: scale(high) }
            }
            SplitDistribution::Fixed { amount } => SplitDistribution::Fixed { amount: scale(amount) },
            SplitDistribution::Discrete { values } => {
                SplitDistribution::Discrete { values: values.into_iter().map(scale).collect() }
            }
        };
        VesselsConfig { total_volume: total, threshold: half, split_distribution, transparent }
    })
}

pub fn soccer_config() -> impl Strategy<Value = SoccerConfig> {
    let bribe = (prop_oneof![Just(1e5), 0.0..1e10f64], prop_oneof![Just(1e4), 0.0..1e8f64])
        .prop_map(|(amount, player_wealth)| Bribe { amount, player_wealth });
    (bribe.clone(), bribe, any::<bool>()).prop_map(|(bribe_a, bribe_b, referee_bad_character)| SoccerConfig {
        bribe_a,
        bribe_b,
        referee_bad_character,
    })
}

// ---------------------------------------------------------------------------
// checks

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn expectation_linearity(r: &mut TestRunner) -> Result<(), String> {
    report(r.run(&(distribution(), distribution(), 0.0..=1.0f64), |(a, b, lambda)| {
        let mixed = expectation(&a.mix(&b, &lambda));
        let linear = lambda * expectation(&a) + (1.0 - lambda) * expectation(&b);
        prop_assert!((mixed - linear).abs() <= 1e-12, "{mixed} vs {linear}");
        Ok(())
    }))
}

pub fn bell_quantity_bounded(r: &mut TestRunner) -> Result<(), String> {
    report(r.run(&correlation(), |e| {
        let q = bell_quantity(&e);
        prop_assert!((0.0..=4.0).contains(&q), "{q}");
        let neg = CorrelationVector::from_array(e.components().map(|x| -x)).unwrap();
        prop_assert_eq!(bell_quantity(&neg), q);
        Ok(())
    }))
}

/// Every deterministic atom, and every exact mixture of atoms, keeps all
/// eight CHSH functionals at or below 2.
pub fn atoms_satisfy_facets(r: &mut TestRunner) -> Result<(), String> {
    let atoms = prop::collection::vec(0u8..16, 1..5);
    report(r.run(&atoms, |ids| {
        let two = Rational::integer(2);
        for &id in &ids {
            let atom = HiddenVariableAtom::new(id).unwrap();
            let e = CorrelationVector::<Rational>::from_signs(atom.correlation_signs());
            for f in chsh_facets(&e) {
                prop_assert!(f.value <= two, "atom {} facet {:?} = {}", atom.label(), f.signs, f.value);
            }
        }
        let mut mu = vec![Rational::integer(0); 16];
        let w = Rational::new(1, ids.len() as i64);
        for &id in &ids {
            mu[id as usize] = mu[id as usize].clone() + w.clone();
        }
        let e = correlation_vector(&potentiality::classicality::induced_table(&mu));
        for f in chsh_facets(&e) {
            prop_assert!(f.value <= two, "mixture {:?} facet {:?} = {}", ids, f.signs, f.value);
        }
        Ok(())
    }))
}

pub fn evolution_unitary_group_law(r: &mut TestRunner) -> Result<(), String> {
    report(r.run(&(hermitian(4), -10.0..10.0f64, -10.0..10.0f64), |(h, t, s)| {
        let ut = h.propagator(t);
        let us = h.propagator(s);
        prop_assert!(ut.unitarity_error() < 1e-10, "unitarity {}", ut.unitarity_error());
        let composed = ut.compose(&us).unwrap();
        let dev = composed.max_deviation(&h.propagator(t + s));
        prop_assert!(dev < 1e-10, "U(t)U(s) vs U(t+s): {dev}");
        prop_assert!(h.propagator(0.0).max_deviation(&Operator::identity(h.dim())) < 1e-10);
        Ok(())
    }))
}

pub fn evolution_preserves_norm(r: &mut TestRunner) -> Result<(), String> {
    let strat = (1usize..=4)
        .prop_flat_map(|d| (hermitian(d).prop_filter("dim", move |h| h.dim() == d), state(d), -10.0..10.0f64));
    report(r.run(&strat, |(h, psi, t)| {
        let out = h.evolve(t, &psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        let back = h.evolve(-t, &out).unwrap();
        prop_assert!(back.distance(&psi) < 1e-10);
        Ok(())
    }))
}

pub fn projector_idempotent(r: &mut TestRunner) -> Result<(), String> {
    report(r.run(&projector(5), |p| {
        let m = p.operator().matrix();
        prop_assert!(max_dev(&(m * m), m) < 1e-12);
        prop_assert!(p.operator().hermiticity_error() < 1e-12);
        let c = p.complement();
        let cm = c.operator().matrix();
        prop_assert!(max_dev(&(cm * cm), cm) < 1e-12);
        prop_assert!((m * cm).iter().all(|z| z.norm() < 1e-12));
        Ok(())
    }))
}

pub fn tensor_mixed_product(r: &mut TestRunner) -> Result<(), String> {
    let strat = (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| (matrix(m), matrix(n), matrix(m), matrix(n)));
    report(r.run(&strat, |(a, b, c, d)| {
        let op = |m: DMatrix<C64>| Operator::from_matrix(m).unwrap();
        let (a, b, c, d) = (op(a), op(b), op(c), op(d));
        let lhs = tensor_operator(&a, &b).compose(&tensor_operator(&c, &d)).unwrap();
        let rhs = tensor_operator(&a.compose(&c).unwrap(), &b.compose(&d).unwrap());
        prop_assert!(lhs.max_deviation(&rhs) < 1e-12, "{}", lhs.max_deviation(&rhs));
        Ok(())
    }))
}

/// Every (1,3) sample of either entity has exactly one side up.
pub fn anticorrelation_exact(r: &mut TestRunner) -> Result<(), String> {
    let strat = (vessels_config(), soccer_config(), any::<u64>(), 0u64..1_000_000);
    report(r.run(&strat, |(vc, sc, seed, trial)| {
        prop_assert!(vc.validate().is_ok(), "{:?}", vc);
        let v = vessels_sample(&vc, Pair::P13, trial, seed);
        prop_assert!(v.left != v.right, "vessels {:?} with {:?}", v, vc);
        let s = soccer_sample(&sc, Pair::P13, trial, seed);
        prop_assert!(s.left != s.right, "soccer {:?} with {:?}", s, sc);
        Ok(())
    }))
}

pub type Check = fn(&mut TestRunner) -> Result<(), String>;

pub fn all_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("expectation linearity", expectation_linearity),
        ("bell quantity <= 4", bell_quantity_bounded),
        ("deterministic atoms satisfy all 8 CHSH facets", atoms_satisfy_facets),
        ("evolve unitarity and group law", evolution_unitary_group_law),
        ("evolve preserves norm", evolution_preserves_norm),
        ("projector idempotence", projector_idempotent),
        ("tensor mixed-product identity", tensor_mixed_product),
        ("exact (1,3) anti-correlation", anticorrelation_exact),
    ]
}
