mod common;

use common::*;
use proptest::prelude::*;

use potentiality::classicality::{
    correlation_membership, induced_table, kolmogorov_feasibility, max_chsh_facet, verify_joint, verify_membership,
    vertex_signs, HiddenVariableAtom,
};
use potentiality::entities::{run_entity_with, simulate_counts, EntityConfig, RunSpec};
use potentiality::exec::Execution;
use potentiality::liar::{build_entity, LiarVariant};
use potentiality::report::to_canonical_json;
use potentiality::scalar::Rational;
use potentiality::scenario::{bell_quantity, correlation_vector, CorrelationVector, Pair};

macro_rules! check {
    ($name:ident, $f:path) => {
        #[test]
        fn $name() {
            if let Err(e) = $f(&mut runner(CASES)) {
                panic!("{e}");
            }
        }
    };
}

check!(expectation_is_linear, expectation_linearity);
check!(bell_quantity_at_most_four, bell_quantity_bounded);
check!(atoms_and_mixtures_satisfy_chsh, atoms_satisfy_facets);
check!(evolve_is_unitary_group, evolution_unitary_group_law);
check!(evolve_preserves_norm, evolution_preserves_norm);
check!(projectors_are_idempotent, projector_idempotent);
check!(tensor_mixed_product_identity, tensor_mixed_product);
check!(coincidence_13_is_anticorrelated, anticorrelation_exact);

#[test]
fn deterministic_assignments_stay_within_bound() {
    for atom in HiddenVariableAtom::all() {
        let e = CorrelationVector::<Rational>::from_signs(atom.correlation_signs());
        assert!(bell_quantity(&e) <= Rational::integer(2), "{}", atom.label());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn membership_agrees_with_facets(e in correlation()) {
        let verdict = correlation_membership(&e);
        let facet_ok = max_chsh_facet(&e).value <= 2.0 + 1e-9;
        prop_assert_eq!(verdict.is_classical(), facet_ok);
        prop_assert!(verify_membership(&e, &verdict));
    }

    #[test]
    fn convex_combinations_are_reconstructed(w in prop::array::uniform8(0.0..1.0f64)) {
        let s: f64 = w.iter().sum();
        prop_assume!(s > 1e-6);
        let mut e = [0.0; 4];
        for (wk, v) in w.iter().zip(vertex_signs()) {
            for (c, sign) in e.iter_mut().zip(v) {
                *c += wk / s * sign as f64;
            }
        }
        let e = CorrelationVector::from_array(e.map(|x| x.clamp(-1.0, 1.0))).unwrap();
        let verdict = correlation_membership(&e);
        prop_assert!(verdict.is_classical());
        prop_assert!(verify_membership(&e, &verdict));
    }

    #[test]
    fn liar_a_initial_state_is_stationary(t in -100.0..100.0f64) {
        let a = build_entity(LiarVariant::A);
        let moved = a.hamiltonian().evolve(t, a.psi0()).unwrap();
        prop_assert!(moved.distance(a.psi0()) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn atom_distributions_round_trip(w in prop::array::uniform16(0u32..8)) {
        let total: u32 = w.iter().sum();
        prop_assume!(total > 0);
        let mu: Vec<Rational> = w.iter().map(|&x| Rational::new(x as i64, total as i64)).collect();
        let table = induced_table(&mu);
        let verdict = kolmogorov_feasibility(&table);
        prop_assert!(verdict.is_classical());
        prop_assert!(verify_joint(&table, &verdict));
    }

    #[test]
    fn e13_is_minus_one_for_any_split(cfg in vessels_config(), seed in any::<u64>()) {
        let counts = simulate_counts(&EntityConfig::Vessels(cfg), &RunSpec::new(50, seed).unwrap(), Execution::Sequential);
        let table = counts.to_table().unwrap();
        prop_assert_eq!(correlation_vector(&table).e13, Rational::integer(-1));
        let [uu, _, _, dd] = counts.get(Pair::P13);
        prop_assert_eq!(uu + dd, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn replay_is_independent_of_execution(
        vessels in vessels_config(),
        soccer in soccer_config(),
        seed in any::<u64>(),
        trials in 1u64..20_000,
    ) {
        for cfg in [EntityConfig::Vessels(vessels.clone()), EntityConfig::Soccer(soccer.clone())] {
            let run = RunSpec::new(trials, seed).unwrap();
            let seq = to_canonical_json(&run_entity_with(&cfg, run, Execution::Sequential).unwrap()).unwrap();
            let par = to_canonical_json(&run_entity_with(&cfg, run, Execution::Parallel).unwrap()).unwrap();
            prop_assert_eq!(seq, par);
        }
    }
}
