//! Property tests for the structural invariants: parser round trips,
//! desugaring soundness and idempotence, and agreement between the operator
//! semantics and the set-level queries.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::random_model;
use ital::{
    assumed_set, assumes, believes, eval, parse, satisfiable, valid, Agent, Formula, TemporalModel,
};

fn agent() -> impl Strategy<Value = Agent> {
    prop_oneof![Just(Agent::A), Just(Agent::B)]
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["p", "q", "r", "s1", "zb_2"])
            .prop_map(|name| Formula::prop(name).unwrap()),
        Just(Formula::SortAtom(Agent::A)),
        Just(Formula::SortAtom(Agent::B)),
        Just(Formula::DiagAtom),
        Just(Formula::Truth),
        Just(Formula::Falsity),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::always),
            inner.clone().prop_map(Formula::sometime),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (agent(), agent(), inner.clone()).prop_map(|(i, j, x)| Formula::believe(i, j, x)),
            (agent(), agent(), inner).prop_map(|(i, j, x)| Formula::assume(i, j, x)),
        ]
    })
}

fn model() -> impl Strategy<Value = TemporalModel> {
    any::<u64>().prop_map(|seed| random_model(&mut StdRng::seed_from_u64(seed), true))
}

proptest! {
    #[test]
    fn parse_render_round_trip(f in formula()) {
        let rendered = f.to_string();
        let reparsed = parse(&rendered);
        prop_assert_eq!(reparsed, Ok(f), "rendered: {}", rendered);
    }

    #[test]
    fn desugaring_preserves_truth(m in model(), f in formula(), n in 0u64..6, w in 0usize..4) {
        let world = m.world_name(w).to_string();
        let sugar = eval(&m, n, &world, &f).unwrap();
        let core = eval(&m, n, &world, f.desugar().formula()).unwrap();
        prop_assert_eq!(sugar, core, "{} at ({}, {}) on {}", f, n, world, m);
    }

    #[test]
    fn desugaring_is_idempotent(f in formula()) {
        let once = f.desugar().into_formula();
        prop_assert!(once.is_core());
        let twice = once.desugar().into_formula();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn belief_operator_matches_containment_query(m in model(), f in formula(), n in 0u64..4) {
        // B[i,j] f at w of sort i says exactly that w's possible set,
        // restricted to sort j, sits inside f's truth set of sort j.
        for (i, j) in [(Agent::A, Agent::B), (Agent::B, Agent::A)] {
            for w in m.sort_range(i) {
                let world = m.world_name(w).to_string();
                let truth_set: std::collections::BTreeSet<String> = m
                    .sort_range(j)
                    .filter(|&z| eval(&m, n, m.world_name(z), &f).unwrap())
                    .map(|z| m.world_name(z).to_string())
                    .collect();
                let by_operator =
                    eval(&m, n, &world, &Formula::believe(i, j, f.clone())).unwrap();
                let possible = assumed_set(&m, n, &world).unwrap();
                let by_query = believes(&m, n, &world, &truth_set).unwrap_or_else(|_| {
                    // Mixed-sort truth sets cannot happen for cross pairs.
                    unreachable!()
                });
                prop_assert_eq!(by_operator, by_query, "{} at {} (possible {:?})", f, world, possible);
            }
        }
    }

    #[test]
    fn assumption_operator_matches_equality_query(m in model(), f in formula(), n in 0u64..4) {
        // A[i,j] f additionally forbids f from holding outside sort j.
        for (i, j) in [(Agent::A, Agent::B), (Agent::B, Agent::A)] {
            let spillover = m
                .sort_range(j.other())
                .any(|z| eval(&m, n, m.world_name(z), &f).unwrap());
            for w in m.sort_range(i) {
                let world = m.world_name(w).to_string();
                let truth_set: std::collections::BTreeSet<String> = m
                    .sort_range(j)
                    .filter(|&z| eval(&m, n, m.world_name(z), &f).unwrap())
                    .map(|z| m.world_name(z).to_string())
                    .collect();
                let by_operator =
                    eval(&m, n, &world, &Formula::assume(i, j, f.clone())).unwrap();
                let by_query = assumes(&m, n, &world, &truth_set).unwrap() && !spillover;
                prop_assert_eq!(by_operator, by_query, "{} at {}", f, world);
            }
        }
    }

    #[test]
    fn witnesses_reverify(m in model(), f in formula()) {
        if let Some(w) = satisfiable(&m, &f) {
            prop_assert_eq!(eval(&m, w.time as u64, &w.world, &f), Ok(true));
        }
        if let Some(r) = valid(&m, &f) {
            prop_assert_eq!(eval(&m, r.time as u64, &r.world, &f), Ok(false));
        }
        // Duality of the two searches.
        let negated = Formula::not(f.clone());
        prop_assert_eq!(satisfiable(&m, &f).is_some(), valid(&m, &negated).is_some());
    }
}
