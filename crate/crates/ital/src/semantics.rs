//! Truth of a formula at a (time, world) point of a model, plus the set-level
//! belief and assumption queries derived from the possibility relations.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{CoreFormula, Formula};
use crate::model::TemporalModel;

/// A canonical evaluation point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalPoint {
    pub time: usize,
    pub world: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world `{world}` does not have the sort opposite to `{subject}`")]
    WrongSort { subject: String, world: String },
}

/// Evaluates `f` at instant `n` in `world`.
///
/// The instant is canonicalized onto the stored slices first. Propositions
/// absent from the valuation are false; an unknown world is an error.
pub fn eval(m: &TemporalModel, n: u64, world: &str, f: &Formula) -> Result<bool, SemanticsError> {
    let w = m
        .world_index(world)
        .ok_or_else(|| SemanticsError::UnknownWorld(world.to_string()))?;
    Ok(eval_at(m, m.canon_time(n), w, f))
}

/// Same as [`eval`] for a formula already in the core fragment.
pub fn eval_core(
    m: &TemporalModel,
    n: u64,
    world: &str,
    f: &CoreFormula,
) -> Result<bool, SemanticsError> {
    eval(m, n, world, f.formula())
}

/// Truth at a canonical (slice index, world index) point.
///
/// `Next` follows the successor instant, wrapping from the last slice onto
/// the loop start; `Always` ranges over the future closure of the instant,
/// which covers every instant the infinite unrolling can reach. The belief
/// clause restricts the quantifier to related worlds of the subject's sort;
/// the assumption clause is its biconditional strengthening, quantified over
/// all worlds.
pub(crate) fn eval_at(m: &TemporalModel, t: usize, w: usize, f: &Formula) -> bool {
    match f {
        Formula::Prop(p) => m.has_prop(p, t, w),
        Formula::SortAtom(sort) => m.sort_of(w) == *sort,
        Formula::DiagAtom => (0..m.num_worlds()).all(|z| !m.edge(t, w, z) || !m.edge(t, z, w)),
        Formula::Truth => true,
        Formula::Falsity => false,
        Formula::Not(x) => !eval_at(m, t, w, x),
        Formula::And(l, r) => eval_at(m, t, w, l) && eval_at(m, t, w, r),
        Formula::Or(l, r) => eval_at(m, t, w, l) || eval_at(m, t, w, r),
        Formula::Implies(l, r) => !eval_at(m, t, w, l) || eval_at(m, t, w, r),
        Formula::Iff(l, r) => eval_at(m, t, w, l) == eval_at(m, t, w, r),
        Formula::Next(x) => eval_at(m, m.succ_time(t), w, x),
        Formula::Always(x) => m.future_closure(t).all(|u| eval_at(m, u, w, x)),
        Formula::Sometime(x) => m.future_closure(t).any(|u| eval_at(m, u, w, x)),
        Formula::Believe(i, j, x) => {
            m.sort_of(w) == *i
                && (0..m.num_worlds())
                    .all(|z| !(m.edge(t, w, z) && m.sort_of(z) == *j) || eval_at(m, t, z, x))
        }
        Formula::Assume(i, j, x) => {
            m.sort_of(w) == *i
                && (0..m.num_worlds())
                    .all(|z| (m.edge(t, w, z) && m.sort_of(z) == *j) == eval_at(m, t, z, x))
        }
    }
}

/// The set of worlds `world` considers possible at instant `n`.
pub fn assumed_set(
    m: &TemporalModel,
    n: u64,
    world: &str,
) -> Result<BTreeSet<String>, SemanticsError> {
    let w = m
        .world_index(world)
        .ok_or_else(|| SemanticsError::UnknownWorld(world.to_string()))?;
    let t = m.canon_time(n);
    Ok((0..m.num_worlds())
        .filter(|&z| m.edge(t, w, z))
        .map(|z| m.world_name(z).to_string())
        .collect())
}

fn opposite_sort_mask(
    m: &TemporalModel,
    n: u64,
    world: &str,
    candidates: &BTreeSet<String>,
) -> Result<(usize, u64, u64), SemanticsError> {
    let w = m
        .world_index(world)
        .ok_or_else(|| SemanticsError::UnknownWorld(world.to_string()))?;
    let opposite = m.sort_of(w).other();
    let mut mask = 0u64;
    for name in candidates {
        let z = m
            .world_index(name)
            .ok_or_else(|| SemanticsError::UnknownWorld(name.clone()))?;
        if m.sort_of(z) != opposite {
            return Err(SemanticsError::WrongSort {
                subject: world.to_string(),
                world: name.clone(),
            });
        }
        mask |= 1 << z;
    }
    Ok((w, m.succ_mask(m.canon_time(n), w), mask))
}

/// Whether `world`'s possible set at `n` is contained in `candidates`.
pub fn believes(
    m: &TemporalModel,
    n: u64,
    world: &str,
    candidates: &BTreeSet<String>,
) -> Result<bool, SemanticsError> {
    let (_, succ, mask) = opposite_sort_mask(m, n, world, candidates)?;
    Ok(succ & !mask == 0)
}

/// Whether `world`'s possible set at `n` is exactly `candidates`, the
/// strongest belief.
pub fn assumes(
    m: &TemporalModel,
    n: u64,
    world: &str,
    candidates: &BTreeSet<String>,
) -> Result<bool, SemanticsError> {
    let (_, succ, mask) = opposite_sort_mask(m, n, world, candidates)?;
    Ok(succ == mask)
}

/// Worlds where the diagonal atom holds at instant `n`: no possible world
/// considers them possible back.
pub fn diag_slice(m: &TemporalModel, n: u64) -> BTreeSet<String> {
    let t = m.canon_time(n);
    (0..m.num_worlds())
        .filter(|&w| eval_at(m, t, w, &Formula::DiagAtom))
        .map(|w| m.world_name(w).to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, ModelDescription, SliceDescription};
    use crate::parser::parse;
    use std::collections::BTreeMap;

    fn m0() -> TemporalModel {
        let desc = ModelDescription {
            worlds_a: vec!["x1".into(), "x2".into()],
            worlds_b: vec!["y1".into(), "y2".into()],
            prefix_len: 0,
            loop_len: 1,
            slices: vec![SliceDescription {
                rel_ab: vec![("x1".into(), "y1".into()), ("x2".into(), "y2".into())],
                rel_ba: vec![("y1".into(), "x2".into()), ("y2".into(), "x1".into())],
            }],
            valuation: BTreeMap::new(),
            strict_proper: true,
        };
        validate(&desc).unwrap()
    }

    /// M0's slice at time 0, then a slice whose reverse relation mirrors the
    /// forward one, creating mutual pairs at time 1. Loop of length 2.
    fn m1() -> TemporalModel {
        let desc = ModelDescription {
            worlds_a: vec!["x1".into(), "x2".into()],
            worlds_b: vec!["y1".into(), "y2".into()],
            prefix_len: 0,
            loop_len: 2,
            slices: vec![
                SliceDescription {
                    rel_ab: vec![("x1".into(), "y1".into()), ("x2".into(), "y2".into())],
                    rel_ba: vec![("y1".into(), "x2".into()), ("y2".into(), "x1".into())],
                },
                SliceDescription {
                    rel_ab: vec![("x1".into(), "y1".into()), ("x2".into(), "y2".into())],
                    rel_ba: vec![("y1".into(), "x1".into()), ("y2".into(), "x2".into())],
                },
            ],
            valuation: BTreeMap::new(),
            strict_proper: true,
        };
        validate(&desc).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn diag_atom_on_m0() {
        let m = m0();
        assert_eq!(eval(&m, 0, "x1", &Formula::DiagAtom), Ok(true));
        assert_eq!(diag_slice(&m, 0), set(&["x1", "x2", "y1", "y2"]));
    }

    #[test]
    fn contradictions_are_false_everywhere() {
        let m = m0();
        let f = parse("D & !D").unwrap();
        for w in ["x1", "x2", "y1", "y2"] {
            assert_eq!(eval(&m, 0, w, &f), Ok(false));
        }
    }

    #[test]
    fn always_and_sometime_on_a_varying_loop() {
        let m = m1();
        assert_eq!(eval(&m, 0, "x1", &parse("G D").unwrap()), Ok(false));
        assert_eq!(eval(&m, 0, "x1", &parse("F D").unwrap()), Ok(true));
        // At time 1 the mutual pair (x1,y1),(y1,x1) kills the diagonal.
        assert_eq!(eval(&m, 1, "x1", &Formula::DiagAtom), Ok(false));
        assert!(!diag_slice(&m, 1).contains("x1"));
    }

    #[test]
    fn believing_the_opposite_sort_is_trivial() {
        let m = m0();
        assert_eq!(eval(&m, 0, "x1", &parse("B[a,b] Ub").unwrap()), Ok(true));
    }

    #[test]
    fn unknown_world_is_an_error_unknown_prop_is_false() {
        let m = m0();
        assert_eq!(
            eval(&m, 0, "zz", &Formula::DiagAtom),
            Err(SemanticsError::UnknownWorld("zz".into()))
        );
        assert_eq!(eval(&m, 0, "x1", &parse("p").unwrap()), Ok(false));
    }

    #[test]
    fn big_instants_canonicalize() {
        let m = m1();
        assert_eq!(
            eval(&m, 101, "x1", &Formula::DiagAtom),
            eval(&m, 1, "x1", &Formula::DiagAtom)
        );
    }

    #[test]
    fn assumed_sets_read_off_the_relations() {
        let m = m0();
        assert_eq!(assumed_set(&m, 0, "x1"), Ok(set(&["y1"])));
        assert_eq!(assumed_set(&m, 0, "y2"), Ok(set(&["x1"])));
        for w in ["x1", "x2", "y1", "y2"] {
            assert!(!assumed_set(&m, 0, w).unwrap().is_empty(), "serial at {w}");
        }
    }

    #[test]
    fn believes_and_assumes_queries() {
        let m = m0();
        assert_eq!(believes(&m, 0, "x1", &set(&["y1", "y2"])), Ok(true));
        assert_eq!(assumes(&m, 0, "x1", &set(&["y1", "y2"])), Ok(false));
        assert_eq!(believes(&m, 0, "x1", &set(&["y1"])), Ok(true));
        assert_eq!(assumes(&m, 0, "x1", &set(&["y1"])), Ok(true));
        assert_eq!(believes(&m, 0, "x1", &set(&[])), Ok(false));
    }

    #[test]
    fn belief_queries_reject_bad_candidate_sets() {
        let m = m0();
        assert_eq!(
            believes(&m, 0, "x1", &set(&["x2"])),
            Err(SemanticsError::WrongSort {
                subject: "x1".into(),
                world: "x2".into()
            })
        );
        assert_eq!(
            assumes(&m, 0, "x1", &set(&["nope"])),
            Err(SemanticsError::UnknownWorld("nope".into()))
        );
    }

    #[test]
    fn diag_slice_excludes_mutual_pairs() {
        let desc = ModelDescription {
            worlds_a: vec!["x1".into(), "x2".into()],
            worlds_b: vec!["y1".into(), "y2".into()],
            prefix_len: 0,
            loop_len: 1,
            slices: vec![SliceDescription {
                rel_ab: vec![("x1".into(), "y1".into()), ("x2".into(), "y1".into())],
                rel_ba: vec![("y1".into(), "x1".into()), ("y2".into(), "x1".into())],
            }],
            valuation: BTreeMap::new(),
            strict_proper: true,
        };
        let m = validate(&desc).unwrap();
        assert!(!diag_slice(&m, 0).contains("x1"));
    }

    #[test]
    fn same_agent_belief_is_vacuous() {
        // Relations only cross sorts, so B[i,i] has no worlds to constrain.
        let m = m1();
        for t in 0..4u64 {
            for x in ["x1", "x2"] {
                assert_eq!(eval(&m, t, x, &parse("B[a,a] false").unwrap()), Ok(true));
                assert_eq!(eval(&m, t, x, &parse("B[b,b] false").unwrap()), Ok(false));
            }
            for y in ["y1", "y2"] {
                assert_eq!(eval(&m, t, y, &parse("B[b,b] false").unwrap()), Ok(true));
            }
        }
    }

    #[test]
    fn same_agent_assumption_requires_the_formula_nowhere() {
        // The biconditional clause quantifies over every world, so A[i,i] f
        // holds at a world of sort i exactly when f holds nowhere at that
        // instant.
        let m = m0();
        assert_eq!(eval(&m, 0, "x1", &parse("A[a,a] false").unwrap()), Ok(true));
        assert_eq!(eval(&m, 0, "x1", &parse("A[a,a] D").unwrap()), Ok(false));
        assert_eq!(eval(&m, 0, "x1", &parse("A[a,a] Ub").unwrap()), Ok(false));
        assert_eq!(eval(&m, 0, "y1", &parse("A[b,b] false").unwrap()), Ok(true));
    }

    #[test]
    fn epistemic_operators_gate_on_the_believer_sort() {
        let m = m0();
        for f in ["B[a,b] true", "A[a,b] Ub", "B[a,a] true"] {
            let f = parse(f).unwrap();
            assert_eq!(eval(&m, 0, "y1", &f), Ok(false), "{f} at a b-world");
        }
    }

    #[test]
    fn assumption_matches_the_set_query() {
        let m = m0();
        // A[a,b] Ub holds exactly where the possible set is all of sort b.
        for x in ["x1", "x2"] {
            let by_formula = eval(&m, 0, x, &parse("A[a,b] Ub").unwrap()).unwrap();
            let by_set = assumes(&m, 0, x, &set(&["y1", "y2"])).unwrap();
            assert_eq!(by_formula, by_set);
        }
    }

    #[test]
    fn belief_slice_shape_matches_queries() {
        let m = m1();
        let slice = m.belief_slice(1);
        assert!(slice.rel_ba.contains(&("y1".into(), "x1".into())));
        assert_eq!(assumed_set(&m, 1, "y1").unwrap(), set(&["x1"]),);
    }
}
