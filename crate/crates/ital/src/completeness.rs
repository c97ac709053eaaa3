//! Definable-set computation and completeness checking for static belief
//! models.
//!
//! The definable family is built from the atoms `Ua`, `Ub`, `D` under `!`,
//! `&` and the indexed belief/assumption operators, with truth sets
//! deduplicated level by level so the enumeration stays tiny. A model is
//! complete when every nonempty definable set of one sort is assumed by some
//! world of the other sort; the sweep reproduces, model by model, that no
//! small strict model is.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::model::{enumerate_models, EnumSpec, EnumSpecError, TemporalModel};

/// Depth cap for definable-set enumeration; families on desk-scale models
/// saturate well below it.
pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletenessError {
    #[error("completeness analysis requires a static model (prefix 0, loop 1)")]
    NonStaticModel,
    #[error("depth {depth} exceeds the supported maximum {MAX_DEPTH}")]
    DepthTooLarge { depth: usize },
    #[error("the sweep requires a static shape (prefix 0, loop 1)")]
    SweepRequiresStatic,
    #[error("the sweep requires strict properness")]
    SweepRequiresStrict,
    #[error(transparent)]
    Enumeration(#[from] EnumSpecError),
}

/// One definable set together with a smallest defining formula found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinableSet {
    pub worlds: BTreeSet<String>,
    pub formula: Formula,
}

/// All distinct sets of one sort definable up to the given operator depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinableFamily {
    pub sort: Agent,
    pub sets: Vec<DefinableSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompletenessVerdict {
    #[serde(rename = "complete")]
    Complete,
    #[serde(rename = "incomplete")]
    Incomplete,
}

/// A nonempty definable set no opposite-sort world assumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessWitness {
    pub sort: Agent,
    pub set: BTreeSet<String>,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub model: String,
    pub depth: usize,
    pub verdict: CompletenessVerdict,
    pub witness: Option<CompletenessWitness>,
}

impl CompletenessReport {
    pub fn to_json(&self) -> serde_json::Value {
        let witness = match &self.witness {
            None => serde_json::Value::Null,
            Some(w) => serde_json::json!({
                "sort": w.sort.to_string(),
                "set": w.set,
                "formula": w.formula.to_string(),
            }),
        };
        serde_json::json!({
            "model": self.model,
            "depth": self.depth,
            "verdict": self.verdict,
            "witness": witness,
        })
    }
}

fn require_static(m: &TemporalModel) -> Result<(), CompletenessError> {
    if m.prefix_len() == 0 && m.loop_len() == 1 {
        Ok(())
    } else {
        Err(CompletenessError::NonStaticModel)
    }
}

fn sort_mask(m: &TemporalModel, sort: Agent) -> u64 {
    m.sort_range(sort).map(|w| 1u64 << w).sum()
}

/// Truth mask of the diagonal atom at time 0.
fn diag_mask(m: &TemporalModel) -> u64 {
    let mut mask = 0u64;
    for w in 0..m.num_worlds() {
        let hostile = (0..m.num_worlds()).any(|z| m.edge(0, w, z) && m.edge(0, z, w));
        if !hostile {
            mask |= 1 << w;
        }
    }
    mask
}

fn believe_mask(m: &TemporalModel, i: Agent, j: Agent, child: u64) -> u64 {
    let subjects = sort_mask(m, j);
    let mut mask = 0u64;
    for w in m.sort_range(i) {
        if m.succ_mask(0, w) & subjects & !child == 0 {
            mask |= 1 << w;
        }
    }
    mask
}

fn assume_mask(m: &TemporalModel, i: Agent, j: Agent, child: u64) -> u64 {
    let subjects = sort_mask(m, j);
    let mut mask = 0u64;
    for w in m.sort_range(i) {
        if m.succ_mask(0, w) & subjects == child {
            mask |= 1 << w;
        }
    }
    mask
}

fn better(a: &Formula, b: &Formula) -> bool {
    (a.size(), a.to_string()) < (b.size(), b.to_string())
}

const AGENT_PAIRS: [(Agent, Agent); 4] = [
    (Agent::A, Agent::A),
    (Agent::A, Agent::B),
    (Agent::B, Agent::A),
    (Agent::B, Agent::B),
];

/// Representatives of every distinct full-world truth set reachable within
/// `depth` operator applications, each paired with a smallest formula found.
fn definable_reps(m: &TemporalModel, depth: usize) -> Vec<(u64, Formula)> {
    let full = (1u64 << m.num_worlds()) - 1;
    let atoms = [
        (sort_mask(m, Agent::A), Formula::SortAtom(Agent::A)),
        (sort_mask(m, Agent::B), Formula::SortAtom(Agent::B)),
        (diag_mask(m), Formula::DiagAtom),
    ];

    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut levels: Vec<Vec<(u64, Formula)>> = Vec::new();

    let mut level0: BTreeMap<u64, Formula> = BTreeMap::new();
    for (mask, f) in atoms {
        match level0.get(&mask) {
            Some(existing) if !better(&f, existing) => {}
            _ => {
                level0.insert(mask, f);
            }
        }
    }
    seen.extend(level0.keys().map(|&k| (k, ())));
    levels.push(level0.into_iter().collect());

    for k in 1..=depth {
        let mut candidates: Vec<(u64, Formula)> = Vec::new();
        for (mask, f) in &levels[k - 1] {
            candidates.push((full & !mask, Formula::not(f.clone())));
            for (i, j) in AGENT_PAIRS {
                candidates.push((
                    believe_mask(m, i, j, *mask),
                    Formula::believe(i, j, f.clone()),
                ));
                candidates.push((
                    assume_mask(m, i, j, *mask),
                    Formula::assume(i, j, f.clone()),
                ));
            }
        }
        for p in 0..k {
            let q = k - 1 - p;
            for (m1, f1) in &levels[p] {
                for (m2, f2) in &levels[q] {
                    candidates.push((m1 & m2, Formula::and(f1.clone(), f2.clone())));
                }
            }
        }

        let mut fresh: BTreeMap<u64, Formula> = BTreeMap::new();
        for (mask, f) in candidates {
            if seen.contains_key(&mask) {
                continue;
            }
            match fresh.get(&mask) {
                Some(existing) if !better(&f, existing) => {}
                _ => {
                    fresh.insert(mask, f);
                }
            }
        }
        seen.extend(fresh.keys().map(|&k| (k, ())));
        levels.push(fresh.into_iter().collect());
    }

    levels.into_iter().flatten().collect()
}

/// Distinct truth sets restricted to one sort, from the masked closure.
fn definable_masks(m: &TemporalModel, depth: usize, sort: Agent) -> Vec<(u64, Formula)> {
    let restriction = sort_mask(m, sort);
    let mut best: BTreeMap<u64, Formula> = BTreeMap::new();
    for (mask, f) in definable_reps(m, depth) {
        let restricted = mask & restriction;
        match best.get(&restricted) {
            Some(existing) if !better(&f, existing) => {}
            _ => {
                best.insert(restricted, f);
            }
        }
    }
    let mut out: Vec<(u64, Formula)> = best.into_iter().collect();
    out.sort_by_key(|(_, f)| (f.size(), f.to_string()));
    out
}

fn names(m: &TemporalModel, mask: u64) -> BTreeSet<String> {
    (0..m.num_worlds())
        .filter(|&w| mask >> w & 1 == 1)
        .map(|w| m.world_name(w).to_string())
        .collect()
}

/// Enumerates the sets of the chosen sort definable within `depth` operator
/// applications over the atoms `Ua`, `Ub`, `D`. Depth 0 is atoms only.
pub fn definable_sets(
    m: &TemporalModel,
    depth: usize,
    sort: Agent,
) -> Result<DefinableFamily, CompletenessError> {
    require_static(m)?;
    if depth > MAX_DEPTH {
        return Err(CompletenessError::DepthTooLarge { depth });
    }
    let sets = definable_masks(m, depth, sort)
        .into_iter()
        .map(|(mask, formula)| DefinableSet {
            worlds: names(m, mask),
            formula,
        })
        .collect();
    Ok(DefinableFamily { sort, sets })
}

/// Tests whether every nonempty definable set of each sort is assumed by
/// some world of the other sort. On failure, reports the first failing set
/// in (formula size, rendered text) order.
pub fn is_complete(
    m: &TemporalModel,
    depth: usize,
) -> Result<CompletenessReport, CompletenessError> {
    require_static(m)?;
    if depth > MAX_DEPTH {
        return Err(CompletenessError::DepthTooLarge { depth });
    }

    let mut candidates: Vec<(Agent, u64, Formula)> = Vec::new();
    for sort in [Agent::B, Agent::A] {
        for (mask, f) in definable_masks(m, depth, sort) {
            if mask != 0 {
                candidates.push((sort, mask, f));
            }
        }
    }
    candidates.sort_by(|(sa, _, fa), (sb, _, fb)| {
        (fa.size(), fa.to_string(), *sa == Agent::A).cmp(&(
            fb.size(),
            fb.to_string(),
            *sb == Agent::A,
        ))
    });

    for (sort, mask, formula) in candidates {
        let assumed = m
            .sort_range(sort.other())
            .any(|x| m.succ_mask(0, x) == mask);
        if !assumed {
            return Ok(CompletenessReport {
                model: m.to_string(),
                depth,
                verdict: CompletenessVerdict::Incomplete,
                witness: Some(CompletenessWitness {
                    sort,
                    set: names(m, mask),
                    formula,
                }),
            });
        }
    }
    Ok(CompletenessReport {
        model: m.to_string(),
        depth,
        verdict: CompletenessVerdict::Complete,
        witness: None,
    })
}

/// Aggregate completeness results over an enumerated family of static
/// models. Any complete model is listed for inspection: at depths where the
/// diagonal atom can interact with the epistemic operators, completeness
/// would contradict the expected impossibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub spec: EnumSpec,
    pub depth: usize,
    pub models_total: usize,
    pub models_incomplete: usize,
    pub complete_models: Vec<String>,
}

/// Runs [`is_complete`] over every model of the shape.
pub fn bk_sweep(spec: &EnumSpec, depth: usize) -> Result<SweepReport, CompletenessError> {
    if spec.prefix_len != 0 || spec.loop_len != 1 {
        return Err(CompletenessError::SweepRequiresStatic);
    }
    if !spec.strict_proper {
        return Err(CompletenessError::SweepRequiresStrict);
    }
    if depth > MAX_DEPTH {
        return Err(CompletenessError::DepthTooLarge { depth });
    }

    let models: Vec<TemporalModel> = enumerate_models(spec)?.collect();
    let verdicts: Vec<(String, CompletenessVerdict)> = models
        .par_iter()
        .map(|m| {
            let report = is_complete(m, depth).expect("enumerated models are static");
            (report.model, report.verdict)
        })
        .collect();

    let mut report = SweepReport {
        spec: *spec,
        depth,
        models_total: verdicts.len(),
        models_incomplete: 0,
        complete_models: Vec::new(),
    };
    for (model, verdict) in verdicts {
        match verdict {
            CompletenessVerdict::Incomplete => report.models_incomplete += 1,
            CompletenessVerdict::Complete => report.complete_models.push(model),
        }
    }
    Ok(report)
}
