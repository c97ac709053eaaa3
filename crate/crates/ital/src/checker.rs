//! Model-level satisfiability and validity with reproducible witnesses, and
//! the per-model harnesses for the two temporal impossibility properties.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::formula::Formula;
use crate::model::{enumerate_models, EnumSpec, EnumSpecError, TemporalModel};
use crate::parser::parse;
use crate::semantics::{eval_at, EvalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    #[serde(rename = "satisfying")]
    Satisfying,
    #[serde(rename = "refuting")]
    Refuting,
}

/// A (time, world) point certifying satisfiability or refuting validity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub time: usize,
    pub world: String,
    pub kind: WitnessKind,
}

impl Witness {
    /// The bare point, the shape reports serialize.
    pub fn point(&self) -> EvalPoint {
        EvalPoint {
            time: self.time,
            world: self.world.clone(),
        }
    }

    fn point_json(&self) -> serde_json::Value {
        json!(self.point())
    }
}

/// Search order is time-major, worlds by name, so identical inputs always
/// produce identical witnesses.
fn search(m: &TemporalModel, f: &Formula, want: bool) -> Option<(usize, usize)> {
    for t in 0..m.num_times() {
        for &w in m.search_order() {
            if eval_at(m, t, w, f) == want {
                return Some((t, w));
            }
        }
    }
    None
}

/// First satisfying point, if any. Canonical instants suffice: truth at any
/// instant equals truth at its canonical image.
pub fn satisfiable(m: &TemporalModel, f: &Formula) -> Option<Witness> {
    search(m, f, true).map(|(time, w)| Witness {
        time,
        world: m.world_name(w).to_string(),
        kind: WitnessKind::Satisfying,
    })
}

/// `None` when `f` holds at every point; otherwise the first refuting point.
pub fn valid(m: &TemporalModel, f: &Formula) -> Option<Witness> {
    search(m, f, false).map(|(time, w)| Witness {
        time,
        world: m.world_name(w).to_string(),
        kind: WitnessKind::Refuting,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "vacuous")]
    Vacuous,
    #[serde(rename = "VIOLATION")]
    Violation,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Vacuous => write!(f, "vacuous"),
            Verdict::Violation => write!(f, "VIOLATION"),
        }
    }
}

/// Outcome of one theorem check on one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub model: String,
    pub formula: String,
    pub verdict: Verdict,
    /// Point satisfying the precondition, when the theorem has one.
    pub antecedent_witness: Option<Witness>,
    /// Refuting point, only on a violation.
    pub counterexample: Option<Witness>,
}

impl TheoremReport {
    /// The wire shape: `{model, formula, verdict, witness}`.
    pub fn to_json(&self) -> serde_json::Value {
        let witness = self
            .counterexample
            .as_ref()
            .or(self.antecedent_witness.as_ref())
            .map(|w| w.point_json())
            .unwrap_or(serde_json::Value::Null);
        json!({
            "model": self.model,
            "formula": self.formula,
            "verdict": self.verdict,
            "witness": witness,
        })
    }
}

fn parse_fixed(text: &str) -> Formula {
    parse(text).expect("fixed formula parses")
}

/// Precondition of the conditional validity: somebody always assumes the
/// whole opposite sort.
pub fn theorem1_antecedent() -> Formula {
    parse_fixed("G(A[a,b] Ub)")
}

pub fn theorem1_formula() -> Formula {
    parse_fixed("G(B[a,b] A[b,a] (X G D)) -> G D")
}

pub fn theorem2_formula() -> Formula {
    parse_fixed("!G(B[a,b] A[b,a] (Ua & X G D))")
}

/// As [`theorem2_formula`] but without the sort conjunct.
pub fn theorem2_variant_formula() -> Formula {
    parse_fixed("!G(B[a,b] A[b,a] (X G D))")
}

/// Conditional validity check: when `G(A[a,b] Ub)` is satisfiable, the
/// guarded diagonal formula must be valid. Vacuous when the precondition
/// cannot be met on this model.
pub fn check_theorem1(m: &TemporalModel) -> TheoremReport {
    let formula = theorem1_formula();
    let antecedent_witness = satisfiable(m, &theorem1_antecedent());
    let (verdict, counterexample) = match &antecedent_witness {
        None => (Verdict::Vacuous, None),
        Some(_) => match valid(m, &formula) {
            None => (Verdict::Holds, None),
            Some(cex) => (Verdict::Violation, Some(cex)),
        },
    };
    TheoremReport {
        model: m.to_string(),
        formula: formula.to_string(),
        verdict,
        antecedent_witness,
        counterexample,
    }
}

fn check_unconditional(m: &TemporalModel, formula: Formula) -> TheoremReport {
    let (verdict, counterexample) = match valid(m, &formula) {
        None => (Verdict::Holds, None),
        Some(cex) => (Verdict::Violation, Some(cex)),
    };
    TheoremReport {
        model: m.to_string(),
        formula: formula.to_string(),
        verdict,
        antecedent_witness: None,
        counterexample,
    }
}

/// Unconditional validity check of the negated configuration formula.
/// Never vacuous; a refuting point is a point realizing the configuration.
pub fn check_theorem2(m: &TemporalModel) -> TheoremReport {
    check_unconditional(m, theorem2_formula())
}

/// The variant without the sort conjunct, for comparing the two readings.
pub fn check_theorem2_variant(m: &TemporalModel) -> TheoremReport {
    check_unconditional(m, theorem2_variant_formula())
}

/// Aggregate of both theorem checks over an enumerated model family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremSweep {
    pub spec: EnumSpec,
    pub models_total: usize,
    pub theorem1_holds: usize,
    pub theorem1_vacuous: usize,
    pub theorem1_violations: usize,
    pub theorem2_holds: usize,
    pub theorem2_violations: usize,
    /// First violating report in enumeration order, from either theorem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<serde_json::Value>,
}

impl TheoremSweep {
    pub fn violation_free(&self) -> bool {
        self.theorem1_violations == 0 && self.theorem2_violations == 0
    }
}

/// Runs both theorem checks over every model of the shape. Models are
/// processed in parallel; aggregation follows enumeration order.
pub fn sweep_theorems(spec: &EnumSpec, variant: bool) -> Result<TheoremSweep, EnumSpecError> {
    let models: Vec<TemporalModel> = enumerate_models(spec)?.collect();
    let results: Vec<(TheoremReport, TheoremReport)> = models
        .par_iter()
        .map(|m| {
            let t2 = if variant {
                check_theorem2_variant(m)
            } else {
                check_theorem2(m)
            };
            (check_theorem1(m), t2)
        })
        .collect();

    let mut sweep = TheoremSweep {
        spec: *spec,
        models_total: results.len(),
        theorem1_holds: 0,
        theorem1_vacuous: 0,
        theorem1_violations: 0,
        theorem2_holds: 0,
        theorem2_violations: 0,
        first_violation: None,
    };
    for (t1, t2) in &results {
        match t1.verdict {
            Verdict::Holds => sweep.theorem1_holds += 1,
            Verdict::Vacuous => sweep.theorem1_vacuous += 1,
            Verdict::Violation => sweep.theorem1_violations += 1,
        }
        match t2.verdict {
            Verdict::Holds => sweep.theorem2_holds += 1,
            Verdict::Vacuous => unreachable!("unconditional check cannot be vacuous"),
            Verdict::Violation => sweep.theorem2_violations += 1,
        }
        if sweep.first_violation.is_none() {
            for report in [t1, t2] {
                if report.verdict == Verdict::Violation {
                    sweep.first_violation = Some(report.to_json());
                    break;
                }
            }
        }
    }
    Ok(sweep)
}
