//! Model checker for an interactive temporal assumption logic: a modal
//! language with next/always/sometime plus indexed belief and assumption
//! operators, interpreted over time-indexed two-sorted belief models.
//!
//! Infinite time is represented finitely by lasso models (a prefix of slices
//! followed by a repeating loop), which makes every temporal quantifier
//! decidable exactly. On top of the evaluator sit harnesses that verify the
//! two validity properties of the logic instance-by-instance on exhaustively
//! enumerated small models, a completeness checker reproducing the
//! Brandenburger-Keisler impossibility at desk scale, and a solver for the
//! Yablo sentence scheme the temporal construction mirrors.

pub mod checker;
pub mod completeness;
pub mod formula;
pub mod model;
pub mod parser;
pub mod semantics;
pub mod yablo;

pub use checker::{
    check_theorem1, check_theorem2, check_theorem2_variant, satisfiable, sweep_theorems, valid,
    TheoremReport, TheoremSweep, Verdict, Witness, WitnessKind,
};
pub use completeness::{
    bk_sweep, definable_sets, is_complete, CompletenessError, CompletenessReport,
    CompletenessVerdict, CompletenessWitness, DefinableFamily, DefinableSet, SweepReport,
};
pub use formula::{Agent, CoreFormula, Formula, FormulaError, RESERVED_ATOMS};
pub use model::{
    enumerate_models, validate, BeliefSlice, EnumSpec, EnumSpecError, ModelDescription,
    ModelEnumerator, ModelViolation, SliceDescription, TemporalModel,
};
pub use parser::{parse, ParseError};
pub use semantics::{
    assumed_set, assumes, believes, diag_slice, eval, eval_core, EvalPoint, SemanticsError,
};
pub use yablo::{finite_yablo, periodic_yablo, Assignment, YabloError};
