//! Formula AST: construction, normalization into the core fragment, and
//! minimal-parenthesis printing.

use std::fmt;

use thiserror::Error;

/// One of the two players. Sorts, possibility relations, and the epistemic
/// operators are all indexed by agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    A,
    B,
}

impl Agent {
    pub fn other(self) -> Agent {
        match self {
            Agent::A => Agent::B,
            Agent::B => Agent::A,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Agent::A => 'a',
            Agent::B => 'b',
        }
    }

    pub fn from_tag(c: char) -> Option<Agent> {
        match c {
            'a' => Some(Agent::A),
            'b' => Some(Agent::B),
            _ => None,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// Built-in atoms of the language. These cannot be used as proposition names.
pub const RESERVED_ATOMS: &[&str] = &["Ua", "Ub", "D", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("`{0}` is a reserved word and cannot be used as a proposition")]
    ReservedProp(String),
    #[error("`{0}` is not a valid proposition name (letter followed by letters, digits or `_`)")]
    InvalidPropName(String),
    #[error("formula is not in the core fragment: contains `{0}`")]
    NotCore(&'static str),
}

/// A formula of the logic.
///
/// `SortAtom(a)` holds exactly at the worlds of that agent's sort, and
/// `DiagAtom` is the built-in diagonal atom: it holds at a world when none of
/// its possible worlds consider it possible back at the same instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    SortAtom(Agent),
    DiagAtom,
    Truth,
    Falsity,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Always(Box<Formula>),
    Sometime(Box<Formula>),
    Believe(Agent, Agent, Box<Formula>),
    Assume(Agent, Agent, Box<Formula>),
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Formula {
    /// Builds a proposition, rejecting reserved words and malformed names.
    ///
    /// Names that collide with the operator keywords `X`, `G`, `F` are
    /// accepted here but cannot be written in the concrete syntax.
    pub fn prop(name: impl Into<String>) -> Result<Formula, FormulaError> {
        let name = name.into();
        if RESERVED_ATOMS.contains(&name.as_str()) {
            return Err(FormulaError::ReservedProp(name));
        }
        if !is_identifier(&name) {
            return Err(FormulaError::InvalidPropName(name));
        }
        Ok(Formula::Prop(name))
    }

    // Constructor, not a logical trait impl; the name mirrors the variant.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Formula::Always(Box::new(f))
    }

    pub fn sometime(f: Formula) -> Formula {
        Formula::Sometime(Box::new(f))
    }

    pub fn believe(i: Agent, j: Agent, f: Formula) -> Formula {
        Formula::Believe(i, j, Box::new(f))
    }

    pub fn assume(i: Agent, j: Agent, f: Formula) -> Formula {
        Formula::Assume(i, j, Box::new(f))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_)
            | Formula::SortAtom(_)
            | Formula::DiagAtom
            | Formula::Truth
            | Formula::Falsity => 1,
            Formula::Not(x)
            | Formula::Next(x)
            | Formula::Always(x)
            | Formula::Sometime(x)
            | Formula::Believe(_, _, x)
            | Formula::Assume(_, _, x) => 1 + x.size(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::SortAtom(_) | Formula::DiagAtom => true,
            Formula::Truth | Formula::Falsity => false,
            Formula::Not(x)
            | Formula::Next(x)
            | Formula::Always(x)
            | Formula::Believe(_, _, x)
            | Formula::Assume(_, _, x) => x.is_core(),
            Formula::And(l, r) => l.is_core() && r.is_core(),
            Formula::Or(_, _)
            | Formula::Implies(_, _)
            | Formula::Iff(_, _)
            | Formula::Sometime(_) => false,
        }
    }

    /// Rewrites the formula into the core fragment.
    ///
    /// `F x` becomes `!G !x`, the derived boolean connectives are expanded
    /// classically, and `true`/`false` compile to a fixed core tautology and
    /// its contradiction so the evaluator's case analysis stays minimal.
    pub fn desugar(&self) -> CoreFormula {
        CoreFormula(self.desugar_node())
    }

    fn desugar_node(&self) -> Formula {
        match self {
            Formula::Prop(_) | Formula::SortAtom(_) | Formula::DiagAtom => self.clone(),
            Formula::Truth => Formula::not(core_contradiction()),
            Formula::Falsity => core_contradiction(),
            Formula::Not(x) => Formula::not(x.desugar_node()),
            Formula::And(l, r) => Formula::and(l.desugar_node(), r.desugar_node()),
            Formula::Or(l, r) => Formula::not(Formula::and(
                Formula::not(l.desugar_node()),
                Formula::not(r.desugar_node()),
            )),
            Formula::Implies(l, r) => Formula::not(Formula::and(
                l.desugar_node(),
                Formula::not(r.desugar_node()),
            )),
            Formula::Iff(l, r) => {
                let fwd = Formula::implies((**l).clone(), (**r).clone());
                let back = Formula::implies((**r).clone(), (**l).clone());
                Formula::and(fwd.desugar_node(), back.desugar_node())
            }
            Formula::Next(x) => Formula::next(x.desugar_node()),
            Formula::Always(x) => Formula::always(x.desugar_node()),
            Formula::Sometime(x) => Formula::not(Formula::always(Formula::not(x.desugar_node()))),
            Formula::Believe(i, j, x) => Formula::believe(*i, *j, x.desugar_node()),
            Formula::Assume(i, j, x) => Formula::assume(*i, *j, x.desugar_node()),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(_, _) => 1,
            Formula::Implies(_, _) => 2,
            Formula::Or(_, _) => 3,
            Formula::And(_, _) => 4,
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::Always(_)
            | Formula::Sometime(_)
            | Formula::Believe(_, _, _)
            | Formula::Assume(_, _, _) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, out: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        if self.prec() < ctx {
            write!(out, "(")?;
            self.fmt_body(out)?;
            write!(out, ")")
        } else {
            self.fmt_body(out)
        }
    }

    fn fmt_body(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prop(name) => write!(out, "{name}"),
            Formula::SortAtom(ag) => write!(out, "U{ag}"),
            Formula::DiagAtom => write!(out, "D"),
            Formula::Truth => write!(out, "true"),
            Formula::Falsity => write!(out, "false"),
            Formula::Not(x) => {
                write!(out, "!")?;
                x.fmt_prec(out, 5)
            }
            Formula::And(l, r) => {
                l.fmt_prec(out, 4)?;
                write!(out, " & ")?;
                r.fmt_prec(out, 5)
            }
            Formula::Or(l, r) => {
                l.fmt_prec(out, 3)?;
                write!(out, " | ")?;
                r.fmt_prec(out, 4)
            }
            Formula::Implies(l, r) => {
                l.fmt_prec(out, 3)?;
                write!(out, " -> ")?;
                r.fmt_prec(out, 2)
            }
            Formula::Iff(l, r) => {
                l.fmt_prec(out, 1)?;
                write!(out, " <-> ")?;
                r.fmt_prec(out, 2)
            }
            Formula::Next(x) => {
                write!(out, "X ")?;
                x.fmt_prec(out, 5)
            }
            Formula::Always(x) => {
                write!(out, "G ")?;
                x.fmt_prec(out, 5)
            }
            Formula::Sometime(x) => {
                write!(out, "F ")?;
                x.fmt_prec(out, 5)
            }
            Formula::Believe(i, j, x) => {
                write!(out, "B[{i},{j}] ")?;
                x.fmt_prec(out, 5)
            }
            Formula::Assume(i, j, x) => {
                write!(out, "A[{i},{j}] ")?;
                x.fmt_prec(out, 5)
            }
        }
    }
}

fn core_contradiction() -> Formula {
    Formula::and(Formula::DiagAtom, Formula::not(Formula::DiagAtom))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 1)
    }
}

/// A formula restricted to the core connectives: atoms, `!`, `&`, `X`, `G`
/// and the indexed belief/assumption operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoreFormula(Formula);

impl CoreFormula {
    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl TryFrom<Formula> for CoreFormula {
    type Error = FormulaError;

    fn try_from(f: Formula) -> Result<Self, Self::Error> {
        fn offending(f: &Formula) -> Option<&'static str> {
            match f {
                Formula::Prop(_) | Formula::SortAtom(_) | Formula::DiagAtom => None,
                Formula::Truth => Some("true"),
                Formula::Falsity => Some("false"),
                Formula::Or(_, _) => Some("|"),
                Formula::Implies(_, _) => Some("->"),
                Formula::Iff(_, _) => Some("<->"),
                Formula::Sometime(_) => Some("F"),
                Formula::Not(x)
                | Formula::Next(x)
                | Formula::Always(x)
                | Formula::Believe(_, _, x)
                | Formula::Assume(_, _, x) => offending(x),
                Formula::And(l, r) => offending(l).or_else(|| offending(r)),
            }
        }
        match offending(&f) {
            None => Ok(CoreFormula(f)),
            Some(conn) => Err(FormulaError::NotCore(conn)),
        }
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
