//! Finite lasso representation of time-indexed belief models: validation,
//! JSON (de)serialization, and exhaustive enumeration of small model families.
//!
//! Time is a finite prefix of slices followed by a repeating loop, so every
//! quantifier over instants is decided exactly on the stored slices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_identifier, Agent, RESERVED_ATOMS};

/// Hard cap on the total world count; relations are stored as 64-bit rows.
pub const MAX_WORLDS: usize = 64;

fn default_strict() -> bool {
    true
}

/// One time slice of the raw model file: the two possibility relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceDescription {
    pub rel_ab: Vec<(String, String)>,
    pub rel_ba: Vec<(String, String)>,
}

/// The on-disk model format. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescription {
    pub worlds_a: Vec<String>,
    pub worlds_b: Vec<String>,
    pub prefix_len: usize,
    pub loop_len: usize,
    pub slices: Vec<SliceDescription>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<(u64, String)>>,
    #[serde(default = "default_strict")]
    pub strict_proper: bool,
}

/// Which of the two relations a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelKind {
    Ab,
    Ba,
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelKind::Ab => write!(f, "rel_ab"),
            RelKind::Ba => write!(f, "rel_ba"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelViolation {
    #[error("loop_len must be at least 1")]
    ZeroLoop,
    #[error("expected {expected} slices (prefix_len + loop_len) but found {found}")]
    SliceCountMismatch { expected: usize, found: usize },
    #[error("sort {sort} has no worlds")]
    EmptySort { sort: Agent },
    #[error("world `{world}` is declared more than once")]
    DuplicateWorld { world: String },
    #[error("world `{world}` appears in both sorts")]
    OverlappingSorts { world: String },
    #[error("model has {count} worlds; at most {MAX_WORLDS} are supported")]
    TooManyWorlds { count: usize },
    #[error("{rel} at time {time} mentions unknown world `{world}`")]
    UnknownWorldInRelation {
        time: usize,
        rel: RelKind,
        world: String,
    },
    #[error("{rel} at time {time} contains pair ({from},{to}) with the wrong sorts")]
    WrongSortInRelation {
        time: usize,
        rel: RelKind,
        from: String,
        to: String,
    },
    #[error("seriality violated at time {time}: world `{world}` has no successor")]
    NonSerial { time: usize, world: String },
    #[error("properness violated at time {time}: {rel} is the full product")]
    NonProper { time: usize, rel: RelKind },
    #[error("valuation uses reserved atom `{name}`")]
    ReservedValuationAtom { name: String },
    #[error("valuation uses invalid proposition name `{name}`")]
    InvalidValuationProp { name: String },
    #[error("valuation of `{prop}` mentions unknown world `{world}`")]
    UnknownWorldInValuation { prop: String, world: String },
    #[error("valuation of `{prop}` uses time {time}, beyond the stored range")]
    ValuationTimeOutOfRange { prop: String, time: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slice {
    /// Successor bitmask per world index; only cross-sort bits are ever set.
    succ: Vec<u64>,
}

impl Slice {
    #[allow(clippy::needless_range_loop)]
    fn from_masks(size_a: usize, size_b: usize, ab: u64, ba: u64) -> Slice {
        let total = size_a + size_b;
        let mut succ = vec![0u64; total];
        for i in 0..size_a {
            for j in 0..size_b {
                if ab >> (i * size_b + j) & 1 == 1 {
                    succ[i] |= 1 << (size_a + j);
                }
            }
        }
        for j in 0..size_b {
            for i in 0..size_a {
                if ba >> (j * size_a + i) & 1 == 1 {
                    succ[size_a + j] |= 1 << i;
                }
            }
        }
        Slice { succ }
    }
}

/// A validated model: a fixed two-sorted world set, an ultimately periodic
/// family of possibility relations, and a valuation on canonical instants.
///
/// Immutable after validation; all queries are read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalModel {
    worlds: Vec<String>,
    num_a: usize,
    prefix_len: usize,
    loop_len: usize,
    slices: Vec<Slice>,
    valuation: BTreeMap<String, BTreeSet<(usize, usize)>>,
    strict_proper: bool,
    /// World indices ordered by name; fixes the search order for witnesses.
    search_order: Vec<usize>,
}

/// One time slice presented with world names, in the shape of a static
/// belief model: two sorts plus the two cross-sort relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefSlice {
    pub worlds_a: Vec<String>,
    pub worlds_b: Vec<String>,
    pub rel_ab: BTreeSet<(String, String)>,
    pub rel_ba: BTreeSet<(String, String)>,
}

/// Checks every structural invariant of the description and builds the
/// internal representation. All violations are reported, not just the first.
pub fn validate(desc: &ModelDescription) -> Result<TemporalModel, Vec<ModelViolation>> {
    let mut violations = Vec::new();

    if desc.loop_len == 0 {
        violations.push(ModelViolation::ZeroLoop);
    }
    let expected_slices = desc.prefix_len + desc.loop_len;
    if desc.slices.len() != expected_slices {
        violations.push(ModelViolation::SliceCountMismatch {
            expected: expected_slices,
            found: desc.slices.len(),
        });
    }
    if desc.worlds_a.is_empty() {
        violations.push(ModelViolation::EmptySort { sort: Agent::A });
    }
    if desc.worlds_b.is_empty() {
        violations.push(ModelViolation::EmptySort { sort: Agent::B });
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut worlds = Vec::new();
    for name in desc.worlds_a.iter().chain(&desc.worlds_b) {
        if index.insert(name, worlds.len()).is_some() {
            let dup = name.clone();
            if desc.worlds_a.contains(name) && desc.worlds_b.contains(name) {
                violations.push(ModelViolation::OverlappingSorts { world: dup });
            } else {
                violations.push(ModelViolation::DuplicateWorld { world: dup });
            }
        } else {
            worlds.push(name.clone());
        }
    }
    if worlds.len() > MAX_WORLDS {
        violations.push(ModelViolation::TooManyWorlds {
            count: worlds.len(),
        });
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let num_a = desc.worlds_a.len();
    let total = worlds.len();
    let is_a = |idx: usize| idx < num_a;

    let mut slices = Vec::with_capacity(desc.slices.len());
    for (time, raw) in desc.slices.iter().enumerate() {
        let mut succ = vec![0u64; total];
        let rels = [
            (RelKind::Ab, &raw.rel_ab, true),
            (RelKind::Ba, &raw.rel_ba, false),
        ];
        for (rel, pairs, from_a) in rels {
            for (from, to) in pairs {
                let (fi, ti) = match (index.get(from.as_str()), index.get(to.as_str())) {
                    (Some(&fi), Some(&ti)) => (fi, ti),
                    (missing_from, _) => {
                        let world = if missing_from.is_none() { from } else { to };
                        violations.push(ModelViolation::UnknownWorldInRelation {
                            time,
                            rel,
                            world: world.clone(),
                        });
                        continue;
                    }
                };
                if is_a(fi) != from_a || is_a(ti) == from_a {
                    violations.push(ModelViolation::WrongSortInRelation {
                        time,
                        rel,
                        from: from.clone(),
                        to: to.clone(),
                    });
                    continue;
                }
                succ[fi] |= 1 << ti;
            }
        }
        for (idx, world) in worlds.iter().enumerate() {
            if succ[idx] == 0 {
                violations.push(ModelViolation::NonSerial {
                    time,
                    world: world.clone(),
                });
            }
        }
        if desc.strict_proper {
            let full_b: u64 = (num_a..total).map(|j| 1u64 << j).sum();
            let full_a: u64 = (0..num_a).map(|i| 1u64 << i).sum();
            if (0..num_a).all(|i| succ[i] == full_b) {
                violations.push(ModelViolation::NonProper {
                    time,
                    rel: RelKind::Ab,
                });
            }
            if (num_a..total).all(|j| succ[j] == full_a) {
                violations.push(ModelViolation::NonProper {
                    time,
                    rel: RelKind::Ba,
                });
            }
        }
        slices.push(Slice { succ });
    }

    let mut valuation = BTreeMap::new();
    for (prop, entries) in &desc.valuation {
        if RESERVED_ATOMS.contains(&prop.as_str()) {
            violations.push(ModelViolation::ReservedValuationAtom { name: prop.clone() });
            continue;
        }
        if !is_identifier(prop) {
            violations.push(ModelViolation::InvalidValuationProp { name: prop.clone() });
            continue;
        }
        let mut points = BTreeSet::new();
        for (time, world) in entries {
            if *time >= expected_slices as u64 {
                violations.push(ModelViolation::ValuationTimeOutOfRange {
                    prop: prop.clone(),
                    time: *time,
                });
                continue;
            }
            match index.get(world.as_str()) {
                Some(&w) => {
                    points.insert((*time as usize, w));
                }
                None => violations.push(ModelViolation::UnknownWorldInValuation {
                    prop: prop.clone(),
                    world: world.clone(),
                }),
            }
        }
        valuation.insert(prop.clone(), points);
    }

    if !violations.is_empty() {
        return Err(violations);
    }

    let mut search_order: Vec<usize> = (0..total).collect();
    search_order.sort_by(|&x, &y| worlds[x].cmp(&worlds[y]));

    Ok(TemporalModel {
        worlds,
        num_a,
        prefix_len: desc.prefix_len,
        loop_len: desc.loop_len,
        slices,
        valuation,
        strict_proper: desc.strict_proper,
        search_order,
    })
}

impl TemporalModel {
    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn world_name(&self, idx: usize) -> &str {
        &self.worlds[idx]
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn sort_of(&self, idx: usize) -> Agent {
        if idx < self.num_a {
            Agent::A
        } else {
            Agent::B
        }
    }

    /// World indices of one sort.
    pub fn sort_range(&self, sort: Agent) -> std::ops::Range<usize> {
        match sort {
            Agent::A => 0..self.num_a,
            Agent::B => self.num_a..self.worlds.len(),
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn loop_len(&self) -> usize {
        self.loop_len
    }

    /// Number of stored slices, `prefix_len + loop_len`.
    pub fn num_times(&self) -> usize {
        self.slices.len()
    }

    pub fn strict_proper(&self) -> bool {
        self.strict_proper
    }

    /// Maps an arbitrary instant onto its stored slice index.
    pub fn canon_time(&self, n: u64) -> usize {
        let total = self.slices.len() as u64;
        if n < total {
            n as usize
        } else {
            let p = self.prefix_len as u64;
            (p + (n - p) % self.loop_len as u64) as usize
        }
    }

    /// Canonical index of the instant after `t`; wraps to the loop start.
    pub fn succ_time(&self, t: usize) -> usize {
        if t + 1 < self.slices.len() {
            t + 1
        } else {
            self.prefix_len
        }
    }

    /// Canonical indices reachable at or after `t`: the rest of the prefix
    /// (when `t` is in it) plus the whole loop.
    pub fn future_closure(&self, t: usize) -> std::ops::Range<usize> {
        let start = t.min(self.prefix_len);
        start..self.slices.len()
    }

    pub(crate) fn edge(&self, t: usize, from: usize, to: usize) -> bool {
        self.slices[t].succ[from] >> to & 1 == 1
    }

    pub(crate) fn succ_mask(&self, t: usize, from: usize) -> u64 {
        self.slices[t].succ[from]
    }

    pub(crate) fn has_prop(&self, prop: &str, t: usize, w: usize) -> bool {
        self.valuation
            .get(prop)
            .is_some_and(|points| points.contains(&(t, w)))
    }

    /// World indices in name order; all searches and witnesses use it.
    pub(crate) fn search_order(&self) -> &[usize] {
        &self.search_order
    }

    /// The belief model at instant `n`, with world names.
    pub fn belief_slice(&self, n: u64) -> BeliefSlice {
        let t = self.canon_time(n);
        let mut rel_ab = BTreeSet::new();
        let mut rel_ba = BTreeSet::new();
        for from in 0..self.worlds.len() {
            for to in 0..self.worlds.len() {
                if self.edge(t, from, to) {
                    let pair = (self.worlds[from].clone(), self.worlds[to].clone());
                    if from < self.num_a {
                        rel_ab.insert(pair);
                    } else {
                        rel_ba.insert(pair);
                    }
                }
            }
        }
        BeliefSlice {
            worlds_a: self.worlds[..self.num_a].to_vec(),
            worlds_b: self.worlds[self.num_a..].to_vec(),
            rel_ab,
            rel_ba,
        }
    }

    /// Round-trips back to the file format.
    pub fn to_description(&self) -> ModelDescription {
        let slices = (0..self.slices.len())
            .map(|t| {
                let slice = self.belief_slice(t as u64);
                SliceDescription {
                    rel_ab: slice.rel_ab.into_iter().collect(),
                    rel_ba: slice.rel_ba.into_iter().collect(),
                }
            })
            .collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(prop, points)| {
                let entries = points
                    .iter()
                    .map(|&(t, w)| (t as u64, self.worlds[w].clone()))
                    .collect();
                (prop.clone(), entries)
            })
            .collect();
        ModelDescription {
            worlds_a: self.worlds[..self.num_a].to_vec(),
            worlds_b: self.worlds[self.num_a..].to_vec(),
            prefix_len: self.prefix_len,
            loop_len: self.loop_len,
            slices,
            valuation,
            strict_proper: self.strict_proper,
        }
    }
}

impl fmt::Display for TemporalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |names: &[String]| names.join(",");
        write!(
            f,
            "a={{{}}} b={{{}}} prefix={} loop={}",
            join(&self.worlds[..self.num_a]),
            join(&self.worlds[self.num_a..]),
            self.prefix_len,
            self.loop_len
        )?;
        for t in 0..self.slices.len() {
            let slice = self.belief_slice(t as u64);
            let fmt_rel = |rel: &BTreeSet<(String, String)>| {
                rel.iter()
                    .map(|(x, y)| format!("({x},{y})"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            write!(
                f,
                " t{t}[ab={{{}}} ba={{{}}}]",
                fmt_rel(&slice.rel_ab),
                fmt_rel(&slice.rel_ba)
            )?;
        }
        if !self.valuation.is_empty() {
            let parts: Vec<String> = self
                .valuation
                .iter()
                .map(|(prop, points)| {
                    let entries = points
                        .iter()
                        .map(|&(t, w)| format!("({t},{})", self.worlds[w]))
                        .collect::<Vec<_>>()
                        .join(",");
                    format!("{prop}:{{{entries}}}")
                })
                .collect();
            write!(f, " val[{}]", parts.join(" "))?;
        }
        if !self.strict_proper {
            write!(f, " nonstrict")?;
        }
        Ok(())
    }
}

/// Shape of a model family to enumerate exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumSpec {
    pub size_a: usize,
    pub size_b: usize,
    pub prefix_len: usize,
    pub loop_len: usize,
    pub strict_proper: bool,
    /// When false every slice carries the same relations.
    pub time_varying: bool,
}

impl EnumSpec {
    /// Constant strict models, one slice.
    pub fn constant(size_a: usize, size_b: usize) -> EnumSpec {
        EnumSpec {
            size_a,
            size_b,
            prefix_len: 0,
            loop_len: 1,
            strict_proper: true,
            time_varying: false,
        }
    }
}

impl fmt::Display for EnumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={},b={},prefix={},loop={},{},{}",
            self.size_a,
            self.size_b,
            self.prefix_len,
            self.loop_len,
            if self.strict_proper {
                "strict"
            } else {
                "nonstrict"
            },
            if self.time_varying {
                "varying"
            } else {
                "constant"
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumSpecError {
    #[error("size_a and size_b must be at least 1")]
    EmptySort,
    #[error("loop_len must be at least 1")]
    ZeroLoop,
    #[error(
        "strict properness is infeasible for {size_a}x{size_b} worlds: \
         seriality forces the full product"
    )]
    InfeasibleStrict { size_a: usize, size_b: usize },
    #[error("shape too large to enumerate: {pairs} relation pairs per side (max {max})")]
    ShapeTooLarge { pairs: usize, max: usize },
}

/// Largest per-side pair count the mask enumeration will sweep.
const MAX_ENUM_PAIRS: usize = 20;

fn serial_masks(rows: usize, cols: usize, strict: bool) -> Vec<u64> {
    let full: u64 = (1u64 << (rows * cols)) - 1;
    let row_mask: u64 = (1u64 << cols) - 1;
    (0..=full)
        .filter(|&m| {
            let serial = (0..rows).all(|r| m >> (r * cols) & row_mask != 0);
            serial && !(strict && m == full)
        })
        .collect()
}

/// Streams every model of the given shape exactly once, in lexicographic
/// order over relation bitmasks with earlier slices most significant.
pub fn enumerate_models(spec: &EnumSpec) -> Result<ModelEnumerator, EnumSpecError> {
    if spec.size_a == 0 || spec.size_b == 0 {
        return Err(EnumSpecError::EmptySort);
    }
    if spec.loop_len == 0 {
        return Err(EnumSpecError::ZeroLoop);
    }
    let pairs = spec.size_a * spec.size_b;
    if pairs > MAX_ENUM_PAIRS {
        return Err(EnumSpecError::ShapeTooLarge {
            pairs,
            max: MAX_ENUM_PAIRS,
        });
    }
    if spec.strict_proper && (spec.size_a == 1 || spec.size_b == 1) {
        return Err(EnumSpecError::InfeasibleStrict {
            size_a: spec.size_a,
            size_b: spec.size_b,
        });
    }

    let cand_ab = serial_masks(spec.size_a, spec.size_b, spec.strict_proper);
    let cand_ba = serial_masks(spec.size_b, spec.size_a, spec.strict_proper);
    let positions = if spec.time_varying {
        spec.prefix_len + spec.loop_len
    } else {
        1
    };
    let worlds: Vec<String> = (1..=spec.size_a)
        .map(|i| format!("x{i}"))
        .chain((1..=spec.size_b).map(|j| format!("y{j}")))
        .collect();
    let mut search_order: Vec<usize> = (0..worlds.len()).collect();
    search_order.sort_by(|&x, &y| worlds[x].cmp(&worlds[y]));

    Ok(ModelEnumerator {
        spec: *spec,
        cand_ab,
        cand_ba,
        odometer: vec![0; 2 * positions],
        worlds,
        search_order,
        done: false,
    })
}

/// Iterator over all models of one [`EnumSpec`] shape.
#[derive(Debug)]
pub struct ModelEnumerator {
    spec: EnumSpec,
    cand_ab: Vec<u64>,
    cand_ba: Vec<u64>,
    odometer: Vec<usize>,
    worlds: Vec<String>,
    search_order: Vec<usize>,
    done: bool,
}

impl ModelEnumerator {
    /// Total number of models the stream will yield.
    pub fn count_hint(&self) -> u128 {
        let per_slice = self.cand_ab.len() as u128 * self.cand_ba.len() as u128;
        let positions = (self.odometer.len() / 2) as u32;
        per_slice.pow(positions)
    }

    fn build(&self) -> TemporalModel {
        let total_slices = self.spec.prefix_len + self.spec.loop_len;
        let slices = (0..total_slices)
            .map(|t| {
                let pos = if self.spec.time_varying { t } else { 0 };
                let ab = self.cand_ab[self.odometer[2 * pos]];
                let ba = self.cand_ba[self.odometer[2 * pos + 1]];
                Slice::from_masks(self.spec.size_a, self.spec.size_b, ab, ba)
            })
            .collect();
        TemporalModel {
            worlds: self.worlds.clone(),
            num_a: self.spec.size_a,
            prefix_len: self.spec.prefix_len,
            loop_len: self.spec.loop_len,
            slices,
            valuation: BTreeMap::new(),
            strict_proper: self.spec.strict_proper,
            search_order: self.search_order.clone(),
        }
    }

    fn advance(&mut self) {
        for pos in (0..self.odometer.len()).rev() {
            let limit = if pos % 2 == 0 {
                self.cand_ab.len()
            } else {
                self.cand_ba.len()
            };
            self.odometer[pos] += 1;
            if self.odometer[pos] < limit {
                return;
            }
            self.odometer[pos] = 0;
        }
        self.done = true;
    }
}

impl Iterator for ModelEnumerator {
    type Item = TemporalModel;

    fn next(&mut self) -> Option<TemporalModel> {
        if self.done {
            return None;
        }
        let model = self.build();
        self.advance();
        Some(model)
    }
}
