//! Shared test infrastructure: an independent bottom-up evaluator used as an
//! oracle against the recursive one, plus seeded model and formula
//! generators.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::Rng;

use ital::{
    assumed_set, validate, Agent, Formula, ModelDescription, SliceDescription, TemporalModel,
};

/// Bottom-up labeling evaluator: computes, per subformula, its full truth
/// table over all canonical (time, world) points. Everything it needs comes
/// from the public query API, and temporal closure is derived by following
/// successor instants until they repeat rather than from index ranges.
pub struct Labeler<'m> {
    m: &'m TemporalModel,
    worlds: Vec<String>,
    is_a: Vec<bool>,
    /// successors[t][w] as world indices
    successors: Vec<Vec<BTreeSet<usize>>>,
    props: BTreeMap<String, TruthTable>,
}

pub type TruthTable = Vec<Vec<bool>>;

impl<'m> Labeler<'m> {
    pub fn new(m: &'m TemporalModel) -> Self {
        let worlds: Vec<String> = m.worlds().to_vec();
        let sorts = m.belief_slice(0);
        let is_a: Vec<bool> = worlds.iter().map(|w| sorts.worlds_a.contains(w)).collect();
        let index = |name: &str| worlds.iter().position(|w| w == name).unwrap();
        let successors: Vec<Vec<BTreeSet<usize>>> = (0..m.num_times())
            .map(|t| {
                worlds
                    .iter()
                    .map(|w| {
                        assumed_set(m, t as u64, w)
                            .unwrap()
                            .iter()
                            .map(|z| index(z))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut props: BTreeMap<String, TruthTable> = BTreeMap::new();
        for (prop, entries) in &m.to_description().valuation {
            let table = props
                .entry(prop.clone())
                .or_insert_with(|| vec![vec![false; worlds.len()]; m.num_times()]);
            for (t, world) in entries {
                table[*t as usize][index(world)] = true;
            }
        }
        Labeler {
            m,
            worlds,
            is_a,
            successors,
            props,
        }
    }

    fn num_times(&self) -> usize {
        self.m.num_times()
    }

    fn next_of(&self, t: usize) -> usize {
        self.m.canon_time(t as u64 + 1)
    }

    /// Instants reachable from `t` by iterating the successor map.
    fn orbit(&self, t: usize) -> Vec<usize> {
        let mut seen = Vec::new();
        let mut u = t;
        while !seen.contains(&u) {
            seen.push(u);
            u = self.next_of(u);
        }
        seen
    }

    fn has_sort(&self, w: usize, sort: Agent) -> bool {
        self.is_a[w] == (sort == Agent::A)
    }

    fn blank(&self) -> TruthTable {
        vec![vec![false; self.worlds.len()]; self.num_times()]
    }

    pub fn truth_table(&self, f: &Formula) -> TruthTable {
        let mut table = self.blank();
        match f {
            Formula::Prop(p) => {
                if let Some(known) = self.props.get(p) {
                    table = known.clone();
                }
            }
            Formula::SortAtom(sort) => {
                for row in &mut table {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = self.has_sort(w, *sort);
                    }
                }
            }
            Formula::DiagAtom => {
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = self.successors[t][w]
                            .iter()
                            .all(|&z| !self.successors[t][z].contains(&w));
                    }
                }
            }
            Formula::Truth => {
                for row in &mut table {
                    row.fill(true);
                }
            }
            Formula::Falsity => {}
            Formula::Not(x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = !child[t][w];
                    }
                }
            }
            Formula::And(l, r) => {
                let (lt, rt) = (self.truth_table(l), self.truth_table(r));
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = lt[t][w] && rt[t][w];
                    }
                }
            }
            Formula::Or(l, r) => {
                let (lt, rt) = (self.truth_table(l), self.truth_table(r));
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = lt[t][w] || rt[t][w];
                    }
                }
            }
            Formula::Implies(l, r) => {
                let (lt, rt) = (self.truth_table(l), self.truth_table(r));
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = !lt[t][w] || rt[t][w];
                    }
                }
            }
            Formula::Iff(l, r) => {
                let (lt, rt) = (self.truth_table(l), self.truth_table(r));
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = lt[t][w] == rt[t][w];
                    }
                }
            }
            Formula::Next(x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    let u = self.next_of(t);
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = child[u][w];
                    }
                }
            }
            Formula::Always(x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    let orbit = self.orbit(t);
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = orbit.iter().all(|&u| child[u][w]);
                    }
                }
            }
            Formula::Sometime(x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    let orbit = self.orbit(t);
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = orbit.iter().any(|&u| child[u][w]);
                    }
                }
            }
            Formula::Believe(i, j, x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = self.has_sort(w, *i)
                            && self.successors[t][w]
                                .iter()
                                .filter(|&&z| self.has_sort(z, *j))
                                .all(|&z| child[t][z]);
                    }
                }
            }
            Formula::Assume(i, j, x) => {
                let child = self.truth_table(x);
                for (t, row) in table.iter_mut().enumerate() {
                    for (w, cell) in row.iter_mut().enumerate() {
                        *cell = self.has_sort(w, *i)
                            && (0..self.worlds.len()).all(|z| {
                                let related =
                                    self.successors[t][w].contains(&z) && self.has_sort(z, *j);
                                related == child[t][z]
                            });
                    }
                }
            }
        }
        table
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }
}

/// Random serial relation as explicit pairs; in strict mode the full product
/// is re-rolled away by dropping one pair from a row that can spare it.
fn random_relation(
    rng: &mut StdRng,
    from: &[String],
    to: &[String],
    strict: bool,
) -> Vec<(String, String)> {
    let mut rows: Vec<Vec<bool>> = from
        .iter()
        .map(|_| loop {
            let row: Vec<bool> = to.iter().map(|_| rng.gen_bool(0.5)).collect();
            if row.iter().any(|&b| b) {
                break row;
            }
        })
        .collect();
    if strict && rows.iter().all(|r| r.iter().all(|&b| b)) {
        let r = rng.gen_range(0..rows.len());
        let c = rng.gen_range(0..to.len());
        rows[r][c] = false;
    }
    let mut pairs = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, &on) in row.iter().enumerate() {
            if on {
                pairs.push((from[r].clone(), to[c].clone()));
            }
        }
    }
    pairs
}

/// A random strict 2x2 model with prefix up to 2 and loop up to 2, with an
/// optional random valuation over `p` and `q`.
pub fn random_model(rng: &mut StdRng, with_props: bool) -> TemporalModel {
    let worlds_a = vec!["x1".to_string(), "x2".to_string()];
    let worlds_b = vec!["y1".to_string(), "y2".to_string()];
    let prefix_len = rng.gen_range(0..=2);
    let loop_len = rng.gen_range(1..=2);
    let slices = (0..prefix_len + loop_len)
        .map(|_| SliceDescription {
            rel_ab: random_relation(rng, &worlds_a, &worlds_b, true),
            rel_ba: random_relation(rng, &worlds_b, &worlds_a, true),
        })
        .collect();
    let mut valuation = BTreeMap::new();
    if with_props {
        let all_worlds: Vec<&String> = worlds_a.iter().chain(&worlds_b).collect();
        for prop in ["p", "q"] {
            let mut entries = BTreeSet::new();
            for t in 0..(prefix_len + loop_len) as u64 {
                for w in &all_worlds {
                    if rng.gen_bool(0.3) {
                        entries.insert((t, (*w).clone()));
                    }
                }
            }
            valuation.insert(prop.to_string(), entries.into_iter().collect());
        }
    }
    let desc = ModelDescription {
        worlds_a,
        worlds_b,
        prefix_len,
        loop_len,
        slices,
        valuation,
        strict_proper: true,
    };
    validate(&desc).expect("generated model is valid")
}

pub fn core_atoms(with_props: bool) -> Vec<Formula> {
    let mut atoms = vec![
        Formula::SortAtom(Agent::A),
        Formula::SortAtom(Agent::B),
        Formula::DiagAtom,
    ];
    if with_props {
        atoms.push(Formula::prop("p").unwrap());
        atoms.push(Formula::prop("q").unwrap());
    }
    atoms
}

const AGENT_PAIRS: [(Agent, Agent); 4] = [
    (Agent::A, Agent::A),
    (Agent::A, Agent::B),
    (Agent::B, Agent::A),
    (Agent::B, Agent::B),
];

fn apply_unary(op: usize, child: Formula) -> Formula {
    match op {
        0 => Formula::not(child),
        1 => Formula::next(child),
        2 => Formula::always(child),
        n if n < 7 => {
            let (i, j) = AGENT_PAIRS[n - 3];
            Formula::believe(i, j, child)
        }
        n => {
            let (i, j) = AGENT_PAIRS[n - 7];
            Formula::assume(i, j, child)
        }
    }
}

const NUM_UNARY: usize = 11;

/// Every core formula with at most `max_size` AST nodes over the atoms.
pub fn all_core_formulas(max_size: usize, atoms: &[Formula]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = atoms.to_vec();
    }
    for size in 2..=max_size {
        let mut level = Vec::new();
        for op in 0..NUM_UNARY {
            for child in &by_size[size - 1] {
                level.push(apply_unary(op, child.clone()));
            }
        }
        for left in 1..size.saturating_sub(1) {
            let right = size - 1 - left;
            for l in &by_size[left] {
                for r in &by_size[right] {
                    level.push(Formula::and(l.clone(), r.clone()));
                }
            }
        }
        by_size[size] = level;
    }
    by_size.into_iter().flatten().collect()
}

/// A uniformly shaped random core formula with exactly `size` AST nodes.
pub fn random_core_formula(rng: &mut StdRng, size: usize, atoms: &[Formula]) -> Formula {
    if size <= 1 {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let can_split = size >= 3;
    if !can_split || rng.gen_bool(0.65) {
        let op = rng.gen_range(0..NUM_UNARY);
        apply_unary(op, random_core_formula(rng, size - 1, atoms))
    } else {
        let left = rng.gen_range(1..=size - 2);
        let right = size - 1 - left;
        Formula::and(
            random_core_formula(rng, left, atoms),
            random_core_formula(rng, right, atoms),
        )
    }
}

/// A random formula over the full language, depth-bounded, with proposition
/// names drawn from a pool the concrete syntax can express.
pub fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    const PROPS: [&str; 5] = ["p", "q", "r", "s1", "zb_2"];
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Formula::prop(PROPS[rng.gen_range(0..PROPS.len())]).unwrap(),
            1 => Formula::SortAtom(Agent::A),
            2 => Formula::SortAtom(Agent::B),
            3 => Formula::DiagAtom,
            4 => Formula::Truth,
            _ => Formula::Falsity,
        };
    }
    match rng.gen_range(0..10) {
        0 => Formula::not(random_formula(rng, depth - 1)),
        1 => Formula::and(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        2 => Formula::or(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        3 => Formula::implies(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        4 => Formula::iff(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        5 => Formula::next(random_formula(rng, depth - 1)),
        6 => Formula::always(random_formula(rng, depth - 1)),
        7 => Formula::sometime(random_formula(rng, depth - 1)),
        8 => {
            let (i, j) = AGENT_PAIRS[rng.gen_range(0..4)];
            Formula::believe(i, j, random_formula(rng, depth - 1))
        }
        _ => {
            let (i, j) = AGENT_PAIRS[rng.gen_range(0..4)];
            Formula::assume(i, j, random_formula(rng, depth - 1))
        }
    }
}
