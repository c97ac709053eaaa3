//! Command-line surface: parse and evaluate formulas, check models, sweep
//! enumerated families, and walk the belief paradoxes on small examples.
//!
//! Exit codes: 0 when every check passed or the query was answered, 1 when a
//! property was violated or a formula refuted, 2 on usage or input errors.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

use ital::{
    assumed_set, bk_sweep, diag_slice, enumerate_models, eval, finite_yablo, is_complete, parse,
    periodic_yablo, satisfiable, sweep_theorems, valid, validate, Agent, Assignment, EnumSpec,
    Formula, ModelDescription, SliceDescription, TemporalModel, Witness,
};

const EXIT_OK: i32 = 0;
const EXIT_VIOLATION: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "ital",
    version,
    about = "Model checker for an interactive temporal assumption logic over lasso belief models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula; echo its AST and the rendered round trip
    Parse {
        formula: String,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula at a (time, world) point of a model
    Eval {
        /// Model file (JSON)
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Instant; large values fold onto the loop
        #[arg(long)]
        time: u64,
        /// World name
        #[arg(long)]
        world: String,
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Check a formula on a model, for validity or satisfiability
    #[command(group(ArgGroup::new("mode").required(true).args(["valid", "sat"])))]
    Check {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Require truth at every (time, world) point
        #[arg(long)]
        valid: bool,
        /// Search for some satisfying point
        #[arg(long)]
        sat: bool,
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Sweep both theorem checks over an enumerated model family
    Theorems {
        /// Family shape, e.g. "a=2,b=2,prefix=0,loop=2,strict"
        #[arg(long = "enum", value_name = "SPEC")]
        spec: String,
        /// Check the theorem-2 variant without the sort conjunct
        #[arg(long)]
        variant: bool,
        /// Worker threads for the sweep (0 = all cores)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Completeness report for one model, or a sweep over a family
    #[command(group(ArgGroup::new("target").required(true).args(["model", "enum_spec"])))]
    Complete {
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        #[arg(long = "enum", value_name = "SPEC")]
        enum_spec: Option<String>,
        /// Operator depth of the definable-set enumeration
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Walk the two-branch belief paradox on a bundled example model
    BkDemo {
        #[arg(long)]
        json: bool,
    },
    /// Solve the sentence scheme: finite truncation or periodic shape
    #[command(group(ArgGroup::new("shape").required(true).args(["finite", "periodic"])))]
    Yablo {
        /// Number of sentences in the finite truncation
        #[arg(long, value_name = "N")]
        finite: Option<usize>,
        /// Prefix and loop lengths, comma separated
        #[arg(long, value_name = "P,L")]
        periodic: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Parse { formula, json } => cmd_parse(&formula, json),
        Command::Eval {
            model,
            time,
            world,
            formula,
            json,
        } => cmd_eval(&model, time, &world, &formula, json),
        Command::Check {
            model,
            valid,
            sat: _,
            formula,
            json,
        } => cmd_check(&model, valid, &formula, json),
        Command::Theorems {
            spec,
            variant,
            jobs,
            json,
        } => cmd_theorems(&spec, variant, jobs, json),
        Command::Complete {
            model,
            enum_spec,
            depth,
            jobs,
            json,
        } => cmd_complete(model.as_deref(), enum_spec.as_deref(), depth, jobs, json),
        Command::BkDemo { json } => cmd_bk_demo(json),
        Command::Yablo {
            finite,
            periodic,
            json,
        } => cmd_yablo(finite, periodic.as_deref(), json),
    };
    std::process::exit(code);
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn load_model(path: &Path) -> Result<TemporalModel, i32> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(format_args!("cannot read {}: {e}", path.display())))?;
    let desc: serde_json::Result<ModelDescription> = serde_json::from_str(&text);
    let desc = desc.map_err(|e| fail(format_args!("{}: {e}", path.display())))?;
    validate(&desc).map_err(|violations| {
        eprintln!("error: {} is not a valid model:", path.display());
        for v in violations {
            eprintln!("  - {v}");
        }
        EXIT_USAGE
    })
}

fn parse_formula(text: &str) -> Result<Formula, i32> {
    parse(text).map_err(fail)
}

fn parse_spec(text: &str) -> Result<EnumSpec, String> {
    let mut spec = EnumSpec {
        size_a: 0,
        size_b: 0,
        prefix_len: 0,
        loop_len: 1,
        strict_proper: true,
        time_varying: true,
    };
    let (mut saw_a, mut saw_b) = (false, false);
    for part in text.split(',') {
        let part = part.trim();
        match part {
            "strict" => spec.strict_proper = true,
            "nonstrict" => spec.strict_proper = false,
            "varying" => spec.time_varying = true,
            "constant" => spec.time_varying = false,
            _ => {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| format!("bad spec item `{part}`"))?;
                let n: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad number in `{part}`"))?;
                match key.trim() {
                    "a" => {
                        spec.size_a = n;
                        saw_a = true;
                    }
                    "b" => {
                        spec.size_b = n;
                        saw_b = true;
                    }
                    "prefix" => spec.prefix_len = n,
                    "loop" => spec.loop_len = n,
                    other => return Err(format!("unknown spec key `{other}`")),
                }
            }
        }
    }
    if !(saw_a && saw_b) {
        return Err("spec must set a=<n> and b=<n>".into());
    }
    Ok(spec)
}

fn with_pool<T: Send>(jobs: usize, run: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool")
            .install(run)
    }
}

fn witness_json(w: &Option<Witness>) -> serde_json::Value {
    match w {
        None => serde_json::Value::Null,
        Some(w) => json!({ "time": w.time, "world": w.world }),
    }
}

fn cmd_parse(text: &str, as_json: bool) -> i32 {
    match parse(text) {
        Ok(f) => {
            if as_json {
                let out = json!({ "ast": format!("{f:?}"), "rendered": f.to_string() });
                println!("{out}");
            } else {
                println!("{f:#?}");
                println!("rendered: {f}");
            }
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn cmd_eval(model: &Path, time: u64, world: &str, formula: &str, as_json: bool) -> i32 {
    let m = match load_model(model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let f = match parse_formula(formula) {
        Ok(f) => f,
        Err(code) => return code,
    };
    match eval(&m, time, world, &f) {
        Ok(value) => {
            if as_json {
                let out = json!({
                    "model": m.to_string(),
                    "time": time,
                    "world": world,
                    "formula": f.to_string(),
                    "value": value,
                });
                println!("{out}");
            } else {
                println!("{value}");
            }
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn cmd_check(model: &Path, check_valid: bool, formula: &str, as_json: bool) -> i32 {
    let m = match load_model(model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let f = match parse_formula(formula) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let (verdict, witness, code) = if check_valid {
        match valid(&m, &f) {
            None => ("valid", None, EXIT_OK),
            Some(w) => ("refuted", Some(w), EXIT_VIOLATION),
        }
    } else {
        match satisfiable(&m, &f) {
            Some(w) => ("satisfiable", Some(w), EXIT_OK),
            None => ("unsatisfiable", None, EXIT_VIOLATION),
        }
    };
    if as_json {
        let out = json!({
            "model": m.to_string(),
            "formula": f.to_string(),
            "verdict": verdict,
            "witness": witness_json(&witness),
        });
        println!("{out}");
    } else {
        match &witness {
            Some(w) => println!("{verdict} at (time {}, world {})", w.time, w.world),
            None => println!("{verdict}"),
        }
    }
    code
}

fn cmd_theorems(spec_text: &str, variant: bool, jobs: usize, as_json: bool) -> i32 {
    let spec = match parse_spec(spec_text) {
        Ok(spec) => spec,
        Err(e) => return fail(e),
    };
    let sweep = match with_pool(jobs, || sweep_theorems(&spec, variant)) {
        Ok(sweep) => sweep,
        Err(e) => return fail(e),
    };
    if as_json {
        println!("{}", serde_json::to_string(&sweep).expect("serializable"));
    } else {
        println!("swept {} models ({spec})", sweep.models_total);
        println!(
            "theorem 1: {} holds, {} vacuous, {} violations",
            sweep.theorem1_holds, sweep.theorem1_vacuous, sweep.theorem1_violations
        );
        println!(
            "theorem 2{}: {} holds, {} violations",
            if variant { " (variant)" } else { "" },
            sweep.theorem2_holds,
            sweep.theorem2_violations
        );
        if let Some(first) = &sweep.first_violation {
            println!("first violation: {first}");
        }
    }
    if sweep.violation_free() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn cmd_complete(
    model: Option<&Path>,
    enum_spec: Option<&str>,
    depth: usize,
    jobs: usize,
    as_json: bool,
) -> i32 {
    if let Some(path) = model {
        let m = match load_model(path) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let report = match is_complete(&m, depth) {
            Ok(report) => report,
            Err(e) => return fail(e),
        };
        if as_json {
            println!("{}", report.to_json());
        } else {
            println!("model: {}", report.model);
            match &report.witness {
                None => println!("complete at depth {depth}"),
                Some(w) => {
                    println!("incomplete at depth {depth}");
                    println!(
                        "witness: sort {} set {{{}}} defined by `{}` is assumed by nobody",
                        w.sort,
                        w.set.iter().cloned().collect::<Vec<_>>().join(","),
                        w.formula
                    );
                }
            }
        }
        return EXIT_OK;
    }

    let spec = match parse_spec(enum_spec.expect("clap group guarantees one target")) {
        Ok(spec) => spec,
        Err(e) => return fail(e),
    };
    let report = match with_pool(jobs, || bk_sweep(&spec, depth)) {
        Ok(report) => report,
        Err(e) => return fail(e),
    };
    if as_json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else {
        println!(
            "swept {} models ({spec}) at depth {depth}",
            report.models_total
        );
        println!(
            "incomplete: {}/{}",
            report.models_incomplete, report.models_total
        );
        if !report.complete_models.is_empty() {
            println!(
                "COMPLETE MODELS FOUND ({}): inspect, the definable language may be too weak:",
                report.complete_models.len()
            );
            for m in &report.complete_models {
                println!("  {m}");
            }
        }
    }
    EXIT_OK
}

fn parse_periodic(text: &str) -> Result<(usize, usize), String> {
    let (p, l) = text
        .split_once(',')
        .ok_or_else(|| format!("expected P,L but got `{text}`"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad number `{}`", s.trim()))
    };
    Ok((parse(p)?, parse(l)?))
}

fn assignment_text(a: &Assignment) -> String {
    let fmt = |v: &[bool]| {
        v.iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    if a.cycle.is_empty() {
        format!("[{}]", fmt(&a.prefix))
    } else {
        format!("[{} | loop {}]", fmt(&a.prefix), fmt(&a.cycle))
    }
}

fn cmd_yablo(finite: Option<usize>, periodic: Option<&str>, as_json: bool) -> i32 {
    if let Some(n) = finite {
        let solutions = match finite_yablo(n) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        if as_json {
            let out = json!({
                "kind": "finite",
                "n": n,
                "assignments": solutions.iter().map(|a| a.prefix.clone()).collect::<Vec<_>>(),
            });
            println!("{out}");
        } else {
            println!(
                "{n} sentences: {} consistent assignment{}",
                solutions.len(),
                if solutions.len() == 1 { "" } else { "s" }
            );
            for a in &solutions {
                println!("  {}", assignment_text(a));
            }
        }
        return EXIT_OK;
    }

    let (prefix_len, loop_len) = match parse_periodic(periodic.expect("clap group")) {
        Ok(shape) => shape,
        Err(e) => return fail(e),
    };
    match periodic_yablo(prefix_len, loop_len) {
        Ok(found) => {
            if as_json {
                let out = json!({
                    "kind": "periodic",
                    "prefix_len": prefix_len,
                    "loop_len": loop_len,
                    "assignment": found,
                });
                println!("{out}");
            } else {
                match &found {
                    None => println!(
                        "prefix={prefix_len} loop={loop_len}: no consistent assignment exists"
                    ),
                    Some(a) => println!(
                        "prefix={prefix_len} loop={loop_len}: consistent assignment {}",
                        assignment_text(a)
                    ),
                }
            }
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

/// The bundled demo model: two states per player, everyone diagonal-safe.
fn demo_model() -> TemporalModel {
    let desc = ModelDescription {
        worlds_a: vec!["x1".into(), "x2".into()],
        worlds_b: vec!["y1".into(), "y2".into()],
        prefix_len: 0,
        loop_len: 1,
        slices: vec![SliceDescription {
            rel_ab: vec![("x1".into(), "y1".into()), ("x2".into(), "y2".into())],
            rel_ba: vec![("y1".into(), "x2".into()), ("y2".into(), "x1".into())],
        }],
        valuation: Default::default(),
        strict_proper: true,
    };
    validate(&desc).expect("bundled model is valid")
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(",")
}

struct BkDemo {
    model: TemporalModel,
    ann: String,
    d_everywhere: BTreeSet<String>,
    d_at_ann: bool,
    d_states_a: BTreeSet<String>,
    /// Bob-states Ann considers possible, with their assumed sets.
    bob_views: Vec<(String, BTreeSet<String>)>,
    config_witness: Option<Witness>,
    swept: usize,
    swept_satisfiable: usize,
}

fn bk_demo_data() -> BkDemo {
    let model = demo_model();
    let ann = "x1".to_string();
    let d_everywhere = diag_slice(&model, 0);
    let d_at_ann = eval(&model, 0, &ann, &Formula::DiagAtom).unwrap();
    let d_states_a: BTreeSet<String> = model
        .sort_range(Agent::A)
        .map(|w| model.world_name(w).to_string())
        .filter(|w| d_everywhere.contains(w))
        .collect();
    let bob_views: Vec<(String, BTreeSet<String>)> = assumed_set(&model, 0, &ann)
        .unwrap()
        .into_iter()
        .map(|y| {
            let assumed = assumed_set(&model, 0, &y).unwrap();
            (y, assumed)
        })
        .collect();

    let config = parse("B[a,b] A[b,a] D").unwrap();
    let config_witness = satisfiable(&model, &config);
    let spec = EnumSpec::constant(2, 2);
    let mut swept = 0usize;
    let mut swept_satisfiable = 0usize;
    for m in enumerate_models(&spec).unwrap() {
        if satisfiable(&m, &config).is_some() {
            swept_satisfiable += 1;
        }
        swept += 1;
    }
    BkDemo {
        model,
        ann,
        d_everywhere,
        d_at_ann,
        d_states_a,
        bob_views,
        config_witness,
        swept,
        swept_satisfiable,
    }
}

fn bk_demo_text() -> String {
    let d = bk_demo_data();
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "The belief configuration behind the paradox");
    let _ = writeln!(w, "===========================================");
    let _ = writeln!(w);
    let _ = writeln!(w, "model: {}", d.model);
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "D reads \"Ann believes that Bob's assumption is wrong\": it holds at"
    );
    let _ = writeln!(
        w,
        "a state when no state it considers possible points back at it."
    );
    let _ = writeln!(w, "Here D holds at: {{{}}}", join(&d.d_everywhere));
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "The configuration \"Ann believes that Bob assumes that Ann believes"
    );
    let _ = writeln!(
        w,
        "that Bob's assumption is wrong\" is the formula  B[a,b] A[b,a] D."
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "Question: does Ann (state {}) believe that Bob's assumption is",
        d.ann
    );
    let _ = writeln!(w, "wrong? That is: does D hold at (0,{})?", d.ann);
    let _ = writeln!(w);
    let _ = writeln!(w, "Answer \"yes\" inside the configuration:");
    let _ = writeln!(
        w,
        "  every Bob-state Ann considers possible must assume exactly the"
    );
    let _ = writeln!(w, "  D-states of Ann's sort, {{{}}}.", join(&d.d_states_a));
    for (y, assumed) in &d.bob_views {
        let verdict = if assumed == &d.d_states_a {
            "match"
        } else {
            "mismatch"
        };
        let _ = writeln!(w, "    {y} assumes {{{}}}: {verdict}", join(assumed));
    }
    let _ = writeln!(
        w,
        "  The assumption misses a D-state, so the configuration breaks."
    );
    let _ = writeln!(w);
    let _ = writeln!(w, "Answer \"no\" inside the configuration:");
    let _ = writeln!(
        w,
        "  D would have to fail at (0,{}), i.e. some state Ann considers",
        d.ann
    );
    let _ = writeln!(w, "  possible would have to point back at her.");
    for (y, assumed) in &d.bob_views {
        let back = if assumed.contains(&d.ann) {
            "points back"
        } else {
            "does not point back"
        };
        let _ = writeln!(w, "    {} considers {y} possible; {y} {back}.", d.ann);
    }
    let _ = writeln!(
        w,
        "  Evaluation gives D at (0,{}) = {}, so \"no\" contradicts the relations.",
        d.ann, d.d_at_ann
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "Neither answer survives inside the configuration. Mechanically the"
    );
    let _ = writeln!(w, "configuration point never exists:");
    let _ = writeln!(
        w,
        "  B[a,b] A[b,a] D satisfiable on this model: {}",
        match &d.config_witness {
            Some(wit) => format!("yes at (time {}, world {})", wit.time, wit.world),
            None => "no".to_string(),
        }
    );
    let _ = writeln!(
        w,
        "  B[a,b] A[b,a] D satisfiable across all strict 2x2 models: {} of {}",
        d.swept_satisfiable, d.swept
    );
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "Whoever assumes the D-states must be pointed back at by one of them,"
    );
    let _ = writeln!(
        w,
        "which throws that state out of D again: the question has no"
    );
    let _ = writeln!(w, "consistent answer.");
    out
}

fn cmd_bk_demo(as_json: bool) -> i32 {
    if as_json {
        let d = bk_demo_data();
        let out = json!({
            "model": d.model.to_string(),
            "configuration": "B[a,b] A[b,a] D",
            "question": format!("does D hold at (0,{})?", d.ann),
            "diag_states": d.d_everywhere,
            "diag_at_ann": d.d_at_ann,
            "yes_branch": {
                "required_assumption": d.d_states_a,
                "bob_assumptions": d.bob_views.iter()
                    .map(|(y, s)| json!({ "state": y, "assumes": s, "matches": s == &d.d_states_a }))
                    .collect::<Vec<_>>(),
            },
            "no_branch": {
                "needs_back_edge_to": d.ann,
                "back_edges": d.bob_views.iter()
                    .map(|(y, s)| json!({ "state": y, "points_back": s.contains(&d.ann) }))
                    .collect::<Vec<_>>(),
            },
            "config_witness": witness_json(&d.config_witness),
            "swept_models": d.swept,
            "swept_satisfiable": d.swept_satisfiable,
        });
        println!("{out}");
    } else {
        print!("{}", bk_demo_text());
    }
    EXIT_OK
}
