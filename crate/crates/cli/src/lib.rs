//! Batch runner for problem files: parse, resolve every named definition,
//! run the tasks and produce a report.

pub mod problem;
pub mod run;
pub mod scalar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use gdiff_core::{Complex64, HomogeneousSpace, Rational, Tolerance};
use thiserror::Error;

use problem::{BackendKind, ProblemFile, Table};
pub use run::{DefinitionStatus, Report, Status, TaskReport};
use run::Context;
use scalar::CliScalar;

/// Problems with the file itself, as opposed to task failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: u64,
    pub backend: Option<BackendKind>,
    pub epsilon: Option<f64>,
    pub parallel: bool,
}

pub fn read(path: &str) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    load(&text)
}

/// Parse and check that every referenced name exists and definitions are
/// acyclic.
pub fn load(text: &str) -> Result<ProblemFile, CliError> {
    let file: ProblemFile = serde_json::from_str(text)?;
    check_refs(&file)?;
    Ok(file)
}

fn defined(file: &ProblemFile, table: Table, name: &str) -> bool {
    match table {
        Table::Module => file.hmodules.contains_key(name),
        Table::Equation => file.equations.contains_key(name),
        Table::System => file.systems.contains_key(name),
        Table::Operator => file.operators.contains_key(name),
    }
}

fn check_refs(file: &ProblemFile) -> Result<(), CliError> {
    let mut graph: BTreeMap<(Table, &str), Vec<(Table, &str)>> = BTreeMap::new();
    for (n, s) in &file.hmodules {
        graph.insert((Table::Module, n), s.refs());
    }
    for (n, s) in &file.equations {
        graph.insert((Table::Equation, n), s.refs());
    }
    for n in file.systems.keys() {
        graph.insert((Table::System, n), Vec::new());
    }
    for (n, s) in &file.operators {
        graph.insert((Table::Operator, n), s.refs());
    }
    let missing = |(t, n): (Table, &str), from: &str| -> Result<(), CliError> {
        if defined(file, t, n) {
            Ok(())
        } else {
            Err(CliError::Config(format!("{from} refers to undefined {} {n:?}", t.name())))
        }
    };
    for ((t, n), refs) in &graph {
        for r in refs {
            missing(*r, &format!("{} {n:?}", t.name()))?;
        }
    }
    for (i, task) in file.tasks.iter().enumerate() {
        for r in task.refs() {
            missing(r, &format!("task {i} ({})", task.name()))?;
        }
    }

    // Depth-first search for a definition that reaches itself.
    fn visit<'a>(
        node: (Table, &'a str),
        graph: &BTreeMap<(Table, &'a str), Vec<(Table, &'a str)>>,
        done: &mut BTreeSet<(Table, &'a str)>,
        path: &mut Vec<(Table, &'a str)>,
    ) -> Result<(), CliError> {
        if done.contains(&node) {
            return Ok(());
        }
        if let Some(start) = path.iter().position(|&p| p == node) {
            let cycle: Vec<String> = path[start..].iter().map(|(t, n)| format!("{} {n:?}", t.name())).collect();
            return Err(CliError::Config(format!("definitions form a cycle: {}", cycle.join(" -> "))));
        }
        path.push(node);
        for &next in &graph[&node] {
            visit(next, graph, done, path)?;
        }
        path.pop();
        done.insert(node);
        Ok(())
    }
    let mut done = BTreeSet::new();
    for &node in graph.keys() {
        visit(node, &graph, &mut done, &mut Vec::new())?;
    }
    Ok(())
}

fn backend(file: &ProblemFile, opts: &Options) -> BackendKind {
    opts.backend.unwrap_or(file.backend.kind)
}

fn epsilon(file: &ProblemFile, opts: &Options) -> Result<f64, CliError> {
    let eps = opts.epsilon.or(file.backend.epsilon).unwrap_or(Tolerance::default().eps);
    if eps.is_finite() && eps > 0.0 {
        Ok(eps)
    } else {
        Err(CliError::Config(format!("epsilon must be positive, got {eps}")))
    }
}

pub fn build_space(file: &ProblemFile, eps: f64) -> Result<Arc<HomogeneousSpace>, CliError> {
    let gens: Vec<(String, String)> = file.group.iter().map(|g| (g.name.clone(), g.cycles.clone())).collect();
    let space = HomogeneousSpace::from_cycle_notation(file.space.clone(), &gens)
        .map_err(|e| CliError::Config(format!("{}: {e}", e.kind())))?;
    Ok(Arc::new(space.with_tolerance(Tolerance { eps, rank: 10.0 * eps })))
}

fn context<S: CliScalar>(file: &ProblemFile, opts: &Options) -> Result<Context<S>, CliError> {
    let space = build_space(file, epsilon(file, opts)?)?;
    Ok(Context::build(file, space, opts.seed))
}

pub fn run(file: &ProblemFile, opts: &Options) -> Result<Report, CliError> {
    let kind = backend(file, opts);
    let tasks = match kind {
        BackendKind::Rational => context::<Rational>(file, opts)?.run_tasks(&file.tasks, opts.parallel),
        BackendKind::Complex => context::<Complex64>(file, opts)?.run_tasks(&file.tasks, opts.parallel),
    };
    Ok(Report {
        backend: kind.name(),
        seed: opts.seed,
        epsilon: epsilon(file, opts)?,
        passed: tasks.iter().all(|t| t.status == Status::Pass),
        tasks,
    })
}

/// Resolve every definition without running tasks.
pub fn validate(file: &ProblemFile, opts: &Options) -> Result<Vec<DefinitionStatus>, CliError> {
    Ok(match backend(file, opts) {
        BackendKind::Rational => context::<Rational>(file, opts)?.definitions(),
        BackendKind::Complex => context::<Complex64>(file, opts)?.definitions(),
    })
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for t in &report.tasks {
        let status = match t.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = writeln!(out, "[{status}] {} {}: {}", t.index, t.label, t.summary);
    }
    let passed = report.tasks.iter().filter(|t| t.status == Status::Pass).count();
    let _ = writeln!(out, "{passed}/{} tasks passed ({} backend, seed {})", report.tasks.len(), report.backend, report.seed);
    out
}

pub fn render_structured(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
