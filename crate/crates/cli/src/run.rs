use std::collections::BTreeMap;
use std::sync::Arc;

use gdiff_core::diffops::{self, ClassicalSystem, DiffOperator, RawOperator};
use gdiff_core::equivalence::{self, HModule};
use gdiff_core::invariants::{self, FormKind, InvariantStructure, PowerKind};
use gdiff_core::projection::{self, Character};
use gdiff_core::solver::{self, Morphism, SearchConfig, Simplicity};
use gdiff_core::{fixtures, ElementId, Equation, Function, HomogeneousSpace, ModuleElement, SkewOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::problem::*;
use crate::scalar::{matrices_json, matrix_json, parse_matrix, CliScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub task: &'static str,
    pub label: String,
    pub status: Status,
    pub summary: String,
    pub result: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub backend: &'static str,
    pub seed: u64,
    pub epsilon: f64,
    pub passed: bool,
    pub tasks: Vec<TaskReport>,
}

/// Outcome of resolving one named definition.
#[derive(Clone, Debug, Serialize)]
pub struct DefinitionStatus {
    pub table: &'static str,
    pub name: String,
    pub error: Option<String>,
}

type Res<T> = Result<T, String>;

fn core(e: gdiff_core::Error) -> String {
    format!("{}: {e}", e.kind())
}

fn parse_function<S: CliScalar>(coeff: &Option<Value>, values: &Option<Vec<Value>>, points: usize) -> Res<Function<S>> {
    match (coeff, values) {
        (Some(c), None) => Ok(Function::constant(points, S::parse(c)?)),
        (None, Some(v)) if v.len() == points => Ok(Function::new(v.iter().map(S::parse).collect::<Res<Vec<_>>>()?)),
        (None, Some(v)) => Err(format!("coefficient lists need {points} values, found {}", v.len())),
        _ => Err("give exactly one of \"coeff\" or \"values\"".into()),
    }
}

/// Every named object of a problem file, resolved once.
pub struct Context<S: CliScalar> {
    space: Arc<HomogeneousSpace>,
    seed: u64,
    modules: BTreeMap<String, Res<HModule<S>>>,
    equations: BTreeMap<String, Res<Equation<S>>>,
    systems: BTreeMap<String, Res<ClassicalSystem<S>>>,
    operators: BTreeMap<String, Res<DiffOperator<S>>>,
}

impl<S: CliScalar> Context<S> {
    pub fn build(file: &ProblemFile, space: Arc<HomogeneousSpace>, seed: u64) -> Self {
        let mut ctx = Self {
            space,
            seed,
            modules: BTreeMap::new(),
            equations: BTreeMap::new(),
            systems: BTreeMap::new(),
            operators: BTreeMap::new(),
        };
        for name in file.hmodules.keys() {
            let _ = ctx.module(file, name);
        }
        for name in file.equations.keys() {
            let _ = ctx.equation(file, name);
        }
        for name in file.systems.keys() {
            let _ = ctx.system(file, name);
        }
        for name in file.operators.keys() {
            let _ = ctx.operator(file, name);
        }
        ctx
    }

    pub fn definitions(&self) -> Vec<DefinitionStatus> {
        fn rows<T>(table: &'static str, map: &BTreeMap<String, Res<T>>) -> Vec<DefinitionStatus> {
            map.iter().map(move |(n, r)| DefinitionStatus { table, name: n.clone(), error: r.as_ref().err().cloned() }).collect()
        }
        let mut out = rows("hmodule", &self.modules);
        out.extend(rows("equation", &self.equations));
        out.extend(rows("system", &self.systems));
        out.extend(rows("operator", &self.operators));
        out
    }

    fn rng(&self, seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed ^ self.seed.rotate_left(32))
    }

    fn word(&self, w: &str) -> Res<ElementId> {
        self.space.group().eval_word(w).map_err(core)
    }

    fn skew(&self, terms: &[SkewTerm]) -> Res<SkewOp<S>> {
        let p = self.space.size();
        let parsed = terms
            .iter()
            .map(|t| Ok((self.word(&t.word)?, parse_function(&t.coeff, &t.values, p)?)))
            .collect::<Res<Vec<_>>>()?;
        Ok(SkewOp::from_terms(self.space.clone(), parsed))
    }

    fn module(&mut self, file: &ProblemFile, name: &str) -> Res<HModule<S>> {
        if let Some(r) = self.modules.get(name) {
            return r.clone();
        }
        let r = self.make_module(file, &file.hmodules[name]).map_err(|e| format!("hmodule {name:?}: {e}"));
        self.modules.insert(name.to_string(), r.clone());
        r
    }

    fn make_module(&mut self, file: &ProblemFile, spec: &HModuleSpec) -> Res<HModule<S>> {
        let space = self.space.clone();
        match spec {
            HModuleSpec::Trivial => Ok(HModule::trivial(space)),
            HModuleSpec::Regular => Ok(HModule::regular(space)),
            HModuleSpec::Builtin { name } => equivalence::builtin_irreps(&space)
                .map_err(core)?
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, m)| m)
                .ok_or_else(|| format!("no built-in irreducible named {name:?}")),
            HModuleSpec::Generators { dim, matrices } => {
                let gens = matrices
                    .iter()
                    .map(|(w, m)| Ok((self.word(w)?, parse_matrix(m, *dim, *dim)?)))
                    .collect::<Res<Vec<_>>>()?;
                HModule::from_generators(space, *dim, gens).map_err(core)
            }
            HModuleSpec::DirectSum { of } | HModuleSpec::Tensor { of } => {
                let parts = of.iter().map(|n| self.module(file, n)).collect::<Res<Vec<_>>>()?;
                let (first, rest) = parts.split_first().ok_or("need at least one module")?;
                let sum = matches!(spec, HModuleSpec::DirectSum { .. });
                Ok(rest.iter().fold(first.clone(), |acc, m| if sum { acc.direct_sum(m) } else { acc.tensor(m) }))
            }
            HModuleSpec::Dual { of } => Ok(self.module(file, of)?.dual()),
            HModuleSpec::Fiber { equation } => Ok(equivalence::fiber(&self.equation(file, equation)?)),
            HModuleSpec::Random { seed } => fixtures::random_module2(&space, &mut self.rng(*seed)).map_err(core),
        }
    }

    fn equation(&mut self, file: &ProblemFile, name: &str) -> Res<Equation<S>> {
        if let Some(r) = self.equations.get(name) {
            return r.clone();
        }
        let r = self.make_equation(file, &file.equations[name]).map_err(|e| format!("equation {name:?}: {e}"));
        self.equations.insert(name.to_string(), r.clone());
        r
    }

    fn make_equation(&mut self, file: &ProblemFile, spec: &EquationSpec) -> Res<Equation<S>> {
        let space = self.space.clone();
        let p = space.size();
        match spec {
            EquationSpec::Trivial { rank } => Ok(Equation::trivial_power(space, *rank)),
            EquationSpec::Sign => Equation::sign(space).map_err(core),
            EquationSpec::Generators { rank, constant, pointwise } => {
                let mut gens = Vec::new();
                for (w, m) in constant {
                    gens.push((self.word(w)?, vec![parse_matrix(m, *rank, *rank)?; p]));
                }
                for (w, ms) in pointwise {
                    if ms.len() != p {
                        return Err(format!("generator {w:?} needs {p} pointwise matrices"));
                    }
                    let parsed = ms.iter().map(|m| parse_matrix(m, *rank, *rank)).collect::<Res<Vec<_>>>()?;
                    gens.push((self.word(w)?, parsed));
                }
                Equation::complete_connection(space, *rank, gens).map_err(core)
            }
            EquationSpec::Induce { module, transversal } => {
                let v = self.module(file, module)?;
                let sigma = match transversal {
                    TransversalChoice::Default => space.transversal().clone(),
                    TransversalChoice::Alternate => space.alternate_transversal(),
                };
                equivalence::induce_with(&v, &sigma).map_err(core)
            }
            EquationSpec::DirectSum { of } | EquationSpec::Tensor { of } => {
                let parts = of.iter().map(|n| self.equation(file, n)).collect::<Res<Vec<_>>>()?;
                let (first, rest) = parts.split_first().ok_or("need at least one equation")?;
                let sum = matches!(spec, EquationSpec::DirectSum { .. });
                rest.iter()
                    .try_fold(first.clone(), |acc, e| if sum { acc.direct_sum(e) } else { acc.tensor(e) })
                    .map_err(core)
            }
            EquationSpec::Hom { source, target } => {
                let (e, f) = (self.equation(file, source)?, self.equation(file, target)?);
                e.hom(&f).map_err(core)
            }
            EquationSpec::Dual { of } => self.equation(file, of)?.dual().map_err(core),
            EquationSpec::Sym2 { of } => self.equation(file, of)?.sym2().map_err(core),
            EquationSpec::Wedge2 { of } => self.equation(file, of)?.wedge2().map_err(core),
            EquationSpec::WedgeTop { of } => self.equation(file, of)?.wedge_top().map_err(core),
            EquationSpec::RandomGauge { of, seed } => {
                let e = self.equation(file, of)?;
                fixtures::random_gauge(&e, &mut self.rng(*seed)).map_err(core)
            }
            EquationSpec::OperatorEquation { operator } => {
                let op = self.operator(file, operator)?;
                Ok(diffops::equation_of(&op).map_err(core)?.equation)
            }
        }
    }

    fn system(&mut self, file: &ProblemFile, name: &str) -> Res<ClassicalSystem<S>> {
        if let Some(r) = self.systems.get(name) {
            return r.clone();
        }
        let spec = &file.systems[name];
        let p = self.space.size();
        let r = spec
            .equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|t| Ok((t.unknown, self.word(&t.word)?, parse_function(&t.coeff, &t.values, p)?)))
                    .collect::<Res<Vec<_>>>()
            })
            .collect::<Res<Vec<_>>>()
            .and_then(|eqs| ClassicalSystem::new(self.space.clone(), spec.unknowns, eqs).map_err(core))
            .map_err(|e| format!("system {name:?}: {e}"));
        self.systems.insert(name.to_string(), r.clone());
        r
    }

    fn operator(&mut self, file: &ProblemFile, name: &str) -> Res<DiffOperator<S>> {
        if let Some(r) = self.operators.get(name) {
            return r.clone();
        }
        let r = self.make_operator(file, &file.operators[name]).map_err(|e| format!("operator {name:?}: {e}"));
        self.operators.insert(name.to_string(), r.clone());
        r
    }

    fn make_operator(&mut self, file: &ProblemFile, spec: &OperatorSpec) -> Res<DiffOperator<S>> {
        let p = self.space.size();
        match spec {
            OperatorSpec::Terms { source, target, terms } => {
                let (e, f) = (self.equation(file, source)?, self.equation(file, target)?);
                let parsed = terms
                    .iter()
                    .map(|t| Ok((t.i, t.j, self.word(&t.word)?, parse_function(&t.coeff, &t.values, p)?)))
                    .collect::<Res<Vec<_>>>()?;
                Ok(diffops::canonicalize(RawOperator::from_terms(&e, &f, parsed).map_err(core)?))
            }
            OperatorSpec::Skew { equation, terms } => {
                let e = self.equation(file, equation)?;
                diffops::delta_a(&e, &self.skew(terms)?).map_err(core)
            }
            OperatorSpec::Classical { system } => diffops::ingest_classical(&self.system(file, system)?).map_err(core),
            OperatorSpec::Identity { equation } => DiffOperator::identity(&self.equation(file, equation)?).map_err(core),
            OperatorSpec::Zero { source, target } => {
                DiffOperator::zero(&self.equation(file, source)?, &self.equation(file, target)?).map_err(core)
            }
            OperatorSpec::Compose { second, first } => {
                let (b, a) = (self.operator(file, second)?, self.operator(file, first)?);
                diffops::compose(&b, &a).map_err(core)
            }
            OperatorSpec::LeftMul { operator, terms } => {
                let op = self.operator(file, operator)?;
                op.left_mul(&self.skew(terms)?).map_err(core)
            }
        }
    }

    fn eq(&self, name: &str) -> Res<&Equation<S>> {
        self.equations[name].as_ref().map_err(Clone::clone)
    }

    fn hmodule(&self, name: &str) -> Res<&HModule<S>> {
        self.modules[name].as_ref().map_err(Clone::clone)
    }

    fn op(&self, name: &str) -> Res<&DiffOperator<S>> {
        self.operators[name].as_ref().map_err(Clone::clone)
    }

    fn search(&self) -> SearchConfig {
        SearchConfig { seed: self.seed, ..SearchConfig::default() }
    }

    pub fn run_tasks(&self, tasks: &[TaskSpec], parallel: bool) -> Vec<TaskReport> {
        let one = |(index, task): (usize, &TaskSpec)| self.run_task(index, task);
        if parallel {
            tasks.par_iter().enumerate().map(one).collect()
        } else {
            tasks.iter().enumerate().map(one).collect()
        }
    }

    fn run_task(&self, index: usize, task: &TaskSpec) -> TaskReport {
        let (status, summary, result) = match self.task(task) {
            Ok(out) => (if out.passed { Status::Pass } else { Status::Fail }, out.summary, out.result),
            Err(e) => (Status::Error, e, Value::Null),
        };
        TaskReport { index, task: task.name(), label: task.label(), status, summary, result }
    }

    fn task(&self, task: &TaskSpec) -> Res<Outcome> {
        let eps = self.space.tolerance().eps;
        match task {
            TaskSpec::Validate { equation } => {
                let e = self.eq(equation)?;
                e.validate().map_err(core)?;
                Ok(Outcome::pass(format!("valid, rank {}", e.rank()), json!({ "rank": e.rank() })))
            }
            TaskSpec::Solve { source, target, expect_dim } => {
                let basis = solver::hom_space(self.eq(source)?, self.eq(target)?).map_err(core)?;
                Ok(dimension_outcome(basis.dim(), *expect_dim, json!({ "morphisms": morphisms_json(basis.morphisms()) })))
            }
            TaskSpec::Symmetries { equation, expect_dim } => {
                let basis = solver::symmetries(self.eq(equation)?).map_err(core)?;
                Ok(dimension_outcome(basis.dim(), *expect_dim, json!({ "morphisms": morphisms_json(basis.morphisms()) })))
            }
            TaskSpec::Simple { equation, expect_simple } => {
                let verdict = solver::is_simple(self.eq(equation)?).map_err(core)?;
                let word = match verdict {
                    Simplicity::Simple => "simple",
                    Simplicity::NotSimple => "not simple",
                    Simplicity::Undetermined => "undetermined",
                };
                let passed = match expect_simple {
                    None => true,
                    Some(true) => verdict == Simplicity::Simple,
                    Some(false) => verdict == Simplicity::NotSimple,
                };
                Ok(Outcome { passed, summary: word.into(), result: json!({ "verdict": word }) })
            }
            TaskSpec::Decompose { equation, expect_ranks } => {
                let parts = solver::decompose(self.eq(equation)?, self.search()).map_err(core)?;
                let mut ranks: Vec<usize> = parts.iter().map(|s| s.equation.rank()).collect();
                ranks.sort_unstable();
                let passed = expect_ranks.as_ref().is_none_or(|want| {
                    let mut want = want.clone();
                    want.sort_unstable();
                    want == ranks
                });
                let embeddings: Vec<Value> = parts.iter().map(|s| matrices_json(s.embedding.matrices())).collect();
                Ok(Outcome {
                    passed,
                    summary: format!("{} summands of ranks {ranks:?}", parts.len()),
                    result: json!({ "ranks": ranks, "embeddings": embeddings }),
                })
            }
            TaskSpec::Fiber { equation } => {
                let v = equivalence::fiber(self.eq(equation)?);
                Ok(Outcome::pass(format!("dimension {}", v.dim()), module_json(&self.space, &v)))
            }
            TaskSpec::Induce { module } => {
                let e = equivalence::induce(self.hmodule(module)?).map_err(core)?;
                Ok(Outcome::pass(format!("rank {}", e.rank()), equation_json(&e)))
            }
            TaskSpec::Roundtrip { equation } => {
                let e = self.eq(equation)?;
                let found = equivalence::roundtrip_iso(e, self.search()).map_err(core)?;
                let explicit = equivalence::explicit_roundtrip(e).map_err(core)?;
                let passed = solver::is_isomorphism(&found) && solver::is_isomorphism(&explicit);
                Ok(Outcome {
                    passed,
                    summary: format!("isomorphic to the induced fiber: {passed}"),
                    result: json!({ "found": matrices_json(found.matrices()), "explicit": matrices_json(explicit.matrices()) }),
                })
            }
            TaskSpec::Transversal { module } => {
                let v = self.hmodule(module)?;
                let phi = equivalence::transversal_independence(v, self.space.transversal(), &self.space.alternate_transversal())
                    .map_err(core)?;
                Ok(Outcome::pass("transversal change is an isomorphism".into(), json!({ "iso": matrices_json(phi.matrices()) })))
            }
            TaskSpec::Grothendieck { u, v } => {
                let checks = equivalence::grothendieck_check(self.hmodule(u)?, self.hmodule(v)?, self.search()).map_err(core)?;
                let mut result = serde_json::Map::new();
                for c in &checks {
                    result.insert(c.name.to_string(), json!(c.passed()));
                }
                let passed = checks.iter().all(|c| c.passed());
                let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
                let summary = if passed { "⊕, ⊗ and dual preserved".to_string() } else { format!("no isomorphism for {failed:?}") };
                Ok(Outcome { passed, summary, result: Value::Object(result) })
            }
            TaskSpec::Project { equation, character } => {
                let e = self.eq(equation)?;
                let chi = match self.modules.get(character) {
                    Some(m) => Character::of_module(m.as_ref().map_err(Clone::clone)?),
                    None => projection::builtin_character(&self.space, character).map_err(core)?,
                };
                let pi = projection::frobenius_projection(e, &chi).map_err(core)?;
                let via = projection::frobenius_projection_via_fiber(e, &chi).map_err(core)?;
                let agree = pi.matrices().iter().zip(via.matrices()).all(|(a, b)| a.approx_eq(b, eps));
                let defect = projection::idempotence_defect(&pi);
                let idempotent = defect <= if S::EXACT { 0.0 } else { eps };
                Ok(Outcome {
                    passed: agree && pi.is_valid(),
                    summary: format!("fiber rank {}, idempotent: {idempotent}", pi.fiber_rank()),
                    result: json!({
                        "fiber_rank": pi.fiber_rank(),
                        "idempotent": idempotent,
                        "idempotence_defect": defect,
                        "agrees_with_fiber_route": agree,
                        "matrices": matrices_json(pi.matrices()),
                    }),
                })
            }
            TaskSpec::Schur { host, simples } => {
                let simples = simples.iter().map(|n| self.eq(n).cloned()).collect::<Res<Vec<_>>>()?;
                let report = projection::schur_check(self.eq(host)?, &simples).map_err(core)?;
                let passed = report.passed() && report.complete();
                Ok(Outcome {
                    passed,
                    summary: format!("relations hold: {}, complete: {}", report.passed(), report.complete()),
                    result: json!({
                        "restriction_defects": report.restriction_defects,
                        "idempotence_defects": report.idempotence_defects,
                        "orthogonality_defect": report.orthogonality_defect,
                        "completeness_defect": report.completeness_defect,
                        "fiber_ranks": report.fiber_ranks,
                        "tolerance": report.tolerance,
                    }),
                })
            }
            TaskSpec::Factor { equation, simple } => {
                let (direct, via) = projection::factoring_dimensions(self.eq(equation)?, self.eq(simple)?).map_err(core)?;
                Ok(Outcome {
                    passed: direct == via,
                    summary: format!("{direct} solutions directly, {via} through the isotypic part"),
                    result: json!({ "direct": direct, "via_isotypic_part": via }),
                })
            }
            TaskSpec::Invariants { equation, expect_dim } => {
                let basis = invariants::invariant_vectors(self.eq(equation)?).map_err(core)?;
                Ok(dimension_outcome(basis.len(), *expect_dim, json!({ "vectors": elements_json(&basis) })))
            }
            TaskSpec::Selfdual { equation, expect_self_dual } => {
                let e = self.eq(equation)?;
                let found = invariants::self_dual_check(e, self.search()).map_err(core)?;
                let is = found.is_some();
                let result = match &found {
                    None => json!({ "self_dual": false }),
                    Some(sd) => json!({
                        "self_dual": true,
                        "form": match sd.kind { FormKind::Symmetric => "symmetric", FormKind::Alternating => "alternating" },
                        "bilinear": matrices_json(&invariants::bilinear_form(sd.kind, e.rank(), &sd.form)),
                    }),
                };
                let summary = match &found {
                    None => "no nondegenerate invariant form".to_string(),
                    Some(sd) => format!("self-dual via a {:?} form", sd.kind).to_lowercase(),
                };
                Ok(Outcome { passed: expect_self_dual.is_none_or(|want| want == is), summary, result })
            }
            TaskSpec::Conserved { equation, target, power } => {
                let (e, f) = (self.eq(equation)?, self.eq(target)?);
                let kind = match power {
                    PowerSpec::Sym2 => PowerKind::Sym2,
                    PowerSpec::Wedge2 => PowerKind::Wedge2,
                    PowerSpec::WedgeTop => PowerKind::WedgeTop,
                };
                let alphas = invariants::invariant_vectors(&kind.host(e).map_err(core)?).map_err(core)?;
                let sols = solver::hom_space(e, f).map_err(core)?;
                let mut checks = Vec::new();
                let mut passed = true;
                for (a, alpha) in alphas.iter().enumerate() {
                    for (s, phi) in sols.morphisms().iter().enumerate() {
                        let r = invariants::conserved_quantity_check(kind, alpha, phi).map_err(core)?;
                        passed &= r.passed();
                        checks.push(json!({
                            "invariant": a,
                            "solution": s,
                            "passed": r.passed(),
                            "constant": r.constant,
                            "pushforward": elements_json(std::slice::from_ref(&r.pushforward)),
                        }));
                    }
                }
                Ok(Outcome {
                    passed,
                    summary: format!("{} invariants × {} solutions checked", alphas.len(), sols.dim()),
                    result: json!({ "checks": checks }),
                })
            }
            TaskSpec::Composition { source, target } => {
                let (e, f) = (self.eq(source)?, self.eq(target)?);
                let host = invariants::composition_host(e, f).map_err(core)?;
                let alphas = invariants::invariant_vectors(&host).map_err(core)?;
                let sols = solver::hom_space(e, f).map_err(core)?;
                let ms = sols.morphisms();
                let mut count = 0;
                let mut passed = true;
                for alpha in &alphas {
                    let alpha = InvariantStructure::new(host.clone(), alpha.clone()).map_err(core)?;
                    for i in 0..ms.len() {
                        for j in i..ms.len() {
                            let t = invariants::composition_principle(&alpha, &ms[i], &ms[j]).map_err(core)?;
                            passed &= sols.contains(&t);
                            count += 1;
                        }
                    }
                }
                Ok(Outcome {
                    passed,
                    summary: format!("{count} products of solutions are solutions"),
                    result: json!({ "invariants": alphas.len(), "solutions": sols.dim(), "products": count }),
                })
            }
            TaskSpec::Classical { system, expect_dim } => {
                let sys = self.systems[system].as_ref().map_err(Clone::clone)?;
                let delta = diffops::ingest_classical(sys).map_err(core)?;
                let sols = diffops::classical_solutions(&delta);
                Ok(dimension_outcome(sols.len(), *expect_dim, json!({ "solutions": elements_json(&sols) })))
            }
            TaskSpec::KerMu { source, target, expect_dim } => {
                let basis = diffops::ker_mu_basis(self.eq(source)?, self.eq(target)?).map_err(core)?;
                Ok(dimension_outcome(basis.len(), *expect_dim, json!({})))
            }
            TaskSpec::Compose { second, first } => {
                let c = diffops::compose(self.op(second)?, self.op(first)?).map_err(core)?;
                Ok(Outcome::pass("tensor formula agrees with the matrix product".into(), json!({ "matrix": matrix_json(c.matrix()) })))
            }
            TaskSpec::EquationOf { operator, expect_rank } => {
                let eq = diffops::equation_of(self.op(operator)?).map_err(core)?;
                let rank = eq.equation.rank();
                Ok(Outcome {
                    passed: expect_rank.is_none_or(|r| r == rank),
                    summary: format!("E_Δ has rank {rank}"),
                    result: json!({
                        "rank": rank,
                        "difn_source_rank": eq.difn_source.rank(),
                        "difn_target_rank": eq.difn_target.rank(),
                    }),
                })
            }
            TaskSpec::Embed { operator } => {
                let r = diffops::embed_solutions(self.op(operator)?).map_err(core)?;
                Ok(Outcome {
                    passed: r.passed(),
                    summary: format!("dim C = {} ≤ dim Hom(E_Δ, 𝟙) = {}, injective: {}", r.classical_dim, r.hom_dim, r.injective),
                    result: json!({ "classical_dim": r.classical_dim, "hom_dim": r.hom_dim, "injective": r.injective }),
                })
            }
            TaskSpec::AssertZeroAction { operator } => {
                let m = self.op(operator)?.matrix();
                let zero = m.is_zero_within(if S::EXACT { 0.0 } else { eps });
                Ok(Outcome {
                    passed: zero,
                    summary: if zero { "acts as zero".into() } else { format!("nonzero action, max entry {}", m.max_abs()) },
                    result: json!({ "zero": zero }),
                })
            }
        }
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    result: Value,
}

impl Outcome {
    fn pass(summary: String, result: Value) -> Self {
        Self { passed: true, summary, result }
    }
}

fn dimension_outcome(dim: usize, expect: Option<usize>, mut result: Value) -> Outcome {
    result["dim"] = json!(dim);
    match expect {
        Some(want) if want != dim => Outcome { passed: false, summary: format!("dim {dim}, expected {want}"), result },
        _ => Outcome { passed: true, summary: format!("dim {dim}"), result },
    }
}

fn morphisms_json<S: CliScalar>(ms: &[Morphism<S>]) -> Value {
    Value::Array(ms.iter().map(|m| matrices_json(m.matrices())).collect())
}

/// Each element as its coordinate functions, `[coordinate][point]`.
fn elements_json<S: CliScalar>(vs: &[ModuleElement<S>]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| Value::Array(v.coords().iter().map(|f| Value::Array(f.values().iter().map(CliScalar::to_json).collect())).collect()))
            .collect(),
    )
}

fn perm_label(space: &HomogeneousSpace, g: ElementId) -> String {
    let labels = space.space().labels();
    let cycles = space.group().perm(g).cycles();
    if cycles.is_empty() {
        return "()".into();
    }
    cycles.iter().map(|c| format!("({})", c.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join(" "))).collect()
}

fn module_json<S: CliScalar>(space: &HomogeneousSpace, v: &HModule<S>) -> Value {
    let rho: Vec<Value> = v
        .elements()
        .iter()
        .map(|&h| json!({ "element": perm_label(space, h), "matrix": matrix_json(v.rho(h).expect("own element")) }))
        .collect();
    json!({ "dim": v.dim(), "rho": rho })
}

fn equation_json<S: CliScalar>(e: &Equation<S>) -> Value {
    let space = e.space();
    let mut gens = serde_json::Map::new();
    for (name, g) in space.group().generators() {
        let ms: Vec<_> = (0..space.size()).map(|y| e.at(*g, y).clone()).collect();
        gens.insert(name.clone(), matrices_json(&ms));
    }
    json!({ "rank": e.rank(), "generators": gens })
}
