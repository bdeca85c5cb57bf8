//! Problem file schema.
//!
//! Scalars are JSON integers, `"p/q"` strings, floats (complex backend only)
//! or `[re, im]` pairs (complex backend only). A coefficient function is
//! either `"coeff": scalar` (constant) or `"values": [scalar; |S|]`.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Point labels.
    pub space: Vec<String>,
    pub group: Vec<GeneratorSpec>,
    #[serde(default)]
    pub backend: BackendSpec,
    #[serde(default)]
    pub hmodules: BTreeMap<String, HModuleSpec>,
    #[serde(default)]
    pub equations: BTreeMap<String, EquationSpec>,
    #[serde(default)]
    pub systems: BTreeMap<String, SystemSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// Cycle notation over the point labels, e.g. `"(x1 x3 x2)"`.
    pub cycles: String,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Rational,
    Complex,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Rational => "rational",
            BackendKind::Complex => "complex",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendSpec {
    #[serde(default)]
    pub kind: BackendKind,
    pub epsilon: Option<f64>,
}

pub type MatrixSpec = Vec<Vec<Value>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HModuleSpec {
    Trivial,
    Regular,
    /// One of the built-in irreducibles of a cyclic or dihedral stabilizer.
    Builtin { name: String },
    /// `ρ` on generators of `H`, keyed by group word.
    Generators { dim: usize, matrices: BTreeMap<String, MatrixSpec> },
    DirectSum { of: Vec<String> },
    Tensor { of: Vec<String> },
    Dual { of: String },
    Fiber { equation: String },
    /// A conjugated sum of two random one-dimensional built-ins.
    Random { seed: u64 },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TransversalChoice {
    #[default]
    Default,
    Alternate,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EquationSpec {
    Trivial {
        #[serde(default = "one")]
        rank: usize,
    },
    Sign,
    /// Generator matrices keyed by group word; `constant` matrices are used
    /// at every point, `pointwise` lists give one matrix per point.
    Generators {
        rank: usize,
        #[serde(default)]
        constant: BTreeMap<String, MatrixSpec>,
        #[serde(default)]
        pointwise: BTreeMap<String, Vec<MatrixSpec>>,
    },
    Induce {
        module: String,
        #[serde(default)]
        transversal: TransversalChoice,
    },
    DirectSum { of: Vec<String> },
    Tensor { of: Vec<String> },
    Hom { source: String, target: String },
    Dual { of: String },
    Sym2 { of: String },
    Wedge2 { of: String },
    WedgeTop { of: String },
    /// `of` in a random pointwise basis.
    RandomGauge { of: String, seed: u64 },
    /// `E_Δ` of a difference operator.
    OperatorEquation { operator: String },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub unknowns: usize,
    /// One list of terms per equation.
    pub equations: Vec<Vec<SystemTerm>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemTerm {
    pub unknown: usize,
    pub word: String,
    pub coeff: Option<Value>,
    pub values: Option<Vec<Value>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewTerm {
    pub word: String,
    pub coeff: Option<Value>,
    pub values: Option<Vec<Value>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTerm {
    pub i: usize,
    pub j: usize,
    pub word: String,
    pub coeff: Option<Value>,
    pub values: Option<Vec<Value>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `Σ θ_ijg φ_ij ⊗ g`.
    Terms { source: String, target: String, terms: Vec<OperatorTerm> },
    /// `id ⊗ a` on a rank-one equation.
    Skew { equation: String, terms: Vec<SkewTerm> },
    Classical { system: String },
    Identity { equation: String },
    Zero { source: String, target: String },
    Compose { second: String, first: String },
    LeftMul { operator: String, terms: Vec<SkewTerm> },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PowerSpec {
    Sym2,
    Wedge2,
    WedgeTop,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Validate { equation: String },
    Solve { source: String, target: String, expect_dim: Option<usize> },
    Symmetries { equation: String, expect_dim: Option<usize> },
    Simple { equation: String, expect_simple: Option<bool> },
    Decompose { equation: String, expect_ranks: Option<Vec<usize>> },
    Fiber { equation: String },
    Induce { module: String },
    Roundtrip { equation: String },
    Transversal { module: String },
    Grothendieck { u: String, v: String },
    /// `character` names a built-in irreducible or an `hmodules` entry.
    Project { equation: String, character: String },
    Schur { host: String, simples: Vec<String> },
    Factor { equation: String, simple: String },
    Invariants { equation: String, expect_dim: Option<usize> },
    Selfdual { equation: String, expect_self_dual: Option<bool> },
    Conserved { equation: String, target: String, power: PowerSpec },
    Composition { source: String, target: String },
    Classical { system: String, expect_dim: Option<usize> },
    KerMu { source: String, target: String, expect_dim: Option<usize> },
    Compose { second: String, first: String },
    EquationOf { operator: String, expect_rank: Option<usize> },
    Embed { operator: String },
    AssertZeroAction { operator: String },
}

/// Which table a name refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Table {
    Module,
    Equation,
    System,
    Operator,
}

impl Table {
    pub fn name(self) -> &'static str {
        match self {
            Table::Module => "hmodule",
            Table::Equation => "equation",
            Table::System => "system",
            Table::Operator => "operator",
        }
    }
}

fn eqs<'a>(names: impl IntoIterator<Item = &'a String>) -> Vec<(Table, &'a str)> {
    names.into_iter().map(|n| (Table::Equation, n.as_str())).collect()
}

impl HModuleSpec {
    pub fn refs(&self) -> Vec<(Table, &str)> {
        match self {
            HModuleSpec::DirectSum { of } | HModuleSpec::Tensor { of } => of.iter().map(|n| (Table::Module, n.as_str())).collect(),
            HModuleSpec::Dual { of } => vec![(Table::Module, of)],
            HModuleSpec::Fiber { equation } => vec![(Table::Equation, equation)],
            _ => Vec::new(),
        }
    }
}

impl EquationSpec {
    pub fn refs(&self) -> Vec<(Table, &str)> {
        match self {
            EquationSpec::Induce { module, .. } => vec![(Table::Module, module)],
            EquationSpec::DirectSum { of } | EquationSpec::Tensor { of } => eqs(of),
            EquationSpec::Hom { source, target } => eqs([source, target]),
            EquationSpec::Dual { of }
            | EquationSpec::Sym2 { of }
            | EquationSpec::Wedge2 { of }
            | EquationSpec::WedgeTop { of }
            | EquationSpec::RandomGauge { of, .. } => eqs([of]),
            EquationSpec::OperatorEquation { operator } => vec![(Table::Operator, operator)],
            _ => Vec::new(),
        }
    }
}

impl OperatorSpec {
    pub fn refs(&self) -> Vec<(Table, &str)> {
        match self {
            OperatorSpec::Terms { source, target, .. } | OperatorSpec::Zero { source, target } => eqs([source, target]),
            OperatorSpec::Skew { equation, .. } | OperatorSpec::Identity { equation } => eqs([equation]),
            OperatorSpec::Classical { system } => vec![(Table::System, system)],
            OperatorSpec::Compose { second, first } => vec![(Table::Operator, second), (Table::Operator, first)],
            OperatorSpec::LeftMul { operator, .. } => vec![(Table::Operator, operator)],
        }
    }
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::Validate { .. } => "validate",
            TaskSpec::Solve { .. } => "solve",
            TaskSpec::Symmetries { .. } => "symmetries",
            TaskSpec::Simple { .. } => "simple",
            TaskSpec::Decompose { .. } => "decompose",
            TaskSpec::Fiber { .. } => "fiber",
            TaskSpec::Induce { .. } => "induce",
            TaskSpec::Roundtrip { .. } => "roundtrip",
            TaskSpec::Transversal { .. } => "transversal",
            TaskSpec::Grothendieck { .. } => "grothendieck",
            TaskSpec::Project { .. } => "project",
            TaskSpec::Schur { .. } => "schur",
            TaskSpec::Factor { .. } => "factor",
            TaskSpec::Invariants { .. } => "invariants",
            TaskSpec::Selfdual { .. } => "selfdual",
            TaskSpec::Conserved { .. } => "conserved",
            TaskSpec::Composition { .. } => "composition",
            TaskSpec::Classical { .. } => "classical",
            TaskSpec::KerMu { .. } => "ker_mu",
            TaskSpec::Compose { .. } => "compose",
            TaskSpec::EquationOf { .. } => "equation_of",
            TaskSpec::Embed { .. } => "embed",
            TaskSpec::AssertZeroAction { .. } => "assert_zero_action",
        }
    }

    /// Names this task reads. `Project` characters are checked separately
    /// since they may also name a built-in.
    pub fn refs(&self) -> Vec<(Table, &str)> {
        match self {
            TaskSpec::Validate { equation }
            | TaskSpec::Symmetries { equation, .. }
            | TaskSpec::Simple { equation, .. }
            | TaskSpec::Decompose { equation, .. }
            | TaskSpec::Fiber { equation }
            | TaskSpec::Roundtrip { equation }
            | TaskSpec::Project { equation, .. }
            | TaskSpec::Invariants { equation, .. }
            | TaskSpec::Selfdual { equation, .. } => eqs([equation]),
            TaskSpec::Solve { source, target, .. }
            | TaskSpec::Composition { source, target }
            | TaskSpec::KerMu { source, target, .. } => eqs([source, target]),
            TaskSpec::Conserved { equation, target, .. } => eqs([equation, target]),
            TaskSpec::Factor { equation, simple } => eqs([equation, simple]),
            TaskSpec::Schur { host, simples } => eqs(std::iter::once(host).chain(simples)),
            TaskSpec::Induce { module } | TaskSpec::Transversal { module } => vec![(Table::Module, module)],
            TaskSpec::Grothendieck { u, v } => vec![(Table::Module, u), (Table::Module, v)],
            TaskSpec::Classical { system, .. } => vec![(Table::System, system)],
            TaskSpec::Compose { second, first } => vec![(Table::Operator, second), (Table::Operator, first)],
            TaskSpec::EquationOf { operator, .. } | TaskSpec::Embed { operator } | TaskSpec::AssertZeroAction { operator } => {
                vec![(Table::Operator, operator)]
            }
        }
    }

    /// Short call-style label, e.g. `solve(one, sign)`.
    pub fn label(&self) -> String {
        let args: Vec<String> = match self {
            TaskSpec::Project { equation, character } => vec![equation.clone(), character.clone()],
            TaskSpec::Conserved { equation, target, power } => {
                vec![equation.clone(), target.clone(), format!("{power:?}").to_lowercase()]
            }
            other => other.refs().into_iter().map(|(_, n)| n.to_string()).collect(),
        };
        format!("{}({})", self.name(), args.join(", "))
    }
}
