//! Scenario documents: a JSON object with `declare` (name → constructor form)
//! and `tasks` (ordered `{verb, args, expect}` records).

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

/// Errors in the scenario itself. All map to exit status 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: declaration {name}: {kind}: {message}")]
    Declaration {
        name: String,
        line: usize,
        kind: String,
        message: String,
    },
    #[error("{0}")]
    Io(String),
}

impl InputError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        InputError::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            InputError::Parse { .. } => "ParseError",
            InputError::Declaration { kind, .. } => kind,
            InputError::Io(_) => "IoError",
        }
    }
}

/// A vector in an algebra: `"unit"`, `"zero"`, a coordinate list (numbers or
/// `[re, im]` pairs) or a map from basis labels to coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum VecSpec {
    Named(String),
    Coords(Vec<Scalar>),
    Sparse(BTreeMap<String, Scalar>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

/// How a generator acts on an algebra.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AutSpec {
    /// `Ad(u)`.
    Inner(VecSpec),
    /// Basis element `i` goes to basis element `perm[i]` (labels or indices).
    Permutation(Vec<String>),
    /// Rows of the matrix on basis coordinates.
    Matrix(Vec<Vec<Scalar>>),
}

/// Constructor forms, one per library operation.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Decl {
    Cyclic {
        n: usize,
    },
    Symmetric {
        n: usize,
    },
    TrivialGroup,
    Klein4,
    GroupTable {
        labels: Vec<String>,
        table: Vec<Vec<String>>,
    },
    DirectProduct {
        left: String,
        right: String,
    },
    QuotientGroup {
        group: String,
        normal: Vec<String>,
    },

    GroupGroupoid {
        group: String,
    },
    Space {
        objects: Vec<String>,
    },
    Pair {
        n: usize,
    },
    /// `act` gives, for generators, the image of every object in order.
    ActionGroupoid {
        group: String,
        objects: Vec<String>,
        act: BTreeMap<String, Vec<String>>,
    },
    /// `K / Iso(K)`.
    IsotropyQuotient {
        groupoid: String,
    },
    DisjointUnion {
        left: String,
        right: String,
    },

    /// Group case. `d` and `c` are given on generators and extended; `c`
    /// defaults to the trivial action.
    CrossedModule {
        g: String,
        h: String,
        d: BTreeMap<String, String>,
        #[serde(default)]
        c: BTreeMap<String, BTreeMap<String, String>>,
    },
    NormalSubgroup {
        group: String,
        normal: Vec<String>,
    },
    BGroup {
        h: String,
    },
    AbelianExtension {
        group: String,
        normal: Vec<String>,
    },
    Isotropy {
        groupoid: String,
    },
    Aut2 {
        groupoid: String,
    },

    Complex,
    Matrix {
        n: usize,
    },
    Functions {
        points: Vec<String>,
    },
    GroupAlgebra {
        group: String,
    },
    GroupoidAlgebra {
        groupoid: String,
    },
    /// Basis labels are prefixed with the summand index when they collide.
    DirectSum {
        summands: Vec<String>,
    },
    Tensor {
        left: String,
        right: String,
    },

    /// Group case, `α` on generators.
    GroupoidAction {
        groupoid: String,
        algebra: String,
        #[serde(default)]
        alpha: BTreeMap<String, AutSpec>,
    },
    TrivialAction {
        groupoid: String,
        algebra: String,
    },
    LeftTranslation {
        groupoid: String,
    },

    /// Group case, `α` and `u` on generators.
    CmAction {
        cm: String,
        algebra: String,
        #[serde(default)]
        alpha: BTreeMap<String, AutSpec>,
        #[serde(default)]
        u: BTreeMap<String, VecSpec>,
    },
    CmTrivial {
        cm: String,
        algebra: String,
    },
    CmOnObjects {
        cm: String,
    },
    /// The canonical action on `B ⋊ H` for an action `beta` of `G` on `B`.
    Canonical {
        cm: String,
        beta: String,
    },
    /// The action on `C*(H ⋉ G)` induced by left translation.
    Induced {
        cm: String,
    },
    /// `u_h = Σ_ξ ξ(h) p_ξ` on the direct sum of `fibers`, one per character.
    PontryaginCompose {
        h: String,
        fibers: Vec<String>,
    },

    Ideal {
        algebra: String,
        generators: Vec<VecSpec>,
    },
    Linking {
        action: String,
        p: VecSpec,
    },
}

/// Expectations attached to a task; any mismatch fails the task.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub blocks: BTreeMap<String, Vec<usize>>,
    /// The task must fail with this error kind.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RawTask {
    pub verb: String,
    pub args: BTreeMap<String, String>,
    pub expect: Expect,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct RawScenario {
    pub declarations: BTreeMap<String, (Decl, usize)>,
    pub tasks: Vec<RawTask>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    #[serde(default)]
    declare: serde_json::Map<String, Value>,
    #[serde(default)]
    tasks: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    verb: String,
    #[serde(default)]
    args: BTreeMap<String, String>,
    #[serde(default)]
    expect: Expect,
}

/// Line of the first `"key":` at or after byte `from`.
fn line_of_key(text: &str, key: &str, from: usize) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let mut start = from;
    while let Some(off) = text[start..].find(&needle) {
        let pos = start + off;
        let after = text[pos + needle.len()..].trim_start();
        if after.starts_with(':') {
            return Some((text[..pos].matches('\n').count() + 1, pos));
        }
        start = pos + needle.len();
    }
    None
}

pub fn parse(text: &str) -> Result<RawScenario, InputError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| InputError::parse(e.line(), e.to_string()))?;
    let declare_at = line_of_key(text, "declare", 0).map(|(_, p)| p).unwrap_or(0);
    let mut declarations = BTreeMap::new();
    for (name, value) in doc.declare {
        let line = line_of_key(text, &name, declare_at).map(|(l, _)| l).unwrap_or(1);
        let decl: Decl = serde_json::from_value(value).map_err(|e| InputError::parse(line, format!("declaration {name}: {e}")))?;
        declarations.insert(name, (decl, line));
    }
    let mut tasks = Vec::new();
    let mut cursor = line_of_key(text, "tasks", 0).map(|(_, p)| p).unwrap_or(0);
    for (i, value) in doc.tasks.into_iter().enumerate() {
        let (line, pos) = line_of_key(text, "verb", cursor).unwrap_or((1, cursor));
        cursor = pos + 1;
        let t: TaskDoc = serde_json::from_value(value).map_err(|e| InputError::parse(line, format!("task {}: {e}", i + 1)))?;
        tasks.push(RawTask {
            verb: t.verb,
            args: t.args,
            expect: t.expect,
            line,
        });
    }
    Ok(RawScenario { declarations, tasks })
}
