//! Executes declarations in dependency order, so every axiom is checked at
//! load time.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use crossmod::action::{over_objects, CMAction, GroupoidAlgebraAction};
use crossmod::algebra::{
    diagonal_tensor, direct_sum, functions_on, group_algebra, groupoid_algebra, ideal_generated, matrix_algebra, Fibering,
    Ideal, StarAlgebra,
};
use crossmod::crossed_product::{canonical_action_on_bh, left_translation};
use crossmod::linalg::{Matrix, Vector, C64, ONE};
use crossmod::pontryagin::{pontryagin_compose, CharacterGroup};
use crossmod::{
    aut2, induced_algebra_action, linking, translation_action, CrossedModule, Error, FiniteGroup, FiniteGroupoid,
    LinkingData,
};

use crate::scenario::{AutSpec, Decl, InputError, RawScenario, Scalar, VecSpec};

#[derive(Clone, Debug)]
pub enum Obj {
    Group(FiniteGroup),
    Groupoid(FiniteGroupoid),
    CrossedModule(CrossedModule),
    Algebra(Arc<StarAlgebra>),
    GroupoidAction(GroupoidAlgebraAction),
    CmAction(CMAction),
    Ideal(Arc<StarAlgebra>, Ideal),
    Linking(Box<LinkingData>),
}

impl Obj {
    pub fn kind(&self) -> &'static str {
        match self {
            Obj::Group(_) => "a group",
            Obj::Groupoid(_) => "a groupoid",
            Obj::CrossedModule(_) => "a crossed module",
            Obj::Algebra(_) => "an algebra",
            Obj::GroupoidAction(_) => "a groupoid action",
            Obj::CmAction(_) => "a crossed-module action",
            Obj::Ideal(..) => "an ideal",
            Obj::Linking(_) => "linking data",
        }
    }
}

/// Errors while building one declaration.
enum Fail {
    /// A reference problem, reported as a parse error.
    Input(InputError),
    Lib(Error),
    Bad(String),
}

macro_rules! lib_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Fail {
            fn from(e: $t) -> Self {
                Fail::Lib(e.into())
            }
        }
    )*};
}

lib_error!(
    Error,
    crossmod::GroupError,
    crossmod::GroupoidError,
    crossmod::CrossedModuleError,
    crossmod::algebra::AlgebraError,
    crossmod::action::ActionError,
    crossmod::SymmetryError,
    crossmod::crossed_product::CrossedProductError,
    crossmod::MoritaError
);

type R<T> = Result<T, Fail>;

pub struct Env {
    raw: BTreeMap<String, (Decl, usize)>,
    built: BTreeMap<String, Obj>,
    visiting: Vec<String>,
}

impl Env {
    pub fn build(scenario: &RawScenario) -> Result<Env, InputError> {
        let mut env = Env {
            raw: scenario.declarations.clone(),
            built: BTreeMap::new(),
            visiting: Vec::new(),
        };
        let names: Vec<(String, usize)> = env.raw.iter().map(|(n, (_, l))| (n.clone(), *l)).collect();
        for (name, line) in names {
            env.get(&name, line)?;
        }
        Ok(env)
    }

    pub fn lookup(&self, name: &str) -> Option<&Obj> {
        self.built.get(name)
    }

    fn get(&mut self, name: &str, from_line: usize) -> Result<Obj, InputError> {
        if let Some(o) = self.built.get(name) {
            return Ok(o.clone());
        }
        let Some((decl, line)) = self.raw.get(name).cloned() else {
            return Err(InputError::parse(from_line, format!("unresolved reference {name:?}")));
        };
        if self.visiting.iter().any(|n| n == name) {
            return Err(InputError::parse(line, format!("cyclic declaration involving {name:?}")));
        }
        self.visiting.push(name.to_string());
        let result = self.construct(&decl, line);
        self.visiting.pop();
        let obj = result.map_err(|f| match f {
            Fail::Input(e) => e,
            Fail::Lib(e) => InputError::Declaration {
                name: name.into(),
                line,
                kind: e.kind(),
                message: e.to_string(),
            },
            Fail::Bad(message) => InputError::Declaration {
                name: name.into(),
                line,
                kind: "InvalidDeclaration".into(),
                message,
            },
        })?;
        self.built.insert(name.to_string(), obj.clone());
        Ok(obj)
    }

    fn dep(&mut self, name: &str, line: usize) -> R<Obj> {
        self.get(name, line).map_err(Fail::Input)
    }

    fn wrong(name: &str, line: usize, got: &Obj, want: &str) -> Fail {
        Fail::Input(InputError::parse(line, format!("{name:?} is {}, expected {want}", got.kind())))
    }

    fn group(&mut self, name: &str, line: usize) -> R<FiniteGroup> {
        match self.dep(name, line)? {
            Obj::Group(g) => Ok(g),
            o => Err(Self::wrong(name, line, &o, "a group")),
        }
    }

    /// A groupoid, or a group viewed as a one-object groupoid.
    fn groupoid(&mut self, name: &str, line: usize) -> R<FiniteGroupoid> {
        match self.dep(name, line)? {
            Obj::Groupoid(g) => Ok(g),
            Obj::Group(g) => Ok(FiniteGroupoid::from_group(&g)),
            o => Err(Self::wrong(name, line, &o, "a groupoid")),
        }
    }

    fn cm(&mut self, name: &str, line: usize) -> R<CrossedModule> {
        match self.dep(name, line)? {
            Obj::CrossedModule(c) => Ok(c),
            o => Err(Self::wrong(name, line, &o, "a crossed module")),
        }
    }

    /// An algebra, or the algebra an action acts on.
    fn algebra(&mut self, name: &str, line: usize) -> R<Arc<StarAlgebra>> {
        match self.dep(name, line)? {
            Obj::Algebra(a) => Ok(a),
            Obj::GroupoidAction(a) => Ok(a.algebra().clone()),
            Obj::CmAction(a) => Ok(a.algebra().clone()),
            o => Err(Self::wrong(name, line, &o, "an algebra")),
        }
    }

    fn groupoid_action(&mut self, name: &str, line: usize) -> R<GroupoidAlgebraAction> {
        match self.dep(name, line)? {
            Obj::GroupoidAction(a) => Ok(a),
            o => Err(Self::wrong(name, line, &o, "a groupoid action")),
        }
    }

    fn cm_action(&mut self, name: &str, line: usize) -> R<CMAction> {
        match self.dep(name, line)? {
            Obj::CmAction(a) => Ok(a),
            o => Err(Self::wrong(name, line, &o, "a crossed-module action")),
        }
    }

    fn construct(&mut self, decl: &Decl, line: usize) -> R<Obj> {
        use Decl::*;
        Ok(match decl {
            Cyclic { n } => {
                if *n == 0 {
                    return Err(Fail::Bad("cyclic(0) is not a group".into()));
                }
                Obj::Group(FiniteGroup::cyclic(*n))
            }
            Symmetric { n } => Obj::Group(FiniteGroup::symmetric(*n)?),
            TrivialGroup => Obj::Group(FiniteGroup::trivial()),
            Klein4 => Obj::Group(FiniteGroup::klein4()),
            GroupTable { labels, table } => {
                let index = |s: &String| labels.iter().position(|l| l == s).ok_or_else(|| Fail::Bad(format!("unknown element {s:?}")));
                let t = table
                    .iter()
                    .map(|row| row.iter().map(index).collect::<R<Vec<_>>>())
                    .collect::<R<Vec<_>>>()?;
                Obj::Group(FiniteGroup::from_table(labels.clone(), t)?)
            }
            DirectProduct { left, right } => {
                let (a, b) = (self.group(left, line)?, self.group(right, line)?);
                Obj::Group(a.direct_product(&b)?)
            }
            QuotientGroup { group, normal } => {
                let g = self.group(group, line)?;
                let n = resolve_all(&g, normal)?;
                Obj::Group(crossmod::quotient_group(&g, &n)?.0)
            }

            GroupGroupoid { group } => Obj::Groupoid(FiniteGroupoid::from_group(&self.group(group, line)?)),
            Space { objects } => Obj::Groupoid(FiniteGroupoid::space(objects.clone())),
            Pair { n } => Obj::Groupoid(FiniteGroupoid::pair(*n)),
            ActionGroupoid { group, objects, act } => {
                let g = self.group(group, line)?;
                let index = |s: &String| objects.iter().position(|l| l == s).ok_or_else(|| Fail::Bad(format!("unknown object {s:?}")));
                let mut gens = Vec::new();
                for (label, images) in act {
                    if images.len() != objects.len() {
                        return Err(Fail::Bad(format!("{label} must give one image per object")));
                    }
                    let perm = images.iter().map(index).collect::<R<Vec<usize>>>()?;
                    gens.push((g.resolve(label)?, perm));
                }
                let ident: Vec<usize> = (0..objects.len()).collect();
                let maps = extend(&g, &gens, ident, |a, b| b.iter().map(|&x| a[x]).collect())?;
                Obj::Groupoid(FiniteGroupoid::action_groupoid(&g, objects.clone(), |a, x| maps[a][x])?)
            }
            IsotropyQuotient { groupoid } => {
                let k = self.groupoid(groupoid, line)?;
                let (_, incl) = k.isotropy();
                Obj::Groupoid(k.quotient(&incl)?.0)
            }
            DisjointUnion { left, right } => {
                let (a, b) = (self.groupoid(left, line)?, self.groupoid(right, line)?);
                Obj::Groupoid(a.disjoint_union(&b))
            }

            CrossedModule { g, h, d, c } => {
                let (gg, hh) = (self.group(g, line)?, self.group(h, line)?);
                let mut gens = Vec::new();
                for (k, v) in d {
                    gens.push((hh.resolve(k)?, gg.resolve(v)?));
                }
                let dmap = extend(&hh, &gens, gg.identity(), |a, b| gg.mul(*a, *b))?;
                let ident: Vec<usize> = hh.elements().collect();
                let mut cgens = Vec::new();
                for (gl, hm) in c {
                    let mut hg = Vec::new();
                    for (k, v) in hm {
                        hg.push((hh.resolve(k)?, hh.resolve(v)?));
                    }
                    // an endomorphism of H from its values on generators
                    let auto = extend(&hh, &hg, hh.identity(), |a, b| hh.mul(*a, *b))?;
                    cgens.push((gg.resolve(gl)?, auto));
                }
                // no `c` means G acts trivially
                let cmap = if cgens.is_empty() {
                    vec![ident; gg.order()]
                } else {
                    extend(&gg, &cgens, ident, |a, b| b.iter().map(|&x| a[x]).collect())?
                };
                Obj::CrossedModule(crossmod::CrossedModule::from_groups(&gg, &hh, &dmap, |a, k| cmap[a][k])?)
            }
            NormalSubgroup { group, normal } => {
                let g = self.group(group, line)?;
                let n = resolve_all(&g, normal)?;
                Obj::CrossedModule(crossmod::CrossedModule::from_normal_subgroup(&g, &n)?)
            }
            BGroup { h } => Obj::CrossedModule(crossmod::CrossedModule::b_group(&self.group(h, line)?)?),
            AbelianExtension { group, normal } => {
                let g = self.group(group, line)?;
                let n = resolve_all(&g, normal)?;
                Obj::CrossedModule(crossmod::CrossedModule::from_abelian_extension(&g, &n)?)
            }
            Isotropy { groupoid } => Obj::CrossedModule(crossmod::CrossedModule::from_isotropy(&self.groupoid(groupoid, line)?)?),
            Aut2 { groupoid } => Obj::CrossedModule(aut2(&self.groupoid(groupoid, line)?)?.cm),

            Complex => Obj::Algebra(Arc::new(matrix_algebra(1))),
            Matrix { n } => {
                if *n == 0 {
                    return Err(Fail::Bad("matrix(0) is not an algebra".into()));
                }
                Obj::Algebra(Arc::new(matrix_algebra(*n)))
            }
            Functions { points } => Obj::Algebra(Arc::new(functions_on(points))),
            GroupAlgebra { group } => Obj::Algebra(Arc::new(group_algebra(&self.group(group, line)?))),
            GroupoidAlgebra { groupoid } => Obj::Algebra(Arc::new(groupoid_algebra(&self.groupoid(groupoid, line)?))),
            DirectSum { summands } => {
                let parts = summands.iter().map(|s| self.algebra(s, line)).collect::<R<Vec<_>>>()?;
                Obj::Algebra(Arc::new(sum_of(&parts)?))
            }
            Tensor { left, right } => {
                let (a, b) = (self.algebra(left, line)?, self.algebra(right, line)?);
                let a = a.refibered(Fibering::single("*", a.unit())).map_err(Error::from)?;
                let b = b.refibered(Fibering::single("*", b.unit())).map_err(Error::from)?;
                Obj::Algebra(Arc::new(diagonal_tensor(&a, &b)?))
            }

            GroupoidAction { groupoid, algebra, alpha } => {
                let g = self.group(groupoid, line)?;
                let a = self.algebra(algebra, line)?;
                let a = over_objects(&a, &FiniteGroupoid::from_group(&g))?;
                let gens = automorphisms(&g, &a, alpha)?;
                Obj::GroupoidAction(GroupoidAlgebraAction::from_group_generators(&g, a, &gens)?)
            }
            TrivialAction { groupoid, algebra } => {
                let k = self.groupoid(groupoid, line)?;
                let a = self.algebra(algebra, line)?;
                Obj::GroupoidAction(GroupoidAlgebraAction::trivial(k, a)?)
            }
            LeftTranslation { groupoid } => Obj::GroupoidAction(left_translation(&self.groupoid(groupoid, line)?)?),

            CmAction { cm, algebra, alpha, u } => {
                let cm = self.cm(cm, line)?;
                let (g, h) = match (cm.group(), cm.is_group_case()) {
                    (Some(g), true) => (g, cm.bundle().fiber(0).clone()),
                    _ => return Err(Fail::Bad("cm_action needs a crossed module of groups".into())),
                };
                let a = self.algebra(algebra, line)?;
                let a = over_objects(&a, cm.groupoid())?;
                let gens = automorphisms(&g, &a, alpha)?;
                let beta = GroupoidAlgebraAction::from_group_generators(&g, a.clone(), &gens)?;
                let mut ugens = Vec::new();
                for (label, v) in u {
                    ugens.push((h.resolve(label)?, vector(&a, v)?));
                }
                let us = extend(&h, &ugens, a.unit().clone(), |x, y| a.mul(x, y))?;
                let f = a.fiber(0);
                let us = us.iter().map(|v| f.coords(v)).collect();
                Obj::CmAction(crossmod::action::CMAction::new(cm, beta, vec![us])?)
            }
            CmTrivial { cm, algebra } => {
                let cm = self.cm(cm, line)?;
                let a = self.algebra(algebra, line)?;
                Obj::CmAction(crossmod::action::CMAction::trivial(&cm, a)?)
            }
            CmOnObjects { cm } => Obj::CmAction(crossmod::action::CMAction::on_objects(&self.cm(cm, line)?)?),
            Canonical { cm, beta } => {
                let cm = self.cm(cm, line)?;
                let beta = self.groupoid_action(beta, line)?;
                Obj::CmAction(canonical_action_on_bh(&cm, &beta)?.action)
            }
            Induced { cm } => Obj::CmAction(induced_algebra_action(&translation_action(&self.cm(cm, line)?)?)?),
            PontryaginCompose { h, fibers } => {
                let chars = CharacterGroup::new(&self.group(h, line)?)?;
                if fibers.len() != chars.len() {
                    return Err(Fail::Bad(format!("{} characters but {} fibers", chars.len(), fibers.len())));
                }
                let parts = fibers.iter().map(|s| self.algebra(s, line)).collect::<R<Vec<_>>>()?;
                let sum = sum_of(&parts)?;
                let projections = summand_units(&parts);
                let sum = sum
                    .refibered(Fibering {
                        labels: chars.labels(),
                        projections,
                    })
                    .map_err(Error::from)?;
                Obj::CmAction(pontryagin_compose(&Arc::new(sum), &chars)?)
            }

            Ideal { algebra, generators } => {
                let a = self.algebra(algebra, line)?;
                let gens = generators.iter().map(|v| vector(&a, v)).collect::<R<Vec<_>>>()?;
                let i = ideal_generated(&a, &gens);
                Obj::Ideal(a, i)
            }
            Linking { action, p } => {
                let act = self.cm_action(action, line)?;
                let p = vector(act.algebra(), p)?;
                Obj::Linking(Box::new(linking(&act, &p)?))
            }
        })
    }
}

fn resolve_all(g: &FiniteGroup, labels: &[String]) -> R<Vec<usize>> {
    let mut v = labels.iter().map(|l| g.resolve(l)).collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Extends values on generators to the whole group by `f(g·x) = f(g) ∘ f(x)`.
/// The result is only a homomorphism if the data is consistent; constructors
/// downstream check that.
fn extend<T: Clone>(g: &FiniteGroup, gens: &[(usize, T)], identity: T, compose: impl Fn(&T, &T) -> T) -> R<Vec<T>> {
    let mut vals: Vec<Option<T>> = vec![None; g.order()];
    vals[g.identity()] = Some(identity);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (s, v) in gens {
            let y = g.mul(*s, x);
            if vals[y].is_none() {
                vals[y] = Some(compose(v, vals[x].as_ref().expect("visited")));
                queue.push_back(y);
            }
        }
    }
    vals.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Fail::Bad(format!("{} is not generated by the given elements", g.label(i)))))
        .collect()
}

fn automorphisms(g: &FiniteGroup, a: &StarAlgebra, alpha: &BTreeMap<String, AutSpec>) -> R<Vec<(usize, Matrix)>> {
    let d = a.dim();
    let mut gens = vec![(g.identity(), Matrix::identity(d, d))];
    if alpha.is_empty() {
        // no `alpha` means G acts trivially
        gens.extend(g.elements().map(|x| (x, Matrix::identity(d, d))));
    }
    for (label, form) in alpha {
        let m = match form {
            AutSpec::Inner(v) => {
                let u = vector(a, v)?;
                a.left_matrix(&u) * a.right_matrix(&a.star(&u))
            }
            AutSpec::Permutation(perm) => {
                if perm.len() != d {
                    return Err(Fail::Bad(format!("permutation for {label} needs {d} entries")));
                }
                let mut m = Matrix::zeros(d, d);
                for (i, t) in perm.iter().enumerate() {
                    m[(basis_index(a, t)?, i)] = ONE;
                }
                m
            }
            AutSpec::Matrix(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Fail::Bad(format!("matrix for {label} must be {d}×{d}")));
                }
                Matrix::from_fn(d, d, |i, j| scalar(rows[i][j]))
            }
        };
        gens.push((g.resolve(label)?, m));
    }
    Ok(gens)
}

fn scalar(s: Scalar) -> C64 {
    match s {
        Scalar::Real(x) => C64::new(x, 0.0),
        Scalar::Complex([x, y]) => C64::new(x, y),
    }
}

fn basis_index(a: &StarAlgebra, token: &str) -> R<usize> {
    if let Some(i) = a.labels().iter().position(|l| l == token) {
        return Ok(i);
    }
    token
        .parse::<usize>()
        .ok()
        .filter(|&i| i < a.dim())
        .ok_or_else(|| Fail::Bad(format!("unknown basis element {token:?}")))
}

fn vector(a: &StarAlgebra, v: &VecSpec) -> R<Vector> {
    match v {
        VecSpec::Named(n) if n == "unit" => Ok(a.unit().clone()),
        VecSpec::Named(n) if n == "zero" => Ok(a.zero()),
        VecSpec::Named(n) => Ok(a.basis(basis_index(a, n)?)),
        VecSpec::Coords(c) => {
            if c.len() != a.dim() {
                return Err(Fail::Bad(format!("{} coordinates for dimension {}", c.len(), a.dim())));
            }
            Ok(Vector::from_iterator(a.dim(), c.iter().map(|&s| scalar(s))))
        }
        VecSpec::Sparse(m) => {
            let mut out = a.zero();
            for (k, s) in m {
                out[basis_index(a, k)?] += scalar(*s);
            }
            Ok(out)
        }
    }
}

fn summand_units(parts: &[Arc<StarAlgebra>]) -> Vec<Vector> {
    let total: usize = parts.iter().map(|p| p.dim()).sum();
    let mut off = 0;
    parts
        .iter()
        .map(|p| {
            let mut v = Vector::zeros(total);
            v.rows_mut(off, p.dim()).copy_from(p.unit());
            off += p.dim();
            v
        })
        .collect()
}

/// `⊕ parts`, one fiber per summand, labels made unique by prefixing the
/// summand index where needed.
fn sum_of(parts: &[Arc<StarAlgebra>]) -> R<StarAlgebra> {
    let Some(first) = parts.first() else {
        return Err(Fail::Bad("direct_sum needs at least one summand".into()));
    };
    let single = |a: &StarAlgebra, i: usize| a.refibered(Fibering::single(i.to_string(), a.unit()));
    let mut acc = single(first, 0).map_err(Error::from)?;
    for (i, p) in parts.iter().enumerate().skip(1) {
        acc = direct_sum(&acc, &single(p, i).map_err(Error::from)?)?;
    }
    let mut labels: Vec<String> = parts.iter().flat_map(|p| p.labels().to_vec()).collect();
    let unique = {
        let mut s = labels.clone();
        s.sort();
        s.dedup();
        s.len() == labels.len()
    };
    if !unique {
        labels = parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.labels().iter().map(move |l| format!("{}:{l}", i + 1)))
            .collect();
    }
    Ok(acc.relabeled(labels).map_err(Error::from)?)
}
