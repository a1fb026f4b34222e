//! Verbs. Each returns the dimensions, block multisets and sub-checks it
//! computed; library errors abort only the task that raised them.

use std::collections::BTreeMap;
use std::sync::Arc;

use crossmod::algebra::{wedderburn, StarAlgebra, StarHom};
use crossmod::crossed_product::{cm_cstar, cm_crossed_product, crossed_product, verify_exactness, verify_thm51, Check, Verification};
use crossmod::linalg::{max_abs, Matrix};
use crossmod::pontryagin::{pontryagin_compose, pontryagin_decompose};
use crossmod::{bimodule_check, translation_bridge, verify_morita, Error};

use crate::build::{Env, Obj};
use crate::scenario::{InputError, RawTask};

pub const VERBS: &[(&str, &[&str])] = &[
    ("check", &["name"]),
    ("product", &["action"]),
    ("cm_product", &["action"]),
    ("cstar", &["cm"]),
    ("blocks", &["algebra"]),
    ("verify_thm51", &["cm", "beta"]),
    ("verify_exactness", &["action", "ideal"]),
    ("verify_morita", &["linking"]),
    ("pontryagin", &["action"]),
    ("induced_action", &["cm"]),
];

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub dims: BTreeMap<String, usize>,
    pub blocks: BTreeMap<String, Vec<usize>>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn dim(&mut self, name: &str, d: usize) {
        self.dims.insert(name.into(), d);
    }

    fn blocks_of(&mut self, name: &str, a: &StarAlgebra) -> Result<(), Error> {
        self.blocks.insert(name.into(), wedderburn(a)?.blocks);
        Ok(())
    }

    fn absorb(&mut self, v: Verification) {
        self.dims.extend(v.dims);
        self.blocks.extend(v.blocks);
        self.checks.extend(v.checks);
    }
}

/// A task whose arguments resolved to declarations of the right kinds.
pub struct Bound<'a> {
    pub verb: &'a str,
    objs: BTreeMap<&'a str, &'a Obj>,
}

fn want<'a>(task: &RawTask, key: &str, obj: &'a Obj, ok: bool, kind: &str) -> Result<&'a Obj, InputError> {
    if ok {
        Ok(obj)
    } else {
        Err(InputError::parse(
            task.line,
            format!("{}: argument {key} is {}, expected {kind}", task.verb, obj.kind()),
        ))
    }
}

/// Checks the verb, its argument names and the kinds of the referenced
/// declarations.
pub fn bind<'a>(env: &'a Env, task: &'a RawTask) -> Result<Bound<'a>, InputError> {
    let Some((_, keys)) = VERBS.iter().find(|(v, _)| *v == task.verb) else {
        return Err(InputError::parse(task.line, format!("unknown verb {:?}", task.verb)));
    };
    for k in task.args.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(InputError::parse(task.line, format!("{}: unexpected argument {k:?}", task.verb)));
        }
    }
    let mut objs = BTreeMap::new();
    for &k in *keys {
        let Some(name) = task.args.get(k) else {
            return Err(InputError::parse(task.line, format!("{}: missing argument {k:?}", task.verb)));
        };
        let Some(obj) = env.lookup(name) else {
            return Err(InputError::parse(task.line, format!("unresolved reference {name:?}")));
        };
        let obj = match (task.verb.as_str(), k) {
            ("check", _) => obj,
            ("product", _) => want(task, k, obj, matches!(obj, Obj::GroupoidAction(_)), "a groupoid action")?,
            (_, "action") => want(task, k, obj, matches!(obj, Obj::CmAction(_)), "a crossed-module action")?,
            (_, "cm") => want(task, k, obj, matches!(obj, Obj::CrossedModule(_)), "a crossed module")?,
            (_, "algebra") => want(task, k, obj, matches!(obj, Obj::Algebra(_) | Obj::GroupoidAction(_) | Obj::CmAction(_)), "an algebra")?,
            (_, "beta") => want(task, k, obj, matches!(obj, Obj::GroupoidAction(_)), "a groupoid action")?,
            (_, "ideal") => want(task, k, obj, matches!(obj, Obj::Ideal(..)), "an ideal")?,
            (_, "linking") => want(task, k, obj, matches!(obj, Obj::Linking(_)), "linking data")?,
            _ => obj,
        };
        objs.insert(k, obj);
    }
    Ok(Bound { verb: &task.verb, objs })
}

fn algebra_of(o: &Obj) -> Arc<StarAlgebra> {
    match o {
        Obj::Algebra(a) => a.clone(),
        Obj::GroupoidAction(a) => a.algebra().clone(),
        Obj::CmAction(a) => a.algebra().clone(),
        _ => unreachable!("bound as an algebra"),
    }
}

pub fn run(task: &Bound) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    let o = |k: &str| task.objs[k];
    match task.verb {
        "check" => check(o("name"), &mut out)?,
        "product" => {
            let Obj::GroupoidAction(a) = o("action") else { unreachable!() };
            let cp = crossed_product(a)?;
            out.dim("dim", cp.dim());
            out.blocks_of("algebra", &cp.algebra)?;
        }
        "cm_product" | "cstar" => {
            let cp = match o(if task.verb == "cstar" { "cm" } else { "action" }) {
                Obj::CmAction(a) => cm_crossed_product(a)?,
                Obj::CrossedModule(cm) => cm_cstar(cm)?,
                _ => unreachable!(),
            };
            out.dim("dim", cp.dim());
            out.dim("domain", cp.rho_sigma.domain.dim());
            out.dim("target", cp.product().dim());
            out.dim("range", cp.range_dim);
            out.dim("ideal", cp.ideal.dim());
            out.dim("extra_rounds", cp.extra_rounds);
            out.blocks_of("algebra", cp.algebra())?;
        }
        "blocks" => {
            let a = algebra_of(o("algebra"));
            let w = wedderburn(&a)?;
            out.dim("dim", a.dim());
            out.dim("center", w.center_dim);
            out.blocks.insert("algebra".into(), w.blocks);
        }
        "verify_thm51" => {
            let (Obj::CrossedModule(cm), Obj::GroupoidAction(beta)) = (o("cm"), o("beta")) else { unreachable!() };
            out.absorb(verify_thm51(cm, beta)?);
        }
        "verify_exactness" => {
            let (Obj::CmAction(act), Obj::Ideal(a, ideal)) = (o("action"), o("ideal")) else { unreachable!() };
            if a.labels() != act.algebra().labels() || a.dim() != act.algebra().dim() {
                return Err(crossmod::action::ActionError::Shape("the ideal lives in a different algebra".into()).into());
            }
            out.absorb(verify_exactness(act, ideal)?);
        }
        "verify_morita" => {
            let Obj::Linking(link) = o("linking") else { unreachable!() };
            out.absorb(verify_morita(link)?);
            let w = bimodule_check(link)?;
            out.dim("bimodule", w.dim());
            for name in w.identities {
                out.checks.push(Check::new(&name, true, "holds on a basis"));
            }
        }
        "pontryagin" => {
            let Obj::CmAction(act) = o("action") else { unreachable!() };
            pontryagin(act, &mut out)?;
        }
        "induced_action" => {
            let Obj::CrossedModule(cm) = o("cm") else { unreachable!() };
            let m = translation_bridge(cm)?;
            out.dim("dim", m.source.algebra().dim());
            out.blocks_of("algebra", m.source.algebra())?;
            out.checks.push(Check::new(
                "intertwiner is equivariant",
                true,
                "δ_(h,g) ↦ δ_∂(h)g ⊗ δ_h is a *-isomorphism intertwining both actions",
            ));
        }
        _ => unreachable!("verbs are checked by bind"),
    }
    Ok(out)
}

fn check(obj: &Obj, out: &mut Outcome) -> Result<(), Error> {
    match obj {
        Obj::Group(g) => out.dim("order", g.order()),
        Obj::Groupoid(k) => {
            out.dim("objects", k.num_objects());
            out.dim("arrows", k.num_arrows());
        }
        Obj::CrossedModule(cm) => {
            out.dim("objects", cm.groupoid().num_objects());
            out.dim("arrows", cm.groupoid().num_arrows());
            out.dim("h", cm.bundle().total_order());
        }
        Obj::Algebra(a) => {
            out.dim("dim", a.dim());
            out.blocks_of("algebra", a)?;
        }
        Obj::GroupoidAction(a) => out.dim("dim", a.algebra().dim()),
        Obj::CmAction(a) => out.dim("dim", a.algebra().dim()),
        Obj::Ideal(_, i) => out.dim("dim", i.dim()),
        Obj::Linking(l) => {
            out.dim("corner_a", l.corner_p.dim());
            out.dim("corner_b", l.corner_q.dim());
        }
    }
    out.checks.push(Check::new("declaration is valid", true, "validated at load time"));
    Ok(())
}

/// Decomposition over `Ĥ`, the round trip back to `u`, and the crossed product
/// against the fiber at the trivial character.
fn pontryagin(act: &crossmod::action::CMAction, out: &mut Outcome) -> Result<(), Error> {
    let tol = crossmod::settings::current().tol_alg;
    let dec = pontryagin_decompose(act)?;
    for (xi, d) in dec.fiber_dims().into_iter().enumerate() {
        out.dim(&format!("fiber {}", dec.characters.label(xi)), d);
    }
    let back = pontryagin_compose(&dec.algebra, &dec.characters)?;
    let h = act.cm().bundle().fiber(0);
    let worst = h
        .elements()
        .map(|k| max_abs(&(back.u_full(0, k) - act.u_full(0, k))))
        .fold(0.0, f64::max);
    out.checks.push(Check::new("round trip", worst <= tol, format!("max |u' - u| = {worst:.1e}")));

    let cp = cm_crossed_product(act)?;
    let fiber = dec.algebra.fiber(dec.characters.trivial());
    out.dim("crossed", cp.dim());
    out.checks.push(Check::new(
        "dim A ⋊ (1, H) = dim of the trivial fiber",
        cp.dim() == fiber.dim(),
        format!("{} vs {}", cp.dim(), fiber.dim()),
    ));
    let mut lift = Matrix::zeros(act.algebra().dim(), fiber.dim());
    for i in 0..fiber.dim() {
        lift.set_column(i, &fiber.lift(&fiber.algebra.basis(i)));
    }
    let iso = StarHom::new(fiber.algebra.clone(), cp.algebra().clone(), cp.i_a.matrix() * lift);
    let (ok, detail) = match &iso {
        Ok(h) if h.is_isomorphism() => (true, "i_A restricted to the fiber is a *-isomorphism".to_string()),
        Ok(h) => (false, format!("rank {} of {}", h.rank(), cp.dim())),
        Err(e) => (false, e.to_string()),
    };
    out.checks.push(Check::new("trivial fiber ≅ A ⋊ (1, H)", ok, detail));
    out.blocks_of("crossed", cp.algebra())?;
    out.blocks_of("fiber", &fiber.algebra)?;
    Ok(())
}
