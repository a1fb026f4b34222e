//! Groupoid actions and crossed-module actions `(α, u)` on fibered algebras.
//!
//! An action of `G` on `A` assigns to each arrow `g` a *-isomorphism
//! `α_g: A_{src g} → A_{tgt g}` between fibers, stored as a matrix in fiber
//! coordinates. A crossed-module action adds unitaries `u_h ∈ A_x` for
//! `h ∈ H_x` with `α_{∂h} = Ad(u_h)` and `α_g(u_h) = u_{c_g h}`.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, Fibering, Ideal, StarAlgebra, StarHom};
use crate::crossed_module::{CrossedModule, CrossedModuleError};
use crate::group::FiniteGroup;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, kron, kron_vec, max_abs, Matrix, Vector, ONE};
use crate::settings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActionError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("α_{g} is not a *-isomorphism: {reason}")]
    NotStarIso { g: String, reason: String },
    #[error("α is not functorial: {0}")]
    NotFunctorial(String),
    #[error("u_{h} is not unitary")]
    NotUnitary { h: String },
    #[error("h ↦ u_h is not a homomorphism at ({a}, {b})")]
    UNotHomomorphism { a: String, b: String },
    #[error("α_∂(h)(a) != u_h a u_h* at h={h}, a={a}")]
    Covariance1Violation { h: String, a: String },
    #[error("α_g(u_h) != u_c_g(h) at g={g}, h={h}")]
    Covariance2Violation { g: String, h: String },
    #[error("not equivariant: {0}")]
    NotEquivariant(String),
    #[error("u_{h} is not central: fails to commute with {a}")]
    NotCentral { h: String, a: String },
    #[error("ideal is not invariant: {0}")]
    NotInvariant(String),
    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),
    #[error("b_group action expected: {0}")]
    NotBGroup(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    CrossedModule(#[from] CrossedModuleError),
}

/// `a` fibered over the objects of `g`. An algebra over a point is accepted
/// for a one-object groupoid and relabelled.
pub fn over_objects(a: &Arc<StarAlgebra>, g: &FiniteGroupoid) -> Result<Arc<StarAlgebra>, ActionError> {
    if a.fibering().labels == g.object_labels() {
        return Ok(a.clone());
    }
    if g.num_objects() == 1 {
        let f = Fibering::single(g.object_label(0), a.unit());
        return Ok(Arc::new(a.refibered(f)?));
    }
    Err(ActionError::FiberMismatch(format!(
        "algebra fibered over {:?}, groupoid objects {:?}",
        a.fibering().labels,
        g.object_labels()
    )))
}

fn close(a: &Vector, b: &Vector) -> bool {
    max_abs(&(a - b)) <= settings::current().tol_alg
}

#[derive(Clone, Debug)]
pub struct GroupoidAlgebraAction {
    groupoid: FiniteGroupoid,
    algebra: Arc<StarAlgebra>,
    alpha: Vec<Matrix>,
}

impl GroupoidAlgebraAction {
    pub fn new(groupoid: FiniteGroupoid, algebra: Arc<StarAlgebra>, alpha: Vec<Matrix>) -> Result<Self, ActionError> {
        let algebra = over_objects(&algebra, &groupoid)?;
        let act = GroupoidAlgebraAction {
            groupoid,
            algebra,
            alpha,
        };
        act.validate()?;
        Ok(act)
    }

    /// `α_g` given on fiber coordinates by a closure.
    pub fn from_fn(
        groupoid: FiniteGroupoid,
        algebra: Arc<StarAlgebra>,
        alpha: impl Fn(usize) -> Matrix,
    ) -> Result<Self, ActionError> {
        let mats = groupoid.arrows().map(alpha).collect();
        Self::new(groupoid, algebra, mats)
    }

    /// Identity matrices on every arrow (fibers must have equal dimensions).
    pub fn trivial(groupoid: FiniteGroupoid, algebra: Arc<StarAlgebra>) -> Result<Self, ActionError> {
        let algebra = over_objects(&algebra, &groupoid)?;
        let mats = groupoid
            .arrows()
            .map(|g| {
                let (s, t) = (algebra.fiber(groupoid.src(g)).dim(), algebra.fiber(groupoid.tgt(g)).dim());
                Matrix::identity(t, s)
            })
            .collect();
        Self::new(groupoid, algebra, mats)
    }

    /// Group case: `α` given on generators and extended multiplicatively.
    pub fn from_group_generators(
        group: &FiniteGroup,
        algebra: Arc<StarAlgebra>,
        generators: &[(usize, Matrix)],
    ) -> Result<Self, ActionError> {
        let d = algebra.dim();
        let mut mats: Vec<Option<Matrix>> = vec![None; group.order()];
        mats[group.identity()] = Some(Matrix::identity(d, d));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            for (g, m) in generators {
                if m.nrows() != d || m.ncols() != d {
                    return Err(ActionError::Shape(format!("generator {} needs a {d}×{d} matrix", group.label(*g))));
                }
                let y = group.mul(*g, x);
                if mats[y].is_none() {
                    mats[y] = Some(m * mats[x].as_ref().unwrap());
                    queue.push_back(y);
                }
            }
        }
        let mats = mats
            .into_iter()
            .enumerate()
            .map(|(g, m)| m.ok_or_else(|| ActionError::Shape(format!("{} is not generated", group.label(g)))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(FiniteGroupoid::from_group(group), algebra, mats)
    }

    /// Group case: `α_g = Ad(U_g)` for unitaries `U_g` of `A`.
    pub fn inner(group: &FiniteGroup, algebra: Arc<StarAlgebra>, unitaries: &[Vector]) -> Result<Self, ActionError> {
        if unitaries.len() != group.order() {
            return Err(ActionError::Shape("one unitary per group element".into()));
        }
        let mats = unitaries
            .iter()
            .map(|u| algebra.left_matrix(u) * algebra.right_matrix(&algebra.star(u)))
            .collect();
        Self::new(FiniteGroupoid::from_group(group), algebra, mats)
    }

    /// A group permuting points, acting on `C(points)` over a single object by
    /// `α_g(δ_p) = δ_{g·p}`.
    pub fn on_functions(group: &FiniteGroup, points: &[String], act: impl Fn(usize, usize) -> usize) -> Result<Self, ActionError> {
        let algebra = Arc::new(crate::algebra::functions_on(points));
        let n = points.len();
        let mats = group
            .elements()
            .map(|g| {
                let mut m = Matrix::zeros(n, n);
                for p in 0..n {
                    let q = act(g, p);
                    if q < n {
                        m[(q, p)] = ONE;
                    }
                }
                m
            })
            .collect();
        Self::new(FiniteGroupoid::from_group(group), algebra, mats)
    }

    fn validate(&self) -> Result<(), ActionError> {
        let (g, a) = (&self.groupoid, &self.algebra);
        if self.alpha.len() != g.num_arrows() {
            return Err(ActionError::Shape("one matrix per arrow".into()));
        }
        for k in g.arrows() {
            let (fs, ft) = (a.fiber(g.src(k)), a.fiber(g.tgt(k)));
            let m = &self.alpha[k];
            let name = || g.arrow_label(k).to_string();
            if m.nrows() != ft.dim() || m.ncols() != fs.dim() {
                return Err(ActionError::NotStarIso {
                    g: name(),
                    reason: format!("expected a {}×{} matrix", ft.dim(), fs.dim()),
                });
            }
            let (s, t) = (&fs.algebra, &ft.algebra);
            if !close(&(m * s.unit()), t.unit()) {
                return Err(ActionError::NotStarIso {
                    g: name(),
                    reason: "not unital".into(),
                });
            }
            for i in 0..s.dim() {
                let ai = m.column(i).into_owned();
                if !close(&(m * s.star(&s.basis(i))), &t.star(&ai)) {
                    return Err(ActionError::NotStarIso {
                        g: name(),
                        reason: format!("does not preserve the star of {}", s.label(i)),
                    });
                }
                for j in 0..s.dim() {
                    let aj = m.column(j).into_owned();
                    if !close(&(m * s.basis_product(i, j)), &t.mul(&ai, &aj)) {
                        return Err(ActionError::NotStarIso {
                            g: name(),
                            reason: format!("not multiplicative on ({}, {})", s.label(i), s.label(j)),
                        });
                    }
                }
            }
        }
        let tol = settings::current().tol_alg;
        for x in g.objects() {
            let m = &self.alpha[g.unit(x)];
            if linalg::max_abs_matrix(&(m - Matrix::identity(m.nrows(), m.ncols()))) > tol {
                return Err(ActionError::NotFunctorial(format!(
                    "α at the unit of {} is not the identity",
                    g.object_label(x)
                )));
            }
        }
        for k in g.arrows() {
            for l in g.arrows().filter(|&l| g.composable(k, l)) {
                let kl = g.comp(k, l);
                if linalg::max_abs_matrix(&(&self.alpha[kl] - &self.alpha[k] * &self.alpha[l])) > tol {
                    return Err(ActionError::NotFunctorial(format!(
                        "α_({}{}) != α_{}α_{}",
                        g.arrow_label(k),
                        g.arrow_label(l),
                        g.arrow_label(k),
                        g.arrow_label(l)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        &self.algebra
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.alpha[g]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.alpha
    }

    /// `α_g` on fiber coordinates.
    pub fn apply(&self, g: usize, a: &Vector) -> Vector {
        &self.alpha[g] * a
    }

    /// `α_g(p_{src g} a)` in full coordinates of `A`.
    pub fn apply_full(&self, g: usize, a: &Vector) -> Vector {
        let alg = &self.algebra;
        let (fs, ft) = (alg.fiber(self.groupoid.src(g)), alg.fiber(self.groupoid.tgt(g)));
        ft.lift(&self.apply(g, &fs.restrict(alg, a)))
    }
}

/// An action `(α, u)` of a crossed module.
#[derive(Clone, Debug)]
pub struct CMAction {
    cm: CrossedModule,
    alpha: GroupoidAlgebraAction,
    u: Vec<Vec<Vector>>,
}

impl CMAction {
    /// `u[x][h]` is `u_h` in fiber coordinates of `A_x`.
    pub fn new(cm: CrossedModule, alpha: GroupoidAlgebraAction, u: Vec<Vec<Vector>>) -> Result<Self, ActionError> {
        if alpha.groupoid() != cm.groupoid() {
            return Err(ActionError::Shape("α acts by a different groupoid".into()));
        }
        let act = CMAction { cm, alpha, u };
        act.validate()?;
        Ok(act)
    }

    /// `α` given per arrow and `u` per fiber element, validated.
    pub fn from_parts(
        cm: &CrossedModule,
        algebra: Arc<StarAlgebra>,
        alpha: Vec<Matrix>,
        u: Vec<Vec<Vector>>,
    ) -> Result<Self, ActionError> {
        let alpha = GroupoidAlgebraAction::new(cm.groupoid().clone(), algebra, alpha)?;
        Self::new(cm.clone(), alpha, u)
    }

    /// `α = β` and `u ≡ 1`.
    pub fn with_trivial_u(cm: &CrossedModule, beta: GroupoidAlgebraAction) -> Result<Self, ActionError> {
        let u = cm
            .groupoid()
            .objects()
            .map(|x| vec![beta.algebra().fiber(x).algebra.unit().clone(); cm.bundle().fiber(x).order()])
            .collect();
        Self::new(cm.clone(), beta, u)
    }

    /// Identity `α` and `u ≡ 1`.
    pub fn trivial(cm: &CrossedModule, algebra: Arc<StarAlgebra>) -> Result<Self, ActionError> {
        let beta = GroupoidAlgebraAction::trivial(cm.groupoid().clone(), algebra)?;
        Self::with_trivial_u(cm, beta)
    }

    /// `G` acting on `C0(X)` by the action on its objects, `u ≡ 1`.
    pub fn on_objects(cm: &CrossedModule) -> Result<Self, ActionError> {
        let x = Arc::new(crate::algebra::functions_on(cm.groupoid().object_labels()));
        Self::trivial(cm, x)
    }

    /// Green's twisted systems: `(G, N)` with `N` normal, `α` on all of `G` and
    /// `u` on the elements of `N` (listed in increasing order).
    pub fn green(
        group: &FiniteGroup,
        normal: &[usize],
        algebra: Arc<StarAlgebra>,
        alpha: Vec<Matrix>,
        u: Vec<Vector>,
    ) -> Result<Self, ActionError> {
        let cm = CrossedModule::from_normal_subgroup(group, normal)?;
        Self::from_parts(&cm, algebra, alpha, vec![u])
    }

    fn validate(&self) -> Result<(), ActionError> {
        let (cm, a) = (&self.cm, self.alpha.algebra());
        let g = cm.groupoid();
        if self.u.len() != g.num_objects() {
            return Err(ActionError::Shape("u needs one family per object".into()));
        }
        for x in g.objects() {
            let hx = cm.bundle().fiber(x);
            let fx = &a.fiber(x).algebra;
            if self.u[x].len() != hx.order() || self.u[x].iter().any(|v| v.len() != fx.dim()) {
                return Err(ActionError::Shape(format!("u over {} has the wrong shape", g.object_label(x))));
            }
            for h in hx.elements() {
                if !fx.is_unitary(&self.u[x][h], fx.unit()) {
                    return Err(ActionError::NotUnitary { h: hx.label(h).into() });
                }
            }
            for h in hx.elements() {
                for k in hx.elements() {
                    if !close(&self.u[x][hx.mul(h, k)], &fx.mul(&self.u[x][h], &self.u[x][k])) {
                        return Err(ActionError::UNotHomomorphism {
                            a: hx.label(h).into(),
                            b: hx.label(k).into(),
                        });
                    }
                }
            }
            for h in hx.elements() {
                let uh = &self.u[x][h];
                let uh_star = fx.star(uh);
                let dh = cm.d(x, h);
                for i in 0..fx.dim() {
                    let lhs = self.alpha.apply(dh, &fx.basis(i));
                    let rhs = fx.mul(&fx.mul(uh, &fx.basis(i)), &uh_star);
                    if !close(&lhs, &rhs) {
                        return Err(ActionError::Covariance1Violation {
                            h: hx.label(h).into(),
                            a: fx.label(i).into(),
                        });
                    }
                }
            }
        }
        for k in g.arrows() {
            let (s, t) = (g.src(k), g.tgt(k));
            for h in cm.bundle().fiber(s).elements() {
                if !close(&self.alpha.apply(k, &self.u[s][h]), &self.u[t][cm.c(k, h)]) {
                    return Err(ActionError::Covariance2Violation {
                        g: g.arrow_label(k).into(),
                        h: cm.bundle().fiber(s).label(h).into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn cm(&self) -> &CrossedModule {
        &self.cm
    }

    pub fn alpha(&self) -> &GroupoidAlgebraAction {
        &self.alpha
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        self.alpha.algebra()
    }

    /// `u_h` for `h ∈ H_x`, fiber coordinates.
    pub fn u(&self, x: usize, h: usize) -> &Vector {
        &self.u[x][h]
    }

    pub fn u_family(&self) -> &[Vec<Vector>] {
        &self.u
    }

    /// `u_h` in full coordinates of `A`.
    pub fn u_full(&self, x: usize, h: usize) -> Vector {
        self.algebra().fiber(x).lift(&self.u[x][h])
    }

    pub fn has_trivial_u(&self) -> bool {
        let a = self.algebra();
        (0..self.u.len()).all(|x| self.u[x].iter().all(|v| close(v, a.fiber(x).algebra.unit())))
    }

    /// Moves the action to `target` along `phi: A → C` and `psi: C → A`
    /// (full coordinates): `α^C_g = φ α_g ψ` and `u^C_h = φ(ψ(1)·u_h)`.
    pub fn transport(&self, target: Arc<StarAlgebra>, phi: &Matrix, psi: &Matrix) -> Result<CMAction, ActionError> {
        let g = self.cm.groupoid();
        let target = over_objects(&target, g)?;
        let a = self.algebra();
        let alpha = g
            .arrows()
            .map(|k| {
                let (fs, ft) = (target.fiber(g.src(k)), target.fiber(g.tgt(k)));
                let mut m = Matrix::zeros(ft.dim(), fs.dim());
                for i in 0..fs.dim() {
                    let c = fs.lift(&fs.algebra.basis(i));
                    let image = phi * self.alpha.apply_full(k, &(psi * c));
                    m.set_column(i, &ft.coords(&image));
                }
                m
            })
            .collect();
        let one = psi * target.unit();
        let u = g
            .objects()
            .map(|x| {
                let ft = target.fiber(x);
                (0..self.cm.bundle().fiber(x).order())
                    .map(|h| ft.coords(&(phi * a.mul(&one, &self.u_full(x, h)))))
                    .collect()
            })
            .collect();
        CMAction::from_parts(&self.cm, target, alpha, u)
    }
}

/// A *-homomorphism intertwining two actions of the same crossed module.
#[derive(Clone, Debug)]
pub struct EquivariantMap {
    pub source: CMAction,
    pub target: CMAction,
    pub hom: StarHom,
}

/// Checks `π(α_g a) = β_g π(a)` and `π(u_h a) = v_h π(a)` on all basis
/// elements and all `g`, `h`.
pub fn equivariant_map(source: &CMAction, target: &CMAction, hom: StarHom) -> Result<EquivariantMap, ActionError> {
    if source.cm() != target.cm() {
        return Err(ActionError::Shape("actions of different crossed modules".into()));
    }
    let (a, b) = (source.algebra(), target.algebra());
    if hom.source().dim() != a.dim() || hom.target().dim() != b.dim() {
        return Err(ActionError::Shape("hom does not connect the two algebras".into()));
    }
    let cm = source.cm();
    let g = cm.groupoid();
    for k in g.arrows() {
        for i in 0..a.dim() {
            let e = a.basis(i);
            let lhs = hom.apply(&source.alpha().apply_full(k, &e));
            let rhs = target.alpha().apply_full(k, &hom.apply(&e));
            if !close(&lhs, &rhs) {
                return Err(ActionError::NotEquivariant(format!(
                    "π∘α_{} != β_{}∘π on {}",
                    g.arrow_label(k),
                    g.arrow_label(k),
                    a.label(i)
                )));
            }
        }
    }
    for x in g.objects() {
        let hx = cm.bundle().fiber(x);
        for h in hx.elements() {
            let (uh, vh) = (source.u_full(x, h), target.u_full(x, h));
            for i in 0..a.dim() {
                let e = a.basis(i);
                let lhs = hom.apply(&a.mul(&uh, &e));
                let rhs = b.mul(&vh, &hom.apply(&e));
                if !close(&lhs, &rhs) {
                    return Err(ActionError::NotEquivariant(format!(
                        "π(u_{} a) != v_{} π(a) at a={}",
                        hx.label(h),
                        hx.label(h),
                        a.label(i)
                    )));
                }
            }
        }
    }
    Ok(EquivariantMap {
        source: source.clone(),
        target: target.clone(),
        hom,
    })
}

/// The extension `0 → I → A → A/I → 0` of actions.
#[derive(Clone, Debug)]
pub struct ActionExtension {
    pub ideal: Ideal,
    /// `None` for the zero ideal.
    pub ideal_action: Option<CMAction>,
    pub inclusion: Option<StarHom>,
    pub quotient_action: CMAction,
    pub projection: StarHom,
}

pub fn check_invariant(act: &CMAction, ideal: &Ideal) -> Result<(), ActionError> {
    let g = act.cm().groupoid();
    for v in ideal.vectors() {
        for k in g.arrows() {
            if !ideal.contains(&act.alpha().apply_full(k, &v)) {
                return Err(ActionError::NotInvariant(format!("α_{} moves the ideal", g.arrow_label(k))));
            }
        }
    }
    Ok(())
}

/// Induced actions on an invariant ideal and on the quotient.
pub fn restrict_and_quotient(act: &CMAction, ideal: &Ideal) -> Result<ActionExtension, ActionError> {
    check_invariant(act, ideal)?;
    let a = act.algebra();
    let (ideal_action, inclusion) = if ideal.is_zero() {
        (None, None)
    } else {
        let (sub, incl) = ideal.as_algebra(a)?;
        let basis = ideal.basis();
        let ia = act.transport(sub, &basis.adjoint(), basis)?;
        (Some(ia), Some(incl))
    };
    let q = crate::algebra::quotient_algebra(a, ideal)?;
    let qa = act.transport(q.algebra.clone(), q.projection.matrix(), &q.complement)?;
    Ok(ActionExtension {
        ideal: ideal.clone(),
        ideal_action,
        inclusion,
        quotient_action: qa,
        projection: q.projection,
    })
}

/// `(α ⊗ β, u ⊗ v)` on `A ⊗_X B`.
pub fn diagonal_action(first: &CMAction, second: &CMAction) -> Result<CMAction, ActionError> {
    if first.cm() != second.cm() {
        return Err(ActionError::Shape("actions of different crossed modules".into()));
    }
    let cm = first.cm();
    let g = cm.groupoid();
    let t = Arc::new(crate::algebra::diagonal_tensor(first.algebra(), second.algebra()).map_err(|e| match e {
        AlgebraError::FiberMismatch(m) => ActionError::FiberMismatch(m),
        other => ActionError::Algebra(other),
    })?);
    let alpha = g
        .arrows()
        .map(|k| kron(first.alpha().matrix(k), second.alpha().matrix(k)))
        .collect();
    let u = g
        .objects()
        .map(|x| {
            cm.bundle()
                .fiber(x)
                .elements()
                .map(|h| kron_vec(first.u(x, h), second.u(x, h)))
                .collect()
        })
        .collect();
    CMAction::from_parts(cm, t, alpha, u)
}
