//! Crossed products `A ⋊ G` by groupoid actions, the pair `ρ*, σ*`, the
//! coequalizer `A ⋊ (G, H)`, covariant representations, and the checks that
//! compare iterated and coequalizer crossed products.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{restrict_and_quotient, ActionError, CMAction, GroupoidAlgebraAction};
use crate::algebra::{
    groupoid_algebra, ideal_closure, orbit_fibering, quotient_algebra, wedderburn, AlgebraError, ConvolutionLayout,
    Ideal, Quotient, StarAlgebra, StarHom,
};
use crate::crossed_module::{CrossedModule, PairIndex};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, max_abs, Matrix, Span, Vector, ONE};
use crate::settings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrossedProductError {
    #[error("not covariant: {0}")]
    NotCovariant(String),
    #[error("V_∂({h}) != π(u_{h})")]
    TwistViolation { h: String },
    #[error("ρ*/σ* homomorphism check failed: {0}")]
    HomomorphismCheckFailed(String),
    #[error("range of ρ*-σ* has dimension {range_dim} but generates an ideal of dimension {ideal_dim}")]
    RangeNotIdeal { range_dim: usize, ideal_dim: usize },
    #[error("induced map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

type Result<T> = std::result::Result<T, CrossedProductError>;

/// `A ⋊ G` with basis `a_i ⊗ δ_g`, `a_i` running over the fiber basis of
/// `A_{tgt g}`; arrows in order, fiber basis fastest.
#[derive(Clone, Debug)]
pub struct CrossedProduct {
    pub algebra: Arc<StarAlgebra>,
    pub i_a: StarHom,
    pub i_g: StarHom,
    pub action: GroupoidAlgebraAction,
    offsets: Vec<usize>,
}

impl CrossedProduct {
    pub fn index(&self, g: usize, i: usize) -> usize {
        self.offsets[g] + i
    }

    pub fn offset(&self, g: usize) -> usize {
        self.offsets[g]
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// `a ⊗ δ_g` for `a` in fiber coordinates of `A_{tgt g}`.
    pub fn element(&self, g: usize, a: &Vector) -> Vector {
        let mut v = self.algebra.zero();
        v.rows_mut(self.offsets[g], a.len()).copy_from(a);
        v
    }

    /// The coefficient of `δ_g` in `f`, in fiber coordinates.
    pub fn component(&self, f: &Vector, g: usize) -> Vector {
        let n = self.fiber_dim(g);
        f.rows(self.offsets[g], n).into_owned()
    }

    fn fiber_dim(&self, g: usize) -> usize {
        let gp = self.action.groupoid();
        self.action.algebra().fiber(gp.tgt(g)).dim()
    }

    /// `i_G(δ_g) i_A(a) i_G(δ_g)* = i_A(α_g(a))` for the basis of every
    /// `A_{src g}`.
    pub fn check_covariance(&self) -> Result<()> {
        let (gp, a) = (self.action.groupoid(), self.action.algebra());
        let c = &self.algebra;
        let tol = settings::current().tol_alg;
        for g in gp.arrows() {
            let dg = self.i_g.apply(&basis(gp.num_arrows(), g));
            let dg_star = c.star(&dg);
            let fs = a.fiber(gp.src(g));
            for i in 0..fs.dim() {
                let ai = fs.lift(&fs.algebra.basis(i));
                let lhs = c.mul(&c.mul(&dg, &self.i_a.apply(&ai)), &dg_star);
                let rhs = self.i_a.apply(&self.action.apply_full(g, &ai));
                if max_abs(&(lhs - rhs)) > tol {
                    return Err(CrossedProductError::NotCovariant(format!(
                        "at g={}, a={}",
                        gp.arrow_label(g),
                        fs.algebra.label(i)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn basis(n: usize, i: usize) -> Vector {
    linalg::basis_vector(n, i)
}

/// `(a⊗δ_g)(b⊗δ_g') = a·α_g(b) ⊗ δ_gg'` when composable, else 0, and
/// `(a⊗δ_g)* = α_g⁻¹(a*) ⊗ δ_g⁻¹`.
pub fn crossed_product(act: &GroupoidAlgebraAction) -> Result<CrossedProduct> {
    let gp = act.groupoid();
    let a = act.algebra();
    let fibers = a.fibers();
    let fd = |g: usize| fibers[gp.tgt(g)].dim();
    let mut offsets = Vec::with_capacity(gp.num_arrows());
    let mut owner = Vec::new();
    let mut labels = Vec::new();
    for g in gp.arrows() {
        offsets.push(owner.len());
        let f = &fibers[gp.tgt(g)].algebra;
        for i in 0..f.dim() {
            owner.push((g, i));
            labels.push(format!("{}⊗δ{}", f.label(i), gp.arrow_label(g)));
        }
    }
    let dim = owner.len();
    let limit = settings::current().max_dim;
    if dim > limit {
        return Err(AlgebraError::SizeLimit { dim, limit }.into());
    }
    let mut table = Vec::with_capacity(dim * dim);
    for &(g, i) in &owner {
        let f = &fibers[gp.tgt(g)].algebra;
        let ei = f.basis(i);
        for &(l, j) in &owner {
            if !gp.composable(g, l) {
                table.push(vec![]);
                continue;
            }
            let b = act.matrix(g).column(j).into_owned();
            let prod = f.mul(&ei, &b);
            let off = offsets[gp.comp(g, l)];
            table.push(
                prod.iter()
                    .enumerate()
                    .filter(|(_, z)| z.norm() > 1e-14)
                    .map(|(r, z)| (off + r, *z))
                    .collect(),
            );
        }
    }
    let mut star = Matrix::zeros(dim, dim);
    for (p, &(g, i)) in owner.iter().enumerate() {
        let f = &fibers[gp.tgt(g)].algebra;
        let gi = gp.inv(g);
        let img = act.matrix(gi) * f.star(&f.basis(i));
        star.view_mut((offsets[gi], p), (img.len(), 1)).copy_from(&img);
    }
    let block_unit = |x: usize| {
        let mut v = Vector::zeros(dim);
        let u = fibers[x].algebra.unit();
        v.rows_mut(offsets[gp.unit(x)], u.len()).copy_from(u);
        v
    };
    let mut unit = Vector::zeros(dim);
    for x in gp.objects() {
        unit += block_unit(x);
    }
    let fibering = orbit_fibering(gp, block_unit);
    let layout = ConvolutionLayout {
        coefficient: a.clone(),
        num_objects: gp.num_objects(),
        src: gp.arrows().map(|g| gp.src(g)).collect(),
        tgt: gp.arrows().map(|g| gp.tgt(g)).collect(),
        slots: gp
            .arrows()
            .map(|g| {
                let f = &fibers[gp.tgt(g)];
                (0..fd(g)).map(|i| (offsets[g] + i, f.lift(&f.algebra.basis(i)))).collect()
            })
            .collect(),
    };
    let algebra = Arc::new(StarAlgebra::new(labels, table, star, unit, fibering)?.with_layout(layout));

    let mut ia = Matrix::zeros(dim, a.dim());
    for j in 0..a.dim() {
        let e = a.basis(j);
        for x in gp.objects() {
            let c = fibers[x].restrict(a, &e);
            ia.view_mut((offsets[gp.unit(x)], j), (c.len(), 1)).copy_from(&c);
        }
    }
    let i_a = StarHom::new(a.clone(), algebra.clone(), ia)?;
    let cg = Arc::new(groupoid_algebra(gp));
    let mut ig = Matrix::zeros(dim, gp.num_arrows());
    for g in gp.arrows() {
        let u = fibers[gp.tgt(g)].algebra.unit();
        ig.view_mut((offsets[g], g), (u.len(), 1)).copy_from(u);
    }
    let i_g = StarHom::new(cg, algebra.clone(), ig)?;
    Ok(CrossedProduct {
        algebra,
        i_a,
        i_g,
        action: act.clone(),
        offsets,
    })
}

/// The crossed product by a group bundle acting fiberwise; `alpha(x, h)` is
/// the matrix of `α_h` on `A_x`.
pub fn bundle_crossed_product(
    bundle: &crate::groupoid::GroupBundle,
    algebra: Arc<StarAlgebra>,
    alpha: impl Fn(usize, usize) -> Matrix,
) -> Result<CrossedProduct> {
    let k = bundle.as_groupoid();
    let act = GroupoidAlgebraAction::from_fn(k, algebra, |f| {
        let (x, h) = bundle.unflatten(f);
        alpha(x, h)
    })?;
    crossed_product(&act)
}

/// The canonical action of `(G, H, ∂, c)` on `B ⋊ H`, with the crossed product
/// it lives on.
#[derive(Clone, Debug)]
pub struct CanonicalAction {
    pub action: CMAction,
    /// `B ⋊ H`; `i_a` is `i_B` and `i_g` is `i_H` (on the bundle groupoid).
    pub bh: CrossedProduct,
}

/// `α_g(b⊗δ_h) = β_g(b) ⊗ δ_{c_g h}` and `u_h = 1⊗δ_h`.
pub fn canonical_action_on_bh(cm: &CrossedModule, beta: &GroupoidAlgebraAction) -> Result<CanonicalAction> {
    let gp = cm.groupoid();
    if beta.groupoid() != gp {
        return Err(ActionError::Shape("β acts by a different groupoid".into()).into());
    }
    let bundle = cm.bundle();
    let bh = bundle_crossed_product(bundle, beta.algebra().clone(), |x, h| beta.matrix(cm.d(x, h)).clone())?;
    let alg = bh.algebra.clone();
    let b = beta.algebra();
    let alpha: Vec<Matrix> = gp
        .arrows()
        .map(|g| {
            let (s, t) = (gp.src(g), gp.tgt(g));
            let (fs, ft) = (alg.fiber(s), alg.fiber(t));
            let mut m = Matrix::zeros(ft.dim(), fs.dim());
            for k in 0..fs.dim() {
                let w = fs.lift(&fs.algebra.basis(k));
                let mut img = alg.zero();
                for h in bundle.fiber(s).elements() {
                    let bcoef = bh.component(&w, bundle.flat_index(s, h));
                    let moved = beta.apply(g, &bcoef);
                    let dst = bundle.flat_index(t, cm.c(g, h));
                    img += bh.element(dst, &moved);
                }
                m.set_column(k, &ft.coords(&img));
            }
            m
        })
        .collect();
    let u = gp
        .objects()
        .map(|x| {
            let f = alg.fiber(x);
            let one = b.fiber(x).algebra.unit();
            bundle
                .fiber(x)
                .elements()
                .map(|h| f.coords(&bh.element(bundle.flat_index(x, h), one)))
                .collect()
        })
        .collect();
    let action = CMAction::from_parts(cm, alg, alpha, u)?;
    Ok(CanonicalAction { action, bh })
}

/// `ᾱ_(h,g) = α_{∂(h)g}` on `A`, an action of `H ⋊_c G`.
pub fn pulled_back_action(
    cm: &CrossedModule,
    alpha: &GroupoidAlgebraAction,
) -> Result<(GroupoidAlgebraAction, PairIndex)> {
    let (hg, idx) = cm.transformation_groupoid();
    let gp = cm.groupoid();
    let mats = idx
        .pairs
        .iter()
        .map(|&(h, g)| alpha.matrix(gp.comp(cm.d(gp.tgt(g), h), g)).clone())
        .collect();
    Ok((GroupoidAlgebraAction::new(hg, alpha.algebra().clone(), mats)?, idx))
}

/// `χ*: A ⋊ (H⋊G) → A ⋊ G`, `a⊗δ_(h,g) ↦ a⊗δ_{∂(h)g}`, given both crossed
/// products.
fn chi_matrix(cm: &CrossedModule, domain: &CrossedProduct, target: &CrossedProduct, idx: &PairIndex) -> Matrix {
    let gp = cm.groupoid();
    let mut m = Matrix::zeros(target.dim(), domain.dim());
    for (p, &(h, g)) in idx.pairs.iter().enumerate() {
        let dg = gp.comp(cm.d(gp.tgt(g), h), g);
        for i in 0..domain.fiber_dim(p) {
            m[(target.index(dg, i), domain.index(p, i))] = ONE;
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct RhoSigma {
    /// `A ⋊_ᾱ (H ⋊_c G)`.
    pub domain: CrossedProduct,
    /// `A ⋊_α G`.
    pub target: CrossedProduct,
    pub index: PairIndex,
    pub rho_star: StarHom,
    pub sigma_star: StarHom,
}

impl RhoSigma {
    pub fn difference(&self) -> Matrix {
        self.rho_star.matrix() - self.sigma_star.matrix()
    }
}

/// `ρ*(a⊗δ_(h,g)) = a⊗δ_{∂(h)g}` and `σ*(a⊗δ_(h,g)) = a·u_h ⊗ δ_g`.
pub fn rho_sigma(act: &CMAction) -> Result<RhoSigma> {
    let cm = act.cm();
    let gp = cm.groupoid();
    let target = crossed_product(act.alpha())?;
    let (bar, idx) = pulled_back_action(cm, act.alpha())?;
    let domain = crossed_product(&bar)?;
    let rho = chi_matrix(cm, &domain, &target, &idx);
    let a = act.algebra();
    let mut sigma = Matrix::zeros(target.dim(), domain.dim());
    for (p, &(h, g)) in idx.pairs.iter().enumerate() {
        let f = &a.fiber(gp.tgt(g)).algebra;
        let uh = act.u(gp.tgt(g), h);
        for i in 0..f.dim() {
            let img = f.mul(&f.basis(i), uh);
            let col = domain.index(p, i);
            sigma.view_mut((target.offset(g), col), (img.len(), 1)).copy_from(&img);
        }
    }
    let wrap = |m: Matrix, name: &str| {
        StarHom::new(domain.algebra.clone(), target.algebra.clone(), m)
            .map_err(|e| CrossedProductError::HomomorphismCheckFailed(format!("{name}: {e}")))
    };
    let rho_star = wrap(rho, "ρ*")?;
    let sigma_star = wrap(sigma, "σ*")?;
    Ok(RhoSigma {
        domain,
        target,
        index: idx,
        rho_star,
        sigma_star,
    })
}

/// `A ⋊ (G, H)`: the quotient of `A ⋊ G` by the ideal `I_H` spanned by the
/// range of `ρ* - σ*`.
#[derive(Clone, Debug)]
pub struct CMCrossedProduct {
    pub action: CMAction,
    pub rho_sigma: RhoSigma,
    pub range_dim: usize,
    pub ideal: Ideal,
    pub extra_rounds: usize,
    pub quotient: Quotient,
    /// `A → A ⋊ (G, H)`.
    pub i_a: StarHom,
    /// `C*(G) → A ⋊ (G, H)`.
    pub i_g: StarHom,
}

impl CMCrossedProduct {
    pub fn product(&self) -> &CrossedProduct {
        &self.rho_sigma.target
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        &self.quotient.algebra
    }

    pub fn projection(&self) -> &StarHom {
        &self.quotient.projection
    }

    pub fn dim(&self) -> usize {
        self.quotient.algebra.dim()
    }
}

pub fn cm_crossed_product(act: &CMAction) -> Result<CMCrossedProduct> {
    let rs = rho_sigma(act)?;
    let diff = rs.difference();
    let gens: Vec<Vector> = diff.column_iter().map(|c| c.into_owned()).collect();
    let tol = settings::current().tol_alg;
    let mut range = Span::new(rs.target.dim(), tol);
    for v in &gens {
        range.insert(v);
    }
    let (ideal, extra_rounds) = ideal_closure(&rs.target.algebra, &gens);
    if ideal.dim() != range.len() {
        return Err(CrossedProductError::RangeNotIdeal {
            range_dim: range.len(),
            ideal_dim: ideal.dim(),
        });
    }
    let quotient = quotient_algebra(&rs.target.algebra, &ideal)?;
    let i_a = rs.target.i_a.then(&quotient.projection)?;
    let i_g = rs.target.i_g.then(&quotient.projection)?;
    Ok(CMCrossedProduct {
        action: act.clone(),
        range_dim: range.len(),
        rho_sigma: rs,
        ideal,
        extra_rounds,
        quotient,
        i_a,
        i_g,
    })
}

/// The crossed-module C*-algebra: `C0(X)` with the action of `G` on objects
/// and `u ≡ 1`.
pub fn cm_cstar(cm: &CrossedModule) -> Result<CMCrossedProduct> {
    cm_crossed_product(&CMAction::on_objects(cm)?)
}

/// Maps `a⊗δ_g ↦ π(a)⊗δ_g` between crossed products by the same groupoid.
pub fn induced_map(source: &CrossedProduct, target: &CrossedProduct, hom: &StarHom) -> Result<StarHom> {
    let gp = source.action.groupoid();
    if gp != target.action.groupoid() {
        return Err(CrossedProductError::NotWellDefined("different groupoids".into()));
    }
    let (a, b) = (source.action.algebra(), target.action.algebra());
    let tol = settings::current().tol_alg;
    let mut m = Matrix::zeros(target.dim(), source.dim());
    for g in gp.arrows() {
        let (fa, fb) = (a.fiber(gp.tgt(g)), b.fiber(gp.tgt(g)));
        for i in 0..fa.dim() {
            let img = hom.apply(&fa.lift(&fa.algebra.basis(i)));
            let c = fb.restrict(b, &img);
            if max_abs(&(fb.lift(&c) - &img)) > tol {
                return Err(CrossedProductError::NotWellDefined(format!(
                    "the map does not respect the fiber over {}",
                    gp.object_label(gp.tgt(g))
                )));
            }
            m.view_mut((target.offset(g), source.index(g, i)), (c.len(), 1)).copy_from(&c);
        }
    }
    Ok(StarHom::new(source.algebra.clone(), target.algebra.clone(), m)?)
}

/// The map `A ⋊ (G, H) → B ⋊ (G, H)` induced by an equivariant `π`.
pub fn induced_cm_map(source: &CMCrossedProduct, target: &CMCrossedProduct, hom: &StarHom) -> Result<StarHom> {
    let f = induced_map(source.product(), target.product(), hom)?;
    let image = f.matrix() * source.ideal.basis();
    for v in image.column_iter() {
        if !target.ideal.contains(&v.into_owned()) {
            return Err(CrossedProductError::NotWellDefined("I_H is not mapped into I_H".into()));
        }
    }
    let m = target.projection().matrix() * f.matrix() * &source.quotient.complement;
    Ok(StarHom::new(source.algebra().clone(), target.algebra().clone(), m)?)
}

/// A covariant pair `(π, V)` in a unital target.
#[derive(Clone, Debug)]
pub struct CovariantRep {
    pub action: CMAction,
    pub target: Arc<StarAlgebra>,
    pub pi: StarHom,
    /// `V_g` per arrow of `G`, in target coordinates.
    pub v: Vec<Vector>,
}

/// Checks `V_g π(a) V_g* = π(α_g(a))`, `V_{∂h} = π(u_h)`, multiplicativity
/// of `V` over composable arrows and `V_g V_k = 0` otherwise, `V_g* = V_{g⁻¹}`,
/// and `Σ_x V_{1_x} = 1`.
pub fn covariant_rep(act: &CMAction, target: Arc<StarAlgebra>, pi: StarHom, v: Vec<Vector>) -> Result<CovariantRep> {
    let cm = act.cm();
    let gp = cm.groupoid();
    let a = act.algebra();
    let tol = settings::current().tol_alg;
    if v.len() != gp.num_arrows() || v.iter().any(|x| x.len() != target.dim()) {
        return Err(ActionError::Shape("one target element per arrow".into()).into());
    }
    if pi.source().dim() != a.dim() || pi.target().dim() != target.dim() {
        return Err(ActionError::Shape("π must map A into the target".into()).into());
    }
    if !pi.is_unital() {
        return Err(CrossedProductError::NotCovariant("π is not unital".into()));
    }
    let bad = |msg: String| Err(CrossedProductError::NotCovariant(msg));
    let mut sum = target.zero();
    for x in gp.objects() {
        sum += &v[gp.unit(x)];
    }
    if max_abs(&(sum - target.unit())) > tol {
        return bad("the V_1x do not sum to 1".into());
    }
    for g in gp.arrows() {
        if max_abs(&(target.star(&v[g]) - &v[gp.inv(g)])) > tol {
            return bad(format!("V_{}* != V_{}⁻¹", gp.arrow_label(g), gp.arrow_label(g)));
        }
        for k in gp.arrows() {
            let expect = match gp.try_comp(g, k) {
                Some(gk) => v[gk].clone(),
                None => target.zero(),
            };
            if max_abs(&(target.mul(&v[g], &v[k]) - expect)) > tol {
                return bad(format!("V_{}V_{} is wrong", gp.arrow_label(g), gp.arrow_label(k)));
            }
        }
        let vs = target.star(&v[g]);
        let fs = a.fiber(gp.src(g));
        for i in 0..fs.dim() {
            let ai = fs.lift(&fs.algebra.basis(i));
            let lhs = target.mul(&target.mul(&v[g], &pi.apply(&ai)), &vs);
            let rhs = pi.apply(&act.alpha().apply_full(g, &ai));
            if max_abs(&(lhs - rhs)) > tol {
                return bad(format!("at g={}, a={}", gp.arrow_label(g), fs.algebra.label(i)));
            }
        }
    }
    for x in gp.objects() {
        let hx = cm.bundle().fiber(x);
        for h in hx.elements() {
            if max_abs(&(&v[cm.d(x, h)] - pi.apply(&act.u_full(x, h)))) > tol {
                return Err(CrossedProductError::TwistViolation { h: hx.label(h).into() });
            }
        }
    }
    Ok(CovariantRep {
        action: act.clone(),
        target,
        pi,
        v,
    })
}

/// The integrated form `a⊗δ_g ↦ π(a)V_g`, descended to `A ⋊ (G, H)`.
pub fn integrate(rep: &CovariantRep, cp: &CMCrossedProduct) -> Result<StarHom> {
    let gp = rep.action.cm().groupoid();
    let a = rep.action.algebra();
    let prod = cp.product();
    let t = &rep.target;
    let mut m = Matrix::zeros(t.dim(), prod.dim());
    for g in gp.arrows() {
        let f = a.fiber(gp.tgt(g));
        for i in 0..f.dim() {
            let img = t.mul(&rep.pi.apply(&f.lift(&f.algebra.basis(i))), &rep.v[g]);
            m.set_column(prod.index(g, i), &img);
        }
    }
    let tol = settings::current().tol_alg;
    if linalg::max_abs_matrix(&(&m * cp.ideal.basis())) > tol {
        return Err(CrossedProductError::NotWellDefined("the integrated form does not vanish on I_H".into()));
    }
    let q = m * &cp.quotient.complement;
    Ok(StarHom::new(cp.algebra().clone(), t.clone(), q)?)
}

/// One named sub-check of a verification report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Outcome of a verification: named sub-checks and the data they compared.
#[derive(Clone, Debug, Default)]
pub struct Verification {
    pub checks: Vec<Check>,
    pub dims: Vec<(String, usize)>,
    pub blocks: Vec<(String, Vec<usize>)>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(c) => Err(CrossedProductError::VerificationFailed(format!("{}: {}", c.name, c.detail))),
            None => Ok(self),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn dim(&self, name: &str) -> Option<usize> {
        self.dims.iter().find(|(n, _)| n == name).map(|(_, d)| *d)
    }

    pub fn blocks_of(&self, name: &str) -> Option<&[usize]> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

fn span_of(m: &Matrix, tol: f64) -> Span {
    Span::from_columns(m, tol)
}

/// Whether the column spaces of `a` and `b` agree, by containment both ways.
fn same_subspace(a: &Matrix, b: &Matrix, tol: f64) -> (bool, bool) {
    let (sa, sb) = (span_of(a, tol), span_of(b, tol));
    let a_in_b = a.column_iter().all(|c| sb.contains(&c.into_owned()));
    let b_in_a = b.column_iter().all(|c| sa.contains(&c.into_owned()));
    (a_in_b, b_in_a)
}

fn blocks(a: &StarAlgebra) -> Result<Vec<usize>> {
    Ok(wedderburn(a)?.blocks)
}

/// `B ⋊ (H ⋊ G)` with `χ*` onto `B ⋊ G` and the identification
/// `(B ⋊ H) ⋊ G ≅ B ⋊ (H ⋊ G)`.
fn iterated_identification(cm: &CrossedModule, canon: &CanonicalAction, lhs: &CrossedProduct, rhs: &CrossedProduct) -> Matrix {
    let gp = cm.groupoid();
    let bundle = cm.bundle();
    let bh = &canon.bh;
    let bh_alg = &bh.algebra;
    let mut psi = Matrix::zeros(rhs.dim(), lhs.dim());
    let (_, idx) = cm.transformation_groupoid();
    for g in gp.arrows() {
        let t = gp.tgt(g);
        let f = bh_alg.fiber(t);
        for k in 0..f.dim() {
            let w = f.lift(&f.algebra.basis(k));
            let col = lhs.index(g, k);
            for h in bundle.fiber(t).elements() {
                let b = bh.component(&w, bundle.flat_index(t, h));
                let p = idx.index(h, g);
                for (i, z) in b.iter().enumerate() {
                    psi[(rhs.index(p, i), col)] += *z;
                }
            }
        }
    }
    psi
}

/// Compares `(B ⋊ H) ⋊ (G, H)` for the canonical action with `B ⋊ G`.
pub fn verify_thm51(cm: &CrossedModule, beta: &GroupoidAlgebraAction) -> Result<Verification> {
    let tol = settings::current().tol_eig;
    let mut rep = Verification::default();
    let canon = canonical_action_on_bh(cm, beta)?;
    let lhs = cm_crossed_product(&canon.action)?;
    let rhs = crossed_product(beta)?;
    let (bar, idx) = pulled_back_action(cm, beta)?;
    let mid = crossed_product(&bar)?;
    let chi = StarHom::new(mid.algebra.clone(), rhs.algebra.clone(), chi_matrix(cm, &mid, &rhs, &idx))?;
    let psi = iterated_identification(cm, &canon, lhs.product(), &mid);
    let psi_hom = StarHom::new(lhs.product().algebra.clone(), mid.algebra.clone(), psi.clone());
    rep.check(
        "iterated product identification",
        psi_hom.as_ref().map(|h| h.is_isomorphism()).unwrap_or(false),
        match &psi_hom {
            Ok(_) => "(B⋊H)⋊G → B⋊(H⋊G) is a *-isomorphism".to_string(),
            Err(e) => e.to_string(),
        },
    );
    rep.check("χ* surjective", chi.is_surjective(), format!("rank {} of {}", chi.rank(), rhs.dim()));
    let kernel = chi.kernel();
    let image = &psi * lhs.ideal.basis();
    let (i_in_k, k_in_i) = same_subspace(&image, &kernel, tol);
    rep.check("I_H ⊆ ker χ*", i_in_k, format!("dim I_H = {}", lhs.ideal.dim()));
    rep.check("ker χ* ⊆ I_H", k_in_i, format!("dim ker χ* = {}", kernel.ncols()));
    rep.check(
        "dim I_H = dim ker χ*",
        lhs.ideal.dim() == kernel.ncols(),
        format!("{} vs {}", lhs.ideal.dim(), kernel.ncols()),
    );
    rep.check(
        "dimensions agree",
        lhs.dim() == rhs.dim(),
        format!("{} vs {}", lhs.dim(), rhs.dim()),
    );
    let (bl, br) = (blocks(lhs.algebra())?, blocks(&rhs.algebra)?);
    rep.check("block multisets agree", bl == br, format!("{bl:?} vs {br:?}"));
    rep.dims = vec![
        ("lhs".into(), lhs.dim()),
        ("rhs".into(), rhs.dim()),
        ("ideal".into(), lhs.ideal.dim()),
        ("kernel".into(), kernel.ncols()),
    ];
    rep.blocks = vec![("lhs".into(), bl), ("rhs".into(), br)];
    Ok(rep)
}

/// Exactness of `0 → I⋊(G,H) → A⋊(G,H) → (A/I)⋊(G,H) → 0`.
pub fn verify_exactness(act: &CMAction, ideal: &Ideal) -> Result<Verification> {
    let tol = settings::current().tol_eig;
    let mut rep = Verification::default();
    let ext = restrict_and_quotient(act, ideal)?;
    let mid = cm_crossed_product(act)?;
    let right = cm_crossed_product(&ext.quotient_action)?;
    let pi = induced_cm_map(&mid, &right, &ext.projection)?;
    let left_dim;
    match (&ext.ideal_action, &ext.inclusion) {
        (Some(ia), Some(incl)) => {
            let left = cm_crossed_product(ia)?;
            let iota = induced_cm_map(&left, &mid, incl)?;
            left_dim = left.dim();
            rep.check("ι injective", iota.is_injective(), format!("rank {} of {}", iota.rank(), left.dim()));
            let comp = pi.matrix() * iota.matrix();
            rep.check("π∘ι = 0", linalg::max_abs_matrix(&comp) <= tol, "composite vanishes");
            let image = iota.image();
            let kernel = pi.kernel();
            let (a, b) = same_subspace(&image, &kernel, tol);
            rep.check("im ι ⊆ ker π", a, format!("dim im ι = {}", image.ncols()));
            rep.check("ker π ⊆ im ι", b, format!("dim ker π = {}", kernel.ncols()));
            rep.blocks.push(("ideal".into(), blocks(left.algebra())?));
        }
        _ => {
            left_dim = 0;
            rep.check("ker π = 0", pi.is_injective(), format!("rank {} of {}", pi.rank(), mid.dim()));
            rep.blocks.push(("ideal".into(), vec![]));
        }
    }
    rep.check("π surjective", pi.is_surjective(), format!("rank {} of {}", pi.rank(), right.dim()));
    rep.check(
        "dimensions add",
        left_dim + right.dim() == mid.dim(),
        format!("{} + {} vs {}", left_dim, right.dim(), mid.dim()),
    );
    rep.dims = vec![
        ("ideal".into(), left_dim),
        ("middle".into(), mid.dim()),
        ("quotient".into(), right.dim()),
    ];
    rep.blocks.push(("middle".into(), blocks(mid.algebra())?));
    rep.blocks.push(("quotient".into(), blocks(right.algebra())?));
    Ok(rep)
}

/// `G` acting on `C0(G)` by left translation: `α_g(δ_k) = δ_{gk}`, for a
/// group or, for a groupoid, on functions on its arrows fibered by target.
pub fn left_translation(gp: &FiniteGroupoid) -> Result<GroupoidAlgebraAction> {
    let n = gp.num_arrows();
    let points = gp.arrow_labels().to_vec();
    let base = crate::algebra::functions_on(&points);
    let fibering = crate::algebra::Fibering {
        labels: gp.object_labels().to_vec(),
        projections: gp
            .objects()
            .map(|x| {
                let mut p = Vector::zeros(n);
                for k in gp.arrows_to(x) {
                    p[k] = ONE;
                }
                p
            })
            .collect(),
    };
    let a = Arc::new(base.refibered(fibering)?);
    let mats = gp
        .arrows()
        .map(|g| {
            let (fs, ft) = (a.fiber(gp.src(g)), a.fiber(gp.tgt(g)));
            let mut m = Matrix::zeros(ft.dim(), fs.dim());
            for i in 0..fs.dim() {
                let k = (0..n).find(|&k| fs.lift(&fs.algebra.basis(i))[k] != linalg::ZERO).unwrap();
                let img = basis(n, gp.comp(g, k));
                m.set_column(i, &ft.coords(&img));
            }
            m
        })
        .collect();
    Ok(GroupoidAlgebraAction::new(gp.clone(), a, mats)?)
}
