//! Equivariant Morita equivalence through linking algebras: a `(G, H)`-algebra
//! `D` with an invariant projection `p` such that `p` and `1 - p` are full
//! relates the corner actions on `pDp` and `(1-p)D(1-p)`.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{ActionError, CMAction};
use crate::algebra::{ideal_generated, wedderburn, AlgebraError, Fibering, StarAlgebra};
use crate::crossed_product::{cm_crossed_product, CrossedProductError, Verification};
use crate::linalg::{column_space, max_abs, Matrix, Span, Vector};
use crate::settings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoritaError {
    #[error("p is not a projection: {0}")]
    NotProjection(String),
    #[error("p is not invariant: {0}")]
    NotInvariant(String),
    #[error("{which} is not full: it generates an ideal of dimension {ideal_dim} in dimension {dim}")]
    NotFull { which: String, ideal_dim: usize, dim: usize },
    #[error("identity {identity} fails: {detail}")]
    IdentityFailed { identity: String, detail: String },
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    CrossedProduct(#[from] CrossedProductError),
}

type Result<T> = std::result::Result<T, MoritaError>;

/// A corner `qDq` with orthonormal basis `basis` in coordinates of `D`.
#[derive(Clone, Debug)]
pub struct Corner {
    pub projection: Vector,
    pub basis: Matrix,
    pub action: CMAction,
}

impl Corner {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        self.action.algebra()
    }

    /// Coordinates of `D` for an element of the corner.
    pub fn lift(&self, c: &Vector) -> Vector {
        &self.basis * c
    }

    pub fn coords(&self, v: &Vector) -> Vector {
        self.basis.adjoint() * v
    }
}

#[derive(Clone, Debug)]
pub struct LinkingData {
    pub action: CMAction,
    pub p: Vector,
    /// `pDp`, carrying the restricted action.
    pub corner_p: Corner,
    /// `(1-p)D(1-p)`.
    pub corner_q: Corner,
}

impl LinkingData {
    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        self.action.algebra()
    }

    pub fn complement(&self) -> Vector {
        self.algebra().unit() - &self.p
    }
}

/// Orthonormal basis of `qAr`.
fn corner_space(a: &StarAlgebra, q: &Vector, r: &Vector) -> Matrix {
    let tol = settings::current().tol_alg;
    column_space(&(a.left_matrix(q) * a.right_matrix(r)), tol)
}

/// `qAq` as a single-fiber algebra with unit `q`.
fn corner_algebra(a: &StarAlgebra, q: &Vector) -> Result<(StarAlgebra, Matrix)> {
    let basis = corner_space(a, q, q);
    let (alg, _) = a.compress(&basis, "*", Some(q))?;
    Ok((alg, basis))
}

fn corner(act: &CMAction, q: &Vector) -> Result<Corner> {
    let d = act.algebra();
    let (sub, basis) = corner_algebra(d, q)?;
    let fibering = Fibering {
        labels: d.fibering().labels.clone(),
        projections: d.fibering().projections.iter().map(|px| basis.adjoint() * d.mul(px, q)).collect(),
    };
    let sub = Arc::new(sub.refibered(fibering)?);
    let compress = basis.adjoint() * d.left_matrix(q) * d.right_matrix(q);
    let action = act.transport(sub, &compress, &basis)?;
    Ok(Corner {
        projection: q.clone(),
        basis,
        action,
    })
}

fn check_full(a: &StarAlgebra, q: &Vector, which: &str) -> Result<()> {
    let ideal = ideal_generated(a, std::slice::from_ref(q));
    if ideal.dim() != a.dim() {
        return Err(MoritaError::NotFull {
            which: which.into(),
            ideal_dim: ideal.dim(),
            dim: a.dim(),
        });
    }
    Ok(())
}

/// Validates `p` (self-adjoint idempotent, `α`-invariant, commuting with `u`,
/// `p` and `1 - p` full) and extracts both corner actions.
pub fn linking(action: &CMAction, p: &Vector) -> Result<LinkingData> {
    let tol = settings::current().tol_alg;
    let d = action.algebra();
    if p.len() != d.dim() {
        return Err(MoritaError::NotProjection(format!("p has {} coordinates, D has dimension {}", p.len(), d.dim())));
    }
    let sa = max_abs(&(d.star(p) - p));
    let idem = max_abs(&(d.mul(p, p) - p));
    if sa > tol || idem > tol {
        return Err(MoritaError::NotProjection(format!("|p* - p| = {sa:.3e}, |p² - p| = {idem:.3e}")));
    }
    let cm = action.cm();
    let gp = cm.groupoid();
    for g in gp.arrows() {
        let moved = action.alpha().apply_full(g, p);
        let expect = d.mul(p, &d.fibering().projections[gp.tgt(g)]);
        let r = max_abs(&(moved - expect));
        if r > tol {
            return Err(MoritaError::NotInvariant(format!("|α_{}(p) - p| = {r:.3e}", gp.arrow_label(g))));
        }
    }
    for x in gp.objects() {
        let hx = cm.bundle().fiber(x);
        for h in hx.elements() {
            let u = action.u_full(x, h);
            let r = max_abs(&(d.mul(&u, p) - d.mul(p, &u)));
            if r > tol {
                return Err(MoritaError::NotInvariant(format!("p does not commute with u_{} (residual {r:.3e})", hx.label(h))));
            }
        }
    }
    let q = d.unit() - p;
    check_full(d, p, "p")?;
    check_full(d, &q, "1 - p")?;
    Ok(LinkingData {
        action: action.clone(),
        p: p.clone(),
        corner_p: corner(action, p)?,
        corner_q: corner(action, &q)?,
    })
}

fn blocks(a: &StarAlgebra) -> Result<Vec<usize>> {
    Ok(wedderburn(a)?.blocks)
}

/// Compares the crossed products of both corners: equal block counts, and the
/// image of `p` in `D ⋊ (G, H)` is a full projection cutting out corners with
/// the same dimensions and blocks as the corner crossed products.
pub fn verify_morita(link: &LinkingData) -> Result<Verification> {
    let tol = settings::current().tol_alg;
    let mut rep = Verification::default();
    let cp_a = cm_crossed_product(&link.corner_p.action)?;
    let cp_b = cm_crossed_product(&link.corner_q.action)?;
    let cp_d = cm_crossed_product(&link.action)?;
    let (ba, bb, bd) = (blocks(cp_a.algebra())?, blocks(cp_b.algebra())?, blocks(cp_d.algebra())?);
    rep.check(
        "block counts agree",
        ba.len() == bb.len(),
        format!("{} vs {} ({ba:?} vs {bb:?})", ba.len(), bb.len()),
    );

    let e = cp_d.algebra();
    let big_p = cp_d.i_a.apply(&link.p);
    let big_q = e.unit() - &big_p;
    let sa = max_abs(&(e.star(&big_p) - &big_p));
    let idem = max_abs(&(e.mul(&big_p, &big_p) - &big_p));
    rep.check(
        "image of p is a projection",
        sa <= tol && idem <= tol,
        format!("|P* - P| = {sa:.1e}, |P² - P| = {idem:.1e}"),
    );
    for (name, proj) in [("image of p is full", &big_p), ("image of 1 - p is full", &big_q)] {
        let dim = ideal_generated(e, std::slice::from_ref(proj)).dim();
        rep.check(name, dim == e.dim(), format!("generated ideal has dimension {dim} of {}", e.dim()));
    }
    let (pe, _) = corner_algebra(e, &big_p)?;
    let (qe, _) = corner_algebra(e, &big_q)?;
    let (bpe, bqe) = (blocks(&pe)?, blocks(&qe)?);
    rep.check(
        "P(D⋊C)P matches A⋊C",
        pe.dim() == cp_a.dim() && bpe == ba,
        format!("dim {} vs {}, blocks {bpe:?} vs {ba:?}", pe.dim(), cp_a.dim()),
    );
    rep.check(
        "P⊥(D⋊C)P⊥ matches B⋊C",
        qe.dim() == cp_b.dim() && bqe == bb,
        format!("dim {} vs {}, blocks {bqe:?} vs {bb:?}", qe.dim(), cp_b.dim()),
    );
    rep.dims = vec![
        ("corner_a".into(), link.corner_p.dim()),
        ("corner_b".into(), link.corner_q.dim()),
        ("crossed_a".into(), cp_a.dim()),
        ("crossed_b".into(), cp_b.dim()),
        ("crossed_d".into(), cp_d.dim()),
    ];
    rep.blocks = vec![("a".into(), ba), ("b".into(), bb), ("d".into(), bd)];
    Ok(rep)
}

/// `E = pD(1-p)` as an `A,B`-imprimitivity bimodule with the restricted action.
#[derive(Clone, Debug)]
pub struct BimoduleWitness {
    /// Orthonormal basis of `E` in coordinates of `D`.
    pub basis: Matrix,
    /// `γ_g` from `E_{src g}` to `E_{tgt g}`, in coordinates of `D`.
    pub gamma: Vec<Matrix>,
    /// Names of the identities that were checked, in order.
    pub identities: Vec<String>,
}

impl BimoduleWitness {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

fn columns(m: &Matrix) -> Vec<Vector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

struct Identities {
    tol: f64,
    names: Vec<String>,
}

impl Identities {
    fn expect(&mut self, name: &str, lhs: &Vector, rhs: &Vector, at: impl FnOnce() -> String) -> Result<()> {
        let r = max_abs(&(lhs - rhs));
        if r > self.tol {
            return Err(MoritaError::IdentityFailed {
                identity: name.into(),
                detail: format!("{} (residual {r:.3e})", at()),
            });
        }
        if !self.names.iter().any(|n| n == name) {
            self.names.push(name.into());
        }
        Ok(())
    }

    fn holds(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
        if !ok {
            return Err(MoritaError::IdentityFailed {
                identity: name.into(),
                detail: detail(),
            });
        }
        self.names.push(name.into());
        Ok(())
    }
}

/// Reads the bimodule off the linking algebra and checks the compatibility of
/// `γ` with both module actions and both inner products, `γ_∂(h)(ξ) = u_h ξ v_h*`,
/// `w_h ξ = u_h ξ`, `ξ w_h = ξ v_h`, and fullness of both inner products.
pub fn bimodule_check(link: &LinkingData) -> Result<BimoduleWitness> {
    let tol = settings::current().tol_alg;
    let d = link.algebra();
    let act = &link.action;
    let cm = act.cm();
    let gp = cm.groupoid();
    let q = link.complement();
    let e_basis = corner_space(d, &link.p, &q);
    let (ca, cb) = (&link.corner_p, &link.corner_q);
    let mut ids = Identities {
        tol,
        names: Vec::new(),
    };

    let fiber_basis = |x: usize, m: &Matrix| -> Vec<Vector> {
        let px = &d.fibering().projections[x];
        columns(&column_space(&(d.left_matrix(px) * m), tol))
    };
    let ex: Vec<Vec<Vector>> = gp.objects().map(|x| fiber_basis(x, &e_basis)).collect();
    let ax: Vec<Vec<Vector>> = gp.objects().map(|x| fiber_basis(x, &ca.basis)).collect();
    let bx: Vec<Vec<Vector>> = gp.objects().map(|x| fiber_basis(x, &cb.basis)).collect();
    let inner_a = |xi: &Vector, eta: &Vector| d.mul(xi, &d.star(eta));
    let inner_b = |xi: &Vector, eta: &Vector| d.mul(&d.star(xi), eta);
    let gamma = |g: usize, xi: &Vector| act.alpha().apply_full(g, xi);
    let on_corner = |c: &Corner, g: usize, a: &Vector| c.lift(&c.action.alpha().apply_full(g, &c.coords(a)));

    for g in gp.arrows() {
        let s = gp.src(g);
        for (i, xi) in ex[s].iter().enumerate() {
            let gxi = gamma(g, xi);
            for a in &ax[s] {
                ids.expect("γ_g(a·ξ) = α_g(a)·γ_g(ξ)", &gamma(g, &d.mul(a, xi)), &d.mul(&on_corner(ca, g, a), &gxi), || {
                    format!("g = {}, ξ #{i}", gp.arrow_label(g))
                })?;
            }
            for b in &bx[s] {
                ids.expect("γ_g(ξ·b) = γ_g(ξ)·β_g(b)", &gamma(g, &d.mul(xi, b)), &d.mul(&gxi, &on_corner(cb, g, b)), || {
                    format!("g = {}, ξ #{i}", gp.arrow_label(g))
                })?;
            }
            for (j, eta) in ex[s].iter().enumerate() {
                let geta = gamma(g, eta);
                ids.expect(
                    "α_g⟨ξ|η⟩_A = ⟨γ_g ξ|γ_g η⟩_A",
                    &on_corner(ca, g, &inner_a(xi, eta)),
                    &inner_a(&gxi, &geta),
                    || format!("g = {}, ξ #{i}, η #{j}", gp.arrow_label(g)),
                )?;
                ids.expect(
                    "β_g⟨ξ|η⟩_B = ⟨γ_g ξ|γ_g η⟩_B",
                    &on_corner(cb, g, &inner_b(xi, eta)),
                    &inner_b(&gxi, &geta),
                    || format!("g = {}, ξ #{i}, η #{j}", gp.arrow_label(g)),
                )?;
                for zeta in &ex[s] {
                    ids.expect(
                        "⟨ξ|η⟩_A·ζ = ξ·⟨η|ζ⟩_B",
                        &d.mul(&inner_a(xi, eta), zeta),
                        &d.mul(xi, &inner_b(eta, zeta)),
                        || format!("ξ #{i}, η #{j}"),
                    )?;
                }
            }
        }
    }

    for x in gp.objects() {
        let hx = cm.bundle().fiber(x);
        for h in hx.elements() {
            let u = ca.lift(&ca.action.u_full(x, h));
            let v = cb.lift(&cb.action.u_full(x, h));
            let w = act.u_full(x, h);
            let dh = cm.d(x, h);
            for (i, xi) in ex[x].iter().enumerate() {
                let at = || format!("h = {}, ξ #{i}", hx.label(h));
                ids.expect("γ_∂(h)(ξ) = u_h·ξ·v_h*", &gamma(dh, xi), &d.mul(&d.mul(&u, xi), &d.star(&v)), at)?;
                ids.expect("w_h·ξ = u_h·ξ", &d.mul(&w, xi), &d.mul(&u, xi), at)?;
                ids.expect("ξ·w_h = ξ·v_h", &d.mul(xi, &w), &d.mul(xi, &v), at)?;
            }
        }
    }

    for (name, corner, inner) in [
        ("⟨E|E⟩_A spans A", ca, &inner_a as &dyn Fn(&Vector, &Vector) -> Vector),
        ("⟨E|E⟩_B spans B", cb, &inner_b),
    ] {
        let mut span = Span::new(d.dim(), tol);
        for x in gp.objects() {
            for xi in &ex[x] {
                for eta in &ex[x] {
                    span.insert(&inner(xi, eta));
                }
            }
        }
        ids.holds(name, span.len() == corner.dim(), || format!("span has dimension {} of {}", span.len(), corner.dim()))?;
    }

    let gamma_mats = gp
        .arrows()
        .map(|g| {
            let mut m = Matrix::zeros(d.dim(), e_basis.ncols());
            for (i, xi) in columns(&e_basis).iter().enumerate() {
                m.set_column(i, &gamma(g, xi));
            }
            m
        })
        .collect();
    Ok(BimoduleWitness {
        basis: e_basis,
        gamma: gamma_mats,
        identities: ids.names,
    })
}

#[cfg(test)]
mod tests;
