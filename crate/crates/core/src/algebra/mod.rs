//! Finite-dimensional unital *-algebras given by structure constants.
//!
//! An algebra has a basis `e_0..e_{dim-1}`; elements are coordinate vectors.
//! Products are stored sparsely: `table[i*dim + j]` lists the nonzero
//! coefficients of `e_i e_j`. The involution is conjugate-linear and stored as
//! the matrix `S` whose column `i` holds the coordinates of `e_i*`, so that
//! `x* = S·conj(x)`.
//!
//! Every algebra is fibered over a finite label set by central projections
//! `p_x` summing to the unit. Since every finite-dimensional C*-algebra is
//! unital, multipliers are identified with elements throughout.

mod constructors;
mod hom;
mod ideal;
mod tensor;
mod wedderburn;

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::linalg::{self, basis_vector, max_abs, Matrix, Span, Vector, C64, ONE, ZERO};
use crate::settings;

pub use constructors::{direct_sum, functions_on, group_algebra, groupoid_algebra, matrix_algebra, random_unitary};
pub(crate) use constructors::orbit_fibering;
pub use hom::StarHom;
pub use ideal::{ideal_closure, ideal_generated, quotient_algebra, Ideal, Quotient};
pub use tensor::diagonal_tensor;
pub use wedderburn::{center, wedderburn, Wedderburn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("algebra of dimension {dim} exceeds the size limit {limit}")]
    SizeLimit { dim: usize, limit: usize },
    #[error("not a unit: {0}")]
    BadUnit(String),
    #[error("not associative on basis triple ({i}, {j}, {k})")]
    NotAssociative { i: String, j: String, k: String },
    #[error("bad involution: {0}")]
    BadInvolution(String),
    #[error("bad fibering: {0}")]
    BadFibering(String),
    #[error("not C*-realizable: {0}")]
    NotCStar(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("the I-norm needs a convolution algebra")]
    NotConvolutionAlgebra,
    #[error("Wedderburn decomposition unstable: {0}")]
    DecompositionUnstable(String),
    #[error("not an ideal: {0}")]
    NotIdeal(String),
    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),
    #[error("not a *-homomorphism: {0}")]
    NotHomomorphism(String),
}

/// Fiber labels with their central projections.
#[derive(Clone, Debug, PartialEq)]
pub struct Fibering {
    pub labels: Vec<String>,
    pub projections: Vec<Vector>,
}

impl Fibering {
    pub fn single(label: impl Into<String>, unit: &Vector) -> Self {
        Fibering {
            labels: vec![label.into()],
            projections: vec![unit.clone()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Records how a crossed-product algebra decomposes as functions on arrows,
/// for the I-norm.
#[derive(Clone, Debug)]
pub struct ConvolutionLayout {
    pub coefficient: Arc<StarAlgebra>,
    pub num_objects: usize,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    /// Per arrow `g`: the basis indices over `g` and the coefficient element
    /// (in coordinates of `coefficient`) each basis vector carries.
    pub slots: Vec<Vec<(usize, Vector)>>,
}

#[derive(Clone, Debug)]
pub struct Gns {
    /// `G^{1/2}` for the trace-form Gram matrix `G`.
    pub sqrt: Matrix,
    pub inv_sqrt: Matrix,
}

/// The corner `p_x A p_x` as a unital algebra, with its embedding.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub label: String,
    pub algebra: Arc<StarAlgebra>,
    /// Orthonormal columns spanning `p_x A` inside `A`.
    pub embed: Matrix,
    projection: Vector,
    selection: Option<Vec<usize>>,
}

impl Fiber {
    pub fn dim(&self) -> usize {
        self.embed.ncols()
    }

    /// Coordinates of `p_x a` in the fiber basis.
    pub fn restrict(&self, parent: &StarAlgebra, a: &Vector) -> Vector {
        let pa = if self.selection.is_some() && self.embed.nrows() == self.embed.ncols() {
            a.clone()
        } else {
            parent.mul(&self.projection, a)
        };
        self.coords(&pa)
    }

    /// Coordinates of an element already lying in `p_x A`.
    pub fn coords(&self, a: &Vector) -> Vector {
        match &self.selection {
            Some(sel) => Vector::from_iterator(sel.len(), sel.iter().map(|&i| a[i])),
            None => self.embed.adjoint() * a,
        }
    }

    pub fn lift(&self, c: &Vector) -> Vector {
        match &self.selection {
            Some(sel) => {
                let mut v = Vector::zeros(self.embed.nrows());
                for (k, &i) in sel.iter().enumerate() {
                    v[i] = c[k];
                }
                v
            }
            None => &self.embed * c,
        }
    }

    pub fn projection(&self) -> &Vector {
        &self.projection
    }
}

#[derive(Clone, Debug)]
pub struct StarAlgebra {
    dim: usize,
    labels: Vec<String>,
    table: Vec<Vec<(usize, C64)>>,
    star: Matrix,
    unit: Vector,
    fibering: Fibering,
    layout: Option<Arc<ConvolutionLayout>>,
    gns: OnceLock<Gns>,
    fibers: OnceLock<Vec<Fiber>>,
}

/// Entries below this magnitude are dropped from structure tables.
const DROP: f64 = 1e-14;

pub(crate) fn sparse(v: &Vector) -> Vec<(usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > DROP)
        .map(|(i, c)| (i, *c))
        .collect()
}

fn nonzeros(v: &Vector) -> Vec<(usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i, *c))
        .collect()
}

impl StarAlgebra {
    /// Validates structure data. `table[i*dim + j]` holds the sparse coordinates
    /// of `e_i e_j`; column `i` of `star` holds `e_i*`.
    pub fn new(
        labels: Vec<String>,
        table: Vec<Vec<(usize, C64)>>,
        star: Matrix,
        unit: Vector,
        fibering: Fibering,
    ) -> Result<Self, AlgebraError> {
        let a = Self::unchecked(labels, table, star, unit, fibering)?;
        a.validate()?;
        Ok(a)
    }

    /// Builds from a dense product closure `mul(i, j) = e_i e_j`.
    pub fn from_products(
        labels: Vec<String>,
        mul: impl Fn(usize, usize) -> Vector,
        star: Matrix,
        unit: Vector,
        fibering: Fibering,
    ) -> Result<Self, AlgebraError> {
        let dim = labels.len();
        let mut table = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                table.push(sparse(&mul(i, j)));
            }
        }
        Self::new(labels, table, star, unit, fibering)
    }

    /// Shape checks only; used by constructors that validate afterwards.
    pub(crate) fn unchecked(
        labels: Vec<String>,
        table: Vec<Vec<(usize, C64)>>,
        star: Matrix,
        unit: Vector,
        fibering: Fibering,
    ) -> Result<Self, AlgebraError> {
        let dim = labels.len();
        let limit = settings::current().max_dim;
        if dim > limit {
            return Err(AlgebraError::SizeLimit { dim, limit });
        }
        if table.len() != dim * dim {
            return Err(AlgebraError::Shape(format!("expected {} products, got {}", dim * dim, table.len())));
        }
        if table.iter().flatten().any(|&(k, _)| k >= dim) {
            return Err(AlgebraError::Shape("product names a basis index out of range".into()));
        }
        if star.nrows() != dim || star.ncols() != dim || unit.len() != dim {
            return Err(AlgebraError::Shape("star must be dim×dim and unit of length dim".into()));
        }
        if fibering.labels.len() != fibering.projections.len() || fibering.projections.iter().any(|p| p.len() != dim) {
            return Err(AlgebraError::Shape("fibering projections must be coordinate vectors".into()));
        }
        if fibering.is_empty() {
            return Err(AlgebraError::BadFibering("no fibers".into()));
        }
        Ok(StarAlgebra {
            dim,
            labels,
            table,
            star,
            unit,
            fibering,
            layout: None,
            gns: OnceLock::new(),
            fibers: OnceLock::new(),
        })
    }

    pub(crate) fn with_layout(mut self, layout: ConvolutionLayout) -> Self {
        self.layout = Some(Arc::new(layout));
        self
    }

    fn label_of(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let tol = settings::current().tol_alg;
        let d = self.dim;
        for i in 0..d {
            let ei = basis_vector(d, i);
            let l = self.mul(&self.unit, &ei);
            let r = self.mul(&ei, &self.unit);
            if max_abs(&(&l - &ei)) > tol || max_abs(&(&r - &ei)) > tol {
                return Err(AlgebraError::BadUnit(format!("1·{0} or {0}·1 differs from {0}", self.labels[i])));
            }
        }
        self.check_associative(tol)?;
        let s_conj_s = &self.star * self.star.map(|z| z.conj());
        if linalg::max_abs_matrix(&(s_conj_s - Matrix::identity(d, d))) > tol {
            return Err(AlgebraError::BadInvolution("a** != a".into()));
        }
        let star_cols: Vec<Vector> = (0..d).map(|i| self.star.column(i).into_owned()).collect();
        let mut lhs = Vector::zeros(d);
        for i in 0..d {
            for j in 0..d {
                lhs.fill(ZERO);
                for &(k, c) in &self.table[i * d + j] {
                    lhs.axpy(c.conj(), &star_cols[k], ONE);
                }
                let rhs = self.mul(&star_cols[j], &star_cols[i]);
                if max_abs(&(&lhs - rhs)) > tol {
                    return Err(AlgebraError::BadInvolution(format!(
                        "({}·{})* != {}*·{}*",
                        self.labels[i], self.labels[j], self.labels[j], self.labels[i]
                    )));
                }
            }
        }
        self.check_fibering(tol)?;
        self.check_cstar(tol)
    }

    fn check_associative(&self, tol: f64) -> Result<(), AlgebraError> {
        let d = self.dim;
        let mut lhs = vec![ZERO; d];
        let mut rhs = vec![ZERO; d];
        let mut touched = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let ij = &self.table[i * d + j];
                for k in 0..d {
                    touched.clear();
                    for &(m, a) in ij {
                        for &(n, b) in &self.table[m * d + k] {
                            lhs[n] += a * b;
                            touched.push(n);
                        }
                    }
                    for &(m, a) in &self.table[j * d + k] {
                        for &(n, b) in &self.table[i * d + m] {
                            rhs[n] += a * b;
                            touched.push(n);
                        }
                    }
                    let mut bad = false;
                    for &n in &touched {
                        if (lhs[n] - rhs[n]).norm() > tol {
                            bad = true;
                        }
                        lhs[n] = ZERO;
                        rhs[n] = ZERO;
                    }
                    if bad {
                        return Err(AlgebraError::NotAssociative {
                            i: self.label_of(i),
                            j: self.label_of(j),
                            k: self.label_of(k),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_fibering(&self, tol: f64) -> Result<(), AlgebraError> {
        let d = self.dim;
        let f = &self.fibering;
        let mut sum = Vector::zeros(d);
        for (x, p) in f.projections.iter().enumerate() {
            let name = &f.labels[x];
            if max_abs(&(self.star(p) - p)) > tol {
                return Err(AlgebraError::BadFibering(format!("p_{name} is not self-adjoint")));
            }
            if max_abs(&(self.mul(p, p) - p)) > tol {
                return Err(AlgebraError::BadFibering(format!("p_{name} is not idempotent")));
            }
            for i in 0..d {
                let ei = basis_vector(d, i);
                if max_abs(&(self.mul(p, &ei) - self.mul(&ei, p))) > tol {
                    return Err(AlgebraError::BadFibering(format!(
                        "p_{name} does not commute with {}",
                        self.labels[i]
                    )));
                }
            }
            for (y, q) in f.projections.iter().enumerate().skip(x + 1) {
                if max_abs(&self.mul(p, q)) > tol {
                    return Err(AlgebraError::BadFibering(format!(
                        "p_{name} and p_{} are not orthogonal",
                        f.labels[y]
                    )));
                }
            }
            sum += p;
        }
        if max_abs(&(sum - &self.unit)) > tol {
            return Err(AlgebraError::BadFibering("projections do not sum to the unit".into()));
        }
        Ok(())
    }

    /// Gram matrix of the trace form `⟨a, b⟩ = tr(L_{a*b})` in coordinates.
    pub fn gram(&self) -> Matrix {
        let d = self.dim;
        let mut t = vec![ZERO; d];
        for m in 0..d {
            for l in 0..d {
                for &(k, c) in &self.table[m * d + l] {
                    if k == l {
                        t[m] += c;
                    }
                }
            }
        }
        let mut tm = Matrix::zeros(d, d);
        for k in 0..d {
            for j in 0..d {
                tm[(k, j)] = self.table[k * d + j].iter().map(|&(m, c)| c * t[m]).sum();
            }
        }
        self.star.transpose() * tm
    }

    fn check_cstar(&self, tol: f64) -> Result<(), AlgebraError> {
        let d = self.dim;
        if d == 0 {
            return Ok(());
        }
        let g = self.gram();
        let scale = linalg::max_abs_matrix(&g).max(1.0);
        if linalg::max_abs_matrix(&(&g - g.adjoint())) > tol * scale {
            return Err(AlgebraError::NotCStar("trace form is not Hermitian".into()));
        }
        // Positive definiteness of the Hermitian H = A + iB is that of the real
        // symmetric [[A, -B], [B, A]]; the real Cholesky factorization fails
        // exactly on non-positive pivots.
        let eps = tol * scale;
        let h = (&g + g.adjoint()) * linalg::re(0.5);
        let real = nalgebra::DMatrix::<f64>::from_fn(2 * d, 2 * d, |r, c| {
            let z = h[(r % d, c % d)];
            match (r < d, c < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        }) - nalgebra::DMatrix::<f64>::identity(2 * d, 2 * d) * eps;
        if real.cholesky().is_none() {
            return Err(AlgebraError::NotCStar(
                "trace form a ↦ tr(L_{a*a}) is not positive definite".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Resolves a basis label or index.
    pub fn resolve_basis(&self, token: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == token)
            .or_else(|| token.parse::<usize>().ok().filter(|&i| i < self.dim))
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim)
    }

    pub fn basis(&self, i: usize) -> Vector {
        basis_vector(self.dim, i)
    }

    pub fn star_matrix(&self) -> &Matrix {
        &self.star
    }

    pub fn fibering(&self) -> &Fibering {
        &self.fibering
    }

    pub fn num_fibers(&self) -> usize {
        self.fibering.len()
    }

    pub fn layout(&self) -> Option<&ConvolutionLayout> {
        self.layout.as_deref()
    }

    pub fn resolve_fiber(&self, label: &str) -> Result<usize, AlgebraError> {
        self.fibering
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| AlgebraError::UnknownObject(label.into()))
    }

    /// Sparse coordinates of `e_i e_j`.
    pub fn product_entries(&self, i: usize, j: usize) -> &[(usize, C64)] {
        &self.table[i * self.dim + j]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        for &(k, c) in &self.table[i * self.dim + j] {
            v[k] += c;
        }
        v
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.dim;
        let xs = nonzeros(x);
        let ys = nonzeros(y);
        let mut out = Vector::zeros(d);
        for &(i, a) in &xs {
            for &(j, b) in &ys {
                let ab = a * b;
                for &(k, c) in &self.table[i * d + j] {
                    out[k] += ab * c;
                }
            }
        }
        out
    }

    pub fn star(&self, x: &Vector) -> Vector {
        &self.star * x.map(|z| z.conj())
    }

    pub fn commutator(&self, x: &Vector, y: &Vector) -> Vector {
        self.mul(x, y) - self.mul(y, x)
    }

    /// Matrix of `b ↦ a·b`.
    pub fn left_matrix(&self, a: &Vector) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for (i, c) in nonzeros(a) {
            for j in 0..d {
                for &(k, s) in &self.table[i * d + j] {
                    m[(k, j)] += c * s;
                }
            }
        }
        m
    }

    /// Matrix of `b ↦ b·a`.
    pub fn right_matrix(&self, a: &Vector) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for (j, c) in nonzeros(a) {
            for i in 0..d {
                for &(k, s) in &self.table[i * d + j] {
                    m[(k, i)] += c * s;
                }
            }
        }
        m
    }

    pub fn is_commutative(&self) -> bool {
        let tol = settings::current().tol_alg;
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| max_abs(&(self.basis_product(i, j) - self.basis_product(j, i))) <= tol)
        })
    }

    pub fn is_self_adjoint(&self, a: &Vector) -> bool {
        max_abs(&(self.star(a) - a)) <= settings::current().tol_alg
    }

    pub fn is_projection(&self, p: &Vector) -> bool {
        self.is_self_adjoint(p) && max_abs(&(self.mul(p, p) - p)) <= settings::current().tol_alg
    }

    pub fn is_unitary(&self, u: &Vector, unit: &Vector) -> bool {
        let tol = settings::current().tol_alg;
        let us = self.star(u);
        max_abs(&(self.mul(u, &us) - unit)) <= tol && max_abs(&(self.mul(&us, u) - unit)) <= tol
    }

    pub fn is_central(&self, z: &Vector) -> bool {
        let tol = settings::current().tol_alg;
        (0..self.dim).all(|i| max_abs(&self.commutator(z, &self.basis(i))) <= tol)
    }

    /// Square root of the trace-form Gram matrix, cached.
    pub fn gns(&self) -> &Gns {
        self.gns.get_or_init(|| {
            let (sqrt, inv_sqrt, _) = linalg::hermitian_sqrt(&self.gram());
            Gns { sqrt, inv_sqrt }
        })
    }

    /// `a` acting on the GNS space of the trace form, in an orthonormal basis.
    /// The map is a faithful *-representation.
    pub fn regular_rep(&self, a: &Vector) -> Matrix {
        let gns = self.gns();
        &gns.sqrt * self.left_matrix(a) * &gns.inv_sqrt
    }

    /// Operator norm in the left regular representation.
    pub fn operator_norm(&self, a: &Vector) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        linalg::spectral_norm(&self.regular_rep(a))
    }

    /// `max(sup_x Σ_{tgt g = x} ‖f(g)‖, sup_x Σ_{src g = x} ‖f(g)‖)` for a
    /// convolution algebra with counting measure.
    pub fn i_norm(&self, f: &Vector) -> Result<f64, AlgebraError> {
        let layout = self.layout.as_ref().ok_or(AlgebraError::NotConvolutionAlgebra)?;
        let mut by_tgt = vec![0.0; layout.num_objects];
        let mut by_src = vec![0.0; layout.num_objects];
        for (g, slot) in layout.slots.iter().enumerate() {
            let mut value = Vector::zeros(layout.coefficient.dim());
            for (idx, a) in slot {
                value.axpy(f[*idx], a, ONE);
            }
            let n = layout.coefficient.operator_norm(&value);
            by_tgt[layout.tgt[g]] += n;
            by_src[layout.src[g]] += n;
        }
        let sup = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        Ok(sup(&by_tgt).max(sup(&by_src)))
    }

    /// Fibers in the order of the fibering, cached.
    pub fn fibers(&self) -> &[Fiber] {
        self.fibers.get_or_init(|| {
            (0..self.fibering.len())
                .map(|x| self.build_fiber(x).expect("fiber of a validated algebra"))
                .collect()
        })
    }

    pub fn fiber(&self, x: usize) -> &Fiber {
        &self.fibers()[x]
    }

    pub fn fiber_by_label(&self, label: &str) -> Result<&Fiber, AlgebraError> {
        Ok(self.fiber(self.resolve_fiber(label)?))
    }

    fn build_fiber(&self, x: usize) -> Result<Fiber, AlgebraError> {
        let label = self.fibering.labels[x].clone();
        let p = self.fibering.projections[x].clone();
        let d = self.dim;
        if self.fibering.len() == 1 {
            let mut alg = self.clone();
            alg.layout = None;
            alg.fibering = Fibering::single(label.clone(), &self.unit);
            return Ok(Fiber {
                label,
                algebra: Arc::new(alg),
                embed: Matrix::identity(d, d),
                projection: p,
                selection: Some((0..d).collect()),
            });
        }
        let tol = settings::current().tol_alg;
        let mut span = Span::new(d, tol);
        for i in 0..d {
            span.insert(&self.mul(&p, &self.basis(i)));
        }
        let embed = span.to_matrix();
        let (algebra, selection) = self.compress(&embed, &label, Some(&p))?;
        Ok(Fiber {
            label,
            algebra: Arc::new(algebra),
            embed,
            projection: p,
            selection,
        })
    }

    /// The *-subalgebra spanned by the orthonormal columns of `q`, with a single
    /// fiber labelled `label`. `unit` is its unit in parent coordinates; when
    /// absent it is solved for.
    pub(crate) fn compress(
        &self,
        q: &Matrix,
        label: &str,
        unit: Option<&Vector>,
    ) -> Result<(StarAlgebra, Option<Vec<usize>>), AlgebraError> {
        let selection = selection_of(q);
        let k = q.ncols();
        let coords = |v: &Vector| -> Vector {
            match &selection {
                Some(sel) => Vector::from_iterator(k, sel.iter().map(|&i| v[i])),
                None => q.adjoint() * v,
            }
        };
        let cols: Vec<Vector> = (0..k).map(|a| q.column(a).into_owned()).collect();
        let labels = match &selection {
            Some(sel) => sel.iter().map(|&i| self.labels[i].clone()).collect(),
            None => (0..k).map(|a| format!("f{a}")).collect(),
        };
        let mut table = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                table.push(sparse(&coords(&self.mul(&cols[a], &cols[b]))));
            }
        }
        let mut star = Matrix::zeros(k, k);
        for a in 0..k {
            star.set_column(a, &coords(&self.star(&cols[a])));
        }
        let unit = match unit {
            Some(u) => coords(u),
            None => self.corner_unit(&cols, &coords)?,
        };
        let fibering = Fibering::single(label, &unit);
        let alg = StarAlgebra::new(labels, table, star, unit, fibering)?;
        Ok((alg, selection))
    }

    fn corner_unit(&self, cols: &[Vector], coords: &dyn Fn(&Vector) -> Vector) -> Result<Vector, AlgebraError> {
        let k = cols.len();
        if k == 0 {
            return Ok(Vector::zeros(0));
        }
        // Solve Σ_c u_c (e_c e_b) = e_b for all b, in coordinates.
        let mut sys = Matrix::zeros(k * k, k);
        let mut rhs = Vector::zeros(k * k);
        for b in 0..k {
            for c in 0..k {
                let prod = coords(&self.mul(&cols[c], &cols[b]));
                for r in 0..k {
                    sys[(b * k + r, c)] = prod[r];
                }
            }
            rhs[b * k + b] = ONE;
        }
        let svd = sys.svd(true, true);
        let u = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| AlgebraError::BadUnit(format!("sub-algebra has no unit: {e}")))?;
        Ok(u)
    }

    /// Re-expresses the algebra in the basis given by the invertible matrix
    /// `u` (column `i` = new basis vector `i` in old coordinates).
    pub fn change_basis(&self, u: &Matrix) -> Result<StarAlgebra, AlgebraError> {
        let d = self.dim;
        let uinv = u
            .clone()
            .try_inverse()
            .ok_or_else(|| AlgebraError::Shape("change of basis is not invertible".into()))?;
        let cols: Vec<Vector> = (0..d).map(|a| u.column(a).into_owned()).collect();
        let mut table = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                table.push(sparse(&(&uinv * self.mul(&cols[a], &cols[b]))));
            }
        }
        let star = &uinv * &self.star * u.map(|z| z.conj());
        let unit = &uinv * &self.unit;
        let fibering = Fibering {
            labels: self.fibering.labels.clone(),
            projections: self.fibering.projections.iter().map(|p| &uinv * p).collect(),
        };
        let labels = (0..d).map(|a| format!("b{a}")).collect();
        StarAlgebra::new(labels, table, star, unit, fibering)
    }

    /// Same algebra with new basis labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<StarAlgebra, AlgebraError> {
        if labels.len() != self.dim {
            return Err(AlgebraError::Shape(format!("{} labels for dimension {}", labels.len(), self.dim)));
        }
        let mut a = self.clone();
        a.labels = labels;
        a.fibers = OnceLock::new();
        Ok(a)
    }

    /// Same algebra with a different fibering (validated).
    pub fn refibered(&self, fibering: Fibering) -> Result<StarAlgebra, AlgebraError> {
        let mut a = self.clone();
        a.fibering = fibering;
        a.fibers = OnceLock::new();
        if a.fibering.labels.len() != a.fibering.projections.len()
            || a.fibering.projections.iter().any(|p| p.len() != a.dim)
            || a.fibering.is_empty()
        {
            return Err(AlgebraError::Shape("fibering projections must be coordinate vectors".into()));
        }
        a.check_fibering(settings::current().tol_alg)?;
        Ok(a)
    }

    /// Structure-constant equality with another algebra in the same basis.
    pub fn same_structure(&self, other: &StarAlgebra, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| max_abs(&(self.basis_product(i, j) - other.basis_product(i, j))) <= tol))
            && linalg::max_abs_matrix(&(&self.star - &other.star)) <= tol
            && max_abs(&(&self.unit - &other.unit)) <= tol
    }
}

/// If every column of `q` is a standard basis vector, the indices they select.
fn selection_of(q: &Matrix) -> Option<Vec<usize>> {
    let mut sel = Vec::with_capacity(q.ncols());
    for col in q.column_iter() {
        let mut hit = None;
        for (i, z) in col.iter().enumerate() {
            if *z == ONE && hit.is_none() {
                hit = Some(i);
            } else if *z != ZERO {
                return None;
            }
        }
        sel.push(hit?);
    }
    Some(sel)
}

/// Convenience wrapper tying coordinates to their algebra.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    pub parent: Arc<StarAlgebra>,
    pub coords: Vector,
}

impl AlgebraElement {
    pub fn new(parent: Arc<StarAlgebra>, coords: Vector) -> Self {
        assert_eq!(parent.dim(), coords.len(), "coordinate length");
        AlgebraElement { parent, coords }
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(self.parent.clone(), self.parent.mul(&self.coords, &other.coords))
    }

    pub fn star(&self) -> AlgebraElement {
        AlgebraElement::new(self.parent.clone(), self.parent.star(&self.coords))
    }

    pub fn operator_norm(&self) -> f64 {
        self.parent.operator_norm(&self.coords)
    }
}

#[cfg(test)]
mod tests;
