//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type C64 = nalgebra::Complex<f64>;
pub type Vector = DVector<C64>;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn basis_vector(dim: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[i] = ONE;
    v
}

pub fn max_abs(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_matrix(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Incrementally grown orthonormal basis (modified Gram-Schmidt with one
/// reorthogonalization pass).
#[derive(Clone, Debug)]
pub struct Span {
    dim: usize,
    basis: Vec<Vector>,
    tol: f64,
}

impl Span {
    pub fn new(dim: usize, tol: f64) -> Self {
        Span {
            dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn from_columns(m: &Matrix, tol: f64) -> Self {
        let mut s = Span::new(m.nrows(), tol);
        for c in m.column_iter() {
            s.insert(&c.into_owned());
        }
        s
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.basis
    }

    fn project_out(&self, v: &Vector) -> Vector {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let coef = q.dotc(&r);
                r.axpy(-coef, q, ONE);
            }
        }
        r
    }

    /// Distance of `v` from the span.
    pub fn residual(&self, v: &Vector) -> f64 {
        self.project_out(v).norm()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.residual(v) <= self.tol * v.norm().max(1.0)
    }

    /// Adds `v` if it is not already (numerically) in the span. Returns whether
    /// the span grew.
    pub fn insert(&mut self, v: &Vector) -> bool {
        if self.basis.len() == self.dim {
            return false;
        }
        let r = self.project_out(v);
        let n = r.norm();
        if n <= self.tol * v.norm().max(1.0) {
            return false;
        }
        self.basis.push(r / re(n));
        true
    }

    pub fn to_matrix(&self) -> Matrix {
        columns_to_matrix(self.dim, &self.basis)
    }
}

pub fn columns_to_matrix(rows: usize, cols: &[Vector]) -> Matrix {
    let mut m = Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn nullspace(m: &Matrix, tol: f64) -> Matrix {
    let n = m.ncols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    let padded = if m.nrows() < n {
        let mut p = Matrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    let cols: Vec<Vector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint().into_owned())
        .collect();
    // Re-orthonormalize for determinism of downstream Gram-Schmidt.
    let mut span = Span::new(n, tol);
    for c in &cols {
        span.insert(c);
    }
    span.to_matrix()
}

pub fn rank(m: &Matrix, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    svd.singular_values.iter().filter(|s| **s > cutoff).count()
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &Matrix, tol: f64) -> Matrix {
    Span::from_columns(m, tol).to_matrix()
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` in an ambient space of dimension `dim`.
///
/// Column-pivoted Gram-Schmidt on `I - qq^H`, so complements of coordinate
/// subspaces come out as standard basis vectors.
pub fn orthogonal_complement(q: &Matrix, dim: usize, tol: f64) -> Matrix {
    let k = dim - q.ncols().min(dim);
    let mut resid = Matrix::identity(dim, dim);
    if q.ncols() > 0 {
        resid -= q * q.adjoint();
    }
    let mut out: Vec<Vector> = Vec::with_capacity(k);
    for _ in 0..k {
        let (best, norm) = (0..dim)
            .map(|i| (i, resid.column(i).norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        if norm <= tol {
            break;
        }
        let w: Vector = resid.column(best).into_owned() / re(norm);
        let coef = w.adjoint() * &resid;
        resid -= &w * coef;
        out.push(w);
    }
    columns_to_matrix(dim, &out)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

/// `(P^{1/2}, P^{-1/2}, smallest eigenvalue)` for a Hermitian positive definite `P`.
pub fn hermitian_sqrt(p: &Matrix) -> (Matrix, Matrix, f64) {
    let (vals, vecs) = hermitian_eigen(p);
    let n = p.nrows();
    let min = vals.first().copied().unwrap_or(f64::INFINITY);
    let mut sq = Matrix::zeros(n, n);
    let mut isq = Matrix::zeros(n, n);
    for (k, &l) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let outer = &col * col.adjoint();
        let l = l.max(0.0);
        sq += &outer * re(l.sqrt());
        if l > 0.0 {
            isq += outer * re(1.0 / l.sqrt());
        }
    }
    (sq, isq, min)
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    let mut out = Vector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}
