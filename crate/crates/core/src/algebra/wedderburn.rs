use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, StarAlgebra};
use crate::linalg::{self, Matrix, Vector, C64};
use crate::settings;

/// Orthonormal basis (columns) of the center.
///
/// Computed as the common null space of the commutator maps `z ↦ z e_i - e_i z`,
/// intersecting one basis element at a time.
pub fn center(a: &StarAlgebra) -> Matrix {
    let d = a.dim();
    let tol = settings::current().tol_eig;
    let mut basis = Matrix::identity(d, d);
    for i in 0..d {
        if basis.ncols() == 0 {
            break;
        }
        let comm = a.right_matrix(&a.basis(i)) - a.left_matrix(&a.basis(i));
        let restricted = comm * &basis;
        if linalg::max_abs_matrix(&restricted) <= tol {
            continue;
        }
        let ns = linalg::nullspace(&restricted, tol);
        basis = &basis * ns;
    }
    basis
}

/// Block structure of a finite-dimensional C*-algebra.
#[derive(Clone, Debug)]
pub struct Wedderburn {
    /// Block sizes, ascending.
    pub blocks: Vec<usize>,
    /// Minimal central projections, in the order of `blocks`.
    pub projections: Vec<Vector>,
    pub center_dim: usize,
    pub attempts: usize,
}

impl Wedderburn {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

const ATTEMPTS: usize = 3;

/// Decomposes `a` by diagonalizing a random self-adjoint central element.
pub fn wedderburn(a: &StarAlgebra) -> Result<Wedderburn, AlgebraError> {
    let d = a.dim();
    if d == 0 {
        return Ok(Wedderburn {
            blocks: vec![],
            projections: vec![],
            center_dim: 0,
            attempts: 0,
        });
    }
    let s = settings::current();
    let z_basis = center(a);
    let zdim = z_basis.ncols();
    let gns = a.gns();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut last = String::new();
    for attempt in 1..=ATTEMPTS {
        let coef = Vector::from_fn(zdim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let c = &z_basis * coef;
        let z = &c + a.star(&c);
        let h = a.regular_rep(&z);
        let (vals, vecs) = linalg::hermitian_eigen(&h);
        let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let mut clusters: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=d {
            if i == d || vals[i] - vals[i - 1] > s.tol_eig * scale {
                clusters.push((start, i));
                start = i;
            }
        }
        if clusters.len() != zdim {
            last = format!("{} eigenvalue clusters for a center of dimension {zdim}", clusters.len());
            continue;
        }
        let mut blocks = Vec::new();
        let mut projections = Vec::new();
        let mut ok = true;
        for &(lo, hi) in &clusters {
            let mult = hi - lo;
            let root = (mult as f64).sqrt().round() as usize;
            if root * root != mult {
                last = format!("cluster of multiplicity {mult} is not a perfect square");
                ok = false;
                break;
            }
            let v = vecs.columns(lo, mult);
            let pi = &v * v.adjoint();
            let p = &gns.inv_sqrt * pi * &gns.sqrt * a.unit();
            blocks.push(root);
            projections.push(p);
        }
        if !ok {
            continue;
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&i| blocks[i]);
        return Ok(Wedderburn {
            blocks: order.iter().map(|&i| blocks[i]).collect(),
            projections: order.iter().map(|&i| projections[i].clone()).collect(),
            center_dim: zdim,
            attempts: attempt,
        });
    }
    Err(AlgebraError::DecompositionUnstable(last))
}
