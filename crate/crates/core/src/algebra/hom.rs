use std::sync::Arc;

use super::{AlgebraError, StarAlgebra};
use crate::linalg::{self, max_abs, Matrix, Vector};
use crate::settings;

/// A linear map on coordinates that is multiplicative and star-preserving.
/// Unitality is not required.
#[derive(Clone, Debug)]
pub struct StarHom {
    source: Arc<StarAlgebra>,
    target: Arc<StarAlgebra>,
    matrix: Matrix,
}

impl StarHom {
    pub fn new(source: Arc<StarAlgebra>, target: Arc<StarAlgebra>, matrix: Matrix) -> Result<Self, AlgebraError> {
        if matrix.nrows() != target.dim() || matrix.ncols() != source.dim() {
            return Err(AlgebraError::Shape(format!(
                "map must be {}×{}, got {}×{}",
                target.dim(),
                source.dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let h = StarHom { source, target, matrix };
        h.validate()?;
        Ok(h)
    }

    pub fn identity(a: Arc<StarAlgebra>) -> Self {
        let d = a.dim();
        StarHom {
            source: a.clone(),
            target: a,
            matrix: Matrix::identity(d, d),
        }
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let tol = settings::current().tol_alg;
        let (s, t) = (&self.source, &self.target);
        let images: Vec<Vector> = (0..s.dim()).map(|i| self.matrix.column(i).into_owned()).collect();
        for i in 0..s.dim() {
            let lhs = self.apply(&s.star(&s.basis(i)));
            let rhs = t.star(&images[i]);
            if max_abs(&(lhs - rhs)) > tol {
                return Err(AlgebraError::NotHomomorphism(format!(
                    "does not preserve the star of {}",
                    s.label(i)
                )));
            }
            for j in 0..s.dim() {
                let mut lhs = Vector::zeros(t.dim());
                for &(k, c) in s.product_entries(i, j) {
                    lhs.axpy(c, &images[k], crate::linalg::ONE);
                }
                let rhs = t.mul(&images[i], &images[j]);
                if max_abs(&(lhs - rhs)) > tol {
                    return Err(AlgebraError::NotHomomorphism(format!(
                        "f({0}·{1}) != f({0})·f({1})",
                        s.label(i),
                        s.label(j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<StarAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StarAlgebra> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, a: &Vector) -> Vector {
        &self.matrix * a
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &StarHom) -> Result<StarHom, AlgebraError> {
        if self.target.dim() != other.source.dim() {
            return Err(AlgebraError::Shape("maps are not composable".into()));
        }
        StarHom::new(self.source.clone(), other.target.clone(), &other.matrix * &self.matrix)
    }

    pub fn is_unital(&self) -> bool {
        max_abs(&(self.apply(self.source.unit()) - self.target.unit())) <= settings::current().tol_alg
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix, settings::current().tol_alg)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target.dim()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.dim() == self.target.dim() && self.is_injective()
    }

    /// Orthonormal basis of the kernel.
    pub fn kernel(&self) -> Matrix {
        if self.target.dim() == 0 {
            return Matrix::identity(self.source.dim(), self.source.dim());
        }
        linalg::nullspace(&self.matrix, settings::current().tol_alg)
    }

    /// Orthonormal basis of the image.
    pub fn image(&self) -> Matrix {
        linalg::column_space(&self.matrix, settings::current().tol_alg)
    }
}
