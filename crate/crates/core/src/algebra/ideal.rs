use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sparse, AlgebraError, Fibering, StarAlgebra, StarHom};
use crate::linalg::{self, Matrix, Span, Vector, C64};
use crate::settings;

/// A two-sided *-ideal, stored as an orthonormal basis (coordinate inner
/// product) of the subspace.
#[derive(Clone, Debug)]
pub struct Ideal {
    ambient: usize,
    basis: Matrix,
}

impl Ideal {
    pub fn zero(ambient: usize) -> Self {
        Ideal {
            ambient,
            basis: Matrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Ideal {
            ambient,
            basis: Matrix::identity(ambient, ambient),
        }
    }

    /// Wraps a subspace after checking that it is an ideal of `a`.
    pub fn from_span(a: &StarAlgebra, vectors: &[Vector]) -> Result<Self, AlgebraError> {
        let tol = settings::current().tol_alg;
        let mut span = Span::new(a.dim(), tol);
        for v in vectors {
            span.insert(v);
        }
        let ideal = Ideal {
            ambient: a.dim(),
            basis: span.to_matrix(),
        };
        ideal.verify(a)?;
        Ok(ideal)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.basis.ncols() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    fn span(&self) -> Span {
        Span::from_columns(&self.basis, settings::current().tol_alg)
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.span().contains(v)
    }

    /// Whether every basis vector of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        let span = self.span();
        other.basis.column_iter().all(|c| span.contains(&c.into_owned()))
    }

    /// Exhaustive check: closed under star and under left and right
    /// multiplication by every basis element.
    pub fn verify(&self, a: &StarAlgebra) -> Result<(), AlgebraError> {
        if self.ambient != a.dim() {
            return Err(AlgebraError::Shape("ideal lives in a different algebra".into()));
        }
        let span = self.span();
        for v in self.vectors() {
            if !span.contains(&a.star(&v)) {
                return Err(AlgebraError::NotIdeal("not closed under star".into()));
            }
            for i in 0..a.dim() {
                let e = a.basis(i);
                if !span.contains(&a.mul(&e, &v)) || !span.contains(&a.mul(&v, &e)) {
                    return Err(AlgebraError::NotIdeal(format!(
                        "not closed under multiplication by {}",
                        a.label(i)
                    )));
                }
            }
        }
        Ok(())
    }

    /// The ideal as a unital algebra in its own right (a direct summand),
    /// fibered by `p_x·1_I`, together with its inclusion.
    pub fn as_algebra(&self, a: &Arc<StarAlgebra>) -> Result<(Arc<StarAlgebra>, StarHom), AlgebraError> {
        let (sub, _) = a.compress(&self.basis, "*", None)?;
        let unit_i = &self.basis * sub.unit();
        let coords = |v: &Vector| self.basis.adjoint() * v;
        let fibering = Fibering {
            labels: a.fibering().labels.clone(),
            projections: a
                .fibering()
                .projections
                .iter()
                .map(|p| coords(&a.mul(p, &unit_i)))
                .collect(),
        };
        let sub = Arc::new(sub.refibered(fibering)?);
        let incl = StarHom::new(sub.clone(), a.clone(), self.basis.clone())?;
        Ok((sub, incl))
    }
}

/// Whether the span is closed under multiplication on both sides and under
/// star. Multiplication is tested against random elements of `a`: a nonzero
/// linear map `x ↦ (1 - P) x v` vanishes at a random `x` with probability
/// zero.
fn closed_under_random(a: &StarAlgebra, span: &Span, rng: &mut ChaCha8Rng) -> bool {
    let d = a.dim();
    let probes: Vec<Vector> = (0..2)
        .map(|_| Vector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    span.vectors().iter().all(|v| {
        span.contains(&a.star(v)) && probes.iter().all(|x| span.contains(&a.mul(x, v)) && span.contains(&a.mul(v, x)))
    })
}

/// The ideal generated by `generators` and the number of closure rounds that
/// added vectors beyond the span of the generators and their adjoints.
pub fn ideal_closure(a: &StarAlgebra, generators: &[Vector]) -> (Ideal, usize) {
    let tol = settings::current().tol_alg;
    let d = a.dim();
    let mut span = Span::new(d, tol);
    for v in generators {
        span.insert(v);
        span.insert(&a.star(v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings::current().seed);
    let mut rounds = 0;
    if !closed_under_random(a, &span, &mut rng) {
        let mut frontier_start = 0;
        loop {
            let frontier: Vec<Vector> = span.vectors()[frontier_start..].to_vec();
            frontier_start = span.len();
            let mut grew = false;
            for v in &frontier {
                grew |= span.insert(&a.star(v));
                for i in 0..d {
                    let e = a.basis(i);
                    grew |= span.insert(&a.mul(&e, v));
                    grew |= span.insert(&a.mul(v, &e));
                }
            }
            if !grew {
                break;
            }
            rounds += 1;
        }
    }
    (
        Ideal {
            ambient: d,
            basis: span.to_matrix(),
        },
        rounds,
    )
}

pub fn ideal_generated(a: &StarAlgebra, generators: &[Vector]) -> Ideal {
    ideal_closure(a, generators).0
}

/// `A/I` realized on the orthogonal complement of `I`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: Arc<StarAlgebra>,
    pub projection: StarHom,
    /// Orthonormal columns spanning the complement; `section(c) = W c`.
    pub complement: Matrix,
}

impl Quotient {
    pub fn section(&self, c: &Vector) -> Vector {
        &self.complement * c
    }
}

pub fn quotient_algebra(a: &Arc<StarAlgebra>, ideal: &Ideal) -> Result<Quotient, AlgebraError> {
    let tol = settings::current().tol_alg;
    if ideal.ambient_dim() != a.dim() {
        return Err(AlgebraError::Shape("ideal lives in a different algebra".into()));
    }
    let span = ideal.span();
    let mut rng = ChaCha8Rng::seed_from_u64(settings::current().seed ^ 0x9e37);
    if !closed_under_random(a, &span, &mut rng) {
        return Err(AlgebraError::NotIdeal("subspace is not a two-sided *-ideal".into()));
    }
    let d = a.dim();
    let w = linalg::orthogonal_complement(ideal.basis(), d, tol);
    let k = w.ncols();
    let wh = w.adjoint();
    let cols: Vec<Vector> = (0..k).map(|c| w.column(c).into_owned()).collect();
    let mut table = Vec::with_capacity(k * k);
    for x in 0..k {
        for y in 0..k {
            table.push(sparse(&(&wh * a.mul(&cols[x], &cols[y]))));
        }
    }
    let mut star = Matrix::zeros(k, k);
    for x in 0..k {
        star.set_column(x, &(&wh * a.star(&cols[x])));
    }
    let labels = match selection(&w) {
        Some(sel) => sel.iter().map(|&i| format!("[{}]", a.label(i))).collect(),
        None => (0..k).map(|c| format!("q{c}")).collect(),
    };
    let fibering = Fibering {
        labels: a.fibering().labels.clone(),
        projections: a.fibering().projections.iter().map(|p| &wh * p).collect(),
    };
    let q = Arc::new(StarAlgebra::new(labels, table, star, &wh * a.unit(), fibering)?);
    let projection = StarHom::new(a.clone(), q.clone(), wh)?;
    Ok(Quotient {
        algebra: q,
        projection,
        complement: w,
    })
}

fn selection(w: &Matrix) -> Option<Vec<usize>> {
    super::selection_of(w)
}
