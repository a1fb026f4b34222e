use super::{AlgebraError, Fibering, StarAlgebra};
use crate::linalg::{kron_vec, Matrix, Vector};

/// `⊕_x A_x ⊗ B_x` for algebras fibered over the same labels. The basis runs
/// over fibers in order, and within a fiber over pairs `(a, b)` of fiber basis
/// elements with `b` varying fastest.
pub fn diagonal_tensor(a: &StarAlgebra, b: &StarAlgebra) -> Result<StarAlgebra, AlgebraError> {
    if a.fibering().labels != b.fibering().labels {
        return Err(AlgebraError::FiberMismatch(format!(
            "fibered over {:?} and {:?}",
            a.fibering().labels,
            b.fibering().labels
        )));
    }
    let n = a.num_fibers();
    let mut offsets = Vec::with_capacity(n);
    let mut dim = 0;
    for x in 0..n {
        offsets.push(dim);
        dim += a.fiber(x).dim() * b.fiber(x).dim();
    }
    let mut labels = Vec::with_capacity(dim);
    let mut owner = Vec::with_capacity(dim);
    for x in 0..n {
        let (fa, fb) = (&a.fiber(x).algebra, &b.fiber(x).algebra);
        for i in 0..fa.dim() {
            for j in 0..fb.dim() {
                labels.push(format!("{}⊗{}", fa.label(i), fb.label(j)));
                owner.push((x, i, j));
            }
        }
    }
    let embed = |x: usize, v: &Vector| {
        let mut out = Vector::zeros(dim);
        out.rows_mut(offsets[x], v.len()).copy_from(v);
        out
    };
    let mut table = Vec::with_capacity(dim * dim);
    for p in 0..dim {
        let (x, i, j) = owner[p];
        let (fa, fb) = (&a.fiber(x).algebra, &b.fiber(x).algebra);
        for q in 0..dim {
            let (y, k, l) = owner[q];
            if x != y {
                table.push(vec![]);
                continue;
            }
            let mut entries = Vec::new();
            for &(s, c) in fa.product_entries(i, k) {
                for &(t, e) in fb.product_entries(j, l) {
                    entries.push((offsets[x] + s * fb.dim() + t, c * e));
                }
            }
            table.push(entries);
        }
    }
    let mut star = Matrix::zeros(dim, dim);
    for p in 0..dim {
        let (x, i, j) = owner[p];
        let (fa, fb) = (&a.fiber(x).algebra, &b.fiber(x).algebra);
        let col = kron_vec(&fa.star_matrix().column(i).into_owned(), &fb.star_matrix().column(j).into_owned());
        star.set_column(p, &embed(x, &col));
    }
    let mut unit = Vector::zeros(dim);
    let mut projections = Vec::with_capacity(n);
    for x in 0..n {
        let (fa, fb) = (&a.fiber(x).algebra, &b.fiber(x).algebra);
        let p = embed(x, &kron_vec(fa.unit(), fb.unit()));
        unit += &p;
        projections.push(p);
    }
    let fibering = Fibering {
        labels: a.fibering().labels.clone(),
        projections,
    };
    StarAlgebra::new(labels, table, star, unit, fibering)
}
