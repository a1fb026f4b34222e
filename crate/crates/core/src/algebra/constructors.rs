use std::sync::Arc;

use rand::Rng;

use super::{AlgebraError, ConvolutionLayout, Fibering, StarAlgebra};
use crate::group::FiniteGroup;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{basis_vector, Matrix, Vector, C64, ONE};

/// `M_n` in the matrix-unit basis; `e_ij` has index `i*n + j`.
pub fn matrix_algebra(n: usize) -> StarAlgebra {
    assert!(n >= 1, "matrix_algebra needs n >= 1");
    let d = n * n;
    let labels = (0..d)
        .map(|a| {
            if n < 10 {
                format!("e{}{}", a / n + 1, a % n + 1)
            } else {
                format!("e{}_{}", a / n + 1, a % n + 1)
            }
        })
        .collect();
    let mut table = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let (i, j) = (a / n, a % n);
            let (k, l) = (b / n, b % n);
            table.push(if j == k { vec![(i * n + l, ONE)] } else { vec![] });
        }
    }
    let mut star = Matrix::zeros(d, d);
    for a in 0..d {
        star[((a % n) * n + a / n, a)] = ONE;
    }
    let mut unit = Vector::zeros(d);
    for i in 0..n {
        unit[i * n + i] = ONE;
    }
    let fibering = Fibering::single("*", &unit);
    StarAlgebra::new(labels, table, star, unit, fibering).expect("matrix algebra")
}

/// `C(X)` with the point-mass basis, fibered over `X` by the point masses.
pub fn functions_on(points: &[String]) -> StarAlgebra {
    assert!(!points.is_empty(), "functions_on needs a nonempty set");
    let d = points.len();
    let labels = points.iter().map(|p| format!("δ{p}")).collect();
    let mut table = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            table.push(if a == b { vec![(a, ONE)] } else { vec![] });
        }
    }
    let fibering = Fibering {
        labels: points.to_vec(),
        projections: (0..d).map(|a| basis_vector(d, a)).collect(),
    };
    let unit = Vector::from_element(d, ONE);
    StarAlgebra::new(labels, table, Matrix::identity(d, d), unit, fibering).expect("function algebra")
}

/// `A ⊕ B`, with the fiberings concatenated. Colliding fiber labels of `B`
/// get a prime appended.
pub fn direct_sum(a: &StarAlgebra, b: &StarAlgebra) -> Result<StarAlgebra, AlgebraError> {
    let (m, n) = (a.dim(), b.dim());
    let d = m + n;
    let labels = a.labels().iter().chain(b.labels()).cloned().collect();
    let mut table = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            table.push(match (i < m, j < m) {
                (true, true) => a.product_entries(i, j).to_vec(),
                (false, false) => b.product_entries(i - m, j - m).iter().map(|&(k, c)| (k + m, c)).collect(),
                _ => vec![],
            });
        }
    }
    let mut star = Matrix::zeros(d, d);
    star.view_mut((0, 0), (m, m)).copy_from(a.star_matrix());
    star.view_mut((m, m), (n, n)).copy_from(b.star_matrix());
    let pad_a = |v: &Vector| Vector::from_iterator(d, v.iter().cloned().chain(std::iter::repeat_n(C64::new(0.0, 0.0), n)));
    let pad_b = |v: &Vector| Vector::from_iterator(d, std::iter::repeat_n(C64::new(0.0, 0.0), m).chain(v.iter().cloned()));
    let unit = pad_a(a.unit()) + pad_b(b.unit());
    let mut fl: Vec<String> = a.fibering().labels.clone();
    let mut fp: Vec<Vector> = a.fibering().projections.iter().map(pad_a).collect();
    for (label, p) in b.fibering().labels.iter().zip(&b.fibering().projections) {
        let mut label = label.clone();
        while fl.contains(&label) {
            label.push('\'');
        }
        fl.push(label);
        fp.push(pad_b(p));
    }
    StarAlgebra::new(
        labels,
        table,
        star,
        unit,
        Fibering {
            labels: fl,
            projections: fp,
        },
    )
}

/// The convolution algebra of a finite groupoid with counting measure. The
/// basis is `δ_g` for the arrows `g`; the fibering is over orbits, since only
/// orbit sums of units are central.
pub fn groupoid_algebra(k: &FiniteGroupoid) -> StarAlgebra {
    let d = k.num_arrows();
    let labels = k.arrow_labels().iter().map(|l| format!("δ{l}")).collect();
    let mut table = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            table.push(match k.try_comp(a, b) {
                Some(ab) => vec![(ab, ONE)],
                None => vec![],
            });
        }
    }
    let mut star = Matrix::zeros(d, d);
    for a in 0..d {
        star[(k.inv(a), a)] = ONE;
    }
    let mut unit = Vector::zeros(d);
    for x in k.objects() {
        unit[k.unit(x)] = ONE;
    }
    let fibering = orbit_fibering(k, |x| basis_vector(d, k.unit(x)));
    let coefficient = Arc::new(functions_on(k.object_labels()));
    let layout = ConvolutionLayout {
        coefficient,
        num_objects: k.num_objects(),
        src: k.arrows().map(|a| k.src(a)).collect(),
        tgt: k.arrows().map(|a| k.tgt(a)).collect(),
        slots: k.arrows().map(|a| vec![(a, basis_vector(k.num_objects(), k.tgt(a)))]).collect(),
    };
    StarAlgebra::new(labels, table, star, unit, fibering)
        .expect("groupoid algebra")
        .with_layout(layout)
}

pub fn group_algebra(g: &FiniteGroup) -> StarAlgebra {
    groupoid_algebra(&FiniteGroupoid::from_group(g))
}

/// Fibering over the orbits of `k`; `unit_at(x)` is the central contribution
/// of object `x`. Orbit labels join the object labels with `+`.
pub(crate) fn orbit_fibering(k: &FiniteGroupoid, unit_at: impl Fn(usize) -> Vector) -> Fibering {
    let mut labels = Vec::new();
    let mut projections = Vec::new();
    for orbit in k.orbits() {
        labels.push(orbit.iter().map(|&x| k.object_label(x)).collect::<Vec<_>>().join("+"));
        let mut p = unit_at(orbit[0]);
        for &x in &orbit[1..] {
            p += unit_at(x);
        }
        projections.push(p);
    }
    Fibering { labels, projections }
}

/// A unitary from the QR factorization of a random complex matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    let m = Matrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}
