use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::group::FiniteGroup;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{re, Vector};

fn pts(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn complex_line() -> StarAlgebra {
    let unit = Vector::from_element(1, ONE);
    StarAlgebra::new(
        vec!["1".into()],
        vec![vec![(0, ONE)]],
        Matrix::identity(1, 1),
        unit.clone(),
        Fibering::single("*", &unit),
    )
    .unwrap()
}

#[test]
fn one_dimensional_algebra() {
    let c = complex_line();
    assert_eq!(c.dim(), 1);
    assert_eq!(wedderburn(&c).unwrap().blocks, vec![1]);
}

#[test]
fn matrix_units_and_bad_involution() {
    let m2 = matrix_algebra(2);
    assert_eq!(m2.dim(), 4);
    let mut table = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            table.push(m2.product_entries(i, j).to_vec());
        }
    }
    let err = StarAlgebra::new(
        m2.labels().to_vec(),
        table,
        Matrix::identity(4, 4),
        m2.unit().clone(),
        m2.fibering().clone(),
    )
    .unwrap_err();
    assert!(matches!(err, AlgebraError::BadInvolution(_)), "{err:?}");
}

#[test]
fn non_cstar_algebra_is_rejected() {
    // C[Z2] with the involution δ_g* = -δ_g is a *-algebra but the trace
    // form is indefinite.
    let g = group_algebra(&FiniteGroup::cyclic(2));
    let mut table = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            table.push(g.product_entries(i, j).to_vec());
        }
    }
    let mut star = Matrix::identity(2, 2);
    star[(1, 1)] = -ONE;
    let err = StarAlgebra::new(g.labels().to_vec(), table, star, g.unit().clone(), g.fibering().clone()).unwrap_err();
    assert!(matches!(err, AlgebraError::NotCStar(_)), "{err:?}");
}

#[test]
fn non_associative_is_rejected() {
    // e0 = unit, e1*e1 = e1 + e2, e1*e2 = e2, e2*e1 = 0, e2*e2 = 0
    let d = 3;
    let mut table = vec![vec![]; d * d];
    for i in 0..d {
        table[i] = vec![(i, ONE)];
        table[i * d] = vec![(i, ONE)];
    }
    table[4] = vec![(1, ONE), (2, ONE)];
    table[5] = vec![(2, ONE)];
    let unit = basis_vector(3, 0);
    let err = StarAlgebra::new(pts(&["1", "a", "b"]), table, Matrix::identity(3, 3), unit.clone(), Fibering::single("*", &unit))
        .unwrap_err();
    assert!(matches!(err, AlgebraError::NotAssociative { .. }), "{err:?}");
}

#[test]
fn standard_block_structures() {
    assert_eq!(wedderburn(&matrix_algebra(2)).unwrap().blocks, vec![2]);
    assert_eq!(wedderburn(&matrix_algebra(3)).unwrap().blocks, vec![3]);
    let x = functions_on(&pts(&["1", "2", "3"]));
    assert_eq!(x.dim(), 3);
    assert_eq!(wedderburn(&x).unwrap().blocks, vec![1, 1, 1]);
    let s = direct_sum(&matrix_algebra(2), &complex_line()).unwrap();
    assert_eq!(s.dim(), 5);
    assert_eq!(wedderburn(&s).unwrap().blocks, vec![1, 2]);
}

/// Number of conjugacy classes and of one-dimensional characters
/// (the order of the abelianization), computed from the group table.
fn class_data(g: &FiniteGroup) -> (usize, usize) {
    let mut seen = vec![false; g.order()];
    let mut classes = 0;
    for x in g.elements() {
        if !seen[x] {
            classes += 1;
            for y in g.elements() {
                seen[g.conj(y, x)] = true;
            }
        }
    }
    let commutators: Vec<usize> = g
        .elements()
        .flat_map(|a| g.elements().map(move |b| (a, b)))
        .map(|(a, b)| g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))))
        .collect();
    let derived = g.generated_by(&commutators);
    (classes, g.order() / derived.len())
}

#[test]
fn group_algebras_match_character_counts() {
    for g in [
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(5),
        FiniteGroup::klein4(),
        FiniteGroup::symmetric(3).unwrap(),
    ] {
        let a = group_algebra(&g);
        let w = wedderburn(&a).unwrap();
        let (classes, linear) = class_data(&g);
        assert_eq!(w.num_blocks(), classes);
        assert_eq!(w.blocks.iter().filter(|&&b| b == 1).count(), linear);
        assert_eq!(w.blocks.iter().map(|b| b * b).sum::<usize>(), g.order());
        assert_eq!(center(&a).ncols(), classes);
    }
    let s3 = group_algebra(&FiniteGroup::symmetric(3).unwrap());
    assert_eq!(wedderburn(&s3).unwrap().blocks, vec![1, 1, 2]);
}

#[test]
fn z2_group_algebra_splits_by_characters() {
    let a = group_algebra(&FiniteGroup::cyclic(2));
    let w = wedderburn(&a).unwrap();
    assert_eq!(w.blocks, vec![1, 1]);
    // the minimal central projections are (δ_0 ± δ_1)/2
    let half = re(0.5);
    let plus = Vector::from_vec(vec![half, half]);
    let minus = Vector::from_vec(vec![half, -half]);
    for p in &w.projections {
        assert!(max_abs(&(p - &plus)) < 1e-9 || max_abs(&(p - &minus)) < 1e-9);
    }
}

#[test]
fn pair_groupoid_algebra_is_matrix_algebra() {
    let a = groupoid_algebra(&FiniteGroupoid::pair(3));
    assert_eq!(a.dim(), 9);
    assert!(a.same_structure(&matrix_algebra(3), 1e-12));
    assert_eq!(wedderburn(&a).unwrap().blocks, vec![3]);
}

#[test]
fn centers() {
    assert_eq!(center(&matrix_algebra(2)).ncols(), 1);
    assert_eq!(center(&group_algebra(&FiniteGroup::cyclic(2))).ncols(), 2);
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let a = group_algebra(&s3);
    let z = center(&a);
    assert_eq!(z.ncols(), 3);
    let span = Span::from_columns(&z, 1e-9);
    // class sums of {e}, the 3-cycles and the transpositions
    for class in [vec![0], vec![1, 2], vec![3, 4, 5]] {
        let mut v = Vector::zeros(6);
        for i in class {
            v[i] = ONE;
        }
        assert!(span.contains(&v));
    }
}

#[test]
fn generated_ideals() {
    let m2 = matrix_algebra(2);
    assert_eq!(ideal_generated(&m2, &[m2.basis(0)]).dim(), 4);
    let c3 = functions_on(&pts(&["1", "2", "3"]));
    let i = ideal_generated(&c3, &[c3.basis(0)]);
    assert_eq!(i.dim(), 1);
    assert!(i.verify(&c3).is_ok());
    assert!(ideal_generated(&c3, &[]).is_zero());
}

#[test]
fn quotients() {
    let c3 = Arc::new(functions_on(&pts(&["1", "2", "3"])));
    let q = quotient_algebra(&c3, &Ideal::zero(3)).unwrap();
    assert!(q.algebra.same_structure(&c3, 1e-12));

    let i = ideal_generated(&c3, &[c3.basis(0)]);
    let q = quotient_algebra(&c3, &i).unwrap();
    assert_eq!(q.algebra.dim(), 2);
    assert_eq!(wedderburn(&q.algebra).unwrap().blocks, vec![1, 1]);

    // C[Z4] / (δ_2 - δ_0): characters of Z4 trivial on 2 are ±1, so C[Z2]
    let z4 = Arc::new(group_algebra(&FiniteGroup::cyclic(4)));
    let i = ideal_generated(&z4, &[z4.basis(2) - z4.basis(0)]);
    let q = quotient_algebra(&z4, &i).unwrap();
    assert_eq!(q.algebra.dim(), 2);
    assert!(q.algebra.is_commutative());
    assert_eq!(wedderburn(&q.algebra).unwrap().blocks, vec![1, 1]);
    // [δ_1]^2 = [δ_0] = 1 in the quotient
    let g = q.projection.apply(&z4.basis(1));
    assert!(max_abs(&(q.algebra.mul(&g, &g) - q.algebra.unit())) < 1e-9);

    let sub = Ideal::from_span(&c3, &[c3.basis(0) + c3.basis(1)]);
    assert!(matches!(sub, Err(AlgebraError::NotIdeal(_))));
}

#[test]
fn quotient_by_image_ideal_is_identity() {
    let z4 = Arc::new(group_algebra(&FiniteGroup::cyclic(4)));
    let i = ideal_generated(&z4, &[z4.basis(2) - z4.basis(0)]);
    let q = quotient_algebra(&z4, &i).unwrap();
    let image = ideal_generated(&q.algebra, &i.vectors().iter().map(|v| q.projection.apply(v)).collect::<Vec<_>>());
    assert!(image.is_zero());
    let again = quotient_algebra(&q.algebra, &image).unwrap();
    assert!(again.algebra.same_structure(&q.algebra, 1e-12));
}

#[test]
fn diagonal_tensors() {
    let x = pts(&["x1", "x2"]);
    let unit_fibers = functions_on(&x);
    let mut a = direct_sum(&matrix_algebra(2), &complex_line()).unwrap();
    a = a
        .refibered(Fibering {
            labels: x.clone(),
            projections: a.fibering().projections.clone(),
        })
        .unwrap();
    let t = diagonal_tensor(&a, &unit_fibers).unwrap();
    assert!(t.same_structure(&a, 1e-12));
    assert_eq!(wedderburn(&t).unwrap().blocks, vec![1, 2]);

    let cc = diagonal_tensor(&unit_fibers, &unit_fibers).unwrap();
    assert!(cc.same_structure(&unit_fibers, 1e-12));

    let other = functions_on(&pts(&["y1", "y2"]));
    assert!(matches!(diagonal_tensor(&a, &other), Err(AlgebraError::FiberMismatch(_))));
}

#[test]
fn fibers() {
    let f = functions_on(&pts(&["1", "2"]));
    let fib = f.fiber_by_label("1").unwrap();
    assert_eq!(fib.algebra.dim(), 1);
    assert!(matches!(f.fiber_by_label("7"), Err(AlgebraError::UnknownObject(_))));

    let mut s = direct_sum(&matrix_algebra(2), &complex_line()).unwrap();
    s = s
        .refibered(Fibering {
            labels: pts(&["a", "b"]),
            projections: s.fibering().projections.clone(),
        })
        .unwrap();
    let fa = s.fiber_by_label("a").unwrap();
    assert!(fa.algebra.same_structure(&matrix_algebra(2), 1e-12));
    assert_eq!(s.fiber_by_label("b").unwrap().algebra.dim(), 1);
}

#[test]
fn norms() {
    let a = group_algebra(&FiniteGroup::cyclic(2));
    assert!((a.operator_norm(a.unit()) - 1.0).abs() < 1e-9);
    let plus = a.basis(0) + a.basis(1);
    let minus = a.basis(0) - a.basis(1);
    assert!((a.operator_norm(&plus) - 2.0).abs() < 1e-9);
    assert!((a.i_norm(&plus).unwrap() - 2.0).abs() < 1e-12);
    assert!((a.operator_norm(&minus) - 2.0).abs() < 1e-9);
    assert!((a.i_norm(&minus).unwrap() - 2.0).abs() < 1e-12);
    let m2 = matrix_algebra(2);
    assert!((m2.operator_norm(m2.unit()) - 1.0).abs() < 1e-9);
    assert!((m2.operator_norm(&m2.basis(1)) - 1.0).abs() < 1e-9);
    assert_eq!(m2.i_norm(m2.unit()), Err(AlgebraError::NotConvolutionAlgebra));
}

#[test]
fn unitary_change_of_basis_keeps_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = group_algebra(&FiniteGroup::symmetric(3).unwrap());
    let u = random_unitary(6, &mut rng);
    let b = a.change_basis(&u).unwrap();
    assert_eq!(wedderburn(&b).unwrap().blocks, vec![1, 1, 2]);
}

#[test]
fn star_homs() {
    let c = Arc::new(functions_on(&pts(&["1", "2"])));
    let m2 = Arc::new(matrix_algebra(2));
    // diagonal embedding C^2 -> M_2
    let mut m = Matrix::zeros(4, 2);
    m[(0, 0)] = ONE;
    m[(3, 1)] = ONE;
    let h = StarHom::new(c.clone(), m2.clone(), m).unwrap();
    assert!(h.is_unital() && h.is_injective() && !h.is_surjective());
    let mut bad = Matrix::zeros(4, 2);
    bad[(1, 0)] = ONE;
    assert!(StarHom::new(c, m2, bad).is_err());
}
