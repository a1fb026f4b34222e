//! Randomized suites over fixed fixtures, 200 trials each, seeded so that
//! reruns see the same cases.

use std::sync::Arc;

use crossmod::action::CMAction;
use crossmod::algebra::{direct_sum, group_algebra, groupoid_algebra, matrix_algebra, wedderburn, StarAlgebra};
use crossmod::crossed_product::{canonical_action_on_bh, cm_crossed_product, left_translation, rho_sigma, RhoSigma};
use crossmod::linalg::{max_abs, Matrix, Vector, C64};
use crossmod::settings;
use crossmod::{CrossedModule, FiniteGroup, FiniteGroupoid};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const TRIALS: u32 = 200;

fn runner() -> TestRunner {
    let config = Config {
        cases: TRIALS,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]))
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * n)
}

fn complex(v: &[f64]) -> Vec<C64> {
    v.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

fn random_unitary(d: usize, raw: &[f64]) -> Matrix {
    let m = Matrix::from_iterator(d, d, complex(raw)) + Matrix::identity(d, d) * C64::new(0.5, 0.0);
    m.qr().q()
}

pub fn small_algebras() -> Vec<Arc<StarAlgebra>> {
    let k = FiniteGroupoid::action_groupoid(&FiniteGroup::cyclic(2), vec!["1".into(), "2".into(), "3".into()], |g, x| {
        if g == 1 && x < 2 {
            1 - x
        } else {
            x
        }
    })
    .unwrap();
    vec![
        Arc::new(group_algebra(&FiniteGroup::symmetric(3).unwrap())),
        Arc::new(direct_sum(&matrix_algebra(2), &matrix_algebra(1)).unwrap()),
        Arc::new(group_algebra(&FiniteGroup::cyclic(4))),
        Arc::new(groupoid_algebra(&k)),
    ]
}

pub fn convolution_algebras() -> Vec<Arc<StarAlgebra>> {
    let k = FiniteGroupoid::action_groupoid(&FiniteGroup::cyclic(2), vec!["1".into(), "2".into(), "3".into()], |g, x| {
        if g == 1 && x < 2 {
            1 - x
        } else {
            x
        }
    })
    .unwrap();
    vec![
        Arc::new(group_algebra(&FiniteGroup::cyclic(5))),
        Arc::new(group_algebra(&FiniteGroup::symmetric(3).unwrap())),
        Arc::new(groupoid_algebra(&FiniteGroupoid::pair(3))),
        Arc::new(groupoid_algebra(&k)),
    ]
}

fn cm(g: &FiniteGroup, h: &FiniteGroup, d: &[usize]) -> CrossedModule {
    CrossedModule::from_groups(g, h, d, |_, k| k).unwrap()
}

pub fn cm_actions() -> Vec<CMAction> {
    let (z2, z4) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(4));
    let z4z2 = cm(&z4, &z2, &[0, 2]);
    let z2z2 = cm(&z2, &z2, &[0, 1]);
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let s3a3 = CrossedModule::from_normal_subgroup(&s3, &[0, 1, 2]).unwrap();
    let c = Arc::new(matrix_algebra(1));
    let m2 = Arc::new(matrix_algebra(2));
    let s = m2.basis(0) - m2.basis(3);
    let ad = m2.left_matrix(&s) * m2.right_matrix(&s);
    let sign = CMAction::from_parts(&z2z2, m2.clone(), vec![Matrix::identity(4, 4), ad], vec![vec![m2.unit().clone(), s]]).unwrap();
    let k = FiniteGroupoid::action_groupoid(&z2, vec!["1".into(), "2".into(), "3".into()], |g, x| if g == 1 && x < 2 { 1 - x } else { x }).unwrap();
    vec![
        CMAction::trivial(&z4z2, c.clone()).unwrap(),
        CMAction::trivial(&s3a3, c).unwrap(),
        canonical_action_on_bh(&z2z2, &left_translation(&FiniteGroupoid::from_group(&z2)).unwrap()).unwrap().action,
        sign,
        CMAction::on_objects(&CrossedModule::from_isotropy(&k).unwrap()).unwrap(),
    ]
}

/// Block multisets survive a random unitary change of basis.
pub fn wedderburn_basis_invariance() -> Result<(), String> {
    let algebras = small_algebras();
    let expected: Vec<Vec<usize>> = algebras.iter().map(|a| wedderburn(a).unwrap().blocks).collect();
    let d_max = algebras.iter().map(|a| a.dim()).max().unwrap();
    finish(runner().run(&(0..algebras.len(), entries(d_max * d_max)), |(i, raw)| {
        let a = &algebras[i];
        let d = a.dim();
        let u = random_unitary(d, &raw[..2 * d * d]);
        let b = a.change_basis(&u).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let w = wedderburn(&b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&w.blocks, &expected[i]);
        prop_assert_eq!(w.blocks.iter().map(|n| n * n).sum::<usize>(), d);
        Ok(())
    }))
}

/// `‖f‖ ≤ ‖f‖_I` in the regular representation.
pub fn operator_norm_bounded_by_i_norm() -> Result<(), String> {
    let algebras = convolution_algebras();
    let tol = settings::current().tol_alg;
    let d_max = algebras.iter().map(|a| a.dim()).max().unwrap();
    finish(runner().run(&(0..algebras.len(), entries(d_max), 0.0f64..4.0), |(i, raw, scale)| {
        let a = &algebras[i];
        let f = Vector::from_vec(complex(&raw[..2 * a.dim()])) * C64::new(scale, 0.0);
        let (op, i_norm) = (a.operator_norm(&f), a.i_norm(&f).unwrap());
        prop_assert!(op <= i_norm + tol, "{} > {}", op, i_norm);
        Ok(())
    }))
}

/// `ρ*` and `σ*` are multiplicative and *-preserving on basis pairs.
pub fn rho_sigma_are_star_homs() -> Result<(), String> {
    let maps: Vec<RhoSigma> = cm_actions().iter().map(|a| rho_sigma(a).unwrap()).collect();
    let tol = settings::current().tol_alg;
    finish(runner().run(&(0..maps.len(), any::<u64>(), any::<u64>()), |(i, x, y)| {
        let m = &maps[i];
        let dom = &m.domain.algebra;
        let (x, y) = (dom.basis(x as usize % dom.dim()), dom.basis(y as usize % dom.dim()));
        for hom in [&m.rho_star, &m.sigma_star] {
            let t = hom.target();
            let mult = hom.apply(&dom.mul(&x, &y)) - t.mul(&hom.apply(&x), &hom.apply(&y));
            let star = hom.apply(&dom.star(&x)) - t.star(&hom.apply(&x));
            prop_assert!(max_abs(&mult) <= tol && max_abs(&star) <= tol);
        }
        Ok(())
    }))
}

/// The range of `ρ* - σ*` is already an ideal, also after moving the action
/// along a random unitary change of basis.
pub fn range_is_an_ideal() -> Result<(), String> {
    let actions = cm_actions();
    let dims: Vec<usize> = actions.iter().map(|a| cm_crossed_product(a).unwrap().dim()).collect();
    let d_max = actions.iter().map(|a| a.algebra().dim()).max().unwrap();
    finish(runner().run(&(0..actions.len(), entries(d_max * d_max)), |(i, raw)| {
        let act = &actions[i];
        let a = act.algebra();
        let d = a.dim();
        let u = random_unitary(d, &raw[..2 * d * d]);
        let uinv = u.adjoint();
        let b = Arc::new(a.change_basis(&u).map_err(|e| TestCaseError::fail(e.to_string()))?);
        let moved = act.transport(b, &uinv, &u).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let cp = cm_crossed_product(&moved).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(cp.extra_rounds, 0);
        prop_assert_eq!(cp.dim(), dims[i]);
        Ok(())
    }))
}
