use super::*;
use crate::algebra::{diagonal_tensor, functions_on, group_algebra, matrix_algebra};
use crate::group::FiniteGroup;
use crate::linalg::{Matrix, ONE};
use crate::CrossedModule;

fn z2_plain() -> CrossedModule {
    CrossedModule::from_groups(&FiniteGroup::cyclic(2), &FiniteGroup::trivial(), &[0], |_, k| k).unwrap()
}

fn z2_id() -> CrossedModule {
    let z2 = FiniteGroup::cyclic(2);
    CrossedModule::from_groups(&z2, &z2, &[0, 1], |_, k| k).unwrap()
}

fn trivial_cm() -> CrossedModule {
    let one = FiniteGroup::trivial();
    CrossedModule::from_groups(&one, &one, &[0], |_, k| k).unwrap()
}

fn e(a: &StarAlgebra, i: usize) -> Vector {
    a.basis(i)
}

/// `M_2 ⊗ C[Z2]`, basis `e_ij ⊗ δ_k` with `k` fastest.
fn m2_cz2() -> Arc<StarAlgebra> {
    let m2 = matrix_algebra(2);
    let c = group_algebra(&FiniteGroup::cyclic(2));
    let c = c.refibered(Fibering::single(m2.fibering().labels[0].clone(), c.unit())).unwrap();
    Arc::new(diagonal_tensor(&m2, &c).unwrap())
}

/// `α` trivial, `u_h = 1 ⊗ δ_h` or `u ≡ 1`.
fn m2_cz2_action(twisted: bool) -> (CMAction, Vector) {
    let d = m2_cz2();
    let one_delta = |k: usize| {
        let mut v = d.zero();
        v[k] = ONE;
        v[3 * 2 + k] = ONE;
        v
    };
    let ident = Matrix::identity(8, 8);
    let u = if twisted { vec![one_delta(0), one_delta(1)] } else { vec![one_delta(0), one_delta(0)] };
    let act = CMAction::from_parts(&z2_id(), d.clone(), vec![ident.clone(), ident], vec![u]).unwrap();
    let p = e(&d, 0);
    (act, p)
}

fn diag_pm(m2: &StarAlgebra) -> Vector {
    e(m2, 0) - e(m2, 3)
}

fn ad(a: &StarAlgebra, u: &Vector) -> Matrix {
    a.left_matrix(u) * a.right_matrix(&a.star(u))
}

#[test]
fn m2_corners_are_scalars() {
    let d = Arc::new(matrix_algebra(2));
    let act = CMAction::trivial(&trivial_cm(), d.clone()).unwrap();
    let link = linking(&act, &e(&d, 0)).unwrap();
    assert_eq!((link.corner_p.dim(), link.corner_q.dim()), (1, 1));
    let w = bimodule_check(&link).unwrap();
    assert_eq!(w.dim(), 1);
    assert!(w.identities.iter().any(|n| n.contains("u_h·ξ·v_h*")));
}

#[test]
fn c2_is_not_full() {
    let d = Arc::new(functions_on(&["a".into(), "b".into()]));
    let act = CMAction::trivial(&trivial_cm(), d.clone()).unwrap();
    let err = linking(&act, &e(&d, 0)).unwrap_err();
    assert_eq!(
        err,
        MoritaError::NotFull {
            which: "p".into(),
            ideal_dim: 1,
            dim: 2
        }
    );
}

#[test]
fn bad_projections() {
    let d = Arc::new(matrix_algebra(2));
    let act = CMAction::trivial(&trivial_cm(), d.clone()).unwrap();
    assert!(matches!(linking(&act, &e(&d, 1)), Err(MoritaError::NotProjection(_))));
    assert!(matches!(linking(&act, &(e(&d, 0) * crate::linalg::re(2.0))), Err(MoritaError::NotProjection(_))));

    // Ad of the swap moves e11 to e22
    let swap = e(&d, 1) + e(&d, 2);
    let alpha = vec![Matrix::identity(4, 4), ad(&d, &swap)];
    let act = CMAction::from_parts(&z2_plain(), d.clone(), alpha, vec![vec![d.unit().clone()]]).unwrap();
    assert!(matches!(linking(&act, &e(&d, 0)), Err(MoritaError::NotInvariant(_))));
}

#[test]
fn m2_cz2_corner_bookkeeping() {
    let (act, p) = m2_cz2_action(true);
    let link = linking(&act, &p).unwrap();
    for c in [&link.corner_p, &link.corner_q] {
        assert_eq!(c.dim(), 2);
        assert_eq!(wedderburn(c.algebra()).unwrap().blocks, vec![1, 1]);
        assert!(!c.action.has_trivial_u());
    }
    let w = bimodule_check(&link).unwrap();
    assert_eq!(w.dim(), 2);
}

#[test]
fn morita_plain_z2() {
    // ℂ ⋊ Z2 = C[Z2] on both sides
    let d = Arc::new(matrix_algebra(2));
    let act = CMAction::trivial(&z2_plain(), d.clone()).unwrap();
    let rep = verify_morita(&linking(&act, &e(&d, 0)).unwrap()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.blocks_of("a").unwrap(), &[1, 1]);
    assert_eq!(rep.blocks_of("b").unwrap(), &[1, 1]);
    assert_eq!(rep.dim("crossed_d"), Some(8));
}

#[test]
fn morita_z2_id_collapses() {
    // u ≡ 1 for (Z2, Z2, id): A ⋊ (G, G) ≅ A ⋊ (G/G), the corners collapse to ℂ ⋊ 1
    let d = Arc::new(matrix_algebra(2));
    let act = CMAction::trivial(&z2_id(), d.clone()).unwrap();
    let rep = verify_morita(&linking(&act, &e(&d, 0)).unwrap()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.blocks_of("a").unwrap(), &[1]);
    assert_eq!(rep.blocks_of("b").unwrap(), &[1]);

    // twisted M_2 ⊗ C[Z2]: A ⋊ (G, G, id) ≅ A with A = C[Z2]
    let (act, p) = m2_cz2_action(true);
    let rep = verify_morita(&linking(&act, &p).unwrap()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.dim("crossed_a"), Some(2));
    assert_eq!(rep.blocks_of("a").unwrap(), &[1, 1]);

    let (act, p) = m2_cz2_action(false);
    let rep = verify_morita(&linking(&act, &p).unwrap()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.blocks_of("a").unwrap(), &[1, 1]);
}

#[test]
fn rectangular_m3() {
    let d = Arc::new(matrix_algebra(3));
    let act = CMAction::trivial(&trivial_cm(), d.clone()).unwrap();
    let link = linking(&act, &e(&d, 0)).unwrap();
    assert_eq!((link.corner_p.dim(), link.corner_q.dim()), (1, 4));
    let rep = verify_morita(&link).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.blocks_of("a").unwrap(), &[1]);
    assert_eq!(rep.blocks_of("b").unwrap(), &[2]);
    let w = bimodule_check(&link).unwrap();
    assert_eq!(w.dim(), 2);
}

#[test]
fn sign_twist_exercises_the_triviality_condition() {
    // α = Ad(diag(1,-1)) = Ad(u), u_h = diag(1,-1): v_h = -1 on the second corner
    let d = Arc::new(matrix_algebra(2));
    let s = diag_pm(&d);
    let alpha = vec![Matrix::identity(4, 4), ad(&d, &s)];
    let act = CMAction::from_parts(&z2_id(), d.clone(), alpha, vec![vec![d.unit().clone(), s.clone()]]).unwrap();
    let link = linking(&act, &e(&d, 0)).unwrap();
    let v = link.corner_q.action.u_full(0, 1);
    assert!((v[0] + ONE).norm() < 1e-12);
    let w = bimodule_check(&link).unwrap();
    // γ_∂(h) negates e12
    assert!((w.gamma[1][(1, 0)] + ONE).norm() < 1e-12);
    let rep = verify_morita(&link).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.blocks_of("a").unwrap(), &[1]);
    assert_eq!(rep.blocks_of("b").unwrap(), &[1]);
}

#[test]
fn corrupted_corner_action_is_reported() {
    let d = Arc::new(matrix_algebra(2));
    let s = diag_pm(&d);
    let alpha = vec![Matrix::identity(4, 4), ad(&d, &s)];
    let act = CMAction::from_parts(&z2_id(), d.clone(), alpha, vec![vec![d.unit().clone(), s]]).unwrap();
    let mut link = linking(&act, &e(&d, 0)).unwrap();
    // flip v to +1: the corner action alone is still valid, the triviality condition fails
    let one = link.corner_q.algebra().unit().clone();
    link.corner_q.action = CMAction::from_parts(
        act.cm(),
        link.corner_q.algebra().clone(),
        link.corner_q.action.alpha().matrices().to_vec(),
        vec![vec![one.clone(), one]],
    )
    .unwrap();
    match bimodule_check(&link) {
        Err(MoritaError::IdentityFailed { identity, .. }) => assert!(identity.contains("γ_∂(h)")),
        other => panic!("expected an identity failure, got {other:?}"),
    }
}

#[test]
fn groupoid_linking() {
    // G = pair(2) acting on C² ⊗ M_2 fibered over its objects by translation of the points
    let gp = crate::FiniteGroupoid::pair(2);
    let cm = CrossedModule::from_isotropy(&gp).unwrap();
    let m2 = matrix_algebra(2);
    let d = crate::algebra::direct_sum(&m2, &m2).unwrap();
    let fibering = Fibering {
        labels: gp.object_labels().to_vec(),
        projections: vec![
            e(&d, 0) + e(&d, 3),
            e(&d, 4) + e(&d, 7),
        ],
    };
    let d = Arc::new(d.refibered(fibering).unwrap());
    let alpha = vec![Matrix::identity(4, 4); gp.num_arrows()];
    let beta = crate::action::GroupoidAlgebraAction::new(gp.clone(), d.clone(), alpha).unwrap();
    let act = CMAction::with_trivial_u(&cm, beta).unwrap();
    let p = e(&d, 0) + e(&d, 4);
    let link = linking(&act, &p).unwrap();
    assert_eq!(link.corner_p.dim(), 2);
    bimodule_check(&link).unwrap();
    let rep = verify_morita(&link).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
}
