//! Structural invariants, checked exhaustively on fixtures or on random inputs.

use std::collections::BTreeSet;
use std::sync::Arc;

use crossmod::action::{CMAction, GroupoidAlgebraAction};
use crossmod::algebra::{
    diagonal_tensor, direct_sum, functions_on, group_algebra, ideal_generated, matrix_algebra, quotient_algebra, wedderburn,
    Fibering, StarAlgebra, StarHom,
};
use crossmod::crossed_product::{cm_crossed_product, crossed_product};
use crossmod::linalg::{max_abs, Matrix, Vector, C64, ONE};
use crossmod::pontryagin::{pontryagin_compose, pontryagin_decompose, spectral_projections, CharacterGroup};
use crossmod::{bimodule_check, linking, make_hom, quotient_group, verify_morita, CrossedModule, FiniteGroup, FiniteGroupoid};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn groups() -> Vec<FiniteGroup> {
    let mut v: Vec<FiniteGroup> = (1..=12).map(FiniteGroup::cyclic).collect();
    v.push(FiniteGroup::klein4());
    v.push(FiniteGroup::symmetric(3).unwrap());
    v.push(FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(6)).unwrap());
    v.push(FiniteGroup::cyclic(2).direct_product(&FiniteGroup::symmetric(3).unwrap()).unwrap());
    v
}

fn swap_groupoid() -> FiniteGroupoid {
    let objects = vec!["1".into(), "2".into(), "3".into()];
    FiniteGroupoid::action_groupoid(&FiniteGroup::cyclic(2), objects, |g, x| if g == 1 && x < 2 { 1 - x } else { x }).unwrap()
}

fn groupoids() -> Vec<FiniteGroupoid> {
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let s3_on_3 = FiniteGroupoid::action_groupoid(&s3, vec!["a".into(), "b".into(), "c".into()], |g, x| {
        // S3 acts on three points through its cycle labels
        let perm = permutation_of(&s3, g);
        perm[x]
    })
    .unwrap();
    vec![
        swap_groupoid(),
        FiniteGroupoid::pair(3),
        FiniteGroupoid::from_group(&FiniteGroup::cyclic(4)),
        FiniteGroupoid::pair(2).disjoint_union(&FiniteGroupoid::from_group(&FiniteGroup::cyclic(3))),
        s3_on_3,
    ]
}

/// The permutation of {0,1,2} given by the conjugation action of `g` on the
/// three transpositions of S3.
fn permutation_of(s3: &FiniteGroup, g: usize) -> Vec<usize> {
    let transpositions: Vec<usize> = s3.elements().filter(|&t| s3.element_order(t) == 2).collect();
    transpositions
        .iter()
        .map(|&t| transpositions.iter().position(|&s| s == s3.conj(g, t)).unwrap())
        .collect()
}

fn cms() -> Vec<CrossedModule> {
    let (z2, z3, z4) = (FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4));
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let mut v = vec![
        CrossedModule::from_groups(&z2, &z2, &[0, 1], |_, k| k).unwrap(),
        CrossedModule::from_groups(&z4, &z2, &[0, 2], |_, k| k).unwrap(),
        CrossedModule::from_normal_subgroup(&s3, &[0, 1, 2]).unwrap(),
        CrossedModule::from_abelian_extension(&s3, &[0, 1, 2]).unwrap(),
        CrossedModule::from_normal_subgroup(&FiniteGroup::klein4(), &[0, 1]).unwrap(),
    ];
    for n in 1..=6 {
        v.push(CrossedModule::b_group(&FiniteGroup::cyclic(n)).unwrap());
    }
    v.push(CrossedModule::b_group(&z3).unwrap());
    for k in groupoids() {
        v.push(CrossedModule::from_isotropy(&k).unwrap());
    }
    v
}

#[test]
fn groups_are_associative() {
    for g in groups() {
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }
}

fn normal_subgroups(g: &FiniteGroup) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for a in g.elements() {
        for b in g.elements() {
            let mut n = g.generated_by(&[a, b]);
            // normal closure
            loop {
                let closed: BTreeSet<usize> = n.iter().flat_map(|&x| g.elements().map(move |y| (x, y))).map(|(x, y)| g.conj(y, x)).collect();
                let next = g.generated_by(&closed.into_iter().collect::<Vec<_>>());
                if next.len() == n.len() {
                    break;
                }
                n = next;
            }
            n.sort_unstable();
            out.insert(n);
        }
    }
    out
}

#[test]
fn quotient_kernel_is_the_normal_subgroup() {
    for g in groups().into_iter().filter(|g| g.order() <= 12) {
        for n in normal_subgroups(&g) {
            let (q, pi) = quotient_group(&g, &n).unwrap();
            assert_eq!(q.order() * n.len(), g.order());
            let mut k = pi.kernel();
            k.sort_unstable();
            assert_eq!(k, n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn make_hom_matches_exhaustive_check(n in 1usize..7, m in 1usize..7, raw in prop::collection::vec(0usize..36, 6)) {
        let (src, dst) = (FiniteGroup::cyclic(n), FiniteGroup::cyclic(m));
        let assignment: Vec<usize> = raw[..n].iter().map(|x| x % m).collect();
        let multiplicative = src.elements().all(|a| src.elements().all(|b| assignment[src.mul(a, b)] == dst.mul(assignment[a], assignment[b])));
        prop_assert_eq!(make_hom(&src, &dst, assignment).is_ok(), multiplicative);
    }

    #[test]
    fn corrupted_tables_are_rejected(i in 0usize..16, cell in any::<(usize, usize, usize)>()) {
        let g = &groups()[i];
        let n = g.order();
        prop_assume!(n > 1);
        let mut table: Vec<Vec<usize>> = g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect();
        let (r, c) = (cell.0 % n, cell.1 % n);
        table[r][c] = (table[r][c] + 1 + cell.2 % (n - 1)) % n;
        prop_assert!(FiniteGroup::from_table(g.labels().to_vec(), table).is_err());
    }
}

fn assert_groupoid(k: &FiniteGroupoid) {
    for a in k.arrows() {
        assert_eq!(k.comp(k.unit(k.tgt(a)), a), a);
        assert_eq!(k.comp(a, k.unit(k.src(a))), a);
        assert_eq!(k.comp(a, k.inv(a)), k.unit(k.tgt(a)));
        for b in k.arrows().filter(|&b| k.composable(a, b)) {
            for c in k.arrows().filter(|&c| k.composable(b, c)) {
                assert_eq!(k.comp(k.comp(a, b), c), k.comp(a, k.comp(b, c)));
            }
        }
    }
}

#[test]
fn transformation_groupoids_and_chi() {
    for cm in cms() {
        let (hg, idx) = cm.transformation_groupoid();
        assert_groupoid(&hg);
        let g = cm.groupoid();
        let arrows: Vec<usize> = idx.pairs.iter().map(|&(h, a)| g.comp(cm.d(g.tgt(a), h), a)).collect();
        let chi = crossmod::GroupoidHom::new(hg, g.clone(), g.objects().collect(), arrows.clone()).unwrap();
        assert_eq!(chi.arrow_map(), &arrows[..]);
        assert_eq!(cm.chi().arrow_map(), &arrows[..]);
    }
}

#[test]
fn isotropy_quotient_counts() {
    for k in groupoids() {
        let (bundle, incl) = k.isotropy();
        let (q, pi) = k.quotient(&incl).unwrap();
        assert_groupoid(&q);
        // each orbit becomes a pair groupoid
        let expected: usize = k.orbits().iter().map(|o| o.len() * o.len()).sum();
        assert_eq!(q.num_arrows(), expected);
        let per_arrow: usize = k.arrows().map(|a| 1.0 / bundle.fiber(k.tgt(a)).order() as f64).sum::<f64>().round() as usize;
        assert_eq!(q.num_arrows(), per_arrow);
        assert!(pi.is_surjective());
        crossmod::GroupoidHom::new(k.clone(), q.clone(), pi.object_map().to_vec(), pi.arrow_map().to_vec()).unwrap();
    }
}

#[test]
fn kernel_central_and_image_normal() {
    for cm in cms() {
        let g = cm.groupoid();
        for x in g.objects() {
            let hx = cm.bundle().fiber(x);
            for k in hx.elements().filter(|&k| cm.d(x, k) == g.unit(x)) {
                for a in hx.elements() {
                    assert_eq!(hx.mul(a, k), hx.mul(k, a));
                }
            }
            let image: BTreeSet<usize> = hx.elements().map(|h| cm.d(x, h)).collect();
            for l in g.loops(x) {
                for &i in &image {
                    assert!(image.contains(&g.comp(g.comp(l, i), g.inv(l))));
                }
            }
        }
        cm.check_derived().unwrap();
    }
}

fn add_sparse(a: &StarAlgebra, raw: &[(usize, f64, f64)]) -> Vector {
    let mut v = a.zero();
    for &(i, re, im) in raw {
        v[i % a.dim()] += C64::new(re, im);
    }
    v
}

fn arb_sparse() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((any::<usize>(), -1.0f64..1.0, -1.0f64..1.0), 1..3)
}

fn two_fibers(a: StarAlgebra, b: StarAlgebra) -> StarAlgebra {
    let (da, db) = (a.dim(), b.dim());
    let s = direct_sum(&a, &b).unwrap();
    let mut pa = Vector::zeros(da + db);
    pa.rows_mut(0, da).copy_from(a.unit());
    let mut pb = Vector::zeros(da + db);
    pb.rows_mut(da, db).copy_from(b.unit());
    s.refibered(Fibering {
        labels: vec!["x".into(), "y".into()],
        projections: vec![pa, pb],
    })
    .unwrap()
}

fn tensor_factors() -> Vec<StarAlgebra> {
    let one = |a: StarAlgebra| a.refibered(Fibering::single("*", &a.unit().clone())).unwrap();
    vec![
        one(matrix_algebra(2)),
        one(group_algebra(&FiniteGroup::cyclic(3))),
        one(functions_on(&["p".into(), "q".into()])),
        one(group_algebra(&FiniteGroup::symmetric(3).unwrap())),
    ]
}

/// The coordinate map sending basis label `l` to `target`'s basis label `rename(l)`.
fn by_labels(source: &StarAlgebra, target: &StarAlgebra, rename: impl Fn(&str) -> String) -> Matrix {
    let mut m = Matrix::zeros(target.dim(), source.dim());
    for (i, l) in source.labels().iter().enumerate() {
        let j = target.labels().iter().position(|t| *t == rename(l)).unwrap();
        m[(j, i)] = ONE;
    }
    m
}

fn flip(l: &str) -> String {
    let (a, b) = l.rsplit_once('⊗').unwrap();
    format!("{b}⊗{a}")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn quotient_by_generated_ideal_is_idempotent(which in 0usize..3, raw in arb_sparse()) {
        let algebras = [
            group_algebra(&FiniteGroup::symmetric(3).unwrap()),
            direct_sum(&matrix_algebra(2), &matrix_algebra(1)).unwrap(),
            functions_on(&["a".into(), "b".into(), "c".into()]),
        ];
        let a = Arc::new(algebras[which].clone());
        let ideal = ideal_generated(&a, &[add_sparse(&a, &raw)]);
        prop_assert_eq!(ideal_generated(&a, &ideal.vectors()).dim(), ideal.dim());
        let q = quotient_algebra(&a, &ideal).unwrap();
        prop_assert_eq!(q.algebra.dim() + ideal.dim(), a.dim());
        let image: Vec<Vector> = ideal.vectors().iter().map(|v| q.projection.apply(v)).collect();
        let again = ideal_generated(&q.algebra, &image);
        prop_assert_eq!(again.dim(), 0);
        let q2 = quotient_algebra(&q.algebra, &again).unwrap();
        prop_assert_eq!(q2.algebra.dim(), q.algebra.dim());
        prop_assert_eq!(wedderburn(&q2.algebra).unwrap().blocks, wedderburn(&q.algebra).unwrap().blocks);
    }

    #[test]
    fn tensor_is_symmetric_monoidal(i in 0usize..4, j in 0usize..4, k in 0usize..4) {
        let f = tensor_factors();
        let (a, b, c) = (&f[i], &f[j], &f[k]);
        let ab = Arc::new(diagonal_tensor(a, b).unwrap());
        let ba = Arc::new(diagonal_tensor(b, a).unwrap());
        let swap = StarHom::new(ab.clone(), ba.clone(), by_labels(&ab, &ba, flip)).unwrap();
        prop_assert!(swap.is_isomorphism());
        let left = Arc::new(diagonal_tensor(&ab, c).unwrap());
        let right = Arc::new(diagonal_tensor(a, &diagonal_tensor(b, c).unwrap()).unwrap());
        let assoc = StarHom::new(left.clone(), right.clone(), by_labels(&left, &right, |l| l.to_string())).unwrap();
        prop_assert!(assoc.is_isomorphism());
    }

    #[test]
    fn fibered_tensor_is_symmetric(i in 0usize..3, j in 0usize..3) {
        let parts = [matrix_algebra(1), matrix_algebra(2), group_algebra(&FiniteGroup::cyclic(2))];
        let a = two_fibers(parts[i].clone(), parts[j].clone());
        let b = two_fibers(parts[j].clone(), parts[(i + 1) % 3].clone());
        let ab = Arc::new(diagonal_tensor(&a, &b).unwrap());
        let ba = Arc::new(diagonal_tensor(&b, &a).unwrap());
        // labels repeat across fibers, so swap positions within each fiber
        let mut m = Matrix::zeros(ab.dim(), ab.dim());
        let mut off = 0;
        for x in 0..2 {
            let (da, db) = (a.fiber(x).dim(), b.fiber(x).dim());
            for i in 0..da {
                for j in 0..db {
                    m[(off + j * da + i, off + i * db + j)] = ONE;
                }
            }
            off += da * db;
        }
        let swap = StarHom::new(ab.clone(), ba.clone(), m).unwrap();
        prop_assert!(swap.is_isomorphism());
    }

    #[test]
    fn pontryagin_round_trip(which in 0usize..4, fibers in prop::collection::vec(0usize..3, 4)) {
        let h = [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4), FiniteGroup::klein4()][which].clone();
        let chars = CharacterGroup::new(&h).unwrap();
        let parts = [matrix_algebra(1), matrix_algebra(2), functions_on(&["s".into(), "t".into()])];
        let mut sum = parts[fibers[0]].clone();
        let mut dims = vec![sum.dim()];
        for &f in &fibers[1..chars.len()] {
            sum = direct_sum(&sum, &parts[f]).unwrap();
            dims.push(parts[f].dim());
        }
        let mut off = 0;
        let projections = dims.iter().enumerate().map(|(n, &d)| {
            let mut p = Vector::zeros(sum.dim());
            p.rows_mut(off, d).copy_from(parts[fibers[n]].unit());
            off += d;
            p
        }).collect();
        let sum = Arc::new(sum.refibered(Fibering { labels: chars.labels(), projections }).unwrap());
        let act = pontryagin_compose(&sum, &chars).unwrap();
        let p = spectral_projections(&act, 0, &chars);
        let a = act.algebra();
        let total = p.iter().fold(a.zero(), |s, q| s + q);
        prop_assert!(max_abs(&(total - a.unit())) <= TOL);
        for (x, px) in p.iter().enumerate() {
            for (y, py) in p.iter().enumerate() {
                let expect = if x == y { px.clone() } else { a.zero() };
                prop_assert!(max_abs(&(a.mul(px, py) - expect)) <= TOL);
            }
        }
        let dec = pontryagin_decompose(&act).unwrap();
        prop_assert_eq!(dec.fiber_dims(), dims);
        let back = pontryagin_compose(&dec.algebra, &dec.characters).unwrap();
        for k in h.elements() {
            prop_assert!(max_abs(&(back.u_full(0, k) - act.u_full(0, k))) <= TOL);
        }
    }

    #[test]
    fn morita_on_conjugated_projections(rank in 1usize..3, raw in prop::collection::vec(-1.0f64..1.0, 18)) {
        // trivial action of plain Z2 on M_3, p a random rank-1 or rank-2 projection
        let m3 = Arc::new(matrix_algebra(3));
        let z = Matrix::from_iterator(3, 3, raw.chunks(2).map(|c| C64::new(c[0], c[1]))) + Matrix::identity(3, 3);
        let u = z.qr().q();
        let mut diag = Matrix::zeros(3, 3);
        for r in 0..rank {
            diag[(r, r)] = ONE;
        }
        let pm = &u * diag * u.adjoint();
        let p = Vector::from_iterator(9, (0..9).map(|i| pm[(i / 3, i % 3)]));
        let cm = CrossedModule::from_groups(&FiniteGroup::cyclic(2), &FiniteGroup::trivial(), &[0], |_, k| k).unwrap();
        let act = CMAction::trivial(&cm, m3).unwrap();
        let link = linking(&act, &p).unwrap();
        prop_assert_eq!(link.corner_p.dim(), rank * rank);
        bimodule_check(&link).unwrap();
        let rep = verify_morita(&link).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.first_failure());
    }
}

#[test]
fn crossed_product_dimension_counts_targets() {
    for k in groupoids() {
        let a = Arc::new(functions_on(k.object_labels()));
        let act = GroupoidAlgebraAction::trivial(k.clone(), a.clone());
        let Ok(act) = act else { continue };
        let cp = crossed_product(&act).unwrap();
        let expected: usize = k.arrows().map(|g| act.algebra().fiber(k.tgt(g)).dim()).sum();
        assert_eq!(cp.dim(), expected);
    }
    for g in groups().into_iter().take(6) {
        let a = Arc::new(matrix_algebra(2));
        let act = GroupoidAlgebraAction::trivial(FiniteGroupoid::from_group(&g), a).unwrap();
        assert_eq!(crossed_product(&act).unwrap().dim(), 4 * g.order());
    }
}

#[test]
fn trivial_u_matches_quotient_by_image() {
    let algebras = [matrix_algebra(1), group_algebra(&FiniteGroup::cyclic(2)), matrix_algebra(2)];
    for cm in cms().into_iter().filter(|c| c.is_group_case()) {
        let g = cm.group().unwrap();
        let image: Vec<usize> = {
            let s: BTreeSet<usize> = cm.bundle().fiber(0).elements().map(|h| cm.d(0, h)).collect();
            s.into_iter().collect()
        };
        let (q, _) = quotient_group(&g, &image).unwrap();
        for a in &algebras {
            let a = Arc::new(a.clone());
            let cp = cm_crossed_product(&CMAction::trivial(&cm, a.clone()).unwrap()).unwrap();
            let reference = crossed_product(&GroupoidAlgebraAction::trivial(FiniteGroupoid::from_group(&q), a).unwrap()).unwrap();
            assert_eq!(cp.dim(), reference.dim());
            assert_eq!(wedderburn(cp.algebra()).unwrap().blocks, wedderburn(&reference.algebra).unwrap().blocks);
        }
    }
}
