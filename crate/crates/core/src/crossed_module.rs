//! Crossed modules `(G, H, ∂, c)` of finite groupoids and the groupoids built
//! from them.
//!
//! `G` is a groupoid over `X`, `H` a group bundle over `X`, `∂` sends
//! `H_x` into the loops at `x`, and each arrow `g` carries an isomorphism
//! `c_g: H_{src g} → H_{tgt g}`. Groups are the one-object case.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::group::{quotient_group, FiniteGroup, GroupError, GroupHom};
use crate::groupoid::{FiniteGroupoid, GroupBundle, GroupoidError, GroupoidHom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossedModuleError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("c_{g} is not a group isomorphism: {reason}")]
    NotAutomorphism { g: String, reason: String },
    #[error("∂ is not a homomorphism on the fiber at {x}: witnessed by ({a}, {b})")]
    NotHomomorphism { x: String, a: String, b: String },
    #[error("axiom ∂(c_g(h)) = g∂(h)g⁻¹ fails at g={g}, h={h}")]
    Axiom1Violation { g: String, h: String },
    #[error("axiom c_∂(h)(k) = hkh⁻¹ fails at h={h}, k={k}")]
    Axiom2Violation { h: String, k: String },
    #[error("c is not functorial: {0}")]
    NotFunctorial(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedModule {
    g: FiniteGroupoid,
    h: GroupBundle,
    d: Vec<Vec<usize>>,
    c: Vec<Vec<usize>>,
}

impl CrossedModule {
    /// Validates the data exhaustively. `d[x][h]` is the arrow `∂(h)` for
    /// `h ∈ H_x`; `c[g][h]` is `c_g(h)` for `h ∈ H_{src g}`.
    pub fn new(
        g: FiniteGroupoid,
        h: GroupBundle,
        d: Vec<Vec<usize>>,
        c: Vec<Vec<usize>>,
    ) -> Result<Self, CrossedModuleError> {
        let cm = CrossedModule { g, h, d, c };
        cm.validate()?;
        Ok(cm)
    }

    /// Group case: `d` is the list `∂(h)` and `c(g, h)` the action.
    pub fn from_groups(
        g: &FiniteGroup,
        h: &FiniteGroup,
        d: &[usize],
        c: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, CrossedModuleError> {
        let gg = FiniteGroupoid::from_group(g);
        let bundle = GroupBundle::new(gg.object_labels().to_vec(), vec![h.clone()]);
        let c = g.elements().map(|a| h.elements().map(|k| c(a, k)).collect()).collect();
        Self::new(gg, bundle, vec![d.to_vec()], c)
    }

    /// `(G, N, inclusion, conjugation)` for a normal subgroup `N`.
    pub fn from_normal_subgroup(g: &FiniteGroup, normal: &[usize]) -> Result<Self, CrossedModuleError> {
        g.check_normal(normal)?;
        let (n, incl) = g.subgroup(normal)?;
        let elems = incl.map().to_vec();
        let pos = |x: usize| elems.iter().position(|&e| e == x).expect("normal");
        Self::from_groups(g, &n, &elems, |a, k| pos(g.conj(a, elems[k])))
    }

    /// `({1}, H, trivial, trivial)` for abelian `H`.
    pub fn b_group(h: &FiniteGroup) -> Result<Self, CrossedModuleError> {
        h.check_abelian()?;
        let one = FiniteGroup::trivial();
        Self::from_groups(&one, h, &vec![0; h.order()], |_, k| k)
    }

    /// `(E/H, H, trivial, conjugation)` for an abelian normal subgroup `H ⊆ E`.
    pub fn from_abelian_extension(e: &FiniteGroup, normal: &[usize]) -> Result<Self, CrossedModuleError> {
        e.check_normal(normal)?;
        let (h, incl) = e.subgroup(normal)?;
        h.check_abelian()?;
        let (q, proj) = quotient_group(e, normal)?;
        let elems = incl.map().to_vec();
        let pos = |x: usize| elems.iter().position(|&v| v == x).expect("normal");
        let rep: Vec<usize> = q
            .elements()
            .map(|c| e.elements().find(|&x| proj.apply(x) == c).expect("coset"))
            .collect();
        for coset in q.elements() {
            for x in e.elements().filter(|&x| proj.apply(x) == coset) {
                for &k in &elems {
                    assert_eq!(e.conj(x, k), e.conj(rep[coset], k), "conjugation descends for abelian H");
                }
            }
        }
        Self::from_groups(&q, &h, &vec![0; h.order()], |a, k| pos(e.conj(rep[a], elems[k])))
    }

    /// `(K, isotropy(K), inclusion, conjugation)`.
    pub fn from_isotropy(k: &FiniteGroupoid) -> Result<Self, CrossedModuleError> {
        let (bundle, incl) = k.isotropy();
        let c = k
            .arrows()
            .map(|g| {
                let (s, t) = (k.src(g), k.tgt(g));
                incl[s]
                    .iter()
                    .map(|&l| {
                        let conj = k.comp(k.comp(g, l), k.inv(g));
                        incl[t].iter().position(|&m| m == conj).expect("loop")
                    })
                    .collect()
            })
            .collect();
        Self::new(k.clone(), bundle, incl, c)
    }

    fn validate(&self) -> Result<(), CrossedModuleError> {
        let (g, h) = (&self.g, &self.h);
        if h.base_len() != g.num_objects() {
            return Err(CrossedModuleError::Shape(format!(
                "H has {} fibers but G has {} objects",
                h.base_len(),
                g.num_objects()
            )));
        }
        if self.d.len() != g.num_objects() || self.c.len() != g.num_arrows() {
            return Err(CrossedModuleError::Shape("∂ needs one map per object and c one per arrow".into()));
        }
        for x in g.objects() {
            let fx = h.fiber(x);
            if self.d[x].len() != fx.order() {
                return Err(CrossedModuleError::Shape(format!("∂ not total on H_{}", g.object_label(x))));
            }
            for (k, &a) in self.d[x].iter().enumerate() {
                if a >= g.num_arrows() || g.src(a) != x || g.tgt(a) != x {
                    return Err(CrossedModuleError::Shape(format!(
                        "∂({}) is not a loop at {}",
                        fx.label(k),
                        g.object_label(x)
                    )));
                }
            }
        }
        for a in g.arrows() {
            let (s, t) = (h.fiber(g.src(a)), h.fiber(g.tgt(a)));
            let ca = &self.c[a];
            let name = || g.arrow_label(a).to_string();
            if ca.len() != s.order() || s.order() != t.order() {
                return Err(CrossedModuleError::NotAutomorphism {
                    g: name(),
                    reason: "wrong number of values".into(),
                });
            }
            if ca.iter().any(|&v| v >= t.order()) || ca.iter().collect::<BTreeSet<_>>().len() != ca.len() {
                return Err(CrossedModuleError::NotAutomorphism {
                    g: name(),
                    reason: "not a bijection".into(),
                });
            }
            for x in s.elements() {
                for y in s.elements() {
                    if ca[s.mul(x, y)] != t.mul(ca[x], ca[y]) {
                        return Err(CrossedModuleError::NotAutomorphism {
                            g: name(),
                            reason: format!("not multiplicative on ({}, {})", s.label(x), s.label(y)),
                        });
                    }
                }
            }
        }
        for x in g.objects() {
            let fx = h.fiber(x);
            for a in fx.elements() {
                for b in fx.elements() {
                    if self.d[x][fx.mul(a, b)] != g.comp(self.d[x][a], self.d[x][b]) {
                        return Err(CrossedModuleError::NotHomomorphism {
                            x: g.object_label(x).into(),
                            a: fx.label(a).into(),
                            b: fx.label(b).into(),
                        });
                    }
                }
            }
        }
        for a in g.arrows() {
            let (s, t) = (g.src(a), g.tgt(a));
            for k in h.fiber(s).elements() {
                let lhs = self.d[t][self.c[a][k]];
                let rhs = g.comp(g.comp(a, self.d[s][k]), g.inv(a));
                if lhs != rhs {
                    return Err(CrossedModuleError::Axiom1Violation {
                        g: g.arrow_label(a).into(),
                        h: h.fiber(s).label(k).into(),
                    });
                }
            }
        }
        for x in g.objects() {
            let fx = h.fiber(x);
            for a in fx.elements() {
                let da = self.d[x][a];
                for k in fx.elements() {
                    if self.c[da][k] != fx.conj(a, k) {
                        return Err(CrossedModuleError::Axiom2Violation {
                            h: fx.label(a).into(),
                            k: fx.label(k).into(),
                        });
                    }
                }
            }
        }
        for x in g.objects() {
            let u = g.unit(x);
            if self.c[u].iter().enumerate().any(|(k, &v)| k != v) {
                return Err(CrossedModuleError::NotFunctorial(format!(
                    "c at the unit of {} is not the identity",
                    g.object_label(x)
                )));
            }
        }
        for a in g.arrows() {
            for b in g.arrows().filter(|&b| g.composable(a, b)) {
                let ab = g.comp(a, b);
                for k in h.fiber(g.src(b)).elements() {
                    if self.c[ab][k] != self.c[a][self.c[b][k]] {
                        return Err(CrossedModuleError::NotFunctorial(format!(
                            "c_({}{}) != c_{}∘c_{} at {}",
                            g.arrow_label(a),
                            g.arrow_label(b),
                            g.arrow_label(a),
                            g.arrow_label(b),
                            h.fiber(g.src(b)).label(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.g
    }

    pub fn bundle(&self) -> &GroupBundle {
        &self.h
    }

    /// `∂(h)` for `h ∈ H_x`, as an arrow of `G`.
    pub fn d(&self, x: usize, h: usize) -> usize {
        self.d[x][h]
    }

    /// `c_g(h)` for `h ∈ H_{src g}`.
    pub fn c(&self, g: usize, h: usize) -> usize {
        self.c[g][h]
    }

    pub fn is_group_case(&self) -> bool {
        self.g.is_group()
    }

    /// `G` as a group (one-object case only).
    pub fn group(&self) -> Option<FiniteGroup> {
        self.is_group_case().then(|| self.g.isotropy_group(0).0)
    }

    /// `∂ : H → G` as a group homomorphism (one-object case only).
    pub fn d_hom(&self) -> Option<GroupHom> {
        let g = self.group()?;
        GroupHom::new(self.h.fiber(0).clone(), g, self.d[0].clone()).ok()
    }

    /// `ker ∂` is central and `∂(H_x)` is normal in the isotropy at `x`.
    pub fn check_derived(&self) -> Result<(), String> {
        for x in self.g.objects() {
            let fx = self.h.fiber(x);
            let unit = self.g.unit(x);
            for k in fx.elements().filter(|&k| self.d[x][k] == unit) {
                if fx.elements().any(|a| fx.mul(a, k) != fx.mul(k, a)) {
                    return Err(format!("ker ∂ is not central at {}", self.g.object_label(x)));
                }
            }
            let image: BTreeSet<usize> = self.d[x].iter().copied().collect();
            for l in self.g.loops(x) {
                for &i in &image {
                    if !image.contains(&self.g.comp(self.g.comp(l, i), self.g.inv(l))) {
                        return Err(format!("∂(H) is not normal at {}", self.g.object_label(x)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Indexing of pairs `(h, g)` with `h ∈ H_{tgt g}`.
    pub fn pair_index(&self) -> PairIndex {
        let mut offsets = Vec::with_capacity(self.g.num_arrows());
        let mut pairs = Vec::new();
        for g in self.g.arrows() {
            offsets.push(pairs.len());
            for h in self.h.fiber(self.g.tgt(g)).elements() {
                pairs.push((h, g));
            }
        }
        PairIndex { pairs, offsets }
    }

    fn pair_label(&self, h: usize, g: usize) -> String {
        format!(
            "({},{})",
            self.h.fiber(self.g.tgt(g)).label(h),
            self.g.arrow_label(g)
        )
    }

    /// `H ⋊_c G`: arrows `(h, g)` with `h ∈ H_{tgt g}`, endpoints those of `g`,
    /// and `(h1,g1)(h2,g2) = (h1·c_{g1}(h2), g1g2)`.
    pub fn transformation_groupoid(&self) -> (FiniteGroupoid, PairIndex) {
        let idx = self.pair_index();
        let g = &self.g;
        let labels = idx.pairs.iter().map(|&(h, a)| self.pair_label(h, a)).collect();
        let src = idx.pairs.iter().map(|&(_, a)| g.src(a)).collect();
        let tgt = idx.pairs.iter().map(|&(_, a)| g.tgt(a)).collect();
        let out = FiniteGroupoid::from_fn(g.object_labels().to_vec(), labels, src, tgt, |p, q| {
            let (h1, g1) = idx.pairs[p];
            let (h2, g2) = idx.pairs[q];
            let fiber = self.h.fiber(g.tgt(g1));
            idx.index(fiber.mul(h1, self.c[g1][h2]), g.comp(g1, g2))
        })
        .expect("H⋊G is a groupoid");
        (out, idx)
    }

    /// `χ: H ⋊_c G → G`, `(h, g) ↦ ∂(h)g`.
    pub fn chi(&self) -> GroupoidHom {
        let (hg, idx) = self.transformation_groupoid();
        let arrow_map = idx
            .pairs
            .iter()
            .map(|&(h, g)| self.g.comp(self.d[self.g.tgt(g)][h], g))
            .collect();
        GroupoidHom::new(hg, self.g.clone(), self.g.objects().collect(), arrow_map).expect("χ is a homomorphism")
    }

    /// `H ⋉_∂ G`: objects are the arrows of `G`, and `(h, g')` goes from `g'`
    /// to `∂(h)g'`. Arrows share the indexing of [`CrossedModule::pair_index`].
    pub fn translation_groupoid(&self) -> (FiniteGroupoid, PairIndex) {
        let idx = self.pair_index();
        let g = &self.g;
        let labels = idx.pairs.iter().map(|&(h, a)| self.pair_label(h, a)).collect();
        let src = idx.pairs.iter().map(|&(_, a)| a).collect();
        let tgt = idx
            .pairs
            .iter()
            .map(|&(h, a)| g.comp(self.d[g.tgt(a)][h], a))
            .collect();
        let out = FiniteGroupoid::from_fn(g.arrow_labels().to_vec(), labels, src, tgt, |p, q| {
            let (h2, _) = idx.pairs[p];
            let (h1, a) = idx.pairs[q];
            idx.index(self.h.fiber(g.tgt(a)).mul(h2, h1), a)
        })
        .expect("H⋉G is a groupoid");
        (out, idx)
    }
}

/// Dense indexing of pairs `(h, g)` with `h ∈ H_{tgt g}`, ordered by `g` then `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairIndex {
    pub pairs: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl PairIndex {
    pub fn index(&self, h: usize, g: usize) -> usize {
        self.offsets[g] + h
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_z2() -> CrossedModule {
        CrossedModule::from_groups(&FiniteGroup::cyclic(4), &FiniteGroup::cyclic(2), &[0, 2], |_, k| k).unwrap()
    }

    #[test]
    fn simple_crossed_modules() {
        let z2 = FiniteGroup::cyclic(2);
        assert!(CrossedModule::from_groups(&z2, &z2, &[0, 1], |_, k| k).is_ok());
        let cm = z4_z2();
        assert!(cm.check_derived().is_ok());
    }

    #[test]
    fn axiom1_witness() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let z2 = FiniteGroup::cyclic(2);
        let t12 = s3.index_of("(1 2)").unwrap();
        let err = CrossedModule::from_groups(&s3, &z2, &[0, t12], |_, k| k).unwrap_err();
        assert_eq!(
            err,
            CrossedModuleError::Axiom1Violation {
                g: "(1 2 3)".into(),
                h: "1".into()
            }
        );
    }

    #[test]
    fn normal_subgroup_examples() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let cm = CrossedModule::from_normal_subgroup(&s3, &[0, 1, 2]).unwrap();
        assert_eq!(cm.bundle().fiber(0).order(), 3);
        assert!(CrossedModule::from_normal_subgroup(&s3, &[0]).is_ok());
        assert!(CrossedModule::from_normal_subgroup(&s3, &[0, 1, 2, 3, 4, 5]).is_ok());
        assert!(matches!(
            CrossedModule::from_normal_subgroup(&s3, &[0, 4]),
            Err(CrossedModuleError::Group(GroupError::NotNormal { .. }))
        ));
    }

    #[test]
    fn b_groups() {
        assert!(CrossedModule::b_group(&FiniteGroup::cyclic(2)).is_ok());
        assert!(CrossedModule::b_group(&FiniteGroup::cyclic(6)).is_ok());
        assert!(matches!(
            CrossedModule::b_group(&FiniteGroup::symmetric(3).unwrap()),
            Err(CrossedModuleError::Group(GroupError::NotAbelian { .. }))
        ));
    }

    #[test]
    fn abelian_extensions() {
        let cm = CrossedModule::from_abelian_extension(&FiniteGroup::cyclic(4), &[0, 2]).unwrap();
        assert_eq!(cm.groupoid().num_arrows(), 2);
        assert!((0..2).all(|g| (0..2).all(|k| cm.c(g, k) == k)));

        let s3 = FiniteGroup::symmetric(3).unwrap();
        let cm = CrossedModule::from_abelian_extension(&s3, &[0, 1, 2]).unwrap();
        let h = cm.bundle().fiber(0);
        assert_eq!(h.order(), 3);
        // the non-trivial coset acts by inversion
        assert!(h.elements().all(|k| cm.c(1, k) == h.inv(k)));
        assert!(h.elements().all(|k| cm.d(0, k) == 0));

        let z3 = FiniteGroup::cyclic(3);
        let cm = CrossedModule::from_abelian_extension(&z3, &[0, 1, 2]).unwrap();
        let b = CrossedModule::b_group(&z3).unwrap();
        assert_eq!(cm.groupoid().num_arrows(), b.groupoid().num_arrows());
        assert!((0..3).all(|k| cm.d(0, k) == b.d(0, k) && cm.c(0, k) == b.c(0, k)));
    }

    #[test]
    fn not_functorial() {
        let z3 = FiniteGroup::cyclic(3);
        let err = CrossedModule::from_groups(&z3, &z3, &[0, 0, 0], |g, k| if g == 0 { k } else { (3 - k) % 3 })
            .unwrap_err();
        assert!(matches!(err, CrossedModuleError::NotFunctorial(_)));
    }

    #[test]
    fn isotropy_crossed_modules() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let from_group = CrossedModule::from_isotropy(&FiniteGroupoid::from_group(&s3)).unwrap();
        assert_eq!(from_group.bundle().fiber(0).order(), 6);
        let pair = CrossedModule::from_isotropy(&FiniteGroupoid::pair(3)).unwrap();
        assert!(pair.bundle().is_trivial());
    }

    #[test]
    fn transformation_groupoids() {
        let z2 = FiniteGroup::cyclic(2);
        let cm = CrossedModule::from_groups(&z2, &FiniteGroup::trivial(), &[0], |_, k| k).unwrap();
        assert_eq!(cm.transformation_groupoid().0.num_arrows(), 2);

        let cm = CrossedModule::from_groups(&z2, &z2, &[0, 1], |_, k| k).unwrap();
        let (hg, _) = cm.transformation_groupoid();
        assert_eq!(hg.num_arrows(), 4);
        let grp = hg.isotropy_group(0).0;
        assert!(grp.is_abelian());
        assert!(grp.elements().all(|a| grp.mul(a, a) == grp.identity()));

        let s3 = FiniteGroup::symmetric(3).unwrap();
        let cm = CrossedModule::from_normal_subgroup(&s3, &[0, 1, 2]).unwrap();
        assert_eq!(cm.transformation_groupoid().0.num_arrows(), 18);
        assert!(cm.chi().is_surjective());
    }

    #[test]
    fn translation_groupoids() {
        let z4 = FiniteGroup::cyclic(4);
        let cm = CrossedModule::from_groups(&z4, &FiniteGroup::trivial(), &[0], |_, k| k).unwrap();
        let (t, _) = cm.translation_groupoid();
        assert!(t.arrows().all(|a| t.is_unit(a)));

        let (t, _) = z4_z2().translation_groupoid();
        assert_eq!(t.orbits(), vec![vec![0, 2], vec![1, 3]]);
    }
}
