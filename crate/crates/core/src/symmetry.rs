//! Symmetries of finite groupoids: global bisections, automorphisms, the
//! crossed module `Aut₂(K)`, crossed-module actions on groupoids and the
//! action they induce on the groupoid algebra.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{equivariant_map, ActionError, CMAction, EquivariantMap};
use crate::algebra::{groupoid_algebra, Fibering, StarAlgebra, StarHom};
use crate::crossed_module::{CrossedModule, CrossedModuleError};
use crate::crossed_product::{canonical_action_on_bh, left_translation, CrossedProductError};
use crate::group::{FiniteGroup, GroupError};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{Matrix, Vector, ONE};
use crate::settings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("enumeration needs more than {limit} candidates")]
    SizeLimit { limit: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a bisection: {0}")]
    NotBisection(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("anchor is not invariant along arrow {arrow}")]
    AnchorNotInvariant { arrow: String },
    #[error("α is not functorial: {0}")]
    NotFunctorial(String),
    #[error("α_∂({h})({k}) != κ_h(tgt k)·k·κ_h(src k)⁻¹")]
    BisectionAxiomViolation { h: String, k: String },
    #[error("κ_c_g(h)({y}) != α_g(κ_h(α_g⁻¹ y)) at g={g}, h={h}")]
    ConjugationAxiomViolation { g: String, h: String, y: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    CrossedModule(#[from] CrossedModuleError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    CrossedProduct(#[from] CrossedProductError),
}

type Result<T> = std::result::Result<T, SymmetryError>;

/// `x ↦ h(x)` with `src h(x) = x` and `x ↦ tgt h(x)` bijective.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bisection {
    pub section: Vec<usize>,
}

impl Bisection {
    pub fn new(k: &FiniteGroupoid, section: Vec<usize>) -> Result<Self> {
        if section.len() != k.num_objects() || section.iter().any(|&a| a >= k.num_arrows()) {
            return Err(SymmetryError::Shape("one arrow per object".into()));
        }
        for x in k.objects() {
            if k.src(section[x]) != x {
                return Err(SymmetryError::NotBisection(format!(
                    "{} does not start at {}",
                    k.arrow_label(section[x]),
                    k.object_label(x)
                )));
            }
        }
        let mut hit = vec![false; k.num_objects()];
        for &a in &section {
            if std::mem::replace(&mut hit[k.tgt(a)], true) {
                return Err(SymmetryError::NotBisection("tgt∘h is not a bijection".into()));
            }
        }
        Ok(Bisection { section })
    }

    pub fn unit(k: &FiniteGroupoid) -> Self {
        Bisection {
            section: k.objects().map(|x| k.unit(x)).collect(),
        }
    }

    pub fn at(&self, x: usize) -> usize {
        self.section[x]
    }

    /// `x ↦ tgt h(x)`.
    pub fn object_map(&self, k: &FiniteGroupoid) -> Vec<usize> {
        self.section.iter().map(|&a| k.tgt(a)).collect()
    }

    /// `h_{ST}(x) = h_S(tgt h_T(x))·h_T(x)`.
    pub fn compose(&self, k: &FiniteGroupoid, t: &Bisection) -> Bisection {
        Bisection {
            section: k
                .objects()
                .map(|x| {
                    let a = t.section[x];
                    k.comp(self.section[k.tgt(a)], a)
                })
                .collect(),
        }
    }

    /// `h_{S⁻¹}(x) = h_S((tgt∘h_S)⁻¹(x))⁻¹`.
    pub fn inverse(&self, k: &FiniteGroupoid) -> Bisection {
        let map = self.object_map(k);
        let mut back = vec![0; map.len()];
        for (x, &y) in map.iter().enumerate() {
            back[y] = x;
        }
        Bisection {
            section: k.objects().map(|x| k.inv(self.section[back[x]])).collect(),
        }
    }
}

/// All global bisections of `k`, unit first, then in lexicographic order.
pub fn bisections(k: &FiniteGroupoid) -> Result<Vec<Bisection>> {
    let limit = settings::current().max_aut_candidates;
    let choices: Vec<Vec<usize>> = k.objects().map(|x| k.arrows_from(x)).collect();
    let mut total: usize = 1;
    for c in &choices {
        total = total.saturating_mul(c.len());
        if total > limit {
            return Err(SymmetryError::SizeLimit { limit });
        }
    }
    let unit = Bisection::unit(k);
    let mut out = vec![unit.clone()];
    let mut digits = vec![0usize; choices.len()];
    'outer: loop {
        let section: Vec<usize> = digits.iter().zip(&choices).map(|(&d, c)| c[d]).collect();
        if let Ok(b) = Bisection::new(k, section) {
            if b != unit {
                out.push(b);
            }
        }
        for i in (0..digits.len()).rev() {
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                continue 'outer;
            }
            digits[i] = 0;
        }
        break;
    }
    out[1..].sort();
    Ok(out)
}

/// The group `S(K)` of global bisections with the bisections it is built from.
#[derive(Clone, Debug)]
pub struct BisectionGroup {
    pub group: FiniteGroup,
    pub elements: Vec<Bisection>,
}

impl BisectionGroup {
    pub fn index_of(&self, b: &Bisection) -> Option<usize> {
        self.elements.iter().position(|e| e == b)
    }
}

fn section_label(k: &FiniteGroupoid, b: &Bisection) -> String {
    if k.num_objects() == 1 {
        return k.arrow_label(b.section[0]).to_string();
    }
    let parts: Vec<&str> = b.section.iter().map(|&a| k.arrow_label(a)).collect();
    format!("[{}]", parts.join(","))
}

pub fn bisection_group(k: &FiniteGroupoid) -> Result<BisectionGroup> {
    let elements = bisections(k)?;
    let labels = elements.iter().map(|b| section_label(k, b)).collect();
    let find = |b: &Bisection| elements.iter().position(|e| e == b).expect("bisections are closed");
    let group = FiniteGroup::from_fn(labels, |s, t| find(&elements[s].compose(k, &elements[t])))?;
    Ok(BisectionGroup { group, elements })
}

/// An automorphism of a finite groupoid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupoidAut {
    pub object_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl GroupoidAut {
    pub fn new(k: &FiniteGroupoid, object_map: Vec<usize>, arrow_map: Vec<usize>) -> Result<Self> {
        let a = GroupoidAut { object_map, arrow_map };
        a.validate(k)?;
        Ok(a)
    }

    pub fn identity(k: &FiniteGroupoid) -> Self {
        GroupoidAut {
            object_map: k.objects().collect(),
            arrow_map: k.arrows().collect(),
        }
    }

    fn validate(&self, k: &FiniteGroupoid) -> Result<()> {
        let bad = |m: &str| Err(SymmetryError::NotAutomorphism(m.into()));
        if self.object_map.len() != k.num_objects() || self.arrow_map.len() != k.num_arrows() {
            return bad("maps have the wrong length");
        }
        if !is_permutation(&self.object_map) || !is_permutation(&self.arrow_map) {
            return bad("maps are not bijections");
        }
        for a in k.arrows() {
            let fa = self.arrow_map[a];
            if k.src(fa) != self.object_map[k.src(a)] || k.tgt(fa) != self.object_map[k.tgt(a)] {
                return Err(SymmetryError::NotAutomorphism(format!("endpoints of {} are not preserved", k.arrow_label(a))));
            }
            for b in k.arrows().filter(|&b| k.composable(a, b)) {
                if self.arrow_map[k.comp(a, b)] != k.comp(fa, self.arrow_map[b]) {
                    return Err(SymmetryError::NotAutomorphism(format!(
                        "composite {}∘{} is not preserved",
                        k.arrow_label(a),
                        k.arrow_label(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `self∘other`.
    pub fn compose(&self, other: &GroupoidAut) -> GroupoidAut {
        GroupoidAut {
            object_map: other.object_map.iter().map(|&x| self.object_map[x]).collect(),
            arrow_map: other.arrow_map.iter().map(|&a| self.arrow_map[a]).collect(),
        }
    }

    pub fn inverse(&self) -> GroupoidAut {
        GroupoidAut {
            object_map: invert(&self.object_map),
            arrow_map: invert(&self.arrow_map),
        }
    }

    /// `φ∘S∘φ⁻¹` for a bisection `S`.
    pub fn conjugate(&self, b: &Bisection) -> Bisection {
        let inv = invert(&self.object_map);
        Bisection {
            section: (0..b.section.len()).map(|x| self.arrow_map[b.section[inv[x]]]).collect(),
        }
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&i| i < v.len() && !std::mem::replace(&mut seen[i], true))
}

fn invert(v: &[usize]) -> Vec<usize> {
    let mut out = vec![0; v.len()];
    for (i, &j) in v.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// `α(x) = tgt h_S(x)` and `α(k) = h_S(tgt k)·k·h_S(src k)⁻¹`.
pub fn bisection_to_aut(k: &FiniteGroupoid, b: &Bisection) -> GroupoidAut {
    GroupoidAut {
        object_map: b.object_map(k),
        arrow_map: k
            .arrows()
            .map(|a| k.comp(k.comp(b.section[k.tgt(a)], a), k.inv(b.section[k.src(a)])))
            .collect(),
    }
}

/// All automorphisms, identity first, by backtracking over object
/// permutations and arrow assignments.
pub fn automorphisms(k: &FiniteGroupoid) -> Result<Vec<GroupoidAut>> {
    let limit = settings::current().max_aut_candidates;
    let n = k.num_objects();
    let mut budget = limit;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut ok = true;
        for a in k.arrows() {
            if k.hom_set(k.src(a), k.tgt(a)).len() != k.hom_set(perm[k.src(a)], perm[k.tgt(a)]).len() {
                ok = false;
                break;
            }
        }
        if ok {
            let mut arrow_map = vec![usize::MAX; k.num_arrows()];
            let mut used = vec![false; k.num_arrows()];
            extend_aut(k, &perm, 0, &mut arrow_map, &mut used, &mut out, &mut budget)?;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let id = GroupoidAut::identity(k);
    out.sort();
    out.retain(|a| a != &id);
    out.insert(0, id);
    Ok(out)
}

fn extend_aut(
    k: &FiniteGroupoid,
    perm: &[usize],
    a: usize,
    arrow_map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<GroupoidAut>,
    budget: &mut usize,
) -> Result<()> {
    if a == k.num_arrows() {
        out.push(GroupoidAut {
            object_map: perm.to_vec(),
            arrow_map: arrow_map.clone(),
        });
        return Ok(());
    }
    for cand in k.hom_set(perm[k.src(a)], perm[k.tgt(a)]) {
        if used[cand] {
            continue;
        }
        if *budget == 0 {
            return Err(SymmetryError::SizeLimit {
                limit: settings::current().max_aut_candidates,
            });
        }
        *budget -= 1;
        arrow_map[a] = cand;
        // composites among assigned arrows must be respected
        let consistent = (0..=a).all(|b| {
            (0..=a).all(|c| match k.try_comp(b, c) {
                Some(bc) if bc <= a => arrow_map[bc] == k.comp(arrow_map[b], arrow_map[c]),
                _ => true,
            })
        }) && k.objects().all(|x| k.unit(x) > a || arrow_map[k.unit(x)] == k.unit(perm[x]));
        if consistent {
            used[cand] = true;
            extend_aut(k, perm, a + 1, arrow_map, used, out, budget)?;
            used[cand] = false;
        }
        arrow_map[a] = usize::MAX;
    }
    Ok(())
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `Aut₂(K) = (Aut(K), S(K), ∂, c)` with `∂` the automorphism generated by a
/// bisection and `c` conjugation.
#[derive(Clone, Debug)]
pub struct Aut2 {
    pub cm: CrossedModule,
    pub automorphisms: Vec<GroupoidAut>,
    pub bisections: BisectionGroup,
}

pub fn aut2(k: &FiniteGroupoid) -> Result<Aut2> {
    let auts = automorphisms(k)?;
    let find = |a: &GroupoidAut| auts.iter().position(|b| b == a).expect("automorphisms are closed");
    let labels = (0..auts.len()).map(|i| if i == 0 { "id".to_string() } else { format!("φ{i}") }).collect();
    let aut = FiniteGroup::from_fn(labels, |a, b| find(&auts[a].compose(&auts[b])))?;
    let s = bisection_group(k)?;
    let d: Vec<usize> = s.elements.iter().map(|b| find(&bisection_to_aut(k, b))).collect();
    let cm = CrossedModule::from_groups(&aut, &s.group, &d, |phi, b| {
        s.index_of(&auts[phi].conjugate(&s.elements[b])).expect("conjugate bisection")
    })?;
    Ok(Aut2 {
        cm,
        automorphisms: auts,
        bisections: s,
    })
}

/// A crossed module acting on a groupoid `K` anchored over the objects of `G`:
/// `G` by isomorphisms between anchor fibers and `H` by bisections.
#[derive(Clone, Debug)]
pub struct CMGroupoidAction {
    pub cm: CrossedModule,
    pub k: FiniteGroupoid,
    /// Anchor on objects; on arrows it is `ρ(src k)`.
    pub rho: Vec<usize>,
    /// `alpha[g][k]` for arrows `k` over `src g`.
    pub alpha: Vec<Vec<usize>>,
    /// `kappa[x][h][y]` for objects `y` over `x`.
    pub kappa: Vec<Vec<Vec<usize>>>,
}

impl CMGroupoidAction {
    /// `alpha[g]` and `kappa[x][h]` may be given on all of `K`; entries off the
    /// relevant anchor fiber are ignored.
    pub fn new(
        cm: CrossedModule,
        k: FiniteGroupoid,
        rho: Vec<usize>,
        alpha: Vec<Vec<usize>>,
        kappa: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let act = CMGroupoidAction {
            cm,
            k,
            rho,
            alpha,
            kappa,
        };
        act.validate()?;
        Ok(act)
    }

    fn over(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.k.arrows().filter(move |&a| self.rho[self.k.src(a)] == x)
    }

    fn objects_over(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.k.objects().filter(move |&y| self.rho[y] == x)
    }

    /// `α_g` on objects over `src g`, read off units.
    pub fn object_image(&self, g: usize, y: usize) -> usize {
        self.k.tgt(self.alpha[g][self.k.unit(y)])
    }

    fn validate(&self) -> Result<()> {
        let (cm, k) = (&self.cm, &self.k);
        let gp = cm.groupoid();
        let shape = |m: &str| Err(SymmetryError::Shape(m.into()));
        if self.rho.len() != k.num_objects() || self.rho.iter().any(|&x| x >= gp.num_objects()) {
            return shape("anchor must send objects of K to objects of G");
        }
        for a in k.arrows() {
            if self.rho[k.src(a)] != self.rho[k.tgt(a)] {
                return Err(SymmetryError::AnchorNotInvariant {
                    arrow: k.arrow_label(a).into(),
                });
            }
        }
        if self.alpha.len() != gp.num_arrows() || self.alpha.iter().any(|m| m.len() != k.num_arrows()) {
            return shape("α needs one arrow map per arrow of G");
        }
        for g in gp.arrows() {
            let (s, t) = (gp.src(g), gp.tgt(g));
            let m = &self.alpha[g];
            let name = gp.arrow_label(g);
            let mut hit = vec![false; k.num_arrows()];
            for a in self.over(s) {
                let b = m[a];
                if b >= k.num_arrows() || self.rho[k.src(b)] != t || std::mem::replace(&mut hit[b], true) {
                    return Err(SymmetryError::NotAutomorphism(format!("α_{name} is not a bijection of anchor fibers")));
                }
            }
            if self.over(t).any(|b| !hit[b]) {
                return Err(SymmetryError::NotAutomorphism(format!("α_{name} is not onto")));
            }
            for a in self.over(s) {
                if k.is_unit(a) != k.is_unit(m[a]) {
                    return Err(SymmetryError::NotAutomorphism(format!("α_{name} does not preserve units")));
                }
                if m[k.unit(k.src(a))] != k.unit(k.src(m[a])) || m[k.unit(k.tgt(a))] != k.unit(k.tgt(m[a])) {
                    return Err(SymmetryError::NotAutomorphism(format!("α_{name} does not preserve endpoints")));
                }
                for b in self.over(s).filter(|&b| k.composable(a, b)) {
                    if m[k.comp(a, b)] != k.comp(m[a], m[b]) {
                        return Err(SymmetryError::NotAutomorphism(format!(
                            "α_{name} does not preserve {}∘{}",
                            k.arrow_label(a),
                            k.arrow_label(b)
                        )));
                    }
                }
            }
        }
        for x in gp.objects() {
            if self.over(x).any(|a| self.alpha[gp.unit(x)][a] != a) {
                return Err(SymmetryError::NotFunctorial(format!("α at the unit of {} is not the identity", gp.object_label(x))));
            }
        }
        for g in gp.arrows() {
            for l in gp.arrows().filter(|&l| gp.composable(g, l)) {
                let gl = gp.comp(g, l);
                if self.over(gp.src(l)).any(|a| self.alpha[gl][a] != self.alpha[g][self.alpha[l][a]]) {
                    return Err(SymmetryError::NotFunctorial(format!(
                        "α_({}{}) != α_{}α_{}",
                        gp.arrow_label(g),
                        gp.arrow_label(l),
                        gp.arrow_label(g),
                        gp.arrow_label(l)
                    )));
                }
            }
        }
        if self.kappa.len() != gp.num_objects() {
            return shape("κ needs one family per object of G");
        }
        for x in gp.objects() {
            let hx = cm.bundle().fiber(x);
            if self.kappa[x].len() != hx.order() || self.kappa[x].iter().any(|s| s.len() != k.num_objects()) {
                return shape("κ_h needs one arrow per object of K");
            }
            for h in hx.elements() {
                let s = &self.kappa[x][h];
                let mut hit = vec![false; k.num_objects()];
                for y in self.objects_over(x) {
                    let a = s[y];
                    if a >= k.num_arrows() || k.src(a) != y || std::mem::replace(&mut hit[k.tgt(a)], true) {
                        return Err(SymmetryError::NotBisection(format!("κ_{} over {}", hx.label(h), gp.object_label(x))));
                    }
                }
                for a in self.over(x) {
                    let lhs = self.alpha[cm.d(x, h)][a];
                    let rhs = k.comp(k.comp(s[k.tgt(a)], a), k.inv(s[k.src(a)]));
                    if lhs != rhs {
                        return Err(SymmetryError::BisectionAxiomViolation {
                            h: hx.label(h).into(),
                            k: k.arrow_label(a).into(),
                        });
                    }
                }
            }
            for h in hx.elements() {
                for h2 in hx.elements() {
                    let prod = &self.kappa[x][hx.mul(h, h2)];
                    let ok = self.objects_over(x).all(|y| {
                        let a = self.kappa[x][h2][y];
                        prod[y] == k.comp(self.kappa[x][h][k.tgt(a)], a)
                    });
                    if !ok {
                        return Err(SymmetryError::NotBisection(format!(
                            "κ is not a homomorphism at ({}, {})",
                            hx.label(h),
                            hx.label(h2)
                        )));
                    }
                }
            }
        }
        for g in gp.arrows() {
            let (s, t) = (gp.src(g), gp.tgt(g));
            let gi = gp.inv(g);
            for h in cm.bundle().fiber(s).elements() {
                let ch = cm.c(g, h);
                for y in self.objects_over(t) {
                    let lhs = self.kappa[t][ch][y];
                    let rhs = self.alpha[g][self.kappa[s][h][self.object_image(gi, y)]];
                    if lhs != rhs {
                        return Err(SymmetryError::ConjugationAxiomViolation {
                            g: gp.arrow_label(g).into(),
                            h: cm.bundle().fiber(s).label(h).into(),
                            y: k.object_label(y).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// `g` acts on `H ⋉_∂ G` by `(h, g') ↦ (c_g h, g g')`; `κ_h(g') = (h, g')`.
pub fn translation_action(cm: &CrossedModule) -> Result<CMGroupoidAction> {
    let gp = cm.groupoid();
    let (k, idx) = cm.translation_groupoid();
    let rho: Vec<usize> = gp.arrows().map(|g| gp.tgt(g)).collect();
    let alpha = gp
        .arrows()
        .map(|g| {
            idx.pairs
                .iter()
                .map(|&(h, a)| {
                    if gp.composable(g, a) {
                        idx.index(cm.c(g, h), gp.comp(g, a))
                    } else {
                        usize::MAX
                    }
                })
                .collect()
        })
        .collect();
    let kappa = gp
        .objects()
        .map(|x| {
            cm.bundle()
                .fiber(x)
                .elements()
                .map(|h| {
                    gp.arrows()
                        .map(|a| if gp.tgt(a) == x { idx.index(h, a) } else { usize::MAX })
                        .collect()
                })
                .collect()
        })
        .collect();
    CMGroupoidAction::new(cm.clone(), k, rho, alpha, kappa)
}

/// `C*(K)` fibered over the objects of `G` through the anchor.
pub fn anchored_algebra(act: &CMGroupoidAction) -> Result<Arc<StarAlgebra>> {
    let k = &act.k;
    let gp = act.cm.groupoid();
    let base = groupoid_algebra(k);
    let projections = gp
        .objects()
        .map(|x| {
            let mut p = base.zero();
            for y in k.objects().filter(|&y| act.rho[y] == x) {
                p[k.unit(y)] = ONE;
            }
            p
        })
        .collect();
    let fibering = Fibering {
        labels: gp.object_labels().to_vec(),
        projections,
    };
    Ok(Arc::new(base.refibered(fibering).map_err(ActionError::from)?))
}

/// The action on `C*(K)`: `α_g(δ_k) = δ_{α_g k}` and `u_h = Σ_y δ_{κ_h(y)}`.
pub fn induced_algebra_action(act: &CMGroupoidAction) -> Result<CMAction> {
    let a = anchored_algebra(act)?;
    let (k, cm) = (&act.k, &act.cm);
    let gp = cm.groupoid();
    let n = k.num_arrows();
    let delta = |i: usize| crate::linalg::basis_vector(n, i);
    let alpha = gp
        .arrows()
        .map(|g| {
            let (fs, ft) = (a.fiber(gp.src(g)), a.fiber(gp.tgt(g)));
            let mut m = Matrix::zeros(ft.dim(), fs.dim());
            for i in 0..fs.dim() {
                let e = fs.lift(&fs.algebra.basis(i));
                let arrow = (0..n).find(|&j| e[j] == ONE).expect("fiber basis is a δ");
                m.set_column(i, &ft.coords(&delta(act.alpha[g][arrow])));
            }
            m
        })
        .collect();
    let u = gp
        .objects()
        .map(|x| {
            let f = a.fiber(x);
            cm.bundle()
                .fiber(x)
                .elements()
                .map(|h| {
                    let mut v = Vector::zeros(n);
                    for y in k.objects().filter(|&y| act.rho[y] == x) {
                        v[act.kappa[x][h][y]] = ONE;
                    }
                    f.coords(&v)
                })
                .collect()
        })
        .collect();
    Ok(CMAction::from_parts(cm, a, alpha, u)?)
}

/// The isomorphism `C*(H ⋉_∂ G) → C0(G) ⋊ H`, `δ_(h,g') ↦ δ_{∂(h)g'} ⊗ δ_h`,
/// checked to intertwine the induced action with the canonical one.
pub fn translation_bridge(cm: &CrossedModule) -> Result<EquivariantMap> {
    let gp = cm.groupoid();
    let induced = induced_algebra_action(&translation_action(cm)?)?;
    let beta = left_translation(gp)?;
    let canon = canonical_action_on_bh(cm, &beta)?;
    let (_, idx) = cm.translation_groupoid();
    let b = beta.algebra();
    let bh = &canon.bh;
    let mut phi = Matrix::zeros(bh.dim(), idx.len());
    for (p, &(h, a)) in idx.pairs.iter().enumerate() {
        let x = gp.tgt(a);
        let moved = gp.comp(cm.d(x, h), a);
        let coeff = b.fiber(x).coords(&crate::linalg::basis_vector(b.dim(), moved));
        phi.set_column(p, &bh.element(cm.bundle().flat_index(x, h), &coeff));
    }
    let hom = StarHom::new(induced.algebra().clone(), canon.action.algebra().clone(), phi).map_err(ActionError::from)?;
    if !hom.is_isomorphism() {
        return Err(ActionError::NotEquivariant("the bridge is not bijective".into()).into());
    }
    Ok(equivariant_map(&induced, &canon.action, hom)?)
}
