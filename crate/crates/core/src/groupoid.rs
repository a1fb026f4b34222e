//! Finite groupoids with the counting Haar system, group bundles over their
//! object sets, homomorphisms, isotropy and quotients.
//!
//! Arrows compose right to left: `comp(a, b)` is "first `b`, then `a`" and is
//! defined exactly when `src(a) == tgt(b)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::group::{FiniteGroup, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("not a category: {0}")]
    NotCategory(String),
    #[error("object {object} has no unit arrow")]
    NoUnits { object: String },
    #[error("arrow {arrow} has no inverse")]
    NoInverses { arrow: String },
    #[error("not an action: {0}")]
    NotAction(String),
    #[error("sub-bundle is not invariant: {g} conjugates {h} outside the bundle")]
    NotInvariant { g: String, h: String },
    #[error("not a groupoid homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("groupoid with {arrows} arrows exceeds the size limit {limit}")]
    SizeLimit { arrows: usize, limit: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    unit: Vec<usize>,
    inv: Vec<usize>,
    comp: Vec<Option<usize>>,
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGroupoid({} objects, {} arrows)",
            self.objects.len(),
            self.arrows.len()
        )
    }
}

impl FiniteGroupoid {
    /// Validates groupoid data. `comp` lists triples `(a, b, a∘b)`; it must
    /// cover exactly the composable pairs.
    pub fn from_data(
        objects: Vec<String>,
        arrows: Vec<String>,
        src: Vec<usize>,
        tgt: Vec<usize>,
        comp: &[(usize, usize, usize)],
    ) -> Result<Self, GroupoidError> {
        let n = arrows.len();
        let mut table = vec![None; n * n];
        for &(a, b, ab) in comp {
            if a >= n || b >= n || ab >= n {
                return Err(GroupoidError::NotCategory(format!("composite ({a},{b}) -> {ab} names an unknown arrow")));
            }
            if table[a * n + b].is_some_and(|v| v != ab) {
                return Err(GroupoidError::NotCategory(format!(
                    "composite {}∘{} given twice",
                    arrows[a], arrows[b]
                )));
            }
            table[a * n + b] = Some(ab);
        }
        Self::from_table(objects, arrows, src, tgt, table)
    }

    /// Builds a groupoid from a composition closure, called on composable pairs only.
    pub fn from_fn(
        objects: Vec<String>,
        arrows: Vec<String>,
        src: Vec<usize>,
        tgt: Vec<usize>,
        comp: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let n = arrows.len();
        let mut table = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                if src[a] == tgt[b] {
                    table[a * n + b] = Some(comp(a, b));
                }
            }
        }
        Self::from_table(objects, arrows, src, tgt, table)
    }

    fn from_table(
        objects: Vec<String>,
        arrows: Vec<String>,
        src: Vec<usize>,
        tgt: Vec<usize>,
        table: Vec<Option<usize>>,
    ) -> Result<Self, GroupoidError> {
        let n = arrows.len();
        let m = objects.len();
        let limit = crate::settings::current().max_dim;
        if n > limit {
            return Err(GroupoidError::SizeLimit { arrows: n, limit });
        }
        if m == 0 {
            return Err(GroupoidError::NotCategory("empty object set".into()));
        }
        if src.len() != n || tgt.len() != n {
            return Err(GroupoidError::NotCategory("src/tgt must be given for every arrow".into()));
        }
        if let Some(&x) = src.iter().chain(&tgt).find(|&&x| x >= m) {
            return Err(GroupoidError::NotCategory(format!("object index {x} out of range")));
        }
        let at = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            for b in 0..n {
                match (src[a] == tgt[b], at(a, b)) {
                    (true, None) => {
                        return Err(GroupoidError::NotCategory(format!(
                            "composite {}∘{} missing",
                            arrows[a], arrows[b]
                        )))
                    }
                    (false, Some(_)) => {
                        return Err(GroupoidError::NotCategory(format!(
                            "composite {}∘{} given for a non-composable pair",
                            arrows[a], arrows[b]
                        )))
                    }
                    (true, Some(ab)) if src[ab] != src[b] || tgt[ab] != tgt[a] => {
                        return Err(GroupoidError::NotCategory(format!(
                            "composite {}∘{} has the wrong endpoints",
                            arrows[a], arrows[b]
                        )))
                    }
                    _ => {}
                }
            }
        }
        for a in 0..n {
            for b in (0..n).filter(|&b| src[a] == tgt[b]) {
                let ab = at(a, b).unwrap();
                for c in (0..n).filter(|&c| src[b] == tgt[c]) {
                    if at(ab, c) != at(a, at(b, c).unwrap()) {
                        return Err(GroupoidError::NotCategory(format!(
                            "not associative on ({}, {}, {})",
                            arrows[a], arrows[b], arrows[c]
                        )));
                    }
                }
            }
        }
        let mut unit = vec![0; m];
        for x in 0..m {
            unit[x] = (0..n)
                .find(|&e| {
                    src[e] == x
                        && tgt[e] == x
                        && (0..n).all(|a| (src[a] != x || at(a, e) == Some(a)) && (tgt[a] != x || at(e, a) == Some(a)))
                })
                .ok_or_else(|| GroupoidError::NoUnits {
                    object: objects[x].clone(),
                })?;
        }
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| src[b] == tgt[a] && tgt[b] == src[a] && at(b, a) == Some(unit[src[a]]) && at(a, b) == Some(unit[tgt[a]]))
                .ok_or_else(|| GroupoidError::NoInverses {
                    arrow: arrows[a].clone(),
                })?;
        }
        Ok(FiniteGroupoid {
            objects,
            arrows,
            src,
            tgt,
            unit,
            inv,
            comp: table,
        })
    }

    /// A group as a one-object groupoid; arrow indices are group elements.
    pub fn from_group(g: &FiniteGroup) -> Self {
        let n = g.order();
        Self::from_fn(vec!["*".into()], g.labels().to_vec(), vec![0; n], vec![0; n], |a, b| g.mul(a, b))
            .expect("group is a groupoid")
    }

    /// The space `X` as a groupoid with only unit arrows.
    pub fn space(objects: Vec<String>) -> Self {
        let m = objects.len();
        let ids: Vec<usize> = (0..m).collect();
        Self::from_fn(objects.clone(), objects, ids.clone(), ids, |a, _| a).expect("space")
    }

    /// Pair groupoid on objects `1..=n`; arrow `(i,j)` goes from `j` to `i` and
    /// has index `(i-1)*n + (j-1)`.
    pub fn pair(n: usize) -> Self {
        let objects = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (0..n * n).map(|a| format!("({},{})", a / n + 1, a % n + 1)).collect();
        let tgt = (0..n * n).map(|a| a / n).collect();
        let src = (0..n * n).map(|a| a % n).collect();
        Self::from_fn(objects, arrows, src, tgt, |a, b| (a / n) * n + b % n).expect("pair groupoid")
    }

    /// The transformation groupoid `X ⋊ G`. Arrow `(x,g)` has index
    /// `x*|G| + g`, source `x` and target `g·x`.
    pub fn action_groupoid(
        g: &FiniteGroup,
        objects: Vec<String>,
        act: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let m = objects.len();
        let k = g.order();
        for x in 0..m {
            for a in g.elements() {
                if act(a, x) >= m {
                    return Err(GroupoidError::NotAction(format!("{}·{} is not an object", g.label(a), objects[x])));
                }
            }
            if act(g.identity(), x) != x {
                return Err(GroupoidError::NotAction(format!("identity moves {}", objects[x])));
            }
            for a in g.elements() {
                for b in g.elements() {
                    if act(a, act(b, x)) != act(g.mul(a, b), x) {
                        return Err(GroupoidError::NotAction(format!(
                            "{}·({}·{}) != ({}{})·{}",
                            g.label(a),
                            g.label(b),
                            objects[x],
                            g.label(a),
                            g.label(b),
                            objects[x]
                        )));
                    }
                }
            }
        }
        let arrows = (0..m * k).map(|i| format!("({},{})", objects[i / k], g.label(i % k))).collect();
        let src = (0..m * k).map(|i| i / k).collect();
        let tgt = (0..m * k).map(|i| act(i % k, i / k)).collect();
        Self::from_fn(objects, arrows, src, tgt, |a, b| (b / k) * k + g.mul(a % k, b % k))
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.objects.len()
    }

    pub fn arrows(&self) -> std::ops::Range<usize> {
        0..self.arrows.len()
    }

    pub fn src(&self, a: usize) -> usize {
        self.src[a]
    }

    pub fn tgt(&self, a: usize) -> usize {
        self.tgt[a]
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.unit[self.src[a]] == a
    }

    pub fn composable(&self, a: usize, b: usize) -> bool {
        self.src[a] == self.tgt[b]
    }

    /// `a∘b`, `None` unless `src(a) == tgt(b)`.
    pub fn try_comp(&self, a: usize, b: usize) -> Option<usize> {
        self.comp[a * self.arrows.len() + b]
    }

    /// `a∘b`; panics on non-composable pairs.
    pub fn comp(&self, a: usize, b: usize) -> usize {
        self.try_comp(a, b)
            .unwrap_or_else(|| panic!("{}∘{} is not composable", self.arrows[a], self.arrows[b]))
    }

    /// Haar weight of an arrow (counting measure).
    pub fn haar_weight(&self, _a: usize) -> f64 {
        1.0
    }

    pub fn object_label(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn arrow_label(&self, a: usize) -> &str {
        &self.arrows[a]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow_labels(&self) -> &[String] {
        &self.arrows
    }

    pub fn resolve_object(&self, token: &str) -> Result<usize, GroupoidError> {
        resolve(&self.objects, token).ok_or_else(|| GroupoidError::UnknownObject(token.into()))
    }

    pub fn resolve_arrow(&self, token: &str) -> Result<usize, GroupoidError> {
        resolve(&self.arrows, token).ok_or_else(|| GroupoidError::UnknownArrow(token.into()))
    }

    pub fn hom_set(&self, from: usize, to: usize) -> Vec<usize> {
        self.arrows().filter(|&a| self.src[a] == from && self.tgt[a] == to).collect()
    }

    pub fn arrows_from(&self, x: usize) -> Vec<usize> {
        self.arrows().filter(|&a| self.src[a] == x).collect()
    }

    pub fn arrows_to(&self, y: usize) -> Vec<usize> {
        self.arrows().filter(|&a| self.tgt[a] == y).collect()
    }

    pub fn loops(&self, x: usize) -> Vec<usize> {
        self.hom_set(x, x)
    }

    pub fn is_group(&self) -> bool {
        self.objects.len() == 1
    }

    /// Orbits of objects, each sorted, ordered by their smallest object.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut orbit_of = vec![usize::MAX; self.num_objects()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in self.objects() {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let orbit: BTreeSet<usize> = self.arrows_from(x).into_iter().map(|a| self.tgt[a]).collect();
            for &y in &orbit {
                orbit_of[y] = out.len();
            }
            out.push(orbit.into_iter().collect());
        }
        out
    }

    /// The isotropy group at `x` together with the inclusion of its elements
    /// as arrows.
    pub fn isotropy_group(&self, x: usize) -> (FiniteGroup, Vec<usize>) {
        let loops = self.loops(x);
        let pos = |a: usize| loops.iter().position(|&l| l == a).expect("loop");
        let labels = loops.iter().map(|&a| self.arrows[a].clone()).collect();
        let g = FiniteGroup::from_fn(labels, |a, b| pos(self.comp(loops[a], loops[b]))).expect("isotropy group");
        (g, loops)
    }

    /// Isotropy bundle plus, per object, the arrow index of each fiber element.
    pub fn isotropy(&self) -> (GroupBundle, Vec<Vec<usize>>) {
        let mut fibers = Vec::new();
        let mut incl = Vec::new();
        for x in self.objects() {
            let (g, loops) = self.isotropy_group(x);
            fibers.push(g);
            incl.push(loops);
        }
        (GroupBundle::new(self.objects.clone(), fibers), incl)
    }

    pub fn isotropy_bundle(&self) -> GroupBundle {
        self.isotropy().0
    }

    /// `G/H` for a wide sub-bundle `H ⊆ isotropy`, given per object as a set of
    /// loop arrows. Arrows of the quotient are the classes `H_{tgt g}·g`, ordered
    /// by their smallest member. Returns the quotient and its projection.
    pub fn quotient(&self, sub: &[Vec<usize>]) -> Result<(FiniteGroupoid, GroupoidHom), GroupoidError> {
        if sub.len() != self.num_objects() {
            return Err(GroupoidError::NotCategory("sub-bundle must list a fiber for every object".into()));
        }
        for (x, fiber) in sub.iter().enumerate() {
            if let Some(&a) = fiber.iter().find(|&&a| a >= self.num_arrows() || self.src[a] != x || self.tgt[a] != x) {
                return Err(GroupoidError::NotCategory(format!(
                    "{} is not a loop at {}",
                    a, self.objects[x]
                )));
            }
            let set: BTreeSet<usize> = fiber.iter().copied().collect();
            if !set.contains(&self.unit[x]) || fiber.iter().any(|&a| fiber.iter().any(|&b| !set.contains(&self.comp(a, b)))) {
                return Err(GroupoidError::Group(GroupError::NotSubgroup(format!(
                    "fiber at {}",
                    self.objects[x]
                ))));
            }
        }
        for g in self.arrows() {
            for &h in &sub[self.src[g]] {
                let conj = self.comp(self.comp(g, h), self.inv[g]);
                if !sub[self.tgt[g]].contains(&conj) {
                    return Err(GroupoidError::NotInvariant {
                        g: self.arrows[g].clone(),
                        h: self.arrows[h].clone(),
                    });
                }
            }
        }
        let mut class_of = vec![usize::MAX; self.num_arrows()];
        let mut reps = Vec::new();
        for g in self.arrows() {
            if class_of[g] != usize::MAX {
                continue;
            }
            for &h in &sub[self.tgt[g]] {
                class_of[self.comp(h, g)] = reps.len();
            }
            reps.push(g);
        }
        let labels = reps
            .iter()
            .map(|&r| {
                if sub[self.tgt[r]].len() == 1 {
                    self.arrows[r].clone()
                } else {
                    format!("[{}]", self.arrows[r])
                }
            })
            .collect();
        let src = reps.iter().map(|&r| self.src[r]).collect();
        let tgt = reps.iter().map(|&r| self.tgt[r]).collect();
        let q = FiniteGroupoid::from_fn(self.objects.clone(), labels, src, tgt, |a, b| {
            class_of[self.comp(reps[a], reps[b])]
        })?;
        let proj = GroupoidHom::new(self.clone(), q.clone(), self.objects().collect(), class_of)?;
        Ok((q, proj))
    }

    /// Disjoint union; objects and arrows of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &FiniteGroupoid) -> Self {
        let (m, n) = (self.num_objects(), self.num_arrows());
        let objects = self.objects.iter().chain(&other.objects).cloned().collect();
        let arrows = self.arrows.iter().chain(&other.arrows).cloned().collect();
        let src = self.src.iter().copied().chain(other.src.iter().map(|x| x + m)).collect();
        let tgt = self.tgt.iter().copied().chain(other.tgt.iter().map(|x| x + m)).collect();
        Self::from_fn(objects, arrows, src, tgt, |a, b| {
            if a < n {
                self.comp(a, b)
            } else {
                other.comp(a - n, b - n) + n
            }
        })
        .expect("disjoint union")
    }
}

fn resolve(labels: &[String], token: &str) -> Option<usize> {
    labels
        .iter()
        .position(|l| l == token)
        .or_else(|| token.parse::<usize>().ok().filter(|&i| i < labels.len()))
}

/// A family of finite groups indexed by a finite object set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupBundle {
    base: Vec<String>,
    fibers: Vec<FiniteGroup>,
}

impl GroupBundle {
    pub fn new(base: Vec<String>, fibers: Vec<FiniteGroup>) -> Self {
        assert_eq!(base.len(), fibers.len(), "one fiber per object");
        GroupBundle { base, fibers }
    }

    pub fn constant(base: Vec<String>, g: &FiniteGroup) -> Self {
        let fibers = vec![g.clone(); base.len()];
        GroupBundle { base, fibers }
    }

    pub fn trivial(base: Vec<String>) -> Self {
        Self::constant(base, &FiniteGroup::trivial())
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn base_labels(&self) -> &[String] {
        &self.base
    }

    pub fn fiber(&self, x: usize) -> &FiniteGroup {
        &self.fibers[x]
    }

    pub fn fibers(&self) -> &[FiniteGroup] {
        &self.fibers
    }

    /// Total number of elements over all objects.
    pub fn total_order(&self) -> usize {
        self.fibers.iter().map(FiniteGroup::order).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.fibers.iter().all(|f| f.order() == 1)
    }

    /// Flat index of `(x, h)` in [`GroupBundle::as_groupoid`].
    pub fn flat_index(&self, x: usize, h: usize) -> usize {
        self.fibers[..x].iter().map(FiniteGroup::order).sum::<usize>() + h
    }

    /// Inverse of [`GroupBundle::flat_index`].
    pub fn unflatten(&self, mut i: usize) -> (usize, usize) {
        for (x, f) in self.fibers.iter().enumerate() {
            if i < f.order() {
                return (x, i);
            }
            i -= f.order();
        }
        panic!("flat index out of range")
    }

    /// The bundle as a groupoid whose arrows are all loops.
    pub fn as_groupoid(&self) -> FiniteGroupoid {
        let mut arrows = Vec::new();
        let mut ends = Vec::new();
        for (x, f) in self.fibers.iter().enumerate() {
            for h in f.elements() {
                arrows.push(if self.base.len() == 1 {
                    f.label(h).to_string()
                } else {
                    format!("{}@{}", f.label(h), self.base[x])
                });
                ends.push(x);
            }
        }
        FiniteGroupoid::from_fn(self.base.clone(), arrows, ends.clone(), ends, |a, b| {
            let (x, ha) = self.unflatten(a);
            let (_, hb) = self.unflatten(b);
            self.flat_index(x, self.fibers[x].mul(ha, hb))
        })
        .expect("group bundle groupoid")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidHom {
    source: FiniteGroupoid,
    target: FiniteGroupoid,
    object_map: Vec<usize>,
    arrow_map: Vec<usize>,
}

impl GroupoidHom {
    pub fn new(
        source: FiniteGroupoid,
        target: FiniteGroupoid,
        object_map: Vec<usize>,
        arrow_map: Vec<usize>,
    ) -> Result<Self, GroupoidError> {
        if object_map.len() != source.num_objects()
            || arrow_map.len() != source.num_arrows()
            || object_map.iter().any(|&y| y >= target.num_objects())
            || arrow_map.iter().any(|&b| b >= target.num_arrows())
        {
            return Err(GroupoidError::NotHomomorphism("maps must be total and land in the target".into()));
        }
        for a in source.arrows() {
            let fa = arrow_map[a];
            if target.src(fa) != object_map[source.src(a)] || target.tgt(fa) != object_map[source.tgt(a)] {
                return Err(GroupoidError::NotHomomorphism(format!(
                    "endpoints of {} not preserved",
                    source.arrow_label(a)
                )));
            }
        }
        for x in source.objects() {
            if arrow_map[source.unit(x)] != target.unit(object_map[x]) {
                return Err(GroupoidError::NotHomomorphism(format!(
                    "unit at {} not preserved",
                    source.object_label(x)
                )));
            }
        }
        for a in source.arrows() {
            for b in source.arrows() {
                if let Some(ab) = source.try_comp(a, b) {
                    if arrow_map[ab] != target.comp(arrow_map[a], arrow_map[b]) {
                        return Err(GroupoidError::NotHomomorphism(format!(
                            "composite {}∘{} not preserved",
                            source.arrow_label(a),
                            source.arrow_label(b)
                        )));
                    }
                }
            }
        }
        Ok(GroupoidHom {
            source,
            target,
            object_map,
            arrow_map,
        })
    }

    pub fn source(&self) -> &FiniteGroupoid {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroupoid {
        &self.target
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn arrow_map(&self) -> &[usize] {
        &self.arrow_map
    }

    pub fn is_surjective(&self) -> bool {
        let hit: BTreeSet<usize> = self.arrow_map.iter().copied().collect();
        hit.len() == self.target.num_arrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_fix() -> FiniteGroupoid {
        // Z2 acting on {1,2,3}, swapping 1 and 2
        let z2 = FiniteGroup::cyclic(2);
        FiniteGroupoid::action_groupoid(&z2, vec!["1".into(), "2".into(), "3".into()], |g, x| {
            if g == 1 && x < 2 {
                1 - x
            } else {
                x
            }
        })
        .unwrap()
    }

    /// Brute-force isomorphism search over object and arrow bijections.
    fn isomorphic(a: &FiniteGroupoid, b: &FiniteGroupoid) -> bool {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..n {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        if a.num_objects() != b.num_objects() || a.num_arrows() != b.num_arrows() {
            return false;
        }
        perms(a.num_arrows()).into_iter().any(|am| {
            let om: Vec<usize> = a.objects().map(|x| b.src(am[a.unit(x)])).collect();
            GroupoidHom::new(a.clone(), b.clone(), om, am).is_ok()
        })
    }

    #[test]
    fn group_as_groupoid() {
        let g = FiniteGroupoid::from_group(&FiniteGroup::cyclic(3));
        assert_eq!(g.num_objects(), 1);
        assert_eq!(g.num_arrows(), 3);
        assert!(g.is_group());
    }

    #[test]
    fn pair_groupoid() {
        let p = FiniteGroupoid::pair(3);
        assert_eq!(p.num_arrows(), 9);
        let units: Vec<usize> = p.objects().map(|x| p.unit(x)).collect();
        assert_eq!(units, vec![0, 4, 8]);
        assert_eq!(p.comp(1, 3), 0); // (1,2)∘(2,1) = (1,1)
    }

    #[test]
    fn missing_composite_is_rejected() {
        let p = FiniteGroupoid::pair(3);
        let n = 9;
        let mut triples = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(ab) = p.try_comp(a, b) {
                    // drop (1,3)∘(3,1)
                    if !(a == 2 && b == 6) {
                        triples.push((a, b, ab));
                    }
                }
            }
        }
        let src = (0..n).map(|a| p.src(a)).collect();
        let tgt = (0..n).map(|a| p.tgt(a)).collect();
        let err = FiniteGroupoid::from_data(p.object_labels().to_vec(), p.arrow_labels().to_vec(), src, tgt, &triples)
            .unwrap_err();
        assert!(matches!(err, GroupoidError::NotCategory(_)));
    }

    #[test]
    fn action_groupoids() {
        let z2 = FiniteGroup::cyclic(2);
        let swap = FiniteGroupoid::action_groupoid(&z2, vec!["1".into(), "2".into()], |g, x| (g + x) % 2).unwrap();
        assert_eq!(swap.num_arrows(), 4);
        assert!(isomorphic(&swap, &FiniteGroupoid::pair(2)));

        let triv = FiniteGroupoid::action_groupoid(&z2, vec!["1".into()], |_, x| x).unwrap();
        assert!(isomorphic(&triv, &FiniteGroupoid::from_group(&z2)));

        let z3 = FiniteGroup::cyclic(3);
        let cyc = FiniteGroupoid::action_groupoid(&z3, vec!["1".into(), "2".into(), "3".into()], |g, x| (g + x) % 3)
            .unwrap();
        assert_eq!(cyc.num_arrows(), 9);
        assert_eq!(cyc.orbits(), vec![vec![0, 1, 2]]);
        assert!(cyc.objects().all(|x| cyc.loops(x).len() == 1));

        let bad = FiniteGroupoid::action_groupoid(&z3, vec!["1".into(), "2".into()], |g, x| (g + x) % 2);
        assert!(matches!(bad, Err(GroupoidError::NotAction(_))));
    }

    #[test]
    fn isotropy_bundles() {
        let p = FiniteGroupoid::pair(3).isotropy_bundle();
        assert!(p.is_trivial());
        let z4 = FiniteGroupoid::from_group(&FiniteGroup::cyclic(4)).isotropy_bundle();
        assert_eq!(z4.fiber(0).order(), 4);
        let sf = swap_fix().isotropy_bundle();
        let orders: Vec<usize> = sf.fibers().iter().map(FiniteGroup::order).collect();
        assert_eq!(orders, vec![1, 1, 2]);
    }

    #[test]
    fn quotient_groupoids() {
        let g = FiniteGroupoid::from_group(&FiniteGroup::symmetric(3).unwrap());
        let (q, _) = g.quotient(&[g.loops(0)]).unwrap();
        assert_eq!(q.num_arrows(), 1);

        let z2 = FiniteGroup::cyclic(2);
        let bundle = FiniteGroupoid::action_groupoid(&z2, vec!["1".into(), "2".into()], |_, x| x).unwrap();
        let (_, incl) = bundle.isotropy();
        let (q, proj) = bundle.quotient(&incl).unwrap();
        assert_eq!(q.num_arrows(), 2);
        assert!(q.arrows().all(|a| q.is_unit(a)));
        assert!(proj.is_surjective());

        let sf = swap_fix();
        let (_, incl) = sf.isotropy();
        let (q, _) = sf.quotient(&incl).unwrap();
        let expected = FiniteGroupoid::pair(2).disjoint_union(&FiniteGroupoid::space(vec!["3".into()]));
        assert!(isomorphic(&q, &expected));
    }

    #[test]
    fn non_invariant_sub_bundle() {
        // S3: the subgroup {e,(1 2)} is not normal
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let g = FiniteGroupoid::from_group(&s3);
        let err = g.quotient(&[vec![0, 4]]).unwrap_err();
        assert!(matches!(err, GroupoidError::NotInvariant { .. }));
    }

    #[test]
    fn bundle_groupoid_indexing() {
        let b = GroupBundle::new(
            vec!["x".into(), "y".into()],
            vec![FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)],
        );
        let g = b.as_groupoid();
        assert_eq!(g.num_arrows(), 5);
        assert_eq!(b.unflatten(b.flat_index(1, 2)), (1, 2));
        assert_eq!(g.comp(3, 4), b.flat_index(1, 0));
    }
}
