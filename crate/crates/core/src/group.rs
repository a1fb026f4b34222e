//! Finite groups as Cayley tables, homomorphisms, subgroups and quotients.
//!
//! Elements are the indices `0..order`; labels are only used for display and
//! for resolving scenario input. All maps are dense arrays indexed by element.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::settings;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table is not total: {0}")]
    Malformed(String),
    #[error("group of order {order} exceeds the size limit {limit}")]
    SizeLimit { order: usize, limit: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no inverse")]
    NoInverse { element: String },
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: String, b: String, c: String },
    #[error("not a homomorphism: f({a}*{b}) != f({a})*f({b})")]
    NotHomomorphism { a: String, b: String },
    #[error("subset is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup is not normal: {g} * {n} * {g}^-1 is outside")]
    NotNormal { g: String, n: String },
    #[error("group is not abelian: {a} and {b} do not commute")]
    NotAbelian { a: String, b: String },
    #[error("unknown element {0}")]
    UnknownElement(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {}, {:?})", self.order(), self.labels)
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: `table[a][b]` is the product `a*b`.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = labels.len();
        let limit = settings::current().max_group_order;
        if n > limit {
            return Err(GroupError::SizeLimit { order: n, limit });
        }
        if n == 0 {
            return Err(GroupError::Malformed("empty element set".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::Malformed(format!("expected a {n}x{n} table")));
        }
        if let Some(v) = table.iter().flatten().find(|&&v| v >= n) {
            return Err(GroupError::Malformed(format!("entry {v} is not an element")));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let at = |a: usize, b: usize| flat[a * n + b];

        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![0; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| GroupError::NoInverse {
                    element: labels[x].clone(),
                })?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NonAssociative {
                            a: labels[a].clone(),
                            b: labels[b].clone(),
                            c: labels[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            table: flat,
            identity,
            inverse,
        })
    }

    /// Builds a group from a multiplication closure on `0..n`.
    pub fn from_fn(labels: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        let n = labels.len();
        let table = (0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect();
        Self::from_table(labels, table)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Z/n with labels `0..n`.
    pub fn cyclic(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_fn(labels, |a, b| (a + b) % n).expect("cyclic group")
    }

    pub fn klein4() -> Self {
        let labels = ["e", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        Self::from_fn(labels, |a, b| a ^ b).expect("klein four-group")
    }

    /// Symmetric group on `n` letters (`n` at most 4).
    ///
    /// Even permutations come first, each parity class in lexicographic order of
    /// the one-line notation; so for `n = 3` the alternating group is `{0,1,2}`.
    /// Composition is `(s*t)(i) = s(t(i))`. Labels use cycle notation on `1..=n`.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > 4 {
            return Err(GroupError::Malformed(format!(
                "symmetric(n) is available for 1 <= n <= 4, got {n}"
            )));
        }
        let perms = permutations_by_parity(n);
        let labels = perms.iter().map(|p| cycle_notation(p)).collect();
        let index_of = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                        index_of(&st)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(labels, table)
    }

    /// Direct product; element `(a, b)` has index `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<Self, GroupError> {
        let m = other.order();
        let labels = self
            .elements()
            .flat_map(|a| other.elements().map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", self.label(a), other.label(b)))
            .collect();
        Self::from_fn(labels, |x, y| {
            self.mul(x / m, y / m) * m + other.mul(x % m, y % m)
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// `g h g^-1`
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_abelian(&self) -> Result<(), GroupError> {
        for a in self.elements() {
            for b in a + 1..self.order() {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(GroupError::NotAbelian {
                        a: self.labels[a].clone(),
                        b: self.labels[b].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.check_abelian().is_ok()
    }

    /// Checks that `subset` is closed under products and inverses and contains
    /// the identity.
    pub fn check_subgroup(&self, subset: &[usize]) -> Result<(), GroupError> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        if let Some(&x) = set.iter().find(|&&x| x >= self.order()) {
            return Err(GroupError::UnknownElement(x.to_string()));
        }
        if !set.contains(&self.identity) {
            return Err(GroupError::NotSubgroup("identity missing".into()));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(GroupError::NotSubgroup(format!(
                    "inverse of {} missing",
                    self.labels[a]
                )));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(GroupError::NotSubgroup(format!(
                        "{}*{} missing",
                        self.labels[a], self.labels[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_normal(&self, subset: &[usize]) -> Result<(), GroupError> {
        self.check_subgroup(subset)?;
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        for g in self.elements() {
            for &n in &set {
                if !set.contains(&self.conj(g, n)) {
                    return Err(GroupError::NotNormal {
                        g: self.labels[g].clone(),
                        n: self.labels[n].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The subgroup on `subset` (sorted) as a group in its own right, together
    /// with the inclusion homomorphism.
    pub fn subgroup(&self, subset: &[usize]) -> Result<(FiniteGroup, GroupHom), GroupError> {
        self.check_subgroup(subset)?;
        let elems: Vec<usize> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let labels = elems.iter().map(|&e| self.labels[e].clone()).collect();
        let pos = |x: usize| elems.iter().position(|&e| e == x).expect("closed");
        let sub = FiniteGroup::from_fn(labels, |a, b| pos(self.mul(elems[a], elems[b])))?;
        let incl = GroupHom::new(sub.clone(), self.clone(), elems)?;
        Ok((sub, incl))
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated_by(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Resolves a label or a decimal index.
    pub fn resolve(&self, token: &str) -> Result<usize, GroupError> {
        if let Some(i) = self.index_of(token) {
            return Ok(i);
        }
        token
            .parse::<usize>()
            .ok()
            .filter(|&i| i < self.order())
            .ok_or_else(|| GroupError::UnknownElement(token.to_string()))
    }
}

fn permutations_by_parity(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    rec(&mut Vec::new(), n, &mut all);
    let parity = |p: &Vec<usize>| {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv % 2
    };
    let (mut even, odd): (Vec<_>, Vec<_>) = all.into_iter().partition(|p| parity(p) == 0);
    even.extend(odd);
    even
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = p[x];
        }
        let body: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("({})", body.join(" ")));
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self, GroupError> {
        if map.len() != source.order() || map.iter().any(|&v| v >= target.order()) {
            return Err(GroupError::Malformed("assignment must be total and land in the target".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotHomomorphism {
                        a: source.label(a).to_string(),
                        b: source.label(b).to_string(),
                    });
                }
            }
        }
        Ok(GroupHom { source, target, map })
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// The image, sorted; verified to be a subgroup of the target.
    pub fn image(&self) -> Vec<usize> {
        let img: Vec<usize> = self.map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        debug_assert!(self.target.check_subgroup(&img).is_ok());
        img
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.source
            .elements()
            .filter(|&a| self.map[a] == self.target.identity())
            .collect()
    }
}

/// Validated homomorphism from an assignment given on all source elements.
pub fn make_hom(src: &FiniteGroup, dst: &FiniteGroup, assignment: Vec<usize>) -> Result<GroupHom, GroupError> {
    GroupHom::new(src.clone(), dst.clone(), assignment)
}

/// `G/N` together with the projection. Cosets are ordered by their smallest
/// element, so the identity coset comes first.
pub fn quotient_group(g: &FiniteGroup, normal: &[usize]) -> Result<(FiniteGroup, GroupHom), GroupError> {
    g.check_normal(normal)?;
    let n: BTreeSet<usize> = normal.iter().copied().collect();
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        reps.push(x);
        for &m in &n {
            coset_of[g.mul(x, m)] = idx;
        }
    }
    let labels = reps
        .iter()
        .map(|&r| {
            if n.len() == 1 {
                g.label(r).to_string()
            } else {
                format!("{}N", g.label(r))
            }
        })
        .collect();
    let q = FiniteGroup::from_fn(labels, |a, b| coset_of[g.mul(reps[a], reps[b])])?;
    let proj = GroupHom::new(g.clone(), q.clone(), coset_of)?;
    Ok((q, proj))
}
