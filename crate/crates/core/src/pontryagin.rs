//! Pontryagin duality for actions of `(1, H)` with `H` abelian: central
//! unitaries `u_h` are the same thing as a fibering over the dual group.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::action::{ActionError, CMAction};
use crate::algebra::{Fibering, StarAlgebra};
use crate::crossed_module::CrossedModule;
use crate::group::{FiniteGroup, GroupError};
use crate::linalg::{max_abs, Matrix, Vector, C64};
use crate::settings;

/// The characters of a finite abelian group, with values in the `n`-th roots
/// of unity (`n = |H|`). `values[ξ][h] = k` means `ξ(h) = exp(2πik/n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterGroup {
    group: FiniteGroup,
    n: usize,
    values: Vec<Vec<usize>>,
}

impl CharacterGroup {
    pub fn new(h: &FiniteGroup) -> Result<Self, GroupError> {
        h.check_abelian()?;
        let n = h.order();
        let mut gens: Vec<usize> = Vec::new();
        let mut reached = vec![h.identity()];
        for x in h.elements() {
            if !reached.contains(&x) {
                gens.push(x);
                reached = h.generated_by(&gens);
            }
        }
        // a character sends a generator of order m to a multiple of n/m
        let choices: Vec<usize> = gens.iter().map(|&g| h.element_order(g)).collect();
        let mut values = Vec::new();
        let mut digits = vec![0usize; gens.len()];
        loop {
            if let Some(v) = extend(h, &gens, &digits, &choices) {
                values.push(v);
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < choices[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        values.sort();
        values.dedup();
        Ok(CharacterGroup {
            group: h.clone(),
            n,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn trivial(&self) -> usize {
        0
    }

    pub fn value(&self, xi: usize, h: usize) -> C64 {
        C64::from_polar(1.0, TAU * self.values[xi][h] as f64 / self.n as f64)
    }

    pub fn exponents(&self, xi: usize) -> &[usize] {
        &self.values[xi]
    }

    pub fn label(&self, xi: usize) -> String {
        format!("χ{xi}")
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|x| self.label(x)).collect()
    }

    pub fn index_of(&self, exps: &[usize]) -> Option<usize> {
        self.values.binary_search_by(|v| v.as_slice().cmp(exps)).ok()
    }

    pub fn mul(&self, xi: usize, eta: usize) -> usize {
        let v: Vec<usize> = (0..self.n).map(|h| (self.values[xi][h] + self.values[eta][h]) % self.n).collect();
        self.index_of(&v).expect("characters form a group")
    }

    pub fn inv(&self, xi: usize) -> usize {
        let v: Vec<usize> = self.values[xi].iter().map(|&k| (self.n - k) % self.n).collect();
        self.index_of(&v).expect("characters form a group")
    }

    /// `ξ∘φ` for an automorphism `φ` of `H`.
    pub fn precompose(&self, xi: usize, phi: impl Fn(usize) -> usize) -> usize {
        let v: Vec<usize> = (0..self.n).map(|h| self.values[xi][phi(h)]).collect();
        self.index_of(&v).expect("automorphisms permute characters")
    }
}

fn extend(h: &FiniteGroup, gens: &[usize], digits: &[usize], orders: &[usize]) -> Option<Vec<usize>> {
    let n = h.order();
    let mut val: Vec<Option<usize>> = vec![None; n];
    val[h.identity()] = Some(0);
    let mut stack = vec![h.identity()];
    while let Some(x) = stack.pop() {
        for (i, &g) in gens.iter().enumerate() {
            let y = h.mul(g, x);
            let v = (val[x].unwrap() + digits[i] * (n / orders[i])) % n;
            match val[y] {
                None => {
                    val[y] = Some(v);
                    stack.push(y);
                }
                Some(w) if w != v => return None,
                _ => {}
            }
        }
    }
    let val: Vec<usize> = val.into_iter().map(Option::unwrap).collect();
    for a in h.elements() {
        for b in h.elements() {
            if val[h.mul(a, b)] != (val[a] + val[b]) % n {
                return None;
            }
        }
    }
    Some(val)
}

/// `p_ξ = |H|⁻¹ Σ_h conj(ξ(h)) u_h` in full coordinates.
pub fn spectral_projections(act: &CMAction, x: usize, chars: &CharacterGroup) -> Vec<Vector> {
    let a = act.algebra();
    let n = chars.group().order() as f64;
    (0..chars.len())
        .map(|xi| {
            let mut p = a.zero();
            for h in chars.group().elements() {
                p += act.u_full(x, h) * chars.value(xi, h).conj();
            }
            p / C64::new(n, 0.0)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PontryaginDecomposition {
    pub characters: CharacterGroup,
    /// `p_ξ` for every character, in full coordinates; some may vanish.
    pub projections: Vec<Vector>,
    /// `A` fibered over the character labels.
    pub algebra: Arc<StarAlgebra>,
}

impl PontryaginDecomposition {
    pub fn fiber_dims(&self) -> Vec<usize> {
        (0..self.characters.len()).map(|xi| self.algebra.fiber(xi).dim()).collect()
    }
}

/// Turns an action of `(1, H)` into a fibering of `A` over `Ĥ`.
pub fn pontryagin_decompose(act: &CMAction) -> Result<PontryaginDecomposition, ActionError> {
    let cm = act.cm();
    if cm.groupoid().num_arrows() != 1 {
        return Err(ActionError::NotBGroup("the acting groupoid must be trivial".into()));
    }
    let h = cm.bundle().fiber(0).clone();
    let chars = CharacterGroup::new(&h).map_err(|e| ActionError::NotBGroup(e.to_string()))?;
    let a = act.algebra();
    let tol = settings::current().tol_alg;
    for k in h.elements() {
        let uk = act.u_full(0, k);
        for i in 0..a.dim() {
            if max_abs(&a.commutator(&uk, &a.basis(i))) > tol {
                return Err(ActionError::NotCentral {
                    h: h.label(k).into(),
                    a: a.label(i).into(),
                });
            }
        }
    }
    let projections = spectral_projections(act, 0, &chars);
    let fibering = Fibering {
        labels: chars.labels(),
        projections: projections.clone(),
    };
    let algebra = Arc::new(a.refibered(fibering)?);
    Ok(PontryaginDecomposition {
        characters: chars,
        projections,
        algebra,
    })
}

/// The inverse direction: `u_h = Σ_ξ ξ(h) p_ξ` for `A` fibered over `Ĥ`.
pub fn pontryagin_compose(algebra: &Arc<StarAlgebra>, chars: &CharacterGroup) -> Result<CMAction, ActionError> {
    if algebra.fibering().labels != chars.labels() {
        return Err(ActionError::FiberMismatch(format!(
            "expected a fibering over {:?}",
            chars.labels()
        )));
    }
    let cm = CrossedModule::b_group(chars.group())?;
    let ps = &algebra.fibering().projections;
    let u: Vec<Vector> = chars
        .group()
        .elements()
        .map(|h| {
            let mut v = algebra.zero();
            for (xi, p) in ps.iter().enumerate() {
                v += p * chars.value(xi, h);
            }
            v
        })
        .collect();
    let single = Arc::new(algebra.refibered(Fibering::single("*", algebra.unit()))?);
    let d = single.dim();
    CMAction::from_parts(&cm, single, vec![Matrix::identity(d, d)], vec![u])
}

/// For a group action with `∂` trivial and `H` abelian, checks that `α_g`
/// permutes the spectral projections by `α_g(p_ξ) = p_{ξ∘c_g⁻¹}` and returns
/// the permutation `perm[g][ξ]`.
pub fn dual_action(act: &CMAction) -> Result<Vec<Vec<usize>>, ActionError> {
    let cm = act.cm();
    let g = cm
        .group()
        .ok_or_else(|| ActionError::NotBGroup("a group, not a groupoid, must act".into()))?;
    let h = cm.bundle().fiber(0).clone();
    if h.elements().any(|k| cm.d(0, k) != g.identity()) {
        return Err(ActionError::NotBGroup("∂ must be trivial".into()));
    }
    let chars = CharacterGroup::new(&h).map_err(|e| ActionError::NotBGroup(e.to_string()))?;
    let ps = spectral_projections(act, 0, &chars);
    let tol = settings::current().tol_alg;
    let mut perm = Vec::with_capacity(g.order());
    for x in g.elements() {
        let xinv = g.inv(x);
        let row: Vec<usize> = (0..chars.len()).map(|xi| chars.precompose(xi, |k| cm.c(xinv, k))).collect();
        for xi in 0..chars.len() {
            if max_abs(&(act.alpha().apply_full(x, &ps[xi]) - &ps[row[xi]])) > tol {
                return Err(ActionError::NotEquivariant(format!(
                    "α_{}(p_{}) != p_{}",
                    g.label(x),
                    chars.label(xi),
                    chars.label(row[xi])
                )));
            }
        }
        perm.push(row);
    }
    Ok(perm)
}
