//! Conditional elements `Cond(Y) = Hom(X_μ → Y)` over a finite measure
//! algebra.
//!
//! At finite scale a conditional element is a total map from the atoms of
//! the base algebra into `Y`, so every identity holds everywhere rather than
//! almost everywhere. Group operations are pointwise.
//!
//! The retract `w : Cond(𝕋) → Cond(𝕋)^Γ` is evaluation at the lowest atom of
//! each orbit. Any retract onto the invariant subgroup would do; different
//! retracts give different, equally valid, coboundary witnesses.

mod action;

use std::sync::Arc;

use thiserror::Error;

pub use action::{
    orbits_and_stabilizers, ActionError, FiniteGroup, GroupAction, GroupTableError,
    OrbitDecomposition,
};

use crate::abgroup::{
    find_additivity_violation, AbGroupError, AbelianGroup, Character, FinAbGroup,
    GroupElement,
};
use crate::balg::{same_algebra, AbstractMap, MeasureAlgebra};
use crate::circle::CircleElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CondError {
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("family is not additive at atom {atom}: characters {k1:?} and {k2:?}")]
    NotAdditive {
        atom: usize,
        k1: Character,
        k2: Character,
    },
    #[error("value at atom {atom} lies outside the subset")]
    NotSupported { atom: usize },
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

/// A conditional element: one value per atom of the base algebra.
#[derive(Debug, Clone)]
pub struct CondElement<V> {
    base: Arc<MeasureAlgebra>,
    values: Vec<V>,
}

impl<V: PartialEq> PartialEq for CondElement<V> {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && same_algebra(&self.base, &other.base)
    }
}

impl<V: Eq> Eq for CondElement<V> {}

impl<V: Clone> CondElement<V> {
    pub fn new(base: Arc<MeasureAlgebra>, values: Vec<V>) -> Result<Self, CondError> {
        if values.len() != base.len() {
            return Err(CondError::Mismatch(format!(
                "{} values for {} atoms",
                values.len(),
                base.len()
            )));
        }
        Ok(CondElement { base, values })
    }

    /// The constant conditional element, usually written simply as `y`.
    pub fn constant(base: Arc<MeasureAlgebra>, value: V) -> Self {
        let values = vec![value; base.len()];
        CondElement { base, values }
    }

    pub fn base(&self) -> &Arc<MeasureAlgebra> {
        &self.base
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn get(&self, x: usize) -> &V {
        &self.values[x]
    }

    pub fn map<W, F: FnMut(&V) -> W>(&self, f: F) -> CondElement<W> {
        CondElement {
            base: self.base.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    fn zip_with<F: FnMut(&V, &V) -> V>(&self, other: &Self, mut f: F) -> Result<Self, CondError> {
        self.check_base(&other.base)?;
        Ok(CondElement {
            base: self.base.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    fn check_base(&self, base: &Arc<MeasureAlgebra>) -> Result<(), CondError> {
        if same_algebra(&self.base, base) {
            Ok(())
        } else {
            Err(CondError::Mismatch("conditional elements over different bases".into()))
        }
    }
}

/// `(θ ∘ T)(x) = θ(T x)`.
pub fn cond_compose<V: Clone>(
    theta: &CondElement<V>,
    t: &AbstractMap,
) -> Result<CondElement<V>, CondError> {
    if !same_algebra(t.source(), &theta.base) || !same_algebra(t.target(), &theta.base) {
        return Err(CondError::Mismatch(
            "map is not an endomorphism of the conditional element's base".into(),
        ));
    }
    Ok(CondElement {
        base: theta.base.clone(),
        values: (0..theta.values.len())
            .map(|x| theta.values[t.apply(x)].clone())
            .collect(),
    })
}

pub enum CondOp<'a, V> {
    Add(&'a CondElement<V>, &'a CondElement<V>),
    Sub(&'a CondElement<V>, &'a CondElement<V>),
    Neg(&'a CondElement<V>),
}

pub fn cond_group_op<G: AbelianGroup>(
    group: &G,
    op: CondOp<'_, G::Elem>,
) -> Result<CondElement<G::Elem>, CondError> {
    match op {
        CondOp::Add(a, b) => a.zip_with(b, |x, y| group.add(x, y)),
        CondOp::Sub(a, b) => a.zip_with(b, |x, y| group.sub(x, y)),
        CondOp::Neg(a) => Ok(a.map(|x| group.neg(x))),
    }
}

pub fn cond_add<G: AbelianGroup>(
    group: &G,
    a: &CondElement<G::Elem>,
    b: &CondElement<G::Elem>,
) -> Result<CondElement<G::Elem>, CondError> {
    cond_group_op(group, CondOp::Add(a, b))
}

pub fn cond_sub<G: AbelianGroup>(
    group: &G,
    a: &CondElement<G::Elem>,
    b: &CondElement<G::Elem>,
) -> Result<CondElement<G::Elem>, CondError> {
    cond_group_op(group, CondOp::Sub(a, b))
}

pub fn cond_zero<G: AbelianGroup>(group: &G, base: Arc<MeasureAlgebra>) -> CondElement<G::Elem> {
    CondElement::constant(base, group.zero())
}

/// `⟨k̂, ρ⟩`, evaluated atomwise.
pub fn cond_character(
    k: &FinAbGroup,
    chi: &Character,
    rho: &CondElement<GroupElement>,
) -> Result<CondElement<CircleElement>, CondError> {
    k.check_element(chi)?;
    for v in &rho.values {
        k.check_element(v)?;
    }
    Ok(rho.map(|v| k.pairing_unchecked(chi, v)))
}

/// `θ ∘ T^γ = θ` for every `γ`.
pub fn is_invariant<V: Clone + PartialEq>(
    action: &GroupAction,
    theta: &CondElement<V>,
) -> Result<bool, CondError> {
    for t in action.maps() {
        if cond_compose(theta, t)? != *theta {
            return Ok(false);
        }
    }
    Ok(true)
}

impl OrbitDecomposition {
    /// The retract `w`: each atom takes the value at its orbit representative.
    pub fn retract<V: Clone>(&self, theta: &CondElement<V>) -> CondElement<V> {
        CondElement {
            base: theta.base.clone(),
            values: (0..theta.values.len())
                .map(|x| theta.values[self.representative_of(x)].clone())
                .collect(),
        }
    }
}

pub fn retract_w(
    action: &GroupAction,
    theta: &CondElement<CircleElement>,
) -> Result<CondElement<CircleElement>, CondError> {
    theta.check_base(action.base())?;
    Ok(action.orbits_and_stabilizers().retract(theta))
}

/// Inverts `F ↦ (k̂ ↦ ⟨k̂, F⟩)`.
///
/// `family` is indexed by lexicographic character order. At each atom the
/// table `k̂ ↦ family(k̂)(x)` must be additive; the unique `F(x)` is then
/// recovered by element-level duality.
pub fn conditional_reconstruct(
    base: &Arc<MeasureAlgebra>,
    k: &FinAbGroup,
    family: &[CondElement<CircleElement>],
) -> Result<CondElement<GroupElement>, CondError> {
    let dual = k.dual();
    if family.len() != dual.order() {
        return Err(CondError::Mismatch(format!(
            "family has {} members for {} characters",
            family.len(),
            dual.order()
        )));
    }
    for member in family {
        member.check_base(base)?;
    }
    let mut values = Vec::with_capacity(base.len());
    for atom in 0..base.len() {
        let table: Vec<CircleElement> = family.iter().map(|m| m.values[atom]).collect();
        match k.reconstruct_from_values(&table) {
            Ok(v) => values.push(v),
            Err(AbGroupError::NotAdditive { k1, k2 }) => {
                return Err(CondError::NotAdditive { atom, k1, k2 })
            }
            Err(AbGroupError::TorsionViolation { .. }) => {
                let (k1, k2) = find_additivity_violation(&dual, &table)
                    .expect("a torsion violation breaks additivity");
                return Err(CondError::NotAdditive { atom, k1, k2 });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(CondElement {
        base: base.clone(),
        values,
    })
}

/// The full family `k̂ ↦ ⟨k̂, F⟩` in lexicographic character order.
pub fn character_family(
    k: &FinAbGroup,
    f: &CondElement<GroupElement>,
) -> Result<Vec<CondElement<CircleElement>>, CondError> {
    k.dual()
        .elements()
        .map(|chi| cond_character(k, &chi, f))
        .collect()
}

/// Succeeds iff every value of `s` lies in `subset`, i.e. `s*(subset) = 1`.
pub fn corestrict<V: Clone + PartialEq>(
    s: &CondElement<V>,
    subset: &[V],
) -> Result<CondElement<V>, CondError> {
    match s.values.iter().position(|v| !subset.contains(v)) {
        Some(atom) => Err(CondError::NotSupported { atom }),
        None => Ok(s.clone()),
    }
}

/// Identifies a conditional element of `K₁ × K₂` with a pair of
/// conditional elements of `K₁` and `K₂`.
pub fn cond_split(
    k1: &FinAbGroup,
    f: &CondElement<GroupElement>,
) -> (CondElement<GroupElement>, CondElement<GroupElement>) {
    let (a, b): (Vec<_>, Vec<_>) = f.values.iter().map(|v| k1.split(v)).unzip();
    (
        CondElement { base: f.base.clone(), values: a },
        CondElement { base: f.base.clone(), values: b },
    )
}

pub fn cond_pair(
    a: &CondElement<GroupElement>,
    b: &CondElement<GroupElement>,
) -> Result<CondElement<GroupElement>, CondError> {
    a.check_base(&b.base)?;
    Ok(CondElement {
        base: a.base.clone(),
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| FinAbGroup::join(x, y))
            .collect(),
    })
}

/// Circle-valued conditional elements, the group `Cond(𝕋)`.
pub type CondCircle = CondElement<CircleElement>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::Circle;
    use crate::balg::{compose_maps, hom_from_atom_map};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(p: i64, q: u64) -> CircleElement {
        CircleElement::from_ratio(p, q)
    }

    fn alg(ids: &[&str]) -> Arc<MeasureAlgebra> {
        Arc::new(MeasureAlgebra::uniform(ids).unwrap())
    }

    fn rotation_action() -> GroupAction {
        let base = alg(&["a", "b", "c"]);
        let r = hom_from_atom_map(base.clone(), base.clone(), [("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let r2 = compose_maps(&r, &r).unwrap();
        GroupAction::new(
            Arc::new(FiniteGroup::cyclic(3)),
            base.clone(),
            vec![AbstractMap::identity(base), r, r2],
        )
        .unwrap()
    }

    fn circ(base: &Arc<MeasureAlgebra>, v: &[(i64, u64)]) -> CondCircle {
        CondElement::new(base.clone(), v.iter().map(|&(p, q)| c(p, q)).collect()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let action = rotation_action();
        let base = action.base().clone();
        let theta = circ(&base, &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(cond_compose(&theta, &AbstractMap::identity(base.clone())).unwrap(), theta);
        assert_eq!(
            cond_compose(&theta, action.map(1)).unwrap(),
            circ(&base, &[(1, 2), (1, 3), (0, 1)])
        );
        let k = CondElement::constant(base.clone(), c(2, 5));
        assert_eq!(cond_compose(&k, action.map(2)).unwrap(), k);

        let other = alg(&["x"]);
        assert!(cond_compose(&theta, &AbstractMap::identity(other)).is_err());
    }

    #[test]
    fn group_op_examples() {
        let base = alg(&["a", "b"]);
        let theta = circ(&base, &[(1, 3), (3, 4)]);
        let neg = cond_group_op(&Circle, CondOp::Neg(&theta)).unwrap();
        assert_eq!(cond_add(&Circle, &theta, &neg).unwrap(), cond_zero(&Circle, base.clone()));
        assert_eq!(
            cond_add(&Circle, &circ(&base, &[(1, 2), (0, 1)]), &circ(&base, &[(1, 2), (1, 3)])).unwrap(),
            circ(&base, &[(0, 1), (1, 3)])
        );
        let other = alg(&["a", "b", "c"]);
        assert!(cond_add(&Circle, &theta, &cond_zero(&Circle, other)).is_err());
    }

    #[test]
    fn group_op_associativity_random() {
        let base = alg(&["a", "b", "c", "d"]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rand_elem = |rng: &mut ChaCha8Rng| {
            CondElement::new(
                base.clone(),
                (0..4).map(|_| c(rng.gen_range(0..60), rng.gen_range(1..=12))).collect(),
            )
            .unwrap()
        };
        for _ in 0..100 {
            let (x, y, z) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
            let left = cond_add(&Circle, &cond_add(&Circle, &x, &y).unwrap(), &z).unwrap();
            let right = cond_add(&Circle, &x, &cond_add(&Circle, &y, &z).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn character_examples() {
        let base = alg(&["a", "b"]);
        let k = FinAbGroup::cyclic(2);
        let rho = CondElement::new(base.clone(), vec![k.element(&[1]).unwrap(), k.zero()]).unwrap();
        assert_eq!(cond_character(&k, &k.zero(), &rho).unwrap(), cond_zero(&Circle, base.clone()));
        assert_eq!(
            cond_character(&k, &k.element(&[1]).unwrap(), &rho).unwrap(),
            circ(&base, &[(1, 2), (0, 1)])
        );
    }

    #[test]
    fn character_is_additive_in_the_character() {
        let base = alg(&["a", "b", "c"]);
        let k = FinAbGroup::cyclic(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let rho = CondElement::new(
                base.clone(),
                (0..3).map(|_| k.element(&[rng.gen_range(0..4)]).unwrap()).collect(),
            )
            .unwrap();
            for k1 in k.elements() {
                for k2 in k.elements() {
                    let lhs = cond_character(&k, &k.add(&k1, &k2), &rho).unwrap();
                    let rhs = cond_add(
                        &Circle,
                        &cond_character(&k, &k1, &rho).unwrap(),
                        &cond_character(&k, &k2, &rho).unwrap(),
                    )
                    .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn retract_and_invariance_examples() {
        let action = rotation_action();
        let base = action.base().clone();
        let theta = circ(&base, &[(1, 2), (1, 3), (0, 1)]);
        assert!(!is_invariant(&action, &theta).unwrap());
        assert_eq!(retract_w(&action, &theta).unwrap(), circ(&base, &[(1, 2), (1, 2), (1, 2)]));

        let k = CondElement::constant(base.clone(), c(1, 7));
        assert!(is_invariant(&action, &k).unwrap());
        assert_eq!(retract_w(&action, &k).unwrap(), k);

        let trivial = GroupAction::trivial(Arc::new(FiniteGroup::klein()), base.clone());
        assert!(is_invariant(&trivial, &theta).unwrap());
    }

    #[test]
    fn reconstruct_examples() {
        let base = alg(&["a", "b", "c"]);
        let k = FinAbGroup::new(vec![2, 2]).unwrap();
        let k0 = k.element(&[1, 0]).unwrap();
        let constant = CondElement::constant(base.clone(), k0.clone());
        let fam = character_family(&k, &constant).unwrap();
        assert_eq!(conditional_reconstruct(&base, &k, &fam).unwrap(), constant);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let rho = CondElement::new(
                base.clone(),
                (0..3)
                    .map(|_| k.element(&[rng.gen_range(0..2), rng.gen_range(0..2)]).unwrap())
                    .collect(),
            )
            .unwrap();
            let fam = character_family(&k, &rho).unwrap();
            assert_eq!(conditional_reconstruct(&base, &k, &fam).unwrap(), rho);
        }
    }

    #[test]
    fn reconstruct_rejects_perturbation() {
        let base = alg(&["a", "b", "c"]);
        let k = FinAbGroup::cyclic(4);
        let rho = CondElement::new(base.clone(), vec![k.element(&[1]).unwrap(), k.element(&[2]).unwrap(), k.zero()]).unwrap();
        let mut fam = character_family(&k, &rho).unwrap();
        let mut vals = fam[3].values().to_vec();
        vals[1] = vals[1] + c(1, 4);
        fam[3] = CondElement::new(base.clone(), vals).unwrap();
        match conditional_reconstruct(&base, &k, &fam) {
            Err(CondError::NotAdditive { atom, k1, k2 }) => {
                assert_eq!(atom, 1);
                let s = k.add(&k1, &k2);
                let at = |chi: &GroupElement| *fam[k.index_of(chi)].get(atom);
                assert_ne!(at(&s), at(&k1) + at(&k2));
            }
            other => panic!("{other:?}"),
        }

        // torsion failure on the generator is also reported as a pair
        let mut fam = character_family(&k, &rho).unwrap();
        let mut vals = fam[1].values().to_vec();
        vals[2] = c(1, 3);
        fam[1] = CondElement::new(base.clone(), vals).unwrap();
        assert!(matches!(
            conditional_reconstruct(&base, &k, &fam),
            Err(CondError::NotAdditive { atom: 2, .. })
        ));
    }

    #[test]
    fn corestrict_examples() {
        let base = alg(&["a", "b"]);
        let s = circ(&base, &[(1, 2), (0, 1)]);
        let half = [c(0, 1), c(1, 2)];
        assert_eq!(corestrict(&s, &half).unwrap(), s);
        assert_eq!(corestrict(&s, &[c(0, 1)]).unwrap_err(), CondError::NotSupported { atom: 0 });
        let k = FinAbGroup::cyclic(3);
        let all: Vec<_> = k.elements().collect();
        let f = CondElement::constant(base, k.element(&[2]).unwrap());
        assert_eq!(corestrict(&f, &all).unwrap(), f);
    }

    #[test]
    fn product_identification() {
        let base = alg(&["a", "b", "c"]);
        let k1 = FinAbGroup::cyclic(2);
        let k2 = FinAbGroup::new(vec![3, 2]).unwrap();
        let p = k1.product(&k2);
        let f = CondElement::new(base.clone(), (0..3).map(|i| p.element_at(i * 5 % 12)).collect()).unwrap();
        let (a, b) = cond_split(&k1, &f);
        assert_eq!(cond_pair(&a, &b).unwrap(), f);
        // characters of a product factor through the pieces
        for chi in p.elements() {
            let (c1, c2) = k1.split(&chi);
            let whole = cond_character(&p, &chi, &f).unwrap();
            let parts = cond_add(
                &Circle,
                &cond_character(&k1, &c1, &a).unwrap(),
                &cond_character(&k2, &c2, &b).unwrap(),
            )
            .unwrap();
            assert_eq!(whole, parts);
        }
    }

    fn arb_action() -> impl Strategy<Value = GroupAction> {
        // C2 × C2 = Klein acting on four atoms through a random pair of commuting involutions
        prop_oneof![
            Just(rotation_action()),
            (0usize..4).prop_map(|mode| {
                let base = alg(&["a", "b", "c", "d"]);
                let perms: [[usize; 4]; 4] = match mode {
                    0 => [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]],
                    1 => [[0, 1, 2, 3], [1, 0, 2, 3], [0, 1, 3, 2], [1, 0, 3, 2]],
                    2 => [[0, 1, 2, 3], [1, 0, 2, 3], [0, 1, 2, 3], [1, 0, 2, 3]],
                    _ => [[0, 1, 2, 3]; 4],
                };
                let maps = perms
                    .iter()
                    .map(|p| AbstractMap::from_indices(base.clone(), base.clone(), p.to_vec()).unwrap())
                    .collect();
                GroupAction::new(Arc::new(FiniteGroup::klein()), base, maps).unwrap()
            }),
        ]
    }

    fn arb_theta(n: usize) -> impl Strategy<Value = Vec<CircleElement>> {
        prop::collection::vec((0i64..24, 1u64..=8).prop_map(|(p, q)| c(p, q)), n)
    }

    proptest! {
        #[test]
        fn retract_laws(action in arb_action(), a in arb_theta(4), b in arb_theta(4)) {
            let n = action.base().len();
            let base = action.base().clone();
            let x = CondElement::new(base.clone(), a[..n].to_vec()).unwrap();
            let y = CondElement::new(base.clone(), b[..n].to_vec()).unwrap();
            let w = |t: &CondCircle| retract_w(&action, t).unwrap();
            prop_assert_eq!(w(&cond_add(&Circle, &x, &y).unwrap()), cond_add(&Circle, &w(&x), &w(&y)).unwrap());
            prop_assert_eq!(w(&w(&x)), w(&x));
            prop_assert!(is_invariant(&action, &w(&x)).unwrap());
            if is_invariant(&action, &x).unwrap() {
                prop_assert_eq!(w(&x), x.clone());
            }
        }

        #[test]
        fn invariance_iff_orbit_constant(action in arb_action(), a in arb_theta(4)) {
            let n = action.base().len();
            let x = CondElement::new(action.base().clone(), a[..n].to_vec()).unwrap();
            let d = action.orbits_and_stabilizers();
            let orbit_constant = d.orbits().iter().all(|o| o.iter().all(|&z| x.get(z) == x.get(o[0])));
            prop_assert_eq!(is_invariant(&action, &x).unwrap(), orbit_constant);
        }

        #[test]
        fn action_compatibility(action in arb_action(), a in arb_theta(4)) {
            let n = action.base().len();
            let x = CondElement::new(action.base().clone(), a[..n].to_vec()).unwrap();
            let g = action.group().clone();
            for g1 in 0..g.order() {
                for g2 in 0..g.order() {
                    let whole = cond_compose(&x, action.map(g.mul(g1, g2))).unwrap();
                    let steps = cond_compose(&cond_compose(&x, action.map(g1)).unwrap(), action.map(g2)).unwrap();
                    prop_assert_eq!(whole, steps);
                }
            }
        }
    }
}
