use std::sync::Arc;

use coboundary::abgroup::{element_from_character_table, iota_embed};
use coboundary::cocycle::{coboundary_of, solve_circle_coboundary};
use coboundary::conditional::{cond_compose, cond_sub, is_invariant};
use coboundary::{
    coboundary_from_potential, moore_schmidt_decide, validate_cocycle, AbelianGroup, AbstractMap,
    CircleElement, CondElement, FinAbGroup, FiniteGroup, GroupAction, MeasureAlgebra,
};
use proptest::prelude::*;

fn rotation() -> GroupAction {
    let base = Arc::new(MeasureAlgebra::uniform(&["a", "b", "c"]).unwrap());
    let maps = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        .iter()
        .map(|p| AbstractMap::from_indices(base.clone(), base.clone(), p.to_vec()).unwrap())
        .collect();
    GroupAction::new(Arc::new(FiniteGroup::cyclic(3)), base, maps).unwrap()
}

/// S3 on the three points, with a fourth point fixed.
fn s3_on_points() -> GroupAction {
    let base = Arc::new(MeasureAlgebra::uniform(&["p", "q", "r", "z"]).unwrap());
    let s3 = FiniteGroup::s3();
    // r = (p q r), s = (q r); the remaining elements are products
    let r = vec![1, 2, 0, 3];
    let s = vec![0, 2, 1, 3];
    let compose = |a: &[usize], b: &[usize]| b.iter().map(|&x| a[x]).collect::<Vec<_>>();
    let id = vec![0, 1, 2, 3];
    let r2 = compose(&r, &r);
    let perms = [
        id.clone(),
        r.clone(),
        r2.clone(),
        s.clone(),
        compose(&s, &r),
        compose(&s, &r2),
    ];
    let perms: Vec<Vec<usize>> = s3
        .names()
        .iter()
        .enumerate()
        .map(|(i, _)| perms[i].clone())
        .collect();
    let maps = perms
        .into_iter()
        .map(|p| AbstractMap::from_indices(base.clone(), base.clone(), p).unwrap())
        .collect();
    GroupAction::new(Arc::new(s3), base, maps).unwrap()
}

#[test]
fn s3_permutation_action_is_valid() {
    let a = s3_on_points();
    let orbits = a.orbits_and_stabilizers();
    assert_eq!(orbits.orbits(), &[vec![0, 1, 2], vec![3]]);
    assert_eq!(orbits.stabilizer(0).len(), 2);
}

#[test]
fn rotation_solution_differs_from_potential_by_a_constant() {
    let action = rotation();
    let theta = CondElement::new(
        action.base().clone(),
        vec![
            CircleElement::ZERO,
            CircleElement::from_ratio(1, 2),
            CircleElement::from_ratio(1, 4),
        ],
    )
    .unwrap();
    let c = coboundary_of(&coboundary::abgroup::Circle, &action, &theta).unwrap();
    let alpha = solve_circle_coboundary(&action, &c).unwrap();
    let diff = cond_sub(&coboundary::abgroup::Circle, &alpha, &theta).unwrap();
    assert!(diff.values().iter().all(|v| v == diff.get(0)));
}

fn moduli_strategy() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..7, 1..4)
}

proptest! {
    #[test]
    fn iota_round_trips(moduli in moduli_strategy(), seed in any::<u64>()) {
        let k = FinAbGroup::new(moduli).unwrap();
        let e = k.element_at(seed as usize % k.order());
        prop_assert_eq!(element_from_character_table(&iota_embed(&k, &e)).unwrap(), e);
    }

    /// `ρ_{γ⁻¹} = −ρ_γ ∘ T^{γ⁻¹}` for any cocycle; checked on coboundaries
    /// of random potentials under S3.
    #[test]
    fn inverse_identity(values in prop::collection::vec(0u32..6, 4)) {
        let action = s3_on_points();
        let k = FinAbGroup::new(vec![2, 3]).unwrap();
        let f = CondElement::new(
            action.base().clone(),
            values.iter().map(|&v| k.element_at(v as usize)).collect(),
        ).unwrap();
        let rho = coboundary_from_potential(&action, &k, &f).unwrap();
        prop_assert!(validate_cocycle(&rho).is_ok());
        let group = action.group();
        for g in 0..group.order() {
            let inv = group.inverse(g);
            let moved = cond_compose(rho.component(g), action.map(inv)).unwrap();
            let neg = moved.map(|v| AbelianGroup::neg(&k, v));
            prop_assert_eq!(rho.component(inv), &neg);
        }
        let found = moore_schmidt_decide(&rho).unwrap();
        let diff = cond_sub(&k, &f, found.potential().unwrap()).unwrap();
        prop_assert!(is_invariant(&action, &diff).unwrap());
    }
}
