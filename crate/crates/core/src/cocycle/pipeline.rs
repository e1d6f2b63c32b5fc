//! The character-wise decision procedure.
//!
//! For each character `k̂` the circle cocycle `⟨k̂, ρ⟩` is solved orbit by
//! orbit. If every character is solvable, the defects
//! `c(k̂₁, k̂₂) = α_{k̂₁+k̂₂} − α_{k̂₁} − α_{k̂₂}` are invariant, so subtracting
//! the retract `w(α_{k̂})` makes the family additive in `k̂`, and conditional
//! duality recovers the potential `F`. Steps that cannot fail for a valid
//! cocycle are still checked and surface as `InternalInconsistency`.

use std::collections::VecDeque;

use thiserror::Error;

use super::{
    validate_cocycle, Certificate, Cocycle, CocycleError, Decision, DefectRecord, PipelineTrace,
    Witness,
};
use crate::abgroup::Circle;
use crate::circle::CircleElement;
use crate::conditional::{
    cond_compose, cond_sub, conditional_reconstruct, is_invariant, CondCircle, CondElement,
    CondError, GroupAction, OrbitDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("γ{gamma} fixes atom {atom} but the cocycle takes the value {value} there")]
    Obstruction {
        gamma: usize,
        atom: usize,
        value: CircleElement,
    },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Cond(#[from] CondError),
}

/// Finds `α` with `c_γ = α ∘ T^γ − α`.
pub fn solve_circle_coboundary(
    action: &GroupAction,
    c: &[CondCircle],
) -> Result<CondCircle, SolveError> {
    solve_circle_coboundary_with(action, &action.orbits_and_stabilizers(), c)
}

/// As [`solve_circle_coboundary`], reusing a precomputed orbit decomposition.
///
/// On each orbit, `α` is 0 at the representative `x₀` and is propagated by a
/// breadth-first walk using `α(T^γ y) = α(y) + c_γ(y)`. The walk is well
/// defined exactly when `c_γ(x₀) = 0` for every `γ` fixing `x₀`; otherwise
/// that `(γ, x₀)` is returned as the obstruction.
pub fn solve_circle_coboundary_with(
    action: &GroupAction,
    orbits: &OrbitDecomposition,
    c: &[CondCircle],
) -> Result<CondCircle, SolveError> {
    let group = action.group();
    let n = action.base().len();
    if c.len() != group.order() {
        return Err(CondError::Mismatch(format!(
            "{} components for a group of order {}",
            c.len(),
            group.order()
        ))
        .into());
    }
    if let Some(bad) = c.iter().position(|ci| ci.values().len() != n) {
        return Err(CondError::Mismatch(format!("component {bad} has the wrong length")).into());
    }

    let mut alpha: Vec<Option<CircleElement>> = vec![None; n];
    for orbit in 0..orbits.orbits().len() {
        let x0 = orbits.representative(orbit);
        for &g in orbits.stabilizer(x0) {
            let value = *c[g].get(x0);
            if !value.is_zero() {
                return Err(SolveError::Obstruction {
                    gamma: g,
                    atom: x0,
                    value,
                });
            }
        }
        alpha[x0] = Some(CircleElement::ZERO);
        let mut queue = VecDeque::from([x0]);
        while let Some(y) = queue.pop_front() {
            let ay = alpha[y].expect("queued atoms are assigned");
            for (g, cg) in c.iter().enumerate() {
                let z = action.apply(g, y);
                if alpha[z].is_none() {
                    alpha[z] = Some(ay + *cg.get(y));
                    queue.push_back(z);
                }
            }
        }
    }

    let alpha = CondElement::new(
        action.base().clone(),
        alpha.into_iter().map(|a| a.expect("orbits cover the base")).collect(),
    )?;
    for (g, t) in action.maps().iter().enumerate() {
        let lhs = cond_sub(&Circle, &cond_compose(&alpha, t)?, &alpha)?;
        if lhs != c[g] {
            return Err(SolveError::InternalInconsistency(format!(
                "solution fails α ∘ T^γ − α = c_γ for γ{g}; the input is not a cocycle"
            )));
        }
    }
    Ok(alpha)
}

/// `c(k̂₁, k̂₂) = α_{k̂₁+k̂₂} − α_{k̂₁} − α_{k̂₂}`, checked to be invariant.
pub fn defect(
    action: &GroupAction,
    alpha_k1: &CondCircle,
    alpha_k2: &CondCircle,
    alpha_sum: &CondCircle,
) -> Result<CondCircle, CocycleError> {
    let c = cond_sub(&Circle, &cond_sub(&Circle, alpha_sum, alpha_k1)?, alpha_k2)?;
    if !is_invariant(action, &c)? {
        return Err(CocycleError::InternalInconsistency(
            "defect c(k̂₁, k̂₂) is not invariant".into(),
        ));
    }
    Ok(c)
}

/// Decides whether a cocycle is a coboundary.
///
/// Characters are processed in lexicographic order; the first obstruction
/// becomes the certificate. A positive answer carries the potential `F` and
/// the intermediate solutions, defects and retract-adjusted family.
pub fn moore_schmidt_decide(c: &Cocycle) -> Result<Decision, CocycleError> {
    validate_cocycle(c).map_err(CocycleError::InvalidCocycle)?;
    let action = c.action();
    let k = c.group();
    let dual = k.dual();
    let orbits = action.orbits_and_stabilizers();
    let base = action.base();

    let mut alphas = Vec::with_capacity(dual.order());
    for chi in dual.elements() {
        let circle = c.character(&chi)?;
        match solve_circle_coboundary_with(action, &orbits, &circle) {
            Ok(alpha) => alphas.push(alpha),
            Err(SolveError::Obstruction { gamma, atom, value }) => {
                return Ok(Decision::NotCoboundary(Some(Certificate {
                    character: chi,
                    gamma,
                    atom,
                    value,
                })));
            }
            Err(SolveError::InternalInconsistency(msg)) => {
                return Err(CocycleError::InternalInconsistency(msg))
            }
            Err(SolveError::Cond(e)) => return Err(e.into()),
        }
    }

    let order = dual.order();
    let sum_index = |i: usize, j: usize| dual.index_of(&dual.add(&dual.element_at(i), &dual.element_at(j)));

    let mut defects = Vec::with_capacity(order * order);
    for i in 0..order {
        for j in 0..order {
            let value = defect(action, &alphas[i], &alphas[j], &alphas[sum_index(i, j)])?;
            defects.push(DefectRecord { k1: i, k2: j, value });
        }
    }

    let adjusted: Vec<CondCircle> = alphas
        .iter()
        .map(|a| cond_sub(&Circle, a, &orbits.retract(a)))
        .collect::<Result<_, _>>()?;

    for i in 0..order {
        for j in 0..order {
            let s = sum_index(i, j);
            for x in 0..base.len() {
                if *adjusted[s].get(x) != *adjusted[i].get(x) + *adjusted[j].get(x) {
                    return Err(CocycleError::InternalInconsistency(format!(
                        "adjusted family is not additive at atom {x} for characters {:?}, {:?}",
                        dual.element_at(i),
                        dual.element_at(j)
                    )));
                }
            }
        }
    }

    let potential = conditional_reconstruct(base, k, &adjusted).map_err(|e| {
        CocycleError::InternalInconsistency(format!("reconstruction failed: {e}"))
    })?;

    for (g, t) in action.maps().iter().enumerate() {
        let moved = cond_compose(&potential, t)?;
        let diff = crate::conditional::cond_sub(k, &moved, &potential)?;
        if diff != *c.component(g) {
            return Err(CocycleError::InternalInconsistency(format!(
                "reconstructed potential does not reproduce ρ at γ{g}"
            )));
        }
    }

    Ok(Decision::Coboundary(Witness {
        potential,
        trace: Some(PipelineTrace {
            alphas,
            adjusted,
            defects,
        }),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::FinAbGroup;
    use crate::balg::{compose_maps, hom_from_atom_map, AbstractMap, MeasureAlgebra};
    use crate::cocycle::coboundary_from_potential;
    use crate::conditional::{cond_add, FiniteGroup};
    use std::sync::Arc;

    fn c(p: i64, q: u64) -> CircleElement {
        CircleElement::from_ratio(p, q)
    }

    fn rotation_action() -> GroupAction {
        let base = Arc::new(MeasureAlgebra::uniform(&["a", "b", "c"]).unwrap());
        let r = hom_from_atom_map(base.clone(), base.clone(), [("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let r2 = compose_maps(&r, &r).unwrap();
        GroupAction::new(
            Arc::new(FiniteGroup::cyclic(3)),
            base.clone(),
            vec![AbstractMap::identity(base), r, r2],
        )
        .unwrap()
    }

    fn one_atom_c2() -> GroupAction {
        let base = Arc::new(MeasureAlgebra::uniform(&["a"]).unwrap());
        GroupAction::trivial(Arc::new(FiniteGroup::cyclic(2)), base)
    }

    #[test]
    fn solve_zero() {
        let action = rotation_action();
        let zero = CondElement::constant(action.base().clone(), CircleElement::ZERO);
        let alpha = solve_circle_coboundary(&action, &vec![zero.clone(); 3]).unwrap();
        assert_eq!(alpha, zero);
    }

    #[test]
    fn solve_reports_stabilizer_obstruction() {
        let action = one_atom_c2();
        let base = action.base().clone();
        let cocycle = vec![
            CondElement::constant(base.clone(), CircleElement::ZERO),
            CondElement::constant(base, c(1, 2)),
        ];
        assert_eq!(
            solve_circle_coboundary(&action, &cocycle).unwrap_err(),
            SolveError::Obstruction { gamma: 1, atom: 0, value: c(1, 2) }
        );
    }

    #[test]
    fn solve_recovers_a_potential_up_to_invariants() {
        let action = rotation_action();
        let base = action.base().clone();
        let theta = CondElement::new(base.clone(), vec![c(0, 1), c(1, 2), c(1, 4)]).unwrap();
        let cocycle = crate::cocycle::coboundary_of(&Circle, &action, &theta).unwrap();
        let alpha = solve_circle_coboundary(&action, &cocycle).unwrap();
        for (g, t) in action.maps().iter().enumerate() {
            let lhs = cond_sub(&Circle, &cond_compose(&alpha, t).unwrap(), &alpha).unwrap();
            assert_eq!(lhs, cocycle[g]);
        }
        let diff = cond_sub(&Circle, &alpha, &theta).unwrap();
        assert!(is_invariant(&action, &diff).unwrap());
    }

    #[test]
    fn solve_detects_non_cocycle_input() {
        let action = rotation_action();
        let base = action.base().clone();
        let zero = CondElement::constant(base.clone(), CircleElement::ZERO);
        let junk = CondElement::new(base, vec![c(1, 2), c(0, 1), c(0, 1)]).unwrap();
        assert!(matches!(
            solve_circle_coboundary(&action, &[zero, junk.clone(), junk]),
            Err(SolveError::InternalInconsistency(_))
        ));
    }

    #[test]
    fn defect_examples() {
        let action = rotation_action();
        let base = action.base().clone();
        let k = FinAbGroup::new(vec![2, 2]).unwrap();
        let f = CondElement::new(
            base.clone(),
            vec![k.element(&[1, 0]).unwrap(), k.element(&[1, 1]).unwrap(), k.zero()],
        )
        .unwrap();
        let rho = coboundary_from_potential(&action, &k, &f).unwrap();
        let orbits = action.orbits_and_stabilizers();
        let alphas: Vec<_> = k
            .elements()
            .map(|chi| solve_circle_coboundary_with(&action, &orbits, &rho.character(&chi).unwrap()).unwrap())
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let s = k.index_of(&k.add(&k.element_at(i), &k.element_at(j)));
                let d = defect(&action, &alphas[i], &alphas[j], &alphas[s]).unwrap();
                assert!(is_invariant(&action, &d).unwrap());
            }
        }

        // the exact family ⟨k̂, F⟩ has zero defect
        let fam = crate::conditional::character_family(&k, &f).unwrap();
        let d = defect(&action, &fam[1], &fam[2], &fam[3]).unwrap();
        assert!(d.values().iter().all(|v| v.is_zero()));

        // a non-invariant "defect" is an internal inconsistency
        let zero = CondElement::constant(base.clone(), CircleElement::ZERO);
        let bump = CondElement::new(base, vec![c(1, 2), c(0, 1), c(0, 1)]).unwrap();
        assert!(matches!(
            defect(&action, &zero, &zero, &bump),
            Err(CocycleError::InternalInconsistency(_))
        ));
    }

    #[test]
    fn decide_on_coboundary() {
        let action = rotation_action();
        let base = action.base().clone();
        let k = FinAbGroup::cyclic(2);
        let f = CondElement::new(base, vec![k.zero(), k.element(&[1]).unwrap(), k.zero()]).unwrap();
        let rho = coboundary_from_potential(&action, &k, &f).unwrap();
        let d = moore_schmidt_decide(&rho).unwrap();
        let found = d.potential().unwrap();
        let diff = crate::conditional::cond_sub(&k, found, &f).unwrap();
        assert!(is_invariant(&action, &diff).unwrap());
        let again = coboundary_from_potential(&action, &k, found).unwrap();
        assert_eq!(again.rho(), rho.rho());
    }

    #[test]
    fn decide_on_obstruction() {
        let action = one_atom_c2();
        let base = action.base().clone();
        let k = FinAbGroup::cyclic(2);
        let rho = crate::cocycle::Cocycle::new(
            action,
            k.clone(),
            vec![
                CondElement::constant(base.clone(), k.zero()),
                CondElement::constant(base, k.element(&[1]).unwrap()),
            ],
        )
        .unwrap();
        let d = moore_schmidt_decide(&rho).unwrap();
        let cert = d.certificate().unwrap();
        assert_eq!(cert.character, k.element(&[1]).unwrap());
        assert_eq!((cert.gamma, cert.atom), (1, 0));
        assert_eq!(cert.value, c(1, 2));
        assert!(cert.is_valid_for(&rho));
    }

    #[test]
    fn decide_on_zero_cocycle() {
        let action = rotation_action();
        let base = action.base().clone();
        let k = FinAbGroup::new(vec![2, 3]).unwrap();
        let rho = crate::cocycle::Cocycle::new(action, k.clone(), vec![CondElement::constant(base.clone(), k.zero()); 3]).unwrap();
        match moore_schmidt_decide(&rho).unwrap() {
            Decision::Coboundary(w) => {
                assert!(w.potential.values().iter().all(|v| v.is_zero()));
                let trace = w.trace.unwrap();
                assert!(trace.alphas.iter().all(|a| a.values().iter().all(|v| v.is_zero())));
                assert!(trace.defects.iter().all(|d| d.value.values().iter().all(|v| v.is_zero())));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decide_rejects_invalid_cocycle() {
        let action = one_atom_c2();
        let base = action.base().clone();
        let k = FinAbGroup::cyclic(3);
        let rho = crate::cocycle::Cocycle::new(
            action,
            k.clone(),
            vec![
                CondElement::constant(base.clone(), k.zero()),
                CondElement::constant(base, k.element(&[1]).unwrap()),
            ],
        )
        .unwrap();
        assert!(matches!(moore_schmidt_decide(&rho), Err(CocycleError::InvalidCocycle(_))));
    }

    #[test]
    fn adjusted_family_is_additive() {
        let action = rotation_action();
        let base = action.base().clone();
        let k = FinAbGroup::cyclic(4);
        let f = CondElement::new(base, vec![k.element(&[3]).unwrap(), k.element(&[1]).unwrap(), k.zero()]).unwrap();
        let rho = coboundary_from_potential(&action, &k, &f).unwrap();
        let Decision::Coboundary(w) = moore_schmidt_decide(&rho).unwrap() else {
            panic!("expected a coboundary");
        };
        let trace = w.trace.unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let s = (i + j) % 4;
                assert_eq!(trace.adjusted[s], cond_add(&Circle, &trace.adjusted[i], &trace.adjusted[j]).unwrap());
            }
        }
    }
}
