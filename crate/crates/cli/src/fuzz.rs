//! Random scenarios for checking the decision pipeline against the oracle.
//!
//! Actions are disjoint unions of coset spaces `Γ/H` with the atoms shuffled.
//! Positive cases are coboundaries of uniformly random potentials. Negative
//! cases start from a nontrivial homomorphism `φ: Stab(x₀) → K` and extend it
//! to the whole orbit of `x₀` by `ρ_γ(y) = φ(t_{γy}⁻¹ γ t_y)`, where `t_y`
//! carries `x₀` to `y`; this family satisfies the cocycle equation and is
//! nonzero on a stabilizer, so it is never a coboundary. A random coboundary
//! is added on top to hide the structure.

use std::collections::VecDeque;
use std::str::FromStr;
use std::sync::Arc;

use coboundary::{
    brute_force_oracle, coboundary_from_potential, moore_schmidt_decide, validate_cocycle,
    AbstractMap, CocycleError, CondElement, Cocycle, Decision, FinAbGroup,
    FiniteGroup, GroupAction, GroupElement, MeasureAlgebra,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// The acting groups the fuzzer knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupKind {
    Trivial,
    C2,
    C3,
    S3,
    Klein,
}

impl GroupKind {
    pub const ALL: [GroupKind; 5] = [
        GroupKind::Trivial,
        GroupKind::C2,
        GroupKind::C3,
        GroupKind::Klein,
        GroupKind::S3,
    ];

    pub fn build(self) -> FiniteGroup {
        match self {
            GroupKind::Trivial => FiniteGroup::trivial(),
            GroupKind::C2 => FiniteGroup::cyclic(2),
            GroupKind::C3 => FiniteGroup::cyclic(3),
            GroupKind::S3 => FiniteGroup::s3(),
            GroupKind::Klein => FiniteGroup::klein(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Trivial => "trivial",
            GroupKind::C2 => "c2",
            GroupKind::C3 => "c3",
            GroupKind::S3 => "s3",
            GroupKind::Klein => "klein",
        }
    }
}

impl FromStr for GroupKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown group {s:?}"))
    }
}

/// Coefficient groups used when none is given.
pub fn default_moduli() -> Vec<Vec<u32>> {
    vec![vec![2], vec![3], vec![4], vec![2, 2], vec![8]]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    /// Each scenario has between 1 and `max_atoms` atoms.
    pub max_atoms: usize,
    pub groups: Vec<GroupKind>,
    pub moduli: Vec<Vec<u32>>,
    pub trials: u64,
    pub seed: u64,
    pub max_oracle: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_atoms: 5,
            groups: GroupKind::ALL.to_vec(),
            moduli: default_moduli(),
            trials: 100,
            seed: 0,
            max_oracle: coboundary::DEFAULT_ORACLE_BOUND,
        }
    }
}

/// What the generator meant to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intent {
    Coboundary,
    Obstructed,
}

#[derive(Debug, Clone)]
pub struct GeneratedCase {
    pub group: GroupKind,
    pub intent: Intent,
    pub cocycle: Cocycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub index: u64,
    pub group: GroupKind,
    pub moduli: Vec<u32>,
    pub atoms: usize,
    pub intent: Intent,
    /// `None` when the pipeline reported an internal inconsistency.
    pub decide: Option<bool>,
    /// `None` when the oracle bound was exceeded.
    pub oracle: Option<bool>,
    pub certificate_ok: Option<bool>,
    pub roundtrip_ok: Option<bool>,
    pub internal_error: Option<String>,
}

impl TrialRecord {
    pub fn agrees(&self) -> bool {
        matches!((self.decide, self.oracle), (Some(d), Some(o)) if d == o)
    }

    /// Any outcome that can only come from a bug.
    pub fn is_failure(&self) -> bool {
        self.internal_error.is_some()
            || (self.oracle.is_some() && !self.agrees())
            || self.certificate_ok == Some(false)
            || self.roundtrip_ok == Some(false)
            || self.decide.is_some_and(|d| d != (self.intent == Intent::Coboundary))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzSummary {
    pub trials: u64,
    pub agree: u64,
    pub disagree: u64,
    pub skipped: u64,
    pub coboundary: u64,
    pub not_coboundary: u64,
    pub certificate_failures: u64,
    pub roundtrip_failures: u64,
    pub intent_mismatches: u64,
    pub internal_errors: u64,
}

impl FuzzSummary {
    pub fn is_clean(&self) -> bool {
        self.disagree == 0
            && self.certificate_failures == 0
            && self.roundtrip_failures == 0
            && self.intent_mismatches == 0
            && self.internal_errors == 0
    }

    pub fn to_json(&self, seed: u64) -> Value {
        json!({
            "agree": self.agree,
            "disagree": self.disagree,
            "skipped": self.skipped,
            "trials": self.trials,
            "coboundary": self.coboundary,
            "not_coboundary": self.not_coboundary,
            "certificate_failures": self.certificate_failures,
            "roundtrip_failures": self.roundtrip_failures,
            "intent_mismatches": self.intent_mismatches,
            "internal_errors": self.internal_errors,
            "seed": seed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub summary: FuzzSummary,
    pub records: Vec<TrialRecord>,
}

/// The generator for trial `index`; each trial has its own stream so trials
/// can be reproduced individually.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `Γ` acting on the left cosets of the chosen subgroups, with the atoms
/// listed in random order.
pub fn random_action<R: Rng>(rng: &mut R, group: &Arc<FiniteGroup>, atoms: usize) -> GroupAction {
    let subgroups = group.subgroups();
    let n = group.order();
    // each atom is a coset of one block's subgroup, stored as (block, sorted elements)
    let mut cosets: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut block = 0;
    while cosets.len() < atoms {
        let room = atoms - cosets.len();
        let fitting: Vec<&Vec<usize>> = subgroups.iter().filter(|h| n / h.len() <= room).collect();
        let h = fitting.choose(rng).expect("the whole group always fits");
        let mut seen = vec![false; n];
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut coset: Vec<usize> = h.iter().map(|&x| group.mul(g, x)).collect();
            coset.sort_unstable();
            for &c in &coset {
                seen[c] = true;
            }
            cosets.push((block, coset));
        }
        block += 1;
    }
    cosets.shuffle(rng);
    let ids: Vec<String> = (0..atoms).map(|i| format!("x{i}")).collect();
    let base = Arc::new(MeasureAlgebra::uniform(&ids).expect("distinct ids"));
    let maps = (0..n)
        .map(|g| {
            let image: Vec<usize> = cosets
                .iter()
                .map(|(b, c)| {
                    let mut moved: Vec<usize> = c.iter().map(|&x| group.mul(g, x)).collect();
                    moved.sort_unstable();
                    cosets
                        .iter()
                        .position(|(d, e)| d == b && *e == moved)
                        .expect("cosets are permuted")
                })
                .collect();
            AbstractMap::from_indices(base.clone(), base.clone(), image).expect("valid atom map")
        })
        .collect();
    GroupAction::new(group.clone(), base, maps).expect("coset actions are actions")
}

pub fn random_potential<R: Rng>(
    rng: &mut R,
    k: &FinAbGroup,
    base: &Arc<MeasureAlgebra>,
) -> CondElement<GroupElement> {
    let values = (0..base.len()).map(|_| k.element_at(rng.gen_range(0..k.order()))).collect();
    CondElement::new(base.clone(), values).expect("one value per atom")
}

/// Every homomorphism from the subgroup `h` (sorted, containing the
/// identity) into `k`, as value lists aligned with `h`.
pub fn subgroup_homs(group: &FiniteGroup, h: &[usize], k: &FinAbGroup) -> Vec<Vec<GroupElement>> {
    fn extend(
        group: &FiniteGroup,
        h: &[usize],
        k: &FinAbGroup,
        partial: &mut Vec<GroupElement>,
        out: &mut Vec<Vec<GroupElement>>,
    ) {
        let i = partial.len();
        if i == h.len() {
            out.push(partial.clone());
            return;
        }
        let candidates: Vec<GroupElement> = if h[i] == group.identity() {
            vec![k.zero()]
        } else {
            k.elements().collect()
        };
        for v in candidates {
            partial.push(v);
            let pos = |x: usize| h.iter().position(|&y| y == x).expect("closed subgroup");
            let ok = (0..=i).all(|a| {
                (0..=i).all(|b| {
                    let c = pos(group.mul(h[a], h[b]));
                    c > i || partial[c] == k.add(&partial[a], &partial[b])
                })
            });
            if ok {
                extend(group, h, k, partial, out);
            }
            partial.pop();
        }
    }
    let mut out = Vec::new();
    extend(group, h, k, &mut Vec::new(), &mut out);
    out
}

/// A cocycle supported on the orbit of `x0` that restricts to `phi` on the
/// stabilizer of `x0`.
pub fn induced_cocycle(
    action: &GroupAction,
    k: &FinAbGroup,
    x0: usize,
    stabilizer: &[usize],
    phi: &[GroupElement],
) -> Vec<CondElement<GroupElement>> {
    let group = action.group();
    let n = action.base().len();
    // transversal: t[y] carries x0 to y, found breadth-first in group order
    let mut t: Vec<Option<usize>> = vec![None; n];
    t[x0] = Some(group.identity());
    let mut queue = VecDeque::from([x0]);
    while let Some(y) = queue.pop_front() {
        for g in 0..group.order() {
            let z = action.apply(g, y);
            if t[z].is_none() {
                t[z] = Some(group.mul(g, t[y].expect("visited")));
                queue.push_back(z);
            }
        }
    }
    (0..group.order())
        .map(|g| {
            let values = (0..n)
                .map(|y| match t[y] {
                    None => k.zero(),
                    Some(ty) => {
                        let tgy = t[action.apply(g, y)].expect("orbits are closed");
                        let s = group.mul(group.inverse(tgy), group.mul(g, ty));
                        let at = stabilizer.iter().position(|&h| h == s).expect("lands in the stabilizer");
                        phi[at].clone()
                    }
                })
                .collect();
            CondElement::new(action.base().clone(), values).expect("one value per atom")
        })
        .collect()
}

fn random_obstruction<R: Rng>(rng: &mut R, action: &GroupAction, k: &FinAbGroup) -> Option<Vec<CondElement<GroupElement>>> {
    let orbits = action.orbits_and_stabilizers();
    let mut options = Vec::new();
    for o in 0..orbits.orbits().len() {
        let x0 = orbits.representative(o);
        let stab = orbits.stabilizer(x0);
        let homs: Vec<_> = subgroup_homs(action.group(), stab, k)
            .into_iter()
            .filter(|phi| phi.iter().any(|v| !v.is_zero()))
            .collect();
        if !homs.is_empty() {
            options.push((x0, stab.to_vec(), homs));
        }
    }
    let (x0, stab, homs) = options.choose(rng)?;
    let phi = homs.choose(rng)?;
    Some(induced_cocycle(action, k, *x0, stab, phi))
}

/// Draws one scenario. About half are aimed at obstructions; when the drawn
/// action and `K` admit none after a few redraws, a coboundary is produced.
pub fn generate_case<R: Rng>(rng: &mut R, config: &FuzzConfig) -> GeneratedCase {
    let kind = *config.groups.choose(rng).expect("at least one group");
    let group = Arc::new(kind.build());
    let k = FinAbGroup::new(config.moduli.choose(rng).expect("at least one K").clone())
        .expect("nonzero moduli");
    let want_obstruction = rng.gen_bool(0.5);
    for _ in 0..8 {
        let atoms = rng.gen_range(1..=config.max_atoms);
        let action = random_action(rng, &group, atoms);
        let f = random_potential(rng, &k, action.base());
        let exact = coboundary_from_potential(&action, &k, &f).expect("consistent shapes");
        if !want_obstruction {
            return GeneratedCase {
                group: kind,
                intent: Intent::Coboundary,
                cocycle: exact,
            };
        }
        if let Some(obstructed) = random_obstruction(rng, &action, &k) {
            let rho = obstructed
                .iter()
                .zip(exact.rho())
                .map(|(a, b)| coboundary::conditional::cond_add(&k, a, b).expect("same base"))
                .collect();
            let cocycle = Cocycle::new(action, k.clone(), rho).expect("consistent shapes");
            debug_assert!(validate_cocycle(&cocycle).is_ok());
            return GeneratedCase {
                group: kind,
                intent: Intent::Obstructed,
                cocycle,
            };
        }
    }
    let atoms = rng.gen_range(1..=config.max_atoms);
    let action = random_action(rng, &group, atoms);
    let f = random_potential(rng, &k, action.base());
    GeneratedCase {
        group: kind,
        intent: Intent::Coboundary,
        cocycle: coboundary_from_potential(&action, &k, &f).expect("consistent shapes"),
    }
}

/// Runs the pipeline and the oracle on one case and cross-checks them.
pub fn check_case(index: u64, case: &GeneratedCase, max_oracle: u64) -> TrialRecord {
    let c = &case.cocycle;
    let mut record = TrialRecord {
        index,
        group: case.group,
        moduli: c.group().moduli().to_vec(),
        atoms: c.action().base().len(),
        intent: case.intent,
        decide: None,
        oracle: None,
        certificate_ok: None,
        roundtrip_ok: None,
        internal_error: None,
    };
    let oracle = match brute_force_oracle(c, max_oracle) {
        Ok(run) => Some(run.decision),
        Err(CocycleError::TooLarge { .. }) => None,
        Err(e) => {
            record.internal_error = Some(format!("oracle: {e}"));
            None
        }
    };
    record.oracle = oracle.as_ref().map(Decision::is_coboundary);
    match moore_schmidt_decide(c) {
        Ok(Decision::Coboundary(w)) => {
            record.decide = Some(true);
            let again = coboundary_from_potential(c.action(), c.group(), &w.potential);
            record.roundtrip_ok = Some(again.is_ok_and(|r| r.rho() == c.rho()));
        }
        Ok(Decision::NotCoboundary(cert)) => {
            record.decide = Some(false);
            record.certificate_ok = Some(cert.is_some_and(|cert| cert.is_valid_for(c)));
        }
        Err(e) => record.internal_error = Some(e.to_string()),
    }
    record
}

pub fn run_fuzz(config: &FuzzConfig) -> FuzzReport {
    let mut summary = FuzzSummary {
        trials: config.trials,
        ..FuzzSummary::default()
    };
    let mut records = Vec::with_capacity(config.trials as usize);
    for index in 0..config.trials {
        let mut rng = trial_rng(config.seed, index);
        let case = generate_case(&mut rng, config);
        let r = check_case(index, &case, config.max_oracle);
        match (r.decide, r.oracle) {
            (_, None) if r.internal_error.is_none() => summary.skipped += 1,
            _ if r.agrees() => summary.agree += 1,
            _ => summary.disagree += 1,
        }
        match r.decide {
            Some(true) => summary.coboundary += 1,
            Some(false) => summary.not_coboundary += 1,
            None => {}
        }
        summary.certificate_failures += u64::from(r.certificate_ok == Some(false));
        summary.roundtrip_failures += u64::from(r.roundtrip_ok == Some(false));
        summary.intent_mismatches +=
            u64::from(r.decide.is_some_and(|d| d != (r.intent == Intent::Coboundary)));
        summary.internal_errors += u64::from(r.internal_error.is_some());
        records.push(r);
    }
    FuzzReport { summary, records }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_actions_have_the_requested_size() {
        let mut rng = trial_rng(1, 0);
        for kind in GroupKind::ALL {
            let group = Arc::new(kind.build());
            for atoms in 1..=6 {
                let action = random_action(&mut rng, &group, atoms);
                assert_eq!(action.base().len(), atoms);
            }
        }
    }

    #[test]
    fn hom_counts() {
        // Hom(C3, Z/3) has 3 elements, Hom(C3, Z/2) only the trivial one
        let c3 = FiniteGroup::cyclic(3);
        assert_eq!(subgroup_homs(&c3, &[0, 1, 2], &FinAbGroup::cyclic(3)).len(), 3);
        assert_eq!(subgroup_homs(&c3, &[0, 1, 2], &FinAbGroup::cyclic(2)).len(), 1);
        // Hom(S3, Z/2) = {trivial, sign}; Hom(S3, Z/3) is trivial
        let s3 = FiniteGroup::s3();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(subgroup_homs(&s3, &all, &FinAbGroup::cyclic(2)).len(), 2);
        assert_eq!(subgroup_homs(&s3, &all, &FinAbGroup::cyclic(3)).len(), 1);
        // Hom(V4, Z/2 x Z/2) has 16 elements
        let v4 = FiniteGroup::klein();
        assert_eq!(subgroup_homs(&v4, &[0, 1, 2, 3], &FinAbGroup::new(vec![2, 2]).unwrap()).len(), 16);
    }

    #[test]
    fn induced_cocycles_are_cocycles() {
        let mut rng = trial_rng(7, 0);
        let k = FinAbGroup::cyclic(2);
        for kind in GroupKind::ALL {
            let group = Arc::new(kind.build());
            for atoms in 1..=5 {
                let action = random_action(&mut rng, &group, atoms);
                if let Some(rho) = random_obstruction(&mut rng, &action, &k) {
                    let c = Cocycle::new(action, k.clone(), rho).unwrap();
                    assert!(validate_cocycle(&c).is_ok());
                    assert!(!moore_schmidt_decide(&c).unwrap().is_coboundary());
                }
            }
        }
    }

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let config = FuzzConfig {
            trials: 40,
            seed: 3,
            ..FuzzConfig::default()
        };
        let a = run_fuzz(&config);
        assert!(a.summary.is_clean(), "{:?}", a.summary);
        assert_eq!(a.summary.agree, 40);
        assert!(a.summary.not_coboundary > 0 && a.summary.coboundary > 0);
        let b = run_fuzz(&config);
        assert_eq!(a.records, b.records);
    }
}
