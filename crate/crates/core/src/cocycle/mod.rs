//! Cocycles valued in finite abelian groups and the coboundary decision.
//!
//! A cocycle for the action `γ ↦ T^γ` is a family `ρ_γ` of conditional
//! elements with `ρ_{γ₁γ₂} = ρ_{γ₁} ∘ T^{γ₂} + ρ_{γ₂}`; it is a coboundary
//! when `ρ_γ = F ∘ T^γ − F` for a single potential `F`.

mod oracle;
mod pipeline;

use thiserror::Error;

pub use oracle::{brute_force_oracle, OracleRun, DEFAULT_ORACLE_BOUND};
pub use pipeline::{
    defect, moore_schmidt_decide, solve_circle_coboundary, solve_circle_coboundary_with,
    SolveError,
};

use crate::abgroup::{AbelianGroup, Character, FinAbGroup, GroupElement};
use crate::balg::same_algebra;
use crate::circle::CircleElement;
use crate::conditional::{cond_compose, CondCircle, CondElement, CondError, GroupAction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("not a cocycle: {0}")]
    InvalidCocycle(CocycleViolation),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("oracle search space {size} exceeds the bound {bound}")]
    TooLarge { size: u128, bound: u64 },
    #[error(transparent)]
    Cond(#[from] CondError),
}

/// The first triple `(γ₁, γ₂, x)` at which the cocycle equation fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CocycleViolation {
    pub g1: usize,
    pub g2: usize,
    pub atom: usize,
}

impl std::fmt::Display for CocycleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ρ(γ{}·γ{}) ≠ ρ(γ{}) ∘ T(γ{}) + ρ(γ{}) at atom {}",
            self.g1, self.g2, self.g1, self.g2, self.g2, self.atom
        )
    }
}

/// A `K`-valued family indexed by the acting group, with its action.
#[derive(Debug, Clone)]
pub struct Cocycle {
    action: GroupAction,
    k: FinAbGroup,
    rho: Vec<CondElement<GroupElement>>,
}

impl Cocycle {
    /// Checks shapes only; the cocycle equation is checked by
    /// [`validate_cocycle`].
    pub fn new(
        action: GroupAction,
        k: FinAbGroup,
        rho: Vec<CondElement<GroupElement>>,
    ) -> Result<Self, CocycleError> {
        if rho.len() != action.group().order() {
            return Err(CocycleError::Mismatch(format!(
                "{} cocycle components for a group of order {}",
                rho.len(),
                action.group().order()
            )));
        }
        for r in &rho {
            if !same_algebra(r.base(), action.base()) {
                return Err(CocycleError::Mismatch("cocycle component over a foreign base".into()));
            }
            for v in r.values() {
                k.check_element(v).map_err(CondError::from)?;
            }
        }
        Ok(Cocycle { action, k, rho })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.k
    }

    pub fn rho(&self) -> &[CondElement<GroupElement>] {
        &self.rho
    }

    pub fn component(&self, g: usize) -> &CondElement<GroupElement> {
        &self.rho[g]
    }

    /// `⟨k̂, ρ⟩`, a circle-valued cocycle.
    pub fn character(&self, chi: &Character) -> Result<Vec<CondCircle>, CocycleError> {
        self.rho
            .iter()
            .map(|r| crate::conditional::cond_character(&self.k, chi, r).map_err(Into::into))
            .collect()
    }
}

/// Checks the cocycle equation over every `(γ₁, γ₂, x)`, in that nesting
/// order, for values in any abelian group.
pub fn check_cocycle_equation<G: AbelianGroup>(
    group: &G,
    action: &GroupAction,
    rho: &[CondElement<G::Elem>],
) -> Result<(), CocycleViolation> {
    let gamma = action.group();
    for g1 in 0..gamma.order() {
        for g2 in 0..gamma.order() {
            let lhs = &rho[gamma.mul(g1, g2)];
            for x in 0..action.base().len() {
                let rhs = group.add(rho[g1].get(action.apply(g2, x)), rho[g2].get(x));
                if *lhs.get(x) != rhs {
                    return Err(CocycleViolation { g1, g2, atom: x });
                }
            }
        }
    }
    Ok(())
}

pub fn validate_cocycle(c: &Cocycle) -> Result<(), CocycleViolation> {
    check_cocycle_equation(&c.k, &c.action, &c.rho)
}

/// `γ ↦ F ∘ T^γ − F` for values in any abelian group.
pub fn coboundary_of<G: AbelianGroup>(
    group: &G,
    action: &GroupAction,
    f: &CondElement<G::Elem>,
) -> Result<Vec<CondElement<G::Elem>>, CocycleError> {
    action
        .maps()
        .iter()
        .map(|t| {
            let moved = cond_compose(f, t)?;
            Ok(crate::conditional::cond_sub(group, &moved, f)?)
        })
        .collect()
}

pub fn coboundary_from_potential(
    action: &GroupAction,
    k: &FinAbGroup,
    f: &CondElement<GroupElement>,
) -> Result<Cocycle, CocycleError> {
    for v in f.values() {
        k.check_element(v).map_err(CondError::from)?;
    }
    let rho = coboundary_of(k, action, f)?;
    Cocycle::new(action.clone(), k.clone(), rho)
}

/// A stabilizer obstruction: `T^γ x = x` and `⟨k̂, ρ_γ(x)⟩ ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub character: Character,
    pub gamma: usize,
    pub atom: usize,
    pub value: CircleElement,
}

impl Certificate {
    /// Re-checks the certificate against a cocycle from scratch.
    pub fn is_valid_for(&self, c: &Cocycle) -> bool {
        self.gamma < c.action.group().order()
            && self.atom < c.action.base().len()
            && c.action.apply(self.gamma, self.atom) == self.atom
            && c.k
                .pairing(&self.character, c.rho[self.gamma].get(self.atom))
                .is_ok_and(|v| !v.is_zero())
    }
}

/// `c(k̂₁, k̂₂)` for one pair of characters, given by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectRecord {
    pub k1: usize,
    pub k2: usize,
    pub value: CondCircle,
}

/// Intermediate data of a positive decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineTrace {
    /// Per-character solutions `α_{k̂}`, in lexicographic character order.
    pub alphas: Vec<CondCircle>,
    /// `α̃_{k̂} = α_{k̂} − w(α_{k̂})`.
    pub adjusted: Vec<CondCircle>,
    pub defects: Vec<DefectRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub potential: CondElement<GroupElement>,
    pub trace: Option<PipelineTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Coboundary(Witness),
    /// The oracle reports no certificate.
    NotCoboundary(Option<Certificate>),
}

impl Decision {
    pub fn is_coboundary(&self) -> bool {
        matches!(self, Decision::Coboundary(_))
    }

    pub fn potential(&self) -> Option<&CondElement<GroupElement>> {
        match self {
            Decision::Coboundary(w) => Some(&w.potential),
            Decision::NotCoboundary(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Decision::NotCoboundary(c) => c.as_ref(),
            Decision::Coboundary(_) => None,
        }
    }
}
