//! Exact, finite-scale coboundary theory for group actions on measure
//! algebras.
//!
//! A finite group acts by atom permutations on a finite measure algebra, and
//! a cocycle takes values in a finite abelian group `K`. [`moore_schmidt_decide`]
//! decides whether the cocycle is a coboundary by solving one circle-valued
//! problem per character of `K` and reassembling the answers through
//! conditional Pontryagin duality. [`brute_force_oracle`] answers the same
//! question by exhaustive search and serves as an independent check.

pub mod abgroup;
pub mod balg;
pub mod circle;
pub mod cocycle;
pub mod conditional;

pub use abgroup::{AbGroupError, AbelianGroup, Character, CharacterTable, FinAbGroup, GroupElement};
pub use balg::{
    extend_boolean_hom, quotient_nulls, AbstractMap, Atom, AtomSet, BalgError, BooleanHom,
    ConcreteSpace, MeasureAlgebra, PartialHom, Quotient, Weight,
};
pub use circle::CircleElement;
pub use cocycle::{
    brute_force_oracle, coboundary_from_potential, moore_schmidt_decide, validate_cocycle,
    Certificate, Cocycle, CocycleError, CocycleViolation, Decision, OracleRun, Witness,
    DEFAULT_ORACLE_BOUND,
};
pub use conditional::{
    ActionError, CondCircle, CondElement, CondError, FiniteGroup, GroupAction, GroupTableError,
    OrbitDecomposition,
};
