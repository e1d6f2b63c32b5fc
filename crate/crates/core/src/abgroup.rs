//! Finite abelian groups `ℤ/n₁ × … × ℤ/n_r`, their duals and the pairing
//! into ℚ/ℤ.
//!
//! For a finite discrete group the Baire and Borel σ-algebras are both the
//! full powerset, so no measurability structure is carried here.
//!
//! Elements are enumerated in lexicographic coordinate order with the first
//! coordinate most significant. The dual group is represented on the same
//! moduli: a character `(b₁,…,b_r)` acts by `k ↦ Σ aᵢbᵢ/nᵢ mod 1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::CircleElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbGroupError {
    #[error("modulus at position {0} is zero")]
    ZeroModulus(usize),
    #[error("element has {found} coordinates but the group has {expected} factors")]
    Mismatch { expected: usize, found: usize },
    #[error("coordinate {index} is {value}, outside 0..{modulus}")]
    CoordinateOutOfRange { index: usize, value: i64, modulus: u32 },
    #[error("character table has {found} entries but the dual group has {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("table is not additive: θ({k1:?} + {k2:?}) ≠ θ({k1:?}) + θ({k2:?})")]
    NotAdditive { k1: Character, k2: Character },
    #[error("value {value} on dual generator {factor} is not {modulus}-torsion")]
    TorsionViolation {
        factor: usize,
        modulus: u32,
        value: CircleElement,
    },
}

/// An abelian group with an explicit element type.
///
/// Lets conditional elements do pointwise arithmetic uniformly over finite
/// abelian groups and the circle.
pub trait AbelianGroup {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// The circle group ℚ/ℤ, as a value for [`AbelianGroup`] dispatch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Circle;

impl AbelianGroup for Circle {
    type Elem = CircleElement;

    fn zero(&self) -> CircleElement {
        CircleElement::ZERO
    }

    fn add(&self, a: &CircleElement, b: &CircleElement) -> CircleElement {
        *a + *b
    }

    fn neg(&self, a: &CircleElement) -> CircleElement {
        -*a
    }
}

/// `ℤ/n₁ × … × ℤ/n_r`. The trivial group is `[]` (or all moduli 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FinAbGroup {
    moduli: Vec<u32>,
}

/// Coordinates of an element, reduced modulo the group's moduli. Elements do
/// not carry their group; the group performs the arithmetic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u32>,
}

/// A character of `K`, i.e. an element of the dual group on the same moduli.
pub type Character = GroupElement;

impl GroupElement {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&a| a == 0)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl FinAbGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self, AbGroupError> {
        if let Some(i) = moduli.iter().position(|&n| n == 0) {
            return Err(AbGroupError::ZeroModulus(i));
        }
        Ok(FinAbGroup { moduli })
    }

    pub fn cyclic(n: u32) -> Self {
        Self::new(vec![n]).expect("cyclic group of order zero")
    }

    pub fn trivial() -> Self {
        FinAbGroup { moduli: Vec::new() }
    }

    /// The direct product `self × other`, moduli concatenated.
    pub fn product(&self, other: &FinAbGroup) -> Self {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        FinAbGroup { moduli }
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&n| n as usize).product()
    }

    /// The Pontryagin dual. For a finite group it has the same moduli; the
    /// identification is through [`FinAbGroup::pairing`].
    pub fn dual(&self) -> FinAbGroup {
        self.clone()
    }

    /// Builds an element from coordinates, rejecting unreduced entries.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, AbGroupError> {
        self.check_len(coords.len())?;
        let mut out = Vec::with_capacity(coords.len());
        for (index, (&value, &modulus)) in coords.iter().zip(&self.moduli).enumerate() {
            if value < 0 || value >= modulus as i64 {
                return Err(AbGroupError::CoordinateOutOfRange {
                    index,
                    value,
                    modulus,
                });
            }
            out.push(value as u32);
        }
        Ok(GroupElement { coords: out })
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn element_reduced(&self, coords: &[i64]) -> Result<GroupElement, AbGroupError> {
        self.check_len(coords.len())?;
        let coords = coords
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &n)| a.rem_euclid(n as i64) as u32)
            .collect();
        Ok(GroupElement { coords })
    }

    /// The i-th standard generator (which is zero when `nᵢ = 1`).
    pub fn generator(&self, i: usize) -> GroupElement {
        let coords = self
            .moduli
            .iter()
            .enumerate()
            .map(|(j, &n)| if i == j { 1 % n } else { 0 })
            .collect();
        GroupElement { coords }
    }

    /// Lexicographic index of an element (first coordinate most significant).
    pub fn index_of(&self, k: &GroupElement) -> usize {
        k.coords
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&a, &n)| acc * n as usize + a as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u32; self.moduli.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = (index % n as usize) as u32;
            index /= n as usize;
        }
        GroupElement { coords }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    pub fn contains(&self, k: &GroupElement) -> bool {
        k.coords.len() == self.moduli.len()
            && k.coords.iter().zip(&self.moduli).all(|(&a, &n)| a < n)
    }

    pub fn check_element(&self, k: &GroupElement) -> Result<(), AbGroupError> {
        self.check_len(k.coords.len())?;
        for (index, (&value, &modulus)) in k.coords.iter().zip(&self.moduli).enumerate() {
            if value >= modulus {
                return Err(AbGroupError::CoordinateOutOfRange {
                    index,
                    value: value as i64,
                    modulus,
                });
            }
        }
        Ok(())
    }

    fn check_len(&self, found: usize) -> Result<(), AbGroupError> {
        if found != self.moduli.len() {
            return Err(AbGroupError::Mismatch {
                expected: self.moduli.len(),
                found,
            });
        }
        Ok(())
    }

    /// `⟨k̂, k⟩ = Σ aᵢbᵢ/nᵢ mod 1`.
    pub fn pairing(&self, chi: &Character, k: &GroupElement) -> Result<CircleElement, AbGroupError> {
        self.check_element(chi)?;
        self.check_element(k)?;
        Ok(self.pairing_unchecked(chi, k))
    }

    pub(crate) fn pairing_unchecked(&self, chi: &Character, k: &GroupElement) -> CircleElement {
        chi.coords
            .iter()
            .zip(&k.coords)
            .zip(&self.moduli)
            .map(|((&b, &a), &n)| CircleElement::from_ratio((a as u64 * b as u64 % n as u64) as i64, n as u64))
            .sum()
    }

    /// `ι(k) = (⟨k̂, k⟩)_{k̂ ∈ K̂}`, indexed by lexicographic character order.
    pub fn iota_embed(&self, k: &GroupElement) -> CharacterTable {
        let values = self
            .dual()
            .elements()
            .map(|chi| self.pairing_unchecked(&chi, k))
            .collect();
        CharacterTable {
            group: self.clone(),
            values,
        }
    }

    /// Recovers the unique `k` with `ι(k) = θ`.
    ///
    /// The candidate is read off the dual generators `êᵢ` (`θ(êᵢ) = aᵢ/nᵢ`),
    /// after which the whole table is compared against `ι(k)`.
    pub fn element_from_character_table(
        &self,
        table: &CharacterTable,
    ) -> Result<GroupElement, AbGroupError> {
        if table.group != *self {
            return Err(AbGroupError::Mismatch {
                expected: self.rank(),
                found: table.group.rank(),
            });
        }
        self.reconstruct_from_values(&table.values)
    }

    pub(crate) fn reconstruct_from_values(
        &self,
        values: &[CircleElement],
    ) -> Result<GroupElement, AbGroupError> {
        let dual = self.dual();
        if values.len() != dual.order() {
            return Err(AbGroupError::TableSize {
                expected: dual.order(),
                found: values.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.rank());
        for (factor, &modulus) in self.moduli.iter().enumerate() {
            let value = values[dual.index_of(&dual.generator(factor))];
            if !value.int_scale(modulus as i64).is_zero() {
                return Err(AbGroupError::TorsionViolation {
                    factor,
                    modulus,
                    value,
                });
            }
            // value = p/q with q | n, so the coordinate is p·(n/q).
            coords.push((value.numer() * (modulus as u64 / value.denom())) as u32);
        }
        let k = GroupElement { coords };
        let expected = self.iota_embed(&k);
        if expected.values != values {
            let (k1, k2) = find_additivity_violation(&dual, values)
                .expect("a table that differs from ι(k) must fail additivity");
            return Err(AbGroupError::NotAdditive { k1, k2 });
        }
        Ok(k)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| ((x as u64 + y as u64) % n as u64) as u32)
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        GroupElement { coords }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.moduli.len()],
        }
    }

    /// Splits an element of `K₁ × K₂` (with `self = K₁`) into its two parts.
    pub fn split(&self, k: &GroupElement) -> (GroupElement, GroupElement) {
        let (a, b) = k.coords.split_at(self.rank().min(k.coords.len()));
        (
            GroupElement { coords: a.to_vec() },
            GroupElement { coords: b.to_vec() },
        )
    }

    pub fn join(a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut coords = a.coords.clone();
        coords.extend_from_slice(&b.coords);
        GroupElement { coords }
    }
}

impl AbelianGroup for FinAbGroup {
    type Elem = GroupElement;

    fn zero(&self) -> GroupElement {
        FinAbGroup::zero(self)
    }

    fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        FinAbGroup::add(self, a, b)
    }

    fn neg(&self, a: &GroupElement) -> GroupElement {
        FinAbGroup::neg(self, a)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.moduli.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A total map `K̂ → ℚ/ℤ`, indexed by lexicographic character order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    group: FinAbGroup,
    values: Vec<CircleElement>,
}

impl CharacterTable {
    pub fn new(group: FinAbGroup, values: Vec<CircleElement>) -> Result<Self, AbGroupError> {
        let expected = group.dual().order();
        if values.len() != expected {
            return Err(AbGroupError::TableSize {
                expected,
                found: values.len(),
            });
        }
        Ok(CharacterTable { group, values })
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn values(&self) -> &[CircleElement] {
        &self.values
    }

    pub fn get(&self, chi: &Character) -> CircleElement {
        self.values[self.group.dual().index_of(chi)]
    }

    pub fn is_additive(&self) -> bool {
        find_additivity_violation(&self.group.dual(), &self.values).is_none()
    }
}

/// First pair `(k̂₁, k̂₂)` in lexicographic order with
/// `θ(k̂₁ + k̂₂) ≠ θ(k̂₁) + θ(k̂₂)`.
pub fn find_additivity_violation(
    dual: &FinAbGroup,
    values: &[CircleElement],
) -> Option<(Character, Character)> {
    let n = dual.order();
    for i in 0..n {
        let k1 = dual.element_at(i);
        for j in 0..n {
            let k2 = dual.element_at(j);
            let s = dual.index_of(&dual.add(&k1, &k2));
            if values[s] != values[i] + values[j] {
                return Some((k1, k2));
            }
        }
    }
    None
}

pub fn dual_group(k: &FinAbGroup) -> FinAbGroup {
    k.dual()
}

pub fn pairing(
    k: &FinAbGroup,
    chi: &Character,
    elem: &GroupElement,
) -> Result<CircleElement, AbGroupError> {
    k.pairing(chi, elem)
}

pub fn iota_embed(k: &FinAbGroup, elem: &GroupElement) -> CharacterTable {
    k.iota_embed(elem)
}

pub fn element_from_character_table(table: &CharacterTable) -> Result<GroupElement, AbGroupError> {
    table.group.element_from_character_table(table)
}
