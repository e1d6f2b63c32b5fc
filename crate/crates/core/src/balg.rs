//! Finite point-free measure spaces.
//!
//! A finite measure algebra is the powerset of a finite set of atoms, each
//! carrying a strictly positive rational weight. Null atoms of a concrete
//! space are removed by [`quotient_nulls`]; every abstract measurable map
//! between atomic algebras is induced by a forward atom map, and its pullback
//! is preimage under that map. On finite algebras every Boolean homomorphism
//! preserves all joins, so weak and σ-complete homomorphisms coincide.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Weight = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalgError {
    #[error("every atom has weight zero")]
    AllNull,
    #[error("empty atom id at position {0}")]
    EmptyAtomId(usize),
    #[error("duplicate atom id {0:?}")]
    DuplicateAtom(String),
    #[error("atom {0:?} has a negative weight")]
    NegativeWeight(String),
    #[error("atom {0:?} has a non-positive weight in a measure algebra")]
    NonPositiveWeight(String),
    #[error("unknown atom {0:?}")]
    UnknownAtom(String),
    #[error("atom map is not defined on {0:?}")]
    Partial(String),
    #[error("domain mismatch: {0}")]
    Mismatch(String),
    #[error("atom map is not a bijection")]
    NotInvertible,
    #[error("positive atom {source_atom:?} maps to null atom {target_atom:?}")]
    NullImage {
        source_atom: String,
        target_atom: String,
    },
    #[error("generator {0} has the wrong universe size")]
    MalformedGenerator(usize),
    #[error(
        "inconsistent generator images: the meet with signature {signature:?} is 0 in the domain \
         but contains atom {witness} in the image"
    )]
    Inconsistent { signature: Vec<bool>, witness: usize },
}

/// A subset of the atoms `0..n` of some algebra.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    bits: Vec<bool>,
}

impl AtomSet {
    pub fn empty(n: usize) -> Self {
        AtomSet { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        AtomSet { bits: vec![true; n] }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.bits[i] = true;
        }
        s
    }

    /// Subset encoded by the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        AtomSet {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    /// All `2^n` subsets, in mask order. Intended for exhaustive checks.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = AtomSet> {
        assert!(n < 32, "too many atoms to enumerate subsets");
        (0..1u64 << n).map(move |m| AtomSet::from_mask(n, m))
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn complement(&self) -> AtomSet {
        AtomSet {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    fn zip_with(&self, other: &AtomSet, f: impl Fn(bool, bool) -> bool) -> AtomSet {
        assert_eq!(self.universe(), other.universe(), "atom sets over different universes");
        AtomSet {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub id: String,
    pub weight: Weight,
}

fn index_atoms(atoms: &[Atom]) -> Result<HashMap<String, usize>, BalgError> {
    let mut index = HashMap::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        if a.id.is_empty() {
            return Err(BalgError::EmptyAtomId(i));
        }
        if index.insert(a.id.clone(), i).is_some() {
            return Err(BalgError::DuplicateAtom(a.id.clone()));
        }
    }
    Ok(index)
}

/// A finite measure space `(X, 2^X, μ)`; weights may be zero.
#[derive(Debug, Clone)]
pub struct ConcreteSpace {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
}

impl PartialEq for ConcreteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for ConcreteSpace {}

impl ConcreteSpace {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, BalgError> {
        let index = index_atoms(&atoms)?;
        if let Some(a) = atoms.iter().find(|a| a.weight.is_negative()) {
            return Err(BalgError::NegativeWeight(a.id.clone()));
        }
        Ok(ConcreteSpace { atoms, index })
    }

    pub fn from_pairs<S: Into<String>>(pairs: Vec<(S, Weight)>) -> Result<Self, BalgError> {
        Self::new(
            pairs
                .into_iter()
                .map(|(id, weight)| Atom { id: id.into(), weight })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

/// The measure algebra of a finite space with null atoms removed.
#[derive(Debug, Clone)]
pub struct MeasureAlgebra {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
}

impl PartialEq for MeasureAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for MeasureAlgebra {}

impl MeasureAlgebra {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, BalgError> {
        let index = index_atoms(&atoms)?;
        if let Some(a) = atoms.iter().find(|a| !a.weight.is_positive()) {
            return Err(BalgError::NonPositiveWeight(a.id.clone()));
        }
        Ok(MeasureAlgebra { atoms, index })
    }

    /// Atoms with unit weight, mostly for tests and generated scenarios.
    pub fn uniform<S: AsRef<str>>(ids: &[S]) -> Result<Self, BalgError> {
        Self::new(
            ids.iter()
                .map(|s| Atom {
                    id: s.as_ref().to_string(),
                    weight: Weight::from_integer(BigInt::from(1)),
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.atoms[i].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn measure(&self, set: &AtomSet) -> Weight {
        set.iter().fold(Weight::zero(), |acc, i| acc + &self.atoms[i].weight)
    }

    pub fn as_space(&self) -> ConcreteSpace {
        ConcreteSpace {
            atoms: self.atoms.clone(),
            index: self.index.clone(),
        }
    }
}

/// The null quotient of a concrete space, with the inclusion of surviving
/// atoms.
#[derive(Debug, Clone)]
pub struct Quotient {
    algebra: Arc<MeasureAlgebra>,
    concrete_ids: Vec<String>,
    survivors: Vec<Option<usize>>,
}

impl Quotient {
    pub fn algebra(&self) -> &Arc<MeasureAlgebra> {
        &self.algebra
    }

    /// Position of a concrete atom in the quotient, `None` for null atoms.
    pub fn survivor(&self, concrete: usize) -> Option<usize> {
        self.survivors[concrete]
    }

    /// `ι*`: a set of concrete atoms goes to the set of its surviving atoms.
    pub fn inclusion_pullback(&self, set: &AtomSet) -> AtomSet {
        AtomSet::from_indices(
            self.algebra.len(),
            set.iter().filter_map(|i| self.survivors[i]),
        )
    }

    /// The abstraction `[f]` of a concrete atom map `f` to `target`.
    pub fn abstract_map(&self, target: &Quotient, mapping: &[usize]) -> Result<AbstractMap, BalgError> {
        if mapping.len() != self.survivors.len() {
            return Err(BalgError::Mismatch(format!(
                "concrete map has {} entries for {} atoms",
                mapping.len(),
                self.survivors.len()
            )));
        }
        let mut atom_map = Vec::with_capacity(self.algebra.len());
        for (x, &fx) in mapping.iter().enumerate() {
            if self.survivors[x].is_none() {
                continue;
            }
            let image = *target
                .survivors
                .get(fx)
                .ok_or_else(|| BalgError::UnknownAtom(format!("#{fx}")))?;
            match image {
                Some(y) => atom_map.push(y),
                None => {
                    return Err(BalgError::NullImage {
                        source_atom: self.concrete_ids[x].clone(),
                        target_atom: target.concrete_ids[fx].clone(),
                    })
                }
            }
        }
        AbstractMap::from_indices(self.algebra.clone(), target.algebra.clone(), atom_map)
    }
}

pub fn quotient_nulls(space: &ConcreteSpace) -> Result<Quotient, BalgError> {
    let mut atoms = Vec::new();
    let mut survivors = Vec::with_capacity(space.len());
    for a in &space.atoms {
        if a.weight.is_zero() {
            survivors.push(None);
        } else {
            survivors.push(Some(atoms.len()));
            atoms.push(a.clone());
        }
    }
    if atoms.is_empty() {
        return Err(BalgError::AllNull);
    }
    Ok(Quotient {
        algebra: Arc::new(MeasureAlgebra::new(atoms)?),
        concrete_ids: space.atoms.iter().map(|a| a.id.clone()).collect(),
        survivors,
    })
}

/// The abstraction of a concrete atom map between two concrete spaces.
pub fn abstract_of_concrete(
    source: &ConcreteSpace,
    target: &ConcreteSpace,
    mapping: &[usize],
) -> Result<AbstractMap, BalgError> {
    let qs = quotient_nulls(source)?;
    let qt = quotient_nulls(target)?;
    qs.abstract_map(&qt, mapping)
}

/// An abstract measurable map, stored as its forward atom map. The pullback
/// of `E` is `atom_map⁻¹(E)`.
#[derive(Debug, Clone)]
pub struct AbstractMap {
    source: Arc<MeasureAlgebra>,
    target: Arc<MeasureAlgebra>,
    atom_map: Vec<usize>,
}

impl PartialEq for AbstractMap {
    fn eq(&self, other: &Self) -> bool {
        self.atom_map == other.atom_map
            && same_algebra(&self.source, &other.source)
            && same_algebra(&self.target, &other.target)
    }
}

impl Eq for AbstractMap {}

pub(crate) fn same_algebra(a: &Arc<MeasureAlgebra>, b: &Arc<MeasureAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AbstractMap {
    pub fn from_indices(
        source: Arc<MeasureAlgebra>,
        target: Arc<MeasureAlgebra>,
        atom_map: Vec<usize>,
    ) -> Result<Self, BalgError> {
        if atom_map.len() != source.len() {
            let missing = source.atoms().get(atom_map.len()).map(|a| a.id.clone());
            return Err(match missing {
                Some(id) => BalgError::Partial(id),
                None => BalgError::Mismatch(format!(
                    "atom map has {} entries for {} source atoms",
                    atom_map.len(),
                    source.len()
                )),
            });
        }
        if let Some(&bad) = atom_map.iter().find(|&&y| y >= target.len()) {
            return Err(BalgError::UnknownAtom(format!("#{bad}")));
        }
        Ok(AbstractMap {
            source,
            target,
            atom_map,
        })
    }

    pub fn identity(algebra: Arc<MeasureAlgebra>) -> Self {
        let atom_map = (0..algebra.len()).collect();
        AbstractMap {
            source: algebra.clone(),
            target: algebra,
            atom_map,
        }
    }

    pub fn source(&self) -> &Arc<MeasureAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<MeasureAlgebra> {
        &self.target
    }

    pub fn atom_map(&self) -> &[usize] {
        &self.atom_map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.atom_map[x]
    }

    /// `f*E = {x : f(x) ∈ E}`.
    pub fn pullback(&self, set: &AtomSet) -> AtomSet {
        assert_eq!(set.universe(), self.target.len(), "pullback of a foreign atom set");
        AtomSet::from_indices(
            self.source.len(),
            (0..self.source.len()).filter(|&x| set.contains(self.atom_map[x])),
        )
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.len() != self.target.len() {
            return false;
        }
        let mut hit = vec![false; self.target.len()];
        for &y in &self.atom_map {
            if std::mem::replace(&mut hit[y], true) {
                return false;
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.atom_map.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Whether `f_* μ = ν`: each target atom weighs as much as its preimage.
    pub fn is_measure_preserving(&self) -> bool {
        let mut pushed = vec![Weight::zero(); self.target.len()];
        for (x, &y) in self.atom_map.iter().enumerate() {
            pushed[y] += &self.source.atoms[x].weight;
        }
        pushed
            .iter()
            .zip(&self.target.atoms)
            .all(|(w, a)| *w == a.weight)
    }
}

/// Builds an abstract map from a total atom-id mapping.
pub fn hom_from_atom_map<I, K, V>(
    source: Arc<MeasureAlgebra>,
    target: Arc<MeasureAlgebra>,
    mapping: I,
) -> Result<AbstractMap, BalgError>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut table: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, v) in mapping {
        let x = source
            .index_of(k.as_ref())
            .ok_or_else(|| BalgError::UnknownAtom(k.as_ref().to_string()))?;
        let y = target
            .index_of(v.as_ref())
            .ok_or_else(|| BalgError::UnknownAtom(v.as_ref().to_string()))?;
        if table.insert(x, y).is_some_and(|prev| prev != y) {
            return Err(BalgError::DuplicateAtom(k.as_ref().to_string()));
        }
    }
    let mut atom_map = Vec::with_capacity(source.len());
    for x in 0..source.len() {
        match table.get(&x) {
            Some(&y) => atom_map.push(y),
            None => return Err(BalgError::Partial(source.id(x).to_string())),
        }
    }
    AbstractMap::from_indices(source, target, atom_map)
}

/// `g ∘ f`, so that `(g ∘ f)* = f* ∘ g*`.
pub fn compose_maps(g: &AbstractMap, f: &AbstractMap) -> Result<AbstractMap, BalgError> {
    if !same_algebra(&f.target, &g.source) {
        return Err(BalgError::Mismatch(
            "target of the inner map is not the source of the outer map".into(),
        ));
    }
    Ok(AbstractMap {
        source: f.source.clone(),
        target: g.target.clone(),
        atom_map: f.atom_map.iter().map(|&y| g.atom_map[y]).collect(),
    })
}

pub fn invert_map(f: &AbstractMap) -> Result<AbstractMap, BalgError> {
    if !f.is_bijective() {
        return Err(BalgError::NotInvertible);
    }
    let mut inverse = vec![0; f.atom_map.len()];
    for (x, &y) in f.atom_map.iter().enumerate() {
        inverse[y] = x;
    }
    Ok(AbstractMap {
        source: f.target.clone(),
        target: f.source.clone(),
        atom_map: inverse,
    })
}

/// Generator data for a Boolean homomorphism `domain → codomain`, given on
/// some elements of the domain only.
#[derive(Debug, Clone)]
pub struct PartialHom {
    pub domain: Arc<MeasureAlgebra>,
    pub codomain: Arc<MeasureAlgebra>,
    pub generators: Vec<(AtomSet, AtomSet)>,
}

/// A Boolean homomorphism defined on the subalgebra generated by some
/// elements. The generated algebra's atoms are the nonempty cells
/// `⋀ⱼ ±Aⱼ`; the homomorphism is fixed by the image of each cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanHom {
    domain: Arc<MeasureAlgebra>,
    codomain: Arc<MeasureAlgebra>,
    cells: Vec<AtomSet>,
    images: Vec<AtomSet>,
}

impl BooleanHom {
    pub fn cells(&self) -> &[AtomSet] {
        &self.cells
    }

    pub fn cell_images(&self) -> &[AtomSet] {
        &self.images
    }

    /// Image of `e`, or `None` if `e` is not in the generated subalgebra.
    pub fn apply(&self, e: &AtomSet) -> Option<AtomSet> {
        let mut out = AtomSet::empty(self.codomain.len());
        for (cell, image) in self.cells.iter().zip(&self.images) {
            let meet = cell.intersection(e);
            if meet == *cell {
                out = out.union(image);
            } else if !meet.is_empty() {
                return None;
            }
        }
        Some(out)
    }

    /// Every element of the generated subalgebra, as unions of cells.
    pub fn generated_elements(&self) -> Vec<AtomSet> {
        let m = self.cells.len();
        assert!(m < 32, "generated algebra too large to enumerate");
        (0..1u64 << m)
            .map(|mask| {
                self.cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(AtomSet::empty(self.domain.len()), |acc, (_, c)| acc.union(c))
            })
            .collect()
    }

    /// The abstract map `codomain → domain` with this pullback, available
    /// when the generators separate every domain atom.
    pub fn as_abstract_map(&self) -> Option<AbstractMap> {
        if self.cells.iter().any(|c| c.len() != 1) {
            return None;
        }
        let mut atom_map = vec![usize::MAX; self.codomain.len()];
        for (cell, image) in self.cells.iter().zip(&self.images) {
            let y = cell.iter().next().unwrap();
            for x in image.iter() {
                atom_map[x] = y;
            }
        }
        AbstractMap::from_indices(self.codomain.clone(), self.domain.clone(), atom_map).ok()
    }
}

/// The unique Boolean homomorphism on the generated subalgebra extending
/// the generator data.
///
/// A codomain atom `x` determines the signature `σ(x)ⱼ = [x ∈ Pⱼ]`. The
/// data extends iff every such signature names a nonempty domain cell;
/// otherwise `⋀ⱼ ±Aⱼ = 0` while `⋀ⱼ ±Pⱼ ∋ x`, which is reported.
pub fn extend_boolean_hom(p: &PartialHom) -> Result<BooleanHom, BalgError> {
    let (ny, nx) = (p.domain.len(), p.codomain.len());
    for (i, (e, img)) in p.generators.iter().enumerate() {
        if e.universe() != ny || img.universe() != nx {
            return Err(BalgError::MalformedGenerator(i));
        }
    }
    let signature = |f: &dyn Fn(&(AtomSet, AtomSet)) -> bool| -> Vec<bool> {
        p.generators.iter().map(f).collect()
    };

    let mut cells: Vec<(Vec<bool>, AtomSet)> = Vec::new();
    for y in 0..ny {
        let sig = signature(&|(e, _)| e.contains(y));
        match cells.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, cell)) => cell.insert(y),
            None => cells.push((sig, AtomSet::from_indices(ny, [y]))),
        }
    }

    let mut images = vec![AtomSet::empty(nx); cells.len()];
    for x in 0..nx {
        let sig = signature(&|(_, img)| img.contains(x));
        match cells.iter().position(|(s, _)| *s == sig) {
            Some(c) => images[c].insert(x),
            None => {
                return Err(BalgError::Inconsistent {
                    signature: sig,
                    witness: x,
                })
            }
        }
    }

    Ok(BooleanHom {
        domain: p.domain.clone(),
        codomain: p.codomain.clone(),
        cells: cells.into_iter().map(|(_, c)| c).collect(),
        images,
    })
}
