//! Finite groups given by multiplication tables, and their actions on a
//! measure algebra by atom permutations.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::balg::{compose_maps, same_algebra, AbstractMap, MeasureAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupTableError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("empty element name at position {0}")]
    EmptyName(usize),
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("multiplication table row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("table entry ({row}, {col}) = {value} is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("identity index {0} is out of range")]
    IdentityOutOfRange(usize),
    #[error("element {0:?} does not act as the identity")]
    NotIdentity(String),
    #[error("element {0:?} has no two-sided inverse")]
    NoInverse(String),
    #[error("({a} {b}) {c} ≠ {a} ({b} {c})")]
    NotAssociative { a: String, b: String, c: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("action has {found} maps but the group has {expected} elements")]
    WrongCount { expected: usize, found: usize },
    #[error("map for {0:?} is not an endomorphism of the base algebra")]
    BaseMismatch(String),
    #[error("map for {0:?} is not a bijection of the atoms")]
    NotBijective(String),
    #[error("the identity {0:?} does not act trivially")]
    IdentityNotTrivial(String),
    #[error("T^({g1} {g2}) ≠ T^{g1} ∘ T^{g2}")]
    NotHomomorphism { g1: String, g2: String },
}

/// A finite group as a list of named elements with a multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the group axioms on the table: identity, inverses and
    /// associativity (checked exhaustively).
    pub fn new(
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Self, GroupTableError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupTableError::Empty);
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(GroupTableError::EmptyName(i));
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(GroupTableError::DuplicateName(name.clone()));
            }
        }
        if table.len() != n {
            return Err(GroupTableError::NotSquare {
                row: table.len().min(n),
                len: table.get(n).map_or(0, Vec::len),
                expected: n,
            });
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n {
                return Err(GroupTableError::NotSquare {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
            if let Some((col, &value)) = entries.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(GroupTableError::EntryOutOfRange { row, col, value });
            }
        }
        if identity >= n {
            return Err(GroupTableError::IdentityOutOfRange(identity));
        }
        for (a, row) in table.iter().enumerate() {
            if table[identity][a] != a || row[identity] != a {
                return Err(GroupTableError::NotIdentity(names[identity].clone()));
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverses.push(b),
                None => return Err(GroupTableError::NoInverse(names[a].clone())),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupTableError::NotAssociative {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            c: names[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
            inverses,
        })
    }

    pub fn trivial() -> Self {
        Self::new(vec!["e".into()], vec![vec![0]], 0).unwrap()
    }

    /// `ℤ/n` with elements `e, g, g2, …`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(names, table, 0).unwrap()
    }

    /// The Klein four-group `{e, a, b, c}`.
    pub fn klein() -> Self {
        let names = ["e", "a", "b", "c"].map(String::from).to_vec();
        let table = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
        Self::new(names, table, 0).unwrap()
    }

    /// The symmetric group on three letters, realised as permutations of
    /// `{0, 1, 2}` composed right to left.
    pub fn s3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [0, 2, 1],
            [2, 1, 0],
            [1, 0, 2],
        ];
        let names = ["e", "r", "r2", "s", "sr", "sr2"].map(String::from).to_vec();
        let compose = |a: &[usize; 3], b: &[usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab = compose(a, b);
                        perms.iter().position(|p| *p == ab).unwrap()
                    })
                    .collect()
            })
            .collect();
        Self::new(names, table, 0).unwrap()
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        !elems.is_empty()
            && elems.contains(&self.identity)
            && elems.iter().all(|&a| {
                elems.contains(&self.inverse(a))
                    && elems.iter().all(|&b| elems.contains(&self.mul(a, b)))
            })
    }

    /// Every subgroup, each as a sorted element list, found by checking all
    /// subsets containing the identity.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        assert!(n <= 20, "subgroup enumeration is exhaustive");
        (0..1u32 << n)
            .filter(|m| m >> self.identity & 1 == 1)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| self.is_subgroup(s))
            .collect()
    }
}

/// A homomorphism `γ ↦ T^γ` from a finite group into the automorphisms of a
/// measure algebra. Measure preservation is not required.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    base: Arc<MeasureAlgebra>,
    maps: Vec<AbstractMap>,
}

impl GroupAction {
    pub fn new(
        group: Arc<FiniteGroup>,
        base: Arc<MeasureAlgebra>,
        maps: Vec<AbstractMap>,
    ) -> Result<Self, ActionError> {
        if maps.len() != group.order() {
            return Err(ActionError::WrongCount {
                expected: group.order(),
                found: maps.len(),
            });
        }
        for (g, m) in maps.iter().enumerate() {
            if !same_algebra(m.source(), &base) || !same_algebra(m.target(), &base) {
                return Err(ActionError::BaseMismatch(group.name(g).to_string()));
            }
            if !m.is_bijective() {
                return Err(ActionError::NotBijective(group.name(g).to_string()));
            }
        }
        if !maps[group.identity()].is_identity() {
            return Err(ActionError::IdentityNotTrivial(
                group.name(group.identity()).to_string(),
            ));
        }
        for g1 in 0..group.order() {
            for g2 in 0..group.order() {
                let composed = compose_maps(&maps[g1], &maps[g2]).expect("same base");
                if composed.atom_map() != maps[group.mul(g1, g2)].atom_map() {
                    return Err(ActionError::NotHomomorphism {
                        g1: group.name(g1).to_string(),
                        g2: group.name(g2).to_string(),
                    });
                }
            }
        }
        Ok(GroupAction { group, base, maps })
    }

    /// The action in which every group element fixes every atom.
    pub fn trivial(group: Arc<FiniteGroup>, base: Arc<MeasureAlgebra>) -> Self {
        let maps = (0..group.order())
            .map(|_| AbstractMap::identity(base.clone()))
            .collect();
        GroupAction { group, base, maps }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn base(&self) -> &Arc<MeasureAlgebra> {
        &self.base
    }

    pub fn map(&self, g: usize) -> &AbstractMap {
        &self.maps[g]
    }

    pub fn maps(&self) -> &[AbstractMap] {
        &self.maps
    }

    /// `T^γ` applied to atom `x`.
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.maps[g].apply(x)
    }

    pub fn orbits_and_stabilizers(&self) -> OrbitDecomposition {
        orbits_and_stabilizers(self)
    }
}

/// Orbits of the permutation image, listed by lowest atom, with full
/// stabilizers computed in the acting group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    stabilizers: Vec<Vec<usize>>,
}

impl OrbitDecomposition {
    /// Orbits as ascending atom lists, ordered by their first atom.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// The lowest atom of the orbit.
    pub fn representative(&self, orbit: usize) -> usize {
        self.orbits[orbit][0]
    }

    pub fn representative_of(&self, x: usize) -> usize {
        self.orbits[self.orbit_of[x]][0]
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    /// `{γ : T^γ x = x}`, in group order.
    pub fn stabilizer(&self, x: usize) -> &[usize] {
        &self.stabilizers[x]
    }
}

pub fn orbits_and_stabilizers(action: &GroupAction) -> OrbitDecomposition {
    let n = action.base.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(y) = queue.pop_front() {
            for g in 0..action.group.order() {
                let z = action.apply(g, y);
                if orbit_of[z] == usize::MAX {
                    orbit_of[z] = id;
                    members.push(z);
                    queue.push_back(z);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let stabilizers = (0..n)
        .map(|x| {
            (0..action.group.order())
                .filter(|&g| action.apply(g, x) == x)
                .collect()
        })
        .collect();
    OrbitDecomposition {
        orbits,
        orbit_of,
        stabilizers,
    }
}
