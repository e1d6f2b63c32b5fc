//! Scenario files: a concrete space, a group table, an action, a coefficient
//! group and a cocycle, all in one JSON document.
//!
//! ```json
//! {
//!   "space": {"atoms": [{"id": "a", "weight": "1/3"}, ...]},
//!   "group": {"elements": ["e", "g"], "table": [[0, 1], [1, 0]], "identity": 0},
//!   "action": {"e": {"a": "a", ...}, "g": {"a": "b", ...}},
//!   "K": {"moduli": [2]},
//!   "cocycle": {"e": {"a": [0], ...}, "g": {"a": [1], ...}}
//! }
//! ```
//!
//! Weights are `"p/q"` strings and may be zero. Null atoms are quotiented
//! out before anything else happens: their cocycle entries may be omitted
//! and are ignored when present.

use std::path::Path;
use std::sync::Arc;

use coboundary::{
    quotient_nulls, validate_cocycle, AbGroupError, AbstractMap, ActionError, Atom, BalgError,
    CondElement, ConcreteSpace, Cocycle, FinAbGroup, FiniteGroup, GroupAction, GroupTableError,
    MeasureAlgebra, Quotient, Weight,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

/// Largest coefficient group accepted from a file.
pub const MAX_K_ORDER: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("invalid scenario at {pointer}: {message}")]
    Validation {
        pointer: String,
        message: String,
        violation: Option<ViolationReport>,
    },
}

/// The first `(γ₁, γ₂, atom)` where the cocycle equation fails, by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationReport {
    pub g1: String,
    pub g2: String,
    pub atom: String,
}

impl ScenarioError {
    pub fn to_json(&self) -> Value {
        match self {
            ScenarioError::Io { path, message } => {
                json!({"kind": "io", "path": path, "message": message})
            }
            ScenarioError::Parse(message) => json!({"kind": "parse", "message": message}),
            ScenarioError::Validation {
                pointer,
                message,
                violation,
            } => {
                let mut out = json!({"kind": "validation", "pointer": pointer, "message": message});
                if let Some(v) = violation {
                    out["violation"] = json!({"g1": v.g1, "g2": v.g2, "atom": v.atom});
                }
                out
            }
        }
    }
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        pointer: pointer.into(),
        message: message.into(),
        violation: None,
    }
}

/// Escapes one JSON pointer reference token.
fn seg(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

fn ptr(parts: &[&str]) -> String {
    parts.iter().map(|p| format!("/{}", seg(p))).collect()
}

fn as_object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, ScenarioError> {
    v.as_object().ok_or_else(|| invalid(at, "expected an object"))
}

fn as_array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>, ScenarioError> {
    v.as_array().ok_or_else(|| invalid(at, "expected an array"))
}

fn as_str<'a>(v: &'a Value, at: &str) -> Result<&'a str, ScenarioError> {
    v.as_str().ok_or_else(|| invalid(at, "expected a string"))
}

fn as_index(v: &Value, at: &str) -> Result<usize, ScenarioError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| invalid(at, "expected a non-negative integer"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value, ScenarioError> {
    obj.get(key)
        .ok_or_else(|| invalid(format!("{at}/{}", seg(key)), "missing field"))
}

fn only_keys(obj: &Map<String, Value>, allowed: &[&str], at: &str) -> Result<(), ScenarioError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid(format!("{at}/{}", seg(k)), "unknown field")),
        None => Ok(()),
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    space: ConcreteSpace,
    permutations: Vec<Vec<usize>>,
    quotient: Option<Quotient>,
    cocycle: Cocycle,
}

impl Scenario {
    /// The scenario of a cocycle over an algebra with no null atoms.
    pub fn from_cocycle(cocycle: &Cocycle) -> Scenario {
        let base = cocycle.action().base();
        let space = base.as_space();
        let quotient = (!base.is_empty()).then(|| quotient_nulls(&space).expect("positive weights"));
        let permutations = cocycle
            .action()
            .maps()
            .iter()
            .map(|m| m.atom_map().to_vec())
            .collect();
        Scenario {
            space,
            permutations,
            quotient,
            cocycle: cocycle.clone(),
        }
    }

    /// The concrete space as written, null atoms included.
    pub fn space(&self) -> &ConcreteSpace {
        &self.space
    }

    pub fn group(&self) -> &FiniteGroup {
        self.cocycle.action().group()
    }

    pub fn k(&self) -> &FinAbGroup {
        self.cocycle.group()
    }

    pub fn action(&self) -> &GroupAction {
        self.cocycle.action()
    }

    /// The cocycle on the null quotient.
    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// True when every atom is null, so the measure algebra is trivial.
    pub fn is_all_null(&self) -> bool {
        self.quotient.is_none()
    }

    fn survivor(&self, x: usize) -> Option<usize> {
        self.quotient.as_ref().and_then(|q| q.survivor(x))
    }

    /// Canonical JSON: atoms and group elements in their stored order,
    /// weights as `"p/q"`, cocycle entries only on non-null atoms.
    pub fn to_json(&self) -> Value {
        let atoms = self.space.atoms();
        let group = self.group();
        let mut action = Map::new();
        let mut cocycle = Map::new();
        for (g, perm) in self.permutations.iter().enumerate() {
            let entry: Map<String, Value> = perm
                .iter()
                .enumerate()
                .map(|(x, &y)| (atoms[x].id.clone(), Value::from(atoms[y].id.clone())))
                .collect();
            action.insert(group.name(g).to_string(), Value::Object(entry));
            let values: Map<String, Value> = (0..atoms.len())
                .filter_map(|x| {
                    self.survivor(x).map(|q| {
                        (atoms[x].id.clone(), json!(self.cocycle.component(g).get(q).coords()))
                    })
                })
                .collect();
            cocycle.insert(group.name(g).to_string(), Value::Object(values));
        }
        json!({
            "space": {"atoms": atoms.iter().map(|a| json!({"id": a.id, "weight": weight_string(&a.weight)})).collect::<Vec<_>>()},
            "group": {
                "elements": group.names(),
                "table": group.table(),
                "identity": group.identity(),
            },
            "action": action,
            "K": {"moduli": self.k().moduli()},
            "cocycle": cocycle,
        })
    }

    pub fn from_json(doc: &Value) -> Result<Scenario, ScenarioError> {
        let top = as_object(doc, "")?;
        only_keys(top, &["description", "space", "group", "action", "K", "cocycle"], "")?;
        if let Some(d) = top.get("description") {
            as_str(d, "/description")?;
        }
        let space = read_space(field(top, "space", "")?)?;
        let group = Arc::new(read_group(field(top, "group", "")?)?);
        let k = read_k(field(top, "K", "")?)?;
        let quotient = match quotient_nulls(&space) {
            Ok(q) => Some(q),
            Err(BalgError::AllNull) => None,
            Err(e) => return Err(invalid("/space/atoms", e.to_string())),
        };
        let (permutations, action) =
            read_action(field(top, "action", "")?, &space, &group, quotient.as_ref())?;
        let cocycle = read_cocycle(field(top, "cocycle", "")?, &space, action, k, quotient.as_ref())?;
        Ok(Scenario {
            space,
            permutations,
            quotient,
            cocycle,
        })
    }
}

/// Formats a weight as `"p/q"`, always with an explicit denominator.
pub fn weight_string(w: &Weight) -> String {
    format!("{}/{}", w.numer(), w.denom())
}

fn read_space(v: &Value) -> Result<ConcreteSpace, ScenarioError> {
    let obj = as_object(v, "/space")?;
    only_keys(obj, &["atoms"], "/space")?;
    let list = as_array(field(obj, "atoms", "/space")?, "/space/atoms")?;
    let mut atoms = Vec::with_capacity(list.len());
    for (i, a) in list.iter().enumerate() {
        let at = format!("/space/atoms/{i}");
        let obj = as_object(a, &at)?;
        only_keys(obj, &["id", "weight"], &at)?;
        let id = as_str(field(obj, "id", &at)?, &format!("{at}/id"))?;
        let w_at = format!("{at}/weight");
        let weight: Weight = as_str(field(obj, "weight", &at)?, &w_at)?
            .trim()
            .parse()
            .map_err(|_| invalid(&w_at, "expected a rational \"p/q\" with q > 0"))?;
        atoms.push(Atom {
            id: id.to_string(),
            weight,
        });
    }
    ConcreteSpace::new(atoms.clone()).map_err(|e| match &e {
        BalgError::EmptyAtomId(i) => invalid(format!("/space/atoms/{i}/id"), e.to_string()),
        BalgError::DuplicateAtom(id) => {
            let i = atoms.iter().rposition(|a| &a.id == id).unwrap_or(0);
            invalid(format!("/space/atoms/{i}/id"), e.to_string())
        }
        BalgError::NegativeWeight(id) => {
            let i = atoms.iter().position(|a| &a.id == id).unwrap_or(0);
            invalid(format!("/space/atoms/{i}/weight"), e.to_string())
        }
        _ => invalid("/space/atoms", e.to_string()),
    })
}

fn read_group(v: &Value) -> Result<FiniteGroup, ScenarioError> {
    let obj = as_object(v, "/group")?;
    only_keys(obj, &["elements", "table", "identity"], "/group")?;
    let names = as_array(field(obj, "elements", "/group")?, "/group/elements")?
        .iter()
        .enumerate()
        .map(|(i, n)| as_str(n, &format!("/group/elements/{i}")).map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let table = as_array(field(obj, "table", "/group")?, "/group/table")?
        .iter()
        .enumerate()
        .map(|(r, row)| {
            as_array(row, &format!("/group/table/{r}"))?
                .iter()
                .enumerate()
                .map(|(c, x)| as_index(x, &format!("/group/table/{r}/{c}")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let identity = as_index(field(obj, "identity", "/group")?, "/group/identity")?;
    let dup_index = |name: &str| names.iter().rposition(|n| n == name).unwrap_or(0);
    FiniteGroup::new(names.clone(), table, identity).map_err(|e| {
        let pointer = match &e {
            GroupTableError::Empty => "/group/elements".to_string(),
            GroupTableError::EmptyName(i) => format!("/group/elements/{i}"),
            GroupTableError::DuplicateName(n) => format!("/group/elements/{}", dup_index(n)),
            GroupTableError::EntryOutOfRange { row, col, .. } => format!("/group/table/{row}/{col}"),
            GroupTableError::IdentityOutOfRange(_) => "/group/identity".to_string(),
            GroupTableError::NotSquare { .. }
            | GroupTableError::NotIdentity(_)
            | GroupTableError::NoInverse(_)
            | GroupTableError::NotAssociative { .. } => "/group/table".to_string(),
        };
        invalid(pointer, e.to_string())
    })
}

fn read_k(v: &Value) -> Result<FinAbGroup, ScenarioError> {
    let obj = as_object(v, "/K")?;
    only_keys(obj, &["moduli"], "/K")?;
    let moduli = as_array(field(obj, "moduli", "/K")?, "/K/moduli")?
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let at = format!("/K/moduli/{i}");
            match n.as_u64() {
                Some(m) if (1..=MAX_K_ORDER as u64).contains(&m) => Ok(m as u32),
                _ => Err(invalid(at, format!("expected an integer in 1..={MAX_K_ORDER}"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let order = moduli.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m as usize));
    if !order.is_some_and(|o| o <= MAX_K_ORDER) {
        return Err(invalid("/K/moduli", format!("group order exceeds {MAX_K_ORDER}")));
    }
    FinAbGroup::new(moduli).map_err(|e| invalid("/K/moduli", e.to_string()))
}

fn atom_index(space: &ConcreteSpace, id: &str, at: &str) -> Result<usize, ScenarioError> {
    space
        .index_of(id)
        .ok_or_else(|| invalid(at, format!("unknown atom {id:?}")))
}

/// Resolves the keys of a per-group-element object, requiring every element.
fn per_element<'a>(
    obj: &'a Map<String, Value>,
    group: &FiniteGroup,
    at: &str,
) -> Result<Vec<&'a Value>, ScenarioError> {
    if let Some(k) = obj.keys().find(|k| group.index_of(k).is_none()) {
        return Err(invalid(
            format!("{at}/{}", seg(k)),
            format!("unknown group element {k:?}"),
        ));
    }
    (0..group.order())
        .map(|g| {
            obj.get(group.name(g)).ok_or_else(|| {
                invalid(
                    format!("{at}/{}", seg(group.name(g))),
                    format!("missing entry for group element {:?}", group.name(g)),
                )
            })
        })
        .collect()
}

fn read_action(
    v: &Value,
    space: &ConcreteSpace,
    group: &Arc<FiniteGroup>,
    quotient: Option<&Quotient>,
) -> Result<(Vec<Vec<usize>>, GroupAction), ScenarioError> {
    let obj = as_object(v, "/action")?;
    let entries = per_element(obj, group, "/action")?;
    let n = space.len();
    let mut permutations = Vec::with_capacity(group.order());
    for (g, entry) in entries.into_iter().enumerate() {
        let name = group.name(g);
        let at = ptr(&["action", name]);
        let map = as_object(entry, &at)?;
        let mut perm = vec![usize::MAX; n];
        for (src, dst) in map {
            let a_at = format!("{at}/{}", seg(src));
            let x = atom_index(space, src, &a_at)?;
            perm[x] = atom_index(space, as_str(dst, &a_at)?, &a_at)?;
        }
        if let Some(x) = perm.iter().position(|&y| y == usize::MAX) {
            let id = &space.atoms()[x].id;
            return Err(invalid(
                format!("{at}/{}", seg(id)),
                format!("no image given for atom {id:?}"),
            ));
        }
        let mut hit = vec![false; n];
        for &y in &perm {
            if std::mem::replace(&mut hit[y], true) {
                return Err(invalid(
                    at,
                    format!("{name:?} does not permute the atoms: {:?} is hit twice", space.atoms()[y].id),
                ));
            }
        }
        permutations.push(perm);
    }

    let (algebra, maps) = match quotient {
        Some(q) => {
            let maps = permutations
                .iter()
                .enumerate()
                .map(|(g, perm)| {
                    q.abstract_map(q, perm).map_err(|e| match &e {
                        BalgError::NullImage { source_atom, .. } => {
                            invalid(ptr(&["action", group.name(g), source_atom]), e.to_string())
                        }
                        _ => invalid(ptr(&["action", group.name(g)]), e.to_string()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (q.algebra().clone(), maps)
        }
        None => {
            let empty = Arc::new(MeasureAlgebra::new(Vec::new()).expect("empty algebra"));
            let maps = vec![AbstractMap::identity(empty.clone()); group.order()];
            (empty, maps)
        }
    };
    let action = GroupAction::new(group.clone(), algebra, maps).map_err(|e| {
        let pointer = match &e {
            ActionError::NotBijective(g)
            | ActionError::IdentityNotTrivial(g)
            | ActionError::BaseMismatch(g) => ptr(&["action", g]),
            ActionError::NotHomomorphism { .. } | ActionError::WrongCount { .. } => "/action".into(),
        };
        invalid(pointer, e.to_string())
    })?;
    Ok((permutations, action))
}

fn read_cocycle(
    v: &Value,
    space: &ConcreteSpace,
    action: GroupAction,
    k: FinAbGroup,
    quotient: Option<&Quotient>,
) -> Result<Cocycle, ScenarioError> {
    let obj = as_object(v, "/cocycle")?;
    let group = action.group().clone();
    let entries = per_element(obj, &group, "/cocycle")?;
    let base = action.base().clone();
    let survivor = |x: usize| quotient.and_then(|q| q.survivor(x));
    let mut rho = Vec::with_capacity(group.order());
    for (g, entry) in entries.into_iter().enumerate() {
        let at = ptr(&["cocycle", group.name(g)]);
        let map = as_object(entry, &at)?;
        let mut values = vec![None; base.len()];
        for (id, coords) in map {
            let a_at = format!("{at}/{}", seg(id));
            let x = atom_index(space, id, &a_at)?;
            let Some(q) = survivor(x) else { continue };
            let coords = as_array(coords, &a_at)?
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.as_i64()
                        .ok_or_else(|| invalid(format!("{a_at}/{i}"), "expected an integer"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let elem = k.element(&coords).map_err(|e| match &e {
                AbGroupError::CoordinateOutOfRange { index, .. } => {
                    invalid(format!("{a_at}/{index}"), e.to_string())
                }
                _ => invalid(&a_at, e.to_string()),
            })?;
            values[q] = Some(elem);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(q, v)| {
                v.ok_or_else(|| {
                    invalid(
                        format!("{at}/{}", seg(base.id(q))),
                        format!("no value given for atom {:?}", base.id(q)),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rho.push(CondElement::new(base.clone(), values).expect("one value per atom"));
    }
    let cocycle =
        Cocycle::new(action, k, rho).map_err(|e| invalid("/cocycle", e.to_string()))?;
    if let Err(v) = validate_cocycle(&cocycle) {
        let (n1, n2) = (group.name(v.g1), group.name(v.g2));
        let atom = base.id(v.atom).to_string();
        return Err(ScenarioError::Validation {
            pointer: ptr(&["cocycle", group.name(group.mul(v.g1, v.g2)), &atom]),
            message: format!(
                "cocycle equation fails: ρ({n1}·{n2})({atom}) ≠ ρ({n1})(T^{n2} {atom}) + ρ({n2})({atom})"
            ),
            violation: Some(ViolationReport {
                g1: n1.to_string(),
                g2: n2.to_string(),
                atom,
            }),
        });
    }
    Ok(cocycle)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    Scenario::from_json(&doc)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}
