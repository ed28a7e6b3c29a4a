//! Signed mechanistic models: entities, typed edges with provenance, and
//! per-cell-line context.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Mul;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::card::{ExactKind, Grounding};
use crate::text::normalize_surface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        self * Sign::Negative
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Sign::Positive { "+1" } else { "-1" })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Kinase,
    Phosphatase,
    TranscriptionFactor,
    Drug,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    Activating,
    Deactivating,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    MachineReading {
        doc_id: String,
        #[serde(default)]
        evidence: Vec<String>,
        reader: String,
    },
    CuratedDatabase {
        db: String,
        record: String,
    },
    ManualCuration {
        curator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEntity {
    pub id: String,
    pub name: String,
    pub grounding: Option<Grounding>,
    pub roles: BTreeSet<Role>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelInteraction {
    pub id: String,
    pub source: String,
    pub target: String,
    pub kind: ExactKind,
    pub modification: Option<String>,
    pub effect: Option<Effect>,
    /// `None` for translocation, which has no natural direction of effect.
    pub sign: Option<Sign>,
    pub provenance: Vec<Provenance>,
}

impl ModelInteraction {
    pub fn is_phosphorylation(&self) -> bool {
        self.modification.as_deref().is_some_and(|m| normalize_surface(m).starts_with("phosph"))
    }
}

/// Sign implied by kind and activating/deactivating annotation. Unannotated
/// modifications count as activating; binding counts as activating unless
/// marked otherwise.
pub fn derive_sign(kind: ExactKind, effect: Option<Effect>) -> Option<Sign> {
    let base = match kind {
        ExactKind::Translocates => return None,
        ExactKind::Binds
        | ExactKind::AddsModification
        | ExactKind::IncreasesAmount
        | ExactKind::IncreasesPhosphoForm
        | ExactKind::IncreasesActivity => Sign::Positive,
        ExactKind::InhibitsModification
        | ExactKind::DecreasesAmount
        | ExactKind::DecreasesPhosphoForm
        | ExactKind::DecreasesActivity => Sign::Negative,
    };
    let modifies = matches!(
        kind,
        ExactKind::Binds
            | ExactKind::AddsModification
            | ExactKind::InhibitsModification
            | ExactKind::IncreasesPhosphoForm
            | ExactKind::DecreasesPhosphoForm
    );
    Some(match effect {
        Some(Effect::Deactivating) if modifies => base.flip(),
        _ => base,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    pub entity: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellContext {
    pub cell_line: String,
    #[serde(default)]
    pub knockouts: BTreeSet<String>,
    #[serde(default)]
    pub mutations: Vec<Mutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<BTreeMap<String, f64>>,
}

impl CellContext {
    pub fn new(cell_line: impl Into<String>) -> Self {
        CellContext { cell_line: cell_line.into(), knockouts: BTreeSet::new(), mutations: Vec::new(), expression: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechModel {
    pub id: String,
    pub entities: Vec<ModelEntity>,
    pub interactions: Vec<ModelInteraction>,
    pub contexts: BTreeMap<String, CellContext>,
    entity_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelViolation {
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("interaction {interaction} refers to unknown entity {entity}")]
    DanglingEndpoint { interaction: String, entity: String },
    #[error("interaction {0} has no provenance")]
    MissingProvenance(String),
    #[error("machine-reading provenance on {0} has no evidence sentences")]
    EmptyEvidence(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("interaction {id}: stated sign {stated} disagrees with kind and effect")]
    SignMismatch { id: String, stated: String },
    #[error("interaction {id}: unknown kind `{kind}`")]
    UnknownKind { id: String, kind: String },
    #[error("entity {id}: bad grounding `{value}`")]
    BadGrounding { id: String, value: String },
    #[error("cell line {cell_line}: knocked-out entity {entity} is not in the model")]
    UnknownKnockout { cell_line: String, entity: String },
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read model: {0}")]
    Io(#[from] std::io::Error),
    #[error("{} model violation(s): {}", .0.len(), .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ModelViolation>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown entity {0}")]
    UnknownEntity(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelWarning {
    pub interaction: String,
    pub message: String,
}

#[derive(Serialize, Deserialize)]
struct EntityRecord {
    id: String,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grounding: Option<String>,
    #[serde(default)]
    roles: BTreeSet<Role>,
}

#[derive(Serialize, Deserialize)]
struct InteractionRecord {
    id: String,
    source: String,
    target: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    effect: Option<Effect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<Sign>,
    #[serde(default)]
    provenance: Vec<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    id: String,
    entities: Vec<EntityRecord>,
    interactions: Vec<InteractionRecord>,
    #[serde(default)]
    contexts: Vec<CellContext>,
}

impl MechModel {
    /// Builds a model, collecting every violation.
    pub fn new(
        id: impl Into<String>,
        entities: Vec<ModelEntity>,
        interactions: Vec<ModelInteraction>,
        contexts: Vec<CellContext>,
    ) -> Result<Self, Vec<ModelViolation>> {
        let mut errors = Vec::new();
        let mut entity_index = HashMap::new();
        for (i, e) in entities.iter().enumerate() {
            if entity_index.insert(e.id.clone(), i).is_some() {
                errors.push(ModelViolation::DuplicateId(e.id.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        for (i, x) in interactions.iter().enumerate() {
            if edge_index.insert(x.id.clone(), i).is_some() || entity_index.contains_key(&x.id) {
                errors.push(ModelViolation::DuplicateId(x.id.clone()));
            }
            for end in [&x.source, &x.target] {
                if !entity_index.contains_key(end) {
                    errors.push(ModelViolation::DanglingEndpoint { interaction: x.id.clone(), entity: end.clone() });
                }
            }
            if x.provenance.is_empty() {
                errors.push(ModelViolation::MissingProvenance(x.id.clone()));
            }
            for p in &x.provenance {
                if matches!(p, Provenance::MachineReading { evidence, .. } if evidence.is_empty()) {
                    errors.push(ModelViolation::EmptyEvidence(x.id.clone()));
                }
            }
        }
        let mut ctx_map = BTreeMap::new();
        for c in contexts {
            for k in &c.knockouts {
                if !entity_index.contains_key(k) {
                    errors.push(ModelViolation::UnknownKnockout { cell_line: c.cell_line.clone(), entity: k.clone() });
                }
            }
            if ctx_map.contains_key(&c.cell_line) {
                errors.push(ModelViolation::DuplicateId(c.cell_line.clone()));
            }
            ctx_map.insert(c.cell_line.clone(), c);
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(MechModel { id: id.into(), entities, interactions, contexts: ctx_map, entity_index, edge_index })
    }

    pub fn entity(&self, id: &str) -> Option<&ModelEntity> {
        self.entity_index.get(id).map(|&i| &self.entities[i])
    }

    pub fn interaction(&self, id: &str) -> Option<&ModelInteraction> {
        self.edge_index.get(id).map(|&i| &self.interactions[i])
    }

    /// Finds an entity by id, name (case-insensitive) or grounding.
    pub fn resolve_entity(&self, key: &str) -> Option<&ModelEntity> {
        if let Some(e) = self.entity(key) {
            return Some(e);
        }
        let norm = normalize_surface(key);
        self.entities
            .iter()
            .find(|e| normalize_surface(&e.name) == norm || e.grounding.as_ref().is_some_and(|g| g.to_string() == key))
    }

    /// Directed edges `source -> target`; binding edges match either way.
    pub fn edges_between(&self, source: &str, target: &str) -> Result<Vec<&ModelInteraction>, GraphError> {
        for id in [source, target] {
            if self.entity(id).is_none() {
                return Err(GraphError::UnknownEntity(id.to_string()));
            }
        }
        Ok(self
            .interactions
            .iter()
            .filter(|x| {
                (x.source == source && x.target == target)
                    || (x.kind == ExactKind::Binds && x.source == target && x.target == source)
            })
            .collect())
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        self.interactions
            .iter()
            .filter(|x| {
                matches!(x.kind, ExactKind::AddsModification | ExactKind::InhibitsModification) && x.effect.is_none()
            })
            .map(|x| ModelWarning {
                interaction: x.id.clone(),
                message: "modification edge has no activating/deactivating annotation; treated as activating".into(),
            })
            .collect()
    }

    pub fn from_json(raw: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(raw)
            .map_err(|e| ModelError::Invalid(vec![ModelViolation::Malformed(e.to_string())]))?;
        let mut errors = Vec::new();
        let entities = file
            .entities
            .into_iter()
            .map(|e| {
                let grounding = e.grounding.as_deref().and_then(|g| {
                    let parsed = Grounding::parse(g);
                    if parsed.is_none() {
                        errors.push(ModelViolation::BadGrounding { id: e.id.clone(), value: g.to_string() });
                    }
                    parsed
                });
                ModelEntity { id: e.id, name: e.name, grounding, roles: e.roles }
            })
            .collect();
        let mut interactions = Vec::new();
        for r in file.interactions {
            let Some(kind) = ExactKind::parse(&r.kind) else {
                errors.push(ModelViolation::UnknownKind { id: r.id, kind: r.kind });
                continue;
            };
            let sign = derive_sign(kind, r.effect);
            if r.sign.is_some() && r.sign != sign {
                let stated = r.sign.map(|s| s.to_string()).unwrap_or_default();
                errors.push(ModelViolation::SignMismatch { id: r.id.clone(), stated });
            }
            interactions.push(ModelInteraction {
                id: r.id,
                source: r.source,
                target: r.target,
                kind,
                modification: r.modification,
                effect: r.effect,
                sign,
                provenance: r.provenance,
            });
        }
        match MechModel::new(file.id, entities, interactions, file.contexts) {
            Ok(m) if errors.is_empty() => Ok(m),
            Ok(_) => Err(ModelError::Invalid(errors)),
            Err(more) => {
                errors.extend(more);
                Err(ModelError::Invalid(errors))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            id: self.id.clone(),
            entities: self
                .entities
                .iter()
                .map(|e| EntityRecord {
                    id: e.id.clone(),
                    name: e.name.clone(),
                    grounding: e.grounding.as_ref().map(ToString::to_string),
                    roles: e.roles.clone(),
                })
                .collect(),
            interactions: self
                .interactions
                .iter()
                .map(|x| InteractionRecord {
                    id: x.id.clone(),
                    source: x.source.clone(),
                    target: x.target.clone(),
                    kind: x.kind.as_str().to_string(),
                    modification: x.modification.clone(),
                    effect: x.effect,
                    sign: x.sign,
                    provenance: x.provenance.clone(),
                })
                .collect(),
            contexts: self.contexts.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }
}

pub fn load_model(path: &Path) -> Result<MechModel, ModelError> {
    MechModel::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> String {
        let entities: Vec<String> = (0..n).map(|i| format!(r#"{{"id":"e{i}","name":"P{i}"}}"#)).collect();
        let edges: Vec<String> = (1..n)
            .map(|i| {
                format!(
                    r#"{{"id":"x{i}","source":"e{}","target":"e{i}","kind":"increases_activity",
                    "provenance":[{{"type":"curated_database","db":"db","record":"r{i}"}}]}}"#,
                    i - 1
                )
            })
            .collect();
        format!(r#"{{"id":"m","entities":[{}],"interactions":[{}]}}"#, entities.join(","), edges.join(","))
    }

    #[test]
    fn five_node_chain() {
        let m = MechModel::from_json(&chain(5)).unwrap();
        assert_eq!(m.interactions.len(), 4);
        assert_eq!(m.edges_between("e0", "e1").unwrap().len(), 1);
        assert!(m.edges_between("e1", "e0").unwrap().is_empty());
        assert!(matches!(m.edges_between("e0", "zz"), Err(GraphError::UnknownEntity(_))));
        assert_eq!(MechModel::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn collects_violations() {
        let raw = r#"{"id":"m","entities":[{"id":"a","name":"A"},{"id":"a","name":"A2"}],
            "interactions":[{"id":"x","source":"a","target":"b","kind":"binds","provenance":[]}]}"#;
        let Err(ModelError::Invalid(v)) = MechModel::from_json(raw) else { panic!() };
        assert!(v.contains(&ModelViolation::DuplicateId("a".into())));
        assert!(v.contains(&ModelViolation::MissingProvenance("x".into())));
        assert!(v.contains(&ModelViolation::DanglingEndpoint { interaction: "x".into(), entity: "b".into() }));
    }

    #[test]
    fn binds_either_way() {
        let raw = r#"{"id":"m","entities":[{"id":"a","name":"A"},{"id":"b","name":"B"}],
            "interactions":[{"id":"x","source":"a","target":"b","kind":"binds",
            "provenance":[{"type":"manual_curation","curator":"k"}]}]}"#;
        let m = MechModel::from_json(raw).unwrap();
        assert_eq!(m.edges_between("b", "a").unwrap().len(), 1);
    }

    #[test]
    fn sign_rules() {
        assert_eq!(derive_sign(ExactKind::AddsModification, None), Some(Sign::Positive));
        assert_eq!(derive_sign(ExactKind::AddsModification, Some(Effect::Deactivating)), Some(Sign::Negative));
        assert_eq!(derive_sign(ExactKind::InhibitsModification, None), Some(Sign::Negative));
        assert_eq!(derive_sign(ExactKind::DecreasesAmount, Some(Effect::Deactivating)), Some(Sign::Negative));
        assert_eq!(derive_sign(ExactKind::Translocates, None), None);
    }

    #[test]
    fn stated_sign_must_agree() {
        let raw = r#"{"id":"m","entities":[{"id":"a","name":"A"},{"id":"b","name":"B"}],
            "interactions":[{"id":"x","source":"a","target":"b","kind":"decreases_activity","sign":1,
            "provenance":[{"type":"manual_curation","curator":"k"}]}]}"#;
        let Err(ModelError::Invalid(v)) = MechModel::from_json(raw) else { panic!() };
        assert!(matches!(v[0], ModelViolation::SignMismatch { .. }));
    }
}
