use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::card::ExactKind;

const DEFAULT_TABLE: &str = include_str!("../../data/equivalence-v1.json");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FamilyId(pub String);

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDef {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableFile {
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    families: Vec<FamilyDef>,
}

#[derive(Debug, thiserror::Error)]
pub enum EquivalenceError {
    #[error("cannot read equivalence table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed equivalence table: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unknown interaction kind `{0}` in family `{1}`")]
    UnknownKind(String, String),
    #[error("interaction kind `{0}` listed in both `{1}` and `{2}`")]
    Overlap(String, String, String),
}

/// Groups of interaction kinds that count as the same interaction for
/// matching. Kinds not listed form singleton families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceTable {
    pub version: String,
    families: Vec<FamilyDef>,
    index: BTreeMap<ExactKind, FamilyId>,
}

impl EquivalenceTable {
    pub fn from_json(raw: &str) -> Result<Self, EquivalenceError> {
        let file: TableFile = serde_json::from_str(raw)?;
        let mut index = BTreeMap::new();
        for fam in &file.families {
            for member in &fam.members {
                let kind = ExactKind::parse(member)
                    .ok_or_else(|| EquivalenceError::UnknownKind(member.clone(), fam.name.clone()))?;
                if let Some(prev) = index.insert(kind, FamilyId(fam.name.clone())) {
                    return Err(EquivalenceError::Overlap(member.clone(), prev.0, fam.name.clone()));
                }
            }
        }
        Ok(EquivalenceTable { version: file.version, families: file.families, index })
    }

    pub fn load(path: &Path) -> Result<Self, EquivalenceError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn families(&self) -> &[FamilyDef] {
        &self.families
    }

    /// Family of an exact interaction kind.
    pub fn family(&self, kind: ExactKind) -> FamilyId {
        self.index.get(&kind).cloned().unwrap_or_else(|| FamilyId(kind.as_str().to_string()))
    }

    pub fn to_json(&self) -> String {
        let file = TableFile { version: self.version.clone(), description: None, families: self.families.clone() };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }
}

impl Default for EquivalenceTable {
    /// Phospho-form, activity and adds-modification kinds in one family;
    /// binding, translocation and plain amount changes each separate.
    fn default() -> Self {
        EquivalenceTable::from_json(DEFAULT_TABLE).expect("bundled equivalence table is valid")
    }
}

/// Family of `kind` under the default table.
pub fn interaction_family(kind: ExactKind) -> FamilyId {
    EquivalenceTable::default().family(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_families() {
        let t = EquivalenceTable::default();
        assert_eq!(t.family(ExactKind::AddsModification), t.family(ExactKind::IncreasesActivity));
        assert_eq!(t.family(ExactKind::AddsModification), t.family(ExactKind::IncreasesPhosphoForm));
        assert_eq!(t.family(ExactKind::DecreasesPhosphoForm), t.family(ExactKind::DecreasesActivity));
        assert_ne!(t.family(ExactKind::Binds), t.family(ExactKind::Translocates));
        assert_eq!(t.family(ExactKind::IncreasesAmount), t.family(ExactKind::DecreasesAmount));
        assert_ne!(t.family(ExactKind::IncreasesAmount), t.family(ExactKind::IncreasesPhosphoForm));
    }

    #[test]
    fn rejects_overlapping_families() {
        let raw = r#"{"version":"x","families":[
            {"name":"a","members":["binds"]},{"name":"b","members":["binds"]}]}"#;
        assert!(matches!(EquivalenceTable::from_json(raw), Err(EquivalenceError::Overlap(..))));
    }

    #[test]
    fn unlisted_kinds_are_singletons() {
        let t = EquivalenceTable::from_json(r#"{"version":"x","families":[]}"#).unwrap();
        assert_ne!(t.family(ExactKind::AddsModification), t.family(ExactKind::IncreasesActivity));
    }

    #[test]
    fn round_trips() {
        let t = EquivalenceTable::default();
        assert_eq!(EquivalenceTable::from_json(&t.to_json()).unwrap(), t);
    }
}
