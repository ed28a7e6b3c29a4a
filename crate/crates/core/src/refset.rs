//! Consensus reference sets built from several curators' interaction lists.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::card::{interaction_signature, parse_interaction_value, Interaction, InteractionKind, ParticipantNode};
use crate::card::{interaction_to_json, CardErrors, ExactKind};
use crate::matcher::{match_interactions, EquivalenceTable, Gold, MatchClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefCategory {
    DirectPhosphoBind,
    OtherDirect,
    Indirect,
    ComplexComposite,
}

impl RefCategory {
    pub fn is_direct(self) -> bool {
        matches!(self, RefCategory::DirectPhosphoBind | RefCategory::OtherDirect)
    }
}

/// Category implied by an interaction's shape: an embedded participant A is
/// a composite ("A when bound to B phosphorylates C"), an embedded B is an
/// indirect effect, phosphorylation and binding are direct.
pub fn classify(i: &Interaction) -> RefCategory {
    if matches!(i.participant_a, ParticipantNode::Embedded(_)) {
        return RefCategory::ComplexComposite;
    }
    if matches!(i.participant_b, ParticipantNode::Embedded(_)) {
        return RefCategory::Indirect;
    }
    let phospho = match &i.kind {
        InteractionKind::AddsModification(f) | InteractionKind::InhibitsModification(f) => f.is_phosphorylation(),
        _ => matches!(i.exact_kind(), ExactKind::IncreasesPhosphoForm | ExactKind::DecreasesPhosphoForm),
    };
    if phospho || matches!(i.kind, InteractionKind::Binds { .. }) {
        RefCategory::DirectPhosphoBind
    } else {
        RefCategory::OtherDirect
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceInteraction {
    pub id: String,
    pub paper_id: String,
    pub interaction: Interaction,
    pub category: RefCategory,
    pub found_by: BTreeSet<String>,
    /// Ids of the component entries of an indirect or composite interaction.
    pub components: Vec<String>,
}

impl Gold for ReferenceInteraction {
    fn gold_id(&self) -> &str {
        &self.id
    }

    fn gold_interaction(&self) -> &Interaction {
        &self.interaction
    }
}

/// One interaction as listed by a curator.
#[derive(Debug, Clone, PartialEq)]
pub struct CuratedInteraction {
    pub paper_id: String,
    pub interaction: Interaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuratorSet {
    pub curator: String,
    pub interactions: Vec<CuratedInteraction>,
}

#[derive(Debug, thiserror::Error)]
pub enum RefsetError {
    #[error("need at least 2 curator sets, got {0}")]
    TooFewCurators(usize),
    #[error("cannot read reference set: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed reference set: {0}")]
    Malformed(String),
    #[error("reference entry {id}: {errors}")]
    Invalid { id: String, errors: CardErrors },
}

struct Cluster {
    paper_id: String,
    interaction: Interaction,
    found_by: BTreeSet<String>,
}

/// Interactions found by at least `min_agreement` curators. Agreement is a
/// full match between surface triples; grounding is ignored. Embedded
/// components are added as entries of their own.
pub fn merge_consensus(
    curator_sets: &[CuratorSet],
    min_agreement: usize,
    table: &EquivalenceTable,
) -> Result<Vec<ReferenceInteraction>, RefsetError> {
    if curator_sets.len() < 2 {
        return Err(RefsetError::TooFewCurators(curator_sets.len()));
    }
    let mut sets: Vec<&CuratorSet> = curator_sets.iter().collect();
    sets.sort_by(|a, b| a.curator.cmp(&b.curator));

    let mut clusters: Vec<Cluster> = Vec::new();
    for set in sets {
        let mut items: Vec<&CuratedInteraction> = set.interactions.iter().collect();
        items.sort_by_cached_key(|c| (c.paper_id.clone(), interaction_signature(&c.interaction)));
        for item in items {
            let home = clusters.iter_mut().find(|cl| {
                cl.paper_id == item.paper_id
                    && match_interactions(&item.interaction, &cl.interaction, table).0 == MatchClass::Full
            });
            match home {
                Some(cl) => {
                    cl.found_by.insert(set.curator.clone());
                }
                None => clusters.push(Cluster {
                    paper_id: item.paper_id.clone(),
                    interaction: item.interaction.clone(),
                    found_by: BTreeSet::from([set.curator.clone()]),
                }),
            }
        }
    }

    let mut kept: Vec<Cluster> = clusters.into_iter().filter(|c| c.found_by.len() >= min_agreement).collect();
    kept.sort_by_cached_key(|c| (c.paper_id.clone(), interaction_signature(&c.interaction)));

    let mut per_paper: BTreeMap<String, usize> = BTreeMap::new();
    let refs: Vec<ReferenceInteraction> = kept
        .into_iter()
        .map(|c| {
            let n = per_paper.entry(c.paper_id.clone()).or_default();
            *n += 1;
            ReferenceInteraction {
                id: format!("{}:r{}", c.paper_id, n),
                category: classify(&c.interaction),
                paper_id: c.paper_id,
                interaction: c.interaction,
                found_by: c.found_by,
                components: Vec::new(),
            }
        })
        .collect();
    Ok(expand_all(refs, table))
}

fn component_interactions(i: &Interaction) -> Vec<Interaction> {
    let mut out = Vec::new();
    if let ParticipantNode::Embedded(inner) = &i.participant_a {
        // "A when bound to B phosphorylates C": A binds B, and A acts on C.
        out.push((**inner).clone());
        let mut direct = Interaction::new(inner.participant_a.clone(), i.kind.clone(), i.participant_b.clone());
        direct.negative_information = i.negative_information;
        out.push(direct);
    } else if let ParticipantNode::Embedded(inner) = &i.participant_b {
        out.push((**inner).clone());
    }
    out
}

/// The composite itself plus each embedded direct interaction as its own
/// entry. Component ids extend the composite id. A direct interaction
/// comes back unchanged.
pub fn expand_embedded(r: &ReferenceInteraction) -> Vec<ReferenceInteraction> {
    let parts = component_interactions(&r.interaction);
    let mut out = Vec::with_capacity(parts.len() + 1);
    let mut composite = r.clone();
    for (k, interaction) in parts.into_iter().enumerate() {
        let id = format!("{}.{}", r.id, k + 1);
        composite.components.push(id.clone());
        out.push(ReferenceInteraction {
            id,
            paper_id: r.paper_id.clone(),
            category: classify(&interaction),
            interaction,
            found_by: r.found_by.clone(),
            components: Vec::new(),
        });
    }
    out.push(composite);
    out
}

/// Expands every entry, reusing an existing entry (and its id) when a
/// component fully matches it instead of adding a duplicate.
pub fn expand_all(refs: Vec<ReferenceInteraction>, table: &EquivalenceTable) -> Vec<ReferenceInteraction> {
    let mut out: Vec<ReferenceInteraction> = refs.clone();
    for r in &refs {
        let expanded = expand_embedded(r);
        let (composite, parts) = expanded.split_last().expect("expansion includes the composite");
        if parts.is_empty() {
            continue;
        }
        let mut ids = Vec::new();
        for part in parts {
            let existing = out.iter_mut().find(|e| {
                e.paper_id == part.paper_id
                    && match_interactions(&part.interaction, &e.interaction, table).0 == MatchClass::Full
            });
            match existing {
                Some(e) => {
                    e.found_by.extend(part.found_by.iter().cloned());
                    ids.push(e.id.clone());
                }
                None => {
                    ids.push(part.id.clone());
                    out.push(part.clone());
                }
            }
        }
        let slot = out.iter_mut().find(|e| e.id == composite.id).expect("composite present");
        slot.components = ids;
    }
    out.sort_by(|a, b| (a.paper_id.as_str(), natural_key(&a.id)).cmp(&(b.paper_id.as_str(), natural_key(&b.id))));
    out
}

fn natural_key(id: &str) -> Vec<(u64, String)> {
    id.split(['.', 'r', ':'])
        .map(|p| p.parse::<u64>().map(|n| (n, String::new())).unwrap_or((u64::MAX, p.to_string())))
        .collect()
}

/// Reference entries grouped by paper.
pub fn by_paper(refs: &[ReferenceInteraction]) -> BTreeMap<&str, Vec<&ReferenceInteraction>> {
    let mut out: BTreeMap<&str, Vec<&ReferenceInteraction>> = BTreeMap::new();
    for r in refs {
        out.entry(r.paper_id.as_str()).or_default().push(r);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct RefRecord {
    id: String,
    paper_id: String,
    category: Option<RefCategory>,
    found_by: BTreeSet<String>,
    #[serde(default)]
    components: Vec<String>,
    interaction: Value,
}

#[derive(Serialize, Deserialize)]
struct RefFile {
    interactions: Vec<RefRecord>,
}

/// Reads a reference-set document. A missing category is derived from the
/// interaction's shape.
pub fn refset_from_json(raw: &str) -> Result<Vec<ReferenceInteraction>, RefsetError> {
    let file: RefFile = serde_json::from_str(raw).map_err(|e| RefsetError::Malformed(e.to_string()))?;
    let mut ids = BTreeSet::new();
    let mut out = Vec::with_capacity(file.interactions.len());
    for rec in file.interactions {
        if !ids.insert(rec.id.clone()) {
            return Err(RefsetError::Malformed(format!("duplicate id {}", rec.id)));
        }
        let interaction = parse_interaction_value(&rec.interaction)
            .map_err(|errors| RefsetError::Invalid { id: rec.id.clone(), errors })?;
        out.push(ReferenceInteraction {
            category: rec.category.unwrap_or_else(|| classify(&interaction)),
            id: rec.id,
            paper_id: rec.paper_id,
            interaction,
            found_by: rec.found_by,
            components: rec.components,
        });
    }
    for r in &out {
        if let Some(bad) = r.components.iter().find(|c| !ids.contains(c.as_str())) {
            return Err(RefsetError::Malformed(format!("{} lists unknown component {bad}", r.id)));
        }
    }
    Ok(out)
}

pub fn load_refset(path: &Path) -> Result<Vec<ReferenceInteraction>, RefsetError> {
    refset_from_json(&std::fs::read_to_string(path)?)
}

pub fn refset_to_json(refs: &[ReferenceInteraction]) -> String {
    let records: Vec<Value> = refs
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "paper_id": r.paper_id,
                "category": r.category,
                "found_by": r.found_by,
                "components": r.components,
                "interaction": interaction_to_json(&r.interaction),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "interactions": records })).expect("refset serializes")
}

/// Tab-separated export: id, paper, category, interaction, curators,
/// components.
pub fn refset_to_tsv(refs: &[ReferenceInteraction]) -> String {
    let mut out = String::from("id\tpaper_id\tcategory\tinteraction\tfound_by\tcomponents\n");
    for r in refs {
        let category =
            serde_json::to_value(r.category).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let found_by: Vec<&str> = r.found_by.iter().map(String::as_str).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.id,
            r.paper_id,
            category,
            r.interaction.describe().replace('\t', " "),
            found_by.join(","),
            r.components.join(",")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::Feature;

    fn phos(a: &str, b: &str) -> Interaction {
        Interaction::new(
            ParticipantNode::protein(a),
            InteractionKind::AddsModification(Feature::modification("phosphorylation")),
            ParticipantNode::protein(b),
        )
    }

    fn binds(a: &str, b: &str) -> Interaction {
        Interaction::new(
            ParticipantNode::protein(a),
            InteractionKind::Binds { site: None },
            ParticipantNode::protein(b),
        )
    }

    fn set(curator: &str, items: &[Interaction]) -> CuratorSet {
        CuratorSet {
            curator: curator.into(),
            interactions: items
                .iter()
                .map(|i| CuratedInteraction { paper_id: "PMC1".into(), interaction: i.clone() })
                .collect(),
        }
    }

    #[test]
    fn two_of_three_included() {
        let t = EquivalenceTable::default();
        let sets = [
            set("c1", &[phos("EGFR", "Shc"), binds("Grb2", "Sos")]),
            set("c2", &[phos("EGFR", "Shc")]),
            set("c3", &[binds("Sos", "Grb2")]),
        ];
        let refs = merge_consensus(&sets, 2, &t).unwrap();
        assert_eq!(refs.len(), 2);
        let one = merge_consensus(&[set("c1", &[phos("A", "B")]), set("c2", &[phos("C", "D")])], 2, &t).unwrap();
        assert!(one.is_empty());
    }

    #[test]
    fn too_few_curators() {
        let t = EquivalenceTable::default();
        assert!(matches!(merge_consensus(&[set("c1", &[])], 2, &t), Err(RefsetError::TooFewCurators(1))));
    }

    #[test]
    fn indirect_adds_inner() {
        let r = ReferenceInteraction {
            id: "P:r1".into(),
            paper_id: "P".into(),
            interaction: Interaction::new(
                ParticipantNode::protein("A"),
                InteractionKind::IncreasesActivity,
                ParticipantNode::Embedded(Box::new(phos("B", "C"))),
            ),
            category: RefCategory::Indirect,
            found_by: BTreeSet::from(["x".into(), "y".into()]),
            components: vec![],
        };
        let out = expand_embedded(&r);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].interaction, phos("B", "C"));
        assert_eq!(out[1].components, vec!["P:r1.1".to_string()]);
    }

    #[test]
    fn composite_splits_in_two() {
        let composite = Interaction::new(
            ParticipantNode::Embedded(Box::new(binds("A", "B"))),
            InteractionKind::AddsModification(Feature::modification("phosphorylation")),
            ParticipantNode::protein("C"),
        );
        assert_eq!(classify(&composite), RefCategory::ComplexComposite);
        let parts = component_interactions(&composite);
        assert_eq!(parts, vec![binds("A", "B"), phos("A", "C")]);
    }

    #[test]
    fn expansion_reuses_existing_entries() {
        let t = EquivalenceTable::default();
        let both = BTreeSet::from(["x".to_string(), "y".to_string()]);
        let refs = vec![
            ReferenceInteraction {
                id: "P:r1".into(),
                paper_id: "P".into(),
                interaction: phos("B", "C"),
                category: RefCategory::DirectPhosphoBind,
                found_by: both.clone(),
                components: vec![],
            },
            ReferenceInteraction {
                id: "P:r2".into(),
                paper_id: "P".into(),
                interaction: Interaction::new(
                    ParticipantNode::protein("A"),
                    InteractionKind::IncreasesActivity,
                    ParticipantNode::Embedded(Box::new(phos("B", "C"))),
                ),
                category: RefCategory::Indirect,
                found_by: both,
                components: vec![],
            },
        ];
        let out = expand_all(refs, &t);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].components, vec!["P:r1".to_string()]);
    }

    #[test]
    fn json_round_trip() {
        let t = EquivalenceTable::default();
        let sets = [set("c1", &[phos("EGFR", "Shc")]), set("c2", &[phos("EGFR", "Shc")])];
        let refs = merge_consensus(&sets, 2, &t).unwrap();
        assert_eq!(refset_from_json(&refset_to_json(&refs)).unwrap(), refs);
        assert!(refset_to_tsv(&refs).lines().nth(1).unwrap().contains("direct_phospho_bind"));
    }
}
