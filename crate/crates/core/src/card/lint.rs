//! Recordable problems that do not stop a card from being read.

use std::sync::OnceLock;

use regex::Regex;

use super::{EntityRef, EntityType, IndexCard, Interaction, Namespace, ParticipantNode, Site};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CardWarning {
    pub path: String,
    pub message: String,
}

fn uniprot_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(?:[OPQ][0-9][A-Z0-9]{3}[0-9]|[A-NR-Z][0-9](?:[A-Z][A-Z0-9]{2}[0-9]){1,2}|[A-Z0-9]{1,10}_[A-Z0-9]{1,5})(?:-[0-9]+)?$",
        )
        .unwrap()
    })
}

fn identifier_ok(namespace: Namespace, id: &str) -> bool {
    match namespace {
        Namespace::UniProt => uniprot_re().is_match(id),
        Namespace::Hgnc | Namespace::PubChem => !id.is_empty() && id.chars().all(|c| c.is_ascii_digit()),
        Namespace::Go => id.len() == 7 && id.chars().all(|c| c.is_ascii_digit()),
        Namespace::None => !id.is_empty(),
    }
}

fn lint_entity(e: &EntityRef, path: &str, out: &mut Vec<CardWarning>) {
    if let Some(g) = &e.grounding {
        let gpath = format!("{path}.grounded_entity_id");
        if e.entity_type == EntityType::Protein && !matches!(g.namespace, Namespace::UniProt | Namespace::Hgnc) {
            out.push(CardWarning {
                path: gpath.clone(),
                message: format!("protein grounded to {} rather than UniProt/HGNC", display_ns(g.namespace)),
            });
        }
        if g.namespace == Namespace::None {
            out.push(CardWarning { path: gpath.clone(), message: "identifier has no namespace".into() });
        }
        if !identifier_ok(g.namespace, &g.identifier) {
            out.push(CardWarning {
                path: gpath,
                message: format!("`{}` is not a well-formed {} identifier", g.identifier, display_ns(g.namespace)),
            });
        }
    }
    for (i, f) in e.features.iter().enumerate() {
        lint_sites(&f.sites, &format!("{path}.features[{i}].position"), out);
    }
}

fn display_ns(ns: Namespace) -> &'static str {
    match ns {
        Namespace::None => "un-namespaced",
        other => other.as_str(),
    }
}

fn lint_sites(sites: &[Site], path: &str, out: &mut Vec<CardWarning>) {
    for s in sites {
        if let Site::Opaque(raw) = s {
            out.push(CardWarning { path: path.to_string(), message: format!("unparsed site `{raw}` kept verbatim") });
        }
    }
}

fn lint_participant(p: &ParticipantNode, path: &str, out: &mut Vec<CardWarning>) {
    match p {
        ParticipantNode::Entity(e) => lint_entity(e, path, out),
        ParticipantNode::Complex(es) => {
            for (i, e) in es.iter().enumerate() {
                lint_entity(e, &format!("{path}.entities[{i}]"), out);
            }
        }
        ParticipantNode::Embedded(inner) => lint_interaction(inner, &format!("{path}.interaction."), out),
        ParticipantNode::Generic(_) | ParticipantNode::Blank => {}
    }
}

fn lint_interaction(i: &Interaction, prefix: &str, out: &mut Vec<CardWarning>) {
    lint_participant(&i.participant_a, &format!("{prefix}participant_a"), out);
    lint_participant(&i.participant_b, &format!("{prefix}participant_b"), out);
    if let Some(f) = i.kind.modification() {
        lint_sites(&f.sites, &format!("{prefix}interaction_type.modification.position"), out);
    }
}

/// Grounding and site problems on a parsed card. These never block parsing.
pub fn lint_card(card: &IndexCard) -> Vec<CardWarning> {
    let mut out = Vec::new();
    lint_interaction(&card.interaction, "", &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{parse_card, Grounding};

    #[test]
    fn identifier_forms() {
        assert!(identifier_ok(Namespace::UniProt, "P00533"));
        assert!(identifier_ok(Namespace::UniProt, "JAK3_HUMAN"));
        assert!(identifier_ok(Namespace::UniProt, "A0A024R161"));
        assert!(!identifier_ok(Namespace::UniProt, "egfr"));
        assert!(identifier_ok(Namespace::Go, "0005737"));
        assert!(!identifier_ok(Namespace::Hgnc, "EGFR"));
    }

    #[test]
    fn go_grounded_protein_is_a_warning_not_an_error() {
        let raw = r#"{
            "pmc_id": "PMC1", "source": "c1", "type_of_source": "human", "timestamp": "t",
            "relationship_to_model": {"type": "extension"},
            "participant_a": {"entity_text": "EGFR", "entity_type": "protein", "grounded_entity_id": "GO:0005737"},
            "participant_b": {"entity_text": "Shc", "entity_type": "protein", "grounded_entity_id": "UniProt:P29353"},
            "interaction_type": "adds_modification",
            "evidence": ["EGFR phosphorylates Shc."]
        }"#;
        let card = parse_card(raw).unwrap();
        let a = card.interaction.participant_a.as_entity().unwrap();
        assert_eq!(a.grounding, Some(Grounding::new(Namespace::Go, "0005737")));
        let warnings = lint_card(&card);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].path, "participant_a.grounded_entity_id");
    }
}
