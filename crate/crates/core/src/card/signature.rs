use std::fmt;

use super::{IndexCard, Interaction, InteractionKind, ParticipantNode};
use crate::text::normalize_surface;

/// Content key of an interaction: equal keys mean "the same interaction",
/// whatever the evidence text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Order-free key of a participant node, built on normalized surface text.
pub fn participant_key(p: &ParticipantNode) -> String {
    match p {
        ParticipantNode::Entity(e) => format!("e:{}", normalize_surface(&e.text)),
        ParticipantNode::Complex(es) => {
            let mut names: Vec<String> = es.iter().map(|e| normalize_surface(&e.text)).collect();
            names.sort();
            names.dedup();
            format!("c:[{}]", names.join(","))
        }
        ParticipantNode::Embedded(i) => format!("i:({})", interaction_signature(i).0),
        ParticipantNode::Generic(g) => format!("g:{}", normalize_surface(g)),
        ParticipantNode::Blank => "_".to_string(),
    }
}

pub fn interaction_signature(i: &Interaction) -> CanonicalKey {
    let mut a = participant_key(&i.participant_a);
    let mut b = participant_key(&i.participant_b);
    if i.kind.is_symmetric() && b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let modification = match &i.kind {
        InteractionKind::AddsModification(f) | InteractionKind::InhibitsModification(f) => {
            f.modification.clone().unwrap_or_default()
        }
        _ => String::new(),
    };
    let neg = if i.negative_information { "!" } else { "" };
    CanonicalKey(format!("{neg}{}/{modification}|{a}|{b}", i.exact_kind().as_str()))
}

/// Deterministic key over the card's interaction content. Evidence,
/// grounding and metadata do not contribute.
pub fn card_signature(card: &IndexCard) -> CanonicalKey {
    interaction_signature(&card.interaction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{EvidenceSpan, Feature};

    fn card(id: &str, a: &str, kind: InteractionKind, b: &str) -> IndexCard {
        IndexCard::new(id, "PMC1", Interaction::new(ParticipantNode::protein(a), kind, ParticipantNode::protein(b)))
    }

    #[test]
    fn evidence_does_not_matter() {
        let c1 = card("1", "A", InteractionKind::AddsModification(Feature::modification("phosphorylation")), "B")
            .with_evidence(vec![EvidenceSpan::text("A phosphorylates B.")]);
        let c2 = card("2", "A", InteractionKind::AddsModification(Feature::modification("phosphorylation")), "B")
            .with_evidence(vec![EvidenceSpan::text("B is phosphorylated by A in vitro.")]);
        assert_eq!(card_signature(&c1), card_signature(&c2));
    }

    #[test]
    fn binds_is_symmetric() {
        let c1 = card("1", "Grb7", InteractionKind::Binds { site: None }, "EphB1");
        let c2 = card("2", "EphB1", InteractionKind::Binds { site: None }, "Grb7");
        assert_eq!(card_signature(&c1), card_signature(&c2));
    }

    #[test]
    fn amount_is_directed() {
        let c1 = card("1", "A", InteractionKind::IncreasesAmount, "B");
        let c2 = card("2", "B", InteractionKind::IncreasesAmount, "A");
        assert_ne!(card_signature(&c1), card_signature(&c2));
    }

    #[test]
    fn negation_and_modification_type_distinguish() {
        let c1 = card("1", "A", InteractionKind::AddsModification(Feature::modification("phosphorylation")), "B");
        let c2 = card("2", "A", InteractionKind::AddsModification(Feature::modification("ubiquitination")), "B");
        let mut c3 = c1.clone();
        c3.interaction.negative_information = true;
        assert_ne!(card_signature(&c1), card_signature(&c2));
        assert_ne!(card_signature(&c1), card_signature(&c3));
    }
}
