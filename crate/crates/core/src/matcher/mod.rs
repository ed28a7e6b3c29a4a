//! Matching candidate cards against gold or reference interactions.
//!
//! A candidate is a *full* match when its interaction falls in the same
//! family as the gold interaction and both participants agree on surface
//! text (grounding is ignored). It is a *partial* match when participant A
//! was left blank but the interaction and participant B agree. Binding and
//! translocation allow A and B to be swapped.

mod equivalence;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::card::{card_signature, CardId, EntityRef, IndexCard, Interaction, ParticipantNode};
use crate::text::normalize_surface;

pub use equivalence::{interaction_family, EquivalenceError, EquivalenceTable, FamilyDef, FamilyId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchClass {
    Full,
    Partial,
    None,
}

impl MatchClass {
    /// 2 / 1 / 0, the notation used in match grids.
    pub fn score(self) -> u8 {
        match self {
            MatchClass::Full => 2,
            MatchClass::Partial => 1,
            MatchClass::None => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFlag {
    InteractionTypeError,
    ParticipantAError,
    ParticipantBError,
    GroundingErrorA,
    GroundingErrorB,
    InModelErrorA,
    InModelErrorB,
}

pub type FieldFlags = BTreeSet<FieldFlag>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub gold_id: String,
    pub candidate_card_id: CardId,
    pub class: MatchClass,
    #[serde(default)]
    pub field_flags: FieldFlags,
    /// Needs a reviewer to confirm before it counts.
    #[serde(default)]
    pub auto_flagged: bool,
    /// Candidate A/B were aligned to gold B/A.
    #[serde(default)]
    pub swapped: bool,
}

/// Anything a candidate can be matched against.
pub trait Gold {
    fn gold_id(&self) -> &str;
    fn gold_interaction(&self) -> &Interaction;
}

impl Gold for IndexCard {
    fn gold_id(&self) -> &str {
        self.id.as_str()
    }

    fn gold_interaction(&self) -> &Interaction {
        &self.interaction
    }
}

fn entity_text_eq(a: &EntityRef, b: &EntityRef) -> bool {
    normalize_surface(&a.text) == normalize_surface(&b.text)
}

fn entity_names(es: &[EntityRef]) -> BTreeSet<String> {
    es.iter().map(|e| normalize_surface(&e.text)).collect()
}

/// Whether a candidate participant names the gold participant. A generic
/// candidate only matches a generic gold participant.
pub fn participants_match(candidate: &ParticipantNode, gold: &ParticipantNode, table: &EquivalenceTable) -> bool {
    use ParticipantNode::*;
    match (candidate, gold) {
        (Entity(c), Entity(g)) => entity_text_eq(c, g),
        (Entity(c), Generic(g)) => normalize_surface(&c.text) == normalize_surface(g),
        (Generic(c), Generic(g)) => normalize_surface(c) == normalize_surface(g),
        (Complex(c), Complex(g)) => entity_names(c) == entity_names(g),
        (Embedded(c), Embedded(g)) => classify(c, g, table).0 == MatchClass::Full,
        (Blank, Blank) => true,
        _ => false,
    }
}

/// Looser agreement used to route near misses to review: one surface form
/// contains the other, or both carry the same grounding.
fn participants_near(candidate: &ParticipantNode, gold: &ParticipantNode, table: &EquivalenceTable) -> bool {
    if participants_match(candidate, gold, table) {
        return true;
    }
    let labels = |p: &ParticipantNode| -> Option<String> {
        match p {
            ParticipantNode::Entity(e) => Some(normalize_surface(&e.text)),
            ParticipantNode::Generic(g) => Some(normalize_surface(g)),
            _ => None,
        }
    };
    if let (ParticipantNode::Entity(c), ParticipantNode::Entity(g)) = (candidate, gold) {
        if c.grounding.is_some() && c.grounding == g.grounding {
            return true;
        }
    }
    match (labels(candidate), labels(gold)) {
        (Some(c), Some(g)) if c.len() >= 2 && g.len() >= 2 => c.contains(&g) || g.contains(&c),
        _ => false,
    }
}

/// Class, type-level flags, near-miss marker and swap for a pair of
/// interactions.
fn classify(
    candidate: &Interaction,
    gold: &Interaction,
    table: &EquivalenceTable,
) -> (MatchClass, FieldFlags, bool, bool) {
    let ck = candidate.exact_kind();
    let gk = gold.exact_kind();
    if table.family(ck) != table.family(gk) || candidate.negative_information != gold.negative_information {
        return (MatchClass::None, FieldFlags::new(), false, false);
    }
    let symmetric = gold.kind.is_symmetric();
    let (ca, cb, ga, gb) =
        (&candidate.participant_a, &candidate.participant_b, &gold.participant_a, &gold.participant_b);

    let direct = participants_match(ca, ga, table) && participants_match(cb, gb, table);
    let swapped = !direct && symmetric && participants_match(ca, gb, table) && participants_match(cb, ga, table);
    let partial_direct = ca.is_blank() && participants_match(cb, gb, table);
    let partial_swapped = !partial_direct && symmetric && ca.is_blank() && participants_match(cb, ga, table);

    let (class, swap) = if direct || swapped {
        (MatchClass::Full, swapped)
    } else if partial_direct || partial_swapped {
        (MatchClass::Partial, partial_swapped)
    } else {
        let near = (participants_near(ca, ga, table) && participants_near(cb, gb, table))
            || (symmetric && participants_near(ca, gb, table) && participants_near(cb, ga, table));
        return (MatchClass::None, FieldFlags::new(), near, false);
    };

    let mut flags = FieldFlags::new();
    let mod_type = |i: &Interaction| i.kind.modification().and_then(|f| f.modification.clone());
    let mod_mismatch = matches!((mod_type(candidate), mod_type(gold)), (Some(c), Some(g)) if c != g);
    if ck != gk || mod_mismatch {
        flags.insert(FieldFlag::InteractionTypeError);
    }
    if class == MatchClass::Partial {
        flags.insert(FieldFlag::ParticipantAError);
    }
    let auto_flagged = !flags.is_empty();
    (class, flags, auto_flagged, swap)
}

/// Matches one interaction against another, returning the record fields.
pub fn match_interactions(
    candidate: &Interaction,
    gold: &Interaction,
    table: &EquivalenceTable,
) -> (MatchClass, FieldFlags, bool, bool) {
    classify(candidate, gold, table)
}

/// Classifies `candidate` against `gold`. Flags record interaction-type
/// disagreements within a family and a blank participant A; grounding
/// problems are added separately with [`grounding_flags`].
pub fn match_cards(candidate: &IndexCard, gold: &impl Gold, table: &EquivalenceTable) -> MatchRecord {
    let (class, field_flags, auto_flagged, swapped) = classify(&candidate.interaction, gold.gold_interaction(), table);
    MatchRecord {
        gold_id: gold.gold_id().to_string(),
        candidate_card_id: candidate.id.clone(),
        class,
        field_flags,
        auto_flagged,
        swapped,
    }
}

/// Candidate participants aligned with gold A and gold B.
pub fn aligned(candidate: &Interaction, swapped: bool) -> (&ParticipantNode, &ParticipantNode) {
    if swapped {
        (&candidate.participant_b, &candidate.participant_a)
    } else {
        (&candidate.participant_a, &candidate.participant_b)
    }
}

/// A participant slot whose grounding can be scored: the candidate named
/// the gold entity correctly and the entity type is groundable.
pub fn scoreable_entity<'a>(
    candidate: &'a ParticipantNode,
    gold: &'a ParticipantNode,
) -> Option<(&'a EntityRef, &'a EntityRef)> {
    match (candidate, gold) {
        (ParticipantNode::Entity(c), ParticipantNode::Entity(g))
            if entity_text_eq(c, g) && g.entity_type.is_groundable() =>
        {
            Some((c, g))
        }
        _ => None,
    }
}

/// Grounding and in-model disagreements with the gold card for correctly
/// identified, groundable participants.
pub fn grounding_flags(candidate: &Interaction, gold: &Interaction, swapped: bool) -> FieldFlags {
    let (ca, cb) = aligned(candidate, swapped);
    let mut flags = FieldFlags::new();
    let slots = [
        (ca, &gold.participant_a, FieldFlag::GroundingErrorA, FieldFlag::InModelErrorA),
        (cb, &gold.participant_b, FieldFlag::GroundingErrorB, FieldFlag::InModelErrorB),
    ];
    for (c, g, grounding_flag, in_model_flag) in slots {
        if let Some((c, g)) = scoreable_entity(c, g) {
            if c.grounding != g.grounding {
                flags.insert(grounding_flag);
            }
            if c.in_model != g.in_model {
                flags.insert(in_model_flag);
            }
        }
    }
    flags
}

fn class_order(c: MatchClass) -> u8 {
    match c {
        MatchClass::Full => 0,
        MatchClass::Partial => 1,
        MatchClass::None => 2,
    }
}

/// Best candidate for `gold`: full before partial, then fewer flags, then
/// lowest rank, then lowest card id.
pub fn best_match<'c>(
    candidates: impl IntoIterator<Item = &'c IndexCard>,
    gold: &impl Gold,
    table: &EquivalenceTable,
) -> Option<MatchRecord> {
    candidates
        .into_iter()
        .map(|c| (c.rank, match_cards(c, gold, table)))
        .filter(|(_, r)| r.class != MatchClass::None)
        .min_by(|(ra, a), (rb, b)| {
            (class_order(a.class), a.field_flags.len(), ra.unwrap_or(u8::MAX), &a.candidate_card_id).cmp(&(
                class_order(b.class),
                b.field_flags.len(),
                rb.unwrap_or(u8::MAX),
                &b.candidate_card_id,
            ))
        })
        .map(|(_, r)| r)
}

/// Every gold item paired with its best candidate (a candidate may serve
/// several gold items).
pub fn match_all<'g, G: Gold + 'g>(
    candidates: &[IndexCard],
    golds: impl IntoIterator<Item = &'g G>,
    table: &EquivalenceTable,
) -> Vec<MatchRecord> {
    golds.into_iter().filter_map(|g| best_match(candidates, g, table)).collect()
}

/// Near misses: candidates that do not match but look close enough that a
/// reviewer should decide. Returned with class `None` and `auto_flagged`.
pub fn near_misses<'g, G: Gold + 'g>(
    candidates: &[IndexCard],
    golds: impl IntoIterator<Item = &'g G>,
    table: &EquivalenceTable,
) -> Vec<MatchRecord> {
    let mut out = Vec::new();
    for g in golds {
        for c in candidates {
            let r = match_cards(c, g, table);
            if r.class == MatchClass::None && r.auto_flagged {
                out.push(r);
            }
        }
    }
    out
}

/// Splits cards into the first occurrence of each interaction (ordered by
/// rank, then input order) and the repeats.
pub fn dedup_submission(cards: &[IndexCard]) -> (Vec<IndexCard>, Vec<IndexCard>) {
    let mut order: Vec<usize> = (0..cards.len()).collect();
    order.sort_by_key(|&i| (cards[i].rank.unwrap_or(u8::MAX), i));
    let mut seen = HashSet::new();
    let mut unique = Vec::new();
    let mut duplicates = Vec::new();
    for i in order {
        if seen.insert(card_signature(&cards[i])) {
            unique.push(cards[i].clone());
        } else {
            duplicates.push(cards[i].clone());
        }
    }
    (unique, duplicates)
}

/// Dedup applied to each paper's cards independently.
pub fn dedup_by_paper(cards: &BTreeMap<String, Vec<IndexCard>>) -> BTreeMap<String, (Vec<IndexCard>, Vec<IndexCard>)> {
    cards.iter().map(|(paper, cs)| (paper.clone(), dedup_submission(cs))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{EntityType, Feature, Grounding, InteractionKind, Namespace};

    fn phos() -> InteractionKind {
        InteractionKind::AddsModification(Feature::modification("phosphorylation"))
    }

    fn binds() -> InteractionKind {
        InteractionKind::Binds { site: None }
    }

    fn card(id: &str, a: Option<&str>, kind: InteractionKind, b: &str) -> IndexCard {
        let a = a.map(ParticipantNode::protein).unwrap_or(ParticipantNode::Blank);
        IndexCard::new(id, "PMC1", Interaction::new(a, kind, ParticipantNode::protein(b)))
    }

    #[test]
    fn swapped_binding_is_full() {
        let t = EquivalenceTable::default();
        let gold = card("g78", Some("Grb7"), binds(), "EphB1");
        let cand = card("c1", Some("EphB1"), binds(), "Grb7");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::Full);
        assert!(r.field_flags.is_empty());
        assert!(r.swapped);
    }

    #[test]
    fn blank_a_is_partial() {
        let t = EquivalenceTable::default();
        let gold = card("g91", Some("EGFR"), phos(), "Shc");
        let cand = card("c1", None, phos(), "Shc");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::Partial);
        assert!(r.field_flags.contains(&FieldFlag::ParticipantAError));
    }

    #[test]
    fn near_equivalent_kind_is_full_with_type_flag() {
        let t = EquivalenceTable::default();
        let b = EntityRef::protein("p52Shc").with_feature(Feature::modification("phosphorylation"));
        let gold = IndexCard::new(
            "g95",
            "PMC1",
            Interaction::new(
                ParticipantNode::protein("EphB1"),
                InteractionKind::IncreasesAmount,
                ParticipantNode::Entity(b),
            ),
        );
        let cand = card("c1", Some("EphB1"), phos(), "p52^{Shc}");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::Full);
        assert_eq!(r.field_flags, FieldFlags::from([FieldFlag::InteractionTypeError]));
        assert!(r.auto_flagged);
    }

    #[test]
    fn polarity_flip_is_flagged_match() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("A"), InteractionKind::IncreasesAmount, "B");
        let cand = card("c", Some("A"), InteractionKind::DecreasesAmount, "B");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::Full);
        assert!(r.field_flags.contains(&FieldFlag::InteractionTypeError));
    }

    #[test]
    fn directed_kinds_do_not_swap() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("A"), InteractionKind::IncreasesAmount, "B");
        let cand = card("c", Some("B"), InteractionKind::IncreasesAmount, "A");
        assert_eq!(match_cards(&cand, &gold, &t).class, MatchClass::None);
    }

    #[test]
    fn different_families_do_not_match() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("A"), binds(), "B");
        let cand = card("c", Some("A"), InteractionKind::Translocates { from: None, to: Some("nucleus".into()) }, "B");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::None);
        assert!(r.field_flags.is_empty());
    }

    #[test]
    fn generic_candidate_needs_generic_gold() {
        let t = EquivalenceTable::default();
        let generic = |label: &str| ParticipantNode::Generic(label.into());
        let gold_specific = IndexCard::new(
            "g",
            "P",
            Interaction::new(ParticipantNode::protein("PKA"), phos(), ParticipantNode::protein("H3")),
        );
        let gold_generic =
            IndexCard::new("g2", "P", Interaction::new(ParticipantNode::protein("PKA"), phos(), generic("histone")));
        let cand =
            IndexCard::new("c", "P", Interaction::new(ParticipantNode::protein("PKA"), phos(), generic("histone")));
        assert_eq!(match_cards(&cand, &gold_specific, &t).class, MatchClass::None);
        assert_eq!(match_cards(&cand, &gold_generic, &t).class, MatchClass::Full);
    }

    #[test]
    fn complexes_match_order_free() {
        let t = EquivalenceTable::default();
        let cx = |a: &str, b: &str| ParticipantNode::Complex(vec![EntityRef::protein(a), EntityRef::protein(b)]);
        let gold =
            IndexCard::new("g", "P", Interaction::new(cx("Grb2", "SOS"), binds(), ParticipantNode::protein("Ras")));
        let cand =
            IndexCard::new("c", "P", Interaction::new(cx("sos", "GRB2"), binds(), ParticipantNode::protein("Ras")));
        assert_eq!(match_cards(&cand, &gold, &t).class, MatchClass::Full);
    }

    #[test]
    fn near_miss_is_routed_to_review() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("p38"), InteractionKind::IncreasesActivity, "MK2");
        let cand = card("c", Some("p38 kinase"), InteractionKind::IncreasesActivity, "MK2");
        let r = match_cards(&cand, &gold, &t);
        assert_eq!(r.class, MatchClass::None);
        assert!(r.auto_flagged);
        assert!(r.field_flags.is_empty());
    }

    #[test]
    fn best_match_ordering() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("A"), phos(), "B");
        let partial = card("c1", None, phos(), "B");
        let flagged = card("c2", Some("A"), InteractionKind::IncreasesActivity, "B");
        let clean = card("c3", Some("A"), phos(), "B");
        let none = card("c4", Some("X"), binds(), "Y");

        let best = best_match([&partial, &flagged], &gold, &t).unwrap();
        assert_eq!(best.candidate_card_id.as_str(), "c2");
        let best = best_match([&partial, &flagged, &clean], &gold, &t).unwrap();
        assert_eq!(best.candidate_card_id.as_str(), "c3");
        assert!(best_match([&none], &gold, &t).is_none());
        assert!(best_match(std::iter::empty(), &gold, &t).is_none());
    }

    #[test]
    fn best_match_tie_breaks_on_rank_then_id() {
        let t = EquivalenceTable::default();
        let gold = card("g", Some("A"), phos(), "B");
        let r5 = card("z", Some("A"), phos(), "B").with_rank(5);
        let r2 = card("y", Some("A"), phos(), "B").with_rank(2);
        let unranked = card("a", Some("A"), phos(), "B");
        assert_eq!(best_match([&r5, &r2, &unranked], &gold, &t).unwrap().candidate_card_id.as_str(), "y");
        assert_eq!(
            best_match([&unranked, &card("b", Some("A"), phos(), "B")], &gold, &t).unwrap().candidate_card_id.as_str(),
            "a"
        );
    }

    #[test]
    fn grounding_flags_for_identified_participants() {
        let gold = Interaction::new(
            ParticipantNode::Entity(
                EntityRef::protein("EGFR").grounded(Grounding::new(Namespace::UniProt, "P00533")).in_model(true),
            ),
            phos(),
            ParticipantNode::Entity(EntityRef::protein("Shc").grounded(Grounding::new(Namespace::UniProt, "P29353"))),
        );
        let cand = Interaction::new(
            ParticipantNode::Entity(EntityRef::protein("EGFR").grounded(Grounding::new(Namespace::Go, "0005737"))),
            phos(),
            ParticipantNode::Entity(EntityRef::protein("Shc").grounded(Grounding::new(Namespace::UniProt, "P29353"))),
        );
        let flags = grounding_flags(&cand, &gold, false);
        assert_eq!(flags, FieldFlags::from([FieldFlag::GroundingErrorA, FieldFlag::InModelErrorA]));
        let family = Interaction::new(
            ParticipantNode::Entity(EntityRef::new("ERK", EntityType::ProteinFamily)),
            phos(),
            ParticipantNode::protein("Shc"),
        );
        assert!(grounding_flags(&family, &family, false).is_empty());
    }

    #[test]
    fn dedup() {
        let a = card("1", Some("Grb7"), binds(), "EphB1");
        let b = card("2", Some("EphB1"), binds(), "Grb7");
        let c = card("3", Some("A"), phos(), "B");
        let (u, d) = dedup_submission(&[a, b, c]);
        assert_eq!(u.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["1", "3"]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].id.as_str(), "2");
        assert_eq!(dedup_submission(&[]), (vec![], vec![]));
    }

    #[test]
    fn dedup_prefers_better_rank() {
        let a = card("1", Some("A"), phos(), "B").with_rank(4);
        let b = card("2", Some("A"), phos(), "B").with_rank(1);
        let (u, d) = dedup_submission(&[a, b]);
        assert_eq!(u[0].id.as_str(), "2");
        assert_eq!(d[0].id.as_str(), "1");
    }
}
