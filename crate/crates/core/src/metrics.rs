//! Precision, throughput, reference-set overlap, conditional error rates,
//! ensemble combinations and provenance composition.
//!
//! Everything is computed with exact rationals over a snapshot of the
//! latest judgments; rounding happens only when rendering.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio as NumRatio;
use serde::Serialize;

use crate::card::{CardId, IndexCard, Interaction, ParticipantNode};
use crate::judgments::{Judgment, Subject, Verdict};
use crate::matcher::{
    aligned, grounding_flags, match_interactions, participants_match, scoreable_entity, EquivalenceTable, FieldFlag,
    MatchClass, MatchRecord,
};
use crate::model_graph::{MechModel, Provenance};
use crate::refset::{RefCategory, ReferenceInteraction};

pub type Ratio = NumRatio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no largely-correct or incorrect verdicts to compute precision from")]
    EmptyDenominator,
    #[error("scored sample is empty")]
    EmptyScoredSample,
    #[error("days must be positive")]
    NonpositiveDays,
    #[error("interaction {0} has no provenance")]
    MissingProvenance(String),
    #[error("model has no interactions")]
    EmptyModel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub skipped: u64,
}

impl VerdictCounts {
    pub fn new(correct: u64, incorrect: u64, skipped: u64) -> Self {
        VerdictCounts { correct, incorrect, skipped }
    }

    pub fn from_verdicts<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Self {
        let mut c = VerdictCounts::default();
        for v in verdicts {
            match v {
                Verdict::LargelyCorrect => c.correct += 1,
                Verdict::Incorrect => c.incorrect += 1,
                Verdict::Skipped(_) => c.skipped += 1,
            }
        }
        c
    }

    /// Latest verdict of every card subject in a snapshot.
    pub fn from_snapshot(snapshot: &BTreeMap<Subject, Judgment>) -> Self {
        Self::from_verdicts(snapshot.iter().filter(|(s, _)| s.as_card().is_some()).map(|(_, j)| &j.verdict))
    }

    pub fn total(&self) -> u64 {
        self.correct + self.incorrect + self.skipped
    }
}

fn ratio(n: u64, d: u64) -> Ratio {
    Ratio::new(n as i64, d as i64)
}

/// correct / (correct + incorrect); skipped cards are left out.
pub fn precision(counts: &VerdictCounts) -> Result<Ratio, MetricsError> {
    let d = counts.correct + counts.incorrect;
    if d == 0 {
        return Err(MetricsError::EmptyDenominator);
    }
    Ok(ratio(counts.correct, d))
}

/// correct / (correct + incorrect + skipped).
pub fn correct_fraction(counts: &VerdictCounts) -> Result<Ratio, MetricsError> {
    if counts.total() == 0 {
        return Err(MetricsError::EmptyScoredSample);
    }
    Ok(ratio(counts.correct, counts.total()))
}

/// Estimated largely-correct cards per day: the correct fraction of the
/// scored sample applied to everything submitted, spread over `days`.
pub fn cards_per_day(counts: &VerdictCounts, total_submitted: u64, days: Ratio) -> Result<Ratio, MetricsError> {
    if days <= Ratio::from_integer(0) {
        return Err(MetricsError::NonpositiveDays);
    }
    Ok(correct_fraction(counts)? * Ratio::from_integer(total_submitted as i64) / days)
}

/// `100 * n / d` rounded to the nearest integer, halves rounding up.
pub fn round_percent(n: u64, d: u64) -> Option<u64> {
    (d > 0).then(|| (200 * n + d) / (2 * d))
}

/// A ratio rounded to `places` decimals, halves rounding up, as text.
pub fn format_ratio(r: Ratio, places: u32) -> String {
    let scale = 10i64.pow(places);
    let scaled = (r * Ratio::from_integer(scale) + Ratio::new(1, 2)).floor().to_integer();
    if places == 0 {
        return scaled.to_string();
    }
    format!("{}.{:0width$}", scaled / scale, scaled % scale, width = places as usize)
}

pub fn ratio_to_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapCategory {
    /// Direct phosphorylation and binding.
    DirectPhosphoBind,
    OtherDirect,
    IndirectComplex,
}

impl OverlapCategory {
    pub fn of(c: RefCategory) -> Self {
        match c {
            RefCategory::DirectPhosphoBind => OverlapCategory::DirectPhosphoBind,
            RefCategory::OtherDirect => OverlapCategory::OtherDirect,
            RefCategory::Indirect | RefCategory::ComplexComposite => OverlapCategory::IndirectComplex,
        }
    }

    pub const ALL: [OverlapCategory; 3] =
        [OverlapCategory::DirectPhosphoBind, OverlapCategory::OtherDirect, OverlapCategory::IndirectComplex];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapCell {
    pub matches: u64,
    pub reference_total: u64,
    pub percent: Option<u64>,
}

/// The `n` best-ranked cards (unranked cards last, input order breaking ties).
pub fn top_ranked(cards: &[IndexCard], n: usize) -> Vec<&IndexCard> {
    let mut order: Vec<(u8, usize)> = cards.iter().enumerate().map(|(i, c)| (c.rank.unwrap_or(u8::MAX), i)).collect();
    order.sort();
    order.into_iter().take(n).map(|(_, i)| &cards[i]).collect()
}

fn latest_verdict(snapshot: &BTreeMap<Subject, Judgment>, subject: &Subject) -> Option<Verdict> {
    snapshot.get(subject).map(|j| j.verdict)
}

/// Whether a match record counts: a full match (or a flagged near miss a
/// reviewer accepted), confirmed by a reviewer if it was flagged, with the
/// candidate card itself scored largely correct. Partial matches never count.
pub fn match_counts(record: &MatchRecord, snapshot: &BTreeMap<Subject, Judgment>) -> bool {
    let match_subject = Subject::Match { gold: record.gold_id.clone(), card: record.candidate_card_id.clone() };
    let review = latest_verdict(snapshot, &match_subject);
    let confirmed = match (record.class, review) {
        (MatchClass::Partial, _) => false,
        (_, Some(v)) => v == Verdict::LargelyCorrect && (record.class == MatchClass::Full || record.auto_flagged),
        (MatchClass::Full, None) => !record.auto_flagged,
        (_, None) => false,
    };
    confirmed
        && latest_verdict(snapshot, &Subject::Card(record.candidate_card_id.clone())) == Some(Verdict::LargelyCorrect)
}

/// Reference interactions matched by a top-10 card, per category.
pub fn reference_overlap(
    refset: &[ReferenceInteraction],
    ranked_cards: &BTreeMap<String, Vec<IndexCard>>,
    match_records: &[MatchRecord],
    snapshot: &BTreeMap<Subject, Judgment>,
) -> BTreeMap<OverlapCategory, OverlapCell> {
    let top: BTreeMap<&str, BTreeSet<&CardId>> = ranked_cards
        .iter()
        .map(|(paper, cards)| (paper.as_str(), top_ranked(cards, 10).into_iter().map(|c| &c.id).collect()))
        .collect();
    let mut out: BTreeMap<OverlapCategory, (u64, u64)> = BTreeMap::new();
    for r in refset {
        let cell = out.entry(OverlapCategory::of(r.category)).or_default();
        cell.1 += 1;
        let eligible = top.get(r.paper_id.as_str());
        let hit = match_records.iter().any(|m| {
            m.gold_id == r.id
                && eligible.is_some_and(|ids| ids.contains(&m.candidate_card_id))
                && match_counts(m, snapshot)
        });
        if hit {
            cell.0 += 1;
        }
    }
    out.into_iter()
        .map(|(k, (m, t))| (k, OverlapCell { matches: m, reference_total: t, percent: round_percent(m, t) }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Participant,
    InteractionType,
    Grounding,
    InModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorRate {
    pub errors: u64,
    pub scored: u64,
    #[serde(skip)]
    pub rate: Ratio,
}

/// A candidate that at least partially matched a gold item.
#[derive(Debug, Clone, Copy)]
pub struct MatchedPair<'a> {
    pub record: &'a MatchRecord,
    pub candidate: &'a Interaction,
    pub gold: &'a Interaction,
}

/// Error rates conditional on matching. Participant and interaction-type
/// rates are over matching cards; grounding and in-model rates over
/// correctly named, groundable participants of those cards. Matches a
/// reviewer rejected are left out. Kinds with nothing to score are absent.
pub fn conditional_error_rates(
    matches: &[MatchedPair<'_>],
    snapshot: &BTreeMap<Subject, Judgment>,
) -> BTreeMap<ErrorKind, ErrorRate> {
    let mut tallies: BTreeMap<ErrorKind, (u64, u64)> = BTreeMap::new();
    for m in matches {
        if m.record.class == MatchClass::None {
            continue;
        }
        let subject = Subject::Match { gold: m.record.gold_id.clone(), card: m.record.candidate_card_id.clone() };
        if latest_verdict(snapshot, &subject) == Some(Verdict::Incorrect) {
            continue;
        }
        let flags = &m.record.field_flags;
        let participant =
            flags.contains(&FieldFlag::ParticipantAError) || flags.contains(&FieldFlag::ParticipantBError);
        let mut bump = |k: ErrorKind, err: bool| {
            let t = tallies.entry(k).or_default();
            t.0 += u64::from(err);
            t.1 += 1;
        };
        bump(ErrorKind::Participant, participant);
        bump(ErrorKind::InteractionType, flags.contains(&FieldFlag::InteractionTypeError));

        let g = grounding_flags(m.candidate, m.gold, m.record.swapped);
        let (ca, cb) = aligned(m.candidate, m.record.swapped);
        let slots = [
            (ca, &m.gold.participant_a, FieldFlag::GroundingErrorA, FieldFlag::InModelErrorA),
            (cb, &m.gold.participant_b, FieldFlag::GroundingErrorB, FieldFlag::InModelErrorB),
        ];
        for (c, gp, gflag, mflag) in slots {
            if scoreable_entity(c, gp).is_some() {
                bump(ErrorKind::Grounding, g.contains(&gflag));
                bump(ErrorKind::InModel, g.contains(&mflag));
            }
        }
    }
    tallies
        .into_iter()
        .filter(|(_, (_, s))| *s > 0)
        .map(|(k, (e, s))| (k, ErrorRate { errors: e, scored: s, rate: ratio(e, s) }))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnsembleResult {
    pub cards: u64,
    pub participant_a_correct: u64,
    pub participant_b_correct: u64,
    pub interaction_type_correct: u64,
    pub combo: bool,
}

/// Correct when named right and, for groundable entities, grounded right.
fn slot_correct(candidate: &ParticipantNode, gold: &ParticipantNode, table: &EquivalenceTable) -> bool {
    if !participants_match(candidate, gold, table) {
        return false;
    }
    match (candidate, gold) {
        (ParticipantNode::Entity(c), ParticipantNode::Entity(g)) if g.entity_type.is_groundable() => {
            c.grounding == g.grounding
        }
        _ => true,
    }
}

/// Whether a pool of cards jointly covers a gold interaction: some card has
/// A right (named and grounded), some card has B right, some card has the
/// exact interaction type. The cards may differ.
pub fn ensemble_combination(gold: &Interaction, pool: &[&Interaction], table: &EquivalenceTable) -> EnsembleResult {
    let mut r = EnsembleResult { cards: pool.len() as u64, ..Default::default() };
    for cand in pool {
        let (_, _, _, swapped) = match_interactions(cand, gold, table);
        let (ca, cb) = aligned(cand, swapped);
        r.participant_a_correct += u64::from(slot_correct(ca, &gold.participant_a, table));
        r.participant_b_correct += u64::from(slot_correct(cb, &gold.participant_b, table));
        let same_mod =
            cand.kind.modification().map(|f| &f.modification) == gold.kind.modification().map(|f| &f.modification);
        r.interaction_type_correct += u64::from(
            cand.exact_kind() == gold.exact_kind()
                && same_mod
                && cand.negative_information == gold.negative_information,
        );
    }
    r.combo = r.participant_a_correct > 0 && r.participant_b_correct > 0 && r.interaction_type_correct > 0;
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceClass {
    ReadingOnly,
    DatabaseOnly,
    ManualOnly,
    ReadingDatabase,
    ReadingManual,
    DatabaseManual,
    All,
}

impl ProvenanceClass {
    pub const ALL: [ProvenanceClass; 7] = [
        ProvenanceClass::ReadingOnly,
        ProvenanceClass::DatabaseOnly,
        ProvenanceClass::ManualOnly,
        ProvenanceClass::ReadingDatabase,
        ProvenanceClass::ReadingManual,
        ProvenanceClass::DatabaseManual,
        ProvenanceClass::All,
    ];

    pub fn of(provenance: &[Provenance]) -> Option<Self> {
        let mut reading = false;
        let mut database = false;
        let mut manual = false;
        for p in provenance {
            match p {
                Provenance::MachineReading { .. } => reading = true,
                Provenance::CuratedDatabase { .. } => database = true,
                Provenance::ManualCuration { .. } => manual = true,
            }
        }
        Some(match (reading, database, manual) {
            (true, false, false) => ProvenanceClass::ReadingOnly,
            (false, true, false) => ProvenanceClass::DatabaseOnly,
            (false, false, true) => ProvenanceClass::ManualOnly,
            (true, true, false) => ProvenanceClass::ReadingDatabase,
            (true, false, true) => ProvenanceClass::ReadingManual,
            (false, true, true) => ProvenanceClass::DatabaseManual,
            (true, true, true) => ProvenanceClass::All,
            (false, false, false) => return None,
        })
    }
}

/// Share of interactions in each exclusive provenance class. All seven
/// classes are present; the shares sum to exactly one.
pub fn provenance_composition(model: &MechModel) -> Result<BTreeMap<ProvenanceClass, Ratio>, MetricsError> {
    if model.interactions.is_empty() {
        return Err(MetricsError::EmptyModel);
    }
    let mut counts: BTreeMap<ProvenanceClass, u64> = ProvenanceClass::ALL.iter().map(|c| (*c, 0)).collect();
    for x in &model.interactions {
        let class = ProvenanceClass::of(&x.provenance).ok_or_else(|| MetricsError::MissingProvenance(x.id.clone()))?;
        *counts.get_mut(&class).expect("all classes present") += 1;
    }
    let total = model.interactions.len() as u64;
    Ok(counts.into_iter().map(|(k, n)| (k, ratio(n, total))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_examples() {
        assert_eq!(precision(&VerdictCounts::new(19, 13, 6)).unwrap(), Ratio::new(19, 32));
        assert_eq!(format_ratio(precision(&VerdictCounts::new(19, 13, 6)).unwrap(), 3), "0.594");
        assert_eq!(precision(&VerdictCounts::new(5, 0, 0)).unwrap(), Ratio::from_integer(1));
        assert_eq!(precision(&VerdictCounts::new(0, 0, 4)), Err(MetricsError::EmptyDenominator));
    }

    #[test]
    fn throughput_examples() {
        let days = Ratio::from_integer(7);
        assert_eq!(cards_per_day(&VerdictCounts::new(1, 1, 0), 1400, days).unwrap(), Ratio::from_integer(100));
        assert_eq!(cards_per_day(&VerdictCounts::new(0, 3, 1), 999, days).unwrap(), Ratio::from_integer(0));
        let four = Ratio::from_integer(4);
        assert_eq!(cards_per_day(&VerdictCounts::new(2, 1, 1), 400, four).unwrap(), Ratio::from_integer(50));
        assert_eq!(
            cards_per_day(&VerdictCounts::new(2, 1, 1), 400, Ratio::from_integer(0)),
            Err(MetricsError::NonpositiveDays)
        );
        assert_eq!(cards_per_day(&VerdictCounts::default(), 400, four), Err(MetricsError::EmptyScoredSample));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_percent(22, 29), Some(76));
        assert_eq!(round_percent(4, 21), Some(19));
        assert_eq!(round_percent(0, 21), Some(0));
        assert_eq!(round_percent(1, 2), Some(50));
        assert_eq!(round_percent(1, 8), Some(13));
        assert_eq!(round_percent(0, 0), None);
        assert_eq!(format_ratio(Ratio::new(35, 55), 2), "0.64");
        assert_eq!(format_ratio(Ratio::new(0, 8), 2), "0.00");
        assert_eq!(format_ratio(Ratio::new(1, 1), 2), "1.00");
    }
}
