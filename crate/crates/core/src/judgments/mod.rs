//! Verdicts on cards and the scoring rubric that produces them.
//!
//! Reviewers answer four questions about a card (is the evidence about
//! results, are the participants, the interaction and the negation flag
//! consistent with the evidence); [`apply_rubric`] turns the answers into a
//! verdict. Grounding and site problems are kept as flags and never change
//! the verdict.

mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::card::{CardId, IndexCard, InteractionKind};
use crate::matcher::{FieldFlag, FieldFlags};

pub use store::{latest_card_verdicts, JudgmentStore, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    BackgroundOrMethods,
    Duplicate,
    BlankIncreasesAmount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LargelyCorrect,
    Incorrect,
    Skipped(SkipReason),
}

impl Verdict {
    pub fn is_scored(self) -> bool {
        !matches!(self, Verdict::Skipped(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Judge {
    Rule,
    Human(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dialect {
    #[serde(rename = "phase_i")]
    PhaseI,
    #[serde(rename = "phase_ii")]
    PhaseII,
}

/// What a judgment is about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Card(CardId),
    /// Reviewer confirmation of an automatic match.
    Match {
        gold: String,
        card: CardId,
    },
    /// Reviewer confirmation that an edge's evidence supports it.
    EdgeSupport {
        model: String,
        edge: String,
    },
}

impl Subject {
    pub fn card(id: impl Into<String>) -> Self {
        Subject::Card(CardId::new(id))
    }

    pub fn as_card(&self) -> Option<&CardId> {
        match self {
            Subject::Card(id) => Some(id),
            _ => None,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Card(id) => write!(f, "card:{id}"),
            Subject::Match { gold, card } => write!(f, "match:{gold}=>{card}"),
            Subject::EdgeSupport { model, edge } => write!(f, "edge:{model}#{edge}"),
        }
    }
}

impl FromStr for Subject {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (tag, rest) = s.split_once(':').ok_or_else(|| format!("bad subject `{s}`"))?;
        match tag {
            "card" => Ok(Subject::card(rest)),
            "match" => {
                let (gold, card) = rest.split_once("=>").ok_or_else(|| format!("bad match subject `{s}`"))?;
                Ok(Subject::Match { gold: gold.into(), card: CardId::new(card) })
            }
            "edge" => {
                let (model, edge) = rest.rsplit_once('#').ok_or_else(|| format!("bad edge subject `{s}`"))?;
                Ok(Subject::EdgeSupport { model: model.into(), edge: edge.into() })
            }
            _ => Err(format!("bad subject `{s}`")),
        }
    }
}

impl Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Subject {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Reviewer answers about one card. `None` means not answered.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldAssessment {
    pub evidence_is_results: Option<bool>,
    pub participants_consistent: Option<bool>,
    pub interaction_consistent: Option<bool>,
    pub negative_flag_consistent: Option<bool>,
    /// Grounding, in-model and similar observations; recorded, never scored.
    #[serde(default)]
    pub flags: FieldFlags,
}

impl FieldAssessment {
    pub fn answered(results: bool, participants: bool, interaction: bool, negative: bool) -> Self {
        FieldAssessment {
            evidence_is_results: Some(results),
            participants_consistent: Some(participants),
            interaction_consistent: Some(interaction),
            negative_flag_consistent: Some(negative),
            flags: FieldFlags::new(),
        }
    }

    pub fn with_flag(mut self, flag: FieldFlag) -> Self {
        self.flags.insert(flag);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub subject: Subject,
    /// Assigned by the store; 0 until recorded.
    pub revision: u32,
    pub verdict: Verdict,
    #[serde(default)]
    pub field_flags: FieldFlags,
    pub judge: Judge,
    pub dialect: Dialect,
    /// The inputs the verdict was derived from, so it can be re-derived.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assessment: Option<FieldAssessment>,
    #[serde(default)]
    pub timestamp: String,
}

impl Judgment {
    pub fn new(subject: Subject, verdict: Verdict, judge: Judge, dialect: Dialect) -> Self {
        Judgment {
            subject,
            revision: 0,
            verdict,
            field_flags: FieldFlags::new(),
            judge,
            dialect,
            assessment: None,
            timestamp: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RubricError {
    #[error("assessment is missing `{0}`")]
    MissingAssessment(&'static str),
}

/// `<blank> increases/decreases amount of X`: nothing to score.
pub fn is_blank_amount_change(card: &IndexCard) -> bool {
    card.interaction.participant_a.is_blank()
        && matches!(card.interaction.kind, InteractionKind::IncreasesAmount | InteractionKind::DecreasesAmount)
}

/// Verdict table, separated from card handling so it can be enumerated.
///
/// | results | correct | Phase I    | Phase II   |
/// |---------|---------|------------|------------|
/// | yes     | yes     | correct    | correct    |
/// | yes     | no      | incorrect  | incorrect  |
/// | no      | yes     | skipped    | skipped    |
/// | no      | no      | skipped    | incorrect  |
pub fn rubric_verdict(evidence_is_results: bool, correct: bool, dialect: Dialect) -> Verdict {
    match (evidence_is_results, correct, dialect) {
        (true, true, _) => Verdict::LargelyCorrect,
        (true, false, _) => Verdict::Incorrect,
        (false, true, _) => Verdict::Skipped(SkipReason::BackgroundOrMethods),
        (false, false, Dialect::PhaseI) => Verdict::Skipped(SkipReason::BackgroundOrMethods),
        (false, false, Dialect::PhaseII) => Verdict::Incorrect,
    }
}

/// Scores one card from reviewer answers.
pub fn apply_rubric(
    card: &IndexCard,
    inputs: &FieldAssessment,
    dialect: Dialect,
    judge: Judge,
) -> Result<Judgment, RubricError> {
    let subject = Subject::Card(card.id.clone());
    if is_blank_amount_change(card) {
        let mut j = Judgment::new(subject, Verdict::Skipped(SkipReason::BlankIncreasesAmount), judge, dialect);
        j.assessment = Some(inputs.clone());
        j.field_flags = inputs.flags.clone();
        return Ok(j);
    }
    let results = inputs.evidence_is_results.ok_or(RubricError::MissingAssessment("evidence_is_results"))?;
    let participants =
        inputs.participants_consistent.ok_or(RubricError::MissingAssessment("participants_consistent"))?;
    let interaction = inputs.interaction_consistent.ok_or(RubricError::MissingAssessment("interaction_consistent"))?;
    let negative = inputs.negative_flag_consistent.ok_or(RubricError::MissingAssessment("negative_flag_consistent"))?;

    let verdict = rubric_verdict(results, participants && interaction && negative, dialect);
    let mut flags = inputs.flags.clone();
    if !interaction {
        flags.insert(FieldFlag::InteractionTypeError);
    }
    let mut j = Judgment::new(subject, verdict, judge, dialect);
    j.field_flags = flags;
    j.assessment = Some(inputs.clone());
    Ok(j)
}

/// Rule judgment for a repeat of an already-scored interaction.
pub fn duplicate_judgment(card: &IndexCard, dialect: Dialect) -> Judgment {
    Judgment::new(Subject::Card(card.id.clone()), Verdict::Skipped(SkipReason::Duplicate), Judge::Rule, dialect)
}

/// Rule judgment for cards the rubric skips without human input, if any.
pub fn structural_judgment(card: &IndexCard, dialect: Dialect) -> Option<Judgment> {
    is_blank_amount_change(card).then(|| {
        Judgment::new(
            Subject::Card(card.id.clone()),
            Verdict::Skipped(SkipReason::BlankIncreasesAmount),
            Judge::Rule,
            dialect,
        )
    })
}
