//! Index cards: the interchange record for one extracted interaction.
//!
//! A card names two participants, an interaction type, the evidence text it
//! was read from, and how the interaction relates to a reference model. Cards
//! are read from JSON documents ([`parse_card`]) and written back with
//! [`card_to_json`]; unknown fields survive the round trip.

mod json;
mod lint;
mod signature;
mod submission;

use std::fmt;

use serde_json::{Map, Value};

pub use json::{card_to_json, interaction_to_json, parse_card, parse_card_value, parse_interaction_value};
pub use lint::{lint_card, CardWarning};
pub use signature::{card_signature, interaction_signature, participant_key, CanonicalKey};
pub use submission::{load_submission, Condition, Submission, SubmissionError};

/// Identifier of a card within an evaluation (`paper_id/file-stem` when loaded
/// from a submission tree).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct CardId(pub String);

impl CardId {
    pub fn new(id: impl Into<String>) -> Self {
        CardId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CardId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Protein,
    Chemical,
    Gene,
    ProteinFamily,
    ComplexMember,
}

impl EntityType {
    pub const ALL: [EntityType; 5] = [
        EntityType::Protein,
        EntityType::Chemical,
        EntityType::Gene,
        EntityType::ProteinFamily,
        EntityType::ComplexMember,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Protein => "protein",
            EntityType::Chemical => "chemical",
            EntityType::Gene => "gene",
            EntityType::ProteinFamily => "protein_family",
            EntityType::ComplexMember => "complex_member",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        EntityType::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Entity types whose grounding is scored (proteins, genes, chemicals).
    pub fn is_groundable(self) -> bool {
        !matches!(self, EntityType::ProteinFamily)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    UniProt,
    Hgnc,
    PubChem,
    Go,
    /// An identifier given without a recognised namespace prefix.
    None,
}

impl Namespace {
    pub fn as_str(self) -> &'static str {
        match self {
            Namespace::UniProt => "UniProt",
            Namespace::Hgnc => "HGNC",
            Namespace::PubChem => "PubChem",
            Namespace::Go => "GO",
            Namespace::None => "",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniprot" | "up" => Some(Namespace::UniProt),
            "hgnc" => Some(Namespace::Hgnc),
            "pubchem" | "pubchem.compound" => Some(Namespace::PubChem),
            "go" => Some(Namespace::Go),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grounding {
    pub namespace: Namespace,
    pub identifier: String,
}

impl Grounding {
    pub fn new(namespace: Namespace, identifier: impl Into<String>) -> Self {
        Grounding { namespace, identifier: identifier.into() }
    }

    /// Parses `NS:ID`; a string without a colon is an un-namespaced identifier.
    /// Returns `None` when the prefix is not a known namespace.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once(':') {
            Some((ns, id)) => {
                let namespace = Namespace::parse(ns)?;
                Some(Grounding::new(namespace, id.trim()))
            }
            None => Some(Grounding::new(Namespace::None, s)),
        }
    }
}

impl fmt::Display for Grounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.namespace {
            Namespace::None => f.write_str(&self.identifier),
            ns => write!(f, "{}:{}", ns.as_str(), self.identifier),
        }
    }
}

/// A modification site. Positions that cannot be read as residue + number
/// are kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Residue { residue: Option<char>, position: u32 },
    Opaque(String),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Residue { residue: Some(r), position } => write!(f, "{r}{position}"),
            Site::Residue { residue: None, position } => write!(f, "{position}"),
            Site::Opaque(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature {
    /// Modification type, lower-cased (`phosphorylation`, `ubiquitination`, ...).
    pub modification: Option<String>,
    pub sites: Vec<Site>,
    pub isoform: Option<String>,
    pub mutant: Option<String>,
}

impl Feature {
    pub fn modification(kind: &str) -> Self {
        Feature { modification: Some(kind.to_ascii_lowercase()), ..Feature::default() }
    }

    pub fn with_sites(mut self, sites: impl IntoIterator<Item = Site>) -> Self {
        self.sites.extend(sites);
        self
    }

    pub fn is_phosphorylation(&self) -> bool {
        self.modification.as_deref().is_some_and(|m| m == "phosphorylation")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityRef {
    pub text: String,
    pub entity_type: EntityType,
    pub grounding: Option<Grounding>,
    pub features: Vec<Feature>,
    pub in_model: bool,
    pub extra: Map<String, Value>,
}

impl EntityRef {
    pub fn new(text: impl Into<String>, entity_type: EntityType) -> Self {
        EntityRef {
            text: text.into(),
            entity_type,
            grounding: None,
            features: Vec::new(),
            in_model: false,
            extra: Map::new(),
        }
    }

    pub fn protein(text: impl Into<String>) -> Self {
        EntityRef::new(text, EntityType::Protein)
    }

    pub fn grounded(mut self, grounding: Grounding) -> Self {
        self.grounding = Some(grounding);
        self
    }

    pub fn with_feature(mut self, feature: Feature) -> Self {
        self.features.push(feature);
        self
    }

    pub fn in_model(mut self, in_model: bool) -> Self {
        self.in_model = in_model;
        self
    }

    pub fn has_phospho_feature(&self) -> bool {
        self.features.iter().any(Feature::is_phosphorylation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParticipantNode {
    Entity(EntityRef),
    /// Two or more bound entities.
    Complex(Vec<EntityRef>),
    /// A nested interaction, e.g. the `B phosphorylates C` in
    /// `A increases [B phosphorylates C]`.
    Embedded(Box<Interaction>),
    /// A generic class such as "histone" or "RTK".
    Generic(String),
    Blank,
}

impl ParticipantNode {
    pub fn entity(e: EntityRef) -> Self {
        ParticipantNode::Entity(e)
    }

    pub fn protein(text: &str) -> Self {
        ParticipantNode::Entity(EntityRef::protein(text))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, ParticipantNode::Blank)
    }

    pub fn as_entity(&self) -> Option<&EntityRef> {
        match self {
            ParticipantNode::Entity(e) => Some(e),
            _ => None,
        }
    }

    /// Entities directly named by this node (complex members included,
    /// embedded interactions excluded).
    pub fn entities(&self) -> Vec<&EntityRef> {
        match self {
            ParticipantNode::Entity(e) => vec![e],
            ParticipantNode::Complex(es) => es.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Human-readable label, used in reports and TSV exports.
    pub fn label(&self) -> String {
        match self {
            ParticipantNode::Entity(e) => e.text.clone(),
            ParticipantNode::Complex(es) => es.iter().map(|e| e.text.as_str()).collect::<Vec<_>>().join(":"),
            ParticipantNode::Embedded(i) => format!("[{}]", i.describe()),
            ParticipantNode::Generic(g) => g.clone(),
            ParticipantNode::Blank => "(blank)".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InteractionKind {
    Binds { site: Option<String> },
    AddsModification(Feature),
    InhibitsModification(Feature),
    Translocates { from: Option<String>, to: Option<String> },
    IncreasesAmount,
    DecreasesAmount,
    IncreasesActivity,
    DecreasesActivity,
}

impl InteractionKind {
    pub fn name(&self) -> &'static str {
        match self {
            InteractionKind::Binds { .. } => "binds",
            InteractionKind::AddsModification(_) => "adds_modification",
            InteractionKind::InhibitsModification(_) => "inhibits_modification",
            InteractionKind::Translocates { .. } => "translocates",
            InteractionKind::IncreasesAmount => "increases",
            InteractionKind::DecreasesAmount => "decreases",
            InteractionKind::IncreasesActivity => "increases_activity",
            InteractionKind::DecreasesActivity => "decreases_activity",
        }
    }

    pub fn modification(&self) -> Option<&Feature> {
        match self {
            InteractionKind::AddsModification(f) | InteractionKind::InhibitsModification(f) => Some(f),
            _ => None,
        }
    }

    /// Participant order carries no meaning for binding and translocation.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, InteractionKind::Binds { .. } | InteractionKind::Translocates { .. })
    }
}

/// Interaction type with the amount-of-phosphorylated-form variants split
/// out. This is the unit the equivalence table and signatures work with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExactKind {
    Binds,
    AddsModification,
    InhibitsModification,
    Translocates,
    IncreasesAmount,
    DecreasesAmount,
    IncreasesPhosphoForm,
    DecreasesPhosphoForm,
    IncreasesActivity,
    DecreasesActivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Increase,
    Decrease,
    Neutral,
}

impl ExactKind {
    pub const ALL: [ExactKind; 10] = [
        ExactKind::Binds,
        ExactKind::AddsModification,
        ExactKind::InhibitsModification,
        ExactKind::Translocates,
        ExactKind::IncreasesAmount,
        ExactKind::DecreasesAmount,
        ExactKind::IncreasesPhosphoForm,
        ExactKind::DecreasesPhosphoForm,
        ExactKind::IncreasesActivity,
        ExactKind::DecreasesActivity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExactKind::Binds => "binds",
            ExactKind::AddsModification => "adds_modification",
            ExactKind::InhibitsModification => "inhibits_modification",
            ExactKind::Translocates => "translocates",
            ExactKind::IncreasesAmount => "increases_amount",
            ExactKind::DecreasesAmount => "decreases_amount",
            ExactKind::IncreasesPhosphoForm => "increases_phospho_form",
            ExactKind::DecreasesPhosphoForm => "decreases_phospho_form",
            ExactKind::IncreasesActivity => "increases_activity",
            ExactKind::DecreasesActivity => "decreases_activity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ExactKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn polarity(self) -> Polarity {
        match self {
            ExactKind::AddsModification
            | ExactKind::IncreasesAmount
            | ExactKind::IncreasesPhosphoForm
            | ExactKind::IncreasesActivity => Polarity::Increase,
            ExactKind::InhibitsModification
            | ExactKind::DecreasesAmount
            | ExactKind::DecreasesPhosphoForm
            | ExactKind::DecreasesActivity => Polarity::Decrease,
            ExactKind::Binds | ExactKind::Translocates => Polarity::Neutral,
        }
    }

    /// The same kind with the opposite polarity, if it has one.
    pub fn flipped(self) -> Option<Self> {
        Some(match self {
            ExactKind::AddsModification => ExactKind::InhibitsModification,
            ExactKind::InhibitsModification => ExactKind::AddsModification,
            ExactKind::IncreasesAmount => ExactKind::DecreasesAmount,
            ExactKind::DecreasesAmount => ExactKind::IncreasesAmount,
            ExactKind::IncreasesPhosphoForm => ExactKind::DecreasesPhosphoForm,
            ExactKind::DecreasesPhosphoForm => ExactKind::IncreasesPhosphoForm,
            ExactKind::IncreasesActivity => ExactKind::DecreasesActivity,
            ExactKind::DecreasesActivity => ExactKind::IncreasesActivity,
            ExactKind::Binds | ExactKind::Translocates => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub participant_a: ParticipantNode,
    pub participant_b: ParticipantNode,
    pub negative_information: bool,
}

impl Interaction {
    pub fn new(a: ParticipantNode, kind: InteractionKind, b: ParticipantNode) -> Self {
        Interaction { kind, participant_a: a, participant_b: b, negative_information: false }
    }

    /// "Increases/decreases amount" of a participant carrying a
    /// phosphorylation feature is read as a change in the phosphorylated form.
    pub fn exact_kind(&self) -> ExactKind {
        let phospho_b = self.participant_b.as_entity().is_some_and(EntityRef::has_phospho_feature);
        match &self.kind {
            InteractionKind::Binds { .. } => ExactKind::Binds,
            InteractionKind::AddsModification(_) => ExactKind::AddsModification,
            InteractionKind::InhibitsModification(_) => ExactKind::InhibitsModification,
            InteractionKind::Translocates { .. } => ExactKind::Translocates,
            InteractionKind::IncreasesAmount if phospho_b => ExactKind::IncreasesPhosphoForm,
            InteractionKind::DecreasesAmount if phospho_b => ExactKind::DecreasesPhosphoForm,
            InteractionKind::IncreasesAmount => ExactKind::IncreasesAmount,
            InteractionKind::DecreasesAmount => ExactKind::DecreasesAmount,
            InteractionKind::IncreasesActivity => ExactKind::IncreasesActivity,
            InteractionKind::DecreasesActivity => ExactKind::DecreasesActivity,
        }
    }

    pub fn describe(&self) -> String {
        let neg = if self.negative_information { "NOT " } else { "" };
        format!("{} {}{} {}", self.participant_a.label(), neg, self.kind.name(), self.participant_b.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceType {
    Human,
    Machine,
    HumanMachine,
}

impl SourceType {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceType::Human => "human",
            SourceType::Machine => "machine",
            SourceType::HumanMachine => "human_machine",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', ' ', '+'], "_").as_str() {
            "human" => Some(SourceType::Human),
            "machine" => Some(SourceType::Machine),
            "human_machine" | "machine_human" => Some(SourceType::HumanMachine),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelRelationKind {
    Extension,
    Specification,
    Corroboration,
    Conflicting,
}

impl ModelRelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelRelationKind::Extension => "extension",
            ModelRelationKind::Specification => "specification",
            ModelRelationKind::Corroboration => "corroboration",
            ModelRelationKind::Conflicting => "conflicting",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "extension" => Some(ModelRelationKind::Extension),
            "specification" => Some(ModelRelationKind::Specification),
            "corroboration" => Some(ModelRelationKind::Corroboration),
            "conflicting" => Some(ModelRelationKind::Conflicting),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRelation {
    pub kind: ModelRelationKind,
    pub model_element: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceSpan {
    pub text: String,
    pub section: Option<String>,
    pub figure: Option<String>,
}

impl EvidenceSpan {
    pub fn text(text: impl Into<String>) -> Self {
        EvidenceSpan { text: text.into(), section: None, figure: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexCard {
    pub id: CardId,
    pub paper_id: String,
    pub source: String,
    pub source_type: SourceType,
    pub timestamp: String,
    pub interaction: Interaction,
    pub model_relation: ModelRelation,
    pub evidence: Vec<EvidenceSpan>,
    /// Position in a ranked list of findings (1..=10).
    pub rank: Option<u8>,
    /// Fields not part of the core format, kept verbatim.
    pub extra: Map<String, Value>,
}

impl IndexCard {
    /// A minimal machine card around `interaction`; mostly useful for tests
    /// and fixtures.
    pub fn new(id: impl Into<String>, paper_id: impl Into<String>, interaction: Interaction) -> Self {
        IndexCard {
            id: CardId::new(id),
            paper_id: paper_id.into(),
            source: "unknown".into(),
            source_type: SourceType::Machine,
            timestamp: String::new(),
            interaction,
            model_relation: ModelRelation { kind: ModelRelationKind::Extension, model_element: None },
            evidence: vec![EvidenceSpan::text("(evidence)")],
            rank: None,
            extra: Map::new(),
        }
    }

    pub fn with_rank(mut self, rank: u8) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_evidence(mut self, evidence: Vec<EvidenceSpan>) -> Self {
        self.evidence = evidence;
        self
    }
}

/// A single problem found while reading a card document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("bad value for `{path}`: {value}")]
    BadEnumValue { path: String, value: String },
    #[error("`{path}`: {message}")]
    Constraint { path: String, message: String },
}

impl ValidationError {
    pub fn path(&self) -> &str {
        match self {
            ValidationError::MalformedDocument(_) => "",
            ValidationError::MissingField(p) => p,
            ValidationError::BadEnumValue { path, .. } | ValidationError::Constraint { path, .. } => path,
        }
    }
}

/// Every violation found in one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardErrors(pub Vec<ValidationError>);

impl fmt::Display for CardErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for CardErrors {}
