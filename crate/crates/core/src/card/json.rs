use serde_json::{json, Map, Value};

use super::*;

const CARD_KEYS: &[&str] = &[
    "card_id",
    "pmc_id",
    "source",
    "type_of_source",
    "timestamp",
    "relationship_to_model",
    "participant_a",
    "participant_b",
    "interaction_type",
    "negative_information",
    "evidence",
    "rank",
];

const ENTITY_KEYS: &[&str] = &["entity_text", "entity_type", "grounded_entity_id", "features", "in_model"];

/// Collects violations instead of stopping at the first one.
struct Reader {
    errors: Vec<ValidationError>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn value_repr(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Reader {
    fn missing(&mut self, path: String) {
        self.errors.push(ValidationError::MissingField(path));
    }

    fn bad(&mut self, path: String, value: impl Into<String>) {
        self.errors.push(ValidationError::BadEnumValue { path, value: value.into() });
    }

    fn constraint(&mut self, path: String, message: impl Into<String>) {
        self.errors.push(ValidationError::Constraint { path, message: message.into() });
    }

    fn required<'v>(&mut self, obj: &'v Map<String, Value>, path: &str, key: &str) -> Option<&'v Value> {
        match obj.get(key) {
            Some(v) => Some(v),
            None => {
                self.missing(join(path, key));
                None
            }
        }
    }

    fn string(&mut self, v: &Value, path: String) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            other => {
                self.bad(path, value_repr(other));
                None
            }
        }
    }

    fn required_string(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<String> {
        let v = self.required(obj, path, key)?;
        self.string(v, join(path, key))
    }

    fn optional_string(&mut self, obj: &Map<String, Value>, path: &str, key: &str) -> Option<String> {
        match obj.get(key) {
            None | Some(Value::Null) => None,
            Some(v) => self.string(v, join(path, key)),
        }
    }

    fn boolean(&mut self, v: &Value, path: String) -> Option<bool> {
        match v {
            Value::Bool(b) => Some(*b),
            Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
                "yes" | "true" => Some(true),
                "no" | "false" => Some(false),
                _ => {
                    self.bad(path, s.clone());
                    None
                }
            },
            other => {
                self.bad(path, value_repr(other));
                None
            }
        }
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v {
            Value::Object(o) => Some(o),
            other => {
                self.bad(path.to_string(), value_repr(other));
                None
            }
        }
    }

    fn card(&mut self, root: &Value, default_id: &str) -> Option<IndexCard> {
        let Some(obj) = root.as_object() else {
            self.errors.push(ValidationError::MalformedDocument("top level is not an object".into()));
            return None;
        };

        let id = match obj.get("card_id") {
            None | Some(Value::Null) => Some(default_id.to_string()),
            Some(v) => self.string(v, "card_id".into()),
        };
        let paper_id = self.required_string(obj, "", "pmc_id");
        let source = self.required_string(obj, "", "source");
        let source_type = self.required_string(obj, "", "type_of_source").and_then(|s| {
            let parsed = SourceType::parse(&s);
            if parsed.is_none() {
                self.bad("type_of_source".into(), s);
            }
            parsed
        });
        let timestamp = self.required_string(obj, "", "timestamp");
        let model_relation = self
            .required(obj, "", "relationship_to_model")
            .and_then(|v| self.model_relation(v, "relationship_to_model"));
        let interaction = self.interaction_fields(obj, "", false);
        let evidence = self.required(obj, "", "evidence").and_then(|v| self.evidence(v));
        let rank = match obj.get("rank") {
            None | Some(Value::Null) => Some(None),
            Some(v) => match v.as_u64() {
                Some(r @ 1..=10) => Some(Some(r as u8)),
                _ => {
                    self.bad("rank".into(), value_repr(v));
                    None
                }
            },
        };

        let extra: Map<String, Value> =
            obj.iter().filter(|(k, _)| !CARD_KEYS.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();

        Some(IndexCard {
            id: CardId(id?),
            paper_id: paper_id?,
            source: source?,
            source_type: source_type?,
            timestamp: timestamp?,
            interaction: interaction?,
            model_relation: model_relation?,
            evidence: evidence?,
            rank: rank?,
            extra,
        })
    }

    fn model_relation(&mut self, v: &Value, path: &str) -> Option<ModelRelation> {
        let obj = self.object(v, path)?;
        let kind = self.required_string(obj, path, "type").and_then(|s| {
            let parsed = ModelRelationKind::parse(&s);
            if parsed.is_none() {
                self.bad(join(path, "type"), s);
            }
            parsed
        });
        let element = self.optional_string(obj, path, "model_element");
        let kind = kind?;
        if kind == ModelRelationKind::Extension && element.is_some() {
            self.constraint(join(path, "model_element"), "an extension has no model element");
            return None;
        }
        Some(ModelRelation { kind, model_element: element })
    }

    fn evidence(&mut self, v: &Value) -> Option<Vec<EvidenceSpan>> {
        let Some(items) = v.as_array() else {
            self.bad("evidence".into(), value_repr(v));
            return None;
        };
        if items.is_empty() {
            self.missing("evidence".into());
            return None;
        }
        let mut spans = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let path = format!("evidence[{i}]");
            let span = match item {
                Value::String(s) => Some(EvidenceSpan::text(s.clone())),
                Value::Object(o) => {
                    let text = self.required_string(o, &path, "text");
                    let section = self.optional_string(o, &path, "section");
                    let figure = self.optional_string(o, &path, "figure");
                    text.map(|text| EvidenceSpan { text, section, figure })
                }
                other => {
                    self.bad(path.clone(), value_repr(other));
                    None
                }
            };
            match span {
                Some(s) if s.text.trim().is_empty() => {
                    self.constraint(format!("{path}.text"), "evidence text is empty");
                    ok = false;
                }
                Some(s) => spans.push(s),
                None => ok = false,
            }
        }
        ok.then_some(spans)
    }

    /// Reads `participant_a`, `participant_b`, `interaction_type` and
    /// `negative_information` from `obj`.
    fn interaction_fields(&mut self, obj: &Map<String, Value>, path: &str, nested: bool) -> Option<Interaction> {
        let kind = self
            .required(obj, path, "interaction_type")
            .and_then(|v| self.interaction_kind(v, &join(path, "interaction_type")));
        let a = self
            .required(obj, path, "participant_a")
            .and_then(|v| self.participant(v, &join(path, "participant_a"), nested));
        let b_path = join(path, "participant_b");
        let b = self.required(obj, path, "participant_b").and_then(|v| self.participant(v, &b_path, nested));
        let b = match b {
            Some(ParticipantNode::Blank) => {
                self.constraint(b_path, "participant B cannot be blank");
                None
            }
            other => other,
        };
        let negative = match obj.get("negative_information") {
            None | Some(Value::Null) => Some(false),
            Some(v) => self.boolean(v, join(path, "negative_information")),
        };
        Some(Interaction { kind: kind?, participant_a: a?, participant_b: b?, negative_information: negative? })
    }

    fn interaction_kind(&mut self, v: &Value, path: &str) -> Option<InteractionKind> {
        let (name, obj) = match v {
            Value::String(s) => (s.clone(), None),
            Value::Object(o) => (self.required_string(o, path, "type")?, Some(o)),
            other => {
                self.bad(path.to_string(), value_repr(other));
                return None;
            }
        };
        let empty = Map::new();
        let obj = obj.unwrap_or(&empty);
        let normalized = name.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        let kind = match normalized.as_str() {
            "binds" => InteractionKind::Binds { site: self.optional_string(obj, path, "binding_site") },
            "adds_modification" => InteractionKind::AddsModification(self.modification(obj, path)?),
            "inhibits_modification" => InteractionKind::InhibitsModification(self.modification(obj, path)?),
            "translocates" => {
                let from = self.optional_string(obj, path, "from");
                let to = self.optional_string(obj, path, "to");
                if from.is_none() && to.is_none() {
                    self.missing(join(path, "from"));
                    return None;
                }
                InteractionKind::Translocates { from, to }
            }
            "increases" | "increases_amount" => InteractionKind::IncreasesAmount,
            "decreases" | "decreases_amount" => InteractionKind::DecreasesAmount,
            "increases_activity" => InteractionKind::IncreasesActivity,
            "decreases_activity" => InteractionKind::DecreasesActivity,
            _ => {
                self.bad(join(path, "type"), name);
                return None;
            }
        };
        Some(kind)
    }

    fn modification(&mut self, obj: &Map<String, Value>, path: &str) -> Option<Feature> {
        match obj.get("modification") {
            None | Some(Value::Null) => Some(Feature::default()),
            Some(v) => self.feature(v, &join(path, "modification")),
        }
    }

    fn feature(&mut self, v: &Value, path: &str) -> Option<Feature> {
        let obj = self.object(v, path)?;
        let modification = self
            .optional_string(obj, path, "modification")
            .or_else(|| self.optional_string(obj, path, "type"))
            .map(|m| m.trim().to_ascii_lowercase());
        let sites = match obj.get("position") {
            None | Some(Value::Null) => Some(Vec::new()),
            Some(v) => self.sites(v, &join(path, "position")),
        };
        let isoform = self.optional_string(obj, path, "isoform");
        let mutant = self.optional_string(obj, path, "mutant");
        Some(Feature { modification, sites: sites?, isoform, mutant })
    }

    fn sites(&mut self, v: &Value, path: &str) -> Option<Vec<Site>> {
        let mut out = Vec::new();
        let mut ok = true;
        let mut push = |r: &mut Reader, item: &Value, path: String| match item {
            Value::Number(n) => match n.as_u64() {
                Some(p) if p >= 1 && p <= u32::MAX as u64 => {
                    out.push(Site::Residue { residue: None, position: p as u32 })
                }
                _ => {
                    r.bad(path, n.to_string());
                    ok = false;
                }
            },
            Value::String(s) => {
                for piece in s.split([';', ',', '/']).map(str::trim).filter(|p| !p.is_empty()) {
                    match parse_site(piece) {
                        Ok(site) => out.push(site),
                        Err(()) => {
                            r.bad(path.clone(), piece.to_string());
                            ok = false;
                        }
                    }
                }
            }
            other => {
                r.bad(path, value_repr(other));
                ok = false;
            }
        };
        match v {
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    push(self, item, format!("{path}[{i}]"));
                }
            }
            single => push(self, single, path.to_string()),
        }
        ok.then_some(out)
    }

    fn participant(&mut self, v: &Value, path: &str, nested: bool) -> Option<ParticipantNode> {
        let obj = match v {
            Value::Null => return Some(ParticipantNode::Blank),
            Value::Object(o) => o,
            other => {
                self.bad(path.to_string(), value_repr(other));
                return None;
            }
        };
        let ty = obj.get("entity_type").and_then(Value::as_str).map(|s| s.trim().to_ascii_lowercase());
        match ty.as_deref() {
            Some("blank") => Some(ParticipantNode::Blank),
            Some("generic") => {
                let label = self.required_string(obj, path, "entity_text")?;
                Some(ParticipantNode::Generic(label))
            }
            Some("complex") => {
                let members = self.required(obj, path, "entities")?;
                let Some(items) = members.as_array() else {
                    self.bad(join(path, "entities"), value_repr(members));
                    return None;
                };
                if items.len() < 2 {
                    self.constraint(join(path, "entities"), "a complex needs at least two members");
                    return None;
                }
                let mut entities = Vec::with_capacity(items.len());
                let mut ok = true;
                for (i, item) in items.iter().enumerate() {
                    let p = format!("{path}.entities[{i}]");
                    match self.object(item, &p).and_then(|o| self.entity(o, &p)) {
                        Some(e) => entities.push(e),
                        None => ok = false,
                    }
                }
                ok.then_some(ParticipantNode::Complex(entities))
            }
            Some("interaction") => {
                if nested {
                    self.constraint(path.to_string(), "embedded interactions nest at most one level");
                    return None;
                }
                let inner_path = join(path, "interaction");
                let inner = self.required(obj, path, "interaction")?;
                let inner = self.object(inner, &inner_path)?;
                let interaction = self.interaction_fields(inner, &inner_path, true)?;
                Some(ParticipantNode::Embedded(Box::new(interaction)))
            }
            _ => self.entity(obj, path).map(ParticipantNode::Entity),
        }
    }

    fn entity(&mut self, obj: &Map<String, Value>, path: &str) -> Option<EntityRef> {
        let text = self.required_string(obj, path, "entity_text");
        let entity_type = self.required_string(obj, path, "entity_type").and_then(|s| {
            let parsed = EntityType::parse(&s);
            if parsed.is_none() {
                self.bad(join(path, "entity_type"), s);
            }
            parsed
        });
        let grounding = match obj.get("grounded_entity_id") {
            None | Some(Value::Null) => Some(None),
            Some(v) => self.string(v, join(path, "grounded_entity_id")).and_then(|s| {
                if s.trim().is_empty() {
                    return Some(None);
                }
                match Grounding::parse(&s) {
                    Some(g) => Some(Some(g)),
                    None => {
                        self.bad(join(path, "grounded_entity_id"), s);
                        None
                    }
                }
            }),
        };
        let features = match obj.get("features") {
            None | Some(Value::Null) => Some(Vec::new()),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                let mut ok = true;
                for (i, item) in items.iter().enumerate() {
                    match self.feature(item, &format!("{path}.features[{i}]")) {
                        Some(f) => out.push(f),
                        None => ok = false,
                    }
                }
                ok.then_some(out)
            }
            Some(other) => {
                self.bad(join(path, "features"), value_repr(other));
                None
            }
        };
        let in_model = match obj.get("in_model") {
            None | Some(Value::Null) => Some(false),
            Some(v) => self.boolean(v, join(path, "in_model")),
        };
        let extra = obj
            .iter()
            .filter(|(k, _)| !ENTITY_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Some(EntityRef {
            text: text?,
            entity_type: entity_type?,
            grounding: grounding?,
            features: features?,
            in_model: in_model?,
            extra,
        })
    }
}

const THREE_LETTER: &[(&str, char)] =
    &[("ser", 'S'), ("thr", 'T'), ("tyr", 'Y'), ("his", 'H'), ("lys", 'K'), ("arg", 'R'), ("asp", 'D'), ("cys", 'C')];

/// `Y63`, `63`, `Tyr63`, `Ser-473` read as residue + position. Anything else
/// is opaque. A position of zero is an error.
fn parse_site(piece: &str) -> Result<Site, ()> {
    let digits_at = piece.find(|c: char| c.is_ascii_digit());
    let residue_part = digits_at.map(|i| &piece[..i]).unwrap_or(piece);
    let number_part = digits_at.map(|i| &piece[i..]).unwrap_or("");
    if number_part.is_empty() || !number_part.chars().all(|c| c.is_ascii_digit()) {
        return Ok(Site::Opaque(piece.to_string()));
    }
    let residue_part = residue_part.trim_end_matches('-');
    let residue = match residue_part.len() {
        0 => None,
        1 if residue_part.chars().all(|c| c.is_ascii_uppercase()) => residue_part.chars().next(),
        3 => match THREE_LETTER.iter().find(|(name, _)| name.eq_ignore_ascii_case(residue_part)) {
            Some((_, c)) => Some(*c),
            None => return Ok(Site::Opaque(piece.to_string())),
        },
        _ => return Ok(Site::Opaque(piece.to_string())),
    };
    match number_part.parse::<u32>() {
        Ok(0) => Err(()),
        Ok(position) => Ok(Site::Residue { residue, position }),
        Err(_) => Ok(Site::Opaque(piece.to_string())),
    }
}

/// Parses one card document. `default_id` is used when the document carries
/// no `card_id`.
pub fn parse_card_value(root: &Value, default_id: &str) -> Result<IndexCard, CardErrors> {
    let mut reader = Reader { errors: Vec::new() };
    let card = reader.card(root, default_id);
    match card {
        Some(card) if reader.errors.is_empty() => Ok(card),
        _ => {
            if reader.errors.is_empty() {
                reader.errors.push(ValidationError::MalformedDocument("unreadable card".into()));
            }
            Err(CardErrors(reader.errors))
        }
    }
}

/// Parses a card from JSON text. A document without `card_id` gets the id
/// `card`; [`load_submission`](super::load_submission) assigns path-derived ids.
pub fn parse_card(raw: &str) -> Result<IndexCard, CardErrors> {
    let root: Value =
        serde_json::from_str(raw).map_err(|e| CardErrors(vec![ValidationError::MalformedDocument(e.to_string())]))?;
    parse_card_value(&root, "card")
}

/// Parses a bare interaction object (the participant/interaction-type fields
/// of a card without the metadata).
pub fn parse_interaction_value(root: &Value) -> Result<Interaction, CardErrors> {
    let mut reader = Reader { errors: Vec::new() };
    let interaction = match root.as_object() {
        Some(obj) => reader.interaction_fields(obj, "", false),
        None => {
            reader.errors.push(ValidationError::MalformedDocument("interaction is not an object".into()));
            None
        }
    };
    match interaction {
        Some(i) if reader.errors.is_empty() => Ok(i),
        _ => Err(CardErrors(reader.errors)),
    }
}

fn feature_to_json(f: &Feature) -> Value {
    let mut o = Map::new();
    if let Some(m) = &f.modification {
        o.insert("modification".into(), json!(m));
    }
    if !f.sites.is_empty() {
        o.insert("position".into(), Value::Array(f.sites.iter().map(|s| json!(s.to_string())).collect()));
    }
    if let Some(i) = &f.isoform {
        o.insert("isoform".into(), json!(i));
    }
    if let Some(m) = &f.mutant {
        o.insert("mutant".into(), json!(m));
    }
    Value::Object(o)
}

fn entity_to_json(e: &EntityRef) -> Value {
    let mut o = e.extra.clone();
    o.insert("entity_text".into(), json!(e.text));
    o.insert("entity_type".into(), json!(e.entity_type.as_str()));
    if let Some(g) = &e.grounding {
        o.insert("grounded_entity_id".into(), json!(g.to_string()));
    }
    if !e.features.is_empty() {
        o.insert("features".into(), Value::Array(e.features.iter().map(feature_to_json).collect()));
    }
    o.insert("in_model".into(), json!(e.in_model));
    Value::Object(o)
}

fn participant_to_json(p: &ParticipantNode) -> Value {
    match p {
        ParticipantNode::Entity(e) => entity_to_json(e),
        ParticipantNode::Complex(es) => json!({
            "entity_type": "complex",
            "entities": es.iter().map(entity_to_json).collect::<Vec<_>>(),
        }),
        ParticipantNode::Embedded(i) => json!({
            "entity_type": "interaction",
            "interaction": interaction_to_json(i),
        }),
        ParticipantNode::Generic(label) => json!({ "entity_type": "generic", "entity_text": label }),
        ParticipantNode::Blank => Value::Null,
    }
}

fn kind_to_json(k: &InteractionKind) -> Value {
    let mut o = Map::new();
    o.insert("type".into(), json!(k.name()));
    match k {
        InteractionKind::Binds { site: Some(s) } => {
            o.insert("binding_site".into(), json!(s));
        }
        InteractionKind::AddsModification(f) | InteractionKind::InhibitsModification(f) => {
            o.insert("modification".into(), feature_to_json(f));
        }
        InteractionKind::Translocates { from, to } => {
            if let Some(f) = from {
                o.insert("from".into(), json!(f));
            }
            if let Some(t) = to {
                o.insert("to".into(), json!(t));
            }
        }
        _ => {}
    }
    Value::Object(o)
}

/// The interaction fields as a JSON object.
pub fn interaction_to_json(i: &Interaction) -> Value {
    let mut o = Map::new();
    write_interaction(&mut o, i);
    Value::Object(o)
}

fn write_interaction(o: &mut Map<String, Value>, i: &Interaction) {
    o.insert("participant_a".into(), participant_to_json(&i.participant_a));
    o.insert("participant_b".into(), participant_to_json(&i.participant_b));
    o.insert("interaction_type".into(), kind_to_json(&i.kind));
    o.insert("negative_information".into(), json!(i.negative_information));
}

/// Serializes a card into the document format read by [`parse_card`].
pub fn card_to_json(card: &IndexCard) -> Value {
    let mut o = card.extra.clone();
    o.insert("card_id".into(), json!(card.id.as_str()));
    o.insert("pmc_id".into(), json!(card.paper_id));
    o.insert("source".into(), json!(card.source));
    o.insert("type_of_source".into(), json!(card.source_type.as_str()));
    o.insert("timestamp".into(), json!(card.timestamp));
    let mut rel = Map::new();
    rel.insert("type".into(), json!(card.model_relation.kind.as_str()));
    if let Some(el) = &card.model_relation.model_element {
        rel.insert("model_element".into(), json!(el));
    }
    o.insert("relationship_to_model".into(), Value::Object(rel));
    write_interaction(&mut o, &card.interaction);
    let evidence = card
        .evidence
        .iter()
        .map(|e| {
            let mut span = Map::new();
            span.insert("text".into(), json!(e.text));
            if let Some(s) = &e.section {
                span.insert("section".into(), json!(s));
            }
            if let Some(f) = &e.figure {
                span.insert("figure".into(), json!(f));
            }
            Value::Object(span)
        })
        .collect();
    o.insert("evidence".into(), Value::Array(evidence));
    if let Some(r) = card.rank {
        o.insert("rank".into(), json!(r));
    }
    Value::Object(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jak3_card() -> Value {
        json!({
            "pmc_id": "PMC3902907",
            "source": "curator-3",
            "type_of_source": "human",
            "timestamp": "2015-06-01T12:00:00Z",
            "relationship_to_model": {"type": "corroboration", "model_element": "R123"},
            "participant_a": {
                "entity_text": "JAK3", "entity_type": "protein",
                "grounded_entity_id": "UniProt:JAK3_HUMAN", "in_model": "Yes"
            },
            "participant_b": {
                "entity_text": "HuR", "entity_type": "protein",
                "grounded_entity_id": "UniProt:ELAV1_HUMAN", "in_model": true
            },
            "interaction_type": {
                "type": "adds_modification",
                "modification": {"modification": "phosphorylation", "position": "63; 68; 200"}
            },
            "negative_information": "No",
            "evidence": ["As identified by mass spec analysis, JAK3 phosphorylates three HuR residues (Y63, Y68, Y200)..."]
        })
    }

    #[test]
    fn parses_the_jak3_example_card() {
        let card = parse_card_value(&jak3_card(), "x").unwrap();
        assert_eq!(card.paper_id, "PMC3902907");
        assert_eq!(card.model_relation.kind, ModelRelationKind::Corroboration);
        let InteractionKind::AddsModification(f) = &card.interaction.kind else { panic!() };
        assert!(f.is_phosphorylation());
        assert_eq!(
            f.sites,
            vec![
                Site::Residue { residue: None, position: 63 },
                Site::Residue { residue: None, position: 68 },
                Site::Residue { residue: None, position: 200 },
            ]
        );
        let a = card.interaction.participant_a.as_entity().unwrap();
        assert_eq!(a.grounding, Some(Grounding::new(Namespace::UniProt, "JAK3_HUMAN")));
        assert!(a.in_model);
        assert!(!card.interaction.negative_information);
    }

    #[test]
    fn empty_evidence_is_missing_field() {
        let mut doc = jak3_card();
        doc["evidence"] = json!([]);
        let errs = parse_card_value(&doc, "x").unwrap_err();
        assert_eq!(errs.0, vec![ValidationError::MissingField("evidence".into())]);
    }

    #[test]
    fn rank_out_of_range() {
        let mut doc = jak3_card();
        doc["rank"] = json!(11);
        let errs = parse_card_value(&doc, "x").unwrap_err();
        assert_eq!(errs.0, vec![ValidationError::BadEnumValue { path: "rank".into(), value: "11".into() }]);
    }

    #[test]
    fn reports_every_violation() {
        let mut doc = jak3_card();
        doc["rank"] = json!(0);
        doc["type_of_source"] = json!("robot");
        doc.as_object_mut().unwrap().remove("timestamp");
        doc["participant_b"] = Value::Null;
        let errs = parse_card_value(&doc, "x").unwrap_err().0;
        assert_eq!(errs.len(), 4, "{errs:?}");
        assert!(errs.contains(&ValidationError::MissingField("timestamp".into())));
        assert!(errs.iter().any(|e| e.path() == "participant_b"));
    }

    #[test]
    fn extension_with_model_element_rejected() {
        let mut doc = jak3_card();
        doc["relationship_to_model"] = json!({"type": "extension", "model_element": "R1"});
        let errs = parse_card_value(&doc, "x").unwrap_err().0;
        assert_eq!(errs[0].path(), "relationship_to_model.model_element");
    }

    #[test]
    fn site_syntax() {
        assert_eq!(parse_site("Y63"), Ok(Site::Residue { residue: Some('Y'), position: 63 }));
        assert_eq!(parse_site("Ser-473"), Ok(Site::Residue { residue: Some('S'), position: 473 }));
        assert_eq!(parse_site("C-terminal tail"), Ok(Site::Opaque("C-terminal tail".into())));
        assert_eq!(parse_site("pS473"), Ok(Site::Opaque("pS473".into())));
        assert_eq!(parse_site("Y0"), Err(()));
    }

    #[test]
    fn zero_position_rejected() {
        let mut doc = jak3_card();
        doc["interaction_type"]["modification"]["position"] = json!(0);
        let errs = parse_card_value(&doc, "x").unwrap_err().0;
        assert_eq!(errs[0].path(), "interaction_type.modification.position");
    }

    #[test]
    fn unknown_fields_survive() {
        let mut doc = jak3_card();
        doc["team_confidence"] = json!(0.8);
        doc["participant_a"]["family_members"] = json!(["JAK1", "JAK3"]);
        let card = parse_card_value(&doc, "x").unwrap();
        let out = card_to_json(&card);
        assert_eq!(out["team_confidence"], json!(0.8));
        assert_eq!(out["participant_a"]["family_members"], json!(["JAK1", "JAK3"]));
        assert_eq!(parse_card_value(&out, "y").unwrap(), card);
    }

    #[test]
    fn nested_embedding_rejected() {
        let mut doc = jak3_card();
        doc["participant_b"] = json!({
            "entity_type": "interaction",
            "interaction": {
                "participant_a": {"entity_text": "B", "entity_type": "protein"},
                "interaction_type": "increases",
                "participant_b": {
                    "entity_type": "interaction",
                    "interaction": {
                        "participant_a": {"entity_text": "C", "entity_type": "protein"},
                        "interaction_type": "binds",
                        "participant_b": {"entity_text": "D", "entity_type": "protein"}
                    }
                }
            }
        });
        let errs = parse_card_value(&doc, "x").unwrap_err().0;
        assert_eq!(errs[0].path(), "participant_b.interaction.participant_b");
    }

    #[test]
    fn translocation_needs_a_location() {
        let mut doc = jak3_card();
        doc["interaction_type"] = json!({"type": "translocates"});
        let errs = parse_card_value(&doc, "x").unwrap_err().0;
        assert_eq!(errs, vec![ValidationError::MissingField("interaction_type.from".into())]);
    }

    #[test]
    fn malformed_json() {
        let errs = parse_card("{not json").unwrap_err().0;
        assert!(matches!(errs[0], ValidationError::MalformedDocument(_)));
    }
}
