#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::{json, Value};

use mecheval::card::{parse_card_value, IndexCard};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn protein(text: &str) -> Value {
    json!({ "entity_text": text, "entity_type": "protein", "grounded_entity_id": format!("HGNC:{}", text.to_uppercase()) })
}

/// A minimal valid card; `a` may be `Value::Null` for a blank participant.
pub fn card(id: &str, paper: &str, a: Value, kind: Value, b: Value, rank: Option<u8>) -> IndexCard {
    let mut v = json!({
        "card_id": id,
        "pmc_id": paper,
        "source": "test",
        "type_of_source": "machine",
        "timestamp": "2016-01-01T00:00:00Z",
        "relationship_to_model": { "type": "extension" },
        "participant_a": a,
        "participant_b": b,
        "interaction_type": kind,
        "evidence": ["Evidence text."],
    });
    if let Some(r) = rank {
        v["rank"] = json!(r);
    }
    parse_card_value(&v, id).expect("test card is valid")
}

pub fn phospho() -> Value {
    json!({ "type": "adds_modification", "modification": { "modification": "phosphorylation" } })
}

/// A model over nodes `N0..Nn` from `(source, target, kind, effect)`
/// edges, each with database provenance.
pub fn model_json(id: &str, nodes: usize, edges: &[(usize, usize, &str, Option<&str>)]) -> String {
    let entities: Vec<Value> = (0..nodes)
        .map(|i| json!({ "id": format!("N{i}"), "name": format!("node {i}"), "roles": ["kinase"] }))
        .collect();
    let interactions: Vec<Value> = edges
        .iter()
        .enumerate()
        .map(|(k, (s, t, kind, effect))| {
            let mut e = json!({
                "id": format!("e{k}"),
                "source": format!("N{s}"),
                "target": format!("N{t}"),
                "kind": kind,
                "provenance": [{ "type": "curated_database", "db": "test", "record": format!("r{k}") }],
            });
            if kind.contains("modification") {
                e["modification"] = json!("phosphorylation");
            }
            if let Some(effect) = effect {
                e["effect"] = json!(effect);
            }
            e
        })
        .collect();
    json!({ "id": id, "entities": entities, "interactions": interactions, "contexts": [] }).to_string()
}
