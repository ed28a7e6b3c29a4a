mod common;

use serde_json::json;

use common::{fixture, model_json};
use mecheval::card::{card_to_json, load_submission, parse_card, parse_card_value, Condition, ValidationError};
use mecheval::model_graph::{load_model, MechModel, ModelError, ModelViolation, Sign};
use mecheval::refset::{load_refset, refset_from_json, refset_to_json, RefCategory};

#[test]
fn every_fixture_card_round_trips_through_json() {
    let sub = load_submission(&fixture("reference_overlap/sub2")).unwrap();
    assert_eq!(sub.condition, Condition::MachineOnly);
    for c in sub.all_cards() {
        let again = parse_card_value(&card_to_json(c), c.id.as_str()).unwrap();
        assert_eq!(&again, c);
    }
}

#[test]
fn card_errors_are_collected_not_short_circuited() {
    let raw = json!({
        "card_id": "x",
        "pmc_id": "p1",
        "participant_a": null,
        "interaction_type": "teleports",
        "negative_information": "sometimes",
    });
    let errors = parse_card(&raw.to_string()).unwrap_err().0;
    assert!(errors.len() >= 3, "{errors:?}");
    assert!(errors.iter().any(|e| matches!(e, ValidationError::MissingField(f) if f == "participant_b")));
    assert!(errors.iter().any(|e| e.path().starts_with("interaction_type")), "{errors:?}");
}

#[test]
fn refset_fixture_has_the_expected_categories_and_round_trips() {
    let refs = load_refset(&fixture("reference_overlap/refset.json")).unwrap();
    let direct = refs.iter().filter(|r| r.category == RefCategory::DirectPhosphoBind).count();
    assert_eq!((refs.len(), direct), (50, 29));
    let again = refset_from_json(&refset_to_json(&refs)).unwrap();
    assert_eq!(again, refs);
}

#[test]
fn model_fixtures_load_and_round_trip() {
    for name in ["mtor_model.json", "branching_model.json", "knockout_model.json"] {
        let m = load_model(&fixture(&format!("explanations/{name}"))).unwrap();
        let again = MechModel::from_json(&m.to_json()).unwrap();
        assert_eq!(again.to_json(), m.to_json(), "{name}");
    }
}

#[test]
fn model_violations_are_all_reported() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&model_json("m", 2, &[(0, 1, "increases_activity", None)])).unwrap();
    doc["interactions"][0]["target"] = json!("N9");
    doc["interactions"][0]["provenance"] = json!([]);
    let Err(ModelError::Invalid(violations)) = MechModel::from_json(&doc.to_string()) else { panic!("model accepted") };
    assert!(violations.iter().any(|v| matches!(v, ModelViolation::DanglingEndpoint { .. })), "{violations:?}");
    assert!(violations.iter().any(|v| matches!(v, ModelViolation::MissingProvenance(_))), "{violations:?}");
}

#[test]
fn stated_signs_must_agree_with_kind() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&model_json("m", 2, &[(0, 1, "decreases_activity", None)])).unwrap();
    doc["interactions"][0]["sign"] = json!(Sign::Positive);
    let Err(ModelError::Invalid(violations)) = MechModel::from_json(&doc.to_string()) else { panic!("model accepted") };
    assert!(matches!(violations[0], ModelViolation::SignMismatch { .. }), "{violations:?}");
}
