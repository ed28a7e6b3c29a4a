mod common;

use proptest::prelude::*;
use serde_json::{json, Value};

use common::{card, protein};
use mecheval::card::{card_signature, parse_interaction_value, CardId, IndexCard, Interaction};
use mecheval::judgments::{Dialect, Judge, Judgment, JudgmentStore, Subject, Verdict};
use mecheval::matcher::{dedup_submission, match_interactions, EquivalenceTable, MatchClass};
use mecheval::metrics::{format_ratio, precision, round_percent, Ratio, VerdictCounts};
use mecheval::refset::{merge_consensus, CuratedInteraction, CuratorSet};

const NAMES: [&str; 5] = ["EGFR", "GRB2", "SOS1", "KRAS", "BRAF"];

fn kind_value(k: usize) -> Value {
    match k {
        0 => json!("binds"),
        1 => json!({ "type": "adds_modification", "modification": { "modification": "phosphorylation" } }),
        2 => json!({ "type": "adds_modification", "modification": { "modification": "methylation" } }),
        3 => json!("increases_activity"),
        4 => json!("decreases_activity"),
        _ => json!("increases_amount"),
    }
}

fn interaction() -> impl Strategy<Value = Interaction> {
    (proptest::option::weighted(0.85, 0..NAMES.len()), 0..NAMES.len(), 0..6usize, proptest::bool::weighted(0.1))
        .prop_map(|(a, b, k, negative)| {
            let v = json!({
                "participant_a": a.map_or(Value::Null, |a| protein(NAMES[a])),
                "participant_b": protein(NAMES[b]),
                "interaction_type": kind_value(k),
                "negative_information": negative,
            });
            parse_interaction_value(&v).unwrap()
        })
}

fn cards() -> impl Strategy<Value = Vec<IndexCard>> {
    prop::collection::vec((interaction(), 0..3usize), 0..30).prop_map(|items| {
        items
            .into_iter()
            .enumerate()
            .map(|(n, (i, paper))| {
                let mut c =
                    card(&format!("c{n}"), &format!("p{paper}"), Value::Null, json!("binds"), protein("X"), None);
                c.interaction = i;
                c
            })
            .collect()
    })
}

fn curator_sets() -> impl Strategy<Value = Vec<CuratorSet>> {
    prop::collection::vec(prop::collection::vec(interaction(), 0..6), 2..5).prop_map(|sets| {
        sets.into_iter()
            .enumerate()
            .map(|(k, items)| CuratorSet {
                curator: format!("curator{k}"),
                interactions: items
                    .into_iter()
                    .map(|interaction| CuratedInteraction { paper_id: "p1".into(), interaction })
                    .collect(),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn every_interaction_fully_matches_itself(x in interaction()) {
        let table = EquivalenceTable::default();
        prop_assert_eq!(match_interactions(&x, &x, &table).0, MatchClass::Full);
    }

    #[test]
    fn full_matches_are_symmetric(x in interaction(), y in interaction()) {
        let table = EquivalenceTable::default();
        let xy = match_interactions(&x, &y, &table).0 == MatchClass::Full;
        let yx = match_interactions(&y, &x, &table).0 == MatchClass::Full;
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn dedup_is_idempotent_and_partitions(cs in cards()) {
        let (unique, dups) = dedup_submission(&cs);
        prop_assert_eq!(unique.len() + dups.len(), cs.len());
        let (again, none) = dedup_submission(&unique);
        prop_assert_eq!(&again, &unique);
        prop_assert!(none.is_empty());
        let keys: std::collections::BTreeSet<_> = unique.iter().map(|c| (c.paper_id.clone(), card_signature(c))).collect();
        prop_assert_eq!(keys.len(), unique.len());
    }

    #[test]
    fn raising_agreement_never_grows_consensus(sets in curator_sets()) {
        let table = EquivalenceTable::default();
        let mut previous = usize::MAX;
        for k in 1..=sets.len() {
            let n = merge_consensus(&sets, k, &table).unwrap().len();
            prop_assert!(n <= previous);
            previous = n;
        }
    }

    #[test]
    fn precision_lies_in_the_unit_interval(c in 0u64..500, i in 0u64..500, s in 0u64..500) {
        let counts = VerdictCounts::new(c, i, s);
        match precision(&counts) {
            Ok(p) => prop_assert!(p >= Ratio::from_integer(0) && p <= Ratio::from_integer(1)),
            Err(_) => prop_assert_eq!(c + i, 0),
        }
    }

    #[test]
    fn percent_rounding_matches_float_half_up(n in 0u64..10_000, d in 1u64..10_000) {
        let exact = 100.0 * n as f64 / d as f64;
        let got = round_percent(n, d).unwrap() as f64;
        prop_assert!((got - exact).abs() <= 0.5 + 1e-9);
        if (exact - exact.floor() - 0.5).abs() < 1e-12 {
            prop_assert_eq!(got, exact.ceil());
        }
    }

    #[test]
    fn formatted_ratios_parse_back_within_half_a_unit(n in 0i64..10_000, d in 1i64..10_000, places in 0u32..5) {
        let text = format_ratio(Ratio::new(n, d), places);
        let parsed: f64 = text.parse().unwrap();
        let bound = 0.5 * 10f64.powi(-(places as i32)) + 1e-9;
        prop_assert!((parsed - n as f64 / d as f64).abs() <= bound, "{} vs {}/{}", text, n, d);
    }

    #[test]
    fn judgment_log_replays_to_the_same_snapshot(verdicts in prop::collection::vec((0..4usize, any::<bool>()), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("judgments.jsonl");
        let ids: Vec<CardId> = (0..4).map(|k| CardId::new(format!("c{k}"))).collect();
        let store = JudgmentStore::open(&path, ids.clone()).unwrap();
        for (k, ok) in &verdicts {
            let v = if *ok { Verdict::LargelyCorrect } else { Verdict::Incorrect };
            store.record_latest(Judgment::new(Subject::Card(ids[*k].clone()), v, Judge::Rule, Dialect::PhaseII)).unwrap();
        }
        let reopened = JudgmentStore::open(&path, ids).unwrap();
        prop_assert_eq!(reopened.snapshot(), store.snapshot());
        prop_assert_eq!(reopened.log().len(), verdicts.len());
    }
}
