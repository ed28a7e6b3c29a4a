mod common;

use common::fixture;
use mecheval::harness::{render_csv, score_offline, Phase, Report, RunConfig};
use mecheval::metrics::ErrorKind;

fn gold_report(phase: Phase) -> Report {
    let mut config = RunConfig::new("gold", phase);
    config.submissions = ["human", "system_a", "system_b", "system_c", "system_d"]
        .iter()
        .map(|t| fixture(&format!("gold_matching/{t}")))
        .collect();
    config.gold = Some(fixture("gold_matching/gold"));
    score_offline(&config, None).unwrap()
}

fn rate(report: &Report, team: &str, kind: ErrorKind) -> (u64, u64) {
    let r = &report.gold_comparison.as_ref().unwrap().error_rates[team][&kind];
    (r.errors, r.scored)
}

#[test]
fn participant_and_type_error_rates_per_system() {
    let r = gold_report(Phase::I);
    let want = [
        ("system_a", (7, 20), (1, 20)),
        ("system_b", (6, 14), (2, 14)),
        ("system_c", (6, 9), (3, 9)),
        ("system_d", (2, 5), (0, 5)),
    ];
    for (team, participant, kind) in want {
        assert_eq!(rate(&r, team, ErrorKind::Participant), participant, "{team}");
        assert_eq!(rate(&r, team, ErrorKind::InteractionType), kind, "{team}");
    }
}

#[test]
fn grounding_and_in_model_rates_skip_blank_gold_participants() {
    let r = gold_report(Phase::I);
    // Gold sentence 54 has a blank participant A, so system A scores 32 slots.
    assert_eq!(rate(&r, "system_a", ErrorKind::Grounding), (2, 32));
    assert_eq!(rate(&r, "system_a", ErrorKind::InModel), (0, 32));
    assert_eq!(rate(&r, "system_b", ErrorKind::Grounding), (6, 22));
    assert_eq!(rate(&r, "system_b", ErrorKind::InModel), (5, 22));
    assert_eq!(rate(&r, "system_c", ErrorKind::Grounding), (1, 12));
    assert_eq!(rate(&r, "system_c", ErrorKind::InModel), (1, 12));
    assert_eq!(rate(&r, "system_d", ErrorKind::Grounding), (0, 8));
}

#[test]
fn rates_render_to_two_places() {
    let r = gold_report(Phase::I);
    let g = r.gold_comparison.as_ref().unwrap();
    assert_eq!(g.error_rates["system_c"][&ErrorKind::Participant].rate, "0.67");
    assert_eq!(g.error_rates["system_b"][&ErrorKind::Grounding].rate, "0.27");
}

#[test]
fn match_totals_per_system() {
    let g = gold_report(Phase::I).gold_comparison.unwrap();
    assert_eq!(g.full_matches["system_a"], 13);
    assert_eq!(g.partial_matches["system_a"], 7);
    assert_eq!(g.full_matches["human"], 28);
    assert_eq!(g.partial_matches["system_d"], 2);
}

#[test]
fn phase_two_accepts_gold_without_a_refset() {
    let r = gold_report(Phase::II);
    assert!(r.gold_comparison.is_some());
    assert!(r.submissions.iter().all(|s| s.overlap.is_none()));
}

#[test]
fn csv_tables_include_error_rates_and_grid() {
    let tables = render_csv(&gold_report(Phase::I));
    let names: Vec<&str> = tables.iter().map(|(n, _)| *n).collect();
    assert!(names.contains(&"error_rates") && names.contains(&"gold_matches"), "{names:?}");
    let (_, rates) = tables.iter().find(|(n, _)| *n == "error_rates").unwrap();
    assert!(rates.lines().any(|l| l == "system_a,participant,0.35,20"), "{rates}");
}
