use super::pipeline::{RatioOut, Report};
use crate::explanation_checker::GridCell;

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn opt(r: &Option<RatioOut>) -> String {
    r.as_ref().map(|r| r.value.clone()).unwrap_or_default()
}

fn table(header: &[String], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn snake<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// CSV tables for a report, each as `(name, contents)`. Names are stable:
/// `precision`, `overlap`, `error_rates`, `gold_matches`, `explanations`.
pub fn render_csv(report: &Report) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if report.phase3.is_none() || !report.submissions.is_empty() {
        let rows = report
            .submissions
            .iter()
            .map(|s| {
                vec![
                    s.team_id.clone(),
                    snake(&s.condition),
                    s.cards_submitted.to_string(),
                    s.verdicts.correct.to_string(),
                    s.verdicts.incorrect.to_string(),
                    s.verdicts.skipped.to_string(),
                    opt(&s.precision),
                    opt(&s.correct_fraction),
                    s.days.map(|d| d.to_string()).unwrap_or_default(),
                    opt(&s.correct_cards_per_day),
                ]
            })
            .collect();
        out.push((
            "precision",
            table(
                &strings(&[
                    "team_id",
                    "condition",
                    "cards_submitted",
                    "largely_correct",
                    "incorrect",
                    "skipped",
                    "precision",
                    "correct_fraction",
                    "days",
                    "largely_correct_cards_per_day",
                ]),
                rows,
            ),
        ));
    }
    if report.submissions.iter().any(|s| s.overlap.is_some()) {
        let mut rows = Vec::new();
        for s in &report.submissions {
            for (cat, cell) in s.overlap.iter().flatten() {
                rows.push(vec![
                    s.team_id.clone(),
                    snake(cat),
                    cell.matches.to_string(),
                    cell.reference_total.to_string(),
                    cell.percent.map(|p| p.to_string()).unwrap_or_default(),
                ]);
            }
        }
        out.push(("overlap", table(&strings(&["team_id", "category", "matches", "reference_total", "percent"]), rows)));
    }
    if let Some(g) = &report.gold_comparison {
        let mut rows = Vec::new();
        for (team, rates) in &g.error_rates {
            for (kind, r) in rates {
                rows.push(vec![team.clone(), snake(kind), r.rate.clone(), r.scored.to_string()]);
            }
        }
        out.push(("error_rates", table(&strings(&["team_id", "error_type", "error_rate", "number_scored"]), rows)));
        let teams: Vec<String> = g.full_matches.keys().cloned().collect();
        let mut header = vec!["gold_id".to_string()];
        header.extend(teams.iter().cloned());
        header.extend(strings(&[
            "cards",
            "participant_a_correct",
            "participant_b_correct",
            "interaction_type_correct",
            "combo",
        ]));
        let rows = g
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![r.gold_id.clone()];
                row.extend(teams.iter().map(|t| r.scores.get(t).map(|s| s.to_string()).unwrap_or_default()));
                row.extend([
                    r.ensemble.cards.to_string(),
                    r.ensemble.participant_a_correct.to_string(),
                    r.ensemble.participant_b_correct.to_string(),
                    r.ensemble.interaction_type_correct.to_string(),
                    if r.ensemble.combo { "Yes" } else { "No" }.to_string(),
                ]);
                row
            })
            .collect();
        out.push(("gold_matches", table(&header, rows)));
    }
    if let Some(p3) = &report.phase3 {
        let mut header = vec!["submission".to_string()];
        header.extend(p3.observations.iter().cloned());
        header.push("number_supported".into());
        let rows = match &p3.grid {
            Some(grid) => grid
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.submission.clone()];
                    row.extend(r.cells.iter().map(|c: &GridCell| c.code().to_string()));
                    row.push(r.plausible.to_string());
                    row
                })
                .collect(),
            None => Vec::new(),
        };
        out.push(("explanations", table(&header, rows)));
    }
    out
}
