//! Turns run inputs plus a judgment snapshot into review items and reports.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::HarnessError;
use crate::card::{card_to_json, interaction_to_json, load_submission, CardId, Condition, IndexCard, Submission};
use crate::explanation_checker::{
    apply_consistency, check_cell_line_consistency, check_plausibility, read_observation_rows, select_observations,
    summarize_results_grid, Criterion, EntityRoleTable, Explanation, Observation, Overall, PlausibilityVerdict,
    ResultsGrid, Reviews,
};
use crate::judgments::{duplicate_judgment, structural_judgment, Dialect, Judgment, Subject, Verdict};
use crate::matcher::{best_match, dedup_submission, match_cards, EquivalenceTable, MatchClass, MatchRecord};
use crate::metrics::{
    cards_per_day, conditional_error_rates, correct_fraction, ensemble_combination, format_ratio, precision,
    provenance_composition, reference_overlap, top_ranked, EnsembleResult, ErrorKind, MatchedPair, OverlapCategory,
    OverlapCell, ProvenanceClass, Ratio, VerdictCounts,
};
use crate::model_graph::{load_model, MechModel, Provenance};
use crate::refset::{load_refset, ReferenceInteraction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    I,
    II,
    III,
}

impl Phase {
    pub fn dialect(self) -> Dialect {
        match self {
            Phase::I => Dialect::PhaseI,
            _ => Dialect::PhaseII,
        }
    }
}

fn default_hi() -> f64 {
    1.5
}

fn default_lo() -> f64 {
    0.5
}

/// Everything needed to reproduce a run's results, minus the judgment log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub run_id: String,
    pub phase: Phase,
    #[serde(default)]
    pub submissions: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refset: Option<PathBuf>,
    /// Directory of gold cards (same layout as a submission).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<PathBuf>,
    #[serde(default)]
    pub models: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanations: Option<PathBuf>,
    /// JSON map of entity id to role list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equiv_table: Option<PathBuf>,
    /// Overrides the condition's conventional number of days.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub days: Option<u32>,
    #[serde(default = "default_hi")]
    pub fold_hi: f64,
    #[serde(default = "default_lo")]
    pub fold_lo: f64,
}

impl RunConfig {
    pub fn new(run_id: impl Into<String>, phase: Phase) -> Self {
        RunConfig {
            run_id: run_id.into(),
            phase,
            submissions: Vec::new(),
            refset: None,
            gold: None,
            models: Vec::new(),
            observations: None,
            explanations: None,
            roles: None,
            equiv_table: None,
            days: None,
            fold_hi: default_hi(),
            fold_lo: default_lo(),
        }
    }
}

/// A team's cards after dedup, with ids prefixed by the team id so that
/// several submissions can share one judgment log.
#[derive(Debug, Clone)]
pub struct PreparedSubmission {
    pub team_id: String,
    pub condition: Condition,
    pub submitted: u64,
    pub unique: BTreeMap<String, Vec<IndexCard>>,
    pub duplicates: Vec<IndexCard>,
    /// Against the reference set: every top-10 pairing that matched or was
    /// flagged as a near miss.
    pub matches: Vec<MatchRecord>,
}

impl PreparedSubmission {
    pub fn from_submission(sub: &Submission) -> Self {
        let mut unique = BTreeMap::new();
        let mut duplicates = Vec::new();
        for (paper, cards) in &sub.cards {
            let prefixed: Vec<IndexCard> = cards
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.id = CardId::new(format!("{}/{}", sub.team_id, c.id));
                    c
                })
                .collect();
            let (u, d) = dedup_submission(&prefixed);
            unique.insert(paper.clone(), u);
            duplicates.extend(d);
        }
        PreparedSubmission {
            team_id: sub.team_id.clone(),
            condition: sub.condition,
            submitted: sub.len() as u64,
            unique,
            duplicates,
            matches: Vec::new(),
        }
    }

    pub fn card_ids(&self) -> BTreeSet<CardId> {
        self.unique.values().flatten().chain(&self.duplicates).map(|c| c.id.clone()).collect()
    }

    pub fn find(&self, id: &CardId) -> Option<&IndexCard> {
        self.unique.values().flatten().chain(&self.duplicates).find(|c| &c.id == id)
    }

    fn top10(&self) -> impl Iterator<Item = (&String, Vec<&IndexCard>)> {
        self.unique.iter().map(|(p, cs)| (p, top_ranked(cs, 10)))
    }
}

pub struct Prepared {
    pub config: RunConfig,
    pub table: EquivalenceTable,
    pub submissions: Vec<PreparedSubmission>,
    pub refset: Vec<ReferenceInteraction>,
    pub gold: Vec<IndexCard>,
    pub models: Vec<MechModel>,
    pub observations: Vec<Observation>,
    pub explanations: Vec<Explanation>,
    pub roles: EntityRoleTable,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

fn require<'a, T>(v: &'a Option<T>, what: &'static str) -> Result<&'a T, HarnessError> {
    v.as_ref().ok_or(HarnessError::MissingInput(what))
}

/// Loads and checks every input the config names, collecting all failures.
pub fn prepare(config: &RunConfig) -> Result<Prepared, HarnessError> {
    let mut failures = Vec::new();
    let table = match &config.equiv_table {
        Some(p) => {
            EquivalenceTable::load(p).map_err(|e| HarnessError::ParseFailures(vec![format!("{}: {e}", p.display())]))?
        }
        None => EquivalenceTable::default(),
    };
    match config.phase {
        Phase::I if config.submissions.is_empty() => return Err(HarnessError::MissingInput("submission")),
        Phase::II => {
            if config.gold.is_none() {
                require(&config.refset, "refset")?;
            }
            if config.submissions.is_empty() {
                return Err(HarnessError::MissingInput("submission"));
            }
        }
        Phase::III => {
            if config.models.is_empty() {
                return Err(HarnessError::MissingInput("model"));
            }
            require(&config.observations, "observations")?;
            require(&config.explanations, "explanations")?;
        }
        _ => {}
    }

    let mut submissions = Vec::new();
    let mut teams = BTreeSet::new();
    for dir in &config.submissions {
        match load_submission(dir) {
            Ok(sub) => {
                if !teams.insert(sub.team_id.clone()) {
                    failures.push(format!("{}: team id {} used twice", dir.display(), sub.team_id));
                }
                submissions.push(PreparedSubmission::from_submission(&sub));
            }
            Err(e) => failures.extend(submission_failures(dir, e)),
        }
    }
    let refset = match &config.refset {
        Some(p) => load_refset(p).unwrap_or_else(|e| {
            failures.push(format!("{}: {e}", p.display()));
            Vec::new()
        }),
        None => Vec::new(),
    };
    let gold = match &config.gold {
        Some(dir) => match load_submission(dir) {
            Ok(sub) => sub.all_cards().cloned().collect(),
            Err(e) => {
                failures.extend(submission_failures(dir, e));
                Vec::new()
            }
        },
        None => Vec::new(),
    };
    let mut models = Vec::new();
    for p in &config.models {
        match load_model(p) {
            Ok(m) => models.push(m),
            Err(e) => failures.push(format!("{}: {e}", p.display())),
        }
    }
    let mut observations = Vec::new();
    if let Some(p) = &config.observations {
        let rows = read(p).and_then(|raw| {
            read_observation_rows(raw.as_bytes()).map_err(|e| HarnessError::ParseFailures(vec![e.to_string()]))
        });
        match rows.and_then(|rows| {
            select_observations(&rows, config.fold_hi, config.fold_lo)
                .map_err(|e| HarnessError::ParseFailures(vec![e.to_string()]))
        }) {
            Ok(o) => observations = o,
            Err(e) => failures.push(format!("{}: {e}", p.display())),
        }
    }
    let mut explanations = Vec::new();
    if let Some(p) = &config.explanations {
        match read(p)
            .and_then(|raw| serde_json::from_str::<Vec<Explanation>>(&raw).map_err(|e| HarnessError::Io(e.to_string())))
        {
            Ok(x) => explanations = x,
            Err(e) => failures.push(format!("{}: {e}", p.display())),
        }
    }
    let mut roles = EntityRoleTable::new();
    if let Some(p) = &config.roles {
        match read(p).and_then(|raw| serde_json::from_str(&raw).map_err(|e| HarnessError::Io(e.to_string()))) {
            Ok(r) => roles = r,
            Err(e) => failures.push(format!("{}: {e}", p.display())),
        }
    }
    if !failures.is_empty() {
        return Err(HarnessError::ParseFailures(failures));
    }

    for sub in &mut submissions {
        let mut records = Vec::new();
        for (paper, top) in sub.top10() {
            for r in refset.iter().filter(|r| &r.paper_id == paper) {
                for card in &top {
                    let m = match_cards(card, r, &table);
                    if m.class != MatchClass::None || m.auto_flagged {
                        records.push(m);
                    }
                }
            }
        }
        sub.matches = records;
    }

    Ok(Prepared { config: config.clone(), table, submissions, refset, gold, models, observations, explanations, roles })
}

fn submission_failures(dir: &Path, e: crate::card::SubmissionError) -> Vec<String> {
    match e {
        crate::card::SubmissionError::Invalid(files) => files
            .into_iter()
            .flat_map(|(path, errs)| errs.into_iter().map(move |err| format!("{}: {err}", path.display())))
            .collect(),
        other => vec![format!("{}: {other}", dir.display())],
    }
}

/// Judgments the rules produce without a reviewer: duplicates and
/// blank-participant amount changes are skipped.
pub fn rule_judgments(p: &Prepared) -> Vec<Judgment> {
    let dialect = p.config.phase.dialect();
    let mut out = Vec::new();
    for sub in &p.submissions {
        out.extend(sub.duplicates.iter().map(|c| duplicate_judgment(c, dialect)));
        out.extend(sub.unique.values().flatten().filter_map(|c| structural_judgment(c, dialect)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ItemKind {
    CardVerdict,
    MatchConfirmation,
    EvidenceSupport { edge: String },
}

/// A decision a reviewer has to make, before it is placed in a queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub kind: ItemKind,
    pub subject: Subject,
    pub paper_id: Option<String>,
    pub payload: Value,
}

/// Every review decision the run needs, in a stable order.
pub fn review_specs(p: &Prepared) -> Vec<ItemSpec> {
    let mut out = Vec::new();
    let dialect = p.config.phase.dialect();
    let rule_subjects: BTreeSet<Subject> = rule_judgments(p).into_iter().map(|j| j.subject).collect();
    let refs: BTreeMap<&str, &ReferenceInteraction> = p.refset.iter().map(|r| (r.id.as_str(), r)).collect();
    for sub in &p.submissions {
        let cards: Vec<&IndexCard> = match p.config.phase {
            Phase::I => sub.unique.values().flatten().collect(),
            Phase::II => sub.top10().flat_map(|(_, top)| top).collect(),
            Phase::III => Vec::new(),
        };
        for c in cards {
            let subject = Subject::Card(c.id.clone());
            if rule_subjects.contains(&subject) {
                continue;
            }
            out.push(ItemSpec {
                kind: ItemKind::CardVerdict,
                subject,
                paper_id: Some(c.paper_id.clone()),
                payload: json!({ "card": card_to_json(c), "dialect": dialect }),
            });
        }
        for m in sub.matches.iter().filter(|m| m.auto_flagged && m.class != MatchClass::Partial) {
            let Some(gold) = refs.get(m.gold_id.as_str()) else { continue };
            let card = sub.find(&m.candidate_card_id).expect("match refers to a prepared card");
            out.push(ItemSpec {
                kind: ItemKind::MatchConfirmation,
                subject: Subject::Match { gold: m.gold_id.clone(), card: m.candidate_card_id.clone() },
                paper_id: Some(gold.paper_id.clone()),
                payload: json!({
                    "reference": { "id": gold.id, "interaction": interaction_to_json(&gold.interaction) },
                    "card": card_to_json(card),
                    "match": m,
                }),
            });
        }
    }
    if p.config.phase == Phase::III {
        let models: BTreeMap<&str, &MechModel> = p.models.iter().map(|m| (m.id.as_str(), m)).collect();
        let mut seen = BTreeSet::new();
        for e in &p.explanations {
            let Some(model) = models.get(e.model_id.as_str()) else { continue };
            for id in e.paths.iter().flatten() {
                let Some(x) = model.interaction(id) else { continue };
                let reading_only = x.provenance.iter().all(|p| matches!(p, Provenance::MachineReading { .. }));
                if !reading_only || !seen.insert((model.id.clone(), id.clone())) {
                    continue;
                }
                out.push(ItemSpec {
                    kind: ItemKind::EvidenceSupport { edge: id.clone() },
                    subject: Subject::EdgeSupport { model: model.id.clone(), edge: id.clone() },
                    paper_id: None,
                    payload: json!({
                        "model": model.id,
                        "edge": {
                            "id": x.id, "source": x.source, "target": x.target,
                            "kind": x.kind.as_str(), "sign": x.sign,
                        },
                        "provenance": x.provenance,
                    }),
                });
            }
        }
    }
    out
}

/// An exact ratio with a rounded decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioOut {
    pub numerator: i64,
    pub denominator: i64,
    pub value: String,
}

impl RatioOut {
    pub fn of(r: Ratio, places: u32) -> Self {
        RatioOut { numerator: *r.numer(), denominator: *r.denom(), value: format_ratio(r, places) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmissionReport {
    pub team_id: String,
    pub condition: Condition,
    pub cards_submitted: u64,
    pub verdicts: VerdictCounts,
    pub unjudged_cards: u64,
    pub precision: Option<RatioOut>,
    pub correct_fraction: Option<RatioOut>,
    pub days: Option<u32>,
    pub correct_cards_per_day: Option<RatioOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<BTreeMap<OverlapCategory, OverlapCell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRateOut {
    pub errors: u64,
    pub scored: u64,
    pub rate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldRow {
    pub gold_id: String,
    /// Match class per team: 2 full, 1 partial, 0 none.
    pub scores: BTreeMap<String, u8>,
    pub ensemble: EnsembleResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldComparison {
    pub rows: Vec<GoldRow>,
    pub error_rates: BTreeMap<String, BTreeMap<ErrorKind, ErrorRateOut>>,
    pub full_matches: BTreeMap<String, u64>,
    pub partial_matches: BTreeMap<String, u64>,
    pub correct_combinations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplanationOutcome {
    pub submission: String,
    pub verdict: PlausibilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase3Report {
    pub observations: Vec<String>,
    pub explanations: Vec<ExplanationOutcome>,
    pub pending: Vec<String>,
    pub grid: Option<ResultsGrid>,
    pub provenance: BTreeMap<String, BTreeMap<ProvenanceClass, RatioOut>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub run_id: String,
    pub phase: Phase,
    pub equivalence_table: String,
    pub submissions: Vec<SubmissionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold_comparison: Option<GoldComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase3: Option<Phase3Report>,
    pub pending_reviews: u64,
}

fn submission_report(
    p: &Prepared,
    sub: &PreparedSubmission,
    snapshot: &BTreeMap<Subject, Judgment>,
) -> SubmissionReport {
    let ids = sub.card_ids();
    let verdicts: Vec<Verdict> =
        ids.iter().filter_map(|id| snapshot.get(&Subject::Card(id.clone())).map(|j| j.verdict)).collect();
    let counts = VerdictCounts::from_verdicts(&verdicts);
    let days = p.config.days.or(sub.condition.conventional_days());
    let per_day = days
        .and_then(|d| cards_per_day(&counts, sub.submitted, Ratio::from_integer(i64::from(d))).ok())
        .map(|r| RatioOut::of(r, 2));
    let overlap = (p.config.phase == Phase::II && p.config.refset.is_some()).then(|| {
        let mut cells = reference_overlap(&p.refset, &sub.unique, &sub.matches, snapshot);
        for c in OverlapCategory::ALL {
            cells.entry(c).or_insert(OverlapCell { matches: 0, reference_total: 0, percent: None });
        }
        cells
    });
    SubmissionReport {
        team_id: sub.team_id.clone(),
        condition: sub.condition,
        cards_submitted: sub.submitted,
        verdicts: counts,
        unjudged_cards: (ids.len() - verdicts.len()) as u64,
        precision: precision(&counts).ok().map(|r| RatioOut::of(r, 3)),
        correct_fraction: correct_fraction(&counts).ok().map(|r| RatioOut::of(r, 3)),
        days,
        correct_cards_per_day: per_day,
        overlap,
    }
}

fn gold_comparison(p: &Prepared, snapshot: &BTreeMap<Subject, Judgment>) -> GoldComparison {
    let mut rows = Vec::new();
    let mut pairs: BTreeMap<String, Vec<(MatchRecord, &IndexCard, &IndexCard)>> = BTreeMap::new();
    let mut full = BTreeMap::new();
    let mut partial = BTreeMap::new();
    for g in &p.gold {
        let mut scores = BTreeMap::new();
        let mut pool: Vec<&IndexCard> = Vec::new();
        for sub in &p.submissions {
            let cands: Vec<&IndexCard> = sub.unique.get(&g.paper_id).map(|v| v.iter().collect()).unwrap_or_default();
            let best = best_match(cands.iter().copied(), g, &p.table);
            let class = best.as_ref().map_or(MatchClass::None, |m| m.class);
            scores.insert(sub.team_id.clone(), class.score());
            *full.entry(sub.team_id.clone()).or_insert(0) += u64::from(class == MatchClass::Full);
            *partial.entry(sub.team_id.clone()).or_insert(0) += u64::from(class == MatchClass::Partial);
            if let Some(m) = best {
                let card =
                    cands.iter().find(|c| c.id == m.candidate_card_id).copied().expect("best match is a candidate");
                pool.push(card);
                pairs.entry(sub.team_id.clone()).or_default().push((m, card, g));
            }
        }
        let interactions: Vec<&crate::card::Interaction> = pool.iter().map(|c| &c.interaction).collect();
        rows.push(GoldRow {
            gold_id: g.id.to_string(),
            scores,
            ensemble: ensemble_combination(&g.interaction, &interactions, &p.table),
        });
    }
    let error_rates = pairs
        .iter()
        .map(|(team, ps)| {
            let matched: Vec<MatchedPair<'_>> = ps
                .iter()
                .map(|(m, c, g)| MatchedPair { record: m, candidate: &c.interaction, gold: &g.interaction })
                .collect();
            let rates = conditional_error_rates(&matched, snapshot)
                .into_iter()
                .map(|(k, r)| (k, ErrorRateOut { errors: r.errors, scored: r.scored, rate: format_ratio(r.rate, 2) }))
                .collect();
            (team.clone(), rates)
        })
        .collect();
    let correct_combinations = rows.iter().filter(|r| r.ensemble.combo).count() as u64;
    GoldComparison { rows, error_rates, full_matches: full, partial_matches: partial, correct_combinations }
}

/// Reviewer decisions recorded for one model's edges.
pub fn reviews_for(model: &str, snapshot: &BTreeMap<Subject, Judgment>) -> Reviews {
    let mut r = Reviews::default();
    for (s, j) in snapshot {
        if let Subject::EdgeSupport { model: m, edge } = s {
            if m == model {
                r.edge_support.insert(edge.clone(), j.verdict == Verdict::LargelyCorrect);
            }
        }
    }
    r
}

fn phase3(p: &Prepared, snapshot: &BTreeMap<Subject, Judgment>) -> Result<Phase3Report, HarnessError> {
    let models: BTreeMap<&str, &MechModel> = p.models.iter().map(|m| (m.id.as_str(), m)).collect();
    let obs: BTreeMap<&str, &Observation> = p.observations.iter().map(|o| (o.id.as_str(), o)).collect();
    let mut by_sub: BTreeMap<String, Vec<(Explanation, PlausibilityVerdict)>> = BTreeMap::new();
    for e in &p.explanations {
        let model = models
            .get(e.model_id.as_str())
            .ok_or_else(|| HarnessError::Check(format!("{}: unknown model {}", e.id, e.model_id)))?;
        let o = obs.get(e.observation_id.as_str()).ok_or_else(|| {
            HarnessError::Check(format!("{}: observation {} was not selected", e.id, e.observation_id))
        })?;
        let reviews = reviews_for(&model.id, snapshot);
        let v = check_plausibility(model, model.contexts.get(&e.cell_line), o, e, &p.roles, &reviews)
            .map_err(|err| HarnessError::Check(format!("{}: {err}", e.id)))?;
        let sub = e.submission.clone().unwrap_or_else(|| "default".into());
        by_sub.entry(sub).or_default().push((e.clone(), v));
    }
    let model_refs: Vec<&MechModel> = p.models.iter().collect();
    let mut outcomes = Vec::new();
    let mut cells: BTreeMap<(String, String), PlausibilityVerdict> = BTreeMap::new();
    for (sub, items) in by_sub {
        let expls: Vec<Explanation> = items.iter().map(|(e, _)| e.clone()).collect();
        let mut verdicts: Vec<PlausibilityVerdict> = items.into_iter().map(|(_, v)| v).collect();
        apply_consistency(&mut verdicts, &check_cell_line_consistency(&expls, &model_refs));
        for v in verdicts {
            let key = (sub.clone(), v.observation_id.clone());
            // Several explanations of one observation (one per cell line)
            // must all hold.
            let keep = match cells.get(&key) {
                None => true,
                Some(prev) => rank_overall(v.overall) > rank_overall(prev.overall),
            };
            if keep {
                cells.insert(key, v.clone());
            }
            outcomes.push(ExplanationOutcome { submission: sub.clone(), verdict: v });
        }
    }
    let pending: Vec<String> = outcomes
        .iter()
        .filter(|o| o.verdict.overall == Overall::Pending)
        .map(|o| o.verdict.explanation_id.clone())
        .collect();
    let observations: Vec<String> = p.observations.iter().map(|o| o.id.clone()).collect();
    let grid = summarize_results_grid(&observations, &cells).ok();
    let provenance = p
        .models
        .iter()
        .filter_map(|m| {
            provenance_composition(m)
                .ok()
                .map(|mix| (m.id.clone(), mix.into_iter().map(|(k, r)| (k, RatioOut::of(r, 3))).collect()))
        })
        .collect();
    Ok(Phase3Report { observations, explanations: outcomes, pending, grid, provenance })
}

fn rank_overall(o: Overall) -> u8 {
    match o {
        Overall::Plausible => 0,
        Overall::Pending => 1,
        Overall::NotPlausible => 2,
    }
}

/// The report for a run: a pure function of the prepared inputs and the
/// judgment snapshot.
pub fn build_report(p: &Prepared, snapshot: &BTreeMap<Subject, Judgment>) -> Result<Report, HarnessError> {
    let pending_reviews = review_specs(p).iter().filter(|s| !snapshot.contains_key(&s.subject)).count() as u64;
    Ok(Report {
        run_id: p.config.run_id.clone(),
        phase: p.config.phase,
        equivalence_table: p.table.version.clone(),
        submissions: p.submissions.iter().map(|s| submission_report(p, s, snapshot)).collect(),
        gold_comparison: (!p.gold.is_empty()).then(|| gold_comparison(p, snapshot)),
        phase3: if p.config.phase == Phase::III { Some(phase3(p, snapshot)?) } else { None },
        pending_reviews,
    })
}

/// Criteria that still need a reviewer, per explanation.
pub fn open_criteria(report: &Phase3Report) -> BTreeMap<String, Vec<Criterion>> {
    report
        .explanations
        .iter()
        .filter(|o| o.verdict.overall == Overall::Pending)
        .map(|o| {
            let open = o
                .verdict
                .criteria
                .iter()
                .filter(|(_, r)| matches!(r, crate::explanation_checker::CriterionResult::NeedsHumanReview(_)))
                .map(|(c, _)| *c)
                .collect();
            (o.verdict.explanation_id.clone(), open)
        })
        .collect()
}

/// Scores inputs without a persistent run: rule judgments, overlaid with
/// an optional judgment log.
pub fn score_offline(config: &RunConfig, judgments: Option<&Path>) -> Result<Report, HarnessError> {
    let prepared = prepare(config)?;
    let mut snapshot: BTreeMap<Subject, Judgment> =
        rule_judgments(&prepared).into_iter().map(|j| (j.subject.clone(), j)).collect();
    if let Some(path) = judgments {
        let known = prepared.submissions.iter().flat_map(|s| s.card_ids());
        let store = crate::judgments::JudgmentStore::open(path, known)?;
        snapshot.extend(store.snapshot());
    }
    build_report(&prepared, &snapshot)
}
