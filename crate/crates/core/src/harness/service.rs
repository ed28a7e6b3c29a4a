use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::pipeline::{build_report, prepare, review_specs, rule_judgments, ItemKind, Prepared, Report, RunConfig};
use super::HarnessError;
use crate::card::CardId;
use crate::judgments::{apply_rubric, FieldAssessment, Judge, Judgment, JudgmentStore, Subject, Verdict};

/// Seconds since the Unix epoch; injectable so claim expiry can be tested.
pub trait Clock: Send + Sync {
    fn now(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    }
}

#[derive(Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn at(secs: u64) -> Self {
        ManualClock(AtomicU64::new(secs))
    }

    pub fn advance(&self, secs: u64) {
        self.0.fetch_add(secs, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ingested,
    AwaitingReview,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ItemState {
    Queued,
    Claimed { reviewer: String, since: u64 },
    Resolved { reviewer: String, revision: u32 },
}

impl ItemState {
    pub fn name(&self) -> &'static str {
        match self {
            ItemState::Queued => "queued",
            ItemState::Claimed { .. } => "claimed",
            ItemState::Resolved { .. } => "resolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub item_id: String,
    pub kind: ItemKind,
    pub subject: Subject,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_id: Option<String>,
    pub payload: Value,
    pub state: ItemState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRun {
    pub run_id: String,
    pub config: RunConfig,
    pub status: RunStatus,
    pub items: Vec<ReviewItem>,
}

impl EvaluationRun {
    fn refresh_status(&mut self) {
        let open = self.items.iter().any(|i| !matches!(i.state, ItemState::Resolved { .. }));
        self.status = if open { RunStatus::AwaitingReview } else { RunStatus::Complete };
    }
}

/// A reviewer's decision on a claimed item.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Rubric answers, for card verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assessment: Option<FieldAssessment>,
    /// Accept or reject, for match and evidence confirmations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept: Option<bool>,
    /// Revision the reviewer saw; defaults to the current one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub based_on: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueFilter {
    pub kind: Option<String>,
    pub state: Option<String>,
    pub paper: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueueCounts {
    pub total: u64,
    pub queued: u64,
    pub claimed: u64,
    pub resolved: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueView {
    pub run_id: String,
    pub status: RunStatus,
    pub counts: QueueCounts,
    pub items: Vec<ReviewItem>,
}

fn kind_name(k: &ItemKind) -> &'static str {
    match k {
        ItemKind::CardVerdict => "card_verdict",
        ItemKind::MatchConfirmation => "match_confirmation",
        ItemKind::EvidenceSupport { .. } => "evidence_support",
    }
}

struct RunHandle {
    dir: PathBuf,
    run: Mutex<EvaluationRun>,
    store: JudgmentStore,
    prepared: Prepared,
}

fn valid_run_id(id: &str) -> bool {
    !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !id.starts_with('.')
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io(format!("{}: {e}", path.display()))
}

fn known_cards(p: &Prepared) -> Vec<CardId> {
    p.submissions.iter().flat_map(|s| s.card_ids()).collect()
}

fn save_run(dir: &Path, run: &EvaluationRun) -> Result<(), HarnessError> {
    let path = dir.join("run.json");
    let tmp = dir.join("run.json.tmp");
    let mut body = serde_json::to_string_pretty(run).expect("run serializes");
    body.push('\n');
    fs::write(&tmp, body).map_err(io(&tmp))?;
    fs::rename(&tmp, &path).map_err(io(&path))
}

/// Creates a run under `root/runs/<run_id>`: loads inputs, records rule
/// judgments and queues every decision that needs a reviewer.
pub fn ingest_run(root: &Path, config: &RunConfig) -> Result<EvaluationRun, HarnessError> {
    if !valid_run_id(&config.run_id) {
        return Err(HarnessError::BadRequest(format!("run id `{}` may use letters, digits, - _ .", config.run_id)));
    }
    let dir = root.join("runs").join(&config.run_id);
    if dir.exists() {
        return Err(HarnessError::DuplicateRun(config.run_id.clone()));
    }
    let prepared = prepare(config)?;
    fs::create_dir_all(&dir).map_err(io(&dir))?;
    let store = JudgmentStore::open(&dir.join("judgments.jsonl"), known_cards(&prepared))?;
    for j in rule_judgments(&prepared) {
        store.record_latest(j)?;
    }
    let items = review_specs(&prepared)
        .into_iter()
        .enumerate()
        .map(|(n, s)| ReviewItem {
            item_id: format!("{}:{}", config.run_id, n + 1),
            kind: s.kind,
            subject: s.subject,
            paper_id: s.paper_id,
            payload: s.payload,
            state: ItemState::Queued,
        })
        .collect();
    let mut run =
        EvaluationRun { run_id: config.run_id.clone(), config: config.clone(), status: RunStatus::Ingested, items };
    if !run.items.is_empty() {
        run.refresh_status();
    } else {
        run.status = RunStatus::Complete;
    }
    save_run(&dir, &run)?;
    Ok(run)
}

/// Review queue operations over the runs in a data root.
pub struct ReviewService {
    root: PathBuf,
    clock: Arc<dyn Clock>,
    claim_timeout: u64,
    runs: Mutex<BTreeMap<String, Arc<RunHandle>>>,
}

impl ReviewService {
    pub fn new(root: impl Into<PathBuf>, clock: Arc<dyn Clock>, claim_timeout_secs: u64) -> Self {
        ReviewService { root: root.into(), clock, claim_timeout: claim_timeout_secs, runs: Mutex::new(BTreeMap::new()) }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn handle(&self, run_id: &str) -> Result<Arc<RunHandle>, HarnessError> {
        let mut runs = self.runs.lock().expect("runs lock");
        if let Some(h) = runs.get(run_id) {
            return Ok(h.clone());
        }
        if !valid_run_id(run_id) {
            return Err(HarnessError::UnknownRun(run_id.to_string()));
        }
        let dir = self.root.join("runs").join(run_id);
        let path = dir.join("run.json");
        if !path.exists() {
            return Err(HarnessError::UnknownRun(run_id.to_string()));
        }
        let raw = fs::read_to_string(&path).map_err(io(&path))?;
        let run: EvaluationRun =
            serde_json::from_str(&raw).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let prepared = prepare(&run.config)?;
        let store = JudgmentStore::open(&dir.join("judgments.jsonl"), known_cards(&prepared))?;
        let h = Arc::new(RunHandle { dir, run: Mutex::new(run), store, prepared });
        runs.insert(run_id.to_string(), h.clone());
        Ok(h)
    }

    fn handle_for_item(&self, item_id: &str) -> Result<Arc<RunHandle>, HarnessError> {
        let (run_id, _) = item_id.rsplit_once(':').ok_or_else(|| HarnessError::UnknownItem(item_id.to_string()))?;
        self.handle(run_id).map_err(|e| match e {
            HarnessError::UnknownRun(_) => HarnessError::UnknownItem(item_id.to_string()),
            other => other,
        })
    }

    fn expire_claims(&self, run: &mut EvaluationRun) -> bool {
        let now = self.clock.now();
        let mut changed = false;
        for item in &mut run.items {
            if let ItemState::Claimed { since, .. } = item.state {
                if now.saturating_sub(since) >= self.claim_timeout {
                    item.state = ItemState::Queued;
                    changed = true;
                }
            }
        }
        changed
    }

    pub fn run(&self, run_id: &str) -> Result<EvaluationRun, HarnessError> {
        let h = self.handle(run_id)?;
        let mut run = h.run.lock().expect("run lock");
        if self.expire_claims(&mut run) {
            save_run(&h.dir, &run)?;
        }
        Ok(run.clone())
    }

    pub fn list_queue(&self, run_id: &str, filter: &QueueFilter) -> Result<QueueView, HarnessError> {
        let run = self.run(run_id)?;
        let mut counts = QueueCounts { total: run.items.len() as u64, ..Default::default() };
        for i in &run.items {
            match i.state {
                ItemState::Queued => counts.queued += 1,
                ItemState::Claimed { .. } => counts.claimed += 1,
                ItemState::Resolved { .. } => counts.resolved += 1,
            }
        }
        let items = run
            .items
            .iter()
            .filter(|i| filter.kind.as_deref().is_none_or(|k| k == kind_name(&i.kind)))
            .filter(|i| filter.state.as_deref().is_none_or(|s| s == i.state.name()))
            .filter(|i| filter.paper.as_deref().is_none_or(|p| i.paper_id.as_deref() == Some(p)))
            .cloned()
            .collect();
        Ok(QueueView { run_id: run.run_id, status: run.status, counts, items })
    }

    pub fn claim(&self, item_id: &str, reviewer: &str) -> Result<ReviewItem, HarnessError> {
        let h = self.handle_for_item(item_id)?;
        let mut run = h.run.lock().expect("run lock");
        self.expire_claims(&mut run);
        let now = self.clock.now();
        let item = run
            .items
            .iter_mut()
            .find(|i| i.item_id == item_id)
            .ok_or_else(|| HarnessError::UnknownItem(item_id.to_string()))?;
        match &item.state {
            ItemState::Queued => {}
            ItemState::Claimed { reviewer: r, .. } if r == reviewer => {}
            ItemState::Claimed { reviewer: r, .. } => return Err(HarnessError::AlreadyClaimed(r.clone())),
            ItemState::Resolved { .. } => return Err(HarnessError::AlreadyResolved(item_id.to_string())),
        }
        item.state = ItemState::Claimed { reviewer: reviewer.to_string(), since: now };
        let out = item.clone();
        save_run(&h.dir, &run)?;
        Ok(out)
    }

    pub fn resolve(
        &self,
        item_id: &str,
        reviewer: &str,
        decision: &Decision,
    ) -> Result<(ReviewItem, Judgment), HarnessError> {
        let h = self.handle_for_item(item_id)?;
        let mut run = h.run.lock().expect("run lock");
        self.expire_claims(&mut run);
        let dialect = run.config.phase.dialect();
        let idx = run
            .items
            .iter()
            .position(|i| i.item_id == item_id)
            .ok_or_else(|| HarnessError::UnknownItem(item_id.to_string()))?;
        let item = &run.items[idx];
        match &item.state {
            ItemState::Claimed { reviewer: r, .. } if r == reviewer => {}
            ItemState::Resolved { .. } => return Err(HarnessError::AlreadyResolved(item_id.to_string())),
            _ => return Err(HarnessError::NotClaimant(item_id.to_string())),
        }
        let judge = Judge::Human(reviewer.to_string());
        let mut judgment = match (&item.kind, &item.subject) {
            (ItemKind::CardVerdict, Subject::Card(id)) => {
                let assessment = decision
                    .assessment
                    .as_ref()
                    .ok_or_else(|| HarnessError::BadRequest("card verdicts need an assessment".into()))?;
                let card = h
                    .prepared
                    .submissions
                    .iter()
                    .find_map(|s| s.find(id))
                    .ok_or_else(|| HarnessError::UnknownItem(item_id.to_string()))?;
                apply_rubric(card, assessment, dialect, judge)?
            }
            _ => {
                let accept =
                    decision.accept.ok_or_else(|| HarnessError::BadRequest("confirmations need `accept`".into()))?;
                let verdict = if accept { Verdict::LargelyCorrect } else { Verdict::Incorrect };
                Judgment::new(item.subject.clone(), verdict, judge, dialect)
            }
        };
        judgment.timestamp =
            chrono::DateTime::from_timestamp(self.clock.now() as i64, 0).map(|t| t.to_rfc3339()).unwrap_or_default();
        let based_on = decision.based_on.unwrap_or_else(|| h.store.current_revision(&judgment.subject));
        let revision = h.store.record(judgment.clone(), based_on)?;
        judgment.revision = revision;
        run.items[idx].state = ItemState::Resolved { reviewer: reviewer.to_string(), revision };
        run.refresh_status();
        let out = run.items[idx].clone();
        save_run(&h.dir, &run)?;
        Ok((out, judgment))
    }

    /// Metrics recomputed from the latest judgment snapshot.
    pub fn report(&self, run_id: &str) -> Result<Report, HarnessError> {
        let h = self.handle(run_id)?;
        let snapshot = h.store.snapshot();
        build_report(&h.prepared, &snapshot)
    }
}
