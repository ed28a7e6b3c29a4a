use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{Judgment, Subject, Verdict};
use crate::card::CardId;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("stale revision for {subject}: based on {based_on}, current is {current}")]
    StaleRevision { subject: Subject, based_on: u32, current: u32 },
    #[error("unknown card or subject {0}")]
    UnknownCard(Subject),
    #[error("judgment log {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("judgment log {path} line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

#[derive(Default)]
struct Inner {
    known: BTreeSet<Subject>,
    log: Vec<Judgment>,
    latest: BTreeMap<Subject, usize>,
    file: Option<(PathBuf, File)>,
}

/// Append-only judgment log with a latest-revision view.
///
/// Writers state the revision they based their edit on; a write is accepted
/// only if that is still the current revision (0 when nothing is recorded).
/// Card subjects must be registered first. Match and edge subjects are
/// accepted once any card is known, since they are created during review.
#[derive(Default)]
pub struct JudgmentStore {
    inner: Mutex<Inner>,
}

impl JudgmentStore {
    pub fn in_memory(known_cards: impl IntoIterator<Item = CardId>) -> Self {
        let store = JudgmentStore::default();
        store.register(known_cards.into_iter().map(Subject::Card));
        store
    }

    /// Opens (or creates) a log file and replays it.
    pub fn open(path: &Path, known_cards: impl IntoIterator<Item = CardId>) -> Result<Self, StoreError> {
        let io = |source| StoreError::Io { path: path.to_path_buf(), source };
        let store = JudgmentStore::in_memory(known_cards);
        {
            let mut inner = store.inner.lock().expect("store lock");
            if path.exists() {
                let reader = BufReader::new(File::open(path).map_err(io)?);
                for (n, line) in reader.lines().enumerate() {
                    let line = line.map_err(io)?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let j: Judgment = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                        path: path.to_path_buf(),
                        line: n + 1,
                        message: e.to_string(),
                    })?;
                    let current = inner.latest.get(&j.subject).map_or(0, |&i| inner.log[i].revision);
                    if j.revision != current + 1 {
                        return Err(StoreError::Corrupt {
                            path: path.to_path_buf(),
                            line: n + 1,
                            message: format!("revision {} follows {current}", j.revision),
                        });
                    }
                    inner.known.insert(j.subject.clone());
                    let idx = inner.log.len();
                    inner.latest.insert(j.subject.clone(), idx);
                    inner.log.push(j);
                }
            }
            let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
            inner.file = Some((path.to_path_buf(), file));
        }
        Ok(store)
    }

    pub fn register(&self, subjects: impl IntoIterator<Item = Subject>) {
        self.inner.lock().expect("store lock").known.extend(subjects);
    }

    pub fn is_known(&self, subject: &Subject) -> bool {
        let inner = self.inner.lock().expect("store lock");
        Self::accepts(&inner, subject)
    }

    fn accepts(inner: &Inner, subject: &Subject) -> bool {
        match subject {
            Subject::Card(_) => inner.known.contains(subject),
            Subject::Match { card, .. } => inner.known.contains(&Subject::Card(card.clone())),
            Subject::EdgeSupport { .. } => true,
        }
    }

    pub fn current_revision(&self, subject: &Subject) -> u32 {
        let inner = self.inner.lock().expect("store lock");
        inner.latest.get(subject).map_or(0, |&i| inner.log[i].revision)
    }

    /// Appends `judgment` as revision `based_on + 1`.
    pub fn record(&self, mut judgment: Judgment, based_on: u32) -> Result<u32, StoreError> {
        let mut inner = self.inner.lock().expect("store lock");
        if !Self::accepts(&inner, &judgment.subject) {
            return Err(StoreError::UnknownCard(judgment.subject));
        }
        let current = inner.latest.get(&judgment.subject).map_or(0, |&i| inner.log[i].revision);
        if based_on != current {
            return Err(StoreError::StaleRevision { subject: judgment.subject, based_on, current });
        }
        judgment.revision = current + 1;
        if let Some((path, file)) = inner.file.as_mut() {
            let mut line = serde_json::to_string(&judgment).expect("judgment serializes");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| StoreError::Io { path: path.clone(), source })?;
        }
        let idx = inner.log.len();
        let revision = judgment.revision;
        inner.latest.insert(judgment.subject.clone(), idx);
        inner.log.push(judgment);
        Ok(revision)
    }

    /// Records against whatever revision is current. For rule judgments and
    /// single-writer tools.
    pub fn record_latest(&self, judgment: Judgment) -> Result<u32, StoreError> {
        let based_on = self.current_revision(&judgment.subject);
        self.record(judgment, based_on)
    }

    pub fn latest(&self, subject: &Subject) -> Option<Judgment> {
        let inner = self.inner.lock().expect("store lock");
        inner.latest.get(subject).map(|&i| inner.log[i].clone())
    }

    /// Consistent copy of the latest judgment per subject.
    pub fn snapshot(&self) -> BTreeMap<Subject, Judgment> {
        let inner = self.inner.lock().expect("store lock");
        inner.latest.iter().map(|(s, &i)| (s.clone(), inner.log[i].clone())).collect()
    }

    /// Full log in write order.
    pub fn log(&self) -> Vec<Judgment> {
        self.inner.lock().expect("store lock").log.clone()
    }
}

/// Latest verdict per card from a log given in write order.
pub fn latest_card_verdicts(log: &[Judgment]) -> BTreeMap<CardId, Verdict> {
    let mut out: BTreeMap<CardId, (u32, Verdict)> = BTreeMap::new();
    for j in log {
        if let Subject::Card(id) = &j.subject {
            let entry = out.entry(id.clone()).or_insert((j.revision, j.verdict));
            if j.revision >= entry.0 {
                *entry = (j.revision, j.verdict);
            }
        }
    }
    out.into_iter().map(|(k, (_, v))| (k, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judgments::{Dialect, Judge};

    fn j(card: &str, v: Verdict) -> Judgment {
        Judgment::new(Subject::card(card), v, Judge::Human("r1".into()), Dialect::PhaseI)
    }

    #[test]
    fn latest_revision_wins() {
        let store = JudgmentStore::in_memory([CardId::new("c1")]);
        assert_eq!(store.record(j("c1", Verdict::Incorrect), 0).unwrap(), 1);
        assert_eq!(store.record(j("c1", Verdict::LargelyCorrect), 1).unwrap(), 2);
        assert_eq!(store.latest(&Subject::card("c1")).unwrap().verdict, Verdict::LargelyCorrect);
        assert_eq!(store.log().len(), 2);
    }

    #[test]
    fn stale_writer_rejected() {
        let store = JudgmentStore::in_memory([CardId::new("c1")]);
        store.record(j("c1", Verdict::Incorrect), 0).unwrap();
        store.record(j("c1", Verdict::LargelyCorrect), 1).unwrap();
        let err = store.record(j("c1", Verdict::Incorrect), 1).unwrap_err();
        assert!(matches!(err, StoreError::StaleRevision { current: 2, .. }));
    }

    #[test]
    fn unknown_card_rejected() {
        let store = JudgmentStore::in_memory([CardId::new("c1")]);
        assert!(matches!(store.record(j("zz", Verdict::Incorrect), 0), Err(StoreError::UnknownCard(_))));
    }

    #[test]
    fn log_file_replays() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("judgments.jsonl");
        {
            let store = JudgmentStore::open(&path, [CardId::new("c1")]).unwrap();
            store.record(j("c1", Verdict::Incorrect), 0).unwrap();
            store.record(j("c1", Verdict::LargelyCorrect), 1).unwrap();
        }
        let store = JudgmentStore::open(&path, []).unwrap();
        assert_eq!(store.current_revision(&Subject::card("c1")), 2);
        assert_eq!(latest_card_verdicts(&store.log())[&CardId::new("c1")], Verdict::LargelyCorrect);
    }
}
