use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{parse_card_value, CardId, IndexCard, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    MachineOnly,
    HumanMachine,
    HumanOnly,
}

impl Condition {
    /// Days allotted to produce the cards under each condition.
    pub fn conventional_days(self) -> Option<u32> {
        match self {
            Condition::MachineOnly => Some(7),
            Condition::HumanMachine => Some(3),
            Condition::HumanOnly => None,
        }
    }
}

/// One team's cards, grouped by paper.
#[derive(Debug, Clone, PartialEq)]
pub struct Submission {
    pub team_id: String,
    pub condition: Condition,
    pub cards: BTreeMap<String, Vec<IndexCard>>,
}

impl Submission {
    pub fn new(team_id: impl Into<String>, condition: Condition) -> Self {
        Submission { team_id: team_id.into(), condition, cards: BTreeMap::new() }
    }

    pub fn push(&mut self, card: IndexCard) {
        self.cards.entry(card.paper_id.clone()).or_default().push(card);
    }

    pub fn all_cards(&self) -> impl Iterator<Item = &IndexCard> {
        self.cards.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.cards.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// At most one card per (paper, rank).
    pub fn rank_conflicts(&self) -> Vec<(String, u8, Vec<CardId>)> {
        let mut out = Vec::new();
        for (paper, cards) in &self.cards {
            let mut by_rank: BTreeMap<u8, Vec<CardId>> = BTreeMap::new();
            for c in cards {
                if let Some(r) = c.rank {
                    by_rank.entry(r).or_default().push(c.id.clone());
                }
            }
            out.extend(by_rank.into_iter().filter(|(_, ids)| ids.len() > 1).map(|(r, ids)| (paper.clone(), r, ids)));
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SubmissionError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{} file(s) failed validation", .0.len())]
    Invalid(Vec<(PathBuf, Vec<ValidationError>)>),
}

#[derive(Deserialize)]
struct Manifest {
    team_id: Option<String>,
    condition: Option<Condition>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SubmissionError + '_ {
    move |source| SubmissionError::Io { path: path.to_path_buf(), source }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, SubmissionError> {
    let mut entries: Vec<PathBuf> =
        fs::read_dir(dir).map_err(io_err(dir))?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    Ok(entries)
}

/// Loads a team directory laid out as `team/<paper_id>/*.card.json`.
///
/// An optional `team/submission.json` supplies `team_id` and `condition`
/// (default: directory name, machine-only). Every failing file is reported.
pub fn load_submission(dir: &Path) -> Result<Submission, SubmissionError> {
    let manifest_path = dir.join("submission.json");
    let manifest = if manifest_path.exists() {
        let raw = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        match serde_json::from_str::<Manifest>(&raw) {
            Ok(m) => m,
            Err(e) => {
                return Err(SubmissionError::Invalid(vec![(
                    manifest_path,
                    vec![ValidationError::MalformedDocument(e.to_string())],
                )]))
            }
        }
    } else {
        Manifest { team_id: None, condition: None }
    };
    let team_id = manifest
        .team_id
        .unwrap_or_else(|| dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "team".into()));
    let mut submission = Submission::new(team_id, manifest.condition.unwrap_or(Condition::MachineOnly));
    let mut failures = Vec::new();

    for paper_dir in sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()) {
        let paper_id = paper_dir.file_name().unwrap().to_string_lossy().into_owned();
        for file in sorted_entries(&paper_dir)? {
            let Some(name) = file.file_name().map(|n| n.to_string_lossy().into_owned()) else { continue };
            let Some(stem) = name.strip_suffix(".card.json") else { continue };
            let raw = fs::read_to_string(&file).map_err(io_err(&file))?;
            let parsed = serde_json::from_str::<Value>(&raw)
                .map_err(|e| vec![ValidationError::MalformedDocument(e.to_string())])
                .and_then(|v| parse_card_value(&v, &format!("{paper_id}/{stem}")).map_err(|e| e.0));
            match parsed {
                Ok(card) if card.paper_id != paper_id => failures.push((
                    file,
                    vec![ValidationError::Constraint {
                        path: "pmc_id".into(),
                        message: format!("card is for {} but filed under {paper_id}", card.paper_id),
                    }],
                )),
                Ok(card) => submission.push(card),
                Err(errors) => failures.push((file, errors)),
            }
        }
    }

    for (paper, rank, ids) in submission.rank_conflicts() {
        let names: Vec<&str> = ids.iter().map(CardId::as_str).collect();
        failures.push((
            dir.join(&paper),
            vec![ValidationError::Constraint {
                path: "rank".into(),
                message: format!("rank {rank} used by {} cards: {}", ids.len(), names.join(", ")),
            }],
        ));
    }

    if failures.is_empty() {
        Ok(submission)
    } else {
        Err(SubmissionError::Invalid(failures))
    }
}
