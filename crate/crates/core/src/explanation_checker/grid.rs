use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Criterion, Overall, PlausibilityVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridCell {
    Supported,
    Unsupported,
    IncorrectPrediction,
    NotAttempted,
}

impl GridCell {
    pub fn of(v: &PlausibilityVerdict) -> Option<Self> {
        match v.overall {
            Overall::Plausible => Some(GridCell::Supported),
            Overall::Pending => None,
            Overall::NotPlausible if v.failed(Criterion::C1) => Some(GridCell::IncorrectPrediction),
            Overall::NotPlausible => Some(GridCell::Unsupported),
        }
    }

    /// One-letter code: S, N, I, or blank.
    pub fn code(self) -> &'static str {
        match self {
            GridCell::Supported => "S",
            GridCell::Unsupported => "N",
            GridCell::IncorrectPrediction => "I",
            GridCell::NotAttempted => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridRow {
    pub submission: String,
    pub cells: Vec<GridCell>,
    pub plausible: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultsGrid {
    pub observations: Vec<String>,
    pub rows: Vec<GridRow>,
    /// Per observation: some submission explained it plausibly.
    pub coverage: Vec<bool>,
    pub covered: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("{} verdict(s) still pending review", .0.len())]
    PendingVerdicts(Vec<(String, String)>),
}

/// Submission-by-observation grid. `verdicts` maps (submission, observation)
/// to the verdict for that pair; missing pairs are not attempted. Rows are
/// ordered by plausible count, then submission id.
pub fn summarize_results_grid(
    observations: &[String],
    verdicts: &BTreeMap<(String, String), PlausibilityVerdict>,
) -> Result<ResultsGrid, GridError> {
    let pending: Vec<(String, String)> =
        verdicts.iter().filter(|(_, v)| v.overall == Overall::Pending).map(|(k, _)| k.clone()).collect();
    if !pending.is_empty() {
        return Err(GridError::PendingVerdicts(pending));
    }
    let submissions: BTreeSet<&String> = verdicts.keys().map(|(s, _)| s).collect();
    let mut rows: Vec<GridRow> = submissions
        .into_iter()
        .map(|s| {
            let cells: Vec<GridCell> = observations
                .iter()
                .map(|o| verdicts.get(&(s.clone(), o.clone())).and_then(GridCell::of).unwrap_or(GridCell::NotAttempted))
                .collect();
            let plausible = cells.iter().filter(|c| **c == GridCell::Supported).count() as u64;
            GridRow { submission: s.clone(), cells, plausible }
        })
        .collect();
    rows.sort_by(|a, b| b.plausible.cmp(&a.plausible).then_with(|| a.submission.cmp(&b.submission)));
    let coverage: Vec<bool> =
        (0..observations.len()).map(|i| rows.iter().any(|r| r.cells[i] == GridCell::Supported)).collect();
    let covered = coverage.iter().filter(|c| **c).count() as u64;
    Ok(ResultsGrid { observations: observations.to_vec(), rows, coverage, covered })
}
