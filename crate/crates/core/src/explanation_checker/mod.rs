//! Checking submitted explanations of perturbation experiments against a
//! mechanistic model.
//!
//! An explanation is a set of edge paths from the drug target to the
//! measured phosphoprotein. It is plausible when six criteria hold:
//! the predicted direction matches the data (C1), the paths connect target
//! to readout (C2), modifications are made by plausible enzymes (C3), every
//! edge is backed by evidence (C4), no path runs through a knocked-out gene
//! (C5), and one model serves all explanations in a cell line (C6).

mod grid;
mod observations;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::card::ExactKind;
use crate::model_graph::{CellContext, MechModel, Provenance, Role, Sign};

pub use grid::{summarize_results_grid, GridCell, GridError, GridRow, ResultsGrid};
pub use observations::{
    antibody_site, read_observation_rows, select_observations, sign_of_fold, Expected, Observation, ObservationError,
    ObservationRow, Perturbation, Readout,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submission: Option<String>,
    pub observation_id: String,
    pub model_id: String,
    pub cell_line: String,
    /// Each path is a list of edge ids.
    pub paths: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrative: Option<String>,
    /// Direction the team's own reasoning or simulation predicted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_direction: Option<Sign>,
}

pub fn load_explanations(path: &Path) -> Result<Vec<Explanation>, CheckError> {
    let raw = std::fs::read_to_string(path).map_err(|e| CheckError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CheckError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("edge {0} has no sign")]
    UnsignedEdge(String),
    #[error("path breaks before edge {0}")]
    DisconnectedPath(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("explanation refers to unknown edge {0}")]
    UnknownEdge(String),
    #[error("explanation is for observation {found}, not {expected}")]
    UnknownObservation { expected: String, found: String },
    #[error("{0}")]
    Input(String),
}

/// Nodes visited by a path that starts at `start`. Binding edges may be
/// walked in either direction.
pub fn walk_from<'m>(model: &'m MechModel, path: &[String], start: &'m str) -> Result<Vec<&'m str>, PathError> {
    let mut nodes = vec![start];
    for id in path {
        let e = model.interaction(id).ok_or_else(|| PathError::UnknownEdge(id.clone()))?;
        let here = *nodes.last().expect("non-empty");
        let next = if e.source == here {
            e.target.as_str()
        } else if e.kind == ExactKind::Binds && e.target == here {
            e.source.as_str()
        } else {
            return Err(PathError::DisconnectedPath(e.id.clone()));
        };
        nodes.push(next);
    }
    Ok(nodes)
}

/// Nodes visited by a path, first to last. A leading binding edge is tried
/// both ways round.
pub fn walk<'m>(model: &'m MechModel, path: &[String]) -> Result<Vec<&'m str>, PathError> {
    let Some(first_id) = path.first() else { return Ok(Vec::new()) };
    let first = model.interaction(first_id).ok_or_else(|| PathError::UnknownEdge(first_id.clone()))?;
    let forward = walk_from(model, path, &first.source);
    if forward.is_err() && first.kind == ExactKind::Binds {
        if let Ok(nodes) = walk_from(model, path, &first.target) {
            return Ok(nodes);
        }
    }
    forward
}

/// Sign at the end of a path: the perturbation sign times every edge sign.
/// An empty path (readout is the target) gives the perturbation sign.
pub fn propagate_sign(model: &MechModel, path: &[String], perturbation: Sign) -> Result<Sign, PathError> {
    walk(model, path)?;
    let mut sign = perturbation;
    for id in path {
        let e = model.interaction(id).ok_or_else(|| PathError::UnknownEdge(id.clone()))?;
        sign = sign * e.sign.ok_or_else(|| PathError::UnsignedEdge(id.clone()))?;
    }
    Ok(sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Criterion {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl Criterion {
    pub const ALL: [Criterion; 6] =
        [Criterion::C1, Criterion::C2, Criterion::C3, Criterion::C4, Criterion::C5, Criterion::C6];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionResult {
    Pass,
    Fail(String),
    NeedsHumanReview(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Plausible,
    NotPlausible,
    Pending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlausibilityVerdict {
    pub explanation_id: String,
    pub observation_id: String,
    pub criteria: BTreeMap<Criterion, CriterionResult>,
    pub overall: Overall,
}

impl PlausibilityVerdict {
    fn new(expl: &Explanation, criteria: BTreeMap<Criterion, CriterionResult>) -> Self {
        let overall = overall_of(criteria.values());
        PlausibilityVerdict {
            explanation_id: expl.id.clone(),
            observation_id: expl.observation_id.clone(),
            criteria,
            overall,
        }
    }

    pub fn failed(&self, c: Criterion) -> bool {
        matches!(self.criteria.get(&c), Some(CriterionResult::Fail(_)))
    }

    /// Replaces one criterion's result and recomputes the overall verdict.
    pub fn set(&mut self, c: Criterion, result: CriterionResult) {
        self.criteria.insert(c, result);
        self.overall = overall_of(self.criteria.values());
    }
}

fn overall_of<'a>(results: impl IntoIterator<Item = &'a CriterionResult>) -> Overall {
    let mut pending = false;
    for r in results {
        match r {
            CriterionResult::Fail(_) => return Overall::NotPlausible,
            CriterionResult::NeedsHumanReview(_) => pending = true,
            CriterionResult::Pass => {}
        }
    }
    if pending {
        Overall::Pending
    } else {
        Overall::Plausible
    }
}

/// Conjunction of sub-verdicts, as used for findings that compare cell lines.
pub fn combine_overall(parts: impl IntoIterator<Item = Overall>) -> Overall {
    let mut out = Overall::Plausible;
    for p in parts {
        match p {
            Overall::NotPlausible => return Overall::NotPlausible,
            Overall::Pending => out = Overall::Pending,
            Overall::Plausible => {}
        }
    }
    out
}

/// Reviewer decisions available to the checker.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reviews {
    /// Whether an edge's evidence supports it, keyed by edge id.
    pub edge_support: BTreeMap<String, bool>,
    /// Reviewer resolution of a criterion that needed review.
    pub criteria: BTreeMap<Criterion, bool>,
}

/// Roles per entity id, layered over the roles recorded in the model.
pub type EntityRoleTable = BTreeMap<String, BTreeSet<Role>>;

fn roles_of<'a>(model: &'a MechModel, roles: &'a EntityRoleTable, entity: &str) -> BTreeSet<Role> {
    let mut out: BTreeSet<Role> = roles.get(entity).cloned().unwrap_or_default();
    if let Some(e) = model.entity(entity) {
        out.extend(e.roles.iter().copied());
    }
    out
}

fn check_direction(
    model: &MechModel,
    obs: &Observation,
    expl: &Explanation,
    target_is_readout: bool,
) -> CriterionResult {
    let expected = match &obs.expected {
        Expected::Narrative(claim) => return CriterionResult::NeedsHumanReview(format!("narrative claim: {claim}")),
        _ => match obs.expected_in(&expl.cell_line) {
            Some(s) => s,
            None => return CriterionResult::Fail(format!("observation has no direction for {}", expl.cell_line)),
        },
    };
    let mut predicted = BTreeSet::new();
    if expl.paths.is_empty() && target_is_readout {
        predicted.insert(obs.perturbation.sign);
    }
    for path in &expl.paths {
        match propagate_sign(model, path, obs.perturbation.sign) {
            Ok(s) => {
                predicted.insert(s);
            }
            Err(PathError::UnsignedEdge(e)) => {
                return CriterionResult::NeedsHumanReview(format!("direction relies on unsigned edge {e}"))
            }
            Err(e) => return CriterionResult::Fail(format!("no prediction: {e}")),
        }
    }
    if predicted.len() > 1 {
        return CriterionResult::Fail("paths predict opposite directions".into());
    }
    let Some(&sign) = predicted.iter().next() else {
        return CriterionResult::Fail("no path to predict from".into());
    };
    if sign != expected {
        return CriterionResult::Fail(format!("model predicts {sign}, observed {expected}"));
    }
    match expl.predicted_direction {
        Some(p) if p != expected => {
            CriterionResult::Fail(format!("submitted prediction {p} contradicts observed {expected}"))
        }
        Some(p) if p != sign => {
            CriterionResult::NeedsHumanReview(format!("submitted prediction {p} differs from path sign {sign}"))
        }
        _ => CriterionResult::Pass,
    }
}

fn check_connectivity(
    model: &MechModel,
    expl: &Explanation,
    target: Option<&str>,
    readout: Option<&str>,
) -> CriterionResult {
    let (Some(target), Some(readout)) = (target, readout) else {
        return CriterionResult::Fail("perturbation target or readout is not in the model".into());
    };
    if expl.paths.is_empty() {
        return if target == readout { CriterionResult::Pass } else { CriterionResult::Fail("no path given".into()) };
    }
    for (i, path) in expl.paths.iter().enumerate() {
        let nodes = match walk(model, path) {
            Ok(n) => n,
            Err(e) => return CriterionResult::Fail(format!("path {}: {e}", i + 1)),
        };
        if nodes.is_empty() {
            if target != readout {
                return CriterionResult::Fail(format!("path {} is empty", i + 1));
            }
            continue;
        }
        let ends_ok = walk_from(model, path, target).is_ok_and(|n| n.last() == Some(&readout));
        if !ends_ok {
            return CriterionResult::Fail(format!(
                "path {} runs {} to {}, not {} to {}",
                i + 1,
                nodes[0],
                nodes[nodes.len() - 1],
                target,
                readout
            ));
        }
    }
    CriterionResult::Pass
}

fn check_commonsense(model: &MechModel, expl: &Explanation, roles: &EntityRoleTable) -> CriterionResult {
    let mut unknown = Vec::new();
    for id in expl.paths.iter().flatten() {
        let Some(e) = model.interaction(id) else { continue };
        let required = match e.kind {
            ExactKind::AddsModification if e.is_phosphorylation() => Role::Kinase,
            ExactKind::InhibitsModification if e.is_phosphorylation() => Role::Phosphatase,
            _ => continue,
        };
        let have = roles_of(model, roles, &e.source);
        if have.is_empty() {
            unknown.push(e.source.clone());
        } else if !have.contains(&required) {
            let verb = if required == Role::Kinase { "phosphorylates" } else { "dephosphorylates" };
            return CriterionResult::Fail(format!("{} {verb} in edge {} but is not a {:?}", e.source, e.id, required));
        }
    }
    if unknown.is_empty() {
        CriterionResult::Pass
    } else {
        unknown.dedup();
        CriterionResult::NeedsHumanReview(format!("no role information for {}", unknown.join(", ")))
    }
}

fn check_evidence(model: &MechModel, expl: &Explanation, reviews: &Reviews) -> CriterionResult {
    let mut pending = Vec::new();
    let mut seen = BTreeSet::new();
    for id in expl.paths.iter().flatten() {
        if !seen.insert(id) {
            continue;
        }
        let Some(e) = model.interaction(id) else { continue };
        if e.provenance.is_empty() {
            return CriterionResult::Fail(format!("edge {id} has no provenance"));
        }
        let curated = e.provenance.iter().any(|p| !matches!(p, Provenance::MachineReading { .. }));
        if curated {
            continue;
        }
        let has_evidence = e
            .provenance
            .iter()
            .any(|p| matches!(p, Provenance::MachineReading { evidence, .. } if !evidence.is_empty()));
        if !has_evidence {
            return CriterionResult::Fail(format!("edge {id} has no evidence sentences"));
        }
        match reviews.edge_support.get(id) {
            Some(true) => {}
            Some(false) => return CriterionResult::Fail(format!("evidence does not support edge {id}")),
            None => pending.push(id.clone()),
        }
    }
    if pending.is_empty() {
        CriterionResult::Pass
    } else {
        CriterionResult::NeedsHumanReview(format!("confirm evidence for {}", pending.join(", ")))
    }
}

fn check_context(model: &MechModel, expl: &Explanation, context: Option<&CellContext>) -> CriterionResult {
    let Some(context) = context else {
        return CriterionResult::NeedsHumanReview(format!("no context for cell line {}", expl.cell_line));
    };
    for path in &expl.paths {
        let Ok(nodes) = walk(model, path) else { continue };
        if let Some(ko) = nodes.iter().find(|n| context.knockouts.contains(**n)) {
            return CriterionResult::Fail(format!("path passes through {ko}, knocked out in {}", context.cell_line));
        }
    }
    CriterionResult::Pass
}

/// Evaluates the six criteria for one explanation. Criteria that need a
/// reviewer come back as `NeedsHumanReview` unless `reviews` resolves them.
/// C6 only checks that the explanation names this model; use
/// [`check_cell_line_consistency`] across a cell line's explanations.
pub fn check_plausibility(
    model: &MechModel,
    context: Option<&CellContext>,
    obs: &Observation,
    expl: &Explanation,
    roles: &EntityRoleTable,
    reviews: &Reviews,
) -> Result<PlausibilityVerdict, CheckError> {
    if expl.observation_id != obs.id {
        return Err(CheckError::UnknownObservation { expected: obs.id.clone(), found: expl.observation_id.clone() });
    }
    if let Some(missing) = expl.paths.iter().flatten().find(|id| model.interaction(id).is_none()) {
        return Err(CheckError::UnknownEdge(missing.clone()));
    }
    let target = model.resolve_entity(&obs.perturbation.target).map(|e| e.id.as_str());
    let readout = model.resolve_entity(&obs.readout.entity).map(|e| e.id.as_str());
    let target_is_readout = target.is_some() && target == readout;

    let mut criteria = BTreeMap::new();
    criteria.insert(Criterion::C1, check_direction(model, obs, expl, target_is_readout));
    criteria.insert(Criterion::C2, check_connectivity(model, expl, target, readout));
    criteria.insert(Criterion::C3, check_commonsense(model, expl, roles));
    criteria.insert(Criterion::C4, check_evidence(model, expl, reviews));
    criteria.insert(Criterion::C5, check_context(model, expl, context));
    criteria.insert(
        Criterion::C6,
        if expl.model_id == model.id {
            CriterionResult::Pass
        } else {
            CriterionResult::Fail(format!("explanation names model {}, checked against {}", expl.model_id, model.id))
        },
    );
    for (c, result) in criteria.iter_mut() {
        if let (CriterionResult::NeedsHumanReview(detail), Some(&accepted)) = (&*result, reviews.criteria.get(c)) {
            *result = if accepted {
                CriterionResult::Pass
            } else {
                CriterionResult::Fail(format!("reviewer rejected: {detail}"))
            };
        }
    }
    Ok(PlausibilityVerdict::new(expl, criteria))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConsistencyViolation {
    DifferentModels { cell_line: String, first: String, second: String, first_model: String, second_model: String },
    EdgeSignConflict { cell_line: String, source: String, target: String, positive: String, negative: String },
}

impl ConsistencyViolation {
    pub fn explanations(&self) -> Vec<&str> {
        match self {
            ConsistencyViolation::DifferentModels { first, second, .. } => vec![first, second],
            ConsistencyViolation::EdgeSignConflict { positive, negative, .. } => vec![positive, negative],
        }
    }
}

/// Explanations in the same cell line must share one model, and must not
/// use the same source-to-target step with opposite signs.
pub fn check_cell_line_consistency(explanations: &[Explanation], models: &[&MechModel]) -> Vec<ConsistencyViolation> {
    let by_id: BTreeMap<&str, &MechModel> = models.iter().map(|m| (m.id.as_str(), *m)).collect();
    let mut groups: BTreeMap<&str, Vec<&Explanation>> = BTreeMap::new();
    for e in explanations {
        groups.entry(e.cell_line.as_str()).or_default().push(e);
    }
    let mut out = Vec::new();
    for (cell_line, group) in groups {
        let first = group[0];
        for other in &group[1..] {
            if other.model_id != first.model_id {
                out.push(ConsistencyViolation::DifferentModels {
                    cell_line: cell_line.to_string(),
                    first: first.id.clone(),
                    second: other.id.clone(),
                    first_model: first.model_id.clone(),
                    second_model: other.model_id.clone(),
                });
            }
        }
        let mut uses: BTreeMap<(String, String), BTreeMap<Sign, String>> = BTreeMap::new();
        for e in &group {
            let Some(model) = by_id.get(e.model_id.as_str()) else { continue };
            for id in e.paths.iter().flatten() {
                if let Some(x) = model.interaction(id) {
                    if let Some(s) = x.sign {
                        uses.entry((x.source.clone(), x.target.clone()))
                            .or_default()
                            .entry(s)
                            .or_insert_with(|| e.id.clone());
                    }
                }
            }
        }
        for ((source, target), signs) in uses {
            if let (Some(p), Some(n)) = (signs.get(&Sign::Positive), signs.get(&Sign::Negative)) {
                out.push(ConsistencyViolation::EdgeSignConflict {
                    cell_line: cell_line.to_string(),
                    source,
                    target,
                    positive: p.clone(),
                    negative: n.clone(),
                });
            }
        }
    }
    out
}

/// Marks C6 failed on every verdict whose explanation is in a violation.
pub fn apply_consistency(verdicts: &mut [PlausibilityVerdict], violations: &[ConsistencyViolation]) {
    for v in violations {
        for id in v.explanations() {
            for verdict in verdicts.iter_mut().filter(|x| x.explanation_id == id) {
                verdict.set(Criterion::C6, CriterionResult::Fail(format!("{v:?}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_graph::{ModelEntity, ModelInteraction};

    fn edge(id: &str, s: &str, t: &str, kind: ExactKind) -> ModelInteraction {
        ModelInteraction {
            id: id.into(),
            source: s.into(),
            target: t.into(),
            kind,
            modification: None,
            effect: None,
            sign: crate::model_graph::derive_sign(kind, None),
            provenance: vec![Provenance::CuratedDatabase { db: "db".into(), record: id.into() }],
        }
    }

    fn model(edges: Vec<ModelInteraction>) -> MechModel {
        let mut ids: BTreeSet<String> = BTreeSet::new();
        for e in &edges {
            ids.insert(e.source.clone());
            ids.insert(e.target.clone());
        }
        let entities = ids
            .into_iter()
            .map(|id| ModelEntity { name: id.clone(), id, grounding: None, roles: BTreeSet::new() })
            .collect();
        MechModel::new("m", entities, edges, vec![]).unwrap()
    }

    fn p(ids: &[&str]) -> Vec<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sign_product() {
        let m = model(vec![
            edge("e1", "mTOR", "p70S6K", ExactKind::IncreasesActivity),
            edge("e2", "p70S6K", "S6", ExactKind::IncreasesPhosphoForm),
            edge("e3", "X", "S6", ExactKind::DecreasesActivity),
        ]);
        assert_eq!(propagate_sign(&m, &p(&["e1", "e2"]), Sign::Negative), Ok(Sign::Negative));
        assert_eq!(propagate_sign(&m, &[], Sign::Negative), Ok(Sign::Negative));
        assert_eq!(
            propagate_sign(&m, &p(&["e2", "e1"]), Sign::Negative),
            Err(PathError::DisconnectedPath("e1".into()))
        );
        assert_eq!(propagate_sign(&m, &p(&["zz"]), Sign::Negative), Err(PathError::UnknownEdge("zz".into())));
    }

    #[test]
    fn translocation_is_unsigned() {
        let m = model(vec![edge("t", "A", "B", ExactKind::Translocates)]);
        assert_eq!(propagate_sign(&m, &p(&["t"]), Sign::Negative), Err(PathError::UnsignedEdge("t".into())));
    }

    #[test]
    fn binding_walks_both_ways() {
        let m = model(vec![edge("b", "B", "A", ExactKind::Binds), edge("x", "B", "C", ExactKind::IncreasesActivity)]);
        assert_eq!(walk(&m, &p(&["b", "x"])).unwrap(), vec!["A", "B", "C"]);
    }

    #[test]
    fn overall_rules() {
        use CriterionResult::*;
        assert_eq!(overall_of(&[Pass, Pass]), Overall::Plausible);
        assert_eq!(overall_of(&[Pass, NeedsHumanReview("x".into())]), Overall::Pending);
        assert_eq!(overall_of(&[NeedsHumanReview("x".into()), Fail("y".into())]), Overall::NotPlausible);
        assert_eq!(combine_overall([Overall::Plausible, Overall::Pending]), Overall::Pending);
    }
}
