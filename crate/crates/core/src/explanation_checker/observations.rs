use std::io::Read;

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize};

use crate::model_graph::Sign;

/// One row of a perturbation-response table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub obs_id: String,
    pub treatment: String,
    #[serde(default)]
    pub dose: String,
    #[serde(deserialize_with = "flexible_bool")]
    pub is_single_drug: bool,
    pub target: String,
    pub antibody: String,
    pub readout_entity: String,
    pub fold_change: f64,
    pub cell_line: String,
    /// +1 for activators; empty means inhibitor.
    #[serde(default, deserialize_with = "optional_sign")]
    pub perturbation_sign: Option<i8>,
}

fn flexible_bool<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    let raw = String::deserialize(d)?;
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "y" | "1" => Ok(true),
        "false" | "no" | "n" | "0" => Ok(false),
        other => Err(serde::de::Error::custom(format!("expected a boolean, got `{other}`"))),
    }
}

fn optional_sign<'de, D: Deserializer<'de>>(d: D) -> Result<Option<i8>, D::Error> {
    let raw = Option::<String>::deserialize(d)?;
    match raw.as_deref().map(str::trim) {
        None | Some("") => Ok(None),
        Some("+1" | "1" | "+") => Ok(Some(1)),
        Some("-1" | "-") => Ok(Some(-1)),
        Some(other) => Err(serde::de::Error::custom(format!("perturbation_sign must be +1 or -1, got `{other}`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub drug: String,
    pub dose: String,
    pub target: String,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Readout {
    pub entity: String,
    pub site: Option<String>,
    pub antibody: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Directional(Sign),
    /// Per-cell-line directions for a finding that compares cell lines.
    Comparative(Vec<(String, Sign)>),
    /// A claim with no checkable structure; always goes to a reviewer.
    Narrative(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub cell_lines: Vec<String>,
    pub perturbation: Perturbation,
    pub readout: Readout,
    pub expected: Expected,
    pub fold_change: Option<f64>,
}

impl Observation {
    /// Expected direction in one cell line.
    pub fn expected_in(&self, cell_line: &str) -> Option<Sign> {
        match &self.expected {
            Expected::Directional(s) => Some(*s),
            Expected::Comparative(parts) => parts.iter().find(|(c, _)| c == cell_line).map(|(_, s)| *s),
            Expected::Narrative(_) => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ObservationError {
    #[error("observation {0}: fold change must be positive")]
    NonpositiveFold(String),
    #[error("observation table: {0}")]
    Csv(#[from] csv::Error),
}

pub fn read_observation_rows(reader: impl Read) -> Result<Vec<ObservationRow>, ObservationError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    Ok(rdr.deserialize().collect::<Result<Vec<ObservationRow>, _>>()?)
}

/// Direction of a fold change: below one is a decrease.
pub fn sign_of_fold(fold: f64) -> Option<Sign> {
    if fold > 1.0 {
        Some(Sign::Positive)
    } else if fold < 1.0 {
        Some(Sign::Negative)
    } else {
        None
    }
}

/// Phospho-site named in an antibody id such as `AKT_pS473_V`.
pub fn antibody_site(antibody: &str) -> Option<String> {
    let re = Regex::new(r"_p([STY]\d+)").expect("valid pattern");
    re.captures(antibody).map(|c| c[1].to_string())
}

/// Single-drug rows whose fold change is above `hi` or below `lo`.
pub fn select_observations(rows: &[ObservationRow], hi: f64, lo: f64) -> Result<Vec<Observation>, ObservationError> {
    let mut out = Vec::new();
    for row in rows {
        if row.fold_change.is_nan() || row.fold_change <= 0.0 {
            return Err(ObservationError::NonpositiveFold(row.obs_id.clone()));
        }
        if !row.is_single_drug || !(row.fold_change > hi || row.fold_change < lo) {
            continue;
        }
        let direction = sign_of_fold(row.fold_change).expect("outside the band so not 1");
        let perturbation_sign = if row.perturbation_sign == Some(1) { Sign::Positive } else { Sign::Negative };
        out.push(Observation {
            id: row.obs_id.clone(),
            cell_lines: vec![row.cell_line.clone()],
            perturbation: Perturbation {
                drug: row.treatment.clone(),
                dose: row.dose.clone(),
                target: row.target.clone(),
                sign: perturbation_sign,
            },
            readout: Readout {
                entity: row.readout_entity.clone(),
                site: antibody_site(&row.antibody),
                antibody: row.antibody.clone(),
            },
            expected: Expected::Directional(direction),
            fold_change: Some(row.fold_change),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "obs_id,treatment,dose,is_single_drug,target,antibody,readout_entity,fold_change,cell_line\n\
        2,AK,10,yes,AKT,AKT_pS473_V,AKT,0.140,SKMEL133\n\
        7,RO,7,yes,PKC,GSK3a_b_pS21,GSK3,1.586,SKMEL133\n\
        x1,AK,10,yes,AKT,S6_pS235_V,S6,1.2,SKMEL133\n\
        x2,AK+PLX,10,no,AKT,S6_pS235_V,S6,0.1,SKMEL133\n";

    #[test]
    fn selects_by_band_and_single_drug() {
        let rows = read_observation_rows(CSV.as_bytes()).unwrap();
        let obs = select_observations(&rows, 1.5, 0.5).unwrap();
        let got: Vec<(&str, Option<Sign>)> = obs.iter().map(|o| (o.id.as_str(), o.expected_in("SKMEL133"))).collect();
        assert_eq!(got, vec![("2", Some(Sign::Negative)), ("7", Some(Sign::Positive))]);
        assert_eq!(obs[0].readout.site.as_deref(), Some("S473"));
        assert_eq!(obs[0].perturbation.sign, Sign::Negative);
    }

    #[test]
    fn rejects_nonpositive_fold() {
        let mut rows = read_observation_rows(CSV.as_bytes()).unwrap();
        rows[0].fold_change = 0.0;
        assert!(matches!(select_observations(&rows, 1.5, 0.5), Err(ObservationError::NonpositiveFold(_))));
    }
}
