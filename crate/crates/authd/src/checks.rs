//! Step 4 (access point overlap) and step 5 (ML proximity) of the login
//! protocol.

use std::collections::HashSet;

use proxauth_core::ml::TrainedModel;
use proxauth_core::rfsim::{Bssid, ScanReport, SiteSurvey};
use serde::{Deserialize, Serialize};

use crate::error::AuthResult;
use crate::policy::Aggregation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub pass: bool,
    pub overlap: usize,
}

/// Counts `(SSID, BSSID)` pairs seen by both scans.
pub fn overlap_check(a: &ScanReport, b: &ScanReport, min_overlap: usize) -> OverlapResult {
    let seen: HashSet<(&str, Bssid)> = a.observations.iter().map(|o| (o.ssid.as_str(), o.bssid)).collect();
    let both: HashSet<(&str, Bssid)> =
        b.observations.iter().map(|o| (o.ssid.as_str(), o.bssid)).filter(|k| seen.contains(k)).collect();
    OverlapResult { pass: both.len() >= min_overlap, overlap: both.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProximityFailure {
    /// Neither scan contained a surveyed access point.
    NoSignal,
    /// The rows were classified, and the aggregate was negative.
    NotColocated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityResult {
    pub pass: bool,
    pub model: String,
    pub positives: usize,
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<ProximityFailure>,
}

/// Encodes every surveyed observation of both scans as a feature row,
/// classifies each row with `model` and aggregates the verdicts.
pub fn proximity_check(
    model: &TrainedModel,
    survey: &SiteSurvey,
    a: &ScanReport,
    b: &ScanReport,
    aggregation: Aggregation,
) -> AuthResult<ProximityResult> {
    let mut rows = survey.feature_rows(a);
    rows.extend(survey.feature_rows(b));
    let model_name = model.algo.name().to_string();
    if rows.is_empty() {
        return Ok(ProximityResult {
            pass: false,
            model: model_name,
            positives: 0,
            rows: 0,
            failure: Some(ProximityFailure::NoSignal),
        });
    }
    let positives = model.predict_batch(&rows)?.iter().filter(|&&l| l == 1).count();
    let pass = aggregation.decide(positives, rows.len());
    Ok(ProximityResult {
        pass,
        model: model_name,
        positives,
        rows: rows.len(),
        failure: (!pass).then_some(ProximityFailure::NotColocated),
    })
}
