use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ml::Metrics;

/// Label used for the six-model majority vote in report rows.
pub const ENSEMBLE_NAME: &str = "ENSEMBLE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Evasion,
    Extraction,
    Interference,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Evasion => "evasion",
            AttackKind::Extraction => "extraction",
            AttackKind::Interference => "interference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Baseline,
    Post,
}

/// One `attack_report.csv` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub attack: AttackKind,
    /// Noise sigma, or shift range for extraction; 0 on baseline rows.
    pub param: f64,
    pub model: String,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f1: f64,
    pub precision: f64,
    pub phase: Phase,
}

impl ReportRow {
    pub fn new(attack: AttackKind, param: f64, model: &str, m: &Metrics, phase: Phase) -> Self {
        ReportRow {
            attack,
            param,
            model: model.to_string(),
            accuracy: m.accuracy,
            sensitivity: m.sensitivity,
            specificity: m.specificity,
            f1: m.f1,
            precision: m.precision,
            phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionFidelity {
    pub target: String,
    pub range_db: f64,
    pub queries: usize,
    /// Shadow and target agree on this fraction of the adversarial queries.
    pub agreement: f64,
    pub shadow_test_accuracy: f64,
    pub target_test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: AttackKind,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extraction: Option<ExtractionFidelity>,
}

impl AttackReport {
    pub fn baseline(&self, model: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.phase == Phase::Baseline && r.model == model)
    }

    pub fn post(&self, model: &str, param: f64) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.phase == Phase::Post && r.model == model && r.param == param)
    }

    pub fn post_params(&self) -> Vec<f64> {
        let mut p: Vec<f64> = Vec::new();
        for r in self.rows.iter().filter(|r| r.phase == Phase::Post) {
            if !p.contains(&r.param) {
                p.push(r.param);
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub reports: Vec<AttackReport>,
}

impl SuiteReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.reports.iter().flat_map(|r| &r.rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in self.rows() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text table for terminals.
    pub fn render(&self) -> String {
        let mut s = format!("{:<13} {:>6} {:<9} {:<8} {:>8} {:>8} {:>8}\n", "attack", "param", "model", "phase", "acc", "sens", "spec");
        for r in self.rows() {
            let phase = if r.phase == Phase::Baseline { "baseline" } else { "post" };
            s.push_str(&format!(
                "{:<13} {:>6} {:<9} {:<8} {:>8.4} {:>8.4} {:>8.4}\n",
                r.attack.to_string(),
                r.param,
                r.model,
                phase,
                r.accuracy,
                r.sensitivity,
                r.specificity
            ));
        }
        for rep in &self.reports {
            if let Some(x) = &rep.extraction {
                s.push_str(&format!(
                    "extraction of {} at +/-{} dB over {} queries: agreement {:.4}, shadow test accuracy {:.4} (target {:.4})\n",
                    x.target, x.range_db, x.queries, x.agreement, x.shadow_test_accuracy, x.target_test_accuracy
                ));
            }
        }
        s
    }
}
