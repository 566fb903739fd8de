//! Evasion, model-extraction and RF-interference experiments against the
//! trained classifiers, plus the majority-ensemble defense.

mod perturb;
mod report;

pub use perturb::{evasion_perturb, interference_perturb, rssi_uniform_shift};
pub use report::{AttackKind, AttackReport, ExtractionFidelity, Phase, ReportRow, SuiteReport, ENSEMBLE_NAME};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledSet;
use crate::error::{Error, Result};
use crate::ml::{evaluate, metrics_from_cm, train, Algo, ConfusionMatrix, Hyperparams, Metrics, TrainedModel};
use crate::seed::{derive_seed, rng_from_seed};

pub const DEFAULT_EVASION_SIGMAS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_EXTRACTION_RANGE_DB: f64 = 20.0;
pub const DEFAULT_INTERFERENCE_SIGMA: f64 = 2.0;

fn default_sigmas() -> Vec<f64> {
    DEFAULT_EVASION_SIGMAS.to_vec()
}
fn default_range() -> f64 {
    DEFAULT_EXTRACTION_RANGE_DB
}
fn default_target() -> Algo {
    Algo::Rf
}
fn default_interference() -> f64 {
    DEFAULT_INTERFERENCE_SIGMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttackSpec {
    Evasion {
        #[serde(default = "default_sigmas")]
        sigmas: Vec<f64>,
    },
    Extraction {
        #[serde(default = "default_range")]
        range_db: f64,
        /// Number of adversarial queries; `None` uses every dataset row.
        #[serde(default)]
        query_budget: Option<usize>,
        #[serde(default = "default_target")]
        target: Algo,
    },
    Interference {
        #[serde(default = "default_interference")]
        sigma: f64,
    },
}

impl AttackSpec {
    pub fn kind(&self) -> AttackKind {
        match self {
            AttackSpec::Evasion { .. } => AttackKind::Evasion,
            AttackSpec::Extraction { .. } => AttackKind::Extraction,
            AttackSpec::Interference { .. } => AttackKind::Interference,
        }
    }

    /// The three experiments with their default parameters.
    pub fn defaults() -> Vec<AttackSpec> {
        vec![
            AttackSpec::Evasion { sigmas: default_sigmas() },
            AttackSpec::Extraction { range_db: default_range(), query_budget: None, target: Algo::Rf },
            AttackSpec::Interference { sigma: default_interference() },
        ]
    }
}

/// Majority vote of `models`; an even split denies.
pub fn ensemble_predict(models: &[TrainedModel], x: &[f64]) -> Result<u8> {
    let mut pos = 0;
    for m in models {
        pos += usize::from(m.predict(x)?);
    }
    Ok(u8::from(2 * pos > models.len()))
}

pub fn evaluate_ensemble(models: &[TrainedModel], data: &LabeledSet) -> Result<Metrics> {
    if models.is_empty() {
        return Err(Error::EmptyInput("ensemble has no members".into()));
    }
    let predicted = data.rows.par_iter().map(|r| ensemble_predict(models, r)).collect::<Result<Vec<u8>>>()?;
    metrics_from_cm(&ConfusionMatrix::from_predictions(&data.labels, &predicted))
}

fn metric_rows(
    attack: AttackKind,
    param: f64,
    phase: Phase,
    models: &[TrainedModel],
    data: &LabeledSet,
) -> Result<Vec<ReportRow>> {
    let mut rows = models
        .par_iter()
        .map(|m| Ok(ReportRow::new(attack, param, m.algo.name(), &evaluate(m, data)?.1, phase)))
        .collect::<Result<Vec<_>>>()?;
    rows.push(ReportRow::new(attack, param, ENSEMBLE_NAME, &evaluate_ensemble(models, data)?, phase));
    Ok(rows)
}

/// Evaluates every model on clean `test` (the `sigma = 0` baseline) and on an
/// RSSI-noised copy for each sigma. All models see the same noisy copy.
pub fn run_evasion(models: &[TrainedModel], test: &LabeledSet, sigmas: &[f64], seed: u64) -> Result<AttackReport> {
    let kind = AttackKind::Evasion;
    let mut rows = metric_rows(kind, 0.0, Phase::Baseline, models, test)?;
    for (k, &sigma) in sigmas.iter().enumerate() {
        let noisy = evasion_perturb(test, sigma, derive_seed(seed, k as u64))?;
        rows.extend(metric_rows(kind, sigma, Phase::Post, models, &noisy)?);
    }
    Ok(AttackReport { attack: kind, rows, extraction: None })
}

pub fn run_interference(models: &[TrainedModel], test: &LabeledSet, sigma: f64, seed: u64) -> Result<AttackReport> {
    let kind = AttackKind::Interference;
    let mut rows = metric_rows(kind, 0.0, Phase::Baseline, models, test)?;
    let noisy = interference_perturb(test, sigma, seed)?;
    rows.extend(metric_rows(kind, sigma, Phase::Post, models, &noisy)?);
    Ok(AttackReport { attack: kind, rows, extraction: None })
}

/// Model extraction against `target`.
///
/// Queries are rows of `source` (all of them, or a seeded subset of
/// `query_budget`) with RSSI shifted by `Uniform(+-range_db)`; each query is
/// labeled by the target and a shadow RF is fitted to those labels. In the
/// report the target's post-attack row is the shadow's clean-test
/// performance, since that is what the adversary walks away with; every
/// other deployed model, and the majority ensemble, is re-evaluated
/// unchanged.
#[allow(clippy::too_many_arguments)]
pub fn extraction_attack(
    target: &TrainedModel,
    models: &[TrainedModel],
    source: &LabeledSet,
    test: &LabeledSet,
    range_db: f64,
    query_budget: Option<usize>,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<(TrainedModel, AttackReport)> {
    let kind = AttackKind::Extraction;
    let base = match query_budget {
        Some(b) if b < source.len() => {
            let mut idx: Vec<usize> = (0..source.len()).collect();
            idx.shuffle(&mut rng_from_seed(derive_seed(seed, 0)));
            idx.truncate(b);
            idx.sort_unstable();
            source.subset(&idx)
        }
        _ => source.clone(),
    };
    if base.is_empty() {
        return Err(Error::EmptyInput("extraction query set is empty".into()));
    }
    let shifted = rssi_uniform_shift(&base, range_db, derive_seed(seed, 1))?;
    let answers = target.predict_batch(&shifted.rows)?;
    let queries = LabeledSet::new(shifted.rows, answers)?;
    let shadow = train(Algo::Rf, &queries, hyperparams, derive_seed(seed, 2))?;
    let agree = shadow.predict_batch(&queries.rows)?.iter().zip(&queries.labels).filter(|(a, b)| a == b).count();
    let agreement = agree as f64 / queries.len() as f64;

    let mut rows = metric_rows(kind, 0.0, Phase::Baseline, models, test)?;
    let shadow_metrics = evaluate(&shadow, test)?.1;
    let target_metrics = evaluate(target, test)?.1;
    for m in models {
        let metrics = if m.algo == target.algo { shadow_metrics } else { evaluate(m, test)?.1 };
        rows.push(ReportRow::new(kind, range_db, m.algo.name(), &metrics, Phase::Post));
    }
    rows.push(ReportRow::new(kind, range_db, ENSEMBLE_NAME, &evaluate_ensemble(models, test)?, Phase::Post));
    let fidelity = ExtractionFidelity {
        target: target.algo.name().into(),
        range_db,
        queries: queries.len(),
        agreement,
        shadow_test_accuracy: shadow_metrics.accuracy,
        target_test_accuracy: target_metrics.accuracy,
    };
    Ok((shadow, AttackReport { attack: kind, rows, extraction: Some(fidelity) }))
}

/// Runs every spec against `models` (trained on `train`) and collects the
/// reports. Extraction queries are drawn from `train` and `test` together.
pub fn run_suite(
    models: &[TrainedModel],
    train_set: &LabeledSet,
    test: &LabeledSet,
    specs: &[AttackSpec],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<SuiteReport> {
    if specs.is_empty() {
        return Err(Error::Config("attack suite needs at least one spec".into()));
    }
    if models.is_empty() {
        return Err(Error::Config("attack suite needs at least one model".into()));
    }
    for m in models {
        m.validate().map_err(|e| Error::InvalidState(format!("model {} is not usable: {e}", m.algo)))?;
    }
    let mut reports = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let s = derive_seed(seed, 100 + i as u64);
        reports.push(match spec {
            AttackSpec::Evasion { sigmas } => run_evasion(models, test, sigmas, s)?,
            AttackSpec::Interference { sigma } => run_interference(models, test, *sigma, s)?,
            AttackSpec::Extraction { range_db, query_budget, target } => {
                let t = models
                    .iter()
                    .find(|m| m.algo == *target)
                    .ok_or_else(|| Error::Config(format!("extraction target {target} is not in the model list")))?;
                let source = train_set.concat(test);
                extraction_attack(t, models, &source, test, *range_db, *query_budget, hyperparams, s)?.1
            }
        });
    }
    Ok(SuiteReport { seed, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{split, ModelParams};
    use crate::rfsim::{build_environment, generate_dataset, SimConfig};

    fn fixture() -> (Vec<TrainedModel>, LabeledSet, LabeledSet) {
        let env = build_environment(&SimConfig::default(), 11).unwrap();
        let data = generate_dataset(&env, 300, 300, 11).unwrap().to_labeled();
        let (tr, te) = split(&data, 0.2, 11).unwrap();
        let hp = Hyperparams { rf: crate::ml::ForestParams { n_trees: 15, ..Default::default() }, ..Default::default() };
        let models = Algo::ALL.iter().map(|&a| train(a, &tr, &hp, 1).unwrap()).collect();
        (models, tr, te)
    }

    #[test]
    fn tie_denies() {
        let (models, _, te) = fixture();
        // three always-positive and three always-negative stand-ins
        let x = &te.rows[0];
        let mut fake = Vec::new();
        for (i, m) in models.iter().enumerate() {
            let mut m = m.clone();
            m.algo = Algo::Nb;
            m.standardizer = None;
            let mut nb = crate::ml::GaussianNb::fit(&[vec![0.0; 5], vec![1.0; 5]], &[0, 1], Default::default());
            nb.log_prior = if i < 3 { [-50.0, 0.0] } else { [0.0, -50.0] };
            nb.var = [vec![1e6; 5], vec![1e6; 5]];
            m.params = ModelParams::NaiveBayes(nb);
            fake.push(m);
        }
        assert_eq!(fake.iter().filter(|m| m.predict(x).unwrap() == 1).count(), 3);
        assert_eq!(ensemble_predict(&fake, x).unwrap(), 0);
    }

    #[test]
    fn suite_is_complete_and_reproducible() {
        let (models, tr, te) = fixture();
        let hp = Hyperparams { rf: crate::ml::ForestParams { n_trees: 15, ..Default::default() }, ..Default::default() };
        let a = run_suite(&models, &tr, &te, &AttackSpec::defaults(), &hp, 5).unwrap();
        let b = run_suite(&models, &tr, &te, &AttackSpec::defaults(), &hp, 5).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        for rep in &a.reports {
            for m in Algo::ALL {
                assert!(rep.baseline(m.name()).is_some());
                for p in rep.post_params() {
                    assert!(rep.post(m.name(), p).is_some(), "{} {m} {p}", rep.attack);
                }
            }
        }
        // 7 baseline rows, then 7 per sigma
        assert_eq!(a.reports[0].rows.len(), 7 * 6);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("attack,param,model,accuracy,sensitivity,specificity,f1,precision,phase\n"));
        assert!(!text.contains(",,"));
    }

    #[test]
    fn evasion_baseline_matches_clean_evaluation() {
        let (models, _, te) = fixture();
        let rep = run_evasion(&models, &te, &[1.0], 3).unwrap();
        for m in &models {
            let clean = evaluate(m, &te).unwrap().1;
            assert_eq!(rep.baseline(m.algo.name()).unwrap().accuracy, clean.accuracy);
        }
    }

    #[test]
    fn zero_range_extraction_is_self_consistent() {
        let (models, tr, te) = fixture();
        let target = models.iter().find(|m| m.algo == Algo::Rf).unwrap();
        let (_, rep) = extraction_attack(target, &models, &tr.concat(&te), &te, 0.0, None, &Hyperparams::default(), 2).unwrap();
        assert!(rep.extraction.unwrap().agreement >= 0.95);
    }

    #[test]
    fn unusable_model_is_invalid_state() {
        let (mut models, tr, te) = fixture();
        if let ModelParams::Svm(s) = &mut models[3].params {
            s.weights.clear();
        }
        let r = run_suite(&models, &tr, &te, &[AttackSpec::Interference { sigma: 2.0 }], &Hyperparams::default(), 0);
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    #[test]
    fn spec_defaults_from_json() {
        let s: AttackSpec = serde_json::from_str(r#"{"kind":"extraction"}"#).unwrap();
        assert_eq!(s, AttackSpec::Extraction { range_db: 20.0, query_budget: None, target: Algo::Rf });
        let e: AttackSpec = serde_json::from_str(r#"{"kind":"evasion"}"#).unwrap();
        assert_eq!(e, AttackSpec::Evasion { sigmas: vec![0.5, 1.0, 2.0, 4.0, 8.0] });
    }
}
