use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{metrics_from_cm, ConfusionMatrix, Metrics};
use super::model::{train, Algo, Hyperparams, TrainedModel};
use super::split::{kfold, split};
use crate::data::LabeledSet;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

pub fn evaluate_rows(model: &TrainedModel, rows: &[Vec<f64>], labels: &[u8]) -> Result<(ConfusionMatrix, Metrics)> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("test set has no rows".into()));
    }
    let predicted = model.predict_batch(rows)?;
    let cm = ConfusionMatrix::from_predictions(labels, &predicted);
    Ok((cm, metrics_from_cm(&cm)?))
}

pub fn evaluate(model: &TrainedModel, test: &LabeledSet) -> Result<(ConfusionMatrix, Metrics)> {
    evaluate_rows(model, &test.rows, &test.labels)
}

/// One line of an evaluation report. `fold` is `holdout`, a 1-based fold
/// number, or `mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub model: String,
    pub fold: String,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f1: f64,
    pub precision: f64,
}

impl EvaluationRow {
    pub fn new(algo: Algo, fold: impl Into<String>, m: &Metrics) -> Self {
        EvaluationRow {
            model: algo.name().to_string(),
            fold: fold.into(),
            accuracy: m.accuracy,
            sensitivity: m.sensitivity,
            specificity: m.specificity,
            f1: m.f1,
            precision: m.precision,
        }
    }

    fn mean(algo: Algo, rows: &[EvaluationRow]) -> Self {
        let n = rows.len() as f64;
        let avg = |f: fn(&EvaluationRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        EvaluationRow {
            model: algo.name().to_string(),
            fold: "mean".into(),
            accuracy: avg(|r| r.accuracy),
            sensitivity: avg(|r| r.sensitivity),
            specificity: avg(|r| r.specificity),
            f1: avg(|r| r.f1),
            precision: avg(|r| r.precision),
        }
    }
}

/// Stratified holdout: split with `seed`, train every algorithm on the same
/// training part, evaluate on the same test part.
pub fn holdout_evaluation(
    data: &LabeledSet,
    algos: &[Algo],
    test_fraction: f64,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<Vec<EvaluationRow>> {
    let (train_set, test_set) = split(data, test_fraction, seed)?;
    let train_seed = derive_seed(seed, 1);
    algos
        .par_iter()
        .map(|&a| {
            let m = train(a, &train_set, hyperparams, train_seed)?;
            let (_, metrics) = evaluate(&m, &test_set)?;
            Ok(EvaluationRow::new(a, "holdout", &metrics))
        })
        .collect()
}

/// Stratified k-fold cross-validation. Returns one row per (model, fold)
/// followed by a `mean` row per model.
pub fn cross_validate(
    data: &LabeledSet,
    algos: &[Algo],
    k: usize,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<Vec<EvaluationRow>> {
    let folds = kfold(data, k, seed)?;
    let train_seed = derive_seed(seed, 1);
    let cells: Vec<(Algo, usize)> = algos.iter().flat_map(|&a| (0..folds.len()).map(move |f| (a, f))).collect();
    let rows: Vec<EvaluationRow> = cells
        .par_iter()
        .map(|&(a, f)| {
            let (tr, va) = &folds[f];
            let m = train(a, tr, hyperparams, train_seed)?;
            let (_, metrics) = evaluate(&m, va)?;
            Ok(EvaluationRow::new(a, (f + 1).to_string(), &metrics))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(rows.len() + algos.len());
    for (i, &a) in algos.iter().enumerate() {
        let per = &rows[i * folds.len()..(i + 1) * folds.len()];
        out.extend_from_slice(per);
        out.push(EvaluationRow::mean(a, per));
    }
    Ok(out)
}

pub fn write_evaluation_csv<W: Write>(rows: &[EvaluationRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> LabeledSet {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![(i % 7) as f64, i as f64]).collect();
        let labels = (0..100).map(|i| u8::from(i >= 50)).collect();
        LabeledSet::new(rows, labels).unwrap()
    }

    #[test]
    fn evaluation_is_repeatable() {
        let d = toy();
        let m = train(Algo::Dt, &d, &Hyperparams::default(), 0).unwrap();
        let a = evaluate(&m, &d).unwrap();
        assert_eq!(a, evaluate(&m, &d).unwrap());
        assert_eq!(a.1.accuracy, 1.0);
        assert_eq!(a.0.total(), 100);
    }

    #[test]
    fn cv_layout() {
        let rows = cross_validate(&toy(), &[Algo::Dt, Algo::Nb], 5, &Hyperparams::default(), 3).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[5].fold, "mean");
        assert_eq!(rows[6].model, "NB");
        let mut buf = Vec::new();
        write_evaluation_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("model,fold,accuracy,sensitivity,specificity,f1,precision\n"));
    }

    #[test]
    fn empty_test_set() {
        let m = train(Algo::Dt, &toy(), &Hyperparams::default(), 0).unwrap();
        assert!(matches!(evaluate_rows(&m, &[], &[]), Err(Error::EmptyInput(_))));
    }
}
