use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::{ForestParams, RandomForest};
use super::knn::{Knn, KnnParams};
use super::logistic::{LogisticRegression, LrParams};
use super::naive_bayes::{GaussianNb, NbParams};
use super::standardize::Standardizer;
use super::svm::{LinearSvm, SvmParams};
use super::tree::{DecisionTree, TreeParams};
use crate::data::LabeledSet;
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algo {
    #[serde(rename = "DT")]
    Dt,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "RF")]
    Rf,
    #[serde(rename = "SVM")]
    Svm,
    #[serde(rename = "NB")]
    Nb,
    #[serde(rename = "LR")]
    Lr,
}

impl Algo {
    pub const ALL: [Algo; 6] = [Algo::Dt, Algo::Knn, Algo::Rf, Algo::Svm, Algo::Nb, Algo::Lr];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Dt => "DT",
            Algo::Knn => "KNN",
            Algo::Rf => "RF",
            Algo::Svm => "SVM",
            Algo::Nb => "NB",
            Algo::Lr => "LR",
        }
    }

    /// Distance- and gradient-based models see z-scored features; trees and
    /// NB consume raw values.
    pub fn standardizes(self) -> bool {
        matches!(self, Algo::Knn | Algo::Svm | Algo::Lr)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algo> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}; expected one of DT, KNN, RF, SVM, NB, LR")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub dt: TreeParams,
    pub knn: KnnParams,
    pub rf: ForestParams,
    pub svm: SvmParams,
    pub nb: NbParams,
    pub lr: LrParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ModelParams {
    DecisionTree(DecisionTree),
    Knn(Knn),
    RandomForest(RandomForest),
    Svm(LinearSvm),
    NaiveBayes(GaussianNb),
    Logistic(LogisticRegression),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: u8,
    /// LR/NB posterior, SVM squashed margin, RF vote fraction, KNN neighbour
    /// fraction, DT leaf purity.
    pub score: f64,
}

/// A fitted classifier. This is also the on-disk model file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub algo: Algo,
    pub hyperparams: Hyperparams,
    pub n_features: usize,
    pub standardizer: Option<Standardizer>,
    pub params: ModelParams,
    pub train_seed: u64,
}

/// Fits `algo` on `data`. Deterministic in `(data, hyperparams, seed)`.
pub fn train(algo: Algo, data: &LabeledSet, hyperparams: &Hyperparams, seed: u64) -> Result<TrainedModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training set has no rows".into()));
    }
    if !data.has_both_classes() {
        return Err(Error::DegenerateData("training set contains a single class".into()));
    }
    let standardizer = algo.standardizes().then(|| Standardizer::fit(&data.rows));
    let scaled;
    let rows = match &standardizer {
        Some(s) => {
            scaled = s.transform_all(&data.rows);
            &scaled
        }
        None => &data.rows,
    };
    let labels = &data.labels;
    let params = match algo {
        Algo::Dt => ModelParams::DecisionTree(DecisionTree::fit(rows, labels, hyperparams.dt)),
        Algo::Knn => ModelParams::Knn(Knn::fit(rows.clone(), labels.clone(), hyperparams.knn)),
        Algo::Rf => ModelParams::RandomForest(RandomForest::fit(rows, labels, hyperparams.rf, seed)),
        Algo::Svm => ModelParams::Svm(LinearSvm::fit(rows, labels, hyperparams.svm, seed)),
        Algo::Nb => ModelParams::NaiveBayes(GaussianNb::fit(rows, labels, hyperparams.nb)),
        Algo::Lr => ModelParams::Logistic(LogisticRegression::fit(rows, labels, hyperparams.lr)),
    };
    Ok(TrainedModel {
        schema_version: MODEL_SCHEMA_VERSION,
        algo,
        hyperparams: *hyperparams,
        n_features: data.n_features(),
        standardizer,
        params,
        train_seed: seed,
    })
}

impl TrainedModel {
    fn prepare<'a>(&self, x: &'a [f64]) -> Result<std::borrow::Cow<'a, [f64]>> {
        if x.len() != self.n_features {
            return Err(Error::Shape { expected: self.n_features, got: x.len() });
        }
        Ok(match &self.standardizer {
            Some(s) => std::borrow::Cow::Owned(s.transform(x)),
            None => std::borrow::Cow::Borrowed(x),
        })
    }

    pub fn predict_scored(&self, x: &[f64]) -> Result<Prediction> {
        let z = self.prepare(x)?;
        let (label, score) = match &self.params {
            ModelParams::DecisionTree(m) => (m.predict(&z), m.score(&z)),
            ModelParams::Knn(m) => (m.predict(&z), m.score(&z)),
            ModelParams::RandomForest(m) => (m.predict(&z), m.score(&z)),
            ModelParams::Svm(m) => (m.predict(&z), m.score(&z)),
            ModelParams::NaiveBayes(m) => (m.predict(&z), m.score(&z)),
            ModelParams::Logistic(m) => (m.predict(&z), m.score(&z)),
        };
        Ok(Prediction { label, score })
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        let z = self.prepare(x)?;
        Ok(match &self.params {
            ModelParams::DecisionTree(m) => m.predict(&z),
            ModelParams::Knn(m) => m.predict(&z),
            ModelParams::RandomForest(m) => m.predict(&z),
            ModelParams::Svm(m) => m.predict(&z),
            ModelParams::NaiveBayes(m) => m.predict(&z),
            ModelParams::Logistic(m) => m.predict(&z),
        })
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    /// Structural check of the learned parameters. A model that fails here
    /// cannot be used for prediction.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidState(format!("{} model: {m}", self.algo)));
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: self.schema_version, expected: MODEL_SCHEMA_VERSION });
        }
        if self.n_features == 0 {
            return bad("no features".into());
        }
        if self.algo.standardizes() != self.standardizer.is_some() {
            return bad("standardizer presence does not match the algorithm".into());
        }
        if let Some(s) = &self.standardizer {
            if s.mean.len() != self.n_features || s.std.len() != self.n_features {
                return bad("standardizer has the wrong width".into());
            }
        }
        let d = self.n_features;
        let matches = matches!(
            (self.algo, &self.params),
            (Algo::Dt, ModelParams::DecisionTree(_))
                | (Algo::Knn, ModelParams::Knn(_))
                | (Algo::Rf, ModelParams::RandomForest(_))
                | (Algo::Svm, ModelParams::Svm(_))
                | (Algo::Nb, ModelParams::NaiveBayes(_))
                | (Algo::Lr, ModelParams::Logistic(_))
        );
        if !matches {
            return bad("parameters belong to another algorithm".into());
        }
        match &self.params {
            ModelParams::DecisionTree(t) => {
                if t.n_features != d {
                    return bad("tree width mismatch".into());
                }
                if let Err(e) = t.check() {
                    return bad(e);
                }
            }
            ModelParams::RandomForest(f) => {
                if f.trees.is_empty() {
                    return bad("forest has no trees".into());
                }
                for t in &f.trees {
                    if let Err(e) = t.check() {
                        return bad(e);
                    }
                }
            }
            ModelParams::Knn(k) => {
                if k.rows.is_empty() || k.rows.len() != k.labels.len() || k.rows.iter().any(|r| r.len() != d) {
                    return bad("stored training set is empty or malformed".into());
                }
            }
            ModelParams::Svm(LinearSvm { weights, bias }) | ModelParams::Logistic(LogisticRegression { weights, bias }) => {
                if weights.len() != d || !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
                    return bad("weight vector is malformed".into());
                }
            }
            ModelParams::NaiveBayes(nb) => {
                if nb.mean.iter().chain(&nb.var).any(|v| v.len() != d) || nb.var.iter().flatten().any(|v| *v <= 0.0) {
                    return bad("class moments are malformed".into());
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses a model file, rejecting other schema versions before looking
    /// at the rest of the document.
    pub fn from_json(s: &str) -> Result<TrainedModel> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        let found = value.get("schema_version").and_then(serde_json::Value::as_u64).unwrap_or(0) as u32;
        if found != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found, expected: MODEL_SCHEMA_VERSION });
        }
        let model: TrainedModel = serde_json::from_value(value)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
