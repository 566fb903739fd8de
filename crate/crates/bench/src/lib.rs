//! Shared fixtures for the benchmarks.

use proxauth_core::ml::{split, train, Algo, Hyperparams, TrainedModel};
use proxauth_core::rfsim::{build_environment, generate_dataset, Environment, SimConfig};
use proxauth_core::seed::derive_seed;
use proxauth_core::{LabeledSet, Result};

pub struct Fixture {
    pub env: Environment,
    pub train: LabeledSet,
    pub test: LabeledSet,
    pub models: Vec<TrainedModel>,
}

/// The default dataset, an 80/20 split and all six models.
pub fn fixture(seed: u64) -> Result<Fixture> {
    let cfg = SimConfig::default();
    let env = build_environment(&cfg, seed)?;
    let data = generate_dataset(&env, cfg.n_authentic, cfg.n_unauthorized, seed)?.to_labeled();
    let (train_set, test) = split(&data, 0.2, seed)?;
    let hp = Hyperparams::default();
    let models = Algo::ALL
        .into_iter()
        .map(|a| train(a, &train_set, &hp, derive_seed(seed, 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fixture { env, train: train_set, test, models })
}
