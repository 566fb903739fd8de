//! A simulated deployment: an environment, models trained on data drawn
//! from it, and a helper that scans device pairs at chosen separations.
//! Used by the demo command and the test suites.

use std::sync::Arc;

use proxauth_core::ml::{train, Algo, Hyperparams, TrainedModel};
use proxauth_core::rfsim::{build_environment, generate_dataset, pair_at, scan, Environment, ScanReport, SimConfig, SiteSurvey};
use proxauth_core::seed::{derive_seed, rng_from_seed};

use crate::clock::Clock;
use crate::error::AuthResult;
use crate::mail::Mailer;
use crate::policy::{AuthPolicy, HashCost};
use crate::service::{AuthService, ServiceParts};
use crate::store::UserStore;

pub struct Lab {
    pub env: Environment,
    pub models: Vec<TrainedModel>,
}

impl Lab {
    /// Builds the default environment and trains all six models on
    /// `per_class` rows of each class.
    pub fn build(seed: u64, per_class: usize) -> AuthResult<Lab> {
        Lab::from_config(&SimConfig::default(), &Hyperparams::default(), per_class, per_class, seed)
    }

    pub fn from_config(
        config: &SimConfig,
        hp: &Hyperparams,
        n_authentic: usize,
        n_unauthorized: usize,
        seed: u64,
    ) -> AuthResult<Lab> {
        let env = build_environment(config, seed)?;
        let data = generate_dataset(&env, n_authentic, n_unauthorized, derive_seed(seed, 1))?.to_labeled();
        let models = Algo::ALL
            .iter()
            .map(|&a| train(a, &data, hp, derive_seed(seed, 2)))
            .collect::<proxauth_core::Result<Vec<_>>>()?;
        Ok(Lab { env, models })
    }

    pub fn survey(&self) -> SiteSurvey {
        SiteSurvey::from_environment(&self.env)
    }

    pub fn service(
        &self,
        policy: AuthPolicy,
        store: Arc<dyn UserStore>,
        clock: Arc<dyn Clock>,
        mailer: Arc<dyn Mailer>,
        hash_cost: HashCost,
        token_seed: Option<u64>,
    ) -> AuthResult<AuthService> {
        AuthService::new(ServiceParts {
            policy,
            models: self.models.clone(),
            survey: self.survey(),
            store,
            clock,
            mailer,
            hash_cost,
            token_seed,
        })
    }

    /// One scan from each device, placed `separation_m` apart around the
    /// workstation.
    pub fn scans(&self, separation_m: f64, angle: f64, t: f64, seed: u64) -> AuthResult<Vec<ScanReport>> {
        let (login, mobile) = pair_at(self.env.workstation, separation_m, angle);
        let mut rng = rng_from_seed(seed);
        Ok(vec![scan(&self.env, &login, t, &mut rng)?, scan(&self.env, &mobile, t, &mut rng)?])
    }
}
