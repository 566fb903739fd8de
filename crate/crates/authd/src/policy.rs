use std::path::{Path, PathBuf};

use proxauth_core::ml::Algo;
use serde::{Deserialize, Serialize};

use crate::error::{AuthError, AuthResult};

/// Lowest recheck interval the service accepts, in seconds.
pub const MIN_RECHECK_INTERVAL_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// More than half of the rows positive; a tie denies.
    Majority,
    /// Every row positive.
    AllPositive,
}

impl Aggregation {
    pub fn decide(self, positives: usize, rows: usize) -> bool {
        rows > 0
            && match self {
                Aggregation::Majority => 2 * positives > rows,
                Aggregation::AllPositive => positives == rows,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthPolicy {
    pub min_overlap_aps: usize,
    pub recheck_interval_s: f64,
    pub decision_model: Algo,
    pub continuous_ensemble: Vec<Algo>,
    pub aggregation: Aggregation,
    pub pending_ttl_s: f64,
    pub otp_ttl_s: f64,
    pub otp_digits: u32,
    pub otp_max_requests: usize,
    pub otp_window_s: f64,
    /// Wrong codes tolerated before a challenge is burned.
    pub otp_max_attempts: u32,
    pub min_password_len: usize,
}

impl Default for AuthPolicy {
    fn default() -> Self {
        AuthPolicy {
            min_overlap_aps: 3,
            recheck_interval_s: 30.0,
            decision_model: Algo::Dt,
            continuous_ensemble: Algo::ALL.to_vec(),
            aggregation: Aggregation::Majority,
            pending_ttl_s: 60.0,
            otp_ttl_s: 300.0,
            otp_digits: 6,
            otp_max_requests: 3,
            otp_window_s: 900.0,
            otp_max_attempts: 5,
            min_password_len: 8,
        }
    }
}

impl AuthPolicy {
    pub fn validate(&self) -> AuthResult<()> {
        let bad = |m: &str| Err(AuthError::Config(m.to_string()));
        if self.min_overlap_aps < 1 {
            return bad("min_overlap_aps must be at least 1");
        }
        if self.recheck_interval_s.is_nan() || self.recheck_interval_s < MIN_RECHECK_INTERVAL_S {
            return bad("recheck_interval_s must be at least 1 second");
        }
        if self.continuous_ensemble.is_empty() {
            return bad("continuous_ensemble must name at least one model");
        }
        if !(self.pending_ttl_s > 0.0 && self.otp_ttl_s > 0.0 && self.otp_window_s > 0.0) {
            return bad("ttl and window values must be positive");
        }
        if !(4..=9).contains(&self.otp_digits) {
            return bad("otp_digits must lie in 4..=9");
        }
        if self.otp_max_requests < 1 || self.otp_max_attempts < 1 {
            return bad("otp limits must be at least 1");
        }
        Ok(())
    }

    /// Every algorithm the policy needs a trained model for.
    pub fn required_models(&self) -> Vec<Algo> {
        let mut v = self.continuous_ensemble.clone();
        v.push(self.decision_model);
        v.sort();
        v.dedup();
        v
    }
}

/// Argon2id cost parameters for password and answer verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HashCost {
    pub memory_kib: u32,
    pub iterations: u32,
    pub parallelism: u32,
}

impl Default for HashCost {
    fn default() -> Self {
        HashCost { memory_kib: 19 * 1024, iterations: 2, parallelism: 1 }
    }
}

impl HashCost {
    /// Cheap parameters for tests and demos. Not for deployments.
    pub fn insecure_fast() -> Self {
        HashCost { memory_kib: 64, iterations: 1, parallelism: 1 }
    }
}

/// Service config file: the policy keys at top level plus deployment keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub bind: String,
    /// Environment JSON written by `gen-data`; its access points form the
    /// site survey.
    pub environment: Option<PathBuf>,
    /// Model files; one per algorithm the policy uses.
    pub models: Vec<PathBuf>,
    /// JSON-lines user store; in-memory when absent.
    pub user_store: Option<PathBuf>,
    /// Spool directory for outbound mail; stdout when absent.
    pub mail_spool: Option<PathBuf>,
    pub hash: HashCost,
    #[serde(flatten)]
    pub policy: AuthPolicy,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            environment: None,
            models: Vec::new(),
            user_store: None,
            mail_spool: None,
            hash: HashCost::default(),
            policy: AuthPolicy::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml_str(s: &str) -> AuthResult<ServiceConfig> {
        let c: ServiceConfig = toml::from_str(s).map_err(|e| AuthError::Config(e.to_string()))?;
        c.policy.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> AuthResult<ServiceConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| AuthError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = AuthPolicy::default();
        p.validate().unwrap();
        assert_eq!(p.min_overlap_aps, 3);
        assert_eq!(p.recheck_interval_s, 30.0);
        assert_eq!(p.required_models().len(), 6);
    }

    #[test]
    fn interval_floor() {
        let p = AuthPolicy { recheck_interval_s: 0.5, ..Default::default() };
        assert!(p.validate().is_err());
        let p = AuthPolicy { recheck_interval_s: 1.0, ..Default::default() };
        p.validate().unwrap();
    }

    #[test]
    fn aggregation_ties_deny() {
        assert!(!Aggregation::Majority.decide(5, 10));
        assert!(Aggregation::Majority.decide(6, 10));
        assert!(!Aggregation::AllPositive.decide(9, 10));
        assert!(!Aggregation::Majority.decide(0, 0));
    }

    #[test]
    fn flat_config_document() {
        let c = ServiceConfig::from_toml_str(
            r#"
            bind = "0.0.0.0:9000"
            min_overlap_aps = 4
            recheck_interval_s = 10
            decision_model = "RF"
            aggregation = "all_positive"
            models = ["m/dt.json"]
            "#,
        )
        .unwrap();
        assert_eq!(c.policy.min_overlap_aps, 4);
        assert_eq!(c.policy.decision_model, Algo::Rf);
        assert_eq!(c.policy.aggregation, Aggregation::AllPositive);
        assert_eq!(c.bind, "0.0.0.0:9000");
    }
}
