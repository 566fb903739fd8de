use serde::{Deserialize, Serialize};

use super::environment::Environment;
use super::placement::{place_pair, Regime};
use super::scan::{scan, DevicePose, ScanReport};
use super::survey::SiteSurvey;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Labeled rows for `n_authentic` + `n_unauthorized` observations.
///
/// Placements are drawn per regime (authentic first) until the requested
/// row count is met; each placement contributes the login scan's rows, then
/// the mobile scan's rows, and the final placement is truncated to hit the
/// count exactly.
pub fn generate_dataset(env: &Environment, n_authentic: usize, n_unauthorized: usize, seed: u64) -> Result<Dataset> {
    generate_traced(env, n_authentic, n_unauthorized, seed).map(|(d, _)| d)
}

/// One device placement drawn while generating a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub regime: Regime,
    pub separation_m: f64,
    /// Rows this placement contributed.
    pub rows: usize,
}

/// [`generate_dataset`], also returning every placement it drew.
pub fn generate_traced(
    env: &Environment,
    n_authentic: usize,
    n_unauthorized: usize,
    seed: u64,
) -> Result<(Dataset, Vec<PlacementRecord>)> {
    let mut placements = Vec::new();
    let survey = SiteSurvey::from_environment(env);
    let mut samples = Vec::with_capacity(n_authentic + n_unauthorized);
    for (stream, regime, wanted) in [(0, Regime::Authentic, n_authentic), (1, Regime::Unauthorized, n_unauthorized)] {
        if wanted == 0 {
            continue;
        }
        let mut rng = rng_from_seed(derive_seed(seed, stream));
        let mut produced = 0usize;
        let mut placement = 0u64;
        let mut empty_streak = 0;
        while produced < wanted {
            let (login, mobile) = place_pair(env, regime, &mut rng)?;
            let t = placement as f64;
            placement += 1;
            let before = produced;
            for pose in [&login, &mobile] {
                let report = scan(env, pose, t, &mut rng)?;
                for obs in &report.observations {
                    if produced == wanted {
                        break;
                    }
                    if let Some(s) = survey.encode(pose.role, obs, regime.label()) {
                        samples.push(s);
                        produced += 1;
                    }
                }
            }
            placements.push(PlacementRecord {
                regime,
                separation_m: login.position.distance(&mobile.position),
                rows: produced - before,
            });
            if produced == before {
                empty_streak += 1;
                if empty_streak > 1000 {
                    return Err(Error::Config("no beacons clear the sensitivity floor".into()));
                }
            } else {
                empty_streak = 0;
            }
        }
    }
    Ok((Dataset::new(samples), placements))
}

/// One step of a scripted trajectory.
pub type PosePair = (DevicePose, DevicePose);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPair {
    pub t: f64,
    pub login: ScanReport,
    pub mobile: ScanReport,
}

/// Scans a scripted trajectory on a simulated clock: step `i` is stamped
/// `t0 + i * interval_s`.
pub fn session_stream(
    env: &Environment,
    trajectory: &[PosePair],
    interval_s: f64,
    t0: f64,
    seed: u64,
) -> Result<Vec<ScanPair>> {
    if trajectory.is_empty() {
        return Err(Error::Config("trajectory is empty".into()));
    }
    if !(interval_s > 0.0 && interval_s.is_finite()) {
        return Err(Error::Config(format!("interval {interval_s} must be positive")));
    }
    let mut rng = rng_from_seed(seed);
    trajectory
        .iter()
        .enumerate()
        .map(|(i, (login, mobile))| {
            let t = t0 + i as f64 * interval_s;
            Ok(ScanPair { t, login: scan(env, login, t, &mut rng)?, mobile: scan(env, mobile, t, &mut rng)? })
        })
        .collect()
}
