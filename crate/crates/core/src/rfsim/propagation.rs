//! Log-distance path loss with log-normal shadowing.
//!
//! `rssi = P0 - 10 n log10(max(d, d0) / d0) + X`, `X ~ N(0, sigma)`, with the
//! reference distance `d0 = 1 m`. Results are clamped to the receiver's
//! reporting range.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::environment::AccessPoint;
use super::geometry::Point;

pub const REFERENCE_DISTANCE_M: f64 = 1.0;
pub const RSSI_MIN_DBM: f64 = -100.0;
pub const RSSI_MAX_DBM: f64 = -20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    pub exponent: f64,
    pub shadowing_sigma_db: f64,
}

impl PathLoss {
    /// Noise-free received power, unclamped.
    pub fn mean_rssi(&self, ap: &AccessPoint, p: &Point) -> f64 {
        let d = ap.position.distance(p).max(REFERENCE_DISTANCE_M);
        ap.ref_power_dbm - 10.0 * self.exponent * (d / REFERENCE_DISTANCE_M).log10()
    }

    /// One shadowed RSSI draw at `p`. No randomness is consumed when the
    /// shadowing sigma is zero.
    pub fn rssi_at<R: Rng + ?Sized>(&self, ap: &AccessPoint, p: &Point, rng: &mut R) -> f64 {
        let mut rssi = self.mean_rssi(ap, p);
        if self.shadowing_sigma_db > 0.0 {
            let noise = Normal::new(0.0, self.shadowing_sigma_db).expect("sigma is finite and positive");
            rssi += noise.sample(rng);
        }
        rssi.clamp(RSSI_MIN_DBM, RSSI_MAX_DBM)
    }
}
