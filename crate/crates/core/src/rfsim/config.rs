//! Simulator configuration.
//!
//! A flat key/value document (TOML). Distances are meters except the two
//! regime keys, which are feet to match how the collection protocol is
//! usually described; they are converted on use.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FEET_TO_METERS: f64 = 0.3048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub ap_count: usize,
    /// Floor plan `[width, height]` in meters, origin at the lower-left corner.
    pub bounds_m: [f64; 2],
    /// Where the user's devices normally sit. Defaults to the floor centre.
    pub workstation_m: Option<[f64; 2]>,
    /// Access points are scattered uniformly over a disc of this radius
    /// around the workstation (clipped to the floor). `0` spreads them over
    /// the whole floor.
    pub ap_radius_m: f64,
    pub path_loss_exponent: f64,
    pub shadowing_sigma_db: f64,
    /// Received power at 1 m for a 2412 MHz access point. Other channels are
    /// offset by the free-space term `20 log10(f / 2412)`.
    pub ref_power_dbm: f64,
    pub sensitivity_floor_dbm: f64,
    /// `[columns, rows]` of the Location zone grid.
    pub zone_grid: [u32; 2],
    /// Largest inter-device distance of an authentic placement.
    pub threshold_ft: f64,
    /// Excluded band above the threshold; unauthorized placements start at
    /// `threshold_ft + gray_gap_ft`.
    pub gray_gap_ft: f64,
    pub seed: u64,
    pub n_authentic: usize,
    pub n_unauthorized: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ap_count: 10,
            bounds_m: [40.0, 30.0],
            workstation_m: None,
            ap_radius_m: 5.0,
            path_loss_exponent: 2.8,
            shadowing_sigma_db: 2.0,
            ref_power_dbm: -40.0,
            sensitivity_floor_dbm: -95.0,
            zone_grid: [3, 3],
            threshold_ft: 7.0,
            gray_gap_ft: 0.5,
            seed: 42,
            n_authentic: 2442,
            n_unauthorized: 2383,
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<SimConfig> {
        let cfg: SimConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SimConfig> {
        SimConfig::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("SimConfig serializes to TOML")
    }

    pub fn threshold_m(&self) -> f64 {
        self.threshold_ft * FEET_TO_METERS
    }

    pub fn unauthorized_min_m(&self) -> f64 {
        (self.threshold_ft + self.gray_gap_ft) * FEET_TO_METERS
    }

    pub fn validate(&self) -> Result<()> {
        if self.ap_count == 0 {
            return Err(Error::Config("ap_count must be at least 1".into()));
        }
        let [w, h] = self.bounds_m;
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return Err(Error::Config(format!("degenerate bounds {w} x {h}")));
        }
        if !(1.5..=5.0).contains(&self.path_loss_exponent) {
            return Err(Error::Config(format!(
                "path_loss_exponent {} outside [1.5, 5.0]",
                self.path_loss_exponent
            )));
        }
        if !(self.shadowing_sigma_db >= 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(Error::Config("shadowing_sigma_db must be >= 0".into()));
        }
        if !(-50.0..=-20.0).contains(&self.ref_power_dbm) {
            return Err(Error::Config(format!(
                "ref_power_dbm {} outside [-50, -20]",
                self.ref_power_dbm
            )));
        }
        if self.zone_grid[0] == 0 || self.zone_grid[1] == 0 {
            return Err(Error::Config("zone_grid dimensions must be positive".into()));
        }
        if !(self.threshold_ft > 0.0 && self.gray_gap_ft >= 0.0) {
            return Err(Error::Config("threshold_ft must be > 0 and gray_gap_ft >= 0".into()));
        }
        if self.ap_radius_m.is_nan() || self.ap_radius_m < 0.0 {
            return Err(Error::Config("ap_radius_m must be >= 0".into()));
        }
        if let Some([x, y]) = self.workstation_m {
            if !(0.0..=w).contains(&x) || !(0.0..=h).contains(&y) {
                return Err(Error::Config(format!("workstation ({x}, {y}) outside the floor plan")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_toml_overrides_defaults() {
        let cfg = SimConfig::from_toml_str("ap_count = 4\nzone_grid = [2, 2]\nthreshold_ft = 10.0\n").unwrap();
        assert_eq!(cfg.ap_count, 4);
        assert_eq!(cfg.zone_grid, [2, 2]);
        assert_eq!(cfg.bounds_m, SimConfig::default().bounds_m);
        assert!((cfg.threshold_m() - 3.048).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(SimConfig::from_toml_str("ap_cnt = 4").is_err());
    }

    #[test]
    fn feet_conversion_matches_regime_bounds() {
        let cfg = SimConfig::default();
        assert!((cfg.threshold_m() - 2.1336).abs() < 1e-12);
        assert!((cfg.unauthorized_min_m() - 2.286).abs() < 1e-12);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = SimConfig { workstation_m: Some([3.0, 4.0]), ..SimConfig::default() };
        assert_eq!(SimConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn validation() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig { ap_count: 0, ..Default::default() }.validate().is_err());
        assert!(SimConfig { bounds_m: [0.0, 3.0], ..Default::default() }.validate().is_err());
        assert!(SimConfig { path_loss_exponent: 6.0, ..Default::default() }.validate().is_err());
        assert!(SimConfig { ref_power_dbm: -10.0, ..Default::default() }.validate().is_err());
    }
}
