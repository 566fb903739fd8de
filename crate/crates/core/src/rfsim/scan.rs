use rand::Rng;
use serde::{Deserialize, Serialize};

use super::environment::{Bssid, Environment};
use super::geometry::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceRole {
    Login,
    Mobile,
}

impl DeviceRole {
    /// Value of the RPi column for rows observed by this device.
    pub fn rpi(self) -> u8 {
        match self {
            DeviceRole::Login => 1,
            DeviceRole::Mobile => 2,
        }
    }
}

pub const LOGIN_DEVICE_ID: &str = "login";
pub const MOBILE_DEVICE_ID: &str = "mobile";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevicePose {
    pub device_id: String,
    pub role: DeviceRole,
    pub position: Point,
}

impl DevicePose {
    pub fn login(position: Point) -> Self {
        DevicePose { device_id: LOGIN_DEVICE_ID.into(), role: DeviceRole::Login, position }
    }

    pub fn mobile(position: Point) -> Self {
        DevicePose { device_id: MOBILE_DEVICE_ID.into(), role: DeviceRole::Mobile, position }
    }
}

/// One access point as seen by one device. The observer and timestamp live
/// on the enclosing [`ScanReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeaconObservation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap_id: Option<u32>,
    pub ssid: String,
    pub bssid: Bssid,
    pub frequency_mhz: u32,
    pub rssi_dbm: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub device_id: String,
    pub role: DeviceRole,
    /// Seconds on the (simulated) clock.
    pub t: f64,
    pub observations: Vec<BeaconObservation>,
}

/// Scans every access point from `pose`. Beacons weaker than the
/// environment's sensitivity floor are not reported; RSSI is reported in
/// whole dBm.
pub fn scan<R: Rng + ?Sized>(env: &Environment, pose: &DevicePose, t: f64, rng: &mut R) -> Result<ScanReport> {
    if !env.bounds.contains(&pose.position) {
        return Err(Error::Geometry(format!(
            "device {} at ({:.3}, {:.3}) is outside the floor plan",
            pose.device_id, pose.position.x, pose.position.y
        )));
    }
    let mut observations = Vec::with_capacity(env.aps.len());
    for ap in &env.aps {
        let rssi = env.path_loss.rssi_at(ap, &pose.position, rng);
        if rssi >= env.sensitivity_floor_dbm {
            observations.push(BeaconObservation {
                ap_id: Some(ap.ap_id),
                ssid: ap.ssid.clone(),
                bssid: ap.bssid,
                frequency_mhz: ap.frequency_mhz,
                rssi_dbm: rssi.round() as i32,
            });
        }
    }
    Ok(ScanReport { device_id: pose.device_id.clone(), role: pose.role, t, observations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfsim::{build_environment, SimConfig};
    use crate::seed::rng_from_seed;
    use std::collections::HashSet;

    #[test]
    fn centroid_scan_sees_every_ap() {
        let env = build_environment(&SimConfig::default(), 42).unwrap();
        // oracle: count APs whose noise-free power clears the floor with
        // more than 5 sigma to spare
        let pose = DevicePose::login(env.bounds.centre());
        let expected = env
            .aps
            .iter()
            .filter(|ap| env.path_loss.mean_rssi(ap, &pose.position) - 5.0 * 2.0 >= -95.0)
            .count();
        assert_eq!(expected, 10);
        let report = scan(&env, &pose, 0.0, &mut rng_from_seed(3)).unwrap();
        assert_eq!(report.observations.len(), 10);
        let bssids: HashSet<_> = report.observations.iter().map(|o| o.bssid).collect();
        assert_eq!(bssids.len(), 10);
        for (obs, ap) in report.observations.iter().zip(&env.aps) {
            assert_eq!(obs.ssid, ap.ssid);
            assert_eq!(obs.bssid, ap.bssid);
            assert_eq!(obs.frequency_mhz, ap.frequency_mhz);
        }
    }

    #[test]
    fn floor_above_max_rssi_hides_everything() {
        let cfg = SimConfig { sensitivity_floor_dbm: -19.5, ..SimConfig::default() };
        let env = build_environment(&cfg, 42).unwrap();
        let report = scan(&env, &DevicePose::login(env.workstation), 0.0, &mut rng_from_seed(3)).unwrap();
        assert!(report.observations.is_empty());
    }

    #[test]
    fn noiseless_scans_repeat() {
        let cfg = SimConfig { shadowing_sigma_db: 0.0, ..SimConfig::default() };
        let env = build_environment(&cfg, 42).unwrap();
        let pose = DevicePose::mobile(Point::new(12.0, 9.0));
        let mut rng = rng_from_seed(1);
        let a = scan(&env, &pose, 0.0, &mut rng).unwrap();
        let b = scan(&env, &pose, 0.0, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outside_bounds_is_a_geometry_error() {
        let env = build_environment(&SimConfig::default(), 42).unwrap();
        let pose = DevicePose::login(Point::new(-1.0, 2.0));
        assert!(matches!(scan(&env, &pose, 0.0, &mut rng_from_seed(0)), Err(Error::Geometry(_))));
    }

    #[test]
    fn wire_shape() {
        let obs = BeaconObservation {
            ap_id: None,
            ssid: "lab".into(),
            bssid: "02:00:00:00:00:01".parse().unwrap(),
            frequency_mhz: 2412,
            rssi_dbm: -60,
        };
        let json = serde_json::to_string(&obs).unwrap();
        assert_eq!(json, r#"{"ssid":"lab","bssid":"02:00:00:00:00:01","frequency_mhz":2412,"rssi_dbm":-60}"#);
    }
}
