//! Encoding of beacon observations into sample rows.
//!
//! The dataset generator and the authentication service must agree on how a
//! `(device, beacon)` pair becomes a feature row; both go through
//! [`SiteSurvey`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::environment::{Bssid, Environment};
use super::scan::{BeaconObservation, DeviceRole, ScanReport};
use crate::data::Sample;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub ssid: String,
    pub bssid: Bssid,
    pub ssid_code: u32,
    pub location: u32,
}

/// The known access points of a site, keyed by `(SSID, BSSID)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<SurveyEntry>", into = "Vec<SurveyEntry>")]
pub struct SiteSurvey {
    entries: Vec<SurveyEntry>,
    index: HashMap<(String, Bssid), usize>,
}

impl From<Vec<SurveyEntry>> for SiteSurvey {
    fn from(entries: Vec<SurveyEntry>) -> Self {
        SiteSurvey::new(entries)
    }
}

impl From<SiteSurvey> for Vec<SurveyEntry> {
    fn from(s: SiteSurvey) -> Self {
        s.entries
    }
}

impl SiteSurvey {
    pub fn new(entries: Vec<SurveyEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.ssid.clone(), e.bssid), i))
            .collect();
        SiteSurvey { entries, index }
    }

    pub fn from_environment(env: &Environment) -> Self {
        SiteSurvey::new(
            env.aps
                .iter()
                .map(|ap| SurveyEntry {
                    ssid: ap.ssid.clone(),
                    bssid: ap.bssid,
                    ssid_code: ap.ap_id,
                    location: env.ap_location(ap),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[SurveyEntry] {
        &self.entries
    }

    pub fn lookup(&self, ssid: &str, bssid: &Bssid) -> Option<&SurveyEntry> {
        self.index.get(&(ssid.to_string(), *bssid)).map(|&i| &self.entries[i])
    }

    /// Sample for one observation, `None` when the access point is not part
    /// of the survey.
    pub fn encode(&self, role: DeviceRole, obs: &BeaconObservation, label: u8) -> Option<Sample> {
        self.lookup(&obs.ssid, &obs.bssid).map(|e| Sample {
            rpi: role.rpi(),
            ssid_code: e.ssid_code,
            frequency_mhz: obs.frequency_mhz,
            rssi_dbm: obs.rssi_dbm,
            location: e.location,
            label,
        })
    }

    /// Label-free feature rows for every known observation in `report`.
    pub fn feature_rows(&self, report: &ScanReport) -> Vec<Vec<f64>> {
        report
            .observations
            .iter()
            .filter_map(|o| self.encode(report.role, o, 0))
            .map(|s| s.features())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfsim::{build_environment, SimConfig};

    #[test]
    fn unknown_aps_are_skipped() {
        let env = build_environment(&SimConfig::default(), 42).unwrap();
        let survey = SiteSurvey::from_environment(&env);
        let ap = &env.aps[0];
        let known = BeaconObservation {
            ap_id: None,
            ssid: ap.ssid.clone(),
            bssid: ap.bssid,
            frequency_mhz: ap.frequency_mhz,
            rssi_dbm: -60,
        };
        let stranger = BeaconObservation { bssid: "02:99:99:99:99:99".parse().unwrap(), ..known.clone() };
        let s = survey.encode(DeviceRole::Mobile, &known, 1).unwrap();
        assert_eq!((s.rpi, s.ssid_code, s.rssi_dbm), (2, ap.ap_id, -60));
        assert!(survey.encode(DeviceRole::Mobile, &stranger, 1).is_none());
    }

    #[test]
    fn lookup_survives_serde() {
        let env = build_environment(&SimConfig::default(), 42).unwrap();
        let survey = SiteSurvey::from_environment(&env);
        let back: SiteSurvey = serde_json::from_str(&serde_json::to_string(&survey).unwrap()).unwrap();
        let ap = &env.aps[3];
        assert_eq!(back.lookup(&ap.ssid, &ap.bssid).unwrap().ssid_code, ap.ap_id);
    }
}
