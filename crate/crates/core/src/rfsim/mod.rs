//! Deterministic 2-D Wi-Fi environment simulator.
//!
//! Stands in for beacon capture hardware: access points on a floor plan,
//! log-distance propagation with shadowing, device scans, regime-controlled
//! pair placement and the labeled co-location dataset built from them.

mod config;
mod environment;
mod generate;
mod geometry;
mod placement;
mod propagation;
mod scan;
mod survey;

pub use config::{SimConfig, FEET_TO_METERS};
pub use environment::{
    build_environment, channel_ref_power, is_valid_channel, AccessPoint, Bssid, Environment, RegimeLimits,
    CHANNEL_PLAN_MHZ,
};
pub use generate::{generate_dataset, generate_traced, session_stream, PlacementRecord, PosePair, ScanPair};
pub use geometry::{Bounds, Point, ZoneGrid};
pub use placement::{pair_at, place_pair, Regime};
pub use propagation::{PathLoss, REFERENCE_DISTANCE_M, RSSI_MAX_DBM, RSSI_MIN_DBM};
pub use scan::{scan, BeaconObservation, DevicePose, DeviceRole, ScanReport, LOGIN_DEVICE_ID, MOBILE_DEVICE_ID};
pub use survey::{SiteSurvey, SurveyEntry};
