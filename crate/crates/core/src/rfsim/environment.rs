use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::SimConfig;
use super::geometry::{Bounds, Point, ZoneGrid};
use super::propagation::PathLoss;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Non-overlapping channel centres handed out to simulated access points,
/// in allocation order: the three clean 2.4 GHz channels, then 5 GHz
/// UNII-1/2/2e/3.
pub const CHANNEL_PLAN_MHZ: [u32; 28] = [
    2412, 2437, 2462, 5180, 5200, 5220, 5240, 5260, 5280, 5300, 5320, 5500, 5520, 5540, 5560,
    5580, 5600, 5620, 5640, 5660, 5680, 5700, 5720, 5745, 5765, 5785, 5805, 5825,
];

pub fn is_valid_channel(frequency_mhz: u32) -> bool {
    let two_four = (2412..=2472).contains(&frequency_mhz) && (frequency_mhz - 2412) % 5 == 0
        || frequency_mhz == 2484;
    let five = (5170..=5835).contains(&frequency_mhz) && frequency_mhz % 5 == 0;
    two_four || five
}

/// 48-bit access point identifier, rendered `aa:bb:cc:dd:ee:ff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bssid(pub [u8; 6]);

impl fmt::Display for Bssid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(f, "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", b[0], b[1], b[2], b[3], b[4], b[5])
    }
}

impl FromStr for Bssid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(Error::Config(format!("malformed BSSID {s:?}")));
        }
        let mut out = [0u8; 6];
        for (slot, part) in out.iter_mut().zip(parts) {
            if part.len() != 2 {
                return Err(Error::Config(format!("malformed BSSID {s:?}")));
            }
            *slot = u8::from_str_radix(part, 16)
                .map_err(|_| Error::Config(format!("malformed BSSID {s:?}")))?;
        }
        Ok(Bssid(out))
    }
}

impl Serialize for Bssid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bssid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    /// 1-based; doubles as the integer SSID code of the sample schema.
    pub ap_id: u32,
    pub ssid: String,
    pub bssid: Bssid,
    pub frequency_mhz: u32,
    pub position: Point,
    /// Received power at the 1 m reference distance.
    pub ref_power_dbm: f64,
}

/// Regime distance limits in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLimits {
    pub authentic_max_m: f64,
    pub unauthorized_min_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub aps: Vec<AccessPoint>,
    pub bounds: Bounds,
    pub workstation: Point,
    pub path_loss: PathLoss,
    pub sensitivity_floor_dbm: f64,
    pub zone_grid: ZoneGrid,
    pub regimes: RegimeLimits,
}

impl Environment {
    pub fn zone_of(&self, p: &Point) -> u32 {
        self.zone_grid.zone_of(&self.bounds, p)
    }

    pub fn ap(&self, ap_id: u32) -> Option<&AccessPoint> {
        self.aps.iter().find(|a| a.ap_id == ap_id)
    }

    /// Location zone reported for rows observed from `ap`.
    pub fn ap_location(&self, ap: &AccessPoint) -> u32 {
        self.zone_of(&ap.position)
    }

    pub fn load(path: &std::path::Path) -> Result<Environment> {
        let env: Environment = serde_json::from_reader(std::fs::File::open(path)?)?;
        Ok(env)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(&mut f, self)?;
        std::io::Write::write_all(&mut f, b"\n")?;
        Ok(())
    }
}

/// Reference power of a channel given the 2412 MHz reference.
pub fn channel_ref_power(ref_power_2412_dbm: f64, frequency_mhz: u32) -> f64 {
    ref_power_2412_dbm - 20.0 * (f64::from(frequency_mhz) / 2412.0).log10()
}

/// Lays out `config.ap_count` access points on distinct channels.
///
/// Placement, channel assignment and BSSIDs each draw from their own
/// derived stream of `seed`.
pub fn build_environment(config: &SimConfig, seed: u64) -> Result<Environment> {
    config.validate()?;
    if config.ap_count > CHANNEL_PLAN_MHZ.len() {
        return Err(Error::Config(format!(
            "at most {} access points fit on distinct channels",
            CHANNEL_PLAN_MHZ.len()
        )));
    }
    let bounds = Bounds { width: config.bounds_m[0], height: config.bounds_m[1] };
    let workstation = config
        .workstation_m
        .map(|[x, y]| Point::new(x, y))
        .unwrap_or_else(|| bounds.centre());

    let mut pos_rng = rng_from_seed(derive_seed(seed, 0));
    let mut chan_rng = rng_from_seed(derive_seed(seed, 1));
    let mut mac_rng = rng_from_seed(derive_seed(seed, 2));

    let mut channels = CHANNEL_PLAN_MHZ[..config.ap_count].to_vec();
    channels.shuffle(&mut chan_rng);

    let mut seen = HashSet::new();
    let mut aps = Vec::with_capacity(config.ap_count);
    for (i, &frequency_mhz) in channels.iter().enumerate() {
        let position = draw_ap_position(&bounds, &workstation, config.ap_radius_m, &mut pos_rng);
        let bssid = loop {
            let mut b: [u8; 6] = mac_rng.random();
            // locally administered, unicast
            b[0] = (b[0] & 0xFC) | 0x02;
            if seen.insert(b) {
                break Bssid(b);
            }
        };
        let ap_id = i as u32 + 1;
        aps.push(AccessPoint {
            ap_id,
            ssid: format!("lab-ap-{ap_id:02}"),
            bssid,
            frequency_mhz,
            position,
            ref_power_dbm: channel_ref_power(config.ref_power_dbm, frequency_mhz),
        });
    }

    Ok(Environment {
        aps,
        bounds,
        workstation,
        path_loss: PathLoss {
            exponent: config.path_loss_exponent,
            shadowing_sigma_db: config.shadowing_sigma_db,
        },
        sensitivity_floor_dbm: config.sensitivity_floor_dbm,
        zone_grid: ZoneGrid { cols: config.zone_grid[0], rows: config.zone_grid[1] },
        regimes: RegimeLimits {
            authentic_max_m: config.threshold_m(),
            unauthorized_min_m: config.unauthorized_min_m(),
        },
    })
}

fn draw_ap_position(bounds: &Bounds, centre: &Point, radius: f64, rng: &mut impl Rng) -> Point {
    if radius > 0.0 {
        for _ in 0..10_000 {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let p = Point::new(centre.x + r * theta.cos(), centre.y + r * theta.sin());
            if bounds.contains(&p) {
                return p;
            }
        }
    }
    Point::new(rng.random::<f64>() * bounds.width, rng.random::<f64>() * bounds.height)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_aps_with_distinct_bssids_and_channels() {
        let env = build_environment(&SimConfig::default(), 42).unwrap();
        assert_eq!(env.aps.len(), 10);
        let bssids: HashSet<_> = env.aps.iter().map(|a| a.bssid).collect();
        assert_eq!(bssids.len(), 10);
        let chans: HashSet<_> = env.aps.iter().map(|a| a.frequency_mhz).collect();
        assert_eq!(chans.len(), 10);
        for ap in &env.aps {
            assert!(is_valid_channel(ap.frequency_mhz));
            assert!((-50.0..=-20.0).contains(&ap.ref_power_dbm));
            assert!(env.bounds.contains(&ap.position));
        }
    }

    #[test]
    fn zero_aps_is_a_config_error() {
        let cfg = SimConfig { ap_count: 0, ..Default::default() };
        assert!(matches!(build_environment(&cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_bounds_is_a_config_error() {
        let cfg = SimConfig { bounds_m: [10.0, 0.0], ..Default::default() };
        assert!(matches!(build_environment(&cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = SimConfig::default();
        assert_eq!(build_environment(&cfg, 7).unwrap(), build_environment(&cfg, 7).unwrap());
        assert_ne!(build_environment(&cfg, 7).unwrap(), build_environment(&cfg, 8).unwrap());
    }

    #[test]
    fn bssid_text_round_trip() {
        let b: Bssid = "02:1a:ff:00:10:9c".parse().unwrap();
        assert_eq!(b.to_string(), "02:1a:ff:00:10:9c");
        assert!("02:1a:ff:00:10".parse::<Bssid>().is_err());
        assert!("02:1a:ff:00:10:zz".parse::<Bssid>().is_err());
    }

    #[test]
    fn channel_validity() {
        assert!(is_valid_channel(2412));
        assert!(is_valid_channel(2437));
        assert!(is_valid_channel(5180));
        assert!(!is_valid_channel(2413));
        assert!(!is_valid_channel(3000));
        assert!(CHANNEL_PLAN_MHZ.iter().all(|&c| is_valid_channel(c)));
    }

    #[test]
    fn free_space_channel_offset() {
        assert_eq!(channel_ref_power(-40.0, 2412), -40.0);
        let five = channel_ref_power(-40.0, 5180);
        assert!((five - (-40.0 - 20.0 * (5180.0f64 / 2412.0).log10())).abs() < 1e-12);
    }
}
