//! Device pair placement for the two collection regimes.
//!
//! A pair is centred on the workstation: the separation `d` is drawn
//! uniformly from the regime's range, the pair axis from a uniform angle,
//! and the two devices sit at `±d/2` along it. Draws that push a device off
//! the floor are rejected and redrawn.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::environment::Environment;
use super::geometry::Point;
use super::scan::DevicePose;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Authentic,
    Unauthorized,
}

impl Regime {
    pub fn label(self) -> u8 {
        match self {
            Regime::Authentic => 1,
            Regime::Unauthorized => 0,
        }
    }
}

const MAX_ATTEMPTS: usize = 100_000;

/// Places a pair around `centre` with separation exactly `separation_m`
/// along `angle`.
pub fn pair_at(centre: Point, separation_m: f64, angle: f64) -> (DevicePose, DevicePose) {
    let (dx, dy) = (separation_m / 2.0 * angle.cos(), separation_m / 2.0 * angle.sin());
    (
        DevicePose::login(Point::new(centre.x + dx, centre.y + dy)),
        DevicePose::mobile(Point::new(centre.x - dx, centre.y - dy)),
    )
}

pub fn place_pair<R: Rng + ?Sized>(env: &Environment, regime: Regime, rng: &mut R) -> Result<(DevicePose, DevicePose)> {
    let limits = env.regimes;
    let diag = env.bounds.diagonal();
    let (lo, hi) = match regime {
        Regime::Authentic => (0.0, limits.authentic_max_m),
        Regime::Unauthorized => {
            if limits.unauthorized_min_m > diag {
                return Err(Error::Geometry(format!(
                    "floor diagonal {diag:.3} m is shorter than the unauthorized minimum {:.3} m",
                    limits.unauthorized_min_m
                )));
            }
            (limits.unauthorized_min_m, diag)
        }
    };
    for _ in 0..MAX_ATTEMPTS {
        let d = match regime {
            // (0, hi]
            Regime::Authentic => hi * (1.0 - rng.random::<f64>()),
            Regime::Unauthorized => lo + (hi - lo) * rng.random::<f64>(),
        };
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let (a, b) = pair_at(env.workstation, d, angle);
        if env.bounds.contains(&a.position) && env.bounds.contains(&b.position) {
            return Ok((a, b));
        }
    }
    Err(Error::Geometry(format!("could not fit a {regime:?} pair on the floor plan")))
}
