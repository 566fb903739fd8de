use serde::{Deserialize, Serialize};

/// A point on the floor plan, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn centre(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }
}

/// Row-major partition of the floor into integer zones, numbered from 1 at
/// the origin corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneGrid {
    pub cols: u32,
    pub rows: u32,
}

impl ZoneGrid {
    pub fn zone_of(&self, bounds: &Bounds, p: &Point) -> u32 {
        let cell = |v: f64, extent: f64, n: u32| -> u32 {
            let idx = (v / extent * f64::from(n)).floor();
            idx.clamp(0.0, f64::from(n - 1)) as u32
        };
        let c = cell(p.x, bounds.width, self.cols);
        let r = cell(p.y, bounds.height, self.rows);
        r * self.cols + c + 1
    }

    pub fn zone_count(&self) -> u32 {
        self.cols * self.rows
    }
}
