//! 2D geometry primitives shared across the crate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// A point in the plane, coordinates in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to another point.
    pub fn distance_to(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangular search area.
///
/// The corners are validated on construction: the min corner must lie
/// strictly below the max corner on both axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchArea {
    min: Point2,
    max: Point2,
}

impl SearchArea {
    pub fn new(min: Point2, max: Point2) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidConfig(
                "search area corners must be finite".into(),
            ));
        }
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::InvalidConfig(format!(
                "search area min corner ({}, {}) must lie strictly below max corner ({}, {}) on both axes",
                min.x, min.y, max.x, max.y
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min_corner(&self) -> Point2 {
        self.min
    }

    pub fn max_corner(&self) -> Point2 {
        self.max
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Whether `p` lies inside the area (bounds inclusive).
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Uniform draw over the area; consumes two uniform values, x then y.
    pub fn sample_uniform(&self, rng: &mut SimRng) -> Point2 {
        let x = rng.uniform(self.min.x, self.max.x);
        let y = rng.uniform(self.min.y, self.max.y);
        Point2::new(x, y)
    }
}
