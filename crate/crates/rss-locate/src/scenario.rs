//! Sensor placement scenarios: parametric generators and file I/O.
//!
//! Two generators cover the canonical cases: [`good_geometry`] spreads
//! sensors evenly on a circle around the target, [`bad_geometry`] clusters
//! them on an arc to one side. Arbitrary scenarios load from a small TOML
//! file, strictly validated.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point2, SearchArea};

/// A localization scenario: one stationary target, `M` sensors at known
/// positions, and the rectangular search area containing them all.
///
/// Invariants are validated on construction: at least 3 pairwise-distinct
/// sensors, target distinct from every sensor, everything inside the area.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    label: String,
    target: Point2,
    sensors: Vec<Point2>,
    area: SearchArea,
}

impl Scenario {
    pub fn new(
        label: impl Into<String>,
        target: Point2,
        sensors: Vec<Point2>,
        area: SearchArea,
    ) -> Result<Self> {
        if sensors.len() < 3 {
            return Err(Error::InvalidScenario(format!(
                "at least 3 sensors are required, got {}",
                sensors.len()
            )));
        }
        if !target.is_finite() {
            return Err(Error::InvalidScenario(
                "target coordinates must be finite".into(),
            ));
        }
        if !area.contains(target) {
            return Err(Error::InvalidScenario(format!(
                "target ({}, {}) lies outside the search area",
                target.x, target.y
            )));
        }
        for (i, s) in sensors.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "sensor {i} coordinates must be finite"
                )));
            }
            if !area.contains(*s) {
                return Err(Error::InvalidScenario(format!(
                    "sensor {i} at ({}, {}) lies outside the search area",
                    s.x, s.y
                )));
            }
            if *s == target {
                return Err(Error::InvalidScenario(format!(
                    "sensor {i} coincides with the target"
                )));
            }
            for (j, other) in sensors.iter().enumerate().take(i) {
                if s == other {
                    return Err(Error::InvalidScenario(format!(
                        "sensors {j} and {i} coincide at ({}, {})",
                        s.x, s.y
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            target,
            sensors,
            area,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn target(&self) -> Point2 {
        self.target
    }

    pub fn sensors(&self) -> &[Point2] {
        &self.sensors
    }

    pub fn sensor_count(&self) -> usize {
        self.sensors.len()
    }

    pub fn area(&self) -> SearchArea {
        self.area
    }
}

/// Sensors evenly spaced on a full circle around the target — the favorable
/// surround placement.
///
/// Sensor `k` sits at angle `2 pi k / m` on the circle of `radius` meters
/// centered on the target. Errors when the circle does not fit in the area.
pub fn good_geometry(
    m: usize,
    radius: f64,
    target: Point2,
    area: SearchArea,
) -> Result<Scenario> {
    check_placement_inputs(m, radius)?;
    let fits = target.x - radius >= area.min_corner().x
        && target.x + radius <= area.max_corner().x
        && target.y - radius >= area.min_corner().y
        && target.y + radius <= area.max_corner().y;
    if !fits {
        return Err(Error::InvalidScenario(format!(
            "circle of radius {radius} around ({}, {}) exits the search area",
            target.x, target.y
        )));
    }
    let sensors = (0..m)
        .map(|k| {
            let angle = TAU * k as f64 / m as f64;
            Point2::new(
                target.x + radius * angle.cos(),
                target.y + radius * angle.sin(),
            )
        })
        .collect();
    Scenario::new("good", target, sensors, area)
}

/// Sensors clustered on one side of the target: evenly spread across an arc
/// of `arc_degrees` centered on the +x axis, at `radius` meters.
///
/// The default arc of 60 degrees keeps every sensor well inside the +x
/// half-plane as seen from the target.
pub fn bad_geometry(
    m: usize,
    radius: f64,
    arc_degrees: f64,
    target: Point2,
    area: SearchArea,
) -> Result<Scenario> {
    check_placement_inputs(m, radius)?;
    if !(arc_degrees > 0.0 && arc_degrees <= 90.0) {
        return Err(Error::InvalidScenario(format!(
            "arc must be in (0, 90] degrees, got {arc_degrees}"
        )));
    }
    let arc = arc_degrees.to_radians();
    let start = -arc / 2.0;
    let step = arc / (m - 1) as f64;
    let sensors: Vec<Point2> = (0..m)
        .map(|k| {
            let angle = start + step * k as f64;
            Point2::new(
                target.x + radius * angle.cos(),
                target.y + radius * angle.sin(),
            )
        })
        .collect();
    for s in &sensors {
        if !area.contains(*s) {
            return Err(Error::InvalidScenario(format!(
                "sensor placement at ({}, {}) exits the search area",
                s.x, s.y
            )));
        }
    }
    Scenario::new("bad", target, sensors, area)
}

fn check_placement_inputs(m: usize, radius: f64) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidScenario(format!(
            "at least 3 sensors are required, got {m}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidScenario(format!(
            "placement radius must be > 0, got {radius}"
        )));
    }
    Ok(())
}

/// On-disk scenario schema. TOML with exactly these keys:
///
/// ```toml
/// label = "bad"
/// target = [0.0, 0.0]
/// sensors = [[34.64, -20.0], [39.39, -6.94], [39.39, 6.94], [34.64, 20.0]]
/// area = [[-50.0, -50.0], [50.0, 50.0]]
/// ```
///
/// Unknown keys are rejected.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    label: String,
    target: [f64; 2],
    sensors: Vec<[f64; 2]>,
    area: [[f64; 2]; 2],
}

/// Loads and validates a scenario from a TOML file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        context: "reading scenario file",
        path: path.to_path_buf(),
        source,
    })?;
    let file: ScenarioFile = toml::from_str(&text).map_err(|e| Error::ScenarioParse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let area = SearchArea::new(
        Point2::new(file.area[0][0], file.area[0][1]),
        Point2::new(file.area[1][0], file.area[1][1]),
    )?;
    Scenario::new(
        file.label,
        Point2::new(file.target[0], file.target[1]),
        file.sensors
            .into_iter()
            .map(|[x, y]| Point2::new(x, y))
            .collect(),
        area,
    )
}

/// Writes a scenario to a TOML file loadable by [`load_scenario`].
pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = ScenarioFile {
        label: scenario.label.clone(),
        target: [scenario.target.x, scenario.target.y],
        sensors: scenario.sensors.iter().map(|s| [s.x, s.y]).collect(),
        area: [
            [scenario.area.min_corner().x, scenario.area.min_corner().y],
            [scenario.area.max_corner().x, scenario.area.max_corner().y],
        ],
    };
    let text = toml::to_string(&file).expect("scenario serializes");
    fs::write(path, text).map_err(|source| Error::Io {
        context: "writing scenario file",
        path: path.to_path_buf(),
        source,
    })
}
