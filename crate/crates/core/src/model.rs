//! Scenarios: a planar domain, a sensing radius and piecewise-linear sensor
//! trajectories over the time interval `[0, 1]`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// `params = [xmin, ymin, xmax, ymax]`
    Rect,
    /// `params = [cx, cy, radius]`
    Disk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub kind: DomainKind,
    pub params: Vec<f64>,
}

impl Domain {
    pub fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Domain { kind: DomainKind::Rect, params: vec![xmin, ymin, xmax, ymax] }
    }

    pub fn disk(cx: f64, cy: f64, radius: f64) -> Self {
        Domain { kind: DomainKind::Disk, params: vec![cx, cy, radius] }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            DomainKind::Rect => {
                self.params.len() == 4 && self.params[0] < self.params[2] && self.params[1] < self.params[3]
            }
            DomainKind::Disk => self.params.len() == 3 && self.params[2] > 0.0,
        };
        if !ok || self.params.iter().any(|v| !v.is_finite()) {
            return Err(Error::scenario("domain.params", format!("invalid parameters {:?} for {:?}", self.params, self.kind)));
        }
        Ok(())
    }

    /// Closed containment with a small slack for points placed on the boundary.
    pub fn contains(&self, p: Point) -> bool {
        const SLACK: f64 = 1e-9;
        match self.kind {
            DomainKind::Rect => {
                let [x0, y0, x1, y1] = [self.params[0], self.params[1], self.params[2], self.params[3]];
                p[0] >= x0 - SLACK && p[0] <= x1 + SLACK && p[1] >= y0 - SLACK && p[1] <= y1 + SLACK
            }
            DomainKind::Disk => {
                let (dx, dy) = (p[0] - self.params[0], p[1] - self.params[1]);
                (dx * dx + dy * dy).sqrt() <= self.params[2] + SLACK
            }
        }
    }

    /// `[xmin, ymin, xmax, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        match self.kind {
            DomainKind::Rect => [self.params[0], self.params[1], self.params[2], self.params[3]],
            DomainKind::Disk => {
                let (cx, cy, r) = (self.params[0], self.params[1], self.params[2]);
                [cx - r, cy - r, cx + r, cy + r]
            }
        }
    }

    /// `samples` points evenly spaced along the boundary.
    pub fn boundary_samples(&self, samples: usize) -> Vec<Point> {
        match self.kind {
            DomainKind::Disk => {
                let (cx, cy, r) = (self.params[0], self.params[1], self.params[2]);
                (0..samples)
                    .map(|k| {
                        let a = std::f64::consts::TAU * k as f64 / samples as f64;
                        [cx + r * a.cos(), cy + r * a.sin()]
                    })
                    .collect()
            }
            DomainKind::Rect => {
                let [x0, y0, x1, y1] = self.bounding_box();
                let (w, h) = (x1 - x0, y1 - y0);
                let per = 2.0 * (w + h);
                (0..samples)
                    .map(|k| {
                        let mut s = per * k as f64 / samples as f64;
                        if s < w {
                            return [x0 + s, y0];
                        }
                        s -= w;
                        if s < h {
                            return [x1, y0 + s];
                        }
                        s -= h;
                        if s < w {
                            return [x1 - s, y1];
                        }
                        s -= w;
                        [x0, y1 - s]
                    })
                    .collect()
            }
        }
    }
}

/// A waypoint `[t, x, y]`.
pub type Waypoint = [f64; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorTrajectory {
    pub id: String,
    #[serde(default)]
    pub fence: bool,
    pub waypoints: Vec<Waypoint>,
}

impl SensorTrajectory {
    pub fn fixed(id: impl Into<String>, p: Point, fence: bool) -> Self {
        SensorTrajectory { id: id.into(), fence, waypoints: vec![[0.0, p[0], p[1]], [1.0, p[0], p[1]]] }
    }

    pub fn moving(id: impl Into<String>, waypoints: Vec<Waypoint>) -> Self {
        SensorTrajectory { id: id.into(), fence: false, waypoints }
    }

    fn validate(&self) -> Result<()> {
        let field = format!("sensors[{}].waypoints", self.id);
        let w = &self.waypoints;
        if w.is_empty() {
            return Err(Error::scenario(field, "no waypoints"));
        }
        if w.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::scenario(field, "non-finite coordinate"));
        }
        if w[0][0] != 0.0 || w[w.len() - 1][0] != 1.0 {
            return Err(Error::scenario(field, "waypoint times must start at 0 and end at 1"));
        }
        if w.windows(2).any(|p| p[0][0] >= p[1][0]) {
            return Err(Error::scenario(field, "waypoint times must be strictly increasing"));
        }
        if self.fence && w.iter().any(|p| p[1] != w[0][1] || p[2] != w[0][2]) {
            return Err(Error::scenario(field, "fence sensor moves"));
        }
        Ok(())
    }

    /// Linear interpolation between the bracketing waypoints.
    pub fn position_at(&self, t: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        Ok(self.position_unchecked(t))
    }

    pub(crate) fn position_unchecked(&self, t: f64) -> Point {
        let w = &self.waypoints;
        let k = w.partition_point(|p| p[0] <= t);
        if k == 0 {
            return [w[0][1], w[0][2]];
        }
        if k == w.len() {
            let l = w[w.len() - 1];
            return [l[1], l[2]];
        }
        let (a, b) = (w[k - 1], w[k]);
        let s = (t - a[0]) / (b[0] - a[0]);
        [a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]
    }

    /// Largest speed over all segments.
    pub fn max_speed(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|p| ((p[1][1] - p[0][1]).hypot(p[1][2] - p[0][2])) / (p[1][0] - p[0][0]))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub domain: Domain,
    pub sensor_radius: f64,
    pub sensors: Vec<SensorTrajectory>,
}

pub fn load_scenario(text: &str) -> Result<Scenario> {
    let s: Scenario = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

impl Scenario {
    pub fn new(domain: Domain, sensor_radius: f64, sensors: Vec<SensorTrajectory>) -> Result<Self> {
        let s = Scenario { description: None, domain, sensor_radius, sensors };
        s.validate()?;
        Ok(s)
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = Some(d.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Structural checks; geometric assumptions are left to [`validate_assumptions`].
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if !(self.sensor_radius > 0.0 && self.sensor_radius.is_finite()) {
            return Err(Error::scenario("sensor_radius", "must be positive"));
        }
        let mut ids = BTreeSet::new();
        for s in &self.sensors {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::scenario("sensors", format!("duplicate id {:?}", s.id)));
            }
            s.validate()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn fence_indices(&self) -> Vec<usize> {
        (0..self.sensors.len()).filter(|&i| self.sensors[i].fence).collect()
    }

    pub fn fence_ids(&self) -> Vec<&str> {
        self.sensors.iter().filter(|s| s.fence).map(|s| s.id.as_str()).collect()
    }

    /// Positions of all sensors at time `t`, in sensor order.
    pub fn positions(&self, t: f64) -> Result<Vec<Point>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        Ok(self.positions_unchecked(t))
    }

    pub(crate) fn positions_unchecked(&self, t: f64) -> Vec<Point> {
        self.sensors.iter().map(|s| s.position_unchecked(t)).collect()
    }

    /// All waypoint times of all sensors, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.sensors.iter().flat_map(|s| s.waypoints.iter().map(|w| w[0])).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    pub fn max_speed(&self) -> f64 {
        self.sensors.iter().map(SensorTrajectory::max_speed).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub min_pairwise_distance: f64,
    pub fence_covers_boundary: bool,
    pub sensors_inside_domain: bool,
    pub warnings: Vec<String>,
}

/// Samples the scenario at `samples` evenly spaced times.
///
/// Coincident sensors are an error; everything else is reported.
pub fn validate_assumptions(s: &Scenario, samples: usize) -> Result<Diagnostics> {
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are required".into()));
    }
    let mut times: Vec<f64> = (0..samples).map(|k| k as f64 / (samples - 1) as f64).collect();
    times.extend(s.breakpoints());
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mut min_d = f64::INFINITY;
    let mut inside = true;
    for &t in &times {
        let p = s.positions_unchecked(t);
        for i in 0..p.len() {
            inside &= s.domain.contains(p[i]);
            for j in i + 1..p.len() {
                let d = (p[i][0] - p[j][0]).hypot(p[i][1] - p[j][1]);
                if d == 0.0 {
                    return Err(Error::CoincidentSensors { a: s.sensors[i].id.clone(), b: s.sensors[j].id.clone(), t });
                }
                min_d = min_d.min(d);
            }
        }
    }

    let fence: Vec<Point> = s.fence_indices().iter().map(|&i| s.sensors[i].position_unchecked(0.0)).collect();
    let r = s.sensor_radius;
    let covers = !fence.is_empty()
        && s.domain
            .boundary_samples(samples.max(8))
            .iter()
            .all(|b| fence.iter().any(|f| (b[0] - f[0]).hypot(b[1] - f[1]) <= r));

    let mut warnings = Vec::new();
    if !covers {
        warnings.push("fence does not cover boundary".to_string());
    }
    if !inside {
        warnings.push("a sensor leaves the domain".to_string());
    }
    Ok(Diagnostics { min_pairwise_distance: min_d, fence_covers_boundary: covers, sensors_inside_domain: inside, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_static() -> Scenario {
        Scenario::new(Domain::rect(-1.0, -1.0, 1.0, 1.0), 1.0, vec![SensorTrajectory::fixed("a", [0.0, 0.0], false)]).unwrap()
    }

    #[test]
    fn minimal_document_loads() {
        let text = r#"{"domain":{"kind":"rect","params":[-1,-1,1,1]},"sensor_radius":1,
            "sensors":[{"id":"a","fence":false,"waypoints":[[0,0,0],[1,0,0]]}]}"#;
        let s = load_scenario(text).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.fence_ids().is_empty());
    }

    #[test]
    fn rejects_moving_fence_and_unknown_fields() {
        let text = r#"{"domain":{"kind":"rect","params":[-1,-1,1,1]},"sensor_radius":1,
            "sensors":[{"id":"a","fence":true,"waypoints":[[0,0,0],[1,0.5,0]]}]}"#;
        let e = load_scenario(text).unwrap_err();
        assert!(e.to_string().contains("fence sensor moves"), "{e}");
        let bad = one_static().to_json().replacen('{', "{\"extra\": 1,", 1);
        assert!(matches!(load_scenario(&bad), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match load_scenario("{\n  \"domain\": ,\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn position_examples() {
        let a = SensorTrajectory::moving("a", vec![[0.0, 0.0, 0.0], [1.0, 2.0, 0.0]]);
        assert_eq!(a.position_at(0.5).unwrap(), [1.0, 0.0]);
        assert_eq!(a.position_at(0.0).unwrap(), [0.0, 0.0]);
        let b = SensorTrajectory::moving("b", vec![[0.0, 0.0, 0.0], [0.25, 1.0, 1.0], [1.0, 1.0, 1.0]]);
        assert_eq!(b.position_at(0.5).unwrap(), [1.0, 1.0]);
        assert!(b.position_at(1.5).is_err());
    }

    #[test]
    fn assumption_checks() {
        let twins = Scenario::new(
            Domain::rect(-2.0, -2.0, 2.0, 2.0),
            1.0,
            vec![SensorTrajectory::fixed("a", [0.0, 0.0], false), SensorTrajectory::fixed("b", [0.0, 0.0], false)],
        )
        .unwrap();
        assert!(matches!(validate_assumptions(&twins, 4), Err(Error::CoincidentSensors { .. })));

        let ring: Vec<SensorTrajectory> = (0..8)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 8.0;
                SensorTrajectory::fixed(format!("f{k}"), [2.0 * a.cos(), 2.0 * a.sin()], true)
            })
            .collect();
        let s = Scenario::new(Domain::disk(0.0, 0.0, 2.0), 1.0, ring).unwrap();
        let d = validate_assumptions(&s, 360).unwrap();
        assert!(d.fence_covers_boundary);

        let d = validate_assumptions(&one_static(), 4).unwrap();
        assert!(d.warnings.contains(&"fence does not cover boundary".to_string()));
    }
}
