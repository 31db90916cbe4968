//! Built-in scenarios used by the tests, the guide and the command line.
//!
//! Most networks are built from two layouts with sensing radius 1:
//!
//! * a **corridor**: a fenced strip whose interior is closed off by a row of
//!   plug sensors; lifting a plug towards the top fence opens a hole beneath
//!   it, lowering it closes the hole again;
//! * a **divided room**: a fenced square split by a horizontal line of sensors
//!   running from the left fence to the right fence.
//!
//! Moving sensors receive a small fixed offset drawn from a seeded generator so
//! that no two combinatorial changes happen at the same instant.

use crate::error::{Error, Result};
use crate::model::{Domain, Scenario, SensorTrajectory, Waypoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Catalogue entry for a built-in scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Event-merging tolerance the scenario is meant to be analysed with.
    pub tol: f64,
    /// Whether the covered region stays connected at all times.
    pub connected: bool,
    /// Whether the scenario has a fence and belongs to the criterion suite.
    pub suite: bool,
}

const fn info(name: &'static str, summary: &'static str, connected: bool) -> FixtureInfo {
    FixtureInfo { name, summary, tol: 1e-9, connected, suite: true }
}

pub const FIXTURES: &[FixtureInfo] = &[
    FixtureInfo {
        name: "third_sensor_approaches",
        summary: "two overlapping sensors; a third arrives along their bisector and joins both at once",
        tol: 1e-4,
        connected: false,
        suite: false,
    },
    info("static_hole", "fixed fence ring around an uncovered square", true),
    info("static_covered", "fixed sensors covering the whole domain", true),
    info("square_opens_up", "a square pocket is cut from the upper region and released into the lower one", true),
    info("square_opens_down", "mirror image: the pocket is cut from the lower region and released upwards", true),
    info("full_bar_no_evasion", "same network as square_opens_down", true),
    info("hole_drifts", "a corridor hole moves one plug to the right at a time", true),
    info("hole_teleports", "a corridor hole closes after a distant one has opened", true),
    info("holes_close", "both corridor holes close one after the other", true),
    info("pocket_runs_backward", "a clean pocket splits off a late hole and drifts into an early one", true),
    info("sweep_full", "a wall of sensors sweeps the whole room", true),
    info("sweep_half", "a wall of sensors sweeps half the room", true),
    info("island_behind_full_sweep", "full sweep leaving a detached sensor behind the wall", false),
    info("island_behind_half_sweep", "half sweep leaving a detached sensor behind the wall", false),
    info("hole_drifts_jitter", "hole_drifts with larger random offsets", true),
    info("hole_teleports_jitter", "hole_teleports with larger random offsets", true),
    info("pocket_runs_backward_jitter", "pocket_runs_backward with larger random offsets", true),
    info("square_opens_up_jitter", "square_opens_up with larger random offsets", true),
    info("sweep_half_jitter", "sweep_half with larger random offsets", true),
];

pub fn fixture_info(name: &str) -> Option<&'static FixtureInfo> {
    FIXTURES.iter().find(|f| f.name == name)
}

/// Builds the named scenario.
pub fn fixture(name: &str) -> Result<Scenario> {
    let s = match name {
        "third_sensor_approaches" => third_sensor_approaches(),
        "static_hole" => static_hole(),
        "static_covered" => static_covered(),
        "square_opens_up" => divided_room(1.0, 0.01, 1),
        "square_opens_down" | "full_bar_no_evasion" => divided_room(-1.0, 0.01, 1),
        "hole_drifts" => corridor(&HOLE_DRIFTS, 0.01, 2),
        "hole_teleports" => corridor(&HOLE_TELEPORTS, 0.01, 3),
        "holes_close" => corridor(&HOLES_CLOSE, 0.01, 4),
        "pocket_runs_backward" => corridor(&POCKET_RUNS_BACKWARD, 0.01, 5),
        "sweep_full" => room_sweep(7.2, false, 0.01, 6),
        "sweep_half" => room_sweep(4.8, false, 0.01, 7),
        "island_behind_full_sweep" => room_sweep(7.2, true, 0.01, 8),
        "island_behind_half_sweep" => room_sweep(4.8, true, 0.01, 9),
        "hole_drifts_jitter" => corridor(&HOLE_DRIFTS, 0.02, 102),
        "hole_teleports_jitter" => corridor(&HOLE_TELEPORTS, 0.02, 103),
        "pocket_runs_backward_jitter" => corridor(&POCKET_RUNS_BACKWARD, 0.02, 105),
        "square_opens_up_jitter" => divided_room(1.0, 0.02, 101),
        "sweep_half_jitter" => room_sweep(4.8, false, 0.02, 107),
        _ => return Err(Error::InvalidParameter(format!("unknown fixture {name:?}"))),
    };
    let info = fixture_info(name).expect("catalogue and builders agree");
    let mut s = s?.with_description(info.summary);
    // round to a micrometre grid so files and builders agree bit for bit
    for w in s.sensors.iter_mut().flat_map(|t| t.waypoints.iter_mut()) {
        w[1] = (w[1] * 1e6).round() / 1e6;
        w[2] = (w[2] * 1e6).round() / 1e6;
    }
    Ok(s)
}

/// Every catalogued scenario, in catalogue order.
pub fn all_fixtures() -> Result<Vec<(&'static FixtureInfo, Scenario)>> {
    FIXTURES.iter().map(|f| Ok((f, fixture(f.name)?))).collect()
}

/// Fence sensors every `step` along the boundary of `[0, w] x [0, h]`.
fn fence_rect(w: f64, h: f64, step: f64, rng: &mut ChaCha8Rng, amp: f64) -> Vec<SensorTrajectory> {
    let (nx, ny) = ((w / step).round() as usize, (h / step).round() as usize);
    let mut pts = Vec::new();
    for i in 0..=nx {
        pts.push(([i as f64 * w / nx as f64, 0.0], i > 0 && i < nx, true));
        pts.push(([i as f64 * w / nx as f64, h], i > 0 && i < nx, true));
    }
    for j in 1..ny {
        pts.push(([0.0, j as f64 * h / ny as f64], true, false));
        pts.push(([w, j as f64 * h / ny as f64], true, false));
    }
    pts.into_iter()
        .enumerate()
        .map(|(k, (mut p, slide, horizontal))| {
            // slide along the side; corners stay put
            if slide {
                p[usize::from(!horizontal)] += rng.gen_range(-amp..amp);
            }
            SensorTrajectory::fixed(format!("f{k}"), p, true)
        })
        .collect()
}

/// Piecewise-linear path with a constant random offset.
fn path(id: impl Into<String>, stops: &[Waypoint], rng: &mut ChaCha8Rng, amp: f64) -> SensorTrajectory {
    let (dx, dy) = (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp));
    let mut w: Vec<Waypoint> = stops.iter().map(|s| [s[0], s[1] + dx, s[2] + dy]).collect();
    if w[0][0] > 0.0 {
        w.insert(0, [0.0, w[0][1], w[0][2]]);
    }
    if w[w.len() - 1][0] < 1.0 {
        let l = w[w.len() - 1];
        w.push([1.0, l[1], l[2]]);
    }
    SensorTrajectory::moving(id, w)
}

fn third_sensor_approaches() -> Result<Scenario> {
    Scenario::new(
        Domain::rect(-2.0, -1.0, 2.0, 5.0),
        1.0,
        vec![
            SensorTrajectory::fixed("a", [-0.01, 0.0], false),
            SensorTrajectory::fixed("b", [0.01, 0.0], false),
            SensorTrajectory::moving("c", vec![[0.0, 0.0, 4.0], [1.0, 0.0, 0.5]]),
        ],
    )
}

fn static_hole() -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    Scenario::new(Domain::rect(0.0, 0.0, 4.8, 4.8), 1.0, fence_rect(4.8, 4.8, 1.6, &mut rng, 0.01))
}

fn static_covered() -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sensors = fence_rect(4.8, 4.8, 1.6, &mut rng, 0.01);
    let mut k = 0;
    let mut add = |x: f64, y: f64, rng: &mut ChaCha8Rng| {
        sensors.push(path(format!("c{k}"), &[[0.0, x, y]], rng, 0.01));
        k += 1;
    };
    for i in 0..3 {
        for j in 0..3 {
            add(0.8 + 1.6 * i as f64, 0.8 + 1.6 * j as f64, &mut rng);
        }
    }
    for i in 1..3 {
        for j in 1..3 {
            add(1.6 * i as f64, 1.6 * j as f64, &mut rng);
        }
    }
    Scenario::new(Domain::rect(0.0, 0.0, 4.8, 4.8), 1.0, sensors)
}

/// Plug moves in the corridor: `(plug, start, end, lift)`.
type PlugMove = (usize, f64, f64, bool);

struct CorridorPlan {
    raised: &'static [usize],
    moves: &'static [PlugMove],
}

const HOLE_DRIFTS: CorridorPlan = CorridorPlan {
    raised: &[1],
    moves: &[(2, 0.1, 0.25, true), (1, 0.3, 0.45, false), (3, 0.5, 0.65, true), (2, 0.7, 0.85, false)],
};

const HOLE_TELEPORTS: CorridorPlan = CorridorPlan { raised: &[1], moves: &[(3, 0.1, 0.3, true), (1, 0.4, 0.6, false)] };

const HOLES_CLOSE: CorridorPlan = CorridorPlan { raised: &[1, 3], moves: &[(1, 0.2, 0.4, false), (3, 0.6, 0.8, false)] };

const POCKET_RUNS_BACKWARD: CorridorPlan = CorridorPlan {
    raised: &[0],
    moves: &[
        (4, 0.05, 0.13, true),
        (3, 0.16, 0.24, true),
        (2, 0.27, 0.35, true),
        (3, 0.38, 0.46, false),
        (1, 0.49, 0.57, true),
        (0, 0.6, 0.68, false),
        (1, 0.71, 0.79, false),
        (2, 0.82, 0.9, false),
    ],
};

const PLUG_LOW: f64 = 1.5;
const PLUG_HIGH: f64 = 2.5;

/// Corridor `[0, 8] x [0, 3]` with five plugs at `x = 0.8 + 1.6 k`.
fn corridor(plan: &CorridorPlan, amp: f64, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sensors = fence_rect(8.0, 3.0, 1.6, &mut rng, 0.01);
    for k in 0..5 {
        let x = 0.8 + 1.6 * k as f64;
        let mut y = if plan.raised.contains(&k) { PLUG_HIGH } else { PLUG_LOW };
        let mut stops = vec![[0.0, x, y]];
        for &(_, a, b, lift) in plan.moves.iter().filter(|m| m.0 == k) {
            stops.push([a, x, y]);
            y = if lift { PLUG_HIGH } else { PLUG_LOW };
            stops.push([b, x, y]);
        }
        sensors.push(path(format!("p{k}"), &stops, &mut rng, amp));
    }
    Scenario::new(Domain::rect(0.0, 0.0, 8.0, 3.0), 1.0, sensors)
}

/// Room `[0, 9.6]^2` split by a line of sensors.
///
/// The line starts pressed against the bottom fence, rises to the middle, two
/// of its sensors fold out to close a square on the side `side` (+1 above, -1
/// below), the square's lower edge is broken, the line straightens and finally
/// presses against the top fence.
/// Sensor id, x per stage and y per stage.
type Stage = (&'static str, [f64; 7], [Option<f64>; 7]);

fn divided_room(side: f64, amp: f64, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sensors = fence_rect(9.6, 9.6, 1.6, &mut rng, 0.01);
    let times = [0.0, 1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0, 4.0 / 6.0, 5.0 / 6.0, 1.0];
    let (low, mid, high) = (0.9, 4.8, 8.7);
    let jut = mid + 1.8 * side;
    // x positions at each stage; `None` for the y-coordinate means "on the line"
    let plan: [Stage; 8] = [
        ("l0", [0.8; 7], [None; 7]),
        ("l1", [2.4; 7], [None; 7]),
        ("u", [3.2, 3.2, 3.7, 4.2, 4.2, 4.4, 4.4], [None, None, Some(jut), Some(jut), Some(jut), None, None]),
        ("a", [4.0, 4.0, 4.0, 4.0, 3.6, 3.6, 3.6], [None; 7]),
        ("b", [5.6, 5.6, 5.6, 5.6, 6.0, 6.0, 6.0], [None; 7]),
        ("w", [6.4, 6.4, 5.9, 5.4, 5.4, 5.2, 5.2], [None, None, Some(jut), Some(jut), Some(jut), None, None]),
        ("l4", [7.2; 7], [None; 7]),
        ("l5", [8.8; 7], [None; 7]),
    ];
    let line_y = [low, mid, mid, mid, mid, mid, high];
    for (id, xs, ys) in plan {
        let dx = rng.gen_range(-amp..amp);
        let w = (0..7).map(|k| [times[k], xs[k] + dx, ys[k].unwrap_or(line_y[k])]).collect();
        sensors.push(SensorTrajectory::moving(id, w));
    }
    Scenario::new(Domain::rect(0.0, 0.0, 9.6, 9.6), 1.0, sensors)
}

/// Room `[0, 8]^2` swept left to right by a vertical wall ending at `x = stop`.
fn room_sweep(stop: f64, island: bool, amp: f64, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sensors = fence_rect(8.0, 8.0, 1.6, &mut rng, 0.01);
    for k in 0..5 {
        let y = 0.8 + 1.6 * k as f64;
        sensors.push(path(format!("wall{k}"), &[[0.0, 0.8, y], [1.0, stop, y]], &mut rng, amp));
    }
    if island {
        sensors.push(path("island", &[[0.0, 1.6, 4.0], [0.3, 2.4, 4.0]], &mut rng, amp));
    }
    Scenario::new(Domain::rect(0.0, 0.0, 8.0, 8.0), 1.0, sensors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_builds_and_validates() {
        for (info, s) in all_fixtures().unwrap() {
            let d = crate::model::validate_assumptions(&s, 200).unwrap();
            assert!(d.sensors_inside_domain, "{}", info.name);
            assert_eq!(d.fence_covers_boundary, info.suite, "{}", info.name);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(fixture("nope").is_err());
    }
}
