//! End-to-end analysis of one scenario and its presentation.
//!
//! Verdicts of the individual deciders are collected side by side and never
//! reconciled; the implication table records whether the known one-way
//! relationships between them hold on this input.

use crate::complexes::{detect_events_with, DetectOptions};
use crate::error::Result;
use crate::field::PrimeField;
use crate::model::{Point, Scenario};
use crate::oracle::{default_resolution, evasion_oracle, OracleVerdict};
use crate::rotation::{decide_evasion, RotationVerdict};
use crate::simplex::SimplicialComplex;
use crate::stacked::{build_stacked_complex, dsg_criterion, DsgVerdict};
use crate::stream::ComplexKind;
use crate::zigzag::{full_length_criterion, stream_barcode, Barcode, CriterionVerdict};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub field: u32,
    /// Degree of the zigzag criterion; `d - 1` for planar scenarios.
    pub degree: usize,
    pub tol: f64,
    pub oracle: bool,
    pub grid_h: Option<f64>,
    pub grid_dt: Option<f64>,
    pub timings: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { field: 2, degree: 1, tol: 1e-9, oracle: false, grid_h: None, grid_dt: None, timings: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDigest {
    pub description: Option<String>,
    pub sha256: String,
    pub sensors: usize,
    pub fence: usize,
}

impl ScenarioDigest {
    pub fn of(s: &Scenario) -> Self {
        let hash = Sha256::digest(s.to_json().as_bytes());
        ScenarioDigest {
            description: s.description.clone(),
            sha256: hash.iter().fold(String::new(), |mut acc, b| {
                let _ = write!(acc, "{b:02x}");
                acc
            }),
            sensors: s.len(),
            fence: s.fence_indices().len(),
        }
    }
}

/// Outcome of one decider: a verdict or the reason it declined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Verdict(T),
    Refused(String),
    NotRun,
}

impl<T: Copy> Outcome<T> {
    pub fn verdict(&self) -> Option<T> {
        match self {
            Outcome::Verdict(v) => Some(*v),
            _ => None,
        }
    }

    fn from_result(r: Result<T>) -> Self {
        r.map_or_else(|e| Outcome::Refused(e.to_string()), Outcome::Verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub zigzag: Outcome<CriterionVerdict>,
    pub dsg: Outcome<DsgVerdict>,
    pub rotation: Outcome<RotationVerdict>,
    pub oracle: Outcome<OracleVerdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Implication {
    pub rule: String,
    pub status: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub scenario: ScenarioDigest,
    pub parameters: AnalysisOptions,
    pub events: usize,
    pub slice_times: Vec<f64>,
    pub verdicts: Verdicts,
    /// Zigzag barcodes of the Čech stream by degree.
    pub barcodes: BTreeMap<usize, Barcode>,
    pub implications: Vec<Implication>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn violations(&self) -> usize {
        self.implications.iter().filter(|i| i.status == Check::Violated).count()
    }
}

/// Runs every decider that applies to `s`.
///
/// Failure to build the Čech stream is an error; refusals of individual
/// deciders are recorded in the report instead.
pub fn analyze(s: &Scenario, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let field = PrimeField::new(opts.field)?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let detect = DetectOptions { tol: opts.tol, ..DetectOptions::default() };
    let cech = detect_events_with(s, ComplexKind::Cech, &detect)?;
    lap("events", &mut timings);

    let mut barcodes = BTreeMap::new();
    for j in 0..=opts.degree.max(1) {
        barcodes.insert(j, stream_barcode(&cech, j, field)?);
    }
    let zigzag = Outcome::Verdict(full_length_criterion(&barcodes[&opts.degree], cech.n()));
    lap("zigzag", &mut timings);

    let dsg = Outcome::from_result(
        build_stacked_complex(&cech).and_then(|sc| dsg_criterion(&sc, opts.degree + 1, field)).map(|r| r.verdict),
    );
    lap("dsg", &mut timings);

    let rotation = Outcome::from_result(
        detect_events_with(s, ComplexKind::Alpha, &detect).and_then(|es| decide_evasion(&es)).map(|d| d.verdict),
    );
    lap("rotation", &mut timings);

    let oracle = if opts.oracle {
        let (h0, dt0) = default_resolution(s);
        Outcome::from_result(evasion_oracle(s, opts.grid_h.unwrap_or(h0), opts.grid_dt.unwrap_or(dt0)).map(|r| r.verdict))
    } else {
        Outcome::NotRun
    };
    lap("oracle", &mut timings);

    let verdicts = Verdicts { zigzag, dsg, rotation, oracle };
    Ok(AnalysisReport {
        scenario: ScenarioDigest::of(s),
        parameters: opts.clone(),
        events: cech.n(),
        slice_times: cech.grid.sample_times.clone(),
        implications: implications(&verdicts),
        verdicts,
        barcodes,
        timings: opts.timings.then_some(timings),
    })
}

/// The relationships every correct set of verdicts satisfies.
pub fn implications(v: &Verdicts) -> Vec<Implication> {
    use Check::*;
    let zz = v.zigzag.verdict().map(|x| x == CriterionVerdict::NoEvasionCertified);
    let dsg = v.dsg.verdict().map(|x| x == DsgVerdict::NoEvasionCertified);
    let oracle_no = v.oracle.verdict().map(|x| x == OracleVerdict::NoEvasion);
    let rot_no = v.rotation.verdict().map(|x| x == RotationVerdict::NoEvasion);
    let implies = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(a), Some(b)) => {
            if !a || b {
                Holds
            } else {
                Violated
            }
        }
        _ => NotApplicable,
    };
    let equal = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(a), Some(b)) => {
            if a == b {
                Holds
            } else {
                Violated
            }
        }
        _ => NotApplicable,
    };
    vec![
        Implication { rule: "zigzag certifies no evasion => oracle finds none".into(), status: implies(zz, oracle_no) },
        Implication { rule: "dsg certifies no evasion => oracle finds none".into(), status: implies(dsg, oracle_no) },
        Implication { rule: "zigzag certifies <=> dsg certifies".into(), status: equal(zz, dsg) },
        Implication { rule: "rotation verdict = oracle verdict".into(), status: equal(rot_no, oracle_no) },
    ]
}

/// Plain-text implication table for a set of named reports.
pub fn implication_table(reports: &[(String, AnalysisReport)]) -> String {
    let mut out = String::new();
    let rules: Vec<&str> = reports.first().map_or(vec![], |(_, r)| r.implications.iter().map(|i| i.rule.as_str()).collect());
    let _ = writeln!(out, "{:32} {}", "scenario", (1..=rules.len()).map(|k| format!("R{k:<3}")).collect::<String>());
    for (name, r) in reports {
        let cells: String = r
            .implications
            .iter()
            .map(|i| match i.status {
                Check::Holds => "ok  ",
                Check::Violated => "FAIL",
                Check::NotApplicable => "-   ",
            })
            .collect();
        let _ = writeln!(out, "{name:32} {cells}");
    }
    for (k, rule) in rules.iter().enumerate() {
        let _ = writeln!(out, "R{}: {rule}", k + 1);
    }
    let total: usize = reports.iter().map(|(_, r)| r.violations()).sum();
    let _ = writeln!(out, "violations: {total}");
    out
}

/// One row per interval; the x axis runs over the slots `1..=m`, with the
/// slice times printed under the slice slots.
pub fn barcode_svg(barcode: &Barcode, slice_times: &[f64], title: &str) -> String {
    let m = barcode.length.max(1);
    let (left, step, row, top) = (40.0, 24.0, 14.0, 30.0);
    let width = left * 2.0 + step * m as f64;
    let height = top + row * barcode.intervals.len() as f64 + 50.0;
    let x = |slot: f64| left + step * (slot - 1.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="9">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="14" font-size="11">{}</text>"#, escape(title));
    for (k, &(b, d)) in barcode.intervals.iter().enumerate() {
        let y = top + row * k as f64;
        let full = b == 1 && d == barcode.length;
        let colour = if full { "#b22222" } else { "#1f4e8c" };
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="8" fill="{colour}"><title>[{b}, {d}]</title></rect>"#,
            x(b as f64) - step * 0.4,
            y,
            step * (d - b) as f64 + step * 0.8,
        );
    }
    let axis = top + row * barcode.intervals.len() as f64 + 10.0;
    let _ = writeln!(s, r##"<line x1="{left}" y1="{axis}" x2="{:.1}" y2="{axis}" stroke="#000"/>"##, x(m as f64));
    for slot in 1..=m {
        let _ = writeln!(s, r##"<line x1="{0:.1}" y1="{axis}" x2="{0:.1}" y2="{1}" stroke="#000"/>"##, x(slot as f64), axis + 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{slot}</text>"#, x(slot as f64), axis + 14.0);
        if slot % 2 == 1 {
            if let Some(t) = slice_times.get(slot / 2) {
                let _ = writeln!(s, r##"<text x="{:.1}" y="{}" text-anchor="middle" fill="#666">{t:.3}</text>"##, x(slot as f64), axis + 26.0);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Sensing discs, edges and triangles of one slice.
pub fn complex_svg(points: &[Point], radius: f64, k: &SimplicialComplex, bbox: [f64; 4], title: &str) -> String {
    let [x0, y0, x1, y1] = bbox;
    let scale = 400.0 / (x1 - x0).max(y1 - y0).max(1e-9);
    let map = |p: Point| ((p[0] - x0) * scale + 10.0, (y1 - p[1]) * scale + 20.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" font-family="monospace" font-size="10">"#,
        (x1 - x0) * scale + 20.0,
        (y1 - y0) * scale + 30.0
    );
    let _ = writeln!(s, r#"<text x="10" y="13">{}</text>"#, escape(title));
    for p in points {
        let (cx, cy) = map(*p);
        let _ = writeln!(s, r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="{:.1}" fill="#ccc" fill-opacity="0.5"/>"##, radius * scale);
    }
    for t in k.iter().filter(|t| t.dim() == 2) {
        let v = t.vertices();
        let pts: Vec<String> = v.iter().map(|&i| map(points[i])).map(|(a, b)| format!("{a:.1},{b:.1}")).collect();
        let _ = writeln!(s, r##"<polygon points="{}" fill="#e8a33d" fill-opacity="0.6"/>"##, pts.join(" "));
    }
    for e in k.iter().filter(|e| e.dim() == 1) {
        let v = e.vertices();
        let ((ax, ay), (bx, by)) = (map(points[v[0]]), map(points[v[1]]));
        let _ = writeln!(s, r##"<line x1="{ax:.1}" y1="{ay:.1}" x2="{bx:.1}" y2="{by:.1}" stroke="#333"/>"##);
    }
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = map(*p);
        let _ = writeln!(s, r#"<circle cx="{cx:.1}" cy="{cy:.1}" r="2.5"><title>{i}</title></circle>"#);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
