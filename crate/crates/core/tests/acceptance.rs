//! Acceptance run: one line per criterion, non-zero exit if any fails.

use evasion::chain::{betti_numbers, Strategy};
use evasion::complexes::{cech_complex, detect_events, vietoris_rips};
use evasion::fixtures::all_fixtures;
use evasion::oracle::{default_resolution, evasion_oracle, OracleVerdict};
use evasion::random::{random_event_stream, random_points, random_zigzag_module};
use evasion::rotation::{boundary_cycles, check_cycle_invariants, decide_evasion, four_face_snapshot, RotationSystem, RotationVerdict};
use evasion::stacked::{build_stacked_complex, dsg_criterion, triangulate, DsgVerdict};
use evasion::stream::ComplexKind;
use evasion::zigzag::{
    batch_barcode, brute_force_decompose, cohomology_zigzag, stream_barcode, stream_barcode_with_stats, zigzag_from_stream,
};
use evasion::{
    decompose, full_length_criterion, Barcode, CriterionVerdict, Error, EventBatch, EventOp, PrimeField, Simplex,
    SimplicialComplex, SimplicialEventStream, TimeGrid,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

struct Run {
    name: String,
    connected: bool,
    cech: SimplicialEventStream,
    oracle: OracleVerdict,
    frozen: Option<String>,
    zigzag: CriterionVerdict,
    barcode: Barcode,
    dsg: DsgVerdict,
    rotation: Result<RotationVerdict, Error>,
}

fn suite() -> Vec<Run> {
    let frozen: BTreeMap<String, serde_json::Value> = serde_json::from_str(
        &std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/expected.json")).expect("frozen verdicts"),
    )
    .expect("frozen verdicts parse");
    let f = PrimeField::TWO;
    all_fixtures()
        .expect("fixtures build")
        .into_iter()
        .filter(|(info, _)| info.suite)
        .map(|(info, s)| {
            let cech = detect_events(&s, ComplexKind::Cech, info.tol).expect("cech stream");
            let barcode = stream_barcode(&cech, 1, f).expect("barcode");
            let (h, dt) = default_resolution(&s);
            let rotation = detect_events(&s, ComplexKind::Alpha, info.tol).and_then(|es| decide_evasion(&es)).map(|d| d.verdict);
            Run {
                name: info.name.to_string(),
                connected: info.connected,
                oracle: evasion_oracle(&s, h, dt).expect("oracle").verdict,
                frozen: frozen.get(info.name).and_then(|v| v["oracle"].as_str()).map(str::to_string),
                zigzag: full_length_criterion(&barcode, cech.n()),
                dsg: dsg_criterion(&build_stacked_complex(&cech).expect("stack"), 2, f).expect("dsg").verdict,
                rotation,
                barcode,
                cech,
            }
        })
        .collect()
}

fn oracle_name(v: OracleVerdict) -> &'static str {
    match v {
        OracleVerdict::Evasion => "evasion",
        OracleVerdict::NoEvasion => "no_evasion",
    }
}

fn nerve_sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut violations, mut simplices) = (0, 0);
    for _ in 0..200 {
        let pts = random_points(&mut rng, 15, 3.5, 3.5);
        let low = vietoris_rips(&pts, 3f64.sqrt() / 2.0, 3).map_err(|e| e.to_string())?;
        let mid = cech_complex(&pts, 1.0, 3).map_err(|e| e.to_string())?;
        let high = vietoris_rips(&pts, 1.0, 3).map_err(|e| e.to_string())?;
        violations += low.iter().filter(|s| !mid.contains(s)).count();
        violations += mid.iter().filter(|s| !high.contains(s)).count();
        simplices += mid.len();
    }
    let detail = format!("200 configurations, {simplices} Čech simplices, {violations} violations");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn decomposition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut largest = 0;
    for k in 0..50 {
        let z = random_zigzag_module(&mut rng, PrimeField::TWO, 7, 3);
        largest = largest.max(z.dims.iter().sum::<usize>());
        let fast = decompose(&z);
        let slow = brute_force_decompose(&z).map_err(|e| format!("module {k}: {e}"))?;
        if fast != slow {
            return Err(format!("module {k}: {fast:?} vs {slow:?}"));
        }
        fast.check_consistency(&z).map_err(|e| format!("module {k}: {e}"))?;
    }
    Ok(format!("50 modules up to total dimension {largest} agree, all barcodes consistent"))
}

fn duality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let f = PrimeField::TWO;
    for k in 0..100 {
        let es = random_event_stream(&mut rng, 6, 14);
        for j in 0..=1 {
            let h = decompose(&zigzag_from_stream(&es, j, f).map_err(|e| e.to_string())?);
            let c = decompose(&cohomology_zigzag(&es, j, f).map_err(|e| e.to_string())?);
            if h != c {
                return Err(format!("stream {k}, degree {j}: {h:?} vs {c:?}"));
            }
        }
    }
    Ok("100 streams, degrees 0 and 1".into())
}

/// A two-vertex window sliding along a path: tiny slices, long history.
fn sliding_window(events: usize) -> SimplicialEventStream {
    let mut batches = Vec::new();
    let (mut head, mut tail) = (1, 0);
    for i in 0..events {
        let t = (i + 1) as f64 / (events + 1) as f64;
        let (op, simplices) = if i % 2 == 0 {
            head += 1;
            (EventOp::Add, vec![Simplex::vertex(head), Simplex::edge(head - 1, head)])
        } else {
            tail += 1;
            (EventOp::Remove, vec![Simplex::edge(tail - 1, tail), Simplex::vertex(tail - 1)])
        };
        batches.push(EventBatch { t, op, simplices, added: vec![], kind: None, rotations: None });
    }
    let initial = vec![Simplex::vertex(0), Simplex::vertex(1), Simplex::edge(0, 1)];
    SimplicialEventStream {
        kind: ComplexKind::Cech,
        vertex_count: head + 1,
        labels: None,
        fence: vec![],
        grid: TimeGrid::from_events(batches.iter().map(|b| b.t).collect()).expect("grid"),
        initial,
        initial_rotations: None,
        outer: None,
        events: batches,
    }
}

fn streaming() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let f = PrimeField::TWO;
    for k in 0..100 {
        let es = random_event_stream(&mut rng, 6, 14);
        for j in 0..=1 {
            let a = stream_barcode(&es, j, f).map_err(|e| e.to_string())?;
            let b = batch_barcode(&es, j, f).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("stream {k}, degree {j}: {a:?} vs {b:?}"));
            }
        }
    }
    let es = sliding_window(50);
    let history: BTreeSet<Simplex> = es.initial.iter().chain(es.events.iter().flat_map(|e| &e.simplices)).cloned().collect();
    let largest = es.slices().map_err(|e| e.to_string())?.iter().map(SimplicialComplex::len).max().unwrap_or(0);
    if history.len() < 10 * largest {
        return Err(format!("history {} is not 10x slice {largest}", history.len()));
    }
    let mut worst = 0;
    for j in 0..=1 {
        let (_, stats) = stream_barcode_with_stats(&es, j, f).map_err(|e| e.to_string())?;
        if !stats.within_bound() {
            return Err(format!("degree {j}: tracked {} vs slice {}", stats.max_tracked, stats.max_slice));
        }
        worst = worst.max(stats.max_tracked);
    }
    Ok(format!("100 streams agree; peak state {worst} for slices of {largest} and history {}", history.len()))
}

fn frozen_mismatch(runs: &[Run]) -> Option<String> {
    runs.iter()
        .find(|r| r.frozen.as_deref() != Some(oracle_name(r.oracle)))
        .map(|r| format!("{}: oracle {} differs from frozen {:?}", r.name, oracle_name(r.oracle), r.frozen))
}

fn long_bar_necessary(runs: &[Run]) -> Check {
    if let Some(m) = frozen_mismatch(runs) {
        return Err(m);
    }
    let mut evasive = 0;
    for r in runs.iter().filter(|r| r.oracle == OracleVerdict::Evasion) {
        evasive += 1;
        if !r.barcode.has_full_length() {
            return Err(format!("{}: oracle finds evasion but no full-length bar", r.name));
        }
    }
    let bar = runs.iter().find(|r| r.name == "full_bar_no_evasion").ok_or("full_bar_no_evasion missing")?;
    if !(bar.barcode.has_full_length() && bar.oracle == OracleVerdict::NoEvasion) {
        return Err("full_bar_no_evasion does not show a full bar without evasion".into());
    }
    let m = 2 * bar.cech.n() + 1;
    Ok(format!("{evasive} evasive fixtures carry full bars; full_bar_no_evasion has [1, {m}] and oracle no_evasion"))
}

fn criterion_equivalence(runs: &[Run]) -> Check {
    let certified = runs.iter().filter(|r| r.zigzag == CriterionVerdict::NoEvasionCertified).count();
    match runs
        .iter()
        .find(|r| (r.zigzag == CriterionVerdict::NoEvasionCertified) != (r.dsg == DsgVerdict::NoEvasionCertified))
    {
        Some(r) => Err(format!("{}: zigzag {:?}, dsg {:?}", r.name, r.zigzag, r.dsg)),
        None => Ok(format!("{} fixtures, {certified} certified by both", runs.len())),
    }
}

fn embedding_dependence(runs: &[Run]) -> Check {
    let get = |n: &str| runs.iter().find(|r| r.name == n).ok_or(format!("{n} missing"));
    let (up, down) = (get("square_opens_up")?, get("square_opens_down")?);
    if !up.cech.same_combinatorics(&down.cech) {
        return Err("event streams differ".into());
    }
    if up.barcode != down.barcode {
        return Err(format!("barcodes differ: {:?} vs {:?}", up.barcode, down.barcode));
    }
    if (up.oracle, down.oracle) != (OracleVerdict::Evasion, OracleVerdict::NoEvasion) {
        return Err(format!("oracle verdicts {:?} / {:?}", up.oracle, down.oracle));
    }
    Ok(format!("{} identical events, {} identical bars, oracle evasion / no_evasion", up.cech.n(), up.barcode.len()))
}

fn stronger_sensors(runs: &[Run]) -> Check {
    if let Some(m) = frozen_mismatch(runs) {
        return Err(m);
    }
    let mut matched = 0;
    for r in runs {
        let expected = match r.oracle {
            OracleVerdict::Evasion => RotationVerdict::EvasionExists,
            OracleVerdict::NoEvasion => RotationVerdict::NoEvasion,
        };
        match (&r.rotation, r.connected) {
            (Ok(v), true) if *v == expected => matched += 1,
            (Err(Error::Disconnected { .. }), false) => {}
            (other, _) => return Err(format!("{}: rotation {other:?}, oracle {:?}", r.name, r.oracle)),
        }
    }
    let refused = runs.iter().filter(|r| !r.connected).count();
    if matched < 10 || refused < 2 {
        return Err(format!("only {matched} connected fixtures and {refused} refusals"));
    }
    Ok(format!("{matched} connected fixtures match the oracle; {refused} disconnected fixtures refused"))
}

/// Grid triangulation with random diagonals; `wrap` glues the first and last column.
fn grid(rng: &mut ChaCha8Rng, rows: usize, cols: usize, wrap: bool) -> Vec<Simplex> {
    let width = if wrap { cols } else { cols + 1 };
    let id = |i: usize, j: usize| i * width + j % width;
    let mut tris = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j), id(i + 1, j + 1));
            if rng.gen_bool(0.5) {
                tris.push(Simplex::triangle(a, b, d));
                tris.push(Simplex::triangle(a, c, d));
            } else {
                tris.push(Simplex::triangle(a, b, c));
                tris.push(Simplex::triangle(b, c, d));
            }
        }
    }
    tris
}

/// `g` cycles of random length through vertex 0.
fn wedge(rng: &mut ChaCha8Rng, g: usize) -> Vec<Simplex> {
    let (mut edges, mut next) = (Vec::new(), 1);
    for _ in 0..g {
        let len = rng.gen_range(3..7);
        let cycle: Vec<usize> = std::iter::once(0).chain(next..next + len - 1).collect();
        next += len - 1;
        for k in 0..len {
            edges.push(Simplex::edge(cycle[k], cycle[(k + 1) % len]));
        }
    }
    edges
}

fn relabel(rng: &mut ChaCha8Rng, tops: Vec<Simplex>) -> SimplicialComplex {
    let n = tops.iter().flat_map(|s| s.vertices().to_vec()).max().unwrap_or(0) + 1;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    SimplicialComplex::closure(tops.iter().map(|s| Simplex::new(s.vertices().iter().map(|&v| perm[v]).collect()).unwrap()))
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn homology_kernel(runs: &[Run]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut checked = 0;
    for k in 0..20 {
        let (tops, expected, what) = match k % 3 {
            0 => (grid(&mut rng, 1 + k % 4, 2 + k % 3, false), vec![1], "disk"),
            1 => (grid(&mut rng, 1 + k % 3, 3 + k % 4, true), vec![1, 1], "annulus"),
            _ => {
                let g = 1 + k % 4;
                (wedge(&mut rng, g), vec![1, g], "wedge")
            }
        };
        let complex = relabel(&mut rng, tops);
        let (cells, _) = complex.to_cell_complex(&BTreeSet::new());
        let f = PrimeField::new([2, 3, 5][k % 3]).unwrap();
        cells.validate(f).map_err(|e| format!("{what} {k}: {e}"))?;
        let got = trimmed(betti_numbers(&cells, f, Strategy::Auto));
        if got != expected {
            return Err(format!("{what} {k}: betti {got:?}, expected {expected:?}"));
        }
        checked += 1;
    }
    for k in 0..20 {
        let es = random_event_stream(&mut rng, 5, 8);
        let sc = build_stacked_complex(&es).map_err(|e| e.to_string())?;
        let (tri, _) = triangulate(&es).map_err(|e| e.to_string())?;
        let (tc, _) = tri.to_cell_complex(&BTreeSet::new());
        for p in [2, 3] {
            let f = PrimeField::new(p).unwrap();
            sc.complex.validate(f).map_err(|e| format!("stack {k}: {e}"))?;
            tc.validate(f).map_err(|e| format!("triangulated stack {k}: {e}"))?;
            let (a, b) = (betti_numbers(&sc.complex, f, Strategy::Auto), betti_numbers(&tc, f, Strategy::Auto));
            if trimmed(a.clone()) != trimmed(b.clone()) {
                return Err(format!("stack {k} over F_{p}: cellular {a:?}, triangulated {b:?}"));
            }
        }
    }
    for r in runs {
        build_stacked_complex(&r.cech)
            .map_err(|e| e.to_string())?
            .complex
            .validate(PrimeField::TWO)
            .map_err(|e| format!("{}: {e}", r.name))?;
    }
    Ok(format!("∂² = 0 everywhere; {checked} known spaces and 20 stacks match; {} fixture stacks checked", runs.len()))
}

fn rotation_kernel() -> Check {
    let rs = RotationSystem::new(0..5, &four_face_snapshot()).map_err(|e| e.to_string())?;
    let faces = boundary_cycles(&rs).len();
    if faces != 4 {
        return Err(format!("four-face example has {faces} boundary cycles"));
    }
    let mut events = 0;
    let mut fixtures = 0;
    for (info, s) in all_fixtures().map_err(|e| e.to_string())? {
        if !info.suite {
            continue;
        }
        let es = detect_events(&s, ComplexKind::Alpha, info.tol).map_err(|e| format!("{}: {e}", info.name))?;
        let snap = es.initial_rotations.clone().ok_or(format!("{}: no rotations", info.name))?;
        let mut rs = RotationSystem::new(0..es.vertex_count, &snap).map_err(|e| format!("{}: {e}", info.name))?;
        let slices = es.slices().map_err(|e| e.to_string())?;
        for (i, k) in slices.iter().enumerate() {
            if i > 0 {
                if let Some(u) = &es.events[i - 1].rotations {
                    rs = rs.apply_updates(u).map_err(|e| format!("{} event {i}: {e}", info.name))?;
                }
                events += 1;
            }
            check_cycle_invariants(&rs).map_err(|e| format!("{} slice {i}: {e}", info.name))?;
            let edges: BTreeSet<(usize, usize)> = k.edges().into_iter().collect();
            if rs.edges() != edges {
                return Err(format!("{} slice {i}: rotation edges differ from the complex", info.name));
            }
        }
        fixtures += 1;
    }
    Ok(format!("4 boundary cycles; invariants hold after {events} events on {fixtures} fixtures"))
}

fn main() {
    let started = Instant::now();
    let runs = suite();
    println!("suite of {} fixtures prepared in {:.1}s", runs.len(), started.elapsed().as_secs_f64());
    let criteria: Vec<Criterion> = vec![
        ("nerve sandwich", Box::new(nerve_sandwich)),
        ("decomposition against brute force", Box::new(decomposition)),
        ("homology / cohomology duality", Box::new(duality)),
        ("streaming equivalence and memory", Box::new(streaming)),
        ("long bar necessary, not sufficient", Box::new(|| long_bar_necessary(&runs))),
        ("relative criterion equivalence", Box::new(|| criterion_equivalence(&runs))),
        ("embedding dependence", Box::new(|| embedding_dependence(&runs))),
        ("rotation decider against oracle", Box::new(|| stronger_sensors(&runs))),
        ("homology kernel", Box::new(|| homology_kernel(&runs))),
        ("rotation-system kernel", Box::new(rotation_kernel)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {detail}", k + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
