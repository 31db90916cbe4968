//! Runs every decider on every built-in scenario and prints one line each.

use evasion::complexes::{detect_events, DetectOptions};
use evasion::fixtures::all_fixtures;
use evasion::oracle::{default_resolution, evasion_oracle};
use evasion::rotation::decide_evasion;
use evasion::stacked::{build_stacked_complex, dsg_criterion};
use evasion::stream::ComplexKind;
use evasion::zigzag::stream_barcode;
use evasion::{full_length_criterion, PrimeField};
use std::time::Instant;

fn main() {
    let f = PrimeField::new(2).unwrap();
    for (info, s) in all_fixtures().unwrap() {
        let clock = Instant::now();
        let (h, dt) = default_resolution(&s);
        let oracle = evasion_oracle(&s, h, dt).map(|r| format!("{:?}", r.verdict));
        let cech = detect_events(&s, ComplexKind::Cech, info.tol);
        let (zz, dsg, n) = match &cech {
            Ok(es) => {
                let bc = stream_barcode(es, 1, f).map(|b| format!("{:?}", full_length_criterion(&b, es.n())));
                let dsg = if info.suite {
                    build_stacked_complex(es).and_then(|sc| dsg_criterion(&sc, 2, f)).map(|r| format!("{:?}", r.verdict))
                } else {
                    Ok("-".into())
                };
                (bc, dsg, es.n())
            }
            Err(e) => (Err(e.clone()), Err(e.clone()), 0),
        };
        let rot = detect_events(&s, ComplexKind::Alpha, info.tol)
            .and_then(|es| decide_evasion(&es))
            .map(|d| format!("{:?}", d.verdict));
        let _ = DetectOptions::default();
        println!(
            "{:32} n={:3} oracle={:?} zigzag={:?} dsg={:?} rotation={:?} ({:.1}s)",
            info.name,
            n,
            oracle,
            zz,
            dsg,
            rot,
            clock.elapsed().as_secs_f64()
        );
    }
}
