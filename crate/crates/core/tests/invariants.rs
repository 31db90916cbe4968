use evasion::chain::{betti_numbers, Strategy as Reduction};
use evasion::complexes::{alpha_complex, cech_complex, vietoris_rips};
use evasion::model::{load_scenario, Domain, Scenario, SensorTrajectory};
use evasion::random::{random_event_stream, random_zigzag_module};
use evasion::rotation::{boundary_cycles, check_cycle_invariants, RotationSystem};
use evasion::zigzag::{batch_barcode, brute_force_decompose, cohomology_zigzag, stream_barcode};
use evasion::{decompose, PrimeField, Simplex, SimplicialComplex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn field() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(vec![2u32, 3, 5]).prop_map(|p| PrimeField::new(p).unwrap())
}

fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0f64..4.0, 0.0f64..4.0).prop_map(|(x, y)| [x, y]), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_zigzag_module(&mut rng, PrimeField::TWO, 6, 2);
        let bars = decompose(&z);
        prop_assert_eq!(&bars, &brute_force_decompose(&z).unwrap());
        bars.check_consistency(&z).unwrap();
    }

    #[test]
    fn direct_sum_adds_barcodes(seed in any::<u64>(), f in field()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_zigzag_module(&mut rng, f, 5, 2);
        let mut b = random_zigzag_module(&mut rng, f, 5, 2);
        while b.len() != a.len() {
            b = random_zigzag_module(&mut rng, f, 5, 2);
        }
        if a.directions() != b.directions() {
            return Ok(());
        }
        let mut expected = decompose(&a).intervals;
        expected.extend(decompose(&b).intervals);
        expected.sort();
        prop_assert_eq!(decompose(&a.direct_sum(&b).unwrap()).intervals, expected);
    }

    #[test]
    fn streaming_and_duality_agree(seed in any::<u64>(), f in field(), j in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let es = random_event_stream(&mut rng, 5, 10);
        let batch = batch_barcode(&es, j, f).unwrap();
        prop_assert_eq!(&stream_barcode(&es, j, f).unwrap(), &batch);
        prop_assert_eq!(&decompose(&cohomology_zigzag(&es, j, f).unwrap()), &batch);
    }

    #[test]
    fn betti_numbers_sum_to_euler_characteristic(
        tops in prop::collection::vec(prop::collection::btree_set(0usize..7, 1..4), 1..10),
        f in field(),
    ) {
        let k = SimplicialComplex::closure(tops.into_iter().map(|v| Simplex::new(v.into_iter().collect()).unwrap()));
        let (cells, _) = k.to_cell_complex(&BTreeSet::new());
        cells.validate(f).unwrap();
        let betti = betti_numbers(&cells, f, Reduction::Auto);
        let alternating: i64 = betti.iter().enumerate().map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        prop_assert_eq!(alternating, cells.euler_characteristic());
        prop_assert_eq!(betti_numbers(&cells, f, Reduction::Dense), betti_numbers(&cells, f, Reduction::Sparse));
    }

    #[test]
    fn nerve_sandwich(pts in points(2..9)) {
        let distinct: BTreeSet<(u64, u64)> = pts.iter().map(|p| (p[0].to_bits(), p[1].to_bits())).collect();
        prop_assume!(distinct.len() == pts.len());
        let low = vietoris_rips(&pts, 3f64.sqrt() / 2.0, 3).unwrap();
        let cech = cech_complex(&pts, 1.0, 3).unwrap();
        let high = vietoris_rips(&pts, 1.0, 3).unwrap();
        prop_assert!(low.is_subcomplex_of(&cech));
        prop_assert!(cech.is_subcomplex_of(&high));
    }

    #[test]
    fn alpha_rotation_is_a_planar_embedding(pts in points(3..12)) {
        let Ok((k, snap)) = alpha_complex(&pts, 0.9) else {
            return Ok(());
        };
        let rs = RotationSystem::new(0..pts.len(), &snap).unwrap();
        check_cycle_invariants(&rs).unwrap();
        let edges: BTreeSet<(usize, usize)> = k.edges().into_iter().collect();
        prop_assert_eq!(rs.edges(), edges);
        let directed: usize = boundary_cycles(&rs).iter().map(|c| c.len()).sum();
        prop_assert_eq!(directed, 2 * k.count_in_dim(1));
    }

    #[test]
    fn scenario_json_round_trip(pts in points(1..6), r in 0.1f64..2.0) {
        let sensors = pts
            .iter()
            .enumerate()
            .map(|(i, p)| SensorTrajectory::moving(format!("s{i}"), vec![[0.0, p[0], p[1]], [1.0, p[1], p[0]]]))
            .collect();
        let s = Scenario::new(Domain::rect(0.0, 0.0, 4.0, 4.0), r, sensors).unwrap();
        prop_assert_eq!(load_scenario(&s.to_json()).unwrap(), s);
    }
}
