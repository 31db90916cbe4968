use evasion::fixtures::{all_fixtures, fixture};
use evasion::model::load_scenario;
use evasion::oracle::{default_resolution, evasion_oracle, verify_witness, OracleVerdict};
use evasion::rotation::{boundary_cycles, four_face_snapshot, RotationSystem};
use evasion::stream::RotationSnapshot;
use std::collections::BTreeMap;
use std::path::PathBuf;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read(name: &str) -> String {
    std::fs::read_to_string(dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn files_match_builders() {
    for (info, s) in all_fixtures().unwrap() {
        let loaded = load_scenario(&read(&format!("{}.json", info.name))).unwrap();
        assert_eq!(loaded, s, "{} is stale; rerun the write_fixtures example", info.name);
    }
}

#[derive(serde::Deserialize)]
struct Frozen {
    oracle: OracleVerdict,
}

#[test]
fn oracle_reproduces_frozen_verdicts() {
    let frozen: BTreeMap<String, Frozen> = serde_json::from_str(&read("expected.json")).unwrap();
    assert_eq!(frozen.len(), evasion::fixtures::FIXTURES.len());
    for (name, want) in frozen {
        let s = fixture(&name).unwrap();
        let (h, dt) = default_resolution(&s);
        let got = evasion_oracle(&s, h, dt).unwrap();
        assert_eq!(got.verdict, want.oracle, "{name}");
        assert!(got.warnings.is_empty(), "{name}: {:?}", got.warnings);
        if let Some(w) = &got.witness {
            verify_witness(&s, w).unwrap();
        }
    }
}

#[test]
fn four_face_file_has_four_boundary_cycles() {
    let snap: RotationSnapshot = serde_json::from_str(&read("four_faces.rotation.json")).unwrap();
    assert_eq!(snap, four_face_snapshot());
    let rs = RotationSystem::new(0..5, &snap).unwrap();
    assert_eq!(boundary_cycles(&rs).len(), 4);
}
