//! Regenerates the JSON fixture files and the frozen oracle verdicts.
//!
//! `cargo run --release -p evasion --example write_fixtures [DIR]`

use evasion::fixtures::all_fixtures;
use evasion::oracle::{default_resolution, refine_until_stable};
use evasion::rotation::four_face_snapshot;
use serde_json::{json, Map};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    std::fs::create_dir_all(&dir)?;
    let mut expected = Map::new();
    for (info, s) in all_fixtures()? {
        std::fs::write(dir.join(format!("{}.json", info.name)), s.to_json() + "\n")?;
        let (h, dt) = default_resolution(&s);
        let r = refine_until_stable(&s, h, dt, 2)?;
        println!("{:32} {:?} (h = {:.4}, dt = {:.2e})", info.name, r.verdict, r.h, r.dt);
        expected.insert(info.name.into(), json!({ "oracle": r.verdict, "h": r.h, "dt": r.dt }));
    }
    std::fs::write(dir.join("expected.json"), serde_json::to_string_pretty(&expected)? + "\n")?;
    std::fs::write(
        dir.join("four_faces.rotation.json"),
        serde_json::to_string_pretty(&four_face_snapshot())? + "\n",
    )?;
    Ok(())
}
