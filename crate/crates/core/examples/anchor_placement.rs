//! Automatic anchor placement: greedy coverage over a floor grid so every
//! important object shows up in at least one baked view.

use envision::anchors::{
    auto_place_anchors, coverage_from, AnchorError, PlacementParams, ViewParams,
};

fn main() -> anyhow::Result<()> {
    let step: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1.0);
    let scene = envision::demo::escape_room();
    let params = ViewParams::for_scene(&scene);
    let anchors = match auto_place_anchors(&scene, &params, &PlacementParams::new(step)) {
        Ok(a) => a,
        Err(AnchorError::CoverageIncomplete { partial, uncovered }) => {
            println!("no grid point sees {uncovered:?}");
            partial
        }
        Err(e) => return Err(e.into()),
    };
    println!("grid step {step} m -> {} anchors", anchors.len());
    for a in &anchors {
        let seen = coverage_from(&scene, a.position, &params);
        println!(
            "  #{} at {:?} sees {:?}",
            a.index,
            <[f64; 3]>::from(a.position),
            seen
        );
    }
    let placed = scene.with_anchors(anchors)?;
    println!("{}", placed.to_json());
    Ok(())
}
