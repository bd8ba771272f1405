//! "Where am I?": bake one description per anchor view with the offline
//! template backend, then answer from a few poses.

use envision::anchors::ViewParams;
use envision::describer::{prebake, Backend, PrebakeOptions, RasterCapturer};
use envision::interpreter::describe_here;
use envision::{Pose, Vec3};

fn main() -> anyhow::Result<()> {
    let scene = envision::demo::escape_room();
    let backend = Backend::Template(ViewParams::for_scene(&scene));
    let store = prebake(
        &scene,
        scene.anchor_points(),
        &RasterCapturer::default(),
        &backend,
        &PrebakeOptions::default(),
    )?;
    println!("baked {} views for {}", store.len(), store.scene_name);

    for (position, yaw) in [
        ([0.0, 1.6, 0.0], 0.0),
        ([1.3, 1.6, -1.2], 95.0),
        ([-1.0, 1.6, -1.0], 250.0),
    ] {
        let pose = Pose::new(Vec3::from(position), yaw);
        let events = describe_here(&store, scene.anchor_points(), &pose, 0.0, 1.0)?;
        println!(
            "at {position:?} facing {yaw}: {}",
            events[0].speech_text().unwrap_or_default()
        );
    }
    Ok(())
}
