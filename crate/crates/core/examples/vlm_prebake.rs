//! Render the demo room's anchor views and, when ENVISION_VLM_URL and
//! ENVISION_VLM_KEY are set, describe them with the vision-language model.
//! Without credentials the captures are written as PNGs for inspection.
//!
//!     cargo run --example vlm_prebake -- [out-dir]

use envision::anchors::enumerate_views;
use envision::describer::{
    prebake, save_store, Backend, PrebakeOptions, RasterCapturer, ViewCapturer, VlmClient,
    VlmConfig,
};

fn main() -> anyhow::Result<()> {
    let out =
        std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "captures".into()));
    std::fs::create_dir_all(&out)?;
    let scene = envision::demo::escape_room();
    let capturer = RasterCapturer::default();
    match VlmConfig::from_env() {
        Ok(cfg) => {
            let backend = Backend::Vlm(VlmClient::new(cfg)?);
            let store = prebake(
                &scene,
                scene.anchor_points(),
                &capturer,
                &backend,
                &PrebakeOptions::default(),
            )?;
            let path = out.join("escape_room.csv");
            save_store(&store, &path)?;
            for (k, text) in store.entries() {
                println!("{k}: {text}");
            }
            println!("wrote {}", path.display());
        }
        Err(e) => {
            println!("{e}; saving captures only");
            for view in enumerate_views(scene.anchor_points())? {
                let anchor = &scene.anchor_points()[view.anchor_index];
                let capture = capturer.capture(&scene, anchor, view)?;
                let path = out.join(format!(
                    "anchor{}_yaw{:03}.png",
                    view.anchor_index,
                    view.yaw()
                ));
                capture.image.save(&path)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
