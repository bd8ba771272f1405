//! WebSocket service on the demo room with template descriptions, for trying
//! a client without any files: `cargo run --example serve_demo -- 8080`.

use envision::anchors::ViewParams;
use envision::describer::{prebake, Backend, PrebakeOptions, RasterCapturer};
use envision::service::{server, Service, SessionConfig};
use std::sync::Arc;

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().init();
    let port: u16 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(8080);
    let scene = envision::demo::escape_room();
    let backend = Backend::Template(ViewParams::for_scene(&scene));
    let store = prebake(
        &scene,
        scene.anchor_points(),
        &RasterCapturer::default(),
        &backend,
        &PrebakeOptions::default(),
    )?;
    let mut service = Service::new(SessionConfig::default());
    service.add_scene(scene, Some(store));
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    println!("ws://{}/ws", listener.local_addr()?);
    server::serve(Arc::new(service), listener).await?;
    Ok(())
}
