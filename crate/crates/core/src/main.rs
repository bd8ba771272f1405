use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use envision::anchors::{auto_place_anchors, PlacementParams, ViewParams};
use envision::describer::{
    load_store, prebake, save_store, Backend, PrebakeOptions, RasterCapturer, VlmClient, VlmConfig,
};
use envision::scene::load_scene;
use envision::service::simulate::{read_trajectory, simulate};
use envision::service::{server, Service, Session, SessionConfig};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "envision",
    version,
    about = "Audio scene interpretation for VR scenes"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Vlm,
    Template,
}

#[derive(Subcommand)]
enum Cmd {
    /// Serve sessions over WebSocket.
    Serve {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Describe every anchor view and write the description CSV.
    Prebake {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "template")]
        backend: BackendKind,
        #[arg(long)]
        out: PathBuf,
        /// Place anchors by greedy coverage instead of using the scene's own.
        #[arg(long)]
        auto_anchors: bool,
        #[arg(long, default_value_t = 1.0)]
        grid_step: f64,
        /// Where to write the scene with placed anchors
        /// (default: next to the CSV as <stem>.scene.json).
        #[arg(long)]
        scene_out: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        parallelism: usize,
    },
    /// Replay a JSON-lines message script and write the feedback events.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long, default_value_t = 2.0)]
        tail: f64,
    },
    /// Measure "Where am I?" latency from random poses.
    Bench {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        lookups: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Cmd::Serve {
            scene,
            store,
            host,
            port,
        } => {
            let scene =
                load_scene(&scene).with_context(|| format!("loading {}", scene.display()))?;
            let store =
                load_store(&store).with_context(|| format!("loading {}", store.display()))?;
            store.check_complete(scene.anchor_points())?;
            let mut service = Service::new(SessionConfig::default());
            service.add_scene(scene, Some(store));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                tracing::info!(addr = %listener.local_addr()?, "listening");
                server::serve(Arc::new(service), listener).await?;
                Ok(())
            })
        }
        Cmd::Prebake {
            scene: scene_path,
            backend,
            out,
            auto_anchors,
            grid_step,
            scene_out,
            parallelism,
        } => {
            let mut scene = load_scene(&scene_path)?;
            if auto_anchors {
                let anchors = auto_place_anchors(
                    &scene,
                    &ViewParams::for_scene(&scene),
                    &PlacementParams::new(grid_step),
                )?;
                scene = scene.with_anchors(anchors)?;
                let path = scene_out.unwrap_or_else(|| {
                    let stem = out
                        .file_stem()
                        .map_or("scene".into(), |s| s.to_string_lossy().into_owned());
                    out.with_file_name(format!("{stem}.scene.json"))
                });
                scene.save(&path)?;
                eprintln!(
                    "placed {} anchors, scene written to {}",
                    scene.anchor_points().len(),
                    path.display()
                );
            } else if scene.anchors.is_none() {
                bail!("scene has no anchors; pass --auto-anchors");
            }
            let backend = match backend {
                BackendKind::Vlm => Backend::Vlm(VlmClient::new(VlmConfig::from_env()?)?),
                BackendKind::Template => Backend::Template(ViewParams::for_scene(&scene)),
            };
            let opts = PrebakeOptions {
                parallelism,
                ..PrebakeOptions::default()
            };
            let store = prebake(
                &scene,
                scene.anchor_points(),
                &RasterCapturer::default(),
                &backend,
                &opts,
            )?;
            save_store(&store, &out)?;
            eprintln!("wrote {} descriptions to {}", store.len(), out.display());
            Ok(())
        }
        Cmd::Simulate {
            scene,
            store,
            trajectory,
            out,
            dt,
            tail,
        } => {
            let scene = Arc::new(load_scene(&scene)?);
            let store = Arc::new(load_store(&store)?);
            let file = std::fs::File::open(&trajectory)
                .with_context(|| format!("opening {}", trajectory.display()))?;
            let script = read_trajectory(BufReader::new(file))?;
            let events = simulate(scene, store, SessionConfig::default(), &script, dt, tail)?;
            let mut w: Box<dyn Write> = match out {
                Some(p) => Box::new(BufWriter::new(std::fs::File::create(p)?)),
                None => Box::new(std::io::stdout().lock()),
            };
            for e in &events {
                writeln!(w, "{}", serde_json::to_string(e)?)?;
            }
            w.flush()?;
            Ok(())
        }
        Cmd::Bench {
            scene,
            store,
            lookups,
            seed,
        } => {
            if lookups == 0 {
                bail!("--lookups must be positive");
            }
            let scene = Arc::new(load_scene(&scene)?);
            let store = Arc::new(load_store(&store)?);
            let mut session = Session::new("bench", scene, store, SessionConfig::default())?;
            let report = envision::bench::lookup_latency(&mut session, lookups, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}
