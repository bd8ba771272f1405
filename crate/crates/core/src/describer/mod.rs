//! Pre-baking view descriptions and serving them at runtime.
//!
//! Before runtime every (anchor, yaw) view gets a short description, either
//! from a vision-language model fed a captured image or from the offline
//! template describer. At runtime the nearest view's text is read from the
//! in-memory [`DescriptionStore`].

pub mod capture;
pub mod store;
pub mod vlm;

pub use capture::{CaptureError, CaptureRequest, RasterCapturer, ViewCapturer};
pub use store::{
    load_store, lookup_description, save_store, DescriptionStore, Generator, StoreError,
};
pub use vlm::{VlmClient, VlmConfig, VlmError, DESCRIBE_PROMPT};

use crate::anchors::{
    enumerate_views, visible_objects, AnchorError, AnchorPoint, ViewKey, ViewParams,
};
use crate::scene::{Pose, Scene};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;
use thiserror::Error;
use tracing::{debug, warn};

/// Every description begins with this phrase.
pub const DESCRIPTION_PREFIX: &str = "The scene in front of you";

pub enum Backend {
    Vlm(VlmClient),
    Template(ViewParams),
}

impl Backend {
    fn generator(&self) -> Generator {
        match self {
            Backend::Vlm(_) => Generator::Vlm,
            Backend::Template(_) => Generator::Template,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrebakeOptions {
    /// Retries after the first failed attempt of a view.
    pub retries: u32,
    /// First backoff delay; doubles on each retry.
    pub backoff: Duration,
    pub parallelism: usize,
}

impl Default for PrebakeOptions {
    fn default() -> Self {
        PrebakeOptions {
            retries: 3,
            backoff: Duration::from_millis(500),
            parallelism: 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum PrebakeError {
    #[error("describing {view} failed after {attempts} attempts: {cause}")]
    Backend {
        view: ViewKey,
        attempts: u32,
        cause: String,
        /// Views completed before the run was aborted.
        partial: Box<DescriptionStore>,
    },
    #[error(transparent)]
    Capture(#[from] CaptureError),
    #[error(transparent)]
    Anchors(#[from] AnchorError),
}

/// Offline stand-in for the VLM: names of visible renderable objects, nearest
/// first.
pub fn template_describe(
    scene: &Scene,
    view: ViewKey,
    anchors: &[AnchorPoint],
    params: &ViewParams,
) -> Option<String> {
    let anchor = anchors.iter().find(|a| a.index == view.anchor_index)?;
    let pose = Pose::new(anchor.position, view.yaw() as f64);
    let visible = visible_objects(scene, &pose, params);
    let mut seen: Vec<_> = scene
        .objects
        .iter()
        .filter(|o| o.renderable && visible.contains(&o.id))
        .map(|o| (o.position.distance(anchor.position), o))
        .collect();
    seen.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    Some(if seen.is_empty() {
        format!("{DESCRIPTION_PREFIX} appears empty.")
    } else {
        let names: Vec<&str> = seen.iter().map(|(_, o)| o.name.as_str()).collect();
        format!("{DESCRIPTION_PREFIX} contains {}.", names.join(", "))
    })
}

enum ViewFailure {
    Capture(CaptureError),
    Backend { attempts: u32, cause: String },
}

fn describe_view(
    scene: &Scene,
    anchors: &[AnchorPoint],
    view: ViewKey,
    capturer: &dyn ViewCapturer,
    backend: &Backend,
    opts: &PrebakeOptions,
) -> Result<String, ViewFailure> {
    match backend {
        Backend::Template(params) => {
            template_describe(scene, view, anchors, params).ok_or(ViewFailure::Backend {
                attempts: 1,
                cause: format!("anchor {} not in anchor list", view.anchor_index),
            })
        }
        Backend::Vlm(client) => {
            let anchor = anchors
                .iter()
                .find(|a| a.index == view.anchor_index)
                .expect("views come from the anchor list");
            let capture = capturer
                .capture(scene, anchor, view)
                .map_err(ViewFailure::Capture)?;
            let mut delay = opts.backoff;
            let mut attempt = 0;
            loop {
                attempt += 1;
                match client.describe(&capture) {
                    Ok(text) => return Ok(text),
                    Err(e) if attempt <= opts.retries => {
                        warn!(%view, attempt, error = %e, "description request failed, retrying");
                        std::thread::sleep(delay);
                        delay *= 2;
                    }
                    Err(e) => {
                        return Err(ViewFailure::Backend {
                            attempts: attempt,
                            cause: e.to_string(),
                        })
                    }
                }
            }
        }
    }
}

/// Describes every enumerated view with bounded parallelism. The first
/// failure stops new work; the error carries the views finished so far.
pub fn prebake(
    scene: &Scene,
    anchors: &[AnchorPoint],
    capturer: &dyn ViewCapturer,
    backend: &Backend,
    opts: &PrebakeOptions,
) -> Result<DescriptionStore, PrebakeError> {
    let views = enumerate_views(anchors)?;
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let done: Mutex<Vec<(ViewKey, String)>> = Mutex::new(Vec::with_capacity(views.len()));
    let failures: Mutex<Vec<(ViewKey, ViewFailure)>> = Mutex::new(Vec::new());
    let workers = opts.parallelism.clamp(1, views.len());

    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&view) = views.get(i) else { break };
                match describe_view(scene, anchors, view, capturer, backend, opts) {
                    Ok(text) => {
                        debug!(%view, "described");
                        done.lock().unwrap().push((view, text));
                    }
                    Err(f) => {
                        stop.store(true, Ordering::SeqCst);
                        failures.lock().unwrap().push((view, f));
                    }
                }
            });
        }
    });

    let mut store = DescriptionStore::new(scene.name.clone(), backend.generator());
    for (view, text) in done.into_inner().unwrap() {
        store.insert(view, text);
    }
    let mut failures = failures.into_inner().unwrap();
    failures.sort_by_key(|(v, _)| *v);
    match failures.into_iter().next() {
        None => Ok(store),
        Some((_, ViewFailure::Capture(e))) => Err(PrebakeError::Capture(e)),
        Some((view, ViewFailure::Backend { attempts, cause })) => Err(PrebakeError::Backend {
            view,
            attempts,
            cause,
            partial: Box::new(store),
        }),
    }
}
