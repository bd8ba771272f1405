//! Latency measurement for the "Where am I?" path and a random scene
//! generator for benchmarks and property tests.

use crate::anchors::AnchorPoint;
use crate::geometry::{Aabb, Vec3};
use crate::service::{ClientMessage, ServerMessage, ServiceError, Session};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct LatencyReport {
    pub samples: usize,
    pub median_ms: f64,
    pub mean_ms: f64,
    pub sd_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

impl LatencyReport {
    pub fn from_samples(mut ms: Vec<f64>) -> Self {
        assert!(!ms.is_empty(), "no latency samples");
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        let median = if n % 2 == 1 {
            ms[n / 2]
        } else {
            (ms[n / 2 - 1] + ms[n / 2]) / 2.0
        };
        let mean = ms.iter().sum::<f64>() / n as f64;
        let var = ms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
        let p95 = ms[((n as f64 * 0.95).ceil() as usize).clamp(1, n) - 1];
        LatencyReport {
            samples: n,
            median_ms: median,
            mean_ms: mean,
            sd_ms: var.sqrt(),
            p95_ms: p95,
            max_ms: ms[n - 1],
        }
    }
}

/// Random room of `n_objects` boxes and `n_anchors` eye-height anchors.
/// Roughly one object in five is a non-rendered trigger volume.
pub fn random_scene(seed: u64, n_objects: usize, n_anchors: usize) -> crate::scene::Scene {
    let mut rng = StdRng::seed_from_u64(seed);
    let bounds = Aabb::new(Vec3::new(-5.0, 0.0, -5.0), Vec3::new(5.0, 3.0, 5.0));
    let objects = (0..n_objects)
        .map(|i| crate::scene::SceneObject {
            id: format!("obj-{i:03}"),
            name: format!("Object {i}"),
            position: Vec3::new(
                rng.gen_range(-4.8..4.8),
                rng.gen_range(0.0..2.5),
                rng.gen_range(-4.8..4.8),
            ),
            half_extents: Vec3::new(
                rng.gen_range(0.02..0.5),
                rng.gen_range(0.02..0.5),
                rng.gen_range(0.02..0.5),
            ),
            renderable: rng.gen_bool(0.8),
            interactable: rng.gen_bool(0.5),
            grabbable: rng.gen_bool(0.3),
            preset_importance: rng.gen_bool(0.3).then(|| rng.gen_range(0.0..5.0)),
        })
        .collect();
    let anchors = (0..n_anchors)
        .map(|index| AnchorPoint {
            index,
            position: Vec3::new(rng.gen_range(-4.5..4.5), 1.6, rng.gen_range(-4.5..4.5)),
        })
        .collect();
    crate::scene::Scene::new(format!("random-{seed}"), bounds, objects, Some(anchors))
        .expect("generated scene is valid")
}

/// Times `lookups` "Where am I?" commands from random poses, measured from
/// receipt of the command's JSON text to the serialized speech reply.
pub fn lookup_latency(
    session: &mut Session,
    lookups: usize,
    seed: u64,
) -> Result<LatencyReport, ServiceError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let bounds = session.scene().bounds;
    let command_json = r#"{"type":"command","text":"Where am I?"}"#;
    let mut samples = Vec::with_capacity(lookups);
    for _ in 0..lookups {
        let position = Vec3::new(
            rng.gen_range(bounds.min.x..=bounds.max.x),
            rng.gen_range(bounds.min.y..=bounds.max.y),
            rng.gen_range(bounds.min.z..=bounds.max.z),
        );
        session.handle(ClientMessage::Pose {
            position,
            yaw: rng.gen_range(0.0..360.0),
            hand: None,
        })?;
        session.handle(ClientMessage::ButtonA)?;
        let start = Instant::now();
        let msg: ClientMessage = serde_json::from_str(command_json)
            .map_err(|e| ServiceError::InvalidMessage(e.to_string()))?;
        session.handle(msg)?;
        let replies: Vec<String> = session
            .drain()
            .into_iter()
            .map(|e| ServerMessage::Event(e).to_json())
            .collect();
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if !replies.iter().any(|r| r.contains("\"speech\"")) {
            return Err(ServiceError::Internal("no speech reply to lookup".into()));
        }
        samples.push(elapsed);
    }
    Ok(LatencyReport::from_samples(samples))
}
