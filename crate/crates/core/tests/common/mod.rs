//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use envision::anchors::{AnchorPoint, ViewParams};
use envision::describer::{DescriptionStore, Generator};
use envision::geometry::Vec3;
use envision::scene::Scene;

pub const YAWS: [u16; 8] = [0, 45, 90, 135, 180, 225, 270, 315];

pub fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Exhaustive argmin over every (anchor, preset yaw) pair.
pub fn brute_nearest(anchors: &[AnchorPoint], pos: Vec3, yaw: f64) -> (usize, u16) {
    type Key = (f64, f64, usize, u16);
    let mut best: Option<(Key, (usize, u16))> = None;
    for a in anchors {
        let dx = a.position.x - pos.x;
        let dy = a.position.y - pos.y;
        let dz = a.position.z - pos.z;
        let d2 = dx * dx + dy * dy + dz * dz;
        for &y in &YAWS {
            let key = (d2, circ(yaw, y as f64), a.index, y);
            let better = match &best {
                None => true,
                Some((k, _)) => {
                    key.0 < k.0
                        || (key.0 == k.0
                            && (key.1 < k.1 || (key.1 == k.1 && (key.2, key.3) < (k.2, k.3))))
                }
            };
            if better {
                best = Some((key, (a.index, y)));
            }
        }
    }
    best.expect("non-empty anchors").1
}

/// Dot-product visibility test of a single point.
pub fn sees_point(eye: Vec3, yaw: f64, p: Vec3, params: &ViewParams) -> bool {
    let d = [p.x - eye.x, p.y - eye.y, p.z - eye.z];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if len == 0.0 {
        return true;
    }
    if len > params.max_range {
        return false;
    }
    let h = (d[0] * d[0] + d[2] * d[2]).sqrt();
    let (horizontal, vertical) = if h < 1e-12 {
        (0.0, 90.0)
    } else {
        let r = yaw.to_radians();
        let cos = ((d[0] * r.sin() + d[2] * r.cos()) / h).clamp(-1.0, 1.0);
        (
            cos.acos().to_degrees(),
            (d[1] / len).asin().to_degrees().abs(),
        )
    };
    horizontal <= params.horizontal_fov / 2.0 + 1e-7 && vertical <= params.vertical_fov / 2.0 + 1e-7
}

pub fn sees_object(eye: Vec3, yaw: f64, o: &envision::SceneObject, params: &ViewParams) -> bool {
    let (c, e) = (o.position, o.half_extents);
    let mut pts = vec![c];
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                pts.push(Vec3::new(c.x + sx * e.x, c.y + sy * e.y, c.z + sz * e.z));
            }
        }
    }
    pts.into_iter().any(|p| sees_point(eye, yaw, p, params))
}

pub fn template_store(scene: &Scene) -> DescriptionStore {
    let mut store = DescriptionStore::new(scene.name.clone(), Generator::Template);
    for a in scene.anchor_points() {
        for &y in &YAWS {
            let key = envision::ViewKey::new(a.index, y).unwrap();
            store.insert(
                key,
                format!("The scene in front of you, view {} at {}.", a.index, y),
            );
        }
    }
    store
}

/// Stores whose text and scene names lean on CSV-hostile characters.
pub fn arb_store() -> impl proptest::strategy::Strategy<Value = DescriptionStore> {
    use proptest::prelude::*;
    let text = prop_oneof![
        "[a-z ,\"\n\r]{1,40}",
        "\\PC{1,30}",
        "[\"',;\t\n ]{1,12}",
        Just("The scene in front of you, \"quoted\"\r\nand ünïcödé 北京 🚪".to_string()),
    ];
    let name = prop_oneof!["[a-z0-9-]{1,12}", "[a-z ,\"é]{1,12}"];
    (
        name,
        prop::collection::btree_map((0usize..4, 0usize..8), text, 1..20),
    )
        .prop_map(|(name, rows)| {
            let mut s = DescriptionStore::new(name, Generator::Unknown);
            for ((a, y), t) in rows {
                assert!(s.insert(envision::ViewKey::new(a, YAWS[y]).unwrap(), t));
            }
            s
        })
}

pub const APPROACH_START: Vec3 = Vec3 {
    x: 2.65,
    y: 1.0,
    z: -1.8,
};
pub const KEY: Vec3 = Vec3 {
    x: -2.35,
    y: 1.0,
    z: -1.8,
};

/// Locate the key, then move the hand 5 m straight at it at 1 m/s, sampled
/// every `step` seconds, and grab it at 5.5 s.
pub fn approach_script(step: f64) -> Vec<envision::service::TimedMessage> {
    use envision::service::{ClientMessage, TimedMessage};
    let user = Vec3::new(0.5, 1.6, 0.0);
    let mut script = vec![
        TimedMessage {
            t: 0.0,
            message: ClientMessage::ButtonA,
        },
        TimedMessage {
            t: 0.0,
            message: ClientMessage::Command {
                text: "Where is the key?".into(),
            },
        },
    ];
    let n = (5.0 / step).round() as usize;
    for i in 0..=n {
        let t = i as f64 * step;
        let hand = APPROACH_START.lerp(KEY, (t / 5.0).min(1.0));
        script.push(TimedMessage {
            t,
            message: ClientMessage::Pose {
                position: user,
                yaw: 270.0,
                hand: Some(hand),
            },
        });
    }
    script.push(TimedMessage {
        t: 5.5,
        message: ClientMessage::Grab { id: "key".into() },
    });
    script
}

pub fn run_approach(dt: f64) -> Vec<envision::FeedbackEvent> {
    use envision::service::{simulate::simulate, SessionConfig};
    use std::sync::Arc;
    let scene = envision::demo::escape_room();
    let store = template_store(&scene);
    simulate(
        Arc::new(scene),
        Arc::new(store),
        SessionConfig::default(),
        &approach_script(0.01),
        dt,
        1.0,
    )
    .expect("approach runs")
}
