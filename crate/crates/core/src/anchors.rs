//! Camera anchors: visibility test, automatic placement, view enumeration and
//! the runtime nearest-view query.

use crate::feedback::relative_bearing;
use crate::geometry::{circular_distance, Vec3};
use crate::scene::{Pose, Scene};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// The eight preset view orientations, in degrees.
pub const VIEW_YAWS: [u16; 8] = [0, 45, 90, 135, 180, 225, 270, 315];
pub const DEFAULT_EYE_HEIGHT: f64 = 1.6;

const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPoint {
    pub index: usize,
    pub position: Vec3,
}

/// Identifies one pre-baked view: an anchor and one of the preset yaws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ViewKey {
    pub anchor_index: usize,
    yaw: u16,
}

impl ViewKey {
    /// Returns `None` unless `yaw` is one of [`VIEW_YAWS`].
    pub fn new(anchor_index: usize, yaw: u16) -> Option<Self> {
        VIEW_YAWS
            .contains(&yaw)
            .then_some(ViewKey { anchor_index, yaw })
    }

    pub fn yaw(&self) -> u16 {
        self.yaw
    }
}

impl fmt::Display for ViewKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "anchor {} @ {}°", self.anchor_index, self.yaw)
    }
}

/// Field of view and range used to decide what a view contains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewParams {
    pub horizontal_fov: f64,
    pub vertical_fov: f64,
    pub max_range: f64,
}

impl Default for ViewParams {
    fn default() -> Self {
        ViewParams {
            horizontal_fov: 90.0,
            vertical_fov: 60.0,
            max_range: f64::INFINITY,
        }
    }
}

impl ViewParams {
    /// Default FOVs with the range set to the scene diagonal.
    pub fn for_scene(scene: &Scene) -> Self {
        ViewParams {
            max_range: scene.bounds.diagonal(),
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        let fov_ok = |f: f64| f > 0.0 && f < 180.0;
        fov_ok(self.horizontal_fov) && fov_ok(self.vertical_fov) && self.max_range > 0.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnchorError {
    #[error("no anchors given")]
    NoAnchors,
    #[error("grid step must be positive, got {0}")]
    InvalidGridStep(f64),
    #[error("objects visible from no candidate position: {uncovered:?}")]
    CoverageIncomplete {
        /// Anchors picked before coverage stalled, in selection order.
        partial: Vec<AnchorPoint>,
        uncovered: Vec<String>,
    },
}

fn point_visible(pose: &Pose, p: Vec3, params: &ViewParams) -> bool {
    let dist = pose.position.distance(p);
    if dist == 0.0 {
        return true;
    }
    if dist > params.max_range {
        return false;
    }
    match relative_bearing(pose, p) {
        Ok((az, el)) => {
            az.abs() <= params.horizontal_fov / 2.0 + ANGLE_EPS
                && el.abs() <= params.vertical_fov / 2.0 + ANGLE_EPS
        }
        Err(_) => true,
    }
}

/// Ids of objects with the center or any box corner inside the view wedge.
/// Occlusion is not modelled.
pub fn visible_objects(scene: &Scene, pose: &Pose, params: &ViewParams) -> BTreeSet<String> {
    scene
        .objects
        .iter()
        .filter(|o| {
            std::iter::once(o.position)
                .chain(o.bounds().corners())
                .any(|p| point_visible(pose, p, params))
        })
        .map(|o| o.id.clone())
        .collect()
}

/// Every view key for the given anchors, ordered by (anchor, yaw).
pub fn enumerate_views(anchors: &[AnchorPoint]) -> Result<Vec<ViewKey>, AnchorError> {
    if anchors.is_empty() {
        return Err(AnchorError::NoAnchors);
    }
    Ok(anchors
        .iter()
        .flat_map(|a| {
            VIEW_YAWS.iter().map(move |&yaw| ViewKey {
                anchor_index: a.index,
                yaw,
            })
        })
        .collect())
}

/// Closest anchor by Euclidean distance (lowest index on ties), then the
/// preset yaw closest on the circle (smaller yaw on ties).
pub fn nearest_view(anchors: &[AnchorPoint], pose: &Pose) -> Result<ViewKey, AnchorError> {
    let mut best: Option<(f64, &AnchorPoint)> = None;
    for a in anchors {
        let d = a.position.distance_squared(pose.position);
        let better = match best {
            None => true,
            Some((bd, ba)) => d < bd || (d == bd && a.index < ba.index),
        };
        if better {
            best = Some((d, a));
        }
    }
    let (_, anchor) = best.ok_or(AnchorError::NoAnchors)?;
    let yaw = nearest_preset_yaw(pose.yaw());
    Ok(ViewKey {
        anchor_index: anchor.index,
        yaw,
    })
}

fn nearest_preset_yaw(yaw: f64) -> u16 {
    let mut best = VIEW_YAWS[0];
    let mut best_d = circular_distance(yaw, best as f64);
    for &y in &VIEW_YAWS[1..] {
        let d = circular_distance(yaw, y as f64);
        if d < best_d {
            best = y;
            best_d = d;
        }
    }
    best
}

/// Candidate grid and eye height for automatic placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementParams {
    pub grid_step: f64,
    pub eye_height: f64,
}

impl PlacementParams {
    pub fn new(grid_step: f64) -> Self {
        PlacementParams {
            grid_step,
            eye_height: DEFAULT_EYE_HEIGHT,
        }
    }
}

/// Horizontal candidate grid centred on the bounds center, at eye height
/// (clamped into the bounds). Ordered by z, then x.
pub fn candidate_grid(
    scene: &Scene,
    placement: &PlacementParams,
) -> Result<Vec<Vec3>, AnchorError> {
    let step = placement.grid_step;
    if !(step > 0.0 && step.is_finite()) {
        return Err(AnchorError::InvalidGridStep(step));
    }
    let b = &scene.bounds;
    let c = b.center();
    let y = placement.eye_height.clamp(b.min.y, b.max.y);
    let axis = |lo: f64, mid: f64, hi: f64| -> Vec<f64> {
        let below = ((mid - lo) / step + 1e-9).floor() as i64;
        let above = ((hi - mid) / step + 1e-9).floor() as i64;
        (-below..=above)
            .map(|k| (mid + k as f64 * step).clamp(lo, hi))
            .collect()
    };
    let xs = axis(b.min.x, c.x, b.max.x);
    let zs = axis(b.min.z, c.z, b.max.z);
    Ok(zs
        .iter()
        .flat_map(|&z| xs.iter().map(move |&x| Vec3::new(x, y, z)))
        .collect())
}

/// Objects with positive importance seen by any of the eight views at `position`.
pub fn coverage_from(scene: &Scene, position: Vec3, params: &ViewParams) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    for &yaw in &VIEW_YAWS {
        seen.extend(visible_objects(
            scene,
            &Pose::new(position, yaw as f64),
            params,
        ));
    }
    seen.retain(|id| scene.object(id).is_some_and(|o| o.importance() > 0.0));
    seen
}

/// Greedy set cover over the candidate grid: repeatedly takes the candidate
/// whose views add the most uncovered important objects (first candidate on
/// ties) until everything is covered or no candidate adds coverage.
pub fn auto_place_anchors(
    scene: &Scene,
    params: &ViewParams,
    placement: &PlacementParams,
) -> Result<Vec<AnchorPoint>, AnchorError> {
    let candidates = candidate_grid(scene, placement)?;
    let covers: Vec<BTreeSet<String>> = candidates
        .iter()
        .map(|&p| coverage_from(scene, p, params))
        .collect();
    let mut uncovered: BTreeSet<String> = scene
        .objects
        .iter()
        .filter(|o| o.importance() > 0.0)
        .map(|o| o.id.clone())
        .collect();
    let mut picks = Vec::new();
    let mut used = vec![false; candidates.len()];
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for (i, cover) in covers.iter().enumerate() {
            if used[i] {
                continue;
            }
            let gain = cover.intersection(&uncovered).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let Some((i, _)) = best else { break };
        used[i] = true;
        for id in &covers[i] {
            uncovered.remove(id);
        }
        picks.push(AnchorPoint {
            index: picks.len(),
            position: candidates[i],
        });
    }
    if uncovered.is_empty() {
        Ok(picks)
    } else {
        Err(AnchorError::CoverageIncomplete {
            partial: picks,
            uncovered: uncovered.into_iter().collect(),
        })
    }
}
