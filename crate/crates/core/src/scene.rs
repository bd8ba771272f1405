//! Scene data model, the scene JSON format, automatic importance presets and
//! spoken-name object lookup.

use crate::anchors::AnchorPoint;
use crate::geometry::{normalize_yaw, Aabb, Vec3};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;
use thiserror::Error;

/// Importance given to objects that have a rendering component when none is authored.
pub const RENDERABLE_IMPORTANCE: f64 = 1.0;
/// Importance given to objects without a rendering component (trigger volumes etc).
pub const HIDDEN_IMPORTANCE: f64 = 0.0;
/// Default cutoff on normalized edit distance for the fuzzy lookup rung.
pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.34;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scene JSON: {0}")]
    Parse(String),
    #[error("invalid scene: field `{field}` ({value})")]
    Validation { field: String, value: String },
}

impl SceneError {
    fn invalid(field: &str, value: impl Into<String>) -> Self {
        SceneError::Validation {
            field: field.to_string(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LookupError {
    #[error("no object matches \"{0}\"")]
    NotFound(String),
    #[error("\"{spoken}\" matches several objects: {candidates:?}")]
    Ambiguous {
        spoken: String,
        candidates: Vec<String>,
    },
    #[error("empty object name")]
    EmptyName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub name: String,
    pub position: Vec3,
    pub half_extents: Vec3,
    pub renderable: bool,
    pub interactable: bool,
    pub grabbable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset_importance: Option<f64>,
}

impl SceneObject {
    pub fn bounds(&self) -> Aabb {
        Aabb::from_center(self.position, self.half_extents)
    }

    /// Authored importance, or the automatic preset when none was authored.
    pub fn importance(&self) -> f64 {
        self.preset_importance
            .unwrap_or_else(|| auto_preset(self.renderable))
    }
}

fn auto_preset(renderable: bool) -> f64 {
    if renderable {
        RENDERABLE_IMPORTANCE
    } else {
        HIDDEN_IMPORTANCE
    }
}

/// User camera pose: position plus yaw in degrees, kept in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPose")]
pub struct Pose {
    pub position: Vec3,
    yaw: f64,
}

#[derive(Deserialize)]
struct RawPose {
    position: Vec3,
    yaw: f64,
}

impl From<RawPose> for Pose {
    fn from(r: RawPose) -> Self {
        Pose::new(r.position, r.yaw)
    }
}

impl Pose {
    pub fn new(position: Vec3, yaw: f64) -> Self {
        Self {
            position,
            yaw: normalize_yaw(yaw),
        }
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn set_yaw(&mut self, yaw: f64) {
        self.yaw = normalize_yaw(yaw);
    }
}

/// A validated, immutable scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub bounds: Aabb,
    pub objects: Vec<SceneObject>,
    pub anchors: Option<Vec<AnchorPoint>>,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    name: String,
    bounds: Aabb,
    objects: Vec<SceneObject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchors: Option<Vec<Vec3>>,
}

impl Scene {
    /// Builds a scene and checks every invariant.
    pub fn new(
        name: impl Into<String>,
        bounds: Aabb,
        objects: Vec<SceneObject>,
        anchors: Option<Vec<AnchorPoint>>,
    ) -> Result<Self, SceneError> {
        let scene = Scene {
            name: name.into(),
            bounds,
            objects,
            anchors,
        };
        scene.validate()?;
        Ok(scene)
    }

    fn validate(&self) -> Result<(), SceneError> {
        if !self.bounds.is_well_formed() {
            return Err(SceneError::invalid("bounds", "min must not exceed max"));
        }
        if self.objects.is_empty() {
            return Err(SceneError::invalid("objects", "scene has no objects"));
        }
        let mut seen = HashSet::new();
        for o in &self.objects {
            if !seen.insert(o.id.as_str()) {
                return Err(SceneError::invalid("id", o.id.clone()));
            }
            if o.name.trim().is_empty() {
                return Err(SceneError::invalid("name", o.id.clone()));
            }
            let he = o.half_extents;
            if !he.is_finite() || he.x < 0.0 || he.y < 0.0 || he.z < 0.0 {
                return Err(SceneError::invalid("half_extents", o.id.clone()));
            }
            if !o.position.is_finite() || !self.bounds.contains(o.position) {
                return Err(SceneError::invalid("position", o.id.clone()));
            }
            if let Some(p) = o.preset_importance {
                if !p.is_finite() || p < 0.0 {
                    return Err(SceneError::invalid("preset_importance", o.id.clone()));
                }
            }
        }
        if let Some(anchors) = &self.anchors {
            for a in anchors {
                if !a.position.is_finite() || !self.bounds.contains(a.position) {
                    return Err(SceneError::invalid("anchors", a.index.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile =
            serde_json::from_str(text).map_err(|e| SceneError::Parse(e.to_string()))?;
        let anchors = file.anchors.map(|ps| {
            ps.into_iter()
                .enumerate()
                .map(|(index, position)| AnchorPoint { index, position })
                .collect()
        });
        Scene::new(file.name, file.bounds, file.objects, anchors)
    }

    pub fn to_json(&self) -> String {
        let file = SceneFile {
            name: self.name.clone(),
            bounds: self.bounds,
            objects: self.objects.clone(),
            anchors: self
                .anchors
                .as_ref()
                .map(|a| a.iter().map(|p| p.position).collect()),
        };
        serde_json::to_string_pretty(&file).expect("scene serialization is infallible")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SceneError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Anchors authored in the scene, or an empty slice.
    pub fn anchor_points(&self) -> &[AnchorPoint] {
        self.anchors.as_deref().unwrap_or(&[])
    }

    /// Returns a copy with the given anchors attached.
    pub fn with_anchors(&self, anchors: Vec<AnchorPoint>) -> Result<Scene, SceneError> {
        Scene::new(
            self.name.clone(),
            self.bounds,
            self.objects.clone(),
            Some(anchors),
        )
    }

    /// Serialized form used by clients that draw the scene.
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("scene JSON is valid")
    }
}

/// Reads and validates a scene file.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path)?;
    Scene::from_json(&text)
}

/// Fills unset importance presets from the presence of a rendering component.
pub fn auto_importance(scene: &Scene) -> Scene {
    let mut out = scene.clone();
    for o in &mut out.objects {
        if o.preset_importance.is_none() {
            o.preset_importance = Some(auto_preset(o.renderable));
        }
    }
    out
}

/// Which rung of the matching ladder produced a lookup result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchRung {
    Exact,
    ArticleStripped,
    TokenSubset,
    EditDistance,
}

/// A rung and its per-object score (lower is better, `None` = no match).
type Rung<'a> = (MatchRung, Box<dyn Fn(usize) -> Option<f64> + 'a>);

/// Lowercase and collapse whitespace.
fn fold(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Drops leading articles from an already folded string.
pub(crate) fn strip_articles(folded: &str) -> String {
    let mut words: &[&str] = &folded.split(' ').collect::<Vec<_>>();
    while let [first, rest @ ..] = words {
        if matches!(*first, "the" | "a" | "an") && !rest.is_empty() {
            words = rest;
        } else {
            break;
        }
    }
    words.join(" ")
}

/// Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance divided by the longer string's length, in `[0, 1]`.
pub fn normalized_edit_distance(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    edit_distance(a, b) as f64 / longest as f64
}

/// Resolves a spoken object name against the scene with the default threshold.
pub fn object_lookup<'a>(scene: &'a Scene, spoken: &str) -> Result<&'a SceneObject, LookupError> {
    object_lookup_with(scene, spoken, DEFAULT_FUZZY_THRESHOLD).map(|(o, _)| o)
}

/// Matching ladder: exact (case-insensitive), exact after dropping leading
/// articles, token-subset containment, then the closest normalized edit
/// distance within `threshold`. The first rung with any candidate wins.
///
/// Within a rung candidates rank by (edit distance, importance desc, id). Two
/// candidates that also share the same folded name and importance cannot be
/// told apart by voice and yield `Ambiguous`.
pub fn object_lookup_with<'a>(
    scene: &'a Scene,
    spoken: &str,
    threshold: f64,
) -> Result<(&'a SceneObject, MatchRung), LookupError> {
    let spoken_folded = fold(spoken);
    if spoken_folded.is_empty() {
        return Err(LookupError::EmptyName);
    }
    let spoken_stripped = strip_articles(&spoken_folded);
    let spoken_tokens: HashSet<&str> = spoken_stripped.split(' ').collect();

    let names: Vec<(String, String)> = scene
        .objects
        .iter()
        .map(|o| {
            let f = fold(&o.name);
            let s = strip_articles(&f);
            (f, s)
        })
        .collect();

    let rungs: [Rung; 4] = [
        (
            MatchRung::Exact,
            Box::new(|i| (names[i].0 == spoken_folded).then_some(0.0)),
        ),
        (
            MatchRung::ArticleStripped,
            Box::new(|i| (names[i].1 == spoken_stripped).then_some(0.0)),
        ),
        (
            MatchRung::TokenSubset,
            Box::new(|i| {
                let name_tokens: HashSet<&str> = names[i].1.split(' ').collect();
                (spoken_tokens.is_subset(&name_tokens) || name_tokens.is_subset(&spoken_tokens))
                    .then_some(0.0)
            }),
        ),
        (
            MatchRung::EditDistance,
            Box::new(|i| {
                let d = normalized_edit_distance(&spoken_stripped, &names[i].1);
                (d <= threshold).then_some(d)
            }),
        ),
    ];

    for (rung, score) in rungs.iter() {
        let mut hits: Vec<(usize, f64)> = (0..scene.objects.len())
            .filter_map(|i| score(i).map(|s| (i, s)))
            .collect();
        if hits.is_empty() {
            continue;
        }
        let objs = &scene.objects;
        hits.sort_by(|&(a, da), &(b, db)| {
            da.total_cmp(&db)
                .then(objs[b].importance().total_cmp(&objs[a].importance()))
                .then(objs[a].id.cmp(&objs[b].id))
        });
        let (best, best_d) = hits[0];
        let twins: Vec<String> = hits
            .iter()
            .filter(|&&(i, d)| {
                d == best_d
                    && names[i].1 == names[best].1
                    && objs[i].importance() == objs[best].importance()
            })
            .map(|&(i, _)| objs[i].id.clone())
            .collect();
        if twins.len() > 1 {
            return Err(LookupError::Ambiguous {
                spoken: spoken.to_string(),
                candidates: twins,
            });
        }
        return Ok((&objs[best], *rung));
    }
    Err(LookupError::NotFound(spoken.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(id: &str, name: &str, pos: [f64; 3]) -> SceneObject {
        SceneObject {
            id: id.into(),
            name: name.into(),
            position: pos.into(),
            half_extents: Vec3::new(0.1, 0.1, 0.1),
            renderable: true,
            interactable: false,
            grabbable: false,
            preset_importance: None,
        }
    }

    fn scene(objects: Vec<SceneObject>) -> Scene {
        Scene::new(
            "test",
            Aabb::new(Vec3::new(-5.0, 0.0, -5.0), Vec3::new(5.0, 3.0, 5.0)),
            objects,
            None,
        )
        .unwrap()
    }

    const MINIMAL: &str = r#"{
        "name": "tiny",
        "bounds": {"min": [0, 0, 0], "max": [1, 1, 1]},
        "objects": [{"id": "cube", "name": "Cube", "position": [0.5, 0.5, 0.5],
                     "half_extents": [0.1, 0.1, 0.1], "renderable": true,
                     "interactable": false, "grabbable": false}]
    }"#;

    #[test]
    fn loads_minimal_scene() {
        let s = Scene::from_json(MINIMAL).unwrap();
        assert_eq!(s.objects.len(), 1);
        assert_eq!(s.objects[0].preset_importance, None);
        assert!(s.anchors.is_none());
    }

    #[test]
    fn duplicate_id_names_field_and_value() {
        let text = MINIMAL.replace(
            r#""objects": ["#,
            r#""objects": [{"id": "key", "name": "Key", "position": [0.2, 0.2, 0.2],
                 "half_extents": [0, 0, 0], "renderable": true, "interactable": true,
                 "grabbable": true},
                {"id": "key", "name": "Other key", "position": [0.3, 0.2, 0.2],
                 "half_extents": [0, 0, 0], "renderable": true, "interactable": true,
                 "grabbable": true},"#,
        );
        match Scene::from_json(&text) {
            Err(SceneError::Validation { field, value }) => {
                assert_eq!((field.as_str(), value.as_str()), ("id", "key"));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_geometry_and_json() {
        let neg = MINIMAL.replace("[0.1, 0.1, 0.1]", "[0.1, -0.1, 0.1]");
        assert!(matches!(
            Scene::from_json(&neg),
            Err(SceneError::Validation { field, .. }) if field == "half_extents"
        ));
        let outside = MINIMAL.replace("[0.5, 0.5, 0.5]", "[2.0, 0.5, 0.5]");
        assert!(matches!(
            Scene::from_json(&outside),
            Err(SceneError::Validation { field, .. }) if field == "position"
        ));
        let negative_importance = MINIMAL.replace(
            r#""grabbable": false}"#,
            r#""grabbable": false, "preset_importance": -1}"#,
        );
        assert!(matches!(
            Scene::from_json(&negative_importance),
            Err(SceneError::Validation { field, .. }) if field == "preset_importance"
        ));
        assert!(matches!(Scene::from_json("{"), Err(SceneError::Parse(_))));
        assert!(matches!(
            Scene::from_json(r#"{"name": "x", "bounds": {"min": [0,0,0], "max": [1,1,1]}}"#),
            Err(SceneError::Parse(_))
        ));
    }

    #[test]
    fn auto_importance_follows_rendering_and_keeps_explicit() {
        let mut trigger = obj("trigger", "Trigger", [0.0, 0.0, 0.0]);
        trigger.renderable = false;
        let mut explicit = obj("statue", "Statue", [1.0, 0.0, 0.0]);
        explicit.preset_importance = Some(5.0);
        let s = scene(vec![
            obj("desk", "Desk", [0.0, 0.0, 1.0]),
            trigger,
            explicit,
        ]);
        let once = auto_importance(&s);
        let got: Vec<_> = once.objects.iter().map(|o| o.preset_importance).collect();
        assert_eq!(got, vec![Some(1.0), Some(0.0), Some(5.0)]);
        assert_eq!(auto_importance(&once), once);
    }

    #[test]
    fn lookup_ladder() {
        let s = scene(vec![
            obj("brew", "Brew Button", [0.0, 1.0, 1.0]),
            obj("desk", "Desk", [1.0, 0.0, 1.0]),
            obj("key", "Key", [2.0, 0.0, 1.0]),
        ]);
        let check = |spoken: &str, id: &str, rung: MatchRung| {
            let (o, r) = object_lookup_with(&s, spoken, DEFAULT_FUZZY_THRESHOLD).unwrap();
            assert_eq!((o.id.as_str(), r), (id, rung), "spoken {spoken:?}");
        };
        check("Brew Button", "brew", MatchRung::Exact);
        check("BREW BUTTON", "brew", MatchRung::Exact);
        check("the Brew Button", "brew", MatchRung::ArticleStripped);
        check("brew", "brew", MatchRung::TokenSubset);
        check("bre button", "brew", MatchRung::EditDistance);
        assert_eq!(
            object_lookup(&s, "radio"),
            Err(LookupError::NotFound("radio".into()))
        );
        assert_eq!(object_lookup(&s, "  "), Err(LookupError::EmptyName));
    }

    #[test]
    fn exact_match_shadows_fuzzy_candidates() {
        // "Keys" is one edit from "Key" but an exact match must win.
        let s = scene(vec![
            obj("a", "Keys", [0.0, 0.0, 0.0]),
            obj("b", "Key", [1.0, 0.0, 0.0]),
        ]);
        assert_eq!(object_lookup(&s, "key").unwrap().id, "b");
    }

    #[test]
    fn tie_breaks_and_ambiguity() {
        let mut red = obj("red", "Red Button", [0.0, 0.0, 0.0]);
        red.preset_importance = Some(2.0);
        let s = scene(vec![
            obj("blue", "Blue Button", [1.0, 0.0, 0.0]),
            red.clone(),
        ]);
        // both contain the token "button": higher importance wins
        assert_eq!(object_lookup(&s, "button").unwrap().id, "red");

        red.preset_importance = None;
        let s = scene(vec![obj("blue", "Blue Button", [1.0, 0.0, 0.0]), red]);
        assert_eq!(object_lookup(&s, "button").unwrap().id, "blue");

        let s = scene(vec![
            obj("chair-1", "Chair", [0.0, 0.0, 0.0]),
            obj("chair-2", "Chair", [1.0, 0.0, 0.0]),
        ]);
        assert!(matches!(
            object_lookup(&s, "chair"),
            Err(LookupError::Ambiguous { .. })
        ));
    }

    #[test]
    fn edit_distance_basics() {
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("bre button", "brew button"), 1);
        assert!((normalized_edit_distance("bre button", "brew button") - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn pose_yaw_normalized() {
        let p = Pose::new(Vec3::ZERO, -45.0);
        assert_eq!(p.yaw(), 315.0);
        let q: Pose = serde_json::from_str(r#"{"position":[0,0,0],"yaw":725}"#).unwrap();
        assert_eq!(q.yaw(), 5.0);
    }
}
