//! The three voice commands, runtime importance scoring and the
//! "What is near me?" selection.

use crate::anchors::AnchorPoint;
use crate::describer::{lookup_description, DescriptionStore, StoreError};
use crate::feedback::{relative_bearing, FeedbackEvent};
use crate::scene::{strip_articles, Pose, Scene, SceneObject};
use std::collections::HashMap;
use thiserror::Error;

/// Score multiplier applied per previous announcement.
pub const DEFAULT_DECAY: f64 = 0.5;
/// Objects announced per "What is near me?".
pub const DEFAULT_MAIN_OBJECTS: usize = 3;

pub const HELP_TEXT: &str =
    "Sorry, I did not understand. You can say: Where am I? What is near me? Where is the object name?";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    SceneDescription,
    MainObjects,
    Locate(String),
}

#[derive(Debug, Error)]
pub enum InterpretError {
    #[error("unrecognized command: {0:?}")]
    Unrecognized(String),
    #[error("no object in the scene has positive importance")]
    NoAnnounceableObjects,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Lowercase, drop punctuation other than apostrophes, collapse whitespace.
pub fn normalize_utterance(utterance: &str) -> String {
    let cleaned: String = utterance
        .chars()
        .map(|c| match c {
            '\u{2019}' | '\u{2018}' => '\'',
            c if c.is_alphanumeric() || c == '\'' => c,
            _ => ' ',
        })
        .flat_map(char::to_lowercase)
        .collect();
    cleaned
        .split_whitespace()
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Exact-phrase grammar over the normalized utterance.
pub fn parse_command(utterance: &str) -> Result<Command, InterpretError> {
    let norm = normalize_utterance(utterance);
    let unrecognized = || InterpretError::Unrecognized(utterance.to_string());
    match norm.as_str() {
        "where am i" => return Ok(Command::SceneDescription),
        "what is near me" | "what's near me" | "whats near me" => return Ok(Command::MainObjects),
        _ => {}
    }
    let rest = ["where is ", "where's ", "wheres "]
        .iter()
        .find_map(|p| norm.strip_prefix(p))
        .ok_or_else(unrecognized)?;
    let target = strip_articles(rest);
    if target.is_empty() || matches!(target.as_str(), "the" | "a" | "an") {
        return Err(unrecognized());
    }
    Ok(Command::Locate(target))
}

/// How many times each object was announced by "What is near me?".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnouncementHistory {
    counts: HashMap<String, u32>,
}

impl AnnouncementHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, id: &str) -> u32 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn record(&mut self, id: &str) {
        *self.counts.entry(id.to_string()).or_default() += 1;
    }

    pub fn set(&mut self, id: &str, count: u32) {
        self.counts.insert(id.to_string(), count);
    }
}

/// `importance / (1 + distance) * decay^announcements`.
pub fn runtime_importance_with(
    object: &SceneObject,
    camera: &Pose,
    history: &AnnouncementHistory,
    decay: f64,
) -> f64 {
    let d = object.position.distance(camera.position);
    let weight = decay.powi(history.count(&object.id) as i32) / (1.0 + d);
    object.importance() * weight
}

pub fn runtime_importance(
    object: &SceneObject,
    camera: &Pose,
    history: &AnnouncementHistory,
) -> f64 {
    runtime_importance_with(object, camera, history, DEFAULT_DECAY)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Announcement<'a> {
    pub object: &'a SceneObject,
    pub score: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

/// Top `k` objects by runtime importance, ties broken by distance then id.
/// Objects with zero importance are never announced. The caller records the
/// announcements in `history` afterwards.
pub fn main_objects<'a>(
    scene: &'a Scene,
    camera: &Pose,
    history: &AnnouncementHistory,
    k: usize,
    decay: f64,
) -> Result<Vec<Announcement<'a>>, InterpretError> {
    let mut ranked: Vec<(f64, f64, &SceneObject)> = scene
        .objects
        .iter()
        .filter(|o| o.importance() > 0.0)
        .map(|o| {
            (
                runtime_importance_with(o, camera, history, decay),
                o.position.distance(camera.position),
                o,
            )
        })
        .collect();
    if ranked.is_empty() {
        return Err(InterpretError::NoAnnounceableObjects);
    }
    ranked.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| a.2.id.cmp(&b.2.id))
    });
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(score, _, object)| {
            let (azimuth, elevation) =
                relative_bearing(camera, object.position).unwrap_or((0.0, 0.0));
            Announcement {
                object,
                score,
                azimuth,
                elevation,
            }
        })
        .collect())
}

/// "Where am I?": one speech event with the nearest view's description.
pub fn describe_here(
    store: &DescriptionStore,
    anchors: &[AnchorPoint],
    pose: &Pose,
    t: f64,
    speech_rate: f64,
) -> Result<Vec<FeedbackEvent>, InterpretError> {
    let text = lookup_description(store, anchors, pose)?;
    Ok(vec![FeedbackEvent::speech(t, text, speech_rate)])
}
