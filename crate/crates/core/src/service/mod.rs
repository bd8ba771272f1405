//! Session service: scene registry, session lifecycle, the WebSocket server
//! and a headless replay driver.

pub mod protocol;
pub mod server;
pub mod session;
pub mod simulate;

pub use protocol::{ClientMessage, ServerMessage, StateSnapshot, TimedMessage};
pub use session::{Session, SessionConfig, BUTTON_HINT};

use crate::describer::DescriptionStore;
use crate::guidance::GuidanceError;
use crate::scene::Scene;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};
use thiserror::Error;

/// How long a disconnected session is kept for reconnection.
pub const SESSION_RETENTION: Duration = Duration::from_secs(60);
/// Server-side guidance tick.
pub const TICK: Duration = Duration::from_millis(50);
/// State snapshots go out every this many ticks (5 Hz).
pub const SNAPSHOT_EVERY: u32 = 4;

#[derive(Debug, Error, PartialEq)]
pub enum ServiceError {
    #[error("unknown scene {0:?}")]
    UnknownScene(String),
    #[error("description store incomplete: {0}")]
    IncompleteStore(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("no object is being located")]
    NoGuidance,
    #[error("speech rate must be positive, got {0}")]
    InvalidRate(f64),
    #[error("invalid message: {0}")]
    InvalidMessage(String),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error("internal error: {0}")]
    Internal(String),
}

struct SceneEntry {
    scene: Arc<Scene>,
    store: Option<Arc<DescriptionStore>>,
}

struct Slot {
    session: Arc<Mutex<Session>>,
    detached_since: Option<Instant>,
}

/// Loaded scenes and the sessions opened on them. Scenes and stores are
/// shared read-only; each session sits behind its own lock.
pub struct Service {
    scenes: HashMap<String, SceneEntry>,
    sessions: Mutex<HashMap<String, Slot>>,
    config: SessionConfig,
    retention: Duration,
}

impl Service {
    pub fn new(config: SessionConfig) -> Self {
        Service {
            scenes: HashMap::new(),
            sessions: Mutex::new(HashMap::new()),
            config,
            retention: SESSION_RETENTION,
        }
    }

    pub fn with_retention(mut self, retention: Duration) -> Self {
        self.retention = retention;
        self
    }

    /// Registers a scene, optionally with its baked store.
    pub fn add_scene(&mut self, scene: Scene, store: Option<DescriptionStore>) {
        self.scenes.insert(
            scene.name.clone(),
            SceneEntry {
                scene: Arc::new(scene),
                store: store.map(Arc::new),
            },
        );
    }

    pub fn scene(&self, name: &str) -> Option<Arc<Scene>> {
        self.scenes.get(name).map(|e| Arc::clone(&e.scene))
    }

    /// The scene name when exactly one scene is loaded.
    pub fn default_scene(&self) -> Option<&str> {
        (self.scenes.len() == 1).then(|| self.scenes.keys().next().unwrap().as_str())
    }

    pub fn open_session(&self, scene_name: &str) -> Result<String, ServiceError> {
        let entry = self
            .scenes
            .get(scene_name)
            .ok_or_else(|| ServiceError::UnknownScene(scene_name.to_string()))?;
        let store = entry
            .store
            .as_ref()
            .ok_or_else(|| ServiceError::IncompleteStore("no description store loaded".into()))?;
        let id = uuid::Uuid::new_v4().to_string();
        let session = Session::new(
            id.clone(),
            Arc::clone(&entry.scene),
            Arc::clone(store),
            self.config,
        )?;
        self.sessions.lock().unwrap().insert(
            id.clone(),
            Slot {
                session: Arc::new(Mutex::new(session)),
                detached_since: None,
            },
        );
        Ok(id)
    }

    /// Returns the session for a (re)connecting client.
    pub fn attach(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        let mut sessions = self.sessions.lock().unwrap();
        let slot = sessions
            .get_mut(id)
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))?;
        slot.detached_since = None;
        Ok(Arc::clone(&slot.session))
    }

    pub fn detach(&self, id: &str, now: Instant) {
        if let Some(slot) = self.sessions.lock().unwrap().get_mut(id) {
            slot.detached_since = Some(now);
        }
    }

    /// Drops sessions detached for longer than the retention window.
    pub fn reap(&self, now: Instant) -> Vec<String> {
        let mut sessions = self.sessions.lock().unwrap();
        let expired: Vec<String> = sessions
            .iter()
            .filter(|(_, s)| {
                s.detached_since
                    .is_some_and(|t| now.saturating_duration_since(t) > self.retention)
            })
            .map(|(id, _)| id.clone())
            .collect();
        for id in &expired {
            sessions.remove(id);
        }
        expired
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }
}
