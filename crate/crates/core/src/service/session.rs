//! One user's live session: pose, command gating, announcement history and
//! the active guidance loop. All mutation goes through `handle` and
//! `advance`, called by the single task that owns the session.

use super::protocol::{ClientMessage, PoseSnapshot, StateSnapshot};
use super::ServiceError;
use crate::anchors::AnchorPoint;
use crate::describer::DescriptionStore;
use crate::feedback::{EventQueue, FeedbackEvent, DEFAULT_TONE_MS};
use crate::geometry::Vec3;
use crate::guidance::{GuidanceConfig, GuidanceSession, HandPose};
use crate::interpreter::{
    describe_here, main_objects, parse_command, AnnouncementHistory, Command, InterpretError,
    DEFAULT_DECAY, DEFAULT_MAIN_OBJECTS, HELP_TEXT,
};
use crate::scene::{object_lookup_with, LookupError, Pose, Scene, DEFAULT_FUZZY_THRESHOLD};
use std::sync::Arc;

pub const BUTTON_HINT: &str = "Press button A first, then say your command.";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub guidance: GuidanceConfig,
    /// Objects announced per "What is near me?".
    pub main_objects: usize,
    pub decay: f64,
    pub tone_ms: u32,
    pub lookup_threshold: f64,
    pub speech_rate: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            guidance: GuidanceConfig::default(),
            main_objects: DEFAULT_MAIN_OBJECTS,
            decay: DEFAULT_DECAY,
            tone_ms: DEFAULT_TONE_MS,
            lookup_threshold: DEFAULT_FUZZY_THRESHOLD,
            speech_rate: 1.0,
        }
    }
}

pub struct Session {
    id: String,
    scene: Arc<Scene>,
    store: Arc<DescriptionStore>,
    user: Pose,
    hand: HandPose,
    history: AnnouncementHistory,
    guidance: Option<GuidanceSession>,
    speech_rate: f64,
    clock: f64,
    armed: bool,
    queue: EventQueue,
    config: SessionConfig,
}

impl Session {
    /// Starts at the first anchor facing yaw 0. The store must hold every view
    /// of the scene's anchors.
    pub fn new(
        id: impl Into<String>,
        scene: Arc<Scene>,
        store: Arc<DescriptionStore>,
        config: SessionConfig,
    ) -> Result<Self, ServiceError> {
        let anchors = scene.anchor_points();
        store
            .check_complete(anchors)
            .map_err(|e| ServiceError::IncompleteStore(e.to_string()))?;
        let start = anchors[0].position;
        Ok(Session {
            id: id.into(),
            user: Pose::new(start, 0.0),
            hand: HandPose::new(start),
            history: AnnouncementHistory::new(),
            guidance: None,
            speech_rate: config.speech_rate,
            clock: 0.0,
            armed: false,
            queue: EventQueue::new(),
            scene,
            store,
            config,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn anchors(&self) -> &[AnchorPoint] {
        self.scene.anchor_points()
    }

    pub fn user(&self) -> &Pose {
        &self.user
    }

    pub fn hand(&self) -> &HandPose {
        &self.hand
    }

    pub fn history(&self) -> &AnnouncementHistory {
        &self.history
    }

    pub fn guidance(&self) -> Option<&GuidanceSession> {
        self.guidance.as_ref()
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn speech_rate(&self) -> f64 {
        self.speech_rate
    }

    fn say(&mut self, text: impl Into<String>) {
        let ev = FeedbackEvent::speech(self.clock, text, self.speech_rate);
        self.queue.enqueue(ev);
    }

    /// Applies one client message. Spoken responses are queued; errors are
    /// for the client, not the listener.
    pub fn handle(&mut self, message: ClientMessage) -> Result<(), ServiceError> {
        match message {
            ClientMessage::Pose {
                position,
                yaw,
                hand,
            } => {
                if !position.is_finite() || !yaw.is_finite() || hand.is_some_and(|h| !h.is_finite())
                {
                    return Err(ServiceError::InvalidMessage("non-finite pose".into()));
                }
                self.user = Pose::new(position, yaw);
                if let Some(h) = hand {
                    self.hand = HandPose::new(h);
                }
            }
            ClientMessage::ButtonA => self.armed = true,
            ClientMessage::Command { text } => {
                if !std::mem::take(&mut self.armed) {
                    self.say(BUTTON_HINT);
                    return Ok(());
                }
                self.dispatch(&text)?;
            }
            ClientMessage::Cancel => {
                let g = self.guidance.take().ok_or(ServiceError::NoGuidance)?;
                let name = self
                    .scene
                    .object(g.target())
                    .map_or_else(|| g.target().to_string(), |o| o.name.clone());
                self.say(format!("Stopped locating {name}."));
            }
            ClientMessage::Grab { id } => {
                let object = self
                    .scene
                    .object(&id)
                    .ok_or_else(|| ServiceError::UnknownObject(id.clone()))?
                    .clone();
                let g = self.guidance.as_mut().ok_or(ServiceError::NoGuidance)?;
                let ev = g.notify_grab(&object)?;
                self.queue.enqueue(ev);
            }
            ClientMessage::SetRate { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(ServiceError::InvalidRate(rate));
                }
                self.speech_rate = rate;
                if let Some(g) = self.guidance.as_mut() {
                    g.set_speech_rate(rate);
                }
            }
        }
        Ok(())
    }

    fn dispatch(&mut self, utterance: &str) -> Result<(), ServiceError> {
        let command = match parse_command(utterance) {
            Ok(c) => c,
            Err(_) => {
                self.say(HELP_TEXT);
                return Ok(());
            }
        };
        match command {
            Command::SceneDescription => {
                let events = describe_here(
                    &self.store,
                    self.scene.anchor_points(),
                    &self.user,
                    self.clock,
                    self.speech_rate,
                )
                .map_err(|e| ServiceError::IncompleteStore(e.to_string()))?;
                self.queue.extend(events);
            }
            Command::MainObjects => {
                let scene = Arc::clone(&self.scene);
                match main_objects(
                    &scene,
                    &self.user,
                    &self.history,
                    self.config.main_objects,
                    self.config.decay,
                ) {
                    Ok(picks) => {
                        for a in &picks {
                            self.say(a.object.name.clone());
                            self.queue.enqueue(FeedbackEvent::tone(
                                self.clock,
                                a.azimuth,
                                a.elevation,
                                self.config.tone_ms,
                            ));
                        }
                        for a in &picks {
                            self.history.record(&a.object.id);
                        }
                    }
                    Err(InterpretError::NoAnnounceableObjects) => {
                        self.say("There are no notable objects near you.");
                    }
                    Err(e) => return Err(ServiceError::Internal(e.to_string())),
                }
            }
            Command::Locate(name) => {
                match object_lookup_with(&self.scene, &name, self.config.lookup_threshold) {
                    Ok((object, _)) => {
                        let g = GuidanceSession::new(
                            object.id.clone(),
                            self.config.guidance,
                            self.clock,
                        )?
                        .with_speech_rate(self.speech_rate);
                        self.guidance = Some(g);
                    }
                    Err(LookupError::Ambiguous { .. }) => {
                        self.say(format!(
                            "There is more than one {name}. Please be more specific."
                        ));
                    }
                    Err(_) => self.say(format!("Sorry, I could not find the {name}.")),
                }
            }
        }
        Ok(())
    }

    /// Moves the session clock forward and runs the guidance loop.
    pub fn advance(&mut self, dt: f64) -> Result<(), ServiceError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ServiceError::InvalidMessage(format!("bad time step {dt}")));
        }
        self.clock += dt;
        if let Some(g) = self.guidance.as_mut() {
            let events = g.tick(dt, &self.user, &self.hand, &self.scene)?;
            self.queue.extend(events);
        }
        Ok(())
    }

    /// Pending events in timestamp order.
    pub fn drain(&mut self) -> Vec<FeedbackEvent> {
        self.queue.drain()
    }

    pub fn snapshot(&self) -> StateSnapshot {
        let phase = self.guidance.as_ref().map_or_else(
            || "idle".to_string(),
            |g| {
                serde_json::to_value(g.phase())
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default()
            },
        );
        StateSnapshot {
            t: self.clock,
            phase,
            target: self.guidance.as_ref().map(|g| g.target().to_string()),
            pose: PoseSnapshot {
                position: self.user.position,
                yaw: self.user.yaw(),
                hand: self.hand.position,
            },
            speech_rate: self.speech_rate,
            armed: self.armed,
        }
    }

    /// Moves the hand without touching the head pose.
    pub fn set_hand(&mut self, position: Vec3) {
        self.hand = HandPose::new(position);
    }
}
