//! Object localization loop for "Where is the <object>?".
//!
//! A tick-driven state machine: beeps whose repetition rate rises as the hand
//! nears the target, a spoken direction phrase every `speech_period`, one
//! haptic pulse on reaching the interaction radius, and a "holding" line on
//! grab. Beep and speech onsets are scheduled at exact times inside each
//! tick's `[start, end)` window rather than snapped to tick boundaries.

use crate::feedback::{relative_bearing, stereo_pan, FeedbackEvent, Pan};
use crate::geometry::Vec3;
use crate::scene::{Pose, Scene, SceneObject};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Guards schedule comparisons against accumulated float error in `elapsed`.
const SCHEDULE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceConfig {
    /// Beep repetition rate at zero distance, Hz.
    pub beep_rate_max: f64,
    /// Floor on the beep repetition rate, Hz.
    pub beep_rate_min: f64,
    /// Distance at which the rate halves, meters.
    pub distance_scale: f64,
    /// Seconds between spoken direction phrases.
    pub speech_period: f64,
    /// Hand-to-object distance that counts as reached, meters.
    pub interaction_radius: f64,
    pub haptic_amplitude: f64,
    pub haptic_duration_ms: u32,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            beep_rate_max: 8.0,
            beep_rate_min: 1.0,
            distance_scale: 1.0,
            speech_period: 2.0,
            interaction_radius: 0.25,
            haptic_amplitude: 0.8,
            haptic_duration_ms: 120,
        }
    }
}

impl GuidanceConfig {
    pub fn is_valid(&self) -> bool {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        pos(self.beep_rate_max)
            && pos(self.beep_rate_min)
            && self.beep_rate_min <= self.beep_rate_max
            && pos(self.distance_scale)
            && pos(self.speech_period)
            && pos(self.interaction_radius)
            && (0.0..=1.0).contains(&self.haptic_amplitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Guiding,
    Reached,
    Holding,
    Cancelled,
}

/// Right-controller stand-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPose {
    pub position: Vec3,
}

impl HandPose {
    pub fn new(position: Vec3) -> Self {
        HandPose { position }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GuidanceError {
    #[error("target {0} is not in the scene")]
    TargetMissing(String),
    #[error("guidance was cancelled")]
    Cancelled,
    #[error("tick length must be positive, got {0}")]
    InvalidStep(f64),
    #[error("{0} cannot be held")]
    NotGrabbable(String),
    #[error("{0} is not the object being located")]
    NotTarget(String),
    #[error("cannot grab while {0:?}")]
    WrongPhase(Phase),
    #[error("invalid guidance configuration")]
    InvalidConfig,
}

/// Beep repetition rate for a hand-to-target distance.
pub fn beep_rate(distance: f64, config: &GuidanceConfig) -> f64 {
    let raw = config.beep_rate_max / (1.0 + distance.max(0.0) / config.distance_scale);
    raw.clamp(config.beep_rate_min, config.beep_rate_max)
}

const SECTORS: [&str; 8] = [
    "ahead",
    "ahead-right",
    "right",
    "behind-right",
    "behind",
    "behind-left",
    "left",
    "ahead-left",
];

/// One of eight 45° sectors centred on ahead, ahead-right, ... Boundaries
/// belong to the clockwise neighbour.
pub fn sector_name(azimuth: f64) -> &'static str {
    let idx = ((azimuth + 22.5) / 45.0).floor().rem_euclid(8.0) as usize;
    SECTORS[idx % 8]
}

fn format_distance(d: f64) -> String {
    let r = (d * 10.0).round() / 10.0;
    let unit = if r == 1.0 { "meter" } else { "meters" };
    if r.fract() == 0.0 {
        format!("{r:.0} {unit}")
    } else {
        format!("{r:.1} {unit}")
    }
}

/// e.g. "1 meter ahead", "2.5 meters behind-left and above". Distance is
/// measured from the hand, direction from the head.
pub fn direction_phrase(user: &Pose, hand: &HandPose, target: Vec3) -> String {
    let distance = format_distance(hand.position.distance(target));
    let (azimuth, elevation) = relative_bearing(user, target).unwrap_or((0.0, 0.0));
    let vertical = if elevation > 30.0 {
        " and above"
    } else if elevation < -30.0 {
        " and below"
    } else {
        ""
    };
    format!("{distance} {}{vertical}", sector_name(azimuth))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceSession {
    target: String,
    phase: Phase,
    /// Seconds since guidance started.
    elapsed: f64,
    next_speech_at: f64,
    haptic_fired: bool,
    /// Progress toward the next beep; a beep sounds on reaching 1.
    beep_phase: f64,
    /// Session clock at which guidance started; added to event timestamps.
    started_at: f64,
    speech_rate: f64,
    config: GuidanceConfig,
}

impl GuidanceSession {
    pub fn new(
        target: impl Into<String>,
        config: GuidanceConfig,
        started_at: f64,
    ) -> Result<Self, GuidanceError> {
        if !config.is_valid() {
            return Err(GuidanceError::InvalidConfig);
        }
        Ok(GuidanceSession {
            target: target.into(),
            phase: Phase::Guiding,
            elapsed: 0.0,
            next_speech_at: 0.0,
            haptic_fired: false,
            beep_phase: 1.0,
            started_at,
            speech_rate: 1.0,
            config,
        })
    }

    pub fn with_speech_rate(mut self, rate: f64) -> Self {
        self.speech_rate = rate;
        self
    }

    pub fn set_speech_rate(&mut self, rate: f64) {
        self.speech_rate = rate;
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    pub fn haptic_fired(&self) -> bool {
        self.haptic_fired
    }

    pub fn config(&self) -> &GuidanceConfig {
        &self.config
    }

    pub fn cancel(&mut self) {
        self.phase = Phase::Cancelled;
    }

    /// Advances the loop by `dt` seconds with the hand and head sampled at
    /// the end of the step.
    pub fn tick(
        &mut self,
        dt: f64,
        user: &Pose,
        hand: &HandPose,
        scene: &Scene,
    ) -> Result<Vec<FeedbackEvent>, GuidanceError> {
        if self.phase == Phase::Cancelled {
            return Err(GuidanceError::Cancelled);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(GuidanceError::InvalidStep(dt));
        }
        let target = scene
            .object(&self.target)
            .ok_or_else(|| GuidanceError::TargetMissing(self.target.clone()))?;
        let start = self.elapsed;
        let end = start + dt;
        self.elapsed = end;
        let d = hand.position.distance(target.position);
        let within = d <= self.config.interaction_radius;
        let mut events = Vec::new();

        match self.phase {
            Phase::Guiding if within && !self.haptic_fired => {
                events.push(FeedbackEvent::haptic(
                    self.started_at + end,
                    self.config.haptic_amplitude,
                    self.config.haptic_duration_ms,
                ));
                self.phase = Phase::Reached;
                self.haptic_fired = true;
            }
            Phase::Reached if !within => {
                self.phase = Phase::Guiding;
                self.haptic_fired = false;
                self.beep_phase = 1.0;
                self.next_speech_at = self.next_speech_at.max(start);
            }
            _ => {}
        }

        if self.phase == Phase::Guiding {
            let rate = beep_rate(d, &self.config);
            let pan = relative_bearing(user, target.position)
                .map(|(az, _)| stereo_pan(az))
                .unwrap_or(Pan {
                    left: std::f64::consts::FRAC_1_SQRT_2,
                    right: std::f64::consts::FRAC_1_SQRT_2,
                });
            self.schedule_beeps(start, end, rate, pan, &mut events);
            self.schedule_speech(start, end, user, hand, target, &mut events);
        }
        events.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(events)
    }

    fn schedule_beeps(
        &mut self,
        start: f64,
        end: f64,
        rate: f64,
        pan: Pan,
        out: &mut Vec<FeedbackEvent>,
    ) {
        let mut t = start;
        let mut phase = self.beep_phase;
        loop {
            let wait = (1.0 - phase).max(0.0) / rate;
            if t + wait < end - SCHEDULE_EPS {
                t += wait;
                phase = 0.0;
                out.push(FeedbackEvent::beep(self.started_at + t, rate, pan));
            } else {
                phase += (end - t) * rate;
                break;
            }
        }
        self.beep_phase = phase;
    }

    fn schedule_speech(
        &mut self,
        start: f64,
        end: f64,
        user: &Pose,
        hand: &HandPose,
        target: &SceneObject,
        out: &mut Vec<FeedbackEvent>,
    ) {
        while self.next_speech_at < end - SCHEDULE_EPS {
            let at = self.next_speech_at.max(start);
            out.push(FeedbackEvent::speech(
                self.started_at + at,
                direction_phrase(user, hand, target.position),
                self.speech_rate,
            ));
            self.next_speech_at = at + self.config.speech_period;
        }
    }

    /// Announces "holding <name>" when the reached target is picked up.
    pub fn notify_grab(&mut self, object: &SceneObject) -> Result<FeedbackEvent, GuidanceError> {
        if object.id != self.target {
            return Err(GuidanceError::NotTarget(object.id.clone()));
        }
        if !object.grabbable {
            return Err(GuidanceError::NotGrabbable(object.id.clone()));
        }
        if self.phase != Phase::Reached {
            return Err(GuidanceError::WrongPhase(self.phase));
        }
        self.phase = Phase::Holding;
        Ok(FeedbackEvent::speech(
            self.started_at + self.elapsed,
            format!("holding {}", object.name),
            self.speech_rate,
        ))
    }
}
