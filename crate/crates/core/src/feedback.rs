//! Multimodal feedback events, head-relative bearing math, equal-power
//! stereo panning and the per-session event queue.

use crate::geometry::{wrap_signed, Vec3};
use crate::scene::Pose;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use thiserror::Error;

/// Default length of the spatial tone that follows each announced object.
pub const DEFAULT_TONE_MS: u32 = 250;
/// Speaking pace used to estimate speech durations at rate 1.0.
pub const WORDS_PER_MINUTE: f64 = 160.0;

#[derive(Debug, Error, PartialEq)]
pub enum FeedbackError {
    #[error("target coincides with the listener position")]
    DegeneratePosition,
}

/// Left/right channel gains. Serializes as `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Pan {
    pub left: f64,
    pub right: f64,
}

impl From<[f64; 2]> for Pan {
    fn from(v: [f64; 2]) -> Self {
        Pan {
            left: v[0],
            right: v[1],
        }
    }
}

impl From<Pan> for [f64; 2] {
    fn from(p: Pan) -> Self {
        [p.left, p.right]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Payload {
    Speech {
        text: String,
        rate: f64,
        /// Estimated spoken duration for client pacing.
        duration_ms: u32,
    },
    Tone {
        azimuth: f64,
        elevation: f64,
        pan: Pan,
        duration_ms: u32,
    },
    Beep {
        rate: f64,
        pan: Pan,
    },
    Haptic {
        amplitude: f64,
        duration_ms: u32,
    },
}

/// One timestamped output unit. Wire form: `{"t": seconds, "type": ..., fields}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub t: f64,
    #[serde(flatten)]
    pub payload: Payload,
}

impl FeedbackEvent {
    pub fn speech(t: f64, text: impl Into<String>, rate: f64) -> Self {
        let text = text.into();
        let duration_ms = estimate_speech_ms(&text, rate);
        FeedbackEvent {
            t,
            payload: Payload::Speech {
                text,
                rate,
                duration_ms,
            },
        }
    }

    pub fn tone(t: f64, azimuth: f64, elevation: f64, duration_ms: u32) -> Self {
        FeedbackEvent {
            t,
            payload: Payload::Tone {
                azimuth,
                elevation,
                pan: stereo_pan(azimuth),
                duration_ms,
            },
        }
    }

    pub fn beep(t: f64, rate: f64, pan: Pan) -> Self {
        FeedbackEvent {
            t,
            payload: Payload::Beep { rate, pan },
        }
    }

    pub fn haptic(t: f64, amplitude: f64, duration_ms: u32) -> Self {
        FeedbackEvent {
            t,
            payload: Payload::Haptic {
                amplitude,
                duration_ms,
            },
        }
    }

    pub fn speech_text(&self) -> Option<&str> {
        match &self.payload {
            Payload::Speech { text, .. } => Some(text),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Speech { .. } => "speech",
            Payload::Tone { .. } => "tone",
            Payload::Beep { .. } => "beep",
            Payload::Haptic { .. } => "haptic",
        }
    }
}

/// Spoken duration estimate at `WORDS_PER_MINUTE`, scaled by the speech rate.
pub fn estimate_speech_ms(text: &str, rate: f64) -> u32 {
    let words = text.split_whitespace().count() as f64;
    let ms = words / WORDS_PER_MINUTE * 60_000.0 / rate.max(1e-3);
    ms.round() as u32
}

/// Azimuth and elevation of `target` in the listener's yaw frame.
///
/// Azimuth is in `(-180, 180]`, positive to the right. A target straight
/// above or below reports azimuth 0 and elevation ±90.
pub fn relative_bearing(user: &Pose, target: Vec3) -> Result<(f64, f64), FeedbackError> {
    let d = target - user.position;
    let horizontal = d.horizontal_length();
    if horizontal == 0.0 {
        return match d.y.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Ok((0.0, 90.0)),
            Some(std::cmp::Ordering::Less) => Ok((0.0, -90.0)),
            _ => Err(FeedbackError::DegeneratePosition),
        };
    }
    let world = d.x.atan2(d.z).to_degrees();
    let azimuth = wrap_signed(world - user.yaw());
    let elevation = d.y.atan2(horizontal).to_degrees();
    Ok((azimuth, elevation))
}

/// Equal-power pan on the front-projected azimuth. Rear azimuths clamp to ±90.
pub fn stereo_pan(azimuth: f64) -> Pan {
    let theta = azimuth.clamp(-90.0, 90.0);
    let angle = FRAC_PI_4 * (1.0 + theta / 90.0);
    Pan {
        left: angle.cos().max(0.0),
        right: angle.sin().max(0.0),
    }
}

/// Pending events for one session, drained in timestamp order.
#[derive(Debug, Default)]
pub struct EventQueue {
    pending: Vec<FeedbackEvent>,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enqueue(&mut self, event: FeedbackEvent) {
        self.pending.push(event);
    }

    pub fn extend(&mut self, events: impl IntoIterator<Item = FeedbackEvent>) {
        self.pending.extend(events);
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Returns every pending event ordered by timestamp; equal timestamps keep
    /// insertion order.
    pub fn drain(&mut self) -> Vec<FeedbackEvent> {
        let mut out = std::mem::take(&mut self.pending);
        out.sort_by(|a, b| a.t.total_cmp(&b.t));
        out
    }
}
