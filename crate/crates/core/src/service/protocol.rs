//! JSON messages exchanged over the session socket.

use crate::feedback::FeedbackEvent;
use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};

/// Client to server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Pose {
        position: Vec3,
        yaw: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hand: Option<Vec3>,
    },
    ButtonA,
    Command {
        text: String,
    },
    Cancel,
    Grab {
        id: String,
    },
    SetRate {
        rate: f64,
    },
}

/// A client message scheduled at a session time, one per line in trajectory
/// files: `{"t": 1.5, "type": "pose", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedMessage {
    pub t: f64,
    #[serde(flatten)]
    pub message: ClientMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseSnapshot {
    pub position: Vec3,
    pub yaw: f64,
    pub hand: Vec3,
}

/// Periodic session state for clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "state")]
pub struct StateSnapshot {
    pub t: f64,
    /// `idle` when no guidance is running, else the guidance phase.
    pub phase: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub pose: PoseSnapshot,
    pub speech_rate: f64,
    pub armed: bool,
}

/// Sent once after connecting: the session id (for reconnecting) and the
/// scene for drawing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "session")]
pub struct SessionInfo {
    pub id: String,
    pub scene: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "error")]
pub struct ErrorMessage {
    pub message: String,
}

/// Server to client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ServerMessage {
    State(StateSnapshot),
    Session(SessionInfo),
    Error(ErrorMessage),
    Event(FeedbackEvent),
}

impl ServerMessage {
    pub fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error(ErrorMessage {
            message: message.into(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}
