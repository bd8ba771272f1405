//! Scene interpretation for blind and low-vision users of 3D/VR scenes.
//!
//! Three spoken commands drive everything:
//!
//! * "Where am I?" reads a pre-baked description of the view nearest to the
//!   user's pose ([`describer`], [`anchors`]).
//! * "What is near me?" announces the three most important nearby objects,
//!   each followed by a spatial tone ([`interpreter`], [`feedback`]).
//! * "Where is the <object>?" starts a beep/speech/haptic guidance loop that
//!   steers the hand to the object ([`guidance`]).
//!
//! [`service`] ties these together into sessions served over a WebSocket.

pub mod anchors;
pub mod bench;
pub mod demo;
pub mod describer;
pub mod feedback;
pub mod geometry;
pub mod guidance;
pub mod interpreter;
pub mod scene;
pub mod service;

pub use anchors::{AnchorPoint, ViewKey, ViewParams};
pub use describer::DescriptionStore;
pub use feedback::{FeedbackEvent, Payload};
pub use geometry::Vec3;
pub use scene::{Pose, Scene, SceneObject};
