//! Headless replay of a timed message script against a session.

use super::protocol::TimedMessage;
use super::session::{Session, SessionConfig};
use super::ServiceError;
use crate::describer::DescriptionStore;
use crate::feedback::FeedbackEvent;
use crate::scene::Scene;
use std::io::BufRead;
use std::sync::Arc;

/// Reads a JSON-lines trajectory; blank lines are skipped.
pub fn read_trajectory(reader: impl BufRead) -> Result<Vec<TimedMessage>, ServiceError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ServiceError::InvalidMessage(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let msg: TimedMessage = serde_json::from_str(&line)
            .map_err(|e| ServiceError::InvalidMessage(format!("line {}: {e}", n + 1)))?;
        out.push(msg);
    }
    Ok(out)
}

/// Plays `script` on a fresh session with a fixed tick. Messages due at or
/// before the current clock are applied before each tick. Runs until `tail`
/// seconds after the last message. Message errors are returned with the
/// events produced so far discarded.
pub fn simulate(
    scene: Arc<Scene>,
    store: Arc<DescriptionStore>,
    config: SessionConfig,
    script: &[TimedMessage],
    dt: f64,
    tail: f64,
) -> Result<Vec<FeedbackEvent>, ServiceError> {
    let mut session = Session::new("simulation", scene, store, config)?;
    let mut script: Vec<&TimedMessage> = script.iter().collect();
    script.sort_by(|a, b| a.t.total_cmp(&b.t));
    let end = script.last().map_or(0.0, |m| m.t) + tail;
    let mut events = Vec::new();
    let mut next = 0;
    let mut steps: u64 = 0;
    loop {
        // clock from the step count keeps long runs free of drift
        let now = steps as f64 * dt;
        while next < script.len() && script[next].t <= now + 1e-9 {
            session.handle(script[next].message.clone())?;
            next += 1;
        }
        events.extend(session.drain());
        if now >= end - 1e-9 {
            break;
        }
        session.advance(dt)?;
        steps += 1;
    }
    events.extend(session.drain());
    Ok(events)
}
