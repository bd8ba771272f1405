//! WebSocket front end.
//!
//! `GET /ws` opens a session on the default (or `?scene=`) scene;
//! `GET /ws?session=<id>` resumes a detached one. Each text frame is one JSON
//! message. The connection task owns the session while attached: messages
//! are applied in arrival order, the guidance loop ticks every 50 ms and a
//! state snapshot goes out at 5 Hz.

use super::protocol::{ClientMessage, ServerMessage, SessionInfo};
use super::{Service, ServiceError, SNAPSHOT_EVERY, TICK};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use serde::Deserialize;
use std::sync::Arc;
use std::time::Instant;
use tokio::time::MissedTickBehavior;
use tracing::{debug, info, warn};

#[derive(Debug, Deserialize)]
pub struct ConnectParams {
    pub session: Option<String>,
    pub scene: Option<String>,
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/ws", get(ws_handler))
        .route("/scene", get(scene_handler))
        .route("/health", get(|| async { "ok" }))
        .with_state(service)
}

/// Serves until the listener fails. Also runs the reaper for detached
/// sessions.
pub async fn serve(
    service: Arc<Service>,
    listener: tokio::net::TcpListener,
) -> std::io::Result<()> {
    let reaper = Arc::clone(&service);
    tokio::spawn(async move {
        let mut every = tokio::time::interval(std::time::Duration::from_secs(5));
        loop {
            every.tick().await;
            for id in reaper.reap(Instant::now()) {
                info!(%id, "reaped detached session");
            }
        }
    });
    axum::serve(listener, router(service)).await
}

async fn scene_handler(
    State(service): State<Arc<Service>>,
    Query(params): Query<ConnectParams>,
) -> Response {
    let name = params
        .scene
        .or_else(|| service.default_scene().map(str::to_string));
    match name.and_then(|n| service.scene(&n)) {
        Some(scene) => Json(scene.to_value()).into_response(),
        None => (StatusCode::NOT_FOUND, "unknown scene").into_response(),
    }
}

async fn ws_handler(
    ws: WebSocketUpgrade,
    State(service): State<Arc<Service>>,
    Query(params): Query<ConnectParams>,
) -> Response {
    ws.on_upgrade(move |socket| run_connection(service, socket, params))
}

fn resolve_session(service: &Service, params: &ConnectParams) -> Result<String, ServiceError> {
    if let Some(id) = &params.session {
        service.attach(id)?;
        return Ok(id.clone());
    }
    let scene = params
        .scene
        .clone()
        .or_else(|| service.default_scene().map(str::to_string))
        .ok_or_else(|| ServiceError::UnknownScene(String::new()))?;
    service.open_session(&scene)
}

async fn run_connection(service: Arc<Service>, socket: WebSocket, params: ConnectParams) {
    let (mut tx, mut rx) = socket.split();
    let id = match resolve_session(&service, &params) {
        Ok(id) => id,
        Err(e) => {
            let _ = tx
                .send(Message::Text(ServerMessage::error(e.to_string()).to_json()))
                .await;
            let _ = tx.close().await;
            return;
        }
    };
    let session = match service.attach(&id) {
        Ok(s) => s,
        Err(e) => {
            let _ = tx
                .send(Message::Text(ServerMessage::error(e.to_string()).to_json()))
                .await;
            return;
        }
    };
    info!(%id, "client attached");
    let hello = {
        let s = session.lock().unwrap();
        ServerMessage::Session(SessionInfo {
            id: id.clone(),
            scene: s.scene().to_value(),
        })
    };
    if tx.send(Message::Text(hello.to_json())).await.is_err() {
        service.detach(&id, Instant::now());
        return;
    }

    let mut ticker = tokio::time::interval(TICK);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut last = Instant::now();
    let mut ticks: u32 = 0;
    loop {
        let outgoing: Vec<ServerMessage> = tokio::select! {
            incoming = rx.next() => match incoming {
                Some(Ok(Message::Text(text))) => {
                    let mut s = session.lock().unwrap();
                    let result = serde_json::from_str::<ClientMessage>(&text)
                        .map_err(|e| ServiceError::InvalidMessage(e.to_string()))
                        .and_then(|m| s.handle(m));
                    let mut out: Vec<ServerMessage> = s.drain().into_iter().map(ServerMessage::Event).collect();
                    if let Err(e) = result {
                        debug!(%id, error = %e, "message rejected");
                        out.push(ServerMessage::error(e.to_string()));
                    }
                    out
                }
                Some(Ok(Message::Close(_))) | None => break,
                Some(Ok(_)) => Vec::new(),
                Some(Err(e)) => {
                    warn!(%id, error = %e, "socket error");
                    break;
                }
            },
            _ = ticker.tick() => {
                let now = Instant::now();
                let dt = now.duration_since(last).as_secs_f64();
                last = now;
                ticks = ticks.wrapping_add(1);
                let mut s = session.lock().unwrap();
                let mut out = Vec::new();
                if dt > 0.0 {
                    if let Err(e) = s.advance(dt) {
                        out.push(ServerMessage::error(e.to_string()));
                    }
                }
                out.splice(0..0, s.drain().into_iter().map(ServerMessage::Event));
                if ticks.is_multiple_of(SNAPSHOT_EVERY) {
                    out.push(ServerMessage::State(s.snapshot()));
                }
                out
            }
        };
        let mut failed = false;
        for m in outgoing {
            if tx.send(Message::Text(m.to_json())).await.is_err() {
                failed = true;
                break;
            }
        }
        if failed {
            break;
        }
    }
    service.detach(&id, Instant::now());
    info!(%id, "client detached");
}
