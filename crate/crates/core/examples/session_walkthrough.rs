//! A full session driven by client messages, printing the JSON a client
//! would receive: button press, the three commands, a hand approach and grab.

use envision::anchors::ViewParams;
use envision::describer::{prebake, Backend, PrebakeOptions, RasterCapturer};
use envision::service::{ClientMessage, ServerMessage, Session, SessionConfig};
use envision::Vec3;
use std::sync::Arc;

fn send(session: &mut Session, msg: ClientMessage) -> anyhow::Result<()> {
    println!(">> {}", serde_json::to_string(&msg)?);
    session.handle(msg)?;
    flush(session);
    Ok(())
}

fn flush(session: &mut Session) {
    for e in session.drain() {
        println!("<< {}", ServerMessage::Event(e).to_json());
    }
}

fn main() -> anyhow::Result<()> {
    let scene = envision::demo::escape_room();
    let backend = Backend::Template(ViewParams::for_scene(&scene));
    let store = prebake(
        &scene,
        scene.anchor_points(),
        &RasterCapturer::default(),
        &backend,
        &PrebakeOptions::default(),
    )?;
    let mut s = Session::new(
        "demo",
        Arc::new(scene),
        Arc::new(store),
        SessionConfig::default(),
    )?;

    let user = Vec3::new(1.5, 1.6, -0.5);
    send(
        &mut s,
        ClientMessage::Pose {
            position: user,
            yaw: 80.0,
            hand: Some(Vec3::new(1.6, 1.2, -0.5)),
        },
    )?;
    for text in [
        "Where am I?",
        "What is near me?",
        "Where is the brew button?",
    ] {
        send(&mut s, ClientMessage::ButtonA)?;
        send(&mut s, ClientMessage::Command { text: text.into() })?;
    }
    let target = s.scene().object("brew-button").unwrap().position;
    let start = Vec3::new(1.6, 1.2, -0.5);
    for step in 1..=40 {
        let hand = start.lerp(target, (step as f64 / 30.0).min(1.0));
        s.set_hand(hand);
        s.advance(0.05)?;
        flush(&mut s);
    }
    println!("<< {}", ServerMessage::State(s.snapshot()).to_json());
    // the button is not grabbable; the service says so
    if let Err(e) = s.handle(ClientMessage::Grab {
        id: "brew-button".into(),
    }) {
        println!("<< {}", ServerMessage::error(e.to_string()).to_json());
    }
    Ok(())
}
