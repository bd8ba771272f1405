use std::path::Path;
use std::process::Command;

const SCENE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/escape_room.json");

fn envision(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_envision"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn prebake(dir: &Path) -> String {
    let csv = dir.join("views.csv");
    envision(&[
        "prebake",
        "--scene",
        SCENE,
        "--backend",
        "template",
        "--out",
        csv.to_str().unwrap(),
    ]);
    csv.to_str().unwrap().to_string()
}

#[test]
fn prebake_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = prebake(dir.path());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 33);

    let traj = dir.path().join("walk.jsonl");
    std::fs::write(
        &traj,
        concat!(
            "{\"t\":0,\"type\":\"button_a\"}\n",
            "{\"t\":0,\"type\":\"command\",\"text\":\"Where am I?\"}\n",
            "{\"t\":0.5,\"type\":\"button_a\"}\n",
            "{\"t\":0.5,\"type\":\"command\",\"text\":\"Where is the brew button?\"}\n",
            "{\"t\":1.0,\"type\":\"pose\",\"position\":[1.5,1.6,0],\"yaw\":90,\"hand\":[2.3,1.2,0]}\n",
        ),
    )
    .unwrap();
    let events = dir.path().join("events.jsonl");
    envision(&[
        "simulate",
        "--scene",
        SCENE,
        "--store",
        &csv,
        "--trajectory",
        traj.to_str().unwrap(),
        "--out",
        events.to_str().unwrap(),
    ]);
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&events)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["type"], "speech");
    assert!(lines[0]["text"]
        .as_str()
        .unwrap()
        .starts_with("The scene in front of you"));
    assert!(lines.iter().any(|l| l["type"] == "beep"));
    assert_eq!(lines.iter().filter(|l| l["type"] == "haptic").count(), 1);
    assert!(lines
        .windows(2)
        .all(|w| w[0]["t"].as_f64() <= w[1]["t"].as_f64()));
}

#[test]
fn bench_reports_latency() {
    let dir = tempfile::tempdir().unwrap();
    let csv = prebake(dir.path());
    let out = envision(&[
        "bench",
        "--scene",
        SCENE,
        "--store",
        &csv,
        "--lookups",
        "200",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["samples"], 200);
    assert!(report["median_ms"].as_f64().unwrap() < 20.0);
}

#[test]
fn auto_anchors_write_scene() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("auto.csv");
    envision(&[
        "prebake",
        "--scene",
        SCENE,
        "--out",
        csv.to_str().unwrap(),
        "--auto-anchors",
        "--grid-step",
        "1.5",
    ]);
    let scene = envision::scene::load_scene(dir.path().join("auto.scene.json")).unwrap();
    let store = envision::describer::load_store(&csv).unwrap();
    assert_eq!(store.len(), scene.anchor_points().len() * 8);
    store.check_complete(scene.anchor_points()).unwrap();
}

#[test]
fn missing_vlm_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_envision"))
        .args([
            "prebake",
            "--scene",
            SCENE,
            "--backend",
            "vlm",
            "--out",
            csv.to_str().unwrap(),
        ])
        .env_remove("ENVISION_VLM_URL")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("ENVISION_VLM_URL"));
    assert!(!csv.exists());
}
