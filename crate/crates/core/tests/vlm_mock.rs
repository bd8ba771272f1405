use envision::anchors::AnchorPoint;
use envision::describer::{
    prebake, Backend, Generator, PrebakeError, PrebakeOptions, RasterCapturer, VlmClient,
    VlmConfig, DESCRIBE_PROMPT,
};
use envision::Vec3;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

struct Mock {
    url: String,
    hits: Arc<AtomicUsize>,
    requests: Arc<Mutex<Vec<(String, String)>>>,
}

/// Minimal HTTP/1.1 endpoint. `status(n)` picks the status of the n-th request.
fn mock(status: impl Fn(usize) -> u16 + Send + 'static) -> Mock {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!(
        "http://{}/v1/chat/completions",
        listener.local_addr().unwrap()
    );
    let hits = Arc::new(AtomicUsize::new(0));
    let requests = Arc::new(Mutex::new(Vec::new()));
    let (h, r) = (Arc::clone(&hits), Arc::clone(&requests));
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut headers = String::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push_str(&line);
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let n = h.fetch_add(1, Ordering::SeqCst);
            r.lock()
                .unwrap()
                .push((headers, String::from_utf8(body).unwrap()));
            let code = status(n);
            let payload = if code == 200 {
                serde_json::json!({"choices": [{"message": {"role": "assistant",
                    "content": format!("The scene in front of you shows request {n}.")}}]})
                .to_string()
            } else {
                "{\"error\":\"overloaded\"}".to_string()
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {code} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
                payload.len()
            );
        }
    });
    Mock {
        url,
        hits,
        requests,
    }
}

fn scene() -> envision::Scene {
    envision::demo::escape_room()
}

fn one_anchor() -> Vec<AnchorPoint> {
    vec![AnchorPoint {
        index: 0,
        position: Vec3::new(0.0, 1.6, 0.0),
    }]
}

fn small() -> RasterCapturer {
    RasterCapturer {
        width: 64,
        height: 48,
        ..RasterCapturer::default()
    }
}

fn opts(parallelism: usize) -> PrebakeOptions {
    PrebakeOptions {
        retries: 3,
        backoff: Duration::from_millis(1),
        parallelism,
    }
}

fn client(url: &str) -> Backend {
    let mut cfg = VlmConfig::new(url, "secret-key");
    cfg.timeout = Duration::from_secs(5);
    Backend::Vlm(VlmClient::new(cfg).unwrap())
}

#[test]
fn requests_carry_prompt_image_and_key() {
    let m = mock(|_| 200);
    let store = prebake(&scene(), &one_anchor(), &small(), &client(&m.url), &opts(4)).unwrap();
    assert_eq!(store.len(), 8);
    assert_eq!(store.generator, Generator::Vlm);
    assert!(store
        .entries()
        .all(|(_, t)| t.starts_with("The scene in front of you")));
    let reqs = m.requests.lock().unwrap();
    assert_eq!(reqs.len(), 8);
    for (headers, body) in reqs.iter() {
        assert!(headers
            .to_ascii_lowercase()
            .contains("authorization: bearer secret-key"));
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        let parts = &v["messages"][0]["content"];
        assert_eq!(parts[0]["text"], DESCRIBE_PROMPT);
        assert!(parts[1]["image_url"]["url"]
            .as_str()
            .unwrap()
            .starts_with("data:image/png;base64,iVBOR"));
    }
}

#[test]
fn transient_failures_are_retried() {
    let m = mock(|n| if n < 3 { 500 } else { 200 });
    let store = prebake(&scene(), &one_anchor(), &small(), &client(&m.url), &opts(1)).unwrap();
    assert_eq!(store.len(), 8);
    assert_eq!(m.hits.load(Ordering::SeqCst), 11);
}

#[test]
fn persistent_failure_gives_up_after_four_attempts() {
    let m = mock(|_| 500);
    match prebake(&scene(), &one_anchor(), &small(), &client(&m.url), &opts(1)) {
        Err(PrebakeError::Backend {
            view,
            attempts,
            partial,
            cause,
        }) => {
            assert_eq!((view.anchor_index, view.yaw()), (0, 0));
            assert_eq!(attempts, 4);
            assert!(partial.is_empty());
            assert!(cause.contains("500"), "{cause}");
        }
        other => panic!("expected backend error, got {other:?}"),
    }
    assert_eq!(m.hits.load(Ordering::SeqCst), 4);
}

#[test]
fn later_failure_keeps_finished_views() {
    // views 0..3 succeed, everything after fails
    let m = mock(|n| if n < 3 { 200 } else { 500 });
    match prebake(&scene(), &one_anchor(), &small(), &client(&m.url), &opts(1)) {
        Err(PrebakeError::Backend { view, partial, .. }) => {
            assert_eq!(view.yaw(), 135);
            assert_eq!(partial.len(), 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unreachable_endpoint_is_a_backend_error() {
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let url = format!("http://127.0.0.1:{port}/v1/chat/completions");
    match prebake(&scene(), &one_anchor(), &small(), &client(&url), &opts(4)) {
        Err(PrebakeError::Backend {
            attempts, partial, ..
        }) => {
            assert_eq!(attempts, 4);
            assert!(partial.is_empty());
        }
        other => panic!("{other:?}"),
    }
}
