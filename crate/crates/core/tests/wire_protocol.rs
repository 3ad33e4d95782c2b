//! The remote backend against an in-process stub of `POST /v1/generate`.

use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use simplikit_core::gateway::{
    prompt_method, Backend, BackendSpec, Gateway, GatewayError, GeneratorRequest, Provenance, RegistryConfig,
    RemoteBackend, WireCandidate, WireRequest, WireResponse, PROMPT_PREFIX, PROMPT_SUFFIX,
};
use simplikit_core::syntax::token_equal;

const CREATE: &str = "public String create() {\n    String token = UUID.randomUUID().toString();\n    return token;\n}\n";
const CREATE_SIMPLIFIED: &str = "public String create() {\n    return UUID.randomUUID().toString();\n}\n";

#[derive(Clone, Copy)]
enum Mode {
    Normal,
    Status500,
    Garbage,
    Slow,
}

struct Stub {
    url: String,
    seen: Arc<Mutex<Vec<serde_json::Value>>>,
}

/// Answers the `create` prompt with its simplification and anything else
/// with `beam_size + 2` numbered variants, so truncation is observable.
fn respond(req: &WireRequest) -> WireResponse {
    let method = prompt_method(&req.prompt).unwrap_or("");
    if token_equal(method, CREATE) {
        return WireResponse {
            candidates: vec![
                WireCandidate {
                    text: CREATE_SIMPLIFIED.into(),
                    score: -0.1,
                },
                WireCandidate {
                    text: CREATE.into(),
                    score: -0.5,
                },
            ],
        };
    }
    WireResponse {
        candidates: (0..req.beam_size + 2)
            .map(|i| WireCandidate {
                text: format!("int v{i}() {{\n    return {i};\n}}\n"),
                score: -(i as f64),
            })
            .collect(),
    }
}

fn start(mode: Mode) -> Stub {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}", server.server_addr().to_ip().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for mut rq in server.incoming_requests() {
            let mut body = String::new();
            rq.as_reader().read_to_string(&mut body).unwrap();
            let value: serde_json::Value = serde_json::from_str(&body).unwrap_or(serde_json::Value::Null);
            log.lock().unwrap().push(value);
            let ok = rq.url() == "/v1/generate" && *rq.method() == tiny_http::Method::Post;
            let reply = match (mode, serde_json::from_str::<WireRequest>(&body)) {
                _ if !ok => tiny_http::Response::from_string("not found").with_status_code(404),
                (Mode::Status500, _) => tiny_http::Response::from_string("boom").with_status_code(500),
                (Mode::Garbage, _) => tiny_http::Response::from_string("{\"candidates\": 3}"),
                (Mode::Slow, _) => {
                    thread::sleep(Duration::from_millis(1500));
                    tiny_http::Response::from_string("{\"candidates\": []}")
                }
                (Mode::Normal, Ok(req)) => {
                    tiny_http::Response::from_string(serde_json::to_string(&respond(&req)).unwrap())
                }
                (Mode::Normal, Err(_)) => tiny_http::Response::from_string("bad request").with_status_code(400),
            };
            let _ = rq.respond(reply);
        }
    });
    Stub { url, seen }
}

fn remote(url: &str) -> RemoteBackend {
    RemoteBackend::new(url, Duration::from_secs(5))
}

#[test]
fn request_body_follows_the_wire_schema() {
    let stub = start(Mode::Normal);
    let mut req = GeneratorRequest::new("remote", CREATE, 4);
    req.max_len = 77;
    remote(&stub.url).generate(&req).unwrap();
    let seen = stub.seen.lock().unwrap();
    let body = seen[0].as_object().unwrap();
    let mut keys: Vec<&str> = body.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["beam_size", "max_len", "prompt"]);
    assert_eq!(body["prompt"], format!("{PROMPT_PREFIX}{CREATE}{PROMPT_SUFFIX}"));
    assert_eq!(body["beam_size"], 4);
    assert_eq!(body["max_len"], 77);
}

#[test]
fn beam_bounds_the_candidate_count() {
    let stub = start(Mode::Normal);
    let backend = remote(&stub.url);
    for k in [1, 3, 10] {
        let set = backend
            .generate(&GeneratorRequest::new("remote", "int f() {\n    return 0;\n}\n", k))
            .unwrap();
        assert!(set.len() <= k, "beam {k} gave {}", set.len());
        for c in &set.candidates {
            assert!(c.score.is_some());
            assert_eq!(c.provenance, Provenance::Neural);
            assert!(!c.text.is_empty());
        }
    }
}

#[test]
fn stub_reproduces_the_inlined_return_deterministically() {
    let stub = start(Mode::Normal);
    let mut gw = Gateway::default();
    gw.register("remote", Box::new(remote(&stub.url)));
    let req = GeneratorRequest::new("remote", CREATE, 5);
    let runs: Vec<_> = (0..3).map(|_| gw.generate(&req).unwrap()).collect();
    assert!(runs[0].candidates.iter().any(|c| token_equal(&c.text, CREATE_SIMPLIFIED)));
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn registry_entries_reach_the_stub() {
    let stub = start(Mode::Normal);
    let cfg = RegistryConfig::from_toml(&format!(
        "[backends.neural]\nurl = \"{}\"\ntimeout_secs = 5\n\n[backends.rules]\nbuiltin = \"catalog\"\n",
        stub.url
    ))
    .unwrap();
    assert!(matches!(cfg.backends["neural"], BackendSpec::Remote { .. }));
    let gw = Gateway::from_config(&cfg).unwrap();
    assert!(gw.has("neural") && gw.has("rules") && gw.has("catalog"));
    let set = gw.generate(&GeneratorRequest::new("neural", CREATE, 2)).unwrap();
    assert!(token_equal(&set.candidates[0].text, CREATE_SIMPLIFIED));
}

#[test]
fn transport_failures_map_to_gateway_errors() {
    let req = GeneratorRequest::new("remote", CREATE, 2);

    let stub = start(Mode::Status500);
    assert!(matches!(remote(&stub.url).generate(&req), Err(GatewayError::Protocol(_))));

    let stub = start(Mode::Garbage);
    assert!(matches!(remote(&stub.url).generate(&req), Err(GatewayError::Protocol(_))));

    let stub = start(Mode::Slow);
    let slow = RemoteBackend::new(&stub.url, Duration::from_millis(300));
    assert!(matches!(slow.generate(&req), Err(GatewayError::Timeout(_))));

    // Bind then drop a listener to get a port nobody serves.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dead = remote(&format!("http://127.0.0.1:{port}"));
    assert!(matches!(dead.generate(&req), Err(GatewayError::Unreachable(_))));
}

#[test]
fn invalid_requests_never_reach_the_wire() {
    let stub = start(Mode::Normal);
    let backend = remote(&stub.url);
    assert!(matches!(
        backend.generate(&GeneratorRequest::new("remote", CREATE, 0)),
        Err(GatewayError::InvalidRequest(_))
    ));
    assert!(stub.seen.lock().unwrap().is_empty());
}
