use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use oppenheim_core::games::{replay, BobRandom, GameState, Move, Strategy};
use oppenheim_service::{router, AppState, Config, SessionView};
use serde_json::{json, Value};
use tower::ServiceExt;

fn config(dir: &std::path::Path) -> Config {
    Config {
        data_dir: dir.to_path_buf(),
        workers: 2,
        ..Config::default()
    }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>, key: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(k) = key {
        req = req.header("idempotency-key", k);
    }
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(serde_json::to_vec(&b).unwrap())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, v)
}

fn haw(beta: f64) -> Value {
    json!({"kind": {"variant": {"type": "haw", "beta": beta}, "dimension": 1}})
}

async fn wait_job(app: &Router, id: &str) -> Value {
    for _ in 0..2000 {
        let (s, v) = call(app, "GET", &format!("/jobs/{id}"), None, None).await;
        assert_eq!(s, StatusCode::OK);
        if v["status"] == "done" || v["status"] == "failed" {
            return v;
        }
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
    panic!("job {id} did not finish");
}

fn bob_move(view: &SessionView, seed: u64) -> Move {
    BobRandom { seed }.next_move(&view.state).unwrap().expect("bob finds a move")
}

#[tokio::test]
async fn create_and_fetch_haw_session() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (s, v) = call(&app, "POST", "/sessions", Some(haw(0.2)), None).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = v["id"].as_str().unwrap();
    // The dummy Alice engine has already placed its slab.
    assert_eq!(v["to_move"], "bob");
    assert_eq!(v["transcript"]["records"].as_array().unwrap().len(), 1);
    let (s, got) = call(&app, "GET", &format!("/sessions/{id}"), None, None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(got, v);
}

#[tokio::test]
async fn invalid_hpw_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let req = json!({"kind": {"variant": {"type": "hpw", "beta": 0.25}, "dimension": 1}});
    let (s, v) = call(&app, "POST", "/sessions", Some(req), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["rule"], "parameter-range");
    assert!(v["message"].as_str().unwrap().contains("β₀(1)=1/5"), "{v}");
    assert!(v.get("detail").is_some());
}

#[tokio::test]
async fn malformed_body_and_wrong_side() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (s, v) = call(&app, "POST", "/sessions", Some(json!({"kind": 3})), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["rule"], "malformed-request");
    let mut req = haw(0.2);
    req["engine"] = json!({"strategy": "random_bob", "seed": 1});
    let (s, v) = call(&app, "POST", "/sessions", Some(req), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["rule"], "strategy-side");
}

#[tokio::test]
async fn duplicate_idempotency_key_returns_same_session() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (s1, a) = call(&app, "POST", "/sessions", Some(haw(0.2)), Some("k-1")).await;
    let (s2, b) = call(&app, "POST", "/sessions", Some(haw(0.2)), Some("k-1")).await;
    let (_, c) = call(&app, "POST", "/sessions", Some(haw(0.2)), Some("k-2")).await;
    assert_eq!((s1, s2), (StatusCode::CREATED, StatusCode::OK));
    assert_eq!(a["id"], b["id"]);
    assert_ne!(a["id"], c["id"]);
}

#[tokio::test]
async fn legal_bob_move_gets_engine_reply() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (_, v) = call(&app, "POST", "/sessions", Some(haw(0.2)), None).await;
    let id = v["id"].as_str().unwrap().to_string();
    let mv = json!({"type": "bob_ball", "ball": {"center": [0.0], "radius": 0.5}});
    let (s, r) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(mv), None).await;
    assert_eq!(s, StatusCode::OK, "{r}");
    assert_eq!(r["record"]["verdict"]["accepted"], true);
    assert_eq!(r["reply"]["player"], "alice");
    assert_eq!(r["reply"]["move"]["type"], "alice_slabs");
    assert_eq!(r["session"]["to_move"], "bob");
}

#[tokio::test]
async fn small_bob_ball_is_a_radius_ratio_violation() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (_, v) = call(&app, "POST", "/sessions", Some(haw(0.2)), None).await;
    let id = v["id"].as_str().unwrap().to_string();
    let mv = json!({"type": "bob_ball", "ball": {"center": [0.0], "radius": 0.1}});
    let (s, r) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(mv), None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r["rule"], "radius-ratio");
    assert_eq!(r["detail"]["record"]["verdict"]["rule"], "radius-ratio");
    // The rejection is part of the transcript, and the state is unchanged.
    let (_, g) = call(&app, "GET", &format!("/sessions/{id}"), None, None).await;
    assert_eq!(g["transcript"]["records"].as_array().unwrap().len(), 2);
    assert_eq!(g["state"]["history"].as_array().unwrap().len(), 1);
    // Moving for the engine's side is refused without being recorded.
    let alice = json!({"type": "alice_slabs", "slabs": []});
    let (s, r) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(alice), None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r["rule"], "turn-order");
}

#[tokio::test]
async fn finished_session_conflicts_and_unknown_session_is_404() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let (_, v) = call(&app, "POST", "/sessions", Some(haw(0.2)), None).await;
    let id = v["id"].as_str().unwrap().to_string();
    let resign = json!({"type": "resign", "player": "bob"});
    let (s, r) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(resign.clone()), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(r["session"]["is_over"], true);
    let (s, r) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(resign), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(r["rule"], "game-over");
    let (s, r) = call(&app, "GET", "/sessions/nope", None, None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(r["rule"], "not-found");
    let (s, _) = call(&app, "POST", "/sessions/nope/moves", Some(json!({"type": "resign", "player": "bob"})), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "GET", "/jobs/nope", None, None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn jobs_match_direct_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let open = json!({"lo": -0.5, "hi": 0.5, "lo_open": true, "hi_open": true});
    let count = json!({"kind": "count", "params": {"form": "q0", "interval": open, "t": 10.0}});
    let four = json!({"kind": "fourterm", "params": {
        "M": 1, "alpha": 2.0, "beta_coef": 1.0, "theta1": 0.0, "theta2": 0.0, "delta": 0.1}});
    let mut bad = four.clone();
    bad["params"]["alpha"] = json!(1.0);
    let huge = json!({"kind": "count", "params": {"form": "ternary-sqrt2", "interval": open, "t": 1.0e6}});

    let mut ids = vec![];
    for spec in [&count, &four, &bad, &huge, &count] {
        let (s, v) = call(&app, "POST", "/jobs", Some(spec.clone()), None).await;
        assert_eq!(s, StatusCode::ACCEPTED);
        ids.push(v["id"].as_str().unwrap().to_string());
    }
    let done: Vec<Value> = wait_all(&app, &ids).await;
    assert_eq!(done[0]["result"], json!({"count": 41}));
    assert_eq!(done[1]["result"], json!({"count": 6}));
    assert_eq!(done[2]["status"], "failed");
    assert_eq!(done[2]["error"]["rule"], "alpha");
    assert!(done[2]["error"]["message"].as_str().unwrap().contains("alpha ∉ {0,1}"));
    assert_eq!(done[3]["status"], "failed");
    assert_eq!(done[3]["error"]["rule"], "budget-exceeded");
    // Re-running a finished job gives an equal result.
    assert_eq!(done[4]["result"], done[0]["result"]);
    assert_eq!(done[0]["kind"], "count");
    assert_eq!(done[0]["params"]["form"], "q0");
}

async fn wait_all(app: &Router, ids: &[String]) -> Vec<Value> {
    let mut out = vec![];
    for id in ids {
        out.push(wait_job(app, id).await);
    }
    out
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn job_idempotency_key() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let spec = json!({"kind": "correspond", "params": {"lattice": "golden", "s": 0.4472135954999579, "R": 50.0, "T": 2.0, "dt": 0.05}});
    let (s1, a) = call(&app, "POST", "/jobs", Some(spec.clone()), Some("j")).await;
    let (s2, b) = call(&app, "POST", "/jobs", Some(spec), Some("j")).await;
    assert_eq!((s1, s2), (StatusCode::ACCEPTED, StatusCode::OK));
    assert_eq!(a["id"], b["id"]);
    let v = wait_job(&app, a["id"].as_str().unwrap()).await;
    assert_eq!(v["status"], "done");
    assert!(v["result"]["orbit_gap"].as_f64().unwrap() >= 0.0);
}

async fn play_bob(app: &Router, id: &str, seed: u64, moves: usize) {
    for _ in 0..moves {
        let (_, v) = call(app, "GET", &format!("/sessions/{id}"), None, None).await;
        let view: SessionView = serde_json::from_value(v).unwrap();
        if view.is_over {
            return;
        }
        let mv = bob_move(&view, seed);
        let (s, r) = call(app, "POST", &format!("/sessions/{id}/moves"), Some(serde_json::to_value(&mv).unwrap()), None).await;
        assert_eq!(s, StatusCode::OK, "{r}");
    }
}

fn assert_replays(view: &SessionView) {
    let replayed: GameState = replay(&view.transcript).expect("transcript replays");
    assert_eq!(serde_json::to_value(&replayed).unwrap(), serde_json::to_value(&view.state).unwrap());
}

#[tokio::test]
async fn transcript_replays_to_stored_state() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let req = json!({
        "kind": {"variant": {"type": "hpw", "beta": 0.05}, "dimension": 2},
        "engine": {"strategy": "stage_window", "tau": 1.0, "oracle": {"family": "through_center"}}
    });
    let (s, v) = call(&app, "POST", "/sessions", Some(req), None).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    let id = v["id"].as_str().unwrap().to_string();
    // One rejected move in the middle.
    play_bob(&app, &id, 7, 4).await;
    let bad = json!({"type": "bob_ball", "ball": {"center": [5.0, 5.0], "radius": 0.01}});
    let (s, _) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(bad), None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    play_bob(&app, &id, 7, 6).await;
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}"), None, None).await;
    let view: SessionView = serde_json::from_value(v.clone()).unwrap();
    assert!(view.state.round() >= 10);
    assert!(view.state.stage_data().is_some());
    assert_replays(&view);
    // The JSON of the view round-trips exactly.
    assert_eq!(serde_json::to_value(&view).unwrap(), v);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn state_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let (sid, session, jid, job);
    {
        let app = router(AppState::open(&config(dir.path())).unwrap());
        let (_, v) = call(&app, "POST", "/sessions", Some(haw(0.2)), Some("persist")).await;
        sid = v["id"].as_str().unwrap().to_string();
        play_bob(&app, &sid, 3, 5).await;
        session = call(&app, "GET", &format!("/sessions/{sid}"), None, None).await.1;
        let four = json!({"kind": "fourterm", "params": {
            "M": 4, "alpha": 2.0, "beta_coef": 1.0, "theta1": 0.0, "theta2": 0.0, "delta": 0.1}});
        let (_, j) = call(&app, "POST", "/jobs", Some(four), None).await;
        jid = j["id"].as_str().unwrap().to_string();
        job = wait_job(&app, &jid).await;
    }
    let app = router(AppState::open(&config(dir.path())).unwrap());
    assert_eq!(call(&app, "GET", &format!("/sessions/{sid}"), None, None).await.1, session);
    assert_eq!(call(&app, "GET", &format!("/jobs/{jid}"), None, None).await.1, job);
    let (s, again) = call(&app, "POST", "/sessions", Some(haw(0.2)), Some("persist")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(again["id"], sid.as_str());
    play_bob(&app, &sid, 3, 2).await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn hundred_concurrent_sessions() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::open(&config(dir.path())).unwrap());
    let mut handles = vec![];
    for i in 0..100u64 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let req = if i % 2 == 0 {
                json!({"kind": {"variant": {"type": "haw", "beta": 0.1}, "dimension": 1},
                       "engine": {"strategy": "avoid_rationals", "lo": -1.0, "hi": 1.0, "max_denominator": 12}})
            } else {
                json!({"kind": {"variant": {"type": "hpw", "beta": 0.05}, "dimension": 2},
                       "engine": {"strategy": "stage_window", "tau": 1.0,
                                  "oracle": {"family": "spread", "normal": [0.6, 0.8]}}})
            };
            let (s, v) = call(&app, "POST", "/sessions", Some(req), None).await;
            assert_eq!(s, StatusCode::CREATED);
            let id = v["id"].as_str().unwrap().to_string();
            play_bob(&app, &id, i, 12).await;
            (id, i)
        }));
    }
    let mut seen = std::collections::HashSet::new();
    for h in handles {
        let (id, i) = h.await.unwrap();
        assert!(seen.insert(id.clone()));
        let (_, v) = call(&app, "GET", &format!("/sessions/{id}"), None, None).await;
        let view: SessionView = serde_json::from_value(v).unwrap();
        assert_eq!(view.state.round(), 13, "session {i}");
        assert!(view.transcript.records.iter().all(|r| r.verdict.accepted));
        assert_replays(&view);
    }
}
