use std::sync::{Arc, RwLock};

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use ontorel_adjudication::{router, AdjudicationStore, QuorumPolicy, SharedStore};
use ontorel_core::{CandidatePair, LabeledPair, RelationLabel};
use serde_json::{json, Value};
use tower::ServiceExt;

fn candidate(id: &str, a: &str, b: &str) -> CandidatePair {
    CandidatePair {
        pair_id: id.into(),
        topic_a: a.into(),
        topic_b: b.into(),
        source: "ieee".into(),
        context: format!("altLabel of {id}"),
    }
}

fn setup(dir: &std::path::Path, assets: Option<std::path::PathBuf>) -> (Router, SharedStore) {
    let mut store = AdjudicationStore::open(dir, QuorumPolicy::default()).unwrap();
    store
        .enqueue(&[
            candidate("ieee:alt:00000", "5G mobile communication", "4G mobile communication"),
            candidate("ieee:alt:00001", "abstract algebra", "algebraic structure"),
        ])
        .unwrap();
    let shared = Arc::new(RwLock::new(store));
    (router(shared.clone(), assets), shared)
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, String) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(body.to_vec()).unwrap())
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

fn post_json(uri: &str, v: Value) -> Request<Body> {
    Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(v.to_string()))
        .unwrap()
}

#[tokio::test]
async fn queue_verdict_progress_export() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = setup(dir.path(), None);

    let (status, body) = call(&app, get("/api/queue/next?annotator=alice")).await;
    assert_eq!(status, StatusCode::OK);
    let card: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(card["pair_id"], "ieee:alt:00000");
    assert_eq!(card["topic_a"], "5G mobile communication");
    assert_eq!(card["topic_b"], "4G mobile communication");
    assert_eq!(card["context"], "altLabel of ieee:alt:00000");
    assert_eq!(card["status"], "pending");

    for who in ["alice", "bob"] {
        let (status, body) = call(
            &app,
            post_json(
                "/api/verdicts",
                json!({"pair_id": "ieee:alt:00000", "annotator": who, "decision": "accept", "note": null}),
            ),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
        let expected = if who == "alice" { "pending" } else { "accepted" };
        assert_eq!(serde_json::from_str::<Value>(&body).unwrap(), json!({"status": expected}));
    }
    let (_, body) = call(
        &app,
        post_json(
            "/api/verdicts",
            json!({"pair_id": "ieee:alt:00001", "annotator": "alice", "decision": "reject", "note": "different scope"}),
        ),
    )
    .await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["status"], "pending");

    let (status, _) = call(&app, get("/api/queue/next?annotator=alice")).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (_, body) = call(&app, get("/api/queue/next?annotator=carol")).await;
    assert_eq!(serde_json::from_str::<Value>(&body).unwrap()["pair_id"], "ieee:alt:00001");

    let (_, body) = call(&app, get("/api/progress")).await;
    assert_eq!(
        serde_json::from_str::<Value>(&body).unwrap(),
        json!({"pending": 1, "accepted": 1, "rejected": 0, "total": 2})
    );

    let (status, body) = call(&app, get("/api/export")).await;
    assert_eq!(status, StatusCode::OK);
    let pairs: Vec<LabeledPair> = body.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0].label, RelationLabel::SameAs);
    assert_eq!(pairs[0].topic_b, "4G mobile communication");

    let log = std::fs::read_to_string(dir.path().join("verdicts.jsonl")).unwrap();
    assert!(log.contains("\"note\":\"different scope\""));
}

#[tokio::test]
async fn bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = setup(dir.path(), None);
    let (status, _) = call(&app, get("/api/queue/next")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(
        &app,
        post_json("/api/verdicts", json!({"pair_id": "nope", "annotator": "a", "decision": "accept"})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(
        &app,
        post_json("/api/verdicts", json!({"pair_id": "ieee:alt:00000", "annotator": "a", "decision": "maybe"})),
    )
    .await;
    assert!(status.is_client_error());
    let (status, _) = call(
        &app,
        post_json("/api/verdicts", json!({"pair_id": "ieee:alt:00000", "annotator": " ", "decision": "skip"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn serves_ui_assets() {
    let dir = tempfile::tempdir().unwrap();
    let assets = tempfile::tempdir().unwrap();
    std::fs::write(assets.path().join("index.html"), "<!doctype html><title>review</title>").unwrap();
    std::fs::write(assets.path().join("app.js"), "console.log('hi')").unwrap();
    let (app, _) = setup(dir.path(), Some(assets.path().to_path_buf()));
    let (status, body) = call(&app, get("/")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("<title>review</title>"));
    let (status, body) = call(&app, get("/app.js")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("console.log"));
    let (status, _) = call(&app, get("/api/progress")).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, get("/missing.css")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn progress_survives_reload() {
    let dir = tempfile::tempdir().unwrap();
    let before = {
        let (app, _) = setup(dir.path(), None);
        call(
            &app,
            post_json("/api/verdicts", json!({"pair_id": "ieee:alt:00001", "annotator": "a", "decision": "reject"})),
        )
        .await;
        call(
            &app,
            post_json("/api/verdicts", json!({"pair_id": "ieee:alt:00001", "annotator": "b", "decision": "reject"})),
        )
        .await;
        call(&app, get("/api/progress")).await.1
    };
    let (app, _) = setup(dir.path(), None);
    let after = call(&app, get("/api/progress")).await.1;
    assert_eq!(before, after);
    assert_eq!(serde_json::from_str::<Value>(&after).unwrap()["rejected"], 1);
}
