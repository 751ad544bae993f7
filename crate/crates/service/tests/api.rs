use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use pennant_core::{build_index, build_pennant, emit_json, CoMentionIndex, DocumentRecord, Mode, PennantConfig};
use pennant_service::{router, AppState, ServiceConfig};
use pennant_testkit::corpus6;
use serde_json::{json, Value};
use tower::ServiceExt;

fn corpus6_records() -> Vec<DocumentRecord> {
    corpus6()
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut r = DocumentRecord::new(d.id);
            r.title = Some(format!("Doc {}", i + 1));
            r.year = Some(2000 + i as i64);
            r.descriptors = if i % 2 == 0 { vec!["t1".into(), "t2".into()] } else { vec!["t2".into()] };
            r.references = d.references;
            r
        })
        .collect()
}

fn citation() -> CoMentionIndex {
    build_index(&corpus6_records(), Mode::Citation).unwrap()
}

fn app(indexes: Vec<CoMentionIndex>) -> Router {
    let state = Arc::new(AppState::new(indexes, PennantConfig::default(), 1000).unwrap());
    let config = ServiceConfig::new(SocketAddr::from(([127, 0, 0, 1], 0)), vec![]);
    router(state, &config).unwrap()
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    let resp = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(body.to_vec()).unwrap())
}

fn json_of(body: &str) -> Value {
    serde_json::from_str(body).unwrap()
}

#[tokio::test]
async fn stats_single_index() {
    let app = app(vec![citation()]);
    let (status, body) = get(&app, "/api/stats").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        json_of(&body),
        json!({"modes":["citation"],"citation":{"n_docs":6,"n_keys":4},"index_version":1})
    );
    assert_eq!(get(&app, "/api/stats").await.1, body);
}

#[tokio::test]
async fn stats_two_indexes() {
    let desc = build_index(&corpus6_records(), Mode::Descriptor).unwrap();
    let app = app(vec![citation(), desc]);
    let v = json_of(&get(&app, "/api/stats").await.1);
    assert_eq!(v["modes"], json!(["citation", "descriptor"]));
    assert_eq!(v["descriptor"], json!({"n_docs":6,"n_keys":2}));
    let (status, body) = get(&app, "/api/pennant?seed=t1&mode=descriptor").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json_of(&body)["points"][0]["id"], "t2");
}

#[tokio::test]
async fn pennant_fixture() {
    let app = app(vec![citation()]);
    let (status, body) = get(&app, "/api/pennant?seed=S&mode=citation").await;
    assert_eq!(status, StatusCode::OK);
    let v = json_of(&body);
    let ids: Vec<_> = v["points"].as_array().unwrap().iter().map(|p| p["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["A", "B", "C"]);
    let expect = build_pennant(&citation(), "S", &PennantConfig::default()).unwrap();
    assert_eq!(body, emit_json(&expect));
}

#[tokio::test]
async fn pennant_parameters_are_applied() {
    let app = app(vec![citation()]);
    let (_, body) = get(&app, "/api/pennant?seed=S&min_tf=2&k=1&log_base=10&idf_style=inverse_df&sectors=-0.5,-0.1").await;
    let v = json_of(&body);
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(v["config"]["log_base"], json!(10.0));
    assert_eq!(v["config"]["idf_style"], "inverse_df");
    assert_eq!(v["sector_bounds"], json!([-0.5, -0.1]));
}

#[tokio::test]
async fn pennant_seed_is_normalized() {
    let app = app(vec![citation()]);
    let (status, _) = get(&app, "/api/pennant?seed=%20S%20").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn pennant_errors() {
    let app = app(vec![citation()]);
    let cases = [
        ("/api/pennant?seed=NOPE&mode=citation", StatusCode::NOT_FOUND),
        ("/api/pennant?mode=citation", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&k=1001", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&k=0", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&k=ten", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&min_tf=-1", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&log_base=x", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&log_base=1", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&idf_style=raw", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&sectors=2,1", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&mode=descriptor", StatusCode::BAD_REQUEST),
        ("/api/pennant?seed=S&mode=author", StatusCode::BAD_REQUEST),
        ("/api/nothing", StatusCode::NOT_FOUND),
    ];
    for (uri, expect) in cases {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, expect, "{uri}");
        assert!(json_of(&body)["error"].is_string(), "{uri}: {body}");
    }
    let (_, body) = get(&app, "/api/pennant?seed=NOPE").await;
    assert_eq!(json_of(&body), json!({"error":"seed not found"}));
}

#[tokio::test]
async fn wrong_method_is_json() {
    let app = app(vec![citation()]);
    let resp = app
        .oneshot(Request::post("/api/stats").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::METHOD_NOT_ALLOWED);
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    assert!(json_of(std::str::from_utf8(&body).unwrap())["error"].is_string());
}

#[tokio::test]
async fn mention_detail() {
    let app = app(vec![citation()]);
    let (status, body) = get(&app, "/api/mention/C?mode=citation").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        json_of(&body),
        json!({"id":"C","df":2,"sample_citing_docs":[
            {"doc_id":"d5","title":"Doc 5","year":2004},
            {"doc_id":"d6","title":"Doc 6","year":2005}
        ]})
    );
    let (status, body) = get(&app, "/api/mention/ZZZ").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(json_of(&body)["error"].is_string());
}

#[tokio::test]
async fn mention_sample_is_truncated() {
    let records: Vec<_> = (0..30)
        .map(|i| {
            let mut r = DocumentRecord::new(format!("d{i:02}"));
            r.references = vec!["POPULAR".into()];
            r
        })
        .collect();
    let app = app(vec![build_index(&records, Mode::Citation).unwrap()]);
    let v = json_of(&get(&app, "/api/mention/POPULAR").await.1);
    assert_eq!(v["df"], 30);
    let docs = v["sample_citing_docs"].as_array().unwrap();
    assert_eq!(docs.len(), 20);
    assert_eq!(docs[0]["doc_id"], "d00");
    assert_eq!(docs[19]["doc_id"], "d19");
}

#[test]
fn resolve_config_defaults() {
    let state = AppState::new(vec![citation()], PennantConfig { k: 7, ..PennantConfig::default() }, 1000).unwrap();
    let c = state.resolve_config(&HashMap::new()).unwrap();
    assert_eq!(c.k, 7);
    assert_eq!(c.mode, Mode::Citation);
}

#[test]
fn duplicate_modes_rejected() {
    assert!(AppState::new(vec![citation(), citation()], PennantConfig::default(), 1000).is_err());
    assert!(AppState::new(vec![], PennantConfig::default(), 1000).is_err());
}

#[tokio::test]
async fn static_files_and_cors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_path_buf();
    std::fs::write(dir.join("index.html"), "<html>explorer</html>").unwrap();
    let state = Arc::new(AppState::new(vec![citation()], PennantConfig::default(), 1000).unwrap());
    let mut config = ServiceConfig::new(SocketAddr::from(([127, 0, 0, 1], 0)), vec![]);
    config.static_dir = Some(dir.clone());
    config.cors_origin = Some("http://localhost:5173".into());
    let app = router(state, &config).unwrap();
    let (status, body) = get(&app, "/index.html").await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("explorer"));
    let resp = app
        .oneshot(
            Request::get("/api/stats")
                .header("origin", "http://localhost:5173")
                .body(Body::empty())
                .unwrap(),
        )
        .await
        .unwrap();
    assert_eq!(
        resp.headers().get("access-control-allow-origin").unwrap(),
        "http://localhost:5173"
    );
}
