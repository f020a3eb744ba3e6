use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tabaudit::evaluation::inject_errors;
use tabaudit::evaluation::synth::{employees, employees_plan};
use tabaudit_cli::commands::{self, RunArgs};
use tabaudit_cli::server::{router, AppState};
use tabaudit_cli::SessionOptions;
use tower::ServiceExt;

fn options() -> SessionOptions {
    SessionOptions {
        budget: 70,
        seed: 3,
        embedding_dim: 8,
        trees: 9,
        ..SessionOptions::default()
    }
}

fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let (dirty, truth) = inject_errors(&employees(150, 3), &employees_plan(3)).unwrap();
    let (d, c) = (dir.join("dirty.csv"), dir.join("clean.csv"));
    dirty.save_csv(&d).unwrap();
    truth.table().save_csv(&c).unwrap();
    (d, c)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call_raw(app, method, uri, body.map(|b| b.to_string())).await;
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).expect("JSON body") };
    (status, value)
}

async fn call_raw(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn create(app: &Router, dirty: &Path, clean: &Path) -> String {
    let body = json!({
        "data_path": dirty,
        "ground_truth_path": clean,
        "config": options(),
    });
    let (status, v) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["session_id"].as_str().unwrap().to_string()
}

/// Answers a batch from the clean table, the way the oracle would.
fn oracle_answers(batch: &Value, clean: &tabaudit::Table) -> Value {
    let labels: Vec<Value> = batch["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let (row, col) = (c["row"].as_u64().unwrap() as usize, c["col"].as_u64().unwrap() as usize);
            let err = c["value"].as_str().unwrap() != clean.get(row, col);
            json!({"row": row, "col": col, "label": if err { "erroneous" } else { "correct" }})
        })
        .collect();
    json!({ "labels": labels })
}

#[tokio::test]
async fn oracle_script_over_http_matches_the_cli_report() {
    let dir = tempfile::tempdir().unwrap();
    let (dirty, clean) = write_fixture(dir.path());
    let clean_table = tabaudit::load_csv(&clean, true).unwrap();
    let app = router(Arc::new(AppState::new(None)));
    let id = create(&app, &dirty, &clean).await;

    let mut batches = 0;
    loop {
        let (status, batch) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
        assert_eq!(status, StatusCode::OK);
        if batch["finished"].as_bool().unwrap() {
            assert!(batch["cells"].as_array().unwrap().is_empty());
            break;
        }
        let cells = batch["cells"].as_array().unwrap();
        assert!(!cells.is_empty());
        assert_eq!(cells[0]["tuple"].as_array().unwrap().len(), 8);
        let (status, v) = call(&app, "POST", &format!("/sessions/{id}/labels"), Some(oracle_answers(&batch, &clean_table))).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        batches += 1;
    }
    assert!(batches > 5);

    let (status, http_report) = call_raw(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_eq!(status, StatusCode::OK);

    let report_path = dir.path().join("report.json");
    let args = RunArgs {
        data: dirty,
        ground_truth: clean,
        report: report_path.clone(),
        run_log: None,
        snapshot: None,
        curve_csv: None,
        no_header: false,
        session: options(),
    };
    commands::run(&args).unwrap();
    let cli_report = std::fs::read(&report_path).unwrap();
    assert_eq!(String::from_utf8(http_report).unwrap(), String::from_utf8(cli_report).unwrap());

    let (status, result) = call(&app, "GET", &format!("/sessions/{id}/result"), None).await;
    assert_eq!(status, StatusCode::OK);
    let flagged = result.as_array().unwrap();
    assert!(!flagged.is_empty());
    assert!(flagged.iter().all(|c| c["row"].is_u64() && c["labeled"].is_boolean()));

    let (status, explained) = call(&app, "GET", &format!("/sessions/{id}/explain?row=0&col=4"), None).await;
    assert_eq!(status, StatusCode::OK, "{explained}");
    assert!(explained["rendered"].as_str().unwrap().starts_with("IF") || explained["rendered"].as_str().unwrap().contains("THEN"));

    let (status, st) = call(&app, "GET", &format!("/sessions/{id}/status"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(st["stage"]["stage"], "finished");
    assert_eq!(st["labels_used"], st["budget"].as_u64().unwrap() - st["remaining_budget"].as_u64().unwrap());
}

#[tokio::test]
async fn batch_is_idempotent_and_labels_are_not_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let (dirty, clean) = write_fixture(dir.path());
    let clean_table = tabaudit::load_csv(&clean, true).unwrap();
    let app = router(Arc::new(AppState::new(None)));
    let id = create(&app, &dirty, &clean).await;

    let (_, first) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
    let (_, second) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
    assert_eq!(first, second);

    let answers = oracle_answers(&first, &clean_table);
    let mut partial = answers.clone();
    partial["labels"].as_array_mut().unwrap().pop();
    let (status, err) = call(&app, "POST", &format!("/sessions/{id}/labels"), Some(partial)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"], "label_mismatch");

    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/labels"), Some(answers.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let (status, err) = call(&app, "POST", &format!("/sessions/{id}/labels"), Some(answers)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(err["message"].is_string());
}

#[tokio::test]
async fn unknown_sessions_and_bad_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let (dirty, clean) = write_fixture(dir.path());
    let app = router(Arc::new(AppState::new(None)));

    for (method, uri) in [
        ("GET", "/sessions/nope/batch"),
        ("GET", "/sessions/nope/status"),
        ("GET", "/sessions/nope/report"),
        ("GET", "/sessions/nope/result"),
        ("DELETE", "/sessions/nope"),
    ] {
        let (status, v) = call(&app, method, uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{method} {uri}");
        assert_eq!(v["error"], "not_found");
    }

    let (status, v) = call_raw(&app, "POST", "/sessions", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{}", String::from_utf8_lossy(&v));
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"config": {"budget": 50}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({"data_path": dirty, "config": {"budget": 5}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "config");

    let id = create(&app, &dirty, &clean).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/labels"), Some(json!({"labels": "x"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/explain?row=zero"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}/explain?row=0&col=0"), None).await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");

    let (status, _) = call(&app, "DELETE", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn snapshots_persist_and_restore_into_a_new_session() {
    let dir = tempfile::tempdir().unwrap();
    let (dirty, clean) = write_fixture(dir.path());
    let clean_table = tabaudit::load_csv(&clean, true).unwrap();
    let snaps = dir.path().join("snaps");
    std::fs::create_dir(&snaps).unwrap();
    let app = router(Arc::new(AppState::new(Some(snaps.clone()))));
    let id = create(&app, &dirty, &clean).await;
    for _ in 0..3 {
        let (_, batch) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
        call(&app, "POST", &format!("/sessions/{id}/labels"), Some(oracle_answers(&batch, &clean_table))).await;
    }
    let (_, expected) = call(&app, "GET", &format!("/sessions/{id}/batch"), None).await;
    let snap = snaps.join(format!("{id}.json"));
    assert!(snap.exists());

    let body = json!({"data_path": dirty, "ground_truth_path": clean, "snapshot_path": snap});
    let (status, v) = call(&app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    let resumed = v["session_id"].as_str().unwrap();
    let (_, got) = call(&app, "GET", &format!("/sessions/{resumed}/batch"), None).await;
    assert_eq!(got, expected);
}
