//! Drives the labeling service over HTTP the way a front end would,
//! answering each batch from a known clean table.
//!
//! Starts an in-process server unless a base URL is given:
//!
//! cargo run --release -p tabaudit-cli --example labeling_client -- [http://127.0.0.1:8080]

use std::sync::Arc;

use serde_json::{json, Value};
use tabaudit::evaluation::{inject_errors, synth};
use tabaudit_cli::server::{router, AppState};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = match std::env::args().nth(1) {
        Some(url) => url,
        None => {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
            let addr = listener.local_addr()?;
            tokio::spawn(async move { axum::serve(listener, router(Arc::new(AppState::new(None)))).await });
            format!("http://{addr}")
        }
    };

    let clean = synth::employees(300, 5);
    let (dirty, _) = inject_errors(&clean, &synth::employees_plan(5))?;
    let client = reqwest::Client::new();
    let created: Value = client
        .post(format!("{base}/sessions"))
        .json(&json!({
            "csv": dirty.to_csv_string(),
            "ground_truth_csv": clean.to_csv_string(),
            "config": {"budget": 200, "strategy": "mc", "seed": 5},
        }))
        .send()
        .await?
        .error_for_status()?
        .json()
        .await?;
    let id = created["session_id"].as_str().ok_or("no session id")?.to_string();
    println!("session {id}: {} rows, columns {}", created["rows"], created["schema"]);

    loop {
        let batch: Value = client.get(format!("{base}/sessions/{id}/batch")).send().await?.json().await?;
        if batch["finished"].as_bool() == Some(true) {
            break;
        }
        let cells = batch["cells"].as_array().ok_or("no cells")?;
        let labels: Vec<Value> = cells
            .iter()
            .map(|c| {
                let (row, col) = (c["row"].as_u64().unwrap() as usize, c["col"].as_u64().unwrap() as usize);
                let wrong = c["value"].as_str() != Some(clean.get(row, col));
                json!({"row": row, "col": col, "label": if wrong { "erroneous" } else { "correct" }})
            })
            .collect();
        let res = client
            .post(format!("{base}/sessions/{id}/labels"))
            .json(&json!({ "labels": labels }))
            .send()
            .await?;
        let status = res.status();
        let body: Value = res.json().await?;
        if !status.is_success() {
            return Err(format!("labels rejected: {body}").into());
        }
        if body["trained"].as_bool() == Some(true) {
            println!(
                "{:<14} {:>2} cells of {:<12} -> labels {:>3}, F1 {:.3}",
                batch["phase"].as_str().unwrap_or(""),
                cells.len(),
                batch["column_name"].as_str().unwrap_or(""),
                body["labels_used"],
                body["global"]["f1"].as_f64().unwrap_or(0.0)
            );
        }
    }

    // Submitting again after the end is a conflict, not a crash.
    let res = client
        .post(format!("{base}/sessions/{id}/labels"))
        .json(&json!({"labels": []}))
        .send()
        .await?;
    println!("late submission: {} {}", res.status(), res.text().await?);

    let report: Value = client.get(format!("{base}/sessions/{id}/report")).send().await?.json().await?;
    println!("final F1 {} with {} labels", report["final_f1"], report["labels_used"]);
    let flagged: Value = client.get(format!("{base}/sessions/{id}/result")).send().await?.json().await?;
    println!("{} cells flagged", flagged.as_array().map_or(0, Vec::len));
    client.delete(format!("{base}/sessions/{id}")).send().await?.error_for_status()?;
    Ok(())
}
