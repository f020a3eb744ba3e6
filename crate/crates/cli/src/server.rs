//! HTTP/JSON service for labeling sessions.

use std::collections::HashMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::{Body, Bytes};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tabaudit::active::{ColumnSummary, IterationSummary, Phase, Stage};
use tabaudit::active::session::SessionSnapshot;
use tabaudit::classifier::Explanation;
use tabaudit::evaluation::{ConvergencePoint, Score};
use tabaudit::report::convergence_curve;
use tabaudit::{attach_ground_truth, load_csv, CellRef, LabelSource, LabelValue, RunReport, Session, Table};

use crate::options::SessionOptions;
use crate::CliError;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id:?}"))
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<tabaudit::Error> for ApiError {
    fn from(e: tabaudit::Error) -> Self {
        use tabaudit::Error as E;
        let (status, code) = match &e {
            E::LabelMismatch(_) => (StatusCode::CONFLICT, "label_mismatch"),
            E::NotTrained(_) => (StatusCode::CONFLICT, "not_trained"),
            E::OutOfBounds { .. } => (StatusCode::BAD_REQUEST, "out_of_bounds"),
            E::Config(_) | E::BudgetExhausted(_) => (StatusCode::BAD_REQUEST, "config"),
            E::Io { .. }
            | E::Csv(_)
            | E::RaggedRows { .. }
            | E::EmptyTable
            | E::ShapeMismatch(_)
            | E::Decode(_)
            | E::VersionMismatch { .. } => (StatusCode::BAD_REQUEST, "data"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Core(e) => e.into(),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.code, "message": self.message}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct Entry {
    session: RwLock<Session>,
    created_unix: u64,
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Entry>>>,
    snapshot_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(snapshot_dir: Option<PathBuf>) -> Self {
        Self {
            sessions: RwLock::default(),
            snapshot_dir,
        }
    }

    fn get(&self, id: &str) -> ApiResult<Arc<Entry>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, id: &str, session: &Session) -> ApiResult<()> {
        if let Some(dir) = &self.snapshot_dir {
            session.snapshot().save(dir.join(format!("{id}.json")))?;
        }
        Ok(())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/batch", get(get_batch))
        .route("/sessions/{id}/labels", post(post_labels))
        .route("/sessions/{id}/status", get(get_status))
        .route("/sessions/{id}/explain", get(get_explain))
        .route("/sessions/{id}/result", get(get_result))
        .route("/sessions/{id}/report", get(get_report))
        .with_state(state)
}

/// Serves on `127.0.0.1:port` until interrupted.
pub fn serve(port: u16, snapshot_dir: Option<PathBuf>) -> Result<(), CliError> {
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::io(std::path::Path::new("<runtime>"), e))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::io(std::path::Path::new(&addr.to_string()), e))?;
        eprintln!("listening on http://{addr}");
        let app = router(Arc::new(AppState::new(snapshot_dir)));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::io(std::path::Path::new(&addr.to_string()), e))
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Path of the dirty CSV on the server's file system.
    pub data_path: Option<PathBuf>,
    /// Inline CSV instead of a path.
    pub csv: Option<String>,
    pub ground_truth_path: Option<PathBuf>,
    pub ground_truth_csv: Option<String>,
    #[serde(default = "yes")]
    pub has_header: bool,
    /// Resume from a snapshot file instead of starting over.
    pub snapshot_path: Option<PathBuf>,
    #[serde(default)]
    pub config: SessionOptions,
}

fn yes() -> bool {
    true
}

fn load_table(path: Option<PathBuf>, inline: Option<String>, has_header: bool, what: &str) -> ApiResult<Option<Table>> {
    match (path, inline) {
        (Some(_), Some(_)) => Err(ApiError::bad_request(format!("give either a path or inline CSV for the {what}, not both"))),
        (Some(p), None) => Ok(Some(load_csv(p, has_header)?)),
        (None, Some(text)) => Ok(Some(Table::from_csv_str(&text, has_header)?)),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
    pub rows: usize,
    pub columns: usize,
    pub schema: Vec<String>,
    pub stage: Stage,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let Json(req) = body?;
    let st = state.clone();
    blocking(move || {
        let table = load_table(req.data_path, req.csv, req.has_header, "data")?
            .ok_or_else(|| ApiError::bad_request("data_path or csv is required"))?;
        let truth = load_table(req.ground_truth_path, req.ground_truth_csv, req.has_header, "ground truth")?
            .map(|clean| attach_ground_truth(&table, clean))
            .transpose()?
            .map(Arc::new);
        let table = Arc::new(table);
        let session = match req.snapshot_path {
            Some(p) => Session::restore(table, truth, SessionSnapshot::load(p)?)?,
            None => Session::new(table, truth, req.config.to_config())?,
        };
        let id = uuid::Uuid::new_v4().simple().to_string();
        st.persist(&id, &session)?;
        let created = Created {
            session_id: id.clone(),
            rows: session.table().n_rows(),
            columns: session.table().n_cols(),
            schema: session.table().schema().to_vec(),
            stage: session.stage(),
        };
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        st.sessions.write().expect("session map lock").insert(
            id,
            Arc::new(Entry {
                session: RwLock::new(session),
                created_unix,
            }),
        );
        Ok((StatusCode::CREATED, Json(created)))
    })
    .await
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let removed = state.sessions.write().expect("session map lock").remove(&id);
    if removed.is_none() {
        return Err(ApiError::not_found(&id));
    }
    if let Some(dir) = &state.snapshot_dir {
        let _ = std::fs::remove_file(dir.join(format!("{id}.json")));
    }
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CellView {
    pub row: usize,
    pub col: usize,
    pub value: String,
    /// The whole row, so the target cell can be judged in context.
    pub tuple: Vec<String>,
    pub disagreement: Option<f64>,
    pub certainty: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BatchView {
    pub finished: bool,
    pub phase: Option<Phase>,
    pub iteration: u32,
    pub column: Option<usize>,
    pub column_name: Option<String>,
    pub labels_used: usize,
    pub remaining_budget: usize,
    pub cells: Vec<CellView>,
}

async fn get_batch(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<BatchView>> {
    let entry = state.get(&id)?;
    let s = entry.session.read().expect("session lock");
    let batch = s.pending_batch();
    let view = BatchView {
        finished: s.is_finished(),
        phase: batch.as_ref().map(|b| b.phase),
        iteration: batch.as_ref().map_or(s.iteration(), |b| b.iteration),
        column: batch.as_ref().map(|b| b.column),
        column_name: batch.as_ref().map(|b| b.column_name.clone()),
        labels_used: s.labels_used(),
        remaining_budget: s.remaining_budget(),
        cells: batch
            .map(|b| {
                b.cells
                    .into_iter()
                    .map(|c| CellView {
                        tuple: s.table().row(c.row).to_vec(),
                        row: c.row,
                        col: c.col,
                        value: c.value,
                        disagreement: c.disagreement,
                        certainty: c.certainty,
                    })
                    .collect()
            })
            .unwrap_or_default(),
    };
    Ok(Json(view))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelIn {
    pub row: usize,
    pub col: usize,
    pub label: LabelValue,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelsIn {
    pub labels: Vec<LabelIn>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelsOut {
    /// Whether this submission completed a training iteration.
    pub trained: bool,
    pub iteration: u32,
    pub stage: Stage,
    pub finished: bool,
    pub labels_used: usize,
    pub remaining_budget: usize,
    pub per_column: Vec<ColumnSummary>,
    pub global: Option<Score>,
}

async fn post_labels(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<LabelsIn>, JsonRejection>,
) -> ApiResult<Json<LabelsOut>> {
    let Json(req) = body?;
    let entry = state.get(&id)?;
    let st = state.clone();
    blocking(move || {
        let mut s = entry.session.write().expect("session lock");
        let answers: Vec<(CellRef, LabelValue)> =
            req.labels.iter().map(|l| (CellRef::new(l.row, l.col), l.label)).collect();
        let summary: Option<IterationSummary> = s.submit(&answers, LabelSource::Human)?;
        st.persist(&id, &s)?;
        Ok(Json(LabelsOut {
            trained: summary.is_some(),
            iteration: s.iteration(),
            stage: s.stage(),
            finished: s.is_finished(),
            labels_used: s.labels_used(),
            remaining_budget: s.remaining_budget(),
            per_column: s.column_summaries(),
            global: summary.and_then(|x| x.global),
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatusOut {
    pub session_id: String,
    pub created_unix: u64,
    pub stage: Stage,
    pub iteration: u32,
    pub labels_used: usize,
    pub budget: usize,
    pub remaining_budget: usize,
    pub per_column: Vec<ColumnSummary>,
    pub convergence_curve: Vec<ConvergencePoint>,
    pub history: Vec<IterationSummary>,
}

async fn get_status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<StatusOut>> {
    let entry = state.get(&id)?;
    let s = entry.session.read().expect("session lock");
    Ok(Json(StatusOut {
        session_id: id,
        created_unix: entry.created_unix,
        stage: s.stage(),
        iteration: s.iteration(),
        labels_used: s.labels_used(),
        budget: s.config().budget,
        remaining_budget: s.remaining_budget(),
        per_column: s.column_summaries(),
        convergence_curve: convergence_curve(s.history()),
        history: s.history().to_vec(),
    }))
}

#[derive(Debug, Deserialize)]
pub struct CellQuery {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExplainOut {
    pub row: usize,
    pub col: usize,
    pub value: String,
    pub probability: Option<f64>,
    pub label: Option<LabelValue>,
    pub explanation: Explanation,
    pub rendered: String,
}

async fn get_explain(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<CellQuery>, QueryRejection>,
) -> ApiResult<Json<ExplainOut>> {
    let Query(q) = query?;
    let entry = state.get(&id)?;
    blocking(move || {
        let s = entry.session.read().expect("session lock");
        let cell = CellRef::new(q.row, q.col);
        let explanation = s.explain(cell)?;
        Ok(Json(ExplainOut {
            row: q.row,
            col: q.col,
            value: s.table().get(q.row, q.col).to_string(),
            probability: s.probability(cell),
            label: s.labels().get(cell).map(|l| l.label),
            rendered: explanation.render(),
            explanation,
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FlaggedCell {
    pub row: usize,
    pub col: usize,
    /// Model probability; absent for columns without a model.
    pub probability: Option<f64>,
    /// Whether a label (rather than the model) decided this cell.
    pub labeled: bool,
}

/// Streams the flagged cells as one JSON array, a chunk per cell.
async fn get_result(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let entry = state.get(&id)?;
    let cells: Vec<FlaggedCell> = {
        let s = entry.session.read().expect("session lock");
        s.final_predictions()
            .flagged()
            .map(|c| FlaggedCell {
                row: c.row,
                col: c.col,
                probability: s.probability(c),
                labeled: s.labels().contains(c),
            })
            .collect()
    };
    let n = cells.len();
    let chunks = cells.into_iter().enumerate().map(move |(i, c)| {
        let mut s = if i == 0 { String::from("[") } else { String::from(",") };
        s.push_str(&serde_json::to_string(&c).expect("cell serializes"));
        if i + 1 == n {
            s.push(']');
        }
        Ok::<_, std::convert::Infallible>(Bytes::from(s))
    });
    let body = if n == 0 {
        Body::from("[]")
    } else {
        Body::from_stream(futures::stream::iter(chunks))
    };
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn get_report(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let entry = state.get(&id)?;
    let s = entry.session.read().expect("session lock");
    let report = RunReport::from_session(&s)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], report.to_json()).into_response())
}
