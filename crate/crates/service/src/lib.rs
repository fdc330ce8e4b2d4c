//! HTTP front end for interactive seeded clustering: upload a dataset, put
//! seed labels, start a run, poll for the snapshot, repeat.
//!
//! Datasets and finished runs are persisted under a data directory using the
//! same file formats as the command-line tool, and reloaded on startup.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use seedgrow_core::io::{self as cio, CsvOptions};
use seedgrow_core::{
    assign_new, run as run_engine, ClusterAssignment, ClusterId, Dataset, Error as CoreError,
    Label, PerceptionModel, RunReport, SeedAssignment, DEFAULT_MAX_ITERATIONS,
};

const DEFAULT_PAGE: usize = 1000;
const MAX_PAGE: usize = 10_000;
const MAX_BODY_BYTES: usize = 512 << 20;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(m: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, m)
    }

    fn not_found(m: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, m)
    }

    fn conflict(m: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, m)
    }

    fn unprocessable(m: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, m)
    }

    fn internal(m: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, m)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone)]
struct DatasetEntry {
    dataset: Arc<Dataset>,
    created_at: u64,
    seeds: SeedAssignment,
    latest_run: Option<String>,
    active_run: Option<String>,
}

#[derive(Debug, Clone)]
enum RunStatus {
    Running,
    Done(Arc<(ClusterAssignment, RunReport)>),
    Failed(String),
}

#[derive(Debug, Clone)]
struct RunEntry {
    dataset_id: String,
    seeds: SeedAssignment,
    max_iter: usize,
    status: RunStatus,
}

#[derive(Debug, Default)]
struct Inner {
    datasets: BTreeMap<String, DatasetEntry>,
    runs: BTreeMap<String, RunEntry>,
    next_dataset: u64,
    next_run: u64,
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    data_dir: Arc<PathBuf>,
    inner: Arc<RwLock<Inner>>,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn numeric_suffix(id: &str, prefix: char) -> Option<u64> {
    id.strip_prefix(prefix)?.parse().ok()
}

fn read_kv(path: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

impl AppState {
    /// Opens (creating if needed) a data directory and reloads whatever it
    /// holds.
    pub fn open(data_dir: impl Into<PathBuf>) -> Result<Self, CoreError> {
        let data_dir = data_dir.into();
        let io_err = |p: &Path, e| CoreError::Io {
            path: p.to_path_buf(),
            source: e,
        };
        for sub in ["datasets", "runs"] {
            let p = data_dir.join(sub);
            std::fs::create_dir_all(&p).map_err(|e| io_err(&p, e))?;
        }
        let mut inner = Inner {
            next_dataset: 1,
            next_run: 1,
            ..Inner::default()
        };

        let dir = data_dir.join("datasets");
        for entry in std::fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let entry = entry.map_err(|e| io_err(&dir, e))?;
            let id = entry.file_name().to_string_lossy().into_owned();
            let Some(k) = numeric_suffix(&id, 'd') else {
                continue;
            };
            let path = entry.path();
            let dataset = cio::load_csv(
                &path.join("data.csv"),
                &label_options(&path.join("data.csv"))?,
            )?;
            let meta = read_kv(&path.join("meta.txt")).map_err(|e| io_err(&path, e))?;
            let seeds_path = path.join("seeds.csv");
            let seeds = if seeds_path.exists() {
                cio::load_seeds(&seeds_path)?
            } else {
                SeedAssignment::new()
            };
            inner.next_dataset = inner.next_dataset.max(k + 1);
            inner.datasets.insert(
                id,
                DatasetEntry {
                    dataset: Arc::new(dataset),
                    created_at: meta
                        .get("created_at")
                        .and_then(|v| v.parse().ok())
                        .unwrap_or(0),
                    seeds,
                    latest_run: meta.get("latest_run").filter(|v| !v.is_empty()).cloned(),
                    active_run: None,
                },
            );
        }

        let dir = data_dir.join("runs");
        for entry in std::fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let entry = entry.map_err(|e| io_err(&dir, e))?;
            let id = entry.file_name().to_string_lossy().into_owned();
            let Some(k) = numeric_suffix(&id, 'r') else {
                continue;
            };
            let path = entry.path();
            let meta = read_kv(&path.join("meta.txt")).map_err(|e| io_err(&path, e))?;
            let (Some(dataset_id), Some(max_iter)) = (
                meta.get("dataset").cloned(),
                meta.get("max_iter").and_then(|v| v.parse().ok()),
            ) else {
                continue;
            };
            let Some(ds) = inner.datasets.get(&dataset_id) else {
                continue;
            };
            let seeds = cio::load_seeds(&path.join("seeds.csv"))?;
            // Snapshots are replayed from their stored inputs.
            let result = run_engine(&ds.dataset, &seeds, max_iter)?;
            inner.next_run = inner.next_run.max(k + 1);
            inner.runs.insert(
                id,
                RunEntry {
                    dataset_id,
                    seeds,
                    max_iter,
                    status: RunStatus::Done(Arc::new(result)),
                },
            );
        }
        Ok(AppState {
            data_dir: Arc::new(data_dir),
            inner: Arc::new(RwLock::new(inner)),
        })
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Inner> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, Inner> {
        self.inner.write().unwrap_or_else(|e| e.into_inner())
    }

    fn dataset_dir(&self, id: &str) -> PathBuf {
        self.data_dir.join("datasets").join(id)
    }

    fn run_dir(&self, id: &str) -> PathBuf {
        self.data_dir.join("runs").join(id)
    }

    fn save_dataset_meta(&self, id: &str, entry: &DatasetEntry) -> ApiResult<()> {
        let text = format!(
            "created_at = {}\nlatest_run = {}\n",
            entry.created_at,
            entry.latest_run.as_deref().unwrap_or("")
        );
        std::fs::write(self.dataset_dir(id).join("meta.txt"), text)
            .map_err(|e| ApiError::internal(e.to_string()))
    }
}

fn label_options(path: &Path) -> Result<CsvOptions, CoreError> {
    let header = cio::csv_header(path)?;
    Ok(CsvOptions {
        label_column: header.iter().any(|h| h == "label").then(|| "label".into()),
        id_column: None,
    })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/datasets", post(upload_dataset))
        .route("/api/datasets/{id}", get(get_dataset))
        .route("/api/datasets/{id}/points", get(get_points))
        .route("/api/datasets/{id}/seeds", get(get_seeds).put(put_seeds))
        .route("/api/datasets/{id}/runs", post(start_run))
        .route("/api/runs/{run_id}", get(get_run))
        .route("/api/runs/{run_id}/predict", post(predict))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// Binds `addr` and serves until the process exits. Files under
/// `static_dir`, if given, are served for every non-API path.
pub async fn serve(
    addr: SocketAddr,
    data_dir: PathBuf,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let state = AppState::open(data_dir).map_err(std::io::Error::other)?;
    let mut app = router(state);
    if let Some(dir) = static_dir {
        app = app.fallback_service(tower_http::services::ServeDir::new(dir));
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await
}

fn handle_json(id: &str, e: &DatasetEntry) -> Value {
    json!({
        "id": id,
        "n": e.dataset.len(),
        "d": e.dataset.dim(),
        "created_at": e.created_at,
        "latest_run": e.latest_run,
        "seeds": e.seeds.len(),
        "has_truth": e.dataset.truth().is_some(),
    })
}

fn semantic(e: CoreError) -> ApiError {
    match e {
        CoreError::Io { .. } => ApiError::internal(e.to_string()),
        CoreError::Csv(_) | CoreError::Parse { .. } => ApiError::bad_request(e.to_string()),
        _ => ApiError::unprocessable(e.to_string()),
    }
}

async fn upload_dataset(
    State(state): State<AppState>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    // A `label` column, if present, is kept as ground truth.
    let mut opts = CsvOptions::default();
    let first_line = body.split(|&b| b == b'\n').next().unwrap_or(&[]);
    if String::from_utf8_lossy(first_line)
        .split(',')
        .any(|h| h.trim().trim_matches('"') == "label")
    {
        opts.label_column = Some("label".into());
    }
    let dataset = cio::read_csv(&body[..], &opts).map_err(semantic)?;

    let id = {
        let mut inner = state.write();
        let id = format!("d{}", inner.next_dataset);
        inner.next_dataset += 1;
        id
    };
    let dir = state.dataset_dir(&id);
    std::fs::create_dir_all(&dir).map_err(|e| ApiError::internal(e.to_string()))?;
    cio::save_csv(&dir.join("data.csv"), &dataset)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let entry = DatasetEntry {
        dataset: Arc::new(dataset),
        created_at: now(),
        seeds: SeedAssignment::new(),
        latest_run: None,
        active_run: None,
    };
    state.save_dataset_meta(&id, &entry)?;
    let body = handle_json(&id, &entry);
    state.write().datasets.insert(id, entry);
    Ok((StatusCode::CREATED, Json(body)))
}

fn dataset_entry(state: &AppState, id: &str) -> ApiResult<DatasetEntry> {
    state
        .read()
        .datasets
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown dataset `{id}`")))
}

async fn get_dataset(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<Value>> {
    let e = dataset_entry(&state, &id)?;
    Ok(Json(handle_json(&id, &e)))
}

#[derive(Debug, Deserialize)]
struct Page {
    offset: Option<usize>,
    limit: Option<usize>,
}

fn run_result(
    state: &AppState,
    run_id: Option<&str>,
) -> Option<Arc<(ClusterAssignment, RunReport)>> {
    let inner = state.read();
    match &inner.runs.get(run_id?)?.status {
        RunStatus::Done(r) => Some(Arc::clone(r)),
        _ => None,
    }
}

async fn get_points(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(page): Query<Page>,
) -> ApiResult<Json<Value>> {
    let e = dataset_entry(&state, &id)?;
    let offset = page.offset.unwrap_or(0);
    let limit = page.limit.unwrap_or(DEFAULT_PAGE).min(MAX_PAGE);
    let result = run_result(&state, e.latest_run.as_deref());
    let n = e.dataset.len();
    let end = offset.saturating_add(limit).min(n);
    let points: Vec<Value> = (offset.min(n)..end)
        .map(|i| {
            let (label, score) = match &result {
                Some(r) => (r.0.labels[i].value(), Some(r.0.scores[i])),
                None => (Label::ANOMALY.value(), None),
            };
            json!({
                "id": i,
                "features": e.dataset.point(i),
                "label": label,
                "score": score,
                "seed": e.seeds.get(i),
                "truth": e.dataset.truth().map(|t| t[i].value()),
            })
        })
        .collect();
    Ok(Json(json!({
        "total": n,
        "offset": offset,
        "run_id": e.latest_run,
        "points": points,
    })))
}

fn seeds_json(seeds: &SeedAssignment) -> Value {
    Value::Array(
        seeds
            .iter()
            .map(|(p, c)| json!({ "point_id": p, "cluster_id": c }))
            .collect(),
    )
}

async fn get_seeds(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<Value>> {
    let e = dataset_entry(&state, &id)?;
    Ok(Json(seeds_json(&e.seeds)))
}

fn parse_json(body: &[u8]) -> ApiResult<Value> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON: {e}")))
}

fn parse_seed_list(body: &[u8], n: usize) -> ApiResult<SeedAssignment> {
    let value = parse_json(body)?;
    let items = value
        .as_array()
        .ok_or_else(|| ApiError::bad_request("expected a JSON array of seeds"))?;
    let mut seeds = SeedAssignment::new();
    for (k, item) in items.iter().enumerate() {
        let field = |name: &str| {
            item.get(name)
                .and_then(Value::as_i64)
                .ok_or_else(|| ApiError::bad_request(format!("seed {k}: missing integer `{name}`")))
        };
        let point = field("point_id")?;
        let cluster = field("cluster_id")?;
        let point = usize::try_from(point)
            .ok()
            .filter(|&p| p < n)
            .ok_or_else(|| ApiError::unprocessable(format!("seed {k}: unknown point {point}")))?;
        let cluster = ClusterId::try_from(cluster).map_err(|_| {
            ApiError::unprocessable(format!("seed {k}: invalid cluster id {cluster}"))
        })?;
        seeds.insert(point, cluster).map_err(semantic)?;
    }
    if seeds.is_empty() {
        return Err(ApiError::unprocessable("no seeds"));
    }
    Ok(seeds)
}

async fn put_seeds(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let e = dataset_entry(&state, &id)?;
    let seeds = parse_seed_list(&body, e.dataset.len())?;
    cio::save_seeds(&state.dataset_dir(&id).join("seeds.csv"), &seeds)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let accepted = seeds.len();
    let mut inner = state.write();
    let entry = inner
        .datasets
        .get_mut(&id)
        .ok_or_else(|| ApiError::not_found(format!("unknown dataset `{id}`")))?;
    entry.seeds = seeds;
    Ok(Json(json!({ "accepted": accepted })))
}

fn persist_run(state: &AppState, run_id: &str, entry: &RunEntry) -> Result<(), CoreError> {
    let dir = state.run_dir(run_id);
    std::fs::create_dir_all(&dir).map_err(|e| CoreError::Io {
        path: dir.clone(),
        source: e,
    })?;
    cio::save_seeds(&dir.join("seeds.csv"), &entry.seeds)?;
    if let RunStatus::Done(r) = &entry.status {
        cio::save_results(&dir.join("results.csv"), &r.0)?;
        cio::save_model(&dir.join("model.json"), &r.0.models)?;
        let report = cio::report_to_kv(&r.1);
        std::fs::write(dir.join("report.txt"), report).map_err(|e| CoreError::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    let meta = format!(
        "dataset = {}\nmax_iter = {}\n",
        entry.dataset_id, entry.max_iter
    );
    std::fs::write(dir.join("meta.txt"), meta).map_err(|e| CoreError::Io {
        path: dir,
        source: e,
    })
}

async fn start_run(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let max_iter = if body.iter().all(u8::is_ascii_whitespace) {
        DEFAULT_MAX_ITERATIONS
    } else {
        let v = parse_json(&body)?;
        if !v.is_object() {
            return Err(ApiError::bad_request("expected a JSON object"));
        }
        match v.get("max_iter") {
            None | Some(Value::Null) => DEFAULT_MAX_ITERATIONS,
            Some(m) => {
                let m = m.as_u64().ok_or_else(|| {
                    ApiError::bad_request("`max_iter` must be a non-negative integer")
                })?;
                if m == 0 {
                    return Err(ApiError::unprocessable("max_iter must be at least 1"));
                }
                usize::try_from(m).unwrap_or(usize::MAX)
            }
        }
    };

    let (run_id, dataset, seeds) = {
        let mut inner = state.write();
        let entry = inner
            .datasets
            .get(&id)
            .ok_or_else(|| ApiError::not_found(format!("unknown dataset `{id}`")))?;
        if let Some(active) = &entry.active_run {
            return Err(ApiError::conflict(format!(
                "run {active} is still in progress"
            )));
        }
        if entry.seeds.is_empty() {
            return Err(ApiError::unprocessable("no seeds"));
        }
        let dataset = Arc::clone(&entry.dataset);
        let seeds = entry.seeds.clone();
        let run_id = format!("r{}", inner.next_run);
        inner.next_run += 1;
        let entry = inner.datasets.get_mut(&id).expect("checked above");
        entry.active_run = Some(run_id.clone());
        inner.runs.insert(
            run_id.clone(),
            RunEntry {
                dataset_id: id.clone(),
                seeds: seeds.clone(),
                max_iter,
                status: RunStatus::Running,
            },
        );
        (run_id, dataset, seeds)
    };

    let task_state = state.clone();
    let task_run = run_id.clone();
    tokio::spawn(async move {
        let outcome = tokio::task::spawn_blocking(move || run_engine(&dataset, &seeds, max_iter))
            .await
            .map_err(|e| e.to_string())
            .and_then(|r| r.map_err(|e| e.to_string()));
        let status = match outcome {
            Ok(result) => RunStatus::Done(Arc::new(result)),
            Err(msg) => RunStatus::Failed(msg),
        };
        finish_run(&task_state, &task_run, status);
    });

    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "run_id": run_id, "status": "running" })),
    ))
}

fn finish_run(state: &AppState, run_id: &str, status: RunStatus) {
    let done = matches!(status, RunStatus::Done(_));
    let snapshot = {
        let mut inner = state.write();
        let Some(run) = inner.runs.get_mut(run_id) else {
            return;
        };
        run.status = status;
        let run = run.clone();
        if let Some(ds) = inner.datasets.get_mut(&run.dataset_id) {
            ds.active_run = None;
            if done {
                ds.latest_run = Some(run_id.to_string());
            }
        }
        run
    };
    if done {
        let saved = persist_run(state, run_id, &snapshot);
        let entry = state.read().datasets.get(&snapshot.dataset_id).cloned();
        let meta = entry.map(|e| state.save_dataset_meta(&snapshot.dataset_id, &e));
        if let Err(e) = saved {
            eprintln!("warning: could not persist run {run_id}: {e}");
        }
        if let Some(Err(e)) = meta {
            eprintln!("warning: could not persist dataset metadata: {}", e.message);
        }
    }
}

fn run_entry(state: &AppState, run_id: &str) -> ApiResult<RunEntry> {
    state
        .read()
        .runs
        .get(run_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("unknown run `{run_id}`")))
}

fn models_json(models: &BTreeMap<ClusterId, PerceptionModel>) -> Value {
    Value::Array(
        models
            .iter()
            .map(|(id, m)| {
                json!({
                    "id": id,
                    "median": m.median(),
                    "n": m.n(),
                    "mu": m.mu(),
                    "support": m.support(),
                    "gap_star": m.gap_star(),
                    "edge": m.edge(),
                    "cutoff": m.cutoff(),
                })
            })
            .collect(),
    )
}

async fn get_run(
    State(state): State<AppState>,
    UrlPath(run_id): UrlPath<String>,
) -> ApiResult<Json<Value>> {
    let run = run_entry(&state, &run_id)?;
    let mut body = json!({
        "run_id": run_id,
        "dataset_id": run.dataset_id,
        "max_iter": run.max_iter,
        "seeds": seeds_json(&run.seeds),
    });
    let obj = body.as_object_mut().expect("object literal");
    match &run.status {
        RunStatus::Running => {
            obj.insert("status".into(), json!("running"));
        }
        RunStatus::Failed(msg) => {
            obj.insert("status".into(), json!("failed"));
            obj.insert("error".into(), json!(msg));
        }
        RunStatus::Done(r) => {
            let (assignment, report) = &**r;
            obj.insert("status".into(), json!("done"));
            obj.insert(
                "labels".into(),
                json!(assignment
                    .labels
                    .iter()
                    .map(|l| l.value())
                    .collect::<Vec<_>>()),
            );
            obj.insert("scores".into(), json!(assignment.scores));
            obj.insert("models".into(), models_json(&assignment.models));
            obj.insert(
                "report".into(),
                serde_json::to_value(report).map_err(|e| ApiError::internal(e.to_string()))?,
            );
        }
    }
    Ok(Json(body))
}

async fn predict(
    State(state): State<AppState>,
    UrlPath(run_id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let run = run_entry(&state, &run_id)?;
    let value = parse_json(&body)?;
    let points = value
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| ApiError::bad_request("expected {\"points\": [[...], ...]}"))?;
    let mut rows = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        let row: Option<Vec<f64>> = p
            .as_array()
            .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<_>>>());
        rows.push(
            row.ok_or_else(|| ApiError::bad_request(format!("point {k}: expected numbers")))?,
        );
    }
    let result = match &run.status {
        RunStatus::Done(r) => Arc::clone(r),
        RunStatus::Running => return Err(ApiError::conflict("run still in progress")),
        RunStatus::Failed(m) => return Err(ApiError::unprocessable(format!("run failed: {m}"))),
    };
    let models = &result.0.models;
    let mut labels = Vec::with_capacity(rows.len());
    let mut scores = Vec::with_capacity(rows.len());
    for row in &rows {
        let (label, score) = assign_new(models, row).map_err(semantic)?;
        labels.push(label.value());
        scores.push(score);
    }
    Ok(Json(json!({ "labels": labels, "scores": scores })))
}
