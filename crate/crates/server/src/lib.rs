//! HTTP API over the benchmark stages and their artifacts.
//!
//! Profiles are JSON files in one directory, addressed by file stem. Stage
//! runs are asynchronous: `POST /api/runs/{stage}` answers `202` with a token
//! that `GET /api/runs/{token}` reports on. Sending `"wait": true` runs the
//! stage inside the request instead. Only one run per profile may be in flight.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use modelbench_core::artifact::{ARTIFACT_NAMES, IR_DIR};
use modelbench_core::parsing::select_parser;
use modelbench_core::{run_stage, BenchmarkProfile, Error as CoreError, RunContext, Stage, StageSummary};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Clone, Debug, Default)]
pub struct ServerConfig {
    pub profile_dir: PathBuf,
    /// Output directory override applied to every profile (flag or environment).
    pub output_override: Option<PathBuf>,
    /// Profile used by artifact routes when no `?profile=` is given.
    pub default_profile: Option<String>,
    /// Built UI bundle served at `/`.
    pub static_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunState {
    Queued,
    Running,
    Done,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStatus {
    pub token: String,
    pub profile: String,
    pub stage: Stage,
    pub state: RunState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<StageSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default)]
struct Runs {
    by_token: BTreeMap<String, RunStatus>,
    in_flight: HashSet<String>,
}

struct AppState {
    config: ServerConfig,
    runs: Mutex<Runs>,
    next_token: AtomicU64,
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest { message: String, path: Option<String> },
    Conflict(String),
    Stage(Box<RunStatus>),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, json!({ "error": m })),
            ApiError::BadRequest { message, path } => {
                (StatusCode::BAD_REQUEST, json!({ "error": message, "path": path }))
            }
            ApiError::Conflict(m) => (StatusCode::CONFLICT, json!({ "error": m })),
            ApiError::Stage(run) => (StatusCode::UNPROCESSABLE_ENTITY, json!(*run)),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": m })),
        };
        (status, Json(body)).into_response()
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SchemaViolation { ref path, .. } => ApiError::BadRequest {
                path: Some(path.clone()),
                message: e.to_string(),
            },
            CoreError::Decode { .. } | CoreError::InvalidGlob { .. } | CoreError::UnknownParser { .. } => {
                ApiError::BadRequest { message: e.to_string(), path: None }
            }
            CoreError::FileNotFound(_) => ApiError::NotFound(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Names are file stems: no separators, no leading dot.
fn check_name(name: &str) -> ApiResult<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if ok {
        Ok(())
    } else {
        Err(ApiError::BadRequest { message: format!("invalid name `{name}`"), path: None })
    }
}

impl AppState {
    fn profile_path(&self, name: &str) -> ApiResult<PathBuf> {
        check_name(name)?;
        Ok(self.config.profile_dir.join(format!("{name}.json")))
    }

    fn context(&self, name: &str) -> ApiResult<RunContext> {
        let path = self.profile_path(name)?;
        if !path.is_file() {
            return Err(ApiError::NotFound(format!("profile `{name}` not found")));
        }
        Ok(RunContext::load(&path, self.config.output_override.clone())?)
    }

    fn output_dir(&self, profile: Option<String>) -> ApiResult<PathBuf> {
        let name = profile.or_else(|| self.config.default_profile.clone()).ok_or_else(|| ApiError::BadRequest {
            message: "query parameter `profile` is required".into(),
            path: None,
        })?;
        Ok(self.context(&name)?.output_dir)
    }
}

async fn list_profiles(State(state): State<Arc<AppState>>) -> ApiResult<Json<serde_json::Value>> {
    let dir = &state.config.profile_dir;
    let entries = fs::read_dir(dir).map_err(|e| ApiError::Internal(format!("{}: {e}", dir.display())))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    Ok(Json(json!({ "profiles": names })))
}

async fn get_profile(State(state): State<Arc<AppState>>, UrlPath(name): UrlPath<String>) -> ApiResult<Response> {
    let path = state.profile_path(&name)?;
    let bytes = fs::read(&path).map_err(|_| ApiError::NotFound(format!("profile `{name}` not found")))?;
    Ok(json_bytes(bytes))
}

async fn put_profile(
    State(state): State<Arc<AppState>>,
    UrlPath(name): UrlPath<String>,
    body: String,
) -> ApiResult<Json<serde_json::Value>> {
    let path = state.profile_path(&name)?;
    let profile = BenchmarkProfile::from_json(&body)?;
    if let Err(e) = select_parser(&profile.parse.parser_language) {
        return Err(ApiError::BadRequest {
            message: e.to_string(),
            path: Some("parse.parser_language".into()),
        });
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, body.as_bytes())
        .and_then(|_| fs::rename(&tmp, &path))
        .map_err(|e| ApiError::Internal(format!("{}: {e}", path.display())))?;
    Ok(Json(json!({ "profile": name, "saved": true })))
}

#[derive(Debug, Deserialize)]
struct RunRequest {
    profile: String,
    #[serde(default)]
    wait: bool,
}

fn finish(state: &AppState, token: &str, result: modelbench_core::Result<StageSummary>) -> RunStatus {
    let mut runs = state.runs.lock().unwrap();
    let run = runs.by_token.get_mut(token).expect("registered run");
    match result {
        Ok(summary) => {
            run.state = RunState::Done;
            run.summary = Some(summary);
        }
        Err(e) => {
            tracing::warn!(token, error = %e, "stage failed");
            run.state = RunState::Error;
            run.error = Some(e.to_string());
        }
    }
    let done = run.clone();
    runs.in_flight.remove(&done.profile);
    done
}

fn set_state(state: &AppState, token: &str, s: RunState) {
    if let Some(run) = state.runs.lock().unwrap().by_token.get_mut(token) {
        run.state = s;
    }
}

async fn start_run(
    State(state): State<Arc<AppState>>,
    UrlPath(stage): UrlPath<String>,
    Json(req): Json<RunRequest>,
) -> ApiResult<Response> {
    let stage: Stage = stage
        .parse()
        .map_err(|message| ApiError::BadRequest { message, path: None })?;
    let ctx = state.context(&req.profile)?;
    let token = format!("run-{:06}", state.next_token.fetch_add(1, Ordering::Relaxed) + 1);
    let status = RunStatus {
        token: token.clone(),
        profile: req.profile.clone(),
        stage,
        state: RunState::Queued,
        summary: None,
        error: None,
    };
    {
        let mut runs = state.runs.lock().unwrap();
        if !runs.in_flight.insert(req.profile.clone()) {
            return Err(ApiError::Conflict(format!("a run for profile `{}` is already in flight", req.profile)));
        }
        runs.by_token.insert(token.clone(), status.clone());
    }

    let worker_state = Arc::clone(&state);
    let worker_token = token.clone();
    let job = tokio::task::spawn_blocking(move || {
        set_state(&worker_state, &worker_token, RunState::Running);
        let result = run_stage(&ctx, stage);
        finish(&worker_state, &worker_token, result)
    });

    if req.wait {
        let done = job.await.map_err(|e| ApiError::Internal(e.to_string()))?;
        return match done.state {
            RunState::Done => Ok((StatusCode::OK, Json(done)).into_response()),
            _ => Err(ApiError::Stage(Box::new(done))),
        };
    }
    Ok((StatusCode::ACCEPTED, Json(status)).into_response())
}

async fn get_run(State(state): State<Arc<AppState>>, UrlPath(token): UrlPath<String>) -> ApiResult<Json<RunStatus>> {
    state
        .runs
        .lock()
        .unwrap()
        .by_token
        .get(&token)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::NotFound(format!("unknown run `{token}`")))
}

#[derive(Debug, Deserialize)]
struct ProfileQuery {
    profile: Option<String>,
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn read_file(path: &Path, what: &str) -> ApiResult<Response> {
    fs::read(path)
        .map(json_bytes)
        .map_err(|_| ApiError::NotFound(format!("{what} not found")))
}

async fn get_artifact(
    State(state): State<Arc<AppState>>,
    UrlPath(name): UrlPath<String>,
    Query(q): Query<ProfileQuery>,
) -> ApiResult<Response> {
    if !ARTIFACT_NAMES.contains(&name.as_str()) {
        return Err(ApiError::NotFound(format!("unknown artifact `{name}`")));
    }
    let dir = state.output_dir(q.profile)?;
    read_file(&dir.join(&name), &name)
}

async fn get_model_ir(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ProfileQuery>,
) -> ApiResult<Response> {
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(ApiError::NotFound(format!("unknown model `{id}`")));
    }
    let dir = state.output_dir(q.profile)?;
    read_file(&dir.join(IR_DIR).join(format!("{id}.json")), &format!("IR for model `{id}`"))
}

pub fn router(config: ServerConfig) -> Router {
    app(Arc::new(AppState {
        config,
        runs: Mutex::new(Runs::default()),
        next_token: AtomicU64::new(0),
    }))
}

fn app(state: Arc<AppState>) -> Router {
    let static_dir = state.config.static_dir.clone();
    let api = Router::new()
        .route("/api/profiles", get(list_profiles))
        .route("/api/profiles/{name}", get(get_profile).put(put_profile))
        // `{key}` is a stage name for POST and a run token for GET.
        .route("/api/runs/{key}", post(start_run).get(get_run))
        .route("/api/artifacts/{name}", get(get_artifact))
        .route("/api/models/{id}/ir", get(get_model_ir))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(config: ServerConfig, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!(address = %listener.local_addr()?, "serving");
    axum::serve(listener, router(config)).await
}

#[cfg(test)]
mod tests {
    use super::*;
    use axum::body::Body;
    use axum::http::Request;
    use tower::ServiceExt;

    #[test]
    fn names_cannot_escape_the_profile_dir() {
        assert!(check_name("fixture-1.v2").is_ok());
        for bad in ["", "../etc", "a/b", ".hidden", "a\\b"] {
            assert!(check_name(bad).is_err(), "{bad}");
        }
    }

    #[tokio::test]
    async fn second_run_for_busy_profile_conflicts() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("p.json"),
            r#"{"name":"p","version":"1","output_path":"out","scan":{"dataset_path":"data","include":["*.ecore"]},"parse":{"parser_language":"Ecore"}}"#,
        )
        .unwrap();
        let state = Arc::new(AppState {
            config: ServerConfig { profile_dir: dir.path().into(), ..ServerConfig::default() },
            runs: Mutex::new(Runs::default()),
            next_token: AtomicU64::new(0),
        });
        state.runs.lock().unwrap().in_flight.insert("p".into());
        let res = app(state)
            .oneshot(
                Request::post("/api/runs/scan")
                    .header("content-type", "application/json")
                    .body(Body::from(r#"{"profile":"p"}"#))
                    .unwrap(),
            )
            .await
            .unwrap();
        assert_eq!(res.status(), StatusCode::CONFLICT);
    }
}
