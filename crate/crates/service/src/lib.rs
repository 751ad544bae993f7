//! Read-only HTTP API over one or two loaded pennant indexes.
//!
//! ```text
//! GET /api/stats
//! GET /api/pennant?seed=&mode=&k=&min_tf=&log_base=&idf_style=&sectors=
//! GET /api/mention/{id}?mode=
//! ```
//!
//! Every `/api` error is a JSON object with an `error` field. When a static
//! directory is configured it is served at `/`.

use std::collections::{BTreeMap, HashMap};
use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use pennant_core::{
    build_pennant, emit_json, load_index, normalize_id, CoMentionIndex, IdfStyle, IndexError, Mode, PennantConfig,
    PennantError, SectorPolicy, FORMAT_VERSION,
};
use serde::Serialize;
use thiserror::Error;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

pub const MAX_K: usize = 1000;
const MENTION_SAMPLE: usize = 20;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no index loaded")]
    NoIndex,
    #[error("two indexes loaded for mode {0}")]
    DuplicateMode(Mode),
    #[error("failed to load index {path}: {source}")]
    Load { path: PathBuf, source: IndexError },
    #[error("invalid CORS origin {0:?}")]
    Cors(String),
    #[error("failed to bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub index_paths: Vec<PathBuf>,
    /// Scoring defaults for parameters a request leaves out. The mode field is
    /// ignored; the default mode is that of the first index.
    pub defaults: PennantConfig,
    pub static_dir: Option<PathBuf>,
    pub max_k: usize,
    /// `None` leaves CORS off (same-origin UI); `"*"` allows any origin.
    pub cors_origin: Option<String>,
}

impl ServiceConfig {
    pub fn new(bind: SocketAddr, index_paths: Vec<PathBuf>) -> Self {
        Self {
            bind,
            index_paths,
            defaults: PennantConfig::default(),
            static_dir: None,
            max_k: MAX_K,
            cors_origin: None,
        }
    }
}

/// An HTTP error with a JSON `{"error": ...}` body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeStats {
    pub n_docs: usize,
    pub n_keys: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsResponse {
    pub modes: Vec<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<ModeStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<ModeStats>,
    pub index_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleDoc {
    pub doc_id: String,
    pub title: Option<String>,
    pub year: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MentionResponse {
    pub id: String,
    pub df: u32,
    pub sample_citing_docs: Vec<SampleDoc>,
}

/// Loaded indexes plus request defaults. Immutable once built.
#[derive(Debug)]
pub struct AppState {
    indexes: BTreeMap<Mode, CoMentionIndex>,
    default_mode: Mode,
    defaults: PennantConfig,
    max_k: usize,
}

impl AppState {
    pub fn new(indexes: Vec<CoMentionIndex>, defaults: PennantConfig, max_k: usize) -> Result<Self, ServiceError> {
        let default_mode = indexes.first().ok_or(ServiceError::NoIndex)?.mode();
        let mut map = BTreeMap::new();
        for idx in indexes {
            let mode = idx.mode();
            if map.insert(mode, idx).is_some() {
                return Err(ServiceError::DuplicateMode(mode));
            }
        }
        Ok(Self {
            indexes: map,
            default_mode,
            defaults,
            max_k,
        })
    }

    pub fn load(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let indexes = config
            .index_paths
            .iter()
            .map(|p| load_index(p).map_err(|source| ServiceError::Load { path: p.clone(), source }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(indexes, config.defaults, config.max_k)
    }

    pub fn stats(&self) -> StatsResponse {
        let of = |m: Mode| {
            self.indexes.get(&m).map(|i| ModeStats {
                n_docs: i.n_docs(),
                n_keys: i.n_keys(),
            })
        };
        StatsResponse {
            modes: self.indexes.keys().copied().collect(),
            citation: of(Mode::Citation),
            descriptor: of(Mode::Descriptor),
            index_version: FORMAT_VERSION,
        }
    }

    fn index_for(&self, params: &HashMap<String, String>) -> Result<&CoMentionIndex, ApiError> {
        let mode = match params.get("mode") {
            Some(m) => Mode::from_str(m).map_err(ApiError::bad_request)?,
            None => self.default_mode,
        };
        self.indexes
            .get(&mode)
            .ok_or_else(|| ApiError::bad_request(format!("mode {mode} not loaded")))
    }

    /// Resolves query parameters against the defaults into a full config.
    pub fn resolve_config(&self, params: &HashMap<String, String>) -> Result<PennantConfig, ApiError> {
        fn parse<T: FromStr>(params: &HashMap<String, String>, key: &str) -> Result<Option<T>, ApiError> {
            params
                .get(key)
                .map(|v| {
                    v.trim()
                        .parse::<T>()
                        .map_err(|_| ApiError::bad_request(format!("invalid {key}: {v:?}")))
                })
                .transpose()
        }
        let mode = self.index_for(params)?.mode();
        let d = self.defaults;
        let config = PennantConfig {
            mode,
            k: parse(params, "k")?.unwrap_or(d.k),
            min_tf: parse(params, "min_tf")?.unwrap_or(d.min_tf),
            log_base: parse(params, "log_base")?.unwrap_or(d.log_base),
            idf_style: parse::<IdfStyle>(params, "idf_style")?.unwrap_or(d.idf_style),
            sector_policy: parse::<SectorPolicy>(params, "sectors")?.unwrap_or(d.sector_policy),
        };
        if config.k > self.max_k {
            return Err(ApiError::bad_request(format!("k exceeds maximum of {}", self.max_k)));
        }
        config
            .validate()
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        Ok(config)
    }

    /// Body of `GET /api/pennant`: exactly [`emit_json`] of the diagram.
    pub fn pennant(&self, params: &HashMap<String, String>) -> Result<String, ApiError> {
        let seed = params
            .get("seed")
            .map(|s| normalize_id(s))
            .filter(|s| !s.is_empty())
            .ok_or_else(|| ApiError::bad_request("missing seed parameter"))?;
        let index = self.index_for(params)?;
        let config = self.resolve_config(params)?;
        match build_pennant(index, &seed, &config) {
            Ok(d) => Ok(emit_json(&d)),
            Err(PennantError::SeedNotFound(_)) => Err(ApiError::not_found("seed not found")),
            Err(e) => Err(ApiError::bad_request(e.to_string())),
        }
    }

    pub fn mention(&self, id: &str, params: &HashMap<String, String>) -> Result<MentionResponse, ApiError> {
        let index = self.index_for(params)?;
        let id = normalize_id(id);
        let posting = index
            .postings(&id)
            .ok_or_else(|| ApiError::not_found("mention not found"))?;
        let sample_citing_docs = posting
            .docs
            .iter()
            .take(MENTION_SAMPLE)
            .map(|&d| {
                let doc = index.doc(d);
                SampleDoc {
                    doc_id: doc.doc_id.clone(),
                    title: doc.title.clone(),
                    year: doc.year,
                }
            })
            .collect();
        Ok(MentionResponse {
            id,
            df: posting.df(),
            sample_citing_docs,
        })
    }
}

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(q: Params) -> Result<HashMap<String, String>, ApiError> {
    q.map(|Query(p)| p)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn stats_handler(State(state): State<Arc<AppState>>) -> Json<StatsResponse> {
    Json(state.stats())
}

async fn pennant_handler(State(state): State<Arc<AppState>>, q: Params) -> Result<Response, ApiError> {
    let body = state.pennant(&params(q)?)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn mention_handler(
    State(state): State<Arc<AppState>>,
    id: Result<Path<String>, PathRejection>,
    q: Params,
) -> Result<Json<MentionResponse>, ApiError> {
    let Path(id) = id.map_err(|e| ApiError::bad_request(e.body_text()))?;
    Ok(Json(state.mention(&id, &params(q)?)?))
}

async fn api_not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn api_method_not_allowed() -> ApiError {
    ApiError {
        status: StatusCode::METHOD_NOT_ALLOWED,
        message: "method not allowed".into(),
    }
}

async fn log_request(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let uri = req.uri().clone();
    let started = Instant::now();
    let resp = next.run(req).await;
    tracing::info!(
        "{method} {uri} {} {:.1}ms",
        resp.status().as_u16(),
        started.elapsed().as_secs_f64() * 1e3
    );
    resp
}

/// Routes for `/api` and, optionally, the static UI bundle at `/`.
pub fn router(state: Arc<AppState>, config: &ServiceConfig) -> Result<Router, ServiceError> {
    let api = Router::new()
        .route("/stats", get(stats_handler))
        .route("/pennant", get(pennant_handler))
        .route("/mention/{id}", get(mention_handler))
        .fallback(api_not_found)
        .method_not_allowed_fallback(api_method_not_allowed)
        .with_state(state);
    let mut app = Router::new().nest("/api", api);
    if let Some(dir) = &config.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    if let Some(origin) = &config.cors_origin {
        let allow = if origin == "*" {
            AllowOrigin::any()
        } else {
            let value = HeaderValue::from_str(origin).map_err(|_| ServiceError::Cors(origin.clone()))?;
            AllowOrigin::exact(value)
        };
        app = app.layer(CorsLayer::new().allow_origin(allow).allow_methods([Method::GET]));
    }
    Ok(app.layer(middleware::from_fn(log_request)))
}

/// Loads the configured indexes and serves until `shutdown` resolves.
pub async fn serve(config: ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServiceError> {
    let state = Arc::new(AppState::load(&config)?);
    let app = router(state, &config)?;
    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .map_err(|source| ServiceError::Bind {
            addr: config.bind,
            source,
        })?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    Ok(())
}
