//! Read-only HTTP API over one loaded dataset.
//!
//! | method | path | body |
//! |---|---|---|
//! | GET  | `/api/dataset` | dataset summary |
//! | POST | `/api/dendrogram` | `SessionConfig` in, dendrogram + annotation + colors out |
//! | GET  | `/api/cluster/{nodeId}/members?sortSpace=s` | gallery order |
//! | GET  | `/api/cluster/{nodeId}/subset-sensitivity` | subset table |
//! | GET  | `/api/shepard?norm=rank\|minmax` | Shepard matrix |
//! | GET  | `/api/case/{id}/space/{name}` | raw payload |
//!
//! Cluster endpoints take an optional `config=<configHash>` naming a cached
//! result; without it they use the dendrogram of the most recent POST.

mod error;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use discrepancy::{
    analyze, gallery_order, shepard_matrix, subset_sensitivity, Analysis64, DataCase, Dataset64,
    NormMode, PayloadType, SessionConfig, SpaceKind,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tower_http::cors::CorsLayer;

pub use error::ApiError;

/// Result of one configuration, serialized once.
struct Computed {
    config: SessionConfig,
    analysis: Analysis64,
    body: Bytes,
}

#[derive(Default)]
pub struct AppState {
    dataset: Option<Arc<Dataset64>>,
    cache: Mutex<HashMap<String, Arc<Computed>>>,
    current: RwLock<Option<Arc<Computed>>>,
}

impl AppState {
    pub fn new(dataset: Dataset64) -> Self {
        Self {
            dataset: Some(Arc::new(dataset)),
            ..Self::default()
        }
    }

    /// A server with nothing loaded; every dataset endpoint answers 404.
    pub fn empty() -> Self {
        Self::default()
    }

    fn dataset(&self) -> Result<&Arc<Dataset64>, ApiError> {
        self.dataset.as_ref().ok_or(ApiError::NoDataset)
    }

    fn resolve(&self, hash: Option<&str>) -> Result<Arc<Computed>, ApiError> {
        match hash {
            Some(h) => self
                .cache
                .lock()
                .expect("cache lock poisoned")
                .get(h)
                .cloned()
                .ok_or_else(|| ApiError::UnknownConfig(h.to_string())),
            None => self.current(),
        }
    }

    fn current(&self) -> Result<Arc<Computed>, ApiError> {
        self.current
            .read()
            .expect("current lock poisoned")
            .clone()
            .ok_or(ApiError::NoDendrogram)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/dataset", get(dataset_summary))
        .route("/api/dendrogram", post(dendrogram))
        .route("/api/cluster/{node}/members", get(cluster_members))
        .route("/api/cluster/{node}/subset-sensitivity", get(cluster_subset))
        .route("/api/shepard", get(shepard))
        .route("/api/case/{id}/space/{name}", get(case_payload))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<tokio::net::TcpListener> {
    tokio::net::TcpListener::bind(addr).await
}

fn json_bytes(body: Bytes) -> Response {
    (
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        body,
    )
        .into_response()
}

fn to_json<S: Serialize>(value: &S) -> Result<Response, ApiError> {
    let body = serde_json::to_vec(value).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(json_bytes(Bytes::from(body)))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SpaceSummary<'a> {
    name: &'a str,
    kind: SpaceKind,
    payload_type: PayloadType,
    has_payloads: bool,
}

#[derive(Serialize)]
struct DatasetSummary<'a> {
    name: &'a str,
    cases: &'a [DataCase],
    spaces: Vec<SpaceSummary<'a>>,
}

async fn dataset_summary(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let ds = state.dataset()?;
    to_json(&DatasetSummary {
        name: ds.name(),
        cases: ds.cases(),
        spaces: ds
            .spaces()
            .iter()
            .map(|s| SpaceSummary {
                name: &s.name,
                kind: s.kind,
                payload_type: s.payload_type,
                has_payloads: s.payloads.is_some(),
            })
            .collect(),
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DendrogramResponse<'a> {
    config_hash: String,
    config: &'a SessionConfig,
    #[serde(flatten)]
    analysis: &'a Analysis64,
}

/// Canonical form used for caching and hashing; collapse state is a client
/// concern and does not affect the computation.
fn canonical(config: &SessionConfig) -> SessionConfig {
    let mut c = config.clone();
    c.collapsed_nodes.clear();
    c.diam_kind = Some(config.diam());
    c.leaf_space = Some(config.leaf().to_string());
    c
}

pub fn config_hash(config: &SessionConfig) -> String {
    let text = serde_json::to_string(&canonical(config)).unwrap_or_default();
    hex::encode(Sha256::digest(text.as_bytes()))
}

async fn dendrogram(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let ds = state.dataset()?.clone();
    let config: SessionConfig = serde_json::from_slice(&body).map_err(ApiError::from_body)?;
    config.validate(&ds)?;
    let config = canonical(&config);
    let key = config_hash(&config);

    let cached = state.cache.lock().expect("cache lock poisoned").get(&key).cloned();
    let computed = match cached {
        Some(c) => c,
        None => {
            let cfg = config.clone();
            let computed = tokio::task::spawn_blocking(move || -> Result<Computed, ApiError> {
                let analysis = analyze(&ds, &cfg)?;
                let body = serde_json::to_vec(&DendrogramResponse {
                    config_hash: config_hash(&cfg),
                    config: &cfg,
                    analysis: &analysis,
                })
                .map_err(|e| ApiError::Internal(e.to_string()))?;
                Ok(Computed {
                    config: cfg,
                    analysis,
                    body: Bytes::from(body),
                })
            })
            .await
            .map_err(|e| ApiError::Internal(e.to_string()))??;
            // first insert wins so every caller sees the same bytes
            let mut cache = state.cache.lock().expect("cache lock poisoned");
            cache.entry(key).or_insert_with(|| Arc::new(computed)).clone()
        }
    };
    *state.current.write().expect("current lock poisoned") = Some(computed.clone());
    Ok(json_bytes(computed.body.clone()))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct MembersQuery {
    sort_space: Option<String>,
    config: Option<String>,
}

#[derive(Deserialize)]
struct ConfigQuery {
    config: Option<String>,
}

#[derive(Serialize)]
struct GalleryEntry<'a> {
    case: usize,
    id: &'a str,
    label: &'a str,
    coordinate: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GalleryResponse<'a> {
    node: usize,
    sort_space: &'a str,
    converged: bool,
    members: Vec<GalleryEntry<'a>>,
}

async fn cluster_members(
    State(state): State<Arc<AppState>>,
    Path(node): Path<String>,
    Query(q): Query<MembersQuery>,
) -> Result<Response, ApiError> {
    let ds = state.dataset()?;
    let current = state.resolve(q.config.as_deref())?;
    let node = parse_node(&node, &current)?;
    let sort_space = q.sort_space.unwrap_or_else(|| current.config.leaf().to_string());
    let members = &current.analysis.dendrogram.nodes()[node].members;
    let mds = gallery_order(members, &sort_space, ds, current.config.normalization)?;
    to_json(&GalleryResponse {
        node,
        sort_space: &sort_space,
        converged: mds.converged,
        members: mds
            .order
            .iter()
            .zip(&mds.coordinates)
            .map(|(&case, &coordinate)| GalleryEntry {
                case,
                id: &ds.cases()[case].id,
                label: &ds.cases()[case].label,
                coordinate,
            })
            .collect(),
    })
}

async fn cluster_subset(
    State(state): State<Arc<AppState>>,
    Path(node): Path<String>,
    Query(q): Query<ConfigQuery>,
) -> Result<Response, ApiError> {
    let ds = state.dataset()?;
    let current = state.resolve(q.config.as_deref())?;
    let node = parse_node(&node, &current)?;
    let cfg = &current.config;
    let table = subset_sensitivity(
        &current.analysis.dendrogram.nodes()[node],
        ds,
        &cfg.primary_space,
        cfg.normalization,
        cfg.diam(),
    )?;
    to_json(&table)
}

fn parse_node(raw: &str, current: &Computed) -> Result<usize, ApiError> {
    raw.parse::<usize>()
        .ok()
        .filter(|&id| id < current.analysis.dendrogram.nodes().len())
        .ok_or_else(|| ApiError::UnknownNode(raw.to_string()))
}

#[derive(Deserialize)]
struct ShepardQuery {
    norm: Option<NormMode>,
}

async fn shepard(
    State(state): State<Arc<AppState>>,
    Query(q): Query<ShepardQuery>,
) -> Result<Response, ApiError> {
    let ds = state.dataset()?;
    let mode = q.norm.unwrap_or_else(|| {
        state
            .current()
            .map(|c| c.config.normalization)
            .unwrap_or(NormMode::Minmax)
    });
    to_json(&shepard_matrix(ds, mode)?)
}

async fn case_payload(
    State(state): State<Arc<AppState>>,
    Path((id, name)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let ds = state.dataset()?;
    let case = ds.case_index(&id).ok_or(ApiError::UnknownCase(id))?;
    let space = ds.space(&name).map_err(|_| ApiError::UnknownSpaceNotFound(name.clone()))?;
    let payload = space
        .payloads
        .as_ref()
        .and_then(|p| p.get(case))
        .ok_or(ApiError::PayloadUnavailable(name))?;
    to_json(&payload.to_json())
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        let body = serde_json::json!({"error": self.code(), "message": self.to_string()});
        (status, axum::Json(body)).into_response()
    }
}

