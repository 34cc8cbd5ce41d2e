//! HTTP front end for a [`Ledger`].
//!
//! Every endpoint answers with a JSON envelope: successful responses are
//! an object carrying `"status": "success"` alongside the payload fields,
//! and failures are
//! `{"status": "failed", "error": {"code": …, "message": …}}` with an
//! appropriate HTTP status. Machine-readable `code` values are stable:
//! `empty_body`, `malformed_digest`, `invalid_meta`, `bad_namespace`,
//! `not_terminal`, `bad_query`, and `internal`.
//!
//! Endpoints that select a namespace take it as a `?namespace=` query
//! parameter, defaulting to `default`. Submission endpoints also accept
//! `file_name`, `ts_from`, and `ts_to` query parameters describing the
//! submitted log.
//!
//! | Method | Path             | Body                  | Action |
//! |--------|------------------|-----------------------|--------|
//! | POST   | `/submit_raw`    | raw log bytes         | hash, optionally archive, record |
//! | POST   | `/submit_digest` | 64-hex digest         | record a precomputed digest |
//! | POST   | `/verify_raw`    | raw log bytes         | hash and look up |
//! | POST   | `/verify_digest` | 64-hex digest         | look up |
//! | POST   | `/verify_tb`     | terminal block JSON   | check against superblocks |
//! | POST   | `/search`        | search query JSON     | query blocks |
//! | POST   | `/flush`         | —                     | close the open chain now |
//! | GET    | `/stats`         | —                     | per-namespace counters |
//! | GET    | `/health`        | —                     | liveness + validity |
//!
//! Mining runs on the blocking thread pool so slow proof-of-work never
//! stalls the async executor.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use crate::block::{Block, LogMeta};
use crate::hash::HexDigest;
use crate::ledger::{Ledger, LedgerError};
use crate::verify::{QueryError, SearchQuery};

/// A failed request: HTTP status plus the stable error code and a
/// human-readable message for the envelope.
#[derive(Debug)]
struct ApiFail {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiFail {
    fn bad_request(code: &'static str, message: impl Into<String>) -> ApiFail {
        ApiFail {
            status: StatusCode::BAD_REQUEST,
            code,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> ApiFail {
        ApiFail {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiFail {
    fn into_response(self) -> Response {
        let body = json!({
            "status": "failed",
            "error": { "code": self.code, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

/// Success envelope: `status` merged with the payload's own fields.
#[derive(Serialize)]
struct Envelope<T: Serialize> {
    status: &'static str,
    #[serde(flatten)]
    body: T,
}

fn ok<T: Serialize>(body: T) -> Response {
    Json(Envelope {
        status: "success",
        body,
    })
    .into_response()
}

fn map_ledger_error(err: LedgerError) -> ApiFail {
    match err {
        LedgerError::InvalidMeta(m) => ApiFail::bad_request("invalid_meta", m),
        ns @ LedgerError::InvalidNamespace(_) => {
            ApiFail::bad_request("bad_namespace", ns.to_string())
        }
        LedgerError::Query(QueryError::NotTerminal) => {
            ApiFail::bad_request("not_terminal", "submitted block is not a terminal block")
        }
        LedgerError::Query(q) => ApiFail::bad_request("bad_query", q.to_string()),
        other => ApiFail::internal(other.to_string()),
    }
}

type Params = HashMap<String, String>;

fn namespace_param(params: &Params) -> String {
    params
        .get("namespace")
        .cloned()
        .unwrap_or_else(|| "default".to_owned())
}

fn int_param(params: &Params, key: &str) -> Result<Option<i64>, ApiFail> {
    match params.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<i64>().map(Some).map_err(|_| {
            ApiFail::bad_request("invalid_meta", format!("{key} must be an integer, got {raw:?}"))
        }),
    }
}

fn meta_params(params: &Params) -> Result<Option<LogMeta>, ApiFail> {
    let meta = LogMeta {
        file_name: params.get("file_name").cloned(),
        ts_from: int_param(params, "ts_from")?,
        ts_to: int_param(params, "ts_to")?,
    };
    Ok((meta != LogMeta::default()).then_some(meta))
}

fn digest_body(body: &Bytes) -> Result<HexDigest, ApiFail> {
    let text = std::str::from_utf8(body)
        .map_err(|_| ApiFail::bad_request("malformed_digest", "digest body is not UTF-8"))?;
    text.trim()
        .parse::<HexDigest>()
        .map_err(|e| ApiFail::bad_request("malformed_digest", e.to_string()))
}

fn require_content(body: &Bytes) -> Result<(), ApiFail> {
    if body.is_empty() {
        return Err(ApiFail::bad_request(
            "empty_body",
            "request body must contain the log content",
        ));
    }
    Ok(())
}

/// Runs a ledger operation on the blocking pool and maps its error.
async fn blocking<T, F>(f: F) -> Result<T, ApiFail>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, LedgerError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|join| ApiFail::internal(join.to_string()))?
        .map_err(map_ledger_error)
}

async fn submit_raw(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    require_content(&body)?;
    let namespace = namespace_param(&params);
    let meta = meta_params(&params)?;
    let receipt = blocking(move || ledger.submit_raw(&namespace, &body, meta)).await?;
    Ok(ok(receipt))
}

async fn submit_digest(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    let digest = digest_body(&body)?;
    let namespace = namespace_param(&params);
    let meta = meta_params(&params)?;
    let receipt = blocking(move || ledger.submit_digest(&namespace, digest, meta)).await?;
    Ok(ok(receipt))
}

#[derive(Serialize)]
struct LookupResponse {
    digest: HexDigest,
    found: bool,
    #[serde(flatten)]
    matches: crate::verify::DigestMatches,
}

fn lookup(ledger: &Ledger, namespace: &str, digest: HexDigest) -> Result<Response, ApiFail> {
    let matches = ledger
        .find_by_digest(namespace, &digest)
        .map_err(map_ledger_error)?;
    Ok(ok(LookupResponse {
        digest,
        found: matches.count > 0,
        matches,
    }))
}

async fn verify_raw(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    require_content(&body)?;
    lookup(&ledger, &namespace_param(&params), crate::hash::compute_hash(&body))
}

async fn verify_digest(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    let digest = digest_body(&body)?;
    lookup(&ledger, &namespace_param(&params), digest)
}

async fn verify_tb(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    let block: Block = serde_json::from_slice(&body).map_err(|e| {
        ApiFail::bad_request("not_terminal", format!("body is not a terminal block: {e}"))
    })?;
    let report = ledger
        .verify_terminal(&namespace_param(&params), &block)
        .map_err(map_ledger_error)?;
    Ok(ok(report))
}

#[derive(Serialize)]
struct SearchResponse {
    count: usize,
    results: Vec<crate::verify::SearchResult>,
}

async fn search(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
    body: Bytes,
) -> Result<Response, ApiFail> {
    let query: SearchQuery = serde_json::from_slice(&body)
        .map_err(|e| ApiFail::bad_request("bad_query", e.to_string()))?;
    let results = ledger
        .search(&namespace_param(&params), &query)
        .map_err(map_ledger_error)?;
    Ok(ok(SearchResponse {
        count: results.len(),
        results,
    }))
}

#[derive(Serialize)]
struct FlushResponse {
    sealed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    terminal_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    superblock_index: Option<u64>,
}

async fn flush(
    State(ledger): State<Arc<Ledger>>,
    Query(params): Query<Params>,
) -> Result<Response, ApiFail> {
    let namespace = namespace_param(&params);
    let receipt = blocking(move || ledger.flush(&namespace)).await?;
    Ok(ok(match receipt {
        None => FlushResponse {
            sealed: false,
            terminal_index: None,
            superblock_index: None,
        },
        Some(r) => FlushResponse {
            sealed: true,
            terminal_index: Some(r.terminal_index),
            superblock_index: Some(r.superblock_index),
        },
    }))
}

#[derive(Serialize)]
struct StatsResponse {
    ledger_valid: bool,
    difficulty: u32,
    namespaces: Vec<crate::ledger::NamespaceStats>,
}

async fn stats(State(ledger): State<Arc<Ledger>>) -> Response {
    ok(StatsResponse {
        ledger_valid: ledger.is_valid(),
        difficulty: ledger.config().difficulty,
        namespaces: ledger.stats(),
    })
}

async fn health(State(ledger): State<Arc<Ledger>>) -> Response {
    ok(json!({ "health": "ok", "ledger_valid": ledger.is_valid() }))
}

/// Builds the service router over a shared ledger.
pub fn router(ledger: Arc<Ledger>) -> Router {
    Router::new()
        .route("/submit_raw", post(submit_raw))
        .route("/submit_digest", post(submit_digest))
        .route("/verify_raw", post(verify_raw))
        .route("/verify_digest", post(verify_digest))
        .route("/verify_tb", post(verify_tb))
        .route("/search", post(search))
        .route("/flush", post(flush))
        .route("/stats", get(stats))
        .route("/health", get(health))
        .with_state(ledger)
}

/// A running service: its bound address and a graceful-shutdown handle.
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<()>,
}

impl ServiceHandle {
    /// The address actually bound, which is what you want after binding
    /// port 0.
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections, drains in-flight requests, and waits
    /// for the server task to finish.
    pub async fn shutdown(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        let _ = self.task.await;
    }
}

/// Binds `addr` and serves the ledger until the handle is shut down.
pub async fn serve(ledger: Arc<Ledger>, addr: SocketAddr) -> std::io::Result<ServiceHandle> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(ledger);
    let task = tokio::spawn(async move {
        let shutdown = async {
            let _ = rx.await;
        };
        if let Err(err) = axum::serve(listener, app)
            .with_graceful_shutdown(shutdown)
            .await
        {
            eprintln!("lcaas service error: {err}");
        }
    });
    Ok(ServiceHandle {
        addr,
        shutdown: Some(tx),
        task,
    })
}
