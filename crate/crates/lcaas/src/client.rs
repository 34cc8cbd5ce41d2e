//! Typed client for the HTTP service.
//!
//! [`ServiceClient`] wraps one base URL and exposes a method per
//! endpoint, decoding the JSON envelope into the same types the ledger
//! itself uses. A `"status": "failed"` response becomes
//! [`ClientError::Api`] carrying the service's stable error code, so
//! callers can match on `code` (`empty_body`, `malformed_digest`, …)
//! without parsing messages.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use crate::block::{Block, LogMeta};
use crate::hash::HexDigest;
use crate::ledger::{NamespaceStats, RawSubmitReceipt, SubmitReceipt};
use crate::verify::{DigestLocation, SearchQuery, SearchResult, TbReport};

/// Why a service call failed.
#[derive(Debug, Error)]
pub enum ClientError {
    /// The request never produced a JSON envelope: connection refused,
    /// timeout, non-JSON body, and similar transport failures.
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    /// The service answered with a failure envelope.
    #[error("service error [{code}]: {message}")]
    Api { code: String, message: String },
    /// The service answered with JSON this client does not understand.
    #[error("unexpected response shape: {0}")]
    Decode(String),
}

impl ClientError {
    /// The stable error code, when the failure came from the service.
    pub fn api_code(&self) -> Option<&str> {
        match self {
            ClientError::Api { code, .. } => Some(code),
            _ => None,
        }
    }
}

/// Outcome of `/verify_raw` or `/verify_digest`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LookupReport {
    /// The digest that was looked up (computed server-side for raw
    /// content).
    pub digest: HexDigest,
    pub found: bool,
    pub count: u64,
    pub locations: Vec<DigestLocation>,
}

/// Outcome of `/search`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SearchOutcome {
    pub count: u64,
    pub results: Vec<SearchResult>,
}

/// Outcome of `/flush`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct FlushOutcome {
    pub sealed: bool,
    pub terminal_index: Option<u64>,
    pub superblock_index: Option<u64>,
}

/// Outcome of `/stats`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct StatsReport {
    pub ledger_valid: bool,
    pub difficulty: u32,
    pub namespaces: Vec<NamespaceStats>,
}

/// Outcome of `/health`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct HealthReport {
    pub health: String,
    pub ledger_valid: bool,
}

/// One service endpoint, addressed by base URL.
#[derive(Debug, Clone)]
pub struct ServiceClient {
    base: String,
    http: reqwest::Client,
}

impl ServiceClient {
    pub fn new(base_url: &str) -> ServiceClient {
        ServiceClient {
            base: base_url.trim_end_matches('/').to_owned(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    async fn read<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let value: serde_json::Value = resp.json().await?;
        match value.get("status").and_then(|s| s.as_str()) {
            Some("success") => {
                serde_json::from_value(value).map_err(|e| ClientError::Decode(e.to_string()))
            }
            Some("failed") => {
                let text = |ptr: &str| {
                    value
                        .pointer(ptr)
                        .and_then(|v| v.as_str())
                        .unwrap_or("unknown")
                        .to_owned()
                };
                Err(ClientError::Api {
                    code: text("/error/code"),
                    message: text("/error/message"),
                })
            }
            _ => Err(ClientError::Decode(format!("no status field in {value}"))),
        }
    }

    fn meta_query(meta: Option<&LogMeta>) -> Vec<(&'static str, String)> {
        let mut pairs = Vec::new();
        if let Some(meta) = meta {
            if let Some(name) = &meta.file_name {
                pairs.push(("file_name", name.clone()));
            }
            if let Some(from) = meta.ts_from {
                pairs.push(("ts_from", from.to_string()));
            }
            if let Some(to) = meta.ts_to {
                pairs.push(("ts_to", to.to_string()));
            }
        }
        pairs
    }

    /// POST `/submit_raw`: ships the log bytes; the service hashes and
    /// records them.
    pub async fn submit_raw(
        &self,
        namespace: &str,
        content: Vec<u8>,
        meta: Option<&LogMeta>,
    ) -> Result<RawSubmitReceipt, ClientError> {
        let resp = self
            .http
            .post(self.url("/submit_raw"))
            .query(&[("namespace", namespace)])
            .query(&Self::meta_query(meta))
            .body(content)
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/submit_digest`: records a digest computed by the caller.
    pub async fn submit_digest(
        &self,
        namespace: &str,
        digest: &HexDigest,
        meta: Option<&LogMeta>,
    ) -> Result<SubmitReceipt, ClientError> {
        let resp = self
            .http
            .post(self.url("/submit_digest"))
            .query(&[("namespace", namespace)])
            .query(&Self::meta_query(meta))
            .body(digest.to_string())
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/verify_raw`: is this exact content recorded?
    pub async fn verify_raw(
        &self,
        namespace: &str,
        content: Vec<u8>,
    ) -> Result<LookupReport, ClientError> {
        let resp = self
            .http
            .post(self.url("/verify_raw"))
            .query(&[("namespace", namespace)])
            .body(content)
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/verify_digest`: is this digest recorded?
    pub async fn verify_digest(
        &self,
        namespace: &str,
        digest: &HexDigest,
    ) -> Result<LookupReport, ClientError> {
        let resp = self
            .http
            .post(self.url("/verify_digest"))
            .query(&[("namespace", namespace)])
            .body(digest.to_string())
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/verify_tb`: checks a held terminal block against the
    /// service's superblocks.
    pub async fn verify_terminal(
        &self,
        namespace: &str,
        block: &Block,
    ) -> Result<TbReport, ClientError> {
        let resp = self
            .http
            .post(self.url("/verify_tb"))
            .query(&[("namespace", namespace)])
            .json(block)
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/search`: runs one query over the namespace.
    pub async fn search(
        &self,
        namespace: &str,
        query: &SearchQuery,
    ) -> Result<SearchOutcome, ClientError> {
        let resp = self
            .http
            .post(self.url("/search"))
            .query(&[("namespace", namespace)])
            .json(query)
            .send()
            .await?;
        Self::read(resp).await
    }

    /// POST `/flush`: closes the namespace's open chain now.
    pub async fn flush(&self, namespace: &str) -> Result<FlushOutcome, ClientError> {
        let resp = self
            .http
            .post(self.url("/flush"))
            .query(&[("namespace", namespace)])
            .send()
            .await?;
        Self::read(resp).await
    }

    /// GET `/stats`.
    pub async fn stats(&self) -> Result<StatsReport, ClientError> {
        let resp = self.http.get(self.url("/stats")).send().await?;
        Self::read(resp).await
    }

    /// GET `/health`.
    pub async fn health(&self) -> Result<HealthReport, ClientError> {
        let resp = self.http.get(self.url("/health")).send().await?;
        Self::read(resp).await
    }
}
