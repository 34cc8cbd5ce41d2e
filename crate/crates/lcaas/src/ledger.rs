//! The ledger facade: multi-namespace chain state, persistence, and
//! verification behind one thread-safe handle.
//!
//! A [`Ledger`] owns one ledger directory. Opening it replays every
//! namespace file, verifies each namespace in full, and — in the default
//! writable mode — refuses to start if anything fails verification, so a
//! tampered ledger cannot quietly keep accepting writes. Forensic mode
//! loads the same state but serves it for inspection, reporting the
//! failures instead of refusing; read-only mode additionally never
//! touches the files.
//!
//! Writes follow a single-writer-per-namespace discipline: each namespace
//! has its own lock, mutations mine against a working copy, append the
//! resulting records to the namespace file in one durable write, and only
//! then swap the working copy in. A failed append therefore leaves the
//! committed in-memory state exactly as it was. If the append itself was
//! interrupted (partial bytes may be on disk) the namespace is marked out
//! of sync and refuses further writes until the ledger is reopened, which
//! replays the file and repairs the tail.
//!
//! Reads — digest lookup, search, verification, stats — take the shared
//! side of the namespace lock and see only committed state.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{Block, LogMeta};
use crate::chain::{ChainError, Level, NamespaceLedger};
use crate::config::{Clock, ConfigError, LedgerConfig};
use crate::hash::{compute_hash, HexDigest};
use crate::store::{self, BlobStore, DirLock, LedgerRecord, LoadOptions, StoreError};
use crate::verify::{
    self, DigestIndex, DigestMatches, QueryError, SearchQuery, SearchResult, TbReport,
    VerificationReport,
};

/// Why a ledger operation failed.
#[derive(Debug, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("ledger failed verification at load: {summary}")]
    InvalidLedger { summary: String },
    #[error("ledger was opened read-only")]
    ReadOnly,
    #[error("invalid metadata: {0}")]
    InvalidMeta(String),
    #[error("invalid namespace {0:?}: use 1-64 characters from [A-Za-z0-9_-]")]
    InvalidNamespace(String),
    #[error("namespace {0:?} is out of sync with storage after an interrupted append; reopen the ledger to repair it")]
    OutOfSync(String),
}

/// Acknowledgement of one recorded digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitReceipt {
    pub block_index: u64,
    pub timestamp: i64,
}

/// Acknowledgement of one recorded raw log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSubmitReceipt {
    /// Digest computed over the submitted bytes; what the block records.
    pub digest: HexDigest,
    pub block_index: u64,
    pub timestamp: i64,
    /// Whether the raw bytes were archived in the blob store.
    pub stored: bool,
}

/// Acknowledgement of an explicit chain closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlushReceipt {
    pub terminal_index: u64,
    pub superblock_index: u64,
}

/// Current size counters for one namespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamespaceStats {
    pub namespace: String,
    pub data_blocks: u64,
    pub sealed_chains: u64,
    pub superblocks: u64,
    pub open_chain_len: u64,
}

/// Committed state of one namespace plus its digest index.
struct NamespaceState {
    ledger: NamespaceLedger,
    index: DigestIndex,
    /// Set when an append was interrupted; all further writes are refused
    /// because disk and memory may disagree.
    poisoned: bool,
}

impl NamespaceState {
    fn fresh(namespace: &str) -> NamespaceState {
        NamespaceState {
            ledger: NamespaceLedger::new(namespace),
            index: DigestIndex::default(),
            poisoned: false,
        }
    }

    fn loaded(ledger: NamespaceLedger) -> NamespaceState {
        let index = DigestIndex::build(&ledger);
        NamespaceState {
            ledger,
            index,
            poisoned: false,
        }
    }
}

type SharedNamespace = Arc<RwLock<NamespaceState>>;

/// A ledger directory opened for use. See the module docs for the
/// concurrency and durability contract.
pub struct Ledger {
    cfg: LedgerConfig,
    clock: Clock,
    read_only: bool,
    namespaces: RwLock<BTreeMap<String, SharedNamespace>>,
    blobs: BlobStore,
    /// Verification outcome per namespace as found at open time.
    load_reports: BTreeMap<String, VerificationReport>,
    /// Held for the lifetime of a writable ledger.
    _dir_lock: Option<DirLock>,
}

impl Ledger {
    /// Opens a ledger directory for reading and writing.
    ///
    /// Takes the exclusive writer lock, replays and fully verifies every
    /// namespace, refuses to start if any namespace fails verification,
    /// and completes any promotion a crash interrupted.
    pub fn open(cfg: LedgerConfig, clock: Clock) -> Result<Ledger, LedgerError> {
        Ledger::open_inner(cfg, clock, false, false)
    }

    /// Opens a ledger that failed verification for inspection.
    ///
    /// Identical to [`Ledger::open`] except that verification failures are
    /// reported (via [`Ledger::is_valid`] and [`Ledger::load_reports`])
    /// instead of refusing to start. Namespaces that did load cleanly
    /// remain fully usable; invalid ones are served as-is and never
    /// repaired.
    pub fn open_forensic(cfg: LedgerConfig, clock: Clock) -> Result<Ledger, LedgerError> {
        Ledger::open_inner(cfg, clock, false, true)
    }

    /// Opens a ledger without the writer lock and without ever writing:
    /// no tail repair, no pending-promotion completion, writes refused.
    pub fn open_read_only(cfg: LedgerConfig, clock: Clock) -> Result<Ledger, LedgerError> {
        Ledger::open_inner(cfg, clock, true, true)
    }

    fn open_inner(
        cfg: LedgerConfig,
        clock: Clock,
        read_only: bool,
        forensic: bool,
    ) -> Result<Ledger, LedgerError> {
        cfg.validate()?;
        let dir_lock = if read_only {
            None
        } else {
            Some(DirLock::acquire(&cfg.ledger_dir)?)
        };

        let mut namespaces = BTreeMap::new();
        let mut load_reports = BTreeMap::new();
        for namespace in store::scan_namespaces(&cfg.ledger_dir)? {
            let path = store::ledger_file_path(&cfg.ledger_dir, &namespace);
            let loaded = store::load_namespace(
                &path,
                &namespace,
                LoadOptions {
                    repair_tail: !read_only,
                },
            )?;
            let report = verify::verify_full(&loaded.ledger, cfg.difficulty);
            load_reports.insert(namespace.clone(), report);
            namespaces.insert(
                namespace,
                Arc::new(RwLock::new(NamespaceState::loaded(loaded.ledger))),
            );
        }

        if !forensic {
            if let Some((namespace, report)) = load_reports.iter().find(|(_, r)| !r.valid) {
                let first = &report.failures[0];
                return Err(LedgerError::InvalidLedger {
                    summary: format!(
                        "namespace {:?} has {} failure(s), first: block {} ({})",
                        namespace,
                        report.failures.len(),
                        first.block_index,
                        first.reason
                    ),
                });
            }
        }

        let blobs = BlobStore::new(&cfg.ledger_dir);
        let ledger = Ledger {
            cfg,
            clock,
            read_only,
            namespaces: RwLock::new(namespaces),
            blobs,
            load_reports,
            _dir_lock: dir_lock,
        };
        if !read_only {
            ledger.complete_pending_promotions()?;
        }
        Ok(ledger)
    }

    /// Finishes any seal-then-promote sequence a crash interrupted, in
    /// namespaces that verified cleanly.
    fn complete_pending_promotions(&self) -> Result<(), LedgerError> {
        for (namespace, handle) in self.handles() {
            if !self.load_reports.get(&namespace).is_none_or(|r| r.valid) {
                continue;
            }
            let mut state = handle.write();
            if !state.ledger.has_pending_promotion() {
                continue;
            }
            let mut work = state.ledger.clone();
            let outcome = work.close_open_chain(&self.cfg, self.clock.now())?;
            if let Some(outcome) = outcome {
                self.commit(&namespace, &mut state, work, outcome.records)?;
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &LedgerConfig {
        &self.cfg
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn is_read_only(&self) -> bool {
        self.read_only
    }

    /// Whether every namespace passed verification when the ledger was
    /// opened.
    pub fn is_valid(&self) -> bool {
        self.load_reports.values().all(|r| r.valid)
    }

    /// Per-namespace verification reports captured at open time.
    pub fn load_reports(&self) -> &BTreeMap<String, VerificationReport> {
        &self.load_reports
    }

    /// Raw-log archive of this ledger directory.
    pub fn blobs(&self) -> &BlobStore {
        &self.blobs
    }

    /// Names of all namespaces currently present, sorted.
    pub fn namespaces(&self) -> Vec<String> {
        self.namespaces.read().keys().cloned().collect()
    }

    fn handles(&self) -> Vec<(String, SharedNamespace)> {
        self.namespaces
            .read()
            .iter()
            .map(|(name, handle)| (name.clone(), handle.clone()))
            .collect()
    }

    fn handle(&self, namespace: &str, create: bool) -> Result<Option<SharedNamespace>, LedgerError> {
        validate_namespace(namespace)?;
        {
            let map = self.namespaces.read();
            if let Some(handle) = map.get(namespace) {
                return Ok(Some(handle.clone()));
            }
        }
        if !create {
            return Ok(None);
        }
        let mut map = self.namespaces.write();
        let handle = map
            .entry(namespace.to_owned())
            .or_insert_with(|| Arc::new(RwLock::new(NamespaceState::fresh(namespace))))
            .clone();
        Ok(Some(handle))
    }

    fn ensure_writable(&self) -> Result<(), LedgerError> {
        if self.read_only {
            return Err(LedgerError::ReadOnly);
        }
        Ok(())
    }

    /// Appends `records` durably, then swaps `work` in as the committed
    /// state. On a clean failure (nothing written) the committed state is
    /// untouched; on an interrupted append the namespace is poisoned.
    fn commit(
        &self,
        namespace: &str,
        state: &mut NamespaceState,
        work: NamespaceLedger,
        records: Vec<(Level, Block)>,
    ) -> Result<(), LedgerError> {
        let records: Vec<LedgerRecord> = records
            .into_iter()
            .map(|(level, block)| LedgerRecord {
                namespace: namespace.to_owned(),
                level,
                block,
            })
            .collect();
        let path = store::ledger_file_path(&self.cfg.ledger_dir, namespace);
        match store::append_records(&path, &records) {
            Ok(()) => {
                state.ledger = work;
                Ok(())
            }
            Err(interrupted @ StoreError::AppendInterrupted { .. }) => {
                state.poisoned = true;
                Err(interrupted.into())
            }
            Err(clean_failure) => Err(clean_failure.into()),
        }
    }

    /// Records a log digest in the namespace, creating the namespace (and
    /// its absolute genesis) on first use. May seal the open chain and
    /// mine its superblock in the same call.
    pub fn submit_digest(
        &self,
        namespace: &str,
        digest: HexDigest,
        meta: Option<LogMeta>,
    ) -> Result<SubmitReceipt, LedgerError> {
        self.ensure_writable()?;
        validate_meta(meta.as_ref())?;
        let handle = self
            .handle(namespace, true)?
            .expect("handle is created on demand");
        let mut state = handle.write();
        if state.poisoned {
            return Err(LedgerError::OutOfSync(namespace.to_owned()));
        }

        // Where the new block will land: the open chain's ordinal.
        let chain_ordinal = state.ledger.sealed_chains().len() as u64;
        let mut work = state.ledger.clone();
        let outcome = work.ingest(digest.clone(), meta, &self.cfg, self.clock.now())?;
        let receipt = SubmitReceipt {
            block_index: outcome.block_index,
            timestamp: outcome.timestamp,
        };
        self.commit(namespace, &mut state, work, outcome.records)?;
        state.index.record(&digest, receipt.block_index, chain_ordinal);
        Ok(receipt)
    }

    /// Records a raw log: hashes it, archives the bytes when the ledger
    /// is configured to store raw content, and records the digest.
    pub fn submit_raw(
        &self,
        namespace: &str,
        content: &[u8],
        meta: Option<LogMeta>,
    ) -> Result<RawSubmitReceipt, LedgerError> {
        self.ensure_writable()?;
        let digest = compute_hash(content);
        let stored = if self.cfg.store_raw {
            self.blobs.store(content)?;
            true
        } else {
            false
        };
        let receipt = self.submit_digest(namespace, digest.clone(), meta)?;
        Ok(RawSubmitReceipt {
            digest,
            block_index: receipt.block_index,
            timestamp: receipt.timestamp,
            stored,
        })
    }

    /// Closes the namespace's open chain now, without waiting for
    /// capacity or the window. Returns `None` when there is nothing to
    /// seal (no namespace, no open chain, or an empty one).
    pub fn flush(&self, namespace: &str) -> Result<Option<FlushReceipt>, LedgerError> {
        self.ensure_writable()?;
        let Some(handle) = self.handle(namespace, false)? else {
            return Ok(None);
        };
        let mut state = handle.write();
        if state.poisoned {
            return Err(LedgerError::OutOfSync(namespace.to_owned()));
        }
        let mut work = state.ledger.clone();
        match work.close_open_chain(&self.cfg, self.clock.now())? {
            None => Ok(None),
            Some(outcome) => {
                self.commit(namespace, &mut state, work, outcome.records)?;
                Ok(Some(FlushReceipt {
                    terminal_index: outcome.terminal_index,
                    superblock_index: outcome.superblock_index,
                }))
            }
        }
    }

    /// Looks up a digest in the namespace's index. Unknown namespaces
    /// simply report zero matches.
    pub fn find_by_digest(
        &self,
        namespace: &str,
        digest: &HexDigest,
    ) -> Result<DigestMatches, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(DigestMatches {
                count: 0,
                locations: Vec::new(),
            }),
            Some(handle) => {
                let state = handle.read();
                let sealed = state.ledger.sealed_chains().len() as u64;
                Ok(state.index.find(digest, sealed))
            }
        }
    }

    /// Runs one search query over the namespace's committed chains.
    pub fn search(
        &self,
        namespace: &str,
        query: &SearchQuery,
    ) -> Result<Vec<SearchResult>, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(Vec::new()),
            Some(handle) => Ok(verify::search(&handle.read().ledger, query)),
        }
    }

    /// Checks a held terminal block against the namespace's committed
    /// superblocks; see [`verify::verify_tb`].
    pub fn verify_terminal(
        &self,
        namespace: &str,
        block: &Block,
    ) -> Result<TbReport, LedgerError> {
        match self.handle(namespace, false)? {
            Some(handle) => Ok(verify::verify_tb(&handle.read().ledger, block)?),
            // No such namespace: nothing is embedded anywhere, but the
            // submission is still type-checked and self-hash-checked.
            None => Ok(verify::verify_tb(
                &NamespaceLedger::new(namespace),
                block,
            )?),
        }
    }

    /// Fully verifies one namespace's current committed state.
    pub fn verify_namespace(
        &self,
        namespace: &str,
    ) -> Result<Option<VerificationReport>, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(None),
            Some(handle) => Ok(Some(verify::verify_full(
                &handle.read().ledger,
                self.cfg.difficulty,
            ))),
        }
    }

    /// Fully verifies the current committed state of every namespace.
    pub fn verify_all(&self) -> BTreeMap<String, VerificationReport> {
        self.handles()
            .into_iter()
            .map(|(namespace, handle)| {
                let report = verify::verify_full(&handle.read().ledger, self.cfg.difficulty);
                (namespace, report)
            })
            .collect()
    }

    /// Upper-level-only verification of one namespace.
    pub fn verify_upper(&self, namespace: &str) -> Result<Option<VerificationReport>, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(None),
            Some(handle) => Ok(Some(verify::verify_upper(
                handle.read().ledger.superchain(),
                self.cfg.difficulty,
            ))),
        }
    }

    /// Size counters for every namespace, sorted by name.
    pub fn stats(&self) -> Vec<NamespaceStats> {
        self.handles()
            .into_iter()
            .map(|(namespace, handle)| {
                let state = handle.read();
                let ledger = &state.ledger;
                NamespaceStats {
                    namespace,
                    data_blocks: ledger.data_block_count(),
                    sealed_chains: ledger.sealed_chains().len() as u64,
                    superblocks: ledger.superchain().superblocks().len() as u64,
                    open_chain_len: ledger.open_chain().map_or(0, |c| c.len() as u64),
                }
            })
            .collect()
    }

    /// The namespace's full record sequence in file order; empty for
    /// unknown namespaces.
    pub fn export_records(&self, namespace: &str) -> Result<Vec<LedgerRecord>, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(Vec::new()),
            Some(handle) => Ok(store::export_records(&handle.read().ledger)),
        }
    }

    /// Clones the committed chain state of one namespace.
    pub fn snapshot(&self, namespace: &str) -> Result<Option<NamespaceLedger>, LedgerError> {
        match self.handle(namespace, false)? {
            None => Ok(None),
            Some(handle) => Ok(Some(handle.read().ledger.clone())),
        }
    }
}

fn validate_namespace(namespace: &str) -> Result<(), LedgerError> {
    let well_formed = !namespace.is_empty()
        && namespace.len() <= 64
        && namespace
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    if !well_formed {
        return Err(LedgerError::InvalidNamespace(namespace.to_owned()));
    }
    Ok(())
}

fn validate_meta(meta: Option<&LogMeta>) -> Result<(), LedgerError> {
    if let Some(meta) = meta {
        if let (Some(from), Some(to)) = (meta.ts_from, meta.ts_to) {
            if from > to {
                return Err(LedgerError::InvalidMeta(format!(
                    "ts_from {from} exceeds ts_to {to}"
                )));
            }
        }
    }
    Ok(())
}
