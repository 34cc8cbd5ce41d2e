//! Append-only persistence: one JSON Lines file per namespace, plus a
//! content-addressed blob store for raw log payloads.
//!
//! Every block is written as one canonical-JSON line (sorted keys, compact)
//! the moment it is created, in creation order. Nothing is ever rewritten
//! in place, so the file doubles as an audit trail: replaying its lines
//! reproduces the exact chain state, and re-serializing that state
//! reproduces the exact file bytes.
//!
//! The only sanctioned mutations besides appending are crash repairs on a
//! writable open: a torn final line (a write interrupted mid-record) is
//! truncated away, and a final record whose newline was lost is
//! re-terminated. A line that fails to parse anywhere *before* the tail —
//! or any line that parses but is semantically impossible, like a block
//! whose kind contradicts its payload — is corruption and refuses to load,
//! because no interrupted append of this writer can produce it.
//!
//! Writer exclusivity per ledger directory is enforced with a lock file;
//! see [`DirLock`].

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{canonical_json, Block, BlockKind};
use crate::chain::{CircledBlockchain, Level, NamespaceLedger, Superblockchain};
use crate::hash::{compute_hash, HexDigest};

/// Ledger files are named `<namespace>` + this suffix.
pub const LEDGER_FILE_SUFFIX: &str = ".ledger.jsonl";

/// Subdirectory of the ledger directory holding raw log payloads.
pub const BLOB_DIR_NAME: &str = "blobs";

/// Name of the exclusive-writer lock file inside a ledger directory.
pub const LOCK_FILE_NAME: &str = "lcaas.lock";

/// One persisted line: a block, its level, and the namespace it belongs
/// to (recorded redundantly so a stray file is self-describing).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRecord {
    pub namespace: String,
    pub level: Level,
    pub block: Block,
}

/// Why a persistence operation failed.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("ledger I/O failed: {0}")]
    Io(#[from] io::Error),
    /// The append may have landed partially; in-memory and on-disk state
    /// can no longer be assumed to agree.
    #[error("append to {path} was interrupted: {source}")]
    AppendInterrupted { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: corrupt ledger record: {message}")]
    CorruptRecord {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: record out of order: {message}")]
    OutOfOrder {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("ledger directory is already locked by another writer ({path})")]
    Locked { path: PathBuf },
}

/// Path of the ledger file for one namespace.
pub fn ledger_file_path(dir: &Path, namespace: &str) -> PathBuf {
    dir.join(format!("{namespace}{LEDGER_FILE_SUFFIX}"))
}

/// Canonical one-line rendering of a record, without the newline.
pub fn record_line(record: &LedgerRecord) -> String {
    canonical_json(record)
}

/// Appends records as canonical JSON lines in one write, then syncs.
///
/// All lines are buffered and written with a single `write_all`, so an
/// interruption can only tear the final line — which the loader knows how
/// to repair. An error opening the file means nothing was written; an
/// error during the write or sync is reported as
/// [`StoreError::AppendInterrupted`] because partial bytes may be on disk.
pub fn append_records(path: &Path, records: &[LedgerRecord]) -> Result<(), StoreError> {
    if records.is_empty() {
        return Ok(());
    }
    let mut buffer = String::new();
    for record in records {
        buffer.push_str(&record_line(record));
        buffer.push('\n');
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(buffer.as_bytes())
        .and_then(|()| file.sync_all())
        .map_err(|source| StoreError::AppendInterrupted {
            path: path.to_path_buf(),
            source,
        })
}

/// How [`load_namespace`] treats a torn tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Repair the file in place: truncate a torn final line, re-terminate
    /// an unterminated final record. Read-only callers leave the file
    /// untouched and repair in memory only.
    pub repair_tail: bool,
}

/// Result of loading one namespace file.
#[derive(Debug)]
pub struct LoadedNamespace {
    pub ledger: NamespaceLedger,
    /// Whether a torn final line was discarded.
    pub dropped_partial_tail: bool,
}

struct ParseFailure {
    message: String,
    /// Semantic failures (wrong namespace, kind/payload disagreement) are
    /// corruption wherever they occur; only plain JSON parse failures are
    /// eligible for the crash-tail rule.
    semantic: bool,
}

fn parse_record(bytes: &[u8], namespace: &str) -> Result<LedgerRecord, ParseFailure> {
    let syntactic = |message: String| ParseFailure {
        message,
        semantic: false,
    };
    let semantic = |message: String| ParseFailure {
        message,
        semantic: true,
    };

    let text = std::str::from_utf8(bytes).map_err(|e| syntactic(e.to_string()))?;
    if text.trim().is_empty() {
        return Err(syntactic("blank line".to_owned()));
    }
    let record: LedgerRecord =
        serde_json::from_str(text).map_err(|e| syntactic(e.to_string()))?;

    if record.namespace != namespace {
        return Err(semantic(format!(
            "record belongs to namespace {:?}",
            record.namespace
        )));
    }
    if !record.block.data.matches_kind(record.block.kind) {
        return Err(semantic(format!(
            "payload does not belong to a {:?} block",
            record.block.kind
        )));
    }
    let expected_level = match record.block.kind {
        BlockKind::Super => Level::Super,
        _ => Level::Lower,
    };
    if record.level != expected_level {
        return Err(semantic(format!(
            "{:?} block recorded at level {:?}",
            record.block.kind, record.level
        )));
    }
    Ok(record)
}

/// Replays one namespace file into chain state.
///
/// Enforces the structural grammar of the file — genesis opens a chain,
/// data extends it, terminal seals it, superblock archives it — and
/// reports violations with their line number. Hashes are *not* checked
/// here; that is [`crate::verify`]'s job, so that a tampered file can be
/// loaded for inspection and judged explicitly.
pub fn load_namespace(
    path: &Path,
    namespace: &str,
    options: LoadOptions,
) -> Result<LoadedNamespace, StoreError> {
    let bytes = fs::read(path)?;
    let mut builder = NamespaceBuilder::new(namespace);
    let mut line_no = 0u64;
    let mut dropped_partial_tail = false;
    let mut truncate_at: Option<u64> = None;
    let mut missing_final_newline = false;

    let mut start = 0usize;
    while start < bytes.len() {
        let (end, has_newline) = match bytes[start..].iter().position(|b| *b == b'\n') {
            Some(offset) => (start + offset, true),
            None => (bytes.len(), false),
        };
        let is_final = if has_newline { end + 1 >= bytes.len() } else { true };
        line_no += 1;

        match parse_record(&bytes[start..end], namespace) {
            Ok(record) => {
                builder.apply(record, path, line_no)?;
                if !has_newline {
                    missing_final_newline = true;
                }
            }
            Err(failure) if is_final && !failure.semantic => {
                // Crash tail: an append interrupted mid-record. The record
                // never committed; discard it.
                dropped_partial_tail = true;
                truncate_at = Some(start as u64);
            }
            Err(failure) => {
                return Err(StoreError::CorruptRecord {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: failure.message,
                });
            }
        }
        start = end + 1;
    }

    if options.repair_tail {
        if let Some(offset) = truncate_at {
            let file = OpenOptions::new().write(true).open(path)?;
            file.set_len(offset)?;
            file.sync_all()?;
        } else if missing_final_newline {
            let mut file = OpenOptions::new().append(true).open(path)?;
            file.write_all(b"\n")?;
            file.sync_all()?;
        }
    }

    Ok(LoadedNamespace {
        ledger: builder.finish(),
        dropped_partial_tail,
    })
}

/// Accumulates records in file order into chain state.
struct NamespaceBuilder {
    namespace: String,
    superblocks: Vec<Block>,
    sealed: Vec<CircledBlockchain>,
    open: Option<(Block, Vec<Block>, Option<Block>)>,
}

impl NamespaceBuilder {
    fn new(namespace: &str) -> NamespaceBuilder {
        NamespaceBuilder {
            namespace: namespace.to_owned(),
            superblocks: Vec::new(),
            sealed: Vec::new(),
            open: None,
        }
    }

    fn apply(&mut self, record: LedgerRecord, path: &Path, line: u64) -> Result<(), StoreError> {
        let out_of_order = |message: &str| StoreError::OutOfOrder {
            path: path.to_path_buf(),
            line,
            message: message.to_owned(),
        };
        let block = record.block;
        match block.kind {
            BlockKind::AbsoluteGenesis => {
                if self.open.is_some() || !self.sealed.is_empty() || !self.superblocks.is_empty() {
                    return Err(out_of_order("absolute genesis must be the first record"));
                }
                self.open = Some((block, Vec::new(), None));
            }
            BlockKind::RelativeGenesis => {
                if self.open.is_some() {
                    return Err(out_of_order("genesis while a chain is already open"));
                }
                if self.superblocks.is_empty() {
                    return Err(out_of_order("relative genesis before any superblock"));
                }
                self.open = Some((block, Vec::new(), None));
            }
            BlockKind::Data => {
                let (_, data, terminal) = self
                    .open
                    .as_mut()
                    .ok_or_else(|| out_of_order("data block with no open chain"))?;
                if terminal.is_some() {
                    return Err(out_of_order("data block after the chain was sealed"));
                }
                data.push(block);
            }
            BlockKind::Terminal => {
                let (_, data, terminal) = self
                    .open
                    .as_mut()
                    .ok_or_else(|| out_of_order("terminal block with no open chain"))?;
                if terminal.is_some() {
                    return Err(out_of_order("chain sealed twice"));
                }
                if data.is_empty() {
                    return Err(out_of_order("terminal block on an empty chain"));
                }
                *terminal = Some(block);
            }
            BlockKind::Super => {
                let (genesis, data, terminal) = self
                    .open
                    .take()
                    .ok_or_else(|| out_of_order("superblock with no chain to archive"))?;
                if terminal.is_none() {
                    return Err(out_of_order("superblock before the chain was sealed"));
                }
                self.sealed
                    .push(CircledBlockchain::from_parts(genesis, data, terminal));
                self.superblocks.push(block);
            }
        }
        Ok(())
    }

    fn finish(self) -> NamespaceLedger {
        let open = self
            .open
            .map(|(genesis, data, terminal)| CircledBlockchain::from_parts(genesis, data, terminal));
        NamespaceLedger::from_parts(
            Superblockchain::from_parts(self.namespace, self.superblocks, open),
            self.sealed,
        )
    }
}

/// Reconstructs the full record sequence of a namespace in file order:
/// per archived chain its genesis, data blocks, terminal block, and the
/// superblock that archived it; then the open chain.
///
/// Rendering these through [`record_line`] reproduces the namespace's
/// ledger file byte for byte.
pub fn export_records(ledger: &NamespaceLedger) -> Vec<LedgerRecord> {
    let namespace = ledger.namespace().to_owned();
    let mut records = Vec::new();
    let mut push = |level: Level, block: &Block| {
        records.push(LedgerRecord {
            namespace: namespace.clone(),
            level,
            block: block.clone(),
        });
    };

    let superblocks = ledger.superchain().superblocks();
    for (k, chain) in ledger.sealed_chains().iter().enumerate() {
        push(Level::Lower, chain.genesis());
        for block in chain.data_blocks() {
            push(Level::Lower, block);
        }
        if let Some(terminal) = chain.terminal() {
            push(Level::Lower, terminal);
        }
        if let Some(superblock) = superblocks.get(k) {
            push(Level::Super, superblock);
        }
    }
    // Superblocks beyond the archived chains cannot arise from replay,
    // but exporting must never silently lose blocks.
    for superblock in superblocks.iter().skip(ledger.sealed_chains().len()) {
        push(Level::Super, superblock);
    }
    if let Some(chain) = ledger.open_chain() {
        push(Level::Lower, chain.genesis());
        for block in chain.data_blocks() {
            push(Level::Lower, block);
        }
        if let Some(terminal) = chain.terminal() {
            push(Level::Lower, terminal);
        }
    }
    records
}

/// Lists the namespaces with a ledger file in `dir`, sorted by name.
pub fn scan_namespaces(dir: &Path) -> Result<Vec<String>, StoreError> {
    let entries = match fs::read_dir(dir) {
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        other => other?,
    };
    let mut namespaces = Vec::new();
    for entry in entries {
        let name = entry?.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(namespace) = name.strip_suffix(LEDGER_FILE_SUFFIX) {
            if !namespace.is_empty() {
                namespaces.push(namespace.to_owned());
            }
        }
    }
    namespaces.sort();
    Ok(namespaces)
}

/// Content-addressed storage for raw log payloads: each blob lives at
/// `blobs/<sha256-hex>`, so storing is idempotent and a stored log can
/// always be re-verified against the digest its block recorded.
#[derive(Debug, Clone)]
pub struct BlobStore {
    root: PathBuf,
}

impl BlobStore {
    pub fn new(ledger_dir: &Path) -> BlobStore {
        BlobStore {
            root: ledger_dir.join(BLOB_DIR_NAME),
        }
    }

    /// Stores `content` under its digest and returns the digest. Writing
    /// goes through a temporary file plus rename so a crash cannot leave
    /// a half-written blob under a valid digest name.
    pub fn store(&self, content: &[u8]) -> Result<HexDigest, StoreError> {
        let digest = compute_hash(content);
        let path = self.root.join(digest.as_str());
        if path.exists() {
            // Same digest means same bytes; nothing to do.
            return Ok(digest);
        }
        fs::create_dir_all(&self.root)?;
        let tmp = self.root.join(format!("{digest}.tmp"));
        let mut file = File::create(&tmp)?;
        file.write_all(content).and_then(|()| file.sync_all())?;
        drop(file);
        fs::rename(&tmp, &path)?;
        Ok(digest)
    }

    pub fn contains(&self, digest: &HexDigest) -> bool {
        self.root.join(digest.as_str()).exists()
    }

    pub fn read(&self, digest: &HexDigest) -> Result<Vec<u8>, StoreError> {
        Ok(fs::read(self.root.join(digest.as_str()))?)
    }
}

/// Exclusive-writer lock for a ledger directory, held for the lifetime of
/// the value and released on drop.
///
/// Implemented as a `create_new` lock file recording the holder's PID. If
/// a writer dies without unwinding (SIGKILL, power loss) the stale file
/// must be removed by hand; the error message points at it.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<DirLock, StoreError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(LOCK_FILE_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = write!(file, "{}", std::process::id());
                Ok(DirLock { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked { path }),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
