//! Blocks, their canonical encoding, and proof-of-work mining.
//!
//! A block binds six fields — nonce, index, timestamp, payload, previous
//! hash, current hash — where the current hash is the SHA-256 of the
//! canonical encoding of the other five. Mining searches nonces `0, 1, 2,
//! …` until the hash carries the required number of leading `'0'`
//! characters, so for fixed inputs the mined nonce (and therefore the whole
//! block) is deterministic.
//!
//! The canonical encoding is the UTF-8 byte string
//! `{nonce}|{index}|{timestamp}|{payload}|{previous_hash}` with integers in
//! decimal and the payload as compact JSON with lexicographically sorted
//! keys (`null` for genesis blocks). Two blocks agree on their hash exactly
//! when they agree on these bytes, which is what makes independent
//! re-verification possible.
//!
//! Genesis blocks are never mined: an absolute genesis has both hashes
//! fixed to the all-zero digest, and a relative genesis carries the
//! current hash of the terminal block embedded in the previous superblock
//! as both its previous and current hash. That copied hash is what chains
//! a new circled blockchain to the already-promoted history.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hash::{compute_hash, meets_difficulty, HexDigest};

/// Nonce search gives up once the nonce would exceed this bound (2^32).
pub const MAX_NONCE: u64 = 1 << 32;

/// Role of a block within the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// First genesis of a namespace; both hashes are the zero digest.
    AbsoluteGenesis,
    /// Genesis of every later circled blockchain; anchored to the previous
    /// superblock's embedded terminal hash.
    RelativeGenesis,
    /// Mined block recording one log digest.
    Data,
    /// Mined block that closes a circled blockchain.
    Terminal,
    /// Mined upper-level block embedding a promoted terminal block.
    Super,
}

impl BlockKind {
    /// Genesis blocks are fixed by definition; everything else is mined.
    pub fn is_mined(self) -> bool {
        matches!(self, BlockKind::Data | BlockKind::Terminal | BlockKind::Super)
    }

    pub fn is_genesis(self) -> bool {
        !self.is_mined()
    }
}

/// Optional descriptive metadata attached to a submitted log.
///
/// `ts_from`/`ts_to` describe the time span covered by the log's records,
/// which is distinct from the block timestamp (the ingestion time).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LogMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts_from: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts_to: Option<i64>,
}

impl LogMeta {
    pub fn is_empty(&self) -> bool {
        self.file_name.is_none() && self.ts_from.is_none() && self.ts_to.is_none()
    }

    /// The closed record-time interval this metadata claims, if any.
    ///
    /// A single stated endpoint yields the degenerate interval at that
    /// point; no stated endpoints yields `None`.
    pub fn record_interval(&self) -> Option<(i64, i64)> {
        match (self.ts_from, self.ts_to) {
            (Some(from), Some(to)) => Some((from, to)),
            (Some(from), None) => Some((from, from)),
            (None, Some(to)) => Some((to, to)),
            (None, None) => None,
        }
    }
}

/// Payload of a data block: the log digest plus optional metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPayload {
    pub digest: HexDigest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<LogMeta>,
}

/// Payload of a terminal block: the seal over one circled blockchain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalPayload {
    /// SHA-256 over the concatenated current hashes of the genesis and
    /// every data block of the sealed chain, in index order.
    pub aggr_hash: HexDigest,
    /// Earliest data-block timestamp in the sealed chain.
    pub timestamp_from: i64,
    /// Latest data-block timestamp in the sealed chain.
    pub timestamp_to: i64,
    /// Index of the first data block in the sealed chain.
    pub block_index_from: u64,
    /// Index of the last data block in the sealed chain.
    pub block_index_to: u64,
}

/// A terminal block copied verbatim into a superblock's payload.
///
/// All six fields of the promoted terminal block are retained, so the
/// upper level alone suffices to re-verify the terminal block's hash and
/// to recover the aggregate hash it notarized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddedTerminal {
    pub nonce: u64,
    pub index: u64,
    pub timestamp: i64,
    pub data: TerminalPayload,
    pub previous_hash: HexDigest,
    pub current_hash: HexDigest,
}

impl EmbeddedTerminal {
    /// Copies the fields of a terminal block for promotion.
    pub fn from_block(tb: &Block) -> Result<EmbeddedTerminal, BlockError> {
        match (&tb.kind, &tb.data) {
            (BlockKind::Terminal, BlockPayload::Terminal(payload)) => Ok(EmbeddedTerminal {
                nonce: tb.nonce,
                index: tb.index,
                timestamp: tb.timestamp,
                data: payload.clone(),
                previous_hash: tb.previous_hash.clone(),
                current_hash: tb.current_hash.clone(),
            }),
            _ => Err(BlockError::NotTerminal { index: tb.index }),
        }
    }

    /// Field-for-field comparison against a stored terminal block.
    pub fn matches(&self, tb: &Block) -> bool {
        tb.kind == BlockKind::Terminal
            && tb.nonce == self.nonce
            && tb.index == self.index
            && tb.timestamp == self.timestamp
            && tb.previous_hash == self.previous_hash
            && tb.current_hash == self.current_hash
            && matches!(&tb.data, BlockPayload::Terminal(p) if *p == self.data)
    }

    /// Recomputes the embedded terminal block's hash from the embedded
    /// fields alone.
    pub fn recomputed_hash(&self) -> HexDigest {
        let payload = BlockPayload::Terminal(self.data.clone());
        compute_hash(&canonical_encoding(
            self.nonce,
            self.index,
            self.timestamp,
            &payload,
            &self.previous_hash,
        ))
    }
}

/// The payload (`data` field) of a block.
///
/// Serialized as JSON `null` for genesis blocks and as
/// `{"kind": "...", "fields": {...}}` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockPayload {
    Genesis,
    Data(DataPayload),
    Terminal(TerminalPayload),
    Super(EmbeddedTerminal),
}

impl BlockPayload {
    pub fn data(digest: HexDigest, meta: Option<LogMeta>) -> BlockPayload {
        // Empty metadata carries no information; normalize it away so the
        // canonical encoding cannot differ over a meaningless distinction.
        let meta = meta.filter(|m| !m.is_empty());
        BlockPayload::Data(DataPayload { digest, meta })
    }

    /// Whether this payload is legal for a block of the given kind.
    pub fn matches_kind(&self, kind: BlockKind) -> bool {
        matches!(
            (self, kind),
            (BlockPayload::Genesis, BlockKind::AbsoluteGenesis)
                | (BlockPayload::Genesis, BlockKind::RelativeGenesis)
                | (BlockPayload::Data(_), BlockKind::Data)
                | (BlockPayload::Terminal(_), BlockKind::Terminal)
                | (BlockPayload::Super(_), BlockKind::Super)
        )
    }
}

#[derive(Serialize)]
struct TaggedPayload<'a, T> {
    kind: &'static str,
    fields: &'a T,
}

impl Serialize for BlockPayload {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            BlockPayload::Genesis => serializer.serialize_unit(),
            BlockPayload::Data(fields) => TaggedPayload { kind: "data", fields }.serialize(serializer),
            BlockPayload::Terminal(fields) => {
                TaggedPayload { kind: "terminal", fields }.serialize(serializer)
            }
            BlockPayload::Super(fields) => {
                TaggedPayload { kind: "super", fields }.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for BlockPayload {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::Null => Ok(BlockPayload::Genesis),
            serde_json::Value::Object(map) => {
                let kind = map
                    .get("kind")
                    .and_then(|k| k.as_str())
                    .ok_or_else(|| D::Error::custom("payload object needs a string `kind`"))?;
                let fields = map
                    .get("fields")
                    .cloned()
                    .ok_or_else(|| D::Error::custom("payload object needs `fields`"))?;
                match kind {
                    "data" => serde_json::from_value(fields)
                        .map(BlockPayload::Data)
                        .map_err(D::Error::custom),
                    "terminal" => serde_json::from_value(fields)
                        .map(BlockPayload::Terminal)
                        .map_err(D::Error::custom),
                    "super" => serde_json::from_value(fields)
                        .map(BlockPayload::Super)
                        .map_err(D::Error::custom),
                    other => Err(D::Error::custom(format!("unknown payload kind {other:?}"))),
                }
            }
            _ => Err(D::Error::custom("payload must be null or an object")),
        }
    }
}

/// Why a block operation failed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("mining exhausted the nonce space (0..={MAX_NONCE}) at difficulty {difficulty}")]
    MiningExhausted { difficulty: u32 },
    #[error("block {index} is not a terminal block")]
    NotTerminal { index: u64 },
    #[error("block {index} is not a superblock")]
    NotSuperblock { index: u64 },
    #[error("{0:?} blocks are fixed by definition and cannot be mined")]
    NotMineable(BlockKind),
    #[error("payload does not belong to a {0:?} block")]
    MismatchedPayload(BlockKind),
}

/// One block of the ledger, at either level of the hierarchy.
///
/// Fields are public so that verification tests (and anyone demonstrating
/// tamper-evidence) can construct or mutate blocks freely; chain-level
/// invariants are enforced by [`crate::chain`] and checked by
/// [`crate::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub nonce: u64,
    pub index: u64,
    pub timestamp: i64,
    pub kind: BlockKind,
    pub data: BlockPayload,
    pub previous_hash: HexDigest,
    pub current_hash: HexDigest,
}

impl Block {
    /// The first block of a namespace: index 0, both hashes zero.
    pub fn absolute_genesis(timestamp: i64) -> Block {
        Block {
            nonce: 0,
            index: 0,
            timestamp,
            kind: BlockKind::AbsoluteGenesis,
            data: BlockPayload::Genesis,
            previous_hash: HexDigest::zero(),
            current_hash: HexDigest::zero(),
        }
    }

    /// Genesis of a successor chain, anchored to `prev_super`.
    ///
    /// Both hashes are set to the current hash of the terminal block
    /// embedded in the previous superblock; rejects blocks that are not
    /// superblocks.
    pub fn relative_genesis(
        prev_super: &Block,
        index: u64,
        timestamp: i64,
    ) -> Result<Block, BlockError> {
        let embedded = match (&prev_super.kind, &prev_super.data) {
            (BlockKind::Super, BlockPayload::Super(embedded)) => embedded,
            _ => {
                return Err(BlockError::NotSuperblock {
                    index: prev_super.index,
                })
            }
        };
        let anchor = embedded.current_hash.clone();
        Ok(Block {
            nonce: 0,
            index,
            timestamp,
            kind: BlockKind::RelativeGenesis,
            data: BlockPayload::Genesis,
            previous_hash: anchor.clone(),
            current_hash: anchor,
        })
    }

    /// Mines a block of the given kind: finds the smallest nonce whose
    /// hash meets `difficulty` and seals the result.
    pub fn mine(
        kind: BlockKind,
        index: u64,
        timestamp: i64,
        data: BlockPayload,
        previous_hash: HexDigest,
        difficulty: u32,
    ) -> Result<Block, BlockError> {
        if !kind.is_mined() {
            return Err(BlockError::NotMineable(kind));
        }
        if !data.matches_kind(kind) {
            return Err(BlockError::MismatchedPayload(kind));
        }
        let (nonce, current_hash) =
            mine_nonce(index, timestamp, &data, &previous_hash, difficulty, MAX_NONCE)?;
        Ok(Block {
            nonce,
            index,
            timestamp,
            kind,
            data,
            previous_hash,
            current_hash,
        })
    }

    /// The canonical byte encoding this block's hash is computed over.
    pub fn encoded(&self) -> Vec<u8> {
        canonical_encoding(
            self.nonce,
            self.index,
            self.timestamp,
            &self.data,
            &self.previous_hash,
        )
    }

    /// Recomputes the hash from the block's own fields, ignoring the
    /// stored `current_hash`.
    pub fn recomputed_hash(&self) -> HexDigest {
        compute_hash(&self.encoded())
    }

    pub fn is_genesis(&self) -> bool {
        self.kind.is_genesis()
    }

    /// The log digest recorded by a data block.
    pub fn digest(&self) -> Option<&HexDigest> {
        match &self.data {
            BlockPayload::Data(d) => Some(&d.digest),
            _ => None,
        }
    }

    /// The log metadata recorded by a data block.
    pub fn log_meta(&self) -> Option<&LogMeta> {
        match &self.data {
            BlockPayload::Data(d) => d.meta.as_ref(),
            _ => None,
        }
    }

    /// The seal carried by a terminal block.
    pub fn as_terminal(&self) -> Option<&TerminalPayload> {
        match &self.data {
            BlockPayload::Terminal(p) => Some(p),
            _ => None,
        }
    }

    /// The embedded terminal block carried by a superblock.
    pub fn as_super(&self) -> Option<&EmbeddedTerminal> {
        match &self.data {
            BlockPayload::Super(p) => Some(p),
            _ => None,
        }
    }
}

/// Compact JSON with lexicographically sorted keys.
///
/// Round-tripping through [`serde_json::Value`] normalizes key order (the
/// value's map keeps keys sorted) and strips all whitespace, which is what
/// makes the encoding canonical: independent implementations hash the same
/// bytes.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("value must be representable as JSON");
    serde_json::to_string(&value).expect("JSON value serialization cannot fail")
}

/// The canonical payload rendering used inside [`canonical_encoding`]:
/// `null` for genesis, sorted-key compact JSON otherwise.
pub fn canonical_payload_json(payload: &BlockPayload) -> String {
    canonical_json(payload)
}

/// The byte string a block hash commits to:
/// `{nonce}|{index}|{timestamp}|{payload}|{previous_hash}` in UTF-8.
pub fn canonical_encoding(
    nonce: u64,
    index: u64,
    timestamp: i64,
    payload: &BlockPayload,
    previous_hash: &HexDigest,
) -> Vec<u8> {
    format!(
        "{nonce}|{index}|{timestamp}|{}|{}",
        canonical_payload_json(payload),
        previous_hash
    )
    .into_bytes()
}

/// Deterministic nonce search: tries `0, 1, 2, …` up to and including
/// `max_nonce` and returns the first nonce whose hash meets `difficulty`.
fn mine_nonce(
    index: u64,
    timestamp: i64,
    payload: &BlockPayload,
    previous_hash: &HexDigest,
    difficulty: u32,
    max_nonce: u64,
) -> Result<(u64, HexDigest), BlockError> {
    use std::fmt::Write as _;

    // Everything after the nonce is fixed for the whole search; render it
    // once and only re-render the nonce prefix per attempt.
    let tail = format!(
        "|{index}|{timestamp}|{}|{}",
        canonical_payload_json(payload),
        previous_hash
    );
    let mut buf = String::with_capacity(tail.len() + 20);
    for nonce in 0..=max_nonce {
        buf.clear();
        write!(buf, "{nonce}").expect("writing to a String cannot fail");
        buf.push_str(&tail);
        let hash = compute_hash(buf.as_bytes());
        if meets_difficulty(&hash, difficulty) {
            return Ok((nonce, hash));
        }
    }
    Err(BlockError::MiningExhausted { difficulty })
}

#[cfg(test)]
pub(crate) fn mine_nonce_bounded(
    index: u64,
    timestamp: i64,
    payload: &BlockPayload,
    previous_hash: &HexDigest,
    difficulty: u32,
    max_nonce: u64,
) -> Result<(u64, HexDigest), BlockError> {
    mine_nonce(index, timestamp, payload, previous_hash, difficulty, max_nonce)
}
