//! Verification, digest lookup, and interval search over chain state.
//!
//! [`verify_full`] re-derives every cryptographic and structural claim a
//! namespace makes: block hashes and difficulty, hash links and index
//! continuity, genesis well-formedness, chain seals (aggregate hashes),
//! and the field-for-field fidelity of each superblock's embedded
//! terminal block. It does not stop at the first problem — every failure
//! is collected, with the block it concerns and a reason.
//!
//! [`verify_upper`] checks the superblockchain *only*: per superblock it
//! recomputes the superblock hash and the hash of the embedded terminal
//! block, exactly two hash evaluations each, independent of how many data
//! blocks the lower chains hold. That constant per-superblock cost is the
//! point of promoting terminal blocks upward.
//!
//! Reports carry an exact count of SHA-256 evaluations performed
//! (`hash_computations`), so the scaling claims are testable rather than
//! asserted.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{Block, BlockKind, BlockPayload};
use crate::chain::{CircledBlockchain, Level, NamespaceLedger, Superblockchain};
use crate::hash::{compute_hash, meets_difficulty, HexDigest};

/// What a verification failure means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// Stored hash differs from the hash recomputed over the block.
    HashMismatch,
    /// The block's hash does not carry the required leading zeros.
    DifficultyUnmet,
    /// A hash link or index sequence is inconsistent with the neighbors.
    LinkBroken,
    /// A genesis block violates its by-definition shape.
    GenesisMalformed,
    /// A terminal block's aggregate hash does not cover its chain.
    AggrMismatch,
    /// A superblock's embedded terminal block differs from the stored one.
    SuperPayloadMismatch,
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FailureReason::HashMismatch => "hash_mismatch",
            FailureReason::DifficultyUnmet => "difficulty_unmet",
            FailureReason::LinkBroken => "link_broken",
            FailureReason::GenesisMalformed => "genesis_malformed",
            FailureReason::AggrMismatch => "aggr_mismatch",
            FailureReason::SuperPayloadMismatch => "super_payload_mismatch",
        };
        f.write_str(name)
    }
}

/// One verification failure, tied to the block it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFailure {
    pub block_index: u64,
    pub level: Level,
    pub reason: FailureReason,
}

/// Outcome of a verification pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// True exactly when `failures` is empty.
    pub valid: bool,
    /// Number of mined blocks whose hashes were recomputed. Genesis
    /// blocks carry definitional hashes, so they are checked structurally
    /// but not counted here.
    pub checked_blocks: u64,
    /// Exact number of SHA-256 evaluations performed.
    pub hash_computations: u64,
    pub failures: Vec<VerificationFailure>,
}

/// Collects failures and meters hash work during a verification pass.
struct Auditor {
    checked_blocks: u64,
    hash_computations: u64,
    failures: Vec<VerificationFailure>,
}

impl Auditor {
    fn new() -> Auditor {
        Auditor {
            checked_blocks: 0,
            hash_computations: 0,
            failures: Vec::new(),
        }
    }

    fn hash(&mut self, bytes: &[u8]) -> HexDigest {
        self.hash_computations += 1;
        compute_hash(bytes)
    }

    fn flag(&mut self, block_index: u64, level: Level, reason: FailureReason) {
        let failure = VerificationFailure {
            block_index,
            level,
            reason,
        };
        if !self.failures.contains(&failure) {
            self.failures.push(failure);
        }
    }

    /// Hash, difficulty, and slot-kind checks shared by every mined block.
    fn check_mined(&mut self, block: &Block, expected_kind: BlockKind, difficulty: u32, level: Level) {
        if block.kind != expected_kind || !block.data.matches_kind(block.kind) {
            self.flag(block.index, level, FailureReason::LinkBroken);
        }
        let recomputed = self.hash(&block.encoded());
        if recomputed != block.current_hash {
            self.flag(block.index, level, FailureReason::HashMismatch);
        }
        if !meets_difficulty(&block.current_hash, difficulty) {
            self.flag(block.index, level, FailureReason::DifficultyUnmet);
        }
        self.checked_blocks += 1;
    }

    fn finish(self) -> VerificationReport {
        VerificationReport {
            valid: self.failures.is_empty(),
            checked_blocks: self.checked_blocks,
            hash_computations: self.hash_computations,
            failures: self.failures,
        }
    }
}

/// Standalone single-block check: definitional shape for genesis blocks,
/// recomputed hash plus difficulty for mined ones.
pub fn verify_block(block: &Block, difficulty: u32) -> bool {
    match block.kind {
        BlockKind::AbsoluteGenesis => {
            block.nonce == 0
                && block.index == 0
                && block.data == BlockPayload::Genesis
                && block.previous_hash.is_zero()
                && block.current_hash.is_zero()
        }
        BlockKind::RelativeGenesis => {
            block.nonce == 0
                && block.data == BlockPayload::Genesis
                && block.previous_hash == block.current_hash
                && !block.current_hash.is_zero()
        }
        BlockKind::Data | BlockKind::Terminal | BlockKind::Super => {
            block.data.matches_kind(block.kind)
                && block.recomputed_hash() == block.current_hash
                && meets_difficulty(&block.current_hash, difficulty)
        }
    }
}

/// Exhaustive verification of one namespace: every block of every chain
/// at both levels, every seal, and every promotion.
pub fn verify_full(ledger: &NamespaceLedger, difficulty: u32) -> VerificationReport {
    let mut auditor = Auditor::new();
    let superblocks = ledger.superchain().superblocks();
    let chains: Vec<&CircledBlockchain> = ledger.chains().collect();

    // Lower level: genesis shape, then hash/difficulty/link/index checks
    // along each chain.
    for (ordinal, chain) in chains.iter().enumerate() {
        let prev_super = ordinal.checked_sub(1).and_then(|k| superblocks.get(k));
        check_lower_chain(&mut auditor, ordinal, chain, prev_super, difficulty);
    }

    // Chain seals: the aggregate hash recorded by each terminal block
    // must cover the genesis and data blocks it closed over.
    for chain in &chains {
        let tb_payload = chain.terminal().and_then(|tb| tb.as_terminal());
        let (Some(tb), Some(payload)) = (chain.terminal(), tb_payload) else {
            continue;
        };
        if chain.is_empty() {
            auditor.flag(tb.index, Level::Lower, FailureReason::AggrMismatch);
            continue;
        }
        let mut concatenated = String::with_capacity(64 * (1 + chain.len()));
        concatenated.push_str(chain.genesis().current_hash.as_str());
        for block in chain.data_blocks() {
            concatenated.push_str(block.current_hash.as_str());
        }
        let aggr = auditor.hash(concatenated.as_bytes());
        if aggr != payload.aggr_hash {
            auditor.flag(tb.index, Level::Lower, FailureReason::AggrMismatch);
        }
    }

    // Upper level: superblock hash links plus fidelity against the
    // archived terminal blocks they embed.
    let mut prev_super: Option<&Block> = None;
    for (k, sb) in superblocks.iter().enumerate() {
        if sb.index != k as u64 {
            auditor.flag(sb.index, Level::Super, FailureReason::LinkBroken);
        }
        let expected_prev = prev_super
            .map(|p| p.current_hash.clone())
            .unwrap_or_else(HexDigest::zero);
        if sb.previous_hash != expected_prev {
            auditor.flag(sb.index, Level::Super, FailureReason::LinkBroken);
        }
        auditor.check_mined(sb, BlockKind::Super, difficulty, Level::Super);

        match (sb.as_super(), ledger.sealed_chains().get(k).and_then(|c| c.terminal())) {
            (Some(embedded), Some(tb)) => {
                if !embedded.matches(tb) {
                    auditor.flag(sb.index, Level::Super, FailureReason::SuperPayloadMismatch);
                }
            }
            // A superblock with no archived chain behind it embeds a
            // terminal block the ledger does not hold.
            (Some(_), None) => {
                auditor.flag(sb.index, Level::Super, FailureReason::SuperPayloadMismatch)
            }
            // Payload of the wrong kind was already flagged by check_mined.
            (None, _) => {}
        }
        prev_super = Some(sb);
    }

    auditor.finish()
}

fn check_lower_chain(
    auditor: &mut Auditor,
    ordinal: usize,
    chain: &CircledBlockchain,
    prev_super: Option<&Block>,
    difficulty: u32,
) {
    let genesis = chain.genesis();
    match genesis.kind {
        BlockKind::AbsoluteGenesis => {
            let well_formed = ordinal == 0
                && genesis.nonce == 0
                && genesis.index == 0
                && genesis.data == BlockPayload::Genesis
                && genesis.previous_hash.is_zero()
                && genesis.current_hash.is_zero();
            if !well_formed {
                auditor.flag(genesis.index, Level::Lower, FailureReason::GenesisMalformed);
            }
        }
        BlockKind::RelativeGenesis => {
            let well_formed = ordinal != 0
                && genesis.nonce == 0
                && genesis.data == BlockPayload::Genesis
                && genesis.previous_hash == genesis.current_hash;
            if !well_formed {
                auditor.flag(genesis.index, Level::Lower, FailureReason::GenesisMalformed);
            }
            // The anchor must be the terminal-block hash embedded in the
            // previous superblock, and the namespace-wide index sequence
            // must continue from it.
            match prev_super.and_then(|sb| sb.as_super()) {
                Some(embedded) => {
                    if genesis.current_hash != embedded.current_hash {
                        auditor.flag(genesis.index, Level::Lower, FailureReason::LinkBroken);
                    }
                    if genesis.index != embedded.index + 1 {
                        auditor.flag(genesis.index, Level::Lower, FailureReason::LinkBroken);
                    }
                }
                None => auditor.flag(genesis.index, Level::Lower, FailureReason::LinkBroken),
            }
        }
        _ => auditor.flag(genesis.index, Level::Lower, FailureReason::GenesisMalformed),
    }

    let mut prev = genesis;
    for block in chain.data_blocks() {
        if block.index != prev.index + 1 || block.previous_hash != prev.current_hash {
            auditor.flag(block.index, Level::Lower, FailureReason::LinkBroken);
        }
        auditor.check_mined(block, BlockKind::Data, difficulty, Level::Lower);
        prev = block;
    }

    if let Some(tb) = chain.terminal() {
        if tb.index != prev.index + 1 || tb.previous_hash != prev.current_hash {
            auditor.flag(tb.index, Level::Lower, FailureReason::LinkBroken);
        }
        auditor.check_mined(tb, BlockKind::Terminal, difficulty, Level::Lower);
    }
}

/// Upper-level-only verification: exactly two hash evaluations per
/// superblock (the superblock itself and its embedded terminal block),
/// regardless of how much data the lower chains hold.
pub fn verify_upper(superchain: &Superblockchain, difficulty: u32) -> VerificationReport {
    let mut auditor = Auditor::new();
    let mut prev_super: Option<&Block> = None;
    for (k, sb) in superchain.superblocks().iter().enumerate() {
        if sb.index != k as u64 {
            auditor.flag(sb.index, Level::Super, FailureReason::LinkBroken);
        }
        let expected_prev = prev_super
            .map(|p| p.current_hash.clone())
            .unwrap_or_else(HexDigest::zero);
        if sb.previous_hash != expected_prev {
            auditor.flag(sb.index, Level::Super, FailureReason::LinkBroken);
        }
        auditor.check_mined(sb, BlockKind::Super, difficulty, Level::Super);

        if let Some(embedded) = sb.as_super() {
            let payload = BlockPayload::Terminal(embedded.data.clone());
            let encoded = crate::block::canonical_encoding(
                embedded.nonce,
                embedded.index,
                embedded.timestamp,
                &payload,
                &embedded.previous_hash,
            );
            let recomputed = auditor.hash(&encoded);
            if recomputed != embedded.current_hash {
                auditor.flag(embedded.index, Level::Lower, FailureReason::HashMismatch);
            }
            if !meets_difficulty(&embedded.current_hash, difficulty) {
                auditor.flag(embedded.index, Level::Lower, FailureReason::DifficultyUnmet);
            }
            auditor.checked_blocks += 1;
        }
        prev_super = Some(sb);
    }
    auditor.finish()
}

/// Outcome of a terminal-block round trip ([`verify_tb`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TbReport {
    /// A committed superblock embeds a terminal block with this hash.
    pub found: bool,
    /// The submitted block's hash is consistent with its own fields.
    pub hash_valid: bool,
    /// The aggregate hash recomputed over the stored chain matches the
    /// submitted payload. Always false when the block was not found.
    pub aggr_valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superblock_index: Option<u64>,
}

/// Why a query was rejected.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("search query must set exactly one of block_index, block_time, record_time")]
    AmbiguousQuery,
    #[error("interval start {from} exceeds end {to}")]
    BadInterval { from: i64, to: i64 },
    #[error("submitted block is not a terminal block")]
    NotTerminal,
}

/// Checks a terminal block somebody held on to against the committed
/// ledger: is it embedded in a superblock, is its hash self-consistent,
/// and does the chain it sealed still produce its aggregate hash?
///
/// Rejects submissions that are not terminal blocks. Unknown terminal
/// blocks — including tampered copies of real ones — simply come back
/// `found: false`.
pub fn verify_tb(ledger: &NamespaceLedger, submitted: &Block) -> Result<TbReport, QueryError> {
    let payload = match (submitted.kind, submitted.as_terminal()) {
        (BlockKind::Terminal, Some(payload)) => payload,
        _ => return Err(QueryError::NotTerminal),
    };

    let hash_valid = submitted.recomputed_hash() == submitted.current_hash;

    let superblocks = ledger.superchain().superblocks();
    let position = superblocks.iter().position(|sb| {
        sb.as_super()
            .is_some_and(|embedded| embedded.current_hash == submitted.current_hash)
    });

    let aggr_valid = position.is_some_and(|k| {
        ledger
            .sealed_chains()
            .get(k)
            .and_then(|chain| chain.compute_aggr_hash().ok())
            .is_some_and(|aggr| aggr == payload.aggr_hash)
    });

    Ok(TbReport {
        found: position.is_some(),
        hash_valid,
        aggr_valid,
        superblock_index: position.map(|k| superblocks[k].index),
    })
}

/// Where a digest was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigestLocation {
    /// Index of the data block recording the digest.
    pub block_index: u64,
    /// Position of that block's chain within the namespace (0-based,
    /// oldest first, the open chain last).
    pub cb_ordinal: u64,
    /// Whether that chain has been sealed.
    pub sealed: bool,
}

/// Result of a digest lookup: how many data blocks record the digest,
/// and where. A count of zero means the ledger never saw the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigestMatches {
    pub count: u64,
    pub locations: Vec<DigestLocation>,
}

/// In-memory index from log digest to the data blocks recording it.
///
/// Rebuilt from chain state at load time and kept current on ingest;
/// lookups never walk the chains.
#[derive(Debug, Clone, Default)]
pub struct DigestIndex {
    by_digest: HashMap<String, Vec<(u64, u64)>>,
}

impl DigestIndex {
    /// Indexes every data block of every chain in the namespace.
    pub fn build(ledger: &NamespaceLedger) -> DigestIndex {
        let mut index = DigestIndex::default();
        for (ordinal, chain) in ledger.chains().enumerate() {
            for block in chain.data_blocks() {
                if let Some(digest) = block.digest() {
                    index.record(digest, block.index, ordinal as u64);
                }
            }
        }
        index
    }

    /// Registers one data block; `chain_ordinal` counts chains oldest
    /// first, the open chain last.
    pub fn record(&mut self, digest: &HexDigest, block_index: u64, chain_ordinal: u64) {
        self.by_digest
            .entry(digest.as_str().to_owned())
            .or_default()
            .push((block_index, chain_ordinal));
    }

    /// Looks up a digest; `sealed_chains` is the current number of sealed
    /// chains, used to report whether each hit is already sealed.
    pub fn find(&self, digest: &HexDigest, sealed_chains: u64) -> DigestMatches {
        let locations: Vec<DigestLocation> = self
            .by_digest
            .get(digest.as_str())
            .map(|hits| {
                hits.iter()
                    .map(|&(block_index, cb_ordinal)| DigestLocation {
                        block_index,
                        cb_ordinal,
                        sealed: cb_ordinal < sealed_chains,
                    })
                    .collect()
            })
            .unwrap_or_default();
        DigestMatches {
            count: locations.len() as u64,
            locations,
        }
    }
}

/// A closed interval of epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRange {
    pub from: i64,
    pub to: i64,
}

/// One search criterion. Exactly one criterion per query; intervals are
/// closed on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSearchQuery", into = "RawSearchQuery")]
pub enum SearchQuery {
    /// Match the data block with this index.
    BlockIndex(u64),
    /// Match data blocks whose own timestamp (ingestion time) falls in
    /// the interval.
    BlockTime(TimeRange),
    /// Match data blocks whose metadata claims log records overlapping
    /// the interval. A single stated endpoint counts as a degenerate
    /// interval; blocks without record-time metadata never match.
    RecordTime(TimeRange),
}

impl SearchQuery {
    pub fn block_index(index: u64) -> SearchQuery {
        SearchQuery::BlockIndex(index)
    }

    pub fn block_time(from: i64, to: i64) -> Result<SearchQuery, QueryError> {
        if from > to {
            return Err(QueryError::BadInterval { from, to });
        }
        Ok(SearchQuery::BlockTime(TimeRange { from, to }))
    }

    pub fn record_time(from: i64, to: i64) -> Result<SearchQuery, QueryError> {
        if from > to {
            return Err(QueryError::BadInterval { from, to });
        }
        Ok(SearchQuery::RecordTime(TimeRange { from, to }))
    }
}

/// Wire shape of a search query: an object with exactly one of the three
/// criterion fields set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearchQuery {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_time: Option<TimeRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    record_time: Option<TimeRange>,
}

impl TryFrom<RawSearchQuery> for SearchQuery {
    type Error = QueryError;

    fn try_from(raw: RawSearchQuery) -> Result<SearchQuery, QueryError> {
        match (raw.block_index, raw.block_time, raw.record_time) {
            (Some(index), None, None) => Ok(SearchQuery::BlockIndex(index)),
            (None, Some(range), None) => SearchQuery::block_time(range.from, range.to),
            (None, None, Some(range)) => SearchQuery::record_time(range.from, range.to),
            _ => Err(QueryError::AmbiguousQuery),
        }
    }
}

impl From<SearchQuery> for RawSearchQuery {
    fn from(query: SearchQuery) -> RawSearchQuery {
        let mut raw = RawSearchQuery {
            block_index: None,
            block_time: None,
            record_time: None,
        };
        match query {
            SearchQuery::BlockIndex(index) => raw.block_index = Some(index),
            SearchQuery::BlockTime(range) => raw.block_time = Some(range),
            SearchQuery::RecordTime(range) => raw.record_time = Some(range),
        }
        raw
    }
}

/// One search hit: the matching data block, plus the terminal block of
/// its chain so the caller can check the seal (absent while the chain is
/// still open).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub block: Block,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<Block>,
}

/// Runs one query over every chain of the namespace, sealed and open.
///
/// Sealed chains are skipped wholesale when the terminal block's recorded
/// index/timestamp span cannot contain a match. Record-time queries never
/// skip a chain: the terminal payload spans block timestamps, not the
/// record times claimed by metadata, so pruning on it would be unsound.
pub fn search(ledger: &NamespaceLedger, query: &SearchQuery) -> Vec<SearchResult> {
    let mut results = Vec::new();
    for chain in ledger.chains() {
        if let Some(payload) = chain.terminal().and_then(|tb| tb.as_terminal()) {
            let skip = match query {
                SearchQuery::BlockIndex(index) => {
                    *index < payload.block_index_from || *index > payload.block_index_to
                }
                SearchQuery::BlockTime(range) => {
                    range.to < payload.timestamp_from || range.from > payload.timestamp_to
                }
                SearchQuery::RecordTime(_) => false,
            };
            if skip {
                continue;
            }
        }
        for block in chain.data_blocks() {
            if block_matches(query, block) {
                results.push(SearchResult {
                    block: block.clone(),
                    terminal: chain.terminal().cloned(),
                });
            }
        }
    }
    results
}

fn block_matches(query: &SearchQuery, block: &Block) -> bool {
    match query {
        SearchQuery::BlockIndex(index) => block.index == *index,
        SearchQuery::BlockTime(range) => {
            range.from <= block.timestamp && block.timestamp <= range.to
        }
        SearchQuery::RecordTime(range) => block
            .log_meta()
            .and_then(|meta| meta.record_interval())
            .is_some_and(|(low, high)| low <= range.to && range.from <= high),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::LogMeta;
    use crate::config::LedgerConfig;

    fn cfg(difficulty: u32, max_blocks: u32) -> LedgerConfig {
        LedgerConfig::new("/unused")
            .with_difficulty(difficulty)
            .with_max_blocks_per_cb(max_blocks)
    }

    fn digest(n: u8) -> HexDigest {
        compute_hash(&[n])
    }

    /// A ledger with `count` ingested digests at the given capacity,
    /// difficulty 1, timestamps 1000, 1010, 1020, …
    fn build_ledger(count: u8, max_blocks: u32) -> (NamespaceLedger, LedgerConfig) {
        let cfg = cfg(1, max_blocks);
        let mut ledger = NamespaceLedger::new("ns");
        for n in 0..count {
            ledger
                .ingest(digest(n), None, &cfg, 1_000 + n as i64 * 10)
                .unwrap();
        }
        (ledger, cfg)
    }

    /// Decomposed chain state for tamper tests: mutate any block, then
    /// reassemble with `rebuild`.
    struct Parts {
        superblocks: Vec<Block>,
        sealed: Vec<(Block, Vec<Block>, Option<Block>)>,
        open: Option<(Block, Vec<Block>, Option<Block>)>,
    }

    fn explode(ledger: &NamespaceLedger) -> Parts {
        let take = |chain: &CircledBlockchain| {
            (
                chain.genesis().clone(),
                chain.data_blocks().to_vec(),
                chain.terminal().cloned(),
            )
        };
        Parts {
            superblocks: ledger.superchain().superblocks().to_vec(),
            sealed: ledger.sealed_chains().iter().map(take).collect(),
            open: ledger.open_chain().map(take),
        }
    }

    fn rebuild(parts: Parts) -> NamespaceLedger {
        let assemble = |(genesis, data, terminal)| CircledBlockchain::from_parts(genesis, data, terminal);
        NamespaceLedger::from_parts(
            Superblockchain::from_parts("ns", parts.superblocks, parts.open.map(assemble)),
            parts.sealed.into_iter().map(assemble).collect(),
        )
    }

    fn reasons(report: &VerificationReport) -> Vec<FailureReason> {
        report.failures.iter().map(|f| f.reason).collect()
    }

    #[test]
    fn empty_namespace_verifies_vacuously() {
        let ledger = NamespaceLedger::new("ns");
        let report = verify_full(&ledger, 1);
        assert!(report.valid);
        assert_eq!(report.checked_blocks, 0);
        assert_eq!(report.hash_computations, 0);
    }

    #[test]
    fn untampered_ledger_verifies_with_exact_hash_count() {
        // 7 ingests at capacity 3: two sealed chains (3 data each) plus an
        // open chain holding one block.
        let (ledger, cfg) = build_ledger(7, 3);
        assert_eq!(ledger.sealed_chains().len(), 2);

        let report = verify_full(&ledger, cfg.difficulty);
        assert!(report.valid, "unexpected failures: {:?}", report.failures);
        // Mined blocks: 7 data + 2 terminal + 2 super.
        assert_eq!(report.checked_blocks, 11);
        // One hash per mined block plus one aggregate per sealed chain.
        assert_eq!(report.hash_computations, 13);
        assert!(report.hash_computations >= report.checked_blocks);
    }

    #[test]
    fn verify_block_accepts_each_valid_kind() {
        let (ledger, cfg) = build_ledger(4, 3);
        let sealed = &ledger.sealed_chains()[0];
        assert!(verify_block(sealed.genesis(), cfg.difficulty));
        assert!(verify_block(&sealed.data_blocks()[0], cfg.difficulty));
        assert!(verify_block(sealed.terminal().unwrap(), cfg.difficulty));
        assert!(verify_block(&ledger.superchain().superblocks()[0], cfg.difficulty));
        assert!(verify_block(ledger.open_chain().unwrap().genesis(), cfg.difficulty));
    }

    #[test]
    fn verify_block_rejects_tampering() {
        let (ledger, cfg) = build_ledger(1, 3);
        let mut block = ledger.open_chain().unwrap().data_blocks()[0].clone();
        block.timestamp += 1;
        assert!(!verify_block(&block, cfg.difficulty));

        let mut genesis = ledger.open_chain().unwrap().genesis().clone();
        genesis.nonce = 3;
        assert!(!verify_block(&genesis, cfg.difficulty));
    }

    #[test]
    fn edited_payload_is_a_hash_mismatch() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        // Swap the recorded digest inside a sealed data block.
        if let BlockPayload::Data(d) = &mut parts.sealed[0].1[1].data {
            d.digest = compute_hash(b"forged");
        } else {
            panic!("expected a data payload");
        }
        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        assert!(reasons(&report).contains(&FailureReason::HashMismatch));
        assert!(report
            .failures
            .iter()
            .any(|f| f.block_index == 2 && f.level == Level::Lower));
    }

    #[test]
    fn honest_rehash_after_edit_fails_difficulty_or_links() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        // Recompute the hash after bumping the nonce, choosing a nonce
        // whose hash genuinely misses the difficulty target.
        let block = &mut parts.sealed[0].1[1];
        let original_nonce = block.nonce;
        block.nonce += 1;
        block.current_hash = block.recomputed_hash();
        while meets_difficulty(&block.current_hash, cfg.difficulty) {
            block.nonce += 1;
            block.current_hash = block.recomputed_hash();
        }
        assert_ne!(block.nonce, original_nonce);

        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        let found = reasons(&report);
        assert!(found.contains(&FailureReason::DifficultyUnmet));
        // The rewritten hash also severs the link to the next block and
        // invalidates the chain's aggregate.
        assert!(found.contains(&FailureReason::LinkBroken));
        assert!(found.contains(&FailureReason::AggrMismatch));
    }

    #[test]
    fn remined_block_breaks_its_links() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        // A full re-mine with a detached previous hash: the block itself
        // is internally consistent, so only the chain exposes it.
        let old = parts.sealed[0].1[1].clone();
        let remined = Block::mine(
            BlockKind::Data,
            old.index,
            old.timestamp,
            old.data.clone(),
            HexDigest::zero(),
            cfg.difficulty,
        )
        .unwrap();
        parts.sealed[0].1[1] = remined;

        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        let found = reasons(&report);
        assert!(found.contains(&FailureReason::LinkBroken));
        assert!(found.contains(&FailureReason::AggrMismatch));
        assert!(!found.contains(&FailureReason::HashMismatch));
    }

    #[test]
    fn resealed_terminal_is_caught_by_promotion_fidelity() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        // Re-mine the terminal block over a forged aggregate. Hash and
        // difficulty check out; the seal and the superblock do not.
        let (_, data, terminal) = &parts.sealed[0];
        let old = terminal.as_ref().unwrap();
        let mut payload = old.as_terminal().unwrap().clone();
        payload.aggr_hash = compute_hash(b"forged aggregate");
        let resealed = Block::mine(
            BlockKind::Terminal,
            old.index,
            old.timestamp,
            BlockPayload::Terminal(payload),
            data.last().unwrap().current_hash.clone(),
            cfg.difficulty,
        )
        .unwrap();
        parts.sealed[0].2 = Some(resealed);

        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        let found = reasons(&report);
        assert!(found.contains(&FailureReason::AggrMismatch));
        assert!(found.contains(&FailureReason::SuperPayloadMismatch));
    }

    #[test]
    fn malformed_genesis_blocks_are_flagged() {
        let (ledger, cfg) = build_ledger(4, 3);

        let mut parts = explode(&ledger);
        parts.sealed[0].0.current_hash = compute_hash(b"not zero");
        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(reasons(&report).contains(&FailureReason::GenesisMalformed));

        let mut parts = explode(&ledger);
        parts.open.as_mut().unwrap().0.nonce = 9;
        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(reasons(&report).contains(&FailureReason::GenesisMalformed));
    }

    #[test]
    fn rewritten_relative_genesis_anchor_is_a_broken_link() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        let open = parts.open.as_mut().unwrap();
        let fake = compute_hash(b"somewhere else");
        open.0.previous_hash = fake.clone();
        open.0.current_hash = fake;

        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        assert!(reasons(&report).contains(&FailureReason::LinkBroken));
    }

    #[test]
    fn edited_superblock_payload_is_flagged() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        if let BlockPayload::Super(embedded) = &mut parts.superblocks[0].data {
            embedded.data.timestamp_to += 1;
        } else {
            panic!("expected a super payload");
        }
        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        let found = reasons(&report);
        assert!(found.contains(&FailureReason::SuperPayloadMismatch));
        assert!(found.contains(&FailureReason::HashMismatch));
    }

    #[test]
    fn remined_superblock_payload_still_fails_fidelity() {
        let (mut ledger, cfg) = build_ledger(4, 3);
        // Two superblocks so the forward link check also has material.
        for n in 10..13 {
            ledger.ingest(digest(n), None, &cfg, 2_000 + n as i64).unwrap();
        }
        assert_eq!(ledger.superchain().superblocks().len(), 2);

        let mut parts = explode(&ledger);
        let old = &parts.superblocks[0];
        let mut embedded = old.as_super().unwrap().clone();
        embedded.data.block_index_to += 1;
        let remined = Block::mine(
            BlockKind::Super,
            old.index,
            old.timestamp,
            BlockPayload::Super(embedded),
            old.previous_hash.clone(),
            cfg.difficulty,
        )
        .unwrap();
        parts.superblocks[0] = remined;

        let report = verify_full(&rebuild(parts), cfg.difficulty);
        assert!(!report.valid);
        let found = reasons(&report);
        assert!(found.contains(&FailureReason::SuperPayloadMismatch));
        // The second superblock no longer links to the rewritten first.
        assert!(found
            .iter()
            .zip(report.failures.iter())
            .any(|(r, f)| *r == FailureReason::LinkBroken && f.level == Level::Super));
    }

    #[test]
    fn verify_upper_costs_two_hashes_per_superblock() {
        let (ledger, cfg) = build_ledger(9, 3);
        assert_eq!(ledger.superchain().superblocks().len(), 3);

        let report = verify_upper(ledger.superchain(), cfg.difficulty);
        assert!(report.valid);
        assert_eq!(report.hash_computations, 6);
        assert_eq!(report.checked_blocks, 6);
    }

    #[test]
    fn verify_upper_sees_embedded_terminal_tampering() {
        let (ledger, cfg) = build_ledger(4, 3);
        let mut parts = explode(&ledger);
        if let BlockPayload::Super(embedded) = &mut parts.superblocks[0].data {
            embedded.nonce += 1;
        } else {
            panic!("expected a super payload");
        }
        let report = verify_upper(rebuild(parts).superchain(), cfg.difficulty);
        assert!(!report.valid);
        // Both the superblock hash (payload changed) and the embedded
        // terminal hash (fields no longer produce it) break.
        let lower_failure = report
            .failures
            .iter()
            .any(|f| f.level == Level::Lower && f.reason == FailureReason::HashMismatch);
        let upper_failure = report
            .failures
            .iter()
            .any(|f| f.level == Level::Super && f.reason == FailureReason::HashMismatch);
        assert!(lower_failure && upper_failure);
    }

    #[test]
    fn verify_tb_round_trip() {
        let (ledger, _) = build_ledger(7, 3);
        let tb = ledger.sealed_chains()[1].terminal().unwrap().clone();

        let report = verify_tb(&ledger, &tb).unwrap();
        assert!(report.found);
        assert!(report.hash_valid);
        assert!(report.aggr_valid);
        assert_eq!(report.superblock_index, Some(1));
    }

    #[test]
    fn verify_tb_rejects_non_terminal_and_misses_tampered_copies() {
        let (ledger, _) = build_ledger(7, 3);

        let data = ledger.sealed_chains()[0].data_blocks()[0].clone();
        assert_eq!(verify_tb(&ledger, &data).unwrap_err(), QueryError::NotTerminal);

        // A tampered copy hashes to something no superblock embeds.
        let mut tampered = ledger.sealed_chains()[0].terminal().unwrap().clone();
        tampered.timestamp += 1;
        tampered.current_hash = tampered.recomputed_hash();
        let report = verify_tb(&ledger, &tampered).unwrap();
        assert!(!report.found);
        assert!(!report.aggr_valid);
        assert_eq!(report.superblock_index, None);
        // The copy is internally consistent; only the ledger exposes it.
        assert!(report.hash_valid);
    }

    #[test]
    fn digest_index_finds_every_occurrence() {
        let (mut ledger, cfg) = build_ledger(4, 3);
        // Submit an already-recorded digest again; both hits must appear.
        ledger.ingest(digest(0), None, &cfg, 2_000).unwrap();

        let index = DigestIndex::build(&ledger);
        let sealed = ledger.sealed_chains().len() as u64;

        let matches = index.find(&digest(0), sealed);
        assert_eq!(matches.count, 2);
        assert_eq!(matches.locations[0].block_index, 1);
        assert!(matches.locations[0].sealed);
        assert_eq!(matches.locations[0].cb_ordinal, 0);
        assert!(!matches.locations[1].sealed);
        assert_eq!(matches.locations[1].cb_ordinal, 1);

        let absent = index.find(&compute_hash(b"never submitted"), sealed);
        assert_eq!(absent.count, 0);
        assert!(absent.locations.is_empty());
    }

    #[test]
    fn digest_index_incremental_matches_rebuild() {
        let (mut ledger, cfg) = build_ledger(0, 3);
        let mut incremental = DigestIndex::default();
        for n in 0..8u8 {
            let ordinal = ledger.sealed_chains().len() as u64;
            let outcome = ledger
                .ingest(digest(n % 3), None, &cfg, 1_000 + n as i64)
                .unwrap();
            incremental.record(&digest(n % 3), outcome.block_index, ordinal);
        }
        let rebuilt = DigestIndex::build(&ledger);
        let sealed = ledger.sealed_chains().len() as u64;
        for n in 0..3u8 {
            assert_eq!(incremental.find(&digest(n), sealed), rebuilt.find(&digest(n), sealed));
        }
    }

    #[test]
    fn search_query_wire_shape() {
        let q: SearchQuery = serde_json::from_str(r#"{"block_index": 4}"#).unwrap();
        assert_eq!(q, SearchQuery::BlockIndex(4));

        let q: SearchQuery =
            serde_json::from_str(r#"{"block_time": {"from": 10, "to": 20}}"#).unwrap();
        assert_eq!(q, SearchQuery::block_time(10, 20).unwrap());

        // Zero or several criteria, inverted intervals, and junk fields
        // are all rejected.
        assert!(serde_json::from_str::<SearchQuery>("{}").is_err());
        assert!(serde_json::from_str::<SearchQuery>(
            r#"{"block_index": 1, "record_time": {"from": 0, "to": 1}}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<SearchQuery>(r#"{"block_time": {"from": 5, "to": 1}}"#).is_err()
        );
        assert!(serde_json::from_str::<SearchQuery>(r#"{"foo": 1}"#).is_err());

        let round = serde_json::to_string(&SearchQuery::record_time(-5, 5).unwrap()).unwrap();
        assert_eq!(round, r#"{"record_time":{"from":-5,"to":5}}"#);
    }

    #[test]
    fn interval_constructors_reject_inversion() {
        assert_eq!(
            SearchQuery::block_time(10, 9).unwrap_err(),
            QueryError::BadInterval { from: 10, to: 9 }
        );
        // Degenerate intervals are fine: closed on both ends.
        assert!(SearchQuery::record_time(10, 10).is_ok());
    }

    /// Ledger where block timestamps and record-time metadata diverge, to
    /// tell the two time axes apart: block n is ingested at 1000 + 10n
    /// but claims records from [n*100, n*100 + 50].
    fn time_ledger() -> (NamespaceLedger, LedgerConfig) {
        let cfg = cfg(1, 3);
        let mut ledger = NamespaceLedger::new("ns");
        for n in 0..7u8 {
            let meta = LogMeta {
                file_name: Some(format!("app-{n}.log")),
                ts_from: Some(n as i64 * 100),
                ts_to: Some(n as i64 * 100 + 50),
            };
            ledger
                .ingest(digest(n), Some(meta), &cfg, 1_000 + n as i64 * 10)
                .unwrap();
        }
        (ledger, cfg)
    }

    #[test]
    fn search_by_block_index() {
        let (ledger, _) = time_ledger();
        let hits = search(&ledger, &SearchQuery::block_index(2));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].block.index, 2);
        // Block 2 sits in the first (sealed) chain, so its seal rides along.
        let tb = hits[0].terminal.as_ref().unwrap();
        let span = tb.as_terminal().unwrap();
        assert!(span.block_index_from <= 2 && 2 <= span.block_index_to);

        // Genesis and terminal indices exist but are not data blocks.
        assert!(search(&ledger, &SearchQuery::block_index(0)).is_empty());
        assert!(search(&ledger, &SearchQuery::block_index(4)).is_empty());
        assert!(search(&ledger, &SearchQuery::block_index(999)).is_empty());
    }

    #[test]
    fn search_by_block_time_spans_chains() {
        let (ledger, _) = time_ledger();
        // Blocks are stamped 1000, 1010, …, 1060; [1015, 1045] covers
        // 1020..=1040, crossing the first seal boundary.
        let hits = search(&ledger, &SearchQuery::block_time(1_015, 1_045).unwrap());
        let stamps: Vec<i64> = hits.iter().map(|r| r.block.timestamp).collect();
        assert_eq!(stamps, vec![1_020, 1_030, 1_040]);

        // Closed interval: exact endpoints match.
        let exact = search(&ledger, &SearchQuery::block_time(1_060, 1_060).unwrap());
        assert_eq!(exact.len(), 1);
        assert!(exact[0].terminal.is_none(), "block 1060 is in the open chain");

        assert!(search(&ledger, &SearchQuery::block_time(5_000, 6_000).unwrap()).is_empty());
    }

    #[test]
    fn search_by_record_time_uses_metadata_intervals() {
        let (ledger, _) = time_ledger();
        // Record claims: [0,50], [100,150], …, [600,650]. The interval
        // [140, 310] intersects claims 1, 2, 3.
        let hits = search(&ledger, &SearchQuery::record_time(140, 310).unwrap());
        let names: Vec<&str> = hits
            .iter()
            .map(|r| r.block.log_meta().unwrap().file_name.as_deref().unwrap())
            .collect();
        assert_eq!(names, vec!["app-1.log", "app-2.log", "app-3.log"]);

        // Touching an endpoint counts (closed interval).
        assert_eq!(search(&ledger, &SearchQuery::record_time(50, 50).unwrap()).len(), 1);
        // A gap between claims matches nothing.
        assert!(search(&ledger, &SearchQuery::record_time(60, 90).unwrap()).is_empty());
    }

    #[test]
    fn record_time_handles_partial_and_missing_metadata() {
        let cfg = cfg(1, 10);
        let mut ledger = NamespaceLedger::new("ns");
        ledger.ingest(digest(0), None, &cfg, 1_000).unwrap();
        let from_only = LogMeta {
            ts_from: Some(500),
            ..LogMeta::default()
        };
        ledger.ingest(digest(1), Some(from_only), &cfg, 1_001).unwrap();
        let name_only = LogMeta {
            file_name: Some("x.log".into()),
            ..LogMeta::default()
        };
        ledger.ingest(digest(2), Some(name_only), &cfg, 1_002).unwrap();

        // Only the block claiming [500,500] can match record-time queries.
        assert_eq!(search(&ledger, &SearchQuery::record_time(0, 10_000).unwrap()).len(), 1);
        assert_eq!(search(&ledger, &SearchQuery::record_time(500, 500).unwrap()).len(), 1);
        assert!(search(&ledger, &SearchQuery::record_time(501, 600).unwrap()).is_empty());
    }

    /// Pruning must be an optimization, never a semantic change: compare
    /// against a naive scan with pruning disabled.
    fn naive_search(ledger: &NamespaceLedger, query: &SearchQuery) -> Vec<SearchResult> {
        let mut results = Vec::new();
        for chain in ledger.chains() {
            for block in chain.data_blocks() {
                if block_matches(query, block) {
                    results.push(SearchResult {
                        block: block.clone(),
                        terminal: chain.terminal().cloned(),
                    });
                }
            }
        }
        results
    }

    #[test]
    fn pruned_search_equals_naive_scan() {
        let (ledger, _) = time_ledger();
        let mut queries = vec![SearchQuery::block_index(0)];
        for index in 0..12 {
            queries.push(SearchQuery::block_index(index));
        }
        for (from, to) in [(900, 2_000), (1_015, 1_045), (1_060, 1_060), (0, 10), (-50, -1)] {
            queries.push(SearchQuery::block_time(from, to).unwrap());
            queries.push(SearchQuery::record_time(from, to).unwrap());
        }
        for (from, to) in [(0, 650), (140, 310), (50, 50), (625, 1_000)] {
            queries.push(SearchQuery::record_time(from, to).unwrap());
        }
        for query in &queries {
            assert_eq!(
                search(&ledger, query),
                naive_search(&ledger, query),
                "pruning changed the outcome of {query:?}"
            );
        }
    }
}
