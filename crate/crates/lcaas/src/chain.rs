//! Circled blockchains, the superblockchain, and the chain lifecycle.
//!
//! A *circled blockchain* (CB) is one genesis block, a run of mined data
//! blocks, and — once closed — a mined terminal block whose payload
//! notarizes an aggregate hash over the genesis and every data block. A
//! chain closes ("circles") when it reaches the configured capacity or
//! its open window expires.
//!
//! Each terminal block is then *promoted*: every one of its fields is
//! embedded verbatim in the payload of a new superblock appended to the
//! namespace's upper-level chain. The next circled blockchain opens with a
//! relative genesis anchored to the hash the superblock embedded, so the
//! two levels interlock: the lower chains link through the superblocks,
//! and the superblocks alone carry enough material to re-verify every
//! seal below them.
//!
//! [`NamespaceLedger`] drives that lifecycle for one namespace and
//! reports every block it creates per operation, in creation order, so a
//! caller can persist exactly what changed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{
    Block, BlockError, BlockKind, BlockPayload, EmbeddedTerminal, LogMeta, TerminalPayload,
};
use crate::config::LedgerConfig;
use crate::hash::{compute_hash, HexDigest};

/// Which of the two chain levels a block lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Circled blockchains: genesis, data, and terminal blocks.
    Lower,
    /// The superblockchain.
    Super,
}

/// Why a chain operation failed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain is sealed and accepts no further data blocks")]
    Sealed,
    #[error("chain already holds the configured maximum of {0} data blocks")]
    AtCapacity(u32),
    #[error("chain holds no data blocks")]
    EmptyChain,
    #[error("chain is already sealed")]
    AlreadySealed,
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// One circled blockchain: genesis, data blocks, and (when sealed) the
/// terminal block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircledBlockchain {
    genesis: Block,
    data: Vec<Block>,
    terminal: Option<Block>,
}

impl CircledBlockchain {
    /// Opens the very first chain of a namespace, rooted at an absolute
    /// genesis block.
    pub fn open_absolute(now: i64) -> CircledBlockchain {
        CircledBlockchain {
            genesis: Block::absolute_genesis(now),
            data: Vec::new(),
            terminal: None,
        }
    }

    /// Opens a successor chain rooted at a relative genesis anchored to
    /// `prev_super`.
    pub fn open_relative(
        prev_super: &Block,
        index: u64,
        now: i64,
    ) -> Result<CircledBlockchain, ChainError> {
        Ok(CircledBlockchain {
            genesis: Block::relative_genesis(prev_super, index, now)?,
            data: Vec::new(),
            terminal: None,
        })
    }

    /// Reassembles a chain from raw blocks without checking any invariant.
    ///
    /// Intended for loaders and for verification tooling that needs to
    /// reconstruct — or deliberately corrupt — chain state; validity is
    /// judged by [`crate::verify`], not by construction.
    pub fn from_parts(genesis: Block, data: Vec<Block>, terminal: Option<Block>) -> CircledBlockchain {
        CircledBlockchain {
            genesis,
            data,
            terminal,
        }
    }

    pub fn genesis(&self) -> &Block {
        &self.genesis
    }

    pub fn data_blocks(&self) -> &[Block] {
        &self.data
    }

    pub fn terminal(&self) -> Option<&Block> {
        self.terminal.as_ref()
    }

    pub fn is_sealed(&self) -> bool {
        self.terminal.is_some()
    }

    /// Number of data blocks currently in the chain.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// When the chain was opened: the genesis block's timestamp.
    pub fn opened_at(&self) -> i64 {
        self.genesis.timestamp
    }

    /// Index the next block appended to this chain will receive.
    pub fn next_index(&self) -> u64 {
        let sealed = u64::from(self.terminal.is_some());
        self.genesis.index + 1 + self.data.len() as u64 + sealed
    }

    /// Mines and appends one data block recording `digest`.
    pub fn append_data_block(
        &mut self,
        digest: HexDigest,
        meta: Option<LogMeta>,
        cfg: &LedgerConfig,
        now: i64,
    ) -> Result<&Block, ChainError> {
        if self.is_sealed() {
            return Err(ChainError::Sealed);
        }
        if self.data.len() as u32 >= cfg.max_blocks_per_cb {
            return Err(ChainError::AtCapacity(cfg.max_blocks_per_cb));
        }
        let previous_hash = self
            .data
            .last()
            .unwrap_or(&self.genesis)
            .current_hash
            .clone();
        let block = Block::mine(
            BlockKind::Data,
            self.next_index(),
            now,
            BlockPayload::data(digest, meta),
            previous_hash,
            cfg.difficulty,
        )?;
        self.data.push(block);
        Ok(self.data.last().expect("block was just pushed"))
    }

    /// Whether the chain is due to be sealed: it holds at least one data
    /// block and is either at capacity or past its open window.
    pub fn should_close(&self, cfg: &LedgerConfig, now: i64) -> bool {
        if self.is_sealed() || self.data.is_empty() {
            return false;
        }
        self.data.len() as u32 >= cfg.max_blocks_per_cb
            || now - self.opened_at() >= cfg.max_open_window_seconds
    }

    /// SHA-256 over the concatenated current hashes of the genesis and
    /// every data block, in index order — the value a terminal block
    /// notarizes.
    pub fn compute_aggr_hash(&self) -> Result<HexDigest, ChainError> {
        if self.data.is_empty() {
            return Err(ChainError::EmptyChain);
        }
        let mut concatenated = String::with_capacity(64 * (1 + self.data.len()));
        concatenated.push_str(self.genesis.current_hash.as_str());
        for block in &self.data {
            concatenated.push_str(block.current_hash.as_str());
        }
        Ok(compute_hash(concatenated.as_bytes()))
    }

    /// Closes the chain by mining its terminal block.
    ///
    /// The terminal payload records the aggregate hash plus the timestamp
    /// and index span of the sealed data blocks.
    pub fn seal(&mut self, now: i64, difficulty: u32) -> Result<&Block, ChainError> {
        if self.is_sealed() {
            return Err(ChainError::AlreadySealed);
        }
        if self.data.is_empty() {
            return Err(ChainError::EmptyChain);
        }
        let aggr_hash = self.compute_aggr_hash()?;
        let first = self.data.first().expect("chain is non-empty");
        let last = self.data.last().expect("chain is non-empty");
        let payload = TerminalPayload {
            aggr_hash,
            timestamp_from: self.data.iter().map(|b| b.timestamp).min().unwrap_or(0),
            timestamp_to: self.data.iter().map(|b| b.timestamp).max().unwrap_or(0),
            block_index_from: first.index,
            block_index_to: last.index,
        };
        let terminal = Block::mine(
            BlockKind::Terminal,
            self.next_index(),
            now,
            BlockPayload::Terminal(payload),
            last.current_hash.clone(),
            difficulty,
        )?;
        self.terminal = Some(terminal);
        Ok(self.terminal.as_ref().expect("terminal was just set"))
    }
}

/// The upper-level chain of one namespace, plus the currently open
/// circled blockchain feeding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superblockchain {
    namespace: String,
    superblocks: Vec<Block>,
    open_chain: Option<CircledBlockchain>,
}

impl Superblockchain {
    pub fn new(namespace: impl Into<String>) -> Superblockchain {
        Superblockchain {
            namespace: namespace.into(),
            superblocks: Vec::new(),
            open_chain: None,
        }
    }

    /// Reassembles an upper-level chain from raw blocks without checking
    /// any invariant; see [`CircledBlockchain::from_parts`].
    pub fn from_parts(
        namespace: impl Into<String>,
        superblocks: Vec<Block>,
        open_chain: Option<CircledBlockchain>,
    ) -> Superblockchain {
        Superblockchain {
            namespace: namespace.into(),
            superblocks,
            open_chain,
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn superblocks(&self) -> &[Block] {
        &self.superblocks
    }

    pub fn last_superblock(&self) -> Option<&Block> {
        self.superblocks.last()
    }

    pub fn open_chain(&self) -> Option<&CircledBlockchain> {
        self.open_chain.as_ref()
    }

    /// Promotes a terminal block: mines a superblock embedding all of the
    /// terminal block's fields and appends it to the upper chain.
    ///
    /// Rejects blocks that are not terminal blocks.
    pub fn promote(&mut self, tb: &Block, now: i64, difficulty: u32) -> Result<&Block, ChainError> {
        let embedded = EmbeddedTerminal::from_block(tb)?;
        let previous_hash = self
            .superblocks
            .last()
            .map(|sb| sb.current_hash.clone())
            .unwrap_or_else(HexDigest::zero);
        let superblock = Block::mine(
            BlockKind::Super,
            self.superblocks.len() as u64,
            now,
            BlockPayload::Super(embedded),
            previous_hash,
            difficulty,
        )?;
        self.superblocks.push(superblock);
        Ok(self.superblocks.last().expect("superblock was just pushed"))
    }
}

/// Everything recorded by one ingest call.
///
/// `records` lists every block created, in creation order, paired with
/// its level — exactly what must be appended to persistent storage.
#[derive(Debug, Clone)]
pub struct IngestOutcome {
    /// Index assigned to the ingested data block.
    pub block_index: u64,
    /// Timestamp stamped on the ingested data block.
    pub timestamp: i64,
    pub records: Vec<(Level, Block)>,
}

/// Everything recorded by closing the open chain.
#[derive(Debug, Clone)]
pub struct CloseOutcome {
    pub terminal_index: u64,
    pub superblock_index: u64,
    pub records: Vec<(Level, Block)>,
}

/// The full chain state of one namespace: archived (sealed and promoted)
/// circled blockchains plus the superblockchain and its open chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceLedger {
    superchain: Superblockchain,
    sealed: Vec<CircledBlockchain>,
}

impl NamespaceLedger {
    pub fn new(namespace: impl Into<String>) -> NamespaceLedger {
        NamespaceLedger {
            superchain: Superblockchain::new(namespace),
            sealed: Vec::new(),
        }
    }

    /// Reassembles namespace state from raw chains without checking any
    /// invariant; see [`CircledBlockchain::from_parts`]. `sealed` must be
    /// ordered oldest first.
    pub fn from_parts(superchain: Superblockchain, sealed: Vec<CircledBlockchain>) -> NamespaceLedger {
        NamespaceLedger { superchain, sealed }
    }

    pub fn namespace(&self) -> &str {
        self.superchain.namespace()
    }

    pub fn superchain(&self) -> &Superblockchain {
        &self.superchain
    }

    /// Chains already sealed and promoted, oldest first. The k-th sealed
    /// chain corresponds to the k-th superblock.
    pub fn sealed_chains(&self) -> &[CircledBlockchain] {
        &self.sealed
    }

    pub fn open_chain(&self) -> Option<&CircledBlockchain> {
        self.superchain.open_chain()
    }

    /// All circled blockchains in order: sealed ones, then the open one.
    pub fn chains(&self) -> impl Iterator<Item = &CircledBlockchain> {
        self.sealed.iter().chain(self.superchain.open_chain.iter())
    }

    pub fn data_block_count(&self) -> u64 {
        self.chains().map(|c| c.len() as u64).sum()
    }

    /// Index the next lower-level block will receive. Lower-level indices
    /// form one monotone sequence per namespace across all of its chains,
    /// starting at 0 for the absolute genesis.
    pub fn next_lower_index(&self) -> u64 {
        if let Some(chain) = self.superchain.open_chain.as_ref() {
            return chain.next_index();
        }
        match self
            .superchain
            .superblocks
            .last()
            .and_then(|sb| sb.as_super())
        {
            Some(embedded) => embedded.index + 1,
            None => 0,
        }
    }

    /// True when the open chain is sealed but its terminal block has not
    /// been promoted — the state left behind by a crash between the two
    /// steps.
    pub fn has_pending_promotion(&self) -> bool {
        self.superchain
            .open_chain
            .as_ref()
            .is_some_and(|c| c.is_sealed())
    }

    /// Records one log digest: appends a data block to the open chain
    /// (opening one first if needed) and closes the chain afterwards if it
    /// is due.
    pub fn ingest(
        &mut self,
        digest: HexDigest,
        meta: Option<LogMeta>,
        cfg: &LedgerConfig,
        now: i64,
    ) -> Result<IngestOutcome, ChainError> {
        let mut records = Vec::new();

        if self.superchain.open_chain.is_none() {
            let next_index = self.next_lower_index();
            let chain = match self.superchain.superblocks.last() {
                None => CircledBlockchain::open_absolute(now),
                Some(prev_super) => {
                    CircledBlockchain::open_relative(prev_super, next_index, now)?
                }
            };
            records.push((Level::Lower, chain.genesis().clone()));
            self.superchain.open_chain = Some(chain);
        }

        let (block_index, timestamp, appended, close_due) = {
            let chain = self
                .superchain
                .open_chain
                .as_mut()
                .expect("open chain was ensured above");
            let block = chain.append_data_block(digest, meta, cfg, now)?;
            let snapshot = (block.index, block.timestamp, block.clone());
            let close_due = chain.should_close(cfg, now);
            (snapshot.0, snapshot.1, snapshot.2, close_due)
        };
        records.push((Level::Lower, appended));

        if close_due {
            let closed = self
                .close_open_chain(cfg, now)?
                .expect("a chain that is due to close is non-empty");
            records.extend(closed.records);
        }

        Ok(IngestOutcome {
            block_index,
            timestamp,
            records,
        })
    }

    /// Closes the open chain regardless of capacity or window: seals it,
    /// promotes the terminal block, archives the chain, and opens a fresh
    /// successor.
    ///
    /// Returns `None` (a no-op) when there is no open chain or it holds
    /// no data blocks — empty chains are never sealed. A chain found
    /// already sealed is promoted without re-sealing, which is how a
    /// crash between seal and promote is repaired.
    pub fn close_open_chain(
        &mut self,
        cfg: &LedgerConfig,
        now: i64,
    ) -> Result<Option<CloseOutcome>, ChainError> {
        let mut records = Vec::new();

        {
            let chain = match self.superchain.open_chain.as_mut() {
                None => return Ok(None),
                Some(chain) => chain,
            };
            if !chain.is_sealed() {
                if chain.is_empty() {
                    return Ok(None);
                }
                let terminal = chain.seal(now, cfg.difficulty)?.clone();
                records.push((Level::Lower, terminal));
            }
        }

        let terminal = self
            .superchain
            .open_chain
            .as_ref()
            .and_then(|c| c.terminal())
            .expect("chain was sealed above")
            .clone();
        let superblock = self.superchain.promote(&terminal, now, cfg.difficulty)?.clone();
        records.push((Level::Super, superblock.clone()));

        let closed = self
            .superchain
            .open_chain
            .take()
            .expect("open chain is present");
        self.sealed.push(closed);

        let successor =
            CircledBlockchain::open_relative(&superblock, self.next_lower_index(), now)?;
        records.push((Level::Lower, successor.genesis().clone()));
        self.superchain.open_chain = Some(successor);

        Ok(Some(CloseOutcome {
            terminal_index: terminal.index,
            superblock_index: superblock.index,
            records,
        }))
    }
}
