//! Ledger configuration and the injectable clock.
//!
//! A [`LedgerConfig`] is fixed for the lifetime of a ledger instance: the
//! difficulty target in particular must not change once blocks have been
//! mined, because stored blocks are only re-checkable against the difficulty
//! they were mined at. The [`Clock`] exists so that tests and reproducible
//! deployments can pin block timestamps instead of reading the system time.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

/// Hard ceiling on the difficulty target. Each additional leading zero
/// multiplies expected mining work by 16; more than 8 is unusable on a
/// single node.
pub const MAX_DIFFICULTY: u32 = 8;

/// Hard ceiling on the open-chain window: 24 hours, in seconds.
pub const MAX_OPEN_WINDOW_SECONDS: i64 = 86_400;

/// Tunable parameters for one ledger instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerConfig {
    /// Required count of leading `'0'` hex characters in every mined hash.
    pub difficulty: u32,
    /// A circled blockchain is sealed as soon as it holds this many data
    /// blocks.
    pub max_blocks_per_cb: u32,
    /// A non-empty circled blockchain is sealed once it has been open for
    /// this many seconds, even if below capacity.
    pub max_open_window_seconds: i64,
    /// Directory holding the per-namespace ledger files and the blob store.
    pub ledger_dir: PathBuf,
    /// Whether raw submissions are archived in the content-addressed blob
    /// store in addition to being recorded by digest.
    pub store_raw: bool,
}

/// Why a configuration was rejected.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("difficulty {0} exceeds the maximum of {MAX_DIFFICULTY}")]
    DifficultyTooHigh(u32),
    #[error("max_blocks_per_cb must be at least 1")]
    ZeroCapacity,
    #[error("max_open_window_seconds must be in 1..={MAX_OPEN_WINDOW_SECONDS}, got {0}")]
    WindowOutOfRange(i64),
}

impl LedgerConfig {
    /// A configuration with the stock defaults: difficulty 2, ten data
    /// blocks per chain, a one-hour open window, and digest-only storage.
    pub fn new(ledger_dir: impl AsRef<Path>) -> Self {
        LedgerConfig {
            difficulty: 2,
            max_blocks_per_cb: 10,
            max_open_window_seconds: 3_600,
            ledger_dir: ledger_dir.as_ref().to_path_buf(),
            store_raw: false,
        }
    }

    pub fn with_difficulty(mut self, difficulty: u32) -> Self {
        self.difficulty = difficulty;
        self
    }

    pub fn with_max_blocks_per_cb(mut self, max_blocks: u32) -> Self {
        self.max_blocks_per_cb = max_blocks;
        self
    }

    pub fn with_open_window_seconds(mut self, seconds: i64) -> Self {
        self.max_open_window_seconds = seconds;
        self
    }

    pub fn with_store_raw(mut self, store_raw: bool) -> Self {
        self.store_raw = store_raw;
        self
    }

    /// Checks the bounds that keep a single-node deployment workable.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.difficulty > MAX_DIFFICULTY {
            return Err(ConfigError::DifficultyTooHigh(self.difficulty));
        }
        if self.max_blocks_per_cb == 0 {
            return Err(ConfigError::ZeroCapacity);
        }
        if self.max_open_window_seconds < 1
            || self.max_open_window_seconds > MAX_OPEN_WINDOW_SECONDS
        {
            return Err(ConfigError::WindowOutOfRange(self.max_open_window_seconds));
        }
        Ok(())
    }
}

/// Source of block timestamps (seconds since the Unix epoch).
///
/// The fixed variant is shared: cloning the clock clones a handle, so a
/// ledger and a test driving it observe the same adjustable time.
#[derive(Debug, Clone)]
pub enum Clock {
    System,
    Fixed(Arc<AtomicI64>),
}

impl Clock {
    pub fn system() -> Self {
        Clock::System
    }

    /// A clock pinned at `epoch`, movable with [`Clock::set`] and
    /// [`Clock::advance`].
    pub fn fixed(epoch: i64) -> Self {
        Clock::Fixed(Arc::new(AtomicI64::new(epoch)))
    }

    pub fn now(&self) -> i64 {
        match self {
            Clock::System => SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0),
            Clock::Fixed(t) => t.load(Ordering::SeqCst),
        }
    }

    /// Repins a fixed clock; has no effect on the system clock.
    pub fn set(&self, epoch: i64) {
        if let Clock::Fixed(t) = self {
            t.store(epoch, Ordering::SeqCst);
        }
    }

    /// Moves a fixed clock forward; has no effect on the system clock.
    pub fn advance(&self, seconds: i64) {
        if let Clock::Fixed(t) = self {
            t.fetch_add(seconds, Ordering::SeqCst);
        }
    }
}
