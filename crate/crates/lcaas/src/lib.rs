//! Logchain-as-a-service: a hierarchical, proof-of-work-sealed ledger for
//! tamper-evident log storage.
//!
//! Log content — or just its SHA-256 digest, when the content must stay
//! private — is appended to a *circled blockchain* of mined data blocks.
//! When a chain reaches capacity or its open window expires it is closed by
//! a mined *terminal block* whose payload notarizes an aggregate hash over
//! every block in the chain. Each terminal block is then promoted verbatim
//! into a *superblock* on an upper-level chain, so checking the short upper
//! chain is enough to establish the integrity of every block beneath it.
//!
//! The crate is organized bottom-up:
//!
//! - [`hash`]: hex-encoded SHA-256 digests and the difficulty predicate.
//! - [`block`]: block payloads, canonical encoding, and nonce mining.
//! - [`chain`]: circled blockchains, superblockchains, and the
//!   seal/promote lifecycle.
//! - [`verify`]: full and upper-level verification, terminal-block
//!   round-trip checks, digest lookup, and interval search.
//! - [`store`]: the append-only JSON Lines persistence format and the
//!   content-addressed blob store.
//! - [`ledger`]: the thread-safe multi-namespace facade that ties ingest,
//!   persistence, and verification together.
//! - [`service`] / [`client`]: an HTTP API over a shared [`ledger::Ledger`]
//!   and a typed client for it.
//! - [`cli`]: the `lcaas` command line (serve, submit, verify, flush,
//!   validate, inspect).
//!
//! Start with the runnable examples: `cargo run --example mine_block`
//! walks the proof-of-work primitive, `chain_lifecycle` shows a chain
//! being sealed and promoted, and `http_service` drives the whole stack
//! over HTTP. The remaining examples each cover one capability in
//! isolation.

pub mod block;
pub mod chain;
pub mod cli;
pub mod client;
pub mod config;
pub mod hash;
pub mod ledger;
pub mod service;
pub mod store;
pub mod verify;

pub use block::{Block, BlockKind, BlockPayload, LogMeta, TerminalPayload};
pub use chain::{CircledBlockchain, Level, NamespaceLedger, Superblockchain};
pub use config::{Clock, LedgerConfig};
pub use hash::{compute_hash, meets_difficulty, HexDigest};
pub use ledger::Ledger;
pub use verify::{SearchQuery, VerificationReport};
