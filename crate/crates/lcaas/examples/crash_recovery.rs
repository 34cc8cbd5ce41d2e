//! Kill the ledger at the worst moments and watch it come back.
//!
//! The persistence layer is an append-only JSON Lines journal, so every
//! crash leaves one of three shapes behind: a cleanly finished file, a
//! torn final line (the write died mid-record), or a finished lower
//! chain whose superblock promotion never landed. The first two repair
//! on open; the third completes on open. What never happens silently is
//! the fourth shape — a damaged *interior* — because that is
//! indistinguishable from tampering.
//!
//! ```text
//! cargo run --example crash_recovery
//! ```

use std::fs;

use lcaas::config::{Clock, LedgerConfig};
use lcaas::hash::compute_hash;
use lcaas::ledger::{Ledger, LedgerError};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = LedgerConfig::new(dir.path())
        .with_difficulty(1)
        .with_max_blocks_per_cb(3);

    {
        let ledger = Ledger::open(cfg.clone(), Clock::system())?;
        for n in 0..5u64 {
            ledger.submit_digest("default", compute_hash(&n.to_le_bytes()), None)?;
        }
    }
    let path = dir.path().join("default.ledger.jsonl");
    let clean = fs::read_to_string(&path)?;
    println!("clean shutdown left {} records\n", clean.lines().count());

    // Crash shape 1: the process died while appending — the final line
    // is half a record. The partial line is dropped on open; the block it
    // would have described was never acknowledged to any client.
    fs::write(&path, &clean[..clean.len() - 25])?;
    {
        let ledger = Ledger::open(cfg.clone(), Clock::system())?;
        let stats = &ledger.stats()[0];
        println!(
            "torn tail: reopened with {} data blocks (the unacknowledged one is gone)",
            stats.data_blocks
        );
        assert!(ledger.is_valid());
        // The journal was truncated back to whole records on open.
        let repaired = fs::read_to_string(&path)?;
        assert_eq!(repaired.lines().count(), clean.lines().count() - 1);
    }

    // Crash shape 2: the terminal block landed but the crash hit before
    // the superblock was journaled. Opening finishes the promotion.
    fs::write(&path, &clean)?;
    {
        let ledger = Ledger::open(cfg.clone(), Clock::system())?;
        ledger.submit_digest("default", compute_hash(b"sixth"), None)?;
    }
    let full = fs::read_to_string(&path)?;
    let cut = full.rfind("\"super\"").expect("a superblock line exists");
    let line_start = full[..cut].rfind('\n').expect("superblock is not first") + 1;
    fs::write(&path, &full[..line_start])?;
    println!("\nsimulated crash between seal and promotion…");
    {
        let ledger = Ledger::open(cfg.clone(), Clock::system())?;
        let stats = &ledger.stats()[0];
        println!(
            "reopened: {} superblocks, {} sealed chains — promotion completed",
            stats.superblocks, stats.sealed_chains
        );
        assert!(ledger.is_valid());
        assert_eq!(stats.superblocks, stats.sealed_chains);
    }

    // Not a crash shape: interior damage. A hole in the middle of the
    // journal cannot come from an append that died; it is refused, and a
    // read-only forensic open is the way to look around.
    let full = fs::read_to_string(&path)?;
    let damaged = full.replacen("\"nonce\"", "\"nonc\"", 1);
    fs::write(&path, &damaged)?;
    match Ledger::open(cfg.clone(), Clock::system()) {
        Err(LedgerError::Store(err)) => println!("\ninterior damage refused: {err}"),
        Err(other) => unreachable!("unexpected error kind: {other}"),
        Ok(_) => unreachable!("interior damage must not open"),
    }
    Ok(())
}
