//! The everyday flow, embedded in-process: open a ledger directory,
//! archive some log content, and later prove — or fail to prove — that a
//! file existed at submission time.
//!
//! The ledger only ever needs a digest; whether the log content itself
//! is retained (`store_raw`) is a policy choice made at open time.
//!
//! ```text
//! cargo run --example submit_and_verify
//! ```

use lcaas::block::LogMeta;
use lcaas::config::{Clock, LedgerConfig};
use lcaas::hash::compute_hash;
use lcaas::ledger::Ledger;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = LedgerConfig::new(dir.path())
        .with_difficulty(2)
        .with_store_raw(true);
    let ledger = Ledger::open(cfg, Clock::system())?;

    // A rotated log file arrives with its provenance.
    let rotated = b"10:00:01 api GET /health 200\n10:00:09 api POST /orders 201\n";
    let meta = LogMeta {
        file_name: Some("api-2024-05-01.log".to_owned()),
        ts_from: Some(1_714_557_601),
        ts_to: Some(1_714_557_609),
    };
    let receipt = ledger.submit_raw("default", rotated, Some(meta))?;
    println!(
        "archived api-2024-05-01.log ({} bytes) as block {} at t={}",
        rotated.len(),
        receipt.block_index,
        receipt.timestamp
    );
    println!("  digest {}", receipt.digest);
    println!("  raw copy stored: {}\n", receipt.stored);

    // Privacy-sensitive sources submit only the digest they computed.
    let private = compute_hash(b"redacted payroll export");
    let receipt = ledger.submit_digest("default", private.clone(), None)?;
    println!("recorded bare digest as block {}\n", receipt.block_index);

    // Verification answers with a count and the exact locations.
    let matches = ledger.find_by_digest("default", &compute_hash(rotated))?;
    println!("verify the rotated file:  count={}", matches.count);
    for loc in &matches.locations {
        println!(
            "  block {} in chain {} (sealed: {})",
            loc.block_index, loc.cb_ordinal, loc.sealed
        );
    }

    let matches = ledger.find_by_digest("default", &private)?;
    println!("verify the bare digest:   count={}", matches.count);

    // A file the ledger never saw — or saw in a different byte-for-byte
    // form — counts zero. One changed byte is a different digest.
    let mut edited = rotated.to_vec();
    edited[0] = b'9';
    let matches = ledger.find_by_digest("default", &compute_hash(&edited))?;
    println!("verify an edited copy:    count={}  (never archived)", matches.count);

    // Seal the open chain so the records sit behind a terminal block.
    if let Some(flush) = ledger.flush("default")? {
        println!(
            "\nflushed: terminal block {} sealed, superblock {} promoted",
            flush.terminal_index, flush.superblock_index
        );
    }
    for stats in ledger.stats() {
        println!(
            "namespace {:?}: {} data blocks, {} sealed chains, {} superblocks",
            stats.namespace, stats.data_blocks, stats.sealed_chains, stats.superblocks
        );
    }
    Ok(())
}
