//! Follow a namespace through the full chain lifecycle: an absolute
//! genesis opens the first chain, data blocks accumulate, the chain
//! seals at capacity behind a terminal block, the terminal block is
//! promoted into the superblockchain, and a relative genesis opens the
//! successor chain anchored to the superblock.
//!
//! ```text
//! cargo run --example chain_lifecycle
//! ```

use lcaas::block::BlockKind;
use lcaas::chain::NamespaceLedger;
use lcaas::config::LedgerConfig;
use lcaas::hash::compute_hash;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three data blocks per chain keeps the rollover easy to watch.
    let cfg = LedgerConfig::new("unused")
        .with_difficulty(1)
        .with_max_blocks_per_cb(3);
    let mut ledger = NamespaceLedger::new("demo");

    let mut now = 1_714_558_951;
    for n in 1..=7u64 {
        let digest = compute_hash(format!("log archive #{n}").as_bytes());
        let outcome = ledger.ingest(digest, None, &cfg, now)?;
        now += 60;

        print!(
            "ingest #{n}: data block {} at t={}",
            outcome.block_index, outcome.timestamp
        );
        // A closing ingest also emits a terminal block, a superblock, and
        // the successor's genesis — all visible in the outcome records.
        let sealed = outcome
            .records
            .iter()
            .any(|(_, b)| b.kind == BlockKind::Terminal);
        if sealed {
            println!("  → chain sealed, terminal promoted, successor opened");
        } else {
            println!();
        }
    }

    println!(
        "\nafter 7 ingests: {} sealed chains, {} superblocks, {} block(s) waiting",
        ledger.sealed_chains().len(),
        ledger.superchain().superblocks().len(),
        ledger.open_chain().map_or(0, |c| c.len()),
    );

    // The linkage invariant: each successor chain's relative genesis
    // carries (as both of its hashes) the terminal-block hash embedded in
    // the superblock that closed its predecessor.
    let superblock = &ledger.superchain().superblocks()[0];
    let embedded = superblock.as_super().expect("superblocks embed a terminal");
    let successor = &ledger.sealed_chains()[1];
    println!("\nsuperblock 0 embeds terminal hash {}", embedded.current_hash);
    println!("next chain's genesis carries       {}", successor.genesis().current_hash);
    assert_eq!(successor.genesis().current_hash, embedded.current_hash);
    assert_eq!(successor.genesis().kind, BlockKind::RelativeGenesis);

    // An explicit close seals the open chain without waiting for capacity.
    let closed = ledger.close_open_chain(&cfg, now)?.expect("one block is waiting");
    println!(
        "\nexplicit close: terminal block {} sealed, superblock {} promoted",
        closed.terminal_index, closed.superblock_index
    );

    // …but an empty chain never seals, no matter how much time passes.
    assert!(ledger.close_open_chain(&cfg, now + 1_000_000)?.is_none());
    println!("closing again with nothing waiting: no-op, empty chains never seal");
    Ok(())
}
