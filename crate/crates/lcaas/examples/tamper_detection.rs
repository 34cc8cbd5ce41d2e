//! Tamper with a persisted ledger and watch verification catch it.
//!
//! The ledger file is plain JSON Lines, so nothing stops an attacker
//! with disk access from editing a record. What they cannot do is keep
//! the proof-of-work seals consistent: every block's hash commits to
//! every field, each hash feeds the next block, sealed chains carry an
//! aggregate hash, and superblocks embed the terminal blocks verbatim.
//! One flipped character anywhere surfaces as a verification failure.
//!
//! ```text
//! cargo run --example tamper_detection
//! ```

use lcaas::config::{Clock, LedgerConfig};
use lcaas::hash::compute_hash;
use lcaas::ledger::Ledger;
use lcaas::store::{self, LoadOptions};
use lcaas::verify;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = LedgerConfig::new(dir.path())
        .with_difficulty(1)
        .with_max_blocks_per_cb(4);

    // Record a handful of logs and seal one chain.
    {
        let ledger = Ledger::open(cfg.clone(), Clock::system())?;
        for line in [
            "04:12:00 sshd accepted publickey for root",
            "04:12:07 sudo session opened for root",
            "04:12:31 /etc/shadow read by uid 0",
            "04:13:02 sshd session closed",
            "04:15:44 cron job backup started",
        ] {
            ledger.submit_digest("audit", compute_hash(line.as_bytes()), None)?;
        }
    }

    let path = dir.path().join("audit.ledger.jsonl");
    let pristine = std::fs::read_to_string(&path)?;
    println!("persisted {} records to {}", pristine.lines().count(), path.display());

    let loaded = store::load_namespace(&path, "audit", LoadOptions { repair_tail: false })?;
    let report = verify::verify_full(&loaded.ledger, cfg.difficulty);
    println!(
        "pristine file: valid = {}, {} blocks checked, {} hashes computed\n",
        report.valid, report.checked_blocks, report.hash_computations
    );

    // The attack: rewrite the digest recorded in the second data block,
    // i.e. claim a different log line was archived that morning.
    let target = compute_hash(b"04:12:07 sudo session opened for root");
    let decoy = compute_hash(b"04:12:07 sudo session opened for backup-svc");
    let doctored = pristine.replacen(target.as_str(), decoy.as_str(), 1);
    assert_ne!(doctored, pristine, "the target digest should appear in the file");
    std::fs::write(&path, &doctored)?;
    println!("flipped one stored digest:\n  was {target}\n  now {decoy}\n");

    // The forgery parses fine — it is structurally a perfect ledger.
    let loaded = store::load_namespace(&path, "audit", LoadOptions { repair_tail: false })?;
    let report = verify::verify_full(&loaded.ledger, cfg.difficulty);
    println!("doctored file: valid = {}", report.valid);
    for failure in &report.failures {
        println!(
            "  block {} [{:?}]: {:?}",
            failure.block_index, failure.level, failure.reason
        );
    }
    assert!(!report.valid);

    // And a writable open refuses the directory outright.
    match Ledger::open(cfg, Clock::system()) {
        Err(err) => println!("\nwritable open refused: {err}"),
        Ok(_) => unreachable!("a tampered ledger must not open writable"),
    }
    Ok(())
}
