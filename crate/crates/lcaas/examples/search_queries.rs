//! Ask the ledger three kinds of questions: "what landed in block N",
//! "what was archived during this window", and "which submissions
//! claimed to cover this time range".
//!
//! The first two run on ledger-controlled facts (block index and block
//! timestamp). The third runs on submitter-supplied metadata — useful
//! for narrowing an investigation, but only as truthful as the client
//! that attached it. Sealed chains answer index and block-time queries
//! without being walked when their terminal block rules the range out.
//!
//! ```text
//! cargo run --example search_queries
//! ```

use lcaas::block::LogMeta;
use lcaas::config::{Clock, LedgerConfig};
use lcaas::ledger::Ledger;
use lcaas::verify::{SearchQuery, SearchResult};

fn show(label: &str, results: &[SearchResult]) {
    println!("{label}: {} hit(s)", results.len());
    for hit in results {
        let file = hit
            .block
            .log_meta()
            .and_then(|m| m.file_name.as_deref())
            .unwrap_or("-");
        let seal = match &hit.terminal {
            Some(tb) => format!("sealed by terminal block {}", tb.index),
            None => "chain still open".to_owned(),
        };
        println!(
            "  block {:>2}  t={}  file={file:<14} {seal}",
            hit.block.index, hit.block.timestamp
        );
    }
    println!();
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = LedgerConfig::new(dir.path())
        .with_difficulty(1)
        .with_max_blocks_per_cb(3);
    // A scripted clock makes the block timestamps predictable to query.
    let clock = Clock::fixed(1_714_558_000);
    let ledger = Ledger::open(cfg, clock.clone())?;

    // Six rotated logs arrive ten minutes apart; each one declares which
    // span of record timestamps it covers.
    for (n, file) in ["web-00.log", "web-01.log", "web-02.log", "db-00.log", "db-01.log", "db-02.log"]
        .iter()
        .enumerate()
    {
        let covers_from = 1_714_500_000 + n as i64 * 1_000;
        let meta = LogMeta {
            file_name: Some((*file).to_owned()),
            ts_from: Some(covers_from),
            ts_to: Some(covers_from + 999),
        };
        ledger.submit_raw("default", format!("contents of {file}").as_bytes(), Some(meta))?;
        clock.advance(600);
    }

    // Point lookup by block index.
    show(
        "block index 2",
        &ledger.search("default", &SearchQuery::block_index(2))?,
    );

    // Everything the ledger notarized during a half-hour window,
    // regardless of what the submissions claimed about themselves.
    let from = 1_714_558_000;
    show(
        "blocks minted in the first half hour",
        &ledger.search("default", &SearchQuery::block_time(from, from + 1_799)?)?,
    );

    // Which submissions claim to cover an incident at record time
    // ~1_714_502_500? Metadata-driven: a dishonest client could lie here,
    // but the blocks carrying the claims are still tamper-evident.
    show(
        "submissions claiming records near the incident",
        &ledger.search("default", &SearchQuery::record_time(1_714_502_000, 1_714_502_999)?)?,
    );

    // An empty answer is an answer: nothing landed that far back.
    show(
        "blocks minted before the service started",
        &ledger.search("default", &SearchQuery::block_time(0, 1_000_000)?)?,
    );
    Ok(())
}
