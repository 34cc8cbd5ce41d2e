//! Run the HTTP service in-process and drive every endpoint with the
//! bundled client.
//!
//! The same server is what `lcaas serve` runs; the same client is what
//! the CLI uses when pointed at `--url`. Responses ride a uniform
//! envelope — `{"status":"success", …}` or `{"status":"failed",
//! "error":{"code","message"}}` — so scripting against it with curl and
//! jq works just as well:
//!
//! ```text
//! cargo run --example http_service
//! curl -s localhost:8660/stats | jq .
//! ```

use std::sync::Arc;

use lcaas::block::LogMeta;
use lcaas::client::ServiceClient;
use lcaas::config::{Clock, LedgerConfig};
use lcaas::hash::compute_hash;
use lcaas::ledger::Ledger;
use lcaas::service;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = LedgerConfig::new(dir.path())
        .with_difficulty(1)
        .with_max_blocks_per_cb(4);
    let ledger = Arc::new(Ledger::open(cfg, Clock::system())?);

    // Port 0 asks the OS for any free port; `lcaas serve` defaults to 8660.
    let handle = service::serve(ledger, "127.0.0.1:0".parse()?).await?;
    let client = ServiceClient::new(&handle.base_url());
    println!("service listening on {}\n", handle.base_url());

    let health = client.health().await?;
    println!("GET  /health         → {} (ledger_valid={})", health.health, health.ledger_valid);

    // POST /submit_raw — body is the log content, metadata via query.
    let content = b"14:03:27 worker picked up job 8841\n".to_vec();
    let meta = LogMeta {
        file_name: Some("worker.log".to_owned()),
        ts_from: None,
        ts_to: None,
    };
    let receipt = client.submit_raw("default", content.clone(), Some(&meta)).await?;
    println!(
        "POST /submit_raw     → block {} digest {}…",
        receipt.block_index,
        &receipt.digest.as_str()[..12]
    );

    // POST /submit_digest — body is a 64-char hex digest.
    let digest = compute_hash(b"locally hashed archive");
    let receipt = client.submit_digest("default", &digest, None).await?;
    println!("POST /submit_digest  → block {}", receipt.block_index);

    // POST /verify_raw and /verify_digest — count + locations.
    let lookup = client.verify_raw("default", content).await?;
    println!("POST /verify_raw     → found={} count={}", lookup.found, lookup.count);
    let lookup = client.verify_digest("default", &compute_hash(b"unseen")).await?;
    println!("POST /verify_digest  → found={} count={} (never submitted)", lookup.found, lookup.count);

    // POST /flush then GET /search: the sealed chain's terminal block
    // rides along with each hit.
    let flush = client.flush("default").await?;
    println!(
        "POST /flush          → sealed={} terminal={:?} superblock={:?}",
        flush.sealed, flush.terminal_index, flush.superblock_index
    );
    let found = client
        .search("default", &lcaas::verify::SearchQuery::block_index(1))
        .await?;
    println!(
        "POST /search         → {} hit(s); first is block {} ({})",
        found.count,
        found.results[0].block.index,
        found.results[0]
            .terminal
            .as_ref()
            .map_or("chain open".to_owned(), |tb| format!("sealed by block {}", tb.index)),
    );

    // POST /verify_tb — hand back a terminal block, get its standing.
    let terminal = found.results[0].terminal.clone().expect("chain was flushed");
    let report = client.verify_terminal("default", &terminal).await?;
    println!(
        "POST /verify_tb      → found={} hash_valid={} aggr_valid={}",
        report.found, report.hash_valid, report.aggr_valid
    );

    let stats = client.stats().await?;
    println!("GET  /stats          → ledger_valid={} namespaces={}", stats.ledger_valid, stats.namespaces.len());

    // Failures arrive as stable machine-readable codes.
    let err = client.submit_digest("default", &compute_hash(b"x"), Some(&LogMeta {
        file_name: None,
        ts_from: Some(10),
        ts_to: Some(5),
    }))
    .await
    .unwrap_err();
    println!("\nbad metadata rejected with code {:?}", err.api_code().unwrap_or("?"));

    handle.shutdown().await;
    println!("service shut down cleanly");
    Ok(())
}
