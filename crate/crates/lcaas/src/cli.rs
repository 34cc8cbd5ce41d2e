//! The `lcaas` command line.
//!
//! Subcommands: `serve` runs the HTTP service; `submit`, `verify`, and
//! `flush` ingest and check logs against either a running service
//! (`--url`) or a local ledger directory (`--dir`, embedded mode) with
//! identical semantics; `validate` re-verifies a directory offline; and
//! `inspect` prints stats or queried blocks.
//!
//! Exit codes are a stable scripting contract: `0` success (and, for
//! `verify`/`validate`, a positive outcome), `1` verification negative
//! (digest not recorded, terminal block rejected, ledger invalid), `2`
//! operational error (unreadable file, bind failure, bad flags, service
//! unreachable).
//!
//! Flags mirror the service environment variables (`LCAAS_ADDR`,
//! `LCAAS_DIR`, `LCAAS_DIFFICULTY`, `LCAAS_MAX_BLOCKS`,
//! `LCAAS_WINDOW_SECONDS`, `LCAAS_STORE_RAW`, `LCAAS_FIXED_CLOCK`,
//! `LCAAS_URL`). Tuning flags matter only in embedded mode; a service
//! applies its own configuration. Keep tuning consistent across
//! invocations against the same directory — in particular `--difficulty`,
//! which both mining and validation depend on.

use std::error::Error;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::block::{Block, BlockKind, LogMeta};
use crate::client::ServiceClient;
use crate::config::{Clock, LedgerConfig};
use crate::hash::{compute_hash, HexDigest};
use crate::ledger::{Ledger, LedgerError};
use crate::service;
use crate::store::StoreError;
use crate::verify::{SearchQuery, SearchResult, TbReport, VerificationReport};

#[derive(Debug, Parser)]
#[command(
    name = "lcaas",
    version,
    about = "Tamper-evident log ledger: hierarchical blockchains sealed by proof of work"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP service over a ledger directory.
    Serve(ServeArgs),
    /// Record a log file, optionally split into line chunks.
    Submit(SubmitArgs),
    /// Check whether a file, digest, or terminal block is recorded.
    Verify(VerifyArgs),
    /// Seal the namespace's open chain now.
    Flush(FlushArgs),
    /// Re-verify a ledger directory offline and report every failure.
    Validate(ValidateArgs),
    /// Print ledger statistics or matching blocks.
    Inspect(InspectArgs),
}

/// Where a command acts: a running service or a local directory.
#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Base URL of a running lcaas service, e.g. http://127.0.0.1:8660.
    #[arg(long, env = "LCAAS_URL")]
    url: Option<String>,
    /// Local ledger directory (embedded mode; takes the writer lock for
    /// mutating commands).
    #[arg(long, env = "LCAAS_DIR")]
    dir: Option<PathBuf>,
}

enum Target {
    Url(String),
    Dir(PathBuf),
}

impl TargetArgs {
    fn resolve(&self) -> Target {
        match (&self.url, &self.dir) {
            (Some(url), _) => Target::Url(url.clone()),
            (None, Some(dir)) => Target::Dir(dir.clone()),
            (None, None) => unreachable!("clap enforces the target group"),
        }
    }
}

/// Ledger tuning, used when operating on a local directory.
#[derive(Debug, Args, Clone)]
struct TuningArgs {
    /// Leading zero hex digits required of every mined hash.
    #[arg(long, env = "LCAAS_DIFFICULTY", default_value_t = 2)]
    difficulty: u32,
    /// Data blocks per chain before it is sealed.
    #[arg(long, env = "LCAAS_MAX_BLOCKS", default_value_t = 10)]
    max_blocks: u32,
    /// Seconds a non-empty chain may stay open before sealing.
    #[arg(long, env = "LCAAS_WINDOW_SECONDS", default_value_t = 3600)]
    window_seconds: i64,
    /// Archive raw log bytes alongside digests.
    #[arg(long, env = "LCAAS_STORE_RAW")]
    store_raw: bool,
    /// Fixed epoch-seconds clock for reproducible runs.
    #[arg(long, env = "LCAAS_FIXED_CLOCK")]
    fixed_clock: Option<i64>,
}

impl TuningArgs {
    fn config(&self, dir: &Path) -> LedgerConfig {
        LedgerConfig::new(dir)
            .with_difficulty(self.difficulty)
            .with_max_blocks_per_cb(self.max_blocks)
            .with_open_window_seconds(self.window_seconds)
            .with_store_raw(self.store_raw)
    }

    fn clock(&self) -> Clock {
        self.fixed_clock.map_or_else(Clock::system, Clock::fixed)
    }
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Address to listen on.
    #[arg(long, env = "LCAAS_ADDR", default_value = "127.0.0.1:8660")]
    addr: SocketAddr,
    /// Ledger directory to serve.
    #[arg(long, env = "LCAAS_DIR", default_value = "./lcaas-data")]
    dir: PathBuf,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Start even if the ledger fails verification, serving it for
    /// inspection; /health and /stats report the invalid state.
    #[arg(long)]
    forensic: bool,
}

#[derive(Debug, Args)]
struct SubmitArgs {
    /// Log file to record.
    path: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    /// Namespace to record into.
    #[arg(long, default_value = "default")]
    namespace: String,
    /// Split the file into consecutive chunks of this many lines and
    /// record one block per chunk, in order. Default: one block for the
    /// whole file.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    lines_per_chunk: Option<u32>,
    /// Send only digests; raw bytes never leave this machine.
    #[arg(long)]
    digest_only: bool,
    /// Recorded file name (defaults to the file's basename).
    #[arg(long)]
    file_name: Option<String>,
    /// Earliest record timestamp the log covers, epoch seconds.
    #[arg(long)]
    ts_from: Option<i64>,
    /// Latest record timestamp the log covers, epoch seconds.
    #[arg(long)]
    ts_to: Option<i64>,
    /// Attach no metadata at all.
    #[arg(long, conflicts_with_all = ["file_name", "ts_from", "ts_to"])]
    no_meta: bool,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// A log file path, or a 64-hex digest.
    value: String,
    #[command(flatten)]
    target: TargetArgs,
    /// Namespace to check against.
    #[arg(long, default_value = "default")]
    namespace: String,
    /// Force digest interpretation of VALUE.
    #[arg(long, conflicts_with = "tb")]
    digest: bool,
    /// Treat VALUE as a terminal-block JSON file and check it against
    /// the recorded superblocks.
    #[arg(long)]
    tb: bool,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct FlushArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Namespace whose open chain is sealed.
    #[arg(long, default_value = "default")]
    namespace: String,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Ledger directory to verify.
    #[arg(long, env = "LCAAS_DIR")]
    dir: PathBuf,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Namespace to inspect.
    #[arg(long, default_value = "default")]
    namespace: String,
    /// The data block with this index.
    #[arg(long, group = "query", value_name = "N")]
    index: Option<u64>,
    /// Blocks whose ingestion timestamp falls in an inclusive range.
    #[arg(long, group = "query", value_name = "FROM..TO")]
    block_time: Option<String>,
    /// Blocks whose metadata claims records in an inclusive range.
    #[arg(long, group = "query", value_name = "FROM..TO")]
    record_time: Option<String>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

/// Parses the argument list and runs one command to completion,
/// returning the process exit code.
pub async fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; they are not errors.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Serve(args) => cmd_serve(args).await,
        Command::Submit(args) => cmd_submit(args).await,
        Command::Verify(args) => cmd_verify(args).await,
        Command::Flush(args) => cmd_flush(args).await,
        Command::Validate(args) => cmd_validate(args),
        Command::Inspect(args) => cmd_inspect(args).await,
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

/// [`run`] over the process arguments.
pub async fn run_from_args() -> u8 {
    run(std::env::args_os()).await
}

type CmdResult = Result<u8, Box<dyn Error>>;

async fn cmd_serve(args: ServeArgs) -> CmdResult {
    let cfg = args.tuning.config(&args.dir);
    let clock = args.tuning.clock();
    let open = if args.forensic {
        Ledger::open_forensic
    } else {
        Ledger::open
    };
    let ledger = Arc::new(open(cfg, clock)?);
    if !ledger.is_valid() {
        eprintln!("warning: ledger failed verification; serving in forensic mode");
    }
    let handle = service::serve(ledger, args.addr).await?;
    println!("lcaas listening on {}", handle.base_url());
    tokio::signal::ctrl_c().await?;
    println!("shutting down");
    handle.shutdown().await;
    Ok(0)
}

/// Splits `content` into consecutive runs of `lines_per_chunk` lines.
/// Each chunk is the exact byte slice of its lines, including every
/// trailing newline, so re-deriving a chunk later hashes identically. A
/// final run without a trailing newline still forms a chunk.
fn split_chunks(content: &[u8], lines_per_chunk: u32) -> Vec<&[u8]> {
    let per = lines_per_chunk as usize;
    let mut chunks = Vec::new();
    let mut start = 0;
    let mut lines = 0;
    for (pos, byte) in content.iter().enumerate() {
        if *byte == b'\n' {
            lines += 1;
            if lines == per {
                chunks.push(&content[start..=pos]);
                start = pos + 1;
                lines = 0;
            }
        }
    }
    if start < content.len() {
        chunks.push(&content[start..]);
    }
    chunks
}

#[derive(Serialize)]
struct ChunkReceipt {
    chunk: usize,
    digest: HexDigest,
    block_index: u64,
    timestamp: i64,
}

async fn cmd_submit(args: SubmitArgs) -> CmdResult {
    let content = fs::read(&args.path)
        .map_err(|e| format!("cannot read {}: {e}", args.path.display()))?;
    if content.is_empty() {
        return Err(format!("{} is empty; nothing to submit", args.path.display()).into());
    }
    let chunks: Vec<&[u8]> = match args.lines_per_chunk {
        Some(per) => split_chunks(&content, per),
        None => vec![&content],
    };
    let meta = if args.no_meta {
        None
    } else {
        Some(LogMeta {
            file_name: args.file_name.clone().or_else(|| {
                args.path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
            }),
            ts_from: args.ts_from,
            ts_to: args.ts_to,
        })
    };

    let total = chunks.len();
    let mut receipts: Vec<ChunkReceipt> = Vec::with_capacity(total);
    // Any failure aborts with the 1-based chunk number; chunks already
    // committed stay — the ledger is append-only.
    let fail = |number: usize, err: &dyn Display| -> Box<dyn Error> {
        format!("chunk {number} of {total} failed: {err}").into()
    };

    match args.target.resolve() {
        Target::Url(url) => {
            let client = ServiceClient::new(&url);
            for (i, chunk) in chunks.iter().enumerate() {
                let digest = compute_hash(chunk);
                let result = if args.digest_only {
                    client
                        .submit_digest(&args.namespace, &digest, meta.as_ref())
                        .await
                } else {
                    client
                        .submit_raw(&args.namespace, chunk.to_vec(), meta.as_ref())
                        .await
                        .map(|r| crate::ledger::SubmitReceipt {
                            block_index: r.block_index,
                            timestamp: r.timestamp,
                        })
                };
                match result {
                    Ok(receipt) => note_receipt(&mut receipts, &args, total, i + 1, digest, receipt),
                    Err(err) => return Err(fail(i + 1, &err)),
                }
            }
        }
        Target::Dir(dir) => {
            let ledger = Ledger::open(args.tuning.config(&dir), args.tuning.clock())?;
            for (i, chunk) in chunks.iter().enumerate() {
                let digest = compute_hash(chunk);
                let result = if args.digest_only {
                    ledger.submit_digest(&args.namespace, digest.clone(), meta.clone())
                } else {
                    ledger
                        .submit_raw(&args.namespace, chunk, meta.clone())
                        .map(|r| crate::ledger::SubmitReceipt {
                            block_index: r.block_index,
                            timestamp: r.timestamp,
                        })
                };
                match result {
                    Ok(receipt) => note_receipt(&mut receipts, &args, total, i + 1, digest, receipt),
                    Err(err) => return Err(fail(i + 1, &err)),
                }
            }
        }
    }

    if args.json {
        println!("{}", serde_json::to_string(&json!({ "chunks": receipts }))?);
    }
    Ok(0)
}

fn note_receipt(
    receipts: &mut Vec<ChunkReceipt>,
    args: &SubmitArgs,
    total: usize,
    number: usize,
    digest: HexDigest,
    receipt: crate::ledger::SubmitReceipt,
) {
    if !args.json {
        let prefix = if total == 1 {
            String::new()
        } else {
            format!("chunk {number}/{total}: ")
        };
        println!(
            "{prefix}recorded block {} (digest {}, timestamp {})",
            receipt.block_index, digest, receipt.timestamp
        );
    }
    receipts.push(ChunkReceipt {
        chunk: number,
        digest,
        block_index: receipt.block_index,
        timestamp: receipt.timestamp,
    });
}

async fn cmd_verify(args: VerifyArgs) -> CmdResult {
    if args.tb {
        return cmd_verify_tb(&args).await;
    }

    let path = Path::new(&args.value);
    let digest = if !args.digest && path.is_file() {
        let content = fs::read(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        compute_hash(&content)
    } else {
        args.value.parse::<HexDigest>().map_err(|e| {
            format!(
                "{:?} is neither an existing file nor a digest: {e}",
                args.value
            )
        })?
    };

    let (count, locations) = match args.target.resolve() {
        Target::Url(url) => {
            let report = ServiceClient::new(&url)
                .verify_digest(&args.namespace, &digest)
                .await?;
            (report.count, report.locations)
        }
        Target::Dir(dir) => {
            let ledger = open_read_only(&args.tuning, &dir)?;
            let matches = ledger.find_by_digest(&args.namespace, &digest)?;
            (matches.count, matches.locations)
        }
    };

    if args.json {
        println!(
            "{}",
            serde_json::to_string(&json!({
                "digest": digest,
                "count": count,
                "found": count > 0,
                "locations": locations,
            }))?
        );
    } else if count > 0 {
        println!("digest {digest}: {count} matching block(s)");
        for loc in &locations {
            let state = if loc.sealed { "sealed" } else { "open" };
            println!("  block {} in chain {} ({state})", loc.block_index, loc.cb_ordinal);
        }
    } else {
        println!("digest {digest}: not recorded");
    }
    Ok(if count > 0 { 0 } else { 1 })
}

async fn cmd_verify_tb(args: &VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&args.value)
        .map_err(|e| format!("cannot read {}: {e}", args.value))?;
    let block: Block = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not a block JSON file: {e}", args.value))?;

    let report: TbReport = match args.target.resolve() {
        Target::Url(url) => {
            ServiceClient::new(&url)
                .verify_terminal(&args.namespace, &block)
                .await?
        }
        Target::Dir(dir) => {
            let ledger = open_read_only(&args.tuning, &dir)?;
            ledger.verify_terminal(&args.namespace, &block)?
        }
    };

    if args.json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        match report.superblock_index {
            Some(k) => println!(
                "terminal block: found in superblock {k}, hash_valid={}, aggr_valid={}",
                report.hash_valid, report.aggr_valid
            ),
            None => println!(
                "terminal block: not found (hash_valid={})",
                report.hash_valid
            ),
        }
    }
    Ok(if report.found && report.hash_valid && report.aggr_valid {
        0
    } else {
        1
    })
}

async fn cmd_flush(args: FlushArgs) -> CmdResult {
    let (sealed, terminal_index, superblock_index) = match args.target.resolve() {
        Target::Url(url) => {
            let outcome = ServiceClient::new(&url).flush(&args.namespace).await?;
            (outcome.sealed, outcome.terminal_index, outcome.superblock_index)
        }
        Target::Dir(dir) => {
            let ledger = Ledger::open(args.tuning.config(&dir), args.tuning.clock())?;
            match ledger.flush(&args.namespace)? {
                Some(r) => (true, Some(r.terminal_index), Some(r.superblock_index)),
                None => (false, None, None),
            }
        }
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string(&json!({
                "sealed": sealed,
                "terminal_index": terminal_index,
                "superblock_index": superblock_index,
            }))?
        );
    } else if sealed {
        println!(
            "sealed: terminal block {}, superblock {}",
            terminal_index.unwrap_or_default(),
            superblock_index.unwrap_or_default()
        );
    } else {
        println!("nothing to flush: open chain is empty or absent");
    }
    Ok(0)
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    if !args.dir.is_dir() {
        return Err(format!("no such ledger directory: {}", args.dir.display()).into());
    }
    let ledger = match open_read_only(&args.tuning, &args.dir) {
        Ok(ledger) => ledger,
        // A record that cannot be parsed, or a structurally impossible
        // sequence, is itself evidence of tampering: verification
        // negative, not an operational error.
        Err(LedgerError::Store(err @ StoreError::CorruptRecord { .. }))
        | Err(LedgerError::Store(err @ StoreError::OutOfOrder { .. })) => {
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string(&json!({
                        "valid": false,
                        "corrupt": err.to_string(),
                    }))?
                );
            } else {
                println!("invalid: {err}");
            }
            return Ok(1);
        }
        Err(other) => return Err(other.into()),
    };

    let reports = ledger.verify_all();
    let valid = reports.values().all(|r| r.valid);
    if args.json {
        println!(
            "{}",
            serde_json::to_string(&json!({ "valid": valid, "namespaces": reports }))?
        );
    } else {
        if reports.is_empty() {
            println!("empty ledger: nothing to verify");
        }
        for (namespace, report) in &reports {
            print_report(namespace, report);
        }
    }
    Ok(if valid { 0 } else { 1 })
}

fn print_report(namespace: &str, report: &VerificationReport) {
    if report.valid {
        println!(
            "namespace {namespace}: valid ({} blocks checked, {} hash computations)",
            report.checked_blocks, report.hash_computations
        );
    } else {
        println!(
            "namespace {namespace}: INVALID ({} failure(s), {} blocks checked)",
            report.failures.len(),
            report.checked_blocks
        );
        for failure in &report.failures {
            println!(
                "  block {} [{:?}] {}",
                failure.block_index, failure.level, failure.reason
            );
        }
    }
}

fn parse_bound<N>(raw: &str, what: &str) -> Result<(N, N), Box<dyn Error>>
where
    N: Copy + std::str::FromStr,
    N::Err: Display,
{
    let parse = |s: &str| -> Result<N, Box<dyn Error>> {
        s.trim()
            .parse::<N>()
            .map_err(|e| format!("bad {what} bound {s:?}: {e}").into())
    };
    match raw.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let v: N = parse(raw)?;
            Ok((v, v))
        }
    }
}

async fn cmd_inspect(args: InspectArgs) -> CmdResult {
    let query = if let Some(index) = args.index {
        Some(SearchQuery::block_index(index))
    } else if let Some(raw) = &args.block_time {
        let (from, to) = parse_bound::<i64>(raw, "block-time")?;
        Some(SearchQuery::block_time(from, to)?)
    } else if let Some(raw) = &args.record_time {
        let (from, to) = parse_bound::<i64>(raw, "record-time")?;
        Some(SearchQuery::record_time(from, to)?)
    } else {
        None
    };

    match (query, args.target.resolve()) {
        (Some(query), Target::Url(url)) => {
            let outcome = ServiceClient::new(&url).search(&args.namespace, &query).await?;
            print_results(&outcome.results, args.json)?;
        }
        (Some(query), Target::Dir(dir)) => {
            let ledger = open_read_only(&args.tuning, &dir)?;
            let results = ledger.search(&args.namespace, &query)?;
            print_results(&results, args.json)?;
        }
        (None, Target::Url(url)) => {
            let stats = ServiceClient::new(&url).stats().await?;
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string(&json!({
                        "ledger_valid": stats.ledger_valid,
                        "difficulty": stats.difficulty,
                        "namespaces": stats.namespaces,
                    }))?
                );
            } else {
                println!("ledger valid: {}", stats.ledger_valid);
                for ns in &stats.namespaces {
                    print_ns_stats(ns);
                }
            }
        }
        (None, Target::Dir(dir)) => {
            let ledger = open_read_only(&args.tuning, &dir)?;
            let stats = ledger.stats();
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string(&json!({
                        "ledger_valid": ledger.is_valid(),
                        "difficulty": ledger.config().difficulty,
                        "namespaces": stats,
                    }))?
                );
            } else {
                println!("ledger valid: {}", ledger.is_valid());
                for ns in &stats {
                    print_ns_stats(ns);
                }
            }
        }
    }
    Ok(0)
}

fn print_ns_stats(ns: &crate::ledger::NamespaceStats) {
    println!(
        "namespace {}: {} data blocks, {} sealed chains, {} superblocks, {} in open chain",
        ns.namespace, ns.data_blocks, ns.sealed_chains, ns.superblocks, ns.open_chain_len
    );
}

fn print_results(results: &[SearchResult], json: bool) -> Result<(), Box<dyn Error>> {
    if json {
        println!("{}", serde_json::to_string(results)?);
        return Ok(());
    }
    if results.is_empty() {
        println!("no matching blocks");
        return Ok(());
    }
    for result in results {
        let block = &result.block;
        let mut line = format!(
            "block {} [{}] timestamp={}",
            block.index,
            kind_name(block.kind),
            block.timestamp
        );
        if let Some(payload) = block.digest() {
            line.push_str(&format!(" digest={payload}"));
        }
        if let Some(meta) = block.log_meta() {
            if let Some(name) = &meta.file_name {
                line.push_str(&format!(" file={name}"));
            }
            if let (Some(from), Some(to)) = (meta.ts_from, meta.ts_to) {
                line.push_str(&format!(" records={from}..{to}"));
            }
        }
        if let Some(tb) = block.as_terminal() {
            line.push_str(&format!(
                " seals blocks {}..{} aggr={}",
                tb.block_index_from, tb.block_index_to, tb.aggr_hash
            ));
        }
        if let Some(seal) = &result.terminal {
            line.push_str(&format!(" (sealed by terminal block {})", seal.index));
        }
        println!("{line}");
    }
    Ok(())
}

fn kind_name(kind: BlockKind) -> &'static str {
    match kind {
        BlockKind::AbsoluteGenesis => "absolute_genesis",
        BlockKind::RelativeGenesis => "relative_genesis",
        BlockKind::Data => "data",
        BlockKind::Terminal => "terminal",
        BlockKind::Super => "super",
    }
}

fn open_read_only(tuning: &TuningArgs, dir: &Path) -> Result<Ledger, LedgerError> {
    Ledger::open_read_only(tuning.config(dir), tuning.clock())
}
