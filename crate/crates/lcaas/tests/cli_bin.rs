//! Integration tests of the `lcaas` binary: exit-code contract, chunked
//! submission, offline validation, and the serve lifecycle.

use std::fs;
use std::io::{BufRead, BufReader};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use lcaas::hash::compute_hash;

const ENV_VARS: [&str; 8] = [
    "LCAAS_ADDR",
    "LCAAS_DIR",
    "LCAAS_URL",
    "LCAAS_DIFFICULTY",
    "LCAAS_MAX_BLOCKS",
    "LCAAS_WINDOW_SECONDS",
    "LCAAS_STORE_RAW",
    "LCAAS_FIXED_CLOCK",
];

/// A command for the built binary, isolated from ambient configuration.
fn lcaas() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lcaas"));
    for var in ENV_VARS {
        cmd.env_remove(var);
    }
    cmd
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = lcaas().args(args).output().unwrap();
    (
        status.code().unwrap_or(-1),
        String::from_utf8_lossy(&stdout).into_owned(),
        String::from_utf8_lossy(&stderr).into_owned(),
    )
}

fn dir_args(dir: &Path) -> Vec<String> {
    vec![
        "--dir".into(),
        dir.display().to_string(),
        "--difficulty".into(),
        "1".into(),
    ]
}

#[test]
fn submit_verify_round_trip_embedded() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("auth.log");
    fs::write(&log, "jan 1 sshd ok\njan 2 sshd ok\n").unwrap();
    let log_arg = log.display().to_string();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();

    let (code, out, err) = run(&[&["submit", &log_arg], &extra[..]].concat());
    assert_eq!(code, 0, "submit failed: {err}");
    assert!(out.contains("recorded block 1"), "unexpected output: {out}");

    let (code, out, _) = run(&[&["verify", &log_arg], &extra[..]].concat());
    assert_eq!(code, 0, "verify of a submitted file must exit 0");
    assert!(out.contains("1 matching block"), "unexpected output: {out}");

    // The digest form agrees with the file form.
    let digest = compute_hash(&fs::read(&log).unwrap());
    let (code, out, _) = run(&[&["verify", digest.as_str(), "--digest"], &extra[..]].concat());
    assert_eq!(code, 0);
    assert!(out.contains("1 matching block"));

    // An edited file stops verifying: exit 1, not an operational error.
    fs::write(&log, "jan 1 sshd ok\njan 2 sshd FORGED\n").unwrap();
    let (code, out, _) = run(&[&["verify", &log_arg], &extra[..]].concat());
    assert_eq!(code, 1);
    assert!(out.contains("not recorded"));
}

#[test]
fn chunked_submission_records_each_slice() {
    let data = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (1..=10).map(|n| format!("line {n}")).collect();
    let content = format!("{}\n", lines.join("\n"));
    let log = data.path().join("big.log");
    fs::write(&log, &content).unwrap();
    let log_arg = log.display().to_string();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();

    let (code, out, err) = run(&[
        &["submit", &log_arg, "--lines-per-chunk", "4"],
        &extra[..],
    ]
    .concat());
    assert_eq!(code, 0, "chunked submit failed: {err}");
    assert!(out.contains("chunk 1/3"), "expected 3 chunks: {out}");
    assert!(out.contains("chunk 3/3"), "expected 3 chunks: {out}");

    // Every chunk's exact byte slice verifies: 4 + 4 + 2 lines.
    let bytes = content.as_bytes();
    let newline_positions: Vec<usize> = bytes
        .iter()
        .enumerate()
        .filter_map(|(i, b)| (*b == b'\n').then_some(i))
        .collect();
    let cuts = [0, newline_positions[3] + 1, newline_positions[7] + 1, bytes.len()];
    assert_eq!(
        &bytes[cuts[0]..cuts[1]],
        b"line 1\nline 2\nline 3\nline 4\n"
    );
    for window in cuts.windows(2) {
        let digest = compute_hash(&bytes[window[0]..window[1]]);
        let (code, out, _) =
            run(&[&["verify", digest.as_str(), "--digest"], &extra[..]].concat());
        assert_eq!(code, 0, "chunk slice not recorded: {out}");
    }
}

#[test]
fn submit_aborts_with_failed_chunk_number() {
    // A fake service that accepts the first submission and reports an
    // injected fault on every later one: the CLI must stop at chunk 2,
    // leaving chunk 1 committed, and exit 2.
    let rt = tokio::runtime::Runtime::new().unwrap();
    let _guard = rt.enter();
    let (addr_tx, addr_rx) = mpsc::channel();
    rt.spawn(async move {
        use axum::routing::post;
        use std::sync::atomic::{AtomicU32, Ordering};
        static CALLS: AtomicU32 = AtomicU32::new(0);

        let app = axum::Router::new().route(
            "/submit_raw",
            post(|| async {
                let call = CALLS.fetch_add(1, Ordering::SeqCst);
                let body = if call == 0 {
                    serde_json::json!({
                        "status": "success",
                        "digest": "00".repeat(32),
                        "block_index": 1,
                        "timestamp": 1,
                        "stored": false,
                    })
                } else {
                    serde_json::json!({
                        "status": "failed",
                        "error": { "code": "internal", "message": "injected fault" },
                    })
                };
                axum::Json(body)
            }),
        );
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        addr_tx.send(listener.local_addr().unwrap()).unwrap();
        axum::serve(listener, app).await.unwrap();
    });
    let addr = addr_rx.recv_timeout(Duration::from_secs(10)).unwrap();

    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("big.log");
    fs::write(&log, "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n").unwrap();

    let (code, out, err) = run(&[
        "submit",
        &log.display().to_string(),
        "--lines-per-chunk",
        "4",
        "--url",
        &format!("http://{addr}"),
    ]);
    assert_eq!(code, 2, "API failure is an operational error");
    assert!(err.contains("chunk 2 of 3 failed"), "stderr: {err}");
    assert!(err.contains("injected fault"), "stderr: {err}");
    assert!(out.contains("chunk 1/3"), "chunk 1 was committed: {out}");
    assert!(!out.contains("chunk 2/3"));
}

#[test]
fn flush_seals_then_noops() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("one.log");
    fs::write(&log, "solo line\n").unwrap();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();

    run(&[&["submit", &log.display().to_string()], &extra[..]].concat());

    let (code, out, _) = run(&[&["flush"], &extra[..]].concat());
    assert_eq!(code, 0);
    assert!(
        out.contains("terminal block 2") && out.contains("superblock 0"),
        "unexpected output: {out}"
    );

    let (code, out, _) = run(&[&["flush"], &extra[..]].concat());
    assert_eq!(code, 0, "a no-op flush is still a success");
    assert!(out.contains("nothing to flush"), "unexpected output: {out}");
}

fn tamper_ledger_file(dir: &Path, original_digest: &str) {
    let path = dir.join("default.ledger.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let forged = compute_hash(b"forged content");
    let tampered = text.replacen(original_digest, forged.as_str(), 1);
    assert_ne!(text, tampered, "tamper fixture must change the file");
    fs::write(&path, tampered).unwrap();
}

#[test]
fn validate_reports_offline_verification() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("app.log");
    fs::write(&log, "evidence\n").unwrap();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
    run(&[&["submit", &log.display().to_string()], &extra[..]].concat());

    let (code, out, _) = run(&[&["validate"], &extra[..]].concat());
    assert_eq!(code, 0);
    assert!(out.contains("namespace default: valid"), "output: {out}");

    // One mutated record → exit 1 naming the block and the reason.
    let digest = compute_hash(b"evidence\n");
    tamper_ledger_file(data.path(), digest.as_str());
    let (code, out, _) = run(&[&["validate"], &extra[..]].concat());
    assert_eq!(code, 1);
    assert!(out.contains("INVALID"), "output: {out}");
    assert!(out.contains("block 1"), "output: {out}");
    assert!(out.contains("hash_mismatch"), "output: {out}");

    // Missing directory → operational error.
    let missing = data.path().join("nope");
    let (code, _, err) = run(&[
        "validate",
        "--dir",
        &missing.display().to_string(),
        "--difficulty",
        "1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("no such ledger directory"), "stderr: {err}");
}

#[test]
fn inspect_prints_summary_and_queries() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("app.log");
    fs::write(&log, "x\ny\nz\n").unwrap();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
    run(&[
        &["submit", &log.display().to_string(), "--lines-per-chunk", "1"],
        &extra[..],
    ]
    .concat());

    let (code, out, _) = run(&[&["inspect"], &extra[..]].concat());
    assert_eq!(code, 0);
    assert!(out.contains("ledger valid: true"), "output: {out}");
    assert!(out.contains("namespace default: 3 data blocks"), "output: {out}");

    let (code, out, _) = run(&[&["inspect", "--index", "2"], &extra[..]].concat());
    assert_eq!(code, 0);
    assert!(out.contains("block 2 [data]"), "output: {out}");
    assert!(out.contains("file=app.log"), "output: {out}");

    let (code, out, _) =
        run(&[&["inspect", "--index", "2", "--json"], &extra[..]].concat());
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(parsed[0]["block"]["index"], 2);
}

#[test]
fn digest_only_submission_keeps_content_private() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("secret.log");
    fs::write(&log, "do not persist this\n").unwrap();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();

    let (code, _, _) = run(&[
        &["submit", &log.display().to_string(), "--digest-only", "--no-meta"],
        &extra[..],
    ]
    .concat());
    assert_eq!(code, 0);

    // Nothing in the ledger directory contains the plaintext.
    let ledger_text =
        fs::read_to_string(data.path().join("default.ledger.jsonl")).unwrap();
    assert!(!ledger_text.contains("do not persist"));
    assert!(!ledger_text.contains("secret.log"));
    assert!(!data.path().join("blobs").exists());

    let (code, _, _) = run(&[&["verify", &log.display().to_string()], &extra[..]].concat());
    assert_eq!(code, 0, "digest-only submissions still verify");
}

#[test]
fn target_is_required() {
    let (code, _, err) = run(&["verify", "something"]);
    assert_eq!(code, 2);
    assert!(err.contains("--url") || err.contains("--dir"), "stderr: {err}");
}

#[test]
fn env_vars_mirror_flags() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("app.log");
    fs::write(&log, "via env\n").unwrap();

    let out = lcaas()
        .args(["submit", &log.display().to_string()])
        .env("LCAAS_DIR", data.path())
        .env("LCAAS_DIFFICULTY", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(data.path().join("default.ledger.jsonl").exists());
}

/// Reads the child's stdout line by line until one contains `needle`.
fn wait_for_line(child: &mut Child, needle: &str, timeout: Duration) -> Option<String> {
    let stdout = child.stdout.take().expect("child stdout must be piped");
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for line in BufReader::new(stdout).lines().map_while(Result::ok) {
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    let deadline = Instant::now() + timeout;
    loop {
        let left = deadline.saturating_duration_since(Instant::now());
        match rx.recv_timeout(left) {
            Ok(line) if line.contains(needle) => return Some(line),
            Ok(_) => continue,
            Err(_) => return None,
        }
    }
}

fn wait_for_exit(child: &mut Child, timeout: Duration) -> Option<i32> {
    let deadline = Instant::now() + timeout;
    while Instant::now() < deadline {
        if let Some(status) = child.try_wait().unwrap() {
            return status.code();
        }
        std::thread::sleep(Duration::from_millis(20));
    }
    None
}

#[test]
fn serve_starts_answers_and_is_scriptable() {
    let data = tempfile::tempdir().unwrap();
    let mut child = lcaas()
        .args([
            "serve",
            "--addr",
            "127.0.0.1:0",
            "--dir",
            &data.path().display().to_string(),
            "--difficulty",
            "1",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();

    let line = wait_for_line(&mut child, "listening on", Duration::from_secs(15))
        .expect("serve must announce its address");
    let url = line
        .split_whitespace()
        .find(|w| w.starts_with("http://"))
        .unwrap()
        .to_owned();

    // Drive the served instance through the CLI's URL mode.
    let log = data.path().join("remote.log");
    fs::write(&log, "over the wire\n").unwrap();
    let (code, out, err) = run(&["submit", &log.display().to_string(), "--url", &url]);
    assert_eq!(code, 0, "submit over URL failed: {err}");
    assert!(out.contains("recorded block 1"));

    let (code, _, _) = run(&["verify", &log.display().to_string(), "--url", &url]);
    assert_eq!(code, 0);

    let (code, out, _) = run(&["inspect", "--url", &url]);
    assert_eq!(code, 0);
    assert!(out.contains("namespace default: 1 data blocks"), "output: {out}");

    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn serve_refuses_tampered_ledger_unless_forensic() {
    let data = tempfile::tempdir().unwrap();
    let log = data.path().join("app.log");
    fs::write(&log, "evidence\n").unwrap();
    let extra = dir_args(data.path());
    let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
    run(&[&["submit", &log.display().to_string()], &extra[..]].concat());
    tamper_ledger_file(data.path(), compute_hash(b"evidence\n").as_str());

    let out = lcaas()
        .args([
            "serve",
            "--addr",
            "127.0.0.1:0",
            "--dir",
            &data.path().display().to_string(),
            "--difficulty",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "tampered ledger must refuse to serve");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("verification"), "stderr: {err}");

    // Forensic mode serves it and reports the invalid state.
    let mut child = lcaas()
        .args([
            "serve",
            "--addr",
            "127.0.0.1:0",
            "--dir",
            &data.path().display().to_string(),
            "--difficulty",
            "1",
            "--forensic",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let line = wait_for_line(&mut child, "listening on", Duration::from_secs(15))
        .expect("forensic serve must start");
    let url = line
        .split_whitespace()
        .find(|w| w.starts_with("http://"))
        .unwrap()
        .to_owned();

    let body = tokio::runtime::Runtime::new().unwrap().block_on(async {
        reqwest::get(format!("{url}/health"))
            .await
            .unwrap()
            .text()
            .await
            .unwrap()
    });
    assert!(body.contains("\"ledger_valid\":false"), "health: {body}");

    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn serve_reports_bind_failure() {
    let holder = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = holder.local_addr().unwrap();
    let data = tempfile::tempdir().unwrap();

    let mut child = lcaas()
        .args([
            "serve",
            "--addr",
            &addr.to_string(),
            "--dir",
            &data.path().display().to_string(),
        ])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    // Bounded wait: if the bind somehow succeeded the server would run
    // forever, and this test should fail rather than hang.
    let code = wait_for_exit(&mut child, Duration::from_secs(30));
    if code.is_none() {
        child.kill().unwrap();
        child.wait().unwrap();
    }
    assert_eq!(code, Some(2), "occupied port is an operational error");
}
