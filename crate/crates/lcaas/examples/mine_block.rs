//! Mine a single block and watch the proof-of-work knobs at work.
//!
//! A block is sealed by searching nonces `0, 1, 2, …` until the SHA-256
//! of its canonical encoding starts with `difficulty` zero hex
//! characters. The search is deterministic, so the same inputs always
//! land on the same nonce — run this twice and compare.
//!
//! ```text
//! cargo run --example mine_block
//! ```

use lcaas::block::{Block, BlockKind, BlockPayload};
use lcaas::hash::{compute_hash, meets_difficulty, HexDigest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let digest = compute_hash(b"2024-05-01T10:22:31Z login user=alice ok\n");
    println!("log line digest: {digest}\n");

    let previous = HexDigest::zero();
    for difficulty in 0..=4u32 {
        let started = std::time::Instant::now();
        let block = Block::mine(
            BlockKind::Data,
            1,
            1_714_558_951,
            BlockPayload::data(digest.clone(), None),
            previous.clone(),
            difficulty,
        )?;
        println!(
            "difficulty {difficulty}: nonce {:>6} found in {:>9.3?}  hash {}",
            block.nonce,
            started.elapsed(),
            block.current_hash
        );
        assert!(meets_difficulty(&block.current_hash, difficulty));
    }

    // The hash commits to every field through one canonical byte string:
    // "{nonce}|{index}|{timestamp}|{payload-json}|{previous_hash}".
    let block = Block::mine(
        BlockKind::Data,
        1,
        1_714_558_951,
        BlockPayload::data(digest, None),
        previous,
        2,
    )?;
    let encoded = String::from_utf8(block.encoded())?;
    println!("\ncanonical encoding:\n  {encoded}");
    println!("recomputed hash:    {}", compute_hash(encoded.as_bytes()));
    println!("stored hash:        {}", block.current_hash);

    // Re-mining the identical inputs reproduces the identical block.
    let again = Block::mine(
        BlockKind::Data,
        block.index,
        block.timestamp,
        block.data.clone(),
        block.previous_hash.clone(),
        2,
    )?;
    assert_eq!(again, block);
    println!("\nre-mining the same inputs reproduced nonce {} exactly", again.nonce);
    Ok(())
}
