//! Measure why the ledger is two-level: superblocks let a reader audit
//! the whole history at a cost that depends only on how many chains were
//! sealed, never on how many log blocks they contain.
//!
//! Every verification pass meters its SHA-256 evaluations, so the claim
//! is checked with exact counts rather than wall-clock guesswork.
//!
//! ```text
//! cargo run --example hierarchical_verification
//! ```

use lcaas::chain::NamespaceLedger;
use lcaas::config::LedgerConfig;
use lcaas::hash::compute_hash;
use lcaas::verify;

/// Builds a namespace holding `chains` sealed chains of `per_chain`
/// data blocks each.
fn build(chains: u64, per_chain: u32) -> NamespaceLedger {
    let cfg = LedgerConfig::new("unused")
        .with_difficulty(1)
        .with_max_blocks_per_cb(per_chain);
    let mut ledger = NamespaceLedger::new("bench");
    for n in 0..chains * u64::from(per_chain) {
        let digest = compute_hash(&n.to_le_bytes());
        ledger
            .ingest(digest, None, &cfg, 1_714_558_951 + n as i64)
            .expect("mining at difficulty 1 succeeds");
    }
    ledger
}

fn main() {
    println!("five sealed chains per namespace, growing chain sizes:\n");
    println!("{:>10} {:>13} {:>13} {:>13}", "blocks/CB", "total blocks", "full hashes", "upper hashes");

    for per_chain in [5u32, 10, 25, 50] {
        let ledger = build(5, per_chain);
        assert_eq!(ledger.superchain().superblocks().len(), 5);

        let full = verify::verify_full(&ledger, 1);
        let upper = verify::verify_upper(ledger.superchain(), 1);
        assert!(full.valid && upper.valid);

        let total_blocks = 5 * (u64::from(per_chain) + 2); // genesis + data + terminal
        println!(
            "{per_chain:>10} {total_blocks:>13} {:>13} {:>13}",
            full.hash_computations, upper.hash_computations
        );
    }

    println!(
        "\nfull verification re-hashes every data, terminal, and superblock \
         plus one\naggregate per sealed chain — it grows with the data. \
         Upper-level verification\nre-hashes each superblock and its embedded \
         terminal block only: two hashes per\nsealed chain, flat no matter \
         how much the chains hold."
    );
    println!(
        "\nthe trade: upper-level trusts each terminal block's aggregate to \
         stand in for\nits chain, so a forged data block is caught by the full \
         pass (or by spot-checking\nthat one chain), while any rewrite of \
         sealed history's seals is caught upstairs."
    );
}
