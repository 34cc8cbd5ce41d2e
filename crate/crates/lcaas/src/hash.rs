//! Hex-encoded SHA-256 digests and the proof-of-work difficulty predicate.
//!
//! Every hash in the ledger — block hashes, log-content digests, aggregate
//! chain hashes — is the lowercase hex rendering of a SHA-256 digest. Keeping
//! digests in their hex form (rather than raw bytes) makes the canonical
//! block encoding trivially printable and lets the difficulty rule operate
//! directly on leading characters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Number of hex characters in a rendered SHA-256 digest.
pub const DIGEST_HEX_LEN: usize = 64;

const ZERO: &str = "0000000000000000000000000000000000000000000000000000000000000000";

/// A SHA-256 digest as exactly 64 lowercase hex characters.
///
/// The all-zero string is a valid `HexDigest` but never the output of
/// [`compute_hash`] in practice; it is reserved as the distinguished
/// "no predecessor" value carried by genesis blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HexDigest(String);

/// Why a string failed to parse as a digest.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigestError {
    #[error("digest must be {DIGEST_HEX_LEN} characters, got {0}")]
    BadLength(usize),
    #[error("digest must be lowercase hex, found {0:?}")]
    BadCharacter(char),
}

impl HexDigest {
    /// The distinguished all-zero digest used by genesis blocks.
    pub fn zero() -> Self {
        HexDigest(ZERO.to_owned())
    }

    /// Validates and wraps a 64-character lowercase hex string.
    pub fn parse(s: &str) -> Result<Self, DigestError> {
        if s.len() != DIGEST_HEX_LEN {
            return Err(DigestError::BadLength(s.len()));
        }
        if let Some(c) = s.chars().find(|c| !matches!(c, '0'..='9' | 'a'..='f')) {
            return Err(DigestError::BadCharacter(c));
        }
        Ok(HexDigest(s.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == ZERO
    }
}

impl fmt::Display for HexDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for HexDigest {
    type Err = DigestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HexDigest::parse(s)
    }
}

impl TryFrom<String> for HexDigest {
    type Error = DigestError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        HexDigest::parse(&s)
    }
}

impl From<HexDigest> for String {
    fn from(d: HexDigest) -> String {
        d.0
    }
}

impl AsRef<str> for HexDigest {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// SHA-256 of `bytes`, rendered as lowercase hex.
pub fn compute_hash(bytes: &[u8]) -> HexDigest {
    HexDigest(hex::encode(Sha256::digest(bytes)))
}

/// True when the first `difficulty` characters of `digest` are all `'0'`.
///
/// Difficulty zero is satisfied by every digest.
pub fn meets_difficulty(digest: &HexDigest, difficulty: u32) -> bool {
    digest
        .as_str()
        .bytes()
        .take(difficulty as usize)
        .all(|b| b == b'0')
}
