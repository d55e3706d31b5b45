//! The keyed 64-bit mixer every algorithm in this crate is built on.
//!
//! `mix64` is the SplitMix64 finalizer applied to the key xored with a
//! rotated salt. It is fixed: golden outputs are checked in under
//! `tests/data/hashing_golden.csv` and must never change across releases,
//! otherwise persisted states stop resolving keys the same way.

use crate::error::Error;

/// A lookup key. Callers hash their payload down to 64 bits themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Key(pub u64);

/// Salt deriving an independent hash function from the same mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Salt(pub u64);

/// Keyed mixer: `finalize(key ^ rotl(salt, 31))` with the SplitMix64
/// finalizer constants.
#[inline]
pub fn mix64(key: Key, salt: Salt) -> u64 {
    let mut x = key.0 ^ salt.0.rotate_left(31);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Map a key into `[0, range)`. `range` must be nonzero.
#[inline]
pub fn hash_to_range(key: Key, salt: Salt, range: u64) -> Result<u64, Error> {
    if range == 0 {
        return Err(Error::ZeroRange);
    }
    Ok(mix64(key, salt) % range)
}

/// Hot-path variant for callers that have already established `range > 0`.
#[inline]
pub(crate) fn to_range(key: Key, salt: Salt, range: u64) -> u64 {
    debug_assert!(range > 0);
    mix64(key, salt) % range
}

/// FNV-1a over a byte string, used to fold resource identifiers and
/// snapshot payloads down to 64 bits of key material.
pub fn fold_bytes(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
