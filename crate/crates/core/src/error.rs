use thiserror::Error;

/// Contract violations raised by the hashing structures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("capacity must satisfy 1 <= w <= a <= u32::MAX, got a={a}, w={w}")]
    InvalidCapacity { a: u64, w: u64 },
    #[error("hash range must be nonzero")]
    ZeroRange,
    #[error("bucket {0} is not in the working set")]
    InvalidRemoval(u32),
    #[error("cannot remove the last working bucket")]
    LastBucket,
    #[error("all {0} buckets are in use")]
    CapacityExhausted(u32),
    #[error("resource {0:?} is already registered")]
    DuplicateResource(String),
    #[error("resource {0:?} is not registered")]
    UnknownResource(String),
    #[error("cannot remove the last resource")]
    LastResource,
    #[error("resource id must be 1..=255 bytes, got {0}")]
    InvalidResourceId(usize),
    #[error("at least one resource is required")]
    NoResources,
    #[error("virtual copies per resource must be nonzero")]
    ZeroCopies,
    #[error("maglev table size {0} is not prime")]
    TableNotPrime(u64),
    #[error("maglev table size {m} holds fewer than 100 slots per resource ({n} resources)")]
    TableTooSmall { m: u64, n: u64 },
    #[error("state invariant violated: {0}")]
    CorruptState(String),
}

/// Failures while persisting or restoring a state snapshot.
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot is not parseable: {0}")]
    Malformed(String),
    #[error("unsupported snapshot format tag {0:?}")]
    Format(String),
    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },
    #[error("snapshot holds a {found:?} state, expected {expected:?}")]
    TierMismatch { expected: String, found: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}
