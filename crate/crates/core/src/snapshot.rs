//! State persistence. A snapshot is a JSON document with a format tag, an
//! FNV-1a checksum over the body bytes, and a tier-tagged body. Loading
//! verifies the checksum, rebuilds the state and validates its invariants,
//! so a loaded state answers lookups exactly like the saved one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::anchor::{AnchorState, BucketId};
use crate::baselines::{HrwState, MaglevState, RingState};
use crate::error::SnapshotError;
use crate::hashing::fold_bytes;
use crate::resource::{ResourceHasher, ResourceId};
use crate::tiers::{NaiveState, ReducedState};
use crate::wrapper::Wrapper;

pub const FORMAT: &str = "anchorhash/v1";

type Pairs = Vec<(BucketId, ResourceId)>;

/// Any persistable algorithm instance. Anchor tiers come bare (bucket
/// interface) or wrapped (paired with named resources); the baselines are
/// rebuilt from their parameters.
#[derive(Debug, Clone)]
pub enum AnyState {
    Minimal(AnchorState),
    Naive(NaiveState),
    Reduced(ReducedState),
    WrappedMinimal(Wrapper<AnchorState>),
    WrappedNaive(Wrapper<NaiveState>),
    WrappedReduced(Wrapper<ReducedState>),
    Hrw(HrwState),
    Ring(RingState),
    Maglev(MaglevState),
}

#[derive(Serialize)]
#[serde(tag = "tier", rename_all = "kebab-case")]
enum BodyRef<'a> {
    Minimal {
        state: &'a AnchorState,
        pairs: Option<Pairs>,
    },
    Naive {
        state: &'a NaiveState,
        pairs: Option<Pairs>,
    },
    Reduced {
        state: &'a ReducedState,
        pairs: Option<Pairs>,
    },
    Hrw {
        seed: u64,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
    Ring {
        seed: u64,
        copies: u32,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
    Maglev {
        seed: u64,
        table_size: u64,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "tier", rename_all = "kebab-case")]
enum BodyOwned {
    Minimal {
        state: AnchorState,
        pairs: Option<Pairs>,
    },
    Naive {
        state: NaiveState,
        pairs: Option<Pairs>,
    },
    Reduced {
        state: ReducedState,
        pairs: Option<Pairs>,
    },
    Hrw {
        seed: u64,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
    Ring {
        seed: u64,
        copies: u32,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
    Maglev {
        seed: u64,
        table_size: u64,
        update_ops: u64,
        resources: Vec<ResourceId>,
    },
}

#[derive(Deserialize)]
struct FileIn<'a> {
    format: String,
    checksum: String,
    #[serde(borrow)]
    body: &'a RawValue,
}

fn checksum_hex(body: &str) -> String {
    format!("{:016x}", fold_bytes(body.as_bytes()))
}

impl AnyState {
    pub fn tier(&self) -> &'static str {
        match self {
            AnyState::Minimal(_) | AnyState::WrappedMinimal(_) => "minimal",
            AnyState::Naive(_) | AnyState::WrappedNaive(_) => "naive",
            AnyState::Reduced(_) | AnyState::WrappedReduced(_) => "reduced",
            AnyState::Hrw(_) => "hrw",
            AnyState::Ring(_) => "ring",
            AnyState::Maglev(_) => "maglev",
        }
    }

    fn body(&self) -> BodyRef<'_> {
        match self {
            AnyState::Minimal(s) => BodyRef::Minimal {
                state: s,
                pairs: None,
            },
            AnyState::Naive(s) => BodyRef::Naive {
                state: s,
                pairs: None,
            },
            AnyState::Reduced(s) => BodyRef::Reduced {
                state: s,
                pairs: None,
            },
            AnyState::WrappedMinimal(w) => BodyRef::Minimal {
                state: w.state(),
                pairs: Some(w.pairs()),
            },
            AnyState::WrappedNaive(w) => BodyRef::Naive {
                state: w.state(),
                pairs: Some(w.pairs()),
            },
            AnyState::WrappedReduced(w) => BodyRef::Reduced {
                state: w.state(),
                pairs: Some(w.pairs()),
            },
            AnyState::Hrw(s) => BodyRef::Hrw {
                seed: s.seed(),
                update_ops: s.update_ops(),
                resources: s.resources(),
            },
            AnyState::Ring(s) => BodyRef::Ring {
                seed: s.seed(),
                copies: s.copies(),
                update_ops: s.update_ops(),
                resources: s.resources(),
            },
            AnyState::Maglev(s) => BodyRef::Maglev {
                seed: s.seed(),
                table_size: s.table_size(),
                update_ops: s.update_ops(),
                resources: s.resources_in_order().to_vec(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let body = serde_json::to_string(&self.body()).expect("state serialization is infallible");
        let checksum = checksum_hex(&body);
        format!("{{\"format\":\"{FORMAT}\",\"checksum\":\"{checksum}\",\"body\":{body}}}")
    }

    pub fn from_json(text: &str) -> Result<Self, SnapshotError> {
        let file: FileIn =
            serde_json::from_str(text).map_err(|e| SnapshotError::Malformed(e.to_string()))?;
        if file.format != FORMAT {
            return Err(SnapshotError::Format(file.format));
        }
        let computed = checksum_hex(file.body.get());
        if computed != file.checksum {
            return Err(SnapshotError::Checksum {
                stored: file.checksum,
                computed,
            });
        }
        let body: BodyOwned = serde_json::from_str(file.body.get())
            .map_err(|e| SnapshotError::Malformed(e.to_string()))?;
        Self::rebuild(body)
    }

    fn rebuild(body: BodyOwned) -> Result<Self, SnapshotError> {
        Ok(match body {
            BodyOwned::Minimal { state, pairs } => {
                state.validate()?;
                match pairs {
                    None => AnyState::Minimal(state),
                    Some(p) => AnyState::WrappedMinimal(Wrapper::restore(state, p)?),
                }
            }
            BodyOwned::Naive { state, pairs } => {
                state.validate()?;
                match pairs {
                    None => AnyState::Naive(state),
                    Some(p) => AnyState::WrappedNaive(Wrapper::restore(state, p)?),
                }
            }
            BodyOwned::Reduced { state, pairs } => {
                state.validate()?;
                match pairs {
                    None => AnyState::Reduced(state),
                    Some(p) => AnyState::WrappedReduced(Wrapper::restore(state, p)?),
                }
            }
            BodyOwned::Hrw {
                seed,
                update_ops,
                resources,
            } => {
                let mut state = HrwState::new(seed, resources)?;
                state.set_update_ops(update_ops);
                AnyState::Hrw(state)
            }
            BodyOwned::Ring {
                seed,
                copies,
                update_ops,
                resources,
            } => {
                let mut state = RingState::new(seed, copies, resources)?;
                state.set_update_ops(update_ops);
                AnyState::Ring(state)
            }
            BodyOwned::Maglev {
                seed,
                table_size,
                update_ops,
                resources,
            } => {
                let mut state = MaglevState::new(seed, Some(table_size), resources)?;
                state.set_update_ops(update_ops);
                AnyState::Maglev(state)
            }
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
