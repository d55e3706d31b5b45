//! Resource identifiers and the interface shared by everything that maps
//! keys to named resources (the wrapped anchor and the baselines).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hashing::Key;

/// Opaque resource name: 1 to 255 bytes, compared bytewise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct ResourceId(Box<[u8]>);

impl ResourceId {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, Error> {
        let bytes = bytes.into();
        if bytes.is_empty() || bytes.len() > 255 {
            return Err(Error::InvalidResourceId(bytes.len()));
        }
        Ok(ResourceId(bytes.into_boxed_slice()))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl TryFrom<Vec<u8>> for ResourceId {
    type Error = Error;
    fn try_from(bytes: Vec<u8>) -> Result<Self, Error> {
        ResourceId::new(bytes)
    }
}

impl From<ResourceId> for Vec<u8> {
    fn from(id: ResourceId) -> Vec<u8> {
        id.0.into_vec()
    }
}

impl std::str::FromStr for ResourceId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        ResourceId::new(s.as_bytes().to_vec())
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", String::from_utf8_lossy(&self.0))
    }
}

/// Key-to-resource mapping with dynamic membership. Implemented by
/// [`Wrapper`](crate::wrapper::Wrapper) and all three baselines so the
/// harness can drive them through one interface.
pub trait ResourceHasher {
    /// Map a key to a live resource. Read-only.
    fn resolve(&self, key: Key) -> &ResourceId;
    fn add_resource(&mut self, id: ResourceId) -> Result<(), Error>;
    fn remove_resource(&mut self, id: &ResourceId) -> Result<(), Error>;
    fn resource_count(&self) -> usize;
    /// Live resources in ascending byte order.
    fn resources(&self) -> Vec<ResourceId>;
    /// Cumulative mutating-operation count, same convention as
    /// [`BucketHasher::update_ops`](crate::anchor::BucketHasher::update_ops).
    fn update_ops(&self) -> u64;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_length_limits() {
        assert!(ResourceId::new(vec![]).is_err());
        assert!(ResourceId::new(vec![0u8; 256]).is_err());
        assert!(ResourceId::new(vec![0u8; 255]).is_ok());
        assert_eq!(
            ResourceId::new(vec![]).unwrap_err(),
            Error::InvalidResourceId(0)
        );
    }

    #[test]
    fn ordering_is_bytewise() {
        let a: ResourceId = "cache-a".parse().unwrap();
        let b: ResourceId = "cache-b".parse().unwrap();
        assert!(a < b);
        assert_eq!(a, "cache-a".parse().unwrap());
    }
}
