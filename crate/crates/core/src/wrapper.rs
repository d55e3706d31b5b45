//! Pairs anchor buckets with named resources.
//!
//! The anchor works on dense bucket ids; operators deal in resource
//! names. The wrapper keeps the bijection: resource i starts on bucket i,
//! an added resource pairs with whatever bucket the anchor revives, and a
//! removed resource frees its bucket for the next addition.

use std::collections::HashMap;

use crate::anchor::{AnchorState, BucketHasher, BucketId};
use crate::error::Error;
use crate::hashing::Key;
use crate::resource::{ResourceHasher, ResourceId};

#[derive(Debug, Clone)]
pub struct Wrapper<B: BucketHasher = AnchorState> {
    state: B,
    forward: Vec<Option<ResourceId>>,
    backward: HashMap<ResourceId, BucketId>,
}

impl Wrapper<AnchorState> {
    /// Anchor of capacity `a` with one working bucket per resource.
    pub fn new(a: u32, seed: u64, resources: Vec<ResourceId>) -> Result<Self, Error> {
        let state = AnchorState::new(a, resources.len().try_into().unwrap_or(u32::MAX), seed)?;
        Self::with_state(state, resources)
    }
}

impl<B: BucketHasher> Wrapper<B> {
    /// Pair a freshly initialized bucket state (working set must be
    /// exactly `0..resources.len()`) with the given resources, in order.
    pub fn with_state(state: B, resources: Vec<ResourceId>) -> Result<Self, Error> {
        let r = resources.len();
        let expected: Vec<BucketId> = (0..r as u32).collect();
        if state.working_set() != expected {
            return Err(Error::InvalidCapacity {
                a: u64::from(state.capacity()),
                w: r as u64,
            });
        }
        let mut forward = vec![None; state.capacity() as usize];
        let mut backward = HashMap::with_capacity(r);
        for (bucket, id) in resources.into_iter().enumerate() {
            if backward.insert(id.clone(), bucket as u32).is_some() {
                return Err(Error::DuplicateResource(id.to_string()));
            }
            forward[bucket] = Some(id);
        }
        Ok(Wrapper {
            state,
            forward,
            backward,
        })
    }

    pub fn get_resource(&self, key: Key) -> &ResourceId {
        let bucket = self.state.get_bucket(key);
        self.forward[bucket as usize]
            .as_ref()
            .expect("working bucket is always paired")
    }

    /// Register a new resource; it takes over the most recently freed
    /// bucket (and thereby, exactly the keys that bucket last owned).
    pub fn add_resource(&mut self, id: ResourceId) -> Result<BucketId, Error> {
        if self.backward.contains_key(&id) {
            return Err(Error::DuplicateResource(id.to_string()));
        }
        let bucket = self.state.add_bucket()?;
        self.forward[bucket as usize] = Some(id.clone());
        self.backward.insert(id, bucket);
        Ok(bucket)
    }

    /// Unregister a resource and free its bucket.
    pub fn remove_resource(&mut self, id: &ResourceId) -> Result<BucketId, Error> {
        let Some(&bucket) = self.backward.get(id) else {
            return Err(Error::UnknownResource(id.to_string()));
        };
        if self.backward.len() == 1 {
            return Err(Error::LastResource);
        }
        self.state.remove_bucket(bucket)?;
        self.backward.remove(id);
        self.forward[bucket as usize] = None;
        Ok(bucket)
    }

    /// Rebuild a wrapper around a state that has already seen churn; the
    /// pairs must cover the working set exactly.
    pub fn restore(state: B, pairs: Vec<(BucketId, ResourceId)>) -> Result<Self, Error> {
        let mut forward = vec![None; state.capacity() as usize];
        let mut backward = HashMap::with_capacity(pairs.len());
        for (bucket, id) in pairs {
            if bucket >= state.capacity() {
                return Err(Error::CorruptState(format!(
                    "pair names bucket {bucket} beyond capacity"
                )));
            }
            if backward.insert(id.clone(), bucket).is_some() {
                return Err(Error::DuplicateResource(id.to_string()));
            }
            forward[bucket as usize] = Some(id);
        }
        let wrapper = Wrapper {
            state,
            forward,
            backward,
        };
        wrapper.validate()?;
        Ok(wrapper)
    }

    /// Current (bucket, resource) pairing in bucket order.
    pub fn pairs(&self) -> Vec<(BucketId, ResourceId)> {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(b, slot)| slot.as_ref().map(|id| (b as u32, id.clone())))
            .collect()
    }

    pub fn contains(&self, id: &ResourceId) -> bool {
        self.backward.contains_key(id)
    }

    pub fn bucket_of(&self, id: &ResourceId) -> Option<BucketId> {
        self.backward.get(id).copied()
    }

    pub fn resource_of(&self, bucket: BucketId) -> Option<&ResourceId> {
        self.forward.get(bucket as usize)?.as_ref()
    }

    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn capacity(&self) -> u32 {
        self.state.capacity()
    }

    pub fn state(&self) -> &B {
        &self.state
    }

    /// Check the pairing is a bijection onto the working set.
    pub fn validate(&self) -> Result<(), Error> {
        let fail = |why: String| Err(Error::CorruptState(why));
        let working = self.state.working_set();
        if working.len() != self.backward.len() {
            return fail("pair count disagrees with working set".into());
        }
        for &b in &working {
            let Some(Some(id)) = self.forward.get(b as usize) else {
                return fail(format!("working bucket {b} unpaired"));
            };
            if self.backward.get(id) != Some(&b) {
                return fail(format!("pairing of bucket {b} is not mutual"));
            }
        }
        for (i, slot) in self.forward.iter().enumerate() {
            if slot.is_some() && !working.contains(&(i as u32)) {
                return fail(format!("non-working bucket {i} still paired"));
            }
        }
        Ok(())
    }
}

impl<B: BucketHasher> ResourceHasher for Wrapper<B> {
    fn resolve(&self, key: Key) -> &ResourceId {
        self.get_resource(key)
    }
    fn add_resource(&mut self, id: ResourceId) -> Result<(), Error> {
        Wrapper::add_resource(self, id).map(|_| ())
    }
    fn remove_resource(&mut self, id: &ResourceId) -> Result<(), Error> {
        Wrapper::remove_resource(self, id).map(|_| ())
    }
    fn resource_count(&self) -> usize {
        self.backward.len()
    }
    fn resources(&self) -> Vec<ResourceId> {
        let mut out: Vec<ResourceId> = self.backward.keys().cloned().collect();
        out.sort();
        out
    }
    fn update_ops(&self) -> u64 {
        self.state.update_ops()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<ResourceId> {
        names.iter().map(|n| n.parse().unwrap()).collect()
    }

    #[test]
    fn initial_pairing_is_positional() {
        let w = Wrapper::new(8, 0, ids(&["a", "b", "c"])).unwrap();
        w.validate().unwrap();
        assert_eq!(w.bucket_of(&"a".parse().unwrap()), Some(0));
        assert_eq!(w.bucket_of(&"c".parse().unwrap()), Some(2));
        assert_eq!(w.resource_of(1).map(ToString::to_string), Some("b".into()));
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn duplicate_resources_rejected() {
        assert!(matches!(
            Wrapper::new(4, 0, ids(&["a", "a"])),
            Err(Error::DuplicateResource(_))
        ));
        let mut w = Wrapper::new(4, 0, ids(&["a", "b"])).unwrap();
        assert!(matches!(
            w.add_resource("b".parse().unwrap()),
            Err(Error::DuplicateResource(_))
        ));
    }

    #[test]
    fn add_reuses_the_freed_bucket() {
        let mut w = Wrapper::new(8, 1, ids(&["a", "b", "c", "d"])).unwrap();
        let freed = w.remove_resource(&"b".parse().unwrap()).unwrap();
        assert_eq!(freed, 1);
        assert!(!w.contains(&"b".parse().unwrap()));
        let bucket = w.add_resource("e".parse().unwrap()).unwrap();
        assert_eq!(bucket, 1);
        w.validate().unwrap();
    }

    /// A replacement resource inherits exactly the key set of the one it
    /// replaces, because the bucket mapping never changed.
    #[test]
    fn replacement_inherits_keys() {
        let mut w = Wrapper::new(16, 9, ids(&["a", "b", "c", "d", "e"])).unwrap();
        let b: ResourceId = "b".parse().unwrap();
        let owned: Vec<u64> = (0..5000)
            .filter(|&k| w.get_resource(Key(k)) == &b)
            .collect();
        assert!(!owned.is_empty());
        w.remove_resource(&b).unwrap();
        w.add_resource("b2".parse().unwrap()).unwrap();
        let b2: ResourceId = "b2".parse().unwrap();
        let owned_after: Vec<u64> = (0..5000)
            .filter(|&k| w.get_resource(Key(k)) == &b2)
            .collect();
        assert_eq!(owned, owned_after);
    }

    #[test]
    fn removal_moves_only_orphans() {
        let mut w = Wrapper::new(32, 7, ids(&["a", "b", "c", "d", "e", "f"])).unwrap();
        let before: Vec<ResourceId> = (0..2000).map(|k| w.get_resource(Key(k)).clone()).collect();
        let victim: ResourceId = "d".parse().unwrap();
        w.remove_resource(&victim).unwrap();
        w.validate().unwrap();
        for (k, old) in before.iter().enumerate() {
            let new = w.get_resource(Key(k as u64));
            if old == &victim {
                assert_ne!(new, &victim);
            } else {
                assert_eq!(new, old, "key {k} moved although its resource stayed");
            }
        }
    }

    #[test]
    fn boundary_errors() {
        let mut w = Wrapper::new(2, 3, ids(&["a", "b"])).unwrap();
        assert!(matches!(
            w.add_resource("c".parse().unwrap()),
            Err(Error::CapacityExhausted(2))
        ));
        assert!(matches!(
            w.remove_resource(&"zz".parse().unwrap()),
            Err(Error::UnknownResource(_))
        ));
        w.remove_resource(&"a".parse().unwrap()).unwrap();
        assert!(matches!(
            w.remove_resource(&"b".parse().unwrap()),
            Err(Error::LastResource)
        ));
        assert!(matches!(
            Wrapper::new(2, 0, ids(&["a", "b", "c"])),
            Err(Error::InvalidCapacity { .. })
        ));
    }
}
