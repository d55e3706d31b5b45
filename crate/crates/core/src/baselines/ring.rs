//! Consistent-hashing ring with virtual nodes. Keys go to the owner of
//! the first point at or clockwise after their own hash, wrapping at the
//! top of the 64-bit space.

use crate::error::Error;
use crate::hashing::{fold_bytes, mix64, Key, Salt};
use crate::resource::{ResourceHasher, ResourceId};

/// Salt tag separating key hashing from point placement.
const KEY_TAG: u64 = 0x52_49_4E_47_4B_45_59_31;

#[derive(Debug, Clone)]
pub struct RingState {
    seed: u64,
    copies: u32,
    /// Sorted by (point, id); ids keep equal points deterministic.
    points: Vec<(u64, ResourceId)>,
    live: usize,
    update_ops: u64,
}

impl RingState {
    pub fn new(seed: u64, copies: u32, resources: Vec<ResourceId>) -> Result<Self, Error> {
        if copies == 0 {
            return Err(Error::ZeroCopies);
        }
        if resources.is_empty() {
            return Err(Error::NoResources);
        }
        let mut ring = RingState {
            seed,
            copies,
            points: Vec::with_capacity(resources.len() * copies as usize),
            live: 0,
            update_ops: 0,
        };
        for id in resources {
            ring.add_resource(id)?;
        }
        Ok(ring)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    /// Placement of one virtual node.
    fn point(&self, id: &ResourceId, copy: u32) -> u64 {
        mix64(Key(fold_bytes(id.as_bytes()) ^ self.seed), Salt(u64::from(copy)))
    }

    /// Where a key lands on the ring.
    pub fn key_point(&self, key: Key) -> u64 {
        mix64(key, Salt(self.seed ^ KEY_TAG))
    }

    /// All virtual nodes in ring order.
    pub fn points(&self) -> impl Iterator<Item = (u64, &ResourceId)> {
        self.points.iter().map(|(p, id)| (*p, id))
    }

    fn contains(&self, id: &ResourceId) -> bool {
        let probe = self.point(id, 0);
        self.points
            .binary_search_by(|(p, r)| (*p, r).cmp(&(probe, id)))
            .is_ok()
    }

    /// Snapshot restore: carry the op counter across a rebuild.
    pub(crate) fn set_update_ops(&mut self, ops: u64) {
        self.update_ops = ops;
    }
}

impl ResourceHasher for RingState {
    fn resolve(&self, key: Key) -> &ResourceId {
        let h = self.key_point(key);
        let i = self.points.partition_point(|(p, _)| *p < h);
        let idx = if i == self.points.len() { 0 } else { i };
        &self.points[idx].1
    }

    fn add_resource(&mut self, id: ResourceId) -> Result<(), Error> {
        if self.contains(&id) {
            return Err(Error::DuplicateResource(id.to_string()));
        }
        for copy in 0..self.copies {
            let p = self.point(&id, copy);
            let slot = self
                .points
                .partition_point(|(q, r)| (*q, r.as_bytes()) < (p, id.as_bytes()));
            self.points.insert(slot, (p, id.clone()));
        }
        self.live += 1;
        self.update_ops += u64::from(self.copies);
        Ok(())
    }

    fn remove_resource(&mut self, id: &ResourceId) -> Result<(), Error> {
        if !self.contains(id) {
            return Err(Error::UnknownResource(id.to_string()));
        }
        if self.live == 1 {
            return Err(Error::LastResource);
        }
        for copy in 0..self.copies {
            let p = self.point(id, copy);
            let slot = self
                .points
                .binary_search_by(|(q, r)| (*q, r).cmp(&(p, id)))
                .expect("virtual node present for live resource");
            self.points.remove(slot);
        }
        self.live -= 1;
        self.update_ops += u64::from(self.copies);
        Ok(())
    }

    fn resource_count(&self) -> usize {
        self.live
    }

    fn resources(&self) -> Vec<ResourceId> {
        let mut out: Vec<ResourceId> = self.points.iter().map(|(_, id)| id.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    fn update_ops(&self) -> u64 {
        self.update_ops
    }
}
