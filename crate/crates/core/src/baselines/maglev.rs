//! Maglev-style lookup table. Every resource walks its own permutation of
//! the table and claims slots round-robin until the table is full, which
//! bounds imbalance at one slot but forces a rebuild on every membership
//! change.

use crate::error::Error;
use crate::hashing::{fold_bytes, mix64, Key, Salt};
use crate::resource::{ResourceHasher, ResourceId};

const OFFSET_TAG: u64 = 0x4D_41_47_4F_46_46_53_31;
const SKIP_TAG: u64 = 0x4D_41_47_53_4B_49_50_31;
const LOOKUP_TAG: u64 = 0x4D_41_47_4B_45_59_31_31;

/// Smallest multiple of the resource count the table may be.
const MIN_TABLE_FACTOR: u64 = 100;

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn smallest_prime_at_least(x: u64) -> u64 {
    let mut c = x.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

#[derive(Debug, Clone)]
pub struct MaglevState {
    seed: u64,
    m: u64,
    /// Insertion order; table entries index into this.
    resources: Vec<ResourceId>,
    table: Vec<u32>,
    update_ops: u64,
}

impl MaglevState {
    /// `table_size` defaults to the smallest prime at least 100x the
    /// resource count, sized for the initial membership.
    pub fn new(
        seed: u64,
        table_size: Option<u64>,
        resources: Vec<ResourceId>,
    ) -> Result<Self, Error> {
        if resources.is_empty() {
            return Err(Error::NoResources);
        }
        let n = resources.len() as u64;
        let m = match table_size {
            Some(m) => {
                if !is_prime(m) {
                    return Err(Error::TableNotPrime(m));
                }
                if m < MIN_TABLE_FACTOR * n {
                    return Err(Error::TableTooSmall { m, n });
                }
                m
            }
            None => smallest_prime_at_least(MIN_TABLE_FACTOR * n),
        };
        let mut state = MaglevState {
            seed,
            m,
            resources: Vec::new(),
            table: Vec::new(),
            update_ops: 0,
        };
        for id in resources {
            if state.resources.contains(&id) {
                return Err(Error::DuplicateResource(id.to_string()));
            }
            state.resources.push(id);
        }
        state.populate();
        Ok(state)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table_size(&self) -> u64 {
        self.m
    }

    /// Slots owned by each resource, in insertion order.
    pub fn slot_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.resources.len()];
        for &e in &self.table {
            counts[e as usize] += 1;
        }
        counts
    }

    /// Owner of each table slot, for disruption accounting across rebuilds.
    pub fn table_owners(&self) -> Vec<ResourceId> {
        self.table
            .iter()
            .map(|&e| self.resources[e as usize].clone())
            .collect()
    }

    /// Table entry for a key, as an index into the insertion-order
    /// resource list. Cheaper than [`resolve`](ResourceHasher::resolve)
    /// when censusing large key samples.
    pub fn resolve_index(&self, key: Key) -> u32 {
        let slot = (mix64(key, Salt(self.seed ^ LOOKUP_TAG)) % self.m) as usize;
        self.table[slot]
    }

    /// Resources in insertion order; the table layout depends on it.
    pub fn resources_in_order(&self) -> &[ResourceId] {
        &self.resources
    }

    /// Snapshot restore: carry the op counter across a rebuild.
    pub(crate) fn set_update_ops(&mut self, ops: u64) {
        self.update_ops = ops;
    }

    fn populate(&mut self) {
        let n = self.resources.len();
        let m = self.m as usize;
        let mut offset = vec![0u64; n];
        let mut skip = vec![0u64; n];
        for (i, id) in self.resources.iter().enumerate() {
            let h = fold_bytes(id.as_bytes()) ^ self.seed;
            offset[i] = mix64(Key(h), Salt(OFFSET_TAG)) % self.m;
            skip[i] = mix64(Key(h), Salt(SKIP_TAG)) % (self.m - 1) + 1;
        }
        // next[i] walks resource i's permutation; with m prime and
        // 1 <= skip < m every permutation covers the whole table, so the
        // inner scan terminates within m steps.
        let mut next = vec![0u64; n];
        let mut entry = vec![u32::MAX; m];
        let mut filled = 0usize;
        'fill: loop {
            for i in 0..n {
                let mut c = ((offset[i] + next[i] * skip[i]) % self.m) as usize;
                while entry[c] != u32::MAX {
                    next[i] += 1;
                    c = ((offset[i] + next[i] * skip[i]) % self.m) as usize;
                }
                entry[c] = i as u32;
                next[i] += 1;
                filled += 1;
                if filled == m {
                    break 'fill;
                }
            }
        }
        self.table = entry;
        self.update_ops += self.m;
    }
}

impl ResourceHasher for MaglevState {
    fn resolve(&self, key: Key) -> &ResourceId {
        let slot = (mix64(key, Salt(self.seed ^ LOOKUP_TAG)) % self.m) as usize;
        &self.resources[self.table[slot] as usize]
    }

    fn add_resource(&mut self, id: ResourceId) -> Result<(), Error> {
        if self.resources.contains(&id) {
            return Err(Error::DuplicateResource(id.to_string()));
        }
        self.resources.push(id);
        self.populate();
        Ok(())
    }

    fn remove_resource(&mut self, id: &ResourceId) -> Result<(), Error> {
        let pos = self
            .resources
            .iter()
            .position(|r| r == id)
            .ok_or_else(|| Error::UnknownResource(id.to_string()))?;
        if self.resources.len() == 1 {
            return Err(Error::LastResource);
        }
        self.resources.remove(pos);
        self.populate();
        Ok(())
    }

    fn resource_count(&self) -> usize {
        self.resources.len()
    }

    fn resources(&self) -> Vec<ResourceId> {
        let mut out = self.resources.clone();
        out.sort();
        out
    }

    fn update_ops(&self) -> u64 {
        self.update_ops
    }
}
