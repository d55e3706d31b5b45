//! Reference implementations trading memory for lookup simplicity.
//!
//! Both tiers resolve keys to exactly the same buckets as
//! [`AnchorState`](crate::anchor::AnchorState) (given the same seed and
//! update history) but materialize what the minimal tier reconstructs on
//! the fly: the naive tier snapshots the whole working set at every
//! removal, the reduced tier keeps only the slots where that snapshot
//! differs from the identity.

use std::collections::HashMap;

use crate::anchor::{BucketHasher, BucketId, LookupTrace};
use crate::error::Error;
use crate::hashing::{to_range, Key, Salt};

/// How a removal snapshot orders the surviving working set.
///
/// `SlotReplace` keeps the slot order the minimal tier induces (the last
/// working bucket fills the removed bucket's slot), which makes all three
/// tiers agree key by key. `Ascending` sorts the survivors instead; the
/// mapping is equally consistent and balanced but only set-equivalent to
/// the other tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkingOrder {
    SlotReplace,
    Ascending,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum WorkingSnapshot {
    /// The snapshot is the identity prefix `[0, len)`. Holds for buckets
    /// stacked at construction time, where the working order has never
    /// been disturbed; stored implicitly so large partial anchors do not
    /// cost quadratic memory up front.
    Identity,
    Stored(Box<[u32]>),
}

impl WorkingSnapshot {
    #[inline]
    fn resolve(&self, h: u32) -> u32 {
        match self {
            WorkingSnapshot::Identity => h,
            WorkingSnapshot::Stored(arr) => arr[h as usize],
        }
    }
}

/// Serializes a map as a key-sorted pair list so snapshots are byte-stable.
fn map_to_sorted_pairs<K, V, S>(map: &HashMap<K, V>, serializer: S) -> Result<S::Ok, S::Error>
where
    K: Ord + std::hash::Hash + serde::Serialize,
    V: serde::Serialize,
    S: serde::Serializer,
{
    let mut entries: Vec<(&K, &V)> = map.iter().collect();
    entries.sort_by(|x, y| x.0.cmp(y.0));
    serde::Serialize::serialize(&entries, serializer)
}

fn pairs_to_map<'de, K, V, D>(deserializer: D) -> Result<HashMap<K, V>, D::Error>
where
    K: std::hash::Hash + Eq + serde::Deserialize<'de>,
    V: serde::Deserialize<'de>,
    D: serde::Deserializer<'de>,
{
    let pairs: Vec<(K, V)> = serde::Deserialize::deserialize(deserializer)?;
    Ok(pairs.into_iter().collect())
}

/// Bookkeeping shared by both tiers: bucket status, slot order and the
/// removal stack. Mirrors the minimal tier minus the successor array.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
struct TierBase {
    anchor: Vec<u32>,
    order: Vec<u32>,
    pos: Vec<u32>,
    stack: Vec<u32>,
    working: u32,
    capacity: u32,
    seed: u64,
    update_ops: u64,
}

impl TierBase {
    fn new(a: u32, w: u32, seed: u64) -> Result<Self, Error> {
        if w == 0 || w > a {
            return Err(Error::InvalidCapacity {
                a: u64::from(a),
                w: u64::from(w),
            });
        }
        let mut base = TierBase {
            anchor: vec![0; a as usize],
            order: (0..a).collect(),
            pos: (0..a).collect(),
            stack: Vec::with_capacity(a as usize),
            working: w,
            capacity: a,
            seed,
            update_ops: 0,
        };
        for b in (w..a).rev() {
            base.stack.push(b);
            base.anchor[b as usize] = b;
        }
        Ok(base)
    }

    #[inline]
    fn top_salt(&self) -> Salt {
        Salt(self.seed ^ (1u64 << 63))
    }

    #[inline]
    fn bucket_salt(&self, b: u32) -> Salt {
        Salt(self.seed ^ u64::from(b))
    }

    fn check_removable(&self, b: BucketId) -> Result<(), Error> {
        if b >= self.capacity || self.anchor[b as usize] != 0 {
            return Err(Error::InvalidRemoval(b));
        }
        if self.working == 1 {
            return Err(Error::LastBucket);
        }
        Ok(())
    }

    /// Drop `b` from the working prefix; returns the new prefix length.
    fn detach(&mut self, b: BucketId) -> usize {
        self.stack.push(b);
        self.working -= 1;
        let n = self.working as usize;
        let tail = self.order[n];
        self.anchor[b as usize] = self.working;
        self.order[self.pos[b as usize] as usize] = tail;
        self.pos[tail as usize] = self.pos[b as usize];
        self.update_ops += 4;
        n
    }

    /// Undo the matching [`Self::detach`] for the stack top.
    fn reattach(&mut self) -> Result<BucketId, Error> {
        let Some(b) = self.stack.pop() else {
            return Err(Error::CapacityExhausted(self.capacity));
        };
        let n = self.working as usize;
        self.anchor[b as usize] = 0;
        self.pos[self.order[n] as usize] = n as u32;
        self.order[self.pos[b as usize] as usize] = b;
        self.working += 1;
        self.update_ops += 4;
        Ok(b)
    }

    fn working_set(&self) -> Vec<BucketId> {
        let mut out: Vec<u32> = self.order[..self.working as usize].to_vec();
        out.sort_unstable();
        out
    }
}

/// Working-set-per-removal tier: every stacked bucket owns a full copy of
/// the working set as it stood right after the removal.
///
/// Deserializing does not check invariants; snapshot loading validates
/// before handing a state out.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NaiveState {
    base: TierBase,
    #[serde(serialize_with = "map_to_sorted_pairs", deserialize_with = "pairs_to_map")]
    kv: HashMap<u32, WorkingSnapshot>,
    ordering: WorkingOrder,
}

impl NaiveState {
    pub fn new(a: u32, w: u32, seed: u64) -> Result<Self, Error> {
        Self::with_order(a, w, seed, WorkingOrder::SlotReplace)
    }

    pub fn with_order(a: u32, w: u32, seed: u64, ordering: WorkingOrder) -> Result<Self, Error> {
        let base = TierBase::new(a, w, seed)?;
        let mut kv = HashMap::new();
        for b in w..a {
            kv.insert(b, WorkingSnapshot::Identity);
        }
        Ok(NaiveState { base, kv, ordering })
    }

    pub fn ordering(&self) -> WorkingOrder {
        self.ordering
    }

    /// Total length of all stored snapshots, counting implicit identity
    /// entries at their logical length.
    pub fn snapshot_cells(&self) -> u64 {
        self.kv
            .keys()
            .map(|&b| u64::from(self.base.anchor[b as usize]))
            .sum()
    }

    /// Snapshot cells that are actually materialized in memory.
    pub fn stored_cells(&self) -> u64 {
        self.kv
            .values()
            .map(|s| match s {
                WorkingSnapshot::Identity => 0,
                WorkingSnapshot::Stored(arr) => arr.len() as u64,
            })
            .sum()
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |why: String| Err(Error::CorruptState(why));
        if self.kv.len() != self.base.stack.len() {
            return fail("snapshot count disagrees with stack".into());
        }
        for &b in &self.base.stack {
            let ab = self.base.anchor[b as usize];
            match self.kv.get(&b) {
                None => return fail(format!("stacked bucket {b} has no snapshot")),
                Some(WorkingSnapshot::Identity) => {
                    if ab != b {
                        return fail(format!("identity snapshot for runtime removal {b}"));
                    }
                }
                Some(WorkingSnapshot::Stored(arr)) => {
                    if arr.len() as u64 != u64::from(ab) {
                        return fail(format!("snapshot for {b} has wrong length"));
                    }
                    let mut seen = std::collections::HashSet::new();
                    for &x in arr.iter() {
                        if x >= self.base.capacity
                            || self.base.anchor[x as usize] >= ab
                            || !seen.insert(x)
                        {
                            return fail(format!("snapshot for {b} is not a working-set permutation"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl BucketHasher for NaiveState {
    fn capacity(&self) -> u32 {
        self.base.capacity
    }
    fn working_count(&self) -> u32 {
        self.base.working
    }
    fn seed(&self) -> u64 {
        self.base.seed
    }

    fn get_bucket(&self, key: Key) -> BucketId {
        let mut b = to_range(key, self.base.top_salt(), u64::from(self.base.capacity)) as u32;
        loop {
            let ab = self.base.anchor[b as usize];
            if ab == 0 {
                return b;
            }
            let h = to_range(key, self.base.bucket_salt(b), u64::from(ab)) as u32;
            b = self.kv[&b].resolve(h);
        }
    }

    fn get_bucket_traced(&self, key: Key) -> LookupTrace {
        let mut hash_ops = 1u32;
        let mut reads = 1u32;
        let mut b = to_range(key, self.base.top_salt(), u64::from(self.base.capacity)) as u32;
        loop {
            let ab = self.base.anchor[b as usize];
            if ab == 0 {
                return LookupTrace {
                    bucket: b,
                    hash_ops,
                    memory_accesses: reads,
                };
            }
            hash_ops += 1;
            reads += 2; // snapshot cell plus the next status read
            let h = to_range(key, self.base.bucket_salt(b), u64::from(ab)) as u32;
            b = self.kv[&b].resolve(h);
        }
    }

    fn add_bucket(&mut self) -> Result<BucketId, Error> {
        let b = self.base.reattach()?;
        self.kv.remove(&b);
        self.base.update_ops += 1;
        Ok(b)
    }

    fn remove_bucket(&mut self, bucket: BucketId) -> Result<(), Error> {
        self.base.check_removable(bucket)?;
        let n = self.base.detach(bucket);
        let arr: Box<[u32]> = match self.ordering {
            WorkingOrder::SlotReplace => self.base.order[..n].into(),
            WorkingOrder::Ascending => {
                let mut sorted = self.base.order[..n].to_vec();
                sorted.sort_unstable();
                sorted.into()
            }
        };
        self.base.update_ops += arr.len() as u64 + 1;
        self.kv.insert(bucket, WorkingSnapshot::Stored(arr));
        Ok(())
    }

    fn working_set(&self) -> Vec<BucketId> {
        self.base.working_set()
    }
    fn update_ops(&self) -> u64 {
        self.base.update_ops
    }
}

/// Fixed-point-compressed tier: stores only the snapshot slots that
/// differ from the identity, keyed by `bucket * 2^32 + slot`.
///
/// Deserializing does not check invariants; snapshot loading validates
/// before handing a state out.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ReducedState {
    base: TierBase,
    #[serde(serialize_with = "map_to_sorted_pairs", deserialize_with = "pairs_to_map")]
    kv: HashMap<u64, u32>,
}

#[inline]
fn slot_key(b: u32, h: u32) -> u64 {
    (u64::from(b) << 32) | u64::from(h)
}

impl ReducedState {
    pub fn new(a: u32, w: u32, seed: u64) -> Result<Self, Error> {
        Ok(ReducedState {
            base: TierBase::new(a, w, seed)?,
            kv: HashMap::new(),
        })
    }

    /// Number of displaced-slot entries currently stored.
    pub fn entry_count(&self) -> usize {
        self.kv.len()
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |why: String| Err(Error::CorruptState(why));
        for (&packed, &v) in &self.kv {
            let b = (packed >> 32) as u32;
            let h = packed as u32;
            if b >= self.base.capacity || self.base.anchor[b as usize] == 0 {
                return fail(format!("entry for non-stacked bucket {b}"));
            }
            let ab = self.base.anchor[b as usize];
            if h >= ab || v == h || v >= self.base.capacity || self.base.anchor[v as usize] >= ab {
                return fail(format!("entry ({b},{h})->{v} out of contract"));
            }
        }
        Ok(())
    }
}

impl BucketHasher for ReducedState {
    fn capacity(&self) -> u32 {
        self.base.capacity
    }
    fn working_count(&self) -> u32 {
        self.base.working
    }
    fn seed(&self) -> u64 {
        self.base.seed
    }

    fn get_bucket(&self, key: Key) -> BucketId {
        let mut b = to_range(key, self.base.top_salt(), u64::from(self.base.capacity)) as u32;
        loop {
            let ab = self.base.anchor[b as usize];
            if ab == 0 {
                return b;
            }
            let h = to_range(key, self.base.bucket_salt(b), u64::from(ab)) as u32;
            b = self.kv.get(&slot_key(b, h)).copied().unwrap_or(h);
        }
    }

    fn get_bucket_traced(&self, key: Key) -> LookupTrace {
        let mut hash_ops = 1u32;
        let mut reads = 1u32;
        let mut b = to_range(key, self.base.top_salt(), u64::from(self.base.capacity)) as u32;
        loop {
            let ab = self.base.anchor[b as usize];
            if ab == 0 {
                return LookupTrace {
                    bucket: b,
                    hash_ops,
                    memory_accesses: reads,
                };
            }
            hash_ops += 1;
            reads += 2; // map probe plus the next status read
            let h = to_range(key, self.base.bucket_salt(b), u64::from(ab)) as u32;
            b = self.kv.get(&slot_key(b, h)).copied().unwrap_or(h);
        }
    }

    fn add_bucket(&mut self) -> Result<BucketId, Error> {
        // The stack top was the latest removal, so the current working
        // order is exactly the one its entries were generated from; the
        // same displaced-slot rule identifies them for deletion.
        let Some(&b) = self.base.stack.last() else {
            return Err(Error::CapacityExhausted(self.base.capacity));
        };
        let n = self.base.anchor[b as usize];
        let mut removed_entries = 0u64;
        for h in 0..n {
            if self.base.order[h as usize] != h {
                self.kv.remove(&slot_key(b, h));
                removed_entries += 1;
            }
        }
        self.base.update_ops += removed_entries;
        self.base.reattach()
    }

    fn remove_bucket(&mut self, bucket: BucketId) -> Result<(), Error> {
        self.base.check_removable(bucket)?;
        let n = self.base.detach(bucket) as u32;
        let mut inserted = 0u64;
        for h in 0..n {
            let occupant = self.base.order[h as usize];
            if occupant != h {
                self.kv.insert(slot_key(bucket, h), occupant);
                inserted += 1;
            }
        }
        self.base.update_ops += inserted;
        Ok(())
    }

    fn working_set(&self) -> Vec<BucketId> {
        self.base.working_set()
    }
    fn update_ops(&self) -> u64 {
        self.base.update_ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_fresh_state_stores_nothing() {
        let st = NaiveState::new(16, 16, 0).unwrap();
        assert!(st.kv.is_empty());
        assert_eq!(st.snapshot_cells(), 0);
    }

    #[test]
    fn naive_partial_init_is_implicit() {
        let st = NaiveState::new(7, 5, 0).unwrap();
        st.validate().unwrap();
        assert_eq!(st.kv.len(), 2);
        assert_eq!(st.kv[&5], WorkingSnapshot::Identity);
        assert_eq!(st.snapshot_cells(), 5 + 6);
        assert_eq!(st.stored_cells(), 0);
    }

    /// Same removal sequence as the minimal-tier bookkeeping test. In
    /// slot-replace order the snapshot for bucket 1 is [0,4,2,3]; sorted
    /// it is [0,2,3,4].
    #[test]
    fn naive_snapshot_contents() {
        for (ordering, expected) in [
            (WorkingOrder::SlotReplace, vec![0u32, 4, 2, 3]),
            (WorkingOrder::Ascending, vec![0u32, 2, 3, 4]),
        ] {
            let mut st = NaiveState::with_order(7, 7, 0, ordering).unwrap();
            for b in [6, 5, 1] {
                st.remove_bucket(b).unwrap();
                st.validate().unwrap();
            }
            assert_eq!(st.base.anchor, vec![0, 4, 0, 0, 0, 5, 6]);
            match &st.kv[&1] {
                WorkingSnapshot::Stored(arr) => assert_eq!(arr.as_ref(), expected.as_slice()),
                other => panic!("expected stored snapshot, got {other:?}"),
            }
            // 6 + 5 + 4 cells across the three removals
            assert_eq!(st.snapshot_cells(), 15);
        }
    }

    /// The reduced tier stores one entry after removing 6, 5 and 1 (only
    /// slot 1 is displaced, to bucket 4), then two more after removing
    /// bucket 0; the naive tier would hold 18 cells at that point.
    #[test]
    fn reduced_stores_only_displacements() {
        let mut st = ReducedState::new(7, 7, 0).unwrap();
        for b in [6, 5, 1] {
            st.remove_bucket(b).unwrap();
            st.validate().unwrap();
        }
        assert_eq!(st.kv.len(), 1);
        assert_eq!(st.kv[&slot_key(1, 1)], 4);

        st.remove_bucket(0).unwrap();
        st.validate().unwrap();
        assert_eq!(st.kv.len(), 3);
        assert_eq!(st.kv[&slot_key(0, 0)], 3);
        assert_eq!(st.kv[&slot_key(0, 1)], 4);
    }

    #[test]
    fn reduced_addition_clears_entries() {
        let mut st = ReducedState::new(7, 7, 0).unwrap();
        for b in [6, 5, 1, 0] {
            st.remove_bucket(b).unwrap();
        }
        assert_eq!(st.add_bucket().unwrap(), 0);
        st.validate().unwrap();
        assert_eq!(st.kv.len(), 1);
        assert_eq!(st.add_bucket().unwrap(), 1);
        assert!(st.kv.is_empty());
        st.validate().unwrap();
    }

    /// The frozen chain key from the minimal-tier tests resolves the same
    /// way through the materialized snapshots.
    #[test]
    fn worked_lookup_matches_minimal_tier() {
        let mut naive = NaiveState::new(7, 7, 0).unwrap();
        let mut reduced = ReducedState::new(7, 7, 0).unwrap();
        for b in [6, 5, 1, 0, 4] {
            naive.remove_bucket(b).unwrap();
            reduced.remove_bucket(b).unwrap();
        }
        assert_eq!(naive.get_bucket(Key(114)), 2);
        assert_eq!(reduced.get_bucket(Key(114)), 2);
        assert_eq!(naive.get_bucket_traced(Key(114)).hash_ops, 4);
        assert_eq!(reduced.get_bucket_traced(Key(114)).hash_ops, 4);
    }

    #[test]
    fn memory_accounting() {
        let mut naive = NaiveState::new(64, 64, 3).unwrap();
        let mut reduced = ReducedState::new(64, 64, 3).unwrap();
        let mut victim = 0u32;
        for _ in 0..20 {
            naive.remove_bucket(victim).unwrap();
            reduced.remove_bucket(victim).unwrap();
            victim += 3;
        }
        let stacked: u64 = naive
            .base
            .stack
            .iter()
            .map(|&b| u64::from(naive.base.anchor[b as usize]))
            .sum();
        assert_eq!(naive.snapshot_cells(), stacked);
        assert_eq!(naive.stored_cells(), stacked);
        let r = 20u64;
        assert!(reduced.entry_count() as u64 <= r * (r + 1) / 2);
    }

    #[test]
    fn removal_errors_match_contract() {
        let mut st = ReducedState::new(4, 3, 0).unwrap();
        assert_eq!(st.remove_bucket(3).unwrap_err(), Error::InvalidRemoval(3));
        st.remove_bucket(1).unwrap();
        st.remove_bucket(0).unwrap();
        assert_eq!(st.remove_bucket(2).unwrap_err(), Error::LastBucket);
        let mut naive = NaiveState::new(2, 2, 0).unwrap();
        naive.remove_bucket(0).unwrap();
        assert_eq!(naive.remove_bucket(1).unwrap_err(), Error::LastBucket);
    }
}
