//! The minimal-memory anchor: consistent hashing over a fixed capacity of
//! `a` buckets with O(1) amortized lookups, O(1) updates and four flat
//! `u32` arrays.
//!
//! The structure pre-allocates `a` buckets and keeps `working` of them
//! live. Removed buckets go on a LIFO stack and additions always revive
//! the most recently removed bucket, which is what makes every update an
//! exact undo/redo of a previous state and gives full consistency.

use crate::error::Error;
use crate::hashing::{to_range, Key, Salt};

/// Buckets are dense integers in `[0, capacity)`.
pub type BucketId = u32;

/// Outcome of a traced lookup: the bucket plus what it cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LookupTrace {
    pub bucket: BucketId,
    /// Number of hash evaluations, including the initial one. At least 1.
    pub hash_ops: u32,
    /// Array-element reads needed to resolve the lookup: one status read
    /// per visited bucket plus one read per successor-chain step. At least
    /// `hash_ops`.
    pub memory_accesses: u32,
}

/// Interface shared by the three anchor implementations, so tests and the
/// measurement harness can treat them interchangeably.
pub trait BucketHasher {
    fn capacity(&self) -> u32;
    fn working_count(&self) -> u32;
    fn seed(&self) -> u64;
    /// Map a key to a working bucket. Read-only.
    fn get_bucket(&self, key: Key) -> BucketId;
    /// Same mapping, with cost counters.
    fn get_bucket_traced(&self, key: Key) -> LookupTrace;
    /// Revive the most recently removed bucket.
    fn add_bucket(&mut self) -> Result<BucketId, Error>;
    /// Remove a working bucket.
    fn remove_bucket(&mut self, bucket: BucketId) -> Result<(), Error>;
    /// Working buckets in ascending order.
    fn working_set(&self) -> Vec<BucketId>;
    /// Cumulative count of mutating primitive operations (array element
    /// writes, stack pushes/pops, map entry writes) performed by updates.
    fn update_ops(&self) -> u64;
}

/// Minimal-memory implementation: everything is reconstructed on the fly
/// from the `anchor` and `succ` arrays.
///
/// Deserializing does not check invariants; snapshot loading validates
/// before handing a state out.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AnchorState {
    /// `anchor[b]` is 0 while `b` works, otherwise the working-set size
    /// right after `b` was removed (for never-used init buckets: `b`).
    pub(crate) anchor: Vec<u32>,
    /// For a removed bucket, the bucket that took over its slot in the
    /// working order; `b` itself for working buckets.
    pub(crate) succ: Vec<u32>,
    /// First `working` cells list the working buckets in slot order.
    pub(crate) order: Vec<u32>,
    /// Position of each working bucket inside `order`.
    pub(crate) pos: Vec<u32>,
    /// Removed buckets, most recent on top. Capacity never reallocates.
    pub(crate) stack: Vec<u32>,
    pub(crate) working: u32,
    pub(crate) capacity: u32,
    pub(crate) seed: u64,
    pub(crate) update_ops: u64,
}

impl AnchorState {
    /// Build an anchor of `a` buckets with `w` of them initially working
    /// (buckets `0..w`). Requires `1 <= w <= a`.
    pub fn new(a: u32, w: u32, seed: u64) -> Result<Self, Error> {
        if w == 0 || w > a {
            return Err(Error::InvalidCapacity {
                a: u64::from(a),
                w: u64::from(w),
            });
        }
        let n = a as usize;
        let mut state = AnchorState {
            anchor: vec![0; n],
            succ: (0..a).collect(),
            order: (0..a).collect(),
            pos: (0..a).collect(),
            stack: Vec::with_capacity(n),
            working: w,
            capacity: a,
            seed,
            update_ops: 0,
        };
        for b in (w..a).rev() {
            state.stack.push(b);
            state.anchor[b as usize] = b;
        }
        Ok(state)
    }

    #[inline]
    fn top_salt(&self) -> Salt {
        // Reserved value outside the bucket id range, so the bucket-level
        // hash family never aliases the top-level one.
        Salt(self.seed ^ (1u64 << 63))
    }

    #[inline]
    fn bucket_salt(&self, b: u32) -> Salt {
        Salt(self.seed ^ u64::from(b))
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn working_count(&self) -> u32 {
        self.working
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn update_ops(&self) -> u64 {
        self.update_ops
    }

    pub fn is_working(&self, b: BucketId) -> bool {
        b < self.capacity && self.anchor[b as usize] == 0
    }

    /// Working buckets in ascending order.
    pub fn working_set(&self) -> Vec<BucketId> {
        let mut out: Vec<u32> = self.order[..self.working as usize].to_vec();
        out.sort_unstable();
        out
    }

    /// Map a key to a working bucket.
    ///
    /// Hashes into the full capacity first; while the hit bucket is
    /// removed, rehashes into the working set as it stood right after
    /// that removal, resolving the slot through the successor chain.
    pub fn get_bucket(&self, key: Key) -> BucketId {
        let mut b = to_range(key, self.top_salt(), u64::from(self.capacity)) as u32;
        let mut ab = self.anchor[b as usize];
        while ab > 0 {
            let mut h = to_range(key, self.bucket_salt(b), u64::from(ab)) as u32;
            let mut ah = self.anchor[h as usize];
            while ah >= ab {
                h = self.succ[h as usize];
                ah = self.anchor[h as usize];
            }
            b = h;
            ab = ah;
        }
        b
    }

    /// [`Self::get_bucket`] with cost counters; identical result.
    pub fn get_bucket_traced(&self, key: Key) -> LookupTrace {
        let mut hash_ops = 1u32;
        let mut status_reads = 1u32;
        let mut chain_reads = 0u32;
        let mut b = to_range(key, self.top_salt(), u64::from(self.capacity)) as u32;
        let mut ab = self.anchor[b as usize];
        while ab > 0 {
            hash_ops += 1;
            status_reads += 1;
            let mut h = to_range(key, self.bucket_salt(b), u64::from(ab)) as u32;
            let mut ah = self.anchor[h as usize];
            while ah >= ab {
                chain_reads += 1;
                h = self.succ[h as usize];
                ah = self.anchor[h as usize];
            }
            b = h;
            ab = ah;
        }
        LookupTrace {
            bucket: b,
            hash_ops,
            memory_accesses: status_reads + chain_reads,
        }
    }

    /// Revive the most recently removed bucket and return its id.
    pub fn add_bucket(&mut self) -> Result<BucketId, Error> {
        let Some(b) = self.stack.pop() else {
            return Err(Error::CapacityExhausted(self.capacity));
        };
        let n = self.working as usize;
        self.anchor[b as usize] = 0;
        // The bucket that covered b's slot goes back to the tail slot it
        // occupied before b was removed, then b retakes its own slot.
        self.pos[self.order[n] as usize] = n as u32;
        self.order[self.pos[b as usize] as usize] = b;
        self.succ[b as usize] = b;
        self.working += 1;
        self.update_ops += 5;
        Ok(b)
    }

    /// Remove working bucket `b`. The last working bucket cannot go: keys
    /// must always resolve somewhere.
    pub fn remove_bucket(&mut self, b: BucketId) -> Result<(), Error> {
        if b >= self.capacity || self.anchor[b as usize] != 0 {
            return Err(Error::InvalidRemoval(b));
        }
        if self.working == 1 {
            return Err(Error::LastBucket);
        }
        self.stack.push(b);
        self.working -= 1;
        let n = self.working as usize;
        let tail = self.order[n];
        self.anchor[b as usize] = self.working;
        self.order[self.pos[b as usize] as usize] = tail;
        self.succ[b as usize] = tail;
        self.pos[tail as usize] = self.pos[b as usize];
        self.update_ops += 5;
        Ok(())
    }

    /// Full structural check of every invariant the other operations rely
    /// on. Intended for tests and snapshot loading, not hot paths.
    pub fn validate(&self) -> Result<(), Error> {
        let a = self.capacity as usize;
        let n = self.working as usize;
        let fail = |why: String| Err(Error::CorruptState(why));
        if self.capacity == 0 || self.working == 0 || self.working > self.capacity {
            return fail(format!("working {} of {}", self.working, self.capacity));
        }
        if self.anchor.len() != a || self.succ.len() != a || self.order.len() != a || self.pos.len() != a {
            return fail("array length mismatch".into());
        }
        if n + self.stack.len() != a {
            return fail(format!(
                "{} working + {} stacked != {} total",
                n,
                self.stack.len(),
                a
            ));
        }
        // Working prefix is a permutation of exactly the zero-anchor set.
        let mut seen = vec![false; a];
        for i in 0..n {
            let b = self.order[i] as usize;
            if b >= a || seen[b] {
                return fail(format!("order slot {i} repeats or overflows"));
            }
            seen[b] = true;
            if self.anchor[b] != 0 {
                return fail(format!("order slot {i} holds removed bucket {b}"));
            }
            if self.pos[b] != i as u32 {
                return fail(format!("pos[{b}] != slot {i}"));
            }
            if self.succ[b] != b as u32 {
                return fail(format!("working bucket {b} has foreign successor"));
            }
        }
        for b in 0..a {
            if (self.anchor[b] == 0) != seen[b] {
                return fail(format!("bucket {b} working flag disagrees with order"));
            }
            if self.pos[b] as usize > b {
                return fail(format!("pos[{b}] climbed above its start"));
            }
        }
        // Stack holds exactly the removed buckets, sizes strictly
        // decreasing upward, and successors must make lookups terminate.
        let mut on_stack = vec![false; a];
        let mut last = u32::MAX;
        for (i, &b) in self.stack.iter().enumerate() {
            let bu = b as usize;
            if bu >= a || on_stack[bu] || self.anchor[bu] == 0 {
                return fail(format!("stack slot {i} invalid"));
            }
            on_stack[bu] = true;
            if self.anchor[bu] >= last {
                return fail(format!("stack sizes not decreasing at slot {i}"));
            }
            last = self.anchor[bu];
            let s = self.succ[bu] as usize;
            if s >= a {
                return fail(format!("successor of {b} overflows"));
            }
            let self_loop_ok = s == bu && self.pos[bu] == self.anchor[bu] && self.anchor[bu] <= b;
            if !self_loop_ok && self.anchor[s] >= self.anchor[bu] {
                return fail(format!("successor chain of {b} does not descend"));
            }
        }
        for b in 0..a {
            if (self.anchor[b] != 0) != on_stack[b] {
                return fail(format!("bucket {b} removed but not stacked"));
            }
        }
        Ok(())
    }
}

impl BucketHasher for AnchorState {
    fn capacity(&self) -> u32 {
        self.capacity
    }
    fn working_count(&self) -> u32 {
        self.working
    }
    fn seed(&self) -> u64 {
        self.seed
    }
    fn get_bucket(&self, key: Key) -> BucketId {
        AnchorState::get_bucket(self, key)
    }
    fn get_bucket_traced(&self, key: Key) -> LookupTrace {
        AnchorState::get_bucket_traced(self, key)
    }
    fn add_bucket(&mut self) -> Result<BucketId, Error> {
        AnchorState::add_bucket(self)
    }
    fn remove_bucket(&mut self, bucket: BucketId) -> Result<(), Error> {
        AnchorState::remove_bucket(self, bucket)
    }
    fn working_set(&self) -> Vec<BucketId> {
        AnchorState::working_set(self)
    }
    fn update_ops(&self) -> u64 {
        self.update_ops
    }
}
