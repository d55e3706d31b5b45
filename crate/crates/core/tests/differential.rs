//! Differential checks: the three tier implementations, fed the same seed
//! and operation sequence, must stay interchangeable. Slot-replace
//! snapshots agree with the minimal tier key by key; ascending snapshots
//! agree on the working set and still move only the keys they must.

use anchorhash::anchor::{AnchorState, BucketHasher};
use anchorhash::eval::complexity::tau_statistics;
use anchorhash::eval::disruption::{classify, ChurnEvent};
use anchorhash::eval::keys::KeyStream;
use anchorhash::hashing::Key;
use anchorhash::tiers::{NaiveState, ReducedState, WorkingOrder};
use proptest::prelude::*;

struct Trio {
    minimal: AnchorState,
    naive: NaiveState,
    reduced: ReducedState,
}

impl Trio {
    fn new(a: u32, w: u32, seed: u64) -> Trio {
        Trio {
            minimal: AnchorState::new(a, w, seed).unwrap(),
            naive: NaiveState::new(a, w, seed).unwrap(),
            reduced: ReducedState::new(a, w, seed).unwrap(),
        }
    }

    fn step(&mut self, op: u8) {
        let working = self.minimal.working_set();
        if op % 2 == 0 && working.len() > 1 {
            let b = working[(op as usize / 2) % working.len()];
            self.minimal.remove_bucket(b).unwrap();
            self.naive.remove_bucket(b).unwrap();
            self.reduced.remove_bucket(b).unwrap();
        } else if self.minimal.working_count() < self.minimal.capacity() {
            let b = self.minimal.add_bucket().unwrap();
            assert_eq!(self.naive.add_bucket().unwrap(), b);
            assert_eq!(self.reduced.add_bucket().unwrap(), b);
        }
        self.minimal.validate().unwrap();
        self.naive.validate().unwrap();
        self.reduced.validate().unwrap();
    }

    fn assert_agree(&self, keys: &[Key]) {
        for &k in keys {
            let t = self.minimal.get_bucket_traced(k);
            let n = self.naive.get_bucket_traced(k);
            let r = self.reduced.get_bucket_traced(k);
            assert_eq!(t.bucket, n.bucket, "naive differs on key {}", k.0);
            assert_eq!(t.bucket, r.bucket, "reduced differs on key {}", k.0);
            assert_eq!(t.hash_ops, n.hash_ops, "naive tau differs on key {}", k.0);
            assert_eq!(t.hash_ops, r.hash_ops, "reduced tau differs on key {}", k.0);
        }
    }
}

proptest! {
    #[test]
    fn tiers_agree_after_every_operation(
        a in 2u32..48,
        w_frac in 1u32..=100,
        seed in any::<u64>(),
        script in proptest::collection::vec(any::<u8>(), 0..48),
    ) {
        let w = (a * w_frac / 100).max(1);
        let mut trio = Trio::new(a, w, seed);
        let probe = KeyStream::new(seed ^ 1).take_keys(100);
        trio.assert_agree(&probe);
        for &op in &script {
            trio.step(op);
            trio.assert_agree(&probe);
        }
        let sample = KeyStream::new(seed ^ 2).take_keys(1000);
        let hist_min = tau_statistics(&trio.minimal, sample.iter().copied());
        let hist_nai = tau_statistics(&trio.naive, sample.iter().copied());
        let hist_red = tau_statistics(&trio.reduced, sample.iter().copied());
        prop_assert_eq!(&hist_min.histogram, &hist_nai.histogram);
        prop_assert_eq!(&hist_min.histogram, &hist_red.histogram);
    }

    #[test]
    fn ascending_order_is_set_equivalent_and_still_consistent(
        a in 2u32..48,
        seed in any::<u64>(),
        script in proptest::collection::vec(any::<u8>(), 0..40),
    ) {
        let mut minimal = AnchorState::new(a, a, seed).unwrap();
        let mut asc = NaiveState::with_order(a, a, seed, WorkingOrder::Ascending).unwrap();
        let probe = KeyStream::new(seed ^ 3).take_keys(200);
        let mut before: Vec<u32> = probe.iter().map(|&k| asc.get_bucket(k)).collect();
        for &op in &script {
            let working = minimal.working_set();
            let event = if op % 2 == 0 && working.len() > 1 {
                let b = working[(op as usize / 2) % working.len()];
                minimal.remove_bucket(b).unwrap();
                asc.remove_bucket(b).unwrap();
                ChurnEvent::Removed(b)
            } else if minimal.working_count() < minimal.capacity() {
                let b = minimal.add_bucket().unwrap();
                prop_assert_eq!(asc.add_bucket().unwrap(), b);
                ChurnEvent::Added(b)
            } else {
                continue;
            };
            asc.validate().unwrap();
            prop_assert_eq!(asc.working_set(), minimal.working_set());
            let after: Vec<u32> = probe.iter().map(|&k| asc.get_bucket(k)).collect();
            let event_ref = match &event {
                ChurnEvent::Removed(b) => ChurnEvent::Removed(b),
                ChurnEvent::Added(b) => ChurnEvent::Added(b),
            };
            let census = classify(&before, &after, event_ref).unwrap();
            prop_assert_eq!(census.wrongful, 0);
            before = after;
        }
    }
}

#[test]
fn worked_example_traces_identically_across_tiers() {
    let mut trio = Trio::new(7, 7, 0);
    for op in [12, 10, 2] {
        // ops chosen so the removal targets are buckets 6, 5, 1
        trio.step(op);
    }
    assert_eq!(trio.minimal.working_set(), vec![0, 2, 3, 4]);
    let direct = trio.minimal.get_bucket_traced(Key(18));
    assert_eq!((direct.bucket, direct.hash_ops), (3, 1));
    for op in [8, 4] {
        // removal targets: buckets 0, 4
        trio.step(op);
    }
    let chained = trio.minimal.get_bucket_traced(Key(114));
    assert_eq!((chained.bucket, chained.hash_ops), (2, 4));
    trio.assert_agree(&[Key(114), Key(18)]);
}
