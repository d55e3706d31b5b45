//! Rendezvous (highest random weight) hashing. Fully consistent by
//! construction; every lookup scores all resources, so resolution is
//! linear in the resource count.

use crate::error::Error;
use crate::hashing::{fold_bytes, mix64, Key, Salt};
use crate::resource::{ResourceHasher, ResourceId};

#[derive(Debug, Clone)]
pub struct HrwState {
    seed: u64,
    /// Sorted by id; the salt is the folded id mixed with the seed.
    resources: Vec<(ResourceId, Salt)>,
    update_ops: u64,
}

impl HrwState {
    pub fn new(seed: u64, resources: Vec<ResourceId>) -> Result<Self, Error> {
        let mut state = HrwState {
            seed,
            resources: Vec::with_capacity(resources.len()),
            update_ops: 0,
        };
        if resources.is_empty() {
            return Err(Error::NoResources);
        }
        for id in resources {
            state.insert(id)?;
        }
        Ok(state)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn salt_for(&self, id: &ResourceId) -> Salt {
        Salt(fold_bytes(id.as_bytes()) ^ self.seed)
    }

    fn insert(&mut self, id: ResourceId) -> Result<(), Error> {
        match self.resources.binary_search_by(|(r, _)| r.cmp(&id)) {
            Ok(_) => Err(Error::DuplicateResource(id.to_string())),
            Err(slot) => {
                let salt = self.salt_for(&id);
                self.resources.insert(slot, (id, salt));
                self.update_ops += 1;
                Ok(())
            }
        }
    }

    /// Snapshot restore: carry the op counter across a rebuild.
    pub(crate) fn set_update_ops(&mut self, ops: u64) {
        self.update_ops = ops;
    }

    /// Winner as an index into the current id-sorted resource order.
    /// Cheaper than [`resolve`](ResourceHasher::resolve) when censusing
    /// large key samples; the index shifts when membership changes.
    pub fn resolve_index(&self, key: Key) -> usize {
        let mut best = 0usize;
        let mut best_score = mix64(key, self.resources[0].1);
        for (i, (_, salt)) in self.resources.iter().enumerate().skip(1) {
            let score = mix64(key, *salt);
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        best
    }
}

impl ResourceHasher for HrwState {
    /// Highest score wins; on a (cosmically unlikely) 64-bit score tie
    /// the byte-smaller id wins, since the scan runs in id order and only
    /// a strictly greater score displaces the champion.
    fn resolve(&self, key: Key) -> &ResourceId {
        let mut best = &self.resources[0].0;
        let mut best_score = mix64(key, self.resources[0].1);
        for (id, salt) in &self.resources[1..] {
            let score = mix64(key, *salt);
            if score > best_score {
                best = id;
                best_score = score;
            }
        }
        best
    }

    fn add_resource(&mut self, id: ResourceId) -> Result<(), Error> {
        self.insert(id)
    }

    fn remove_resource(&mut self, id: &ResourceId) -> Result<(), Error> {
        match self.resources.binary_search_by(|(r, _)| r.cmp(id)) {
            Err(_) => Err(Error::UnknownResource(id.to_string())),
            Ok(_) if self.resources.len() == 1 => Err(Error::LastResource),
            Ok(slot) => {
                self.resources.remove(slot);
                self.update_ops += 1;
                Ok(())
            }
        }
    }

    fn resource_count(&self) -> usize {
        self.resources.len()
    }

    fn resources(&self) -> Vec<ResourceId> {
        self.resources.iter().map(|(id, _)| id.clone()).collect()
    }

    fn update_ops(&self) -> u64 {
        self.update_ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::stats::{chi_square_critical, chi_square_uniform};

    fn ids(names: &[&str]) -> Vec<ResourceId> {
        names.iter().map(|n| n.parse().unwrap()).collect()
    }

    #[test]
    fn single_resource_takes_everything() {
        let h = HrwState::new(1, ids(&["only"])).unwrap();
        for k in 0..100 {
            assert_eq!(h.resolve(Key(k)).to_string(), "only");
        }
    }

    #[test]
    fn fully_consistent_under_churn() {
        let mut h = HrwState::new(7, ids(&["a", "b", "c", "d", "e", "f"])).unwrap();
        let probes = 3000u64;
        let mut before: Vec<ResourceId> =
            (0..probes).map(|k| h.resolve(Key(k)).clone()).collect();
        let script: &[(bool, &str)] = &[
            (false, "d"),
            (false, "a"),
            (true, "g"),
            (false, "f"),
            (true, "h"),
            (true, "i"),
            (false, "b"),
        ];
        for &(is_add, name) in script {
            let id: ResourceId = name.parse().unwrap();
            if is_add {
                h.add_resource(id.clone()).unwrap();
            } else {
                h.remove_resource(&id).unwrap();
            }
            let after: Vec<ResourceId> = (0..probes).map(|k| h.resolve(Key(k)).clone()).collect();
            for (k, (old, new)) in before.iter().zip(&after).enumerate() {
                if is_add {
                    assert!(
                        old == new || new == &id,
                        "key {k} moved to {new}, not the added {id}"
                    );
                } else {
                    if old != &id {
                        assert_eq!(old, new, "key {k} moved although {old} survived");
                    } else {
                        assert_ne!(new, &id);
                    }
                }
            }
            before = after;
        }
    }

    #[test]
    fn balanced_across_resources() {
        let names: Vec<String> = (0..100).map(|i| format!("node-{i:03}")).collect();
        let resources = names.iter().map(|n| n.parse().unwrap()).collect();
        let h = HrwState::new(0xBA1A, resources).unwrap();
        let mut counts = std::collections::HashMap::new();
        for k in 0..1_000_000u64 {
            *counts.entry(h.resolve(Key(k)).clone()).or_insert(0u64) += 1;
        }
        let observed: Vec<u64> = names
            .iter()
            .map(|n| counts[&n.parse::<ResourceId>().unwrap()])
            .collect();
        let stat = chi_square_uniform(&observed);
        let crit = chi_square_critical(99.0, 0.001);
        assert!(stat < crit, "chi-square {stat:.2} >= {crit:.2}");
    }

    #[test]
    fn membership_errors() {
        let mut h = HrwState::new(0, ids(&["a"])).unwrap();
        assert!(matches!(
            h.add_resource("a".parse().unwrap()),
            Err(Error::DuplicateResource(_))
        ));
        assert!(matches!(
            h.remove_resource(&"x".parse().unwrap()),
            Err(Error::UnknownResource(_))
        ));
        assert!(matches!(
            h.remove_resource(&"a".parse().unwrap()),
            Err(Error::LastResource)
        ));
        assert!(matches!(HrwState::new(0, vec![]), Err(Error::NoResources)));
    }
}
