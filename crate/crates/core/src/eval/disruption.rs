//! Classifies how a key sample moved across one membership event. Minimal
//! disruption means every move is legitimate: off the removed target or
//! onto the added one. Anything else is a wrongful remap.

use crate::error::Error;

/// What changed between two assignment snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DisruptionCensus {
    pub unchanged: u64,
    pub legitimate: u64,
    pub wrongful: u64,
}

impl DisruptionCensus {
    pub fn total(&self) -> u64 {
        self.unchanged + self.legitimate + self.wrongful
    }

    pub fn wrongful_fraction(&self) -> f64 {
        self.wrongful as f64 / self.total() as f64
    }
}

/// The membership change separating the two snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChurnEvent<T> {
    Removed(T),
    Added(T),
}

/// Compares per-key assignments before and after one event.
///
/// Removal of x: keys on x must leave it (legitimate); a key still on x
/// afterwards, or any other key that moved, is wrongful. Addition of x:
/// moves onto x are legitimate; every other move is wrongful.
pub fn classify<T: PartialEq>(
    before: &[T],
    after: &[T],
    event: ChurnEvent<&T>,
) -> Result<DisruptionCensus, Error> {
    if before.len() != after.len() || before.is_empty() {
        return Err(Error::CorruptState(
            "disruption census needs equal nonempty snapshots".into(),
        ));
    }
    let mut census = DisruptionCensus::default();
    for (old, new) in before.iter().zip(after) {
        let moved = old != new;
        let legitimate = match event {
            ChurnEvent::Removed(x) => {
                if new == x {
                    census.wrongful += 1;
                    continue;
                }
                old == x
            }
            ChurnEvent::Added(x) => new == x,
        };
        match (moved, legitimate) {
            (false, _) => census.unchanged += 1,
            (true, true) => census.legitimate += 1,
            (true, false) => census.wrongful += 1,
        }
    }
    Ok(census)
}
