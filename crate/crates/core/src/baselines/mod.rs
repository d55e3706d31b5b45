//! Classic consistent-hashing baselines the anchor is evaluated against:
//! rendezvous (highest random weight), the ring with virtual nodes, and
//! the maglev permutation table.

pub mod hrw;
pub mod maglev;
pub mod ring;

pub use hrw::HrwState;
pub use maglev::MaglevState;
pub use ring::RingState;
