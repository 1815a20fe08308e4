//! Exact intersection-lattice arithmetic for divisor classes on a surface,
//! a replayable rule engine built on it, and the branch-divisor
//! enumeration and classification layer.

pub mod branch;
pub mod certificate;
pub mod cli;
pub mod engine;
pub mod lattice;
pub mod scenario;
pub mod surface;
