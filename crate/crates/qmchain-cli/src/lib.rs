//! Human-facing surface for the measurement-chain simulator: JSON scenario
//! files, run reports, and the seeded verification harness.

pub mod fixtures;
pub mod gen;
pub mod lattice;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod verify;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const VALIDATION: u8 = 3;
}
