//! Scenario runner and example battery on top of `orbitlab-core`.

pub mod battery;
pub mod report;
pub mod scenario;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const CONTRADICTION: i32 = 3;
}
