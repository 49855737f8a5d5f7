//! Configuration, sweeps and data emission on top of `aerial-noma-core`.

pub mod config;
pub mod report;
pub mod selftest;
pub mod sim;
pub mod sweep;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// Invalid configuration or evaluator failure.
    Validation = 1,
    /// A closed-form term left its admissible range.
    NumericalHealth = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}
