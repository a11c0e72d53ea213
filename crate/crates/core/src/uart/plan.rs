//! Programming-transaction arithmetic.
//!
//! One transaction is one byte on the wire. The default per-transaction
//! duration of 104.17 µs reproduces the reference hardware's reported
//! figures at 9600 baud; note that it equals one *bit* time at that baud
//! rate, not a full 10-bit frame (1.0417 ms); see `docs/protocol.md`
//! for the discrepancy and override guidance.

use super::image::{image_len, packed_len};
use super::UartError;

/// Default seconds per byte transaction (104.17 µs).
pub const DEFAULT_TRANSACTION_SECONDS: f64 = 104.17e-6;

/// Counted and timed byte transactions for one full register update.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionPlan {
    pub n: usize,
    /// Connection-list segment: `n·⌈n/8⌉` transactions.
    pub connection_list: u64,
    /// Threshold segment: `n` transactions.
    pub threshold: u64,
    /// Weight segment: `n` transactions.
    pub weight: u64,
    /// Impulse segment: `⌈n/8⌉` transactions.
    pub impulse: u64,
    pub total: u64,
    pub seconds_per_transaction: f64,
    pub total_seconds: f64,
}

impl TransactionPlan {
    /// Rescale the plan to a different per-transaction duration.
    pub fn with_seconds_per_transaction(mut self, seconds: f64) -> Self {
        self.seconds_per_transaction = seconds;
        self.total_seconds = self.total as f64 * seconds;
        self
    }
}

/// Segment counts and total for an `n`-neuron register update.
pub fn transaction_count(n: usize) -> Result<TransactionPlan, UartError> {
    if n == 0 {
        return Err(UartError::EmptyPlan);
    }
    let packed = packed_len(n) as u64;
    let connection_list = n as u64 * packed;
    let threshold = n as u64;
    let weight = n as u64;
    let impulse = packed;
    let total = connection_list + threshold + weight + impulse;
    debug_assert_eq!(total, image_len(n) as u64);
    Ok(TransactionPlan {
        n,
        connection_list,
        threshold,
        weight,
        impulse,
        total,
        seconds_per_transaction: DEFAULT_TRANSACTION_SECONDS,
        total_seconds: total as f64 * DEFAULT_TRANSACTION_SECONDS,
    })
}

/// Total programming time in seconds.
pub fn programming_time(plan: &TransactionPlan) -> f64 {
    plan.total_seconds
}

/// Human rendering of a duration in seconds: µs below a millisecond,
/// ms below a second, seconds above.
pub fn format_duration(seconds: f64) -> String {
    let abs = seconds.abs();
    if abs < 1e-3 {
        format!("{:.2} µs", seconds * 1e6)
    } else if abs < 1.0 {
        format!("{:.2} ms", seconds * 1e3)
    } else {
        format!("{seconds:.3} s")
    }
}
