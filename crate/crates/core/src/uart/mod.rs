//! Host ↔ device serial protocol.
//!
//! The link is a plain byte stream framed 8N1 (one start bit, eight data
//! bits LSB-first, one stop bit, no parity) at 9600 baud. One programming
//! *transaction* is one byte on the wire. A device is fully programmed by
//! a register image of four segments, in order:
//!
//! 1. connection-list rows: `⌈n/8⌉` bytes per neuron, row-major;
//! 2. thresholds: `n` bytes;
//! 3. weights: `n` bytes;
//! 4. impulse register: `⌈n/8⌉` bytes.
//!
//! Refractory length and leak step ride out-of-band (device init
//! parameters), which keeps the byte count identical to the transaction
//! budget the planner reports. The full byte-by-byte layout, including
//! known ambiguities, lives in `docs/protocol.md`.

mod channel;
mod frame;
mod image;
mod plan;
mod session;

pub use channel::{ByteChannel, LoopbackChannel};
pub use frame::{decode_8n1, decode_stream, encode_8n1, encode_stream, FRAME_BITS};
pub use image::{
    deserialize_registers, image_len, pack_bits, packed_len, serialize_registers, unpack_bits,
};
pub use plan::{
    format_duration, programming_time, transaction_count, TransactionPlan,
    DEFAULT_TRANSACTION_SECONDS,
};
pub use session::{host_session, CycleExchange, DeviceEndpoint, SessionOutcome};

use thiserror::Error;

use crate::processor::ProcessorError;

#[derive(Debug, Error)]
pub enum UartError {
    #[error("framing error in frame {frame_index}: {reason}")]
    Framing {
        frame_index: u64,
        reason: &'static str,
    },
    #[error("register image is {got} bytes; a {n}-neuron image is {expected}")]
    ImageLength {
        got: usize,
        expected: usize,
        n: usize,
    },
    #[error("packed field is {got} bytes; {n} bits need {expected}")]
    PackedLength {
        got: usize,
        expected: usize,
        n: usize,
    },
    #[error("transaction plan requires at least one neuron")]
    EmptyPlan,
    #[error("channel closed after {bytes_sent} bytes sent")]
    Closed { bytes_sent: u64 },
    #[error("impulse vector length {got} does not match device size {n}")]
    ImpulseSize { got: usize, n: usize },
    #[error("device error: {0}")]
    Device(#[from] ProcessorError),
}
