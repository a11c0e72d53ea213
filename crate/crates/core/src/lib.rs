//! Cycle-accurate simulator of a small FPGA neuromorphic processor.
//!
//! The device under simulation is an array of N leaky integrate-and-fire
//! neurons behind a register bank, with runtime-configurable all-to-all
//! connectivity and a 9600-baud serial programming interface:
//!
//! * [`lif`]: the neuron model (Euler and hardware fixed-leak backends).
//! * [`interconnect`]: the mux-based connection-list routing fabric.
//! * [`processor`]: the clock-stepped neuron array, register bank,
//!   traces, and classification.
//! * [`uart`]: 8N1 framing, the register-image wire format, the
//!   transaction planner, and host/device sessions over a loopback
//!   channel.
//! * [`encoders`]: dataset-to-spike encoders and output decoding.
//! * [`presets`]: the two benchmark network definitions.

pub mod encoders;
pub mod interconnect;
pub mod lif;
pub mod presets;
pub mod processor;
pub mod uart;

pub use interconnect::{ConnectionMatrix, SpikeVector};
pub use lif::{ClampPolicy, LeakMode, LifParams, LifState};
pub use processor::{
    classify, classify_first_spike, Classification, LeakSetting, Processor, RegisterBank, SimTrace,
    TraceDepth,
};
