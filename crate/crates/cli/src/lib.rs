//! Library behind the `snnsim` command-line tool: config parsing and
//! expansion, the experiment runner, and report writers.

pub mod config;
pub mod report;
pub mod runner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Encode(#[from] snnsim_core::encoders::EncodeError),
    #[error(transparent)]
    Processor(#[from] snnsim_core::processor::ProcessorError),
    #[error(transparent)]
    Uart(#[from] snnsim_core::uart::UartError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
