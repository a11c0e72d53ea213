//! Byte channels between the host protocol and a device.
//!
//! The loopback channel carries every byte as a framed 10-bit sequence in
//! both directions, so a session exercises the real encode/decode path.
//! Test hooks can flip arbitrary wire bits (to provoke framing errors)
//! or close the channel after a byte budget (to provoke transport
//! errors). A clean loopback is reliable by construction; the protocol
//! itself carries no acknowledgments or checksums.

use std::collections::HashMap;

use super::frame::{decode_stream, encode_8n1, encode_stream};
use super::session::DeviceEndpoint;
use super::UartError;

/// A bidirectional byte stream with independent send and receive halves.
pub trait ByteChannel {
    /// Push bytes toward the device.
    fn send(&mut self, bytes: &[u8]) -> Result<(), UartError>;
    /// Drain whatever the device has queued for the host.
    fn recv_available(&mut self) -> Result<Vec<u8>, UartError>;
}

/// In-process channel wrapping a device endpoint.
pub struct LoopbackChannel {
    device: DeviceEndpoint,
    to_host: Vec<u8>,
    bytes_sent: u64,
    close_after: Option<u64>,
    /// Wire-bit flips to inject on the host→device direction,
    /// keyed by absolute frame index.
    flips: HashMap<u64, Vec<usize>>,
}

impl LoopbackChannel {
    pub fn new(device: DeviceEndpoint) -> Self {
        Self {
            device,
            to_host: Vec::new(),
            bytes_sent: 0,
            close_after: None,
            flips: HashMap::new(),
        }
    }

    /// Simulate the link dropping after `bytes` outbound bytes.
    pub fn close_after(mut self, bytes: u64) -> Self {
        self.close_after = Some(bytes);
        self
    }

    /// Flip one wire bit of the given outbound frame (bit 0 = start bit,
    /// 1..=8 = data, 9 = stop bit).
    pub fn corrupt_bit(mut self, frame_index: u64, bit: usize) -> Self {
        assert!(bit < super::FRAME_BITS);
        self.flips.entry(frame_index).or_default().push(bit);
        self
    }

    pub fn device(&self) -> &DeviceEndpoint {
        &self.device
    }
}

impl ByteChannel for LoopbackChannel {
    fn send(&mut self, bytes: &[u8]) -> Result<(), UartError> {
        for &byte in bytes {
            if let Some(limit) = self.close_after {
                if self.bytes_sent >= limit {
                    return Err(UartError::Closed {
                        bytes_sent: self.bytes_sent,
                    });
                }
            }
            let frame_index = self.bytes_sent;
            let mut bits = encode_8n1(byte).to_vec();
            if let Some(flipped) = self.flips.get(&frame_index) {
                for &bit in flipped {
                    bits[bit] = !bits[bit];
                }
            }
            let decoded = decode_stream(&bits).map_err(|e| match e {
                UartError::Framing { reason, .. } => UartError::Framing {
                    frame_index,
                    reason,
                },
                other => other,
            })?;
            self.bytes_sent += 1;
            self.device.feed_byte(decoded[0])?;
            let tx = self.device.take_tx();
            if !tx.is_empty() {
                // Device→host leg goes through the same framing.
                self.to_host.extend(decode_stream(&encode_stream(&tx))?);
            }
        }
        Ok(())
    }

    fn recv_available(&mut self) -> Result<Vec<u8>, UartError> {
        Ok(std::mem::take(&mut self.to_host))
    }
}
