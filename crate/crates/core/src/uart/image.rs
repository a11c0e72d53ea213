//! Register-image byte layout.
//!
//! Bit fields pack LSB-first: bit `j` of a row lands in byte `j / 8` at
//! position `j mod 8`, with unused high bits zero-padded. Neuron 0 is
//! bit 0 of byte 0. Padding bits are ignored on the way in; the
//! hardware's unused impulse bits carry no meaning.

use super::UartError;
use crate::interconnect::SpikeVector;
use crate::processor::RegisterBank;

/// Bytes needed for one packed `n`-bit field.
pub fn packed_len(n: usize) -> usize {
    n.div_ceil(8)
}

/// Total register-image size for an `n`-neuron device:
/// `n·⌈n/8⌉ + 2n + ⌈n/8⌉`.
pub fn image_len(n: usize) -> usize {
    n * packed_len(n) + 2 * n + packed_len(n)
}

/// Pack a bit vector LSB-first with zero padding.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; packed_len(bits.len())];
    for (j, &bit) in bits.iter().enumerate() {
        if bit {
            bytes[j / 8] |= 1 << (j % 8);
        }
    }
    bytes
}

/// Unpack `n` bits from an exactly-sized packed field.
pub fn unpack_bits(bytes: &[u8], n: usize) -> Result<Vec<bool>, UartError> {
    if bytes.len() != packed_len(n) {
        return Err(UartError::PackedLength {
            got: bytes.len(),
            expected: packed_len(n),
            n,
        });
    }
    Ok((0..n).map(|j| (bytes[j / 8] >> (j % 8)) & 1 == 1).collect())
}

/// Serialize a bank into the four-segment wire image. The refractory and
/// leak registers are device init parameters and never cross the wire.
pub fn serialize_registers(bank: &RegisterBank) -> Vec<u8> {
    let n = bank.n;
    let mut image = Vec::with_capacity(image_len(n));
    for src in 0..n {
        let row = bank.connections.row(src).expect("bank row within bounds");
        image.extend_from_slice(&pack_bits(row));
    }
    image.extend_from_slice(&bank.thresholds);
    image.extend_from_slice(&bank.weights);
    image.extend_from_slice(&pack_bits(bank.impulse.as_slice()));
    image
}

/// Rebuild a bank from a wire image. The out-of-band registers
/// (refractory, leak step) come back zeroed; the device overlays its own
/// configured values.
pub fn deserialize_registers(image: &[u8], n: usize) -> Result<RegisterBank, UartError> {
    let expected = image_len(n);
    if n == 0 || image.len() != expected {
        return Err(UartError::ImageLength {
            got: image.len(),
            expected,
            n,
        });
    }
    let row_len = packed_len(n);
    let mut bank = RegisterBank::new(n)?;
    let mut offset = 0;
    for src in 0..n {
        let row = unpack_bits(&image[offset..offset + row_len], n)?;
        bank.connections
            .set_row(src, &row)
            .map_err(crate::processor::ProcessorError::Routing)?;
        offset += row_len;
    }
    bank.thresholds.copy_from_slice(&image[offset..offset + n]);
    offset += n;
    bank.weights.copy_from_slice(&image[offset..offset + n]);
    offset += n;
    bank.impulse = SpikeVector::from_bits(unpack_bits(&image[offset..offset + row_len], n)?);
    Ok(bank)
}
