//! 8N1 bit-level framing.

use super::UartError;

/// Bits per frame: start + 8 data + stop.
pub const FRAME_BITS: usize = 10;

/// Frame one byte: start bit (0), data LSB-first, stop bit (1).
pub fn encode_8n1(byte: u8) -> [bool; FRAME_BITS] {
    let mut bits = [false; FRAME_BITS];
    for i in 0..8 {
        bits[1 + i] = (byte >> i) & 1 == 1;
    }
    bits[9] = true;
    bits
}

fn decode_frame(bits: &[bool], frame_index: u64) -> Result<u8, UartError> {
    if bits.len() != FRAME_BITS {
        return Err(UartError::Framing {
            frame_index,
            reason: "frame is not 10 bits",
        });
    }
    if bits[0] {
        return Err(UartError::Framing {
            frame_index,
            reason: "bad start bit",
        });
    }
    if !bits[9] {
        return Err(UartError::Framing {
            frame_index,
            reason: "bad stop bit",
        });
    }
    let mut byte = 0u8;
    for i in 0..8 {
        if bits[1 + i] {
            byte |= 1 << i;
        }
    }
    Ok(byte)
}

/// Decode one frame. Exact inverse of [`encode_8n1`] on valid frames.
pub fn decode_8n1(bits: &[bool]) -> Result<u8, UartError> {
    decode_frame(bits, 0)
}

/// Frame a whole byte stream back-to-back.
pub fn encode_stream(bytes: &[u8]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(bytes.len() * FRAME_BITS);
    for &b in bytes {
        bits.extend_from_slice(&encode_8n1(b));
    }
    bits
}

/// Decode a stream of concatenated frames. A malformed frame reports its
/// index; a trailing partial frame counts as malformed too.
pub fn decode_stream(bits: &[bool]) -> Result<Vec<u8>, UartError> {
    bits.chunks(FRAME_BITS)
        .enumerate()
        .map(|(frame_index, chunk)| decode_frame(chunk, frame_index as u64))
        .collect()
}
