//! Variable-byte integer codec.
//!
//! Each integer is split into 7-bit groups, least significant group first.
//! Every byte carries one group; the terminating byte of an integer has its
//! high bit set. A term sequence is its length followed by its ids.
//!
//! ```text
//! 0      -> 80
//! 1      -> 81
//! 128    -> 00 81
//! <>     -> 80
//! <0>    -> 81 80
//! ```

use super::{TermId, TermSequence};
use crate::error::{Error, Result};

const PAYLOAD: u8 = 0x7f;
const STOP: u8 = 0x80;

pub fn write_varint(buf: &mut Vec<u8>, mut value: u64) {
    loop {
        let group = (value & PAYLOAD as u64) as u8;
        value >>= 7;
        if value == 0 {
            buf.push(group | STOP);
            return;
        }
        buf.push(group);
    }
}

#[inline]
pub fn varint_len(value: u64) -> usize {
    let bits = 64 - value.leading_zeros() as usize;
    bits.div_ceil(7).max(1)
}

/// Reads one integer from the front of `input` and advances it.
pub fn read_varint(input: &mut &[u8]) -> Result<u64> {
    let mut value = 0u64;
    let mut shift = 0u32;
    for (i, &byte) in input.iter().enumerate() {
        let group = (byte & PAYLOAD) as u64;
        if shift == 63 && group > 1 || shift > 63 {
            return Err(Error::CorruptEncoding);
        }
        value |= group << shift;
        if byte & STOP != 0 {
            *input = &input[i + 1..];
            return Ok(value);
        }
        shift += 7;
    }
    Err(Error::CorruptEncoding)
}

pub fn read_varint_u32(input: &mut &[u8]) -> Result<u32> {
    u32::try_from(read_varint(input)?).map_err(|_| Error::CorruptEncoding)
}

pub fn write_sequence(buf: &mut Vec<u8>, terms: &[TermId]) {
    write_varint(buf, terms.len() as u64);
    for &t in terms {
        write_varint(buf, t as u64);
    }
}

/// Serialized size of `terms` without materializing it.
#[inline]
pub fn sequence_len(terms: &[TermId]) -> usize {
    varint_len(terms.len() as u64) + terms.iter().map(|&t| varint_len(t as u64)).sum::<usize>()
}

pub fn encode_sequence(terms: &[TermId]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(sequence_len(terms));
    write_sequence(&mut buf, terms);
    buf
}

/// Reads one sequence from the front of `input` and advances it.
pub fn read_sequence(input: &mut &[u8]) -> Result<TermSequence> {
    let mut terms = Vec::new();
    read_sequence_into(input, &mut terms)?;
    Ok(TermSequence::from(terms))
}

/// Appends the ids of one sequence to `out`; returns the sequence length.
pub fn read_sequence_into(input: &mut &[u8], out: &mut Vec<TermId>) -> Result<usize> {
    let len = read_varint(input)?;
    // every id takes at least one byte
    if len > input.len() as u64 {
        return Err(Error::CorruptEncoding);
    }
    let len = len as usize;
    out.reserve(len);
    for _ in 0..len {
        out.push(read_varint_u32(input)?);
    }
    Ok(len)
}

/// Decodes a buffer holding exactly one sequence.
pub fn decode_sequence(bytes: &[u8]) -> Result<TermSequence> {
    let mut input = bytes;
    let seq = read_sequence(&mut input)?;
    if !input.is_empty() {
        return Err(Error::CorruptEncoding);
    }
    Ok(seq)
}
