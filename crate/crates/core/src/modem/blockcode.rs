//! Fixed-rate binary to balanced-ternary block code.
//!
//! Every 7-bit block (most significant bit first) becomes 5 trits holding the
//! block value modulo 243 in balanced form, least significant trit first. Values
//! 0..=121 keep their natural representation; 122..=127 wrap to -121..=-116.
//! A leading 5-trit header carries the number of zero bits appended to fill the
//! last block.

use crate::error::{Error, Result};
use crate::modem::Trit;

pub const BLOCK_BITS: usize = 7;
pub const BLOCK_TRITS: usize = 5;
const MODULUS: i32 = 243;
const HALF_RANGE: i32 = 121;

/// Bits carried per trit by the block code.
pub const CODE_RATE: f64 = BLOCK_BITS as f64 / BLOCK_TRITS as f64;

/// Balanced digits of `value` (must be in `-121..=121`), least significant first.
pub fn to_balanced(mut value: i32) -> [Trit; BLOCK_TRITS] {
    debug_assert!(value.abs() <= HALF_RANGE);
    let mut out = [Trit::Zero; BLOCK_TRITS];
    for slot in out.iter_mut() {
        let mut r = value.rem_euclid(3);
        if r == 2 {
            r = -1;
        }
        *slot = Trit::from_value(r).expect("digit");
        value = (value - r) / 3;
    }
    out
}

pub fn from_balanced(trits: &[Trit]) -> i32 {
    trits.iter().rev().fold(0, |acc, t| acc * 3 + t.value())
}

/// Encodes a block value `0..128` as 5 trits.
pub fn encode_block(value: u8) -> [Trit; BLOCK_TRITS] {
    assert!(value < 128, "block value {value} exceeds 7 bits");
    let v = i32::from(value);
    to_balanced(if v > HALF_RANGE { v - MODULUS } else { v })
}

/// Residue of a 5-trit block in `0..243`.
pub fn block_residue(trits: &[Trit]) -> u32 {
    from_balanced(trits).rem_euclid(MODULUS) as u32
}

pub fn encode_bits_to_trits(payload: &[bool]) -> Vec<Trit> {
    let pad = (BLOCK_BITS - payload.len() % BLOCK_BITS) % BLOCK_BITS;
    let blocks = payload.len().div_ceil(BLOCK_BITS);
    let mut out = Vec::with_capacity(BLOCK_TRITS * (blocks + 1));
    out.extend_from_slice(&encode_block(pad as u8));
    for chunk in payload.chunks(BLOCK_BITS) {
        let mut value = 0u8;
        for i in 0..BLOCK_BITS {
            value = (value << 1) | u8::from(chunk.get(i).copied().unwrap_or(false));
        }
        out.extend_from_slice(&encode_block(value));
    }
    out
}

pub fn decode_trits_to_bits(trits: &[Trit]) -> Result<Vec<bool>> {
    if trits.len() < BLOCK_TRITS || !trits.len().is_multiple_of(BLOCK_TRITS) {
        return Err(Error::MalformedHeader(format!(
            "stream of {} trits is not a whole number of {BLOCK_TRITS}-trit blocks",
            trits.len()
        )));
    }
    let pad = block_residue(&trits[..BLOCK_TRITS]) as usize;
    let data_blocks = trits.len() / BLOCK_TRITS - 1;
    if pad >= BLOCK_BITS || (data_blocks == 0 && pad != 0) {
        return Err(Error::MalformedHeader(format!(
            "pad length {pad} with {data_blocks} data blocks"
        )));
    }
    let mut bits = Vec::with_capacity(data_blocks * BLOCK_BITS);
    for (i, block) in trits[BLOCK_TRITS..].chunks(BLOCK_TRITS).enumerate() {
        let value = block_residue(block);
        if value >= 128 {
            return Err(Error::OutOfRangeBlock { block: i, value });
        }
        for bit in (0..BLOCK_BITS).rev() {
            bits.push((value >> bit) & 1 == 1);
        }
    }
    if pad > 0 {
        let tail = bits.split_off(bits.len() - pad);
        if tail.iter().any(|&b| b) {
            return Err(Error::MalformedHeader("non-zero padding bits".into()));
        }
    }
    Ok(bits)
}
