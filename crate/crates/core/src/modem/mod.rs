//! Ternary modulation: user bits to central trits to indentation patterns, and
//! the Fourier-domain demodulation that brings them back.

mod blockcode;
mod demod;
mod patterns;
mod trits;

pub use blockcode::{
    decode_trits_to_bits, encode_bits_to_trits, encode_block, BLOCK_BITS, BLOCK_TRITS, CODE_RATE,
};
pub use demod::{
    demodulate, lowpass_decimate, oversampled_grid, recover_trits_noiseless, sampling_grid,
    Recovered, SampledIntensity, MIN_SIGNAL_SCALE,
};
pub use patterns::{count_distinct_patterns, CountMethod, BRUTE_FORCE_CAP, FORMULA_CAP};
pub use trits::{central_trits, trits_to_indentations, Trit, TritSequence};

pub use crate::physics::FourierCoefficients;

/// Splits a trit stream into frames of `frame_len`, zero-filling the last one.
pub fn frame_trits(stream: &[Trit], frame_len: usize) -> Vec<TritSequence> {
    assert!(frame_len > 0, "frame length");
    stream
        .chunks(frame_len)
        .map(|c| {
            let mut v = c.to_vec();
            v.resize(frame_len, Trit::Zero);
            TritSequence::new(v)
        })
        .collect()
}
