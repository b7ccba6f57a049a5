use std::fmt;

use crate::error::{Error, Result};
use crate::physics::BitPattern;

/// Balanced ternary digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Trit {
    Minus = -1,
    Zero = 0,
    Plus = 1,
}

impl Trit {
    pub const ALL: [Trit; 3] = [Trit::Minus, Trit::Zero, Trit::Plus];

    #[inline]
    pub fn value(self) -> i32 {
        self as i8 as i32
    }

    #[inline]
    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            -1 => Some(Trit::Minus),
            0 => Some(Trit::Zero),
            1 => Some(Trit::Plus),
            _ => None,
        }
    }

    /// Index 0, 1, 2 for -1, 0, +1.
    #[inline]
    pub fn index(self) -> usize {
        (self.value() + 1) as usize
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trit::Minus => "-",
            Trit::Zero => "0",
            Trit::Plus => "+",
        })
    }
}

/// Central trits `t_0 .. t_{N/2-1}` of one array read.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TritSequence(Vec<Trit>);

impl TritSequence {
    pub fn new(trits: Vec<Trit>) -> Self {
        Self(trits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Trit::Zero; len])
    }

    pub fn from_values(values: &[i32]) -> Result<Self> {
        values
            .iter()
            .map(|&v| {
                Trit::from_value(v)
                    .ok_or_else(|| Error::InvalidParameter(format!("trit value {v}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// The `index`-th of all `3^len` sequences, first trit least significant.
    pub fn from_index(mut index: usize, len: usize) -> Self {
        let mut trits = Vec::with_capacity(len);
        for _ in 0..len {
            trits.push(Trit::ALL[index % 3]);
            index /= 3;
        }
        Self(trits)
    }

    /// Inverse of [`TritSequence::from_index`].
    pub fn index(&self) -> usize {
        self.0.iter().rev().fold(0, |acc, t| acc * 3 + t.index())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Trit] {
        &self.0
    }

    pub fn values(&self) -> Vec<i32> {
        self.0.iter().map(|t| t.value()).collect()
    }

    /// Partial sums `T_1 .. T_L`.
    pub fn partial_sums(&self) -> Vec<i32> {
        self.0
            .iter()
            .scan(0, |acc, t| {
                *acc += t.value();
                Some(*acc)
            })
            .collect()
    }

    pub fn into_inner(self) -> Vec<Trit> {
        self.0
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &TritSequence) -> usize {
        assert_eq!(self.len(), other.len(), "sequence lengths");
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for TritSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl From<Vec<Trit>> for TritSequence {
    fn from(v: Vec<Trit>) -> Self {
        Self(v)
    }
}

/// `t_p = b_{N-1-p} - b_p` for `p < N/2`.
pub fn central_trits(bits: &BitPattern) -> Result<TritSequence> {
    let n = bits.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    Ok(TritSequence(
        (0..n / 2)
            .map(|p| {
                Trit::from_value(bits.digit(n - 1 - p) - bits.digit(p)).expect("bit difference")
            })
            .collect(),
    ))
}

/// Writes trit `t_n` onto the cantilever pair `(N-1-n, n)`:
/// `-1 -> (0, 1)`, `0 -> (0, 0)`, `+1 -> (1, 0)`.
pub fn trits_to_indentations(trits: &TritSequence) -> BitPattern {
    let half = trits.len();
    let n = 2 * half;
    let mut bits = vec![false; n.max(1)];
    for (i, t) in trits.as_slice().iter().enumerate() {
        match t {
            Trit::Minus => bits[i] = true,
            Trit::Zero => {}
            Trit::Plus => bits[n - 1 - i] = true,
        }
    }
    BitPattern::new(bits).expect("non-empty")
}
