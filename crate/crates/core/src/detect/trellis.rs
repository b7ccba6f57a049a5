//! Maximum-likelihood detection of the central-trit random walk.
//!
//! The state at slice `n` is the partial sum `T_n` in `-n ..= n`; a trit moves
//! the walk by -1, 0 or +1. The branch metric is `(Y_n - T_n)^2` with
//! `Y_n = R_n / scale`, and the surviving path metric is minimised by the usual
//! add-compare-select recursion. Ties always go to the smaller state.

use crate::channel::ReceivedVector;
use crate::detect::check_scale;
use crate::error::Result;
use crate::modem::{Trit, TritSequence};
use crate::scalar::Real;

/// Survivors at one time slice.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrellisColumn<T> {
    pub slice_index: usize,
    /// Surviving path metric of state `T = i - slice_index`.
    pub spm: Vec<T>,
    /// Predecessor state of each state.
    pub backpointer: Vec<i32>,
}

impl<T: Real> TrellisColumn<T> {
    pub fn states(&self) -> impl Iterator<Item = i32> {
        let n = self.slice_index as i32;
        -n..=n
    }

    #[inline]
    pub fn metric(&self, state: i32) -> T {
        self.spm[(state + self.slice_index as i32) as usize]
    }
}

/// Reusable detector; keeps its column buffers between calls.
#[derive(Debug, Clone, Default)]
pub struct SequenceDetector<T> {
    columns: Vec<TrellisColumn<T>>,
}

impl<T: Real> SequenceDetector<T> {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
        }
    }

    /// Columns of the last run; column 0 holds the start state only.
    pub fn columns(&self) -> &[TrellisColumn<T>] {
        &self.columns
    }

    /// Runs the forward pass and traceback, writing the trit decisions to `out`.
    /// Returns the metric of the selected path.
    pub fn detect_into(&mut self, values: &[T], scale: T, out: &mut Vec<Trit>) -> Result<T> {
        check_scale(scale)?;
        let len = values.len();
        if self.columns.len() < len + 1 {
            self.columns.resize_with(len + 1, TrellisColumn::default);
        }
        {
            let start = &mut self.columns[0];
            start.slice_index = 0;
            start.spm.clear();
            start.spm.push(T::zero());
            start.backpointer.clear();
            start.backpointer.push(0);
        }
        for n in 1..=len {
            let (done, rest) = self.columns.split_at_mut(n);
            let prev = &done[n - 1];
            let col = &mut rest[0];
            let y = values[n - 1] / scale;
            let ni = n as i32;
            let prev_top = ni - 1;
            col.slice_index = n;
            col.spm.clear();
            col.backpointer.clear();
            for state in -ni..=ni {
                let mut best = T::infinity();
                let mut from = 0;
                for cand in (state - 1)..=(state + 1) {
                    if cand < -prev_top || cand > prev_top {
                        continue;
                    }
                    let m = prev.spm[(cand + prev_top) as usize];
                    if m < best {
                        best = m;
                        from = cand;
                    }
                }
                let d = y - T::from_i32(state).unwrap();
                col.spm.push(best + d * d);
                col.backpointer.push(from);
            }
        }

        let last = &self.columns[len];
        let mut state = 0i32;
        let mut best = T::infinity();
        for (i, &m) in last.spm.iter().enumerate() {
            if m < best {
                best = m;
                state = i as i32 - len as i32;
            }
        }
        let metric = if len == 0 { T::zero() } else { best };
        out.clear();
        out.resize(len, Trit::Zero);
        for n in (1..=len).rev() {
            let col = &self.columns[n];
            let from = col.backpointer[(state + n as i32) as usize];
            out[n - 1] = Trit::from_value(state - from).expect("unit step");
            state = from;
        }
        Ok(metric)
    }

    pub fn detect(&mut self, received: &ReceivedVector<T>, scale: T) -> Result<TritSequence> {
        let mut out = Vec::with_capacity(received.len());
        self.detect_into(received.values(), scale, &mut out)?;
        Ok(TritSequence::new(out))
    }
}

/// Most likely trit sequence given `R_1 .. R_L` and the channel gain `scale`.
pub fn ml_sequence_detect<T: Real>(received: &ReceivedVector<T>, scale: T) -> Result<TritSequence> {
    SequenceDetector::new().detect(received, scale)
}

/// `sum_n (R_n / scale - T_n)^2` for the walk generated by `trits`,
/// accumulated from `n = 1` upwards.
pub fn path_metric<T: Real>(values: &[T], scale: T, trits: &TritSequence) -> T {
    let mut acc = T::zero();
    let mut walk = 0;
    for (r, t) in values.iter().zip(trits.as_slice()) {
        walk += t.value();
        let d = *r / scale - T::from_i32(walk).unwrap();
        acc += d * d;
    }
    acc
}
