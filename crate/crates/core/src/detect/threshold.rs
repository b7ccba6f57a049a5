use crate::channel::ReceivedVector;
use crate::detect::check_scale;
use crate::error::Result;
use crate::modem::{Trit, TritSequence};
use crate::scalar::Real;

/// Symbol-by-symbol slicer on `y_n = (R_{n+1} - R_n) / scale`.
pub fn threshold_detect<T: Real>(received: &ReceivedVector<T>, scale: T) -> Result<TritSequence> {
    let mut out = Vec::with_capacity(received.len());
    threshold_detect_into(received.values(), scale, &mut out)?;
    Ok(TritSequence::new(out))
}

pub fn threshold_detect_into<T: Real>(values: &[T], scale: T, out: &mut Vec<Trit>) -> Result<()> {
    check_scale(scale)?;
    out.clear();
    let mut prev = T::zero();
    for &r in values {
        out.push(slice((r - prev) / scale));
        prev = r;
    }
    Ok(())
}

/// `-1` below `-1/2`, `+1` above `+1/2`, `0` on the closed middle interval.
#[inline]
pub fn slice<T: Real>(y: T) -> Trit {
    let half = T::lit(0.5);
    if y < -half {
        Trit::Minus
    } else if y > half {
        Trit::Plus
    } else {
        Trit::Zero
    }
}
