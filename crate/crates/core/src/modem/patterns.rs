use crate::error::{Error, Result};

pub const FORMULA_CAP: usize = 20;
pub const BRUTE_FORCE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Formula,
    /// Counts orbits of `b_n -> 1 - b_{N-1-n}` over all `2^N` strings.
    BruteForce,
}

/// Number of distinct intensity patterns produced by `N`-bit strings.
pub fn count_distinct_patterns(n: usize, method: CountMethod) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    match method {
        CountMethod::Formula => {
            if n > FORMULA_CAP {
                return Err(Error::TooLarge {
                    n,
                    cap: FORMULA_CAP,
                });
            }
            let base = 1u64 << (n - 1);
            Ok(if n % 2 == 1 {
                base
            } else {
                base + (1u64 << (n / 2 - 1))
            })
        }
        CountMethod::BruteForce => {
            if n > BRUTE_FORCE_CAP {
                return Err(Error::TooLarge {
                    n,
                    cap: BRUTE_FORCE_CAP,
                });
            }
            Ok(count_orbits(n))
        }
    }
}

fn mirror_complement(x: u32, n: usize) -> u32 {
    let mask = (1u32 << n) - 1;
    (x.reverse_bits() >> (32 - n)) ^ mask
}

fn count_orbits(n: usize) -> u64 {
    let total = 1u32 << n;
    let mut seen = vec![false; total as usize];
    let mut orbits = 0;
    for x in 0..total {
        if seen[x as usize] {
            continue;
        }
        orbits += 1;
        seen[x as usize] = true;
        seen[mirror_complement(x, n) as usize] = true;
    }
    orbits
}
