use crate::error::{Error, Result};

/// Binary encoding `lower + Σ_k 2^k b_k` of an integer in `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryEncoding {
    pub lower: i64,
    pub upper: i64,
    /// Place value `2^k` of bit `k`.
    pub weights: Vec<i64>,
}

impl BinaryEncoding {
    pub fn bits(&self) -> usize {
        self.weights.len()
    }

    /// Constraint `weights · b <= upper - lower`, excluding codes above the
    /// range. `None` when there are no bits.
    pub fn range_constraint(&self) -> Option<(Vec<i64>, i64)> {
        (!self.weights.is_empty()).then(|| (self.weights.clone(), self.upper - self.lower))
    }

    pub fn decode(&self, bits: &[bool]) -> i64 {
        self.lower
            + self
                .weights
                .iter()
                .zip(bits)
                .filter(|(_, &b)| b)
                .map(|(w, _)| w)
                .sum::<i64>()
    }

    /// Bits of `value`, or `None` when it is outside the range.
    pub fn encode(&self, value: i64) -> Option<Vec<bool>> {
        if value < self.lower || value > self.upper {
            return None;
        }
        let code = value - self.lower;
        Some((0..self.bits()).map(|k| code >> k & 1 == 1).collect())
    }
}

/// Encodes a bounded integer with `⌈log2(upper − lower + 1)⌉` binary
/// variables.
pub fn binarize_bounded_integer(lower: i64, upper: i64) -> Result<BinaryEncoding> {
    if lower > upper {
        return Err(Error::InvalidRange { lower, upper });
    }
    let span = (upper - lower) as u64;
    let bits = (u64::BITS - span.leading_zeros()) as usize;
    Ok(BinaryEncoding {
        lower,
        upper,
        weights: (0..bits).map(|k| 1i64 << k).collect(),
    })
}
