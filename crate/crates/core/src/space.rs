//! Finite product spaces `Λ = Λ_1 × … × Λ_n` with symbols `0..k_i`.
//!
//! States are indexed in mixed radix with coordinate 0 varying fastest, so
//! enumeration order is lexicographic on the reversed coordinate tuple.

use crate::error::{Error, Result};

/// Spaces too large to index (more than `usize::MAX` states) are still valid
/// for coordinate-wise work; [`ProductSpace::len`] then saturates and
/// [`ProductSpace::is_enumerable`] is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    enumerable: bool,
}

impl ProductSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.iter().any(|&k| k == 0) {
            return Err(Error::Domain("every alphabet must be non-empty".into()));
        }
        let mut strides = Vec::with_capacity(sizes.len());
        let mut len: usize = 1;
        let mut enumerable = true;
        for &k in &sizes {
            strides.push(len);
            match len.checked_mul(k) {
                Some(v) => len = v,
                None => {
                    enumerable = false;
                    len = usize::MAX;
                }
            }
        }
        Ok(Self { sizes, strides, len, enumerable })
    }

    /// `{0,1}^n`.
    pub fn binary(n: usize) -> Self {
        Self::uniform(n, 2).expect("binary alphabets are non-empty")
    }

    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![k; n])
    }

    /// Whether every state has a `usize` index.
    pub fn is_enumerable(&self) -> bool {
        self.enumerable
    }

    /// Errors unless the space can be enumerated with at most `limit` states.
    pub fn require_len(&self, what: &'static str, limit: u128) -> Result<usize> {
        if !self.enumerable || self.len as u128 > limit {
            let needed = if self.enumerable { self.len as u128 } else { u128::MAX };
            return Err(Error::Capacity { what, needed, limit });
        }
        Ok(self.len)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &k) in out.iter_mut().zip(&self.sizes) {
            *slot = index % k;
            index /= k;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut v = vec![0; self.dim()];
        self.decode_into(index, &mut v);
        v
    }

    pub fn encode(&self, state: &[usize]) -> usize {
        state.iter().zip(&self.strides).map(|(&s, &st)| s * st).sum()
    }

    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    /// Panics if the space is not enumerable.
    pub fn states(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        assert!(self.enumerable, "state space too large to enumerate");
        (0..self.len).map(move |i| self.decode(i))
    }

    pub fn contains(&self, state: &[usize]) -> bool {
        state.len() == self.dim() && state.iter().zip(&self.sizes).all(|(&s, &k)| s < k)
    }
}

/// Hamming distance between two equal-length symbol vectors.
pub fn hamming(x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}
