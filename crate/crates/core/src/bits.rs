//! Finite binary strings: measurement outcomes, channel blocks, payloads.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite sequence over {0, 1}. Stored one symbol per byte (values 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Build from raw symbols; every entry must be 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "bit string symbol {bad} is not 0 or 1"
            )));
        }
        Ok(Self { bits })
    }

    pub fn empty() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    /// The all-zeros string of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    /// Decode `width` bits of `value`, most significant bit first.
    pub fn from_index(value: usize, width: usize) -> Self {
        let bits = (0..width).rev().map(|i| ((value >> i) & 1) as u8).collect();
        Self { bits }
    }

    /// Interpret the string as an integer, most significant bit first.
    /// Only defined for lengths that fit in usize.
    pub fn to_index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    /// Number of 1 symbols.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// New string with every bit flipped.
    pub fn flipped(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|&b| 1 - b).collect(),
        }
    }

    /// Uniform random bit string from a seeded stream.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let mut bits = Vec::with_capacity(n);
        let mut word = 0u64;
        for i in 0..n {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            bits.push((word & 1) as u8);
            word >>= 1;
        }
        Self { bits }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parse '0'/'1' characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::InvalidArgument(format!(
                        "unexpected character {c:?} in bit string"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }
}
