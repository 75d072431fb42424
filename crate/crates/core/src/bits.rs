//! Plain bit sequences and the (1,∞) run-length constraint predicates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite sequence of bits, first bit first.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        BitString(Vec::with_capacity(n))
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }

    /// Number of 1-bits.
    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Index of the second bit of the first `11` pair, if any.
    pub fn first_violation(&self) -> Option<usize> {
        self.0.windows(2).position(|w| w[0] && w[1]).map(|i| i + 1)
    }

    pub fn no_consecutive_ones(&self) -> bool {
        self.first_violation().is_none()
    }

    pub fn ends_with_zero(&self) -> bool {
        self.0.last() == Some(&false)
    }

    pub fn check_constrained(&self) -> Result<()> {
        match self.first_violation() {
            Some(i) => Err(Error::ConsecutiveOnes(i)),
            None => Ok(()),
        }
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Replaces every 1 with `10`.
    pub fn substitute_ones(&self) -> BitString {
        let mut out = Vec::with_capacity(self.len() + self.ones());
        for &b in &self.0 {
            out.push(b);
            if b {
                out.push(false);
            }
        }
        BitString(out)
    }

    /// Inverse of [`substitute_ones`](Self::substitute_ones): every `10` becomes `1`.
    /// A lone trailing `1` is kept as `1`.
    pub fn unsubstitute_ones(&self) -> Result<BitString> {
        let mut out = Vec::with_capacity(self.len());
        let mut i = 0;
        while i < self.0.len() {
            if self.0[i] {
                match self.0.get(i + 1) {
                    Some(true) => return Err(Error::ConsecutiveOnes(i + 1)),
                    Some(false) => i += 2,
                    None => i += 1,
                }
                out.push(true);
            } else {
                out.push(false);
                i += 1;
            }
        }
        Ok(BitString(out))
    }

    /// Packs the bits most-significant-bit first; the final byte is zero padded.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        bytes
    }

    pub fn from_bytes_msb(bytes: &[u8], nbits: usize) -> Result<BitString> {
        if nbits > bytes.len() * 8 {
            return Err(Error::Decode(format!(
                "{nbits} bits requested from {} bytes",
                bytes.len()
            )));
        }
        Ok(BitString(
            (0..nbits)
                .map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0)
                .collect(),
        ))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid bit character {c:?} at offset {i}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

/// Parses a literal bit string, panicking on bad input. Test and table helper.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("valid bit literal")
}
