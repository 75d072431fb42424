//! MoAPC: MoAC with a prefix-code fallback. A `0` header announces a MoAC
//! payload and a `10` header a MoPC* payload; the encoder falls back whenever
//! the MoAC code fails to decode back to the word.

use crate::bits::BitString;
use crate::error::{decode_err, Result};
use crate::moac::{moac_decode, moac_encode, MoacConfig};
use crate::prefix::{prefix_decode, prefix_encode, Codebook};
use crate::source::{CumulativeModel, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameScheme {
    Moac,
    Mopc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoapcFrame {
    pub scheme: FrameScheme,
    pub payload: BitString,
}

impl MoapcFrame {
    pub fn header(&self) -> BitString {
        match self.scheme {
            FrameScheme::Moac => BitString::from_bits(vec![false]),
            FrameScheme::Mopc => BitString::from_bits(vec![true, false]),
        }
    }

    pub fn to_bits(&self) -> BitString {
        self.header().concat(&self.payload)
    }

    pub fn len(&self) -> usize {
        self.header().len() + self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn moapc_encode(
    model: &CumulativeModel,
    book: &Codebook,
    word: &[Symbol],
    cfg: &MoacConfig,
) -> Result<MoapcFrame> {
    let moac = moac_encode(model, word, cfg)?;
    if moac.verified {
        return Ok(MoapcFrame { scheme: FrameScheme::Moac, payload: moac.bits });
    }
    Ok(MoapcFrame { scheme: FrameScheme::Mopc, payload: prefix_encode(book, word)? })
}

/// Splits a frame into its scheme and payload.
pub fn split_frame(bits: &BitString) -> Result<(FrameScheme, BitString)> {
    match (bits.get(0), bits.get(1)) {
        (Some(false), _) => Ok((FrameScheme::Moac, bits.slice(1, bits.len()))),
        (Some(true), Some(false)) => Ok((FrameScheme::Mopc, bits.slice(2, bits.len()))),
        (Some(true), _) => Err(decode_err("frame header must be 0 or 10")),
        (None, _) => Err(decode_err("empty frame")),
    }
}

pub fn moapc_decode(
    model: &CumulativeModel,
    book: &Codebook,
    bits: &BitString,
    cfg: &MoacConfig,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    let (scheme, payload) = split_frame(bits)?;
    match scheme {
        FrameScheme::Moac => moac_decode(model, &payload, cfg, length_hint),
        FrameScheme::Mopc => {
            let word = prefix_decode(book, &payload)?;
            match length_hint {
                Some(n) if n != word.len() => Err(decode_err(format!(
                    "prefix payload holds {} symbols, expected {n}",
                    word.len()
                ))),
                _ => Ok(word),
            }
        }
    }
}
