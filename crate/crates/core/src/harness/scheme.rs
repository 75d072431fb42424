use std::fmt;
use std::str::FromStr;

use crate::ac::{ac_decode, ac_encode, sac_decode, sac_encode, CodecConfig};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::moac::{moac_decode, moac_decode_partial, moac_encode_unverified, MoacConfig};
use crate::moapc::{moapc_decode, moapc_encode, split_frame, FrameScheme};
use crate::prefix::{
    huffman, isi_mitigating, mohuffman, mopc_star, prefix_decode, prefix_decode_partial, prefix_encode, uncoded,
    Codebook, Labeling, DEFAULT_MAX_LEN,
};
use crate::source::{Alphabet, CumulativeModel, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Uncoded,
    IsiMitigating,
    Huffman,
    MoHuffman,
    MopcStar,
    Ac,
    Sac,
    Moac,
    Moapc,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::Uncoded,
        Scheme::IsiMitigating,
        Scheme::Huffman,
        Scheme::MoHuffman,
        Scheme::MopcStar,
        Scheme::Ac,
        Scheme::Sac,
        Scheme::Moac,
        Scheme::Moapc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::IsiMitigating => "isi",
            Scheme::Huffman => "huffman",
            Scheme::MoHuffman => "mohuffman",
            Scheme::MopcStar => "mopc",
            Scheme::Ac => "ac",
            Scheme::Sac => "sac",
            Scheme::Moac => "moac",
            Scheme::Moapc => "moapc",
        }
    }

    /// Codes of this scheme never hold two adjacent 1s, so the receiver may
    /// apply the ISI correction sweep.
    pub fn forbids_consecutive_ones(self) -> bool {
        !matches!(self, Scheme::Uncoded | Scheme::Huffman | Scheme::Ac)
    }

    /// Fixed codebook schemes, whose statistics are exact.
    pub fn uses_codebook(self) -> bool {
        matches!(
            self,
            Scheme::Uncoded | Scheme::IsiMitigating | Scheme::Huffman | Scheme::MoHuffman | Scheme::MopcStar
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Ok(match key.as_str() {
            "uncoded" => Scheme::Uncoded,
            "isi" | "isi-mitigating" => Scheme::IsiMitigating,
            "huffman" => Scheme::Huffman,
            "mohuffman" => Scheme::MoHuffman,
            "mopc" | "mopc*" | "mopc-star" | "mopcstar" => Scheme::MopcStar,
            "ac" => Scheme::Ac,
            "sac" => Scheme::Sac,
            "moac" => Scheme::Moac,
            "moapc" => Scheme::Moapc,
            _ => return Err(Error::Config(format!("unknown scheme `{s}`"))),
        })
    }
}

/// A scheme bound to an alphabet, with its codebook or coder configuration.
#[derive(Clone, Debug)]
pub struct Codec {
    scheme: Scheme,
    alphabet: Alphabet,
    model: CumulativeModel,
    book: Option<Codebook>,
    ac: CodecConfig,
    moac: MoacConfig,
}

impl Codec {
    pub fn new(scheme: Scheme, alphabet: &Alphabet) -> Result<Self> {
        Self::with_precision(scheme, alphabet, crate::ac::DEFAULT_PRECISION)
    }

    pub fn with_precision(scheme: Scheme, alphabet: &Alphabet, precision_bits: u32) -> Result<Self> {
        let model = CumulativeModel::new(alphabet);
        let book = match scheme {
            Scheme::Uncoded => Some(uncoded(alphabet)?),
            Scheme::IsiMitigating => Some(isi_mitigating(alphabet)?),
            Scheme::Huffman => Some(huffman(alphabet, Labeling::Canonical)?),
            Scheme::MoHuffman => Some(mohuffman(alphabet, Labeling::Canonical)?),
            Scheme::MopcStar | Scheme::Moapc => Some(mopc_star(alphabet, DEFAULT_MAX_LEN)?),
            Scheme::Ac | Scheme::Sac | Scheme::Moac => None,
        };
        let ac = CodecConfig::for_model(&model).with_precision(precision_bits);
        let moac = MoacConfig::for_model(&model).with_precision(precision_bits);
        Ok(Codec { scheme, alphabet: alphabet.clone(), model, book, ac, moac })
    }

    /// Replaces the codebook of a codebook-based scheme.
    pub fn with_codebook(mut self, book: Codebook) -> Result<Self> {
        if self.book.is_none() {
            return Err(Error::Config(format!("scheme {} takes no codebook", self.scheme)));
        }
        if book.len() != self.alphabet.len() {
            return Err(Error::Config("codebook and alphabet sizes differ".into()));
        }
        self.book = Some(book);
        Ok(self)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn model(&self) -> &CumulativeModel {
        &self.model
    }

    pub fn codebook(&self) -> Option<&Codebook> {
        self.book.as_ref()
    }

    /// Symbol count handed to the decoder out of band: needed only when the
    /// alphabet has no EOF.
    pub fn length_hint(&self, word: &[Symbol]) -> Option<usize> {
        match self.alphabet.eof() {
            Some(_) => None,
            None => Some(word.len()),
        }
    }

    pub fn encode(&self, word: &[Symbol]) -> Result<BitString> {
        self.alphabet.validate_word(word)?;
        match self.scheme {
            Scheme::Ac => ac_encode(&self.model, word, &self.ac),
            Scheme::Sac => sac_encode(&self.model, word, &self.ac),
            Scheme::Moac => moac_encode_unverified(&self.model, word, &self.moac),
            Scheme::Moapc => Ok(moapc_encode(&self.model, self.book(), word, &self.moac)?.to_bits()),
            _ => prefix_encode(self.book(), word),
        }
    }

    /// Strict decoding of an error-free code.
    pub fn decode(&self, bits: &BitString, length_hint: Option<usize>) -> Result<Vec<Symbol>> {
        match self.scheme {
            Scheme::Ac => ac_decode(&self.model, bits, &self.ac, length_hint),
            Scheme::Sac => sac_decode(&self.model, bits, &self.ac, length_hint),
            Scheme::Moac => moac_decode(&self.model, bits, &self.moac, length_hint),
            Scheme::Moapc => moapc_decode(&self.model, self.book(), bits, &self.moac, length_hint),
            _ => {
                let word = prefix_decode(self.book(), bits)?;
                self.alphabet.validate_word(&word)?;
                Ok(word)
            }
        }
    }

    /// Best-effort decoding of a detected (possibly corrupted) code of a word
    /// of `len` symbols. Never fails: whatever can be recovered is returned,
    /// possibly nothing.
    pub fn decode_lenient(&self, bits: &BitString, len: usize) -> Vec<Symbol> {
        let hint = self.lenient_hint(len);
        let mut word = match self.scheme {
            Scheme::Ac => ac_decode(&self.model, bits, &self.ac, hint).unwrap_or_default(),
            Scheme::Sac => ac_decode(&self.model, &lenient_unsubstitute(bits), &self.ac, hint).unwrap_or_default(),
            Scheme::Moac => moac_decode_partial(&self.model, bits, &self.moac, hint).0,
            Scheme::Moapc => match split_frame(bits) {
                Ok((FrameScheme::Moac, payload)) => moac_decode_partial(&self.model, &payload, &self.moac, hint).0,
                Ok((FrameScheme::Mopc, payload)) => prefix_decode_partial(self.book(), &payload).0,
                Err(_) => Vec::new(),
            },
            _ => prefix_decode_partial(self.book(), bits).0,
        };
        if let Some(e) = self.alphabet.eof() {
            if let Some(p) = word.iter().position(|&s| s == e) {
                word.truncate(p + 1);
            }
        }
        word
    }

    /// Without an EOF the decoder is told the length; with one, a generous
    /// cap stops runaway decoding of corrupted input.
    fn lenient_hint(&self, len: usize) -> Option<usize> {
        match self.alphabet.eof() {
            None => Some(len),
            Some(_) => Some(2 * len + 8),
        }
    }

    fn book(&self) -> &Codebook {
        self.book.as_ref().expect("codebook scheme")
    }
}

/// `10 → 1` that also accepts `1` followed by `1` or the end of input.
fn lenient_unsubstitute(bits: &BitString) -> BitString {
    let v = bits.as_slice();
    let mut out = BitString::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        out.push(v[i]);
        i += if v[i] && v.get(i + 1) == Some(&false) { 2 } else { 1 };
    }
    out
}
