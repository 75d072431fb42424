use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::scheme::Codec;
use crate::channel::mix;
use crate::error::{Error, Result};
use crate::prefix::Codebook;
use crate::source::{Alphabet, Symbol};

/// Mean bits and mean 1-bits of one encoded word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeStats {
    pub expected_bits: f64,
    pub expected_ones: f64,
}

/// Seed of the `index`-th random word drawn from `seed`.
pub fn word_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index))
}

/// Exact statistics of a codebook for words of `word_len` non-EOF symbols
/// (plus the EOF, when the alphabet has one).
pub fn codebook_stats(book: &Codebook, alphabet: &Alphabet, word_len: usize) -> SchemeStats {
    let eof = alphabet.eof();
    let rest = match eof {
        Some(e) => BigRational::one() - alphabet.prob(e),
        None => BigRational::one(),
    };
    let n = BigRational::from_integer(word_len.into());
    let mut bits = BigRational::zero();
    let mut ones = BigRational::zero();
    for s in 0..alphabet.len() {
        let code = book.code(s);
        let (len, k) = (BigRational::from_integer(code.len().into()), BigRational::from_integer(code.ones().into()));
        if Some(s) == eof {
            bits += len;
            ones += k;
        } else {
            let w = &n * alphabet.prob(s) / &rest;
            bits += &w * len;
            ones += w * k;
        }
    }
    SchemeStats {
        expected_bits: bits.to_f64().expect("finite"),
        expected_ones: ones.to_f64().expect("finite"),
    }
}

/// Statistics of `codec` at `word_len`: exact for codebook schemes, a Monte
/// Carlo mean over `samples` seeded words otherwise.
pub fn scheme_stats(codec: &Codec, word_len: usize, samples: usize, seed: u64) -> Result<SchemeStats> {
    if codec.scheme().uses_codebook() {
        let book = codec.codebook().expect("codebook scheme");
        return Ok(codebook_stats(book, codec.alphabet(), word_len));
    }
    if samples == 0 {
        return Err(Error::Config("Monte Carlo statistics need at least one sample".into()));
    }
    let (mut bits, mut ones) = (0u64, 0u64);
    for i in 0..samples {
        let word = codec.alphabet().sample_word(word_len, word_seed(seed, i as u64));
        let code = codec.encode(&word)?;
        bits += code.len() as u64;
        ones += code.ones() as u64;
    }
    Ok(SchemeStats { expected_bits: bits as f64 / samples as f64, expected_ones: ones as f64 / samples as f64 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalizedConfig {
    /// Signal interval in whole ms.
    pub signal_interval: u32,
    pub molecules_per_one: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub config: NormalizedConfig,
    /// `S₁/S₂`.
    pub interval_factor: f64,
    /// `M₁/M₂`.
    pub molecule_factor: f64,
}

/// Scales a baseline configuration to `target` so that the word duration and
/// the molecules spent per word match the baseline's: the interval by
/// `S₁/S₂` (rounded to whole ms) and the molecule count by `M₁/M₂` (rounded
/// to nearest, ties to even).
pub fn normalize(baseline: &SchemeStats, config: &NormalizedConfig, target: &SchemeStats) -> Result<Normalization> {
    if !(target.expected_bits > 0.0 && target.expected_ones > 0.0) {
        return Err(Error::Config("target statistics must be positive".into()));
    }
    let interval_factor = baseline.expected_bits / target.expected_bits;
    let molecule_factor = baseline.expected_ones / target.expected_ones;
    let signal_interval = (config.signal_interval as f64 * interval_factor).round_ties_even() as u32;
    let molecules_per_one = (config.molecules_per_one as f64 * molecule_factor).round_ties_even() as u32;
    if signal_interval == 0 || molecules_per_one == 0 {
        return Err(Error::Config("normalisation rounds to zero".into()));
    }
    Ok(Normalization {
        config: NormalizedConfig { signal_interval, molecules_per_one },
        interval_factor,
        molecule_factor,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Analysis {
    /// Mean code length per word.
    Length,
    /// Mean 1-bits per word.
    Ones,
    /// Fraction of words that decode back exactly.
    Accuracy,
    /// Length and 1-bit ratios of the first scheme over the second.
    Ratio,
}

impl std::str::FromStr for Analysis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "length" => Analysis::Length,
            "ones" => Analysis::Ones,
            "accuracy" => Analysis::Accuracy,
            "ratio" => Analysis::Ratio,
            _ => return Err(Error::Config(format!("unknown analysis `{s}`"))),
        })
    }
}

/// One row per word length.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("word_len,{}\n", self.columns.join(","));
        for (len, values) in &self.rows {
            let cells: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(out, "{len},{}", cells.join(","));
        }
        out
    }
}

/// Per word length, the mean metric of each codec over the same `samples`
/// random words.
pub fn curve(analysis: Analysis, codecs: &[Codec], lens: &[usize], samples: usize, seed: u64) -> Result<CurveTable> {
    if codecs.is_empty() || samples == 0 {
        return Err(Error::Config("a curve needs at least one scheme and one sample".into()));
    }
    if analysis == Analysis::Ratio && codecs.len() != 2 {
        return Err(Error::Config("a ratio curve compares exactly two schemes".into()));
    }
    let alphabet = codecs[0].alphabet();
    let columns = match analysis {
        Analysis::Ratio => {
            let (a, b) = (codecs[0].scheme(), codecs[1].scheme());
            vec![format!("{a}/{b} length"), format!("{a}/{b} ones")]
        }
        _ => codecs.iter().map(|c| c.scheme().to_string()).collect(),
    };
    let mut rows = Vec::with_capacity(lens.len());
    for &len in lens {
        let mut sums = vec![[0.0f64; 3]; codecs.len()];
        for i in 0..samples {
            let word = alphabet.sample_word(len, word_seed(seed ^ mix(len as u64), i as u64));
            for (codec, sum) in codecs.iter().zip(&mut sums) {
                let code = codec.encode(&word)?;
                sum[0] += code.len() as f64;
                sum[1] += code.ones() as f64;
                if analysis == Analysis::Accuracy {
                    sum[2] += f64::from(decodes_back(codec, &code, &word));
                }
            }
        }
        let n = samples as f64;
        let values = match analysis {
            Analysis::Length => sums.iter().map(|s| s[0] / n).collect(),
            Analysis::Ones => sums.iter().map(|s| s[1] / n).collect(),
            Analysis::Accuracy => sums.iter().map(|s| s[2] / n).collect(),
            Analysis::Ratio => vec![sums[0][0] / sums[1][0], sums[0][1] / sums[1][1]],
        };
        rows.push((len, values));
    }
    Ok(CurveTable { columns, rows })
}

fn decodes_back(codec: &Codec, code: &crate::bits::BitString, word: &[Symbol]) -> bool {
    matches!(codec.decode(code, codec.length_hint(word)), Ok(ref w) if w == word)
}
