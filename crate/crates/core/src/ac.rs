//! Binary arithmetic coding: a finite-precision streaming coder, an exact
//! rational reference, and the 1→10 substitution variant (SAC).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::error::{decode_err, Error, Result};
use crate::source::{word_interval, word_interval_scaled, CumulativeModel, Symbol, WordInterval};

/// How the decoder learns where a word stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The word ends with the alphabet's EOF symbol.
    EofIncluded,
    /// The decoder is told the number of symbols.
    EofExcluded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodecConfig {
    pub precision_bits: u32,
    pub mode: Mode,
}

pub const DEFAULT_PRECISION: u32 = 20;

impl CodecConfig {
    pub fn new(precision_bits: u32, mode: Mode) -> Self {
        CodecConfig { precision_bits, mode }
    }

    /// EOF-included when the model has an EOF symbol, default precision.
    pub fn for_model(model: &CumulativeModel) -> Self {
        let mode = if model.eof().is_some() { Mode::EofIncluded } else { Mode::EofExcluded };
        CodecConfig { precision_bits: DEFAULT_PRECISION, mode }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub(crate) fn validate(&self, model: &CumulativeModel) -> Result<()> {
        if !(8..=62).contains(&self.precision_bits) {
            return Err(Error::Config(format!(
                "precision must be within 8..=62 bits, got {}",
                self.precision_bits
            )));
        }
        if model.total() > 1u64 << (self.precision_bits - 2) {
            return Err(Error::Config(format!(
                "frequency total {} needs more than {} bits of precision",
                model.total(),
                self.precision_bits
            )));
        }
        if self.mode == Mode::EofIncluded && model.eof().is_none() {
            return Err(Error::Config("EOF-included mode needs an EOF symbol".into()));
        }
        Ok(())
    }

    pub(crate) fn check_word(&self, model: &CumulativeModel, word: &[Symbol]) -> Result<()> {
        match self.mode {
            Mode::EofIncluded => model.check_eof_word(word),
            Mode::EofExcluded => model.check_word(word),
        }
    }
}

/// The dyadic interval `[Σ b_k 2^-k, Σ b_k 2^-k + 2^-n)` of a bit string.
pub fn ac_interval(bits: &BitString) -> WordInterval {
    let mut num = BigUint::zero();
    for b in bits.iter() {
        num = (num << 1u32) + u32::from(b);
    }
    let denom = BigInt::from(BigUint::one() << bits.len());
    let lo = BigInt::from(num);
    WordInterval {
        lo: BigRational::new(lo.clone(), denom.clone()),
        hi: BigRational::new(lo + 1, denom),
    }
}

/// Streaming arithmetic encoder over `precision_bits`-wide registers.
pub fn ac_encode(model: &CumulativeModel, word: &[Symbol], cfg: &CodecConfig) -> Result<BitString> {
    cfg.validate(model)?;
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    cfg.check_word(model, word)?;
    let mut enc = Encoder::new(cfg.precision_bits);
    for &s in word {
        enc.encode(model, s);
    }
    Ok(enc.finish())
}

struct Encoder {
    p: u32,
    low: u64,
    high: u64,
    pending: usize,
    out: BitString,
}

impl Encoder {
    fn new(p: u32) -> Self {
        Encoder { p, low: 0, high: (1u64 << p) - 1, pending: 0, out: BitString::new() }
    }

    fn half(&self) -> u64 {
        1u64 << (self.p - 1)
    }

    fn quarter(&self) -> u64 {
        1u64 << (self.p - 2)
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, model: &CumulativeModel, s: Symbol) {
        let (low, high) = narrow(self.low, self.high, model, s);
        self.low = low;
        self.high = high;
        let (half, quarter) = (self.half(), self.quarter());
        loop {
            if self.high < half {
                self.emit(false);
            } else if self.low >= half {
                self.emit(true);
                self.low -= half;
                self.high -= half;
            } else if self.low >= quarter && self.high < half + quarter {
                self.pending += 1;
                self.low -= quarter;
                self.high -= quarter;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Emits the shortest code whose dyadic interval lies inside the final
    /// register interval `[low, high + 1)`.
    fn finish(mut self) -> BitString {
        let (lo, hi) = (self.low, self.high + 1);
        let start = if self.pending == 0 { 0 } else { 1 };
        for len in start..=self.p {
            let step = 1u64 << (self.p - len);
            let k = lo.div_ceil(step);
            if (k + 1) * step <= hi {
                for i in (0..len).rev() {
                    let bit = (k >> i) & 1 == 1;
                    if i + 1 == len {
                        self.emit(bit);
                    } else {
                        self.out.push(bit);
                    }
                }
                return self.out;
            }
        }
        unreachable!("register interval is at least a quarter wide")
    }
}

pub(crate) fn narrow(low: u64, high: u64, model: &CumulativeModel, s: Symbol) -> (u64, u64) {
    let range = (high - low + 1) as u128;
    let total = model.total() as u128;
    let new_high = low + (range * model.cum_hi(s) as u128 / total) as u64 - 1;
    let new_low = low + (range * model.cum_lo(s) as u128 / total) as u64;
    (new_low, new_high)
}

/// Streaming decoder. EOF-included mode stops at the first EOF; EOF-excluded
/// mode decodes exactly `length_hint` symbols.
pub fn ac_decode(
    model: &CumulativeModel,
    bits: &BitString,
    cfg: &CodecConfig,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    cfg.validate(model)?;
    let limit = match cfg.mode {
        Mode::EofExcluded => Some(
            length_hint.ok_or_else(|| Error::Config("EOF-excluded decoding needs a length".into()))?,
        ),
        Mode::EofIncluded => length_hint,
    };
    let p = cfg.precision_bits;
    let (half, quarter) = (1u64 << (p - 1), 1u64 << (p - 2));
    let mut input = bits.iter();
    let mut next = || input.next().unwrap_or(false);
    let mut value = 0u64;
    for _ in 0..p {
        value = (value << 1) | u64::from(next());
    }
    let (mut low, mut high) = (0u64, (1u64 << p) - 1);
    let mut shifts = 0usize;
    let mut word = Vec::new();
    let total = model.total() as u128;
    loop {
        if let Some(n) = limit {
            if word.len() == n {
                if cfg.mode == Mode::EofIncluded && word.last() != model.eof().as_ref() {
                    return Err(decode_err("no EOF within the length limit"));
                }
                return Ok(word);
            }
        }
        let range = (high - low + 1) as u128;
        let target = (((value - low + 1) as u128 * total - 1) / range) as u64;
        let s = model.symbol_at(target);
        word.push(s);
        (low, high) = narrow(low, high, model, s);
        if cfg.mode == Mode::EofIncluded && Some(s) == model.eof() {
            return Ok(word);
        }
        loop {
            if high < half {
            } else if low >= half {
                low -= half;
                high -= half;
                value -= half;
            } else if low >= quarter && high < half + quarter {
                low -= quarter;
                high -= quarter;
                value -= quarter;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | u64::from(next());
            shifts += 1;
        }
        if limit.is_none() && shifts > bits.len() + p as usize + 2 {
            return Err(decode_err("ran past the end of the code without an EOF"));
        }
    }
}

/// Exact reference encoder: the leftmost shortest bit string whose dyadic
/// interval lies inside the word interval.
pub fn ac_encode_exact(model: &CumulativeModel, word: &[Symbol]) -> Result<BitString> {
    let (lo, width, denom) = word_interval_scaled(model, word);
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let hi = &lo + &width;
    for n in 0usize.. {
        // k = ceil(lo * 2^n / denom); accept if (k + 1) * denom <= hi * 2^n
        let scaled_lo = &lo << n;
        let mut k = &scaled_lo / &denom;
        if &k * &denom != scaled_lo {
            k += 1u32;
        }
        if (&k + 1u32) * &denom <= &hi << n {
            return Ok((0..n).rev().map(|i| k.bit(i as u64)).collect());
        }
    }
    unreachable!()
}

/// Exact reference decoder by interval containment.
pub fn ac_decode_exact(
    model: &CumulativeModel,
    bits: &BitString,
    mode: Mode,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    let code = ac_interval(bits);
    decode_by_containment(model, &code, mode, length_hint, 4 * bits.len() + 64)
}

/// Repeatedly picks the unique symbol whose sub-interval contains `code`.
pub(crate) fn decode_by_containment(
    model: &CumulativeModel,
    code: &WordInterval,
    mode: Mode,
    length_hint: Option<usize>,
    max_symbols: usize,
) -> Result<Vec<Symbol>> {
    let mut word = Vec::new();
    loop {
        match (mode, length_hint) {
            (Mode::EofExcluded, Some(n)) | (Mode::EofIncluded, Some(n)) if word.len() == n => {
                return Ok(word)
            }
            (Mode::EofExcluded, None) => {
                return Err(Error::Config("EOF-excluded decoding needs a length".into()))
            }
            _ => {}
        }
        if word.len() > max_symbols {
            return Err(decode_err("no EOF found"));
        }
        let mut found = None;
        for s in 0..model.len() {
            word.push(s);
            let iv = word_interval(model, &word)?;
            word.pop();
            if iv.contains_interval(code) {
                found = Some(s);
                break;
            }
        }
        let s = found.ok_or_else(|| decode_err("code interval straddles symbol boundaries"))?;
        word.push(s);
        if mode == Mode::EofIncluded && Some(s) == model.eof() {
            return Ok(word);
        }
    }
}

/// AC followed by the 1→10 substitution.
pub fn sac_encode(model: &CumulativeModel, word: &[Symbol], cfg: &CodecConfig) -> Result<BitString> {
    Ok(ac_encode(model, word, cfg)?.substitute_ones())
}

pub fn sac_decode(
    model: &CumulativeModel,
    bits: &BitString,
    cfg: &CodecConfig,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    let raw = bits
        .unsubstitute_ones()
        .map_err(|e| decode_err(format!("malformed SAC input: {e}")))?;
    ac_decode(model, &raw, cfg, length_hint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::source::{parse_probability, presets, Alphabet};

    fn q(s: &str) -> BigRational {
        parse_probability(s).unwrap()
    }

    fn xyz() -> (CumulativeModel, CodecConfig) {
        let m = CumulativeModel::new(&presets::xyz());
        let cfg = CodecConfig::for_model(&m);
        (m, cfg)
    }

    #[test]
    fn dyadic_intervals() {
        let iv = ac_interval(&bits("1"));
        assert_eq!((iv.lo, iv.hi), (q("0.5"), q("1")));
        let iv = ac_interval(&bits("01"));
        assert_eq!((iv.lo, iv.hi), (q("0.25"), q("0.5")));
        let iv = ac_interval(&bits("011"));
        assert_eq!((iv.lo, iv.hi), (q("0.375"), q("0.5")));
    }

    #[test]
    fn worked_example() {
        let (m, cfg) = xyz();
        assert_eq!(ac_encode(&m, &[1, 2], &cfg).unwrap(), bits("011"));
        assert_eq!(ac_encode_exact(&m, &[1, 2]).unwrap(), bits("011"));
        assert_eq!(ac_decode(&m, &bits("011"), &cfg, None).unwrap(), vec![1, 2]);
        assert_eq!(sac_encode(&m, &[1, 2], &cfg).unwrap(), bits("01010"));
        assert_eq!(sac_decode(&m, &bits("01010"), &cfg, None).unwrap(), vec![1, 2]);
    }

    #[test]
    fn suffixes_do_not_change_the_decoded_word() {
        let (m, cfg) = xyz();
        for len in 0..=5 {
            for v in 0u32..(1 << len) {
                let suffix: BitString = (0..len).rev().map(|i| (v >> i) & 1 == 1).collect();
                let code = bits("011").concat(&suffix);
                assert_eq!(ac_decode(&m, &code, &cfg, None).unwrap(), vec![1, 2], "{code}");
                assert_eq!(
                    ac_decode_exact(&m, &code, Mode::EofIncluded, None).unwrap(),
                    vec![1, 2]
                );
            }
        }
    }

    #[test]
    fn xx_is_the_shortest_dyadic_inside() {
        // [0, 0.04): 2^-5 = 0.03125 fits at 00000, 2^-4 does not.
        let m = CumulativeModel::new(&presets::xyz());
        let cfg = CodecConfig::new(20, Mode::EofExcluded);
        assert_eq!(ac_encode(&m, &[0, 0], &cfg).unwrap(), bits("00000"));
    }

    #[test]
    fn degenerate_alphabet_encodes_to_nothing() {
        let a = Alphabet::from_pairs(&[("S", "1")], None).unwrap();
        let m = CumulativeModel::new(&a);
        let cfg = CodecConfig::new(20, Mode::EofExcluded);
        let code = ac_encode(&m, &[0, 0, 0], &cfg).unwrap();
        assert!(code.is_empty());
        assert_eq!(ac_decode(&m, &code, &cfg, Some(3)).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn errors() {
        let (m, cfg) = xyz();
        assert_eq!(ac_encode(&m, &[2, 1, 2], &cfg), Err(Error::InteriorEof(0)));
        assert_eq!(ac_encode(&m, &[1, 1], &cfg), Err(Error::MissingEof));
        assert_eq!(ac_encode(&m, &[], &cfg), Err(Error::EmptyWord));
        assert!(sac_decode(&m, &bits("0110"), &cfg, None).is_err());
        let excluded = CodecConfig::new(20, Mode::EofExcluded);
        assert!(ac_decode(&m, &bits("011"), &excluded, None).is_err());
        assert!(matches!(
            ac_encode(&m, &[1, 2], &CodecConfig::new(4, Mode::EofIncluded)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sac_of_eleven() {
        // "1010" un-substitutes to "11" = [0.75, 1), which lies in Z's interval.
        let (m, cfg) = xyz();
        let decoded = sac_decode(&m, &bits("1010"), &cfg, None).unwrap();
        assert_eq!(decoded, ac_decode_exact(&m, &bits("11"), Mode::EofIncluded, None).unwrap());
        assert_eq!(decoded, vec![2]);
    }
}
