//! Finite memoryless sources and the word-to-interval map used by the
//! arithmetic codecs.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Index of a symbol within its alphabet.
pub type Symbol = usize;

const SUM_TOLERANCE: f64 = 1e-12;

/// An ordered source alphabet with exact probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    probs: Vec<BigRational>,
    eof: Option<Symbol>,
}

impl Alphabet {
    /// Builds an alphabet. Probabilities must be positive and sum to one within
    /// 1e-12; a near miss is renormalised exactly.
    pub fn new(symbols: Vec<String>, probs: Vec<BigRational>, eof: Option<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Alphabet("no symbols".into()));
        }
        if symbols.len() != probs.len() {
            return Err(Error::Alphabet(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                probs.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Alphabet(format!("bad symbol name {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Alphabet(format!("duplicate symbol {s}")));
            }
        }
        if let Some(e) = eof {
            if e >= symbols.len() {
                return Err(Error::SymbolOutOfRange(e));
            }
        }
        if let Some(p) = probs.iter().find(|p| !p.is_positive()) {
            return Err(Error::Alphabet(format!("non-positive probability {p}")));
        }
        let sum: BigRational = probs.iter().sum();
        let probs = if sum.is_one() {
            probs
        } else {
            let dev = (&sum - BigRational::one()).abs();
            if dev.to_f64().unwrap_or(f64::INFINITY) > SUM_TOLERANCE {
                return Err(Error::ProbabilitySum(format!("{}", sum.to_f64().unwrap_or(f64::NAN))));
            }
            probs.into_iter().map(|p| p / &sum).collect()
        };
        Ok(Alphabet { symbols, probs, eof })
    }

    /// Convenience constructor from `(name, probability)` string pairs.
    pub fn from_pairs(pairs: &[(&str, &str)], eof: Option<Symbol>) -> Result<Self> {
        let mut symbols = Vec::with_capacity(pairs.len());
        let mut probs = Vec::with_capacity(pairs.len());
        for (s, p) in pairs {
            symbols.push(s.to_string());
            probs.push(parse_probability(p)?);
        }
        Alphabet::new(symbols, probs, eof)
    }

    /// Parses the `symbol = probability [eof]` text format. Blank lines and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut probs = Vec::new();
        let mut eof = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: ln + 1, msg };
            let (name, rest) = line
                .split_once('=')
                .ok_or_else(|| perr("expected `symbol = probability`".into()))?;
            let name = name.trim();
            let mut fields = rest.split_whitespace();
            let p = fields
                .next()
                .ok_or_else(|| perr("missing probability".into()))?;
            match fields.next() {
                None => {}
                Some(f) if f.eq_ignore_ascii_case("eof") => {
                    if eof.is_some() {
                        return Err(perr("more than one eof symbol".into()));
                    }
                    eof = Some(symbols.len());
                }
                Some(f) => return Err(perr(format!("unexpected field {f:?}"))),
            }
            if let Some(f) = fields.next() {
                return Err(perr(format!("unexpected field {f:?}")));
            }
            symbols.push(name.to_string());
            probs.push(parse_probability(p).map_err(|e| perr(e.to_string()))?);
        }
        Alphabet::new(symbols, probs, eof)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.symbols[s]
    }

    pub fn prob(&self, s: Symbol) -> &BigRational {
        &self.probs[s]
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn eof(&self) -> Option<Symbol> {
        self.eof
    }

    pub fn index_of(&self, name: &str) -> Option<Symbol> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Splits text into symbols. Whitespace-separated tokens are looked up
    /// directly; otherwise the longest matching symbol name is taken greedily.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        let text = text.trim();
        if text.split_whitespace().nth(1).is_some() {
            return text
                .split_whitespace()
                .map(|t| self.index_of(t).ok_or_else(|| Error::UnknownSymbol(t.into())))
                .collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = (0..self.len())
                .filter(|&i| rest.starts_with(self.symbols[i].as_str()))
                .max_by_key(|&i| self.symbols[i].len())
                .ok_or_else(|| {
                    Error::UnknownSymbol(rest.chars().next().map(String::from).unwrap_or_default())
                })?;
            out.push(best);
            rest = &rest[self.symbols[best].len()..];
        }
        Ok(out)
    }

    /// Renders a word; single-character alphabets are written without separators.
    pub fn format_word(&self, word: &[Symbol]) -> String {
        let compact = word.iter().all(|&s| self.symbols[s].chars().count() == 1);
        let names: Vec<&str> = word.iter().map(|&s| self.symbols[s].as_str()).collect();
        names.join(if compact { "" } else { " " })
    }

    /// Checks symbol ranges and, for alphabets with an EOF symbol, that the EOF
    /// appears exactly once at the end.
    pub fn validate_word(&self, word: &[Symbol]) -> Result<()> {
        if let Some(&bad) = word.iter().find(|&&s| s >= self.len()) {
            return Err(Error::SymbolOutOfRange(bad));
        }
        if let Some(e) = self.eof {
            match word.iter().position(|&s| s == e) {
                None => return Err(Error::MissingEof),
                Some(p) if p + 1 != word.len() => return Err(Error::InteriorEof(p)),
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Draws a word of `len` symbols. With an EOF symbol the word holds `len`
    /// non-EOF symbols (drawn from the conditional distribution) followed by EOF.
    pub fn sample_word(&self, len: usize, seed: u64) -> Vec<Symbol> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        self.sample_word_with(len, &mut rng)
    }

    pub fn sample_word_with<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<Symbol> {
        let model = CumulativeModel::new(self);
        let mut word = Vec::with_capacity(len + 1);
        let limit = match self.eof {
            Some(e) => model.total - model.freq(e),
            None => model.total,
        };
        for _ in 0..len {
            let mut r = rng.random_range(0..limit);
            if let Some(e) = self.eof {
                if r >= model.cum[e] {
                    r += model.freq(e);
                }
            }
            word.push(model.symbol_at(r));
        }
        if let Some(e) = self.eof {
            word.push(e);
        }
        word
    }

    /// Serialises in the same format accepted by [`Alphabet::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.symbols.iter().enumerate() {
            let p = &self.probs[i];
            out.push_str(&format!("{s} = {}", format_probability(p)));
            if self.eof == Some(i) {
                out.push_str(" eof");
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses a probability written as a decimal (`0.25`, `.5`, `1e-2`) or a
/// fraction (`1/3`) into an exact rational.
pub fn parse_probability(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Alphabet(format!("invalid probability {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10u32);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Writes a rational as a terminating decimal when possible, else as `p/q`.
pub fn format_probability(p: &BigRational) -> String {
    let mut d = p.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut places = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", p.numer(), p.denom());
    }
    places += twos.max(fives);
    let scaled = p * BigRational::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer().to_string();
    if places == 0 {
        return digits;
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (i, f) = padded.split_at(padded.len() - places);
    format!("{i}.{f}")
}

/// Integer cumulative frequencies over the common denominator of the
/// alphabet's probabilities: `c(i) = cum[i] / total`, `d(i) = cum[i+1] / total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulativeModel {
    cum: Vec<u64>,
    total: u64,
    eof: Option<Symbol>,
}

impl CumulativeModel {
    /// Panics only if the common denominator overflows 64 bits; use
    /// [`build_cumulative`] for a fallible version.
    pub fn new(alphabet: &Alphabet) -> Self {
        build_cumulative(alphabet).expect("alphabet denominators fit in 64 bits")
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn eof(&self) -> Option<Symbol> {
        self.eof
    }

    pub fn freq(&self, s: Symbol) -> u64 {
        self.cum[s + 1] - self.cum[s]
    }

    /// Lower cumulative frequency of `s`.
    pub fn cum_lo(&self, s: Symbol) -> u64 {
        self.cum[s]
    }

    pub fn cum_hi(&self, s: Symbol) -> u64 {
        self.cum[s + 1]
    }

    pub fn c(&self, s: Symbol) -> BigRational {
        ratio(self.cum[s], self.total)
    }

    pub fn d(&self, s: Symbol) -> BigRational {
        ratio(self.cum[s + 1], self.total)
    }

    pub fn prob_f64(&self, s: Symbol) -> f64 {
        self.freq(s) as f64 / self.total as f64
    }

    /// Symbol whose cumulative range contains `r`, for `r < total`.
    pub fn symbol_at(&self, r: u64) -> Symbol {
        self.cum.partition_point(|&c| c <= r) - 1
    }

    pub fn check_word(&self, word: &[Symbol]) -> Result<()> {
        if let Some(&bad) = word.iter().find(|&&s| s >= self.len()) {
            return Err(Error::SymbolOutOfRange(bad));
        }
        Ok(())
    }

    /// EOF-included words end with the EOF symbol and contain no other EOF.
    pub fn check_eof_word(&self, word: &[Symbol]) -> Result<()> {
        self.check_word(word)?;
        let e = self.eof.ok_or_else(|| Error::Config("alphabet has no EOF symbol".into()))?;
        match word.iter().position(|&s| s == e) {
            None => Err(Error::MissingEof),
            Some(p) if p + 1 != word.len() => Err(Error::InteriorEof(p)),
            Some(_) => Ok(()),
        }
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the cumulative model of an alphabet.
pub fn build_cumulative(alphabet: &Alphabet) -> Result<CumulativeModel> {
    let mut lcd = BigInt::one();
    for p in alphabet.probs() {
        lcd = lcd.lcm(p.denom());
    }
    let mut cum = Vec::with_capacity(alphabet.len() + 1);
    let mut acc = BigInt::zero();
    cum.push(0u64);
    for p in alphabet.probs() {
        acc += p.numer() * (&lcd / p.denom());
        cum.push(acc.to_u64().ok_or_else(|| {
            Error::Alphabet("probability denominators exceed 64 bits".into())
        })?);
    }
    if acc != lcd {
        return Err(Error::ProbabilitySum(format!("{}", ratio_f64(&acc, &lcd))));
    }
    Ok(CumulativeModel {
        total: *cum.last().expect("nonempty"),
        cum,
        eof: alphabet.eof(),
    })
}

fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    BigRational::new(n.clone(), d.clone()).to_f64().unwrap_or(f64::NAN)
}

/// An exact half-open subinterval `[lo, hi)` of `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl WordInterval {
    pub fn unit() -> Self {
        WordInterval { lo: BigRational::zero(), hi: BigRational::one() }
    }

    pub fn height(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_interval(&self, other: &WordInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x < &self.hi
    }
}

/// Interval `[a_n, b_n)` of a word, computed exactly with integer arithmetic
/// over `total^n` and reduced at the end.
pub fn word_interval(model: &CumulativeModel, word: &[Symbol]) -> Result<WordInterval> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    model.check_word(word)?;
    let (lo, width, denom) = word_interval_scaled(model, word);
    let denom = BigInt::from(denom);
    Ok(WordInterval {
        lo: BigRational::new(BigInt::from(lo.clone()), denom.clone()),
        hi: BigRational::new(BigInt::from(lo + width), denom),
    })
}

/// Numerators of the word interval over the unreduced denominator `total^n`:
/// returns `(lo, width, total^n)`.
pub fn word_interval_scaled(model: &CumulativeModel, word: &[Symbol]) -> (BigUint, BigUint, BigUint) {
    let total = BigUint::from(model.total);
    let mut lo = BigUint::zero();
    let mut width = BigUint::one();
    let mut denom = BigUint::one();
    for &s in word {
        lo = lo * &total + &width * model.cum_lo(s);
        width *= model.freq(s);
        denom *= &total;
    }
    (lo, width, denom)
}

/// Named alphabets used throughout the experiments.
pub mod presets {
    use super::*;

    fn build(pairs: &[(&str, &str)], eof: Option<Symbol>) -> Alphabet {
        Alphabet::from_pairs(pairs, eof).expect("preset alphabet is valid")
    }

    /// Skewed four-nucleotide alphabet without an EOF symbol.
    pub fn alphabet1() -> Alphabet {
        build(&[("A", "0.50"), ("T", "0.25"), ("C", "0.23"), ("G", "0.02")], None)
    }

    /// Near-uniform four-nucleotide alphabet with an EOF symbol.
    pub fn alphabet2() -> Alphabet {
        build(
            &[("A", "0.25"), ("T", "0.24"), ("C", "0.23"), ("G", "0.23"), ("EOF", "0.05")],
            Some(4),
        )
    }

    /// Three-letter example alphabet, `Z` doubling as EOF.
    pub fn xyz() -> Alphabet {
        build(&[("X", "0.2"), ("Y", "0.3"), ("Z", "0.5")], Some(2))
    }

    /// Near-uniform alphabet with a rare EOF, used for long-word ratio curves.
    pub fn ratio() -> Alphabet {
        build(&[("A", "0.33"), ("B", "0.33"), ("C", "0.33"), ("EOF", "0.01")], Some(3))
    }

    pub fn by_name(name: &str) -> Option<Alphabet> {
        match name.to_ascii_lowercase().as_str() {
            "alphabet1" | "a1" => Some(alphabet1()),
            "alphabet2" | "a2" => Some(alphabet2()),
            "xyz" => Some(xyz()),
            "ratio" => Some(ratio()),
            _ => None,
        }
    }
}
