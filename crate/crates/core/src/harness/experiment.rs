use std::fmt::Write as _;

use super::config::ExperimentConfig;
use super::scheme::{Codec, Scheme};
use super::stats::{normalize, scheme_stats, word_seed, NormalizedConfig, SchemeStats};
use crate::bits::BitString;
use crate::channel::{mix, simulate, ChannelParams, ChannelTrace};
use crate::detection::{calibrate, correct, detect_trace, Calibration, CalibrationSetup, DetectionParams, MinRule, Pilot};
use crate::error::{Error, Result};
use crate::source::{Alphabet, Symbol};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// Fraction of words not recovered exactly.
    pub wer: f64,
    /// Mean per-word symbol error rate.
    pub ser: f64,
    pub words_sent: usize,
}

/// Edit distance over symbols divided by the original length, capped at 1.
pub fn symbol_error_rate(decoded: &[Symbol], original: &[Symbol]) -> f64 {
    if original.is_empty() {
        return if decoded.is_empty() { 0.0 } else { 1.0 };
    }
    let d = strsim::generic_levenshtein(&decoded.to_vec(), &original.to_vec());
    (d as f64 / original.len() as f64).min(1.0)
}

/// Words sent back to back over one channel, with each word's share of the
/// received trace.
#[derive(Clone, Debug)]
pub struct Transmission {
    pub words: Vec<Vec<Symbol>>,
    pub codes: Vec<BitString>,
    pub traces: Vec<ChannelTrace>,
}

/// Random words of `word_len` symbols, one RNG substream per word index.
pub fn random_words(alphabet: &Alphabet, word_len: usize, count: usize, seed: u64) -> Vec<Vec<Symbol>> {
    (0..count).map(|i| alphabet.sample_word(word_len, word_seed(seed, i as u64))).collect()
}

/// Encodes `words`, transmits the concatenated codes in one channel run
/// (molecules of earlier words keep arriving later) and splits the trace at
/// the word boundaries.
pub fn transmit(codec: &Codec, words: Vec<Vec<Symbol>>, channel: &ChannelParams, seed: u64) -> Result<Transmission> {
    let codes = words.iter().map(|w| codec.encode(w)).collect::<Result<Vec<_>>>()?;
    let mut stream = BitString::with_capacity(codes.iter().map(BitString::len).sum());
    for c in &codes {
        stream.extend_from(c);
    }
    let trace = simulate(&stream, channel, seed)?;
    let mut traces = Vec::with_capacity(codes.len());
    let mut at = 0;
    for c in &codes {
        traces.push(trace.slice(at, at + c.len()));
        at += c.len();
    }
    Ok(Transmission { words, codes, traces })
}

/// Detection, optional correction and lenient decoding of one word's trace.
pub fn receive(codec: &Codec, trace: &ChannelTrace, det: &DetectionParams, rule: MinRule, word_len: usize) -> Vec<Symbol> {
    let mut bits = detect_trace(trace, det, rule);
    if codec.scheme().forbids_consecutive_ones() {
        bits = correct(&bits);
    }
    codec.decode_lenient(&bits, word_len)
}

/// Scores every word of a transmission.
pub fn score(codec: &Codec, tx: &Transmission, det: &DetectionParams, rule: MinRule) -> ErrorReport {
    let (mut wrong, mut ser) = (0usize, 0.0f64);
    for (word, trace) in tx.words.iter().zip(&tx.traces) {
        let got = receive(codec, trace, det, rule, word.len());
        if got != *word {
            wrong += 1;
        }
        ser += symbol_error_rate(&got, word);
    }
    let n = tx.words.len();
    let denom = n.max(1) as f64;
    ErrorReport { wer: wrong as f64 / denom, ser: ser / denom, words_sent: n }
}

/// Full pipeline over `word_count` random words.
pub fn evaluate(
    codec: &Codec,
    channel: &ChannelParams,
    det: &DetectionParams,
    rule: MinRule,
    word_len: usize,
    word_count: usize,
    seed: u64,
) -> Result<ErrorReport> {
    let words = random_words(codec.alphabet(), word_len, word_count, seed);
    let tx = transmit(codec, words, channel, mix(seed))?;
    Ok(score(codec, &tx, det, rule))
}

/// Spacing candidates `2..=⌈2·bits per symbol⌉`.
pub fn default_spacings(bits_per_symbol: f64) -> Vec<usize> {
    let hi = (2.0 * bits_per_symbol).ceil().max(2.0) as usize;
    (2..=hi).collect()
}

/// Calibration choices that depend on the scheme. ISI-mitigating blocks
/// always hold a 1, so no `min` gate is derived for them.
pub fn calibration_setup(scheme: Scheme, spacings: Vec<usize>, rule: MinRule) -> CalibrationSetup {
    CalibrationSetup {
        spacings,
        rule,
        correction: scheme.forbids_consecutive_ones(),
        use_min: scheme != Scheme::IsiMitigating,
    }
}

/// Sends `pilot_count` known words and tunes `a`, `spacing` and `min` to the
/// least pilot symbol error rate. Without explicit spacings the default range
/// follows the pilots' mean bits per symbol.
pub fn calibrate_codec(
    codec: &Codec,
    channel: &ChannelParams,
    word_len: usize,
    pilot_count: usize,
    spacings: Option<Vec<usize>>,
    rule: MinRule,
    seed: u64,
) -> Result<Calibration> {
    if pilot_count == 0 {
        return Err(Error::Calibration("need at least one pilot word".into()));
    }
    let words = random_words(codec.alphabet(), word_len, pilot_count, seed);
    let tx = transmit(codec, words, channel, mix(seed))?;
    let symbols: usize = tx.words.iter().map(Vec::len).sum();
    let bits: usize = tx.codes.iter().map(BitString::len).sum();
    let spacings = spacings.unwrap_or_else(|| default_spacings(bits as f64 / symbols as f64));
    let setup = calibration_setup(codec.scheme(), spacings, rule);
    let pilots: Vec<Pilot> =
        tx.codes.iter().zip(&tx.traces).map(|(b, t)| Pilot { bits: b.clone(), trace: t.clone() }).collect();
    calibrate(&pilots, &setup, |i, detected| {
        let word = &tx.words[i];
        symbol_error_rate(&codec.decode_lenient(detected, word.len()), word)
    })
}

/// One (scheme, molecule count) point of an error-rate sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub scheme: Scheme,
    /// Baseline molecule count of the grid.
    pub molecules: u32,
    pub normalized: NormalizedConfig,
    pub calibration: Calibration,
    pub report: ErrorReport,
}

/// Statistics of `codec` and of the uncoded baseline on the same alphabet.
pub fn stats_pair(codec: &Codec, cfg: &ExperimentConfig) -> Result<(SchemeStats, SchemeStats)> {
    let baseline = Codec::with_precision(Scheme::Uncoded, codec.alphabet(), cfg.precision)?;
    let base = scheme_stats(&baseline, cfg.word_len, cfg.samples, cfg.seed)?;
    Ok((base, scheme_stats(codec, cfg.word_len, cfg.samples, cfg.seed)?))
}

/// Channel of the config with interval and molecule count normalised
/// against uncoded transmission at `molecules`.
pub fn normalized_channel(
    base: &SchemeStats,
    stats: &SchemeStats,
    cfg: &ExperimentConfig,
    molecules: u32,
) -> Result<(NormalizedConfig, ChannelParams)> {
    let base_cfg = NormalizedConfig { signal_interval: cfg.channel.ts.round() as u32, molecules_per_one: molecules };
    let n = normalize(base, &base_cfg, stats)?.config;
    let channel =
        ChannelParams { ts: n.signal_interval as f64, molecules_per_one: n.molecules_per_one, ..cfg.channel.clone() };
    Ok((n, channel))
}

/// Seed of the grid point at baseline molecule count `molecules`; the
/// calibration stream uses `point ^ 1` and the test words `point ^ 2`.
pub fn point_seed(seed: u64, molecules: u32) -> u64 {
    mix(seed ^ molecules as u64)
}

/// Calibrates and evaluates each scheme at each molecule count of the grid,
/// with intervals and molecule counts normalised against uncoded
/// transmission. Pilot words, test words and channel streams are shared by
/// all schemes.
pub fn run_grid(alphabet: &Alphabet, schemes: &[Scheme], cfg: &ExperimentConfig) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let codec = Codec::with_precision(scheme, alphabet, cfg.precision)?;
        let (base, stats) = stats_pair(&codec, cfg)?;
        for &molecules in &cfg.grid {
            let (normalized, channel) = normalized_channel(&base, &stats, cfg, molecules)?;
            let point = point_seed(cfg.seed, molecules);
            let calibration = calibrate_codec(&codec, &channel, cfg.word_len, cfg.pilots, None, cfg.rule, point ^ 1)?;
            let report =
                evaluate(&codec, &channel, &calibration.params, cfg.rule, cfg.word_len, cfg.words, point ^ 2)?;
            rows.push(GridRow { scheme, molecules, normalized, calibration, report });
        }
    }
    Ok(rows)
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("scheme,molecules,signal_interval,molecules_per_one,a,spacing,min,pilot_ser,wer,ser,words\n");
    for r in rows {
        let p = &r.calibration.params;
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3},{},{},{:.6},{:.6},{:.6},{}",
            r.scheme,
            r.molecules,
            r.normalized.signal_interval,
            r.normalized.molecules_per_one,
            p.a,
            p.spacing,
            p.min,
            r.calibration.ser,
            r.report.wer,
            r.report.ser,
            r.report.words_sent
        );
    }
    out
}
