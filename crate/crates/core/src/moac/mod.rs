//! Arithmetic coding over the golden-ratio code space of bit strings without
//! consecutive ones.
//!
//! A free node of the code space (one reached after a 0, or the root) splits
//! into a `0` child holding the lower `1/φ` of its interval and a `10` child
//! holding the upper `1/φ²`. Every code is therefore a sequence of `0` and
//! `10` tokens and ends in 0.
//!
//! The streaming coder keeps `precision_bits`-wide registers. When the
//! interval straddles the split point of the current free node it defers the
//! choice between the two neighbouring three-bit nodes `010` and `100`
//! (equal heights φ^-3), and keeps deferring with `10` on the left and `00` on
//! the right (again equal heights) while the interval stays narrow. The
//! decoder recovers each symbol by walking the remaining bits through the same
//! fixed-point geometry; since rescaling by φ is not exact in fixed point the
//! walk can land on the wrong side of a symbol boundary, so encodings are
//! verified by decoding them.

pub mod combinatorics;
pub mod golden;
pub mod oracle;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub use golden::IntervalQ;
pub use oracle::{moac_decode_exact, moac_encode_exact, moac_interval, moac_interval_exact};

use crate::ac::{narrow, Mode};
use crate::bits::BitString;
use crate::error::{decode_err, Error, Result};
use crate::source::{CumulativeModel, Symbol};

pub const DEFAULT_PRECISION: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoacConfig {
    pub precision_bits: u32,
    /// Fractional bits of the fixed-point `1/φ` used for split points.
    pub phi_bits: u32,
    pub mode: Mode,
}

impl MoacConfig {
    pub fn new(precision_bits: u32, mode: Mode) -> Self {
        MoacConfig { precision_bits, phi_bits: precision_bits, mode }
    }

    pub fn for_model(model: &CumulativeModel) -> Self {
        let mode = if model.eof().is_some() { Mode::EofIncluded } else { Mode::EofExcluded };
        MoacConfig::new(DEFAULT_PRECISION, mode)
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self.phi_bits = self.phi_bits.max(bits);
        self
    }

    pub fn with_phi_bits(mut self, bits: u32) -> Self {
        self.phi_bits = bits;
        self
    }

    fn validate(&self, model: &CumulativeModel) -> Result<()> {
        if !(8..=56).contains(&self.precision_bits) {
            return Err(Error::Config(format!(
                "precision must be within 8..=56 bits, got {}",
                self.precision_bits
            )));
        }
        if self.phi_bits < self.precision_bits || self.phi_bits > 62 {
            return Err(Error::Config(format!(
                "phi precision must be within {}..=62 bits, got {}",
                self.precision_bits, self.phi_bits
            )));
        }
        // after renormalisation the register interval spans at least ~0.19 of
        // the frame, so every symbol keeps a nonempty share at 2^(P-3)
        if model.total() > 1u64 << (self.precision_bits - 3) {
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
}

/// Result of a streaming encode: the code and whether decoding it reproduced
/// the word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoacEncoding {
    pub bits: BitString,
    pub verified: bool,
}

/// Fixed split points of the register frame.
#[derive(Clone, Copy, Debug)]
struct Geometry {
    w: u64,
    mid: u64,
    inv: u64,
    phi_bits: u32,
    /// split of the free frame: `0` below, `10` above
    s: u64,
    /// `010` starts here
    s1: u64,
    /// `100` ends here
    s2: u64,
    /// left pending node's `10` child starts here
    l1: u64,
    /// right pending node's `00` grandchild ends here
    r2: u64,
}

impl Geometry {
    fn new(cfg: &MoacConfig) -> Self {
        let w = 1u64 << cfg.precision_bits;
        let mut g = Geometry {
            w,
            mid: w / 2,
            inv: golden::inv_phi_fixed(cfg.phi_bits),
            phi_bits: cfg.phi_bits,
            s: 0,
            s1: 0,
            s2: 0,
            l1: 0,
            r2: 0,
        };
        g.s = g.split(0, w);
        g.s1 = g.split(0, g.s);
        g.s2 = g.split(g.s, w);
        g.l1 = g.split(0, g.mid);
        let r1 = g.split(g.mid, w);
        g.r2 = g.split(g.mid, r1);
        g
    }

    /// Boundary between the `0` and `10` children of the node `[x, y)`.
    fn split(&self, x: u64, y: u64) -> u64 {
        let d = (y - x) as u128 * self.inv as u128;
        x + ((d + (1u128 << (self.phi_bits - 1))) >> self.phi_bits) as u64
    }
}

/// Maps `x ∈ [r0, r1]` linearly onto `[t0, t1]`, rounding down.
fn map(x: u64, r0: u64, r1: u64, t0: u64, t1: u64) -> u64 {
    t0 + ((x - r0) as u128 * (t1 - t0) as u128 / (r1 - r0) as u128) as u64
}

/// Register state shared by encoder and decoder.
#[derive(Clone, Debug)]
struct State {
    g: Geometry,
    low: u64,
    high: u64,
    /// number of deferred straddle expansions
    pending: usize,
}

/// What a renormalisation step emits.
enum Step {
    Zero,
    OneZero,
    Left(usize),
    Right(usize),
    Defer,
}

impl State {
    fn new(g: Geometry) -> Self {
        State { g, low: 0, high: g.w - 1, pending: 0 }
    }

    fn remap(&mut self, r0: u64, r1: u64) {
        let w = self.g.w;
        self.low = map(self.low, r0, r1, 0, w);
        self.high = map(self.high + 1, r0, r1, 0, w) - 1;
    }

    /// Piecewise map of `[a, m) ∪ [m, b)` onto `[0, W/2) ∪ [W/2, W)`.
    fn remap_split(&mut self, a: u64, m: u64, b: u64) {
        let (w, mid) = (self.g.w, self.g.mid);
        self.low = map(self.low, a, m, 0, mid);
        self.high = map(self.high + 1, m, b, mid, w) - 1;
    }

    /// Performs one renormalisation step if any applies.
    fn step(&mut self) -> Option<Step> {
        let g = self.g;
        if self.pending == 0 {
            if self.high < g.s {
                self.remap(0, g.s);
                Some(Step::Zero)
            } else if self.low >= g.s {
                self.remap(g.s, g.w);
                Some(Step::OneZero)
            } else if self.low >= g.s1 && self.high < g.s2 {
                self.remap_split(g.s1, g.s, g.s2);
                self.pending = 1;
                Some(Step::Defer)
            } else {
                None
            }
        } else if self.high < g.mid {
            let k = std::mem::take(&mut self.pending);
            self.remap(0, g.mid);
            Some(Step::Left(k))
        } else if self.low >= g.mid {
            let k = std::mem::take(&mut self.pending);
            self.remap(g.mid, g.w);
            Some(Step::Right(k))
        } else if self.low >= g.l1 && self.high < g.r2 {
            self.remap_split(g.l1, g.mid, g.r2);
            self.pending += 1;
            Some(Step::Defer)
        } else {
            None
        }
    }
}

/// Bits of the left deferred node after `k` expansions: `010` then `10`s.
fn left_path(k: usize, out: &mut Vec<bool>) {
    out.extend([false, true, false]);
    for _ in 1..k {
        out.extend([true, false]);
    }
}

/// Bits of the right deferred node after `k` expansions: `100` then `00`s.
fn right_path(k: usize, out: &mut Vec<bool>) {
    out.extend([true, false, false]);
    for _ in 1..k {
        out.extend([false, false]);
    }
}

fn step_bits(step: &Step) -> Vec<bool> {
    let mut v = Vec::new();
    match *step {
        Step::Zero => v.push(false),
        Step::OneZero => v.extend([true, false]),
        Step::Left(k) => left_path(k, &mut v),
        Step::Right(k) => right_path(k, &mut v),
        Step::Defer => {}
    }
    v
}

/// Streaming encoder; the returned code is checked by decoding it.
pub fn moac_encode(model: &CumulativeModel, word: &[Symbol], cfg: &MoacConfig) -> Result<MoacEncoding> {
    let bits = moac_encode_unverified(model, word, cfg)?;
    let hint = Some(word.len());
    let verified = matches!(moac_decode(model, &bits, cfg, hint), Ok(ref w) if w == word);
    Ok(MoacEncoding { bits, verified })
}

/// Streaming encoder without the decode check.
pub fn moac_encode_unverified(
    model: &CumulativeModel,
    word: &[Symbol],
    cfg: &MoacConfig,
) -> Result<BitString> {
    cfg.validate(model)?;
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    match cfg.mode {
        Mode::EofIncluded => model.check_eof_word(word)?,
        Mode::EofExcluded => model.check_word(word)?,
    }
    let mut st = State::new(Geometry::new(cfg));
    let mut out: Vec<bool> = Vec::new();
    for &s in word {
        (st.low, st.high) = narrow(st.low, st.high, model, s);
        while let Some(step) = st.step() {
            out.extend(step_bits(&step));
        }
    }
    flush(&st, &mut out);
    Ok(BitString::from(out))
}

/// Appends the cheapest (then leftmost) node inside the register interval.
fn flush(st: &State, out: &mut Vec<bool>) {
    let g = st.g;
    let (lo, hi) = (st.low, st.high + 1);
    // (cost, left end, right end, path)
    let mut heap = BinaryHeap::new();
    if st.pending == 0 {
        heap.push(Reverse((0usize, 0u64, g.w, Vec::new())));
    } else {
        let k = st.pending;
        let mut left = Vec::new();
        left_path(k, &mut left);
        let mut right = Vec::new();
        right_path(k, &mut right);
        heap.push(Reverse((2 * k + 1, 0, g.mid, left)));
        heap.push(Reverse((2 * k + 1, g.mid, g.w, right)));
    }
    while let Some(Reverse((cost, f0, f1, path))) = heap.pop() {
        let allowed = !(out.is_empty() && path.is_empty());
        if allowed && f0 >= lo && f1 <= hi {
            out.extend(path);
            return;
        }
        if f1 <= lo || f0 >= hi || f1 - f0 < 2 {
            continue;
        }
        let s = g.split(f0, f1);
        let mut p0 = path.clone();
        p0.push(false);
        heap.push(Reverse((cost + 1, f0, s, p0)));
        let mut p1 = path;
        p1.extend([true, false]);
        heap.push(Reverse((cost + 2, s, f1, p1)));
    }
    unreachable!("register interval always contains a node")
}

/// Streaming decoder mirroring [`moac_encode`]. EOF-included mode stops at the
/// EOF symbol; EOF-excluded mode decodes `length_hint` symbols.
pub fn moac_decode(
    model: &CumulativeModel,
    bits: &BitString,
    cfg: &MoacConfig,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    let mut word = Vec::new();
    decode_into(model, bits, cfg, length_hint, &mut word)?;
    Ok(word)
}

/// Like [`moac_decode`], but keeps the symbols recovered before a failure.
pub fn moac_decode_partial(
    model: &CumulativeModel,
    bits: &BitString,
    cfg: &MoacConfig,
    length_hint: Option<usize>,
) -> (Vec<Symbol>, Option<Error>) {
    let mut word = Vec::new();
    let err = decode_into(model, bits, cfg, length_hint, &mut word).err();
    (word, err)
}

fn decode_into(
    model: &CumulativeModel,
    bits: &BitString,
    cfg: &MoacConfig,
    length_hint: Option<usize>,
    word: &mut Vec<Symbol>,
) -> Result<()> {
    cfg.validate(model)?;
    if cfg.mode == Mode::EofExcluded && length_hint.is_none() {
        return Err(Error::Config("EOF-excluded decoding needs a length".into()));
    }
    let bits = bits.as_slice();
    let mut st = State::new(Geometry::new(cfg));
    let mut pos = 0usize;
    let total = model.total() as u128;
    loop {
        if Some(word.len()) == length_hint {
            return Ok(());
        }
        let x = locate(&st, &bits[pos..])?;
        if x < st.low || x > st.high {
            return Err(decode_err("code lies outside the current interval"));
        }
        let range = (st.high - st.low + 1) as u128;
        let target = (((x - st.low + 1) as u128 * total - 1) / range) as u64;
        let s = model.symbol_at(target);
        word.push(s);
        if cfg.mode == Mode::EofIncluded && Some(s) == model.eof() {
            return Ok(());
        }
        (st.low, st.high) = narrow(st.low, st.high, model, s);
        while let Some(step) = st.step() {
            let expect = step_bits(&step);
            let got = bits
                .get(pos..pos + expect.len())
                .ok_or_else(|| decode_err("code ended early"))?;
            if got != expect.as_slice() {
                return Err(decode_err(format!("unexpected bits at offset {pos}")));
            }
            pos += expect.len();
        }
    }
}

/// Position of the code inside the current frame, from the unread bits.
fn locate(st: &State, rest: &[bool]) -> Result<u64> {
    let g = st.g;
    if st.pending == 0 {
        return walk(&g, 0, g.w, rest);
    }
    let mut path = Vec::new();
    let (f0, f1) = if rest.first() == Some(&false) {
        left_path(st.pending, &mut path);
        (0, g.mid)
    } else {
        right_path(st.pending, &mut path);
        (g.mid, g.w)
    };
    // a truncated pending path still pins down its half
    let n = path.len().min(rest.len());
    if rest[..n] != path[..n] {
        return Err(decode_err("code does not resolve the deferred split"));
    }
    walk(&g, f0, f1, &rest[n..])
}

/// Follows `0`/`10` tokens from the free node `[f0, f1)` until the bits run out
/// or the node is a single register unit, and returns the node's midpoint.
fn walk(g: &Geometry, mut f0: u64, mut f1: u64, rest: &[bool]) -> Result<u64> {
    let mut i = 0;
    while f1 - f0 > 1 && i < rest.len() {
        let s = g.split(f0, f1);
        if rest[i] {
            if rest.get(i + 1) == Some(&true) {
                return Err(decode_err("consecutive ones in MoAC code"));
            }
            f0 = s;
            i += 2;
        } else {
            f1 = s;
            i += 1;
        }
    }
    Ok(f0 + (f1 - f0) / 2)
}
