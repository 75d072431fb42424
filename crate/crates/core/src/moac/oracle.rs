//! Exact golden-ratio code space: intervals of constrained codes and
//! brute-force shortest-code search. Used as a reference for the streaming
//! codec and for short words only.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::{BigInt, BigUint};

use super::golden::{Golden, IntervalQ};
use crate::ac::Mode;
use crate::bits::BitString;
use crate::error::{decode_err, Error, Result};
use crate::source::{word_interval_scaled, CumulativeModel, Symbol};

/// Exact interval `[Σ b_i φ^-i, Σ b_i φ^-i + φ^-(n + b_n))` of a constrained
/// bit string.
pub fn moac_interval_exact(bits: &BitString) -> Result<(Golden, Golden)> {
    bits.check_constrained()?;
    let mut lo = Golden::zero();
    for (i, b) in bits.iter().enumerate() {
        if b {
            lo = &lo + &Golden::inv_phi_pow(i + 1);
        }
    }
    let n = bits.len() + usize::from(bits.get(bits.len().wrapping_sub(1)) == Some(true));
    let hi = &lo + &Golden::inv_phi_pow(n);
    Ok((lo, hi))
}

/// Interval of a constrained bit string at `frac_bits` of fixed-point precision.
pub fn moac_interval(bits: &BitString, frac_bits: u32) -> Result<IntervalQ> {
    let (lo, hi) = moac_interval_exact(bits)?;
    Ok(IntervalQ::from_golden(&lo, &hi, frac_bits))
}

/// Word interval as integer numerators over a common denominator.
struct Target {
    lo: BigInt,
    hi: BigInt,
    den: BigInt,
}

impl Target {
    fn of(model: &CumulativeModel, word: &[Symbol]) -> Self {
        let (lo, width, den) = word_interval_scaled(model, word);
        Target {
            hi: BigInt::from(&lo + &width),
            lo: BigInt::from(lo),
            den: BigInt::from(den),
        }
    }

    fn contains(&self, lo: &Golden, hi: &Golden) -> bool {
        lo.cmp_ratio(&self.lo, &self.den) != Ordering::Less
            && hi.cmp_ratio(&self.hi, &self.den) != Ordering::Greater
    }

    fn intersects(&self, lo: &Golden, hi: &Golden) -> bool {
        lo.cmp_ratio(&self.hi, &self.den) == Ordering::Less
            && hi.cmp_ratio(&self.lo, &self.den) == Ordering::Greater
    }
}

/// A free node of the code space: the path so far ends in 0 (or is empty),
/// so both `0` and `10` may follow.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    cost: usize,
    lo: Golden,
    path: Vec<bool>,
}

impl Ord for Node {
    // BinaryHeap is a max-heap: invert so the cheapest, leftmost node pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.cmp(&self.cost).then_with(|| other.lo.cmp(&self.lo))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest (then leftmost) nonempty constrained code ending in 0 whose
/// interval lies inside the word interval, found by exact search.
pub fn moac_encode_exact(model: &CumulativeModel, word: &[Symbol]) -> Result<BitString> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    model.check_word(word)?;
    let target = Target::of(model, word);
    let mut heap = BinaryHeap::new();
    heap.push(Node { cost: 0, lo: Golden::zero(), path: Vec::new() });
    while let Some(node) = heap.pop() {
        let hi = &node.lo + &Golden::inv_phi_pow(node.cost);
        if node.cost > 0 && target.contains(&node.lo, &hi) {
            return Ok(BitString::from(node.path));
        }
        if !target.intersects(&node.lo, &hi) {
            continue;
        }
        let mut zero = node.path.clone();
        zero.push(false);
        heap.push(Node { cost: node.cost + 1, lo: node.lo.clone(), path: zero });
        let mut one_zero = node.path;
        one_zero.extend([true, false]);
        heap.push(Node {
            cost: node.cost + 2,
            lo: &node.lo + &Golden::inv_phi_pow(node.cost + 1),
            path: one_zero,
        });
    }
    unreachable!("the word interval has positive height")
}

/// Exact decoder: repeatedly takes the symbol whose sub-interval contains the
/// code's interval.
pub fn moac_decode_exact(
    model: &CumulativeModel,
    bits: &BitString,
    mode: Mode,
    length_hint: Option<usize>,
) -> Result<Vec<Symbol>> {
    let (lo, hi) = moac_interval_exact(bits)?;
    if mode == Mode::EofExcluded && length_hint.is_none() {
        return Err(Error::Config("EOF-excluded decoding needs a length".into()));
    }
    let max_symbols = 4 * bits.len() + 64;
    let mut word = Vec::new();
    loop {
        if Some(word.len()) == length_hint {
            return Ok(word);
        }
        if word.len() > max_symbols {
            return Err(decode_err("no EOF found"));
        }
        let mut found = None;
        for s in 0..model.len() {
            word.push(s);
            let t = Target::of(model, &word);
            word.pop();
            if t.contains(&lo, &hi) {
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

/// Cells of column `n` of the code space built by recursive splitting at
/// `frac_bits` of precision, as `(bits, interval)` pairs in left-to-right order.
pub fn column_cells(n: usize, frac_bits: u32) -> Vec<(BitString, IntervalQ)> {
    let one = BigUint::from(1u32) << frac_bits;
    let inv = super::golden::inv_phi_fixed_big(frac_bits);
    let split = |x: &BigUint, y: &BigUint| -> BigUint {
        let d = y - x;
        x + ((d * &inv + (BigUint::from(1u32) << (frac_bits - 1))) >> frac_bits)
    };
    // (path, lo, hi)
    let mut cells: Vec<(Vec<bool>, BigUint, BigUint)> = vec![(Vec::new(), BigUint::from(0u32), one)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for (path, lo, hi) in cells {
            if path.last() == Some(&true) {
                let mut p = path;
                p.push(false);
                next.push((p, lo, hi));
            } else {
                let s = split(&lo, &hi);
                let mut p0 = path.clone();
                p0.push(false);
                let mut p1 = path;
                p1.push(true);
                next.push((p0, lo, s.clone()));
                next.push((p1, s, hi));
            }
        }
        cells = next;
    }
    cells
        .into_iter()
        .map(|(p, lo, hi)| (BitString::from(p), IntervalQ { lo, hi, frac_bits }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::source::presets;

    #[test]
    fn example_interval() {
        let iv = moac_interval(&bits("01000"), 128).unwrap();
        assert!((iv.lo_f64() - 0.381966).abs() < 1e-6);
        assert!((iv.hi_f64() - 0.472136).abs() < 1e-6);
        let iv = moac_interval(&bits("0"), 128).unwrap();
        assert_eq!(iv.lo_f64(), 0.0);
        assert!((iv.hi_f64() - 0.618034).abs() < 1e-6);
        let iv = moac_interval(&bits("10"), 128).unwrap();
        assert!((iv.lo_f64() - 0.618034).abs() < 1e-6);
        assert!((iv.hi_f64() - 1.0).abs() < 1e-12);
        assert!(moac_interval(&bits("0110"), 64).is_err());
    }

    #[test]
    fn example_code() {
        let m = CumulativeModel::new(&presets::xyz());
        assert_eq!(moac_encode_exact(&m, &[1, 2]).unwrap(), bits("01000"));
        assert_eq!(
            moac_decode_exact(&m, &bits("01000"), Mode::EofIncluded, None).unwrap(),
            vec![1, 2]
        );
    }

    #[test]
    fn column_one() {
        let cells = column_cells(1, 64);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].0, bits("0"));
        assert!((cells[0].1.hi_f64() - 0.618034).abs() < 1e-6);
    }
}
