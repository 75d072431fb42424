//! Independent reference models shared by the integration tests.
#![allow(dead_code)]

use molcode_core::bits::BitString;
use molcode_core::prefix::Codebook;
use molcode_core::Alphabet;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

pub const FRAC: u32 = 256;

/// `floor(2^FRAC / φ)` from `(√5 − 1)/2`.
pub fn inv_phi() -> BigUint {
    let sqrt5 = (BigUint::from(5u32) << (2 * FRAC)).sqrt();
    (sqrt5 - (BigUint::one() << FRAC)) >> 1
}

pub fn pow_fixed(base: &BigUint, n: usize) -> BigUint {
    let mut acc = BigUint::one() << FRAC;
    for _ in 0..n {
        acc = (acc * base) >> FRAC;
    }
    acc
}

/// All length-`n` strings without `11`.
pub fn constrained(n: usize) -> Vec<BitString> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in out {
            let mut z = s.clone();
            z.push(false);
            next.push(z);
            if s.last() != Some(&true) {
                let mut o = s;
                o.push(true);
                next.push(o);
            }
        }
        out = next;
    }
    out.into_iter().map(BitString::from).collect()
}

pub fn alphabet(freqs: &[u64]) -> Alphabet {
    let total: u64 = freqs.iter().sum();
    let names = (0..freqs.len()).map(|i| format!("s{i}")).collect();
    let probs = freqs.iter().map(|&f| BigRational::new(BigInt::from(f), BigInt::from(total))).collect();
    Alphabet::new(names, probs, None).unwrap()
}

/// Constrained strings ending in 0, up to `max_len` bits.
pub fn candidates(max_len: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::<bool>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for b in [false, true] {
                if b && s.last() == Some(&true) {
                    continue;
                }
                let mut t = s.clone();
                t.push(b);
                next.push(t);
            }
        }
        out.extend(next.iter().filter(|s| s.last() == Some(&false)).cloned());
        layer = next;
    }
    out
}

pub fn is_prefix(a: &[bool], b: &[bool]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimal `(Σ f·len, Σ f·ones)` over every prefix-free set of `n` codewords
/// and every assignment of them to the symbols.
pub fn exhaustive(freqs: &[u64], max_len: usize) -> (u64, u64) {
    let cands = candidates(max_len);
    let perms = permutations(freqs.len());
    let mut best = (u64::MAX, u64::MAX);
    let mut chosen: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        cands: &[Vec<bool>],
        chosen: &mut Vec<usize>,
        freqs: &[u64],
        perms: &[Vec<usize>],
        best: &mut (u64, u64),
    ) {
        if chosen.len() == freqs.len() {
            for p in perms {
                let mut cost = (0, 0);
                for (s, &c) in p.iter().enumerate() {
                    let code = &cands[chosen[c]];
                    cost.0 += freqs[s] * code.len() as u64;
                    cost.1 += freqs[s] * code.iter().filter(|&&b| b).count() as u64;
                }
                *best = (*best).min(cost);
            }
            return;
        }
        for i in start..cands.len() {
            if chosen.iter().any(|&j| is_prefix(&cands[j], &cands[i]) || is_prefix(&cands[i], &cands[j])) {
                continue;
            }
            chosen.push(i);
            walk(i + 1, cands, chosen, freqs, perms, best);
            chosen.pop();
        }
    }
    walk(0, &cands, &mut chosen, freqs, &perms, &mut best);
    best
}


/// `(Σ f·len, Σ f·ones)` of a book in integer frequency units.
pub fn integer_cost(book: &Codebook, freqs: &[u64]) -> (u64, u64) {
    book.codes().iter().zip(freqs).fold((0, 0), |(l, o), (c, &f)| (l + f * c.len() as u64, o + f * c.ones() as u64))
}
