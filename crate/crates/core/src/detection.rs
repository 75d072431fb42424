//! Adaptive-threshold detection of bits from absorbed-molecule counts, the
//! ISI error-correction sweep, and pilot-based calibration of the detector.

use crate::bits::BitString;
use crate::channel::ChannelTrace;
use crate::error::{Error, Result};

/// Step of the scaling-coefficient sweep.
pub const A_STEP: f64 = 0.004;

/// Scale applied to the smallest pilot count of a 1-bit to obtain `min`.
pub const MIN_SCALE: f64 = 5.0 / 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionParams {
    /// Scaling coefficient between the chunk minimum and maximum.
    pub a: f64,
    /// Chunk size in intervals.
    pub spacing: usize,
    /// Counts below this are always read as 0.
    pub min: u32,
}

impl DetectionParams {
    pub fn new(a: f64, spacing: usize, min: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || spacing == 0 {
            return Err(Error::Config(format!("need 0 <= a <= 1 and spacing >= 1, got a = {a}, spacing = {spacing}")));
        }
        Ok(DetectionParams { a, spacing, min })
    }
}

/// Which counts of a chunk define its lower reference level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MinRule {
    /// Smallest nonzero count; an all-zero chunk has none, which reads every
    /// interval as 0.
    #[default]
    NonzeroMin,
    /// Smallest count excluding the chunk's first interval.
    ExcludeFirst,
}

/// Chunk boundaries: chunks of `spacing` intervals, the last one also taking
/// the remainder.
pub fn chunks(n: usize, spacing: usize) -> Vec<(usize, usize)> {
    let full = n / spacing.max(1);
    if full <= 1 {
        return if n == 0 { Vec::new() } else { vec![(0, n)] };
    }
    let mut out: Vec<(usize, usize)> = (0..full - 1).map(|i| (i * spacing, (i + 1) * spacing)).collect();
    out.push(((full - 1) * spacing, n));
    out
}

/// Threshold of one chunk, `a·r_min + (1 − a)·r_max`; `None` stands for an
/// infinite threshold.
pub fn threshold(chunk: &[u32], a: f64, rule: MinRule) -> Option<f64> {
    let r_max = *chunk.iter().max()? as f64;
    let r_min = match rule {
        MinRule::NonzeroMin => chunk.iter().copied().filter(|&c| c > 0).min()? as f64,
        MinRule::ExcludeFirst => *chunk.get(1..)?.iter().min()? as f64,
    };
    Some(r_max - a * (r_max - r_min))
}

/// Ties with the threshold read as 1; the slack absorbs rounding in `τ`.
fn reaches(c: u32, tau: f64) -> bool {
    c as f64 >= tau - 1e-9 * tau.abs().max(1.0)
}

/// Reads one bit per interval of `counts`.
pub fn detect(counts: &[u32], params: &DetectionParams, rule: MinRule) -> BitString {
    let mut out = BitString::with_capacity(counts.len());
    for (lo, hi) in chunks(counts.len(), params.spacing) {
        let chunk = &counts[lo..hi];
        let tau = threshold(chunk, params.a, rule);
        for &c in chunk {
            let one = tau.is_some_and(|t| reaches(c, t)) && c >= params.min;
            out.push(one);
        }
    }
    out
}

pub fn detect_trace(trace: &ChannelTrace, params: &DetectionParams, rule: MinRule) -> BitString {
    detect(&trace.counts, params, rule)
}

/// Left-to-right sweep that clears the bit after every 1.
pub fn correct(bits: &BitString) -> BitString {
    let mut v = bits.as_slice().to_vec();
    for j in 1..v.len() {
        if v[j - 1] {
            v[j] = false;
        }
    }
    BitString::from(v)
}

/// A pilot transmission known to the receiver.
#[derive(Clone, Debug)]
pub struct Pilot {
    pub bits: BitString,
    pub trace: ChannelTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub params: DetectionParams,
    /// Mean pilot symbol error rate at the chosen parameters.
    pub ser: f64,
}

/// Options of the calibration sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSetup {
    pub spacings: Vec<usize>,
    pub rule: MinRule,
    pub correction: bool,
    /// Derive `min` from the pilots; otherwise `min` is 0.
    pub use_min: bool,
}

/// `⌊(5/6) · smallest count of an interval that carried a 1⌋`.
pub fn pilot_min(pilots: &[Pilot]) -> Result<u32> {
    let smallest = pilots
        .iter()
        .flat_map(|p| p.bits.iter().zip(&p.trace.counts).filter(|(b, _)| *b).map(|(_, &c)| c))
        .min()
        .ok_or_else(|| Error::Calibration("no 1-bit in the pilot signals".into()))?;
    Ok((MIN_SCALE * smallest as f64).floor() as u32)
}

/// Sweeps `a` over `{0, 0.004, …, 1}` and the configured spacings, scoring
/// each pair by the mean of `ser(pilot index, detected bits)`. Ties go to the
/// smallest `a`, then the smallest spacing.
pub fn calibrate<F>(pilots: &[Pilot], setup: &CalibrationSetup, mut ser: F) -> Result<Calibration>
where
    F: FnMut(usize, &BitString) -> f64,
{
    if pilots.is_empty() {
        return Err(Error::Calibration("no pilot signals".into()));
    }
    if setup.spacings.is_empty() || setup.spacings.contains(&0) {
        return Err(Error::Calibration("spacing candidates must be positive".into()));
    }
    let min = if setup.use_min { pilot_min(pilots)? } else { 0 };
    let steps = (1.0 / A_STEP).round() as usize;
    let mut spacings = setup.spacings.clone();
    spacings.sort_unstable();
    spacings.dedup();
    let mut best: Option<(f64, usize, usize)> = None;
    for &spacing in &spacings {
        // detections only change at a few values of a; reuse scores
        let mut last: Vec<Option<(BitString, f64)>> = vec![None; pilots.len()];
        for k in 0..=steps {
            let params = DetectionParams { a: k as f64 * A_STEP, spacing, min };
            let mut total = 0.0;
            for (i, p) in pilots.iter().enumerate() {
                let mut bits = detect_trace(&p.trace, &params, setup.rule);
                if setup.correction {
                    bits = correct(&bits);
                }
                let score = match &last[i] {
                    Some((prev, s)) if *prev == bits => *s,
                    _ => {
                        let s = ser(i, &bits);
                        last[i] = Some((bits, s));
                        s
                    }
                };
                total += score;
            }
            let mean = total / pilots.len() as f64;
            let better = match best {
                None => true,
                Some((s, bk, bsp)) => mean < s || (mean == s && (k, spacing) < (bk, bsp)),
            };
            if better {
                best = Some((mean, k, spacing));
            }
        }
    }
    let (ser, k, spacing) = best.expect("at least one candidate");
    Ok(Calibration { params: DetectionParams { a: k as f64 * A_STEP, spacing, min }, ser })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    fn p(a: f64, spacing: usize, min: u32) -> DetectionParams {
        DetectionParams::new(a, spacing, min).unwrap()
    }

    #[test]
    fn hand_traces() {
        assert_eq!(detect(&[0, 0, 0, 0], &p(0.3, 4, 1), MinRule::NonzeroMin), bits("0000"));
        assert_eq!(detect(&[10, 2, 0, 9], &p(0.5, 4, 1), MinRule::NonzeroMin), bits("1001"));
        assert_eq!(detect(&[10, 2, 0, 9], &p(0.5, 4, 11), MinRule::NonzeroMin), bits("0000"));
        // r_min = r_max: the single level fires
        assert_eq!(detect(&[0, 7, 0, 7], &p(0.2, 4, 1), MinRule::NonzeroMin), bits("0101"));
    }

    #[test]
    fn chunking() {
        assert_eq!(chunks(10, 4), vec![(0, 4), (4, 10)]);
        assert_eq!(chunks(8, 4), vec![(0, 4), (4, 8)]);
        assert_eq!(chunks(3, 4), vec![(0, 3)]);
        assert_eq!(chunks(7, 4), vec![(0, 7)]);
        assert!(chunks(0, 4).is_empty());
    }

    #[test]
    fn exclude_first_rule() {
        assert_eq!(threshold(&[1, 8, 4], 0.5, MinRule::ExcludeFirst), Some(6.0));
        assert_eq!(threshold(&[1, 8, 4], 0.5, MinRule::NonzeroMin), Some(4.5));
    }

    #[test]
    fn correction_sweep() {
        assert_eq!(correct(&bits("1101")), bits("1001"));
        assert_eq!(correct(&bits("0000")), bits("0000"));
        assert_eq!(correct(&bits("1111")), bits("1010"));
        assert_eq!(correct(&BitString::new()), BitString::new());
    }

    #[test]
    fn separable_pilots_calibrate_to_zero_error() {
        let pilot = Pilot {
            bits: bits("1001010"),
            trace: ChannelTrace { counts: vec![40, 9, 3, 35, 8, 30, 7] },
        };
        let setup = CalibrationSetup { spacings: vec![2, 3, 7], rule: MinRule::NonzeroMin, correction: false, use_min: true };
        let want = pilot.bits.clone();
        let cal = calibrate(&[pilot], &setup, |_, got| if *got == want { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(cal.ser, 0.0);
        assert_eq!(cal.params.min, 25);
        let silent = Pilot { bits: bits("000"), trace: ChannelTrace { counts: vec![1, 0, 2] } };
        assert!(calibrate(&[silent], &setup, |_, _| 0.0).is_err());
    }
}
