use molcode_core::bits::{bits, BitString};
use molcode_core::channel::ChannelTrace;
use molcode_core::detection::{
    calibrate, chunks, correct, detect, CalibrationSetup, DetectionParams, MinRule, Pilot, A_STEP,
};
use proptest::prelude::*;

fn params(a: f64, spacing: usize, min: u32) -> DetectionParams {
    DetectionParams::new(a, spacing, min).unwrap()
}

#[test]
fn invalid_params_rejected() {
    assert!(DetectionParams::new(1.5, 2, 0).is_err());
    assert!(DetectionParams::new(0.5, 0, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn corrected_bits_never_hold_adjacent_ones(v in prop::collection::vec(any::<bool>(), 0..200)) {
        let fixed = correct(&BitString::from(v.clone()));
        prop_assert!(fixed.no_consecutive_ones());
        // only 1s are cleared, and a constrained input is a fixed point
        for (x, y) in v.iter().zip(fixed.iter()) {
            prop_assert!(*x || !y);
        }
        prop_assert_eq!(correct(&fixed), fixed);
    }

    #[test]
    fn chunks_cover_the_trace(n in 0usize..100, spacing in 1usize..12) {
        let cs = chunks(n, spacing);
        let mut at = 0;
        for &(lo, hi) in &cs {
            prop_assert_eq!(lo, at);
            prop_assert!(hi > lo);
            prop_assert!(hi - lo >= spacing.min(n) && hi - lo < 2 * spacing.max(1) || cs.len() == 1);
            at = hi;
        }
        prop_assert_eq!(at, n);
    }

    #[test]
    fn scaling_counts_keeps_bits(
        counts in prop::collection::vec(0u32..60, 1..40),
        k in 0usize..=250,
        spacing in 1usize..8,
        min in 0u32..20,
        c in 2u32..6,
    ) {
        let a = k as f64 * A_STEP;
        let scaled: Vec<u32> = counts.iter().map(|&x| x * c).collect();
        for rule in [MinRule::NonzeroMin, MinRule::ExcludeFirst] {
            prop_assert_eq!(
                detect(&counts, &params(a, spacing, min), rule),
                detect(&scaled, &params(a, spacing, min * c), rule)
            );
        }
    }

    #[test]
    fn extreme_coefficients(counts in prop::collection::vec(0u32..60, 1..40), spacing in 1usize..8, min in 0u32..20) {
        let all = detect(&counts, &params(1.0, spacing, min), MinRule::NonzeroMin);
        let peaks = detect(&counts, &params(0.0, spacing, min), MinRule::NonzeroMin);
        for (lo, hi) in chunks(counts.len(), spacing) {
            let max = counts[lo..hi].iter().copied().max().unwrap();
            for i in lo..hi {
                prop_assert_eq!(all.get(i).unwrap(), counts[i] > 0 && counts[i] >= min);
                prop_assert_eq!(peaks.get(i).unwrap(), counts[i] > 0 && counts[i] == max && counts[i] >= min);
            }
        }
    }
}

#[test]
fn calibration_is_deterministic_and_optimal() {
    let pilots: Vec<Pilot> = [("1001010", vec![40, 12, 9, 35, 14, 30, 11]), ("0100100", vec![3, 28, 10, 6, 25, 9, 5])]
        .into_iter()
        .map(|(b, c)| Pilot { bits: bits(b), trace: ChannelTrace { counts: c } })
        .collect();
    let setup = CalibrationSetup { spacings: vec![2, 3, 4], rule: MinRule::NonzeroMin, correction: true, use_min: true };
    let ser = |i: usize, got: &BitString| {
        let want = &pilots[i].bits;
        want.iter().zip(got.iter()).filter(|(x, y)| x != y).count() as f64 / want.len() as f64
    };
    let first = calibrate(&pilots, &setup, ser).unwrap();
    assert_eq!(first, calibrate(&pilots, &setup, ser).unwrap());
    assert_eq!(first.params.min, 20);
    for spacing in [2, 3, 4] {
        for k in 0..=250 {
            let p = params(k as f64 * A_STEP, spacing, first.params.min);
            let mean = pilots
                .iter()
                .enumerate()
                .map(|(i, pl)| ser(i, &correct(&detect(&pl.trace.counts, &p, MinRule::NonzeroMin))))
                .sum::<f64>()
                / pilots.len() as f64;
            assert!(first.ser <= mean + 1e-12);
        }
    }
}
