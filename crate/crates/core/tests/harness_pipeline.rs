use molcode_core::channel::ChannelParams;
use molcode_core::detection::{DetectionParams, MinRule};
use molcode_core::harness::{
    calibrate_codec, curve, evaluate, normalize, run_grid, scheme_stats, Analysis, Codec, ExperimentConfig,
    NormalizedConfig, Scheme, SchemeStats,
};
use molcode_core::source::presets;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn exact_and_sampled_statistics() {
    let a1 = presets::alphabet1();
    let a2 = presets::alphabet2();
    let s = scheme_stats(&Codec::new(Scheme::Uncoded, &a1).unwrap(), 20, 1, 0).unwrap();
    assert_eq!((s.expected_bits, s.expected_ones), (40.0, 10.4));
    let s = scheme_stats(&Codec::new(Scheme::MopcStar, &a2).unwrap(), 20, 1, 0).unwrap();
    // reference values are truncated to 5 decimals
    assert!(close(s.expected_bits, 68.84210, 1e-5) && close(s.expected_ones, 16.73684, 1e-5));
    let s = scheme_stats(&Codec::new(Scheme::Ac, &a1).unwrap(), 20, 20_000, 3).unwrap();
    assert!(close(s.expected_bits, 33.32, 0.5), "{}", s.expected_bits);
    assert!(s.expected_ones <= s.expected_bits);
    assert!(scheme_stats(&Codec::new(Scheme::Ac, &a1).unwrap(), 20, 0, 3).is_err());
}

#[test]
fn normalization_preserves_budgets() {
    let base = SchemeStats { expected_bits: 40.0, expected_ones: 10.4 };
    let cfg = NormalizedConfig { signal_interval: 200, molecules_per_one: 300 };
    for (bits, ones) in [(33.32009, 16.53598), (49.85607, 16.53598), (48.63674, 13.44275), (80.0, 20.4)] {
        let t = SchemeStats { expected_bits: bits, expected_ones: ones };
        let n = normalize(&base, &cfg, &t).unwrap().config;
        assert!((n.signal_interval as f64 * bits - 200.0 * 40.0).abs() <= 0.5 * bits);
        assert!((n.molecules_per_one as f64 * ones - 300.0 * 10.4).abs() <= 0.5 * ones);
    }
    // round half to even on the molecule count
    let half = SchemeStats { expected_bits: 40.0, expected_ones: 20.8 };
    let cfg = NormalizedConfig { signal_interval: 200, molecules_per_one: 5 };
    assert_eq!(normalize(&base, &cfg, &half).unwrap().config.molecules_per_one, 2);
}

#[test]
fn evaluation_is_deterministic_and_never_aborts() {
    let a1 = presets::alphabet1();
    let codec = Codec::new(Scheme::Sac, &a1).unwrap();
    let channel = ChannelParams::default().with_molecules(3);
    let det = DetectionParams::new(0.5, 3, 1).unwrap();
    let r = evaluate(&codec, &channel, &det, MinRule::NonzeroMin, 20, 40, 9).unwrap();
    assert_eq!(r, evaluate(&codec, &channel, &det, MinRule::NonzeroMin, 20, 40, 9).unwrap());
    assert_eq!(r.words_sent, 40);
    assert!(r.wer > 0.5 && (0.0..=1.0).contains(&r.ser));
}

#[test]
fn word_count_stability() {
    let a1 = presets::alphabet1();
    let codec = Codec::new(Scheme::MopcStar, &a1).unwrap();
    let channel = ChannelParams::default().with_molecules(60);
    let cal = calibrate_codec(&codec, &channel, 20, 64, None, MinRule::NonzeroMin, 5).unwrap();
    let small = evaluate(&codec, &channel, &cal.params, MinRule::NonzeroMin, 20, 100, 17).unwrap();
    let large = evaluate(&codec, &channel, &cal.params, MinRule::NonzeroMin, 20, 200, 17).unwrap();
    let p = large.wer.clamp(0.02, 0.98);
    let sigma = (p * (1.0 - p) / 100.0).sqrt();
    assert!((small.wer - large.wer).abs() < 3.0 * sigma, "{} vs {}", small.wer, large.wer);
}

#[test]
fn isi_codes_calibrate_without_min_gate() {
    let a1 = presets::alphabet1();
    let codec = Codec::new(Scheme::IsiMitigating, &a1).unwrap();
    let channel = ChannelParams::default().with_interval(100.0).with_molecules(300);
    let mut sers = Vec::new();
    for rule in [MinRule::NonzeroMin, MinRule::ExcludeFirst] {
        let cal = calibrate_codec(&codec, &channel, 20, 16, None, rule, 2).unwrap();
        assert_eq!(cal.params.min, 0);
        assert!(cal.ser < 0.5);
        sers.push(cal.ser);
    }
    assert!((sers[0] - sers[1]).abs() < 0.1, "{sers:?}");
}

#[test]
fn arithmetic_codes_almost_always_decode() {
    let a1 = presets::alphabet1();
    let codecs: Vec<Codec> = [Scheme::Ac, Scheme::Sac, Scheme::Moapc].iter().map(|&s| Codec::new(s, &a1).unwrap()).collect();
    let t = curve(Analysis::Accuracy, &codecs, &[5, 50, 200], 200, 4).unwrap();
    for (_, row) in &t.rows {
        assert!(row.iter().all(|&v| v == 1.0), "{row:?}");
    }
    let lengths = curve(Analysis::Length, &codecs, &[20], 200, 4).unwrap();
    let row = &lengths.rows[0].1;
    assert!(row[0] < row[2] && row[2] < row[1]);
}

#[test]
fn tiny_grid_runs() {
    let cfg = ExperimentConfig { words: 16, pilots: 8, grid: vec![60], samples: 200, ..ExperimentConfig::default() };
    let rows = run_grid(&presets::alphabet2(), &[Scheme::Huffman, Scheme::MoHuffman], &cfg).unwrap();
    assert_eq!(rows.len(), 2);
    // 200 · 63 / 47.84210
    assert_eq!(rows[0].normalized.signal_interval, 263);
    assert!(rows.iter().all(|r| r.report.words_sent == 16));
}
