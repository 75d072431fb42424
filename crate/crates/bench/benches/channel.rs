use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use molcode_core::bits::bits;
use molcode_core::channel::{simulate, ChannelParams};
use molcode_core::detection::{detect, DetectionParams, MinRule};

fn channel(c: &mut Criterion) {
    let input = bits("10100100101001010010010100100101");
    let mut group = c.benchmark_group("simulate_32_bits");
    group.sample_size(10);
    for m in [100, 400] {
        let p = ChannelParams::default().with_molecules(m);
        group.bench_function(format!("{m}_molecules"), |b| b.iter(|| simulate(black_box(&input), &p, 3).unwrap()));
    }
    group.finish();

    let trace = simulate(&input, &ChannelParams::default().with_molecules(400), 3).unwrap();
    let params = DetectionParams::new(0.5, 3, 10).unwrap();
    c.bench_function("detect_32_bits", |b| {
        b.iter(|| detect(black_box(&trace.counts), &params, MinRule::NonzeroMin))
    });
}

criterion_group!(benches, channel);
criterion_main!(benches);
