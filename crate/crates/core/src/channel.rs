//! Particle-tracking simulator for diffusion channels: a point transmitter,
//! an absorbing spherical receiver and on-off keying (a 1-bit releases a burst
//! of molecules at the start of its signal interval).
//!
//! Molecules move independently, so each one is tracked alone on its own
//! random stream and the per-interval counts are summed. Positions follow
//! Gaussian steps of variance `2·D·dt` per axis and a molecule is absorbed when
//! a step ends inside the receiver. Optionally, a molecule that wanders beyond
//! `far_field` from the receiver centre is finished analytically: it is
//! absorbed with probability `rR/r`, after a Lévy-distributed delay
//! `(r − rR)² / (2·D·Z²)`, which is the continuous first-passage law.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelParams {
    /// Diffusion coefficient in µm²/s.
    pub diffusion: f64,
    /// Transmitter distance from the receiver centre in µm.
    pub r0: f64,
    /// Receiver radius in µm.
    pub rr: f64,
    /// Signal interval in ms.
    pub ts: f64,
    /// Time step in ms.
    pub dt: f64,
    pub molecules_per_one: u32,
    /// Variance of additive Gaussian counting noise.
    pub noise_variance: f64,
    /// Distance from the receiver centre beyond which molecules are finished
    /// analytically; `None` tracks every step.
    pub far_field: Option<f64>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            diffusion: 79.4,
            r0: 10.0,
            rr: 5.0,
            ts: 200.0,
            dt: 1.0,
            molecules_per_one: 100,
            noise_variance: 0.0,
            far_field: Some(20.0),
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.rr > 0.0 && self.r0 > self.rr) {
            return bad(format!("need r0 > rR > 0, got r0 = {}, rR = {}", self.r0, self.rr));
        }
        if !(self.diffusion > 0.0 && self.dt > 0.0 && self.dt <= self.ts) {
            return bad("need D > 0 and 0 < dt <= ts".into());
        }
        let ratio = self.ts / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return bad(format!("ts = {} is not a multiple of dt = {}", self.ts, self.dt));
        }
        if self.noise_variance < 0.0 || !self.noise_variance.is_finite() {
            return bad("noise variance must be nonnegative".into());
        }
        if let Some(f) = self.far_field {
            if f.is_nan() || f <= self.r0 {
                return bad(format!("far field {f} must lie beyond r0 = {}", self.r0));
            }
        }
        Ok(())
    }

    /// Diffusion coefficient in µm²/ms.
    pub fn diffusion_per_ms(&self) -> f64 {
        self.diffusion / 1000.0
    }

    pub fn steps_per_interval(&self) -> u64 {
        (self.ts / self.dt).round() as u64
    }

    /// Per-axis displacement standard deviation of one step.
    pub fn step_sigma(&self) -> f64 {
        (2.0 * self.diffusion_per_ms() * self.dt).sqrt()
    }

    pub fn with_interval(mut self, ts: f64) -> Self {
        self.ts = ts;
        self
    }

    pub fn with_molecules(mut self, m: u32) -> Self {
        self.molecules_per_one = m;
        self
    }
}

/// Absorbed-molecule counts, one per signal interval.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChannelTrace {
    pub counts: Vec<u32>,
}

impl ChannelTrace {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn slice(&self, start: usize, end: usize) -> ChannelTrace {
        ChannelTrace { counts: self.counts[start..end].to_vec() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("interval,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{i},{c}");
        }
        out
    }
}

/// Simulates transmission of `bits`, one signal interval per bit.
pub fn simulate(bits: &BitString, params: &ChannelParams, seed: u64) -> Result<ChannelTrace> {
    let releases: Vec<(usize, u32)> = bits
        .iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .map(|(i, _)| (i, params.molecules_per_one))
        .collect();
    simulate_releases(&releases, bits.len(), params, seed)
}

/// Simulates bursts of `(interval, molecules)` over `intervals` intervals.
pub fn simulate_releases(
    releases: &[(usize, u32)],
    intervals: usize,
    params: &ChannelParams,
    seed: u64,
) -> Result<ChannelTrace> {
    params.validate()?;
    let mut counts = vec![0u32; intervals];
    let tracker = Tracker::new(params);
    for &(interval, molecules) in releases {
        if interval >= intervals {
            continue;
        }
        let horizon = (intervals - interval) as u64 * tracker.spi;
        for j in 0..molecules {
            let mut rng = particle_rng(seed, interval as u64, j as u64);
            if let Some(step) = tracker.absorption_step(&mut rng, horizon) {
                counts[interval + ((step - 1) / tracker.spi) as usize] += 1;
            }
        }
    }
    if params.noise_variance > 0.0 {
        let noise = Normal::new(0.0, params.noise_variance.sqrt()).expect("finite variance");
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(mix(seed ^ 0x006e_6f69_7365));
        for c in &mut counts {
            *c = (*c as f64 + noise.sample(&mut rng)).round().max(0.0) as u32;
        }
    }
    Ok(ChannelTrace { counts })
}

/// Random stream of molecule `j` released in `interval`.
fn particle_rng(seed: u64, interval: u64, j: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(mix(seed ^ mix(interval.wrapping_mul(0x9e37_79b9) ^ mix(j))))
}

/// SplitMix64 finaliser.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Tracker {
    spi: u64,
    sigma: f64,
    r0: f64,
    rr: f64,
    rr2: f64,
    far2: f64,
    d: f64,
    dt: f64,
}

impl Tracker {
    fn new(p: &ChannelParams) -> Self {
        Tracker {
            spi: p.steps_per_interval(),
            sigma: p.step_sigma(),
            r0: p.r0,
            rr: p.rr,
            rr2: p.rr * p.rr,
            far2: p.far_field.map_or(f64::INFINITY, |f| f * f),
            d: p.diffusion_per_ms(),
            dt: p.dt,
        }
    }

    /// Step (1-based, counted from release) at which the molecule is
    /// absorbed, if within `horizon` steps.
    fn absorption_step<R: Rng>(&self, rng: &mut R, horizon: u64) -> Option<u64> {
        let (mut x, mut y, mut z) = (self.r0, 0.0f64, 0.0f64);
        for step in 1..=horizon {
            x += self.sigma * rng.sample::<f64, _>(StandardNormal);
            y += self.sigma * rng.sample::<f64, _>(StandardNormal);
            z += self.sigma * rng.sample::<f64, _>(StandardNormal);
            let r2 = x * x + y * y + z * z;
            if r2 <= self.rr2 {
                return Some(step);
            }
            if r2 > self.far2 {
                let r = r2.sqrt();
                if rng.random::<f64>() >= self.rr / r {
                    return None;
                }
                let n: f64 = rng.sample(StandardNormal);
                let delay = (r - self.rr).powi(2) / (2.0 * self.d * n * n);
                let extra = (delay / self.dt).ceil();
                if extra >= (horizon - step) as f64 {
                    return None;
                }
                return Some(step + extra.max(1.0) as u64);
            }
        }
        None
    }
}

/// Per-axis displacements of `n` free molecules after `k` steps.
pub fn free_displacements(params: &ChannelParams, n: usize, k: usize, seed: u64) -> Vec<[f64; 3]> {
    let sigma = params.step_sigma();
    (0..n)
        .map(|j| {
            let mut rng = particle_rng(seed, u64::MAX, j as u64);
            let mut d = [0.0f64; 3];
            for _ in 0..k {
                for axis in &mut d {
                    *axis += sigma * rng.sample::<f64, _>(StandardNormal);
                }
            }
            d
        })
        .collect()
}
