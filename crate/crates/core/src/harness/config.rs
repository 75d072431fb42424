use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::scheme::Scheme;
use crate::channel::ChannelParams;
use crate::detection::{DetectionParams, MinRule};
use crate::error::{Error, Result};

/// Settings of an error-rate experiment, read from `key = value` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub channel: ChannelParams,
    pub word_len: usize,
    /// Test words per grid point.
    pub words: usize,
    /// Pilot words per calibration.
    pub pilots: usize,
    /// Baseline molecule counts to sweep.
    pub grid: Vec<u32>,
    pub precision: u32,
    /// Monte Carlo samples for arithmetic-scheme statistics.
    pub samples: usize,
    pub rule: MinRule,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    /// Desk-scale profile.
    fn default() -> Self {
        ExperimentConfig {
            channel: ChannelParams::default(),
            word_len: 20,
            words: 512,
            pilots: 256,
            grid: vec![100, 200, 300, 400],
            precision: crate::ac::DEFAULT_PRECISION,
            samples: 100_000,
            rule: MinRule::NonzeroMin,
            seed: 1,
        }
    }
}

const KEYS: &[&str] = &[
    "diffusion",
    "r0",
    "rr",
    "ts",
    "dt",
    "molecules",
    "noise_variance",
    "far_field",
    "word_len",
    "words",
    "pilots",
    "grid",
    "precision",
    "samples",
    "rule",
    "seed",
];

impl ExperimentConfig {
    /// The larger profile: 5120 test words, 1024 pilots, 10^6 samples and a
    /// denser molecule grid.
    pub fn full() -> Self {
        ExperimentConfig {
            words: 5120,
            pilots: 1024,
            samples: 1_000_000,
            grid: (1..=8).map(|k| 50 * k).collect(),
            ..Self::default()
        }
    }

    /// Starts from the defaults and applies every `key = value` line. Blank
    /// lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        cfg.channel.validate()?;
        Ok(cfg)
    }

    /// Sets one field by its config key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
        }
        let c = &mut self.channel;
        match key {
            "diffusion" => c.diffusion = num(key, value)?,
            "r0" => c.r0 = num(key, value)?,
            "rr" => c.rr = num(key, value)?,
            "ts" => c.ts = num(key, value)?,
            "dt" => c.dt = num(key, value)?,
            "molecules" => c.molecules_per_one = num(key, value)?,
            "noise_variance" => c.noise_variance = num(key, value)?,
            "far_field" => {
                c.far_field = match value {
                    "none" | "off" => None,
                    v => Some(num(key, v)?),
                }
            }
            "word_len" => self.word_len = num(key, value)?,
            "words" => self.words = num(key, value)?,
            "pilots" => self.pilots = num(key, value)?,
            "grid" => {
                self.grid = value
                    .split(',')
                    .map(|v| num(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "precision" => self.precision = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "rule" => {
                self.rule = match value {
                    "nonzero-min" => MinRule::NonzeroMin,
                    "exclude-first" => MinRule::ExcludeFirst,
                    _ => return Err(Error::Config(format!("unknown rule `{value}`"))),
                }
            }
            "seed" => self.seed = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`; known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let c = &self.channel;
        let far = c.far_field.map_or("none".to_string(), |f| f.to_string());
        let grid: Vec<String> = self.grid.iter().map(u32::to_string).collect();
        let rule = match self.rule {
            MinRule::NonzeroMin => "nonzero-min",
            MinRule::ExcludeFirst => "exclude-first",
        };
        format!(
            "diffusion = {}\nr0 = {}\nrr = {}\nts = {}\ndt = {}\nmolecules = {}\nnoise_variance = {}\nfar_field = {far}\n\
             word_len = {}\nwords = {}\npilots = {}\ngrid = {}\nprecision = {}\nsamples = {}\nrule = {rule}\nseed = {}\n",
            c.diffusion,
            c.r0,
            c.rr,
            c.ts,
            c.dt,
            c.molecules_per_one,
            c.noise_variance,
            self.word_len,
            self.words,
            self.pilots,
            grid.join(","),
            self.precision,
            self.samples,
            self.seed
        )
    }
}

/// Calibrated detector settings keyed by scheme and molecule count, stored as
/// lines `scheme molecules = a spacing min`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CalibrationTable {
    pub entries: BTreeMap<(Scheme, u32), DetectionParams>,
}

impl CalibrationTable {
    pub fn insert(&mut self, scheme: Scheme, molecules: u32, params: DetectionParams) {
        self.entries.insert((scheme, molecules), params);
    }

    pub fn get(&self, scheme: Scheme, molecules: u32) -> Option<&DetectionParams> {
        self.entries.get(&(scheme, molecules))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((scheme, m), p) in &self.entries {
            let _ = writeln!(out, "{scheme} {m} = {} {} {}", p.a, p.spacing, p.min);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.into() };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `scheme molecules = a spacing min`"))?;
            let key: Vec<&str> = key.split_whitespace().collect();
            let value: Vec<&str> = value.split_whitespace().collect();
            if key.len() != 2 || value.len() != 3 {
                return Err(bad("expected `scheme molecules = a spacing min`"));
            }
            let scheme: Scheme = key[0].parse().map_err(|_| bad("unknown scheme"))?;
            let m = key[1].parse().map_err(|_| bad("bad molecule count"))?;
            let a = value[0].parse().map_err(|_| bad("bad a"))?;
            let spacing = value[1].parse().map_err(|_| bad("bad spacing"))?;
            let min = value[2].parse().map_err(|_| bad("bad min"))?;
            let params = DetectionParams::new(a, spacing, min).map_err(|e| bad(&e.to_string()))?;
            table.insert(scheme, m, params);
        }
        Ok(table)
    }
}
