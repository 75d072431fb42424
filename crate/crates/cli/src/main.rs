use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use molcode_core::channel::simulate;
use molcode_core::detection::Calibration;
use molcode_core::harness::{
    calibrate_codec, curve, evaluate, grid_csv, normalize, normalized_channel, point_seed, run_grid, scheme_stats,
    stats_pair, Analysis, CalibrationTable, Codec, ExperimentConfig, GridRow, NormalizedConfig, Scheme,
};
use molcode_core::prefix::{huffman, mohuffman, mopc_star, Codebook, Labeling, DEFAULT_MAX_LEN};
use molcode_core::source::{format_probability, presets};
use molcode_core::{Alphabet, BitString};

#[derive(Parser)]
#[command(name = "molcode", version, about = "Source codes for diffusion-based molecular communication")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Preset name (alphabet1, alphabet2, xyz, ratio) or an alphabet file
    #[arg(long, short, global = true, default_value = "alphabet1")]
    alphabet: String,
    /// Experiment config file of `key = value` lines
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Config override, e.g. `--set words=64`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print prefix codebooks as CSV
    Codebook {
        #[arg(long, value_delimiter = ',', default_value = "huffman,mohuffman,mopc")]
        schemes: Vec<String>,
        /// Huffman labeling: canonical or min-ones
        #[arg(long, default_value = "canonical")]
        labeling: String,
        /// Emit `symbol = code` lines for a single scheme instead of CSV
        #[arg(long)]
        text: bool,
    },
    /// Encode a word read from a file or stdin
    Encode {
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Write packed MSB-first bytes instead of `0`/`1` text
        #[arg(long)]
        binary: bool,
    },
    /// Decode a bit string read from a file or stdin
    Decode {
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Read packed MSB-first bytes holding this many bits
        #[arg(long, value_name = "BITS")]
        binary: Option<usize>,
        /// Number of symbols, for alphabets without an EOF symbol
        #[arg(long)]
        length: Option<usize>,
    },
    /// Expected bits and 1-bits per word
    Stats {
        #[arg(long, value_delimiter = ',', default_value = "uncoded,isi,huffman,mohuffman,mopc,ac,sac,moapc")]
        schemes: Vec<String>,
    },
    /// Signal intervals and molecule counts that match the uncoded budget
    Normalize {
        #[arg(long, value_delimiter = ',', default_value = "uncoded,isi,huffman,mohuffman,mopc,ac,sac,moapc")]
        schemes: Vec<String>,
        /// Baseline signal interval in ms (config `ts` when absent)
        #[arg(long)]
        interval: Option<u32>,
        /// Baseline molecules per 1-bit
        #[arg(long, default_value_t = 100)]
        molecules: u32,
    },
    /// Tune detector settings on pilot words at every grid point
    Calibrate {
        #[arg(long, value_delimiter = ',', default_value = "ac,sac,moapc")]
        schemes: Vec<String>,
        /// Also save the settings as a calibration table
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Molecule counts observed for a transmitted bit string
    Simulate {
        /// Bits to send; read from --input or stdin when absent
        #[arg(long)]
        bits: Option<String>,
        #[arg(long, short)]
        input: Option<PathBuf>,
    },
    /// Word and symbol error rates over the molecule-count grid
    Evaluate {
        #[arg(long, value_delimiter = ',', default_value = "ac,sac,moapc")]
        schemes: Vec<String>,
        /// Use saved detector settings instead of calibrating
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Length, 1-bit, accuracy or ratio curves over word lengths
    Curve {
        /// length, ones, accuracy or ratio
        #[arg(long, default_value = "length")]
        analysis: String,
        #[arg(long, value_delimiter = ',', default_value = "sac,moac")]
        schemes: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        lens: Vec<usize>,
        /// Words per length (config `samples` when absent)
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, short)]
    scheme: String,
    /// Coder precision in bits (config `precision` when absent)
    #[arg(long)]
    precision: Option<u32>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let common = &cli.common;
    let alphabet = load_alphabet(&common.alphabet)?;
    let cfg = load_config(common)?;
    let out = match &cli.command {
        Command::Codebook { schemes, labeling, text } => codebook(&alphabet, schemes, labeling, *text)?,
        Command::Encode { codec, input, binary } => {
            let codec = make_codec(codec, &alphabet, &cfg)?;
            let text = read_text(input.as_deref())?;
            let mut word = alphabet.parse_word(&text)?;
            if let Some(e) = alphabet.eof() {
                if word.last() != Some(&e) {
                    word.push(e);
                }
            }
            let bits = codec.encode(&word)?;
            if *binary {
                eprintln!("{} bits", bits.len());
                return write_bytes(common.output.as_deref(), &bits.to_bytes_msb());
            }
            format!("{bits}\n")
        }
        Command::Decode { codec, input, binary, length } => {
            let codec = make_codec(codec, &alphabet, &cfg)?;
            let bits = match binary {
                Some(n) => BitString::from_bytes_msb(&read_bytes(input.as_deref())?, *n)?,
                None => read_text(input.as_deref())?.trim().parse()?,
            };
            if alphabet.eof().is_none() && length.is_none() && !codec.scheme().uses_codebook() {
                bail!("arithmetic schemes on alphabets without an EOF symbol need --length");
            }
            let mut word = codec.decode(&bits, *length)?;
            if word.last().is_some() && word.last() == alphabet.eof().as_ref() {
                word.pop();
            }
            format!("{}\n", alphabet.format_word(&word))
        }
        Command::Stats { schemes } => {
            let mut out = String::from("scheme,expected_bits,expected_ones\n");
            for scheme in parse_schemes(schemes)? {
                let codec = Codec::with_precision(scheme, &alphabet, cfg.precision)?;
                let s = scheme_stats(&codec, cfg.word_len, cfg.samples, cfg.seed)?;
                writeln!(out, "{scheme},{:.6},{:.6}", s.expected_bits, s.expected_ones)?;
            }
            out
        }
        Command::Normalize { schemes, interval, molecules } => {
            let base_cfg = NormalizedConfig {
                signal_interval: interval.unwrap_or(cfg.channel.ts.round() as u32),
                molecules_per_one: *molecules,
            };
            let mut out = String::from(
                "scheme,expected_bits,expected_ones,signal_interval,molecules_per_one,interval_factor,molecule_factor\n",
            );
            for scheme in parse_schemes(schemes)? {
                let codec = Codec::with_precision(scheme, &alphabet, cfg.precision)?;
                let (base, stats) = stats_pair(&codec, &cfg)?;
                let n = normalize(&base, &base_cfg, &stats)?;
                writeln!(
                    out,
                    "{scheme},{:.6},{:.6},{},{},{:.6},{:.6}",
                    stats.expected_bits,
                    stats.expected_ones,
                    n.config.signal_interval,
                    n.config.molecules_per_one,
                    n.interval_factor,
                    n.molecule_factor
                )?;
            }
            out
        }
        Command::Calibrate { schemes, table } => {
            let mut saved = CalibrationTable::default();
            let mut out = String::from("scheme,molecules,signal_interval,molecules_per_one,a,spacing,min,pilot_ser\n");
            for scheme in parse_schemes(schemes)? {
                let codec = Codec::with_precision(scheme, &alphabet, cfg.precision)?;
                let (base, stats) = stats_pair(&codec, &cfg)?;
                for &m in &cfg.grid {
                    let (n, channel) = normalized_channel(&base, &stats, &cfg, m)?;
                    let seed = point_seed(cfg.seed, m) ^ 1;
                    let cal = calibrate_codec(&codec, &channel, cfg.word_len, cfg.pilots, None, cfg.rule, seed)?;
                    let p = &cal.params;
                    writeln!(
                        out,
                        "{scheme},{m},{},{},{:.3},{},{},{:.6}",
                        n.signal_interval, n.molecules_per_one, p.a, p.spacing, p.min, cal.ser
                    )?;
                    saved.insert(scheme, m, *p);
                }
            }
            if let Some(path) = table {
                fs::write(path, saved.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
            out
        }
        Command::Simulate { bits, input } => {
            let bits: BitString = match bits {
                Some(b) => b.parse()?,
                None => read_text(input.as_deref())?.trim().parse()?,
            };
            simulate(&bits, &cfg.channel, cfg.seed)?.to_csv()
        }
        Command::Evaluate { schemes, calibration } => {
            let schemes = parse_schemes(schemes)?;
            let rows = match calibration {
                None => run_grid(&alphabet, &schemes, &cfg)?,
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    evaluate_with(&alphabet, &schemes, &cfg, &CalibrationTable::parse(&text)?)?
                }
            };
            grid_csv(&rows)
        }
        Command::Curve { analysis, schemes, lens, samples } => {
            let analysis: Analysis = analysis.parse()?;
            let codecs = parse_schemes(schemes)?
                .into_iter()
                .map(|s| Codec::with_precision(s, &alphabet, cfg.precision))
                .collect::<Result<Vec<_>, _>>()?;
            curve(analysis, &codecs, lens, samples.unwrap_or(cfg.samples), cfg.seed)?.to_csv()
        }
    };
    write_bytes(common.output.as_deref(), out.as_bytes())
}

/// Grid evaluation with detector settings from a saved table. The pilot
/// error rate column is left as NaN.
fn evaluate_with(
    alphabet: &Alphabet,
    schemes: &[Scheme],
    cfg: &ExperimentConfig,
    table: &CalibrationTable,
) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let codec = Codec::with_precision(scheme, alphabet, cfg.precision)?;
        let (base, stats) = stats_pair(&codec, cfg)?;
        for &molecules in &cfg.grid {
            let params = table
                .get(scheme, molecules)
                .copied()
                .with_context(|| format!("no calibration for {scheme} at {molecules} molecules"))?;
            let (normalized, channel) = normalized_channel(&base, &stats, cfg, molecules)?;
            let seed = point_seed(cfg.seed, molecules) ^ 2;
            let report = evaluate(&codec, &channel, &params, cfg.rule, cfg.word_len, cfg.words, seed)?;
            let calibration = Calibration { params, ser: f64::NAN };
            rows.push(GridRow { scheme, molecules, normalized, calibration, report });
        }
    }
    Ok(rows)
}

fn codebook(alphabet: &Alphabet, schemes: &[String], labeling: &str, text: bool) -> Result<String> {
    let labeling = match labeling {
        "canonical" => Labeling::Canonical,
        "min-ones" | "minones" => Labeling::MinOnes,
        other => bail!("unknown labeling `{other}`"),
    };
    let schemes = parse_schemes(schemes)?;
    let book = |s: Scheme| -> Result<Codebook> {
        Ok(match s {
            Scheme::Huffman => huffman(alphabet, labeling)?,
            Scheme::MoHuffman => mohuffman(alphabet, labeling)?,
            Scheme::MopcStar => mopc_star(alphabet, DEFAULT_MAX_LEN)?,
            other => Codec::new(other, alphabet)?
                .codebook()
                .cloned()
                .with_context(|| format!("{other} has no codebook"))?,
        })
    };
    if text {
        let [scheme] = schemes[..] else { bail!("--text takes exactly one scheme") };
        return Ok(book(scheme)?.to_text(alphabet));
    }
    let mut out = String::from("scheme,symbol,probability,code,length,ones\n");
    for s in schemes {
        let b = book(s)?;
        for (i, code) in b.codes().iter().enumerate() {
            let p = format_probability(alphabet.prob(i));
            writeln!(out, "{s},{},{p},{code},{},{}", alphabet.name(i), code.len(), code.ones())?;
        }
    }
    Ok(out)
}

fn parse_schemes(names: &[String]) -> Result<Vec<Scheme>> {
    names.iter().map(|n| Ok(n.parse()?)).collect()
}

fn make_codec(args: &CodecArgs, alphabet: &Alphabet, cfg: &ExperimentConfig) -> Result<Codec> {
    Ok(Codec::with_precision(args.scheme.parse()?, alphabet, args.precision.unwrap_or(cfg.precision))?)
}

fn load_alphabet(spec: &str) -> Result<Alphabet> {
    if let Some(a) = presets::by_name(spec) {
        return Ok(a);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("`{spec}` is neither a preset nor a readable file"))?;
    Alphabet::parse(&text).with_context(|| format!("parsing alphabet {spec}"))
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    for kv in &common.overrides {
        let (k, v) = kv.split_once('=').with_context(|| format!("override `{kv}` is not KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn read_bytes(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn read_text(path: Option<&Path>) -> Result<String> {
    String::from_utf8(read_bytes(path)?).context("input is not UTF-8")
}

fn write_bytes(path: Option<&Path>, data: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, data).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(data)?),
    }
}
