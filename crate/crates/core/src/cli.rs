//! Command-line front end and the `key = value` configuration format.
//!
//! ```text
//! # every key is optional; unspecified keys keep their defaults
//! number_of_parents = 1
//! children_per_parent = 1
//! polygons = 20
//! circles = 0
//! lines = 0
//! vertices = 3
//! mutation_probability = 0.1
//! genetic_restructure_rate = 0
//! soft_mutation_rate = 0.1
//! hybrid_soft = 0
//! hybrid_medium = 0
//! chunk_mutation = false
//! crossover_mutation = false
//! gene_swap = false
//! save_rate = 1000
//! max_generations = 10000
//! seed = 1
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::evolve::{
    self, ConfigError, DirectorySink, EvolutionConfig, GenerationRecord, Individual, RunSink,
    SinkError,
};
use crate::experiment::{self, aggregate, parse_axis_values, preset, SweepSpec};
use crate::fitness;
use crate::genome::{deserialize_genome, Genome, GenomeError};
use crate::raster::{load_png, render, save_png, ImageBuffer};

pub const CONFIG_KEYS: &[&str] = &[
    "number_of_parents",
    "children_per_parent",
    "polygons",
    "circles",
    "lines",
    "vertices",
    "mutation_probability",
    "genetic_restructure_rate",
    "soft_mutation_rate",
    "hybrid_soft",
    "hybrid_medium",
    "chunk_mutation",
    "crossover_mutation",
    "gene_swap",
    "save_rate",
    "max_generations",
    "seed",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigParseError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {key:?} (known keys: {})", CONFIG_KEYS.join(", "))]
    UnknownKey { key: String },
    #[error("{key} = {value:?} is not {expected}")]
    Value {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("{0}")]
    Range(ConfigError),
}

fn parse_value<T: std::str::FromStr>(
    key: &str,
    value: &str,
    expected: &'static str,
) -> Result<T, ConfigParseError> {
    value
        .replace('_', "")
        .parse()
        .map_err(|_| ConfigParseError::Value {
            key: key.to_string(),
            value: value.to_string(),
            expected,
        })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigParseError> {
    match value.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigParseError::Value {
            key: key.to_string(),
            value: value.to_string(),
            expected: "true or false",
        }),
    }
}

fn apply_key(cfg: &mut EvolutionConfig, key: &str, value: &str) -> Result<(), ConfigParseError> {
    const COUNT: &str = "a non-negative integer";
    const REAL: &str = "a number";
    let comp = &mut cfg.composition;
    let m = &mut cfg.mutation;
    match key {
        "number_of_parents" => cfg.number_of_parents = parse_value(key, value, COUNT)?,
        "children_per_parent" => cfg.children_per_parent = parse_value(key, value, COUNT)?,
        "polygons" => comp.polygons = parse_value(key, value, COUNT)?,
        "circles" => comp.circles = parse_value(key, value, COUNT)?,
        "lines" => comp.lines = parse_value(key, value, COUNT)?,
        "vertices" => comp.vertices_per_polygon = parse_value(key, value, COUNT)?,
        "mutation_probability" => m.mutation_probability = parse_value(key, value, REAL)?,
        "genetic_restructure_rate" => m.genetic_restructure_rate = parse_value(key, value, REAL)?,
        "soft_mutation_rate" => m.soft_mutation_rate = parse_value(key, value, REAL)?,
        "hybrid_soft" => m.hybrid_soft_generations = parse_value(key, value, COUNT)?,
        "hybrid_medium" => m.hybrid_medium_generations = parse_value(key, value, COUNT)?,
        "chunk_mutation" => m.chunk_mode = parse_bool(key, value)?,
        "crossover_mutation" => cfg.crossover_enabled = parse_bool(key, value)?,
        "gene_swap" => m.gene_swap_enabled = parse_bool(key, value)?,
        "save_rate" => cfg.save_rate = parse_value(key, value, COUNT)?,
        "max_generations" => cfg.max_generations = parse_value(key, value, COUNT)?,
        "seed" => cfg.seed = parse_value(key, value, COUNT)?,
        _ => {
            return Err(ConfigParseError::UnknownKey {
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

fn range_error(e: ConfigError) -> ConfigParseError {
    let e = match e {
        ConfigError::Composition(GenomeError::TooFewVertices(n)) => ConfigError::OutOfRange {
            key: "vertices",
            value: n.to_string(),
            range: "[3, inf)",
        },
        ConfigError::Composition(GenomeError::EmptyComposition) => ConfigError::OutOfRange {
            key: "polygons + circles + lines",
            value: "0".into(),
            range: "[1, inf)",
        },
        other => other,
    };
    ConfigParseError::Range(e)
}

/// Splits `key=value` (override syntax).
pub fn split_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, found {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Builds a configuration from defaults, then the file, then `overrides`,
/// and validates the result.
pub fn parse_config(
    contents: &str,
    overrides: &[(String, String)],
) -> Result<EvolutionConfig, ConfigParseError> {
    let mut cfg = EvolutionConfig::default();
    for (i, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigParseError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigParseError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        apply_key(&mut cfg, key, value)?;
    }
    for (key, value) in overrides {
        apply_key(&mut cfg, key, value)?;
    }
    cfg.check().map_err(range_error)?;
    Ok(cfg)
}

#[derive(Debug, Parser)]
#[command(
    name = "evoshapes",
    version,
    about = "Evolve transparent shapes toward a target image"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one population and write snapshots plus stats.csv
    Run(RunArgs),
    /// Repeat runs over a parameter axis and write raw and aggregate CSVs
    Sweep(SweepArgs),
    /// Render a genome file to PNG
    Render(RenderArgs),
    /// Score a genome against a target image
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Target image
    #[arg(long)]
    pub target: PathBuf,
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Master seed, overriding the configuration
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parameter override, e.g. `--set polygons=25` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = split_override)]
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: EvolveArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: EvolveArgs,
    /// vertices, polygons, circles, lines, mutation_probability or combinations
    #[arg(long)]
    pub axis: String,
    /// Comma-separated axis values; defaults to the axis preset grid
    #[arg(long)]
    pub values: Option<String>,
    /// Runs per axis value
    #[arg(long, default_value_t = 15)]
    pub repetitions: u32,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub genome: PathBuf,
    /// Output PNG; defaults to the genome path with a .png extension
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
}

pub fn load_config(args: &EvolveArgs) -> Result<EvolutionConfig> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    parse_config(&text, &overrides).with_context(|| format!("in config {}", args.config.display()))
}

pub fn load_genome(path: &Path) -> Result<Genome> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading genome {}", path.display()))?;
    deserialize_genome(&text).with_context(|| format!("in genome {}", path.display()))
}

fn load_target(path: &Path) -> Result<ImageBuffer> {
    Ok(load_png(path)?)
}

/// Forwards to a directory sink and prints a status line at each snapshot.
struct ProgressSink {
    inner: DirectorySink,
    max_generations: u64,
    last: Option<GenerationRecord>,
}

impl RunSink for ProgressSink {
    fn record(&mut self, record: &GenerationRecord) -> Result<(), SinkError> {
        self.last = Some(record.clone());
        self.inner.record(record)
    }

    fn snapshot(&mut self, generation: u64, population: &[Individual]) -> Result<(), SinkError> {
        if let Some(r) = &self.last {
            eprintln!(
                "generation {generation}/{}: best {} ({:.2}%)",
                self.max_generations, r.best_absolute, r.best_relative
            );
        }
        self.inner.snapshot(generation, population)
    }

    fn finish(&mut self) -> Result<(), SinkError> {
        self.inner.finish()
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let target = load_target(&args.common.target)?;
    let mut sink = ProgressSink {
        inner: DirectorySink::create(&args.common.out)?,
        max_generations: cfg.max_generations,
        last: None,
    };
    let outcome = evolve::run(&cfg, &target, &mut sink)?;
    if let Some(last) = outcome.stats.final_record() {
        println!(
            "final absolute={} relative_percent={:.2} elapsed_s={:.1}",
            last.best_absolute,
            last.best_relative,
            outcome.stats.elapsed.as_secs_f64()
        );
    }
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let target = load_target(&args.common.target)?;
    let values = match &args.values {
        Some(list) => parse_axis_values(&args.axis, list).map_err(anyhow::Error::msg)?,
        None => match preset(&args.axis) {
            Some(v) => v,
            None => bail!("unknown sweep axis {:?}", args.axis),
        },
    };
    let spec = SweepSpec {
        base: cfg,
        values,
        repetitions: args.repetitions,
    };
    let out = &args.common.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let results = experiment::run_sweep(&spec, &target, Some(out))?;

    experiment::write_raw_csv(
        results
            .iter()
            .map(|r| (r.value.to_string(), r.runs.as_slice())),
        &out.join("raw.csv"),
    )?;
    let series = results
        .iter()
        .map(|r| Ok((r.value.to_string(), aggregate(&r.runs)?)))
        .collect::<Result<Vec<_>>>()?;
    experiment::write_aggregate_csv(
        series.iter().map(|(l, s)| (l.clone(), s)),
        &out.join("aggregate.csv"),
    )?;

    let mut stdout = std::io::stdout().lock();
    for (label, s) in &series {
        if let Some(p) = s.points.last() {
            writeln!(
                stdout,
                "{}={label} mean_absolute={:.2} sd_absolute={:.2} mean_relative_percent={:.2}",
                args.axis, p.mean_absolute, p.sd_absolute, p.mean_relative_percent
            )?;
        }
    }
    Ok(())
}

pub fn cmd_render(args: &RenderArgs) -> Result<()> {
    let genome = load_genome(&args.genome)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.genome.with_extension("png"));
    save_png(&render(&genome), &out)?;
    Ok(())
}

/// Renders the genome and scores it: `absolute=<n> relative_percent=<p>`.
pub fn score_line(genome: &Genome, target: &ImageBuffer) -> Result<String> {
    let s = fitness::score(&render(genome), target)?;
    Ok(format!(
        "absolute={} relative_percent={:.2}",
        s.absolute, s.relative_percent
    ))
}

pub fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let genome = load_genome(&args.genome)?;
    let target = load_target(&args.target)?;
    println!("{}", score_line(&genome, &target)?);
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Render(a) => cmd_render(a),
        Command::Score(a) => cmd_score(a),
    }
}
