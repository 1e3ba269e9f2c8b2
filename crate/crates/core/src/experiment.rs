//! Parameter sweeps: repeated runs per axis value, per-generation mean and
//! standard deviation across repetitions, and CSV output.
//!
//! Raw CSV: `axis_value,repetition,generation,absolute_score,relative_percent`
//!
//! Aggregate CSV: `axis_value,generation,mean_absolute,sd_absolute,mean_relative_percent`
//!
//! Percentages, means and standard deviations are printed with two decimals;
//! absolute scores as integers.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::evolve::{
    run, ConfigError, DirectorySink, EvolutionConfig, NullSink, RunError, RunSink, RunStats,
};
use crate::fitness::relative_from_mean;
use crate::genome::CanvasDims;
use crate::raster::ImageBuffer;

/// One point on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisValue {
    Vertices(usize),
    Polygons(usize),
    Circles(usize),
    Lines(usize),
    MutationProbability(f64),
    Composition {
        polygons: usize,
        circles: usize,
        lines: usize,
    },
}

impl AxisValue {
    pub fn apply(&self, base: &EvolutionConfig) -> EvolutionConfig {
        let mut cfg = *base;
        let comp = &mut cfg.composition;
        match *self {
            AxisValue::Vertices(v) => comp.vertices_per_polygon = v,
            AxisValue::Polygons(n) => comp.polygons = n,
            AxisValue::Circles(n) => comp.circles = n,
            AxisValue::Lines(n) => comp.lines = n,
            AxisValue::MutationProbability(p) => cfg.mutation.mutation_probability = p,
            AxisValue::Composition {
                polygons,
                circles,
                lines,
            } => {
                comp.polygons = polygons;
                comp.circles = circles;
                comp.lines = lines;
            }
        }
        cfg
    }
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Vertices(n)
            | AxisValue::Polygons(n)
            | AxisValue::Circles(n)
            | AxisValue::Lines(n) => {
                write!(f, "{n}")
            }
            AxisValue::MutationProbability(p) => write!(f, "{p}"),
            AxisValue::Composition {
                polygons,
                circles,
                lines,
            } => write!(f, "p{polygons}c{circles}l{lines}"),
        }
    }
}

/// Named axis grids.
///
/// `polygons`, `circles` and `lines` sweep one kind with the others zeroed;
/// `combinations` holds six 20-gene mixes.
pub fn preset(axis: &str) -> Option<Vec<AxisValue>> {
    let only = |p, c, l| AxisValue::Composition {
        polygons: p,
        circles: c,
        lines: l,
    };
    let values = match axis {
        "vertices" => (3..=20).map(AxisValue::Vertices).collect(),
        "polygons" => (5..=50).step_by(5).map(|n| only(n, 0, 0)).collect(),
        "circles" => (5..=40).step_by(5).map(|n| only(0, n, 0)).collect(),
        "lines" => (5..=40).step_by(5).map(|n| only(0, 0, n)).collect(),
        "mutation_probability" => [0.1, 0.3, 0.5, 0.7, 0.9]
            .into_iter()
            .map(AxisValue::MutationProbability)
            .collect(),
        "combinations" => [
            (10, 10, 0),
            (15, 5, 0),
            (5, 15, 0),
            (5, 5, 10),
            (10, 0, 10),
            (0, 10, 10),
        ]
        .into_iter()
        .map(|(p, c, l)| only(p, c, l))
        .collect(),
        _ => return None,
    };
    Some(values)
}

/// Parses a comma-separated value list for a single-parameter axis.
pub fn parse_axis_values(axis: &str, list: &str) -> Result<Vec<AxisValue>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let count = || {
                s.parse::<usize>()
                    .map_err(|e| format!("{axis} value {s:?}: {e}"))
            };
            Ok(match axis {
                "vertices" => AxisValue::Vertices(count()?),
                "polygons" => AxisValue::Polygons(count()?),
                "circles" => AxisValue::Circles(count()?),
                "lines" => AxisValue::Lines(count()?),
                "mutation_probability" => AxisValue::MutationProbability(
                    s.parse().map_err(|e| format!("{axis} value {s:?}: {e}"))?,
                ),
                _ => return Err(format!("axis {axis:?} does not take a value list")),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: EvolutionConfig,
    pub values: Vec<AxisValue>,
    pub repetitions: u32,
}

impl SweepSpec {
    pub fn check(&self) -> Result<(), SweepError> {
        if self.repetitions == 0 {
            return Err(SweepError::NoRepetitions);
        }
        if self.values.is_empty() {
            return Err(SweepError::NoValues);
        }
        for v in &self.values {
            v.apply(&self.base)
                .check()
                .map_err(|source| SweepError::Value {
                    axis_value: v.to_string(),
                    source,
                })?;
        }
        Ok(())
    }

    /// Seed of repetition `rep`: the base seed plus the repetition index.
    pub fn seed_for(&self, rep: u32) -> u64 {
        self.base.seed.wrapping_add(u64::from(rep))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep needs at least one repetition")]
    NoRepetitions,
    #[error("sweep needs at least one axis value")]
    NoValues,
    #[error("axis value {axis_value}: {source}")]
    Value {
        axis_value: String,
        #[source]
        source: ConfigError,
    },
    #[error("axis value {axis_value}, repetition {repetition}: {source}")]
    Run {
        axis_value: String,
        repetition: u32,
        #[source]
        source: RunError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub value: AxisValue,
    pub runs: Vec<RunStats>,
}

/// Runs every (axis value, repetition) pair. Runs are independent and are
/// executed in parallel. With `out`, each run writes its snapshots and
/// stats under `<out>/<axis value>/rep_<r>/`.
pub fn run_sweep(
    spec: &SweepSpec,
    target: &ImageBuffer,
    out: Option<&Path>,
) -> Result<Vec<SweepResult>, SweepError> {
    spec.check()?;
    let jobs: Vec<(usize, u32)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.repetitions).map(move |r| (v, r)))
        .collect();
    let stats: Vec<RunStats> = jobs
        .par_iter()
        .map(|&(v, rep)| {
            let value = spec.values[v];
            let mut cfg = value.apply(&spec.base);
            cfg.seed = spec.seed_for(rep);
            let label = value.to_string();
            let fail = |source: RunError| SweepError::Run {
                axis_value: label.clone(),
                repetition: rep,
                source,
            };
            let mut sink: Box<dyn RunSink> = match out {
                Some(root) => {
                    let dir = root.join(&label).join(format!("rep_{rep}"));
                    Box::new(
                        DirectorySink::labelled(&dir, &label, rep)
                            .map_err(|e| fail(RunError::Sink(e)))?,
                    )
                }
                None => Box::new(NullSink),
            };
            run(&cfg, target, sink.as_mut())
                .map(|o| o.stats)
                .map_err(fail)
        })
        .collect::<Result<_, _>>()?;

    let mut stats = stats.into_iter();
    Ok(spec
        .values
        .iter()
        .map(|&value| SweepResult {
            value,
            runs: stats.by_ref().take(spec.repetitions as usize).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub generation: u64,
    pub mean_absolute: f64,
    /// Population standard deviation (divides by N).
    pub sd_absolute: f64,
    pub mean_relative_percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub canvas: CanvasDims,
    pub points: Vec<AggregatePoint>,
}

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("no runs to aggregate")]
    Empty,
    #[error("run {index} has {actual} generations, expected {expected}")]
    Length {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("run {index} is on a {actual} canvas, expected {expected}")]
    Canvas {
        index: usize,
        expected: CanvasDims,
        actual: CanvasDims,
    },
}

/// Per-generation mean and population standard deviation of the best
/// absolute score across runs.
pub fn aggregate(runs: &[RunStats]) -> Result<AggregateSeries, AggregateError> {
    let first = runs.first().ok_or(AggregateError::Empty)?;
    let len = first.records.len();
    for (index, r) in runs.iter().enumerate() {
        if r.records.len() != len {
            return Err(AggregateError::Length {
                index,
                expected: len,
                actual: r.records.len(),
            });
        }
        if r.canvas != first.canvas {
            return Err(AggregateError::Canvas {
                index,
                expected: first.canvas,
                actual: r.canvas,
            });
        }
    }
    let n = runs.len() as f64;
    let points = (0..len)
        .map(|g| {
            let mean = runs
                .iter()
                .map(|r| r.records[g].best_absolute as f64)
                .sum::<f64>()
                / n;
            let var = runs
                .iter()
                .map(|r| {
                    let d = r.records[g].best_absolute as f64 - mean;
                    d * d
                })
                .sum::<f64>()
                / n;
            AggregatePoint {
                generation: first.records[g].generation,
                mean_absolute: mean,
                sd_absolute: var.sqrt(),
                mean_relative_percent: relative_from_mean(mean, first.canvas),
            }
        })
        .collect();
    Ok(AggregateSeries {
        canvas: first.canvas,
        points,
    })
}

pub fn raw_csv_header() -> &'static str {
    "axis_value,repetition,generation,absolute_score,relative_percent"
}

pub fn raw_csv_row(
    axis_value: &str,
    repetition: u32,
    generation: u64,
    absolute: u64,
    relative: f64,
) -> String {
    format!("{axis_value},{repetition},{generation},{absolute},{relative:.2}")
}

pub fn aggregate_csv_header() -> &'static str {
    "axis_value,generation,mean_absolute,sd_absolute,mean_relative_percent"
}

fn aggregate_csv_row(axis_value: &str, p: &AggregatePoint) -> String {
    format!(
        "{axis_value},{},{:.2},{:.2},{:.2}",
        p.generation, p.mean_absolute, p.sd_absolute, p.mean_relative_percent
    )
}

#[derive(Debug, Error)]
#[error("{path}: {source}")]
pub struct CsvError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn write_lines(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<(), CsvError> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| CsvError {
        path: path.to_path_buf(),
        source,
    })
}

/// Raw per-generation rows for every run, grouped by axis value.
pub fn write_raw_csv<'a>(
    groups: impl IntoIterator<Item = (String, &'a [RunStats])>,
    path: &Path,
) -> Result<(), CsvError> {
    let mut rows = Vec::new();
    for (label, runs) in groups {
        for (rep, stats) in runs.iter().enumerate() {
            for r in &stats.records {
                rows.push(raw_csv_row(
                    &label,
                    rep as u32,
                    r.generation,
                    r.best_absolute,
                    r.best_relative,
                ));
            }
        }
    }
    write_lines(path, raw_csv_header(), rows.into_iter())
}

pub fn write_aggregate_csv<'a>(
    groups: impl IntoIterator<Item = (String, &'a AggregateSeries)>,
    path: &Path,
) -> Result<(), CsvError> {
    let rows: Vec<String> = groups
        .into_iter()
        .flat_map(|(label, series)| {
            series
                .points
                .iter()
                .map(|p| aggregate_csv_row(&label, p))
                .collect::<Vec<_>>()
        })
        .collect();
    write_lines(path, aggregate_csv_header(), rows.into_iter())
}

/// One parsed raw CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub axis_value: String,
    pub repetition: u32,
    pub generation: u64,
    pub absolute_score: u64,
    pub relative_percent: f64,
}

pub fn parse_raw_csv(text: &str) -> Result<Vec<RawRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == raw_csv_header() => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let line_no = i + 2;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(format!(
                    "line {line_no}: expected 5 fields, got {}",
                    f.len()
                ));
            }
            let bad = |e: &dyn fmt::Display| format!("line {line_no}: {e}");
            Ok(RawRow {
                axis_value: f[0].to_string(),
                repetition: f[1].parse().map_err(|e| bad(&e))?,
                generation: f[2].parse().map_err(|e| bad(&e))?,
                absolute_score: f[3].parse().map_err(|e| bad(&e))?,
                relative_percent: f[4].parse().map_err(|e| bad(&e))?,
            })
        })
        .collect()
}
