//! The generational loop.
//!
//! Each parent is an independent hill climber: every generation it produces
//! `children_per_parent` mutated children and is replaced by the best of them
//! only if that child scores strictly lower. Generations are numbered from 1.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::experiment::{raw_csv_header, raw_csv_row};
use crate::fitness::{score, FitnessError, FitnessScore};
use crate::genome::{
    random_genome, serialize_genome, CanvasDims, Genome, GenomeComposition, GenomeError,
};
use crate::mutation::{mutate_genome, MutationConfig, MutationConfigError};
use crate::raster::{render, save_png, ImageBuffer, ImageIoError};
use crate::rng;

pub const MAX_PARENTS: usize = 100;
pub const MAX_CHILDREN: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{key} = {value} is outside {range}")]
    OutOfRange {
        key: &'static str,
        value: String,
        range: &'static str,
    },
    #[error(transparent)]
    Composition(#[from] GenomeError),
}

impl From<MutationConfigError> for ConfigError {
    fn from(e: MutationConfigError) -> Self {
        match e {
            MutationConfigError::OutOfRange { name, value, range } => ConfigError::OutOfRange {
                key: name,
                value: value.to_string(),
                range,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub number_of_parents: usize,
    pub children_per_parent: usize,
    pub composition: GenomeComposition,
    pub mutation: MutationConfig,
    pub crossover_enabled: bool,
    pub save_rate: u64,
    pub max_generations: u64,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            number_of_parents: 1,
            children_per_parent: 1,
            composition: GenomeComposition::default(),
            mutation: MutationConfig::default(),
            crossover_enabled: false,
            save_rate: 1_000,
            max_generations: 10_000,
            seed: 1,
        }
    }
}

impl EvolutionConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        let count = |key, v: usize, max: usize, range| {
            if (1..=max).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key,
                    value: v.to_string(),
                    range,
                })
            }
        };
        count(
            "number_of_parents",
            self.number_of_parents,
            MAX_PARENTS,
            "[1, 100]",
        )?;
        count(
            "children_per_parent",
            self.children_per_parent,
            MAX_CHILDREN,
            "[1, 100]",
        )?;
        if self.save_rate == 0 {
            return Err(ConfigError::OutOfRange {
                key: "save_rate",
                value: "0".into(),
                range: "[1, inf)",
            });
        }
        if self.max_generations == 0 {
            return Err(ConfigError::OutOfRange {
                key: "max_generations",
                value: "0".into(),
                range: "[1, inf)",
            });
        }
        self.composition.check()?;
        self.mutation.check()?;
        Ok(())
    }

    /// Child evaluations a full run performs.
    pub fn evaluation_budget(&self) -> u64 {
        (self.number_of_parents * self.children_per_parent) as u64 * self.max_generations
    }

    pub fn is_snapshot(&self, generation: u64) -> bool {
        generation.is_multiple_of(self.save_rate) || generation == self.max_generations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub score: FitnessScore,
}

impl Individual {
    pub fn evaluate(genome: Genome, target: &ImageBuffer) -> Result<Self, FitnessError> {
        let score = score(&render(&genome), target)?;
        Ok(Self { genome, score })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CrossoverError {
    #[error("cannot cross a {main} genome with a {secondary} genome")]
    Canvas {
        main: CanvasDims,
        secondary: CanvasDims,
    },
    #[error("composition mismatch: {main:?} vs {secondary:?} (polygons, circles, lines)")]
    Composition {
        main: (usize, usize, usize),
        secondary: (usize, usize, usize),
    },
}

/// Gene `i` of the child takes its geometry from `main` and its color and
/// alpha from `secondary`.
pub fn crossover(main: &Genome, secondary: &Genome) -> Result<Genome, CrossoverError> {
    if main.canvas != secondary.canvas {
        return Err(CrossoverError::Canvas {
            main: main.canvas,
            secondary: secondary.canvas,
        });
    }
    if main.len() != secondary.len() || main.kind_counts() != secondary.kind_counts() {
        return Err(CrossoverError::Composition {
            main: main.kind_counts(),
            secondary: secondary.kind_counts(),
        });
    }
    let mut child = main.clone();
    for (g, donor) in child.genes.iter_mut().zip(&secondary.genes) {
        g.color = donor.color;
        g.alpha = donor.alpha;
    }
    Ok(child)
}

/// Mutated child of `population[parent]`, crossed first with a uniformly
/// chosen other parent when crossover is on and one exists.
pub fn produce_child<R: Rng + ?Sized>(
    parent: usize,
    population: &[Individual],
    config: &EvolutionConfig,
    generation: u64,
    rng: &mut R,
) -> Genome {
    let own = &population[parent].genome;
    let crossed;
    let base = if config.crossover_enabled && population.len() >= 2 {
        let mut other = rng.gen_range(0..population.len() - 1);
        if other >= parent {
            other += 1;
        }
        crossed = crossover(own, &population[other].genome)
            .expect("parents of one run share canvas and composition");
        &crossed
    } else {
        own
    };
    mutate_genome(
        base,
        &config.mutation,
        generation - 1,
        config.max_generations,
        rng,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub population: Vec<Individual>,
    pub evaluations: usize,
}

/// One generation for every parent. Parents run in parallel; each draws
/// from its own `(parent, generation)` stream so the result does not depend
/// on scheduling.
pub fn step(
    population: &[Individual],
    target: &ImageBuffer,
    config: &EvolutionConfig,
    generation: u64,
) -> Result<StepOutcome, FitnessError> {
    let next: Vec<(Individual, usize)> = (0..population.len())
        .into_par_iter()
        .map(|p| {
            let mut stream = rng::stream(config.seed, p, generation);
            let mut best: Option<Individual> = None;
            for _ in 0..config.children_per_parent {
                let genome = produce_child(p, population, config, generation, &mut stream);
                let child = Individual::evaluate(genome, target)?;
                if best
                    .as_ref()
                    .is_none_or(|b| child.score.absolute < b.score.absolute)
                {
                    best = Some(child);
                }
            }
            let parent = &population[p];
            let survivor = match best {
                Some(child) if child.score.absolute < parent.score.absolute => child,
                _ => parent.clone(),
            };
            Ok((survivor, config.children_per_parent))
        })
        .collect::<Result<_, FitnessError>>()?;
    let evaluations = next.iter().map(|(_, n)| n).sum();
    Ok(StepOutcome {
        population: next.into_iter().map(|(i, _)| i).collect(),
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    pub best_absolute: u64,
    pub best_relative: f64,
    pub parent_scores: Vec<u64>,
}

impl GenerationRecord {
    fn from_population(generation: u64, population: &[Individual]) -> Self {
        let best = population
            .iter()
            .min_by_key(|i| i.score.absolute)
            .expect("population is never empty");
        Self {
            generation,
            best_absolute: best.score.absolute,
            best_relative: best.score.relative_percent,
            parent_scores: population.iter().map(|i| i.score.absolute).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub canvas: CanvasDims,
    pub records: Vec<GenerationRecord>,
    pub evaluations: u64,
    pub elapsed: Duration,
}

impl RunStats {
    pub fn final_record(&self) -> Option<&GenerationRecord> {
        self.records.last()
    }

    /// Generations at which the best score went up.
    pub fn elitism_violations(&self) -> Vec<u64> {
        self.records
            .windows(2)
            .filter(|w| w[1].best_absolute > w[0].best_absolute)
            .map(|w| w[1].generation)
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Image(#[from] ImageIoError),
}

impl SinkError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        SinkError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Receives run output. Called from the single thread driving the loop.
pub trait RunSink {
    fn record(&mut self, _record: &GenerationRecord) -> Result<(), SinkError> {
        Ok(())
    }

    fn snapshot(&mut self, _generation: u64, _population: &[Individual]) -> Result<(), SinkError> {
        Ok(())
    }

    fn finish(&mut self) -> Result<(), SinkError> {
        Ok(())
    }
}

/// Discards everything.
pub struct NullSink;

impl RunSink for NullSink {}

/// Writes `gen_<G>/parent_<P>.png`, `gen_<G>/parent_<P>.genome.json` and
/// `stats.csv` under one directory.
pub struct DirectorySink {
    root: PathBuf,
    stats_path: PathBuf,
    stats: BufWriter<File>,
    axis_value: String,
    repetition: u32,
}

impl DirectorySink {
    pub fn create(root: &Path) -> Result<Self, SinkError> {
        Self::labelled(root, "base", 0)
    }

    /// Sink whose stats rows carry a sweep axis value and repetition index.
    pub fn labelled(root: &Path, axis_value: &str, repetition: u32) -> Result<Self, SinkError> {
        fs::create_dir_all(root).map_err(|e| SinkError::io(root, e))?;
        let stats_path = root.join("stats.csv");
        let file = File::create(&stats_path).map_err(|e| SinkError::io(&stats_path, e))?;
        let mut stats = BufWriter::new(file);
        writeln!(stats, "{}", raw_csv_header()).map_err(|e| SinkError::io(&stats_path, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            stats_path,
            stats,
            axis_value: axis_value.to_string(),
            repetition,
        })
    }

    pub fn snapshot_dir(root: &Path, generation: u64) -> PathBuf {
        root.join(format!("gen_{generation}"))
    }
}

impl RunSink for DirectorySink {
    fn record(&mut self, record: &GenerationRecord) -> Result<(), SinkError> {
        let row = raw_csv_row(
            &self.axis_value,
            self.repetition,
            record.generation,
            record.best_absolute,
            record.best_relative,
        );
        writeln!(self.stats, "{row}").map_err(|e| SinkError::io(&self.stats_path, e))
    }

    fn snapshot(&mut self, generation: u64, population: &[Individual]) -> Result<(), SinkError> {
        let dir = Self::snapshot_dir(&self.root, generation);
        fs::create_dir_all(&dir).map_err(|e| SinkError::io(&dir, e))?;
        for (p, ind) in population.iter().enumerate() {
            save_png(&render(&ind.genome), &dir.join(format!("parent_{p}.png")))?;
            let path = dir.join(format!("parent_{p}.genome.json"));
            fs::write(&path, serialize_genome(&ind.genome)).map_err(|e| SinkError::io(&path, e))?;
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<(), SinkError> {
        self.stats
            .flush()
            .map_err(|e| SinkError::io(&self.stats_path, e))
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error(transparent)]
    Sink(#[from] SinkError),
    #[error("engine invariant breached at generation {generation}: {detail}")]
    Invariant { generation: u64, detail: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub stats: RunStats,
    pub population: Vec<Individual>,
}

pub fn initial_population(
    config: &EvolutionConfig,
    target: &ImageBuffer,
) -> Result<Vec<Individual>, RunError> {
    (0..config.number_of_parents)
        .map(|p| {
            let mut stream = rng::stream(config.seed, p, 0);
            let genome = random_genome(&config.composition, target.dims(), &mut stream)
                .map_err(ConfigError::from)?;
            Ok(Individual::evaluate(genome, target)?)
        })
        .collect()
}

/// Evolves for exactly `max_generations` generations.
pub fn run(
    config: &EvolutionConfig,
    target: &ImageBuffer,
    sink: &mut dyn RunSink,
) -> Result<RunOutcome, RunError> {
    config.check()?;
    let started = Instant::now();
    let mut population = initial_population(config, target)?;
    let mut records = Vec::with_capacity(config.max_generations as usize);
    let mut evaluations = 0u64;
    let mut best_so_far = u64::MAX;

    for generation in 1..=config.max_generations {
        let outcome = step(&population, target, config, generation)?;
        evaluations += outcome.evaluations as u64;
        population = outcome.population;

        let record = GenerationRecord::from_population(generation, &population);
        if record.best_absolute > best_so_far {
            return Err(RunError::Invariant {
                generation,
                detail: format!(
                    "best score rose from {best_so_far} to {}",
                    record.best_absolute
                ),
            });
        }
        best_so_far = record.best_absolute;
        if let Some(v) = population
            .iter()
            .find_map(|i| i.genome.validate().into_iter().next())
        {
            return Err(RunError::Invariant {
                generation,
                detail: v.to_string(),
            });
        }

        sink.record(&record)?;
        if config.is_snapshot(generation) {
            sink.snapshot(generation, &population)?;
        }
        records.push(record);
    }
    sink.finish()?;

    Ok(RunOutcome {
        stats: RunStats {
            canvas: target.dims(),
            records,
            evaluations,
            elapsed: started.elapsed(),
        },
        population,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{validate_genome, Color, Gene, Point, Shape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canvas() -> CanvasDims {
        CanvasDims::new(24, 16).unwrap()
    }

    fn gradient_target() -> ImageBuffer {
        let d = canvas();
        let pixels = (0..d.pixel_count())
            .map(|i| Color::new((i * 7 % 256) as u8, (i % 24 * 10) as u8, 90))
            .collect();
        ImageBuffer::from_pixels(d, pixels).unwrap()
    }

    fn small_config() -> EvolutionConfig {
        EvolutionConfig {
            composition: GenomeComposition::new(3, 2, 1, 4).unwrap(),
            max_generations: 40,
            save_rate: 10,
            seed: 9,
            ..EvolutionConfig::default()
        }
    }

    fn random(seed: u64, comp: &GenomeComposition) -> Genome {
        random_genome(comp, canvas(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn self_crossover_is_identity() {
        let g = random(1, &small_config().composition);
        assert_eq!(crossover(&g, &g).unwrap(), g);
    }

    #[test]
    fn crossover_takes_geometry_and_paint() {
        let d = canvas();
        let tri = |color| Gene {
            color,
            alpha: 0.3,
            shape: Shape::Polygon {
                vertices: vec![Point::new(0, 0), Point::new(5, 5), Point::new(9, 0)],
            },
        };
        let mut blue = tri(Color::new(0, 0, 255));
        blue.alpha = 0.8;
        blue.shape = Shape::Polygon {
            vertices: vec![Point::new(1, 1), Point::new(2, 2), Point::new(3, 1)],
        };
        let main = Genome::new(d, vec![tri(Color::new(255, 0, 0))]);
        let secondary = Genome::new(d, vec![blue]);
        let child = crossover(&main, &secondary).unwrap();
        assert_eq!(child.genes[0].shape, main.genes[0].shape);
        assert_eq!(child.genes[0].color, Color::new(0, 0, 255));
        assert_eq!(child.genes[0].alpha, 0.8);
    }

    #[test]
    fn crossover_rejects_mismatch() {
        let a = random(1, &GenomeComposition::new(3, 0, 0, 3).unwrap());
        let b = random(2, &GenomeComposition::new(2, 1, 0, 3).unwrap());
        assert!(matches!(
            crossover(&a, &b),
            Err(CrossoverError::Composition { .. })
        ));
    }

    #[test]
    fn random_crossovers_stay_valid() {
        let comp = small_config().composition;
        for s in 0..1000 {
            let child = crossover(&random(s, &comp), &random(s + 5000, &comp)).unwrap();
            assert!(validate_genome(&child).is_empty());
        }
    }

    #[test]
    fn single_parent_crossover_is_noop() {
        let target = gradient_target();
        let cfg = small_config();
        let pop = initial_population(&cfg, &target).unwrap();
        let crossing = EvolutionConfig {
            crossover_enabled: true,
            ..cfg
        };
        let a = produce_child(0, &pop, &cfg, 3, &mut rng::stream(4, 0, 3));
        let b = produce_child(0, &pop, &crossing, 3, &mut rng::stream(4, 0, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn two_parent_crossover_is_deterministic() {
        let target = gradient_target();
        let cfg = EvolutionConfig {
            number_of_parents: 2,
            crossover_enabled: true,
            ..small_config()
        };
        let pop = initial_population(&cfg, &target).unwrap();
        let a = produce_child(1, &pop, &cfg, 2, &mut rng::stream(4, 1, 2));
        let b = produce_child(1, &pop, &cfg, 2, &mut rng::stream(4, 1, 2));
        assert_eq!(a, b);
    }

    fn with_score(genome: &Genome, absolute: u64) -> Individual {
        Individual {
            genome: genome.clone(),
            score: FitnessScore::new(absolute, genome.canvas).unwrap(),
        }
    }

    #[test]
    fn replacement_is_strict() {
        // black target; a zero-alpha genome renders black and scores 0
        let target = ImageBuffer::black(canvas());
        let comp = GenomeComposition::new(2, 0, 0, 3).unwrap();
        let mut g = random(3, &comp);
        for gene in &mut g.genes {
            gene.alpha = 0.0;
        }
        let cfg = EvolutionConfig {
            composition: comp,
            mutation: MutationConfig {
                mutation_probability: 0.0,
                ..MutationConfig::default()
            },
            ..small_config()
        };
        // unmutated child scores 0, which beats a claimed 200 ...
        let out = step(&[with_score(&g, 200)], &target, &cfg, 1).unwrap();
        assert_eq!(out.population[0].score.absolute, 0);
        // ... but only ties a true 0, so the parent object survives
        let parent = with_score(&g, 0);
        let out = step(std::slice::from_ref(&parent), &target, &cfg, 1).unwrap();
        assert_eq!(out.population[0], parent);
    }

    #[test]
    fn step_evaluation_count() {
        let target = gradient_target();
        let cfg = EvolutionConfig {
            number_of_parents: 2,
            children_per_parent: 3,
            ..small_config()
        };
        let pop = initial_population(&cfg, &target).unwrap();
        assert_eq!(step(&pop, &target, &cfg, 1).unwrap().evaluations, 6);
    }

    #[test]
    fn run_is_deterministic_and_elitist() {
        let target = gradient_target();
        let cfg = EvolutionConfig {
            number_of_parents: 3,
            children_per_parent: 2,
            crossover_enabled: true,
            ..small_config()
        };
        let a = run(&cfg, &target, &mut NullSink).unwrap();
        let b = run(&cfg, &target, &mut NullSink).unwrap();
        assert_eq!(a.population, b.population);
        assert_eq!(a.stats.records, b.stats.records);
        assert_eq!(a.stats.records.len(), 40);
        assert_eq!(a.stats.evaluations, cfg.evaluation_budget());
        assert!(a.stats.elitism_violations().is_empty());
        for ind in &a.population {
            assert_eq!(
                Individual::evaluate(ind.genome.clone(), &target).unwrap(),
                *ind
            );
        }
    }

    #[test]
    fn single_generation_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = EvolutionConfig {
            max_generations: 1,
            save_rate: 1,
            ..small_config()
        };
        let mut sink = DirectorySink::create(dir.path()).unwrap();
        run(&cfg, &gradient_target(), &mut sink).unwrap();
        assert!(dir.path().join("gen_1/parent_0.png").exists());
        assert!(dir.path().join("gen_1/parent_0.genome.json").exists());
        let stats = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
        assert_eq!(stats.lines().count(), 2);
    }

    #[test]
    fn snapshot_schedule_includes_final() {
        let cfg = EvolutionConfig {
            max_generations: 25,
            save_rate: 10,
            ..small_config()
        };
        let snaps: Vec<_> = (1..=25).filter(|&g| cfg.is_snapshot(g)).collect();
        assert_eq!(snaps, [10, 20, 25]);
    }

    #[test]
    fn unwritable_output_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = DirectorySink::create(&blocker.join("out")).err().unwrap();
        assert!(err.to_string().contains("file/out"), "{err}");
    }

    #[test]
    fn config_bounds() {
        assert!(EvolutionConfig::default().check().is_ok());
        for bad in [
            EvolutionConfig {
                number_of_parents: 0,
                ..EvolutionConfig::default()
            },
            EvolutionConfig {
                children_per_parent: 101,
                ..EvolutionConfig::default()
            },
            EvolutionConfig {
                save_rate: 0,
                ..EvolutionConfig::default()
            },
            EvolutionConfig {
                max_generations: 0,
                ..EvolutionConfig::default()
            },
        ] {
            assert!(bad.check().is_err());
        }
    }
}
