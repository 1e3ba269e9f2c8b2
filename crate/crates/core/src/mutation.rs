//! Soft, medium and hybrid mutation, the probability and chunk target
//! factors, and the early-run genetic restructure phase.
//!
//! Every mutation event touches one parameter group of one gene, drawn
//! uniformly from the groups the gene's kind has:
//!
//! | kind    | groups                               |
//! |---------|--------------------------------------|
//! | polygon | color, alpha, one vertex             |
//! | circle  | color, alpha, center, radius         |
//! | line    | color, alpha, one endpoint, thickness|

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::genome::{
    random_alpha, random_color, random_point, CanvasDims, Gene, Genome, Point, Shape, ShapeKind,
};

#[derive(Debug, Error, PartialEq)]
pub enum MutationConfigError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationConfig {
    /// Per-gene probability, or the chunk fraction in chunk mode. `[0, 1]`.
    pub mutation_probability: f64,
    /// Soft perturbation width as a fraction of each parameter's range. `(0, 1]`.
    pub soft_mutation_rate: f64,
    pub hybrid_soft_generations: u32,
    pub hybrid_medium_generations: u32,
    pub chunk_mode: bool,
    /// Per-gene medium-mutation probability during the first tenth of a run.
    pub genetic_restructure_rate: f64,
    pub gene_swap_enabled: bool,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            mutation_probability: 0.1,
            soft_mutation_rate: 0.1,
            hybrid_soft_generations: 0,
            hybrid_medium_generations: 0,
            chunk_mode: false,
            genetic_restructure_rate: 0.0,
            gene_swap_enabled: false,
        }
    }
}

impl MutationConfig {
    pub fn check(&self) -> Result<(), MutationConfigError> {
        let unit = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(MutationConfigError::OutOfRange {
                    name,
                    value,
                    range: "[0, 1]",
                })
            }
        };
        unit("mutation_probability", self.mutation_probability)?;
        unit("genetic_restructure_rate", self.genetic_restructure_rate)?;
        if !(self.soft_mutation_rate > 0.0 && self.soft_mutation_rate <= 1.0) {
            return Err(MutationConfigError::OutOfRange {
                name: "soft_mutation_rate",
                value: self.soft_mutation_rate,
                range: "(0, 1]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationOp {
    Soft,
    Medium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Color,
    Alpha,
    /// One vertex, the center, or one endpoint.
    Point,
    /// Radius or thickness.
    Scalar,
}

pub fn param_groups(kind: ShapeKind) -> &'static [ParamGroup] {
    use ParamGroup::*;
    match kind {
        ShapeKind::Polygon => &[Color, Alpha, Point],
        ShapeKind::Circle | ShapeKind::Line => &[Color, Alpha, Point, Scalar],
    }
}

/// Integer step of at most `bound` in magnitude, nearest to a uniform draw
/// from `[-bound, bound]`.
fn soft_step<R: Rng + ?Sized>(bound: f64, rng: &mut R) -> i64 {
    let limit = bound.floor() as i64;
    let d: f64 = rng.gen_range(-bound..=bound);
    (d.round() as i64).clamp(-limit, limit)
}

fn nudge<R: Rng + ?Sized>(old: u32, lo: u32, hi: u32, range: f64, rate: f64, rng: &mut R) -> u32 {
    let step = soft_step(rate * range, rng);
    (i64::from(old) + step).clamp(i64::from(lo), i64::from(hi)) as u32
}

fn scalar_mut(shape: &mut Shape) -> Option<&mut u32> {
    match shape {
        Shape::Polygon { .. } => None,
        Shape::Circle { radius, .. } => Some(radius),
        Shape::Line { thickness, .. } => Some(thickness),
    }
}

fn scalar_max(kind: ShapeKind, canvas: CanvasDims) -> u32 {
    match kind {
        ShapeKind::Circle => canvas.max_radius(),
        _ => canvas.max_thickness(),
    }
}

fn pick_group<R: Rng + ?Sized>(kind: ShapeKind, rng: &mut R) -> ParamGroup {
    *param_groups(kind)
        .choose(rng)
        .expect("every kind has groups")
}

/// Perturbs one parameter group in place by at most `rate` times its range.
pub fn soft_mutate_group<R: Rng + ?Sized>(
    gene: &mut Gene,
    group: ParamGroup,
    canvas: CanvasDims,
    rate: f64,
    rng: &mut R,
) {
    let kind = gene.kind();
    match group {
        ParamGroup::Color => {
            let [r, g, b] = gene
                .color
                .channels()
                .map(|c| nudge(u32::from(c), 0, 255, 256.0, rate, rng) as u8);
            gene.color = crate::genome::Color::new(r, g, b);
        }
        ParamGroup::Alpha => {
            let d: f64 = rng.gen_range(-rate..=rate);
            gene.alpha = (gene.alpha + d).clamp(0.0, 1.0);
        }
        ParamGroup::Point => {
            let points = gene.shape.points_mut();
            let i = rng.gen_range(0..points.len());
            let p = points[i];
            let x = nudge(p.x, 0, canvas.width - 1, f64::from(canvas.width), rate, rng);
            let y = nudge(
                p.y,
                0,
                canvas.height - 1,
                f64::from(canvas.height),
                rate,
                rng,
            );
            points[i] = Point::new(x, y);
        }
        ParamGroup::Scalar => {
            let max = scalar_max(kind, canvas);
            if let Some(v) = scalar_mut(&mut gene.shape) {
                *v = nudge(*v, 1, max, f64::from(max), rate, rng);
            }
        }
    }
}

/// Redraws one parameter group in place over its full legal range.
pub fn medium_mutate_group<R: Rng + ?Sized>(
    gene: &mut Gene,
    group: ParamGroup,
    canvas: CanvasDims,
    rng: &mut R,
) {
    let kind = gene.kind();
    match group {
        ParamGroup::Color => gene.color = random_color(rng),
        ParamGroup::Alpha => gene.alpha = random_alpha(rng),
        ParamGroup::Point => {
            let points = gene.shape.points_mut();
            let i = rng.gen_range(0..points.len());
            points[i] = random_point(canvas, rng);
        }
        ParamGroup::Scalar => {
            let max = scalar_max(kind, canvas);
            if let Some(v) = scalar_mut(&mut gene.shape) {
                *v = rng.gen_range(1..=max);
            }
        }
    }
}

pub fn soft_mutate_gene<R: Rng + ?Sized>(
    gene: &Gene,
    canvas: CanvasDims,
    rate: f64,
    rng: &mut R,
) -> Gene {
    let mut out = gene.clone();
    let group = pick_group(gene.kind(), rng);
    soft_mutate_group(&mut out, group, canvas, rate, rng);
    out
}

pub fn medium_mutate_gene<R: Rng + ?Sized>(gene: &Gene, canvas: CanvasDims, rng: &mut R) -> Gene {
    let mut out = gene.clone();
    let group = pick_group(gene.kind(), rng);
    medium_mutate_group(&mut out, group, canvas, rng);
    out
}

fn apply_op<R: Rng + ?Sized>(
    gene: &mut Gene,
    op: MutationOp,
    canvas: CanvasDims,
    rate: f64,
    rng: &mut R,
) {
    let group = pick_group(gene.kind(), rng);
    match op {
        MutationOp::Soft => soft_mutate_group(gene, group, canvas, rate, rng),
        MutationOp::Medium => medium_mutate_group(gene, group, canvas, rng),
    }
}

/// Number of mutation events in chunk mode: `max(1, round(p * n))`, halves
/// rounded up.
///
/// A decimal probability such as 0.35 is stored slightly below its written
/// value, so `0.35 * 90` evaluates to 31.4999...; products within float
/// noise of a half are treated as exact halves.
pub fn chunk_count(genome_length: usize, probability: f64) -> usize {
    let x = probability * genome_length as f64;
    let floor = x.floor();
    let frac = x - floor;
    let noise = 1e-9 * x.max(1.0);
    let rounded = if frac + noise >= 0.5 {
        floor + 1.0
    } else {
        floor
    };
    (rounded as usize).max(1)
}

/// Gene indices to mutate this generation.
///
/// Probability mode includes each index independently (no duplicates, may be
/// empty). Chunk mode draws [`chunk_count`] indices with replacement; a
/// repeated index is mutated once per occurrence.
pub fn select_mutation_targets<R: Rng + ?Sized>(
    genome_length: usize,
    probability: f64,
    chunk_mode: bool,
    rng: &mut R,
) -> Vec<usize> {
    if genome_length == 0 {
        return Vec::new();
    }
    if chunk_mode {
        (0..chunk_count(genome_length, probability))
            .map(|_| rng.gen_range(0..genome_length))
            .collect()
    } else {
        (0..genome_length)
            .filter(|_| rng.gen::<f64>() < probability)
            .collect()
    }
}

/// Hybrid schedule: `hybrid_soft_generations` soft generations followed by
/// `hybrid_medium_generations` medium ones, repeating from generation 0.
pub fn operation_for_generation(generation: u64, config: &MutationConfig) -> MutationOp {
    let soft = u64::from(config.hybrid_soft_generations);
    let medium = u64::from(config.hybrid_medium_generations);
    if medium == 0 {
        return MutationOp::Soft;
    }
    if generation % (soft + medium) < soft {
        MutationOp::Soft
    } else {
        MutationOp::Medium
    }
}

/// Whether the restructure phase covers `generation` (the first tenth of
/// the run).
pub fn restructure_active(generation: u64, max_generations: u64) -> bool {
    (generation as f64) < max_generations as f64 / 10.0
}

/// Produces a mutated copy of `genome`. `generation` counts from 0.
pub fn mutate_genome<R: Rng + ?Sized>(
    genome: &Genome,
    config: &MutationConfig,
    generation: u64,
    max_generations: u64,
    rng: &mut R,
) -> Genome {
    let canvas = genome.canvas;
    let rate = config.soft_mutation_rate;
    let mut out = genome.clone();

    if config.genetic_restructure_rate > 0.0 && restructure_active(generation, max_generations) {
        for gene in &mut out.genes {
            if rng.gen::<f64>() < config.genetic_restructure_rate {
                apply_op(gene, MutationOp::Medium, canvas, rate, rng);
            }
        }
    }

    let op = operation_for_generation(generation, config);
    for i in select_mutation_targets(
        out.len(),
        config.mutation_probability,
        config.chunk_mode,
        rng,
    ) {
        apply_op(&mut out.genes[i], op, canvas, rate, rng);
    }

    if config.gene_swap_enabled && out.len() >= 2 && rng.gen::<f64>() < config.mutation_probability
    {
        let i = rng.gen_range(0..out.len());
        let j = rng.gen_range(0..out.len());
        out.genes.swap(i, j);
    }
    out
}
