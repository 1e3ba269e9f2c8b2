//! Evolves ordered genomes of transparent polygons, circles and thick lines
//! toward a target image.
//!
//! A genome is rendered onto a black canvas gene by gene with alpha
//! blending, scored by summed absolute channel difference against the
//! target, and improved by mutation-driven hill climbing.

pub mod cli;
pub mod evolve;
pub mod experiment;
pub mod fitness;
pub mod genome;
pub mod mutation;
pub mod raster;
pub mod rng;

pub use evolve::{run, EvolutionConfig, Individual, RunOutcome, RunStats};
pub use fitness::{absolute_score, relative_score, worst_score, FitnessScore};
pub use genome::{CanvasDims, Color, Gene, Genome, GenomeComposition, Point, Shape, ShapeKind};
pub use raster::{render, ImageBuffer};
