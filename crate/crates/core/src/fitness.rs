//! L1 image distance and its relative-percent form.

use thiserror::Error;

use crate::genome::CanvasDims;
use crate::raster::ImageBuffer;

#[derive(Debug, Error, PartialEq)]
pub enum FitnessError {
    #[error("cannot compare a {rendered} image with a {target} target")]
    DimensionMismatch {
        rendered: CanvasDims,
        target: CanvasDims,
    },
    #[error("score {absolute} exceeds the worst possible {worst} for {dims}")]
    ScoreOutOfRange {
        absolute: u64,
        worst: u64,
        dims: CanvasDims,
    },
}

/// Absolute score (lower is better) with its relative percentage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessScore {
    pub absolute: u64,
    pub relative_percent: f64,
}

impl FitnessScore {
    pub fn new(absolute: u64, dims: CanvasDims) -> Result<Self, FitnessError> {
        Ok(Self {
            absolute,
            relative_percent: relative_score(absolute, dims)?,
        })
    }
}

/// `255 * 3 * width * height`.
pub fn worst_score(dims: CanvasDims) -> u64 {
    255 * 3 * u64::from(dims.width) * u64::from(dims.height)
}

/// Sum of absolute channel differences over every pixel.
pub fn absolute_score(rendered: &ImageBuffer, target: &ImageBuffer) -> Result<u64, FitnessError> {
    if rendered.dims() != target.dims() {
        return Err(FitnessError::DimensionMismatch {
            rendered: rendered.dims(),
            target: target.dims(),
        });
    }
    let total = rendered
        .pixels()
        .iter()
        .zip(target.pixels())
        .map(|(a, b)| {
            u32::from(a.r.abs_diff(b.r))
                + u32::from(a.g.abs_diff(b.g))
                + u32::from(a.b.abs_diff(b.b))
        })
        .fold(0u64, |acc, d| acc + u64::from(d));
    Ok(total)
}

/// `100 * (1 - absolute / worst_score(dims))`.
pub fn relative_score(absolute: u64, dims: CanvasDims) -> Result<f64, FitnessError> {
    let worst = worst_score(dims);
    if absolute > worst {
        return Err(FitnessError::ScoreOutOfRange {
            absolute,
            worst,
            dims,
        });
    }
    Ok(relative_from_mean(absolute as f64, dims))
}

/// Relative percent for a real-valued (e.g. averaged) absolute score.
pub fn relative_from_mean(absolute: f64, dims: CanvasDims) -> f64 {
    100.0 * (1.0 - absolute / worst_score(dims) as f64)
}

pub fn score(rendered: &ImageBuffer, target: &ImageBuffer) -> Result<FitnessScore, FitnessError> {
    FitnessScore::new(absolute_score(rendered, target)?, target.dims())
}
