//! Genotype to phenotype: draws every gene of a genome, in order, onto a
//! black 24-bit canvas with alpha blending.

mod io;
mod scan;

pub use io::{load_png, save_png, ImageIoError};
pub use scan::{coverage, rasterize_circle, rasterize_line, rasterize_polygon};

use thiserror::Error;

use crate::genome::{CanvasDims, Color, Gene, Genome};

#[derive(Debug, Error, PartialEq)]
#[error("pixel buffer has {actual} pixels, {dims} needs {expected}")]
pub struct PixelCountError {
    pub dims: CanvasDims,
    pub expected: usize,
    pub actual: usize,
}

/// Dense row-major RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    dims: CanvasDims,
    pixels: Vec<Color>,
}

impl ImageBuffer {
    pub fn black(dims: CanvasDims) -> Self {
        Self {
            dims,
            pixels: vec![Color::BLACK; dims.pixel_count()],
        }
    }

    pub fn filled(dims: CanvasDims, color: Color) -> Self {
        Self {
            dims,
            pixels: vec![color; dims.pixel_count()],
        }
    }

    pub fn from_pixels(dims: CanvasDims, pixels: Vec<Color>) -> Result<Self, PixelCountError> {
        if pixels.len() != dims.pixel_count() {
            return Err(PixelCountError {
                dims,
                expected: dims.pixel_count(),
                actual: pixels.len(),
            });
        }
        Ok(Self { dims, pixels })
    }

    pub fn dims(&self) -> CanvasDims {
        self.dims
    }

    pub fn pixels(&self) -> &[Color] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Color {
        self.pixels[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, c: Color) {
        let i = self.index(x, y);
        self.pixels[i] = c;
    }

    fn index(&self, x: u32, y: u32) -> usize {
        assert!(x < self.dims.width && y < self.dims.height);
        y as usize * self.dims.width as usize + x as usize
    }

    /// Composites `color` at opacity `alpha` over every pixel in `mask`.
    pub fn blend_mask(&mut self, mask: &CoverageMask, color: Color, alpha: f64) {
        debug_assert_eq!(mask.dims, self.dims);
        let table = BlendTable::new(color, alpha);
        let w = self.dims.width as usize;
        for span in &mask.spans {
            let row = span.y as usize * w;
            for px in &mut self.pixels[row + span.x0 as usize..=row + span.x1 as usize] {
                *px = table.apply(*px);
            }
        }
    }
}

/// Horizontal run of covered pixels, `x0..=x1` on row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub y: u32,
    pub x0: u32,
    pub x1: u32,
}

/// Set of covered pixels, stored as sorted, disjoint row spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMask {
    dims: CanvasDims,
    spans: Vec<Span>,
}

impl CoverageMask {
    pub(crate) fn new(dims: CanvasDims) -> Self {
        Self {
            dims,
            spans: Vec::new(),
        }
    }

    /// Adds a span; rows must be pushed in ascending order and spans within
    /// a row by ascending `x0`. Touching or overlapping spans are merged.
    pub(crate) fn push(&mut self, y: u32, x0: u32, x1: u32) {
        debug_assert!(x0 <= x1 && x1 < self.dims.width && y < self.dims.height);
        if let Some(last) = self.spans.last_mut() {
            debug_assert!(last.y <= y);
            if last.y == y && x0 <= last.x1 + 1 {
                last.x1 = last.x1.max(x1);
                return;
            }
        }
        self.spans.push(Span { y, x0, x1 });
    }

    pub fn dims(&self) -> CanvasDims {
        self.dims
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.iter().map(|s| (s.x1 - s.x0 + 1) as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.spans
            .iter()
            .any(|s| s.y == y && (s.x0..=s.x1).contains(&x))
    }

    /// Row-major pixel indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let w = self.dims.width as usize;
        self.spans
            .iter()
            .flat_map(move |s| (s.x0..=s.x1).map(move |x| s.y as usize * w + x as usize))
    }
}

fn blend_channel(dst: u8, src: u8, alpha: f64) -> u8 {
    let v = alpha * f64::from(src) + (1.0 - alpha) * f64::from(dst);
    // f64::round rounds half away from zero
    v.round().clamp(0.0, 255.0) as u8
}

/// `alpha * src + (1 - alpha) * dst` per channel, rounded half away from
/// zero and clamped to `[0, 255]`.
pub fn blend_pixel(dst: Color, src: Color, alpha: f64) -> Color {
    Color::new(
        blend_channel(dst.r, src.r, alpha),
        blend_channel(dst.g, src.g, alpha),
        blend_channel(dst.b, src.b, alpha),
    )
}

/// Precomputed `blend_pixel` results for one source color and alpha.
struct BlendTable {
    channels: [[u8; 256]; 3],
}

impl BlendTable {
    fn new(src: Color, alpha: f64) -> Self {
        let mut channels = [[0u8; 256]; 3];
        for (table, s) in channels.iter_mut().zip(src.channels()) {
            for (d, out) in table.iter_mut().enumerate() {
                *out = blend_channel(d as u8, s, alpha);
            }
        }
        Self { channels }
    }

    #[inline]
    fn apply(&self, dst: Color) -> Color {
        Color::new(
            self.channels[0][dst.r as usize],
            self.channels[1][dst.g as usize],
            self.channels[2][dst.b as usize],
        )
    }
}

pub fn render_gene(canvas: &mut ImageBuffer, gene: &Gene) {
    let mask = coverage(&gene.shape, canvas.dims());
    canvas.blend_mask(&mask, gene.color, gene.alpha);
}

/// Renders `genome` onto a fresh black canvas, first gene at the bottom.
pub fn render(genome: &Genome) -> ImageBuffer {
    let mut canvas = ImageBuffer::black(genome.canvas);
    for gene in &genome.genes {
        render_gene(&mut canvas, gene);
    }
    canvas
}
