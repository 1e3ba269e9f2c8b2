//! Heritable representation: shape genes, the genome that orders them, and
//! the legal parameter ranges every gene must respect.

mod format;

pub use format::{deserialize_genome, serialize_genome, FormatError, FORMAT_VERSION};

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("canvas must be at least 1x1, got {width}x{height}")]
    EmptyCanvas { width: u32, height: u32 },
    #[error("genome composition must contain at least one gene")]
    EmptyComposition,
    #[error("polygons need at least 3 vertices, got {0}")]
    TooFewVertices(usize),
}

/// Canvas size in pixels. Both sides are at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanvasDims {
    pub width: u32,
    pub height: u32,
}

impl CanvasDims {
    pub fn new(width: u32, height: u32) -> Result<Self, GenomeError> {
        if width == 0 || height == 0 {
            return Err(GenomeError::EmptyCanvas { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Largest legal circle radius: `ceil(max(w, h) / 2)`.
    pub fn max_radius(&self) -> u32 {
        self.width.max(self.height).div_ceil(2).max(1)
    }

    /// Largest legal line thickness: `max(1, floor(min(w, h) / 20))`.
    pub fn max_thickness(&self) -> u32 {
        (self.width.min(self.height) / 20).max(1)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x < self.width && p.y < self.height
    }
}

impl fmt::Display for CanvasDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const BLACK: Color = Color { r: 0, g: 0, b: 0 };

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub fn channels(&self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    pub fn from_channels(c: [u8; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

/// Integer lattice point. Pixel `(x, y)` covers the unit square whose
/// center is `(x + 0.5, y + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Polygon,
    Circle,
    Line,
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Polygon => "polygon",
            ShapeKind::Circle => "circle",
            ShapeKind::Line => "line",
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind-specific geometry of a gene.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Polygon {
        vertices: Vec<Point>,
    },
    Circle {
        center: Point,
        radius: u32,
    },
    Line {
        endpoints: [Point; 2],
        thickness: u32,
    },
}

impl Shape {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Polygon { .. } => ShapeKind::Polygon,
            Shape::Circle { .. } => ShapeKind::Circle,
            Shape::Line { .. } => ShapeKind::Line,
        }
    }

    /// Defining points: all polygon vertices, the circle center, or both
    /// line endpoints.
    pub fn points(&self) -> &[Point] {
        match self {
            Shape::Polygon { vertices } => vertices,
            Shape::Circle { center, .. } => std::slice::from_ref(center),
            Shape::Line { endpoints, .. } => endpoints,
        }
    }

    pub fn points_mut(&mut self) -> &mut [Point] {
        match self {
            Shape::Polygon { vertices } => vertices,
            Shape::Circle { center, .. } => std::slice::from_mut(center),
            Shape::Line { endpoints, .. } => endpoints,
        }
    }
}

/// One shape's heritable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gene {
    pub color: Color,
    /// Opacity in `[0, 1]`.
    pub alpha: f64,
    pub shape: Shape,
}

impl Gene {
    pub fn kind(&self) -> ShapeKind {
        self.shape.kind()
    }
}

/// Ordered genes over a canvas. Later genes render on top of earlier ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub canvas: CanvasDims,
    pub genes: Vec<Gene>,
}

impl Genome {
    pub fn new(canvas: CanvasDims, genes: Vec<Gene>) -> Self {
        Self { canvas, genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Gene counts as `(polygons, circles, lines)`.
    pub fn kind_counts(&self) -> (usize, usize, usize) {
        self.genes
            .iter()
            .fold((0, 0, 0), |(p, c, l), g| match g.kind() {
                ShapeKind::Polygon => (p + 1, c, l),
                ShapeKind::Circle => (p, c + 1, l),
                ShapeKind::Line => (p, c, l + 1),
            })
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_genome(self)
    }
}

/// How many genes of each kind a genome carries, and the shared polygon
/// vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenomeComposition {
    pub polygons: usize,
    pub circles: usize,
    pub lines: usize,
    pub vertices_per_polygon: usize,
}

impl Default for GenomeComposition {
    fn default() -> Self {
        Self {
            polygons: 20,
            circles: 0,
            lines: 0,
            vertices_per_polygon: 3,
        }
    }
}

impl GenomeComposition {
    pub fn new(
        polygons: usize,
        circles: usize,
        lines: usize,
        vertices_per_polygon: usize,
    ) -> Result<Self, GenomeError> {
        let c = Self {
            polygons,
            circles,
            lines,
            vertices_per_polygon,
        };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<(), GenomeError> {
        if self.total() == 0 {
            return Err(GenomeError::EmptyComposition);
        }
        if self.vertices_per_polygon < 3 {
            return Err(GenomeError::TooFewVertices(self.vertices_per_polygon));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.polygons + self.circles + self.lines
    }

    /// Kinds in initialization order: polygons, then circles, then lines.
    pub fn kinds(&self) -> impl Iterator<Item = ShapeKind> {
        std::iter::repeat_n(ShapeKind::Polygon, self.polygons)
            .chain(std::iter::repeat_n(ShapeKind::Circle, self.circles))
            .chain(std::iter::repeat_n(ShapeKind::Line, self.lines))
    }
}

pub(crate) fn random_point<R: Rng + ?Sized>(canvas: CanvasDims, rng: &mut R) -> Point {
    Point::new(
        rng.gen_range(0..canvas.width),
        rng.gen_range(0..canvas.height),
    )
}

pub(crate) fn random_color<R: Rng + ?Sized>(rng: &mut R) -> Color {
    Color::new(rng.gen(), rng.gen(), rng.gen())
}

pub(crate) fn random_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..=1.0)
}

/// Draws every parameter of a gene of `kind` uniformly from its legal range.
pub fn random_gene<R: Rng + ?Sized>(
    kind: ShapeKind,
    composition: &GenomeComposition,
    canvas: CanvasDims,
    rng: &mut R,
) -> Gene {
    let color = random_color(rng);
    let alpha = random_alpha(rng);
    let shape = match kind {
        ShapeKind::Polygon => Shape::Polygon {
            vertices: (0..composition.vertices_per_polygon.max(3))
                .map(|_| random_point(canvas, rng))
                .collect(),
        },
        ShapeKind::Circle => Shape::Circle {
            center: random_point(canvas, rng),
            radius: rng.gen_range(1..=canvas.max_radius()),
        },
        ShapeKind::Line => Shape::Line {
            endpoints: [random_point(canvas, rng), random_point(canvas, rng)],
            thickness: rng.gen_range(1..=canvas.max_thickness()),
        },
    };
    Gene {
        color,
        alpha,
        shape,
    }
}

/// Random genome laid out as a polygon block, a circle block, then a line
/// block.
pub fn random_genome<R: Rng + ?Sized>(
    composition: &GenomeComposition,
    canvas: CanvasDims,
    rng: &mut R,
) -> Result<Genome, GenomeError> {
    composition.check()?;
    let genes = composition
        .kinds()
        .map(|kind| random_gene(kind, composition, canvas, rng))
        .collect();
    Ok(Genome::new(canvas, genes))
}

/// A breached invariant. `gene` is `None` for genome-level problems.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub gene: Option<usize>,
    pub field: String,
    pub detail: String,
}

impl Violation {
    fn at(gene: usize, field: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            gene: Some(gene),
            field: field.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gene {
            Some(i) => write!(f, "gene {i}: {}: {}", self.field, self.detail),
            None => write!(f, "genome: {}: {}", self.field, self.detail),
        }
    }
}

/// Lists every invariant the genome breaks; empty when it is valid.
pub fn validate_genome(genome: &Genome) -> Vec<Violation> {
    let canvas = genome.canvas;
    let mut out = Vec::new();
    if canvas.width == 0 || canvas.height == 0 {
        out.push(Violation {
            gene: None,
            field: "canvas".into(),
            detail: format!("{canvas} has an empty side"),
        });
        return out;
    }
    if genome.genes.is_empty() {
        out.push(Violation {
            gene: None,
            field: "genes".into(),
            detail: "genome has no genes".into(),
        });
    }

    let mut polygon_vertices: Option<usize> = None;
    for (i, gene) in genome.genes.iter().enumerate() {
        if !(0.0..=1.0).contains(&gene.alpha) {
            out.push(Violation::at(
                i,
                "alpha",
                format!("{} outside [0, 1]", gene.alpha),
            ));
        }
        let field = match gene.kind() {
            ShapeKind::Polygon => "vertices",
            ShapeKind::Circle => "center",
            ShapeKind::Line => "endpoints",
        };
        for (j, p) in gene.shape.points().iter().enumerate() {
            if p.x >= canvas.width {
                out.push(Violation::at(
                    i,
                    format!("{field}[{j}].x"),
                    format!("{} outside [0, {}]", p.x, canvas.width - 1),
                ));
            }
            if p.y >= canvas.height {
                out.push(Violation::at(
                    i,
                    format!("{field}[{j}].y"),
                    format!("{} outside [0, {}]", p.y, canvas.height - 1),
                ));
            }
        }
        match &gene.shape {
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    out.push(Violation::at(
                        i,
                        "vertices",
                        format!("{} vertices, need at least 3", vertices.len()),
                    ));
                }
                match polygon_vertices {
                    None => polygon_vertices = Some(vertices.len()),
                    Some(n) if n != vertices.len() => out.push(Violation::at(
                        i,
                        "vertices",
                        format!("{} vertices, other polygons have {n}", vertices.len()),
                    )),
                    Some(_) => {}
                }
            }
            Shape::Circle { radius, .. } => {
                let max = canvas.max_radius();
                if !(1..=max).contains(radius) {
                    out.push(Violation::at(
                        i,
                        "radius",
                        format!("{radius} outside [1, {max}]"),
                    ));
                }
            }
            Shape::Line { thickness, .. } => {
                let max = canvas.max_thickness();
                if !(1..=max).contains(thickness) {
                    out.push(Violation::at(
                        i,
                        "thickness",
                        format!("{thickness} outside [1, {max}]"),
                    ));
                }
            }
        }
    }
    out
}
