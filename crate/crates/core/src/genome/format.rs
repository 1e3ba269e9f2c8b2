//! JSON genome files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "canvas": { "width": 200, "height": 200 },
//!   "genes": [
//!     { "kind": "polygon", "color": [65, 6, 197], "alpha": 0.64,
//!       "vertices": [[22, 36], [110, 172], [72, 0]] },
//!     { "kind": "circle", "color": [243, 159, 253], "alpha": 0.77,
//!       "center": [59, 182], "radius": 97 },
//!     { "kind": "line", "color": [35, 89, 71], "alpha": 0.12,
//!       "endpoints": [[51, 130], [162, 60]], "thickness": 6 }
//!   ]
//! }
//! ```
//!
//! Array order is render order. Alpha is written as the shortest decimal
//! that parses back to the identical `f64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_genome, CanvasDims, Color, Gene, Genome, Point, Shape, Violation};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("genome parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported genome format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("genome violates {} invariant(s): {}", .0.len(), join(.0))]
    Invalid(Vec<Violation>),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenomeFile {
    version: u32,
    canvas: CanvasRecord,
    genes: Vec<GeneRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanvasRecord {
    width: u32,
    height: u32,
}

type XY = [u32; 2];

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum GeneRecord {
    Polygon {
        color: [u8; 3],
        alpha: f64,
        vertices: Vec<XY>,
    },
    Circle {
        color: [u8; 3],
        alpha: f64,
        center: XY,
        radius: u32,
    },
    Line {
        color: [u8; 3],
        alpha: f64,
        endpoints: [XY; 2],
        thickness: u32,
    },
}

fn xy(p: Point) -> XY {
    [p.x, p.y]
}

fn pt(p: XY) -> Point {
    Point::new(p[0], p[1])
}

impl From<&Gene> for GeneRecord {
    fn from(g: &Gene) -> Self {
        let color = g.color.channels();
        let alpha = g.alpha;
        match &g.shape {
            Shape::Polygon { vertices } => GeneRecord::Polygon {
                color,
                alpha,
                vertices: vertices.iter().copied().map(xy).collect(),
            },
            Shape::Circle { center, radius } => GeneRecord::Circle {
                color,
                alpha,
                center: xy(*center),
                radius: *radius,
            },
            Shape::Line {
                endpoints,
                thickness,
            } => GeneRecord::Line {
                color,
                alpha,
                endpoints: [xy(endpoints[0]), xy(endpoints[1])],
                thickness: *thickness,
            },
        }
    }
}

impl From<GeneRecord> for Gene {
    fn from(r: GeneRecord) -> Self {
        let (color, alpha, shape) = match r {
            GeneRecord::Polygon {
                color,
                alpha,
                vertices,
            } => (
                color,
                alpha,
                Shape::Polygon {
                    vertices: vertices.into_iter().map(pt).collect(),
                },
            ),
            GeneRecord::Circle {
                color,
                alpha,
                center,
                radius,
            } => (
                color,
                alpha,
                Shape::Circle {
                    center: pt(center),
                    radius,
                },
            ),
            GeneRecord::Line {
                color,
                alpha,
                endpoints,
                thickness,
            } => (
                color,
                alpha,
                Shape::Line {
                    endpoints: [pt(endpoints[0]), pt(endpoints[1])],
                    thickness,
                },
            ),
        };
        Gene {
            color: Color::from_channels(color),
            alpha,
            shape,
        }
    }
}

pub fn serialize_genome(genome: &Genome) -> String {
    let file = GenomeFile {
        version: FORMAT_VERSION,
        canvas: CanvasRecord {
            width: genome.canvas.width,
            height: genome.canvas.height,
        },
        genes: genome.genes.iter().map(GeneRecord::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("genome records always serialize");
    s.push('\n');
    s
}

/// Parses and validates a genome document.
pub fn deserialize_genome(text: &str) -> Result<Genome, FormatError> {
    let file: GenomeFile = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.version != FORMAT_VERSION {
        return Err(FormatError::Version(file.version));
    }
    // A zero-sized canvas is reported through validation below.
    let canvas = CanvasDims {
        width: file.canvas.width,
        height: file.canvas.height,
    };
    let genome = Genome::new(canvas, file.genes.into_iter().map(Gene::from).collect());
    let violations = validate_genome(&genome);
    if violations.is_empty() {
        Ok(genome)
    } else {
        Err(FormatError::Invalid(violations))
    }
}
