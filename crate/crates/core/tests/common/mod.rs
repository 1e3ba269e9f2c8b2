//! Independent brute-force oracles shared by the integration tests and the
//! acceptance suite.
//!
//! Each oracle visits every pixel and asks a direct geometric question about
//! its center, without spans, crossings lists or row bounds.
#![allow(dead_code)]

use std::path::PathBuf;

use evoshapes::genome::{CanvasDims, Color, Point, Shape, ShapeKind};
use evoshapes::raster::{coverage, load_png, CoverageMask};
use evoshapes::ImageBuffer;
use rand::Rng;

/// Target used by end-to-end tests: `ACCEPTANCE_TARGET` when set, otherwise
/// the bundled 200x200 portrait.
pub fn target_path() -> PathBuf {
    match std::env::var_os("ACCEPTANCE_TARGET") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/portrait_200.png"),
    }
}

pub fn load_target() -> ImageBuffer {
    let path = target_path();
    load_png(&path).unwrap_or_else(|e| panic!("cannot load target {}: {e}", path.display()))
}

/// Pixel centers are `(x + 1/2, y + 1/2)`; everything below works on doubled
/// coordinates so those centers are the odd integers.
fn center(x: u32, y: u32) -> (i128, i128) {
    (2 * i128::from(x) + 1, 2 * i128::from(y) + 1)
}

fn doubled(p: Point) -> (i128, i128) {
    (2 * i128::from(p.x), 2 * i128::from(p.y))
}

fn on_segment(p: (i128, i128), a: (i128, i128), b: (i128, i128)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Even-odd point-in-polygon by casting a ray toward +x; boundary counts as
/// inside.
pub fn polygon_contains(vertices: &[Point], x: u32, y: u32) -> bool {
    let p = center(x, y);
    let pts: Vec<_> = vertices.iter().map(|&v| doubled(v)).collect();
    let n = pts.len();
    if (0..n).any(|i| on_segment(p, pts[i], pts[(i + 1) % n])) {
        return true;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) {
            // crossing x > p.x  <=>  a.x + (p.y - a.y)(b.x - a.x)/(b.y - a.y) > p.x
            let lhs = (p.1 - a.1) * (b.0 - a.0);
            let rhs = (p.0 - a.0) * (b.1 - a.1);
            let right_of_p = if b.1 > a.1 { lhs > rhs } else { lhs < rhs };
            if right_of_p {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance test in floating point; every quantity is a small multiple of
/// 1/4 so the comparison is exact.
pub fn circle_contains(c: Point, radius: u32, x: u32, y: u32) -> bool {
    let dx = f64::from(x) + 0.5 - f64::from(c.x);
    let dy = f64::from(y) + 0.5 - f64::from(c.y);
    let r = f64::from(radius) + 0.5;
    dx * dx + dy * dy <= r * r
}

/// Distance from the center to the closed segment is at most
/// `thickness / 2`.
pub fn capsule_contains(p0: Point, p1: Point, thickness: u32, x: u32, y: u32) -> bool {
    let p = center(x, y);
    let (a, b) = (doubled(p0), doubled(p1));
    // in doubled units the half-thickness is `thickness`
    let t2 = i128::from(thickness).pow(2);
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let (apx, apy) = (p.0 - a.0, p.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let dot = apx * abx + apy * aby;
    if len2 == 0 || dot <= 0 {
        return apx * apx + apy * apy <= t2;
    }
    if dot >= len2 {
        let (bpx, bpy) = (p.0 - b.0, p.1 - b.1);
        return bpx * bpx + bpy * bpy <= t2;
    }
    let cross = abx * apy - aby * apx;
    cross * cross <= t2 * len2
}

pub fn oracle_contains(shape: &Shape, x: u32, y: u32) -> bool {
    match shape {
        Shape::Polygon { vertices } => polygon_contains(vertices, x, y),
        Shape::Circle { center, radius } => circle_contains(*center, *radius, x, y),
        Shape::Line {
            endpoints,
            thickness,
        } => capsule_contains(endpoints[0], endpoints[1], *thickness, x, y),
    }
}

/// Pixels where the rasterizer and the oracle disagree.
pub fn mismatches(shape: &Shape, dims: CanvasDims) -> Vec<(u32, u32)> {
    let mask: CoverageMask = coverage(shape, dims);
    let mut out = Vec::new();
    for y in 0..dims.height {
        for x in 0..dims.width {
            if mask.contains(x, y) != oracle_contains(shape, x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Random shape on `dims`. Sizes go past the genome's legal bounds so the
/// clipping paths are exercised too.
pub fn random_shape<R: Rng>(kind: ShapeKind, dims: CanvasDims, rng: &mut R) -> Shape {
    match kind {
        ShapeKind::Polygon => {
            let n = rng.gen_range(3..=8);
            Shape::Polygon {
                vertices: (0..n).map(|_| random_point(dims, rng)).collect(),
            }
        }
        ShapeKind::Circle => Shape::Circle {
            center: random_point(dims, rng),
            radius: rng.gen_range(1..=12),
        },
        ShapeKind::Line => Shape::Line {
            endpoints: [random_point(dims, rng), random_point(dims, rng)],
            thickness: rng.gen_range(1..=8),
        },
    }
}

fn random_point<R: Rng>(dims: CanvasDims, rng: &mut R) -> Point {
    Point::new(rng.gen_range(0..dims.width), rng.gen_range(0..dims.height))
}

pub fn random_dims<R: Rng>(rng: &mut R) -> CanvasDims {
    CanvasDims::new(rng.gen_range(1..=16), rng.gen_range(1..=16)).unwrap()
}

pub fn random_buffer<R: Rng>(dims: CanvasDims, rng: &mut R) -> ImageBuffer {
    let pixels = (0..dims.pixel_count())
        .map(|_| Color::new(rng.gen(), rng.gen(), rng.gen()))
        .collect();
    ImageBuffer::from_pixels(dims, pixels).unwrap()
}

/// Sum over rows, columns and channels of |a - b|, one term at a time.
pub fn naive_absolute(a: &ImageBuffer, b: &ImageBuffer) -> u64 {
    let dims = a.dims();
    let mut total: i64 = 0;
    for y in 0..dims.height {
        for x in 0..dims.width {
            let (pa, pb) = (a.get(x, y), b.get(x, y));
            let (ca, cb) = ([pa.r, pa.g, pa.b], [pb.r, pb.g, pb.b]);
            for c in 0..3 {
                total += (i64::from(ca[c]) - i64::from(cb[c])).abs();
            }
        }
    }
    total as u64
}
