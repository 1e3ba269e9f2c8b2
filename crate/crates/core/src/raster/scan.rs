//! Binary coverage of shapes at pixel centers.
//!
//! All membership decisions are made in exact integer arithmetic on doubled
//! coordinates: a lattice point `(x, y)` becomes `(2x, 2y)` and the center of
//! pixel `(x, y)` becomes `(2x + 1, 2y + 1)`. Row centers are therefore odd
//! while every vertex is even, so a scanline never passes through a vertex.

use super::CoverageMask;
use crate::genome::{CanvasDims, Point, Shape};

pub fn coverage(shape: &Shape, dims: CanvasDims) -> CoverageMask {
    match shape {
        Shape::Polygon { vertices } => rasterize_polygon(vertices, dims),
        Shape::Circle { center, radius } => rasterize_circle(*center, *radius, dims),
        Shape::Line {
            endpoints,
            thickness,
        } => rasterize_line(endpoints[0], endpoints[1], *thickness, dims),
    }
}

fn floor_div(n: i128, d: i128) -> i128 {
    n.div_euclid(d)
}

fn ceil_div(n: i128, d: i128) -> i128 {
    -(-n).div_euclid(d)
}

/// Clips `[lo, hi]` to the canvas row and pushes it if non-empty.
fn push_clipped(mask: &mut CoverageMask, y: u32, lo: i128, hi: i128) {
    let w = i128::from(mask.dims().width);
    let lo = lo.max(0);
    let hi = hi.min(w - 1);
    if lo <= hi {
        mask.push(y, lo as u32, hi as u32);
    }
}

/// Rational `num / den` with `den > 0`.
#[derive(Clone, Copy)]
struct Crossing {
    num: i128,
    den: i128,
}

impl Crossing {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Even-odd fill. Pixel centers lying exactly on an edge are covered.
pub fn rasterize_polygon(vertices: &[Point], dims: CanvasDims) -> CoverageMask {
    let mut mask = CoverageMask::new(dims);
    if vertices.len() < 2 {
        return mask;
    }
    let pts: Vec<(i128, i128)> = vertices
        .iter()
        .map(|p| (2 * i128::from(p.x), 2 * i128::from(p.y)))
        .collect();
    let ymin = pts.iter().map(|p| p.1).min().unwrap();
    let ymax = pts.iter().map(|p| p.1).max().unwrap();
    // rows whose doubled center 2y + 1 lies strictly inside (ymin, ymax)
    let row_lo = ceil_div(ymin, 2).max(0);
    let row_hi = floor_div(ymax - 2, 2).min(i128::from(dims.height) - 1);

    let mut crossings: Vec<Crossing> = Vec::with_capacity(pts.len());
    for y in row_lo..=row_hi {
        let yc = 2 * y + 1;
        crossings.clear();
        for (i, &(ax, ay)) in pts.iter().enumerate() {
            let (bx, by) = pts[(i + 1) % pts.len()];
            if (ay > yc) == (by > yc) {
                continue;
            }
            // x = ax + (yc - ay) * (bx - ax) / (by - ay)
            let mut den = by - ay;
            let mut num = ax * den + (yc - ay) * (bx - ax);
            if den < 0 {
                den = -den;
                num = -num;
            }
            crossings.push(Crossing { num, den });
        }
        crossings.sort_by(Crossing::cmp);
        for pair in crossings.chunks_exact(2) {
            let (lo, hi) = (pair[0], pair[1]);
            // lo <= 2x + 1 <= hi
            let x0 = ceil_div(lo.num - lo.den, 2 * lo.den);
            let x1 = floor_div(hi.num - hi.den, 2 * hi.den);
            push_clipped(&mut mask, y as u32, x0, x1);
        }
    }
    mask
}

fn isqrt(s: i128) -> i128 {
    debug_assert!(s >= 0);
    let mut m = (s as f64).sqrt() as i128;
    while m * m > s {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= s {
        m += 1;
    }
    m
}

/// Pixels whose center lies within `radius + 0.5` of `center`.
pub fn rasterize_circle(center: Point, radius: u32, dims: CanvasDims) -> CoverageMask {
    let mut mask = CoverageMask::new(dims);
    let (cx, cy) = (2 * i128::from(center.x), 2 * i128::from(center.y));
    let r2 = {
        let r = 2 * i128::from(radius) + 1;
        r * r
    };
    let reach = i128::from(radius) + 1;
    let y_lo = (i128::from(center.y) - reach).max(0);
    let y_hi = (i128::from(center.y) + reach).min(i128::from(dims.height) - 1);
    for y in y_lo..=y_hi {
        let dy = 2 * y + 1 - cy;
        let s = r2 - dy * dy;
        if s < 0 {
            continue;
        }
        let m = isqrt(s);
        // -m <= 2x + 1 - cx <= m
        let x0 = ceil_div(cx - 1 - m, 2);
        let x1 = floor_div(cx - 1 + m, 2);
        push_clipped(&mut mask, y as u32, x0, x1);
    }
    mask
}

/// Exact capsule membership in doubled coordinates.
struct Capsule {
    a: (i128, i128),
    b: (i128, i128),
    d: (i128, i128),
    len2: i128,
    t2: i128,
}

impl Capsule {
    fn new(p0: Point, p1: Point, thickness: u32) -> Self {
        let a = (2 * i128::from(p0.x), 2 * i128::from(p0.y));
        let b = (2 * i128::from(p1.x), 2 * i128::from(p1.y));
        let d = (b.0 - a.0, b.1 - a.1);
        // thickness / 2 in plain coordinates is `thickness` once doubled
        let t = i128::from(thickness);
        Self {
            a,
            b,
            d,
            len2: d.0 * d.0 + d.1 * d.1,
            t2: t * t,
        }
    }

    fn covers(&self, x: i128, y: i128) -> bool {
        let p = (2 * x + 1, 2 * y + 1);
        let pa = (p.0 - self.a.0, p.1 - self.a.1);
        let along = pa.0 * self.d.0 + pa.1 * self.d.1;
        if along <= 0 {
            return pa.0 * pa.0 + pa.1 * pa.1 <= self.t2;
        }
        if along >= self.len2 {
            let pb = (p.0 - self.b.0, p.1 - self.b.1);
            return pb.0 * pb.0 + pb.1 * pb.1 <= self.t2;
        }
        let cross = self.d.0 * pa.1 - self.d.1 * pa.0;
        cross * cross <= self.t2 * self.len2
    }
}

/// Interval of `x` with `lo <= a * x + b <= hi`, or `None`.
fn linear_band(a: f64, b: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return (lo <= b && b <= hi).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (u, v) = ((lo - b) / a, (hi - b) / a);
    Some((u.min(v), u.max(v)))
}

fn hull(acc: Option<(f64, f64)>, next: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (acc, next) {
        (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
        (a, b) => a.or(b),
    }
}

/// Pixels whose center lies within `thickness / 2` of the closed segment
/// `[p0, p1]`.
pub fn rasterize_line(p0: Point, p1: Point, thickness: u32, dims: CanvasDims) -> CoverageMask {
    const EPS: f64 = 1e-6;
    let mut mask = CoverageMask::new(dims);
    let capsule = Capsule::new(p0, p1, thickness);
    let r = f64::from(thickness) / 2.0;
    let (ax, ay) = (f64::from(p0.x), f64::from(p0.y));
    let (bx, by) = (f64::from(p1.x), f64::from(p1.y));
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let len = len2.sqrt();
    let w = i128::from(dims.width);

    let reach = (r.ceil() as i128) + 1;
    let y_lo = (i128::from(p0.y.min(p1.y)) - reach).max(0);
    let y_hi = (i128::from(p0.y.max(p1.y)) + reach).min(i128::from(dims.height) - 1);

    let disc = |cx: f64, cy: f64, py: f64| {
        let h = r * r - (py - cy) * (py - cy);
        (h >= -EPS).then(|| {
            let s = h.max(0.0).sqrt();
            (cx - s, cx + s)
        })
    };

    for y in y_lo..=y_hi {
        let py = y as f64 + 0.5;
        // float estimate of the row section: hull of both end discs and the
        // body, where 0 <= (P - A).d <= |d|^2 and |d x (P - A)| <= r|d|
        let mut est = hull(disc(ax, ay, py), disc(bx, by, py));
        if len2 > 0.0 {
            let along = linear_band(dx, (py - ay) * dy - ax * dx, -EPS, len2 + EPS);
            let across = linear_band(-dy, dx * (py - ay) + dy * ax, -r * len - EPS, r * len + EPS);
            if let (Some(u), Some(v)) = (along, across) {
                let (lo, hi) = (u.0.max(v.0), u.1.min(v.1));
                if lo <= hi {
                    est = hull(est, Some((lo, hi)));
                }
            }
        }
        let Some((lo, hi)) = est else { continue };

        // candidate pixels, then settle both ends with the exact test
        let mut x0 = ((lo - 0.5 - EPS).ceil() as i128).max(0);
        let mut x1 = ((hi - 0.5 + EPS).floor() as i128).min(w - 1);
        while x0 <= x1 && !capsule.covers(x0, y) {
            x0 += 1;
        }
        while x1 >= x0 && !capsule.covers(x1, y) {
            x1 -= 1;
        }
        if x0 > x1 {
            continue;
        }
        while x0 > 0 && capsule.covers(x0 - 1, y) {
            x0 -= 1;
        }
        while x1 < w - 1 && capsule.covers(x1 + 1, y) {
            x1 += 1;
        }
        mask.push(y as u32, x0 as u32, x1 as u32);
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(w: u32, h: u32) -> CanvasDims {
        CanvasDims::new(w, h).unwrap()
    }

    fn pts(v: &[(u32, u32)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn grid(mask: &CoverageMask) -> Vec<String> {
        let d = mask.dims();
        (0..d.height)
            .map(|y| {
                (0..d.width)
                    .map(|x| if mask.contains(x, y) { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn small_triangle() {
        // centers on the hypotenuse x + y = 3 count as covered
        let m = rasterize_polygon(&pts(&[(0, 0), (3, 0), (0, 3)]), dims(4, 4));
        assert_eq!(grid(&m), ["###.", "##..", "#...", "...."]);
    }

    #[test]
    fn collinear_polygon_is_empty() {
        let m = rasterize_polygon(&pts(&[(0, 0), (2, 0), (4, 0)]), dims(5, 5));
        assert!(m.is_empty());
    }

    #[test]
    fn full_rectangle_covers_interior() {
        let m = rasterize_polygon(&pts(&[(0, 0), (5, 0), (5, 3), (0, 3)]), dims(6, 4));
        assert_eq!(m.len(), 15);
        for y in 0..3 {
            for x in 0..5 {
                assert!(m.contains(x, y));
            }
        }
    }

    #[test]
    fn self_intersecting_bowtie_uses_even_odd() {
        let m = rasterize_polygon(&pts(&[(0, 0), (6, 6), (6, 0), (0, 6)]), dims(7, 7));
        // side lobes are filled, top and bottom wedges are outside
        assert!(m.contains(0, 3));
        assert!(m.contains(5, 3));
        assert!(!m.contains(3, 1));
        assert!(!m.contains(3, 5));
    }

    #[test]
    fn radius_one_is_two_by_two() {
        let m = rasterize_circle(Point::new(2, 2), 1, dims(5, 5));
        assert_eq!(grid(&m), [".....", ".##..", ".##..", ".....", "....."]);
    }

    #[test]
    fn circle_clips_at_corner() {
        let m = rasterize_circle(Point::new(0, 0), 1, dims(4, 4));
        assert_eq!(m.indices().collect::<Vec<_>>(), [0]);
    }

    #[test]
    fn huge_circle_covers_canvas() {
        let m = rasterize_circle(Point::new(3, 1), 40, dims(9, 7));
        assert_eq!(m.len(), 63);
    }

    #[test]
    fn point_line_matches_disc() {
        let d = dims(8, 8);
        let line = rasterize_line(Point::new(3, 3), Point::new(3, 3), 2, d);
        let disc = rasterize_circle(Point::new(3, 3), 1, d);
        assert_eq!(line, disc);
    }

    #[test]
    fn thin_horizontal_line() {
        let m = rasterize_line(Point::new(1, 2), Point::new(6, 2), 1, dims(8, 5));
        assert_eq!(
            grid(&m),
            ["........", ".#####..", ".#####..", "........", "........"]
        );
    }

    #[test]
    fn line_symmetric_in_endpoints() {
        let d = dims(16, 16);
        let a = rasterize_line(Point::new(2, 3), Point::new(13, 11), 3, d);
        let b = rasterize_line(Point::new(13, 11), Point::new(2, 3), 3, d);
        assert_eq!(a, b);
    }
}
