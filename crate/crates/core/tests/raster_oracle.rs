mod common;

use common::{mismatches, random_dims, random_shape};
use evoshapes::genome::{CanvasDims, Point, Shape, ShapeKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_kind(kind: ShapeKind, seed: u64, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let dims = random_dims(&mut rng);
        let shape = random_shape(kind, dims, &mut rng);
        let bad = mismatches(&shape, dims);
        assert!(
            bad.is_empty(),
            "shape #{i} {shape:?} on {dims}: mismatched pixels {bad:?}"
        );
    }
}

#[test]
fn polygons_match_point_in_polygon_oracle() {
    check_kind(ShapeKind::Polygon, 11, 3000);
}

#[test]
fn circles_match_distance_oracle() {
    check_kind(ShapeKind::Circle, 12, 3000);
}

#[test]
fn lines_match_capsule_oracle() {
    check_kind(ShapeKind::Line, 13, 3000);
}

#[test]
fn degenerate_polygons_match_oracle() {
    let dims = CanvasDims::new(8, 8).unwrap();
    let p = |x, y| Point::new(x, y);
    let cases = [
        vec![p(0, 0), p(4, 4), p(2, 2)],
        vec![p(3, 3), p(3, 3), p(3, 3)],
        vec![p(1, 1), p(6, 1), p(1, 1)],
        vec![p(0, 0), p(7, 7), p(7, 0), p(0, 7)],
        vec![p(0, 0), p(6, 0), p(6, 6), p(0, 6), p(0, 0), p(3, 3)],
        vec![p(1, 0), p(3, 6), p(5, 0), p(0, 4), p(6, 4)],
    ];
    for vertices in cases {
        let shape = Shape::Polygon { vertices };
        assert_eq!(mismatches(&shape, dims), vec![], "{shape:?}");
    }
}

fn any_dims() -> impl Strategy<Value = CanvasDims> {
    (1u32..=16, 1u32..=16).prop_map(|(w, h)| CanvasDims::new(w, h).unwrap())
}

fn shape_on(dims: CanvasDims) -> impl Strategy<Value = Shape> {
    let pt = (0..dims.width, 0..dims.height).prop_map(|(x, y)| Point::new(x, y));
    prop_oneof![
        prop::collection::vec(pt.clone(), 3..=8).prop_map(|vertices| Shape::Polygon { vertices }),
        (pt.clone(), 1u32..=12).prop_map(|(center, radius)| Shape::Circle { center, radius }),
        (pt.clone(), pt, 1u32..=8).prop_map(|(a, b, thickness)| Shape::Line {
            endpoints: [a, b],
            thickness
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn coverage_equals_brute_force(
        (dims, shape) in any_dims().prop_flat_map(|d| (Just(d), shape_on(d)))
    ) {
        prop_assert_eq!(mismatches(&shape, dims), vec![]);
    }
}
