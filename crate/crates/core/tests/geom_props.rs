use plp_blindspot::geom::{
    cell_containing_origin, clip_halfplane, los_visible, segments_intersect, ConvexPolygon, FootPoint, Obstacle,
    ObstacleLine, Point2,
};
use plp_blindspot::stochproc::RngStream;
use proptest::prelude::*;
use rand::Rng;

fn point() -> impl Strategy<Value = Point2> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn line() -> impl Strategy<Value = ObstacleLine> {
    (1e-3..30.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| ObstacleLine::new(FootPoint::new(r, phi).unwrap()))
}

proptest! {
    #[test]
    fn clipping_never_grows_area(half in 0.5..40.0f64, lines in prop::collection::vec(line(), 1..12)) {
        let mut poly = ConvexPolygon::square(half);
        for l in &lines {
            let next = clip_halfplane(&poly, l);
            prop_assert!(next.area() <= poly.area() * (1.0 + 1e-12) + 1e-9);
            poly = next;
        }
    }

    #[test]
    fn segment_test_is_symmetric(a1 in point(), a2 in point(), b1 in point(), b2 in point()) {
        let base = segments_intersect(a1, a2, b1, b2);
        prop_assert_eq!(base, segments_intersect(b1, b2, a1, a2));
        prop_assert_eq!(base, segments_intersect(a2, a1, b1, b2));
        prop_assert_eq!(base, segments_intersect(a1, a2, b2, b1));
        prop_assert_eq!(base, segments_intersect(b2, b1, a2, a1));
    }

    #[test]
    fn origin_cell_contains_origin(lines in prop::collection::vec(line(), 0..40)) {
        let cell = cell_containing_origin(&lines, 60.0).unwrap();
        prop_assert!(cell.polygon.contains(Point2::ORIGIN));
        prop_assert!(cell.polygon.area() > 0.0);
    }
}

/// Visibility from the origin past lines coincides with membership in the
/// origin's cell.
#[test]
fn visibility_matches_cell_membership() {
    let window = 40.0;
    let mut checked = 0;
    for i in 0..10_000u64 {
        let mut rng = RngStream::new(2024, i).generator();
        let n = rng.random_range(0..25);
        let lines: Vec<ObstacleLine> = (0..n)
            .map(|_| {
                let r = rng.random_range(0.05..35.0);
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                ObstacleLine::new(FootPoint::new(r, phi).unwrap())
            })
            .collect();
        let anchor = Point2::new(rng.random_range(-window..window), rng.random_range(-window..window));
        if anchor.norm() < 1e-6 || lines.iter().any(|l| l.signed_offset(anchor).abs() <= 1e-7) {
            continue;
        }
        let obstacles: Vec<Obstacle> = lines.iter().map(|&l| l.into()).collect();
        let visible = los_visible(Point2::ORIGIN, anchor, &obstacles).unwrap();
        let cell = cell_containing_origin(&lines, window).unwrap();
        assert_eq!(visible, cell.polygon.contains(anchor), "configuration {i}");
        checked += 1;
    }
    assert!(checked > 9_900);
}
