//! Planar predicates and constructions used by both the simulator and the
//! cell-area sampler.
//!
//! Obstacles are identified by their foot point `p = (r, φ)`, the projection
//! of the origin onto the obstacle line `x cos φ + y sin φ = r`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative geometric tolerance; multiplied by the largest input magnitude.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { x: r * c, y: r * s }
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Polar coordinates `(r, φ)` of the projection of the origin onto a line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootPoint {
    r: f64,
    phi: f64,
}

impl FootPoint {
    /// `phi` is reduced to `[0, 2π)`.
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(invalid(format!("foot distance must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(invalid(format!("foot angle must be finite, got {phi}")));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { r, phi })
    }

    pub fn from_point(p: Point2) -> Self {
        let phi = p.y.atan2(p.x).rem_euclid(TAU);
        Self {
            r: p.norm(),
            phi: if phi >= TAU { 0.0 } else { phi },
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_point(self) -> Point2 {
        Point2::from_polar(self.r, self.phi)
    }
}

/// Returns a point on the line and its unit direction `(−sin φ, cos φ)`.
pub fn line_from_foot(foot: FootPoint) -> (Point2, Point2) {
    let (s, c) = foot.phi.sin_cos();
    (Point2::new(foot.r * c, foot.r * s), Point2::new(-s, c))
}

/// The infinite line `x cos φ + y sin φ = r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstacleLine {
    foot: FootPoint,
    normal: Point2,
}

impl ObstacleLine {
    pub fn new(foot: FootPoint) -> Self {
        let (s, c) = foot.phi.sin_cos();
        Self {
            foot,
            normal: Point2::new(c, s),
        }
    }

    pub fn foot(&self) -> FootPoint {
        self.foot
    }

    /// Unit normal pointing away from the origin.
    pub fn normal(&self) -> Point2 {
        self.normal
    }

    /// `q·n − r`: negative on the origin's side.
    #[inline]
    pub fn signed_offset(&self, q: Point2) -> f64 {
        q.dot(self.normal) - self.foot.r
    }
}

/// A segment of length `2·half_length` centred at its foot point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstacleSegment {
    line: ObstacleLine,
    half_length: f64,
    ends: [Point2; 2],
}

impl ObstacleSegment {
    pub fn new(foot: FootPoint, half_length: f64) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(invalid(format!(
                "segment half-length must be finite and > 0, got {half_length}"
            )));
        }
        let (mid, dir) = line_from_foot(foot);
        Ok(Self {
            line: ObstacleLine::new(foot),
            half_length,
            ends: [mid - dir * half_length, mid + dir * half_length],
        })
    }

    pub fn foot(&self) -> FootPoint {
        self.line.foot
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn line(&self) -> &ObstacleLine {
        &self.line
    }

    pub fn endpoints(&self) -> (Point2, Point2) {
        (self.ends[0], self.ends[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Obstacle {
    Line(ObstacleLine),
    Segment(ObstacleSegment),
}

impl From<ObstacleLine> for Obstacle {
    fn from(l: ObstacleLine) -> Self {
        Obstacle::Line(l)
    }
}

impl From<ObstacleSegment> for Obstacle {
    fn from(s: ObstacleSegment) -> Self {
        Obstacle::Segment(s)
    }
}

#[inline]
fn orient_sign(a: Point2, b: Point2, c: Point2, tol: f64) -> i8 {
    let v = (b - a).cross(c - a);
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// `c` collinear with `a`-`b` lies within their bounding box.
#[inline]
fn within_box(a: Point2, b: Point2, c: Point2, tol: f64) -> bool {
    c.x <= a.x.max(b.x) + tol && c.x >= a.x.min(b.x) - tol && c.y <= a.y.max(b.y) + tol && c.y >= a.y.min(b.y) - tol
}

/// Closed-segment intersection test; touching endpoints count.
pub fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let scale = a1.max_abs().max(a2.max_abs()).max(b1.max_abs()).max(b2.max_abs());
    let tol = GEOM_TOL * scale;
    // orientation values are areas, so the tolerance carries one more length factor
    let area_tol = tol * scale.max(1.0);

    let d1 = orient_sign(b1, b2, a1, area_tol);
    let d2 = orient_sign(b1, b2, a2, area_tol);
    let d3 = orient_sign(a1, a2, b1, area_tol);
    let d4 = orient_sign(a1, a2, b2, area_tol);

    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && within_box(b1, b2, a1, tol))
        || (d2 == 0 && within_box(b1, b2, a2, tol))
        || (d3 == 0 && within_box(a1, a2, b1, tol))
        || (d4 == 0 && within_box(a1, a2, b2, tol))
}

/// Line-of-sight test between `target` and `anchor`.
///
/// A line blocks unless both endpoints lie strictly on the same side of it.
/// A segment blocks when it meets the closed link segment.
pub fn los_visible(target: Point2, anchor: Point2, obstacles: &[Obstacle]) -> Result<bool> {
    let scale = target.max_abs().max(anchor.max_abs()).max(1.0);
    if (anchor - target).max_abs() <= GEOM_TOL * scale {
        return Err(invalid("target and anchor coincide"));
    }
    Ok(obstacles.iter().all(|o| !o.blocks(target, anchor)))
}

impl Obstacle {
    /// Whether this obstacle cuts the closed link between `target` and `anchor`.
    #[inline]
    pub fn blocks(&self, target: Point2, anchor: Point2) -> bool {
        match self {
            Obstacle::Line(line) => {
                let st = line.signed_offset(target);
                let sa = line.signed_offset(anchor);
                !((st < 0.0 && sa < 0.0) || (st > 0.0 && sa > 0.0))
            }
            Obstacle::Segment(seg) => {
                // cheap reject: the link lies well inside one half-plane of the carrier line
                let st = seg.line.signed_offset(target);
                let sa = seg.line.signed_offset(anchor);
                let margin = 1e-6 * (1.0 + seg.line.foot.r + seg.half_length);
                if (st < -margin && sa < -margin) || (st > margin && sa > margin) {
                    return false;
                }
                let (e1, e2) = seg.endpoints();
                segments_intersect(target, anchor, e1, e2)
            }
        }
    }
}

/// Counter-clockwise convex polygon; an empty vertex list is the empty set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The axis-aligned square `[−h, h]²`.
    pub fn square(half_width: f64) -> Self {
        let h = half_width;
        Self {
            vertices: vec![
                Point2::new(-h, -h),
                Point2::new(h, -h),
                Point2::new(h, h),
                Point2::new(-h, h),
            ],
        }
    }

    /// Caller guarantees convexity and counter-clockwise order.
    pub fn from_vertices(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Closed membership test with the usual scaled tolerance.
    pub fn contains(&self, p: Point2) -> bool {
        if self.is_empty() {
            return false;
        }
        let scale = self
            .vertices
            .iter()
            .fold(p.max_abs(), |m, v| m.max(v.max_abs()))
            .max(1.0);
        let tol = GEOM_TOL * scale * scale;
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= -tol
        })
    }
}

/// Shoelace area, clamped at zero.
pub fn polygon_area(poly: &ConvexPolygon) -> f64 {
    let v = &poly.vertices;
    if v.len() < 3 {
        return 0.0;
    }
    let n = v.len();
    let twice: f64 = (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum();
    (0.5 * twice).max(0.0)
}

/// Intersects `poly` with the half-plane `{q : q·n ≤ r}` containing the origin side.
pub fn clip_halfplane(poly: &ConvexPolygon, line: &ObstacleLine) -> ConvexPolygon {
    let v = &poly.vertices;
    if v.len() < 3 {
        return ConvexPolygon::empty();
    }
    let offsets: Vec<f64> = v.iter().map(|&q| line.signed_offset(q)).collect();
    if offsets.iter().all(|&s| s <= 0.0) {
        return poly.clone();
    }
    if offsets.iter().all(|&s| s > 0.0) {
        return ConvexPolygon::empty();
    }

    let n = v.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, q) = (v[i], v[j]);
        let (sp, sq) = (offsets[i], offsets[j]);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp <= 0.0) != (sq <= 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    dedup_ring(&mut out);
    if out.len() < 3 {
        ConvexPolygon::empty()
    } else {
        ConvexPolygon { vertices: out }
    }
}

fn dedup_ring(pts: &mut Vec<Point2>) {
    let scale = pts.iter().fold(1.0_f64, |m, p| m.max(p.max_abs()));
    let tol = GEOM_TOL * scale;
    pts.dedup_by(|b, a| (*b - *a).max_abs() <= tol);
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).max_abs() <= tol {
        pts.pop();
    }
}

/// The cell of the line tessellation containing the origin, clipped to a window.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginCell {
    pub polygon: ConvexPolygon,
    /// Some vertex lies on the window boundary, so the true cell may be larger.
    pub truncated: bool,
}

/// Clips `[−W, W]²` by every line, keeping the origin's side of each.
pub fn cell_containing_origin(lines: &[ObstacleLine], window_halfwidth: f64) -> Result<OriginCell> {
    if !(window_halfwidth > 0.0) || !window_halfwidth.is_finite() {
        return Err(invalid(format!(
            "window half-width must be finite and > 0, got {window_halfwidth}"
        )));
    }
    let tol = GEOM_TOL * window_halfwidth;
    if let Some(l) = lines.iter().find(|l| l.foot.r <= tol) {
        return Err(invalid(format!(
            "line with foot distance {} passes through the origin",
            l.foot.r
        )));
    }

    // nearest lines first so the far ones usually miss the shrunken cell
    let mut order: Vec<&ObstacleLine> = lines.iter().collect();
    order.sort_by(|a, b| a.foot.r.total_cmp(&b.foot.r));
    let mut polygon = ConvexPolygon::square(window_halfwidth);
    for line in order {
        if polygon.vertices.iter().all(|&q| line.signed_offset(q) <= 0.0) {
            continue;
        }
        polygon = clip_halfplane(&polygon, line);
        if polygon.is_empty() {
            break;
        }
    }
    let edge = window_halfwidth - tol;
    let truncated = polygon.vertices.iter().any(|v| v.x.abs() >= edge || v.y.abs() >= edge);
    Ok(OriginCell { polygon, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn foot(r: f64, phi: f64) -> FootPoint {
        FootPoint::new(r, phi).unwrap()
    }

    fn line(r: f64, phi: f64) -> ObstacleLine {
        ObstacleLine::new(foot(r, phi))
    }

    #[test]
    fn foot_angle_is_normalized() {
        assert_relative_eq!(foot(1.0, -FRAC_PI_2).phi(), 1.5 * PI, epsilon = 1e-15);
        assert_relative_eq!(foot(1.0, 5.0 * PI).phi(), PI, epsilon = 1e-12);
        assert!(FootPoint::new(-1.0, 0.0).is_err());
        assert!(FootPoint::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn line_from_foot_examples() {
        let (p, d) = line_from_foot(foot(1.0, 0.0));
        assert_eq!(p, Point2::new(1.0, 0.0));
        assert_relative_eq!(d.x, 0.0);
        assert_relative_eq!(d.y, 1.0);

        let (p, d) = line_from_foot(foot(0.0, FRAC_PI_2));
        assert_relative_eq!(p.norm(), 0.0);
        assert_relative_eq!(d.x, -1.0);
        assert_relative_eq!(d.y, 0.0, epsilon = 1e-16);

        let f = foot(2.0, FRAC_PI_4);
        let (p, d) = line_from_foot(f);
        assert_relative_eq!(p.x, SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(p.y, SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(d.x, -SQRT_2 / 2.0, epsilon = 1e-15);
        assert_relative_eq!(d.y, SQRT_2 / 2.0, epsilon = 1e-15);
        for t in [-5.0, 0.0, 0.3, 17.0] {
            let q = p + d * t;
            let residual = q.x * f.phi().cos() + q.y * f.phi().sin() - f.r();
            assert!(residual.abs() <= 1e-12 * f.r().max(1.0) * (1.0 + t.abs()));
        }
    }

    #[test]
    fn segment_intersection_examples() {
        let p = Point2::new;
        assert!(segments_intersect(p(0.0, 0.0), p(2.0, 0.0), p(1.0, -1.0), p(1.0, 1.0)));
        assert!(!segments_intersect(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.5), p(1.0, 1.0)));
        assert!(segments_intersect(p(0.0, 0.0), p(2.0, 0.0), p(2.0, 0.0), p(3.0, 1.0)));
        // collinear overlap and collinear gap
        assert!(segments_intersect(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0), p(3.0, 0.0)));
        assert!(!segments_intersect(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0)));
        // T-junction
        assert!(segments_intersect(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0), p(1.0, 5.0)));
    }

    #[test]
    fn los_examples() {
        let t = Point2::ORIGIN;
        let a = Point2::new(2.0, 0.0);
        assert!(!los_visible(t, a, &[line(1.0, 0.0).into()]).unwrap());
        assert!(los_visible(t, a, &[line(3.0, 0.0).into()]).unwrap());

        let crossing = ObstacleSegment::new(foot(1.0, 0.0), 0.5).unwrap();
        assert!(!los_visible(t, a, &[crossing.into()]).unwrap());
        let aside = ObstacleSegment::new(foot(1.0, FRAC_PI_2), 0.5).unwrap();
        assert!(los_visible(t, a, &[aside.into()]).unwrap());

        assert!(los_visible(t, a, &[]).unwrap());
        assert!(matches!(
            los_visible(t, Point2::new(1e-12, 0.0), &[]),
            Err(crate::Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn los_with_target_off_origin() {
        // line x = 1; both endpoints beyond it are mutually visible
        let l: Obstacle = line(1.0, 0.0).into();
        assert!(los_visible(Point2::new(2.0, 0.0), Point2::new(3.0, 1.0), &[l]).unwrap());
        assert!(!los_visible(Point2::new(0.5, 0.0), Point2::new(3.0, 1.0), &[l]).unwrap());
    }

    #[test]
    fn clip_examples() {
        let sq = ConvexPolygon::square(1.0);
        assert_eq!(clip_halfplane(&sq, &line(5.0, 0.0)), sq);

        let rect = clip_halfplane(&sq, &line(0.5, 0.0));
        assert_relative_eq!(rect.area(), 3.0, epsilon = 1e-12);
        let strip = clip_halfplane(&rect, &line(0.5, PI));
        assert_relative_eq!(strip.area(), 2.0, epsilon = 1e-12);
        for v in strip.vertices() {
            assert!(v.x.abs() <= 0.5 + 1e-12 && v.y.abs() <= 1.0 + 1e-12);
        }
        // the half-plane misses the polygon entirely
        let far = ConvexPolygon::from_vertices(vec![
            Point2::new(2.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(3.0, 1.0),
        ]);
        assert!(clip_halfplane(&far, &line(1.0, 0.0)).is_empty());
    }

    #[test]
    fn area_examples() {
        let unit = ConvexPolygon::from_vertices(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]);
        assert_eq!(polygon_area(&unit), 1.0);
        let tri = ConvexPolygon::from_vertices(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]);
        assert_eq!(polygon_area(&tri), 0.5);
        let flat = ConvexPolygon::from_vertices(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(2.0, 2.0),
        ]);
        assert_eq!(polygon_area(&flat), 0.0);
        assert_eq!(polygon_area(&ConvexPolygon::empty()), 0.0);
        for s in [0.1, 1.0, 3.0, 40.0] {
            assert_relative_eq!(ConvexPolygon::square(s / 2.0).area(), s * s, max_relative = 1e-12);
        }
    }

    #[test]
    fn cell_examples() {
        let cell = cell_containing_origin(&[], 10.0).unwrap();
        assert_relative_eq!(cell.polygon.area(), 400.0);
        assert!(cell.truncated);

        let box_lines: Vec<_> = (0..4).map(|k| line(1.0, k as f64 * FRAC_PI_2)).collect();
        let cell = cell_containing_origin(&box_lines, 100.0).unwrap();
        assert_relative_eq!(cell.polygon.area(), 4.0, epsilon = 1e-9);
        assert!(!cell.truncated);

        let cell = cell_containing_origin(&[line(1.0, 0.0)], 10.0).unwrap();
        assert_relative_eq!(cell.polygon.area(), 11.0 * 20.0, epsilon = 1e-9);
        assert!(cell.truncated);

        assert!(cell_containing_origin(&[line(0.0, 1.0)], 10.0).is_err());
    }
}
