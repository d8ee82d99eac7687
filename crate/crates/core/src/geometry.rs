//! Planar primitives in the canonical game frame.
//!
//! The canonical frame puts the target line on the x-axis from `m = (0, 0)`
//! to `n = (l, 0)`, with the target region on the `y > 0` side. Everything
//! downstream assumes this frame; [`normalize_frame`] maps an arbitrary pose
//! into it.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for on-boundary tests, in normalized length units.
pub const GEO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("speed ratio {0} is outside the open interval (0, 1)")]
    SpeedRatio(f64),
    #[error("points coincide at ({x}, {y})")]
    Coincident { x: f64, y: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not convex (reflex or degenerate turn at vertex {0})")]
    NonConvex(usize),
    #[error("target length must be positive, got {0}")]
    TargetLength(f64),
    #[error("target segment is not a chord of the domain: {0}")]
    NotAChord(String),
    #[error("degenerate target segment")]
    DegenerateTarget,
    #[error("target-side hint lies on the target line")]
    HintOnTargetLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Reflection across the target line (the x-axis).
    pub fn mirrored(self) -> Point {
        Point::new(self.x, -self.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    /// Strict interior membership.
    pub fn contains(&self, z: Point) -> bool {
        z.dist(self.center) < self.radius
    }

    /// Abscissae where the circle meets the x-axis, if it does.
    pub fn x_axis_chord(&self) -> Option<(f64, f64)> {
        let h2 = self.radius * self.radius - self.center.y * self.center.y;
        if h2 < 0.0 {
            return None;
        }
        let h = h2.sqrt();
        Some((self.center.x - h, self.center.x + h))
    }
}

/// The open half-plane `{ z : normal · z < offset }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    normal: Point,
    offset: f64,
}

impl HalfPlane {
    pub fn new(normal: Point, offset: f64) -> Result<Self, GeometryError> {
        let len = normal.norm();
        if !(len.is_finite() && offset.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if len == 0.0 {
            return Err(GeometryError::Coincident { x: 0.0, y: 0.0 });
        }
        Ok(HalfPlane {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    pub fn normal(&self) -> Point {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance to the boundary; negative inside.
    pub fn signed_distance(&self, z: Point) -> f64 {
        self.normal.dot(z) - self.offset
    }

    pub fn contains(&self, z: Point) -> bool {
        self.signed_distance(z) < 0.0
    }
}

/// Evasion region of `evader` against `pursuer`: the interior of the
/// returned Apollonius circle is every point the evader reaches first.
pub fn apollonius(evader: Point, pursuer: Point, alpha: f64) -> Result<Circle, GeometryError> {
    check_alpha(alpha)?;
    if !(evader.is_finite() && pursuer.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if evader == pursuer {
        return Err(GeometryError::Coincident {
            x: evader.x,
            y: evader.y,
        });
    }
    let a2 = alpha * alpha;
    let k = 1.0 / (1.0 - a2);
    Ok(Circle {
        center: (evader - pursuer * a2) * k,
        radius: alpha * evader.dist(pursuer) * k,
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), GeometryError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(GeometryError::SpeedRatio(alpha))
    }
}

/// Points strictly closer to `pi` than to `pj`.
pub fn dominance_halfplane(pi: Point, pj: Point) -> Result<HalfPlane, GeometryError> {
    if pi == pj {
        return Err(GeometryError::Coincident { x: pi.x, y: pi.y });
    }
    // |z - pi|^2 < |z - pj|^2  <=>  2 (pj - pi) . z < |pj|^2 - |pi|^2
    HalfPlane::new((pj - pi) * 2.0, pj.norm_sq() - pi.norm_sq())
}

/// Portion of a segment inside an open half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubSegment {
    /// Parameter range along `start + t (end - start)`, `0 <= t0 <= t1 <= 1`.
    pub t0: f64,
    pub t1: f64,
    pub start: Point,
    pub end: Point,
}

impl SubSegment {
    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }
}

/// Clips the segment `seg_start -> seg_end` to `hp`. Returns `None` when
/// nothing of positive length survives.
pub fn halfplane_segment_intersect(
    hp: &HalfPlane,
    seg_start: Point,
    seg_end: Point,
) -> Option<SubSegment> {
    clip_interval(hp, seg_start, seg_end, 0.0, 1.0)
}

pub(crate) fn clip_interval(
    hp: &HalfPlane,
    a: Point,
    b: Point,
    t0: f64,
    t1: f64,
) -> Option<SubSegment> {
    let fa = hp.signed_distance(a);
    let slope = hp.signed_distance(b) - fa;
    let (mut lo, mut hi) = (t0, t1);
    if slope == 0.0 {
        if fa >= 0.0 {
            return None;
        }
    } else {
        let t_cross = -fa / slope;
        if slope > 0.0 {
            hi = hi.min(t_cross);
        } else {
            lo = lo.max(t_cross);
        }
    }
    if hi <= lo {
        return None;
    }
    Some(SubSegment {
        t0: lo,
        t1: hi,
        start: a.lerp(b, lo),
        end: a.lerp(b, hi),
    })
}

/// Which part of the domain a membership test refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Play,
    Target,
    Any,
}

/// Convex domain with the target line on the x-axis from `(0, 0)` to `(l, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameDomain {
    vertices: Vec<Point>,
    target_length: f64,
}

impl GameDomain {
    /// Validates convexity and the chord condition. Vertices may be given in
    /// either orientation; they are stored counter-clockwise.
    pub fn new(vertices: Vec<Point>, target_length: f64) -> Result<Self, GeometryError> {
        let mut vertices = vertices;
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) || !target_length.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if target_length <= 0.0 {
            return Err(GeometryError::TargetLength(target_length));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        check_convex_ccw(&vertices)?;
        let domain = GameDomain {
            vertices,
            target_length,
        };
        domain.check_chord()?;
        Ok(domain)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn target_length(&self) -> f64 {
        self.target_length
    }

    pub fn target_start(&self) -> Point {
        Point::ORIGIN
    }

    pub fn target_end(&self) -> Point {
        Point::new(self.target_length, 0.0)
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed distance-like value: positive inside, zero on the boundary.
    /// Equals the minimum over edges of the inward distance to the edge line.
    pub fn inset(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                e.cross(p - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership in the closed polygon, with [`GEO_EPS`] slack.
    pub fn contains_point(&self, p: Point) -> bool {
        self.inset(p) >= -GEO_EPS
    }

    pub fn contains(&self, p: Point, side: Side) -> bool {
        if !self.contains_point(p) {
            return false;
        }
        match side {
            Side::Any => true,
            Side::Play => p.y < 0.0,
            Side::Target => p.y >= 0.0,
        }
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        self.inset(p).abs() <= GEO_EPS
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    fn check_chord(&self) -> Result<(), GeometryError> {
        let m = self.target_start();
        let n = self.target_end();
        if !self.on_boundary(m) {
            return Err(GeometryError::NotAChord(
                "start point (0, 0) is not on the domain boundary".into(),
            ));
        }
        if !self.on_boundary(n) {
            return Err(GeometryError::NotAChord(format!(
                "end point ({}, 0) is not on the domain boundary",
                self.target_length
            )));
        }
        if self.inset(m.lerp(n, 0.5)) <= GEO_EPS {
            return Err(GeometryError::NotAChord(
                "target segment runs along the boundary".into(),
            ));
        }
        let above = self.vertices.iter().any(|v| v.y > GEO_EPS);
        let below = self.vertices.iter().any(|v| v.y < -GEO_EPS);
        if !(above && below) {
            return Err(GeometryError::NotAChord(
                "domain must extend to both sides of the target line".into(),
            ));
        }
        Ok(())
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

fn check_convex_ccw(vertices: &[Point]) -> Result<(), GeometryError> {
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let e1 = b - a;
        let e2 = c - b;
        if e1.norm() == 0.0 || e2.norm() == 0.0 {
            return Err(GeometryError::NonConvex((i + 1) % n));
        }
        // Collinear vertices are tolerated; any clockwise turn is not.
        if e1.cross(e2) < -GEO_EPS * e1.norm() * e2.norm() {
            return Err(GeometryError::NonConvex((i + 1) % n));
        }
    }
    if signed_area(vertices) <= 0.0 {
        return Err(GeometryError::NonConvex(0));
    }
    Ok(())
}

/// Orthogonal map `p -> M (p - origin)` with `M` a rotation, optionally
/// followed by the reflection `y -> -y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    origin: Point,
    cos: f64,
    sin: f64,
    reflect: bool,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        origin: Point::ORIGIN,
        cos: 1.0,
        sin: 0.0,
        reflect: false,
    };

    pub fn apply(&self, p: Point) -> Point {
        let d = p - self.origin;
        let x = self.cos * d.x + self.sin * d.y;
        let y = -self.sin * d.x + self.cos * d.y;
        Point::new(x, if self.reflect { -y } else { y })
    }

    pub fn invert(&self, q: Point) -> Point {
        let y = if self.reflect { -q.y } else { q.y };
        let x = self.cos * q.x - self.sin * y;
        let yy = self.sin * q.x + self.cos * y;
        Point::new(x, yy) + self.origin
    }

    pub fn determinant(&self) -> f64 {
        if self.reflect {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn rotation_angle(&self) -> f64 {
        self.sin.atan2(self.cos)
    }
}

/// Inputs mapped into the canonical frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFrame {
    pub transform: RigidTransform,
    pub target_length: f64,
    pub polygon: Vec<Point>,
    pub players: Vec<Point>,
}

/// Builds the transform sending `target_start` to the origin, `target_end`
/// to `(l, 0)` and `hint` into `y > 0`, then maps every vertex and player.
pub fn normalize_frame(
    target_start: Point,
    target_end: Point,
    hint: Point,
    polygon: &[Point],
    players: &[Point],
) -> Result<NormalizedFrame, GeometryError> {
    if !(target_start.is_finite() && target_end.is_finite() && hint.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let dir = target_end - target_start;
    let l = dir.norm();
    if l <= GEO_EPS {
        return Err(GeometryError::DegenerateTarget);
    }
    let mut transform = RigidTransform {
        origin: target_start,
        cos: dir.x / l,
        sin: dir.y / l,
        reflect: false,
    };
    let h = transform.apply(hint);
    if h.y.abs() <= GEO_EPS {
        return Err(GeometryError::HintOnTargetLine);
    }
    if h.y < 0.0 {
        transform.reflect = true;
    }
    let map = |pts: &[Point]| pts.iter().map(|&p| transform.apply(p)).collect::<Vec<_>>();
    let mut polygon = map(polygon);
    let players = map(players);
    // Snap the chord endpoints so that rounding in the rotation does not
    // push them off the boundary.
    for v in polygon.iter_mut() {
        if v.dist(Point::ORIGIN) <= GEO_EPS {
            *v = Point::ORIGIN;
        } else if v.dist(Point::new(l, 0.0)) <= GEO_EPS {
            *v = Point::new(l, 0.0);
        }
    }
    Ok(NormalizedFrame {
        transform,
        target_length: l,
        polygon,
        players,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect() -> GameDomain {
        GameDomain::new(
            vec![
                Point::new(0.0, -3.0),
                Point::new(2.0, -3.0),
                Point::new(2.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            2.0,
        )
        .unwrap()
    }

    fn close(a: Point, b: Point, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn apollonius_closed_forms() {
        let c = apollonius(Point::new(1.0, 0.0), Point::new(2.0, 0.0), 0.5).unwrap();
        assert!(close(c.center, Point::new(2.0 / 3.0, 0.0), 1e-15));
        assert!((c.radius - 2.0 / 3.0).abs() < 1e-15);

        let c = apollonius(Point::new(0.0, 0.0), Point::new(0.0, 1.0), 0.5).unwrap();
        assert!(close(c.center, Point::new(0.0, -1.0 / 3.0), 1e-15));
        assert!((c.radius - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn apollonius_rejects_bad_inputs() {
        let e = Point::new(0.0, 0.0);
        assert_eq!(
            apollonius(e, Point::new(1.0, 0.0), 1.0),
            Err(GeometryError::SpeedRatio(1.0))
        );
        assert!(apollonius(e, Point::new(1.0, 0.0), 0.0).is_err());
        assert!(matches!(
            apollonius(e, e, 0.5),
            Err(GeometryError::Coincident { .. })
        ));
    }

    #[test]
    fn dominance_examples() {
        let hp = dominance_halfplane(Point::new(0.0, 0.0), Point::new(2.0, 0.0)).unwrap();
        assert!(hp.contains(Point::new(0.999, 5.0)));
        assert!(!hp.contains(Point::new(1.0, 5.0)));
        assert!((hp.normal().x - 1.0).abs() < 1e-15 && (hp.offset() - 1.0).abs() < 1e-15);

        let hp = dominance_halfplane(Point::new(1.0, -1.0), Point::new(1.0, -2.0)).unwrap();
        assert!(hp.contains(Point::new(-4.0, -1.49)));
        assert!(!hp.contains(Point::new(-4.0, -1.5)));
        assert!(!hp.contains(Point::new(-4.0, -1.51)));

        assert!(dominance_halfplane(Point::new(1.0, 1.0), Point::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn segment_clipping() {
        let hp = dominance_halfplane(Point::new(0.0, 0.0), Point::new(2.0, 0.0)).unwrap();
        let s = halfplane_segment_intersect(&hp, Point::new(0.0, 0.0), Point::new(2.0, 0.0))
            .unwrap();
        assert!(close(s.start, Point::new(0.0, 0.0), 1e-15));
        assert!(close(s.end, Point::new(1.0, 0.0), 1e-15));

        let above = HalfPlane::new(Point::new(0.0, -1.0), -1.0).unwrap(); // y > 1
        assert!(
            halfplane_segment_intersect(&above, Point::new(0.0, 0.0), Point::new(2.0, 0.0))
                .is_none()
        );

        let s = halfplane_segment_intersect(&hp, Point::new(0.0, 0.0), Point::new(0.5, 0.0))
            .unwrap();
        assert_eq!((s.t0, s.t1), (0.0, 1.0));
    }

    #[test]
    fn side_membership() {
        let d = rect();
        assert!(d.contains(Point::new(1.0, -1.0), Side::Play));
        assert!(!d.contains(Point::new(1.0, 0.5), Side::Play));
        assert!(d.contains(Point::new(1.0, 0.5), Side::Target));
        assert!(d.contains(Point::new(1.0, 0.0), Side::Target));
        assert!(!d.contains(Point::new(1.0, 0.0), Side::Play));
        // closure convention: boundary points belong to the domain
        assert!(d.contains(Point::new(0.0, -1.0), Side::Play));
        assert!(!d.contains(Point::new(2.1, -1.0), Side::Any));
    }

    #[test]
    fn domain_validation() {
        // clockwise input is accepted and re-oriented
        let d = GameDomain::new(
            vec![
                Point::new(0.0, 1.0),
                Point::new(2.0, 1.0),
                Point::new(2.0, -3.0),
                Point::new(0.0, -3.0),
            ],
            2.0,
        )
        .unwrap();
        assert!(signed_area(d.vertices()) > 0.0);

        let reflex = vec![
            Point::new(0.0, -3.0),
            Point::new(1.0, -1.0),
            Point::new(2.0, -3.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!(matches!(
            GameDomain::new(reflex, 2.0),
            Err(GeometryError::NonConvex(_))
        ));

        // target too long: (3, 0) is outside
        assert!(matches!(
            GameDomain::new(rect().vertices().to_vec(), 3.0),
            Err(GeometryError::NotAChord(_))
        ));

        // target running along an edge
        let flat = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!(GameDomain::new(flat, 2.0).is_err());
    }

    #[test]
    fn triangles_are_convex() {
        let tri = vec![
            Point::new(-1.0, -2.0),
            Point::new(3.0, -2.0),
            Point::new(1.0, 2.0),
        ];
        assert!(check_convex_ccw(&tri).is_ok());
    }

    #[test]
    fn canonical_frame_is_identity() {
        let poly = rect().vertices().to_vec();
        let f = normalize_frame(
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.5),
            &poly,
            &[],
        )
        .unwrap();
        assert!(f.transform.is_identity());
        assert_eq!(f.polygon, poly);
        assert_eq!(f.target_length, 2.0);
    }

    #[test]
    fn rotated_frame() {
        let start = Point::new(1.0, 1.0);
        let end = Point::new(1.0, 3.0);
        let hint = Point::new(0.0, 2.0);
        let f = normalize_frame(start, end, hint, &[], &[hint]).unwrap();
        assert!((f.target_length - 2.0).abs() < 1e-15);
        let t = f.transform;
        assert!(close(t.apply(start), Point::new(0.0, 0.0), 1e-15));
        assert!(close(t.apply(end), Point::new(2.0, 0.0), 1e-15));
        assert!(t.apply(hint).y > 0.0);
        assert_eq!(t.determinant(), 1.0);
        assert!((t.rotation_angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn reflected_frame() {
        let start = Point::new(1.0, 1.0);
        let end = Point::new(1.0, 3.0);
        let hint = Point::new(2.0, 2.0);
        let f = normalize_frame(start, end, hint, &[], &[]).unwrap();
        assert_eq!(f.transform.determinant(), -1.0);
        let h = f.transform.apply(hint);
        assert!(h.y > 0.0 && (h.x - 1.0).abs() < 1e-15);
        assert!(close(f.transform.apply(end), Point::new(2.0, 0.0), 1e-15));
    }

    #[test]
    fn frame_errors() {
        let p = Point::new(1.0, 1.0);
        assert_eq!(
            normalize_frame(p, p, Point::new(0.0, 0.0), &[], &[]),
            Err(GeometryError::DegenerateTarget)
        );
        assert_eq!(
            normalize_frame(Point::ORIGIN, p, Point::new(2.0, 2.0), &[], &[]),
            Err(GeometryError::HintOnTargetLine)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coord() -> impl Strategy<Value = f64> {
            -10.0..10.0f64
        }

        fn point() -> impl Strategy<Value = Point> {
            (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
        }

        proptest! {
            #[test]
            fn apollonius_boundary_ratio(
                e in point(), p in point(), alpha in 0.05..0.95f64, theta in 0.0..std::f64::consts::TAU
            ) {
                prop_assume!(e.dist(p) > 1e-3);
                let c = apollonius(e, p, alpha).unwrap();
                let z = c.center + Point::new(theta.cos(), theta.sin()) * c.radius;
                let gap = (z.dist(e) - alpha * z.dist(p)).abs();
                prop_assert!(gap < 1e-9 * (1.0 + z.norm()), "gap {gap}");
            }

            #[test]
            fn dominance_partitions_plane(a in point(), b in point(), z in point()) {
                prop_assume!(a.dist(b) > 1e-6);
                let ab = dominance_halfplane(a, b).unwrap();
                let ba = dominance_halfplane(b, a).unwrap();
                let diff = z.dist(b) - z.dist(a);
                if diff.abs() > 1e-9 * (1.0 + z.norm()) {
                    prop_assert_eq!(ab.contains(z), diff > 0.0);
                    prop_assert!(ab.contains(z) != ba.contains(z));
                }
            }

            #[test]
            fn frame_round_trip(
                s in point(), e in point(), hint in point(), q in point()
            ) {
                prop_assume!(s.dist(e) > 1e-3);
                let line = e - s;
                prop_assume!((line.cross(hint - s) / line.norm()).abs() > 1e-3);
                let f = normalize_frame(s, e, hint, &[], &[]).unwrap();
                let back = f.transform.invert(f.transform.apply(q));
                prop_assert!(back.dist(q) < 1e-12 * (1.0 + q.norm() + s.norm()));
                prop_assert!(f.transform.apply(hint).y > 0.0);
            }
        }
    }
}
