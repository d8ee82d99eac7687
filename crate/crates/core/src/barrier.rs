//! Closed-form barriers for pursuit coalitions.
//!
//! A barrier is a graph `y = f(x) < 0` made of three kinds of arcs:
//!
//! * endpoint arcs, circles around `m` or `n` (the evader's best aim point is
//!   an end of the target line),
//! * quadratic arcs, where the aim point is interior and only one pursuer
//!   matters, `(x - x1)^2 + (1 - 1/a^2) y^2 + (1 - a^2) y1^2 = 0`,
//! * crossover arcs, circles around the point of the target line that two
//!   neighbouring pursuers reach at the same time.
//!
//! Construction mirrors pursuers above the target line into the play side,
//! drops pursuers that are never first to any target point, orders the rest
//! by abscissa and stitches the arcs together.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    check_alpha, dominance_halfplane, halfplane_segment_intersect, GeometryError, Point, GEO_EPS,
};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("coalition code {code} is not a non-empty subset of {n_p} pursuers")]
    InvalidCoalition { code: u64, n_p: usize },
    #[error("virtual pursuer of P{original} coincides with P{other}")]
    VirtualCollision { original: usize, other: usize },
    #[error("pursuers share the abscissa {0}; remove the dominated one first")]
    EqualAbscissa(f64),
    #[error("base curve needs strictly increasing abscissae")]
    ArgumentOrder,
    #[error("empty pursuer list")]
    NoPursuers,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A non-empty subset of the pursuit team, encoded as a bitmask where bit
/// `i` (from the low end) selects pursuer `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coalition {
    code: u64,
    members: Vec<usize>,
}

impl Coalition {
    /// `n_p` bounds the member indices; codes with bits beyond it are rejected.
    pub fn from_code(code: u64, n_p: usize) -> Result<Self, BarrierError> {
        let limit = if n_p >= 64 { u64::MAX } else { (1u64 << n_p) - 1 };
        if code == 0 || code > limit {
            return Err(BarrierError::InvalidCoalition { code, n_p });
        }
        let members = (0..64).filter(|i| code >> i & 1 == 1).collect();
        Ok(Coalition { code, members })
    }

    /// Builds a coalition from zero-based member indices.
    pub fn from_members(members: &[usize]) -> Result<Self, BarrierError> {
        let code = members
            .iter()
            .try_fold(0u64, |acc, &i| (i < 64).then(|| acc | 1 << i))
            .ok_or(BarrierError::InvalidCoalition { code: 0, n_p: 64 })?;
        Self::from_code(code, 64)
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Zero-based member indices, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, pursuer: usize) -> bool {
        pursuer < 64 && self.code >> pursuer & 1 == 1
    }

    pub fn is_subcoalition_of(&self, other: &Coalition) -> bool {
        self.code & other.code == self.code
    }

    /// Every coalition of `n_p` pursuers, in code order.
    pub fn all(n_p: usize) -> impl Iterator<Item = Coalition> {
        let top = if n_p >= 64 { u64::MAX } else { (1u64 << n_p) - 1 };
        (1..=top).map(move |c| Coalition::from_code(c, n_p).expect("code in range"))
    }
}

impl std::fmt::Display for Coalition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self.members.iter().map(|i| format!("P{}", i + 1)).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    EndpointArc,
    QuadraticArc,
    CrossoverArc,
}

/// Closed-form description of one arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PieceShape {
    /// Lower half of a circle centred on the target line.
    Circle { center_x: f64, radius: f64 },
    /// Quadratic arc generated by the pursuer at `(x1, y1)`.
    Quadratic { x1: f64, y1: f64, alpha: f64 },
}

impl PieceShape {
    /// `y(x)`, clamped to 0 where rounding would leave the support.
    pub fn y_at(&self, x: f64) -> f64 {
        match *self {
            PieceShape::Circle { center_x, radius } => {
                let dx = x - center_x;
                -(radius * radius - dx * dx).max(0.0).sqrt()
            }
            PieceShape::Quadratic { x1, y1, alpha } => {
                let a2 = alpha * alpha;
                let dx = x - x1;
                -((dx * dx + (1.0 - a2) * y1 * y1) * a2 / (1.0 - a2)).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePiece {
    pub kind: PieceKind,
    pub x_lo: f64,
    pub x_hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub shape: PieceShape,
}

impl CurvePiece {
    pub fn y_at(&self, x: f64) -> f64 {
        self.shape.y_at(x)
    }

    pub fn contains_x(&self, x: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi
    }
}

/// The curve pieces a barrier is assembled from. Each variant names the
/// role a piece plays; pursuers are given after mirroring (`y <= 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseCurve {
    /// Aim point `m`; arc of the circle about `m` left of `alpha^2 x1`.
    LeftEndpoint { h: Point },
    /// Interior aim point for a lone pursuer, between the endpoint arcs.
    SoloQuadratic { h: Point },
    /// Aim point `n`; arc of the circle about `n`.
    RightEndpoint { h: Point },
    /// Quadratic arc of the left pursuer of a neighbouring pair, from its
    /// left endpoint arc up to the crossover arc.
    PairLeftQuadratic { left: Point, right: Point },
    /// Aim point at the crossover of two neighbouring pursuers.
    Crossover { left: Point, right: Point },
    /// Quadratic arc of the right pursuer of a pair, from the crossover arc
    /// to its right endpoint arc.
    PairRightQuadratic { left: Point, right: Point },
    /// Quadratic arc of a middle pursuer, bounded by the crossover arcs
    /// with its two neighbours.
    MiddleQuadratic {
        left: Point,
        middle: Point,
        right: Point,
    },
}

/// Abscissa of the target-line point equidistant from `h1` and `h2`.
pub fn crossover_x(h1: Point, h2: Point) -> Result<f64, BarrierError> {
    if h1.x == h2.x {
        return Err(BarrierError::EqualAbscissa(h1.x));
    }
    Ok((h2.norm_sq() - h1.norm_sq()) / (2.0 * (h2.x - h1.x)))
}

fn quadratic(h: Point, alpha: f64) -> PieceShape {
    PieceShape::Quadratic {
        x1: h.x,
        y1: h.y,
        alpha,
    }
}

/// Evaluates one base curve. Returns `None` when its interval is empty.
pub fn base_curve(
    curve: BaseCurve,
    alpha: f64,
    l: f64,
) -> Result<Option<CurvePiece>, BarrierError> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    let b2 = 1.0 - a2;
    let n = Point::new(l, 0.0);
    let piece = match curve {
        BaseCurve::LeftEndpoint { h } => {
            let radius = alpha * h.norm();
            CurvePiece {
                kind: PieceKind::EndpointArc,
                x_lo: -radius,
                x_hi: (a2 * h.x).min(radius),
                lo_closed: true,
                hi_closed: true,
                shape: PieceShape::Circle {
                    center_x: 0.0,
                    radius,
                },
            }
        }
        BaseCurve::SoloQuadratic { h } => CurvePiece {
            kind: PieceKind::QuadraticArc,
            x_lo: a2 * h.x,
            x_hi: b2 * l + a2 * h.x,
            lo_closed: false,
            hi_closed: false,
            shape: quadratic(h, alpha),
        },
        BaseCurve::RightEndpoint { h } => {
            let radius = alpha * h.dist(n);
            CurvePiece {
                kind: PieceKind::EndpointArc,
                x_lo: (b2 * l + a2 * h.x).max(l - radius),
                x_hi: l + radius,
                lo_closed: true,
                hi_closed: true,
                shape: PieceShape::Circle {
                    center_x: l,
                    radius,
                },
            }
        }
        BaseCurve::PairLeftQuadratic { left, right } => {
            ordered(&[left, right])?;
            let xc = crossover_x(left, right)?;
            CurvePiece {
                kind: PieceKind::QuadraticArc,
                x_lo: a2 * left.x,
                x_hi: b2 * xc + a2 * left.x,
                lo_closed: false,
                hi_closed: false,
                shape: quadratic(left, alpha),
            }
        }
        BaseCurve::Crossover { left, right } => {
            ordered(&[left, right])?;
            let xc = crossover_x(left, right)?;
            CurvePiece {
                kind: PieceKind::CrossoverArc,
                x_lo: b2 * xc + a2 * left.x,
                x_hi: b2 * xc + a2 * right.x,
                lo_closed: true,
                hi_closed: true,
                shape: PieceShape::Circle {
                    center_x: xc,
                    radius: alpha * left.dist(Point::new(xc, 0.0)),
                },
            }
        }
        BaseCurve::PairRightQuadratic { left, right } => {
            ordered(&[left, right])?;
            let xc = crossover_x(left, right)?;
            CurvePiece {
                kind: PieceKind::QuadraticArc,
                x_lo: b2 * xc + a2 * right.x,
                x_hi: b2 * l + a2 * right.x,
                lo_closed: false,
                hi_closed: false,
                shape: quadratic(right, alpha),
            }
        }
        BaseCurve::MiddleQuadratic {
            left,
            middle,
            right,
        } => {
            ordered(&[left, middle, right])?;
            let xc1 = crossover_x(left, middle)?;
            let xc2 = crossover_x(middle, right)?;
            CurvePiece {
                kind: PieceKind::QuadraticArc,
                x_lo: b2 * xc1 + a2 * middle.x,
                x_hi: b2 * xc2 + a2 * middle.x,
                lo_closed: false,
                hi_closed: false,
                shape: quadratic(middle, alpha),
            }
        }
    };
    Ok((piece.x_hi > piece.x_lo).then_some(piece))
}

fn ordered(hs: &[Point]) -> Result<(), BarrierError> {
    if hs.windows(2).all(|w| w[0].x < w[1].x) {
        Ok(())
    } else {
        Err(BarrierError::ArgumentOrder)
    }
}

/// Reflects pursuers in the target region across the target line. Fails
/// when a reflection lands on a different pursuer.
pub fn virtualize(positions: &[Point]) -> Result<Vec<Point>, BarrierError> {
    let out: Vec<Point> = positions
        .iter()
        .map(|&p| if p.y > 0.0 { p.mirrored() } else { p })
        .collect();
    for (i, &p) in positions.iter().enumerate() {
        if p.y <= 0.0 {
            continue;
        }
        for (j, &q) in positions.iter().enumerate() {
            if i != j && out[i].dist(q) <= GEO_EPS {
                return Err(BarrierError::VirtualCollision {
                    original: i + 1,
                    other: j + 1,
                });
            }
        }
    }
    Ok(out)
}

/// Indices of the pursuers that are strictly first to some stretch of the
/// target line longer than [`GEO_EPS`]. Positions must satisfy `y <= 0`.
pub fn largest_full_active(positions: &[Point], l: f64) -> Result<Vec<usize>, BarrierError> {
    if positions.is_empty() {
        return Err(BarrierError::NoPursuers);
    }
    let m = Point::ORIGIN;
    let n = Point::new(l, 0.0);
    let mut active = Vec::new();
    'pursuers: for (i, &pi) in positions.iter().enumerate() {
        let (mut t0, mut t1) = (0.0, 1.0);
        for (j, &pj) in positions.iter().enumerate() {
            if i == j {
                continue;
            }
            let hp = dominance_halfplane(pi, pj)?;
            let Some(s) = halfplane_segment_intersect(&hp, m, n) else {
                continue 'pursuers;
            };
            t0 = f64::max(t0, s.t0);
            t1 = f64::min(t1, s.t1);
            if (t1 - t0) * l <= GEO_EPS {
                continue 'pursuers;
            }
        }
        active.push(i);
    }
    Ok(active)
}

/// Barrier of one coalition, stored without clipping to the play region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierCurve {
    pieces: Vec<CurvePiece>,
    x_min: f64,
    x_max: f64,
    /// Active members after reduction, zero-based, as pursuer indices of
    /// the whole team.
    generating: Coalition,
    /// Mirrored positions of the active members, ordered by abscissa.
    generators: Vec<Point>,
}

impl BarrierCurve {
    pub fn pieces(&self) -> &[CurvePiece] {
        &self.pieces
    }

    pub fn x_extent(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn generating_coalition(&self) -> &Coalition {
        &self.generating
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    /// Junction abscissae between consecutive pieces.
    pub fn junctions(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.x_lo).collect()
    }

    /// Barrier height at `x`, or `None` outside the curve's extent.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        barrier_y(self, x)
    }
}

/// Evaluates the piecewise closed form at `x`.
pub fn barrier_y(curve: &BarrierCurve, x: f64) -> Option<f64> {
    if !(x >= curve.x_min && x <= curve.x_max) {
        return None;
    }
    let idx = curve.pieces.partition_point(|p| p.x_hi < x);
    let piece = curve.pieces.get(idx).or(curve.pieces.last())?;
    Some(piece.y_at(x))
}

/// Builds the barrier for `coalition` in `scenario`.
pub fn build_barrier(coalition: &Coalition, scenario: &Scenario) -> Result<BarrierCurve, BarrierError> {
    let n_p = scenario.pursuers().len();
    if coalition.members().iter().any(|&i| i >= n_p) {
        return Err(BarrierError::InvalidCoalition {
            code: coalition.code(),
            n_p,
        });
    }
    let positions: Vec<Point> = coalition
        .members()
        .iter()
        .map(|&i| scenario.pursuers()[i])
        .collect();
    let mut curve = barrier_from_positions(&positions, scenario.alpha(), scenario.target_length())?;
    let members = curve
        .generating
        .members()
        .iter()
        .map(|&k| coalition.members()[k])
        .collect::<Vec<_>>();
    curve.generating = Coalition::from_members(&members)?;
    Ok(curve)
}

/// Builds a barrier straight from pursuer positions. The generating
/// coalition of the result indexes into `positions`.
pub fn barrier_from_positions(
    positions: &[Point],
    alpha: f64,
    l: f64,
) -> Result<BarrierCurve, BarrierError> {
    check_alpha(alpha)?;
    let mirrored = virtualize(positions)?;
    let mut active = largest_full_active(&mirrored, l)?;
    active.sort_by(|&a, &b| mirrored[a].x.total_cmp(&mirrored[b].x));
    let hs: Vec<Point> = active.iter().map(|&i| mirrored[i]).collect();

    let mut bases = Vec::with_capacity(2 * hs.len() + 1);
    let first = hs[0];
    let last = hs[hs.len() - 1];
    bases.push(BaseCurve::LeftEndpoint { h: first });
    if hs.len() == 1 {
        bases.push(BaseCurve::SoloQuadratic { h: first });
    } else {
        bases.push(BaseCurve::PairLeftQuadratic {
            left: hs[0],
            right: hs[1],
        });
        for k in 0..hs.len() - 1 {
            if k > 0 {
                bases.push(BaseCurve::MiddleQuadratic {
                    left: hs[k - 1],
                    middle: hs[k],
                    right: hs[k + 1],
                });
            }
            bases.push(BaseCurve::Crossover {
                left: hs[k],
                right: hs[k + 1],
            });
        }
        bases.push(BaseCurve::PairRightQuadratic {
            left: hs[hs.len() - 2],
            right: last,
        });
    }
    bases.push(BaseCurve::RightEndpoint { h: last });

    let mut pieces = Vec::with_capacity(bases.len());
    for base in bases {
        if let Some(piece) = base_curve(base, alpha, l)? {
            pieces.push(piece);
        }
    }
    let x_min = pieces.first().map_or(0.0, |p| p.x_lo);
    let x_max = pieces.last().map_or(0.0, |p| p.x_hi);
    Ok(BarrierCurve {
        pieces,
        x_min,
        x_max,
        generating: Coalition::from_members(&active)?,
        generators: hs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margin::{maximize_margin, DEFAULT_TOL_X};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn coalition_codes() {
        let c = Coalition::from_code(5, 3).unwrap();
        assert_eq!(c.members(), &[0, 2]);
        assert_eq!(c.to_string(), "{P1,P3}");
        assert!(Coalition::from_code(0, 3).is_err());
        assert!(Coalition::from_code(8, 3).is_err());
        let sub = Coalition::from_code(4, 3).unwrap();
        assert!(sub.is_subcoalition_of(&c));
        assert!(!c.is_subcoalition_of(&sub));
        assert_eq!(Coalition::from_members(&[2, 0]).unwrap(), c);
        assert_eq!(Coalition::all(3).count(), 7);
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover_x(p(0.5, -1.0), p(1.5, -1.0)).unwrap(), 1.0);
        assert_eq!(crossover_x(p(0.0, -1.0), p(2.0, -1.0)).unwrap(), 1.0);
        let (h1, h2) = (p(0.3, -1.0), p(1.0, -2.0));
        let xc = crossover_x(h1, h2).unwrap();
        let c = p(xc, 0.0);
        assert!((c.dist(h1) - c.dist(h2)).abs() < 1e-12);
        assert!(crossover_x(p(1.0, -1.0), p(1.0, -2.0)).is_err());
    }

    #[test]
    fn solo_quadratic_example() {
        let h = p(1.0, -2.0);
        let piece = base_curve(BaseCurve::SoloQuadratic { h }, 0.5, 2.0)
            .unwrap()
            .unwrap();
        assert!((piece.x_lo - 0.25).abs() < 1e-15 && (piece.x_hi - 1.75).abs() < 1e-15);
        assert!((piece.y_at(1.0) + 1.0).abs() < 1e-15);
        // simultaneous arrival along x = 1: |E - (1,0)| = alpha |P - (1,0)|
        assert!((-piece.y_at(1.0) - 0.5 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn left_endpoint_matches_quadratic_at_junction() {
        let h = p(1.0, -2.0);
        let left = base_curve(BaseCurve::LeftEndpoint { h }, 0.5, 2.0)
            .unwrap()
            .unwrap();
        let quad = base_curve(BaseCurve::SoloQuadratic { h }, 0.5, 2.0)
            .unwrap()
            .unwrap();
        assert_eq!(left.shape, PieceShape::Circle { center_x: 0.0, radius: 0.5 * 5f64.sqrt() });
        assert!((left.x_hi - 0.25).abs() < 1e-15);
        let y = left.y_at(0.25);
        assert!((y + 1.0897).abs() < 1e-4);
        assert!((y - quad.y_at(0.25)).abs() < 1e-12);
    }

    #[test]
    fn crossover_arc_example() {
        let piece = base_curve(
            BaseCurve::Crossover {
                left: p(0.5, -1.0),
                right: p(1.5, -1.0),
            },
            0.5,
            2.0,
        )
        .unwrap()
        .unwrap();
        match piece.shape {
            PieceShape::Circle { center_x, radius } => {
                assert_eq!(center_x, 1.0);
                assert!((radius - 0.5 * 1.25f64.sqrt()).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!((piece.x_lo - 0.875).abs() < 1e-15 && (piece.x_hi - 1.125).abs() < 1e-15);
    }

    #[test]
    fn base_curve_argument_order() {
        let r = base_curve(
            BaseCurve::MiddleQuadratic {
                left: p(1.0, -1.0),
                middle: p(0.5, -1.0),
                right: p(2.0, -1.0),
            },
            0.5,
            2.0,
        );
        assert_eq!(r, Err(BarrierError::ArgumentOrder));
    }

    #[test]
    fn virtualize_examples() {
        assert_eq!(virtualize(&[p(1.0, 0.5)]).unwrap(), vec![p(1.0, -0.5)]);
        assert_eq!(virtualize(&[p(1.0, -0.5)]).unwrap(), vec![p(1.0, -0.5)]);
        assert_eq!(virtualize(&[p(1.0, 0.0)]).unwrap(), vec![p(1.0, 0.0)]);
        assert_eq!(
            virtualize(&[p(1.0, 0.5), p(1.0, -0.5)]),
            Err(BarrierError::VirtualCollision {
                original: 1,
                other: 2
            })
        );
    }

    #[test]
    fn full_active_examples() {
        assert_eq!(
            largest_full_active(&[p(1.0, -1.0), p(1.0, -2.0)], 2.0).unwrap(),
            vec![0]
        );
        assert_eq!(
            largest_full_active(&[p(0.5, -1.0), p(1.5, -1.0)], 2.0).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn full_active_matches_discretized_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n_grid = 10_000;
        for _ in 0..300 {
            let l = 2.0;
            let ps: Vec<Point> = (0..5)
                .map(|_| p(rng.gen_range(-0.5..2.5), rng.gen_range(-2.0..0.0)))
                .collect();
            let got = largest_full_active(&ps, l).unwrap();
            let h = l / n_grid as f64;
            let mut wins = vec![0usize; ps.len()];
            for k in 0..=n_grid {
                let q = p(h * k as f64, 0.0);
                let d: Vec<f64> = ps.iter().map(|x| x.dist(q)).collect();
                for i in 0..ps.len() {
                    if (0..ps.len()).all(|j| j == i || d[i] < d[j]) {
                        wins[i] += 1;
                    }
                }
            }
            for i in 0..ps.len() {
                let oracle = wins[i] > 0;
                if oracle != got.contains(&i) {
                    // allowed only when the winning stretch is below grid spacing
                    assert!(wins[i] <= 1, "pursuer {i} disagrees with {} wins", wins[i]);
                }
            }
        }
    }

    #[test]
    fn single_pursuer_barrier() {
        let b = barrier_from_positions(&[p(1.0, -2.0)], 0.5, 2.0).unwrap();
        assert_eq!(b.pieces().len(), 3);
        let j = b.junctions();
        assert!((j[0] - 0.25).abs() < 1e-9 && (j[1] - 1.75).abs() < 1e-9);
        assert!((b.y_at(1.0).unwrap() + 1.0).abs() < 1e-9);
        assert_eq!(b.y_at(-10.0), None);
    }

    #[test]
    fn pair_barrier() {
        let b = barrier_from_positions(&[p(0.5, -1.0), p(1.5, -1.0)], 0.5, 2.0).unwrap();
        assert_eq!(b.pieces().len(), 5);
        assert_eq!(b.pieces()[2].kind, PieceKind::CrossoverArc);
        assert!((b.y_at(1.0).unwrap() + 0.5590).abs() < 1e-3);
    }

    #[test]
    fn triple_barrier() {
        let b = barrier_from_positions(&[p(0.3, -1.0), p(1.0, -1.0), p(1.7, -1.0)], 0.5, 2.0)
            .unwrap();
        assert_eq!(b.pieces().len(), 7);
        let mid = b.pieces()[3];
        assert_eq!(mid.kind, PieceKind::QuadraticArc);
        assert!((mid.x_lo - 0.7375).abs() < 1e-9 && (mid.x_hi - 1.2625).abs() < 1e-9);
        assert!((b.y_at(1.0).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dominated_pursuer_is_dropped() {
        let both = barrier_from_positions(&[p(1.0, -1.0), p(1.0, -2.0)], 0.5, 2.0).unwrap();
        let alone = barrier_from_positions(&[p(1.0, -1.0)], 0.5, 2.0).unwrap();
        assert_eq!(both.pieces(), alone.pieces());
        assert_eq!(both.generating_coalition().members(), &[0]);
    }

    #[test]
    fn generating_coalition_uses_team_indices() {
        use crate::scenario::Scenario;
        let s = Scenario::rectangle(
            2.0,
            3.0,
            1.0,
            0.5,
            vec![p(1.0, -2.0), p(1.0, -1.0), p(0.2, -2.5)],
            vec![p(1.0, -0.5)],
        )
        .unwrap();
        let c = Coalition::from_code(0b011, 3).unwrap();
        let b = build_barrier(&c, &s).unwrap();
        assert_eq!(b.generating_coalition().members(), &[1]);
    }

    fn random_positions(rng: &mut ChaCha8Rng, n: usize, l: f64) -> Vec<Point> {
        (0..n)
            .map(|_| p(rng.gen_range(-0.5..l + 0.5), rng.gen_range(-2.5..0.0)))
            .collect()
    }

    #[test]
    fn junctions_are_continuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let l = rng.gen_range(0.5..3.0);
            let alpha = rng.gen_range(0.1..0.95);
            let n = rng.gen_range(1..=6);
            let ps = random_positions(&mut rng, n, l);
            let b = barrier_from_positions(&ps, alpha, l).unwrap();
            for w in b.pieces().windows(2) {
                assert!((w[0].x_hi - w[1].x_lo).abs() < 1e-12);
                let x = w[1].x_lo;
                assert!(
                    (w[0].y_at(x) - w[1].y_at(x)).abs() < 1e-9,
                    "jump at {x}: {:?} vs {:?}",
                    w[0],
                    w[1]
                );
            }
            for piece in b.pieces() {
                assert!(piece.x_lo <= piece.x_hi);
                let mid = 0.5 * (piece.x_lo + piece.x_hi);
                assert!(piece.y_at(mid) < 0.0);
            }
        }
    }

    #[test]
    fn on_barrier_points_have_zero_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let l = 2.0;
            let alpha = rng.gen_range(0.2..0.9);
            let n = rng.gen_range(1..=5);
            let ps = random_positions(&mut rng, n, l);
            let b = barrier_from_positions(&ps, alpha, l).unwrap();
            let (lo, hi) = b.x_extent();
            let x = rng.gen_range(lo..hi);
            let y = b.y_at(x).unwrap();
            if y > -1e-6 {
                continue;
            }
            let m = maximize_margin(p(x, y), &ps, alpha, l, DEFAULT_TOL_X).unwrap();
            assert!(m.value.abs() < 1e-6, "margin {} at ({x}, {y})", m.value);
        }
    }

    #[test]
    fn mirrored_pursuer_gives_same_barrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let l = 2.0;
            let alpha = rng.gen_range(0.2..0.9);
            let n = rng.gen_range(1..=5);
            let mut ps = random_positions(&mut rng, n, l);
            let virt = barrier_from_positions(&ps, alpha, l).unwrap();
            let k = rng.gen_range(0..n);
            ps[k] = ps[k].mirrored();
            let real = barrier_from_positions(&ps, alpha, l).unwrap();
            assert_eq!(real.pieces(), virt.pieces());
        }
    }
}
