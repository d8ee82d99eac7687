//! One-dimensional analysis along the target line.
//!
//! For an aim point `p = (x, 0)` the race margin of one pursuer is
//! `|p - P| - |p - E| / alpha`: the pursuer's remaining distance to `p` at
//! the moment the evader arrives, when both head straight for `p`. A
//! coalition's margin is the minimum over its members, and the evader picks
//! the aim point that maximizes it.

use thiserror::Error;

use crate::geometry::{apollonius, check_alpha, GeometryError, Point};

/// Default golden-section termination width.
pub const DEFAULT_TOL_X: f64 = 1e-10;

/// Samples per piece used to bracket maxima where the margin is negative.
const SCAN_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarginError {
    #[error("pursuer list is empty")]
    NoPursuers,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid chord [{c1}, {c2}]: margin at an end is {value:e}, expected 0")]
    InvalidChord { c1: f64, c2: f64, value: f64 },
    #[error("evader must lie strictly below the target line (y = {0})")]
    EvaderNotInPlay(f64),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
}

/// A point on the target line, stored by its abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPoint {
    pub x: f64,
}

impl TargetPoint {
    pub fn point(self) -> Point {
        Point::new(self.x, 0.0)
    }
}

/// Race margin of a single pursuer for aim point `(xp, 0)`. Positive means
/// the evader gets there first.
pub fn g1(xp: f64, evader: Point, pursuer: Point, alpha: f64) -> f64 {
    let p = Point::new(xp, 0.0);
    p.dist(pursuer) - p.dist(evader) / alpha
}

/// Derivative of [`g1`] with respect to `xp`.
fn g1_slope(xp: f64, evader: Point, pursuer: Point, alpha: f64) -> f64 {
    let dp = Point::new(xp - pursuer.x, pursuer.y).norm();
    let de = Point::new(xp - evader.x, evader.y).norm();
    let a = if dp > 0.0 { (xp - pursuer.x) / dp } else { 0.0 };
    let b = if de > 0.0 { (xp - evader.x) / de } else { 0.0 };
    a - b / alpha
}

fn g1_curvature(xp: f64, evader: Point, pursuer: Point, alpha: f64) -> f64 {
    let dp = Point::new(xp - pursuer.x, pursuer.y).norm();
    let de = Point::new(xp - evader.x, evader.y).norm();
    pursuer.y * pursuer.y / dp.powi(3) - evader.y * evader.y / (alpha * de.powi(3))
}

/// Minimum of [`g1`] over the pursuers.
pub fn coalition_margin(
    xp: f64,
    evader: Point,
    pursuers: &[Point],
    alpha: f64,
) -> Result<f64, MarginError> {
    if pursuers.is_empty() {
        return Err(MarginError::NoPursuers);
    }
    Ok(min_margin(xp, evader, pursuers, alpha))
}

fn min_margin(xp: f64, evader: Point, pursuers: &[Point], alpha: f64) -> f64 {
    pursuers
        .iter()
        .map(|&p| g1(xp, evader, p, alpha))
        .fold(f64::INFINITY, f64::min)
}

/// The coalition margin over `[0, l]` split at the points where the nearest
/// pursuer changes. On each piece only one pursuer matters.
#[derive(Debug, Clone)]
pub struct MarginProfile {
    evader: Point,
    pursuers: Vec<Point>,
    alpha: f64,
    l: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<(f64, f64, usize)>,
}

impl MarginProfile {
    pub fn new(
        evader: Point,
        pursuers: &[Point],
        alpha: f64,
        l: f64,
    ) -> Result<Self, MarginError> {
        check_alpha(alpha)?;
        if pursuers.is_empty() {
            return Err(MarginError::NoPursuers);
        }
        let pieces = nearest_pursuer_pieces(pursuers, l);
        let breakpoints = pieces.iter().skip(1).map(|&(a, _, _)| a).collect();
        Ok(MarginProfile {
            evader,
            pursuers: pursuers.to_vec(),
            alpha,
            l,
            breakpoints,
            pieces,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        min_margin(x, self.evader, &self.pursuers, self.alpha)
    }

    /// Interior points of `[0, l]` where the nearest pursuer changes.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `(x_lo, x_hi, pursuer index)` for each piece, in order.
    pub fn pieces(&self) -> &[(f64, f64, usize)] {
        &self.pieces
    }

    pub fn target_length(&self) -> f64 {
        self.l
    }
}

/// Partition of `[0, l]` by nearest pursuer. Ties go to the lower index.
fn nearest_pursuer_pieces(pursuers: &[Point], l: f64) -> Vec<(f64, f64, usize)> {
    let mut cells: Vec<(f64, f64, usize)> = Vec::new();
    for (i, &pi) in pursuers.iter().enumerate() {
        let (mut lo, mut hi) = (0.0f64, l);
        for (j, &pj) in pursuers.iter().enumerate() {
            if i == j {
                continue;
            }
            // On the x-axis, |p - pi|^2 - |p - pj|^2 is affine in x.
            let slope = 2.0 * (pj.x - pi.x);
            let c = pi.norm_sq() - pj.norm_sq();
            if slope == 0.0 {
                // Same abscissa: one of them is nearer everywhere.
                if c > 0.0 || (c == 0.0 && j < i) {
                    hi = lo - 1.0;
                }
                continue;
            }
            let xc = -c / slope;
            // closer to pi where slope * x + c < 0, i.e. on one side of xc.
            if slope > 0.0 {
                hi = hi.min(xc);
            } else {
                lo = lo.max(xc);
            }
        }
        if hi > lo {
            cells.push((lo, hi, i));
        }
    }
    if cells.is_empty() {
        // Only possible when every pursuer ties; fall back to the first.
        cells.push((0.0, l, 0));
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Close rounding gaps so the pieces tile [0, l].
    cells[0].0 = 0.0;
    let last = cells.len() - 1;
    cells[last].1 = l;
    for k in 1..cells.len() {
        let mid = 0.5 * (cells[k - 1].1 + cells[k].0);
        cells[k - 1].1 = mid;
        cells[k].0 = mid;
    }
    cells
}

/// Maximizer of a unimodal function on `[a, b]` by golden-section search.
/// Iterates until the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0;
    while b - a > tol && guard < 400 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        guard += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // Report the best point seen at the end, endpoints included.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Abscissae where the Apollonius circle of `evader` vs `pursuer` meets the
/// target line; the single-pursuer margin is positive strictly between them.
pub fn apollonius_chord(evader: Point, pursuer: Point, alpha: f64) -> Option<(f64, f64)> {
    apollonius(evader, pursuer, alpha)
        .ok()
        .and_then(|c| c.x_axis_chord())
}

/// Result of [`maximize_margin`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginMax {
    pub x: f64,
    pub value: f64,
}

/// Best aim point on `[0, l]` for `evader` against a coalition.
///
/// Splits the target line at the nearest-pursuer changes and maximizes each
/// piece separately. Where the single-pursuer margin is positive it is
/// unimodal, and a safeguarded Newton iteration on its slope finds the
/// maximum; elsewhere a coarse scan and a golden-section search bracket it
/// first. Both ends of the target line and every breakpoint are always
/// evaluated.
pub fn maximize_margin(
    evader: Point,
    pursuers: &[Point],
    alpha: f64,
    l: f64,
    tol_x: f64,
) -> Result<MarginMax, MarginError> {
    if !(evader.y < 0.0) {
        return Err(MarginError::EvaderNotInPlay(evader.y));
    }
    if !(tol_x > 0.0) {
        return Err(MarginError::Tolerance(tol_x));
    }
    let profile = MarginProfile::new(evader, pursuers, alpha, l)?;
    let mut best = MarginMax {
        x: 0.0,
        value: profile.eval(0.0),
    };
    let mut offer = |x: f64, value: f64| {
        if value > best.value || (value == best.value && x < best.x) {
            best = MarginMax { x, value };
        }
    };
    offer(l, profile.eval(l));
    for &b in profile.breakpoints() {
        offer(b, profile.eval(b));
    }
    for &(lo, hi, i) in profile.pieces() {
        let pursuer = pursuers[i];
        let single = |x: f64| g1(x, evader, pursuer, alpha);
        let positive_part = apollonius_chord(evader, pursuer, alpha)
            .map(|(c1, c2)| (c1.max(lo), c2.min(hi)))
            .filter(|(a, b)| b > a);
        let x = match positive_part {
            Some((a, b)) => stationary_point(evader, pursuer, alpha, a, b),
            None => {
                // golden section leaves x uncertain to about sqrt(eps);
                // polish with the slope root when it is bracketed
                let (x, _) = scan_then_refine(single, lo, hi, tol_x);
                let h = 1e-6 * (1.0 + x.abs());
                let (a, b) = ((x - h).max(lo), (x + h).min(hi));
                let polished = stationary_point(evader, pursuer, alpha, a, b);
                if single(polished) >= single(x) {
                    polished
                } else {
                    x
                }
            }
        };
        offer(x, profile.eval(x));
    }
    Ok(best)
}

fn scan_then_refine<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    if hi - lo <= tol {
        let x = 0.5 * (lo + hi);
        return (x, f(x));
    }
    let step = (hi - lo) / SCAN_SAMPLES as f64;
    let (k, _) = (0..=SCAN_SAMPLES)
        .map(|k| (k, f(lo + step * k as f64)))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let a = lo + step * k.saturating_sub(1) as f64;
    let b = (lo + step * (k + 1) as f64).min(hi);
    golden_section_max(f, a, b, tol)
}

/// Stationary point of the single-pursuer margin on its positive chord
/// `[c1, c2]`, found by a bisection-safeguarded Newton iteration on the
/// derivative.
pub fn solve_quartic_otp(
    evader: Point,
    pursuer: Point,
    alpha: f64,
    c1: f64,
    c2: f64,
) -> Result<f64, MarginError> {
    check_alpha(alpha)?;
    for c in [c1, c2] {
        let value = g1(c, evader, pursuer, alpha);
        if value.abs() > 1e-6 || c1 > c2 {
            return Err(MarginError::InvalidChord { c1, c2, value });
        }
    }
    if pursuer.x == evader.x {
        return Ok(evader.x);
    }
    Ok(stationary_point(evader, pursuer, alpha, c1, c2))
}

/// Maximizer of the single-pursuer margin on `[lo, hi]`, assuming its slope
/// changes sign at most once there, from positive to negative.
fn stationary_point(evader: Point, pursuer: Point, alpha: f64, lo: f64, hi: f64) -> f64 {
    let slope = |x: f64| g1_slope(x, evader, pursuer, alpha);
    let (mut lo, mut hi) = (lo, hi);
    if slope(lo) <= 0.0 {
        return lo;
    }
    if slope(hi) >= 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let s = slope(x);
        if s.abs() <= 1e-12 {
            return x;
        }
        if s > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
        let curv = g1_curvature(x, evader, pursuer, alpha);
        let newton = x - s / curv;
        x = if curv < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn g1_examples() {
        assert_eq!(g1(1.0, p(1.0, -1.0), p(1.0, -2.0), 0.5), 0.0);
        assert_eq!(g1(1.0, p(1.0, -0.5), p(1.0, -2.0), 0.5), 1.0);
    }

    #[test]
    fn g1_sign_matches_apollonius_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let e = p(rng.gen_range(-1.0..3.0), rng.gen_range(-3.0..-0.01));
            let q = p(rng.gen_range(-1.0..3.0), rng.gen_range(-3.0..0.0));
            let alpha = rng.gen_range(0.1..0.9);
            let xp = rng.gen_range(0.0..2.0);
            let v = g1(xp, e, q, alpha);
            if v.abs() < 1e-9 || e.dist(q) < 1e-6 {
                continue;
            }
            let circle = apollonius(e, q, alpha).unwrap();
            assert_eq!(v > 0.0, circle.contains(p(xp, 0.0)));
            checked += 1;
        }
    }

    #[test]
    fn coalition_margin_examples() {
        let e = p(1.0, -0.57);
        assert_eq!(
            coalition_margin(1.3, e, &[p(1.0, -2.0)], 0.5).unwrap(),
            g1(1.3, e, p(1.0, -2.0), 0.5)
        );
        let pair = [p(0.5, -1.0), p(1.5, -1.0)];
        let m = coalition_margin(1.0, e, &pair, 0.5).unwrap();
        // 0.5 * sqrt(1.25) * 2 - 0.57 / 0.5
        let expected = 1.25f64.sqrt() - 1.14;
        assert!((m - expected).abs() < 1e-12);
        assert!((m - (-0.022)).abs() < 1e-3);
        let swapped = coalition_margin(1.0, e, &[pair[1], pair[0]], 0.5).unwrap();
        assert_eq!(m, swapped);
        assert_eq!(
            coalition_margin(1.0, e, &[], 0.5),
            Err(MarginError::NoPursuers)
        );
    }

    #[test]
    fn maximize_examples() {
        let m = maximize_margin(p(1.0, -1.0), &[p(1.0, -2.0)], 0.5, 2.0, DEFAULT_TOL_X).unwrap();
        assert!((m.x - 1.0).abs() < 1e-8);
        assert!(m.value.abs() < 1e-12);

        let m = maximize_margin(p(1.0, -0.5), &[p(1.0, -2.0)], 0.5, 2.0, DEFAULT_TOL_X).unwrap();
        assert!((m.x - 1.0).abs() < 1e-8);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximize_rejects_bad_input() {
        assert!(matches!(
            maximize_margin(p(1.0, 0.5), &[p(1.0, -2.0)], 0.5, 2.0, 1e-10),
            Err(MarginError::EvaderNotInPlay(_))
        ));
        assert!(matches!(
            maximize_margin(p(1.0, -0.5), &[p(1.0, -2.0)], 0.5, 2.0, 0.0),
            Err(MarginError::Tolerance(_))
        ));
    }

    fn dense_max(e: Point, ps: &[Point], alpha: f64, l: f64, n: usize) -> f64 {
        (0..=n)
            .map(|k| min_margin(l * k as f64 / n as f64, e, ps, alpha))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn maximize_matches_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let l = rng.gen_range(1.0..3.0);
            let alpha = rng.gen_range(0.2..0.95);
            let e = p(rng.gen_range(-0.5..l + 0.5), rng.gen_range(-2.0..-0.01));
            let n = rng.gen_range(1..=5);
            let ps: Vec<Point> = (0..n)
                .map(|_| p(rng.gen_range(-0.5..l + 0.5), rng.gen_range(-2.5..0.0)))
                .collect();
            let m = maximize_margin(e, &ps, alpha, l, DEFAULT_TOL_X).unwrap();
            let grid = dense_max(e, &ps, alpha, l, 100_000);
            // never worse than the grid, and not better than the true supremum
            assert!(m.value >= grid - 1e-6, "value {} grid {}", m.value, grid);
            assert!(m.value <= grid + 1e-3);
            assert!((m.value - min_margin(m.x, e, &ps, alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn maximize_dominates_endpoints_and_breakpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let l = 2.0;
            let alpha = rng.gen_range(0.2..0.95);
            let e = p(rng.gen_range(-0.5..2.5), rng.gen_range(-2.0..-0.01));
            let ps: Vec<Point> = (0..4)
                .map(|_| p(rng.gen_range(-0.5..2.5), rng.gen_range(-2.5..0.0)))
                .collect();
            let prof = MarginProfile::new(e, &ps, alpha, l).unwrap();
            let m = maximize_margin(e, &ps, alpha, l, DEFAULT_TOL_X).unwrap();
            for x in [0.0, l].iter().chain(prof.breakpoints()) {
                assert!(m.value >= prof.eval(*x));
            }
            let bps = prof.breakpoints();
            assert!(bps.windows(2).all(|w| w[0] < w[1]));
            assert!(bps.iter().all(|&b| b > 0.0 && b < l));
        }
    }

    #[test]
    fn quartic_equal_abscissa_and_symmetry() {
        let e = p(1.0, -1.0);
        let q = p(1.0, -2.0);
        let (c1, c2) = apollonius_chord(e, q, 0.5).unwrap();
        assert_eq!(solve_quartic_otp(e, q, 0.5, c1, c2).unwrap(), 1.0);

        let e = p(0.7, -0.4);
        let q = p(0.7, -1.3);
        let (c1, c2) = apollonius_chord(e, q, 0.6).unwrap();
        assert_eq!(solve_quartic_otp(e, q, 0.6, c1, c2).unwrap(), 0.7);
    }

    #[test]
    fn quartic_rejects_wrong_chord() {
        let e = p(1.0, -0.5);
        let q = p(1.0, -2.0);
        assert!(matches!(
            solve_quartic_otp(e, q, 0.5, 0.9, 1.1),
            Err(MarginError::InvalidChord { .. })
        ));
    }

    #[test]
    fn quartic_matches_dense_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut done = 0;
        while done < 30 {
            let alpha = rng.gen_range(0.2..0.9);
            let e = p(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..-0.05));
            let q = p(rng.gen_range(-1.0..3.0), rng.gen_range(-3.0..0.0));
            let Some((c1, c2)) = apollonius_chord(e, q, alpha) else {
                continue;
            };
            let x = solve_quartic_otp(e, q, alpha, c1, c2).unwrap();
            assert!(g1_slope(x, e, q, alpha).abs() <= 1e-10);
            let n = 1_000_000;
            let h = (c2 - c1) / n as f64;
            let (k, _) = (0..=n)
                .map(|k| (k, g1(c1 + h * k as f64, e, q, alpha)))
                .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
            assert!((x - (c1 + h * k as f64)).abs() <= h, "x {x}");
            done += 1;
        }
    }

    #[test]
    fn margin_is_unimodal_on_positive_chord() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 200 {
            let alpha = rng.gen_range(0.1..0.95);
            let e = p(rng.gen_range(-1.0..3.0), rng.gen_range(-2.0..-0.01));
            let q = p(rng.gen_range(-1.0..3.0), rng.gen_range(-3.0..0.0));
            let Some((c1, c2)) = apollonius_chord(e, q, alpha) else {
                continue;
            };
            let n = 10_000;
            let h = (c2 - c1) / n as f64;
            let vals: Vec<f64> = (0..=n).map(|k| g1(c1 + h * k as f64, e, q, alpha)).collect();
            let signs: Vec<bool> = vals
                .windows(2)
                .filter(|w| (w[1] - w[0]).abs() > 1e-13)
                .map(|w| w[1] > w[0])
                .collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            assert!(changes <= 1, "{changes} direction changes");
            if let (Some(first), Some(last)) = (signs.first(), signs.last()) {
                assert!(*first || !*last, "decreasing then increasing");
            }
            done += 1;
        }
    }

    #[test]
    fn evader_wins_iff_some_grid_point_is_safe() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut done = 0;
        while done < 200 {
            let l = 2.0;
            let alpha = rng.gen_range(0.2..0.9);
            let e = p(rng.gen_range(-0.3..2.3), rng.gen_range(-1.5..-0.01));
            let ps: Vec<Point> = (0..3)
                .map(|_| p(rng.gen_range(-0.5..2.5), rng.gen_range(-2.0..0.0)))
                .collect();
            let m = maximize_margin(e, &ps, alpha, l, DEFAULT_TOL_X).unwrap();
            if m.value.abs() < 1e-3 {
                continue;
            }
            let n = 20_000;
            let safe = (0..=n).any(|k| {
                let q = p(l * k as f64 / n as f64, 0.0);
                let nearest = ps.iter().map(|&x| x.dist(q)).fold(f64::INFINITY, f64::min);
                e.dist(q) < alpha * nearest
            });
            assert_eq!(m.value > 0.0, safe);
            done += 1;
        }
    }
}
