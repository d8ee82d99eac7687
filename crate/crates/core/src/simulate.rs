//! Open-loop engagements.
//!
//! The evader runs straight for its best aim point on the target line at
//! speed `alpha`; every pursuer runs straight for the same point at unit
//! speed and waits there. Capture is declared when a pursuer comes within
//! `capture_radius` of the evader.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Side};
use crate::margin::{maximize_margin, MarginError, TargetPoint, DEFAULT_TOL_X};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error("invalid engagement config: {0}")]
    Config(String),
    #[error("evader at ({}, {}) is not in the play region", .0.x, .0.y)]
    NotInPlay(Point),
    #[error(transparent)]
    Margin(#[from] MarginError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementConfig {
    pub dt: f64,
    pub capture_radius: f64,
    pub max_time: f64,
}

impl Default for EngagementConfig {
    fn default() -> Self {
        EngagementConfig {
            dt: 5e-4,
            capture_radius: 1e-3,
            max_time: 100.0,
        }
    }
}

impl EngagementConfig {
    /// Rejects steps long enough for a pursuer to pass the evader unnoticed.
    pub fn validate(&self, alpha: f64) -> Result<(), SimulateError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimulateError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.capture_radius >= 0.0 && self.capture_radius.is_finite()) {
            return Err(SimulateError::Config(format!(
                "capture radius must be non-negative, got {}",
                self.capture_radius
            )));
        }
        if !(self.max_time > 0.0) {
            return Err(SimulateError::Config(format!(
                "max time must be positive, got {}",
                self.max_time
            )));
        }
        let limit = self.capture_radius / (1.0 + alpha);
        if self.capture_radius > 0.0 && self.dt > limit {
            return Err(SimulateError::Config(format!(
                "dt = {} exceeds capture_radius / (1 + alpha) = {limit}",
                self.dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutcomeKind {
    Captured,
    ReachedTarget,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub time: f64,
    /// Abscissa of the aim point.
    pub otp: f64,
    pub evader: Point,
    pub pursuers: Vec<Point>,
    /// Distance from the nearest pursuer when the evader arrives.
    pub payoff: Option<f64>,
}

/// One row of a trajectory trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub id: String,
    pub position: Point,
}

/// The evader's best aim point against `pursuers`.
pub fn evader_otp(
    evader: Point,
    pursuers: &[Point],
    alpha: f64,
    l: f64,
) -> Result<TargetPoint, SimulateError> {
    let best = maximize_margin(evader, pursuers, alpha, l, DEFAULT_TOL_X)?;
    Ok(TargetPoint { x: best.x })
}

pub fn run_engagement(
    pursuers: &[Point],
    evader: Point,
    scenario: &Scenario,
    config: &EngagementConfig,
) -> Result<Outcome, SimulateError> {
    engage(pursuers, evader, scenario, config, |_, _, _| {})
}

/// Like [`run_engagement`], also returning every sampled position.
pub fn run_engagement_traced(
    pursuers: &[Point],
    evader: Point,
    scenario: &Scenario,
    config: &EngagementConfig,
) -> Result<(Outcome, Vec<TraceRow>), SimulateError> {
    let mut rows = Vec::new();
    let outcome = engage(pursuers, evader, scenario, config, |t, e, ps| {
        rows.push(TraceRow {
            t,
            id: "E1".into(),
            position: e,
        });
        for (i, &p) in ps.iter().enumerate() {
            rows.push(TraceRow {
                t,
                id: format!("P{}", i + 1),
                position: p,
            });
        }
    })?;
    Ok((outcome, rows))
}

fn engage<F: FnMut(f64, Point, &[Point])>(
    pursuers: &[Point],
    evader: Point,
    scenario: &Scenario,
    config: &EngagementConfig,
    mut record: F,
) -> Result<Outcome, SimulateError> {
    let alpha = scenario.alpha();
    config.validate(alpha)?;
    if !scenario.domain().contains(evader, Side::Play) {
        return Err(SimulateError::NotInPlay(evader));
    }
    let otp = evader_otp(evader, pursuers, alpha, scenario.target_length())?;
    let aim = otp.point();
    let arrival = evader.dist(aim) / alpha;

    let at = |t: f64| {
        let e = evader.lerp(aim, (alpha * t / evader.dist(aim)).min(1.0));
        let ps: Vec<Point> = pursuers
            .iter()
            .map(|&p| {
                let d = p.dist(aim);
                if d <= t {
                    aim
                } else {
                    p.lerp(aim, t / d)
                }
            })
            .collect();
        (e, ps)
    };
    let nearest = |e: Point, ps: &[Point]| ps.iter().map(|p| p.dist(e)).fold(f64::INFINITY, f64::min);
    let finish = |kind, time, e: Point, ps: Vec<Point>, payoff| Outcome {
        kind,
        time,
        otp: otp.x,
        evader: e,
        pursuers: ps,
        payoff,
    };

    let mut step = 0u64;
    loop {
        let t = (step as f64 * config.dt).min(arrival).min(config.max_time);
        let (e, ps) = at(t);
        record(t, e, &ps);
        let gap = nearest(e, &ps);
        if gap <= config.capture_radius {
            return Ok(finish(OutcomeKind::Captured, t, e, ps, None));
        }
        if t >= arrival {
            return Ok(finish(OutcomeKind::ReachedTarget, t, aim, ps, Some(gap)));
        }
        if t >= config.max_time {
            return Ok(finish(OutcomeKind::Timeout, t, e, ps, None));
        }
        step += 1;
    }
}

/// Serializes a trace as `t,id,x,y` rows with a header.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("t,id,x,y\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.t, r.id, r.position.x, r.position.y).expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margin::coalition_margin;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn scenario(pursuers: Vec<Point>, evaders: Vec<Point>) -> Scenario {
        Scenario::rectangle(2.0, 3.0, 1.0, 0.5, pursuers, evaders).unwrap()
    }

    fn config() -> EngagementConfig {
        EngagementConfig {
            dt: 1e-4,
            capture_radius: 1e-3,
            max_time: 50.0,
        }
    }

    #[test]
    fn otp_by_symmetry() {
        let x = evader_otp(p(1.0, -1.0), &[p(1.0, -2.0)], 0.5, 2.0).unwrap().x;
        assert!((x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn otp_on_barrier_matches_closed_form() {
        let (alpha, h) = (0.5, p(0.8, -1.6));
        for xe in [0.5, 0.9, 1.2] {
            let curve = crate::barrier::barrier_from_positions(&[h], alpha, 2.0).unwrap();
            let e = p(xe, curve.y_at(xe).unwrap());
            let x = evader_otp(e, &[h], alpha, 2.0).unwrap().x;
            let want = (e.x - alpha * alpha * h.x) / (1.0 - alpha * alpha);
            assert!((x - want).abs() < 1e-8, "{x} vs {want}");
        }
    }

    #[test]
    fn barrier_evader_arrives_together() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -1.0)]);
        let out = run_engagement(s.pursuers(), p(1.0, -1.0), &s, &config()).unwrap();
        assert_ne!(out.kind, OutcomeKind::Timeout);
        let gap = out.pursuers[0].dist(out.evader);
        assert!(gap <= 2e-3, "gap {gap}");
    }

    #[test]
    fn ewr_evader_reaches_target() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -0.5)]);
        let out = run_engagement(s.pursuers(), p(1.0, -0.5), &s, &config()).unwrap();
        assert_eq!(out.kind, OutcomeKind::ReachedTarget);
        assert!((out.payoff.unwrap() - 1.0).abs() < 5e-3 + 1e-4);
        assert!((out.time - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn pwr_evader_is_captured() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -1.5)]);
        let out = run_engagement(s.pursuers(), p(1.0, -1.5), &s, &config()).unwrap();
        assert_eq!(out.kind, OutcomeKind::Captured);
        assert!(out.evader.y < 0.0);
    }

    #[test]
    fn payoff_matches_margin() {
        let ps = vec![p(0.3, -1.7), p(1.6, -2.2), p(1.8, 0.9)];
        let e = p(0.9, -0.4);
        let s = scenario(ps.clone(), vec![e]);
        let cfg = config();
        let out = run_engagement(&ps, e, &s, &cfg).unwrap();
        assert_eq!(out.kind, OutcomeKind::ReachedTarget);
        let m = coalition_margin(out.otp, e, &ps, 0.5).unwrap();
        assert!((out.payoff.unwrap() - m).abs() <= cfg.capture_radius + 1.5 * cfg.dt);
    }

    #[test]
    fn tunneling_config_is_rejected() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -0.5)]);
        let cfg = EngagementConfig {
            dt: 1e-3,
            ..config()
        };
        assert!(matches!(
            run_engagement(s.pursuers(), p(1.0, -0.5), &s, &cfg),
            Err(SimulateError::Config(_))
        ));
    }

    #[test]
    fn timeout() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -0.5)]);
        let cfg = EngagementConfig {
            max_time: 0.25,
            ..config()
        };
        let out = run_engagement(s.pursuers(), p(1.0, -0.5), &s, &cfg).unwrap();
        assert_eq!(out.kind, OutcomeKind::Timeout);
        assert_eq!(out.time, 0.25);
    }

    #[test]
    fn trace_rows() {
        let s = scenario(vec![p(1.0, -2.0)], vec![p(1.0, -0.5)]);
        let cfg = EngagementConfig {
            dt: 0.1,
            capture_radius: 0.0,
            max_time: 10.0,
        };
        let (out, rows) = run_engagement_traced(s.pursuers(), p(1.0, -0.5), &s, &cfg).unwrap();
        assert_eq!(out.kind, OutcomeKind::ReachedTarget);
        let csv = trace_csv(&rows);
        assert!(csv.starts_with("t,id,x,y\n0,E1,1,-0.5\n0,P1,1,-2\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 11);
    }
}
