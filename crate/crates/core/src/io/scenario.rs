//! Scenario files and the validated game instance.
//!
//! A scenario is one JSON document:
//!
//! ```json
//! {
//!   "domain": {"vertices": [[0, -3], [2, -3], [2, 1], [0, 1]]},
//!   "target_length": 2,
//!   "alpha": 0.5,
//!   "pursuers": [[0.5, -1], [1.5, -1]],
//!   "evaders": [[1, -0.57]]
//! }
//! ```
//!
//! Instead of `target_length` a raw pose may be given as
//! `"target": {"start": [x, y], "end": [x, y], "target_side_hint": [x, y]}`;
//! everything is then moved into the frame where the target line runs from
//! `(0, 0)` to `(l, 0)` and the hint lies above it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{normalize_frame, GameDomain, GeometryError, Point, RigidTransform, Side, GEO_EPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub target_side_hint: [f64; 2],
}

/// The on-disk form of a scenario, kept verbatim for echoing in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub domain: DomainDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_length: Option<f64>,
    pub alpha: f64,
    pub pursuers: Vec<[f64; 2]>,
    pub evaders: Vec<[f64; 2]>,
}

/// Standing assumptions a scenario must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Assumption 1: players start from pairwise distinct positions.
    DistinctPositions,
    /// Assumption 3: evaders start in the play region, pursuers anywhere in
    /// the domain.
    Deployment,
    /// Assumption 4: `0 < alpha < 1`.
    SpeedRatio,
    /// Mirroring a pursuer across the target line must not land on another
    /// pursuer.
    VirtualCollision,
}

impl Assumption {
    pub fn label(self) -> &'static str {
        match self {
            Assumption::DistinctPositions => "Assumption 1 (distinct initial positions)",
            Assumption::Deployment => "Assumption 3 (initial deployment)",
            Assumption::SpeedRatio => "Assumption 4 (speed ratio 0 < alpha < 1)",
            Assumption::VirtualCollision => "virtual pursuer collision",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub assumption: Assumption,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violated: {}", self.assumption.label(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Schema(String),
    #[error("invalid domain: {0}")]
    Domain(#[from] GeometryError),
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation>),
}

impl ScenarioError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ScenarioError::Violations(v) => v,
            _ => &[],
        }
    }
}

/// A validated game instance in the canonical frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    document: ScenarioDocument,
    transform: RigidTransform,
    domain: GameDomain,
    alpha: f64,
    pursuers: Vec<Point>,
    evaders: Vec<Point>,
}

fn points(raw: &[[f64; 2]]) -> Vec<Point> {
    raw.iter().map(|&p| Point::from(p)).collect()
}

fn raw(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|&p| p.into()).collect()
}

impl Scenario {
    /// Validates a scenario already expressed in the canonical frame.
    pub fn new(
        domain: GameDomain,
        alpha: f64,
        pursuers: Vec<Point>,
        evaders: Vec<Point>,
    ) -> Result<Self, ScenarioError> {
        let document = ScenarioDocument {
            domain: DomainDoc {
                vertices: raw(domain.vertices()),
            },
            target: None,
            target_length: Some(domain.target_length()),
            alpha,
            pursuers: raw(&pursuers),
            evaders: raw(&evaders),
        };
        Self::from_document(document)
    }

    /// Rectangle `[0, l] x [-depth, height]`, crossed by the target line at
    /// `y = 0`.
    pub fn rectangle(
        l: f64,
        depth: f64,
        height: f64,
        alpha: f64,
        pursuers: Vec<Point>,
        evaders: Vec<Point>,
    ) -> Result<Self, ScenarioError> {
        let domain = GameDomain::new(
            vec![
                Point::new(0.0, -depth),
                Point::new(l, -depth),
                Point::new(l, height),
                Point::new(0.0, height),
            ],
            l,
        )?;
        Self::new(domain, alpha, pursuers, evaders)
    }

    pub fn from_document(document: ScenarioDocument) -> Result<Self, ScenarioError> {
        if document.pursuers.is_empty() {
            return Err(ScenarioError::Schema("at least one pursuer is required".into()));
        }
        if document.evaders.is_empty() {
            return Err(ScenarioError::Schema("at least one evader is required".into()));
        }
        let vertices = points(&document.domain.vertices);
        let mut players = points(&document.pursuers);
        players.extend(points(&document.evaders));
        if players.iter().any(|p| !p.is_finite()) || !document.alpha.is_finite() {
            return Err(ScenarioError::Schema("coordinates and alpha must be finite".into()));
        }
        let (transform, l, polygon, players) = match (&document.target, document.target_length) {
            (Some(t), None) => {
                let frame = normalize_frame(
                    t.start.into(),
                    t.end.into(),
                    t.target_side_hint.into(),
                    &vertices,
                    &players,
                )?;
                (frame.transform, frame.target_length, frame.polygon, frame.players)
            }
            (None, Some(l)) => (RigidTransform::IDENTITY, l, vertices, players),
            (Some(_), Some(_)) => {
                return Err(ScenarioError::Schema(
                    "give either \"target\" or \"target_length\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(ScenarioError::Schema(
                    "missing \"target\" or \"target_length\"".into(),
                ))
            }
        };
        let domain = GameDomain::new(polygon, l)?;
        let n_p = document.pursuers.len();
        let pursuers = players[..n_p].to_vec();
        let evaders = players[n_p..].to_vec();
        let alpha = document.alpha;
        let violations = check_assumptions(&domain, alpha, &pursuers, &evaders);
        if !violations.is_empty() {
            return Err(ScenarioError::Violations(violations));
        }
        Ok(Scenario {
            document,
            transform,
            domain,
            alpha,
            pursuers,
            evaders,
        })
    }

    pub fn document(&self) -> &ScenarioDocument {
        &self.document
    }

    /// Map from the file's coordinates to the canonical frame.
    pub fn transform(&self) -> RigidTransform {
        self.transform
    }

    pub fn domain(&self) -> &GameDomain {
        &self.domain
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn target_length(&self) -> f64 {
        self.domain.target_length()
    }

    pub fn pursuers(&self) -> &[Point] {
        &self.pursuers
    }

    pub fn evaders(&self) -> &[Point] {
        &self.evaders
    }

    pub fn n_p(&self) -> usize {
        self.pursuers.len()
    }

    pub fn n_e(&self) -> usize {
        self.evaders.len()
    }
}

fn check_assumptions(
    domain: &GameDomain,
    alpha: f64,
    pursuers: &[Point],
    evaders: &[Point],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |assumption, message: String| out.push(Violation { assumption, message });
    if !(alpha > 0.0 && alpha < 1.0) {
        push(Assumption::SpeedRatio, format!("alpha = {alpha}"));
    }
    let named: Vec<(String, Point)> = pursuers
        .iter()
        .enumerate()
        .map(|(i, &p)| (format!("P{}", i + 1), p))
        .chain(evaders.iter().enumerate().map(|(j, &e)| (format!("E{}", j + 1), e)))
        .collect();
    for (a, (na, pa)) in named.iter().enumerate() {
        for (nb, pb) in &named[a + 1..] {
            if pa.dist(*pb) <= GEO_EPS {
                push(
                    Assumption::DistinctPositions,
                    format!("{na} and {nb} start at the same position"),
                );
            }
        }
    }
    for (i, &p) in pursuers.iter().enumerate() {
        if !domain.contains(p, Side::Any) {
            push(
                Assumption::Deployment,
                format!("P{} at ({}, {}) lies outside the domain", i + 1, p.x, p.y),
            );
        }
    }
    for (j, &e) in evaders.iter().enumerate() {
        if !domain.contains(e, Side::Play) {
            push(
                Assumption::Deployment,
                format!("E{} at ({}, {}) is not in the play region", j + 1, e.x, e.y),
            );
        }
    }
    for (i, &p) in pursuers.iter().enumerate() {
        if p.y <= 0.0 {
            continue;
        }
        for (k, &q) in pursuers.iter().enumerate() {
            if k != i && p.mirrored().dist(q) <= GEO_EPS {
                push(
                    Assumption::VirtualCollision,
                    format!("mirror image of P{} coincides with P{}", i + 1, k + 1),
                );
            }
        }
    }
    out
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let document: ScenarioDocument =
        serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    Scenario::from_document(document)
}
