//! Solve reports and their deterministic JSON form.
//!
//! Keys are sorted and every float is rounded to 12 significant digits, so
//! identical inputs give byte-identical documents. All coordinates in a
//! report are in the canonical frame (target line from `(0, 0)` to
//! `(l, 0)`); the scenario echo keeps the file's own coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::barrier::{build_barrier, BarrierCurve, BarrierError, Coalition, CurvePiece};
use crate::geometry::{Point, Side, GEO_EPS};
use crate::margin::{maximize_margin, MarginError, DEFAULT_TOL_X};
use crate::matching::{
    build_ilp, execution_coalitions, prior_info, solve_ilp, AssignmentSolution, MatchingError,
    PriorInfoVector,
};
use crate::region::{classify_against, oracle_classify, RegionError, RegionLabel, DEFAULT_TOL_BAND};
use crate::scenario::{Scenario, ScenarioDocument};
use crate::simulate::{run_engagement, EngagementConfig, Outcome, SimulateError};

/// Margins smaller than this are too close to a barrier for the two
/// classification paths to be compared.
pub const ORACLE_MARGIN_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Margin(#[from] MarginError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub geo_eps: f64,
    pub tol_band: f64,
    pub tol_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSummary {
    pub code: u64,
    /// One-based member indices.
    pub members: Vec<usize>,
    /// One-based indices of the members that shape the barrier.
    pub active: Vec<usize>,
    pub x_extent: [f64; 2],
    pub junctions: Vec<f64>,
    pub pieces: Vec<CurvePiece>,
}

impl BarrierSummary {
    pub fn new(coalition: &Coalition, curve: &BarrierCurve) -> Self {
        let (lo, hi) = curve.x_extent();
        BarrierSummary {
            code: coalition.code(),
            members: coalition.members().iter().map(|i| i + 1).collect(),
            active: curve
                .generating_coalition()
                .members()
                .iter()
                .map(|i| i + 1)
                .collect(),
            x_extent: [lo, hi],
            junctions: curve.junctions(),
            pieces: curve.pieces().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub q: usize,
    pub z_star: Vec<u8>,
    pub pairs_one: Vec<[usize; 2]>,
    pub pairs_two: Vec<[usize; 3]>,
}

impl From<&AssignmentSolution> for Assignment {
    fn from(s: &AssignmentSolution) -> Self {
        Assignment {
            q: s.q,
            z_star: s.z_star.clone(),
            pairs_one: s.pairs_one.iter().map(|&(i, j)| [i, j]).collect(),
            pairs_two: s.pairs_two.iter().map(|&(a, b, j)| [a, b, j]).collect(),
        }
    }
}

/// Label of one evader against the whole pursuit team.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaderClass {
    /// One-based.
    pub evader: usize,
    pub label: RegionLabel,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub coalition: u64,
    pub point: Point,
    pub barrier: RegionLabel,
    pub oracle: RegionLabel,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub seed: u64,
    pub compared: usize,
    pub skipped_near_barrier: usize,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub tolerances: Tolerances,
    pub scenario: ScenarioDocument,
    pub target_length: f64,
    pub barriers: Vec<BarrierSummary>,
    pub prior: PriorInfoVector,
    pub assignment: Assignment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifications: Option<Vec<EvaderClass>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engagements: Option<Vec<Outcome>>,
}

impl Report {
    /// Internal consistency: the pair lists must account for `q`.
    pub fn is_consistent(&self) -> bool {
        let a = &self.assignment;
        a.q == a.pairs_one.len() + a.pairs_two.len()
            && a.z_star.iter().filter(|&&b| b == 1).count() == a.q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Cross-check barrier labels against the margin oracle.
    pub oracle: bool,
    /// Extra random points per coalition for the cross-check.
    pub oracle_samples: usize,
    pub seed: u64,
    pub classify_evaders: bool,
    pub engagements: Option<EngagementConfig>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            oracle: false,
            oracle_samples: 200,
            seed: 0,
            classify_evaders: true,
            engagements: None,
        }
    }
}

fn grand_coalition(n_p: usize) -> Coalition {
    Coalition::from_code(if n_p >= 64 { u64::MAX } else { (1 << n_p) - 1 }, n_p)
        .expect("non-empty team")
}

/// Coalitions summarized in reports: execution coalitions, then the whole
/// team when it is larger than two.
pub fn reported_coalitions(n_p: usize) -> Vec<Coalition> {
    let mut out = execution_coalitions(n_p);
    if n_p > 2 {
        out.push(grand_coalition(n_p));
    }
    out
}

pub fn solve(scenario: &Scenario, options: &SolveOptions) -> Result<Report, SolveError> {
    let coalitions = reported_coalitions(scenario.n_p());
    let curves = coalitions
        .iter()
        .map(|c| build_barrier(c, scenario))
        .collect::<Result<Vec<_>, _>>()?;
    let prior = prior_info(scenario)?;
    let ilp = build_ilp(&prior, scenario.n_p(), scenario.n_e())?;
    let solution = solve_ilp(&ilp);
    let (alpha, l) = (scenario.alpha(), scenario.target_length());

    let classifications = if options.classify_evaders {
        let grand = curves.last().expect("at least one coalition");
        let mut out = Vec::new();
        for (j, &e) in scenario.evaders().iter().enumerate() {
            out.push(EvaderClass {
                evader: j + 1,
                label: classify_against(grand, e, DEFAULT_TOL_BAND),
                margin: maximize_margin(e, scenario.pursuers(), alpha, l, DEFAULT_TOL_X)?.value,
            });
        }
        Some(out)
    } else {
        None
    };

    let oracle = if options.oracle {
        Some(oracle_check(scenario, &coalitions, &curves, options)?)
    } else {
        None
    };

    let engagements = match &options.engagements {
        Some(cfg) => Some(
            scenario
                .evaders()
                .iter()
                .map(|&e| run_engagement(scenario.pursuers(), e, scenario, cfg))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };

    Ok(Report {
        tool: ToolInfo {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        tolerances: Tolerances {
            geo_eps: GEO_EPS,
            tol_band: DEFAULT_TOL_BAND,
            tol_x: DEFAULT_TOL_X,
        },
        scenario: scenario.document().clone(),
        target_length: l,
        barriers: coalitions
            .iter()
            .zip(&curves)
            .map(|(c, b)| BarrierSummary::new(c, b))
            .collect(),
        prior,
        assignment: Assignment::from(&solution),
        classifications,
        oracle,
        engagements,
    })
}

fn oracle_check(
    scenario: &Scenario,
    coalitions: &[Coalition],
    curves: &[BarrierCurve],
    options: &SolveOptions,
) -> Result<OracleCheck, SolveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let (lo, hi) = scenario.domain().bounding_box();
    let mut samples: Vec<Point> = scenario.evaders().to_vec();
    let mut tries = 0;
    while samples.len() < scenario.n_e() + options.oracle_samples && tries < 100 * options.oracle_samples {
        tries += 1;
        let q = Point::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=0.0));
        if scenario.domain().contains(q, Side::Play) {
            samples.push(q);
        }
    }
    let (alpha, l) = (scenario.alpha(), scenario.target_length());
    let mut check = OracleCheck {
        seed: options.seed,
        compared: 0,
        skipped_near_barrier: 0,
        disagreements: Vec::new(),
    };
    for (c, curve) in coalitions.iter().zip(curves) {
        let positions: Vec<Point> = c.members().iter().map(|&i| scenario.pursuers()[i]).collect();
        for &q in &samples {
            let margin = maximize_margin(q, &positions, alpha, l, DEFAULT_TOL_X)?.value;
            if margin.abs() <= ORACLE_MARGIN_FLOOR {
                check.skipped_near_barrier += 1;
                continue;
            }
            check.compared += 1;
            let barrier = classify_against(curve, q, DEFAULT_TOL_BAND);
            let oracle = oracle_classify(q, &positions, alpha, l, DEFAULT_TOL_BAND)?;
            if barrier != oracle {
                check.disagreements.push(Disagreement {
                    coalition: c.code(),
                    point: q,
                    barrier,
                    oracle,
                    margin,
                });
            }
        }
    }
    Ok(check)
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Any serializable value as canonical JSON: sorted keys, rounded floats,
/// two-space indentation, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

pub fn emit_report(report: &Report) -> String {
    to_canonical_json(report)
}
