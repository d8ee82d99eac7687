//! Pursuit-winning and evasion-winning regions.
//!
//! Classification compares the evader's height with the barrier of the
//! coalition. An independent path maximizes the race margin along the
//! target line directly; the two must agree away from the barrier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barrier::{build_barrier, virtualize, BarrierCurve, BarrierError, Coalition};
use crate::geometry::{Point, Side};
use crate::margin::{maximize_margin, MarginError, DEFAULT_TOL_X};
use crate::scenario::Scenario;

/// Default half-width of the on-barrier band, in length units.
pub const DEFAULT_TOL_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    /// The coalition can guarantee capture.
    #[serde(rename = "PWR")]
    Pwr,
    /// The evader can guarantee reaching the target line.
    #[serde(rename = "EWR")]
    Ewr,
    #[serde(rename = "ON_BARRIER")]
    OnBarrier,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Pwr => "PWR",
            RegionLabel::Ewr => "EWR",
            RegionLabel::OnBarrier => "ON_BARRIER",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("evader at ({}, {}) is not in the play region", .0.x, .0.y)]
    NotInPlay(Point),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Margin(#[from] MarginError),
}

/// Labels a point against an already built barrier.
pub fn classify_against(curve: &BarrierCurve, evader: Point, tol_band: f64) -> RegionLabel {
    match curve.y_at(evader.x) {
        None => RegionLabel::Pwr,
        Some(y) if evader.y > y + tol_band => RegionLabel::Ewr,
        Some(y) if evader.y < y - tol_band => RegionLabel::Pwr,
        Some(_) => RegionLabel::OnBarrier,
    }
}

pub fn classify(
    evader: Point,
    coalition: &Coalition,
    scenario: &Scenario,
    tol_band: f64,
) -> Result<RegionLabel, RegionError> {
    if !scenario.domain().contains(evader, Side::Play) {
        return Err(RegionError::NotInPlay(evader));
    }
    let curve = build_barrier(coalition, scenario)?;
    Ok(classify_against(&curve, evader, tol_band))
}

/// Classification from the sign of the best achievable race margin.
pub fn oracle_classify(
    evader: Point,
    pursuers: &[Point],
    alpha: f64,
    l: f64,
    tol: f64,
) -> Result<RegionLabel, RegionError> {
    let virt = virtualize(pursuers)?;
    let best = maximize_margin(evader, &virt, alpha, l, DEFAULT_TOL_X)?;
    Ok(if best.value > tol {
        RegionLabel::Ewr
    } else if best.value < -tol {
        RegionLabel::Pwr
    } else {
        RegionLabel::OnBarrier
    })
}

/// Labels on a regular grid of cell centres over the bounding box of the
/// play region. `None` marks centres outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub dx: f64,
    pub dy: f64,
    pub resolution: usize,
    /// Row-major, row 0 at `y_min`.
    pub cells: Vec<Option<RegionLabel>>,
}

impl RegionGrid {
    pub fn center(&self, row: usize, col: usize) -> Point {
        Point::new(
            self.x_min + (col as f64 + 0.5) * self.dx,
            self.y_min + (row as f64 + 0.5) * self.dy,
        )
    }

    pub fn get(&self, row: usize, col: usize) -> Option<RegionLabel> {
        self.cells[row * self.resolution + col]
    }

    /// `(center, label)` for every cell inside the play region.
    pub fn labeled(&self) -> impl Iterator<Item = (Point, RegionLabel)> + '_ {
        let n = self.resolution;
        (0..n * n).filter_map(move |k| self.cells[k].map(|lab| (self.center(k / n, k % n), lab)))
    }
}

pub fn region_grid(
    coalition: &Coalition,
    scenario: &Scenario,
    resolution: usize,
) -> Result<RegionGrid, RegionError> {
    let curve = build_barrier(coalition, scenario)?;
    Ok(region_grid_for(&curve, scenario, resolution.max(2)))
}

pub(crate) fn region_grid_for(curve: &BarrierCurve, scenario: &Scenario, n: usize) -> RegionGrid {
    let (lo, hi) = scenario.domain().bounding_box();
    let mut grid = RegionGrid {
        x_min: lo.x,
        y_min: lo.y,
        dx: (hi.x - lo.x) / n as f64,
        dy: (0.0f64.min(hi.y) - lo.y) / n as f64,
        resolution: n,
        cells: Vec::with_capacity(n * n),
    };
    for row in 0..n {
        for col in 0..n {
            let c = grid.center(row, col);
            let label = scenario
                .domain()
                .contains(c, Side::Play)
                .then(|| classify_against(curve, c, DEFAULT_TOL_BAND));
            grid.cells.push(label);
        }
    }
    grid
}
