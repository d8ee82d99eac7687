//! Barriers, winning regions and task assignment for multiplayer reach-avoid
//! games in convex planar domains.
//!
//! Evaders move at speed `alpha < 1` and try to cross a target line; pursuers
//! move at unit speed and try to intercept them first. The crate computes,
//! in closed form, the curve separating the starting positions from which a
//! pursuit coalition can guarantee capture from those where the evader wins,
//! then assigns pursuers to evaders so that the number of guaranteed captures
//! is maximal.
//!
//! ```
//! use reach_avoid::{barrier::barrier_from_positions, geometry::Point};
//!
//! let curve = barrier_from_positions(&[Point::new(1.0, -2.0)], 0.5, 2.0).unwrap();
//! assert!((curve.y_at(1.0).unwrap() + 1.0).abs() < 1e-12);
//! ```

pub mod barrier;
pub mod geometry;
pub mod io;
pub mod margin;
pub mod matching;
pub mod region;
pub mod simulate;
pub mod verify;

pub use io::{report, scenario, svg};

pub use barrier::{build_barrier, BarrierCurve, Coalition};
pub use geometry::{GameDomain, Point};
pub use matching::{prior_info, solve_ilp, AssignmentSolution};
pub use region::{classify, RegionLabel};
pub use scenario::{parse_scenario, Scenario};
