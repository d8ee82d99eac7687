//! Self-checks run by `reach-avoid check`: structural invariants of the
//! barriers and the assignment, plus cross-checks against brute force and
//! the margin oracle.

use serde::{Deserialize, Serialize};

use crate::barrier::{barrier_from_positions, build_barrier, virtualize, Coalition};
use crate::io::report::{self, SolveError, SolveOptions};
use crate::matching::{
    build_ilp, degeneration_witness, prior_info, solve_ilp, IlpInstance,
    MatchingError,
};
use crate::region::{classify_against, RegionLabel, DEFAULT_TOL_BAND};
use crate::scenario::Scenario;

/// Largest variable count checked by exhaustive enumeration.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Two independent computations must agree.
    Oracle,
    /// A structural property of one computation.
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, kind: CheckKind, failures: Vec<String>, summary: String) -> Self {
        CheckResult {
            name: name.into(),
            kind,
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                summary
            } else {
                failures.join("; ")
            },
        }
    }
}

/// Runs every check on `scenario`.
pub fn check_scenario(scenario: &Scenario, seed: u64) -> Result<Vec<CheckResult>, SolveError> {
    let n_p = scenario.n_p();
    let coalitions = report::reported_coalitions(n_p);
    let mut results = Vec::new();

    let mut continuity = Vec::new();
    let mut equivalence = Vec::new();
    let mut mirror = Vec::new();
    for c in &coalitions {
        let curve = build_barrier(c, scenario)?;
        for w in curve.pieces().windows(2) {
            let x = w[1].x_lo;
            let jump = (w[0].y_at(x) - w[1].y_at(x)).abs();
            if jump > 1e-9 || (w[0].x_hi - x).abs() > 1e-12 {
                continuity.push(format!("{c}: jump {jump:e} at x = {x}"));
            }
        }
        if curve.pieces().iter().any(|p| p.y_at(0.5 * (p.x_lo + p.x_hi)) >= 0.0) {
            continuity.push(format!("{c}: piece above the target line"));
        }
        let active = build_barrier(curve.generating_coalition(), scenario)?;
        if active.pieces() != curve.pieces() {
            equivalence.push(format!("{c} differs from its active part"));
        }
        let positions: Vec<_> = c.members().iter().map(|&i| scenario.pursuers()[i]).collect();
        if positions.iter().any(|p| p.y > 0.0) {
            let virt = virtualize(&positions)?;
            let mirrored = barrier_from_positions(&virt, scenario.alpha(), scenario.target_length())?;
            if mirrored.pieces() != curve.pieces() {
                mirror.push(format!("{c} changes when mirrored"));
            }
        }
    }
    let n = coalitions.len();
    results.push(CheckResult::new(
        "barrier_continuity",
        CheckKind::Invariant,
        continuity,
        format!("{n} barriers continuous and below the target line"),
    ));
    results.push(CheckResult::new(
        "barrier_equivalence",
        CheckKind::Invariant,
        equivalence,
        format!("{n} barriers unchanged by dropping inactive pursuers"),
    ));
    results.push(CheckResult::new(
        "mirror_property",
        CheckKind::Invariant,
        mirror,
        "barriers unchanged by mirroring target-side pursuers".into(),
    ));

    let solved = report::solve(
        scenario,
        &SolveOptions {
            oracle: true,
            seed,
            ..SolveOptions::default()
        },
    )?;
    let oracle = solved.oracle.as_ref().expect("oracle requested");
    results.push(CheckResult::new(
        "barrier_vs_margin_oracle",
        CheckKind::Oracle,
        oracle
            .disagreements
            .iter()
            .map(|d| {
                format!(
                    "coalition {} at ({}, {}): barrier {} vs oracle {}",
                    d.coalition, d.point.x, d.point.y, d.barrier, d.oracle
                )
            })
            .collect(),
        format!(
            "{} points agree ({} skipped within the margin floor)",
            oracle.compared, oracle.skipped_near_barrier
        ),
    ));

    let prior = prior_info(scenario)?;
    let ilp = build_ilp(&prior, n_p, scenario.n_e())?;
    let sol = solve_ilp(&ilp);
    let mut assignment = Vec::new();
    if !ilp.is_feasible(&sol.z_star) {
        assignment.push("z* violates a constraint".to_string());
    }
    if !solved.is_consistent() || sol.q != sol.pairs_one.len() + sol.pairs_two.len() {
        assignment.push("q does not match the decoded pairs".to_string());
    }
    results.push(CheckResult::new(
        "assignment_feasible",
        CheckKind::Invariant,
        assignment,
        format!("q = {} with feasible z*", sol.q),
    ));

    let free = ilp.b1.iter().filter(|&&b| b == 1).count();
    if free <= MAX_BRUTE_FORCE_VARS {
        let best = brute_force_q(&ilp);
        let failures = if best == sol.q {
            vec![]
        } else {
            vec![format!("solver q = {} but enumeration finds {best}", sol.q)]
        };
        results.push(CheckResult::new(
            "assignment_exhaustive",
            CheckKind::Oracle,
            failures,
            format!("enumeration over subsets of {free} allowed variables agrees"),
        ));
    }

    if n_p <= 6 {
        let any = any_coalition_q(scenario)?;
        let failures = if any == sol.q {
            vec![]
        } else {
            vec![format!("pairs-only q = {} but unrestricted coalitions reach {any}", sol.q)]
        };
        results.push(CheckResult::new(
            "pairs_suffice",
            CheckKind::Oracle,
            failures,
            "restricting to one- and two-pursuer coalitions loses nothing".into(),
        ));
    }

    if n_p >= 3 {
        let grand = Coalition::from_code((1 << n_p) - 1, n_p).expect("valid code");
        let curve = build_barrier(&grand, scenario)?;
        let mut failures = Vec::new();
        let mut found = 0;
        for (j, &e) in scenario.evaders().iter().enumerate() {
            if classify_against(&curve, e, DEFAULT_TOL_BAND) != RegionLabel::Pwr {
                continue;
            }
            match degeneration_witness(scenario, &grand, j) {
                Ok(_) => found += 1,
                Err(MatchingError::Region(e)) => return Err(e.into()),
                Err(e) => failures.push(e.to_string()),
            }
        }
        results.push(CheckResult::new(
            "capturing_pair_exists",
            CheckKind::Oracle,
            failures,
            format!("{found} captured evaders each have a capturing pair"),
        ));
    }
    Ok(results)
}

/// Best objective over all feasible 0/1 vectors. Variables whose prior bit
/// is 0 are fixed to 0. Every subset of the rest is visited except those
/// extending an infeasible subset, which are infeasible too since all
/// coefficients are non-negative.
pub fn brute_force_q(ilp: &IlpInstance) -> usize {
    let free: Vec<usize> = (0..ilp.n_v()).filter(|&v| ilp.b1[v] == 1).collect();
    assert!(free.len() <= MAX_BRUTE_FORCE_VARS, "too many variables to enumerate");
    let touched: Vec<(usize, Vec<usize>, Vec<usize>)> = free
        .iter()
        .map(|&v| (usize::from(ilp.c[v]), ilp.a2.col_ones(v), ilp.a3.col_ones(v)))
        .collect();
    struct Walk<'a> {
        touched: &'a [(usize, Vec<usize>, Vec<usize>)],
        b2: &'a [u8],
        b3: &'a [u8],
        evaders: Vec<u8>,
        pursuers: Vec<u8>,
        best: usize,
    }
    impl Walk<'_> {
        fn go(&mut self, k: usize, count: usize) {
            self.best = self.best.max(count);
            for next in k..self.touched.len() {
                let (c, rows2, rows3) = &self.touched[next];
                let fits = rows2.iter().all(|&r| self.evaders[r] < self.b2[r])
                    && rows3.iter().all(|&r| self.pursuers[r] < self.b3[r]);
                if !fits {
                    continue;
                }
                rows2.iter().for_each(|&r| self.evaders[r] += 1);
                rows3.iter().for_each(|&r| self.pursuers[r] += 1);
                self.go(next + 1, count + c);
                rows2.iter().for_each(|&r| self.evaders[r] -= 1);
                rows3.iter().for_each(|&r| self.pursuers[r] -= 1);
            }
        }
    }
    let mut walk = Walk {
        touched: &touched,
        b2: &ilp.b2,
        b3: &ilp.b3,
        evaders: vec![0; ilp.a2.rows],
        pursuers: vec![0; ilp.a3.rows],
        best: 0,
    };
    walk.go(0, 0);
    walk.best
}

/// Maximum number of evaders that can be given pairwise disjoint capturing
/// coalitions of any size.
pub fn any_coalition_q(scenario: &Scenario) -> Result<usize, SolveError> {
    let n_p = scenario.n_p();
    let mut captures = Vec::new();
    for c in Coalition::all(n_p) {
        let curve = build_barrier(&c, scenario)?;
        let mask: Vec<bool> = scenario
            .evaders()
            .iter()
            .map(|&e| classify_against(&curve, e, DEFAULT_TOL_BAND) == RegionLabel::Pwr)
            .collect();
        captures.push((c.code(), mask));
    }
    fn go(j: usize, used: u64, captures: &[(u64, Vec<bool>)], n_e: usize) -> usize {
        if j == n_e {
            return 0;
        }
        let mut best = go(j + 1, used, captures, n_e);
        for (code, mask) in captures {
            if mask[j] && code & used == 0 {
                best = best.max(1 + go(j + 1, used | code, captures, n_e));
            }
        }
        best
    }
    Ok(go(0, 0, &captures, scenario.n_e()))
}
