//! Assigning pursuers to evaders.
//!
//! Capture never needs more than two pursuers per evader, so only
//! coalitions of size one and two ("execution coalitions") are considered.
//! Variables are laid out in blocks of `N_e`, one block per execution
//! coalition: singletons `{1}..{N_p}` first, then pairs
//! `{1,2}, {1,3}, .., {1,N_p}, {2,3}, .., {N_p-1,N_p}`. Variable
//! `block * N_e + j` says "this coalition goes after evader `j`".

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barrier::{build_barrier, Coalition};
use crate::region::{classify, classify_against, oracle_classify, RegionError, RegionLabel, DEFAULT_TOL_BAND};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("coalition {0} has fewer than three members")]
    CoalitionTooSmall(Coalition),
    #[error("evader E{evader} is not captured by {coalition}")]
    NotCaptured { coalition: Coalition, evader: usize },
    #[error("no capturing pair inside {coalition} for evader E{evader}")]
    NoWitness { coalition: Coalition, evader: usize },
    #[error("barrier and margin oracle disagree on pair {pair} for evader E{evader}")]
    OracleDisagreement { pair: Coalition, evader: usize },
}

/// Number of execution coalitions for `n_p` pursuers.
pub fn block_count(n_p: usize) -> usize {
    n_p * (n_p + 1) / 2
}

/// Zero-based block of the pair `{a, b}` (zero-based, `a < b`).
pub fn pair_block(a: usize, b: usize, n_p: usize) -> usize {
    debug_assert!(a < b && b < n_p);
    n_p + a * n_p - a * (a + 1) / 2 + (b - a - 1)
}

/// Execution coalitions in block order.
pub fn execution_coalitions(n_p: usize) -> Vec<Coalition> {
    let singles = (0..n_p).map(|i| vec![i]);
    let pairs = (0..n_p).flat_map(|a| (a + 1..n_p).map(move |b| vec![a, b]));
    singles
        .chain(pairs)
        .map(|m| Coalition::from_members(&m).expect("valid members"))
        .collect()
}

/// Capture guarantees of every execution coalition against every evader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorInfoVector {
    pub n_p: usize,
    pub n_e: usize,
    pub bits: Vec<u8>,
}

impl PriorInfoVector {
    pub fn new(n_p: usize, n_e: usize, bits: Vec<u8>) -> Result<Self, MatchingError> {
        let n_v = n_e * block_count(n_p);
        if bits.len() != n_v {
            return Err(MatchingError::Dimension(format!(
                "{} bits for N_p = {n_p}, N_e = {n_e} (expected {n_v})",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(MatchingError::Dimension("bits must be 0 or 1".into()));
        }
        Ok(PriorInfoVector { n_p, n_e, bits })
    }

    pub fn n_v(&self) -> usize {
        self.bits.len()
    }

    /// Bits of one coalition block.
    pub fn block(&self, block: usize) -> &[u8] {
        &self.bits[block * self.n_e..(block + 1) * self.n_e]
    }

    /// Block of the single pursuer `i` (zero-based).
    pub fn single(&self, i: usize) -> &[u8] {
        self.block(i)
    }

    /// Block of the pair `{a, b}` (zero-based, `a < b`).
    pub fn pair(&self, a: usize, b: usize) -> &[u8] {
        self.block(pair_block(a, b, self.n_p))
    }
}

pub fn prior_info(scenario: &Scenario) -> Result<PriorInfoVector, MatchingError> {
    let mut bits = Vec::with_capacity(scenario.n_e() * block_count(scenario.n_p()));
    for coalition in execution_coalitions(scenario.n_p()) {
        let curve = build_barrier(&coalition, scenario).map_err(RegionError::from)?;
        for &e in scenario.evaders() {
            let label = classify_against(&curve, e, DEFAULT_TOL_BAND);
            bits.push(u8::from(label == RegionLabel::Pwr));
        }
    }
    PriorInfoVector::new(scenario.n_p(), scenario.n_e(), bits)
}

/// Dense 0/1 matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    /// Rows holding a 1 in column `c`.
    pub fn col_ones(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c) == 1).collect()
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn kron(&self, other: &BinaryMatrix) -> BinaryMatrix {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(r * other.rows + r2, c * other.cols + c2, other.get(r2, c2));
                    }
                }
            }
        }
        out
    }

    /// `[self, other]`.
    pub fn hcat(&self, other: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    /// `self * z` for a 0/1 vector.
    pub fn mul_vec(&self, z: &[u8]) -> Vec<u32> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(z).map(|(&a, &b)| u32::from(a & b)).sum())
            .collect()
    }
}

/// Pursuer-uniqueness constraint matrix, `N_p x N_v`.
///
/// Pair blocks are marked with the closed-form pair numbering
/// `j = i - k + (k - 1)(N_p - k/2)` (one-based), kept in integer
/// arithmetic as `(k - 1) N_p - k(k - 1)/2`.
pub fn build_a3(n_p: usize, n_e: usize) -> BinaryMatrix {
    let ones_e = BinaryMatrix::ones(1, n_e);
    let singles = BinaryMatrix::identity(n_p).kron(&ones_e);
    if n_p < 2 {
        return singles;
    }
    let n_pairs = n_p * (n_p - 1) / 2;
    let mut pairs = BinaryMatrix::zeros(n_p, n_pairs);
    for i in 1..=n_p {
        // pairs {i, m} with m > i occupy one contiguous run
        let first = (i - 1) * n_p - i * (i - 1) / 2 + 1;
        let last = i * n_p - i * (i + 1) / 2;
        for j in 1..=n_pairs {
            // pairs {k, i} with k < i
            let as_second = (1..i).any(|k| j == i - k + (k - 1) * n_p - k * (k - 1) / 2);
            let as_first = j >= first && j <= last;
            if as_second || as_first {
                pairs.set(i - 1, j - 1, 1);
            }
        }
    }
    singles.hcat(&pairs.kron(&ones_e))
}

/// The 0-1 program: maximize `c.z` subject to `A_k z <= b_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IlpInstance {
    pub n_p: usize,
    pub n_e: usize,
    pub c: Vec<u8>,
    pub a1: BinaryMatrix,
    pub b1: Vec<u8>,
    pub a2: BinaryMatrix,
    pub b2: Vec<u8>,
    pub a3: BinaryMatrix,
    pub b3: Vec<u8>,
}

impl IlpInstance {
    pub fn n_v(&self) -> usize {
        self.c.len()
    }

    pub fn is_feasible(&self, z: &[u8]) -> bool {
        z.len() == self.n_v()
            && z.iter().all(|&v| v <= 1)
            && [(&self.a1, &self.b1), (&self.a2, &self.b2), (&self.a3, &self.b3)]
                .iter()
                .all(|(a, b)| a.mul_vec(z).iter().zip(b.iter()).all(|(&l, &r)| l <= u32::from(r)))
    }

    pub fn objective(&self, z: &[u8]) -> u32 {
        self.c.iter().zip(z).map(|(&a, &b)| u32::from(a * b)).sum()
    }
}

pub fn build_ilp(prior: &PriorInfoVector, n_p: usize, n_e: usize) -> Result<IlpInstance, MatchingError> {
    if prior.n_p != n_p || prior.n_e != n_e || prior.n_v() != n_e * block_count(n_p) {
        return Err(MatchingError::Dimension(format!(
            "prior vector is for N_p = {}, N_e = {} with {} bits; asked for N_p = {n_p}, N_e = {n_e}",
            prior.n_p,
            prior.n_e,
            prior.n_v()
        )));
    }
    let n_v = prior.n_v();
    Ok(IlpInstance {
        n_p,
        n_e,
        c: vec![1; n_v],
        a1: BinaryMatrix::identity(n_v),
        b1: prior.bits.clone(),
        a2: BinaryMatrix::ones(1, n_v / n_e).kron(&BinaryMatrix::identity(n_e)),
        b2: vec![1; n_e],
        a3: build_a3(n_p, n_e),
        b3: vec![1; n_p],
    })
}

/// An optimal assignment. Indices in the pair lists are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentSolution {
    pub q: usize,
    pub z_star: Vec<u8>,
    /// `(pursuer, evader)`.
    pub pairs_one: Vec<(usize, usize)>,
    /// `(pursuer, pursuer, evader)` with the pursuers ascending.
    pub pairs_two: Vec<(usize, usize, usize)>,
}

impl AssignmentSolution {
    /// Reads the pairs off a 0/1 vector in the standard layout.
    pub fn decode(z: Vec<u8>, n_p: usize, n_e: usize) -> Self {
        let blocks = execution_coalitions(n_p);
        let mut pairs_one = Vec::new();
        let mut pairs_two = Vec::new();
        for (v, _) in z.iter().enumerate().filter(|(_, &b)| b == 1) {
            let members = blocks[v / n_e].members();
            let j = v % n_e + 1;
            match *members {
                [a] => pairs_one.push((a + 1, j)),
                [a, b] => pairs_two.push((a + 1, b + 1, j)),
                _ => unreachable!("execution coalitions have one or two members"),
            }
        }
        AssignmentSolution {
            q: pairs_one.len() + pairs_two.len(),
            z_star: z,
            pairs_one,
            pairs_two,
        }
    }
}

struct Search<'a> {
    /// Candidate variables, ascending.
    vars: Vec<usize>,
    /// Constraint rows (of `A_2` then `A_3`) touched by each candidate.
    rows: Vec<Vec<usize>>,
    one_to_one: Vec<bool>,
    /// Rows of `A_2`; every variable touches exactly one of them.
    evader_rows: usize,
    capacity: Vec<u32>,
    ilp: &'a IlpInstance,
    chosen: Vec<usize>,
    best: (u32, u32),
    best_set: Vec<usize>,
}

impl Search<'_> {
    fn bound(&self, q: u32, ones: u32) -> (u32, u32) {
        let free_evaders = self.capacity[..self.evader_rows].iter().filter(|&&c| c > 0).count() as u32;
        let free_pursuers: u32 = self.capacity[self.evader_rows..].iter().sum();
        let extra = free_evaders.min(free_pursuers);
        (q + extra, ones + extra)
    }

    fn dfs(&mut self, k: usize, q: u32, ones: u32) {
        if (q, ones) > self.best {
            self.best = (q, ones);
            self.best_set = self.chosen.clone();
        }
        if k == self.vars.len() || self.bound(q, ones) <= self.best {
            return;
        }
        let fits = self.rows[k].iter().all(|&r| self.capacity[r] > 0);
        if fits {
            for &r in &self.rows[k] {
                self.capacity[r] -= 1;
            }
            self.chosen.push(self.vars[k]);
            let gain = u32::from(self.ilp.c[self.vars[k]]);
            self.dfs(k + 1, q + gain, ones + u32::from(self.one_to_one[k]) * gain);
            self.chosen.pop();
            for &r in &self.rows[k] {
                self.capacity[r] += 1;
            }
        }
        self.dfs(k + 1, q, ones);
    }
}

/// Exact depth-first branch and bound.
///
/// Among optimal vectors the one with the most single-pursuer assignments
/// wins; remaining ties go to the vector whose selected variable indices
/// form the lexicographically smallest list.
pub fn solve_ilp(ilp: &IlpInstance) -> AssignmentSolution {
    let n_v = ilp.n_v();
    let vars: Vec<usize> = (0..n_v).filter(|&v| ilp.b1[v] == 1 && ilp.a1.get(v, v) == 1).collect();
    let rows: Vec<Vec<usize>> = vars
        .iter()
        .map(|&v| {
            let mut r = ilp.a2.col_ones(v);
            r.extend(ilp.a3.col_ones(v).iter().map(|r| ilp.a2.rows + r));
            r
        })
        .collect();
    let one_to_one = vars.iter().map(|&v| ilp.a3.col_ones(v).len() == 1).collect();
    let capacity = ilp
        .b2
        .iter()
        .chain(ilp.b3.iter())
        .map(|&b| u32::from(b))
        .collect();
    let mut search = Search {
        vars,
        rows,
        one_to_one,
        evader_rows: ilp.a2.rows,
        capacity,
        ilp,
        chosen: Vec::new(),
        best: (0, 0),
        best_set: Vec::new(),
    };
    search.dfs(0, 0, 0);
    let mut z = vec![0u8; n_v];
    for &v in &search.best_set {
        z[v] = 1;
    }
    AssignmentSolution::decode(z, ilp.n_p, ilp.n_e)
}

/// A pair inside `coalition` that still captures evader `evader`
/// (zero-based index). The coalition needs at least three members and must
/// capture the evader itself.
pub fn degeneration_witness(
    scenario: &Scenario,
    coalition: &Coalition,
    evader: usize,
) -> Result<Coalition, MatchingError> {
    let members = coalition.members();
    if members.len() < 3 {
        return Err(MatchingError::CoalitionTooSmall(coalition.clone()));
    }
    let e = *scenario
        .evaders()
        .get(evader)
        .ok_or_else(|| MatchingError::Dimension(format!("no evader with index {evader}")))?;
    if classify(e, coalition, scenario, DEFAULT_TOL_BAND)? != RegionLabel::Pwr {
        return Err(MatchingError::NotCaptured {
            coalition: coalition.clone(),
            evader: evader + 1,
        });
    }
    let pairs: Vec<Coalition> = members
        .iter()
        .enumerate()
        .flat_map(|(k, &a)| members[k + 1..].iter().map(move |&b| [a, b]))
        .map(|m| Coalition::from_members(&m).expect("valid members"))
        .collect();
    for pair in &pairs {
        if classify(e, pair, scenario, DEFAULT_TOL_BAND)? == RegionLabel::Pwr {
            return Ok(pair.clone());
        }
    }
    for pair in &pairs {
        let positions: Vec<_> = pair.members().iter().map(|&i| scenario.pursuers()[i]).collect();
        let label = oracle_classify(
            e,
            &positions,
            scenario.alpha(),
            scenario.target_length(),
            DEFAULT_TOL_BAND,
        )?;
        if label == RegionLabel::Pwr {
            return Err(MatchingError::OracleDisagreement {
                pair: pair.clone(),
                evader: evader + 1,
            });
        }
    }
    Err(MatchingError::NoWitness {
        coalition: coalition.clone(),
        evader: evader + 1,
    })
}
