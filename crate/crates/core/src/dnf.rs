use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bounds::{near_zero_bound_from, NearZeroMode};
use crate::budget::Budget;
use crate::cover::{
    build_cover_instance, exact_min_cover_with, greedy_cover, lp_lower_bound_with, CoverMode, CoverSolution,
};
use crate::cube::{full_mask, Cube, Dnf, Point, ZeroMatrix};
use crate::error::{Error, Result};
use crate::implicant::{enumerate_primes_with, PrimeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Number of conjunctions (shortest DNF).
    Length,
    /// Number of literal occurrences (minimal DNF).
    Rank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Exact,
    Greedy,
}

/// What is known about the value of a [`MinimizationResult`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// LP relaxation bound on the objective.
    pub lp_bound: BigRational,
    /// Minimum number of primes covering the near-zero points. Also a bound
    /// on rank, since every prime of a function with a zero has rank >= 1.
    pub near_zero_bound: u64,
    /// The value is proven optimal.
    pub optimal: bool,
    /// Exact mode ran out of budget and the best cover found was returned.
    pub fallback: bool,
}

impl Certificate {
    /// Largest proven lower bound, rounded up.
    pub fn lower_bound(&self) -> u64 {
        let lp = self.lp_bound.ceil().to_integer().to_u64().unwrap_or(0);
        lp.max(self.near_zero_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizationResult {
    pub dnf: Dnf,
    pub objective: Objective,
    pub value: u64,
    pub certificate: Certificate,
}

pub fn shortest_dnf(m: &ZeroMatrix, mode: SolveMode) -> Result<MinimizationResult> {
    minimize(m, Objective::Length, mode, &Budget::default())
}

pub fn minimal_dnf(m: &ZeroMatrix, mode: SolveMode) -> Result<MinimizationResult> {
    minimize(m, Objective::Rank, mode, &Budget::default())
}

pub fn minimize(m: &ZeroMatrix, objective: Objective, mode: SolveMode, budget: &Budget) -> Result<MinimizationResult> {
    let primes = enumerate_primes_with(m, budget)?;
    minimize_with_primes(m, &primes, objective, mode, budget)
}

/// Covers the one-points of `m` by primes. Exact mode breaks ties toward the
/// lexicographically smallest set of prime indices.
pub fn minimize_with_primes(
    m: &ZeroMatrix,
    primes: &PrimeSet,
    objective: Objective,
    mode: SolveMode,
    budget: &Budget,
) -> Result<MinimizationResult> {
    let n = m.n();
    if m.k() == 0 {
        let value = match objective {
            Objective::Length => 1,
            Objective::Rank => 0,
        };
        return Ok(MinimizationResult {
            dnf: Dnf::new(n, vec![Cube::full(n)?])?,
            objective,
            value,
            certificate: Certificate {
                lp_bound: BigRational::from_integer(BigInt::from(value)),
                near_zero_bound: 0,
                optimal: true,
                fallback: false,
            },
        });
    }
    let ones = m.ones_count().filter(|&c| c <= budget.max_rows as u64).ok_or(Error::BudgetExceeded {
        what: "one-point",
        partial: 0,
    })?;
    let target: Vec<Point> = m.one_points().collect();
    debug_assert_eq!(target.len() as u64, ones);
    let cover_mode = match objective {
        Objective::Length => CoverMode::Length,
        Objective::Rank => CoverMode::Rank,
    };
    let inst = build_cover_instance(m, primes, &target, cover_mode)?;
    let lp = lp_lower_bound_with(&inst, budget)?.value;
    let near_zero = near_zero_bound_from(m, primes, NearZeroMode::ExactCover, budget)?.value;

    let (sol, fallback) = match mode {
        SolveMode::Exact => match exact_min_cover_with(&inst, budget) {
            Ok(sol) => (sol, false),
            Err(Error::CoverBudget(sol)) => (*sol, true),
            Err(e) => return Err(e),
        },
        SolveMode::Greedy => (greedy_cover(&inst)?, false),
    };
    let CoverSolution {
        chosen, objective: cost, ..
    } = sol;
    let value = cost.to_integer().to_u64().unwrap_or(u64::MAX);
    let mut certificate = Certificate {
        lp_bound: lp,
        near_zero_bound: near_zero,
        optimal: false,
        fallback,
    };
    certificate.optimal = (mode == SolveMode::Exact && !fallback) || value <= certificate.lower_bound();
    let cubes = chosen.iter().map(|&s| primes.primes()[inst.label(s)]).collect();
    Ok(MinimizationResult {
        dnf: Dnf::new(n, cubes)?,
        objective,
        value,
        certificate,
    })
}

/// Outcome of [`verify_dnf`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Valid,
    /// A one-point no cube covers.
    MissedOne(Point),
    /// Cube `cube` contains zero row `row` (both 0-based).
    CoversZero { cube: usize, row: usize },
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

/// Checks that `d` realizes the function with zero matrix `m`.
///
/// Zeros are checked first, in cube order. Coverage is checked by scanning
/// all points in numeric order (x1 as the low bit) for `n <= 12`, and by
/// splitting the cube into subcubes otherwise.
pub fn verify_dnf(m: &ZeroMatrix, d: &Dnf) -> Result<Verification> {
    if d.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: d.dim(),
        });
    }
    for (ci, cube) in d.cubes().iter().enumerate() {
        if let Some(row) = m.raw_rows().iter().position(|&r| cube.contains_bits(r)) {
            return Ok(Verification::CoversZero { cube: ci, row });
        }
    }
    let n = m.n();
    let missed = if n <= 12 {
        (0..1u64 << n).find(|&p| m.index_of(p).is_none() && !d.cubes().iter().any(|c| c.contains_bits(p)))
    } else {
        let region = Cube::full(n)?;
        let cubes: Vec<&Cube> = d.cubes().iter().collect();
        uncovered_point(m, region, &cubes)
    };
    Ok(match missed {
        Some(p) => Verification::MissedOne(Point::new(p, n)?),
        None => Verification::Valid,
    })
}

/// A point of `region` outside every cube that is not a zero, if any.
fn uncovered_point(m: &ZeroMatrix, region: Cube, cubes: &[&Cube]) -> Option<u64> {
    let live: Vec<&Cube> = cubes.iter().copied().filter(|c| c.intersects(&region)).collect();
    if live.iter().any(|c| region.is_subcube_of(c)) {
        return None;
    }
    if live.is_empty() {
        // at most k zeros, so one of the first k + 1 points is a one
        return region.points().map(|p| p.bits()).find(|&p| m.index_of(p).is_none());
    }
    // branch on a variable some live cube fixes but the region leaves free
    let free = !region.fixed_mask() & full_mask(m.n());
    let j = live
        .iter()
        .map(|c| c.fixed_mask() & free)
        .find(|&f| f != 0)
        .map(|f| f.trailing_zeros())
        .expect("a live cube that does not contain the region fixes a free variable");
    for bit in [0u64, 1] {
        let sub = Cube::from_raw(region.fixed_mask() | 1 << j, region.value_mask() | bit << j, m.n());
        if let Some(p) = uncovered_point(m, sub, &live) {
            return Some(p);
        }
    }
    None
}
