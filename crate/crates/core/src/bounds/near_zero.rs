use num_traits::ToPrimitive;

use crate::budget::Budget;
use crate::cover::{build_cover_instance, exact_min_cover_with, CoverMode};
use crate::cube::{Cube, Point, ZeroMatrix};
use crate::error::{Error, Result};
use crate::implicant::{enumerate_primes_with, prime_unchecked, PrimeSet};

/// One-points adjacent to some zero, with the per-row fans they come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearZeroSet {
    /// Θ, canonical order, no duplicates.
    pub points: Vec<Point>,
    /// `fans[i]`: flips of row `i` that are ones, in column order.
    pub fans: Vec<Vec<Point>>,
    /// Flips of a 0 entry (Θ⁰).
    pub theta0: Vec<Point>,
    /// Flips of a 1 entry (Θ¹).
    pub theta1: Vec<Point>,
}

impl NearZeroSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Row `i` with bit `j` flipped.
pub fn theta_point(m: &ZeroMatrix, i: usize, j: usize) -> Result<Point> {
    m.check_row(i)?;
    m.check_col(j)?;
    Ok(m.row(i).flip(j))
}

pub fn near_zero_points(m: &ZeroMatrix) -> NearZeroSet {
    let mut fans = Vec::with_capacity(m.k());
    let mut theta0 = Vec::new();
    let mut theta1 = Vec::new();
    for row in m.rows() {
        let mut fan = Vec::with_capacity(m.n());
        for j in 0..m.n() {
            let p = row.flip(j);
            if m.is_zero(&p) {
                continue;
            }
            fan.push(p);
            if row.get(j) {
                theta1.push(p);
            } else {
                theta0.push(p);
            }
        }
        fans.push(fan);
    }
    for v in [&mut theta0, &mut theta1] {
        v.sort_unstable();
        v.dedup();
    }
    let mut points: Vec<Point> = theta0.iter().chain(&theta1).copied().collect();
    points.sort_unstable();
    points.dedup();
    NearZeroSet {
        points,
        fans,
        theta0,
        theta1,
    }
}

/// Whether the prime `cube` contains at most one point of every fan.
pub fn check_dyakonov_lemma(m: &ZeroMatrix, cube: &Cube) -> Result<bool> {
    if cube.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: cube.dim(),
        });
    }
    if !prime_unchecked(m, cube) {
        return Err(Error::NotPrime);
    }
    Ok(m.rows().all(|row| {
        (0..m.n())
            .filter(|&j| cube.contains_bits(row.bits() ^ 1 << j))
            .take(2)
            .count()
            <= 1
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NearZeroMode {
    /// `ceil(|Θ| / max_K |N_K ∩ Θ|)`.
    Counting,
    /// Minimum number of primes covering Θ.
    ExactCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NearZeroBound {
    pub value: u64,
    pub mode: NearZeroMode,
    /// The exact cover ran out of budget and `value` is the counting bound.
    pub degraded: bool,
}

pub fn near_zero_lower_bound(m: &ZeroMatrix, mode: NearZeroMode) -> Result<NearZeroBound> {
    let budget = Budget::default();
    let primes = enumerate_primes_with(m, &budget)?;
    near_zero_bound_from(m, &primes, mode, &budget)
}

/// Same as [`near_zero_lower_bound`] with primes already at hand.
pub fn near_zero_bound_from(
    m: &ZeroMatrix,
    primes: &PrimeSet,
    mode: NearZeroMode,
    budget: &Budget,
) -> Result<NearZeroBound> {
    let theta = near_zero_points(m).points;
    let counting = counting_bound(primes, &theta);
    let bound = |value, degraded| NearZeroBound {
        value,
        mode,
        degraded,
    };
    if mode == NearZeroMode::Counting || theta.is_empty() {
        return Ok(bound(counting, false));
    }
    let inst = build_cover_instance(m, primes, &theta, CoverMode::Length)?;
    match exact_min_cover_with(&inst, budget) {
        Ok(sol) => Ok(bound(sol.objective.to_integer().to_u64().unwrap_or(u64::MAX), false)),
        Err(e) if e.is_budget() => Ok(bound(counting, true)),
        Err(e) => Err(e),
    }
}

fn counting_bound(primes: &PrimeSet, theta: &[Point]) -> u64 {
    if theta.is_empty() {
        return 0;
    }
    let best = primes
        .iter()
        .map(|c| theta.iter().filter(|p| c.contains_bits(p.bits())).count())
        .max()
        .unwrap_or(0);
    if best == 0 {
        return 0;
    }
    theta.len().div_ceil(best) as u64
}
