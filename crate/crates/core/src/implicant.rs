//! Implicants and prime implicants of a function given by its zeros.
//!
//! A literal `x_j = s` excludes ("blocks") the zero rows whose entry in
//! column `j` differs from `s`. A cube is an implicant when its literals
//! block every zero row, and prime when each literal blocks some row that no
//! other literal of the cube blocks. Prime implicants are therefore exactly
//! the minimal transversals of the blocked-row hypergraph that use at most
//! one literal per variable, which is what [`enumerate_primes`] searches for.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::budget::Budget;
use crate::cube::{full_mask, Cube, RowSet, ZeroMatrix};
use crate::error::{Error, Result};

/// Rows excluded by the literal `x_variable = sign`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralBlockSet {
    pub variable: usize,
    pub sign: bool,
    pub blocked: RowSet,
}

/// `{ i : M_i^variable != sign }`.
pub fn blocked_rows(m: &ZeroMatrix, variable: usize, sign: bool) -> Result<RowSet> {
    m.check_col(variable)?;
    Ok(blocked_unchecked(m, variable, sign))
}

fn blocked_unchecked(m: &ZeroMatrix, variable: usize, sign: bool) -> RowSet {
    let mut set = FixedBitSet::with_capacity(m.k());
    for (i, &r) in m.raw_rows().iter().enumerate() {
        if (r >> variable & 1 == 1) != sign {
            set.insert(i);
        }
    }
    set
}

pub fn literal_block_sets(m: &ZeroMatrix) -> Vec<LiteralBlockSet> {
    (0..m.n())
        .flat_map(|j| [false, true].map(|s| (j, s)))
        .map(|(variable, sign)| LiteralBlockSet {
            variable,
            sign,
            blocked: blocked_unchecked(m, variable, sign),
        })
        .collect()
}

fn check_cube(m: &ZeroMatrix, cube: &Cube) -> Result<()> {
    if cube.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: cube.dim(),
        });
    }
    Ok(())
}

/// True iff no zero of `m` lies in the cube.
pub fn is_implicant(m: &ZeroMatrix, cube: &Cube) -> Result<bool> {
    check_cube(m, cube)?;
    Ok(implicant_unchecked(m, cube))
}

#[inline]
pub(crate) fn implicant_unchecked(m: &ZeroMatrix, cube: &Cube) -> bool {
    m.raw_rows().iter().all(|&r| !cube.contains_bits(r))
}

/// True iff the cube is an implicant and freeing any one of its literals
/// produces a non-implicant.
pub fn is_prime(m: &ZeroMatrix, cube: &Cube) -> Result<bool> {
    check_cube(m, cube)?;
    Ok(prime_unchecked(m, cube))
}

pub(crate) fn prime_unchecked(m: &ZeroMatrix, cube: &Cube) -> bool {
    if !implicant_unchecked(m, cube) {
        return false;
    }
    let mut fixed = cube.fixed_mask();
    while fixed != 0 {
        let j = fixed.trailing_zeros() as usize;
        fixed &= fixed - 1;
        if implicant_unchecked(m, &cube.without(j)) {
            return false;
        }
    }
    true
}

/// All prime implicants of a function, in canonical cube order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet {
    n: usize,
    primes: Vec<Cube>,
    source: u64,
}

impl PrimeSet {
    pub fn primes(&self) -> &[Cube] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Fingerprint of the zero matrix the primes were computed from.
    pub fn source(&self) -> u64 {
        self.source
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cube> {
        self.primes.iter()
    }
}

impl<'a> IntoIterator for &'a PrimeSet {
    type Item = &'a Cube;
    type IntoIter = std::slice::Iter<'a, Cube>;

    fn into_iter(self) -> Self::IntoIter {
        self.primes.iter()
    }
}

/// FNV-1a over `n` and the canonical rows.
pub fn fingerprint(m: &ZeroMatrix) -> u64 {
    const PRIME: u64 = 0x100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for word in std::iter::once(m.n() as u64).chain(m.raw_rows().iter().copied()) {
        for byte in word.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

pub fn enumerate_primes(m: &ZeroMatrix) -> Result<PrimeSet> {
    enumerate_primes_with(m, &Budget::default())
}

/// Enumerates every prime implicant of `m`.
///
/// For `k = 0` the only prime is the empty conjunction. Fails with
/// [`Error::BudgetExceeded`] (carrying the number of primes found so far)
/// when `budget.max_primes` or the time limit is exceeded.
pub fn enumerate_primes_with(m: &ZeroMatrix, budget: &Budget) -> Result<PrimeSet> {
    let n = m.n();
    let source = fingerprint(m);
    if m.k() == 0 {
        return Ok(PrimeSet {
            n,
            primes: vec![Cube::from_raw(0, 0, n)],
            source,
        });
    }

    let blocked: Vec<RowSet> = (0..2 * n)
        .map(|lit| blocked_unchecked(m, lit / 2, lit % 2 == 1))
        .collect();
    let mut search = Search {
        m,
        blocked,
        out: Vec::new(),
        max: budget.max_primes,
        deadline: budget.deadline(),
        nodes: 0,
        aborted: false,
    };
    let mut uncov = FixedBitSet::with_capacity(m.k());
    uncov.insert_range(..);
    let all_lits = if n == 64 { u128::MAX } else { (1u128 << (2 * n)) - 1 };
    search.run(&mut Vec::new(), &[], uncov, all_lits, 0);

    if search.aborted {
        return Err(Error::BudgetExceeded {
            what: "prime enumeration",
            partial: search.out.len() as u64,
        });
    }
    let mut primes = search.out;
    primes.sort_unstable();
    debug_assert!(primes.windows(2).all(|w| w[0] != w[1]));
    Ok(PrimeSet { n, primes, source })
}

struct Search<'a> {
    m: &'a ZeroMatrix,
    /// Indexed by literal id `2 * variable + sign`.
    blocked: Vec<RowSet>,
    out: Vec<Cube>,
    max: usize,
    deadline: crate::budget::Deadline,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    /// One step of the minimal-transversal search: branch on the literals
    /// that block the first uncovered row. `cand` holds literals still
    /// allowed below this node; `crit[u]` holds the rows blocked by
    /// `chosen[u]` alone.
    fn run(
        &mut self,
        chosen: &mut Vec<usize>,
        crit: &[RowSet],
        uncov: RowSet,
        cand: u128,
        used_vars: u64,
    ) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 0 && self.deadline.expired() {
            self.aborted = true;
            return;
        }
        let Some(row) = uncov.minimum() else {
            self.emit(chosen);
            return;
        };

        let n = self.m.n();
        let zero = self.m.raw_rows()[row];
        let free_vars = !used_vars & full_mask(n);
        let mut branch: Vec<usize> = Vec::with_capacity(n);
        let mut branch_mask = 0u128;
        for j in 0..n {
            // the only literal on x_j that blocks this row
            let lit = 2 * j + (1 - (zero >> j & 1) as usize);
            if free_vars >> j & 1 == 1 && cand >> lit & 1 == 1 {
                branch.push(lit);
                branch_mask |= 1 << lit;
            }
        }

        let mut cand = cand & !branch_mask;
        for lit in branch {
            let b = &self.blocked[lit];
            let mut next_crit = Vec::with_capacity(crit.len() + 1);
            let mut minimal = true;
            for c in crit {
                let mut c = c.clone();
                c.difference_with(b);
                if c.is_clear() {
                    minimal = false;
                    break;
                }
                next_crit.push(c);
            }
            if minimal {
                let mut own = b.clone();
                own.intersect_with(&uncov);
                next_crit.push(own);
                let mut next_uncov = uncov.clone();
                next_uncov.difference_with(b);
                chosen.push(lit);
                self.run(chosen, &next_crit, next_uncov, cand, used_vars | 1 << (lit / 2));
                chosen.pop();
                if self.aborted {
                    return;
                }
            }
            cand |= 1 << lit;
        }
    }

    fn emit(&mut self, chosen: &[usize]) {
        let (mut fixed, mut value) = (0u64, 0u64);
        for &lit in chosen {
            fixed |= 1 << (lit / 2);
            if lit % 2 == 1 {
                value |= 1 << (lit / 2);
            }
        }
        self.out.push(Cube::from_raw(fixed, value, self.m.n()));
        if self.out.len() > self.max {
            self.aborted = true;
        }
    }
}

/// Number of primes of each rank.
pub fn rank_histogram(primes: &PrimeSet) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for p in primes {
        *hist.entry(p.rank()).or_insert(0) += 1;
    }
    hist
}
