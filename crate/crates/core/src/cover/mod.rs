//! Weighted set cover: greedy, LP relaxation and exact branch and bound.
//!
//! Both DNF objectives route through here: the shortest DNF is a unit-weight
//! cover of the one-points by primes, the minimal DNF weighs each prime by
//! its rank.

mod exact;
mod greedy;
mod lp;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cube::{Point, ZeroMatrix};
use crate::error::{Error, Result};
use crate::implicant::PrimeSet;

pub use exact::{exact_min_cover, exact_min_cover_with};
pub use greedy::greedy_cover;
pub use lp::{lp_lower_bound, lp_lower_bound_with, LpBound};

/// A finite universe `0..universe_size` and weighted subsets of it.
#[derive(Clone, Debug)]
pub struct CoverInstance {
    universe_size: usize,
    sets: Vec<FixedBitSet>,
    weights: Vec<BigRational>,
    labels: Vec<usize>,
    uncovered: Option<usize>,
}

impl CoverInstance {
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>, weights: Vec<BigRational>) -> Result<Self> {
        let labels = (0..sets.len()).collect();
        Self::with_labels(universe_size, sets, weights, labels)
    }

    /// All weights one.
    pub fn unit(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let weights = vec![BigRational::one(); sets.len()];
        Self::new(universe_size, sets, weights)
    }

    pub fn with_labels(
        universe_size: usize,
        sets: Vec<Vec<usize>>,
        weights: Vec<BigRational>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if weights.len() != sets.len() || labels.len() != sets.len() {
            return Err(Error::invalid("sets, weights and labels must have equal length"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::invalid("set weights must be non-negative"));
        }
        let mut bitsets = Vec::with_capacity(sets.len());
        for members in sets {
            let mut b = FixedBitSet::with_capacity(universe_size);
            for e in members {
                if e >= universe_size {
                    return Err(Error::invalid(format!(
                        "member {e} outside universe of size {universe_size}"
                    )));
                }
                b.insert(e);
            }
            bitsets.push(b);
        }
        Ok(Self::from_bitsets(universe_size, bitsets, weights, labels))
    }

    pub(crate) fn from_bitsets(
        universe_size: usize,
        sets: Vec<FixedBitSet>,
        weights: Vec<BigRational>,
        labels: Vec<usize>,
    ) -> Self {
        let mut union = FixedBitSet::with_capacity(universe_size);
        for s in &sets {
            union.union_with(s);
        }
        let uncovered = union.zeroes().next();
        CoverInstance {
            universe_size,
            sets,
            weights,
            labels,
            uncovered,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, s: usize) -> &FixedBitSet {
        &self.sets[s]
    }

    pub fn weight(&self, s: usize) -> &BigRational {
        &self.weights[s]
    }

    pub fn label(&self, s: usize) -> usize {
        self.labels[s]
    }

    /// Whether the sets jointly cover the universe.
    pub fn is_feasible(&self) -> bool {
        self.uncovered.is_none()
    }

    pub(crate) fn check_feasible(&self) -> Result<()> {
        match self.uncovered {
            Some(element) => Err(Error::Infeasible { element }),
            None => Ok(()),
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.sets.iter().map(|s| s.count_ones(..)).sum()
    }

    /// Weights scaled by the lcm of their denominators to integers.
    pub(crate) fn integer_weights(&self) -> Result<(Vec<u64>, BigInt)> {
        let mut lcm = BigInt::one();
        for w in &self.weights {
            lcm = num_integer_lcm(&lcm, w.denom());
        }
        let scaled = self
            .weights
            .iter()
            .map(|w| {
                (w.numer() * (&lcm / w.denom()))
                    .to_u64()
                    .filter(|&x| x <= u64::MAX >> 20)
                    .ok_or_else(|| Error::invalid("set weights too large for exact search"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((scaled, lcm))
    }

    /// Sum of the weights of `chosen`.
    pub fn cost(&self, chosen: &[usize]) -> BigRational {
        chosen.iter().map(|&s| self.weights[s].clone()).sum()
    }

    /// Whether `chosen` covers the universe.
    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut u = FixedBitSet::with_capacity(self.universe_size);
        for &s in chosen {
            u.union_with(&self.sets[s]);
        }
        u.is_full()
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    a / x * b
}

/// A cover together with what is known about its quality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    /// Chosen set indices, ascending.
    pub chosen: Vec<usize>,
    pub objective: BigRational,
    pub optimal: bool,
    pub lower_bound: BigRational,
}

/// Objective used when turning primes into a cover instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoverMode {
    /// Unit weights: minimize the number of cubes.
    Length,
    /// Weight = cube rank: minimize literal occurrences.
    Rank,
}

/// Cover instance whose universe is `target` (sorted canonically) and whose
/// sets are the primes, each holding the target points it contains.
pub fn build_cover_instance(
    m: &ZeroMatrix,
    primes: &PrimeSet,
    target: &[Point],
    mode: CoverMode,
) -> Result<CoverInstance> {
    if primes.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: primes.dim(),
        });
    }
    let mut universe: Vec<Point> = target.to_vec();
    universe.sort_unstable();
    universe.dedup();
    for p in &universe {
        if p.dim() != m.n() {
            return Err(Error::DimensionMismatch {
                expected: m.n(),
                found: p.dim(),
            });
        }
        if m.is_zero(p) {
            return Err(Error::invalid(format!("target point {p} is a zero of the function")));
        }
    }
    let size = universe.len();
    let mut sets = Vec::with_capacity(primes.len());
    let mut weights = Vec::with_capacity(primes.len());
    let dense = m.n() <= 24 && primes.iter().all(|c| c.volume() <= size as u64 * 4);
    let index = dense.then(|| {
        let mut idx = vec![u32::MAX; 1usize << m.n()];
        for (i, p) in universe.iter().enumerate() {
            idx[p.bits() as usize] = i as u32;
        }
        idx
    });
    for cube in primes {
        let mut b = FixedBitSet::with_capacity(size);
        match &index {
            Some(idx) => {
                for p in cube.points() {
                    let i = idx[p.bits() as usize];
                    if i != u32::MAX {
                        b.insert(i as usize);
                    }
                }
            }
            None => {
                for (i, p) in universe.iter().enumerate() {
                    if cube.contains_bits(p.bits()) {
                        b.insert(i);
                    }
                }
            }
        }
        sets.push(b);
        weights.push(match mode {
            CoverMode::Length => BigRational::one(),
            CoverMode::Rank => BigRational::from_integer(cube.rank().into()),
        });
    }
    let labels = (0..primes.len()).collect();
    let inst = CoverInstance::from_bitsets(size, sets, weights, labels);
    inst.check_feasible()?;
    Ok(inst)
}

/// A sub-instance after dominance reductions, expressed over the original
/// element and set indices.
#[derive(Clone, Debug)]
pub(crate) struct Reduced {
    pub elements: Vec<usize>,
    pub sets: Vec<usize>,
    /// Members of each kept set, as positions into `elements`.
    pub members: Vec<FixedBitSet>,
}

/// Drops elements implied by others and, if `drop_sets`, sets dominated by a
/// superset of no larger weight. Element reduction never changes which set
/// families are covers; set reduction preserves the optimal value and the LP
/// optimum.
pub(crate) fn reduce(
    sets: &[FixedBitSet],
    weights: &[u64],
    elements: &FixedBitSet,
    available: &FixedBitSet,
    drop_sets: bool,
) -> Reduced {
    let avail: Vec<usize> = available
        .ones()
        .filter(|&s| !sets[s].is_disjoint(elements))
        .collect();
    let elems: Vec<usize> = elements.ones().collect();

    // covering family of each element, over positions in `avail`
    let mut fam: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(avail.len()); elems.len()];
    for (si, &s) in avail.iter().enumerate() {
        for (ei, &e) in elems.iter().enumerate() {
            if sets[s].contains(e) {
                fam[ei].insert(si);
            }
        }
    }
    let mut order: Vec<usize> = (0..elems.len()).collect();
    order.sort_by_key(|&ei| (fam[ei].count_ones(..), ei));
    let mut kept: Vec<usize> = Vec::new();
    for ei in order {
        if !kept.iter().any(|&ki| fam[ki].is_subset(&fam[ei])) {
            kept.push(ei);
        }
    }
    kept.sort_unstable();

    let mut members: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(kept.len()); avail.len()];
    for (pos, &ei) in kept.iter().enumerate() {
        for si in fam[ei].ones() {
            members[si].insert(pos);
        }
    }

    let mut set_keep: Vec<usize> = (0..avail.len()).filter(|&si| !members[si].is_clear()).collect();
    if drop_sets {
        set_keep.sort_by(|&a, &b| {
            members[b]
                .count_ones(..)
                .cmp(&members[a].count_ones(..))
                .then(weights[avail[a]].cmp(&weights[avail[b]]))
                .then(a.cmp(&b))
        });
        let mut survivors: Vec<usize> = Vec::new();
        for si in set_keep {
            let dominated = survivors.iter().any(|&ti| {
                weights[avail[ti]] <= weights[avail[si]] && members[si].is_subset(&members[ti])
            });
            if !dominated {
                survivors.push(si);
            }
        }
        survivors.sort_unstable();
        set_keep = survivors;
    }

    Reduced {
        elements: kept.iter().map(|&ei| elems[ei]).collect(),
        sets: set_keep.iter().map(|&si| avail[si]).collect(),
        members: set_keep.into_iter().map(|si| members[si].clone()).collect(),
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    pub fn unit(universe: usize, sets: &[&[usize]]) -> CoverInstance {
        CoverInstance::unit(universe, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    pub fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Optimum by trying every subset of sets. Only for small instances.
    pub fn brute_force_optimum(inst: &CoverInstance) -> Option<BigRational> {
        let s = inst.num_sets();
        assert!(s <= 20);
        let mut best: Option<BigRational> = None;
        for mask in 0u32..(1 << s) {
            let chosen: Vec<usize> = (0..s).filter(|&i| mask >> i & 1 == 1).collect();
            if inst.covers(&chosen) {
                let c = inst.cost(&chosen);
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Random feasible instance.
    pub fn random_instance(seed: u64, weighted: bool) -> CoverInstance {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let universe = rng.random_range(1..=10);
        let nsets = rng.random_range(1..=12);
        let mut sets: Vec<Vec<usize>> = (0..nsets)
            .map(|_| (0..universe).filter(|_| rng.random_bool(0.35)).collect())
            .collect();
        for e in 0..universe {
            if !sets.iter().any(|s| s.contains(&e)) {
                let s = rng.random_range(0..nsets);
                sets[s].push(e);
            }
        }
        let weights = (0..nsets)
            .map(|_| {
                if weighted {
                    rat(rng.random_range(0..6), rng.random_range(1..4))
                } else {
                    BigRational::one()
                }
            })
            .collect();
        CoverInstance::new(universe, sets, weights).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use crate::implicant::enumerate_primes;

    #[test]
    fn construction_checks() {
        assert!(CoverInstance::unit(2, vec![vec![2]]).is_err());
        assert!(CoverInstance::new(1, vec![vec![0]], vec![rat(-1, 1)]).is_err());
        assert!(!unit(2, &[&[0]]).is_feasible());
        assert!(unit(2, &[&[0], &[1]]).is_feasible());
    }

    #[test]
    fn single_zero_instance_over_all_ones() {
        let m = ZeroMatrix::from_strs(&["000"]).unwrap();
        let p = enumerate_primes(&m).unwrap();
        let ones: Vec<Point> = m.one_points().collect();
        let inst = build_cover_instance(&m, &p, &ones, CoverMode::Length).unwrap();
        assert_eq!(inst.universe_size(), 7);
        assert_eq!(inst.num_sets(), 3);
        for s in 0..3 {
            assert_eq!(inst.set(s).count_ones(..), 4);
        }
    }

    #[test]
    fn near_zero_target_gives_singletons() {
        let m = ZeroMatrix::from_strs(&["000"]).unwrap();
        let p = enumerate_primes(&m).unwrap();
        let theta: Vec<Point> = ["100", "010", "001"].iter().map(|s| Point::parse(s).unwrap()).collect();
        let inst = build_cover_instance(&m, &p, &theta, CoverMode::Length).unwrap();
        assert_eq!(inst.universe_size(), 3);
        for s in 0..3 {
            assert_eq!(inst.set(s).count_ones(..), 1);
        }
        let empty = build_cover_instance(&m, &p, &[], CoverMode::Length).unwrap();
        assert_eq!(empty.universe_size(), 0);
        assert_eq!(exact_min_cover(&empty).unwrap().objective, BigRational::zero());
    }

    #[test]
    fn rank_mode_weights() {
        let m = ZeroMatrix::from_strs(&["000", "111"]).unwrap();
        let p = enumerate_primes(&m).unwrap();
        let ones: Vec<Point> = m.one_points().collect();
        let inst = build_cover_instance(&m, &p, &ones, CoverMode::Rank).unwrap();
        assert!((0..inst.num_sets()).all(|s| *inst.weight(s) == rat(2, 1)));
        let zero = Point::parse("000").unwrap();
        assert!(build_cover_instance(&m, &p, &[zero], CoverMode::Rank).is_err());
    }

    #[test]
    fn reduction_keeps_feasibility_and_drops_dominated() {
        let sets: Vec<FixedBitSet> = [&[0usize, 1][..], &[1, 2], &[0, 1, 2], &[2]]
            .iter()
            .map(|m| {
                let mut b = FixedBitSet::with_capacity(3);
                m.iter().for_each(|&e| b.insert(e));
                b
            })
            .collect();
        let mut all = FixedBitSet::with_capacity(3);
        all.insert_range(..);
        let mut avail = FixedBitSet::with_capacity(4);
        avail.insert_range(..);
        let r = reduce(&sets, &[1, 1, 1, 1], &all, &avail, true);
        assert_eq!(r.sets, [2]);
        let r = reduce(&sets, &[1, 1, 3, 1], &all, &avail, true);
        assert!(!r.sets.contains(&3));
    }
}
