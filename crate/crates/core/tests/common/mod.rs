//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the solvers under test.
#![allow(dead_code)]

use fixedbitset::FixedBitSet;
use nullcover::cube::{Cube, ZeroMatrix};

pub fn inside(fixed: u64, value: u64, p: u64) -> bool {
    p & fixed == value
}

/// Primes by scanning all `3^n` cubes, sorted.
pub fn scan_primes(m: &ZeroMatrix) -> Vec<Cube> {
    let n = m.n();
    let rows: Vec<u64> = m.rows().map(|r| r.bits()).collect();
    let hits_zero = |fixed: u64, value: u64| rows.iter().any(|&r| inside(fixed, value, r));
    let mut out = Vec::new();
    for code in 0..3u64.pow(n as u32) {
        let (mut c, mut fixed, mut value) = (code, 0u64, 0u64);
        for j in 0..n {
            match c % 3 {
                0 => fixed |= 1 << j,
                1 => {
                    fixed |= 1 << j;
                    value |= 1 << j;
                }
                _ => {}
            }
            c /= 3;
        }
        if hits_zero(fixed, value) {
            continue;
        }
        let prime = (0..n)
            .filter(|&j| fixed >> j & 1 == 1)
            .all(|j| hits_zero(fixed & !(1 << j), value & !(1 << j)));
        if prime {
            out.push(Cube::new(fixed, value, n).unwrap());
        }
    }
    out.sort();
    out
}

/// Smallest total weight of primes covering every one-point, by depth-first
/// search over the primes through the hardest uncovered point. Pruning uses
/// sets of uncovered points no two of which share a prime. Returns the
/// optimum and the number of primes.
pub fn min_cover<F: Fn(&Cube) -> u64>(m: &ZeroMatrix, weight: F) -> (u64, usize) {
    let n = m.n();
    assert!(n <= 12, "oracle is meant for small n");
    let primes = scan_primes(m);
    if m.k() == 0 {
        return (weight(&Cube::full(n).unwrap()), primes.len());
    }
    let ones: Vec<u64> = (0..1u64 << n).filter(|&p| !m.rows().any(|r| r.bits() == p)).collect();
    let w: Vec<u64> = primes.iter().map(&weight).collect();
    // covering[i]: primes containing one-point i
    let covering: Vec<FixedBitSet> = ones
        .iter()
        .map(|&p| {
            let mut s = FixedBitSet::with_capacity(primes.len());
            for (pi, c) in primes.iter().enumerate() {
                if inside(c.fixed_mask(), c.value_mask(), p) {
                    s.insert(pi);
                }
            }
            s
        })
        .collect();
    let members: Vec<Vec<usize>> = (0..primes.len())
        .map(|pi| (0..ones.len()).filter(|&i| covering[i].contains(pi)).collect())
        .collect();
    let mut uncovered = FixedBitSet::with_capacity(ones.len());
    uncovered.insert_range(..);
    let mut s = Search {
        covering: &covering,
        members: &members,
        w: &w,
        best: w.iter().sum::<u64>() + 1,
    };
    s.dfs(&mut uncovered, 0);
    (s.best, primes.len())
}

struct Search<'a> {
    covering: &'a [FixedBitSet],
    members: &'a [Vec<usize>],
    w: &'a [u64],
    best: u64,
}

impl Search<'_> {
    fn bound(&self, uncovered: &FixedBitSet) -> u64 {
        let mut used = FixedBitSet::with_capacity(self.w.len());
        let mut lb = 0;
        let mut order: Vec<usize> = uncovered.ones().collect();
        order.sort_by_key(|&i| self.covering[i].count_ones(..));
        for i in order {
            if self.covering[i].is_disjoint(&used) {
                lb += self.covering[i].ones().map(|p| self.w[p]).min().unwrap();
                used.union_with(&self.covering[i]);
            }
        }
        lb
    }

    fn dfs(&mut self, uncovered: &mut FixedBitSet, cost: u64) {
        if uncovered.is_clear() {
            self.best = self.best.min(cost);
            return;
        }
        if cost + self.bound(uncovered) >= self.best {
            return;
        }
        let pivot = uncovered.ones().min_by_key(|&i| self.covering[i].count_ones(..)).unwrap();
        let choices: Vec<usize> = self.covering[pivot].ones().collect();
        for p in choices {
            let newly: Vec<usize> = self.members[p].iter().copied().filter(|&i| uncovered.contains(i)).collect();
            for &i in &newly {
                uncovered.set(i, false);
            }
            self.dfs(uncovered, cost + self.w[p]);
            for &i in &newly {
                uncovered.insert(i);
            }
        }
    }
}

/// Sizes-first scan over subsets of the primes: the least number of primes
/// whose union is all the one-points. Meant for up to ~25 primes.
pub fn subset_scan_length(m: &ZeroMatrix) -> u64 {
    let n = m.n();
    let primes = scan_primes(m);
    let ones: Vec<u64> = (0..1u64 << n).filter(|&p| !m.rows().any(|r| r.bits() == p)).collect();
    if ones.is_empty() {
        return 0;
    }
    let masks: Vec<FixedBitSet> = primes
        .iter()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(ones.len());
            for (i, &p) in ones.iter().enumerate() {
                s.set(i, inside(c.fixed_mask(), c.value_mask(), p));
            }
            s
        })
        .collect();
    let p = masks.len();
    for size in 1..=p {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut acc = FixedBitSet::with_capacity(ones.len());
            for &i in &idx {
                acc.union_with(&masks[i]);
            }
            if acc.count_ones(..) == ones.len() {
                return size as u64;
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == p - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    unreachable!("the primes cover every one-point")
}

pub fn random_matrix<R: rand::Rng>(rng: &mut R, n: usize, k: usize) -> ZeroMatrix {
    let rows = rand::seq::index::sample(rng, 1usize << n, k).into_iter().map(|x| x as u64).collect();
    ZeroMatrix::from_bits(n, rows).unwrap()
}
