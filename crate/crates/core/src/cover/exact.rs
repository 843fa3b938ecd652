//! Exact weighted set cover by branch and bound.
//!
//! The search runs in two phases. The first finds the optimal value: it
//! branches on the uncovered element with the fewest available sets
//! (including, then excluding, the largest of them) and prunes with the
//! larger of the LP bound and the per-element rate bound, after dominance
//! reductions at every node. The second phase walks the sets in index order
//! with the optimal value as a target, which yields the lexicographically
//! smallest optimal cover.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::greedy::greedy_cover;
use super::lp::packing_value_f64;
use super::{reduce, CoverInstance, CoverSolution};
use crate::budget::{Budget, Deadline};
use crate::error::{Error, Result};

pub fn exact_min_cover(inst: &CoverInstance) -> Result<CoverSolution> {
    exact_min_cover_with(inst, &Budget::default())
}

/// Provably optimal cover, or [`Error::CoverBudget`] with the best cover
/// found and the root lower bound when the node or time budget runs out.
pub fn exact_min_cover_with(inst: &CoverInstance, budget: &Budget) -> Result<CoverSolution> {
    inst.check_feasible()?;
    if inst.universe_size() == 0 {
        return Ok(CoverSolution {
            chosen: Vec::new(),
            objective: BigRational::zero(),
            optimal: true,
            lower_bound: BigRational::zero(),
        });
    }
    let (w, scale) = inst.integer_weights()?;
    let to_rat = |x: u64| BigRational::new(BigInt::from(x), scale.clone());

    let greedy = greedy_cover(inst)?;
    let sets: Vec<FixedBitSet> = (0..inst.num_sets()).map(|s| inst.set(s).clone()).collect();
    let mut solver = Solver::new(&sets, &w, budget);

    let mut uncov = FixedBitSet::with_capacity(inst.universe_size());
    uncov.insert_range(..);
    let mut avail = FixedBitSet::with_capacity(sets.len());
    avail.insert_range(..);

    let root_bound = solver.bound(&reduce(&sets, &w, &uncov, &avail, true));
    solver.best = greedy.chosen.iter().map(|&s| w[s]).sum();
    solver.best_chosen = greedy.chosen.clone();
    if root_bound < solver.best {
        solver.optimize(uncov.clone(), avail, 0, &mut Vec::new());
    }
    if solver.aborted {
        let mut chosen = solver.best_chosen;
        chosen.sort_unstable();
        return Err(Error::CoverBudget(Box::new(CoverSolution {
            objective: to_rat(solver.best),
            chosen,
            optimal: false,
            lower_bound: to_rat(root_bound.min(solver.best)),
        })));
    }

    let target = solver.best;
    solver.nodes = 0;
    let mut chosen = match solver.lex_min(target, uncov) {
        Some(lex) => lex,
        // phase two ran out of budget: the phase-one cover is still optimal
        None => solver.best_chosen,
    };
    chosen.sort_unstable();
    debug_assert!(inst.covers(&chosen));
    debug_assert_eq!(chosen.iter().map(|&s| w[s]).sum::<u64>(), target);
    Ok(CoverSolution {
        chosen,
        objective: to_rat(target),
        optimal: true,
        lower_bound: to_rat(target),
    })
}

struct Solver<'a> {
    sets: &'a [FixedBitSet],
    w: &'a [u64],
    /// Sets covering each element, ascending.
    covers: Vec<Vec<usize>>,
    max_nodes: u64,
    deadline: Deadline,
    nodes: u64,
    aborted: bool,
    best: u64,
    best_chosen: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(sets: &'a [FixedBitSet], w: &'a [u64], budget: &Budget) -> Self {
        let universe = sets.first().map_or(0, |s| s.len());
        let mut covers = vec![Vec::new(); universe];
        for (s, set) in sets.iter().enumerate() {
            for e in set.ones() {
                covers[e].push(s);
            }
        }
        Solver {
            sets,
            w,
            covers,
            max_nodes: budget.max_cover_nodes,
            deadline: budget.deadline(),
            nodes: 0,
            aborted: false,
            best: u64::MAX,
            best_chosen: Vec::new(),
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes || (self.nodes % 256 == 0 && self.deadline.expired()) {
            self.aborted = true;
        }
        !self.aborted
    }

    /// Integer lower bound on the cost of covering the reduced instance.
    fn bound(&self, r: &super::Reduced) -> u64 {
        if r.elements.is_empty() {
            return 0;
        }
        let rate = self.rate_bound(r);
        if rate >= self.best {
            return rate;
        }
        let weights: Vec<f64> = r.sets.iter().map(|&s| self.w[s] as f64).collect();
        let lp = packing_value_f64(&r.members, &weights, r.elements.len());
        let lp = (lp - 1e-6 * lp.abs().max(1.0)).ceil().max(0.0) as u64;
        rate.max(lp)
    }

    /// `ceil(|U| * min_s w_s / |s cap U|)`.
    fn rate_bound(&self, r: &super::Reduced) -> u64 {
        let u = r.elements.len() as u128;
        let mut best: Option<(u128, u128)> = None;
        for (i, &s) in r.sets.iter().enumerate() {
            let c = r.members[i].count_ones(..) as u128;
            let w = self.w[s] as u128;
            if best.is_none_or(|(bw, bc)| w * bc < bw * c) {
                best = Some((w, c));
            }
        }
        match best {
            Some((w, c)) => (u * w).div_ceil(c) as u64,
            None => u64::MAX,
        }
    }

    fn optimize(&mut self, uncov: FixedBitSet, avail: FixedBitSet, cost: u64, chosen: &mut Vec<usize>) {
        if !self.tick() {
            return;
        }
        if uncov.is_clear() {
            if cost < self.best {
                self.best = cost;
                self.best_chosen = chosen.clone();
            }
            return;
        }
        if cost >= self.best {
            return;
        }
        let r = reduce(self.sets, self.w, &uncov, &avail, true);
        let mut uncov = FixedBitSet::with_capacity(uncov.len());
        r.elements.iter().for_each(|&e| uncov.insert(e));
        let mut avail = FixedBitSet::with_capacity(avail.len());
        r.sets.iter().for_each(|&s| avail.insert(s));

        // element with the fewest available sets
        let mut pick: Option<(usize, usize)> = None;
        for &e in &r.elements {
            let count = self.covers[e].iter().filter(|&&s| avail.contains(s)).count();
            if pick.is_none_or(|(_, c)| count < c) {
                pick = Some((e, count));
            }
        }
        let (e, count) = pick.expect("uncovered set is non-empty");
        if count == 0 {
            return;
        }
        if count == 1 {
            let s = *self.covers[e].iter().find(|&&s| avail.contains(s)).unwrap();
            self.include(s, uncov, avail, cost, chosen);
            return;
        }
        if cost + self.bound(&r) >= self.best {
            return;
        }

        let s = self.covers[e]
            .iter()
            .copied()
            .filter(|&s| avail.contains(s))
            .max_by(|&a, &b| {
                let (ca, cb) = (
                    self.sets[a].intersection_count(&uncov),
                    self.sets[b].intersection_count(&uncov),
                );
                ca.cmp(&cb)
                    .then(self.w[b].cmp(&self.w[a]))
                    .then(b.cmp(&a))
            })
            .unwrap();
        self.include(s, uncov.clone(), avail.clone(), cost, chosen);
        if self.aborted {
            return;
        }
        avail.remove(s);
        self.optimize(uncov, avail, cost, chosen);
    }

    fn include(&mut self, s: usize, mut uncov: FixedBitSet, mut avail: FixedBitSet, cost: u64, chosen: &mut Vec<usize>) {
        uncov.difference_with(&self.sets[s]);
        avail.remove(s);
        chosen.push(s);
        self.optimize(uncov, avail, cost + self.w[s], chosen);
        chosen.pop();
    }

    /// Lexicographically smallest cover of cost `target`, or `None` if the
    /// node budget runs out first.
    fn lex_min(&mut self, target: u64, uncov: FixedBitSet) -> Option<Vec<usize>> {
        self.aborted = false;
        let mut chosen = Vec::new();
        let found = self.lex(0, uncov, 0, target, &mut chosen);
        (found && !self.aborted).then_some(chosen)
    }

    fn lex(&mut self, from: usize, uncov: FixedBitSet, cost: u64, target: u64, chosen: &mut Vec<usize>) -> bool {
        if !self.tick() {
            return false;
        }
        if uncov.is_clear() {
            return cost <= target;
        }
        if uncov.ones().any(|e| self.covers[e].last().is_none_or(|&s| s < from)) {
            return false;
        }
        let mut avail = FixedBitSet::with_capacity(self.sets.len());
        avail.insert_range(from..);
        let r = reduce(self.sets, self.w, &uncov, &avail, true);
        let saved = std::mem::replace(&mut self.best, target + 1);
        let lb = self.bound(&r);
        self.best = saved;
        if cost + lb > target {
            return false;
        }
        let Some(s) = (from..self.sets.len()).find(|&s| !self.sets[s].is_disjoint(&uncov)) else {
            return false;
        };
        if cost + self.w[s] <= target {
            let mut next = uncov.clone();
            next.difference_with(&self.sets[s]);
            chosen.push(s);
            if self.lex(s + 1, next, cost + self.w[s], target, chosen) {
                return true;
            }
            chosen.pop();
            if self.aborted {
                return false;
            }
        }
        self.lex(s + 1, uncov, cost, target, chosen)
    }
}
