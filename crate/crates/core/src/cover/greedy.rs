use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{CoverInstance, CoverSolution};
use crate::error::Result;

/// Classical greedy: repeatedly take the set with the best ratio of newly
/// covered elements to weight, lowest index on ties.
pub fn greedy_cover(inst: &CoverInstance) -> Result<CoverSolution> {
    inst.check_feasible()?;
    let (w, _) = inst.integer_weights()?;
    let mut uncovered = FixedBitSet::with_capacity(inst.universe_size());
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    let mut taken = vec![false; inst.num_sets()];

    while !uncovered.is_clear() {
        let mut best: Option<(usize, u64)> = None;
        for s in 0..inst.num_sets() {
            if taken[s] {
                continue;
            }
            let gain = inst.set(s).intersection_count(&uncovered) as u64;
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                // gain/w[s] > bgain/w[b]
                Some((b, bgain)) => gain as u128 * w[b] as u128 > bgain as u128 * w[s] as u128,
            };
            if better {
                best = Some((s, gain));
            }
        }
        let (s, _) = best.expect("feasible instance always has a useful set");
        taken[s] = true;
        chosen.push(s);
        uncovered.difference_with(inst.set(s));
    }
    chosen.sort_unstable();
    let objective = inst.cost(&chosen);
    Ok(CoverSolution {
        chosen,
        objective,
        optimal: false,
        lower_bound: ratio_bound(inst),
    })
}

/// `|U| * min_s w_s / |s|`: no cover can do better than spending at the
/// cheapest per-element rate on every element.
pub(crate) fn ratio_bound(inst: &CoverInstance) -> BigRational {
    let u = inst.universe_size();
    if u == 0 {
        return BigRational::zero();
    }
    (0..inst.num_sets())
        .filter(|&s| !inst.set(s).is_clear())
        .map(|s| inst.weight(s) / BigRational::from_integer(BigInt::from(inst.set(s).count_ones(..))))
        .min()
        .map(|rate| rate * BigRational::from_integer(BigInt::from(u)))
        .unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::*;
    use crate::error::Error;

    #[test]
    fn examples() {
        let inst = unit(7, &[&[0, 1, 2, 3], &[0, 1, 4, 5], &[0, 2, 4, 6]]);
        let g = greedy_cover(&inst).unwrap();
        assert_eq!(g.chosen, [0, 1, 2]);
        assert!(!g.optimal);

        let g = greedy_cover(&unit(1, &[&[0]])).unwrap();
        assert_eq!(g.objective, rat(1, 1));

        let g = greedy_cover(&unit(3, &[&[0, 1], &[1, 2], &[0, 2]])).unwrap();
        assert_eq!(g.chosen, [0, 1]);
        assert_eq!(g.objective, rat(2, 1));
    }

    #[test]
    fn infeasible_is_reported() {
        assert!(matches!(
            greedy_cover(&unit(2, &[&[1]])),
            Err(Error::Infeasible { element: 0 })
        ));
    }

    #[test]
    fn weighted_ratio_and_zero_weights() {
        // set 1 covers fewer elements but is much cheaper per element
        let inst = CoverInstance::new(
            3,
            vec![vec![0, 1, 2], vec![0, 1], vec![2]],
            vec![rat(6, 1), rat(1, 1), rat(0, 1)],
        )
        .unwrap();
        let g = greedy_cover(&inst).unwrap();
        assert_eq!(g.chosen, [1, 2]);
        assert_eq!(g.objective, rat(1, 1));
    }

    #[test]
    fn deterministic() {
        for seed in 0..50 {
            let inst = random_instance(seed, true);
            assert_eq!(greedy_cover(&inst).unwrap(), greedy_cover(&inst).unwrap());
        }
    }
}
