use std::collections::HashMap;

use crate::budget::Budget;
use crate::cube::{IndicatorVector, ZeroMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecompositionKind {
    /// `alpha = OR(parts)`, every part inside `alpha`.
    Plain,
    /// Additionally `alpha = XOR(parts)`: each coordinate of `alpha` lies in
    /// an odd number of parts.
    Orthogonal,
    /// Orthogonal, with `alpha` the all-ones vector.
    Unity,
}

/// A claimed decomposition of `alpha` into `parts`.
///
/// Parts must be nonzero and differ from `alpha`; without that rule every
/// vector would decompose into itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub alpha: IndicatorVector,
    pub parts: Vec<IndicatorVector>,
    pub kind: DecompositionKind,
}

impl DecompositionWitness {
    pub fn is_valid(&self) -> Result<bool> {
        match self.kind {
            DecompositionKind::Plain => is_decomposable(&self.alpha, &self.parts),
            DecompositionKind::Orthogonal => is_ortho_decomposable(&self.alpha, &self.parts),
            DecompositionKind::Unity => is_unity_decomposition(&self.alpha, &self.parts),
        }
    }
}

fn check_parts(alpha: &IndicatorVector, parts: &[IndicatorVector]) -> Result<()> {
    if alpha.is_zero() {
        return Err(Error::invalid("cannot decompose the zero vector"));
    }
    for p in parts {
        if p.len() != alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                found: p.len(),
            });
        }
    }
    Ok(())
}

fn proper_parts(alpha: &IndicatorVector, parts: &[IndicatorVector]) -> bool {
    !parts.is_empty() && parts.iter().all(|p| !p.is_zero() && p != alpha && p.is_subset(alpha))
}

pub fn is_decomposable(alpha: &IndicatorVector, parts: &[IndicatorVector]) -> Result<bool> {
    check_parts(alpha, parts)?;
    if !proper_parts(alpha, parts) {
        return Ok(false);
    }
    let mut union = IndicatorVector::zeros(alpha.len()).as_bits().clone();
    for p in parts {
        union.union_with(p.as_bits());
    }
    Ok(&union == alpha.as_bits())
}

pub fn is_ortho_decomposable(alpha: &IndicatorVector, parts: &[IndicatorVector]) -> Result<bool> {
    check_parts(alpha, parts)?;
    if !proper_parts(alpha, parts) {
        return Ok(false);
    }
    let mut union = IndicatorVector::zeros(alpha.len()).as_bits().clone();
    let mut xor = union.clone();
    for p in parts {
        union.union_with(p.as_bits());
        xor.symmetric_difference_with(p.as_bits());
    }
    Ok(&union == alpha.as_bits() && &xor == alpha.as_bits())
}

pub fn is_unity_decomposition(alpha: &IndicatorVector, parts: &[IndicatorVector]) -> Result<bool> {
    Ok(alpha.count_ones() == alpha.len() && is_ortho_decomposable(alpha, parts)?)
}

/// Which decomposition notion the literal test asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LiteralNotion {
    Plain,
    #[default]
    Orthogonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LiteralBoundConfig {
    pub notion: LiteralNotion,
    /// Forbid a part equal to the whole restricted vector.
    pub strict: bool,
}

impl Default for LiteralBoundConfig {
    fn default() -> Self {
        LiteralBoundConfig {
            notion: LiteralNotion::Orthogonal,
            strict: true,
        }
    }
}

impl LiteralBoundConfig {
    /// Plain, non-strict decompositions. With this setting a `Holds` result
    /// is a proof: if the literal sat in only `s <= t` conjunctions, the
    /// other literals of each such conjunction would decompose the value
    /// vector on the rows whose adjacent one-point that conjunction covers.
    /// The default setting can claim more than is true.
    pub fn sound() -> Self {
        LiteralBoundConfig {
            notion: LiteralNotion::Plain,
            strict: false,
        }
    }
}

/// A literal `x_variable = sign`.
pub type Literal = (usize, bool);

/// Outcome of [`literal_occurrence_lower_bound`]. Row sets are bit masks
/// over row indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiteralOccurrence {
    /// Every partition has a block where the literal cannot be decomposed.
    /// `witnesses[p]` is that block for the `p`-th partition in
    /// restricted-growth order.
    Holds { partitions: u64, witnesses: Vec<u32> },
    /// A partition all of whose blocks admit a decomposition, listed per
    /// block.
    Fails {
        partition: Vec<u32>,
        decompositions: Vec<Vec<Literal>>,
    },
    /// `k` exceeds the partition budget; nothing is claimed.
    BudgetExceeded,
}

impl LiteralOccurrence {
    pub fn holds(&self) -> bool {
        matches!(self, LiteralOccurrence::Holds { .. })
    }
}

/// Tests the partition criterion for "the literal occurs in at least `t + 1`
/// conjunctions of every DNF": for every split of the rows into at most `t`
/// groups, some group must leave the literal's value vector (over the zero
/// rows) without a decomposition into the value vectors of the other
/// literals, all restricted to that group.
///
/// A group on which the literal is false everywhere never counts as such a
/// witness.
pub fn literal_occurrence_lower_bound(
    m: &ZeroMatrix,
    variable: usize,
    sign: bool,
    t: usize,
    config: LiteralBoundConfig,
    budget: &Budget,
) -> Result<LiteralOccurrence> {
    m.check_col(variable)?;
    let k = m.k();
    if t < 1 || t > k {
        return Err(Error::invalid(format!("need 1 <= t <= k (got t={t}, k={k})")));
    }
    if k > budget.partition_max_k || k > 32 {
        return Ok(LiteralOccurrence::BudgetExceeded);
    }
    // value vectors: bit i set when the literal is true on row i
    let values: Vec<(Literal, u32)> = (0..m.n())
        .flat_map(|j| [false, true].map(|s| (j, s)))
        .map(|(j, s)| {
            let mut mask = 0u32;
            for (i, &r) in m.raw_rows().iter().enumerate() {
                if (r >> j & 1 == 1) == s {
                    mask |= 1 << i;
                }
            }
            ((j, s), mask)
        })
        .collect();
    let alpha = values.iter().find(|(l, _)| *l == (variable, sign)).unwrap().1;
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    if alpha == full {
        return Err(Error::invalid(format!(
            "literal x{}={} is true on every zero row and occurs in no prime implicant",
            variable + 1,
            sign as u8
        )));
    }
    let others: Vec<(Literal, u32)> = values.into_iter().filter(|(l, _)| *l != (variable, sign)).collect();

    let mut search = PartitionSearch {
        k,
        t,
        alpha,
        others,
        config,
        memo: HashMap::new(),
        blocks: Vec::with_capacity(t),
        witnesses: Vec::new(),
        failure: None,
        partitions: 0,
    };
    search.run(0);
    Ok(match search.failure {
        Some(partition) => {
            let decompositions = partition
                .iter()
                .map(|&b| search.memo[&b].clone().unwrap_or_default())
                .collect();
            LiteralOccurrence::Fails {
                partition,
                decompositions,
            }
        }
        None => LiteralOccurrence::Holds {
            partitions: search.partitions,
            witnesses: search.witnesses,
        },
    })
}

struct PartitionSearch {
    k: usize,
    t: usize,
    alpha: u32,
    others: Vec<(Literal, u32)>,
    config: LiteralBoundConfig,
    /// Block mask to a decomposition of the restricted literal, `None` if
    /// there is none.
    memo: HashMap<u32, Option<Vec<Literal>>>,
    blocks: Vec<u32>,
    witnesses: Vec<u32>,
    failure: Option<Vec<u32>>,
    partitions: u64,
}

impl PartitionSearch {
    /// Places row `r` into an existing block or a new one.
    fn run(&mut self, r: usize) {
        if self.failure.is_some() {
            return;
        }
        if r == self.k {
            self.partitions += 1;
            self.check_partition();
            return;
        }
        for b in 0..self.blocks.len() {
            self.blocks[b] |= 1 << r;
            self.run(r + 1);
            self.blocks[b] &= !(1 << r);
            if self.failure.is_some() {
                return;
            }
        }
        if self.blocks.len() < self.t {
            self.blocks.push(1 << r);
            self.run(r + 1);
            self.blocks.pop();
        }
    }

    fn check_partition(&mut self) {
        for i in 0..self.blocks.len() {
            let block = self.blocks[i];
            if self.decomposition(block).is_none() {
                self.witnesses.push(block);
                return;
            }
        }
        self.failure = Some(self.blocks.clone());
    }

    fn decomposition(&mut self, block: u32) -> Option<Vec<Literal>> {
        if let Some(d) = self.memo.get(&block) {
            return d.clone();
        }
        let d = self.decompose(block);
        self.memo.insert(block, d.clone());
        d
    }

    fn decompose(&self, block: u32) -> Option<Vec<Literal>> {
        let target = self.alpha & block;
        if target == 0 {
            return Some(Vec::new());
        }
        let mut seen = Vec::new();
        let mut eligible = Vec::new();
        for &(lit, mask) in &self.others {
            let v = mask & block;
            if v == 0 || v & !target != 0 || (self.config.strict && v == target) || seen.contains(&v) {
                continue;
            }
            seen.push(v);
            eligible.push((lit, v));
        }
        match self.config.notion {
            LiteralNotion::Plain => {
                let union = eligible.iter().fold(0, |acc, &(_, v)| acc | v);
                (union == target).then(|| eligible.into_iter().map(|(l, _)| l).collect())
            }
            LiteralNotion::Orthogonal => xor_combination(target, &eligible),
        }
    }
}

/// A subset of `eligible` whose XOR is `target`, by elimination over GF(2).
/// Every vector lies inside `target`, so XOR equal to `target` forces the OR
/// to match as well.
fn xor_combination(target: u32, eligible: &[(Literal, u32)]) -> Option<Vec<Literal>> {
    debug_assert!(eligible.len() <= 128);
    // (vector, subset of eligible producing it); each entry is reduced
    // against all earlier ones, so its top bit is its pivot.
    let mut basis: Vec<(u32, u128)> = Vec::new();
    let reduce = |basis: &[(u32, u128)], mut v: u32, mut combo: u128| {
        for &(b, bc) in basis {
            let pivot = 31 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
                combo ^= bc;
            }
        }
        (v, combo)
    };
    for (i, &(_, v)) in eligible.iter().enumerate() {
        let (v, combo) = reduce(&basis, v, 1 << i);
        if v != 0 {
            basis.push((v, combo));
        }
    }
    let (rest, combo) = reduce(&basis, target, 0);
    (rest == 0).then(|| {
        (0..eligible.len())
            .filter(|&i| combo >> i & 1 == 1)
            .map(|i| eligible[i].0)
            .collect()
    })
}
