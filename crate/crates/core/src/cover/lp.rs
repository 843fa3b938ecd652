//! Fractional set cover, solved through its dual packing LP
//!
//! ```text
//! max  sum_e u_e   s.t.  sum_{e in s} u_e <= w_s  for every set s,  u >= 0
//! ```
//!
//! whose slack basis is feasible from the start, so a single simplex phase
//! suffices. Any feasible `u` is a lower bound on every cover, which is what
//! makes the floating-point path certifiable: its `u` is repaired and checked
//! in exact arithmetic before being reported.

use std::cell::Cell;

use fixedbitset::FixedBitSet;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, FromPrimitive, One, Signed, Zero};

use super::{reduce, CoverInstance};
use crate::budget::Budget;
use crate::error::Result;

/// LP relaxation value. `exact` is false when the value is a certified dual
/// bound from the floating-point path rather than the exact optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpBound {
    pub value: BigRational,
    pub exact: bool,
}

pub fn lp_lower_bound(inst: &CoverInstance) -> Result<BigRational> {
    Ok(lp_lower_bound_with(inst, &Budget::default())?.value)
}

pub fn lp_lower_bound_with(inst: &CoverInstance, budget: &Budget) -> Result<LpBound> {
    inst.check_feasible()?;
    if inst.universe_size() == 0 {
        return Ok(LpBound {
            value: BigRational::zero(),
            exact: true,
        });
    }
    let (w, scale) = inst.integer_weights()?;
    let sets: Vec<FixedBitSet> = (0..inst.num_sets()).map(|s| inst.set(s).clone()).collect();
    let mut elements = FixedBitSet::with_capacity(inst.universe_size());
    elements.insert_range(..);
    let mut available = FixedBitSet::with_capacity(inst.num_sets());
    available.insert_range(..);
    let r = reduce(&sets, &w, &elements, &available, true);
    let nnz: usize = r.members.iter().map(|m| m.count_ones(..)).sum();
    let scale = BigRational::from_integer(scale);

    if nnz <= budget.lp_exact_nonzeros {
        return Ok(LpBound {
            value: exact_packing_value(&r.members, &r.sets.iter().map(|&s| w[s]).collect::<Vec<_>>(), r.elements.len())
                / scale,
            exact: true,
        });
    }

    let b: Vec<f64> = r.sets.iter().map(|&s| w[s] as f64).collect();
    let (_, packed) = packing_f64(&r.members, &b, r.elements.len(), 200_000);
    let mut u = vec![0.0f64; inst.universe_size()];
    for (pos, &e) in r.elements.iter().enumerate() {
        u[e] = packed[pos];
    }
    let value = certify(inst, &w, &u);
    Ok(LpBound {
        value: value / scale,
        exact: false,
    })
}

/// Turns an approximate packing `u` into an exactly feasible one by zeroing
/// elements of zero-weight sets and scaling down by the worst overload, and
/// returns its value (in scaled-weight units).
fn certify(inst: &CoverInstance, w: &[u64], u: &[f64]) -> BigRational {
    let mut u = u.to_vec();
    for (s, &ws) in w.iter().enumerate() {
        if ws == 0 {
            for e in inst.set(s).ones() {
                u[e] = 0.0;
            }
        }
    }
    let exact: Vec<BigRational> = u
        .iter()
        .map(|&x| BigRational::from_f64(x).unwrap_or_else(BigRational::zero))
        .collect();
    let mut worst = BigRational::one();
    for (s, &ws) in w.iter().enumerate() {
        if ws == 0 {
            continue;
        }
        let load: BigRational = inst.set(s).ones().map(|e| exact[e].clone()).sum();
        let ratio = load / BigRational::from_integer(ws.into());
        if ratio > worst {
            worst = ratio;
        }
    }
    exact.into_iter().sum::<BigRational>() / worst
}

/// Exact optimum: first in 128-bit rationals, redone with big rationals if
/// any intermediate overflows.
fn exact_packing_value(members: &[FixedBitSet], w: &[u64], nvars: usize) -> BigRational {
    OVERFLOW.with(|f| f.set(false));
    let b: Vec<Small> = w.iter().map(|&x| Small(Ratio::from_integer(x as i128))).collect();
    let sol = solve_packing::<Small>(members, &b, nvars, None);
    if !OVERFLOW.with(|f| f.get()) {
        let v = sol.value.0;
        return BigRational::new((*v.numer()).into(), (*v.denom()).into());
    }
    let b: Vec<BigRational> = w.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    solve_packing::<BigRational>(members, &b, nvars, None).value
}

/// Float LP bound used inside branch and bound. `members[s]` lists the
/// element positions of set `s`; the value is rounded toward safety by the
/// caller.
pub(crate) fn packing_value_f64(members: &[FixedBitSet], weights: &[f64], nelems: usize) -> f64 {
    packing_f64(members, weights, nelems, 50_000).0
}

/// Float packing on slightly enlarged, pairwise distinct right-hand sides,
/// which keeps the simplex away from the degenerate stalls unit weights
/// cause. The result is scaled back into the original polytope.
fn packing_f64(members: &[FixedBitSet], weights: &[f64], nelems: usize, max_iter: usize) -> (f64, Vec<f64>) {
    let b: Vec<f64> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let h = (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 44;
            w * (1.0 + 1e-6 * (h as f64 + 1.0) / (1u64 << 20) as f64)
        })
        .collect();
    let sol = solve_packing::<f64>(members, &b, nelems, Some(max_iter));
    let mut u: Vec<f64> = sol.u.into_iter().map(|x| x.max(0.0)).collect();
    let mut worst = 1.0f64;
    for (set, &w) in members.iter().zip(weights) {
        let load: f64 = set.ones().map(|e| u[e]).sum();
        if w <= 0.0 {
            if load > 0.0 {
                for e in set.ones() {
                    u[e] = 0.0;
                }
            }
        } else {
            worst = worst.max(load / w);
        }
    }
    let total: f64 = u.iter().sum::<f64>() / worst;
    u.iter_mut().for_each(|x| *x /= worst);
    (total, u)
}

pub(crate) trait Scalar: Clone {
    fn lp_zero() -> Self;
    fn lp_one() -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn less(&self, o: &Self) -> bool;
}

const EPS: f64 = 1e-9;

impl Scalar for f64 {
    fn lp_zero() -> Self {
        0.0
    }
    fn lp_one() -> Self {
        1.0
    }
    fn is_pos(&self) -> bool {
        *self > EPS
    }
    fn is_neg(&self) -> bool {
        *self < -EPS
    }
    fn is_zero(&self) -> bool {
        self.abs() <= EPS
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn less(&self, o: &Self) -> bool {
        *self < *o - EPS
    }
}

impl Scalar for BigRational {
    fn lp_zero() -> Self {
        Zero::zero()
    }
    fn lp_one() -> Self {
        One::one()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn less(&self, o: &Self) -> bool {
        self < o
    }
}

thread_local! {
    static OVERFLOW: Cell<bool> = const { Cell::new(false) };
}

/// 128-bit rational whose operations record overflow instead of panicking.
#[derive(Clone, Debug)]
pub(crate) struct Small(Ratio<i128>);

impl Small {
    fn checked(r: Option<Ratio<i128>>) -> Self {
        Small(r.unwrap_or_else(|| {
            OVERFLOW.with(|f| f.set(true));
            Ratio::zero()
        }))
    }
}

impl Scalar for Small {
    fn lp_zero() -> Self {
        Small(Ratio::zero())
    }
    fn lp_one() -> Self {
        Small(Ratio::one())
    }
    fn is_pos(&self) -> bool {
        self.0.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.0.is_negative()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn sub(&self, o: &Self) -> Self {
        Small::checked(self.0.checked_sub(&o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        Small::checked(self.0.checked_mul(&o.0))
    }
    fn div(&self, o: &Self) -> Self {
        Small::checked(self.0.checked_div(&o.0))
    }
    fn less(&self, o: &Self) -> bool {
        self.0 < o.0
    }
}

pub(crate) struct PackingSolution<T> {
    pub value: T,
    pub u: Vec<T>,
    /// Fractional cover `y_s`, read off the slack reduced costs.
    #[allow(dead_code)]
    pub y: Vec<T>,
}

/// Dense tableau simplex for `max 1.u  s.t.  A u <= b, u >= 0` with `b >= 0`.
/// Dantzig pricing, switching to Bland's rule after a run of degenerate
/// pivots. `max_iter` stops early; the iterate is still primal feasible.
pub(crate) fn solve_packing<T: Scalar>(
    members: &[FixedBitSet],
    b: &[T],
    nvars: usize,
    max_iter: Option<usize>,
) -> PackingSolution<T> {
    let m = members.len();
    let cols = nvars + m + 1;
    let rhs = cols - 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for (i, set) in members.iter().enumerate() {
        let mut row = vec![T::lp_zero(); cols];
        for e in set.ones() {
            row[e] = T::lp_one();
        }
        row[nvars + i] = T::lp_one();
        row[rhs] = b[i].clone();
        tab.push(row);
    }
    let mut obj = vec![T::lp_zero(); cols];
    for c in obj.iter_mut().take(nvars) {
        *c = T::lp_zero().sub(&T::lp_one());
    }
    let mut basis: Vec<usize> = (nvars..nvars + m).collect();

    let mut degenerate_run = 0usize;
    let mut iter = 0usize;
    loop {
        if max_iter.is_some_and(|cap| iter >= cap) {
            break;
        }
        iter += 1;
        let bland = degenerate_run > 20;
        let mut enter: Option<usize> = None;
        for j in 0..rhs {
            if obj[j].is_neg() {
                match enter {
                    None => enter = Some(j),
                    Some(e) if !bland && obj[j].less(&obj[e]) => enter = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
        }
        let Some(col) = enter else { break };

        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[col].is_pos() {
                continue;
            }
            let ratio = row[rhs].div(&row[col]);
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio.less(lr) || (!lr.less(&ratio) && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // unbounded cannot happen: every element lies in some set
        let Some((prow, ratio)) = leave else { break };
        if ratio.is_zero() {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        pivot(&mut tab, &mut obj, prow, col);
        basis[prow] = col;
    }

    let mut u = vec![T::lp_zero(); nvars];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nvars {
            u[bv] = tab[i][rhs].clone();
        }
    }
    let y = (0..m).map(|i| obj[nvars + i].clone()).collect();
    PackingSolution {
        value: obj[rhs].clone(),
        u,
        y,
    }
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], obj: &mut [T], prow: usize, col: usize) {
    let p = tab[prow][col].clone();
    for x in tab[prow].iter_mut() {
        if !x.is_zero() {
            *x = x.div(&p);
        }
    }
    let pivot_row = tab[prow].clone();
    let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    let eliminate = |row: &mut [T]| {
        let f = row[col].clone();
        if f.is_zero() {
            return;
        }
        for &j in &nz {
            row[j] = row[j].sub(&f.mul(&pivot_row[j]));
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != prow {
            eliminate(row);
        }
    }
    eliminate(obj);
}
