use serde::Serialize;

use crate::budget::Budget;
use crate::cube::{check_dim, ZeroMatrix};
use crate::error::{Error, Result};

/// Caveat attached to [`length_lower_bound`]: only the leading term is
/// computed, the lower-order correction is not.
pub const LENGTH_BOUND_CAVEAT: &str = "leading term only; lower-order correction factor omitted";

/// Caveat attached to [`layer_bound`].
pub const LAYER_BOUND_CAVEAT: &str = "asymptotic in n with log_n k = o(n); constant taken as 1";

fn ln_binomial(n: u64, d: u64) -> f64 {
    let d = d.min(n - d);
    (0..d).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Ranks outside `[lo, hi]` are unlikely to carry a prime implicant:
/// `lo = ln k + c1 (ln ln k + ln ln n)`, `hi = ln nk - c2 ln ln nk`.
pub fn rank_window(n: f64, k: f64, c1: f64, c2: f64) -> Result<(f64, f64)> {
    if !(n >= 2.0 && k >= 2.0) {
        return Err(Error::invalid(format!("rank window needs n, k >= 2 (got n={n}, k={k})")));
    }
    let (ln_n, ln_k) = (n.ln(), k.ln());
    let ln_nk = ln_n + ln_k;
    let lo = ln_k + c1 * (ln_k.ln() + ln_n.ln());
    let hi = ln_nk - c2 * ln_nk.ln();
    Ok((lo, hi))
}

/// Upper bound on the probability that a uniform function with `k` zeros
/// over `n` variables has a prime implicant of rank `d`:
/// `2^d C(n,d) min((1 - 2^-d)^k, (k / 2^(d-1))^d)`.
///
/// Values above 1 are returned unchanged.
pub fn prime_rank_prob_bound(n: u64, k: u64, d: u64) -> Result<f64> {
    if d < 1 || d > n {
        return Err(Error::invalid(format!("rank {d} outside 1..={n}")));
    }
    let df = d as f64;
    let base = df * std::f64::consts::LN_2 + ln_binomial(n, d);
    let miss = k as f64 * (-(-df).exp2()).ln_1p();
    let small = df * ((k as f64).ln() - (df - 1.0) * std::f64::consts::LN_2);
    Ok((base + miss.min(small)).exp())
}

/// `nk / ln nk`, the leading term of the length lower bound for almost all
/// functions with `k` zeros.
pub fn length_lower_bound(n: u64, k: u64) -> Result<f64> {
    let nk = (n as f64) * (k as f64);
    if nk < 3.0 {
        return Err(Error::invalid(format!("length bound needs nk >= 3 (got {nk})")));
    }
    Ok(nk / nk.ln())
}

/// All points of Hamming weight `w`, as a zero matrix.
pub fn layer_function(n: usize, w: usize, budget: &Budget) -> Result<ZeroMatrix> {
    check_dim(n)?;
    if w > n {
        return Err(Error::invalid(format!("layer weight {w} exceeds n = {n}")));
    }
    let count = ln_binomial(n as u64, w as u64).exp().round();
    if count > budget.max_rows as f64 {
        return Err(Error::BudgetExceeded {
            what: "layer rows",
            partial: 0,
        });
    }
    let mut rows = Vec::with_capacity(count as usize);
    if w == 0 {
        rows.push(0);
    } else {
        // Gosper's hack over n-bit words of weight w.
        let limit: u128 = 1 << n;
        let mut x: u128 = (1 << w) - 1;
        while x < limit {
            rows.push(x as u64);
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    ZeroMatrix::from_bits(n, rows)
}

/// `nk ln n / ln k`: order of the minimal DNF rank forced on some function
/// with `k` zeros.
pub fn layer_bound(n: u64, k: u64) -> Result<f64> {
    if n < 2 || k < 2 {
        return Err(Error::invalid(format!("bound needs n, k >= 2 (got n={n}, k={k})")));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(n * k * n.ln() / k.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundScope {
    AnyFunction,
    AlmostAll,
    Existential,
}

/// What an entry bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Number of conjunctions in a DNF.
    Length,
    /// Literal count of a DNF.
    Rank,
    /// Rank of a single prime implicant.
    PrimeRank,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: &'static str,
    pub value: f64,
    pub kind: BoundKind,
    pub scope: BoundScope,
    pub source: &'static str,
    pub quantity: Quantity,
    /// False when the row's side condition on `(n, k)` does not hold.
    pub applicable: bool,
    pub note: &'static str,
}

/// Known DNF length bounds evaluated at one `(n, k)`, hidden constants set
/// to 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub k: u64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Pairs `(lower, upper)` of applicable entries with the same scope and
    /// quantity where the lower value exceeds the upper one. Hidden constants
    /// make this a flag, not an error.
    pub fn crossings(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        for lo in self.entries.iter().filter(|e| e.kind == BoundKind::Lower && e.applicable) {
            for hi in self.entries.iter().filter(|e| e.kind == BoundKind::Upper && e.applicable) {
                if lo.scope == hi.scope
                    && lo.quantity == hi.quantity
                    && lo.value.is_finite() && hi.value.is_finite() && lo.value > hi.value {
                    out.push((lo.name, hi.name));
                }
            }
        }
        out
    }
}

/// Whether `k <= 2^(n/2)`.
pub fn almost_all_range(n: u64, k: u64) -> bool {
    (k as f64).log2() <= n as f64 / 2.0
}

pub fn table_bounds(n: u64, k: u64) -> Result<BoundReport> {
    if n < 2 || k < 1 {
        return Err(Error::invalid(format!("table needs n >= 2, k >= 1 (got n={n}, k={k})")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let nk = nf * kf;
    let in_range = almost_all_range(n, k);
    let entry = |name, value, kind, scope, source, applicable| BoundEntry {
        name,
        value,
        kind,
        scope,
        source,
        quantity: Quantity::Length,
        applicable,
        note: "",
    };
    let mut entries = vec![
        entry("nk", nk, BoundKind::Upper, BoundScope::AnyFunction, "constructive", true),
        entry(
            "nk/log2(n)",
            nk / nf.log2(),
            BoundKind::Upper,
            BoundScope::AlmostAll,
            "constructive",
            in_range,
        ),
        entry(
            "n",
            nf,
            BoundKind::Lower,
            BoundScope::Existential,
            "isolated zero",
            true,
        ),
        entry(
            "nk/(ln(n)*ln(nk))",
            nk / (nf.ln() * nk.ln()),
            BoundKind::Lower,
            BoundScope::AlmostAll,
            "lp relaxation",
            in_range,
        ),
        entry(
            "nk/(ln(n)+ln(k))",
            nk / (nf.ln() + kf.ln()),
            BoundKind::Lower,
            BoundScope::AlmostAll,
            "near-zero points",
            in_range,
        ),
    ];
    entries[2].note = "requires a zero with no adjacent zero";
    Ok(BoundReport { n, k, entries })
}

/// [`table_bounds`] plus the leading terms of the length and layer bounds
/// and the prime rank window, where defined.
pub fn full_report(n: u64, k: u64, c1: f64, c2: f64) -> Result<BoundReport> {
    let mut report = table_bounds(n, k)?;
    if let Ok(v) = length_lower_bound(n, k) {
        report.entries.push(BoundEntry {
            name: "nk/ln(nk)",
            value: v,
            kind: BoundKind::Lower,
            scope: BoundScope::AlmostAll,
            source: "near-zero points",
            quantity: Quantity::Length,
            applicable: almost_all_range(n, k),
            note: LENGTH_BOUND_CAVEAT,
        });
    }
    if let Ok(v) = layer_bound(n, k) {
        report.entries.push(BoundEntry {
            name: "nk*ln(n)/ln(k)",
            value: v,
            kind: BoundKind::Lower,
            scope: BoundScope::Existential,
            source: "weight layer",
            quantity: Quantity::Rank,
            applicable: true,
            note: LAYER_BOUND_CAVEAT,
        });
    }
    if let Ok((lo, hi)) = rank_window(n as f64, k as f64, c1, c2) {
        for (name, value) in [("rank-window-lo", lo), ("rank-window-hi", hi)] {
            report.entries.push(BoundEntry {
                name,
                value,
                kind: if name.ends_with("lo") { BoundKind::Lower } else { BoundKind::Upper },
                scope: BoundScope::AlmostAll,
                source: "prime rank window",
                quantity: Quantity::PrimeRank,
                applicable: true,
                note: "prime implicant ranks, not DNF length",
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn rank_window_examples() {
        let (lo, hi) = rank_window(1024.0, 16.0, 1.0, 1.0).unwrap();
        assert!((lo - 5.7286).abs() < 2e-4, "{lo}");
        assert!((lo - 5.728442).abs() < 1e-6, "{lo}");
        assert!((hi - 7.4315).abs() < 1e-4, "{hi}");
        let ee = E.powf(E);
        let (lo, hi) = rank_window(ee, ee, 0.0, 0.0).unwrap();
        assert!(close(lo, E, 1e-12) && close(hi, 2.0 * E, 1e-12));
        assert!(rank_window(16.0, 1.0, 1.0, 1.0).is_err());
        assert!(rank_window(1.0, 16.0, 1.0, 1.0).is_err());
        assert!(rank_window(f64::NAN, 16.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn prime_rank_examples() {
        assert!(close(prime_rank_prob_bound(3, 1, 1).unwrap(), 3.0, 1e-12));
        let expected = 4.0 * 45.0 * 0.75f64.powi(100);
        assert!(close(prime_rank_prob_bound(10, 100, 2).unwrap(), expected, 1e-9));
        assert!(close(prime_rank_prob_bound(10, 100, 2).unwrap(), 5.76e-11, 5e-3));
        for n in 3..=20u64 {
            let second = 2f64.powi(n as i32) * (0.5f64.powi(n as i32 - 1)).powi(n as i32);
            assert!(close(prime_rank_prob_bound(n, 1, n).unwrap(), second, 1e-9));
        }
        assert!(prime_rank_prob_bound(3, 1, 0).is_err());
        assert!(prime_rank_prob_bound(3, 1, 4).is_err());
    }

    #[test]
    fn prime_rank_survives_large_arguments() {
        let v = prime_rank_prob_bound(1000, 1 << 20, 500).unwrap();
        assert!(v.is_finite() || v == f64::INFINITY);
        assert!(prime_rank_prob_bound(1000, 1 << 20, 40).unwrap() < 1e-100);
    }

    #[test]
    fn length_bound_examples() {
        assert!((length_lower_bound(10, 10).unwrap() - 21.715).abs() < 1e-3);
        assert!((length_lower_bound(3, 1).unwrap() - 2.731).abs() < 1e-3);
        assert!(length_lower_bound(2, 1).is_err());
        // nk = e is not reachable with integer arguments; check the formula there
        assert!(close(E / E.ln(), E, 1e-15));
    }

    #[test]
    fn layer_examples() {
        let b = Budget::default();
        let m = layer_function(4, 2, &b).unwrap();
        let rows: Vec<String> = m.rows().map(|p| p.to_string()).collect();
        assert_eq!(rows, ["0011", "0101", "0110", "1001", "1010", "1100"]);
        assert_eq!(layer_function(3, 0, &b).unwrap().row(0).to_string(), "000");
        let top = layer_function(3, 3, &b).unwrap();
        assert_eq!((top.k(), top.row(0).to_string()), (1, "111".to_string()));
        assert!(layer_function(3, 4, &b).is_err());
        let small = Budget {
            max_rows: 5,
            ..Budget::default()
        };
        assert!(layer_function(4, 2, &small).unwrap_err().is_budget());
        assert_eq!(layer_function(64, 1, &b).unwrap().k(), 64);
    }

    #[test]
    fn layer_bound_examples() {
        assert!(close(layer_bound(16, 16).unwrap(), 256.0, 1e-12));
        assert!(close(layer_bound(100, 10).unwrap(), 2000.0, 1e-12));
        assert!(layer_bound(16, 1).is_err());
    }

    #[test]
    fn table_examples() {
        let r = table_bounds(16, 4).unwrap();
        assert_eq!(r.get("nk").unwrap().value, 64.0);
        assert_eq!(r.get("nk/log2(n)").unwrap().value, 16.0);
        assert_eq!(r.get("n").unwrap().value, 16.0);
        assert!(r.get("nk/log2(n)").unwrap().applicable);
        assert_eq!(r.entries.len(), 5);

        let r = table_bounds(4, 8).unwrap();
        for e in &r.entries {
            assert_eq!(e.applicable, e.scope != BoundScope::AlmostAll, "{}", e.name);
        }
        assert!(table_bounds(1, 4).is_err());
    }

    #[test]
    fn crossings_are_reported_not_raised() {
        // at tiny n the almost-all lower bound can exceed the upper one
        for n in 2..40 {
            for k in [1u64, 2, 3, 7, 100, 1 << 12] {
                let r = full_report(n, k, 1.0, 1.0).unwrap();
                for (lo, hi) in r.crossings() {
                    let (l, h) = (r.get(lo).unwrap(), r.get(hi).unwrap());
                    assert!(l.value > h.value && l.scope == h.scope && l.quantity == h.quantity);
                }
            }
        }
    }

    mod props {
        use super::*;
        use crate::cube::has_adjacent_zeros;
        use proptest::prelude::*;
        use statrs::function::factorial::binomial;

        proptest! {
            #[test]
            fn layer_has_binomial_rows_and_no_adjacent_zeros(n in 1usize..=14, w in 0usize..=14) {
                prop_assume!(w <= n);
                let m = layer_function(n, w, &Budget::default()).unwrap();
                prop_assert_eq!(m.k() as f64, binomial(n as u64, w as u64));
                prop_assert!(m.rows().all(|p| p.ones() == w));
                prop_assert!(!has_adjacent_zeros(&m));
            }

            #[test]
            fn prime_rank_matches_direct_product(n in 1u64..=30, k in 1u64..=200, d in 1u64..=30) {
                prop_assume!(d <= n);
                let c = binomial(n, d);
                let two_d = 2f64.powi(d as i32);
                let direct = (two_d * c * (1.0 - 1.0 / two_d).powi(k as i32))
                    .min(two_d * c * (k as f64 / 2f64.powi(d as i32 - 1)).powi(d as i32));
                let got = prime_rank_prob_bound(n, k, d).unwrap();
                prop_assert!(close(got, direct, 1e-9) || (direct < 1e-280 && got < 1e-270), "{} vs {}", got, direct);
            }

            #[test]
            fn window_is_monotone_in_constants(n in 2.0f64..1e6, k in 2.0f64..1e6, c in 0.0f64..3.0) {
                let (lo0, hi0) = rank_window(n, k, 0.0, 0.0).unwrap();
                let (lo, hi) = rank_window(n, k, c, c).unwrap();
                // ln ln k can be negative for k = 2, so only the upper side is monotone everywhere
                prop_assert!(hi <= hi0 + 1e-12);
                if k >= 16.0 && n >= 16.0 {
                    prop_assert!(lo >= lo0 - 1e-12);
                }
            }
        }
    }
}
