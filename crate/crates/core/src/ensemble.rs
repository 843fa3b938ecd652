//! Random functions with a fixed number of zeros, and the experiments run
//! over them.
//!
//! Every sample gets its own seed derived from the master seed and its index,
//! so results do not depend on how samples are spread over threads.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{layer_bound, layer_function, length_lower_bound, near_zero_bound_from, NearZeroMode};
use crate::budget::Budget;
use crate::cover::{build_cover_instance, exact_min_cover_with, greedy_cover, lp_lower_bound_with, CoverMode};
use crate::cube::{check_dim, has_adjacent_zeros, Point, ZeroMatrix};
use crate::error::{Error, Result};
use crate::implicant::{enumerate_primes_with, rank_histogram, PrimeSet};

/// Rejections allowed while looking for a function without adjacent zeros.
pub const MAX_REJECTIONS: usize = 10_000;

/// Exact covers are attempted when `n` is at most this...
pub const EXACT_MAX_N: usize = 10;
/// ...or when primes times one-points stays under this.
pub const EXACT_MAX_WORK: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub filter_no_adjacent_zeros: bool,
    pub budget: Budget,
}

impl EnsembleConfig {
    pub fn new(n: usize, k: usize, samples: usize, master_seed: u64) -> Self {
        EnsembleConfig {
            n,
            k,
            samples,
            master_seed,
            filter_no_adjacent_zeros: false,
            budget: Budget::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        check_k(self.n, self.k)
    }

    pub fn sample_seed(&self, index: usize) -> u64 {
        sample_seed(self.master_seed, index)
    }

    /// The function drawn for sample `index`.
    pub fn sample(&self, index: usize) -> Result<ZeroMatrix> {
        let seed = self.sample_seed(index);
        if !self.filter_no_adjacent_zeros {
            return sample_function(self.n, self.k, seed);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..=MAX_REJECTIONS {
            let m = draw(self.n, self.k, &mut rng)?;
            if !has_adjacent_zeros(&m) {
                return Ok(m);
            }
        }
        Err(Error::BudgetExceeded {
            what: "rejection sampling",
            partial: MAX_REJECTIONS as u64,
        })
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n < 64 && k as u64 > 1u64 << n {
        return Err(Error::invalid(format!("k = {k} exceeds 2^{n}")));
    }
    Ok(())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index as u64)
}

/// `k` distinct zeros drawn uniformly from the `2^n` vertices.
pub fn sample_function(n: usize, k: usize, seed: u64) -> Result<ZeroMatrix> {
    check_dim(n)?;
    check_k(n, k)?;
    draw(n, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn draw<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<ZeroMatrix> {
    let rows: Vec<u64> = if n < 64 {
        index::sample(rng, 1usize << n, k).into_iter().map(|i| i as u64).collect()
    } else {
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < k {
            seen.insert(rng.random::<u64>());
        }
        seen.into_iter().collect()
    };
    ZeroMatrix::from_bits(n, rows)
}

/// Prime rank histogram of one sample; `None` when enumeration ran out of
/// budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankSample {
    pub sample_index: usize,
    pub seed: u64,
    pub histogram: Option<BTreeMap<usize, usize>>,
}

pub fn rank_profile(cfg: &EnsembleConfig) -> Result<Vec<RankSample>> {
    cfg.validate()?;
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let m = cfg.sample(i)?;
            let histogram = match enumerate_primes_with(&m, &cfg.budget) {
                Ok(p) => Some(rank_histogram(&p)),
                Err(e) if e.is_budget() => None,
                Err(e) => return Err(e),
            };
            Ok(RankSample {
                sample_index: i,
                seed: cfg.sample_seed(i),
                histogram,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankProbEstimate {
    pub d: usize,
    pub hits: usize,
    pub used: usize,
    pub skipped: usize,
    pub fraction: f64,
    /// Wilson 95% interval.
    pub lo: f64,
    pub hi: f64,
}

impl RankProbEstimate {
    /// `sqrt(p(1-p)/s)` at the observed fraction.
    pub fn standard_error(&self) -> f64 {
        if self.used == 0 {
            return 0.0;
        }
        (self.fraction * (1.0 - self.fraction) / self.used as f64).sqrt()
    }
}

const Z95: f64 = 1.959_963_984_540_054;

pub fn wilson_interval(hits: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let s = trials as f64;
    let p = hits as f64 / s;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / s;
    let centre = (p + z2 / (2.0 * s)) / denom;
    let half = Z95 * (p * (1.0 - p) / s + z2 / (4.0 * s * s)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Share of profiled samples having a prime of rank exactly `d`.
pub fn prime_rank_frequency(profile: &[RankSample], d: usize) -> RankProbEstimate {
    let used: Vec<_> = profile.iter().filter_map(|s| s.histogram.as_ref()).collect();
    let hits = used.iter().filter(|h| h.get(&d).is_some_and(|&c| c > 0)).count();
    let (lo, hi) = wilson_interval(hits, used.len());
    RankProbEstimate {
        d,
        hits,
        used: used.len(),
        skipped: profile.len() - used.len(),
        fraction: if used.is_empty() {
            0.0
        } else {
            hits as f64 / used.len() as f64
        },
        lo,
        hi,
    }
}

pub fn estimate_prime_rank_prob(cfg: &EnsembleConfig, d: usize) -> Result<RankProbEstimate> {
    Ok(prime_rank_frequency(&rank_profile(cfg)?, d))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub primes_ms: f64,
    pub bounds_ms: f64,
    pub greedy_ms: f64,
    pub exact_ms: f64,
}

/// One function's worth of lengths and bounds. Missing values were not
/// computed (threshold) or ran out of budget (`failure` says which).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub sample_index: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub prime_count: Option<usize>,
    pub greedy_length: Option<u64>,
    pub lp_bound: Option<f64>,
    pub near_zero_bound: Option<u64>,
    pub exact_length: Option<u64>,
    pub exact_rank: Option<u64>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub failure: Option<String>,
    pub timings: Timings,
}

impl SampleRecord {
    fn empty(sample_index: usize, seed: u64, m: &ZeroMatrix) -> Self {
        SampleRecord {
            sample_index,
            seed,
            n: m.n(),
            k: m.k(),
            prime_count: None,
            greedy_length: None,
            lp_bound: None,
            near_zero_bound: None,
            exact_length: None,
            exact_rank: None,
            rank_histogram: BTreeMap::new(),
            failure: None,
            timings: Timings::default(),
        }
    }

    /// `lp <= exact <= greedy` and `near_zero <= exact` where present.
    pub fn sandwich_holds(&self) -> bool {
        let Some(e) = self.exact_length else {
            return match (self.lp_bound, self.near_zero_bound, self.greedy_length) {
                (Some(lp), Some(nz), Some(g)) => lp <= g as f64 && nz <= g,
                _ => true,
            };
        };
        self.lp_bound.is_none_or(|lp| lp <= e as f64)
            && self.near_zero_bound.is_none_or(|nz| nz <= e)
            && self.greedy_length.is_none_or(|g| e <= g)
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn to_u64(r: &num_rational::BigRational) -> u64 {
    r.to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Runs the whole pipeline on one function. Budget failures end up in the
/// record, other errors are returned.
pub fn analyze_sample(m: &ZeroMatrix, sample_index: usize, seed: u64, budget: &Budget) -> Result<SampleRecord> {
    let mut rec = SampleRecord::empty(sample_index, seed, m);
    match fill_record(m, budget, &mut rec) {
        Err(e) if e.is_budget() => {
            rec.failure = Some(e.to_string());
            Ok(rec)
        }
        Err(e) => Err(e),
        Ok(()) => Ok(rec),
    }
}

fn fill_record(m: &ZeroMatrix, budget: &Budget, rec: &mut SampleRecord) -> Result<()> {
    let t = Instant::now();
    let primes = enumerate_primes_with(m, budget)?;
    rec.timings.primes_ms = ms(t);
    rec.prime_count = Some(primes.len());
    rec.rank_histogram = rank_histogram(&primes);
    if m.k() == 0 {
        rec.greedy_length = Some(1);
        rec.lp_bound = Some(1.0);
        rec.near_zero_bound = Some(0);
        rec.exact_length = Some(1);
        rec.exact_rank = Some(0);
        return Ok(());
    }
    let ones = m.ones_count().filter(|&c| c <= budget.max_rows as u64).ok_or(Error::BudgetExceeded {
        what: "one-point",
        partial: 0,
    })?;
    let target: Vec<Point> = m.one_points().collect();
    let inst = build_cover_instance(m, &primes, &target, CoverMode::Length)?;

    let t = Instant::now();
    rec.greedy_length = Some(to_u64(&greedy_cover(&inst)?.objective));
    rec.timings.greedy_ms = ms(t);

    let t = Instant::now();
    let lp = lp_lower_bound_with(&inst, budget)?.value;
    rec.lp_bound = Some(lp.to_f64().unwrap_or(f64::NAN));
    rec.near_zero_bound = Some(near_zero_bound_from(m, &primes, NearZeroMode::ExactCover, budget)?.value);
    rec.timings.bounds_ms = ms(t);

    if !exact_feasible(m.n(), &primes, ones) {
        return Ok(());
    }
    let t = Instant::now();
    rec.exact_length = Some(to_u64(&exact_min_cover_with(&inst, budget)?.objective));
    let rank_inst = build_cover_instance(m, &primes, &target, CoverMode::Rank)?;
    rec.exact_rank = Some(to_u64(&exact_min_cover_with(&rank_inst, budget)?.objective));
    rec.timings.exact_ms = ms(t);
    Ok(())
}

fn exact_feasible(n: usize, primes: &PrimeSet, ones: u64) -> bool {
    n <= EXACT_MAX_N || (primes.len() as u64).saturating_mul(ones) <= EXACT_MAX_WORK
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthRun {
    pub records: Vec<SampleRecord>,
    /// `nk / ln(nk)`, absent when `nk < 3`.
    pub nk_over_ln_nk: Option<f64>,
    /// `nk / log2(n)`, absent when `n < 2`.
    pub nk_over_log2_n: Option<f64>,
}

pub fn run_length_experiment(cfg: &EnsembleConfig) -> Result<LengthRun> {
    cfg.validate()?;
    let records = (0..cfg.samples)
        .into_par_iter()
        .map(|i| analyze_sample(&cfg.sample(i)?, i, cfg.sample_seed(i), &cfg.budget))
        .collect::<Result<Vec<_>>>()?;
    let (n, k) = (cfg.n as u64, cfg.k as u64);
    Ok(LengthRun {
        records,
        nk_over_ln_nk: length_lower_bound(n, k).ok(),
        nk_over_log2_n: (n >= 2).then(|| (n * k) as f64 / (n as f64).log2()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Concentration {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `count - 1`); 0 for one value.
    pub stddev: f64,
    pub cv: f64,
    pub min: u64,
    pub max: u64,
}

pub fn concentration_stats(lengths: &[u64]) -> Result<Concentration> {
    let (&min, &max) = match (lengths.iter().min(), lengths.iter().max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("no lengths to summarize")),
    };
    let count = lengths.len();
    let mean = lengths.iter().map(|&x| x as f64).sum::<f64>() / count as f64;
    let stddev = if count < 2 {
        0.0
    } else {
        let ss: f64 = lengths.iter().map(|&x| (x as f64 - mean).powi(2)).sum();
        (ss / (count - 1) as f64).sqrt()
    };
    Ok(Concentration {
        count,
        mean,
        stddev,
        cv: if stddev == 0.0 { 0.0 } else { stddev / mean },
        min,
        max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerRecord {
    pub w: usize,
    /// `nk ln n / ln k` at `k = C(n, w)`; absent when `n < 2` or `k < 2`.
    pub layer_bound: Option<f64>,
    pub record: SampleRecord,
}

pub fn run_layer_experiment(n: usize, w: usize, budget: &Budget) -> Result<LayerRecord> {
    let m = layer_function(n, w, budget)?;
    let record = analyze_sample(&m, 0, 0, budget)?;
    Ok(LayerRecord {
        w,
        layer_bound: layer_bound(n as u64, m.k() as u64).ok(),
        record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::implicant::enumerate_primes;

    #[test]
    fn sampling_examples() {
        let m = sample_function(3, 8, 99).unwrap();
        assert_eq!(m.k(), 8);
        assert_eq!(sample_function(5, 7, 3).unwrap(), sample_function(5, 7, 3).unwrap());
        assert_ne!(sample_function(8, 7, 3).unwrap(), sample_function(8, 7, 4).unwrap());
        assert!(sample_function(3, 9, 0).is_err());
        assert_eq!(sample_function(40, 5, 1).unwrap().k(), 5);
        assert_eq!(sample_function(64, 3, 1).unwrap().k(), 3);
    }

    #[test]
    fn rows_come_out_sorted() {
        let m = sample_function(6, 20, 11).unwrap();
        let rows: Vec<Point> = m.rows().collect();
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn filtered_samples_have_no_adjacent_zeros() {
        let mut cfg = EnsembleConfig::new(6, 6, 30, 5);
        cfg.filter_no_adjacent_zeros = true;
        for i in 0..cfg.samples {
            assert!(!has_adjacent_zeros(&cfg.sample(i).unwrap()));
        }
        // Every 2-point set of the 1-cube is adjacent.
        let mut cfg = EnsembleConfig::new(1, 2, 1, 0);
        cfg.filter_no_adjacent_zeros = true;
        assert!(cfg.sample(0).unwrap_err().is_budget());
    }

    #[test]
    fn seeds_differ_per_index_and_master() {
        let a: Vec<u64> = (0..100).map(|i| sample_seed(7, i)).collect();
        let mut s = a.clone();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 100);
        assert_ne!(sample_seed(7, 0), sample_seed(8, 0));
    }

    #[test]
    fn rank_prob_examples() {
        let cfg = EnsembleConfig::new(3, 1, 10, 1);
        let one = estimate_prime_rank_prob(&cfg, 1).unwrap();
        assert_eq!((one.fraction, one.hits, one.used, one.skipped), (1.0, 10, 10, 0));
        assert!(one.lo > 0.6 && one.hi == 1.0);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert_eq!(estimate_prime_rank_prob(&cfg, 3).unwrap().fraction, 0.0);
    }

    #[test]
    fn wilson_interval_shrinks_like_inverse_root() {
        let w = |s: usize| {
            let (lo, hi) = wilson_interval(s / 2, s);
            hi - lo
        };
        let r = w(100) / w(10_000);
        assert!((r - 10.0).abs() < 0.2, "{r}");
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.2366).abs() < 1e-3 && (hi - 0.7634).abs() < 1e-3);
    }

    #[test]
    fn skipped_samples_are_tallied() {
        let mut cfg = EnsembleConfig::new(6, 10, 8, 2);
        cfg.budget.max_primes = 1;
        let e = estimate_prime_rank_prob(&cfg, 2).unwrap();
        assert_eq!((e.used, e.skipped), (0, 8));
    }

    #[test]
    fn single_zero_run() {
        let run = run_length_experiment(&EnsembleConfig::new(3, 1, 5, 0)).unwrap();
        for r in &run.records {
            assert_eq!(r.exact_length, Some(3));
            assert_eq!(r.greedy_length, Some(3));
            assert_eq!(r.lp_bound, Some(3.0));
            assert_eq!(r.exact_rank, Some(3));
            assert_eq!(r.near_zero_bound, Some(3));
            assert_eq!(r.prime_count, Some(3));
        }
        assert!((run.nk_over_ln_nk.unwrap() - 3.0 / 3f64.ln()).abs() < 1e-12);
        assert!(run_length_experiment(&EnsembleConfig::new(3, 1, 0, 0)).is_err());
    }

    #[test]
    fn sandwich_at_n8_k4() {
        let run = run_length_experiment(&EnsembleConfig::new(8, 4, 20, 3)).unwrap();
        for r in &run.records {
            assert!(r.exact_length.is_some() && r.failure.is_none());
            assert!(r.sandwich_holds(), "{r:?}");
        }
    }

    #[test]
    fn records_do_not_depend_on_thread_count() {
        let cfg = EnsembleConfig::new(7, 5, 12, 42);
        let strip = |run: LengthRun| -> Vec<SampleRecord> {
            run.records
                .into_iter()
                .map(|mut r| {
                    r.timings = Timings::default();
                    r
                })
                .collect()
        };
        let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
        let a = pool(1).install(|| strip(run_length_experiment(&cfg).unwrap()));
        let b = pool(4).install(|| strip(run_length_experiment(&cfg).unwrap()));
        assert_eq!(a, b);
    }

    #[test]
    fn record_budget_failures() {
        let m = sample_function(6, 10, 1).unwrap();
        let budget = Budget {
            max_cover_nodes: 0,
            ..Budget::default()
        };
        let r = analyze_sample(&m, 0, 1, &budget).unwrap();
        if r.failure.is_some() {
            assert!(r.exact_length.is_none());
        }
        let budget = Budget {
            max_primes: 1,
            ..Budget::default()
        };
        let r = analyze_sample(&m, 0, 1, &budget).unwrap();
        assert!(r.failure.is_some() && r.prime_count.is_none());
    }

    #[test]
    fn concentration_examples() {
        let c = concentration_stats(&[3, 3, 3]).unwrap();
        assert_eq!((c.mean, c.cv), (3.0, 0.0));
        let c = concentration_stats(&[2, 4]).unwrap();
        assert_eq!(c.mean, 3.0);
        assert!((c.stddev - 2f64.sqrt()).abs() < 1e-12);
        assert!((c.cv - 0.4714).abs() < 1e-4);
        assert_eq!((c.min, c.max), (2, 4));
        let c = concentration_stats(&[5]).unwrap();
        assert_eq!((c.stddev, c.cv), (0.0, 0.0));
        assert!(concentration_stats(&[]).is_err());
    }

    #[test]
    fn layer_examples() {
        let r = run_layer_experiment(3, 0, &Budget::default()).unwrap();
        assert_eq!(r.record.exact_length, Some(3));
        assert_eq!(r.layer_bound, None);
        let r = run_layer_experiment(4, 2, &Budget::default()).unwrap();
        assert_eq!(r.record.k, 6);
        assert!(r.record.sandwich_holds());
        assert_eq!(r.record.exact_length, Some(brute_force_length(&layer_function(4, 2, &Budget::default()).unwrap())));
        assert!(run_layer_experiment(3, 4, &Budget::default()).is_err());
    }

    /// Smallest irredundant cover of the ones by any implicants at all.
    fn brute_force_length(m: &ZeroMatrix) -> u64 {
        let n = m.n();
        let ones: Vec<u64> = m.one_points().map(|p| p.bits()).collect();
        // All implicants, as point masks over the 2^n cube.
        let mut masks: Vec<u64> = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let (mut c, mut mask) = (code, 0u64);
            let cube: Vec<usize> = (0..n)
                .map(|_| {
                    let d = c % 3;
                    c /= 3;
                    d
                })
                .collect();
            for x in 0..1u64 << n {
                if (0..n).all(|j| cube[j] == 2 || (x >> j & 1) as usize == cube[j]) {
                    mask |= 1 << x;
                }
            }
            if m.rows().all(|r| mask >> r.bits() & 1 == 0) {
                masks.push(mask);
            }
        }
        let goal: u64 = ones.iter().map(|&x| 1u64 << x).fold(0, |a, b| a | b);
        // Breadth-first over cover sizes.
        let mut frontier = vec![0u64];
        for size in 1.. {
            let mut next = std::collections::BTreeSet::new();
            for &f in &frontier {
                for &c in &masks {
                    let g = f | c;
                    if g == goal {
                        return size;
                    }
                    next.insert(g);
                }
            }
            frontier = next.into_iter().collect();
        }
        unreachable!()
    }

    #[test]
    fn histogram_matches_primes() {
        let m = sample_function(6, 5, 8).unwrap();
        let r = analyze_sample(&m, 0, 8, &Budget::default()).unwrap();
        assert_eq!(r.rank_histogram, rank_histogram(&enumerate_primes(&m).unwrap()));
    }
}
