use std::time::{Duration, Instant};

/// Resource caps shared by the expensive operations.
///
/// Node and count caps are deterministic. The optional wall-clock limit is
/// not: results that hit it depend on machine speed.
#[derive(Clone, Debug)]
pub struct Budget {
    /// Abort prime enumeration past this many primes.
    pub max_primes: usize,
    /// Branch-and-bound node cap for exact set cover.
    pub max_cover_nodes: u64,
    /// LP instances (after reduction) with at most this many nonzeros are
    /// solved in exact rational arithmetic.
    pub lp_exact_nonzeros: usize,
    /// Largest `k` for which row-partition enumeration is attempted.
    pub partition_max_k: usize,
    /// Largest zero matrix `layer_function` will build.
    pub max_rows: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_primes: 10_000_000,
            max_cover_nodes: 2_000_000,
            lp_exact_nonzeros: 2000,
            partition_max_k: 12,
            max_rows: 1 << 20,
            time_limit: None,
        }
    }
}

impl Budget {
    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub(crate) fn deadline(&self) -> Deadline {
        Deadline(self.time_limit.map(|d| Instant::now() + d))
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}
