//! Lower and upper bounds on DNF complexity: near-zero points, analytic
//! formulas, and vector decompositions.

mod decompose;
mod formulas;
mod near_zero;

pub use decompose::{
    is_decomposable, is_ortho_decomposable, is_unity_decomposition, literal_occurrence_lower_bound,
    DecompositionKind, DecompositionWitness, Literal, LiteralBoundConfig, LiteralNotion, LiteralOccurrence,
};
pub use formulas::{
    almost_all_range, full_report, layer_bound, layer_function, length_lower_bound, prime_rank_prob_bound,
    rank_window, table_bounds, BoundEntry, BoundKind, BoundReport, BoundScope, Quantity, LAYER_BOUND_CAVEAT,
    LENGTH_BOUND_CAVEAT,
};
pub use near_zero::{
    check_dyakonov_lemma, near_zero_bound_from, near_zero_lower_bound, near_zero_points, theta_point, NearZeroBound,
    NearZeroMode, NearZeroSet,
};
