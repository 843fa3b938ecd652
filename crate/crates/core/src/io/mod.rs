//! Text formats: zero matrices, DIMACS CNF, PLA, and CSV / JSON-lines
//! reports.

mod nelson;
mod pla;
pub mod report;
mod zero;

pub use nelson::{parse_nelson_cnf, NelsonCnf, DEFAULT_EXPANSION_CAP};
pub use pla::{emit_pla, parse_pla};
pub use zero::{emit_zero_matrix, parse_zero_matrix};
