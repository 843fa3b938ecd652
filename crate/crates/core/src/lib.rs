pub mod bounds;
pub mod cli;
pub mod budget;
pub mod cover;
pub mod cube;
pub mod dnf;
pub mod ensemble;
pub mod error;
pub mod implicant;
pub mod io;

pub use budget::Budget;
pub use error::{Error, Result};
