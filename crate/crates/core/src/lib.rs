pub mod cli;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod invariants;
pub mod landau;
pub mod linalg;
pub mod poly;
pub mod ratfn;
pub mod rational;
pub mod reduction;
pub mod strata;

pub use error::{Error, Result};
