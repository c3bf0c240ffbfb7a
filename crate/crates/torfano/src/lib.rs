//! Exact Chow-ring computations on smooth toric Fano 4-folds and a constraint
//! search for the classes of abelian surfaces meeting every invariant divisor.

pub mod chow;
pub mod cli;
pub mod error;
pub mod families;
pub mod fan;
pub mod linalg;
pub mod poly;
pub mod screen;
pub mod search;

pub use error::{Error, Result};
