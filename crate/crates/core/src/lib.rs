pub mod counting;
pub mod error;
pub mod family;
pub mod fit;
pub mod limits;
pub mod monomial;
pub mod multiplicity;
pub mod polytope;
pub mod rational;
pub mod region;

pub use error::{Error, Result};
