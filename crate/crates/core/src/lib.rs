pub mod acceptance;
pub mod bits;
pub mod crossing;
pub mod error;
pub mod generators;
pub mod lp;
pub mod mcst;
pub mod numeric;
pub mod oracles;
pub mod report;
pub mod structures;

pub use error::{Error, Result};
pub use numeric::{q, Rational};
