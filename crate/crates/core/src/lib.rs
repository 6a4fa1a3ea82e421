pub mod acceptance;
pub mod arith;
pub mod cli;
pub mod config;
pub mod counting;
pub mod error;
pub mod fft;
pub mod fourier;
pub mod increment;
pub mod intersective;
pub mod numeric;
pub mod poly;
pub mod primes;

pub use error::{Error, Result};
pub use poly::IntPoly;
