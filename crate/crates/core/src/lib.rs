//! Special-value polynomials of odd-weight self-dual L-functions.

pub mod error;
pub mod mp;
pub mod special;
pub mod gates;
pub mod lfunc;
pub mod specialpoly;
pub mod rv;
pub mod sympow;
pub mod zerotools;

pub use error::{Error, Result};
pub use mp::{Ball, Cplx, Precision};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
