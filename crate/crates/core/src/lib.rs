//! Exact special values at `s = 0` of ray class partial zeta functions of
//! real quadratic fields, computed through the Shintani–Zagier cone
//! decomposition, and their quasi-polynomial behaviour in families.

pub mod contfrac;
pub mod error;
pub mod exactmath;
pub mod family;
pub mod hecke;
pub mod quadfield;
pub mod shintani;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use exactmath::Rational;
