//! Piecewise semi-certificates of positivity for symmetric matrix
//! polynomials, with exact rational arithmetic throughout.

pub mod certkit;
pub mod construct;
pub mod detrepr;
pub mod domination;
pub mod error;
pub mod gallery;
pub mod matpoly;
pub mod poly;

pub use error::{Error, Result};
pub use poly::{Form, MultiIndex, Polynomial, Rational};
