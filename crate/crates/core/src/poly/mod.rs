//! Exact polynomial arithmetic over ℚ.

pub mod monomial;
mod parse;
pub mod polynomial;
pub mod rational;
pub mod univariate;

pub use monomial::{multi_indices_up_to, MultiIndex};
pub use parse::default_vars;
pub use polynomial::{Form, Polynomial};
pub use rational::Rational;
pub use univariate::{gcd as univariate_gcd, squarefree_part, UniPoly};
