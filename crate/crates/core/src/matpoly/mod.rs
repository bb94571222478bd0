//! Matrix polynomials: arithmetic, biforms, determinants and minors,
//! Smith normal form, and the matrix text format.

mod biform;
mod format;
mod matrix;
mod minors;
mod qmatrix;
mod smith;

pub use biform::{biform_polynomial, to_biform, Biform};
pub use format::{NamedMatrix, NamedPolynomial};
pub use matrix::MatrixPolynomial;
pub use minors::{
    cauchy_binet_expand, determinant, principal_minor, principal_minors, sum_of_squares,
};
pub use qmatrix::QMatrix;
pub(crate) use smith::block_starts;
pub use smith::{block_sequence, smith_normal_form, SmithDecomposition};
