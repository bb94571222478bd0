//! Determinants, principal minors and the Cauchy–Binet expansion.

use itertools::Itertools;

use super::matrix::MatrixPolynomial;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Fraction-free (Bareiss) determinant; every intermediate stays a
/// polynomial because each division is exact.
pub fn determinant(a: &MatrixPolynomial) -> Result<Polynomial> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let nv = a.nvars();
    let mut m = a.to_rows();
    let mut negate = false;
    let mut prev = Polynomial::one(nv);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    negate = !negate;
                }
                None => return Ok(Polynomial::zero(nv)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Polynomial::zero(nv);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Determinant of the submatrix on the (0-based) index set `s`.
pub fn principal_minor(a: &MatrixPolynomial, s: &[usize]) -> Result<Polynomial> {
    if !a.is_square() {
        return Err(Error::Dimension(
            "principal minor of a non-square matrix".into(),
        ));
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    if s.iter().any(|&i| i >= a.rows()) || s.iter().duplicates().next().is_some() {
        return Err(Error::InvalidArgument(format!("bad index set {s:?}")));
    }
    determinant(&a.submatrix(s, s))
}

/// All `2^m − 1` principal minors, keyed by their index sets.
pub fn principal_minors(a: &MatrixPolynomial) -> Result<Vec<(Vec<usize>, Polynomial)>> {
    let m = a.rows();
    let mut out = Vec::new();
    for k in 1..=m {
        for s in (0..m).combinations(k) {
            let d = principal_minor(a, &s)?;
            out.push((s, d));
        }
    }
    Ok(out)
}

/// For `A` of size `s×m` with `s ≥ m`: returns `det(AᵀA)` and the maximal
/// minors `det(A_S)` over all `m`-subsets `S` of rows (lex order).
pub fn cauchy_binet_expand(a: &MatrixPolynomial) -> Result<(Polynomial, Vec<Polynomial>)> {
    let (s, m) = (a.rows(), a.cols());
    if s < m {
        return Err(Error::Dimension(format!(
            "Cauchy-Binet needs at least as many rows as columns, got {s}x{m}"
        )));
    }
    let cols: Vec<usize> = (0..m).collect();
    let minors = (0..s)
        .combinations(m)
        .map(|rows| determinant(&a.submatrix(&rows, &cols)))
        .collect::<Result<Vec<_>>>()?;
    let full = determinant(&a.gram())?;
    Ok((full, minors))
}

/// `Σ p_k²`.
pub fn sum_of_squares(ps: &[Polynomial], nvars: usize) -> Polynomial {
    ps.iter()
        .fold(Polynomial::zero(nvars), |acc, p| acc + p * p)
}
