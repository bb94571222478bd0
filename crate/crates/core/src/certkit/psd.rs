//! Exact positive-semidefiniteness tests.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matpoly::{principal_minors, MatrixPolynomial, QMatrix};
use crate::poly::univariate::is_psd_on_reals;
use crate::poly::{Rational, UniPoly};

/// Exact psd decision for a symmetric rational matrix: all coefficients of
/// `det(λI − Q)` alternate in sign.
pub fn psd_constant(q: &QMatrix) -> Result<bool> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let c = q.char_poly();
    let n = q.rows();
    Ok(c.iter().enumerate().all(|(k, ck)| {
        let v = if (n - k) % 2 == 0 {
            ck.clone()
        } else {
            -ck.clone()
        };
        !v.is_negative()
    }))
}

/// Strict version: psd and nonsingular.
pub fn pd_constant(q: &QMatrix) -> Result<bool> {
    Ok(psd_constant(q)? && !q.det().is_zero())
}

/// Symmetric elimination `Q = Σ d_k ℓ_kᵀ ℓ_k` with rational `d_k ≥ 0`, or a
/// vector `v` with `vᵀQv < 0`.
pub fn ldl_or_witness(
    q: &QMatrix,
) -> Result<std::result::Result<Vec<(Rational, Vec<Rational>)>, Vec<Rational>>> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = q.rows();
    let mut s = q.clone();
    // invariant: s = Tᵀ q T
    let mut t = QMatrix::identity(n);
    for k in 0..n {
        let skk = s.get(k, k).clone();
        if skk.is_negative() {
            return Ok(Err(column(&t, k)));
        }
        if skk.is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !s.get(k, j).is_zero()) {
                // v = a·e_k + e_j gives vᵀsv = 2a·s_kj + s_jj = −1
                let a = (-Rational::one() - s.get(j, j))
                    / (s.get(k, j) * Rational::from_integer(2.into()));
                let v: Vec<Rational> = (0..n).map(|r| t.get(r, k) * &a + t.get(r, j)).collect();
                return Ok(Err(v));
            }
            continue;
        }
        for j in k + 1..n {
            let c = s.get(k, j) / &skk;
            if c.is_zero() {
                continue;
            }
            for r in 0..n {
                let v = s.get(r, j) - &c * s.get(r, k);
                s.set(r, j, v);
            }
            for r in 0..n {
                let v = s.get(j, r) - &c * s.get(k, r);
                s.set(j, r, v);
            }
            for r in 0..n {
                let v = t.get(r, j) - &c * t.get(r, k);
                t.set(r, j, v);
            }
        }
    }
    // q = T⁻ᵀ diag(s) T⁻¹; the rows of T⁻¹ are the ℓ_k
    let l = t.inverse().expect("unit triangular");
    Ok(Ok((0..n)
        .filter(|&k| !s.get(k, k).is_zero())
        .map(|k| (s.get(k, k).clone(), l.row(k).to_vec()))
        .collect()))
}

fn column(t: &QMatrix, k: usize) -> Vec<Rational> {
    (0..t.rows()).map(|r| t.get(r, k).clone()).collect()
}

/// A vector `v` with `vᵀQv < 0` when `Q` is not psd.
pub fn psd_witness(q: &QMatrix) -> Result<Option<Vec<Rational>>> {
    Ok(ldl_or_witness(q)?.err())
}

/// Exact: `p(t) ≥ 0` on all of ℝ.
pub fn psd_univariate_scalar(p: &UniPoly) -> bool {
    is_psd_on_reals(p)
}

/// Size limit for [`psd_univariate_matrix`].
pub const UNIVARIATE_MATRIX_LIMIT: usize = 4;

/// Exact: `A(t)` psd for every real `t`, via all principal minors.
/// `var` names the single variable the entries may depend on.
pub fn psd_univariate_matrix(a: &MatrixPolynomial, var: usize) -> Result<bool> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if a.rows() > UNIVARIATE_MATRIX_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "matrix of size {} exceeds the limit {UNIVARIATE_MATRIX_LIMIT}",
            a.rows()
        )));
    }
    for (_, minor) in principal_minors(a)? {
        let u = UniPoly::from_polynomial(&minor, var)?;
        if !is_psd_on_reals(&u) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The only variable `a` depends on, if any (defaults to 0 for constants).
pub fn single_variable(a: &MatrixPolynomial) -> Option<usize> {
    let mut found: Option<usize> = None;
    for p in a.entries() {
        for (m, _) in p.terms() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    match found {
                        None => found = Some(i),
                        Some(j) if j != i => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    Some(found.unwrap_or(0))
}

/// Brute force: all principal minors of a constant matrix are ≥ 0.
pub fn psd_by_minors(q: &QMatrix) -> bool {
    use itertools::Itertools;
    let n = q.rows();
    (1..=n).all(|k| {
        (0..n)
            .combinations(k)
            .all(|s| !q.submatrix(&s, &s).det().is_negative())
    })
}
