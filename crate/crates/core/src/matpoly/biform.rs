use super::matrix::MatrixPolynomial;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// A polynomial in `n + m` variables, homogeneous of degree `d1` in the
/// first `n` and of degree `d2` in the last `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biform {
    poly: Polynomial,
    n: usize,
    d1: u32,
    m: usize,
    d2: u32,
}

impl Biform {
    pub fn new(poly: Polynomial, n: usize, d1: u32, m: usize, d2: u32) -> Result<Self> {
        if poly.nvars() != n + m {
            return Err(Error::NvarsMismatch {
                expected: n + m,
                found: poly.nvars(),
            });
        }
        for (mono, _) in poly.terms() {
            if mono.partial_degree(0..n) != d1 || mono.partial_degree(n..n + m) != d2 {
                return Err(Error::InvalidArgument(format!(
                    "term {mono} does not have bidegree ({d1},{d2})"
                )));
            }
        }
        Ok(Biform { poly, n, d1, m, d2 })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// `(n, d1, m, d2)`.
    pub fn bitype(&self) -> (usize, u32, usize, u32) {
        (self.n, self.d1, self.m, self.d2)
    }
}

/// `Σ a_ij(x) y_i y_j` as a polynomial in `(x, y)`; no homogeneity needed.
pub fn biform_polynomial(a: &MatrixPolynomial) -> Result<Polynomial> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let (n, m) = (a.nvars(), a.rows());
    let x_to_xy: Vec<usize> = (0..n).collect();
    let mut f = Polynomial::zero(n + m);
    for i in 0..m {
        for j in 0..m {
            let e = a.get(i, j);
            if e.is_zero() {
                continue;
            }
            let yy = Polynomial::var(n + m, n + i) * Polynomial::var(n + m, n + j);
            f = f + e.remap_vars(&x_to_xy, n + m) * yy;
        }
    }
    Ok(f)
}

/// The biform `f_A(x, y) = yᵀ A(x) y` of a symmetric matrix whose entries
/// are forms of a common degree.
pub fn to_biform(a: &MatrixPolynomial) -> Result<Biform> {
    let f = biform_polynomial(a)?;
    let d = match a.homogeneous_degree() {
        Some(d) => d,
        None if a.is_zero() => 0,
        None => return Err(Error::NotHomogeneous(a.max_degree().max(0) as u32)),
    };
    Biform::new(f, a.nvars(), d, a.rows(), 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::int;

    #[test]
    fn identity_and_diagonal() {
        let b = to_biform(&MatrixPolynomial::identity(2, 1)).unwrap();
        assert_eq!(
            b.poly(),
            &Polynomial::parse("s^2+t^2", &["x", "s", "t"]).unwrap()
        );
        let d = MatrixPolynomial::parse_rows(&[&["x^2", "0"], &["0", "y^2"]], &["x", "y"]).unwrap();
        let b = to_biform(&d).unwrap();
        assert_eq!(b.bitype(), (2, 2, 2, 2));
        assert_eq!(
            b.poly(),
            &Polynomial::parse("x^2*s^2+y^2*t^2", &["x", "y", "s", "t"]).unwrap()
        );
    }

    #[test]
    fn rejects_bad_input() {
        let a = MatrixPolynomial::parse_rows(&[&["1", "x"], &["0", "1"]], &["x"]).unwrap();
        assert_eq!(to_biform(&a), Err(Error::NotSymmetric));
        let b = MatrixPolynomial::parse_rows(&[&["1+x^2"]], &["x"]).unwrap();
        assert!(to_biform(&b).is_err());
        // the plain polynomial form is still available
        let f = biform_polynomial(&b).unwrap();
        assert_eq!(f.evaluate(&[int(1), int(2)]).unwrap(), int(8));
    }
}
