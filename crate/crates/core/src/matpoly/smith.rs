//! Smith normal form over ℚ[t].

use num_traits::{One, Signed, Zero};

use super::matrix::MatrixPolynomial;
use super::minors::determinant;
use crate::error::{Error, Result};
use crate::poly::{Rational, UniPoly};

type UniMatrix = Vec<Vec<UniPoly>>;

/// `M = E · diag(d) · F` with `E`, `F` unimodular and monic `d_i` forming a
/// divisibility chain; zero diagonal entries come last. `f_inv` is `F⁻¹`,
/// tracked during the reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub e: MatrixPolynomial,
    pub d: Vec<UniPoly>,
    pub f: MatrixPolynomial,
    pub f_inv: MatrixPolynomial,
}

fn to_unimatrix(m: &MatrixPolynomial) -> Result<UniMatrix> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| UniPoly::from_polynomial(m.get(i, j), 0))
                .collect()
        })
        .collect()
}

fn from_unimatrix(a: &UniMatrix) -> MatrixPolynomial {
    MatrixPolynomial::from_rows(
        a.iter()
            .map(|r| r.iter().map(|p| p.to_polynomial(1, 0)).collect())
            .collect(),
    )
    .expect("nonempty square matrix")
}

fn identity(n: usize) -> UniMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        UniPoly::one()
                    } else {
                        UniPoly::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Running state with the invariant `M = E · A · F`, `F · f_inv = I`.
struct Reduction {
    a: UniMatrix,
    e: UniMatrix,
    f: UniMatrix,
    f_inv: UniMatrix,
    n: usize,
}

impl Reduction {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        for row in &mut self.e {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        self.f.swap(i, j);
        for row in &mut self.f_inv {
            row.swap(i, j);
        }
    }

    /// `row_i += q · row_j`.
    fn add_row(&mut self, i: usize, j: usize, q: &UniPoly) {
        for c in 0..self.n {
            let v = self.a[j][c].mul(q);
            self.a[i][c] = self.a[i][c].add(&v);
        }
        // E ← E·G⁻¹: col_j(E) −= q·col_i(E)
        for r in 0..self.n {
            let v = self.e[r][i].mul(q);
            self.e[r][j] = self.e[r][j].sub(&v);
        }
    }

    /// `col_j += q · col_i`.
    fn add_col(&mut self, j: usize, i: usize, q: &UniPoly) {
        for r in 0..self.n {
            let v = self.a[r][i].mul(q);
            self.a[r][j] = self.a[r][j].add(&v);
        }
        // F ← G⁻¹·F: row_i(F) −= q·row_j(F)
        for c in 0..self.n {
            let v = self.f[j][c].mul(q);
            self.f[i][c] = self.f[i][c].sub(&v);
        }
        // F⁻¹ ← F⁻¹·G: col_j(F⁻¹) += q·col_i(F⁻¹)
        for r in 0..self.n {
            let v = self.f_inv[r][i].mul(q);
            self.f_inv[r][j] = self.f_inv[r][j].add(&v);
        }
    }

    fn scale_row(&mut self, i: usize, c: &Rational) {
        let cinv = Rational::one() / c;
        for x in &mut self.a[i] {
            *x = x.scale(c);
        }
        for r in 0..self.n {
            self.e[r][i] = self.e[r][i].scale(&cinv);
        }
    }

    fn run(&mut self) {
        let n = self.n;
        for k in 0..n {
            loop {
                // nonzero entry of least degree in the trailing block
                let pivot = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !self.a[i][j].is_zero())
                    .min_by_key(|&(i, j)| self.a[i][j].degree());
                let Some((pi, pj)) = pivot else {
                    return;
                };
                if pi != k {
                    self.swap_rows(pi, k);
                }
                if pj != k {
                    self.swap_cols(pj, k);
                }
                let mut clean = true;
                for i in k + 1..n {
                    if self.a[i][k].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[i][k].div_rem(&self.a[k][k]);
                    self.add_row(i, k, &q.neg());
                    clean &= r.is_zero();
                }
                for j in k + 1..n {
                    if self.a[k][j].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[k][j].div_rem(&self.a[k][k]);
                    self.add_col(j, k, &q.neg());
                    clean &= r.is_zero();
                }
                if !clean {
                    continue;
                }
                let bad = (k + 1..n).find(|&i| {
                    (k + 1..n).any(|j| !self.a[i][j].div_rem(&self.a[k][k]).1.is_zero())
                });
                match bad {
                    Some(i) => self.add_row(k, i, &UniPoly::one()),
                    None => break,
                }
            }
            let lc = self.a[k][k].leading();
            if !lc.is_one() {
                self.scale_row(k, &(Rational::one() / lc));
            }
        }
    }
}

/// Smith normal form of a square matrix in one variable.
pub fn smith_normal_form(m: &MatrixPolynomial) -> Result<SmithDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension("Smith form of a non-square matrix".into()));
    }
    if m.nvars() != 1 {
        return Err(Error::InvalidArgument(format!(
            "Smith form needs one variable, matrix has {}",
            m.nvars()
        )));
    }
    let n = m.rows();
    let mut red = Reduction {
        a: to_unimatrix(m)?,
        e: identity(n),
        f: identity(n),
        f_inv: identity(n),
        n,
    };
    red.run();
    let d = (0..n).map(|i| red.a[i][i].clone()).collect();
    Ok(SmithDecomposition {
        e: from_unimatrix(&red.e),
        d,
        f: from_unimatrix(&red.f),
        f_inv: from_unimatrix(&red.f_inv),
    })
}

impl SmithDecomposition {
    pub fn d_matrix(&self) -> MatrixPolynomial {
        let n = self.d.len();
        let mut m = MatrixPolynomial::zeros(n, n, 1);
        for (i, p) in self.d.iter().enumerate() {
            m.set(i, i, p.to_polynomial(1, 0));
        }
        m
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.d.iter().take_while(|p| !p.is_zero()).count()
    }

    /// Checks every structural invariant against the input matrix.
    pub fn check(&self, m: &MatrixPolynomial) -> Result<()> {
        let prod = self.e.mul(&self.d_matrix()).mul(&self.f);
        if &prod != m {
            return Err(Error::Construction("E·D·F differs from the input".into()));
        }
        for (name, u) in [("E", &self.e), ("F", &self.f)] {
            let det = determinant(u)?;
            if det.is_zero() || !det.is_constant() {
                return Err(Error::Construction(format!("{name} is not unimodular")));
            }
        }
        let n = self.d.len();
        if self.f.mul(&self.f_inv) != MatrixPolynomial::identity(n, 1) {
            return Err(Error::Construction("F·F⁻¹ is not the identity".into()));
        }
        let r = self.rank();
        if self.d[r..].iter().any(|p| !p.is_zero()) {
            return Err(Error::Construction(
                "zero diagonal entries are not last".into(),
            ));
        }
        for w in self.d[..r].windows(2) {
            if !w[1].div_rem(&w[0]).1.is_zero() {
                return Err(Error::Construction("divisibility chain broken".into()));
            }
        }
        if self.d[..r].iter().any(|p| !p.leading().is_one()) {
            return Err(Error::Construction("diagonal entries are not monic".into()));
        }
        Ok(())
    }
}

/// Start indices (0-based) of the blocks: `k₀ = 0` and each next `k` is the
/// first `j` with `(d_j / d_{j−1})(0) = 0`. Signs are not checked.
pub(crate) fn block_starts(d: &[UniPoly]) -> Vec<usize> {
    let mut ks = vec![0];
    for j in 1..d.len() {
        let ratio = d[j].div_exact(&d[j - 1]).expect("divisibility chain");
        if ratio.coeff(0).is_zero() {
            ks.push(j);
        }
    }
    ks
}

/// The block sequence `1 = k₀ < k₁ < … < k_r` (1-based) of a Smith diagonal.
/// Every `d_i` must be nonzero and nonnegative just to the right of 0.
pub fn block_sequence(d: &[UniPoly]) -> Result<Vec<usize>> {
    if d.is_empty() {
        return Err(Error::InvalidArgument("empty diagonal".into()));
    }
    for (i, p) in d.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "d_{} vanishes identically; reduce the size first",
                i + 1
            )));
        }
        if p.coeff(p.valuation()).is_negative() {
            return Err(Error::InvalidArgument(format!(
                "d_{} is negative near 0+",
                i + 1
            )));
        }
    }
    for w in d.windows(2) {
        if w[1].div_exact(&w[0]).is_none() {
            return Err(Error::InvalidArgument("not a divisibility chain".into()));
        }
    }
    Ok(block_starts(d).into_iter().map(|k| k + 1).collect())
}
