use num_traits::Zero;

use super::qmatrix::QMatrix;
use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial, Rational};

/// A (possibly rectangular) matrix with polynomial entries sharing one ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixPolynomial {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Polynomial>,
}

impl MatrixPolynomial {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        MatrixPolynomial {
            rows,
            cols,
            nvars,
            entries: vec![Polynomial::zero(nvars); rows * cols],
        }
    }

    pub fn identity(m: usize, nvars: usize) -> Self {
        let mut a = Self::zeros(m, m, nvars);
        for i in 0..m {
            a.set(i, i, Polynomial::one(nvars));
        }
        a
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let nvars = rows[0][0].nvars();
        if let Some(p) = rows.iter().flatten().find(|p| p.nvars() != nvars) {
            return Err(Error::NvarsMismatch {
                expected: nvars,
                found: p.nvars(),
            });
        }
        Ok(MatrixPolynomial {
            rows: r,
            cols: c,
            nvars,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Parses rows of entry strings over the named variables.
    pub fn parse_rows<S: AsRef<str>>(rows: &[&[&str]], vars: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| Polynomial::parse(s, vars))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }

    pub fn from_constant(q: &QMatrix, nvars: usize) -> Self {
        let mut a = Self::zeros(q.rows(), q.cols(), nvars);
        for i in 0..q.rows() {
            for j in 0..q.cols() {
                a.set(i, j, Polynomial::constant(nvars, q.get(i, j).clone()));
            }
        }
        a
    }

    /// `p · Q` for a scalar polynomial and constant matrix.
    pub fn scaled_constant(p: &Polynomial, q: &QMatrix) -> Self {
        let mut a = Self::zeros(q.rows(), q.cols(), p.nvars());
        for i in 0..q.rows() {
            for j in 0..q.cols() {
                if !q.get(i, j).is_zero() {
                    a.set(i, j, p.scale(q.get(i, j)));
                }
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = &mut Polynomial> {
        self.entries.iter_mut()
    }

    pub fn to_rows(&self) -> Vec<Vec<Polynomial>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Every entry is a form of degree `d` (zero entries allowed).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.entries.iter().all(|p| p.is_homogeneous(d))
    }

    /// Common degree of the entries if they are all forms of one degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.entries.iter().map(Polynomial::degree).max()?;
        if d < 0 {
            return None;
        }
        self.is_homogeneous(d as u32).then_some(d as u32)
    }

    pub fn max_degree(&self) -> i64 {
        self.entries
            .iter()
            .map(Polynomial::degree)
            .max()
            .unwrap_or(-1)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn check_same_shape(&self, o: &Self) -> Result<()> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.nvars != o.nvars {
            return Err(Error::NvarsMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(MatrixPolynomial {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(MatrixPolynomial {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.nvars != o.nvars {
            return Err(Error::NvarsMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        let mut out = Self::zeros(self.rows, o.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Polynomial::zero(self.nvars);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("matrix addition")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("matrix subtraction")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("matrix multiplication")
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, f: &Polynomial) -> Self {
        self.map(|p| p * f)
    }

    pub fn map(&self, mut f: impl FnMut(&Polynomial) -> Polynomial) -> Self {
        let entries: Vec<Polynomial> = self.entries.iter().map(&mut f).collect();
        let nvars = entries.first().map_or(self.nvars, Polynomial::nvars);
        MatrixPolynomial {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        }
    }

    /// `Uᵀ U`.
    pub fn gram(&self) -> Self {
        self.transpose().mul(self)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<QMatrix> {
        let mut q = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                q.set(i, j, self.get(i, j).evaluate(point)?);
            }
        }
        Ok(q)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|p| p.eval_f64(point)).collect()
    }

    /// The constant matrix `∂^α A (x₀)`.
    pub fn derivative_at(&self, alpha: &MultiIndex, x0: &[Rational]) -> Result<QMatrix> {
        let mut q = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                q.set(i, j, self.get(i, j).partial_derivative(alpha).evaluate(x0)?);
            }
        }
        Ok(q)
    }

    /// Entrywise `A(x₀ + εX)`.
    pub fn taylor_shift(&self, x0: &[Rational], signs: &[i8]) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|p| p.taylor_shift(x0, signs))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixPolynomial {
            entries,
            ..self.clone()
        })
    }

    /// Entrywise composition with `subs`.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|p| p.substitute(subs))
            .collect::<Result<Vec<_>>>()?;
        let nvars = subs.first().map_or(0, Polynomial::nvars);
        Ok(MatrixPolynomial {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        })
    }

    /// Coefficient matrix of the monomial `m` (for polynomial-matrix
    /// expansions `A = Σ_m X^m A_m`).
    pub fn coefficient(&self, m: &MultiIndex) -> QMatrix {
        let mut q = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                q.set(i, j, self.get(i, j).coeff(m));
            }
        }
        q
    }

    /// Monomials appearing in at least one entry, ascending lex.
    pub fn support(&self) -> Vec<MultiIndex> {
        let mut s: Vec<MultiIndex> = self
            .entries
            .iter()
            .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
            .collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len(), self.nvars);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Position of the first entry (row-major) that differs from `other`.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some((0, 0));
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }
}
