//! Dense constant matrices over ℚ.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::rational::{fmt_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut q = Self::zeros(m, m);
        for i in 0..m {
            q.set(i, i, Rational::one());
        }
        q
    }

    /// Matrix unit `E_k` with a single one at `(k, k)`.
    pub fn unit_diagonal(m: usize, k: usize) -> Self {
        let mut q = Self::zeros(m, m);
        q.set(k, k, Rational::one());
        q
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::poly::rational::int(v)).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut q = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            q.set(i, i, v.clone());
        }
        q
    }

    /// Outer product `vᵀv` of a row vector.
    pub fn outer(v: &[Rational]) -> Self {
        let n = v.len();
        let mut q = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                q.set(i, j, &v[i] * &v[j]);
            }
        }
        q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = a * o.get(k, j);
                    out.data[i * o.cols + j] += v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Quadratic form `vᵀ Q v`.
    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        v.iter().zip(self.mul_vec(v)).map(|(a, b)| a * b).sum()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> QMatrix {
        let mut out = QMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by Gaussian elimination over ℚ.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i * n + k].is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k].clone();
            det *= &piv;
            for i in k + 1..n {
                let f = &a[i * n + k] / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = &f * &a[k * n + j];
                    a[i * n + j] -= v;
                }
            }
        }
        det
    }

    /// Inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&i| !a.get(i, k).is_zero())?;
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                    inv.data.swap(p * n + j, k * n + j);
                }
            }
            let piv = Rational::one() / a.get(k, k);
            for j in 0..n {
                a.data[k * n + j] *= &piv;
                inv.data[k * n + j] *= &piv;
            }
            for i in 0..n {
                if i == k || a.get(i, k).is_zero() {
                    continue;
                }
                let f = a.get(i, k).clone();
                for j in 0..n {
                    let va = &f * a.get(k, j);
                    let vi = &f * inv.get(k, j);
                    a.data[i * n + j] -= va;
                    inv.data[i * n + j] -= vi;
                }
            }
        }
        Some(inv)
    }

    /// Characteristic polynomial coefficients `c_0, …, c_m` of `det(λI − Q)`
    /// (monic, `c_m = 1`), by Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Vec<Rational> {
        assert!(self.is_square());
        let n = self.rows;
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut m = QMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = Q M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                let v = next.get(i, i) + &c[n - k + 1];
                next.set(i, i, v);
            }
            m = next;
            let am = self.mul(&m);
            let tr: Rational = (0..n).map(|i| am.get(i, i).clone()).sum();
            c[n - k] = -tr / Rational::from_integer((k as i64).into());
        }
        c
    }

    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }
}

impl std::fmt::Display for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
