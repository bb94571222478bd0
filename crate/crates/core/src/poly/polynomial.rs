//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::MultiIndex;
use super::rational::{pow, to_f64, Rational};
use crate::error::{Error, Result};

/// A polynomial in `nvars` variables over ℚ.
///
/// Terms are kept in a lexicographically ordered map and zero coefficients
/// are never stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    /// The `i`-th coordinate function.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for {nvars} variables"
        );
        Self::monomial(MultiIndex::unit(nvars, i), Rational::one())
    }

    pub fn monomial(exps: MultiIndex, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::NvarsMismatch {
                    expected: nvars,
                    found: m.len(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(MultiIndex::is_zero)
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Degree in variable `i`; `-1` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.0[i] as i64).max().unwrap_or(-1)
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        debug_assert_eq!(m.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.add(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars
            )));
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Rational]) -> Rational {
        // Powers are cached per variable; the exponents involved are small.
        let mut powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|x| vec![Rational::one(), x.clone()])
            .collect();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &point[i];
                    cache.push(next);
                }
                t *= &cache[e as usize];
                if t.is_zero() {
                    break;
                }
            }
            total += t;
        }
        total
    }

    /// Floating-point evaluation, for heuristics only.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    /// Sign of `p(point)`. Decided in floating point when the value clears a
    /// generous rounding-error bound, exactly otherwise.
    pub fn sign_at(&self, point: &[Rational]) -> Result<Ordering> {
        if point.len() != self.nvars {
            return Err(Error::NvarsMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let x: Vec<f64> = point.iter().map(to_f64).collect();
        let (mut v, mut mag) = (0.0f64, 0.0f64);
        for (m, c) in &self.terms {
            let t =
                m.0.iter()
                    .zip(&x)
                    .fold(to_f64(c), |acc, (&e, &xi)| acc * xi.powi(e as i32));
            v += t;
            mag += t.abs();
        }
        let slack = (self.degree().max(0) as usize + self.terms.len() + 4) as f64;
        if v.is_finite() && mag.is_finite() && mag > 1e-250 && v.abs() > 1e-12 * slack * mag {
            return Ok(if v > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            });
        }
        Ok(self.eval_unchecked(point).cmp(&Rational::zero()))
    }

    /// `∂^α p`.
    pub fn partial_derivative(&self, alpha: &MultiIndex) -> Polynomial {
        assert_eq!(alpha.len(), self.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let Some(rest) = m.checked_sub(alpha) else {
                continue;
            };
            // falling factorial e·(e-1)·…·(e-a+1) per variable
            let mut factor = num_bigint::BigInt::one();
            for (&e, &a) in m.0.iter().zip(&alpha.0) {
                for k in 0..a {
                    factor *= e - k;
                }
            }
            out.add_term(rest, c * Rational::from_integer(factor));
        }
        out
    }

    /// `q(X) = p(x₀ + εX)` via the Taylor formula
    /// `Σ_α (εX)^α / α! · ∂^α p(x₀)`.
    pub fn taylor_shift(&self, x0: &[Rational], signs: &[i8]) -> Result<Polynomial> {
        if x0.len() != self.nvars || signs.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "taylor_shift needs {} coordinates and signs",
                self.nvars
            )));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidArgument(format!(
                "sign entry {bad} is not ±1"
            )));
        }
        let mut out = Polynomial::zero(self.nvars);
        // every α ≤ some exponent in the support contributes
        let mut alphas: Vec<MultiIndex> = Vec::new();
        for m in self.terms.keys() {
            for_each_divisor(m, |a| alphas.push(a.clone()));
        }
        alphas.sort();
        alphas.dedup();
        for alpha in alphas {
            let value = self.partial_derivative(&alpha).eval_unchecked(x0);
            if value.is_zero() {
                continue;
            }
            let negative = alpha
                .0
                .iter()
                .zip(signs)
                .filter(|(&a, &s)| s < 0 && a % 2 == 1)
                .count()
                % 2
                == 1;
            let mut c = value / Rational::from_integer(alpha.factorial());
            if negative {
                c = -c;
            }
            out.add_term(alpha, c);
        }
        Ok(out)
    }

    /// Composition `p(q₁, …, qₙ)`; the result lives in the ring of the `qᵢ`.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        if subs.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "substitute needs {} polynomials, got {}",
                self.nvars,
                subs.len()
            )));
        }
        let target = subs.first().map(|q| q.nvars).unwrap_or(0);
        if let Some(q) = subs.iter().find(|q| q.nvars != target) {
            return Err(Error::NvarsMismatch {
                expected: target,
                found: q.nvars,
            });
        }
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|q| vec![Polynomial::one(target), q.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &subs[i];
                    cache.push(next);
                }
                t = &t * &cache[e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-indexes variables: variable `i` becomes variable `map[i]` of a
    /// ring with `nvars` variables.
    pub fn remap_vars(&self, map: &[usize], nvars: usize) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(MultiIndex(e), c.clone());
        }
        out
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Homogenizes with a new last variable.
    pub fn homogenize(&self, d: u32) -> Result<Form> {
        self.homogenize_at(d, self.nvars)
    }

    /// Homogenizes with a new variable inserted at `position`.
    pub fn homogenize_at(&self, d: u32, position: usize) -> Result<Form> {
        if self.degree() > d as i64 {
            return Err(Error::InvalidArgument(format!(
                "cannot homogenize degree {} polynomial to degree {d}",
                self.degree()
            )));
        }
        if position > self.nvars {
            return Err(Error::InvalidArgument(format!(
                "position {position} out of range"
            )));
        }
        let mut out = Polynomial::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.insert(position, d - m.degree());
            out.add_term(MultiIndex(e), c.clone());
        }
        Ok(Form {
            poly: out,
            degree: d,
        })
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, divisor.nvars);
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let shift = m.checked_sub(&lm)?;
            let q = c / &lc;
            let mut step = Polynomial::zero(self.nvars);
            for (dm, dc) in &divisor.terms {
                step.add_term(dm.add(&shift), dc * &q);
            }
            quot.add_term(shift, q);
            rem = &rem - &step;
        }
        Some(quot)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Scales so that the leading (lex-largest) coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&(Rational::one() / c)),
            None => self.clone(),
        }
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Rational) -> Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

fn for_each_divisor(m: &MultiIndex, mut f: impl FnMut(&MultiIndex)) {
    let n = m.len();
    let mut cur = vec![0u32; n];
    loop {
        f(&MultiIndex(cur.clone()));
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if cur[i] < m.0[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// A polynomial checked to be homogeneous of a declared degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    poly: Polynomial,
    degree: u32,
}

impl Form {
    pub fn new(poly: Polynomial, degree: u32) -> Result<Self> {
        if !poly.is_homogeneous(degree) {
            return Err(Error::NotHomogeneous(degree));
        }
        Ok(Form { poly, degree })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars
    }

    /// Sets variable `var` to `value` and drops it from the ring.
    pub fn dehomogenize(&self, var: usize, value: &Rational) -> Result<Polynomial> {
        let n = self.poly.nvars;
        if var >= n {
            return Err(Error::InvalidArgument(format!(
                "variable {var} out of range"
            )));
        }
        let mut out = Polynomial::zero(n - 1);
        for (m, c) in &self.poly.terms {
            let mut e = m.0.clone();
            let k = e.remove(var);
            out.add_term(MultiIndex(e), c * pow(value, k));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::{int, rat};

    fn p(s: &str, vars: &[&str]) -> Polynomial {
        Polynomial::parse(s, vars).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let v = ["x", "y"];
        assert_eq!(p("x+y", &v) * p("x-y", &v), p("x^2-y^2", &v));
    }

    #[test]
    fn additive_identity() {
        let v = ["x", "y"];
        let q = p("3*x^2*y - 1/2", &v);
        assert_eq!(&q + &Polynomial::zero(2), q);
    }

    #[test]
    fn square_of_x2_plus_1() {
        let q = p("x^2+1", &["x"]);
        assert_eq!(&q * &q, p("x^4+2*x^2+1", &["x"]));
    }

    #[test]
    fn nvars_mismatch_is_an_error() {
        let a = Polynomial::var(1, 0);
        let b = Polynomial::var(2, 0);
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::NvarsMismatch { .. })
        ));
        assert!(a.evaluate(&[int(1), int(2)]).is_err());
    }

    #[test]
    fn evaluate_at_origin_gives_constant_term() {
        let q = p("7/3 + x*y - y^3", &["x", "y"]);
        assert_eq!(q.evaluate(&[int(0), int(0)]).unwrap(), rat(7, 3));
    }

    #[test]
    fn motzkin_variant_vanishes_at_ones() {
        let v = ["x", "y", "z"];
        let f = p("x^4*y^2+y^4*z^2+z^4*x^2-3*x^2*y^2*z^2", &v);
        assert_eq!(f.evaluate(&[int(1), int(1), int(1)]).unwrap(), int(0));
    }

    #[test]
    fn derivatives() {
        let v = ["x", "y"];
        let q = p("x^2*y", &v);
        assert_eq!(
            q.partial_derivative(&MultiIndex(vec![1, 0])),
            p("2*x*y", &v)
        );
        assert_eq!(q.partial_derivative(&MultiIndex(vec![2, 0])), p("2*y", &v));
        let entry = p("-2*Y+2*H+H^2-Y^2+2*H*Y", &["H", "Y"]);
        assert_eq!(
            entry.partial_derivative(&MultiIndex(vec![1, 1])),
            p("2", &["H", "Y"])
        );
    }

    #[test]
    fn taylor_examples() {
        let x2 = p("x^2", &["x"]);
        assert_eq!(
            x2.taylor_shift(&[int(1)], &[1]).unwrap(),
            p("1+2*x+x^2", &["x"])
        );
        let x = p("x", &["x"]);
        assert_eq!(x.taylor_shift(&[int(0)], &[-1]).unwrap(), p("-x", &["x"]));
        assert!(x.taylor_shift(&[int(0)], &[2]).is_err());
    }

    #[test]
    fn homogenize_examples() {
        let q = p("1+x^2", &["x"]);
        let f = q.homogenize(2).unwrap();
        assert_eq!(f.poly(), &p("z^2+x^2", &["x", "z"]));
        assert!(q.homogenize(1).is_err());

        let v = ["x", "y", "z"];
        let f = Form::new(p("x^4*y^2+y^4*z^2+z^4*x^2-3*x^2*y^2*z^2", &v), 6).unwrap();
        let d = f.dehomogenize(2, &int(1)).unwrap();
        assert_eq!(d, p("x^4*y^2+y^4+x^2-3*x^2*y^2", &["x", "y"]));
        assert_eq!(d.homogenize(6).unwrap(), f);
        assert!(Form::new(p("x+y^2", &["x", "y"]), 2).is_err());
    }

    #[test]
    fn exact_division() {
        let v = ["x", "y"];
        let a = p("x^3 - x*y^2 + 2*x^2*y - 2*y^3", &v);
        let b = p("x - y", &v);
        assert_eq!(a.div_exact(&b).unwrap() * b, a);
        assert!(p("x^2+1", &v).div_exact(&p("x", &v)).is_none());
    }

    #[test]
    fn substitution() {
        let v = ["x", "y"];
        let q = p("x^2 - y", &v);
        let r = q.substitute(&[p("x+y", &v), p("2", &v)]).unwrap();
        assert_eq!(r, p("x^2+2*x*y+y^2-2", &v));
    }

    #[test]
    fn degree_of_zero_is_sentinel() {
        assert_eq!(Polynomial::zero(3).degree(), -1);
        assert_eq!(Polynomial::one(3).degree(), 0);
    }
}
