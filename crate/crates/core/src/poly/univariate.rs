//! Dense univariate polynomials over ℚ: gcd, squarefree decomposition,
//! Sturm sequences and real root isolation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::MultiIndex;
use super::polynomial::Polynomial;
use super::rational::{int, Rational};
use crate::error::{Error, Result};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn one() -> Self {
        UniPoly(vec![Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `t`.
    pub fn x() -> Self {
        UniPoly(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| int(v)).collect())
    }

    /// `(t - r)`.
    pub fn linear_root(r: &Rational) -> Self {
        UniPoly(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    /// `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + super::rational::to_f64(c))
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.0.len().max(o.0.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.0.len().max(o.0.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> UniPoly {
        self.scale(&-Rational::one())
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        (0..e).fold(UniPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.0.clone();
        let dl = d.leading();
        let dd = d.0.len() - 1;
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &rem[k + dd] / &dl;
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(q), UniPoly::new(rem))
    }

    pub fn div_exact(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Largest `k` with `t^k` dividing `self`; zero polynomial gives 0.
    pub fn valuation(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Drops the factor `t^valuation`.
    pub fn strip_valuation(&self) -> UniPoly {
        UniPoly(self.0[self.valuation()..].to_vec())
    }

    pub fn to_polynomial(&self, nvars: usize, var: usize) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for (k, c) in self.0.iter().enumerate() {
            let mut e = vec![0u32; nvars];
            e[var] = k as u32;
            p.add_term(MultiIndex(e), c.clone());
        }
        p
    }

    /// Converts a polynomial in one variable (or constant in any ring when
    /// `var` is the only variable appearing).
    pub fn from_polynomial(p: &Polynomial, var: usize) -> Result<UniPoly> {
        let mut coeffs = Vec::new();
        for (m, c) in p.terms() {
            if m.0.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
                return Err(Error::InvalidArgument(
                    "polynomial depends on more than one variable".into(),
                ));
            }
            let k = m.0[var] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    /// Clears denominators and content, leaving a primitive integer
    /// polynomial with positive leading coefficient (same roots).
    pub fn primitive(&self) -> UniPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if self.leading().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        UniPoly::new(
            ints.into_iter()
                .map(|c| Rational::from_integer(c * &sign / &g))
                .collect(),
        )
    }
}

impl std::fmt::Display for UniPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_polynomial(1, 0).to_string_with(&["t"]))
    }
}

/// Monic gcd. Errors when both inputs are zero.
pub fn gcd(a: &UniPoly, b: &UniPoly) -> Result<UniPoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidArgument("gcd of two zero polynomials".into()));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.div_rem(&b).1;
        // keep coefficient growth in check
        a = b;
        b = r.primitive();
    }
    Ok(a.monic())
}

/// `p / gcd(p, p')`, monic.
pub fn squarefree_part(p: &UniPoly) -> Result<UniPoly> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("squarefree part of zero".into()));
    }
    if p.is_constant() {
        return Ok(UniPoly::one());
    }
    let g = gcd(p, &p.derivative())?;
    Ok(p.div_exact(&g).expect("gcd divides").monic())
}

/// Yun's algorithm: returns `(c, [(g_k, k)])` with `p = c·∏ g_k^k`, the
/// `g_k` monic, squarefree, pairwise coprime and nonconstant.
pub fn squarefree_decomposition(p: &UniPoly) -> Result<(Rational, Vec<(UniPoly, u32)>)> {
    if p.is_zero() {
        return Err(Error::InvalidArgument(
            "squarefree decomposition of zero".into(),
        ));
    }
    let lc = p.leading();
    let f = p.monic();
    let mut out = Vec::new();
    if f.is_constant() {
        return Ok((lc, out));
    }
    let fp = f.derivative();
    let a0 = gcd(&f, &fp)?;
    let mut b = f.div_exact(&a0).unwrap();
    let mut c = fp.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut k = 1u32;
    while !b.is_constant() {
        let a = gcd(&b, &d)?;
        if !a.is_constant() {
            out.push((a.clone(), k));
        }
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = c.sub(&b.derivative());
        k += 1;
    }
    Ok((lc, out))
}

/// Sturm sequence `p, p', -rem(p, p'), …`.
pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone()];
    if p.is_constant() {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        // positive rescaling keeps signs and shrinks coefficients
        let r = r.neg();
        let scale = r.primitive().leading() / r.leading();
        seq.push(r.scale(&scale.abs()));
    }
    seq
}

fn sign_changes(vals: impl Iterator<Item = Rational>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for v in vals {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

fn sign_changes_at_infinity(seq: &[UniPoly], positive: bool) -> usize {
    sign_changes(seq.iter().map(|q| {
        let l = q.leading();
        if !positive && q.degree() % 2 == 1 {
            -l
        } else {
            l
        }
    }))
}

/// Number of distinct real roots in `(a, b]` (Sturm). `None` bounds mean ∓∞.
pub fn count_real_roots(seq: &[UniPoly], a: Option<&Rational>, b: Option<&Rational>) -> usize {
    let va = match a {
        Some(a) => sign_changes(seq.iter().map(|q| q.eval(a))),
        None => sign_changes_at_infinity(seq, false),
    };
    let vb = match b {
        Some(b) => sign_changes(seq.iter().map(|q| q.eval(b))),
        None => sign_changes_at_infinity(seq, true),
    };
    va.saturating_sub(vb)
}

/// Cauchy bound: every real root lies in `[-B, B]`.
pub fn root_bound(p: &UniPoly) -> Rational {
    let l = p.leading().abs();
    let m = p.0[..p.0.len().saturating_sub(1)]
        .iter()
        .map(|c| c.abs() / &l)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Isolating intervals `(lo, hi]` of width at most `width` for the distinct
/// real roots of `p`, in increasing order. Exact rational endpoints.
pub fn isolate_real_roots(p: &UniPoly, width: &Rational) -> Vec<(Rational, Rational)> {
    if p.is_constant() {
        return Vec::new();
    }
    let sf = squarefree_part(p).expect("nonzero");
    let seq = sturm_sequence(&sf);
    let b = root_bound(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = int(2);
    while let Some((lo, hi)) = stack.pop() {
        let n = count_real_roots(&seq, Some(&lo), Some(&hi));
        if n == 0 {
            continue;
        }
        if n == 1 && &hi - &lo <= *width {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        // push right half first so the left half is processed first
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort();
    out
}

/// Rational points that straddle every real root of `p` with no other root
/// in between, plus one point beyond each end. `p` takes every sign it
/// takes on ℝ at one of these points.
pub fn sign_test_points(p: &UniPoly) -> Vec<Rational> {
    if p.is_constant() {
        return vec![Rational::zero()];
    }
    let sf = squarefree_part(p).expect("nonzero");
    let seq = sturm_sequence(&sf);
    let b = root_bound(&sf) + Rational::one();
    let mut out = vec![-b.clone(), b];
    let two = int(2);
    for (lo, hi) in isolate_real_roots(&sf, &Rational::new(1.into(), 1024.into())) {
        if sf.eval(&hi).is_zero() {
            let mut eps = (&hi - &lo) / &two;
            loop {
                let a = &hi - &eps;
                let c = &hi + &eps;
                if count_real_roots(&seq, Some(&a), Some(&c)) == 1
                    && !sf.eval(&a).is_zero()
                    && !sf.eval(&c).is_zero()
                {
                    out.push(a);
                    out.push(c);
                    break;
                }
                eps /= &two;
            }
        } else {
            let mut a = lo.clone();
            let mut eps = (&hi - &lo) / &two;
            while sf.eval(&a).is_zero() {
                let cand = &lo + &eps;
                if count_real_roots(&seq, Some(&lo), Some(&cand)) == 0 {
                    a = cand;
                } else {
                    eps /= &two;
                }
            }
            out.push(a);
            out.push(hi);
        }
    }
    out
}

/// Exact decision: `p(t) ≥ 0` for every real `t`.
pub fn is_psd_on_reals(p: &UniPoly) -> bool {
    if p.is_zero() {
        return true;
    }
    if p.degree() % 2 == 1 || p.leading().is_negative() {
        return false;
    }
    if p.is_constant() {
        return true;
    }
    let (_, parts) = squarefree_decomposition(p).expect("nonzero");
    // odd multiplicity factors must have no real root
    let mut odd = UniPoly::one();
    for (g, k) in parts {
        if k % 2 == 1 {
            odd = odd.mul(&g);
        }
    }
    if odd.is_constant() {
        return true;
    }
    count_real_roots(&sturm_sequence(&odd), None, None) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    #[test]
    fn gcd_examples() {
        let a = UniPoly::from_ints(&[-1, 0, 1]);
        let b = UniPoly::from_ints(&[-1, 1]);
        assert_eq!(gcd(&a, &b).unwrap(), b);
        let p = UniPoly::from_ints(&[4, 0, 2]);
        assert_eq!(
            gcd(&p, &UniPoly::zero()).unwrap(),
            UniPoly::from_ints(&[2, 0, 1])
        );
        assert!(gcd(&UniPoly::zero(), &UniPoly::zero()).is_err());
    }

    #[test]
    fn squarefree_examples() {
        // (x-2)^2 (x^2+1)
        let a = UniPoly::from_ints(&[-2, 1]);
        let q = UniPoly::from_ints(&[1, 0, 1]);
        let p = a.mul(&a).mul(&q).scale(&int(3));
        assert_eq!(squarefree_part(&p).unwrap(), a.mul(&q));
        let (c, parts) = squarefree_decomposition(&p).unwrap();
        assert_eq!(c, int(3));
        assert_eq!(parts, vec![(q, 1), (a, 2)]);
    }

    #[test]
    fn root_counting() {
        let p = UniPoly::from_ints(&[-1, 0, 1]);
        let seq = sturm_sequence(&p);
        assert_eq!(count_real_roots(&seq, None, None), 2);
        assert_eq!(count_real_roots(&seq, Some(&int(0)), Some(&int(5))), 1);
        let roots = isolate_real_roots(&UniPoly::from_ints(&[0, -2, 0, 1]), &rat(1, 1024));
        assert_eq!(roots.len(), 3);
        assert!(roots[2].0 < rat(1415, 1000) && roots[2].1 > rat(1414, 1000));
    }

    #[test]
    fn psd_decisions() {
        assert!(is_psd_on_reals(&UniPoly::from_ints(&[5, 9, 18])));
        assert!(is_psd_on_reals(&UniPoly::from_ints(&[0, 0, 1])));
        assert!(!is_psd_on_reals(&UniPoly::from_ints(&[0, 0, 0, 1])));
        assert!(!is_psd_on_reals(&UniPoly::from_ints(&[-1, 0, 1])));
        // (x^2-2)^2 has real roots of even multiplicity
        let q = UniPoly::from_ints(&[-2, 0, 1]);
        assert!(is_psd_on_reals(&q.mul(&q)));
    }

    #[test]
    fn division() {
        let p = UniPoly::from_ints(&[1, 2, 1]);
        let (q, r) = p.div_rem(&UniPoly::from_ints(&[1, 1]));
        assert_eq!(q, UniPoly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(UniPoly::from_ints(&[0, 0, 3, 1]).valuation(), 2);
    }
}
