use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::rational::factorial;

/// Exponent vector of a monomial.
///
/// The derived `Ord` is lexicographic on the exponents, which is the
/// canonical term order used throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some component would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `α! = α₁!·…·αₙ!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    pub fn all_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    /// Sum of exponents over the variables in `vars`.
    pub fn partial_degree(&self, vars: std::ops::Range<usize>) -> u32 {
        self.0[vars].iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in `n` variables of total degree at most `max_degree`,
/// in lexicographic order.
pub fn multi_indices_up_to(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() == n {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_degree, &mut Vec::with_capacity(n), &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order() {
        let a = MultiIndex(vec![1, 0]);
        let b = MultiIndex(vec![0, 5]);
        assert!(b < a);
        assert!(MultiIndex(vec![1, 2]) < MultiIndex(vec![1, 3]));
    }

    #[test]
    fn factorial_and_divides() {
        let a = MultiIndex(vec![2, 3]);
        assert_eq!(a.factorial(), BigInt::from(12));
        assert!(MultiIndex(vec![1, 3]).divides(&a));
        assert!(!MultiIndex(vec![3, 0]).divides(&a));
        assert_eq!(
            a.checked_sub(&MultiIndex(vec![2, 1])),
            Some(MultiIndex(vec![0, 2]))
        );
        assert_eq!(a.checked_sub(&MultiIndex(vec![3, 0])), None);
    }

    #[test]
    fn enumeration_counts() {
        // C(n + d, d)
        assert_eq!(multi_indices_up_to(2, 2).len(), 6);
        assert_eq!(multi_indices_up_to(3, 2).len(), 10);
    }
}
