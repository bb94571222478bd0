//! Helpers around the exact rational coefficient type.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("invalid rational literal `{s}`"),
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // num's conversion overflows for huge numerators; scale down first.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift >= 0 {
            q / Rational::from_integer(BigInt::one() << shift as usize)
        } else {
            q * Rational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Rounds `x` to the nearest multiple of `2^-bits`.
pub fn from_f64_dyadic(x: f64, bits: u32) -> Rational {
    let scaled = (x * 2f64.powi(bits as i32)).round();
    let n = BigInt::from(scaled as i128);
    Rational::new(n, BigInt::one() << bits as usize)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn approximate(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let sign = if x < 0.0 { -1i64 } else { 1 };
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    Rational::new(BigInt::from(p1) * sign, BigInt::from(q1))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn pow(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Largest `2^-k` (k ≥ 0) not exceeding `q`, for positive `q` below one;
/// returns one when `q >= 1`.
pub fn dyadic_floor(q: &Rational) -> Rational {
    let mut r = Rational::one();
    let two = int(2);
    while &r > q {
        r /= &two;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(fmt_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(fmt_rational(&int(7)), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn continued_fraction_approximation() {
        assert_eq!(approximate(0.333333333, 100), rat(1, 3));
        assert_eq!(approximate(-2.5, 10), rat(-5, 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::from(0));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn huge_to_f64() {
        let big = Rational::from_integer(BigInt::one() << 2000usize);
        let q = &big / (&big * int(4));
        assert_eq!(to_f64(&q), 0.25);
    }
}
