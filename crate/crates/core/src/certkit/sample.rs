//! Seeded rational sampling.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::types::Piece;
use crate::error::{Error, Result};
use crate::poly::{Polynomial, Rational};

/// Resolution of sampled coordinates: multiples of `2^-SAMPLE_BITS` of the
/// box width.
pub const SAMPLE_BITS: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    /// `accepted` points of the piece were tried, none negative.
    NoCounterexample { accepted: usize },
    /// `f(point) < 0` at a point of the piece.
    Witness(Vec<Rational>),
    /// No point of the piece found after `N·100` attempts.
    EmptyPiece,
}

/// Deterministic stream of rational points in a box.
pub struct PointSampler {
    rng: ChaCha8Rng,
    bounds: Vec<(Rational, Rational)>,
}

impl PointSampler {
    pub fn new(bounds: Vec<(Rational, Rational)>, seed: u64) -> Self {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bounds,
        }
    }

    pub fn unit_box(n: usize, seed: u64) -> Self {
        let one = Rational::one();
        PointSampler::new(vec![(-one.clone(), one); n], seed)
    }

    pub fn next_point(&mut self) -> Vec<Rational> {
        let den = BigInt::one() << SAMPLE_BITS as usize;
        let steps = 1i64 << SAMPLE_BITS;
        self.bounds
            .iter()
            .map(|(lo, hi)| {
                let k = self.rng.gen_range(0..=steps);
                lo + (hi - lo) * Rational::new(BigInt::from(k), den.clone())
            })
            .collect()
    }
}

fn sampling_box(piece: &Piece, n: usize) -> Vec<(Rational, Rational)> {
    piece.sample_box.clone().unwrap_or_else(|| {
        let one = Rational::one();
        vec![(-one.clone(), one); n]
    })
}

/// Rejection-samples `n_samples` points of the piece and evaluates `f`
/// exactly at each.
pub fn sample_nonneg(
    f: &Polynomial,
    piece: &Piece,
    n_samples: usize,
    seed: u64,
) -> Result<SampleOutcome> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let n = f.nvars();
    let mut sampler = PointSampler::new(sampling_box(piece, n), seed);
    let mut accepted = 0;
    for _ in 0..n_samples * 100 {
        let pt = sampler.next_point();
        if !piece.contains(&pt)? {
            continue;
        }
        accepted += 1;
        if f.sign_at(&pt)? == std::cmp::Ordering::Less {
            return Ok(SampleOutcome::Witness(pt));
        }
        if accepted == n_samples {
            break;
        }
    }
    Ok(if accepted == 0 {
        SampleOutcome::EmptyPiece
    } else {
        SampleOutcome::NoCounterexample { accepted }
    })
}

/// Rational points on the unit sphere `S^{n−1}` from the parametrization
/// `t = tan(θ/2) ↦ ((1−t²)/(1+t²), 2t/(1+t²))`, applied recursively with `g`
/// angles per circle (`g/2` on the lower-dimensional factor). For `g`
/// divisible by 8 the coordinate points `±e_i` are included.
pub fn sphere_grid(n: usize, g: usize) -> Vec<Vec<Rational>> {
    assert!(n >= 1 && g >= 1);
    if n == 1 {
        return vec![vec![Rational::one()], vec![-Rational::one()]];
    }
    let sub = sphere_grid(n - 1, g.div_ceil(2).max(2));
    let mut out = Vec::new();
    // the factor grid is symmetric, so θ ∈ [−π, 0] already covers everything
    for k in 0..=g / 2 {
        let (c, s) = if k == 0 {
            // θ = −π
            (-Rational::one(), Rational::zero())
        } else {
            let theta = -std::f64::consts::PI + k as f64 * 2.0 * std::f64::consts::PI / g as f64;
            let t = crate::poly::rational::approximate((theta / 2.0).tan(), 64);
            let t2 = &t * &t;
            let den = Rational::one() + &t2;
            (
                (Rational::one() - &t2) / &den,
                (t * Rational::from_integer(2.into())) / &den,
            )
        };
        for p in &sub {
            // (c, s·p) has norm c² + s²|p|² = 1
            let mut v = vec![c.clone()];
            v.extend(p.iter().map(|x| x * &s));
            out.push(v);
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn vars() -> [&'static str; 2] {
        ["x", "y"]
    }

    #[test]
    fn sampling_examples() {
        let g = Polynomial::parse("x^2-y^2", &vars()).unwrap();
        let piece = Piece::new("x>=y", vec![g.clone()]);
        assert!(matches!(
            sample_nonneg(&g, &piece, 200, 1).unwrap(),
            SampleOutcome::NoCounterexample { .. }
        ));
        let f = Polynomial::parse("-x^2", &vars()).unwrap();
        let all = Piece::everywhere("R2");
        match sample_nonneg(&f, &all, 50, 3).unwrap() {
            SampleOutcome::Witness(pt) => assert!(f.evaluate(&pt).unwrap().is_negative()),
            other => panic!("{other:?}"),
        }
        let f = Polynomial::parse("y^4-x^2*y^2", &vars()).unwrap();
        let piece = Piece::new("y>=x", vec![Polynomial::parse("y^2-x^2", &vars()).unwrap()]);
        assert!(matches!(
            sample_nonneg(&f, &piece, 200, 7).unwrap(),
            SampleOutcome::NoCounterexample { .. }
        ));
        let empty = Piece::new("empty", vec![Polynomial::parse("-1-x^2", &vars()).unwrap()]);
        assert_eq!(
            sample_nonneg(&f, &empty, 5, 0).unwrap(),
            SampleOutcome::EmptyPiece
        );
    }

    #[test]
    fn deterministic() {
        let f = Polynomial::parse("x-y", &vars()).unwrap();
        let all = Piece::everywhere("R2");
        assert_eq!(
            sample_nonneg(&f, &all, 20, 9).unwrap(),
            sample_nonneg(&f, &all, 20, 9).unwrap()
        );
    }

    #[test]
    fn sphere_points_are_on_the_sphere() {
        let pts = sphere_grid(3, 8);
        assert_eq!(pts.len(), 14);
        let e = |i: usize| -> Vec<Rational> {
            (0..3)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        };
        for i in 0..3 {
            assert!(pts.contains(&e(i)), "{i}");
        }
        for p in pts {
            let norm: Rational = p.iter().map(|x| x * x).sum();
            assert!((norm - Rational::one()).is_zero());
        }
    }
}
