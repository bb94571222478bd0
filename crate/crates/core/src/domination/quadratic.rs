//! `A(x) = [[1 + a₁x + a₂x², b₁x + b₂x²], [b₁x + b₂x², c₁x + c₂x²]]`, psd
//! near `0⁺`: the explicit case analysis.

use num_traits::{One, Signed, Zero};

use crate::certkit::{
    pd_constant, prove_on_box_any, Coverage, Factor, Piece, PiecewiseCertificate, Term,
};
use crate::error::Result;
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::fmt_rational;
use crate::poly::{Polynomial, Rational};

const MAX_STEPS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticBranch {
    /// `c₁ > 0`.
    LinearPositive,
    /// `c₁ = 0`, `c₂ − b₁² > 0`.
    SchurPositive,
    /// `c₁ = 0`, `c₂ = b₁²`, `b₁ = 0`.
    Degenerate,
    /// `c₁ = 0`, `c₂ = b₁² ≠ 0`, `a₁ − 2b₂/b₁ > 0`.
    RankOneStrict,
    /// `c₁ = 0`, `c₂ = b₁² ≠ 0`, `a₁ − 2b₂/b₁ = 0`.
    RankOneCritical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadraticOutcome {
    Certified {
        branch: QuadraticBranch,
        certificate: PiecewiseCertificate,
    },
    /// `A` is not psd near `0⁺`.
    Uncertified { reason: String },
}

impl QuadraticOutcome {
    pub fn certificate(&self) -> Option<&PiecewiseCertificate> {
        match self {
            QuadraticOutcome::Certified { certificate, .. } => Some(certificate),
            QuadraticOutcome::Uncertified { .. } => None,
        }
    }

    pub fn branch(&self) -> Option<QuadraticBranch> {
        match self {
            QuadraticOutcome::Certified { branch, .. } => Some(*branch),
            QuadraticOutcome::Uncertified { .. } => None,
        }
    }
}

/// `c0 + c1·x + c2·x²`.
fn quad(c0: &Rational, c1: &Rational, c2: &Rational) -> Polynomial {
    let x = Polynomial::var(1, 0);
    Polynomial::constant(1, c0.clone()) + x.scale(c1) + (&x * &x).scale(c2)
}

pub fn quadratic_matrix(
    a1: &Rational,
    a2: &Rational,
    b1: &Rational,
    b2: &Rational,
    c1: &Rational,
    c2: &Rational,
) -> MatrixPolynomial {
    let z = Rational::zero();
    let off = quad(&z, b1, b2);
    MatrixPolynomial::from_rows(vec![
        vec![quad(&Rational::one(), a1, a2), off.clone()],
        vec![off, quad(&z, c1, c2)],
    ])
    .expect("2x2")
}

fn m2(a: &Rational, b: &Rational, c: &Rational) -> QMatrix {
    QMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![b.clone(), c.clone()]]).expect("2x2")
}

/// Smallest power of two `s ≥ 1` with `pred(s)`.
fn doubling(mut pred: impl FnMut(&Rational) -> Result<bool>) -> Result<Option<Rational>> {
    let mut s = Rational::one();
    for _ in 0..MAX_STEPS {
        if pred(&s)? {
            return Ok(Some(s));
        }
        s = &s * Rational::from_integer(2.into());
    }
    Ok(None)
}

/// Assembles the single-piece certificate on `[0, δ]`, halving `δ` until
/// every weight has a Bernstein proof.
fn assemble(
    target: MatrixPolynomial,
    parts: Vec<(Polynomial, Factor)>,
) -> Result<Option<PiecewiseCertificate>> {
    let mut delta = Rational::one();
    for _ in 0..MAX_STEPS {
        let bounds = [(Rational::zero(), delta.clone())];
        let proofs: Option<Vec<_>> = parts
            .iter()
            .map(|(w, _)| prove_on_box_any(w, &bounds, 8))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        if let Some(proofs) = proofs {
            let terms = parts
                .into_iter()
                .zip(proofs)
                .map(|((w, f), p)| Term::new(w, f, p))
                .collect();
            let mut cert = PiecewiseCertificate::new(vec!["x".into()], target, Coverage::Local);
            cert.push_piece(
                Piece::boxed(format!("0 <= x <= {}", fmt_rational(&delta)), &bounds),
                terms,
            );
            return Ok(Some(cert));
        }
        delta = &delta / Rational::from_integer(2.into());
    }
    Ok(None)
}

fn unit_e1() -> Factor {
    Factor::ConstPsd(QMatrix::unit_diagonal(2, 0))
}

/// The certificate of the branch the coefficients fall in, or the reason
/// `A` is not psd near `0⁺`.
pub fn certify_quadratic_2x2(
    a1: &Rational,
    a2: &Rational,
    b1: &Rational,
    b2: &Rational,
    c1: &Rational,
    c2: &Rational,
) -> Result<QuadraticOutcome> {
    let target = quadratic_matrix(a1, a2, b1, b2, c1, c2);
    let reject = |reason: &str| {
        Ok(QuadraticOutcome::Uncertified {
            reason: reason.into(),
        })
    };
    let zero = Rational::zero();
    let one = Rational::one();
    let (branch, parts) = if c1.is_positive() {
        // (1 − μx − αx²)E₁ + x(1 − βx)·P₁ + x²·P₂
        let Some(mu) = doubling(|mu| pd_constant(&m2(&(a1 + mu), b1, c1)))? else {
            return reject("no shift makes the linear part positive definite");
        };
        let p1 = m2(&(a1 + &mu), b1, c1);
        let Some(beta) = doubling(|b| Ok((c2 + b * c1).is_positive()))? else {
            return reject("no admissible beta");
        };
        let p2 = |al: &Rational| {
            m2(
                &(a2 + al + &beta * (a1 + &mu)),
                &(b2 + &beta * b1),
                &(c2 + &beta * c1),
            )
        };
        let Some(alpha) = doubling(|al| pd_constant(&p2(al)))? else {
            return reject("no admissible alpha");
        };
        let parts = vec![
            (quad(&one, &-mu.clone(), &-alpha.clone()), unit_e1()),
            (quad(&zero, &one, &-beta.clone()), Factor::ConstPsd(p1)),
            (quad(&zero, &zero, &one), Factor::ConstPsd(p2(&alpha))),
        ];
        (QuadraticBranch::LinearPositive, parts)
    } else if c1.is_negative() {
        return reject("c1 < 0: the (2,2) entry is negative near 0+");
    } else {
        let schur = c2 - b1 * b1;
        if schur.is_negative() {
            return reject("c1 = 0 and c2 < b1^2: the determinant is negative near 0+");
        }
        if schur.is_positive() {
            // (ε + a₁x − αεx²)E₁ + (1/(1−ε))·(1−ε, b₁x)ᵀ(1−ε, b₁x) + x²·Q
            let half = Rational::new(1.into(), 2.into());
            let mut eps = half.clone();
            while !(c2 - b1 * b1 / (&one - &eps)).is_positive() {
                eps = &eps * &half;
            }
            let corner = c2 - b1 * b1 / (&one - &eps);
            let q = |al: &Rational| m2(&(a2 + al * &eps), b2, &corner);
            let Some(alpha) = doubling(|al| pd_constant(&q(al)))? else {
                return reject("no admissible alpha");
            };
            let row = MatrixPolynomial::from_rows(vec![vec![
                Polynomial::constant(1, &one - &eps),
                Polynomial::var(1, 0).scale(b1),
            ]])?;
            let parts = vec![
                (quad(&eps, a1, &-(&alpha * &eps)), unit_e1()),
                (
                    Polynomial::constant(1, &one / (&one - &eps)),
                    Factor::Square(row),
                ),
                (quad(&zero, &zero, &one), Factor::ConstPsd(q(&alpha))),
            ];
            (QuadraticBranch::SchurPositive, parts)
        } else if b1.is_zero() {
            // c₂ = 0 too
            if !b2.is_zero() {
                return reject("c1 = c2 = b1 = 0 but b2 != 0: the determinant is -b2^2 x^4");
            }
            (
                QuadraticBranch::Degenerate,
                vec![(quad(&one, a1, a2), unit_e1())],
            )
        } else {
            // (1 + kx, b₁x)ᵀ(1 + kx, b₁x) + (x·L + x²(a₂ − k²))E₁, k = b₂/b₁
            let k = b2 / b1;
            let lin = a1 - &k * Rational::from_integer(2.into());
            let rest = a2 - &k * &k;
            let branch = if lin.is_positive() {
                QuadraticBranch::RankOneStrict
            } else if lin.is_zero() {
                if rest.is_negative() {
                    return reject("a1 - 2 b2/b1 = 0 and a2 b1^2 - b2^2 < 0");
                }
                QuadraticBranch::RankOneCritical
            } else {
                return reject("a1 - 2 b2/b1 < 0: the determinant is negative near 0+");
            };
            let row = MatrixPolynomial::from_rows(vec![vec![
                quad(&one, &k, &zero),
                Polynomial::var(1, 0).scale(b1),
            ]])?;
            let mut parts = vec![(Polynomial::one(1), Factor::Square(row))];
            let w = quad(&zero, &lin, &rest);
            if !w.is_zero() {
                parts.push((w, unit_e1()));
            }
            (branch, parts)
        }
    };
    match assemble(target, parts)? {
        Some(certificate) => Ok(QuadraticOutcome::Certified {
            branch,
            certificate,
        }),
        None => reject("no interval [0, delta] on which the weights are provably nonnegative"),
    }
}
