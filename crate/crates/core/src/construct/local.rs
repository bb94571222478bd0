//! Elimination of off-diagonal entries around a point where the matrix is
//! positive definite.

use num_traits::{One, Signed, Zero};

use crate::certkit::{pd_constant, Factor, Proof, Term};
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::{approximate, to_f64};
use crate::poly::{Polynomial, Rational};

const MAX_HALVINGS: usize = 64;

/// `Σ x_i^d` with its obvious sum-of-squares proof, `d` even.
pub fn power_sum(nvars: usize, d: u32) -> (Polynomial, Vec<(Rational, Polynomial)>) {
    let mut p = Polynomial::zero(nvars);
    let mut sos = Vec::new();
    for i in 0..nvars {
        let h = Polynomial::var(nvars, i).pow(d / 2);
        p = p + &h * &h;
        sos.push((Rational::one(), h));
    }
    (p, sos)
}

fn rank_one_row(v: &[Rational], nvars: usize) -> MatrixPolynomial {
    let row = v
        .iter()
        .map(|c| Polynomial::constant(nvars, c.clone()))
        .collect();
    MatrixPolynomial::from_rows(vec![row]).expect("nonempty")
}

/// Writes `A = ε·p·J + Σ σ r_ij(x)·K_ij + Σ r_kk(x)·E_k` exactly, where `J` is
/// the all-ones matrix, the `K_ij` are constant psd matrices and all weights
/// are positive at `x0`. `mass` is `p` (positive near `x0`) with a
/// sum-of-squares proof; every other weight gets `weight_proof`.
///
/// The identity holds on all of ℝⁿ; only the signs of the weights are local.
pub fn eliminate_at(
    a: &MatrixPolynomial,
    x0: &[Rational],
    mass: &(Polynomial, Vec<(Rational, Polynomial)>),
    weight_proof: &Proof,
) -> Result<Vec<Term>> {
    let m = a.rows();
    if (0..m).all(|i| (0..i).all(|j| a.get(i, j).is_zero())) {
        // already diagonal: no perturbation needed
        if !pd_constant(&a.evaluate(x0)?)? {
            return Err(Error::NotPositiveDefinite {
                point: fmt_point(x0),
            });
        }
        return Ok((0..m)
            .filter(|&k| !a.get(k, k).is_zero())
            .map(|k| Term::unit(a.get(k, k).clone(), m, k, weight_proof.clone()))
            .collect());
    }
    let signs = vec![Rational::one(); m];
    let eps = admissible_eps(a, x0, &mass.0, &signs)?;
    eliminate_with(a, x0, mass, weight_proof, &signs, &eps)
}

fn sign_outer(signs: &[Rational]) -> QMatrix {
    QMatrix::outer(signs)
}

/// The largest `ε = 2^-k` for which `A − ε·p·ssᵀ` is positive definite at
/// `x0` with every nonzero off-diagonal entry nonzero there.
pub(crate) fn admissible_eps(
    a: &MatrixPolynomial,
    x0: &[Rational],
    p: &Polynomial,
    signs: &[Rational],
) -> Result<Rational> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let m = a.rows();
    let a0 = a.evaluate(x0)?;
    if !pd_constant(&a0)? {
        return Err(Error::NotPositiveDefinite {
            point: fmt_point(x0),
        });
    }
    let p0 = p.evaluate(x0)?;
    let j = sign_outer(signs);
    let mut eps = Rational::one();
    for _ in 0..MAX_HALVINGS {
        let b0 = a0.sub(&j.scale(&(&eps * &p0)));
        let b = a.sub(&MatrixPolynomial::scaled_constant(&p.scale(&eps), &j));
        let generic =
            (0..m).all(|i| (0..i).all(|k| b.get(i, k).is_zero() || !b0.get(i, k).is_zero()));
        if generic && pd_constant(&b0)? {
            return Ok(eps);
        }
        eps /= Rational::from_integer(2.into());
    }
    Err(Error::Construction(
        "no admissible perturbation found".into(),
    ))
}

/// [`eliminate_at`] with the perturbation `ε·p·ssᵀ` given explicitly; `ε`
/// must be admissible in the sense of [`admissible_eps`] (or smaller).
pub(crate) fn eliminate_with(
    a: &MatrixPolynomial,
    x0: &[Rational],
    mass: &(Polynomial, Vec<(Rational, Polynomial)>),
    weight_proof: &Proof,
    signs: &[Rational],
    eps: &Rational,
) -> Result<Vec<Term>> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let m = a.rows();
    let n = a.nvars();
    let (p, p_sos) = mass;
    let j = sign_outer(signs);
    let mut r = a.sub(&MatrixPolynomial::scaled_constant(&p.scale(eps), &j));
    if !pd_constant(&r.evaluate(x0)?)? {
        return Err(Error::NotPositiveDefinite {
            point: fmt_point(x0),
        });
    }
    let mut terms = vec![Term::new(
        p.scale(eps),
        Factor::Square(rank_one_row(signs, n)),
        Proof::ExplicitSos(p_sos.iter().map(|(c, h)| (c * eps, h.clone())).collect()),
    )];
    for i in 1..m {
        for jj in 0..i {
            let rij = r.get(i, jj).clone();
            if rij.is_zero() {
                continue;
            }
            let r0 = r.evaluate(x0)?;
            let v0 = rij.evaluate(x0)?;
            if v0.is_zero() {
                return Err(Error::Construction(format!(
                    "entry ({}, {}) vanishes at the centre",
                    i + 1,
                    jj + 1
                )));
            }
            let sigma = if v0.is_positive() {
                Rational::one()
            } else {
                -Rational::one()
            };
            let abs0 = v0.abs();
            let weight = rij.scale(&sigma);
            let factor = match rank_one_step(&r0, i, jj, &sigma, &abs0)? {
                Some(v) => Factor::Square(rank_one_row(&v, n)),
                None => Factor::ConstPsd(c_step(&r0, i, jj, &abs0)?),
            };
            let t = Term::new(weight, factor, weight_proof.clone());
            r = r.sub(&t.contribution(m)?);
            debug_assert!(r.get(i, jj).is_zero());
            terms.push(t);
        }
    }
    for k in 0..m {
        let w = r.get(k, k).clone();
        if w.is_zero() {
            continue;
        }
        terms.push(Term::unit(w, m, k, weight_proof.clone()));
    }
    Ok(terms)
}

/// `v = a·e_i + (σ/a)·e_j` with `R(x0) − |r0|·vvᵀ` still positive definite.
fn rank_one_step(
    r0: &QMatrix,
    i: usize,
    j: usize,
    sigma: &Rational,
    abs0: &Rational,
) -> Result<Option<Vec<Rational>>> {
    let inv = r0
        .inverse()
        .ok_or_else(|| Error::Construction("singular centre value".into()))?;
    let ratio = to_f64(inv.get(j, j)) / to_f64(inv.get(i, i));
    let a = approximate(ratio.powf(0.25), 1 << 20);
    if a.is_zero() || !ratio.is_finite() {
        return Ok(None);
    }
    let mut v = vec![Rational::zero(); r0.rows()];
    v[i] = a.clone();
    v[j] = sigma / &a;
    let rest = r0.sub(&QMatrix::outer(&v).scale(abs0));
    Ok(pd_constant(&rest)?.then_some(v))
}

/// `K = C − δG` with `C = R(x0)/|r0|` and `G = Id + η·(off-diagonal part of
/// C without the (i, j) pair)`: `K` is psd with `K_ij = σ`, and what is left,
/// `|r0|·δ·G`, is positive definite with the other off-diagonal entries still
/// nonzero.
fn c_step(r0: &QMatrix, i: usize, j: usize, abs0: &Rational) -> Result<QMatrix> {
    let m = r0.rows();
    let c = r0.scale(&(Rational::one() / abs0));
    let mut off = c.clone();
    for k in 0..m {
        off.set(k, k, Rational::zero());
    }
    off.set(i, j, Rational::zero());
    off.set(j, i, Rational::zero());
    let half = Rational::new(1.into(), 2.into());
    let mut eta = Rational::one();
    let mut g = None;
    for _ in 0..MAX_HALVINGS {
        let cand = QMatrix::identity(m).add(&off.scale(&eta));
        if pd_constant(&cand)? {
            g = Some(cand);
            break;
        }
        eta *= &half;
    }
    let g = g.ok_or_else(|| Error::Construction("no admissible G".into()))?;
    let mut delta = Rational::one();
    for _ in 0..MAX_HALVINGS {
        let k = c.sub(&g.scale(&delta));
        if pd_constant(&k)? {
            return Ok(k);
        }
        delta *= &half;
    }
    Err(Error::Construction("no admissible δ".into()))
}

pub(crate) fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(crate::poly::rational::fmt_rational).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::{int, rat};

    fn check_identity(a: &MatrixPolynomial, terms: &[Term]) {
        let m = a.rows();
        let mut s = MatrixPolynomial::zeros(m, m, a.nvars());
        for t in terms {
            s = s.add(&t.contribution(m).unwrap());
        }
        assert_eq!(&s, a);
    }

    #[test]
    fn two_by_two() {
        let v = ["x", "y"];
        let a = MatrixPolynomial::parse_rows(&[&["2*x^2+y^2", "x*y"], &["x*y", "x^2+2*y^2"]], &v)
            .unwrap();
        let x0 = [rat(3, 5), rat(4, 5)];
        let terms = eliminate_at(
            &a,
            &x0,
            &power_sum(2, 2),
            &Proof::Sampled {
                samples: 10,
                seed: 0,
            },
        )
        .unwrap();
        check_identity(&a, &terms);
        for t in &terms {
            assert!(t.weight.evaluate(&x0).unwrap().is_positive());
        }
    }

    #[test]
    fn three_by_three_choi() {
        let v = ["x", "y", "z"];
        let a = MatrixPolynomial::parse_rows(
            &[
                &["x^2+2*z^2", "-x*y", "-x*z"],
                &["-x*y", "y^2+2*x^2", "-y*z"],
                &["-x*z", "-y*z", "z^2+2*y^2"],
            ],
            &v,
        )
        .unwrap();
        let x0 = [rat(2, 3), rat(2, 3), rat(1, 3)];
        let terms = eliminate_at(
            &a,
            &x0,
            &power_sum(3, 2),
            &Proof::Sampled {
                samples: 10,
                seed: 0,
            },
        )
        .unwrap();
        check_identity(&a, &terms);
        for t in &terms {
            assert!(t.weight.evaluate(&x0).unwrap().is_positive());
        }
        // singular at a coordinate point
        assert!(eliminate_at(
            &a,
            &[int(1), int(0), int(0)],
            &power_sum(3, 2),
            &Proof::Sampled {
                samples: 1,
                seed: 0
            }
        )
        .is_err());
    }
}
