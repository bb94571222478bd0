//! Certificates on `(0, δ)` for univariate matrix polynomials that are psd
//! just to the right of 0, through the Smith normal form.

use num_traits::{One, Signed, Zero};

use crate::certkit::{
    ldl_or_witness, prove_on_box_any, psd_constant, Coverage, Factor, Piece, PiecewiseCertificate,
    Proof, Term,
};
use crate::construct::eliminate_at;
use crate::error::{Error, Result};
use crate::matpoly::{block_starts, smith_normal_form, MatrixPolynomial, QMatrix};
use crate::poly::rational::fmt_rational;
use crate::poly::{Polynomial, Rational, UniPoly};

const MAX_DOUBLINGS: usize = 64;
const MAX_HALVINGS: usize = 48;
const MAX_ELEVATION: u32 = 8;

fn uni(p: &Polynomial) -> UniPoly {
    UniPoly::from_polynomial(p, 0).expect("one variable")
}

fn poly(u: &UniPoly) -> Polynomial {
    u.to_polynomial(1, 0)
}

/// `t ↦ M(t)` is psd at `t = 2^-k` for `k = 12..=24`.
fn psd_near_zero(m: &MatrixPolynomial) -> Result<Option<Rational>> {
    for k in 12..=24 {
        let t = Rational::new(1.into(), num_bigint::BigInt::one() << k);
        if !psd_constant(&m.evaluate(std::slice::from_ref(&t))?)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// A certificate for `M` on `[0, δ]`: `F⁻ᵀ M F⁻¹ = E'·D` splits as
/// `Σ_i d_{k_i}·N_i` over the blocks of the Smith diagonal, with shifts
/// `μ_i` making each `s_i·N_i(0)` positive definite (`s_i` the sign of
/// `d_{k_i}` near `0⁺`); each `s_i·N_i` is then eliminated at 0 and mapped
/// back through `F`. `δ` is halved until every weight has a Bernstein proof.
pub fn univariate_certificate_at_zero(
    m: &MatrixPolynomial,
    vars: &[String],
) -> Result<PiecewiseCertificate> {
    if m.nvars() != 1 || vars.len() != 1 {
        return Err(Error::InvalidArgument(
            "the certificate at 0+ needs exactly one variable".into(),
        ));
    }
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if let Some(t) = psd_near_zero(m)? {
        return Err(Error::NotPsd(format!(
            "not psd at t = {}",
            fmt_rational(&t)
        )));
    }
    let size = m.rows();
    if let Some(cert) = diagonal_certificate(m, vars)? {
        return Ok(cert);
    }
    let smith = smith_normal_form(m)?;
    let rho = smith.rank();
    let f_inv = &smith.f_inv;
    let reduced = f_inv.transpose().mul(m).mul(f_inv);
    for i in 0..size {
        for j in 0..size {
            if (i >= rho || j >= rho) && !reduced.get(i, j).is_zero() {
                return Err(Error::Construction(
                    "reduced matrix is not supported on the rank block".into(),
                ));
            }
        }
    }
    let d: Vec<UniPoly> = smith.d[..rho].to_vec();
    let ks = if rho == 0 {
        Vec::new()
    } else {
        block_starts(&d)
    };
    let ends: Vec<usize> = (0..ks.len())
        .map(|i| ks.get(i + 1).copied().unwrap_or(rho))
        .collect();
    let signs: Vec<Rational> = ks
        .iter()
        .map(|&k| {
            if d[k].coeff(d[k].valuation()).is_negative() {
                -Rational::one()
            } else {
                Rational::one()
            }
        })
        .collect();
    // M̂_i: the entries whose larger index lies in block i, divided by d_{k_i}
    let mut hats = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let e = ends[i];
        let mut h = MatrixPolynomial::zeros(e, e, 1);
        for p in 0..e {
            for q in 0..e {
                if p.max(q) < k {
                    continue;
                }
                let v = uni(reduced.get(p, q));
                let quo = v.div_exact(&d[k]).ok_or_else(|| {
                    Error::Construction("entry not divisible by its invariant factor".into())
                })?;
                h.set(p, q, poly(&quo));
            }
        }
        hats.push(h);
    }
    // μ_i: s_i·M̂_i(0) + μ_i·Id on the earlier blocks is positive definite
    let zero = [Rational::zero()];
    let mut mus = vec![Rational::zero(); ks.len()];
    for i in 1..ks.len() {
        let base = hats[i].evaluate(&zero)?.scale(&signs[i]);
        let mut mu = Rational::one();
        let mut found = false;
        for _ in 0..MAX_DOUBLINGS {
            let mut c = base.clone();
            for p in 0..ks[i] {
                c.set(p, p, c.get(p, p) + &mu);
            }
            if crate::certkit::pd_constant(&c)? {
                found = true;
                break;
            }
            mu = &mu * Rational::from_integer(2.into());
        }
        if !found {
            return Err(Error::Construction(format!(
                "block {} is not positive definite at 0+",
                i + 1
            )));
        }
        mus[i] = mu;
    }
    let mass = (
        Polynomial::one(1),
        vec![(Rational::one(), Polynomial::one(1))],
    );
    let placeholder = Proof::Sampled {
        samples: 1,
        seed: 0,
    };
    // (weight, row in reduced coordinates)
    let mut parts: Vec<(Polynomial, Vec<Rational>)> = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let e = ends[i];
        let mut n_i = hats[i].clone();
        for p in 0..k {
            let v = n_i.get(p, p) + &Polynomial::constant(1, &signs[i] * &mus[i]);
            n_i.set(p, p, v);
        }
        for l in i + 1..ks.len() {
            let ratio = d[ks[l]].div_exact(&d[k]).expect("divisibility chain");
            let shift = poly(&ratio).scale(&(&signs[l] * &mus[l]));
            for p in k..e {
                let v = n_i.get(p, p) - &shift;
                n_i.set(p, p, v);
            }
        }
        let scaled = n_i.scale(&signs[i]);
        if !crate::certkit::pd_constant(&scaled.evaluate(&zero)?)? {
            return Err(Error::Construction(format!(
                "block {} is not positive definite at 0+",
                i + 1
            )));
        }
        let outer = poly(&d[k]).scale(&signs[i]);
        for t in eliminate_at(&scaled, &zero, &mass, &placeholder)? {
            let w = &outer * &t.weight;
            match &t.factor {
                Factor::Square(u) => {
                    let row: Vec<Rational> = (0..e).map(|c| u.get(0, c).constant_term()).collect();
                    parts.push((w, row));
                }
                Factor::ConstPsd(q) => {
                    let ldl = ldl_or_witness(q)?
                        .map_err(|_| Error::Construction("non-psd elimination step".into()))?;
                    for (dk, l) in ldl {
                        parts.push((w.scale(&dk), l));
                    }
                }
                Factor::UnivariatePsd(_) => unreachable!("elimination emits constant factors"),
            }
        }
    }
    // rows back through F: M = Fᵀ·(reduced)·F
    let f = &smith.f;
    let mut rows: Vec<(Polynomial, MatrixPolynomial)> = Vec::new();
    for (w, row) in parts {
        let mut padded = vec![Polynomial::zero(1); size];
        for (c, v) in row.iter().enumerate() {
            padded[c] = Polynomial::constant(1, v.clone());
        }
        let u = MatrixPolynomial::from_rows(vec![padded])?.mul(f);
        rows.push((w, u));
    }
    Ok(assemble(
        m,
        vars,
        rows.into_iter()
            .map(|(w, u)| (w, Factor::Square(u)))
            .collect(),
    )?)
}

/// The single piece `[0, δ]`, `δ` halved until every weight has a Bernstein
/// proof (sampled proofs if none is found).
fn assemble(
    m: &MatrixPolynomial,
    vars: &[String],
    parts: Vec<(Polynomial, Factor)>,
) -> Result<PiecewiseCertificate> {
    let mut delta = Rational::one();
    let mut proofs = None;
    for _ in 0..MAX_HALVINGS {
        let bounds = [(Rational::zero(), delta.clone())];
        let attempt: Option<Vec<Proof>> = parts
            .iter()
            .map(|(w, _)| prove_on_box_any(w, &bounds, MAX_ELEVATION))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        if let Some(p) = attempt {
            proofs = Some(p);
            break;
        }
        delta = &delta / Rational::from_integer(2.into());
    }
    let bounds = [(Rational::zero(), delta.clone())];
    let proofs = proofs.unwrap_or_else(|| {
        (0..parts.len())
            .map(|k| Proof::Sampled {
                samples: 200,
                seed: k as u64,
            })
            .collect()
    });
    let terms = parts
        .into_iter()
        .zip(proofs)
        .map(|((w, f), p)| Term::new(w, f, p))
        .collect();
    let mut cert = PiecewiseCertificate::new(vars.to_vec(), m.clone(), Coverage::Local);
    cert.push_piece(
        Piece::boxed(
            format!("0 <= {} <= {}", vars[0], fmt_rational(&delta)),
            &bounds,
        ),
        terms,
    );
    Ok(cert)
}

/// Diagonal input: the diagonal entries are the weights.
fn diagonal_certificate(
    m: &MatrixPolynomial,
    vars: &[String],
) -> Result<Option<PiecewiseCertificate>> {
    let size = m.rows();
    let diagonal = (0..size).all(|i| (0..size).all(|j| i == j || m.get(i, j).is_zero()));
    if !diagonal {
        return Ok(None);
    }
    let parts = (0..size)
        .filter(|&k| !m.get(k, k).is_zero())
        .map(|k| {
            (
                m.get(k, k).clone(),
                Factor::ConstPsd(QMatrix::unit_diagonal(size, k)),
            )
        })
        .collect();
    Ok(Some(assemble(m, vars, parts)?))
}
