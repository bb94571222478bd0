//! Nonnegativity proofs on boxes from Bernstein coefficients.
//!
//! On `[0, w]` (per variable, after shifting the lower corner to 0) a
//! polynomial of degree `d` is `Σ_k b_k C(d,k) u^k (w−u)^{d−k} / w^d`; when
//! every `b_k ≥ 0` this is already a cone combination of the box
//! constraints.

use num_traits::{Signed, Zero};

use super::types::{ConeItem, Proof};
use crate::error::{Error, Result};
use crate::poly::rational::{binomial, pow};
use crate::poly::{MultiIndex, Polynomial, Rational};

fn odometer(limits: &[u32]) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; limits.len()];
    loop {
        out.push(MultiIndex(cur.clone()));
        let mut i = 0;
        loop {
            if i == limits.len() {
                return out;
            }
            if cur[i] < limits[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// A cone-combination proof that `f ≥ 0` on the box, for a piece built with
/// [`super::Piece::boxed`] (constraint `2i` is `x_i − lo_i`, `2i+1` is
/// `hi_i − x_i`). Returns `None` when some Bernstein coefficient is negative.
pub fn prove_on_box(f: &Polynomial, bounds: &[(Rational, Rational)]) -> Result<Option<Proof>> {
    prove_on_box_elevated(f, bounds, 0)
}

/// [`prove_on_box`] with the Bernstein degree raised by `extra` in every
/// variable; higher degree gives a finer control net.
pub fn prove_on_box_elevated(
    f: &Polynomial,
    bounds: &[(Rational, Rational)],
    extra: u32,
) -> Result<Option<Proof>> {
    let n = f.nvars();
    if bounds.len() != n {
        return Err(Error::Dimension(format!(
            "box has {} sides for {n} variables",
            bounds.len()
        )));
    }
    if bounds.iter().any(|(lo, hi)| lo >= hi) {
        return Err(Error::InvalidArgument("degenerate box".into()));
    }
    if f.is_zero() {
        return Ok(Some(Proof::ConeCombination(Vec::new())));
    }
    let lo: Vec<Rational> = bounds.iter().map(|b| b.0.clone()).collect();
    let w: Vec<Rational> = bounds.iter().map(|(a, b)| b - a).collect();
    let g = f.taylor_shift(&lo, &vec![1; n])?;
    // common monomial factor u^γ
    let gamma: Vec<u32> = (0..n)
        .map(|i| g.terms().map(|(m, _)| m.0[i]).min().unwrap_or(0))
        .collect();
    let mut h = Polynomial::zero(n);
    for (m, c) in g.terms() {
        let e: Vec<u32> = m.0.iter().zip(&gamma).map(|(a, b)| a - b).collect();
        h.add_term(MultiIndex(e), c.clone());
    }
    let d: Vec<u32> = (0..n)
        .map(|i| h.degree_in(i).max(0) as u32 + extra)
        .collect();
    let coeffs: Vec<(MultiIndex, Rational)> =
        h.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let mut items = Vec::new();
    for k in odometer(&d) {
        let mut b = Rational::zero();
        for (j, a) in &coeffs {
            if !j.divides(&k) {
                continue;
            }
            let mut t = a.clone();
            for i in 0..n {
                t *= pow(&w[i], j.0[i]);
                t *= Rational::new(binomial(k.0[i], j.0[i]), binomial(d[i], j.0[i]));
            }
            b += t;
        }
        if b.is_negative() {
            return Ok(None);
        }
        if b.is_zero() {
            continue;
        }
        let mut coeff = b;
        let mut generators = Vec::new();
        for i in 0..n {
            coeff *= Rational::from_integer(binomial(d[i], k.0[i])) / pow(&w[i], d[i]);
            generators.extend(std::iter::repeat(2 * i).take((k.0[i] + gamma[i]) as usize));
            generators.extend(std::iter::repeat(2 * i + 1).take((d[i] - k.0[i]) as usize));
        }
        items.push(ConeItem::new(coeff, Polynomial::one(n), generators));
    }
    Ok(Some(Proof::ConeCombination(items)))
}

/// Tries [`prove_on_box_elevated`] with `extra = 0..=max_extra`.
pub fn prove_on_box_any(
    f: &Polynomial,
    bounds: &[(Rational, Rational)],
    max_extra: u32,
) -> Result<Option<Proof>> {
    for e in 0..=max_extra {
        if let Some(p) = prove_on_box_elevated(f, bounds, e)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}
