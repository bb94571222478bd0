//! The domination condition at a point, certificates on orthant
//! neighbourhoods, the univariate certificate at `0⁺` and the explicit
//! quadratic 2×2 case analysis.

mod quadratic;
mod zero_plus;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

pub use quadratic::{certify_quadratic_2x2, QuadraticBranch, QuadraticOutcome};
pub use zero_plus::univariate_certificate_at_zero;

use crate::certkit::{
    prove_on_box_any, psd_constant, Coverage, Factor, Piece, PiecewiseCertificate, Proof, Term,
};
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::pow;
use crate::poly::{MultiIndex, Polynomial, Rational};

/// Largest multiplier tried by [`minimal_r`].
pub const R_BOUND: u64 = 1 << 32;
/// `minimal_r` bisects to this resolution.
pub const R_RESOLUTION_BITS: u32 = 16;
/// Degree elevation allowed when proving orthant weights.
const MAX_ELEVATION: u32 = 16;

/// `x = x₀ + ε·X` with `0 < X_i < radius`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orthant {
    pub center: Vec<Rational>,
    pub signs: Vec<i8>,
    pub radius: Rational,
}

impl Orthant {
    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.center.len()
            && x.iter()
                .zip(&self.center)
                .zip(&self.signs)
                .all(|((xi, ci), &s)| {
                    let d = if s < 0 { ci - xi } else { xi - ci };
                    d > Rational::zero() && d < self.radius
                })
    }
}

/// The componentwise-minimal multi-indices `β` with `A^{(β)}(x₀) ≠ 0`, with
/// those derivative matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSet {
    pub elements: Vec<(MultiIndex, QMatrix)>,
}

impl GammaSet {
    pub fn indices(&self) -> Vec<MultiIndex> {
        self.elements.iter().map(|(b, _)| b.clone()).collect()
    }

    /// Whether every element has even coordinates (expected when `A` is psd
    /// near `x₀`).
    pub fn all_even(&self) -> bool {
        self.elements.iter().all(|(b, _)| b.all_even())
    }
}

/// For every `α` with `A^{(α)}(x₀) ≠ 0`: the `β ∈ Γ` it is assigned to and
/// `r` with `r·A^{(β)}(x₀) ± A^{(α)}(x₀)` psd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationWitness {
    pub center: Vec<Rational>,
    pub gamma: GammaSet,
    pub entries: BTreeMap<MultiIndex, (MultiIndex, Rational)>,
    /// `A^{(α)}(x₀)` for every `α` of the support.
    pub derivatives: BTreeMap<MultiIndex, QMatrix>,
}

impl DominationWitness {
    /// Re-checks every psd condition exactly.
    pub fn validate(&self) -> Result<bool> {
        for (alpha, (beta, r)) in &self.entries {
            let (Some(a), Some(b)) = (self.derivatives.get(alpha), self.derivatives.get(beta))
            else {
                return Ok(false);
            };
            if !beta.divides(alpha) {
                return Ok(false);
            }
            let rb = b.scale(r);
            if !psd_constant(&rb.add(a))? || !psd_constant(&rb.sub(a))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominationOutcome {
    Satisfied(DominationWitness),
    /// No `β ≤ α` in Γ and `r ≤ 2³²` work for this `α` (the first in lex
    /// order).
    Fails {
        alpha: MultiIndex,
    },
}

/// `A^{(α)}(x₀)` for every `α` in the Taylor support at `x₀`.
pub fn taylor_derivatives(
    a: &MatrixPolynomial,
    x0: &[Rational],
) -> Result<BTreeMap<MultiIndex, QMatrix>> {
    let n = a.nvars();
    if x0.len() != n {
        return Err(Error::NvarsMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    let shifted = a.taylor_shift(x0, &vec![1; n])?;
    Ok(shifted
        .support()
        .into_iter()
        .map(|alpha| {
            let f = Rational::from_integer(alpha.factorial());
            let q = shifted.coefficient(&alpha).scale(&f);
            (alpha, q)
        })
        .filter(|(_, q)| !q.is_zero())
        .collect())
}

fn minimal_elements(support: &[MultiIndex]) -> Vec<MultiIndex> {
    support
        .iter()
        .filter(|b| !support.iter().any(|o| o != *b && o.divides(b)))
        .cloned()
        .collect()
}

pub fn gamma_set(a: &MatrixPolynomial, x0: &[Rational]) -> Result<GammaSet> {
    if a.is_zero() {
        return Err(Error::InvalidArgument(
            "the zero matrix has no Γ-set".into(),
        ));
    }
    let ders = taylor_derivatives(a, x0)?;
    let support: Vec<MultiIndex> = ders.keys().cloned().collect();
    Ok(GammaSet {
        elements: minimal_elements(&support)
            .into_iter()
            .map(|b| {
                let q = ders[&b].clone();
                (b, q)
            })
            .collect(),
    })
}

/// Smallest `r` (to resolution `2^-16`, rounded up) with `rB ± A` both psd,
/// or `None` if no `r ≤ 2³²` works.
pub fn minimal_r(b: &QMatrix, a: &QMatrix) -> Result<Option<Rational>> {
    if !psd_constant(b)? {
        return Err(Error::NotPsd("dominating matrix".into()));
    }
    if !a.is_symmetric() || a.rows() != b.rows() {
        return Err(Error::Dimension(
            "minimal_r needs symmetric matrices of one size".into(),
        ));
    }
    if a.is_zero() {
        return Ok(Some(Rational::zero()));
    }
    let valid = |r: &Rational| -> Result<bool> {
        let rb = b.scale(r);
        Ok(psd_constant(&rb.add(a))? && psd_constant(&rb.sub(a))?)
    };
    let two = Rational::from_integer(2.into());
    let bound = Rational::from_integer(R_BOUND.into());
    let mut hi = Rational::one();
    while !valid(&hi)? {
        hi = &hi * &two;
        if hi > bound {
            return Ok(None);
        }
    }
    let mut lo = if hi > Rational::one() {
        &hi / &two
    } else {
        Rational::zero()
    };
    let resolution = Rational::new(1.into(), (1i64 << R_RESOLUTION_BITS).into());
    while &hi - &lo > resolution {
        let mid = (&lo + &hi) / &two;
        if valid(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Checks the domination condition at `x₀`; every `α` of the support is
/// checked (elements of Γ against themselves, which amounts to psd-ness).
pub fn check_domination(a: &MatrixPolynomial, x0: &[Rational]) -> Result<DominationOutcome> {
    let derivatives = taylor_derivatives(a, x0)?;
    if derivatives.is_empty() {
        return Err(Error::InvalidArgument(
            "the zero matrix has no Γ-set".into(),
        ));
    }
    let support: Vec<MultiIndex> = derivatives.keys().cloned().collect();
    let mut gamma_idx = minimal_elements(&support);
    gamma_idx.sort();
    let mut entries = BTreeMap::new();
    for alpha in &support {
        let aq = &derivatives[alpha];
        let mut found = None;
        for beta in gamma_idx.iter().filter(|b| b.divides(alpha)) {
            let bq = &derivatives[beta];
            if !psd_constant(bq)? {
                continue;
            }
            if let Some(r) = minimal_r(bq, aq)? {
                found = Some((beta.clone(), r));
                break;
            }
        }
        match found {
            Some(e) => {
                entries.insert(alpha.clone(), e);
            }
            None => {
                return Ok(DominationOutcome::Fails {
                    alpha: alpha.clone(),
                })
            }
        }
    }
    let gamma = GammaSet {
        elements: gamma_idx
            .iter()
            .map(|b| (b.clone(), derivatives[b].clone()))
            .collect(),
    };
    Ok(DominationOutcome::Satisfied(DominationWitness {
        center: x0.to_vec(),
        gamma,
        entries,
        derivatives,
    }))
}

fn monomial_poly(alpha: &MultiIndex, c: Rational) -> Polynomial {
    Polynomial::monomial(alpha.clone(), c)
}

fn sign_power(signs: &[i8], alpha: &MultiIndex) -> Rational {
    let odd = alpha
        .0
        .iter()
        .zip(signs)
        .filter(|(&a, &s)| s < 0 && a % 2 == 1)
        .count();
    if odd % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// The single-piece certificate of `A(x₀ + εX)` (variables `X`) on the box
/// `[0, R]ⁿ`: per `β ∈ Γ` the weight `X^β/β!·(1 − Σ (β!/α!)·r·X^{α−β})` on
/// `ε^β A^{(β)}(x₀)`, per other `α` the weight `X^α/α!` on
/// `ε^α A^{(α)}(x₀) + r·A^{(β)}(x₀)`. `R` is halved until the brackets are
/// provably positive; weights get Bernstein proofs where those succeed and
/// sampled proofs otherwise.
pub fn orthant_certificate_from_domination(
    a: &MatrixPolynomial,
    signs: &[i8],
    w: &DominationWitness,
    vars: &[String],
) -> Result<(PiecewiseCertificate, Orthant)> {
    let n = a.nvars();
    let x0 = &w.center;
    if signs.len() != n || vars.len() != n {
        return Err(Error::Dimension(
            "one sign and one name per variable".into(),
        ));
    }
    if !w.validate()? {
        return Err(Error::InvalidArgument("invalid domination witness".into()));
    }
    let target = a.taylor_shift(x0, signs)?;
    let m = a.rows();
    let one = Rational::one();
    // bracket polynomials, one per β
    let mut brackets: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
    for (beta, q) in &w.gamma.elements {
        if !psd_constant(&q.scale(&sign_power(signs, beta)))? {
            return Err(Error::InvalidArgument(format!(
                "ε^β·A^(β) is not psd for β = {:?}",
                beta.0
            )));
        }
        brackets.insert(beta.clone(), Polynomial::one(n));
    }
    for (alpha, (beta, r)) in &w.entries {
        if alpha == beta {
            continue;
        }
        let rest = alpha.checked_sub(beta).expect("β ≤ α");
        let c = Rational::new(beta.factorial(), alpha.factorial()) * r * sign_power(signs, beta);
        let b = brackets.get_mut(beta).expect("β in Γ");
        *b = &*b - &monomial_poly(&rest, c);
    }
    // radius: Σ |coeff|·R^{|α−β|} < 1 for every bracket
    let half = Rational::new(1.into(), 2.into());
    let mut radius = one.clone();
    for _ in 0..64 {
        let ok = brackets.values().all(|b| {
            let s: Rational = b
                .terms()
                .filter(|(mm, _)| !mm.is_zero())
                .map(|(mm, c)| num_traits::Signed::abs(c) * pow(&radius, mm.degree()))
                .sum();
            s < one
        });
        if ok {
            break;
        }
        radius = &radius * &half;
    }
    let bounds = vec![(Rational::zero(), radius.clone()); n];
    let prove = |f: &Polynomial, seed: u64| -> Result<Proof> {
        Ok(prove_on_box_any(f, &bounds, MAX_ELEVATION)?
            .unwrap_or(Proof::Sampled { samples: 200, seed }))
    };
    let mut terms = Vec::new();
    for (k, (beta, q)) in w.gamma.elements.iter().enumerate() {
        let inv = Rational::new(1.into(), beta.factorial());
        let weight = &monomial_poly(beta, inv) * &brackets[beta];
        let factor = q.scale(&sign_power(signs, beta));
        terms.push(Term::new(
            weight.clone(),
            Factor::ConstPsd(factor),
            prove(&weight, k as u64)?,
        ));
    }
    for (k, (alpha, (beta, r))) in w.entries.iter().enumerate() {
        if alpha == beta {
            continue;
        }
        let weight = monomial_poly(alpha, Rational::new(1.into(), alpha.factorial()));
        let factor = w.derivatives[alpha]
            .scale(&sign_power(signs, alpha))
            .add(&w.derivatives[beta].scale(r));
        let proof = prove(&weight, 1000 + k as u64)?;
        terms.push(Term::new(weight, Factor::ConstPsd(factor), proof));
    }
    let label = format!(
        "orthant, radius {}",
        crate::poly::rational::fmt_rational(&radius)
    );
    let mut cert = PiecewiseCertificate::new(vars.to_vec(), target, Coverage::Local);
    cert.push_piece(Piece::boxed(label, &bounds), terms);
    debug_assert_eq!(cert.size(), m);
    Ok((
        cert,
        Orthant {
            center: x0.clone(),
            signs: signs.to_vec(),
            radius,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certkit::{verify_certificate, VerifyOptions};
    use crate::poly::rational::{int, rat};

    fn names(n: usize) -> Vec<String> {
        ["X", "Y", "Z"][..n].iter().map(|s| s.to_string()).collect()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn gamma_examples() {
        let v = ["X", "Y"];
        let a = MatrixPolynomial::parse_rows(&[&["1+X", "Y"], &["Y", "2"]], &v).unwrap();
        let g = gamma_set(&a, &[int(0), int(0)]).unwrap();
        assert_eq!(g.indices(), vec![mi(&[0, 0])]);
        let a = MatrixPolynomial::parse_rows(&[&["X^2", "0"], &["0", "Y^2"]], &v).unwrap();
        let mut g = gamma_set(&a, &[int(0), int(0)]).unwrap().indices();
        g.sort();
        assert_eq!(g, vec![mi(&[0, 2]), mi(&[2, 0])]);
        let a = MatrixPolynomial::parse_rows(&[&["X^2", "0"], &["0", "0"]], &v).unwrap();
        let g = gamma_set(&a, &[int(0), int(0)]).unwrap();
        assert_eq!(g.indices(), vec![mi(&[2, 0])]);
        assert!(g.all_even());
    }

    #[test]
    fn minimal_r_examples() {
        let id = QMatrix::identity(2);
        let swap = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let r = minimal_r(&id, &swap).unwrap().unwrap();
        assert!(r >= int(1) && r <= int(1) + rat(1, 1 << 16));
        assert_eq!(minimal_r(&id, &QMatrix::zeros(2, 2)).unwrap(), Some(int(0)));
        let b = QMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let a = QMatrix::from_i64(&[&[0, 0], &[0, 1]]);
        assert_eq!(minimal_r(&b, &a).unwrap(), None);
        assert!(minimal_r(&QMatrix::from_i64(&[&[-1]]), &QMatrix::from_i64(&[&[1]])).is_err());
    }

    #[test]
    fn pd_constant_plus_small_terms() {
        let v = ["X", "Y"];
        let a = MatrixPolynomial::parse_rows(
            &[&["2+X/8", "1/2+X*Y/16"], &["1/2+X*Y/16", "1-Y/16"]],
            &v,
        )
        .unwrap();
        let x0 = [int(0), int(0)];
        let DominationOutcome::Satisfied(w) = check_domination(&a, &x0).unwrap() else {
            panic!("domination should hold");
        };
        assert!(w.entries.values().all(|(b, _)| b.is_zero()));
        let (cert, orthant) =
            orthant_certificate_from_domination(&a, &[1, -1], &w, &names(2)).unwrap();
        assert!(orthant.radius > int(0));
        let r = verify_certificate(&cert, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.identities_exact());
    }

    #[test]
    fn constant_pd_gives_single_term() {
        let a = MatrixPolynomial::parse_rows(&[&["2", "1"], &["1", "2"]], &["X"]).unwrap();
        let DominationOutcome::Satisfied(w) = check_domination(&a, &[int(3)]).unwrap() else {
            panic!()
        };
        let (cert, _) = orthant_certificate_from_domination(&a, &[1], &w, &names(1)).unwrap();
        assert_eq!(cert.pieces[0].terms.len(), 1);
        assert_eq!(cert.pieces[0].terms[0].weight, Polynomial::one(1));
        assert!(verify_certificate(&cert, &VerifyOptions::default())
            .unwrap()
            .fully_exact());
    }

    #[test]
    fn square_times_pd() {
        let v = ["X", "Y"];
        let a = MatrixPolynomial::parse_rows(&[&["2*X^2", "X^2"], &["X^2", "X^2"]], &v).unwrap();
        let DominationOutcome::Satisfied(w) = check_domination(&a, &[int(0), int(0)]).unwrap()
        else {
            panic!()
        };
        let (cert, _) = orthant_certificate_from_domination(&a, &[-1, 1], &w, &names(2)).unwrap();
        let t = &cert.pieces[0].terms;
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].weight, Polynomial::parse("X^2/2", &v).unwrap());
        assert!(verify_certificate(&cert, &VerifyOptions::default())
            .unwrap()
            .fully_exact());
    }

    #[test]
    fn quadratic_example_with_positive_c1_is_not_dominated() {
        // A(0) = diag(1, 0) ≠ 0 forces Γ = {0}, and the (2,2) entry of
        // r·A(0) − A'(0) is −c₁ for every r
        let a = MatrixPolynomial::parse_rows(
            &[&["1+x-x^2", "2*x+x^2"], &["2*x+x^2", "x+3*x^2"]],
            &["x"],
        )
        .unwrap();
        assert_eq!(
            check_domination(&a, &[int(0)]).unwrap(),
            DominationOutcome::Fails { alpha: mi(&[1]) }
        );
    }

    #[test]
    fn dominated_univariate() {
        let a =
            MatrixPolynomial::parse_rows(&[&["x^2+x^3", "x^3"], &["x^3", "x^2"]], &["x"]).unwrap();
        let DominationOutcome::Satisfied(w) = check_domination(&a, &[int(0)]).unwrap() else {
            panic!()
        };
        assert_eq!(w.gamma.indices(), vec![mi(&[2])]);
        let (cert, _) = orthant_certificate_from_domination(&a, &[1], &w, &names(1)).unwrap();
        let r = verify_certificate(&cert, &VerifyOptions::default()).unwrap();
        assert!(r.fully_exact(), "{r}");
    }

    #[test]
    fn corner_shift_fails() {
        let v = ["H", "Y"];
        let m = MatrixPolynomial::parse_rows(&[&["1+x^2-y^2", "-x"], &["-x", "y^2"]], &["x", "y"])
            .unwrap();
        let x = Polynomial::parse("1+Y+H", &v).unwrap();
        let y = Polynomial::parse("1+Y", &v).unwrap();
        let shifted = m.substitute(&[x, y]).unwrap();
        let p = MatrixPolynomial::parse_rows(&[&["1", "-1"], &["1", "1"]], &v).unwrap();
        let q = MatrixPolynomial::parse_rows(&[&["1", "1"], &["-1", "1"]], &v).unwrap();
        let n = p.mul(&shifted).mul(&q);
        assert!(n.is_symmetric());
        match check_domination(&n, &[int(0), int(0)]).unwrap() {
            DominationOutcome::Fails { alpha } => assert_eq!(alpha, mi(&[0, 1])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orthant_membership() {
        let o = Orthant {
            center: vec![int(1), int(1)],
            signs: vec![1, -1],
            radius: rat(1, 4),
        };
        assert!(o.contains(&[rat(9, 8), rat(7, 8)]));
        assert!(!o.contains(&[rat(7, 8), rat(7, 8)]));
        assert!(!o.contains(&[int(1), rat(7, 8)]));
    }
}
