//! Quadratic determinantal representations of univariate psd polynomials,
//! and determinant identities as sum-of-squares evidence.

use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use crate::certkit::{psd_constant, psd_univariate_scalar, PointSampler};
use crate::error::{Error, Result};
use crate::matpoly::{cauchy_binet_expand, determinant, sum_of_squares, MatrixPolynomial};
use crate::poly::rational::{approximate, from_f64_dyadic, to_f64};
use crate::poly::univariate::{isolate_real_roots, squarefree_decomposition};
use crate::poly::{Polynomial, Rational, UniPoly};

/// Real roots are isolated to this width.
pub const ISOLATION_BITS: u32 = 40;
/// Default relative residual tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Complex roots are refined in rational arithmetic, rounded to this many
/// bits after each Newton step.
const REFINE_BITS: u32 = 96;
const NEWTON_STEPS: usize = 4;
const DK_ITERATIONS: usize = 500;

/// A real root `α` (inside `[lo, hi]`; `lo = hi` when exact) of multiplicity
/// `2k` in the input, i.e. the factor `((x − α)²)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

/// A conjugate pair `−β ± iγ`, i.e. the factor `((x + β)² + γ²)^k`.
/// `exact` when the quadratic `x² + 2βx + β² + γ²` divides the input over ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexPair {
    pub beta: Rational,
    pub gamma_sq: Rational,
    pub multiplicity: u32,
    pub exact: bool,
}

impl ComplexPair {
    /// `x² + 2βx + β² + γ²`.
    pub fn quadratic(&self) -> UniPoly {
        UniPoly::new(vec![
            &self.beta * &self.beta + &self.gamma_sq,
            &self.beta * Rational::from_integer(2.into()),
            Rational::one(),
        ])
    }
}

/// `f = leading · Π (x − α_j)^{2k_j} · Π ((x + β_k)² + γ_k²)^{m_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFactorization {
    pub leading: Rational,
    pub real_roots: Vec<RealRoot>,
    pub complex_pairs: Vec<ComplexPair>,
}

impl QuadraticFactorization {
    /// The quadratic factors with multiplicity, using midpoints for
    /// approximate roots.
    pub fn quadratics(&self) -> Vec<UniPoly> {
        let mut out = Vec::new();
        for r in &self.real_roots {
            let q = UniPoly::linear_root(&r.midpoint()).pow(2);
            out.extend(std::iter::repeat_n(q, (r.multiplicity / 2) as usize));
        }
        for c in &self.complex_pairs {
            out.extend(std::iter::repeat_n(c.quadratic(), c.multiplicity as usize));
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.real_roots.iter().all(RealRoot::is_exact) && self.complex_pairs.iter().all(|c| c.exact)
    }

    pub fn product(&self) -> UniPoly {
        self.quadratics()
            .iter()
            .fold(UniPoly::constant(self.leading.clone()), |acc, q| acc.mul(q))
    }
}

fn exact_rational_root(g: &UniPoly, lo: &Rational, hi: &Rational) -> Option<Rational> {
    for den in [1u64 << 8, 1 << 16, 1 << 24] {
        let r = approximate(to_f64(&((lo + hi) / Rational::from_integer(2.into()))), den);
        if &r >= lo && &r <= hi && g.eval(&r).is_zero() {
            return Some(r);
        }
    }
    for r in [lo, hi] {
        if g.eval(r).is_zero() {
            return Some(r.clone());
        }
    }
    None
}

/// Simultaneous Weierstrass iteration for the (simple) roots of `g`.
fn approximate_roots(g: &UniPoly) -> Vec<Complex<f64>> {
    let n = g.degree().max(0) as usize;
    if n == 0 {
        return Vec::new();
    }
    let lc = to_f64(&g.leading());
    let c: Vec<f64> = g.coeffs().iter().map(|v| to_f64(v) / lc).collect();
    let eval = |z: Complex<f64>| {
        c.iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a)
    };
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex::new(0.4, 0.9);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| seed.powu(k as u32) * radius.min(2.0))
        .collect();
    for _ in 0..DK_ITERATIONS {
        let mut moved = 0.0f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    z
}

fn round(q: &Rational) -> Rational {
    let scale = num_bigint::BigInt::one() << REFINE_BITS as usize;
    let num = (q * Rational::from_integer(scale.clone()))
        .round()
        .to_integer();
    Rational::new(num, scale)
}

/// Newton steps on a simple complex root in rational arithmetic.
fn refine(g: &UniPoly, z: Complex<f64>) -> Complex<Rational> {
    let dg = g.derivative();
    let mut w = Complex::new(from_f64_dyadic(z.re, 60), from_f64_dyadic(z.im, 60));
    let eval = |p: &UniPoly, w: &Complex<Rational>| -> Complex<Rational> {
        p.coeffs().iter().rev().fold(
            Complex::new(Rational::zero(), Rational::zero()),
            |acc, c| acc * w.clone() + Complex::new(c.clone(), Rational::zero()),
        )
    };
    for _ in 0..NEWTON_STEPS {
        let d = eval(&dg, &w);
        if d.re.is_zero() && d.im.is_zero() {
            break;
        }
        let step = eval(g, &w) / d;
        w = w - step;
        w = Complex::new(round(&w.re), round(&w.im));
    }
    w
}

/// Exact quadratic factor near `z` with small denominators, if one divides
/// `g`.
fn exact_quadratic(g: &UniPoly, z: &Complex<Rational>) -> Option<UniPoly> {
    let p = to_f64(&z.re) * -2.0;
    let c = to_f64(&z.re).powi(2) + to_f64(&z.im).powi(2);
    for den in [1u64 << 8, 1 << 16, 1 << 24] {
        let q = UniPoly::new(vec![
            approximate(c, den),
            approximate(p, den),
            Rational::one(),
        ]);
        if g.div_exact(&q).is_some() {
            return Some(q);
        }
    }
    None
}

/// Factors a psd univariate polynomial (as a [`UniPoly`]) into quadratics.
pub fn factor_psd_univariate(f: &UniPoly) -> Result<QuadraticFactorization> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("the zero polynomial".into()));
    }
    if !psd_univariate_scalar(f) {
        return Err(Error::NotPsd("polynomial takes negative values".into()));
    }
    let (leading, parts) = squarefree_decomposition(f)?;
    let width = Rational::new(
        1.into(),
        num_bigint::BigInt::one() << ISOLATION_BITS as usize,
    );
    let mut real_roots = Vec::new();
    let mut complex_pairs = Vec::new();
    for (g, k) in parts {
        let mut rest = g.clone();
        let intervals = isolate_real_roots(&g, &width);
        if !intervals.is_empty() && k % 2 == 1 {
            return Err(Error::NotPsd("a real root of odd multiplicity".into()));
        }
        let mut inexact_real = 0;
        for (lo, hi) in intervals {
            match exact_rational_root(&g, &lo, &hi) {
                Some(r) => {
                    rest = rest.div_exact(&UniPoly::linear_root(&r)).expect("root");
                    real_roots.push(RealRoot {
                        lo: r.clone(),
                        hi: r,
                        multiplicity: k,
                    });
                }
                None => {
                    inexact_real += 1;
                    real_roots.push(RealRoot {
                        lo,
                        hi,
                        multiplicity: k,
                    });
                }
            }
        }
        // the non-real roots of `rest` are the ones furthest from the axis
        let pairs = (rest.degree().max(0) as usize - inexact_real) / 2;
        let mut upper = approximate_roots(&rest);
        upper.sort_by(|a, b| b.im.total_cmp(&a.im));
        upper.truncate(pairs);
        upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for z in upper {
            let w = refine(&g, z);
            if let Some(q) = exact_quadratic(&rest, &w) {
                rest = rest.div_exact(&q).expect("divides");
                let beta = q.coeff(1) / Rational::from_integer(2.into());
                let gamma_sq = q.coeff(0) - &beta * &beta;
                complex_pairs.push(ComplexPair {
                    beta,
                    gamma_sq,
                    multiplicity: k,
                    exact: true,
                });
            } else {
                let beta = -w.re.clone();
                let gamma_sq = &w.im * &w.im;
                complex_pairs.push(ComplexPair {
                    beta,
                    gamma_sq,
                    multiplicity: k,
                    exact: false,
                });
            }
        }
    }
    Ok(QuadraticFactorization {
        leading,
        real_roots,
        complex_pairs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantalRepresentation {
    /// Diagonal `d×d`, quadratic entries; the leading coefficient sits on
    /// the first entry.
    pub matrix: MatrixPolynomial,
    pub factorization: QuadraticFactorization,
    /// `max |coeff(det M − f)| / max |coeff f|`.
    pub relative_residual: f64,
    pub residual_exact_zero: bool,
}

impl DeterminantalRepresentation {
    pub fn within(&self, tol: f64) -> bool {
        self.relative_residual <= tol
    }
}

/// `f` (one variable, psd, degree `2d`) as the determinant of a diagonal
/// `d×d` matrix of psd quadratics. A constant `f` gives the `1×1` matrix
/// `[f]`.
pub fn quadratic_determinantal_representation(
    f: &Polynomial,
) -> Result<DeterminantalRepresentation> {
    if f.nvars() != 1 {
        return Err(Error::InvalidArgument(
            "univariate polynomial expected".into(),
        ));
    }
    let u = UniPoly::from_polynomial(f, 0)?;
    if u.degree() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("odd degree {}", u.degree())));
    }
    let fac = factor_psd_univariate(&u)?;
    let mut entries: Vec<UniPoly> = fac.quadratics();
    if entries.is_empty() {
        entries.push(UniPoly::one());
    }
    entries[0] = entries[0].scale(&fac.leading);
    for e in &entries {
        if !psd_univariate_scalar(e) {
            return Err(Error::Construction("a quadratic entry is not psd".into()));
        }
    }
    let d = entries.len();
    let mut m = MatrixPolynomial::zeros(d, d, 1);
    for (i, e) in entries.iter().enumerate() {
        m.set(i, i, e.to_polynomial(1, 0));
    }
    let det = UniPoly::from_polynomial(&determinant(&m)?, 0)?;
    let diff = det.sub(&u);
    let scale = u
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::one);
    let res = diff
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(DeterminantalRepresentation {
        matrix: m,
        residual_exact_zero: res.is_zero(),
        relative_residual: to_f64(&(res / scale)),
        factorization: fac,
    })
}

/// `det(AᵀA) = Σ_S det(A_S)²`, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyBinetEvidence {
    pub determinant: Polynomial,
    pub minors: Vec<Polynomial>,
    pub identity_exact: bool,
}

/// For a claimed square root `A` (`s×m`, `s ≥ m`) of `M = AᵀA`: the maximal
/// minors whose squares sum to `det M`.
pub fn cauchy_binet_sos_evidence(
    m: &MatrixPolynomial,
    a: &MatrixPolynomial,
) -> Result<CauchyBinetEvidence> {
    if a.cols() != m.rows() || !m.is_square() || a.nvars() != m.nvars() {
        return Err(Error::Dimension("A must be s×m for an m×m matrix M".into()));
    }
    if &a.gram() != m {
        return Err(Error::InvalidArgument("AᵀA differs from M".into()));
    }
    let (det, minors) = cauchy_binet_expand(a)?;
    let identity_exact = sum_of_squares(&minors, m.nvars()) == det && det == determinant(m)?;
    Ok(CauchyBinetEvidence {
        determinant: det,
        minors,
        identity_exact,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantCheck {
    pub determinant_matches: bool,
    /// A sampled point where `M` is not psd.
    pub psd_witness: Option<Vec<Rational>>,
    pub samples: usize,
}

impl DeterminantCheck {
    pub fn passed(&self) -> bool {
        self.determinant_matches && self.psd_witness.is_none()
    }
}

/// Checks a claimed representation `det M = f` exactly and `M` psd at
/// `samples` seeded points of `[−1, 1]ⁿ`.
pub fn verify_determinantal_representation(
    m: &MatrixPolynomial,
    f: &Polynomial,
    samples: usize,
    seed: u64,
) -> Result<DeterminantCheck> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if m.nvars() != f.nvars() {
        return Err(Error::NvarsMismatch {
            expected: m.nvars(),
            found: f.nvars(),
        });
    }
    let determinant_matches = &determinant(m)? == f;
    let mut sampler = PointSampler::unit_box(m.nvars(), seed);
    let mut psd_witness = None;
    for _ in 0..samples {
        let p = sampler.next_point();
        if !psd_constant(&m.evaluate(&p)?)? {
            psd_witness = Some(p);
            break;
        }
    }
    Ok(DeterminantCheck {
        determinant_matches,
        psd_witness,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::int;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, &["x"]).unwrap()
    }

    #[test]
    fn mixed_real_and_complex() {
        let f = UniPoly::from_polynomial(&p("(x-1)^2*(x^2+1)"), 0).unwrap();
        let fac = factor_psd_univariate(&f).unwrap();
        assert_eq!(fac.real_roots.len(), 1);
        assert!(fac.real_roots[0].is_exact());
        assert_eq!(fac.real_roots[0].lo, int(1));
        assert_eq!(fac.real_roots[0].multiplicity, 2);
        assert_eq!(fac.complex_pairs.len(), 1);
        assert_eq!(fac.complex_pairs[0].beta, int(0));
        assert_eq!(fac.complex_pairs[0].gamma_sq, int(1));
        assert!(fac.is_exact());
    }

    #[test]
    fn x4_plus_1() {
        let f = UniPoly::from_polynomial(&p("x^4+1"), 0).unwrap();
        let fac = factor_psd_univariate(&f).unwrap();
        assert_eq!(fac.complex_pairs.len(), 2);
        assert!(fac.real_roots.is_empty());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut betas: Vec<f64> = fac.complex_pairs.iter().map(|c| to_f64(&c.beta)).collect();
        betas.sort_by(f64::total_cmp);
        assert!((betas[0] + h).abs() < 1e-12 && (betas[1] - h).abs() < 1e-12);
        let rep = quadratic_determinantal_representation(&p("x^4+1")).unwrap();
        assert_eq!(rep.matrix.rows(), 2);
        assert!(rep.relative_residual <= 1e-8 && !rep.residual_exact_zero);
    }

    #[test]
    fn constant_and_exact() {
        let f = UniPoly::constant(int(1));
        let fac = factor_psd_univariate(&f).unwrap();
        assert!(fac.real_roots.is_empty() && fac.complex_pairs.is_empty());
        assert_eq!(fac.leading, int(1));
        let rep = quadratic_determinantal_representation(&p("3")).unwrap();
        assert_eq!(
            rep.matrix,
            MatrixPolynomial::parse_rows(&[&["3"]], &["x"]).unwrap()
        );
        let rep = quadratic_determinantal_representation(&p("(x^2+1)^2")).unwrap();
        assert!(rep.residual_exact_zero);
        assert_eq!(
            rep.matrix,
            MatrixPolynomial::parse_rows(&[&["x^2+1", "0"], &["0", "x^2+1"]], &["x"]).unwrap()
        );
    }

    #[test]
    fn leading_on_first_entry() {
        let rep = quadratic_determinantal_representation(&p("5*(x^2+2*x+3)*(x-1/3)^2")).unwrap();
        assert!(rep.residual_exact_zero);
        assert_eq!(rep.matrix.get(0, 0).leading_term().unwrap().1, &int(5));
    }

    #[test]
    fn irrational_real_roots() {
        // (x² − 2)²: real roots ±√2, each of multiplicity 2
        let rep = quadratic_determinantal_representation(&p("(x^2-2)^2")).unwrap();
        assert_eq!(rep.factorization.real_roots.len(), 2);
        assert!(rep.relative_residual <= 1e-8);
    }

    #[test]
    fn real_roots_are_not_reported_as_pairs() {
        let f = "5*(x+6)^2*(x+4/3)^2*(x-1/2)^2*(x^2+3*x+17/4)*(x^2-3/2*x+21/16)";
        let rep = quadratic_determinantal_representation(&p(f)).unwrap();
        assert!(rep.residual_exact_zero);
        assert_eq!(rep.factorization.real_roots.len(), 3);
        assert_eq!(rep.factorization.complex_pairs.len(), 2);
    }

    #[test]
    fn rejections() {
        assert!(quadratic_determinantal_representation(&p("x^3+1")).is_err());
        assert!(matches!(
            quadratic_determinantal_representation(&p("x^2-1")),
            Err(Error::NotPsd(_))
        ));
        assert!(
            factor_psd_univariate(&UniPoly::from_polynomial(&p("(x-1)^3*(x+1)"), 0).unwrap())
                .is_err()
        );
    }

    #[test]
    fn cauchy_binet_examples() {
        let v = ["x", "y"];
        let m = MatrixPolynomial::parse_rows(&[&["x^2", "x*y"], &["x*y", "y^2"]], &v).unwrap();
        let a1 = MatrixPolynomial::parse_rows(&[&["x", "y"]], &v).unwrap();
        assert!(cauchy_binet_sos_evidence(&m, &a1).is_err());
        let a = MatrixPolynomial::parse_rows(&[&["x", "y"], &["0", "0"]], &v).unwrap();
        let ev = cauchy_binet_sos_evidence(&m, &a).unwrap();
        assert!(ev.identity_exact);
        assert_eq!(ev.minors, vec![Polynomial::zero(2)]);
        let a =
            MatrixPolynomial::parse_rows(&[&["1", "2"], &["x", "-1"], &["3", "y"]], &v).unwrap();
        let ev = cauchy_binet_sos_evidence(&a.gram(), &a).unwrap();
        assert!(ev.identity_exact);
        assert_eq!(ev.minors.len(), 3);
    }

    #[test]
    fn m0_with_wrong_root_is_rejected() {
        let v = ["x", "y", "z"];
        let m0 = MatrixPolynomial::parse_rows(
            &[
                &["x^2+z^2", "-x*y", "-x*z"],
                &["-x*y", "y^2+x^2", "-y*z"],
                &["-x*z", "-y*z", "z^2+y^2"],
            ],
            &v,
        )
        .unwrap();
        let a = MatrixPolynomial::parse_rows(
            &[&["x", "-y", "0"], &["z", "0", "-x"], &["0", "x", "-z"]],
            &v,
        )
        .unwrap();
        assert!(matches!(
            cauchy_binet_sos_evidence(&m0, &a),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn verify_claimed_representation() {
        let v = ["x", "y"];
        let m = MatrixPolynomial::parse_rows(&[&["x^2+1", "x*y"], &["x*y", "y^2+1"]], &v).unwrap();
        let f = Polynomial::parse("x^2+y^2+1", &v).unwrap();
        assert!(verify_determinantal_representation(&m, &f, 50, 0)
            .unwrap()
            .passed());
        let g = Polynomial::parse("x^2+y^2+2", &v).unwrap();
        assert!(
            !verify_determinantal_representation(&m, &g, 50, 0)
                .unwrap()
                .determinant_matches
        );
        let bad = MatrixPolynomial::parse_rows(&[&["x", "0"], &["0", "x"]], &v).unwrap();
        let r = verify_determinantal_representation(
            &bad,
            &Polynomial::parse("x^2", &v).unwrap(),
            50,
            0,
        )
        .unwrap();
        assert!(r.determinant_matches && r.psd_witness.is_some());
    }
}
