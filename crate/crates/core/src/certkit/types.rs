use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::{Polynomial, Rational};

/// `{x : g_k(x) ≥ 0 for all k}`. The optional box (one interval per
/// variable) is where sampling looks for points of the piece; without it the
/// unit box `[−1, 1]^n` is used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub label: String,
    pub constraints: Vec<Polynomial>,
    pub sample_box: Option<Vec<(Rational, Rational)>>,
}

impl Piece {
    pub fn new(label: impl Into<String>, constraints: Vec<Polynomial>) -> Self {
        Piece {
            label: label.into(),
            constraints,
            sample_box: None,
        }
    }

    /// The whole space.
    pub fn everywhere(label: impl Into<String>) -> Self {
        Piece::new(label, Vec::new())
    }

    /// The box `Π [lo_i, hi_i]`, with constraints ordered
    /// `x_0 − lo_0, hi_0 − x_0, x_1 − lo_1, …` (see [`super::prove_on_box`]).
    pub fn boxed(label: impl Into<String>, bounds: &[(Rational, Rational)]) -> Self {
        let n = bounds.len();
        let mut constraints = Vec::with_capacity(2 * n);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let x = Polynomial::var(n, i);
            constraints.push(&x - &Polynomial::constant(n, lo.clone()));
            constraints.push(&Polynomial::constant(n, hi.clone()) - &x);
        }
        Piece {
            label: label.into(),
            constraints,
            sample_box: Some(bounds.to_vec()),
        }
    }

    pub fn with_sample_box(mut self, b: Vec<(Rational, Rational)>) -> Self {
        self.sample_box = Some(b);
        self
    }

    /// Exact membership.
    pub fn contains(&self, pt: &[Rational]) -> Result<bool> {
        for g in &self.constraints {
            if g.sign_at(pt)? == std::cmp::Ordering::Less {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The matrix factor of a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `UᵀU` for an `r×m` matrix polynomial `U`.
    Square(MatrixPolynomial),
    /// A constant psd matrix, checked exactly.
    ConstPsd(QMatrix),
    /// A matrix polynomial in a single variable, psd on the whole line;
    /// checked exactly through its principal minors.
    UnivariatePsd(MatrixPolynomial),
}

/// One item `c · s² · Π_k g_k` of a cone combination; `generators` index the
/// piece constraints and may repeat. An empty list gives a plain square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeItem {
    pub coeff: Rational,
    pub square: Polynomial,
    pub generators: Vec<usize>,
}

impl ConeItem {
    pub fn new(coeff: Rational, square: Polynomial, generators: Vec<usize>) -> Self {
        ConeItem {
            coeff,
            square,
            generators,
        }
    }
}

/// Why a weight is nonnegative on its piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proof {
    /// `f = Σ c_k p_k²` with `c_k ≥ 0`.
    ExplicitSos(Vec<(Rational, Polynomial)>),
    /// `f = Σ c_k s_k² Π g` exactly.
    ConeCombination(Vec<ConeItem>),
    /// No proof; sampled at verification time.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub weight: Polynomial,
    pub factor: Factor,
    pub proof: Proof,
}

impl Term {
    pub fn new(weight: Polynomial, factor: Factor, proof: Proof) -> Self {
        Term {
            weight,
            factor,
            proof,
        }
    }

    /// Weight times `vᵀv` for a constant row vector `v`.
    pub fn rank_one(weight: Polynomial, v: &[Rational], proof: Proof) -> Self {
        let n = weight.nvars();
        let row = v
            .iter()
            .map(|c| Polynomial::constant(n, c.clone()))
            .collect();
        let u = MatrixPolynomial::from_rows(vec![row]).expect("nonempty row");
        Term::new(weight, Factor::Square(u), proof)
    }

    /// Weight times `E_k` (the k-th diagonal unit) in size `m`.
    pub fn unit(weight: Polynomial, m: usize, k: usize, proof: Proof) -> Self {
        let mut v = vec![Rational::zero(); m];
        v[k] = Rational::from_integer(1.into());
        Term::rank_one(weight, &v, proof)
    }

    /// The matrix `f · factor` this term contributes.
    pub fn contribution(&self, m: usize) -> Result<MatrixPolynomial> {
        let n = self.weight.nvars();
        let base = match &self.factor {
            Factor::Square(u) => {
                if u.cols() != m || u.nvars() != n {
                    return Err(Error::MalformedCertificate(format!(
                        "square factor of size {}x{} in {} variables, expected ?x{m} in {n}",
                        u.rows(),
                        u.cols(),
                        u.nvars()
                    )));
                }
                u.gram()
            }
            Factor::ConstPsd(q) => {
                if q.rows() != m || q.cols() != m {
                    return Err(Error::MalformedCertificate(
                        "constant factor has the wrong size".into(),
                    ));
                }
                MatrixPolynomial::from_constant(q, n)
            }
            Factor::UnivariatePsd(a) => {
                if a.rows() != m || a.cols() != m || a.nvars() != n {
                    return Err(Error::MalformedCertificate(
                        "univariate factor has the wrong size".into(),
                    ));
                }
                a.clone()
            }
        };
        Ok(base.scale_poly(&self.weight))
    }
}

/// What the pieces claim to cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// The union of the pieces is all of ℝⁿ.
    Global,
    /// Only a neighbourhood or sub-region is claimed; no covering check.
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedPiece {
    pub piece: Piece,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseCertificate {
    pub vars: Vec<String>,
    pub target: MatrixPolynomial,
    pub pieces: Vec<CertifiedPiece>,
    pub coverage: Coverage,
}

impl PiecewiseCertificate {
    pub fn new(vars: Vec<String>, target: MatrixPolynomial, coverage: Coverage) -> Self {
        PiecewiseCertificate {
            vars,
            target,
            pieces: Vec::new(),
            coverage,
        }
    }

    pub fn push_piece(&mut self, piece: Piece, terms: Vec<Term>) {
        self.pieces.push(CertifiedPiece { piece, terms });
    }

    pub fn nvars(&self) -> usize {
        self.target.nvars()
    }

    pub fn size(&self) -> usize {
        self.target.rows()
    }

    /// Structural checks that do not involve any positivity question.
    pub fn check_well_formed(&self) -> Result<()> {
        let n = self.nvars();
        if self.vars.len() != n {
            return Err(Error::MalformedCertificate(format!(
                "{} variable names for {n} variables",
                self.vars.len()
            )));
        }
        if !self.target.is_symmetric() {
            return Err(Error::MalformedCertificate(
                "target is not symmetric".into(),
            ));
        }
        for cp in &self.pieces {
            let k = cp.piece.constraints.len();
            if cp.piece.constraints.iter().any(|g| g.nvars() != n) {
                return Err(Error::MalformedCertificate(format!(
                    "piece `{}`: constraint in the wrong ring",
                    cp.piece.label
                )));
            }
            if let Some(b) = &cp.piece.sample_box {
                if b.len() != n || b.iter().any(|(lo, hi)| lo > hi) {
                    return Err(Error::MalformedCertificate(format!(
                        "piece `{}`: bad sample box",
                        cp.piece.label
                    )));
                }
            }
            for t in &cp.terms {
                if t.weight.nvars() != n {
                    return Err(Error::MalformedCertificate(
                        "weight in the wrong ring".into(),
                    ));
                }
                match &t.proof {
                    Proof::ExplicitSos(items) => {
                        if items.iter().any(|(c, p)| c.is_negative() || p.nvars() != n) {
                            return Err(Error::MalformedCertificate(
                                "SOS proof with a negative coefficient or wrong ring".into(),
                            ));
                        }
                    }
                    Proof::ConeCombination(items) => {
                        for it in items {
                            if let Some(&g) = it.generators.iter().find(|&&g| g >= k) {
                                return Err(Error::MalformedCertificate(format!(
                                    "piece `{}`: proof references missing generator {g}",
                                    cp.piece.label
                                )));
                            }
                            if it.coeff.is_negative() || it.square.nvars() != n {
                                return Err(Error::MalformedCertificate(
                                    "cone item with a negative coefficient or wrong ring".into(),
                                ));
                            }
                        }
                    }
                    Proof::Sampled { samples, .. } => {
                        if *samples == 0 {
                            return Err(Error::MalformedCertificate(
                                "sampled proof with N = 0".into(),
                            ));
                        }
                    }
                }
                t.contribution(self.size())?;
            }
        }
        Ok(())
    }
}
