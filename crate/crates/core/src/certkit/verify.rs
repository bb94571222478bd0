use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::psd::{ldl_or_witness, psd_univariate_matrix, single_variable};
use super::sample::{sample_nonneg, PointSampler, SampleOutcome};
use super::types::{CertifiedPiece, Coverage, Factor, Piece, PiecewiseCertificate, Proof};
use crate::error::{Error, Result};
use crate::matpoly::{principal_minors, MatrixPolynomial};
use crate::poly::rational::int;
use crate::poly::univariate::{is_psd_on_reals, sign_test_points};
use crate::poly::{Polynomial, Rational, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityStatus {
    Exact,
    /// Entry `(i, j)` of `target − Σ terms` is nonzero at `witness`.
    Mismatch {
        entry: (usize, usize),
        witness: Vec<Rational>,
        residual: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightStatus {
    ProvedExact,
    /// No exact proof; `accepted` sampled points of the piece, no negative
    /// value among them (`accepted = 0` means the piece looked empty).
    SampledOnly {
        samples: usize,
        accepted: usize,
        failures: usize,
    },
    /// The weight is negative at `witness`, or its proof object does not
    /// reproduce it there.
    Failed {
        witness: Vec<Rational>,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorStatus {
    Ok,
    /// `vᵀ F(point) v < 0`; `point` is empty for constant factors.
    NotPsd {
        point: Vec<Rational>,
        vector: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermReport {
    pub weight: WeightStatus,
    pub factor: FactorStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceReport {
    pub label: String,
    pub identity: IdentityStatus,
    pub terms: Vec<TermReport>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringStatus {
    /// The certificate only claims a local statement.
    NotClaimed,
    /// Sampled check of the union of pieces; never an exact proof.
    Sampled {
        samples: usize,
        uncovered: Option<Vec<Rational>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub pieces: Vec<PieceReport>,
    pub covering: CoveringStatus,
}

impl VerificationReport {
    pub fn identities_exact(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.identity == IdentityStatus::Exact)
    }

    pub fn factors_ok(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.terms.iter().all(|t| t.factor == FactorStatus::Ok))
    }

    /// Every weight has an exact proof.
    pub fn weights_exact(&self) -> bool {
        self.pieces.iter().all(|p| {
            p.terms
                .iter()
                .all(|t| t.weight == WeightStatus::ProvedExact)
        })
    }

    pub fn any_failed_weight(&self) -> bool {
        self.pieces.iter().any(|p| {
            p.terms
                .iter()
                .any(|t| matches!(t.weight, WeightStatus::Failed { .. }))
        })
    }

    pub fn covering_ok(&self) -> bool {
        !matches!(
            self.covering,
            CoveringStatus::Sampled {
                uncovered: Some(_),
                ..
            }
        )
    }

    /// No check failed (sampled-only weights count as passing).
    pub fn passed(&self) -> bool {
        self.identities_exact()
            && self.factors_ok()
            && !self.any_failed_weight()
            && self.covering_ok()
    }

    /// Passed, and everything except the covering is backed by exact proofs.
    pub fn fully_exact(&self) -> bool {
        self.passed() && self.weights_exact()
    }
}

/// Sampling parameters; `None` keeps what the certificate asks for.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub covering_samples: usize,
    pub covering_seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: None,
            seed: None,
            covering_samples: 2000,
            covering_seed: 0,
        }
    }
}

/// A point of the grid `{0..=D}^n` where `p` does not vanish; exists for
/// every nonzero `p` with all partial degrees at most `D`.
pub fn nonvanishing_point(p: &Polynomial) -> Option<Vec<Rational>> {
    if p.is_zero() {
        return None;
    }
    let n = p.nvars();
    let d = (0..n)
        .map(|i| p.degree_in(i).max(0) as i64)
        .max()
        .unwrap_or(0);
    let mut cur = vec![0i64; n];
    loop {
        let pt: Vec<Rational> = cur.iter().map(|&v| int(v)).collect();
        if !p.eval_unchecked(&pt).is_zero() {
            return Some(pt);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            if cur[i] < d {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn identity_status(target: &MatrixPolynomial, cp: &CertifiedPiece) -> Result<IdentityStatus> {
    let m = target.rows();
    let mut sum = MatrixPolynomial::zeros(m, m, target.nvars());
    for t in &cp.terms {
        sum = sum.add(&t.contribution(m)?);
    }
    let residual = target.sub(&sum);
    for i in 0..m {
        for j in 0..m {
            let r = residual.get(i, j);
            if let Some(pt) = nonvanishing_point(r) {
                return Ok(IdentityStatus::Mismatch {
                    entry: (i, j),
                    residual: r.eval_unchecked(&pt),
                    witness: pt,
                });
            }
        }
    }
    Ok(IdentityStatus::Exact)
}

fn proof_mismatch(f: &Polynomial, rebuilt: &Polynomial, what: &str) -> WeightStatus {
    let diff = f - rebuilt;
    match nonvanishing_point(&diff) {
        None => WeightStatus::ProvedExact,
        Some(pt) => WeightStatus::Failed {
            witness: pt,
            reason: format!("{what} does not reproduce the weight"),
        },
    }
}

fn weight_status(
    f: &Polynomial,
    proof: &Proof,
    piece: &Piece,
    opts: &VerifyOptions,
) -> Result<WeightStatus> {
    let n = f.nvars();
    Ok(match proof {
        Proof::ExplicitSos(items) => {
            let rebuilt = items
                .iter()
                .fold(Polynomial::zero(n), |acc, (c, p)| acc + (p * p).scale(c));
            proof_mismatch(f, &rebuilt, "sum of squares")
        }
        Proof::ConeCombination(items) => {
            let mut rebuilt = Polynomial::zero(n);
            for it in items {
                let mut t = (&it.square * &it.square).scale(&it.coeff);
                for &g in &it.generators {
                    t = &t * &piece.constraints[g];
                }
                rebuilt = rebuilt + t;
            }
            proof_mismatch(f, &rebuilt, "cone combination")
        }
        Proof::Sampled { samples, seed } => {
            let samples = opts.samples.unwrap_or(*samples);
            let seed = opts.seed.unwrap_or(*seed);
            match sample_nonneg(f, piece, samples, seed)? {
                SampleOutcome::Witness(pt) => WeightStatus::Failed {
                    witness: pt,
                    reason: "weight is negative on the piece".into(),
                },
                SampleOutcome::NoCounterexample { accepted } => WeightStatus::SampledOnly {
                    samples,
                    accepted,
                    failures: 0,
                },
                SampleOutcome::EmptyPiece => WeightStatus::SampledOnly {
                    samples,
                    accepted: 0,
                    failures: 0,
                },
            }
        }
    })
}

/// A rational `t` with `u(t) < 0`, if any.
pub fn negative_point(u: &UniPoly) -> Option<Rational> {
    if is_psd_on_reals(u) {
        return None;
    }
    sign_test_points(u)
        .into_iter()
        .find(|t| u.eval(t).is_negative())
}

fn factor_status(factor: &Factor) -> Result<FactorStatus> {
    match factor {
        Factor::Square(_) => Ok(FactorStatus::Ok),
        Factor::ConstPsd(q) => Ok(match ldl_or_witness(q)? {
            Ok(_) => FactorStatus::Ok,
            Err(v) => FactorStatus::NotPsd {
                point: Vec::new(),
                vector: v,
            },
        }),
        Factor::UnivariatePsd(a) => {
            let var = single_variable(a).ok_or_else(|| {
                Error::MalformedCertificate("univariate factor depends on several variables".into())
            })?;
            if psd_univariate_matrix(a, var)? {
                return Ok(FactorStatus::Ok);
            }
            for (_, minor) in principal_minors(a)? {
                let u = UniPoly::from_polynomial(&minor, var)?;
                if let Some(t) = negative_point(&u) {
                    let mut pt = vec![Rational::zero(); a.nvars()];
                    pt[var] = t;
                    let q = a.evaluate(&pt)?;
                    if let Err(v) = ldl_or_witness(&q)? {
                        return Ok(FactorStatus::NotPsd {
                            point: pt,
                            vector: v,
                        });
                    }
                }
            }
            Err(Error::NotPsd(
                "univariate factor rejected without a witness".into(),
            ))
        }
    }
}

fn verify_piece(
    target: &MatrixPolynomial,
    cp: &CertifiedPiece,
    opts: &VerifyOptions,
) -> Result<PieceReport> {
    let identity = identity_status(target, cp)?;
    let terms = cp
        .terms
        .iter()
        .map(|t| {
            Ok(TermReport {
                weight: weight_status(&t.weight, &t.proof, &cp.piece, opts)?,
                factor: factor_status(&t.factor)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PieceReport {
        label: cp.piece.label.clone(),
        identity,
        terms,
    })
}

/// Points for the covering check: a coarse grid of the cube plus seeded
/// random points of `[−1, 1]^n`.
pub(crate) fn covering_points(n: usize, samples: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut pts = Vec::new();
    if n <= 4 {
        let vals: Vec<Rational> = [-2, -1, 0, 1, 2]
            .iter()
            .map(|&k| Rational::new(k.into(), 2.into()))
            .collect();
        let mut cur = vec![0usize; n];
        'grid: loop {
            pts.push(cur.iter().map(|&i| vals[i].clone()).collect());
            let mut i = 0;
            loop {
                if i == n {
                    break 'grid;
                }
                if cur[i] + 1 < vals.len() {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }
    let mut s = PointSampler::unit_box(n, seed);
    pts.extend((0..samples).map(|_| s.next_point()));
    pts
}

fn covering_status(cert: &PiecewiseCertificate, opts: &VerifyOptions) -> Result<CoveringStatus> {
    if cert.coverage == Coverage::Local {
        return Ok(CoveringStatus::NotClaimed);
    }
    let pts = covering_points(cert.nvars(), opts.covering_samples, opts.covering_seed);
    let total = pts.len();
    let uncovered = pts
        .into_par_iter()
        .map(|pt| -> Result<Option<Vec<Rational>>> {
            for cp in &cert.pieces {
                if cp.piece.contains(&pt)? {
                    return Ok(None);
                }
            }
            Ok(Some(pt))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(CoveringStatus::Sampled {
        samples: total,
        uncovered,
    })
}

/// Checks every piece identity exactly, every weight against its proof,
/// every matrix factor for psd-ness, and the covering claim by sampling.
pub fn verify_certificate(
    cert: &PiecewiseCertificate,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    cert.check_well_formed()?;
    let pieces = cert
        .pieces
        .par_iter()
        .map(|cp| verify_piece(&cert.target, cp, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        pieces,
        covering: covering_status(cert, opts)?,
    })
}
