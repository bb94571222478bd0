//! Certificate files: JSON with every polynomial written as text in the
//! declared variable names, so files stay readable and exact.

use serde::{Deserialize, Serialize};

use super::types::{
    CertifiedPiece, ConeItem, Coverage, Factor, Piece, PiecewiseCertificate, Proof, Term,
};
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::{fmt_rational, parse_rational};
use crate::poly::{Polynomial, Rational};

const FORMAT: &str = "semicert-certificate/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    format: String,
    vars: Vec<String>,
    size: usize,
    target: Vec<Vec<String>>,
    coverage: CoverageFile,
    pieces: Vec<PieceFile>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum CoverageFile {
    Global,
    Local,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceFile {
    label: String,
    constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_box: Option<Vec<[String; 2]>>,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    weight: String,
    factor: FactorFile,
    proof: ProofFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FactorFile {
    Square { rows: Vec<Vec<String>> },
    ConstPsd { rows: Vec<Vec<String>> },
    UnivariatePsd { rows: Vec<Vec<String>> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProofFile {
    ExplicitSos { squares: Vec<[String; 2]> },
    ConeCombination { items: Vec<ConeFile> },
    Sampled { samples: usize, seed: u64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeFile {
    coeff: String,
    square: String,
    generators: Vec<usize>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

fn poly_rows(m: &MatrixPolynomial, vars: &[String]) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|p| p.to_string_with(vars)).collect())
        .collect()
}

fn q_rows(q: &QMatrix) -> Vec<Vec<String>> {
    q.to_rows()
        .iter()
        .map(|r| r.iter().map(fmt_rational).collect())
        .collect()
}

fn parse_poly(s: &str, vars: &[String]) -> Result<Polynomial> {
    Polynomial::parse(s, vars).map_err(|e| malformed(format!("`{s}`: {e}")))
}

fn parse_poly_rows(rows: &[Vec<String>], vars: &[String]) -> Result<MatrixPolynomial> {
    let rows = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| parse_poly(s, vars))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixPolynomial::from_rows(rows).map_err(|e| malformed(e.to_string()))
}

fn parse_q_rows(rows: &[Vec<String>]) -> Result<QMatrix> {
    let rows = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(rows).map_err(|e| malformed(e.to_string()))
}

impl PiecewiseCertificate {
    /// The certificate as a JSON document.
    pub fn to_text(&self) -> String {
        let v = &self.vars;
        let file = CertFile {
            format: FORMAT.into(),
            vars: v.clone(),
            size: self.size(),
            target: poly_rows(&self.target, v),
            coverage: match self.coverage {
                Coverage::Global => CoverageFile::Global,
                Coverage::Local => CoverageFile::Local,
            },
            pieces: self
                .pieces
                .iter()
                .map(|cp| PieceFile {
                    label: cp.piece.label.clone(),
                    constraints: cp
                        .piece
                        .constraints
                        .iter()
                        .map(|g| g.to_string_with(v))
                        .collect(),
                    sample_box: cp.piece.sample_box.as_ref().map(|b| {
                        b.iter()
                            .map(|(lo, hi)| [fmt_rational(lo), fmt_rational(hi)])
                            .collect()
                    }),
                    terms: cp
                        .terms
                        .iter()
                        .map(|t| TermFile {
                            weight: t.weight.to_string_with(v),
                            factor: match &t.factor {
                                Factor::Square(u) => FactorFile::Square {
                                    rows: poly_rows(u, v),
                                },
                                Factor::ConstPsd(q) => FactorFile::ConstPsd { rows: q_rows(q) },
                                Factor::UnivariatePsd(a) => FactorFile::UnivariatePsd {
                                    rows: poly_rows(a, v),
                                },
                            },
                            proof: match &t.proof {
                                Proof::ExplicitSos(items) => ProofFile::ExplicitSos {
                                    squares: items
                                        .iter()
                                        .map(|(c, p)| [fmt_rational(c), p.to_string_with(v)])
                                        .collect(),
                                },
                                Proof::ConeCombination(items) => ProofFile::ConeCombination {
                                    items: items
                                        .iter()
                                        .map(|it| ConeFile {
                                            coeff: fmt_rational(&it.coeff),
                                            square: it.square.to_string_with(v),
                                            generators: it.generators.clone(),
                                        })
                                        .collect(),
                                },
                                Proof::Sampled { samples, seed } => ProofFile::Sampled {
                                    samples: *samples,
                                    seed: *seed,
                                },
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("serializable");
        s.push('\n');
        s
    }

    /// Inverse of [`PiecewiseCertificate::to_text`]; also runs the structural
    /// checks.
    pub fn parse(s: &str) -> Result<Self> {
        let file: CertFile = serde_json::from_str(s).map_err(|e| malformed(e.to_string()))?;
        if file.format != FORMAT {
            return Err(malformed(format!("unknown format `{}`", file.format)));
        }
        let v = &file.vars;
        if v.is_empty() {
            return Err(malformed("no variables"));
        }
        let target = parse_poly_rows(&file.target, v)?;
        if target.rows() != file.size || target.cols() != file.size {
            return Err(malformed("target does not match the declared size"));
        }
        let mut pieces = Vec::with_capacity(file.pieces.len());
        for pf in &file.pieces {
            let constraints = pf
                .constraints
                .iter()
                .map(|g| parse_poly(g, v))
                .collect::<Result<Vec<_>>>()?;
            let sample_box = pf
                .sample_box
                .as_ref()
                .map(|b| {
                    b.iter()
                        .map(|[lo, hi]| Ok((parse_rational(lo)?, parse_rational(hi)?)))
                        .collect::<Result<Vec<(Rational, Rational)>>>()
                })
                .transpose()?;
            let mut terms = Vec::with_capacity(pf.terms.len());
            for tf in &pf.terms {
                let factor = match &tf.factor {
                    FactorFile::Square { rows } => Factor::Square(parse_poly_rows(rows, v)?),
                    FactorFile::ConstPsd { rows } => Factor::ConstPsd(parse_q_rows(rows)?),
                    FactorFile::UnivariatePsd { rows } => {
                        Factor::UnivariatePsd(parse_poly_rows(rows, v)?)
                    }
                };
                let proof = match &tf.proof {
                    ProofFile::ExplicitSos { squares } => Proof::ExplicitSos(
                        squares
                            .iter()
                            .map(|[c, p]| Ok((parse_rational(c)?, parse_poly(p, v)?)))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    ProofFile::ConeCombination { items } => Proof::ConeCombination(
                        items
                            .iter()
                            .map(|it| {
                                Ok(ConeItem::new(
                                    parse_rational(&it.coeff)?,
                                    parse_poly(&it.square, v)?,
                                    it.generators.clone(),
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    ProofFile::Sampled { samples, seed } => Proof::Sampled {
                        samples: *samples,
                        seed: *seed,
                    },
                };
                terms.push(Term::new(parse_poly(&tf.weight, v)?, factor, proof));
            }
            pieces.push(CertifiedPiece {
                piece: Piece {
                    label: pf.label.clone(),
                    constraints,
                    sample_box,
                },
                terms,
            });
        }
        let cert = PiecewiseCertificate {
            vars: file.vars.clone(),
            target,
            pieces,
            coverage: match file.coverage {
                CoverageFile::Global => Coverage::Global,
                CoverageFile::Local => Coverage::Local,
            },
        };
        cert.check_well_formed()?;
        Ok(cert)
    }
}
