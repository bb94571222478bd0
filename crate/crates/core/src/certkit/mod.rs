//! Piecewise certificates `M = Σ_j f_j · U_jᵀU_j` on each piece, and their
//! exact verification.

mod bernstein;
mod file;
mod psd;
mod sample;
mod types;
mod verify;

use std::fmt;

pub use bernstein::{prove_on_box, prove_on_box_any, prove_on_box_elevated};
pub use psd::{
    ldl_or_witness, pd_constant, psd_by_minors, psd_constant, psd_univariate_matrix,
    psd_univariate_scalar, psd_witness, single_variable, UNIVARIATE_MATRIX_LIMIT,
};
pub use sample::{sample_nonneg, sphere_grid, PointSampler, SampleOutcome, SAMPLE_BITS};
pub use types::{
    CertifiedPiece, ConeItem, Coverage, Factor, Piece, PiecewiseCertificate, Proof, Term,
};
pub(crate) use verify::covering_points;
pub use verify::{
    negative_point, nonvanishing_point, verify_certificate, CoveringStatus, FactorStatus,
    IdentityStatus, PieceReport, TermReport, VerificationReport, VerifyOptions, WeightStatus,
};

use crate::error::Result;
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::fmt_rational;
use crate::poly::{Polynomial, Rational};

/// Replaces every constant psd factor `f·Q` by rank-one terms
/// `(f·d_k)·ℓ_kᵀℓ_k` from a rational `LDLᵀ` split of `Q`; proofs are rescaled
/// by `d_k ≥ 0` along with the weights.
pub fn split_constant_factors(cert: &PiecewiseCertificate) -> Result<PiecewiseCertificate> {
    let mut out = cert.clone();
    let n = cert.nvars();
    for cp in &mut out.pieces {
        let mut terms = Vec::new();
        for t in cp.terms.drain(..) {
            let Factor::ConstPsd(q) = &t.factor else {
                terms.push(t);
                continue;
            };
            let parts = match ldl_or_witness(q)? {
                Ok(parts) => parts,
                Err(_) => {
                    // leave it for the verifier to reject
                    terms.push(t);
                    continue;
                }
            };
            for (d, l) in parts {
                let row = l
                    .iter()
                    .map(|c| Polynomial::constant(n, c.clone()))
                    .collect();
                let u = MatrixPolynomial::from_rows(vec![row])?;
                terms.push(Term::new(
                    t.weight.scale(&d),
                    Factor::Square(u),
                    scale_proof(&t.proof, &d),
                ));
            }
        }
        cp.terms = terms;
    }
    Ok(out)
}

fn scale_proof(p: &Proof, d: &Rational) -> Proof {
    match p {
        Proof::ExplicitSos(items) => {
            Proof::ExplicitSos(items.iter().map(|(c, q)| (c * d, q.clone())).collect())
        }
        Proof::ConeCombination(items) => Proof::ConeCombination(
            items
                .iter()
                .map(|it| ConeItem::new(&it.coeff * d, it.square.clone(), it.generators.clone()))
                .collect(),
        ),
        s @ Proof::Sampled { .. } => s.clone(),
    }
}

/// `f · Q` as a term with the constant factor kept whole.
pub fn const_term(weight: Polynomial, q: QMatrix, proof: Proof) -> Term {
    Term::new(weight, Factor::ConstPsd(q), proof)
}

fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(fmt_rational).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pieces {
            match &p.identity {
                IdentityStatus::Exact => writeln!(f, "piece {}: identity exact", p.label)?,
                IdentityStatus::Mismatch {
                    entry,
                    witness,
                    residual,
                } => writeln!(
                    f,
                    "piece {}: identity FAILS at entry ({}, {}), residual {} at {}",
                    p.label,
                    entry.0 + 1,
                    entry.1 + 1,
                    fmt_rational(residual),
                    fmt_point(witness)
                )?,
            }
            for (j, t) in p.terms.iter().enumerate() {
                let w = match &t.weight {
                    WeightStatus::ProvedExact => "proved exactly".to_string(),
                    WeightStatus::SampledOnly {
                        samples, accepted, ..
                    } => {
                        format!("sampled only ({accepted}/{samples} points, no counterexample)")
                    }
                    WeightStatus::Failed { witness, reason } => {
                        format!("FAILED: {reason} at {}", fmt_point(witness))
                    }
                };
                let fac = match &t.factor {
                    FactorStatus::Ok => String::new(),
                    FactorStatus::NotPsd { point, vector } => format!(
                        "; factor NOT psd at {} along {}",
                        fmt_point(point),
                        fmt_point(vector)
                    ),
                };
                writeln!(f, "  term {}: weight {w}{fac}", j + 1)?;
            }
        }
        match &self.covering {
            CoveringStatus::NotClaimed => writeln!(f, "covering: local certificate, not checked")?,
            CoveringStatus::Sampled {
                samples,
                uncovered: None,
            } => writeln!(
                f,
                "covering: {samples} sampled points covered (sampling only, not a proof)"
            )?,
            CoveringStatus::Sampled {
                samples,
                uncovered: Some(pt),
            } => writeln!(
                f,
                "covering: FAILS, point {} of {samples} uncovered",
                fmt_point(pt)
            )?,
        }
        write!(f, "result: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::{int, rat};
    use num_traits::Signed;

    fn p(s: &str, vars: &[&str]) -> Polynomial {
        Polynomial::parse(s, vars).unwrap()
    }

    fn row(entries: &[&str], vars: &[&str]) -> MatrixPolynomial {
        MatrixPolynomial::parse_rows(&[entries], vars).unwrap()
    }

    fn cone(items: &[(i64, &str, &[usize])], vars: &[&str]) -> Proof {
        Proof::ConeCombination(
            items
                .iter()
                .map(|(c, s, g)| ConeItem::new(int(*c), p(s, vars), g.to_vec()))
                .collect(),
        )
    }

    fn two_piece() -> PiecewiseCertificate {
        let v = ["x", "y"];
        let target =
            MatrixPolynomial::parse_rows(&[&["1+x^2", "x*y"], &["x*y", "x^2+y^4"]], &v).unwrap();
        let mut c =
            PiecewiseCertificate::new(vec!["x".into(), "y".into()], target, Coverage::Global);
        let sos1 = Proof::ExplicitSos(vec![(int(1), p("1", &v))]);
        c.push_piece(
            Piece::new("x^2>=y^2", vec![p("x^2-y^2", &v)]),
            vec![
                Term::new(
                    p("1", &v),
                    Factor::Square(row(&["x", "y"], &v)),
                    sos1.clone(),
                ),
                Term::unit(p("1", &v), 2, 0, sos1.clone()),
                Term::unit(
                    p("x^2-y^2+y^4", &v),
                    2,
                    1,
                    cone(&[(1, "1", &[0]), (1, "y^2", &[])], &v),
                ),
            ],
        );
        c.push_piece(
            Piece::new("y^2>=x^2", vec![p("y^2-x^2", &v)]),
            vec![
                Term::new(p("1", &v), Factor::Square(row(&["1", "x*y"], &v)), sos1),
                Term::new(
                    p("x^2", &v),
                    Factor::ConstPsd(QMatrix::identity(2)),
                    Proof::ExplicitSos(vec![(int(1), p("x", &v))]),
                ),
                Term::unit(p("y^4-x^2*y^2", &v), 2, 1, cone(&[(1, "y", &[0])], &v)),
            ],
        );
        c
    }

    #[test]
    fn example_two_piece_certificate_passes() {
        let r = verify_certificate(&two_piece(), &VerifyOptions::default()).unwrap();
        assert!(r.fully_exact(), "{r}");
        assert!(matches!(
            r.covering,
            CoveringStatus::Sampled {
                uncovered: None,
                ..
            }
        ));
    }

    #[test]
    fn choi_piece_passes() {
        let v = ["x", "y", "z"];
        let target = MatrixPolynomial::parse_rows(
            &[
                &["x^2+2*z^2", "-x*y", "-x*z"],
                &["-x*y", "y^2+2*x^2", "-y*z"],
                &["-x*z", "-y*z", "z^2+2*y^2"],
            ],
            &v,
        )
        .unwrap();
        let mut c = PiecewiseCertificate::new(
            v.iter().map(|s| s.to_string()).collect(),
            target,
            Coverage::Local,
        );
        let one = Proof::ExplicitSos(vec![(int(1), p("1", &v))]);
        c.push_piece(
            Piece::new("x^2>=z^2", vec![p("x^2-z^2", &v)]),
            vec![
                Term::new(
                    p("1", &v),
                    Factor::Square(row(&["-x", "y", "z"], &v)),
                    one.clone(),
                ),
                Term::new(
                    p("2", &v),
                    Factor::Square(row(&["0", "-z", "y"], &v)),
                    Proof::ExplicitSos(vec![(int(2), p("1", &v))]),
                ),
                Term::unit(
                    p("2*z^2", &v),
                    3,
                    0,
                    Proof::ExplicitSos(vec![(int(2), p("z", &v))]),
                ),
                Term::unit(p("2*x^2-2*z^2", &v), 3, 1, cone(&[(2, "1", &[0])], &v)),
            ],
        );
        let r = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        assert!(r.fully_exact(), "{r}");
        assert_eq!(r.covering, CoveringStatus::NotClaimed);
    }

    #[test]
    fn negative_weight_fails_with_witness() {
        let v = ["x"];
        let target = MatrixPolynomial::parse_rows(&[&["-1"]], &v).unwrap();
        let mut c = PiecewiseCertificate::new(vec!["x".into()], target, Coverage::Global);
        c.push_piece(
            Piece::everywhere("R"),
            vec![Term::unit(
                p("-1", &v),
                1,
                0,
                Proof::Sampled {
                    samples: 10,
                    seed: 1,
                },
            )],
        );
        let r = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        assert!(r.identities_exact());
        assert!(!r.passed());
        assert!(r.any_failed_weight());
    }

    #[test]
    fn mutated_square_is_caught() {
        let mut c = two_piece();
        let Factor::Square(u) = &mut c.pieces[0].terms[0].factor else {
            panic!()
        };
        let e = u.get(0, 0) + &Polynomial::one(2);
        u.set(0, 0, e);
        let r = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        match &r.pieces[0].identity {
            IdentityStatus::Mismatch {
                witness, residual, ..
            } => {
                assert_eq!(witness.len(), 2);
                assert!(!num_traits::Zero::is_zero(residual));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_generator_is_malformed() {
        let mut c = two_piece();
        c.pieces[0].terms[2].proof = cone(&[(1, "1", &[3])], &["x", "y"]);
        assert!(verify_certificate(&c, &VerifyOptions::default()).is_err());
    }

    #[test]
    fn file_round_trip() {
        let mut c = two_piece();
        c.pieces[1].piece.sample_box = Some(vec![(rat(-1, 2), rat(1, 3)), (int(-1), int(1))]);
        c.pieces[1].terms[2].proof = Proof::Sampled {
            samples: 30,
            seed: 5,
        };
        let text = c.to_text();
        let back = PiecewiseCertificate::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
        assert!(PiecewiseCertificate::parse("{}").is_err());
    }

    #[test]
    fn bernstein_on_intervals() {
        let v = ["x"];
        let bounds = vec![(int(0), rat(1, 2))];
        let f = p("1-x", &v);
        let proof = prove_on_box(&f, &bounds).unwrap().unwrap();
        let target = MatrixPolynomial::parse_rows(&[&["1-x"]], &v).unwrap();
        let mut c = PiecewiseCertificate::new(vec!["x".into()], target, Coverage::Local);
        c.push_piece(
            Piece::boxed("[0,1/2]", &bounds),
            vec![Term::unit(f, 1, 0, proof)],
        );
        assert!(verify_certificate(&c, &VerifyOptions::default())
            .unwrap()
            .fully_exact());
        // negative beyond 1/4
        assert!(prove_on_box(&p("x/4-x^2", &v), &bounds).unwrap().is_none());
        // positive, but its control net only becomes nonnegative after elevation
        let f = p("(x-1/2)^2+1/50", &v);
        let unit = [(int(0), int(1))];
        assert!(prove_on_box(&f, &unit).unwrap().is_none());
        assert!(prove_on_box_any(&f, &unit, 30).unwrap().is_some());
    }

    #[test]
    fn bernstein_two_variables() {
        let v = ["X", "Y"];
        let bounds = vec![(int(0), rat(1, 4)), (rat(-1, 4), int(0))];
        for s in ["X/4-X^2", "-Y/4-Y^2", "-X*Y", "1/6+X*Y"] {
            let f = p(s, &v);
            let proof = prove_on_box(&f, &bounds).unwrap().expect(s);
            let piece = Piece::boxed("box", &bounds);
            let target = MatrixPolynomial::from_rows(vec![vec![f.clone()]]).unwrap();
            let mut c =
                PiecewiseCertificate::new(vec!["X".into(), "Y".into()], target, Coverage::Local);
            c.push_piece(piece, vec![Term::unit(f, 1, 0, proof)]);
            assert!(
                verify_certificate(&c, &VerifyOptions::default())
                    .unwrap()
                    .fully_exact(),
                "{s}"
            );
        }
    }

    #[test]
    fn splitting_constant_factors() {
        let c = two_piece();
        let s = split_constant_factors(&c).unwrap();
        assert!(s.pieces[1]
            .terms
            .iter()
            .all(|t| matches!(t.factor, Factor::Square(_))));
        assert!(verify_certificate(&s, &VerifyOptions::default())
            .unwrap()
            .fully_exact());
    }

    #[test]
    fn univariate_factor_witness() {
        let v = ["t", "s"];
        let a = MatrixPolynomial::parse_rows(&[&["t", "0"], &["0", "1"]], &v).unwrap();
        let target = a.clone();
        let mut c =
            PiecewiseCertificate::new(vec!["t".into(), "s".into()], target, Coverage::Local);
        c.push_piece(
            Piece::everywhere("all"),
            vec![Term::new(
                p("1", &v),
                Factor::UnivariatePsd(a.clone()),
                Proof::ExplicitSos(vec![(int(1), p("1", &v))]),
            )],
        );
        let r = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        match &r.pieces[0].terms[0].factor {
            FactorStatus::NotPsd { point, vector } => {
                assert!(a.evaluate(point).unwrap().quad_form(vector).is_negative());
            }
            other => panic!("{other:?}"),
        }
    }
}
