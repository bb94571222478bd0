//! The explicit matrices, identities and certificates of the Choi-family
//! study, each wired to the operation that checks it.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::certkit::{
    prove_on_box, psd_constant, verify_certificate, ConeItem, Coverage, Factor, Piece,
    PiecewiseCertificate, PointSampler, Proof, Term, VerifyOptions,
};
use crate::domination::{
    certify_quadratic_2x2, check_domination, DominationOutcome, QuadraticOutcome,
};
use crate::error::{Error, Result};
use crate::matpoly::{determinant, MatrixPolynomial, QMatrix};
use crate::poly::rational::{fmt_rational, int, rat};
use crate::poly::{Polynomial, Rational};

/// Default samples per sampled weight.
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedStatus {
    VerifiesExact,
    WeightSampled,
    DeterminantMatches,
    Rejects,
}

impl fmt::Display for ExpectedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpectedStatus::VerifiesExact => "verifies-exact",
            ExpectedStatus::WeightSampled => "weight-sampled",
            ExpectedStatus::DeterminantMatches => "determinant-matches",
            ExpectedStatus::Rejects => "rejects",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    /// Run through the verifier.
    Certificate(PiecewiseCertificate),
    /// `det(M ∘ substitution) = expected`, structurally.
    Determinant {
        matrix: MatrixPolynomial,
        substitution: Option<Vec<Polynomial>>,
        expected: Polynomial,
    },
    /// `M` psd at seeded points of a box.
    PsdSampled {
        matrix: MatrixPolynomial,
        bounds: Vec<(Rational, Rational)>,
    },
    /// The domination condition at `point`.
    Domination {
        matrix: MatrixPolynomial,
        point: Vec<Rational>,
    },
    /// `certify_quadratic_2x2(a₁, a₂, b₁, b₂, c₁, c₂)`.
    Quadratic([Rational; 6]),
}

#[derive(Clone, Debug)]
pub struct GalleryItem {
    pub id: &'static str,
    pub description: &'static str,
    pub payload: Payload,
    pub expected: ExpectedStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ItemResult {
    pub id: String,
    pub expected: ExpectedStatus,
    /// `None` when the check failed outright.
    pub observed: Option<ExpectedStatus>,
    pub detail: String,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl ItemResult {
    pub fn passed(&self) -> bool {
        self.observed == Some(self.expected)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GalleryReport {
    pub items: Vec<ItemResult>,
}

impl GalleryReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(ItemResult::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl fmt::Display for GalleryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.items {
            let observed = r.observed.map_or("failed".to_string(), |o| o.to_string());
            writeln!(
                f,
                "{:<5} {:<26} expected {:<20} got {:<20} {:>6} ms  {}",
                if r.passed() { "ok" } else { "FAIL" },
                r.id,
                r.expected.to_string(),
                observed,
                r.elapsed.as_millis(),
                r.detail
            )?;
        }
        let ok = self.items.iter().filter(|r| r.passed()).count();
        write!(f, "{ok}/{} gallery items as expected", self.items.len())
    }
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn p(s: &str, v: &[&str]) -> Polynomial {
    Polynomial::parse(s, v).expect("gallery polynomial")
}

fn mat(rows: &[&[&str]], v: &[&str]) -> MatrixPolynomial {
    MatrixPolynomial::parse_rows(rows, v).expect("gallery matrix")
}

fn row(entries: &[&str], v: &[&str]) -> MatrixPolynomial {
    mat(&[entries], v)
}

fn sos(c: Rational, s: &str, v: &[&str]) -> Proof {
    Proof::ExplicitSos(vec![(c, p(s, v))])
}

fn cone(c: Rational, generator: usize, nvars: usize) -> Proof {
    Proof::ConeCombination(vec![ConeItem::new(
        c,
        Polynomial::one(nvars),
        vec![generator],
    )])
}

const XYZ: [&str; 3] = ["x", "y", "z"];

/// `M_λ`; `M₁` is the Choi matrix, `M₀` has the Motzkin-like determinant.
pub fn mlambda(lambda: &Rational) -> MatrixPolynomial {
    let k = Polynomial::constant(3, lambda + Rational::one());
    let sq = |i| Polynomial::var(3, i).pow(2);
    let prod = |i, j| -(&Polynomial::var(3, i) * &Polynomial::var(3, j));
    MatrixPolynomial::from_rows(vec![
        vec![&sq(0) + &(&k * &sq(2)), prod(0, 1), prod(0, 2)],
        vec![prod(0, 1), &sq(1) + &(&k * &sq(0)), prod(1, 2)],
        vec![prod(0, 2), prod(1, 2), &sq(2) + &(&k * &sq(1))],
    ])
    .expect("3x3")
}

pub fn choi() -> MatrixPolynomial {
    mlambda(&Rational::one())
}

pub fn m0() -> MatrixPolynomial {
    mlambda(&Rational::zero())
}

/// `M_l` with `l` a fourth variable.
pub fn mlambda_symbolic() -> MatrixPolynomial {
    let v = ["x", "y", "z", "l"];
    mat(
        &[
            &["x^2+(l+1)*z^2", "-x*y", "-x*z"],
            &["-x*y", "y^2+(l+1)*x^2", "-y*z"],
            &["-x*z", "-y*z", "z^2+(l+1)*y^2"],
        ],
        &v,
    )
}

/// The cyclic relabelling `x → z, y → x, z → y` applied to a piece: with
/// `R = (e₂, e₃, e₁)`, `M(x) = Rᵀ M(σx) R` for the Choi family, so every
/// `U` becomes `U(σx)·R`.
pub fn cyclic_image(piece: &Piece, terms: &[Term]) -> Result<(Piece, Vec<Term>)> {
    let subs: Vec<Polynomial> = [2, 0, 1].iter().map(|&i| Polynomial::var(3, i)).collect();
    let sub = |q: &Polynomial| q.substitute(&subs);
    let r = QMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
    let r_poly = MatrixPolynomial::from_constant(&r, 3);
    let constraints = piece
        .constraints
        .iter()
        .map(sub)
        .collect::<Result<Vec<_>>>()?;
    let label = constraints
        .iter()
        .map(|g| format!("{g} >= 0"))
        .collect::<Vec<_>>()
        .join(", ");
    let mut image = Piece::new(label, constraints);
    image.sample_box = piece.sample_box.clone();
    let mut out = Vec::new();
    for t in terms {
        let factor = match &t.factor {
            Factor::Square(u) => Factor::Square(u.substitute(&subs)?.mul(&r_poly)),
            Factor::ConstPsd(q) => Factor::ConstPsd(r.transpose().mul(q).mul(&r)),
            Factor::UnivariatePsd(_) => {
                return Err(Error::InvalidArgument(
                    "univariate factors have no cyclic image".into(),
                ))
            }
        };
        let proof = match &t.proof {
            Proof::ExplicitSos(items) => Proof::ExplicitSos(
                items
                    .iter()
                    .map(|(c, s)| Ok((c.clone(), sub(s)?)))
                    .collect::<Result<_>>()?,
            ),
            Proof::ConeCombination(items) => Proof::ConeCombination(
                items
                    .iter()
                    .map(|it| {
                        Ok(ConeItem::new(
                            it.coeff.clone(),
                            sub(&it.square)?,
                            it.generators.clone(),
                        ))
                    })
                    .collect::<Result<_>>()?,
            ),
            s @ Proof::Sampled { .. } => s.clone(),
        };
        out.push(Term::new(sub(&t.weight)?, factor, proof));
    }
    Ok((image, out))
}

/// Two-piece identity for `[[1+x², xy], [xy, x²+y⁴]]`.
pub fn two_piece_certificate() -> PiecewiseCertificate {
    let v = ["x", "y"];
    let target = mat(&[&["1+x^2", "x*y"], &["x*y", "x^2+y^4"]], &v);
    let mut c = PiecewiseCertificate::new(vars(&v), target, Coverage::Global);
    let one = || sos(int(1), "1", &v);
    c.push_piece(
        Piece::new("x^2 >= y^2", vec![p("x^2-y^2", &v)]),
        vec![
            Term::new(p("1", &v), Factor::Square(row(&["x", "y"], &v)), one()),
            Term::unit(p("1", &v), 2, 0, one()),
            Term::unit(
                p("x^2-y^2+y^4", &v),
                2,
                1,
                Proof::ConeCombination(vec![
                    ConeItem::new(int(1), p("1", &v), vec![0]),
                    ConeItem::new(int(1), p("y^2", &v), vec![]),
                ]),
            ),
        ],
    );
    c.push_piece(
        Piece::new("y^2 >= x^2", vec![p("y^2-x^2", &v)]),
        vec![
            Term::new(p("1", &v), Factor::Square(row(&["1", "x*y"], &v)), one()),
            Term::new(
                p("x^2", &v),
                Factor::ConstPsd(QMatrix::identity(2)),
                sos(int(1), "x", &v),
            ),
            Term::unit(
                p("y^4-x^2*y^2", &v),
                2,
                1,
                Proof::ConeCombination(vec![ConeItem::new(int(1), p("y", &v), vec![0])]),
            ),
        ],
    );
    c
}

/// `[[1+x², xy], [xy, x²+y⁴]] + ε·diag(x⁴+y⁴, 1+x⁴)` with `ε = 1/100`.
pub fn regularized_matrix() -> MatrixPolynomial {
    let v = ["x", "y"];
    mat(
        &[
            &["1+x^2+(x^4+y^4)/100", "x*y"],
            &["x*y", "(1+x^4)/100+x^2+y^4"],
        ],
        &v,
    )
}

/// `[[x², xy], [xy, y²]] = (x, y)ᵀ(x, y)`.
pub fn rank_one_certificate() -> PiecewiseCertificate {
    let v = ["x", "y"];
    let target = mat(&[&["x^2", "x*y"], &["x*y", "y^2"]], &v);
    let mut c = PiecewiseCertificate::new(vars(&v), target, Coverage::Global);
    c.push_piece(
        Piece::everywhere("R^2"),
        vec![Term::new(
            p("1", &v),
            Factor::Square(row(&["x", "y"], &v)),
            sos(int(1), "1", &v),
        )],
    );
    c
}

/// `[[1 + x² − y², −x], [−x, y²]]`, psd on an orthant-neighbourhood of
/// `(1⁺, 1⁺)`.
pub fn corner_matrix() -> MatrixPolynomial {
    mat(&[&["1+x^2-y^2", "-x"], &["-x", "y^2"]], &["x", "y"])
}

/// The matrix above after `x = 1 + Y + H`, `y = 1 + Y`, in variables `(H, Y)`.
pub fn corner_shifted() -> MatrixPolynomial {
    let v = ["H", "Y"];
    corner_matrix()
        .substitute(&[p("1+Y+H", &v), p("1+Y", &v)])
        .expect("two variables")
}

/// `N = P·M·Pᵀ` with `P = [[1, −1], [1, 1]]`; `N(0) = diag(4, 0)`.
pub fn corner_n() -> MatrixPolynomial {
    let v = ["H", "Y"];
    let pm = mat(&[&["1", "-1"], &["1", "1"]], &v);
    pm.mul(&corner_shifted()).mul(&pm.transpose())
}

/// The Choi piece `x² ≥ z²`.
pub fn choi_piece() -> (Piece, Vec<Term>) {
    let v = XYZ;
    let piece = Piece::new("x^2 >= z^2", vec![p("x^2-z^2", &v)]);
    let terms = vec![
        Term::new(
            p("1", &v),
            Factor::Square(row(&["-x", "y", "z"], &v)),
            sos(int(1), "1", &v),
        ),
        Term::new(
            p("2", &v),
            Factor::Square(row(&["0", "-z", "y"], &v)),
            sos(int(2), "1", &v),
        ),
        Term::unit(p("2*z^2", &v), 3, 0, sos(int(2), "z", &v)),
        Term::unit(p("2*x^2-2*z^2", &v), 3, 1, cone(int(2), 0, 3)),
    ];
    (piece, terms)
}

pub fn choi_local_certificate() -> PiecewiseCertificate {
    let (piece, terms) = choi_piece();
    let mut c = PiecewiseCertificate::new(vars(&XYZ), choi(), Coverage::Local);
    c.push_piece(piece, terms);
    c
}

/// The piece `x² ≥ z²` and its two cyclic images; `x² < z² < y² < x²` is
/// impossible, so the three pieces cover ℝ³.
pub fn choi_certificate() -> PiecewiseCertificate {
    let mut c = PiecewiseCertificate::new(vars(&XYZ), choi(), Coverage::Global);
    let (mut piece, mut terms) = choi_piece();
    for _ in 0..3 {
        c.push_piece(piece.clone(), terms.clone());
        (piece, terms) = cyclic_image(&piece, &terms).expect("cyclic image");
    }
    c
}

/// Patch certificates for `M_λ` near `[1:0:0]`, `[0:1:0]`, `[0:0:1]`, with
/// `κ = λ + 1`:
/// `M_λ = (−x, y, z)ᵀ(−x, y, z) + κz²E₁ + (1/κ)(0, 2z, −κy)ᵀ(0, 2z, −κy)
///        + (1/κ)(κ²x² − 4z²)E₂` on `κ²x² ≥ 4z²`, and cyclic images.
/// For `κ ≥ 2` the three patches cover ℝ³.
pub fn mlambda_certificate(lambda: &Rational) -> Result<PiecewiseCertificate> {
    if *lambda <= Rational::zero() {
        return Err(Error::InvalidArgument(format!(
            "lambda = {} must be positive",
            fmt_rational(lambda)
        )));
    }
    let v = XYZ;
    let kappa = lambda + Rational::one();
    let inv = Rational::one() / &kappa;
    let k = |s: &str| Polynomial::parse(s, &v).expect("patch").scale(&kappa);
    let g = &k("x^2").scale(&kappa) - &p("4*z^2", &v);
    let piece = Piece::new(
        format!("{0}^2*x^2 >= 4*z^2", fmt_rational(&kappa)),
        vec![g.clone()],
    );
    let mut middle = row(&["0", "2*z", "0"], &v);
    middle.set(0, 2, k("-y"));
    let terms = vec![
        Term::new(
            p("1", &v),
            Factor::Square(row(&["-x", "y", "z"], &v)),
            sos(int(1), "1", &v),
        ),
        Term::unit(k("z^2"), 3, 0, sos(kappa.clone(), "z", &v)),
        Term::new(
            Polynomial::constant(3, inv.clone()),
            Factor::Square(middle),
            sos(inv.clone(), "1", &v),
        ),
        Term::unit(g.scale(&inv), 3, 1, cone(inv, 0, 3)),
    ];
    let coverage = if kappa >= int(2) {
        Coverage::Global
    } else {
        Coverage::Local
    };
    let mut c = PiecewiseCertificate::new(vars(&v), mlambda(lambda), coverage);
    let (mut piece, mut terms) = (piece, terms);
    for _ in 0..3 {
        c.push_piece(piece.clone(), terms.clone());
        (piece, terms) = cyclic_image(&piece, &terms)?;
    }
    Ok(c)
}

/// Data of the orthant certificate for `M₀` at `[1:1:1]`, in `z = 1`,
/// `x = 1 + X`, `y = 1 + Y`.
pub struct Orthant111 {
    pub target: MatrixPolynomial,
    pub a0: QMatrix,
    pub c2: QMatrix,
    pub c_x: MatrixPolynomial,
    pub c_y: MatrixPolynomial,
}

const XY: [&str; 2] = ["X", "Y"];

pub fn orthant_111() -> Orthant111 {
    let v = XY;
    let target = m0()
        .substitute(&[p("1+X", &v), p("1+Y", &v), p("1", &v)])
        .expect("three variables");
    let a0 = QMatrix::from_i64(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
    let c2 = QMatrix::from_i64(&[&[0, -1, 0], &[-1, 0, 0], &[0, 0, 0]]);
    let c_x = mat(
        &[
            &[
                "(18*X^2+9*X+5)/6",
                "(-12*X^2-9*X-5)/12",
                "(-12*X^2-9*X-5)/12",
            ],
            &[
                "(-12*X^2-9*X-5)/12",
                "(18*X^2+9*X+5)/6",
                "(-12*X^2+3*X-5)/12",
            ],
            &[
                "(-12*X^2-9*X-5)/12",
                "(-12*X^2+3*X-5)/12",
                "(12*X^2-3*X+5)/6",
            ],
        ],
        &v,
    );
    let c_y = mat(
        &[
            &[
                "(12*Y^2+3*Y+5)/6",
                "(-12*Y^2-15*Y-5)/12",
                "(-12*Y^2-3*Y-5)/12",
            ],
            &[
                "(-12*Y^2-15*Y-5)/12",
                "(18*Y^2+15*Y+5)/6",
                "(-12*Y^2-15*Y-5)/12",
            ],
            &[
                "(-12*Y^2-3*Y-5)/12",
                "(-12*Y^2-15*Y-5)/12",
                "(18*Y^2+15*Y+5)/6",
            ],
        ],
        &v,
    );
    Orthant111 {
        target,
        a0,
        c2,
        c_x,
        c_y,
    }
}

/// `M₀ = A₀(X/4 − X²) + C_X + A₀(−Y/4 − Y²) + C_Y + (1 + 6XY)/6·A₀ − XY(A₀ − C₂)`
/// on the box `0 ≤ X ≤ 1/4`, `−1/4 ≤ Y ≤ 0`.
pub fn orthant_111_certificate() -> Result<PiecewiseCertificate> {
    let v = XY;
    let o = orthant_111();
    let bounds = vec![(int(0), rat(1, 4)), (rat(-1, 4), int(0))];
    let proved = |s: &str| -> Result<(Polynomial, Proof)> {
        let w = p(s, &v);
        let proof = prove_on_box(&w, &bounds)?
            .ok_or_else(|| Error::Construction(format!("no Bernstein proof for {s}")))?;
        Ok((w, proof))
    };
    let one = || sos(int(1), "1", &v);
    let mut terms = Vec::new();
    for (s, q) in [
        ("X/4-X^2", o.a0.clone()),
        ("-Y/4-Y^2", o.a0.clone()),
        ("1/6+X*Y", o.a0.clone()),
        ("-X*Y", o.a0.sub(&o.c2)),
    ] {
        let (w, proof) = proved(s)?;
        terms.push(Term::new(w, Factor::ConstPsd(q), proof));
    }
    terms.push(Term::new(
        p("1", &v),
        Factor::UnivariatePsd(o.c_x.clone()),
        one(),
    ));
    terms.push(Term::new(
        p("1", &v),
        Factor::UnivariatePsd(o.c_y.clone()),
        one(),
    ));
    let mut c = PiecewiseCertificate::new(vars(&v), o.target, Coverage::Local);
    c.push_piece(
        Piece::boxed("0 <= X <= 1/4, -1/4 <= Y <= 0", &bounds),
        terms,
    );
    Ok(c)
}

/// Every item, in a fixed order.
pub fn items() -> Vec<GalleryItem> {
    let mut out = vec![
        GalleryItem {
            id: "two-piece-cert",
            description: "two-piece certificate for [[1+x^2, xy], [xy, x^2+y^4]]",
            payload: Payload::Certificate(two_piece_certificate()),
            expected: ExpectedStatus::VerifiesExact,
        },
        GalleryItem {
            id: "regularized-matrix",
            description:
                "two-piece matrix + eps*diag(x^4+y^4, 1+x^4), eps = 1/100, psd at sampled points",
            payload: Payload::PsdSampled {
                matrix: regularized_matrix(),
                bounds: vec![(int(-2), int(2)), (int(-2), int(2))],
            },
            expected: ExpectedStatus::WeightSampled,
        },
        GalleryItem {
            id: "remark-rank-one",
            description: "[[x^2, xy], [xy, y^2]] as a single hermitian square",
            payload: Payload::Certificate(rank_one_certificate()),
            expected: ExpectedStatus::VerifiesExact,
        },
        GalleryItem {
            id: "corner-matrix",
            description: "[[1+x^2-y^2, -x], [-x, y^2]] psd near (1+, 1+)",
            payload: Payload::PsdSampled {
                matrix: corner_shifted(),
                bounds: vec![(int(0), rat(1, 16)), (int(0), rat(1, 16))],
            },
            expected: ExpectedStatus::WeightSampled,
        },
        GalleryItem {
            id: "corner-shift",
            description: "domination fails for N(H, Y) at the origin",
            payload: Payload::Domination {
                matrix: corner_n(),
                point: vec![int(0), int(0)],
            },
            expected: ExpectedStatus::Rejects,
        },
        GalleryItem {
            id: "m0-det",
            description: "det M0 = x^4y^2 + y^4z^2 + z^4x^2 - 3x^2y^2z^2",
            payload: Payload::Determinant {
                matrix: m0(),
                substitution: None,
                expected: p("x^4*y^2+y^4*z^2+z^4*x^2-3*x^2*y^2*z^2", &XYZ),
            },
            expected: ExpectedStatus::DeterminantMatches,
        },
        GalleryItem {
            id: "mlambda-det-111",
            description: "det M_l(1, 1, 1) = l(l+3)^2",
            payload: Payload::Determinant {
                matrix: mlambda_symbolic(),
                substitution: Some(
                    ["1", "1", "1", "l"]
                        .iter()
                        .map(|s| p(s, &["x", "y", "z", "l"]))
                        .collect(),
                ),
                expected: p("l*(l+3)^2", &["x", "y", "z", "l"]),
            },
            expected: ExpectedStatus::DeterminantMatches,
        },
        GalleryItem {
            id: "choi-cover-x-ge-z",
            description: "Choi matrix on x^2 >= z^2",
            payload: Payload::Certificate(choi_local_certificate()),
            expected: ExpectedStatus::VerifiesExact,
        },
        GalleryItem {
            id: "choi-cyclic",
            description: "Choi matrix, x^2 >= z^2 and its two cyclic images",
            payload: Payload::Certificate(choi_certificate()),
            expected: ExpectedStatus::VerifiesExact,
        },
    ];
    for (id, l) in [
        ("mlambda-cert-1", int(1)),
        ("mlambda-cert-4", int(4)),
        ("mlambda-cert-1/2", rat(1, 2)),
    ] {
        out.push(GalleryItem {
            id,
            description: "M_lambda patches near the coordinate points",
            payload: Payload::Certificate(mlambda_certificate(&l).expect("positive lambda")),
            expected: ExpectedStatus::VerifiesExact,
        });
    }
    out.push(GalleryItem {
        id: "orthant-111",
        description: "M0 on the orthant X > 0, Y < 0 at [1:1:1]",
        payload: Payload::Certificate(orthant_111_certificate().expect("Bernstein proofs")),
        expected: ExpectedStatus::VerifiesExact,
    });
    out.push(GalleryItem {
        id: "quadratic-2x2",
        description: "[[1, x], [x, 2x^2]] near 0+",
        payload: Payload::Quadratic([int(0), int(0), int(1), int(0), int(0), int(2)]),
        expected: ExpectedStatus::VerifiesExact,
    });
    out.push(GalleryItem {
        id: "quadratic-2x2-c1-negative",
        description: "(2,2) entry -x + 5x^2 is negative near 0+",
        payload: Payload::Quadratic([int(0), int(0), int(0), int(0), int(-1), int(5)]),
        expected: ExpectedStatus::Rejects,
    });
    out
}

/// Gallery certificates, for mutation testing.
pub fn certificates() -> Vec<(&'static str, PiecewiseCertificate)> {
    items()
        .into_iter()
        .filter_map(|it| match it.payload {
            Payload::Certificate(c) => Some((it.id, c)),
            _ => None,
        })
        .collect()
}

fn verify_status(
    cert: &PiecewiseCertificate,
    opts: &VerifyOptions,
) -> Result<(Option<ExpectedStatus>, String)> {
    let r = verify_certificate(cert, opts)?;
    let status = if !r.passed() {
        None
    } else if r.weights_exact() {
        Some(ExpectedStatus::VerifiesExact)
    } else {
        Some(ExpectedStatus::WeightSampled)
    };
    let detail = format!(
        "{} piece(s), {}",
        cert.pieces.len(),
        if r.passed() { "passed" } else { "failed" }
    );
    Ok((status, detail))
}

fn run_item(item: &GalleryItem, samples: usize) -> Result<(Option<ExpectedStatus>, String)> {
    let opts = VerifyOptions {
        samples: Some(samples),
        ..VerifyOptions::default()
    };
    match &item.payload {
        Payload::Certificate(c) => verify_status(c, &opts),
        Payload::Determinant {
            matrix,
            substitution,
            expected,
        } => {
            let m = match substitution {
                Some(s) => matrix.substitute(s)?,
                None => matrix.clone(),
            };
            let det = determinant(&m)?;
            if &det == expected {
                Ok((
                    Some(ExpectedStatus::DeterminantMatches),
                    "structural equality".into(),
                ))
            } else {
                Ok((None, format!("determinant differs by {}", &det - expected)))
            }
        }
        Payload::PsdSampled { matrix, bounds } => {
            let mut sampler = PointSampler::new(bounds.clone(), 0);
            for _ in 0..samples {
                let pt = sampler.next_point();
                if !psd_constant(&matrix.evaluate(&pt)?)? {
                    let shown: Vec<String> = pt.iter().map(fmt_rational).collect();
                    return Ok((None, format!("not psd at ({})", shown.join(", "))));
                }
            }
            Ok((
                Some(ExpectedStatus::WeightSampled),
                format!("psd at {samples} sampled points"),
            ))
        }
        Payload::Domination { matrix, point } => match check_domination(matrix, point)? {
            DominationOutcome::Fails { alpha } => Ok((
                Some(ExpectedStatus::Rejects),
                format!("domination fails at alpha = {alpha}"),
            )),
            DominationOutcome::Satisfied(_) => Ok((None, "domination holds".into())),
        },
        Payload::Quadratic(c) => {
            match certify_quadratic_2x2(&c[0], &c[1], &c[2], &c[3], &c[4], &c[5])? {
                QuadraticOutcome::Certified {
                    branch,
                    certificate,
                } => {
                    let (s, d) = verify_status(&certificate, &opts)?;
                    Ok((s, format!("{branch:?}: {d}")))
                }
                QuadraticOutcome::Uncertified { reason } => {
                    Ok((Some(ExpectedStatus::Rejects), reason))
                }
            }
        }
    }
}

/// Runs every item whose id contains `filter`, in parallel; results keep
/// the gallery order.
pub fn run_gallery(filter: Option<&str>) -> GalleryReport {
    run_gallery_with(filter, DEFAULT_SAMPLES)
}

pub fn run_gallery_with(filter: Option<&str>, samples: usize) -> GalleryReport {
    let selected: Vec<GalleryItem> = items()
        .into_iter()
        .filter(|it| filter.is_none_or(|f| it.id.contains(f)))
        .collect();
    let items = selected
        .par_iter()
        .map(|item| {
            let start = Instant::now();
            let (observed, detail) = match run_item(item, samples) {
                Ok(r) => r,
                Err(e) => (None, format!("error: {e}")),
            };
            ItemResult {
                id: item.id.to_string(),
                expected: item.expected,
                observed,
                detail,
                elapsed: start.elapsed(),
            }
        })
        .collect();
    GalleryReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certkit::{psd_univariate_matrix, VerificationReport};

    fn exact(c: &PiecewiseCertificate) -> VerificationReport {
        let r = verify_certificate(c, &VerifyOptions::default()).unwrap();
        assert!(r.fully_exact(), "{r}");
        r
    }

    #[test]
    fn m0_determinant() {
        assert_eq!(
            determinant(&m0()).unwrap(),
            p("x^4*y^2+y^4*z^2+z^4*x^2-3*x^2*y^2*z^2", &XYZ)
        );
    }

    #[test]
    fn choi_pieces() {
        exact(&choi_local_certificate());
        let c = choi_certificate();
        assert_eq!(c.pieces[1].piece.constraints[0], p("z^2-y^2", &XYZ));
        assert_eq!(c.pieces[2].piece.constraints[0], p("y^2-x^2", &XYZ));
        exact(&c);
    }

    #[test]
    fn mlambda_patches() {
        for l in [int(1), int(4), rat(1, 2), rat(7, 3)] {
            exact(&mlambda_certificate(&l).unwrap());
        }
        // κ = 2: the first patch is the Choi piece up to the split of the middle term
        let c = mlambda_certificate(&int(1)).unwrap();
        assert_eq!(c.pieces[0].terms[3].weight, p("2*x^2-2*z^2", &XYZ));
        assert_eq!(c.coverage, Coverage::Global);
        assert_eq!(
            mlambda_certificate(&rat(1, 2)).unwrap().coverage,
            Coverage::Local
        );
        assert!(mlambda_certificate(&int(0)).is_err());
        assert!(mlambda_certificate(&int(-1)).is_err());
    }

    #[test]
    fn orthant_pieces() {
        let o = orthant_111();
        assert!(psd_univariate_matrix(&o.c_x, 0).unwrap());
        assert!(psd_univariate_matrix(&o.c_y, 1).unwrap());
        // C_X = A_X − A₀(X/4 − X²) with A_X = (5/12)A₀ + X·A₁ + X²·A₂
        let a_x = o
            .target
            .map(|e| {
                Polynomial::from_terms(
                    2,
                    e.terms()
                        .filter(|(m, _)| m.0[1] == 0)
                        .map(|(m, c)| (m.clone(), c.clone())),
                )
                .unwrap()
            })
            .sub(&MatrixPolynomial::from_constant(
                &o.a0.scale(&rat(7, 12)),
                2,
            ));
        let w = p("X/4-X^2", &XY);
        assert_eq!(
            a_x.sub(&MatrixPolynomial::scaled_constant(&w, &o.a0)),
            o.c_x
        );
        exact(&orthant_111_certificate().unwrap());
    }

    #[test]
    fn corner_objects() {
        let n = corner_n();
        assert_eq!(
            n.evaluate(&[int(0), int(0)]).unwrap(),
            QMatrix::from_i64(&[&[4, 0], &[0, 0]])
        );
    }

    #[test]
    fn whole_gallery() {
        let r = run_gallery(None);
        assert!(r.passed(), "{r}");
        assert_eq!(run_gallery(Some("m0-det")).items.len(), 1);
    }
}
