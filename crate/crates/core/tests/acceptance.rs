//! One test per acceptance criterion; each prints a single PASS/FAIL line
//! with its measured runtime against the pinned limit.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semicert::certkit::{
    psd_univariate_matrix, psd_univariate_scalar, verify_certificate, Factor, IdentityStatus,
    PiecewiseCertificate, VerifyOptions,
};
use semicert::construct::{cover_sphere, CoverOptions};
use semicert::detrepr::quadratic_determinantal_representation;
use semicert::domination::{
    certify_quadratic_2x2, check_domination, orthant_certificate_from_domination,
    DominationOutcome, QuadraticBranch, QuadraticOutcome,
};
use semicert::gallery;
use semicert::matpoly::{
    cauchy_binet_expand, determinant, smith_normal_form, sum_of_squares, MatrixPolynomial, QMatrix,
};
use semicert::poly::rational::{int, rat};
use semicert::poly::UniPoly;
use semicert::{MultiIndex, Polynomial, Rational};

/// Relative residual bound for inexact determinantal representations.
const DETREP_TOLERANCE: f64 = 1e-8;
/// Samples per sampled weight in the round-trip and gallery checks.
const SAMPLES: usize = 200;
/// The construction samples each weight this many times; verification uses
/// four times as many.
const RESOLUTION_FACTOR: usize = 4;

fn report(n: u32, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let within = elapsed <= limit;
    println!(
        "criterion {n:>2} [{name}]: {} ({:.2?} of {:.0?}){}{}",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed,
        limit,
        if detail.is_empty() { "" } else { "; " },
        detail
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(
        within,
        "criterion {n} over its time limit: {elapsed:.2?} > {limit:.0?}"
    );
}

fn p(s: &str, v: &[&str]) -> Polynomial {
    Polynomial::parse(s, v).unwrap()
}

fn small_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn positive_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(1..=num), rng.gen_range(1..=den))
}

#[test]
fn criterion_01_m0_determinant() {
    let start = Instant::now();
    let det = determinant(&gallery::m0()).unwrap();
    let expected = p("x^4*y^2+y^4*z^2+z^4*x^2-3*x^2*y^2*z^2", &["x", "y", "z"]);
    report(
        1,
        "det M0",
        det == expected,
        start.elapsed(),
        Duration::from_secs(1),
        "",
    );
}

#[test]
fn criterion_02_mlambda_at_111() {
    let start = Instant::now();
    let v = ["x", "y", "z", "l"];
    let at = gallery::mlambda_symbolic()
        .substitute(&[p("1", &v), p("1", &v), p("1", &v), p("l", &v)])
        .unwrap();
    let ok = determinant(&at).unwrap() == p("l*(l+3)^2", &v);
    report(
        2,
        "det M_l(1,1,1)",
        ok,
        start.elapsed(),
        Duration::from_secs(1),
        "",
    );
}

#[test]
fn criterion_03_worked_certificates() {
    let start = Instant::now();
    let mut certs: Vec<(&str, PiecewiseCertificate)> = vec![
        ("choi", gallery::choi_certificate()),
        ("two-piece", gallery::two_piece_certificate()),
        ("orthant-111", gallery::orthant_111_certificate().unwrap()),
    ];
    for (name, l) in [
        ("mlambda-1", int(1)),
        ("mlambda-4", int(4)),
        ("mlambda-1/2", rat(1, 2)),
    ] {
        certs.push((name, gallery::mlambda_certificate(&l).unwrap()));
    }
    let mut failures = Vec::new();
    for (name, c) in &certs {
        let r = verify_certificate(c, &VerifyOptions::default()).unwrap();
        if !(r.passed() && r.identities_exact()) {
            failures.push(name.to_string());
        }
    }
    let o = gallery::orthant_111();
    if !psd_univariate_matrix(&o.c_x, 0).unwrap() {
        failures.push("C_X".into());
    }
    if !psd_univariate_matrix(&o.c_y, 1).unwrap() {
        failures.push("C_Y".into());
    }
    let detail = if failures.is_empty() {
        format!("{} certificates exact, C_X and C_Y psd", certs.len())
    } else {
        format!("failed: {}", failures.join(", "))
    };
    report(
        3,
        "gallery certificates",
        failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(10),
        &detail,
    );
}

#[test]
fn criterion_04_cauchy_binet() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let s = rng.gen_range(m..=5);
        let rows: Vec<Vec<Rational>> = (0..s)
            .map(|_| (0..m).map(|_| int(rng.gen_range(-5..=5))).collect())
            .collect();
        let q = QMatrix::from_rows(rows).unwrap();
        let a = MatrixPolynomial::from_constant(&q, 1);
        let (det, minors) = cauchy_binet_expand(&a).unwrap();
        // independent check on the constant matrices
        let gram_det = q.transpose().mul(&q).det();
        if det != sum_of_squares(&minors, 1) || det.constant_term() != gram_det {
            bad += 1;
        }
    }
    report(
        4,
        "Cauchy-Binet",
        bad == 0,
        start.elapsed(),
        Duration::from_secs(5),
        &format!("{bad}/100 mismatches"),
    );
}

fn random_univariate_matrix(rng: &mut impl Rng) -> MatrixPolynomial {
    let m = rng.gen_range(1..=3);
    let rows = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let deg = rng.gen_range(0..=3);
                    let coeffs: Vec<Rational> =
                        (0..=deg).map(|_| int(rng.gen_range(-3..=3))).collect();
                    UniPoly::new(coeffs).to_polynomial(1, 0)
                })
                .collect()
        })
        .collect();
    MatrixPolynomial::from_rows(rows).unwrap()
}

#[test]
fn criterion_05_smith_form() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for k in 0..100 {
        let m = random_univariate_matrix(&mut rng);
        let s = smith_normal_form(&m).unwrap();
        let product_ok = s.e.mul(&s.d_matrix()).mul(&s.f) == m;
        let unimodular = [&s.e, &s.f].iter().all(|u| {
            let d = determinant(u).unwrap();
            d.is_constant() && !d.is_zero()
        });
        let chain =
            s.d.windows(2)
                .all(|w| w[1].is_zero() || (!w[0].is_zero() && w[1].div_exact(&w[0]).is_some()));
        if !(product_ok && unimodular && chain && s.check(&m).is_ok()) {
            bad.push(k);
        }
    }
    report(
        5,
        "Smith normal form",
        bad.is_empty(),
        start.elapsed(),
        Duration::from_secs(30),
        &format!("failing instances {bad:?}"),
    );
}

#[test]
fn criterion_06_sphere_cover() {
    let start = Instant::now();
    let v = ["x", "y", "z"];
    let a = gallery::m0().add(&MatrixPolynomial::scaled_constant(
        &p("x^2+y^2+z^2", &v),
        &QMatrix::identity(3),
    ));
    let opts = CoverOptions::default();
    let vars: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    let cert = cover_sphere(&a, &vars, &opts).unwrap();
    let r = verify_certificate(
        &cert,
        &VerifyOptions {
            samples: Some(RESOLUTION_FACTOR * opts.samples),
            seed: Some(opts.seed + 1),
            covering_samples: RESOLUTION_FACTOR * VerifyOptions::default().covering_samples,
            covering_seed: 6,
        },
    )
    .unwrap();
    let ok = r.identities_exact() && r.passed();
    let detail = format!(
        "{} caps, identities exact: {}, passed: {}",
        cert.pieces.len(),
        r.identities_exact(),
        r.passed()
    );
    report(
        6,
        "sphere cover of M0 + |x|^2 Id",
        ok,
        start.elapsed(),
        Duration::from_secs(120),
        &detail,
    );
}

/// `Σ_{β∈B} x^β P_β + Σ x^{β+γ} S`, with `P_β` positive definite and the
/// `S` arbitrary symmetric: dominated whenever the `β` are pairwise
/// incomparable.
fn random_dominated(rng: &mut impl Rng) -> MatrixPolynomial {
    let n = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=3);
    let bases: Vec<Vec<u32>> = match (n, rng.gen_range(0..3)) {
        (1, 0) => vec![vec![0]],
        (1, 1) => vec![vec![1]],
        (1, _) => vec![vec![2]],
        (_, 0) => vec![vec![0, 0]],
        (_, 1) => vec![vec![2, 0], vec![0, 2]],
        (_, _) => vec![vec![1, 1]],
    };
    let random_sym = |rng: &mut dyn rand::RngCore, pd: bool| {
        let mut q = QMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = if pd && i == j {
                    int(rng.gen_range(3..=6) * m as i64)
                } else {
                    int(rng.gen_range(-2..=2))
                };
                q.set(i, j, v.clone());
                q.set(j, i, v);
            }
        }
        q
    };
    let mut a = MatrixPolynomial::zeros(m, m, n);
    for b in &bases {
        let mono = Polynomial::monomial(MultiIndex(b.clone()), Rational::one());
        a = a.add(&MatrixPolynomial::scaled_constant(
            &mono,
            &random_sym(rng, true),
        ));
        for _ in 0..rng.gen_range(1..=3) {
            let g: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            if g.iter().all(|&e| e == 0) {
                continue;
            }
            let e: Vec<u32> = b.iter().zip(&g).map(|(x, y)| x + y).collect();
            let mono = Polynomial::monomial(MultiIndex(e), Rational::one());
            a = a.add(&MatrixPolynomial::scaled_constant(
                &mono,
                &random_sym(rng, false),
            ));
        }
    }
    a
}

#[test]
fn criterion_07_domination_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut done, mut bad, mut attempts) = (0, 0, 0);
    while done < 50 && attempts < 1000 {
        attempts += 1;
        let a = random_dominated(&mut rng);
        let n = a.nvars();
        let x0 = vec![Rational::zero(); n];
        let DominationOutcome::Satisfied(w) = check_domination(&a, &x0).unwrap() else {
            continue;
        };
        // a sign is free unless some β ∈ Γ is odd in that coordinate
        let gamma = w.gamma.indices();
        let signs: Vec<i8> = (0..n)
            .map(|i| {
                let free = gamma.iter().all(|b| b.0[i] % 2 == 0);
                if free && rng.gen_bool(0.5) {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let vars: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
        let (cert, _) = orthant_certificate_from_domination(&a, &signs, &w, &vars).unwrap();
        let r = verify_certificate(
            &cert,
            &VerifyOptions {
                samples: Some(SAMPLES),
                ..VerifyOptions::default()
            },
        )
        .unwrap();
        if !(r.identities_exact() && r.passed()) {
            bad += 1;
        }
        done += 1;
    }
    let ok = done == 50 && bad == 0;
    report(
        7,
        "domination round trip",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("{done} instances, {bad} failures, {attempts} drawn"),
    );
}

fn quadratic_instance(rng: &mut impl Rng, branch: QuadraticBranch) -> [Rational; 6] {
    let z = Rational::zero();
    let (a1, a2) = (small_rational(rng, 5, 3), small_rational(rng, 5, 3));
    let b1 = loop {
        let b = small_rational(rng, 4, 2);
        if !b.is_zero() {
            break b;
        }
    };
    let b2 = small_rational(rng, 4, 3);
    let two = int(2);
    match branch {
        QuadraticBranch::LinearPositive => [
            a1,
            a2,
            b1,
            b2,
            positive_rational(rng, 5, 3),
            small_rational(rng, 5, 3),
        ],
        QuadraticBranch::SchurPositive => {
            let c2 = &b1 * &b1 + positive_rational(rng, 3, 4);
            [a1, a2, b1, b2, z, c2]
        }
        QuadraticBranch::Degenerate => [a1, a2, z.clone(), z.clone(), z.clone(), z],
        QuadraticBranch::RankOneStrict => {
            let a1 = &two * &b2 / &b1 + positive_rational(rng, 3, 4);
            [a1, a2, b1.clone(), b2, z, &b1 * &b1]
        }
        QuadraticBranch::RankOneCritical => {
            let k = &b2 / &b1;
            let a2 = &k * &k + positive_rational(rng, 2, 3);
            [&two * &k, a2, b1.clone(), b2, z, &b1 * &b1]
        }
    }
}

#[test]
fn criterion_08_quadratic_branches() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let branches = [
        QuadraticBranch::LinearPositive,
        QuadraticBranch::SchurPositive,
        QuadraticBranch::Degenerate,
        QuadraticBranch::RankOneStrict,
        QuadraticBranch::RankOneCritical,
    ];
    let mut failures = Vec::new();
    for branch in branches {
        for _ in 0..20 {
            let c = quadratic_instance(&mut rng, branch);
            let out = certify_quadratic_2x2(&c[0], &c[1], &c[2], &c[3], &c[4], &c[5]).unwrap();
            let ok = out.branch() == Some(branch)
                && out.certificate().is_some_and(|cert| {
                    let r = verify_certificate(cert, &VerifyOptions::default()).unwrap();
                    r.identities_exact() && r.passed()
                });
            if !ok {
                failures.push(format!("{branch:?} {c:?}"));
            }
        }
    }
    // out of branch: c₁ < 0, and the critical branch with a₂b₁² − b₂² < 0
    let mut wrongly_accepted = 0;
    for _ in 0..20 {
        let mut c = quadratic_instance(&mut rng, QuadraticBranch::LinearPositive);
        c[4] = -c[4].abs() - rat(1, 10);
        let out = certify_quadratic_2x2(&c[0], &c[1], &c[2], &c[3], &c[4], &c[5]).unwrap();
        if !matches!(out, QuadraticOutcome::Uncertified { .. }) {
            wrongly_accepted += 1;
        }
        let mut c = quadratic_instance(&mut rng, QuadraticBranch::RankOneCritical);
        let k = &c[3] / &c[2];
        c[1] = &k * &k - positive_rational(&mut rng, 2, 3);
        let out = certify_quadratic_2x2(&c[0], &c[1], &c[2], &c[3], &c[4], &c[5]).unwrap();
        if !matches!(out, QuadraticOutcome::Uncertified { .. }) {
            wrongly_accepted += 1;
        }
    }
    let ok = failures.is_empty() && wrongly_accepted == 0;
    let detail = format!(
        "{} in-branch failures, {wrongly_accepted}/40 rejections missed {:?}",
        failures.len(),
        failures.first()
    );
    report(
        8,
        "quadratic 2x2 branches",
        ok,
        start.elapsed(),
        Duration::from_secs(30),
        &detail,
    );
}

/// A random psd polynomial of degree ≤ 10; the flag says whether it is a
/// product of rational psd quadratics.
fn random_psd_univariate(rng: &mut impl Rng) -> (UniPoly, bool) {
    let mut f = UniPoly::constant(positive_rational(rng, 5, 3));
    let mut degree = 0;
    let mut rational_quadratics = true;
    let target = 2 * rng.gen_range(0..=5);
    while degree < target {
        if target - degree >= 4 && rng.gen_bool(0.25) {
            // (x² + sx + c)(x² − sx + c) with s² = d not a square
            let d = [2i64, 3, 5, 7][rng.gen_range(0..4)];
            let c = int(rng.gen_range(2..=4));
            let quartic = UniPoly::new(vec![
                &c * &c,
                int(2) * &c - int(d),
                Rational::zero(),
                Rational::zero(),
                Rational::one(),
            ]);
            f = f.mul(&quartic);
            degree += 4;
            rational_quadratics = false;
            continue;
        }
        let q = if rng.gen_bool(0.5) {
            UniPoly::linear_root(&small_rational(rng, 6, 3)).pow(2)
        } else {
            // x² + bx + c with b² < 4c
            let b = small_rational(rng, 4, 2);
            let c = &b * &b / int(4) + positive_rational(rng, 3, 4);
            UniPoly::new(vec![c, b, Rational::one()])
        };
        f = f.mul(&q);
        degree += 2;
    }
    (f, rational_quadratics)
}

#[test]
fn criterion_09_determinantal_representations() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst, mut bad, mut exact_expected, mut exact_got) = (0.0f64, 0, 0, 0);
    for _ in 0..50 {
        let (f, rational) = random_psd_univariate(&mut rng);
        let rep = quadratic_determinantal_representation(&f.to_polynomial(1, 0)).unwrap();
        worst = worst.max(rep.relative_residual);
        let m = &rep.matrix;
        let d = m.rows();
        let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || m.get(i, j).is_zero()));
        let entries_psd = (0..d)
            .all(|i| psd_univariate_scalar(&UniPoly::from_polynomial(m.get(i, i), 0).unwrap()));
        let small = m.max_degree() <= 2;
        if rational {
            exact_expected += 1;
            if rep.residual_exact_zero {
                exact_got += 1;
            }
        }
        if !(diagonal && entries_psd && small && rep.relative_residual <= DETREP_TOLERANCE)
            || (rational && !rep.residual_exact_zero)
        {
            bad += 1;
        }
    }
    let detail =
        format!("{bad} failures, worst residual {worst:.1e}, exact {exact_got}/{exact_expected}");
    report(
        9,
        "quadratic determinantal representations",
        bad == 0,
        start.elapsed(),
        Duration::from_secs(30),
        &detail,
    );
}

/// Adds `delta` to one coefficient of a weight or of a factor entry.
fn mutate(cert: &mut PiecewiseCertificate, rng: &mut impl Rng) {
    let delta = loop {
        let d = small_rational(rng, 3, 2);
        if !d.is_zero() {
            break d;
        }
    };
    let nvars = cert.nvars();
    let pi = rng.gen_range(0..cert.pieces.len());
    let piece = &mut cert.pieces[pi];
    let ti = rng.gen_range(0..piece.terms.len());
    let term = &mut piece.terms[ti];
    let bump = |q: &Polynomial, rng: &mut dyn rand::RngCore| -> Polynomial {
        let terms: Vec<MultiIndex> = q.terms().map(|(m, _)| m.clone()).collect();
        let mono = if terms.is_empty() || rng.gen_bool(0.2) {
            MultiIndex::zero(nvars)
        } else {
            terms[rng.gen_range(0..terms.len())].clone()
        };
        q + &Polynomial::monomial(mono, delta.clone())
    };
    if rng.gen_bool(0.5) {
        term.weight = bump(&term.weight, rng);
        return;
    }
    match &mut term.factor {
        Factor::Square(u) | Factor::UnivariatePsd(u) => {
            let (i, j) = (rng.gen_range(0..u.rows()), rng.gen_range(0..u.cols()));
            let e = bump(u.get(i, j), rng);
            u.set(i, j, e.clone());
            if matches!(term.factor, Factor::UnivariatePsd(_)) && i != j {
                if let Factor::UnivariatePsd(u) = &mut term.factor {
                    u.set(j, i, e);
                }
            }
        }
        Factor::ConstPsd(q) => {
            let (i, j) = (rng.gen_range(0..q.rows()), rng.gen_range(0..q.cols()));
            let v = q.get(i, j) + &delta;
            q.set(i, j, v.clone());
            q.set(j, i, v);
        }
    }
}

/// `target − Σ terms` of one piece.
fn residual(cert: &PiecewiseCertificate, piece: usize) -> MatrixPolynomial {
    let m = cert.size();
    cert.pieces[piece]
        .terms
        .iter()
        .fold(cert.target.clone(), |acc, t| {
            acc.sub(&t.contribution(m).unwrap())
        })
}

#[test]
fn criterion_10_verifier_soundness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let base = gallery::certificates();
    let (mut caught, mut false_passes, mut ineffective) = (0, 0, 0);
    let mut done = 0;
    while done < 200 {
        let (_, c) = &base[rng.gen_range(0..base.len())];
        let mut c = c.clone();
        mutate(&mut c, &mut rng);
        let broken: Vec<usize> = (0..c.pieces.len())
            .filter(|&i| !residual(&c, i).is_zero())
            .collect();
        if broken.is_empty() {
            // the change cancelled inside UᵀU; not a mutation of the identity
            ineffective += 1;
            continue;
        }
        done += 1;
        let r = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        let mut ok = true;
        for &i in &broken {
            match &r.pieces[i].identity {
                IdentityStatus::Mismatch {
                    entry,
                    witness,
                    residual: value,
                } => {
                    let at = residual(&c, i).evaluate(witness).unwrap();
                    ok &= !value.is_zero() && at.get(entry.0, entry.1) == value;
                }
                IdentityStatus::Exact => ok = false,
            }
        }
        if ok && !r.passed() {
            caught += 1;
        } else {
            false_passes += 1;
        }
    }
    let detail = format!("{caught}/200 caught with witnesses, {false_passes} false passes ({ineffective} no-op mutations redrawn)");
    report(
        10,
        "verifier soundness",
        false_passes == 0,
        start.elapsed(),
        Duration::from_secs(60),
        &detail,
    );
}
