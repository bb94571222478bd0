use proptest::prelude::*;

use semicert::certkit::PiecewiseCertificate;
use semicert::matpoly::{determinant, MatrixPolynomial};
use semicert::poly::rational::parse_rational;
use semicert::poly::univariate::squarefree_decomposition;
use semicert::poly::UniPoly;
use semicert::{Polynomial, Rational};

const VARS: [&str; 2] = ["x", "y"];

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| parse_rational(&format!("{n}/{d}")).unwrap())
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-9i64..=9, 0u32..=3, 0u32..=3), 0..6).prop_map(|terms| {
        let s = terms
            .iter()
            .map(|(c, a, b)| format!("({c})*x^{a}*y^{b}"))
            .collect::<Vec<_>>()
            .join(" + ");
        Polynomial::parse(if s.is_empty() { "0" } else { &s }, &VARS).unwrap()
    })
}

fn univariate() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-5i64..=5, 1..6).prop_map(|c| UniPoly::from_ints(&c))
}

fn matrix2(entries: [Polynomial; 4]) -> MatrixPolynomial {
    let [a, b, c, d] = entries;
    MatrixPolynomial::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in polynomial(), q in polynomial(), x in rational(), y in rational()) {
        let pt = [x, y];
        let (pv, qv) = (p.evaluate(&pt).unwrap(), q.evaluate(&pt).unwrap());
        prop_assert_eq!((&p + &q).evaluate(&pt).unwrap(), &pv + &qv);
        prop_assert_eq!((&p - &q).evaluate(&pt).unwrap(), &pv - &qv);
        prop_assert_eq!((&p * &q).evaluate(&pt).unwrap(), &pv * &qv);
    }

    #[test]
    fn printing_round_trips(p in polynomial()) {
        let back = Polynomial::parse(&p.to_string_with(&VARS), &VARS).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn determinant_is_multiplicative(a in prop::array::uniform4(polynomial()), b in prop::array::uniform4(polynomial())) {
        let (a, b) = (matrix2(a), matrix2(b));
        let lhs = determinant(&a.mul(&b)).unwrap();
        let rhs = &determinant(&a).unwrap() * &determinant(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn squarefree_factors_multiply_back(f in univariate(), g in univariate()) {
        let p = f.mul(&g).mul(&g);
        prop_assume!(!p.is_zero());
        let (c, parts) = squarefree_decomposition(&p).unwrap();
        let mut prod = UniPoly::constant(c);
        for (h, k) in &parts {
            prod = prod.mul(&h.pow(*k));
        }
        prop_assert_eq!(prod, p);
    }
}

#[test]
fn gallery_certificates_survive_the_file_format() {
    for (id, cert) in semicert::gallery::certificates() {
        let back =
            PiecewiseCertificate::parse(&cert.to_text()).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(back, cert, "{id}");
    }
}
