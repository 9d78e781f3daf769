use num_traits::Zero;
use pcert_core::cert::{
    box_sphere_identity, cert_compose, cert_mul_single, expand, linear_ball_identity,
    product_identity, spot_check, verify, verify_independent, CertError, CertTerm, Certificate,
    Flavor, GeneratorSystem, InvalidReason, Provenance, Sign, StenglePair, Verdict,
};
use pcert_core::poly::{Ctx, VariableContext};
use pcert_core::{rat, Poly, Rational};
use proptest::prelude::*;

fn p(ctx: &Ctx, s: &str) -> Poly {
    Poly::parse(ctx, s).unwrap()
}

/// Oracle: `Σ λ·p²·Π g^k` by direct powers, written independently of the library expansion.
fn oracle_sum(c: &Certificate) -> Poly {
    let mut acc = Poly::zero(c.context());
    for t in &c.terms {
        let mut v = t.square_root.pow(2).scale(&t.coeff);
        for g in c.system.generators() {
            v = v * g.poly.pow(t.exponent(&g.name));
        }
        acc = acc + v;
    }
    acc
}

fn assert_valid(c: &Certificate) {
    assert_eq!(verify(c), Verdict::Valid, "{c:?}");
    assert_eq!(verify_independent(c), Verdict::Valid);
    assert_eq!(oracle_sum(c), c.target);
    assert!(spot_check(c, 20));
}

fn jp_d1() -> Certificate {
    let c = VariableContext::standard(1);
    let sys =
        GeneratorSystem::from_user(&c, [("a1", p(&c, "1 - X1")), ("a2", p(&c, "1 + X1"))]).unwrap();
    let terms = vec![
        CertTerm::new(rat(1, 2), p(&c, "1 + X1"), [("a1", 1)]),
        CertTerm::new(rat(1, 2), p(&c, "1 - X1"), [("a2", 1)]),
    ];
    Certificate::new(Flavor::QuadraticModule, sys, p(&c, "1 - X1^2"), terms)
}

#[test]
fn verify_examples() {
    let good = jp_d1();
    assert_valid(&good);

    let mut neg = good.clone();
    neg.terms[0].coeff = rat(-1, 1);
    assert_eq!(
        verify(&neg),
        Verdict::Invalid(InvalidReason::NegativeCoefficient { term: 0 })
    );

    let mut wrong = good.clone();
    wrong.target = p(good.context(), "1 - X1");
    match verify(&wrong) {
        Verdict::Invalid(InvalidReason::ExpansionMismatch(diff)) => {
            assert_eq!(diff, p(good.context(), "-X1^2 + X1"));
        }
        other => panic!("{other:?}"),
    }

    let mut two_gens = good.clone();
    two_gens.terms[0].exponents.insert("a2".into(), 1);
    assert!(matches!(
        verify(&two_gens),
        Verdict::Invalid(InvalidReason::FlavorViolation { term: 0, .. })
    ));
    assert!(two_gens.relabel(Flavor::Preordering).is_ok());

    let mut unknown = good;
    unknown.terms[1].exponents.insert("zz".into(), 1);
    assert!(matches!(
        verify(&unknown),
        Verdict::Invalid(InvalidReason::Malformed(_))
    ));
}

#[test]
fn flavor_containments() {
    let c = VariableContext::standard(1);
    let sys =
        GeneratorSystem::from_user(&c, [("a1", p(&c, "X1")), ("a2", p(&c, "1 - X1"))]).unwrap();
    let semi = Certificate::new(
        Flavor::Semiring,
        sys.clone(),
        p(&c, "X1 - X1^2 + 2"),
        vec![
            CertTerm::scalar(&c, rat(1, 1), [("a1", 1), ("a2", 1)]),
            CertTerm::scalar(&c, rat(2, 1), [("a1", 0)]),
        ],
    );
    assert_valid(&semi);
    assert_valid(&semi.relabel(Flavor::Preordering).unwrap());
    assert!(semi.relabel(Flavor::QuadraticModule).is_err());

    let single = GeneratorSystem::from_user(&c, [("g", p(&c, "1 - X1^2"))]).unwrap();
    let pre = Certificate::new(
        Flavor::Preordering,
        single,
        p(&c, "2 - X1^2 + X1^2"),
        vec![
            CertTerm::new(rat(1, 1), p(&c, "X1"), [("g", 1)]),
            CertTerm::scalar(&c, rat(1, 1), [("g", 1)]),
        ],
    );
    let fixed = Certificate {
        target: oracle_sum(&pre),
        ..pre
    };
    assert_valid(&fixed.relabel(Flavor::QuadraticModule).unwrap());
}

#[test]
fn multiplication_examples() {
    let c = VariableContext::standard(1);
    let rho = rat(1, 1);
    let plus = linear_ball_identity(&c, &rho, 0, Sign::Plus);
    let minus = linear_ball_identity(&c, &rho, 0, Sign::Minus);
    assert_eq!(plus.target, p(&c, "2 + X1"));
    assert_valid(&plus);
    assert_valid(&minus);
    let prod = cert_mul_single(&plus, &minus).unwrap();
    assert_eq!(prod.target, p(&c, "4 - X1^2"));
    assert_valid(&prod);

    let sys = plus.system.clone();
    let one = Certificate::new(
        Flavor::QuadraticModule,
        sys.clone(),
        Poly::one(&c),
        vec![CertTerm::scalar(&c, rat(1, 1), [("s", 0)])],
    );
    let unit = cert_mul_single(&one, &plus).unwrap();
    assert_eq!(expand(&unit), plus.target);

    let s = Certificate::generator(sys.clone(), "s", Flavor::QuadraticModule).unwrap();
    let sq = cert_mul_single(&s, &s).unwrap();
    assert_eq!(sq.terms.len(), 1);
    assert!(sq.terms[0].exponents.is_empty());
    assert_eq!(sq.terms[0].square_root, sys.get("s").unwrap().poly);
    assert_eq!(sq.target, sys.get("s").unwrap().poly.pow(2));
    assert_valid(&sq);

    assert!(matches!(
        cert_mul_single(&jp_d1(), &jp_d1()),
        Err(CertError::NotSingleGenerator(2))
    ));
    let other = linear_ball_identity(&c, &rat(2, 1), 0, Sign::Plus);
    assert_eq!(
        cert_mul_single(&plus, &other),
        Err(CertError::SystemMismatch)
    );
}

#[test]
fn composition_examples() {
    let c = VariableContext::standard(1);
    // outer: 1 - X1^2 = 1·s over s = 1 - X1^2
    let s_sys = GeneratorSystem::new(&c)
        .with("s", p(&c, "1 - X1^2"), Provenance::derived("ball"))
        .unwrap();
    let outer = Certificate::generator(s_sys, "s", Flavor::QuadraticModule).unwrap();
    let inner = jp_d1();
    let composed = cert_compose(&outer, "s", &inner).unwrap();
    assert_eq!(composed.flavor, Flavor::QuadraticModule);
    assert_eq!(composed.system.names(), vec!["a1", "a2"]);
    assert_valid(&composed);

    // identity composition
    let trivial =
        Certificate::generator(inner.system.clone(), "a1", Flavor::QuadraticModule).unwrap();
    let same = cert_compose(&inner, "a1", &trivial).unwrap();
    assert_eq!(expand(&same), expand(&inner));
    assert_valid(&same);

    let mut bad = inner.clone();
    bad.terms[0].coeff = rat(-1, 2);
    assert_eq!(
        cert_compose(&outer, "s", &bad),
        Err(CertError::NegativeCoefficient(0))
    );
    assert_eq!(
        cert_compose(&outer, "t", &inner),
        Err(CertError::UnknownGenerator("t".into()))
    );
    let mut mismatched = inner;
    mismatched.target = p(&c, "1 - X1");
    assert_eq!(
        cert_compose(&outer, "s", &mismatched),
        Err(CertError::TargetMismatch("s".into()))
    );
}

#[test]
fn preordering_composition_absorbs_squares() {
    let c = VariableContext::standard(1);
    let sys =
        GeneratorSystem::from_user(&c, [("a", p(&c, "1 - X1")), ("g", p(&c, "2 - 2*X1"))]).unwrap();
    // outer: a·g over {a, g}
    let outer = Certificate::new(
        Flavor::Preordering,
        sys.clone(),
        p(&c, "2 - 4*X1 + 2*X1^2"),
        vec![CertTerm::scalar(&c, rat(1, 1), [("a", 1), ("g", 1)])],
    );
    let inner_sys = GeneratorSystem::from_user(&c, [("a", p(&c, "1 - X1"))]).unwrap();
    let inner = Certificate::new(
        Flavor::QuadraticModule,
        inner_sys,
        p(&c, "2 - 2*X1"),
        vec![CertTerm::scalar(&c, rat(2, 1), [("a", 1)])],
    );
    let out = cert_compose(&outer, "g", &inner).unwrap();
    assert_eq!(out.flavor, Flavor::Preordering);
    assert!(out.terms[0].exponents.is_empty());
    assert_valid(&out);
}

#[test]
fn product_identity_examples() {
    let c = VariableContext::standard(4);
    let (a1, a2, b1, b2) = (p(&c, "X1"), p(&c, "X2"), p(&c, "X3"), p(&c, "X4"));
    let one = product_identity(
        std::slice::from_ref(&a1),
        std::slice::from_ref(&b1),
        Sign::Plus,
    )
    .unwrap();
    assert_eq!(one.terms.len(), 1);
    assert_eq!(one.terms[0].coeff, rat(1, 1));
    assert_valid(&one);

    let plus = product_identity(
        &[a1.clone(), a2.clone()],
        &[b1.clone(), b2.clone()],
        Sign::Plus,
    )
    .unwrap();
    assert_eq!(plus.target, p(&c, "X1*X2 + X3*X4"));
    let mut sets: Vec<Vec<String>> = plus
        .terms
        .iter()
        .map(|t| t.exponents.keys().cloned().collect())
        .collect();
    sets.sort();
    assert_eq!(
        sets,
        vec![
            vec!["u1".to_string(), "u2".into()],
            vec!["v1".into(), "v2".into()]
        ]
    );
    assert!(plus.terms.iter().all(|t| t.coeff == rat(1, 2)));
    assert_valid(&plus);

    let minus = product_identity(&[a1, a2], &[b1, b2], Sign::Minus).unwrap();
    assert_eq!(minus.target, p(&c, "X1*X2 - X3*X4"));
    assert_valid(&minus);
    assert!(matches!(
        product_identity(&[], &[], Sign::Plus),
        Err(CertError::LengthMismatch(0, 0))
    ));
}

#[test]
fn identity_suite_small() {
    for d in 1..=4 {
        let c = VariableContext::standard(d);
        for rho in [rat(1, 1), rat(2, 1), rat(7, 2)] {
            for i in 0..d {
                for sign in [Sign::Plus, Sign::Minus] {
                    let cert = linear_ball_identity(&c, &rho, i, sign);
                    assert_eq!(cert.terms.len(), d + 2);
                    assert_valid(&cert);
                }
            }
        }
        for r in [rat(1, 1), rat(3, 2)] {
            let cert = box_sphere_identity(&c, &r);
            assert_eq!(
                cert.target,
                Poly::constant(&c, &r * &r * rat(d as i64, 1)) - Poly::norm_sq(&c)
            );
            assert_valid(&cert);
        }
    }
}

#[test]
fn json_round_trip_is_bit_stable() {
    let certs = [
        jp_d1(),
        linear_ball_identity(&VariableContext::standard(3), &rat(7, 2), 1, Sign::Minus),
    ];
    for cert in certs {
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        assert_eq!(verify(&back), Verdict::Valid);
    }
    let text = jp_d1().to_json();
    assert!(text.contains("\"coeff\": \"1/2\""));
    assert!(text.contains("\"provenance\": \"user\""));
    assert!(Certificate::from_json("{").is_err());
    let broken = text.replace("\"target\": \"-X1^2 + 1\"", "\"target\": \"-Y^2 + 1\"");
    assert_ne!(broken, text);
    assert!(Certificate::from_json(&broken).is_err());
}

fn trivial_stengle() -> StenglePair {
    let c = VariableContext::standard(1);
    let sys = GeneratorSystem::from_user(&c, [("a1", p(&c, "1 - X1^2"))]).unwrap();
    let g = Certificate::generator(sys.clone(), "a1", Flavor::Preordering).unwrap();
    let h = Certificate::empty(Flavor::Preordering, sys);
    StenglePair {
        target: p(&c, "2 - X1^2"),
        g_cert: g,
        h_cert: h,
    }
}

#[test]
fn stengle_pairs() {
    let pair = trivial_stengle();
    pair.check().unwrap();
    assert_eq!(pair.rho(), Some(rat(2, 1)));
    let one_plus_g = pair.one_plus_g();
    assert_eq!(one_plus_g.target, p(pair.target.context(), "2 - X1^2"));
    assert_valid(&one_plus_g);

    let mut broken = pair.clone();
    broken.target = p(pair.target.context(), "3 - X1^2");
    assert_eq!(broken.check(), Err(CertError::StengleIdentity));
    assert_eq!(broken.rho(), Some(rat(3, 1)));

    let text = pair.to_json();
    assert_eq!(StenglePair::from_json(&text).unwrap(), pair);
}

#[test]
fn scaling_and_pushing() {
    let cert = jp_d1();
    let twice = cert.scaled(&rat(2, 1));
    assert_eq!(twice.target, cert.target.scale(&rat(2, 1)));
    assert_valid(&twice);
    let zero = cert.scaled(&Rational::zero());
    assert!(zero.terms.is_empty() && zero.target.is_zero());
    let mut grown = cert.clone();
    grown.push(CertTerm::new(
        rat(3, 1),
        p(cert.context(), "X1"),
        [("a1", 1)],
    ));
    assert_valid(&grown);
    let mut summed = cert.clone();
    summed.add(&cert).unwrap();
    assert_eq!(summed.target, cert.target.scale(&rat(2, 1)));
    assert_valid(&summed);
}

fn small_poly(ctx: Ctx) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(((0u32..3, 0u32..3), -5i64..6, 1i64..4), 1..4).prop_map(move |ts| {
        Poly::from_terms(
            &ctx,
            ts.into_iter()
                .map(|((a, b), n, d)| (pcert_core::poly::Monomial::new(vec![a, b]), rat(n, d))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn product_identity_verifies(
        n in 1usize..=5,
        a in proptest::collection::vec(small_poly(VariableContext::standard(2)), 5),
        b in proptest::collection::vec(small_poly(VariableContext::standard(2)), 5),
        plus in any::<bool>(),
    ) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let cert = product_identity(&a[..n], &b[..n], sign).unwrap();
        prop_assert_eq!(cert.terms.len(), 1 << (n - 1));
        prop_assert_eq!(verify(&cert), Verdict::Valid);
        prop_assert!(spot_check(&cert, 5));
    }

    #[test]
    fn products_of_valid_certificates_are_valid(i in 0usize..2, j in 0usize..2, rho in 1i64..5, plus in any::<bool>()) {
        let c = VariableContext::standard(2);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let a = linear_ball_identity(&c, &rat(rho, 2), i, sign);
        let b = linear_ball_identity(&c, &rat(rho, 2), j, Sign::Minus);
        let ab = cert_mul_single(&a, &b).unwrap();
        prop_assert_eq!(&ab.target, &(&a.target * &b.target));
        prop_assert_eq!(verify(&ab), Verdict::Valid);
        let abb = cert_mul_single(&ab, &b).unwrap();
        prop_assert_eq!(verify(&abb), Verdict::Valid);
    }
}
