//! End-to-end acceptance run: each criterion prints one PASS/FAIL line with
//! its wall time, and the test fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use pcert_core::bounds::interval_eval;
use pcert_core::cert::{
    box_sphere_identity, linear_ball_identity, product_identity, verify, verify_independent,
    CertTerm, Certificate, Flavor, GeneratorSystem, Sign, StenglePair, Verdict,
};
use pcert_core::lp::{farkas_decompose, invert, lp_optimize, LpOutcome, Sense};
use pcert_core::pipelines::{
    handelman_cert, jacobi_prestel_cert, putinar_cert, schmudgen_cert, Certified, ProblemInstance,
};
use pcert_core::poly::{Ctx, Monomial, VariableContext};
use pcert_core::polya::{polya_exponent, Exhaustion, PolyaError};
use pcert_core::{rat, IntervalBox, LinearSystem, Poly, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(ctx: &Ctx, s: &str) -> Poly {
    Poly::parse(ctx, s).unwrap()
}

fn sys(ctx: &Ctx, gens: &[&str]) -> GeneratorSystem {
    let polys: Vec<Poly> = gens.iter().map(|g| p(ctx, g)).collect();
    GeneratorSystem::numbered(ctx, &polys).unwrap()
}

fn valid(c: &Certificate, what: &str) -> Outcome {
    ensure(verify(c) == Verdict::Valid, || {
        format!("{what}: verify rejected")
    })?;
    ensure(verify_independent(c) == Verdict::Valid, || {
        format!("{what}: independent verifier rejected")
    })
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-9..=9), rng.random_range(1..=5))
}

/// Random polynomial with `terms` terms of total degree ≤ `deg`.
fn random_poly(rng: &mut ChaCha8Rng, ctx: &Ctx, terms: usize, deg: u32) -> Poly {
    let d = ctx.len();
    Poly::from_terms(
        ctx,
        (0..terms).map(|_| {
            let mut left = deg;
            let exps = (0..d)
                .map(|_| {
                    let e = rng.random_range(0..=left);
                    left -= e;
                    e
                })
                .collect();
            (Monomial::new(exps), small_rat(rng))
        }),
    )
}

// 1. identity suite

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ctx = VariableContext::standard(2);
    for case in 0..200 {
        let n = case % 5 + 1;
        let a: Vec<Poly> = (0..n).map(|_| random_poly(&mut rng, &ctx, 2, 1)).collect();
        let b: Vec<Poly> = (0..n).map(|_| random_poly(&mut rng, &ctx, 2, 1)).collect();
        let sign = if case % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let c =
            product_identity(&a, &b, sign).map_err(|e| format!("product identity {case}: {e}"))?;
        let pa = a.iter().fold(Poly::one(&ctx), |acc, x| &acc * x);
        let pb = b.iter().fold(Poly::one(&ctx), |acc, x| &acc * x);
        let expected = if sign == Sign::Plus {
            &pa + &pb
        } else {
            &pa - &pb
        };
        ensure(c.target == expected, || {
            format!("product identity {case}: wrong target")
        })?;
        valid(&c, &format!("product identity {case}"))?;
    }
    for d in 1..=4 {
        let ctx = VariableContext::standard(d);
        for rho in [rat(1, 1), rat(2, 1), rat(7, 2)] {
            for i in 0..d {
                for sign in [Sign::Plus, Sign::Minus] {
                    let c = linear_ball_identity(&ctx, &rho, i, sign);
                    let xi = Poly::var(&ctx, i);
                    let base = Poly::constant(&ctx, &rho + Rational::one());
                    let expected = if sign == Sign::Plus {
                        &base + &xi
                    } else {
                        &base - &xi
                    };
                    ensure(c.target == expected, || {
                        format!("ball identity d={d} ρ={rho} i={i}: wrong target")
                    })?;
                    valid(&c, &format!("ball identity d={d} ρ={rho} i={i}"))?;
                }
            }
        }
        let c = box_sphere_identity(&ctx, &Rational::one());
        let expected = Poly::constant(&ctx, rat(d as i64, 1)) - Poly::norm_sq(&ctx);
        ensure(c.target == expected, || {
            format!("d − ‖X‖² identity d={d}: wrong target")
        })?;
        valid(&c, &format!("d − ‖X‖² identity d={d}"))?;
    }
    Ok(())
}

// 2. Pólya

fn random_form(rng: &mut ChaCha8Rng, ctx: &Ctx, deg: u32, nonneg: bool) -> Poly {
    let d = ctx.len();
    let mut f = Poly::zero(ctx);
    for _ in 0..4 {
        let mut exps = vec![0u32; d];
        for _ in 0..deg {
            exps[rng.random_range(0..d)] += 1;
        }
        let mut c = small_rat(rng);
        if nonneg {
            c = c.abs() + Rational::one();
        }
        f = &f + &Poly::monomial(ctx, Monomial::new(exps), c);
    }
    f
}

fn polya() -> Outcome {
    let ctx = VariableContext::standard(2);
    let r = polya_exponent(&p(&ctx, "X1^2 - X1*X2 + X2^2"), 60).map_err(|e| e.to_string())?;
    ensure(r.exponent == 1, || {
        format!("exponent {} for X1² − X1X2 + X2²", r.exponent)
    })?;
    ensure(r.expanded == p(&ctx, "X1^3 + X2^3"), || {
        format!("product {}", r.expanded)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..50 {
        let ctx = VariableContext::standard(rng.random_range(2..=4));
        let deg = rng.random_range(1..=4);
        let f = random_form(&mut rng, &ctx, deg, true);
        let r = polya_exponent(&f, 60).map_err(|e| format!("nonnegative form {k}: {e}"))?;
        ensure(r.exponent == 0 && r.expanded == f, || {
            format!("nonnegative form {k}: N = {}", r.exponent)
        })?;
    }

    let half = [rat(1, 2), rat(1, 2)];
    let mut negatives = 0;
    while negatives < 20 {
        let deg = 2 * rng.random_range(1..=2);
        let f = random_form(&mut rng, &ctx, deg, false);
        if !f.is_homogeneous() || !f.evaluate(&half).unwrap().is_negative() {
            continue;
        }
        negatives += 1;
        match polya_exponent(&f, 60) {
            Err(PolyaError::CapExceeded {
                reason: Exhaustion::GridCounterexample { value, .. },
                ..
            }) => ensure(value.is_negative(), || {
                format!("{f}: counterexample value {value}")
            })?,
            other => {
                return Err(format!(
                    "{f}: expected a grid counterexample, got {other:?}"
                ))
            }
        }
    }
    Ok(())
}

// 3. Farkas and LP

/// Max of `obj` over the vertices of a bounded polyhedron: solve every
/// `d × d` subsystem of active constraints and keep feasible solutions.
fn brute_force_max(sys: &LinearSystem, obj: &Poly) -> Option<Rational> {
    let d = sys.dim();
    let rows = sys.constraints();
    let mut best: Option<Rational> = None;
    let mut pick = vec![0usize; d];
    fn next(pick: &mut [usize], m: usize) -> bool {
        let d = pick.len();
        for i in (0..d).rev() {
            if pick[i] < m - d + i {
                pick[i] += 1;
                for j in i + 1..d {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, slot) in pick.iter_mut().enumerate() {
        *slot = i;
    }
    loop {
        let parts: Vec<(Vec<Rational>, Rational)> = pick
            .iter()
            .map(|&i| rows[i].linear_parts().unwrap())
            .collect();
        let matrix: Vec<Vec<Rational>> = parts.iter().map(|(a, _)| a.clone()).collect();
        if let Some(inv) = invert(&matrix) {
            let rhs: Vec<Rational> = parts.iter().map(|(_, c)| -c.clone()).collect();
            let x: Vec<Rational> = inv
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&rhs)
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect();
            if sys.contains(&x) {
                let v = obj.evaluate(&x).unwrap();
                if best.as_ref().is_none_or(|b| &v > b) {
                    best = Some(v);
                }
            }
        }
        if !next(&mut pick, rows.len()) {
            return best;
        }
    }
}

fn farkas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..100 {
        let d = rng.random_range(1..=3);
        let ctx = VariableContext::standard(d);
        // Xᵢ ≥ −R and ΣXᵢ ≤ R keep the polyhedron bounded.
        let r = rat(rng.random_range(1..=4), 1);
        let mut rows: Vec<Poly> = (0..d)
            .map(|i| Poly::var(&ctx, i) + Poly::constant(&ctx, r.clone()))
            .collect();
        rows.push(Poly::constant(&ctx, r.clone()) - Poly::sum_of_vars(&ctx));
        let extra = rng.random_range(0..=(6 - (d + 1)));
        for _ in 0..extra {
            // passes through the interior near 0
            let coeffs: Vec<Rational> = (0..d).map(|_| small_rat(&mut rng)).collect();
            rows.push(Poly::linear(&ctx, &coeffs, rat(rng.random_range(1..=6), 2)));
        }
        let sys = LinearSystem::new(&ctx, rows.clone()).map_err(|e| e.to_string())?;

        let lambda0 = rat(rng.random_range(1..=9), rng.random_range(1..=4));
        let mut target = Poly::constant(&ctx, lambda0);
        for g in &rows {
            target.add_scaled(g, &rat(rng.random_range(0..=5), rng.random_range(1..=3)));
        }
        let w = farkas_decompose(&target, &sys).map_err(|e| format!("system {k}: {e}"))?;
        ensure(w.multipliers.iter().all(|l| !l.is_negative()), || {
            format!("system {k}: negative multiplier")
        })?;
        ensure(w.combine(&rows, &ctx) == target, || {
            format!("system {k}: witness does not re-expand")
        })?;

        let obj = Poly::linear(
            &ctx,
            &(0..d).map(|_| small_rat(&mut rng)).collect::<Vec<_>>(),
            Rational::zero(),
        );
        let lp = match lp_optimize(&sys, &obj, Sense::Max).map_err(|e| e.to_string())? {
            LpOutcome::Optimal { value, point } => {
                ensure(
                    sys.contains(&point) && obj.evaluate(&point).unwrap() == value,
                    || format!("system {k}: optimal point is inconsistent"),
                )?;
                value
            }
            other => return Err(format!("system {k}: bounded system gave {other:?}")),
        };
        let brute = brute_force_max(&sys, &obj).ok_or_else(|| format!("system {k}: no vertex"))?;
        ensure(lp == brute, || {
            format!("system {k}: LP {lp} vs vertices {brute}")
        })?;
    }
    Ok(())
}

// 4. Handelman

fn handelman_instances() -> Vec<ProblemInstance> {
    let c1 = VariableContext::standard(1);
    let c2 = VariableContext::standard(2);
    let interval = sys(&c1, &["X1", "1 - X1"]);
    let simplex = sys(&c2, &["X1", "X2", "1 - X1 - X2"]);
    let mut out: Vec<ProblemInstance> = [
        "1/2 + X1*(1 - X1)",
        "1/10 + (X1 - 1/2)^2",
        "1 - X1 + X1^2",
        "1/4 + X1^4 - X1^3",
        "3/2 - X1^2 + X1^4 - X1",
    ]
    .iter()
    .map(|f| ProblemInstance::new(interval.clone(), p(&c1, f)))
    .collect();
    out.extend(
        [
            "3/2 + X1*X2 - X1^2",
            "1 - X1*X2",
            "1/5 + (X1 - X2)^2",
            "3/2 + X1^2*X2 - X1*X2^2 - X2",
            "2 - X1^4 - X2^3",
        ]
        .iter()
        .map(|f| ProblemInstance::new(simplex.clone(), p(&c2, f))),
    );
    // c + random polynomial, with c above the interval-arithmetic lower bound on the unit box
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..10 {
        let (ctx, a) = if k % 2 == 0 {
            (&c1, &interval)
        } else {
            (&c2, &simplex)
        };
        let q = random_poly(&mut rng, ctx, 4, 4);
        let unit = IntervalBox::cube(ctx.len(), Rational::zero(), Rational::one()).unwrap();
        let (lo, _) = interval_eval(&q, &unit).unwrap();
        let c = if lo.is_negative() {
            -lo
        } else {
            Rational::zero()
        } + rat(1, 4);
        out.push(ProblemInstance::new(
            a.clone(),
            &q + &Poly::constant(ctx, c),
        ));
    }
    out
}

fn run_handelman() -> Result<Vec<Certified>, String> {
    handelman_instances()
        .iter()
        .enumerate()
        .map(|(k, inst)| {
            let out =
                handelman_cert(inst).map_err(|e| format!("instance {k} ({}): {e}", inst.target))?;
            ensure(out.certificate.flavor == Flavor::Semiring, || {
                format!("instance {k}: not a semiring certificate")
            })?;
            valid(&out.certificate, &format!("instance {k}"))?;
            ensure(!out.trace.stages.is_empty(), || {
                format!("instance {k}: empty trace")
            })?;
            Ok(out)
        })
        .collect()
}

// 5–7. theorem pipelines

fn run_jp() -> Result<Vec<Certified>, String> {
    let c1 = VariableContext::standard(1);
    let c2 = VariableContext::standard(2);
    let cases = [
        (sys(&c1, &["1 - X1", "1 + X1"]), p(&c1, "2 - X1^2")),
        (
            sys(&c2, &["1 + X1", "1 - X1", "1 + X2", "1 - X2"]),
            p(&c2, "3 - X1^2 - X2^2"),
        ),
    ];
    let mut out = Vec::new();
    for (a, f) in cases {
        let l = a.polys();
        let certs: Vec<Certificate> = a
            .names()
            .iter()
            .map(|n| Certificate::generator(a.clone(), n, Flavor::QuadraticModule).unwrap())
            .collect();
        let r = jacobi_prestel_cert(&ProblemInstance::new(a, f.clone()), &l, &certs)
            .map_err(|e| format!("{f}: {e}"))?;
        ensure(r.certificate.flavor == Flavor::QuadraticModule, || {
            format!("{f}: flavor")
        })?;
        valid(&r.certificate, &f.to_string())?;
        out.push(r);
    }
    Ok(out)
}

fn run_schmudgen() -> Result<Vec<Certified>, String> {
    let c = VariableContext::standard(1);
    let a = sys(&c, &["1 - X1^2"]);
    let mut g_cert = Certificate::empty(Flavor::Preordering, a.clone());
    g_cert.push(CertTerm::scalar(&c, Rational::one(), [("a1", 1)]));
    let pair = StenglePair {
        target: p(&c, "2 - X1^2"),
        g_cert,
        h_cert: Certificate::empty(Flavor::Preordering, a.clone()),
    };
    let f = p(&c, "3 - 2*X1^2");
    let r = schmudgen_cert(&ProblemInstance::new(a, f), &pair).map_err(|e| e.to_string())?;
    ensure(r.certificate.flavor == Flavor::Preordering, || {
        "flavor".into()
    })?;
    valid(&r.certificate, "schmudgen")?;
    let exps_ok = r
        .certificate
        .terms
        .iter()
        .all(|t| t.exponents.values().all(|&e| e <= 1));
    ensure(exps_ok, || "an exponent exceeds 1".into())?;
    Ok(vec![r])
}

fn run_putinar() -> Result<Vec<Certified>, String> {
    let c = VariableContext::standard(1);
    let a = sys(&c, &["2 - X1^2"]);
    let g_cert = Certificate::generator(a.clone(), "a1", Flavor::QuadraticModule).unwrap();
    let r = putinar_cert(
        &ProblemInstance::new(a, p(&c, "3 - X1^2")),
        &g_cert,
        &rat(2, 1),
        None,
    )
    .map_err(|e| e.to_string())?;
    ensure(r.certificate.flavor == Flavor::QuadraticModule, || {
        "flavor".into()
    })?;
    valid(&r.certificate, "putinar")?;
    Ok(vec![r])
}

// 8. tamper detection

/// Mutates certificates from criteria 4–7 plus two identities.
fn tamper(produced: &[Certificate]) -> Outcome {
    let mut pool: Vec<Certificate> = produced.to_vec();
    let ctx = VariableContext::standard(2);
    pool.push(
        product_identity(
            &[p(&ctx, "X1 + 2"), p(&ctx, "X2")],
            &[p(&ctx, "1"), p(&ctx, "X1 - X2")],
            Sign::Minus,
        )
        .unwrap(),
    );
    pool.push(linear_ball_identity(&ctx, &rat(7, 2), 1, Sign::Plus));
    pool.retain(|c| !c.terms.is_empty());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..1000 {
        let mut c = pool[k % pool.len()].clone();
        let i = rng.random_range(0..c.terms.len());
        let kind = k % 4;
        match kind {
            0 => c.terms[i].coeff = -c.terms[i].coeff.clone(),
            1 => c.terms[i].coeff += rat(rng.random_range(1..=7), rng.random_range(1..=3)),
            2 => {
                let names = c.system.names();
                let g = &names[rng.random_range(0..names.len())];
                *c.terms[i].exponents.entry(g.clone()).or_insert(0) += 1;
            }
            _ => {
                c.terms.remove(i);
            }
        }
        ensure(!verify(&c).is_valid(), || {
            format!("mutation {k} (kind {kind}) accepted by verify")
        })?;
        ensure(!verify_independent(&c).is_valid(), || {
            format!("mutation {k} (kind {kind}) accepted by the independent verifier")
        })?;
    }
    Ok(())
}

// 9. determinism

type Runner = fn() -> Result<Vec<Certified>, String>;

const RUNNERS: [(&str, Runner); 4] = [
    ("handelman", run_handelman),
    ("jp", run_jp),
    ("schmudgen", run_schmudgen),
    ("putinar", run_putinar),
];

/// Reruns criteria 4–7 and compares serialized certificates with the first run.
fn determinism(first: &[(&str, Vec<String>)]) -> Outcome {
    for ((name, run), (_, before)) in RUNNERS.iter().zip(first) {
        let again: Vec<String> = run()?.iter().map(|c| c.certificate.to_json()).collect();
        ensure(&again == before, || {
            format!("{name}: certificates differ between runs")
        })?;
    }
    Ok(())
}

fn report(name: &str, budget: u64, run: impl FnOnce() -> Outcome, failed: &mut Vec<String>) {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
    let elapsed = start.elapsed();
    let result = result.and_then(|()| {
        ensure(elapsed <= Duration::from_secs(budget), || {
            format!("took {elapsed:.1?}, budget {budget} s")
        })
    });
    match result {
        Ok(()) => println!("PASS criterion {name} ({elapsed:.2?})"),
        Err(why) => {
            println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            failed.push(name.to_string());
        }
    }
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    report("1 identity suite", 10, identities, &mut failed);
    report("2 polya", 30, polya, &mut failed);
    report("3 farkas round trip", 30, farkas, &mut failed);

    let mut produced: Vec<Certificate> = Vec::new();
    let mut first: Vec<(&str, Vec<String>)> = Vec::new();
    let labels = [
        "4 handelman end-to-end",
        "5 jacobi-prestel end-to-end",
        "6 schmudgen",
        "7 putinar fast path",
    ];
    for ((name, run), label) in RUNNERS.iter().zip(labels) {
        report(
            label,
            300,
            || {
                let certs = run()?;
                first.push((
                    name,
                    certs.iter().map(|c| c.certificate.to_json()).collect(),
                ));
                produced.extend(certs.into_iter().map(|c| c.certificate));
                Ok(())
            },
            &mut failed,
        );
    }

    report("8 tamper detection", 60, || tamper(&produced), &mut failed);
    report(
        "9 determinism",
        1200,
        || {
            ensure(first.len() == RUNNERS.len(), || {
                "criteria 4–7 did not all produce certificates".into()
            })?;
            determinism(&first)
        },
        &mut failed,
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
