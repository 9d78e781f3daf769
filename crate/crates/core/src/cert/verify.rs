use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CertTerm, Certificate, Flavor, GeneratorSystem};
use crate::poly::same_context;
use crate::{IntPoly, Integer, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    NegativeCoefficient {
        term: usize,
    },
    FlavorViolation {
        term: usize,
        flavor: Flavor,
    },
    /// `Σ terms − target`.
    ExpansionMismatch(Poly),
    /// Unknown generator names or polynomials from another context.
    Malformed(String),
}

impl std::fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvalidReason::NegativeCoefficient { term } => {
                write!(f, "term {term} has a negative coefficient")
            }
            InvalidReason::FlavorViolation { term, flavor } => {
                write!(
                    f,
                    "term {term} is not allowed in a {} certificate",
                    flavor.as_str()
                )
            }
            InvalidReason::ExpansionMismatch(d) => write!(f, "terms minus target is {d}, not zero"),
            InvalidReason::Malformed(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(InvalidReason),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

fn structural(cert: &Certificate) -> Result<(), InvalidReason> {
    let ctx = cert.context();
    if !same_context(cert.target.context(), ctx) {
        return Err(InvalidReason::Malformed(
            "target is over another variable context".into(),
        ));
    }
    for (i, t) in cert.terms.iter().enumerate() {
        if t.coeff.is_negative() {
            return Err(InvalidReason::NegativeCoefficient { term: i });
        }
        if !same_context(t.square_root.context(), ctx) {
            return Err(InvalidReason::Malformed(format!(
                "term {i} is over another variable context"
            )));
        }
        if let Some(name) = t.exponents.keys().find(|n| cert.system.get(n).is_none()) {
            return Err(InvalidReason::Malformed(format!(
                "term {i} uses unknown generator `{name}`"
            )));
        }
    }
    for (i, t) in cert.terms.iter().enumerate() {
        if !t.is_legal(cert.flavor) {
            return Err(InvalidReason::FlavorViolation {
                term: i,
                flavor: cert.flavor,
            });
        }
    }
    Ok(())
}

/// Checks coefficient signs, flavor legality and the exact identity.
pub fn verify(cert: &Certificate) -> Verdict {
    if let Err(r) = structural(cert) {
        return Verdict::Invalid(r);
    }
    compare(expand(cert), &cert.target)
}

/// [`verify`] with a term-by-term expansion that shares no code with
/// [`expand`] beyond polynomial arithmetic.
pub fn verify_independent(cert: &Certificate) -> Verdict {
    if let Err(r) = structural(cert) {
        return Verdict::Invalid(r);
    }
    compare(expand_naive(cert), &cert.target)
}

fn compare(sum: Poly, target: &Poly) -> Verdict {
    let diff = &sum - target;
    if diff.is_zero() {
        Verdict::Valid
    } else {
        Verdict::Invalid(InvalidReason::ExpansionMismatch(diff))
    }
}

/// `Σ λ·p²·Π g^k`, grouping terms by exponent vector and evaluating the
/// grouped sum by nested Horner schemes over the generators.
///
/// The Horner pass runs over the integers: `gᵢ = Gᵢ/Dᵢ` with `Gᵢ` integral,
/// and every bucket is scaled by one common denominator `L`, so the result
/// is `(Σ L·bucket/ΠDᵢ^kᵢ · ΠGᵢ^kᵢ)/L`.
pub fn expand(cert: &Certificate) -> Poly {
    let sys = &cert.system;
    let ctx = sys.context();
    let dens: Vec<Integer> = sys
        .generators()
        .iter()
        .map(|g| poly_denominator(&g.poly))
        .collect();
    let gens: Vec<IntPoly> = sys
        .generators()
        .iter()
        .zip(&dens)
        .map(|(g, d)| {
            g.poly
                .map_coeffs(|c| (c * Rational::from_integer(d.clone())).to_integer())
        })
        .collect();
    let mut buckets: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for t in &cert.terms {
        let key: Vec<u32> = sys
            .generators()
            .iter()
            .map(|g| t.exponent(&g.name))
            .collect();
        let mut scale = t.coeff.clone();
        for (d, &k) in dens.iter().zip(&key) {
            if k > 0 {
                scale /= Rational::from_integer(num_traits::pow(d.clone(), k as usize));
            }
        }
        let sq = match t.square_root.as_constant() {
            Some(c) => Poly::constant(ctx, &scale * &c * &c),
            None => (&t.square_root * &t.square_root).scale(&scale),
        };
        buckets
            .entry(key)
            .or_insert_with(|| Poly::zero(ctx))
            .add_scaled(&sq, &Rational::one());
    }
    if buckets.is_empty() {
        return Poly::zero(ctx);
    }
    let l = buckets
        .values()
        .fold(Integer::one(), |acc, p| acc.lcm(&poly_denominator(p)));
    let lq = Rational::from_integer(l.clone());
    let items: Vec<(Vec<u32>, IntPoly)> = buckets
        .into_iter()
        .map(|(k, p)| (k, p.map_coeffs(|c| (c * &lq).to_integer())))
        .collect();
    let mut powers = PowerCache::new(&gens);
    let sum = horner(&items, 0, &mut powers);
    sum.map_coeffs(|c| Rational::new(c.clone(), l.clone()))
}

/// Least common denominator of the coefficients.
fn poly_denominator(p: &Poly) -> Integer {
    p.terms()
        .fold(Integer::one(), |acc, (_, c)| acc.lcm(c.denom()))
}

struct PowerCache<'a> {
    gens: &'a [IntPoly],
    /// `cache[i][k] = G_i^k`, filled on demand.
    cache: Vec<Vec<IntPoly>>,
}

impl<'a> PowerCache<'a> {
    fn new(gens: &'a [IntPoly]) -> Self {
        let cache = gens
            .iter()
            .map(|g| vec![IntPoly::one(g.context())])
            .collect();
        PowerCache { gens, cache }
    }

    fn get(&mut self, i: usize, k: u32) -> &IntPoly {
        while self.cache[i].len() <= k as usize {
            let next = self.cache[i].last().expect("G^0 is cached") * &self.gens[i];
            self.cache[i].push(next);
        }
        &self.cache[i][k as usize]
    }
}

/// `Σ_items poly·Π_{j ≥ level} G_j^{k_j}` for items sorted by exponent vector.
fn horner(items: &[(Vec<u32>, IntPoly)], level: usize, powers: &mut PowerCache<'_>) -> IntPoly {
    let one = Integer::one();
    if level == powers.gens.len() {
        let mut acc = items[0].1.clone();
        for (_, p) in &items[1..] {
            acc.add_scaled(p, &one);
        }
        return acc;
    }
    let mut groups: Vec<(u32, IntPoly)> = Vec::new();
    let mut start = 0;
    while start < items.len() {
        let e = items[start].0[level];
        let end = start
            + items[start..]
                .iter()
                .take_while(|(k, _)| k[level] == e)
                .count();
        groups.push((e, horner(&items[start..end], level + 1, powers)));
        start = end;
    }
    let (mut e_hi, mut acc) = groups.pop().expect("at least one group");
    while let Some((e, q)) = groups.pop() {
        acc = &acc * powers.get(level, e_hi - e);
        acc.add_scaled(&q, &one);
        e_hi = e;
    }
    if e_hi > 0 {
        acc = &acc * powers.get(level, e_hi);
    }
    acc
}

/// The value of a single term as a polynomial.
pub(crate) fn term_value(sys: &GeneratorSystem, t: &CertTerm) -> Poly {
    let mut v = (&t.square_root * &t.square_root).scale(&t.coeff);
    for (name, &k) in &t.exponents {
        let g = &sys.get(name).expect("exponent names a generator").poly;
        for _ in 0..k {
            v = &v * g;
        }
    }
    v
}

/// Term-by-term expansion with repeated multiplication.
pub fn expand_naive(cert: &Certificate) -> Poly {
    let mut sum = Poly::zero(cert.context());
    for t in &cert.terms {
        sum = &sum + &term_value(&cert.system, t);
    }
    sum
}

/// Schwartz–Zippel check: compares target and term sum modulo the prime
/// `2⁶¹ − 1` at `points` deterministic pseudo-random residues. Redundant
/// with [`verify`]; guards the expansion code at a fraction of its cost.
pub fn spot_check(cert: &Certificate, points: usize) -> bool {
    let d = cert.context().len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let Some(coeffs) = cert
        .terms
        .iter()
        .map(|t| modp::rational(&t.coeff))
        .collect::<Option<Vec<u64>>>()
    else {
        return true;
    };
    for _ in 0..points {
        let x: Vec<u64> = (0..d).map(|_| rng.random_range(0..modp::P)).collect();
        let Some(gvals) = cert
            .system
            .generators()
            .iter()
            .map(|g| modp::eval(&g.poly, &x).map(|v| (g.name.as_str(), v)))
            .collect::<Option<BTreeMap<&str, u64>>>()
        else {
            continue;
        };
        let mut sum = 0u64;
        for (t, &c) in cert.terms.iter().zip(&coeffs) {
            let Some(p) = modp::eval(&t.square_root, &x) else {
                return true;
            };
            let mut v = modp::mul(c, modp::mul(p, p));
            for (name, &k) in &t.exponents {
                let Some(&g) = gvals.get(name.as_str()) else {
                    return false;
                };
                v = modp::mul(v, modp::pow(g, k));
            }
            sum = modp::add(sum, v);
        }
        match modp::eval(&cert.target, &x) {
            Some(target) if target != sum => return false,
            _ => {}
        }
    }
    true
}

/// Arithmetic in `ℤ/(2⁶¹ − 1)`. `None` when a denominator vanishes mod p.
mod modp {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;

    use crate::{Poly, Rational};

    pub const P: u64 = (1 << 61) - 1;

    pub fn add(a: u64, b: u64) -> u64 {
        (a + b) % P
    }

    pub fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    pub fn pow(mut b: u64, e: impl Into<u64>) -> u64 {
        let mut e = e.into();
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn reduce(n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(P))
            .to_u64()
            .expect("reduced below P")
    }

    /// `a/b ↦ a·b^(P−2)`.
    pub fn rational(q: &Rational) -> Option<u64> {
        let den = reduce(q.denom());
        (den != 0).then(|| mul(reduce(q.numer()), pow(den, P - 2)))
    }

    pub fn eval(p: &Poly, x: &[u64]) -> Option<u64> {
        let mut sum = 0;
        for (m, c) in p.terms() {
            let mut v = rational(c)?;
            for (&xi, &e) in x.iter().zip(m.exponents()) {
                if e > 0 {
                    v = mul(v, pow(xi, e));
                }
            }
            sum = add(sum, v);
        }
        Some(sum)
    }
}
