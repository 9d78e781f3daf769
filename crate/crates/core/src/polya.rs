//! Pólya exponents: the least `N` such that `(ΣXᵢ)^N·f` has no negative
//! coefficient, for a form `f` positive on the standard simplex.
//!
//! The search clears denominators once and then works on a dense integer
//! array indexed by the colex rank of exponent vectors, so each step
//! `(ΣXᵢ)·p` is a single pass of integer additions.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bounds::DEFAULT_GRID_LIMIT;
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Field;

/// Default bound on the number of coefficients of one Pólya product.
/// Dense big-integer products past this size cost gigabytes.
pub const DEFAULT_MAX_TERMS: usize = 500_000;

/// Why a search stopped without an exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exhaustion<F> {
    /// Every `N ≤ cap` left a negative coefficient.
    Cap,
    /// The simplex grid has a point with a negative value, so no `N` exists.
    GridCounterexample { value: F, point: Vec<F> },
    /// The next product would exceed the term budget.
    TermLimit { terms: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyaError<F: std::fmt::Debug> {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial is zero")]
    Zero,
    #[error("no Pólya exponent up to {cap} (stopped at {reached}: {reason:?})")]
    CapExceeded {
        cap: u32,
        reached: u32,
        reason: Exhaustion<F>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyaOptions {
    pub cap: u32,
    /// Simplex grid denominator for the fast-fail scan; `None` means `4·deg f`.
    pub grid_denominator: Option<u32>,
    /// The scan is skipped when the grid has more points than this.
    pub grid_limit: u64,
    pub max_terms: usize,
}

impl PolyaOptions {
    pub fn with_cap(cap: u32) -> Self {
        PolyaOptions {
            cap,
            grid_denominator: None,
            grid_limit: DEFAULT_GRID_LIMIT,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

/// `(ΣXᵢ)^exponent·f`, all of whose coefficients are nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyaResult<F: Field> {
    pub exponent: u32,
    pub expanded: Polynomial<F>,
}

impl<F: Field> PolyaResult<F> {
    /// The expansion read as a semiring combination of monomials.
    pub fn semiring_terms(&self) -> BTreeMap<Monomial, F> {
        self.expanded
            .terms()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

/// [`polya_exponent_with`] using default grid and term limits.
pub fn polya_exponent<F: Field>(
    f: &Polynomial<F>,
    cap: u32,
) -> Result<PolyaResult<F>, PolyaError<F>> {
    polya_exponent_with(f, &PolyaOptions::with_cap(cap))
}

pub fn polya_exponent_with<F: Field>(
    f: &Polynomial<F>,
    opts: &PolyaOptions,
) -> Result<PolyaResult<F>, PolyaError<F>> {
    let deg = f.degree().finite().ok_or(PolyaError::Zero)?;
    if !f.is_homogeneous() {
        return Err(PolyaError::NotHomogeneous);
    }
    if f.terms().all(|(_, c)| !c.is_negative()) {
        return Ok(PolyaResult {
            exponent: 0,
            expanded: f.clone(),
        });
    }
    let d = f.nvars();
    let exhausted = |reached, reason| PolyaError::CapExceeded {
        cap: opts.cap,
        reached,
        reason,
    };
    if d == 0 {
        return Err(exhausted(0, Exhaustion::Cap));
    }

    let (scale, ints) = clear_denominators(f);
    let den = opts.grid_denominator.unwrap_or(4 * deg.max(1)).max(1);
    if binom_u128(den as u128 + d as u128 - 1, d as u128 - 1) <= opts.grid_limit as u128 {
        let (value, at) = int_grid_min(&ints, d, den);
        if value.is_negative() {
            let point = at
                .iter()
                .map(|&k| <F as Field>::from_u64(k as u64) / <F as Field>::from_u64(den as u64))
                .collect();
            let dn = num_traits::pow(<F as Field>::from_u64(den as u64), deg as usize);
            let value = F::from_int(value) / (F::from_int(scale) * dn);
            return Err(exhausted(
                0,
                Exhaustion::GridCounterexample { value, point },
            ));
        }
    }

    let mut ranker = Ranker::new(d);
    let mut n = deg;
    ranker.ensure(n as usize);
    let mut coeffs = vec![F::Int::zero(); ranker.count(n as usize)];
    for (m, c) in &ints {
        coeffs[ranker.rank(m)] = c.clone();
    }
    for exponent in 1..=opts.cap {
        let size = binom_u128((n + 1) as u128 + d as u128 - 1, d as u128 - 1);
        if size > opts.max_terms as u128 {
            return Err(exhausted(
                exponent - 1,
                Exhaustion::TermLimit { terms: size },
            ));
        }
        ranker.ensure(n as usize + 1);
        coeffs = ranker.times_sum(&coeffs, n as usize);
        n += 1;
        if coeffs.iter().all(|c| !c.is_negative()) {
            let expanded = ranker.to_poly(f, &coeffs, n, &scale);
            return Ok(PolyaResult { exponent, expanded });
        }
    }
    Err(exhausted(opts.cap, Exhaustion::Cap))
}

/// Exact minimum of `f` over the simplex points with coordinates `k/denominator`.
pub fn simplex_grid_min<F: Field>(f: &Polynomial<F>, denominator: u32) -> F {
    let d = f.nvars();
    let den = denominator.max(1);
    if d == 0 {
        return f.constant_term();
    }
    let s = <F as Field>::from_u64(den as u64);
    let mut best: Option<F> = None;
    for_each_composition(den, d, |k| {
        let point: Vec<F> = k
            .iter()
            .map(|&ki| <F as Field>::from_u64(ki as u64) / s.clone())
            .collect();
        let v = f
            .evaluate(&point)
            .expect("point has one coordinate per variable");
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    });
    best.expect("the simplex grid is nonempty")
}

/// Integer coefficients `L·c_α` with `L` the lcm of the denominators.
fn clear_denominators<F: Field>(f: &Polynomial<F>) -> (F::Int, Vec<(Monomial, F::Int)>) {
    use num_integer::Integer;
    let l = f
        .terms()
        .fold(F::Int::one(), |acc, (_, c)| acc.lcm(&c.denom_int()));
    let ints = f
        .terms()
        .map(|(m, c)| (m.clone(), c.numer_int() * (l.clone() / c.denom_int())))
        .collect();
    (l, ints)
}

/// Minimum of a form with integer coefficients over the integer points of
/// `den·Δ`, and the first composition attaining it.
fn int_grid_min<I: crate::Coeff>(terms: &[(Monomial, I)], d: usize, den: u32) -> (I, Vec<u32>) {
    let maxe = terms
        .iter()
        .flat_map(|(m, _)| m.exponents().iter().copied())
        .max()
        .unwrap_or(0) as usize;
    // pw[v][e] = v^e
    let pw: Vec<Vec<I>> = (0..=den)
        .map(|v| {
            let v = I::from_u32(v).expect("small integer");
            let mut row = vec![I::one()];
            for e in 0..maxe {
                let next = row[e].clone() * v.clone();
                row.push(next);
            }
            row
        })
        .collect();
    let mut best: Option<(I, Vec<u32>)> = None;
    for_each_composition(den, d, |k| {
        let mut v = I::zero();
        for (m, c) in terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t * pw[k[i] as usize][e as usize].clone();
                }
            }
            v = v + t;
        }
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, k.to_vec()));
        }
    });
    best.expect("the simplex grid is nonempty")
}

/// Calls `visit` on every `k ∈ ℕ^d` with `Σk = n`, in lexicographic order.
fn for_each_composition(n: u32, d: usize, mut visit: impl FnMut(&[u32])) {
    if d == 0 {
        return;
    }
    let mut k = vec![0u32; d];
    k[d - 1] = n;
    loop {
        visit(&k);
        // j: rightmost nonzero entry; its mass moves left by one unit
        let Some(j) = (1..d).rev().find(|&j| k[j] > 0) else {
            return;
        };
        let mass = k[j];
        k[j] = 0;
        k[j - 1] += 1;
        k[d - 1] = mass - 1;
    }
}

fn binom_u128(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Colex ranking of exponent vectors of a fixed length.
///
/// With bar positions `p_k = α₁+…+α_k + k − 1`, the rank is `Σ C(p_k, k)` for
/// `k < d`; it does not depend on the total degree, and vectors of degree `n`
/// fill exactly `[0, C(n+d−1, d−1))`.
struct Ranker {
    d: usize,
    /// `binom[p][k]` for `p ≤ top`, `k < d`.
    binom: Vec<Vec<usize>>,
}

impl Ranker {
    fn new(d: usize) -> Self {
        Ranker {
            d,
            binom: Vec::new(),
        }
    }

    fn ensure(&mut self, n: usize) {
        let top = n + self.d;
        while self.binom.len() <= top {
            let p = self.binom.len();
            let row = (0..self.d.max(1))
                .map(|k| {
                    if k == 0 {
                        1
                    } else if p == 0 {
                        0
                    } else {
                        self.binom[p - 1][k - 1] + self.binom[p - 1][k]
                    }
                })
                .collect();
            self.binom.push(row);
        }
    }

    fn count(&self, n: usize) -> usize {
        if self.d == 0 {
            return 1;
        }
        self.binom[n + self.d - 1][self.d - 1]
    }

    fn rank(&self, m: &Monomial) -> usize {
        let mut prefix = 0usize;
        let mut r = 0usize;
        for (k, &e) in m.exponents()[..self.d.saturating_sub(1)].iter().enumerate() {
            prefix += e as usize;
            r += self.binom[prefix + k][k + 1];
        }
        r
    }

    /// Coefficients of `(ΣXᵢ)·p` for `p` homogeneous of degree `n`.
    fn times_sum<I: crate::Coeff>(&self, coeffs: &[I], n: usize) -> Vec<I> {
        let d = self.d;
        let mut out = vec![I::zero(); self.count(n + 1)];
        let mut pos = vec![0usize; d.saturating_sub(1)];
        for_each_composition(n as u32, d, |a| {
            let mut prefix = 0usize;
            let mut src = 0usize;
            for k in 0..d - 1 {
                prefix += a[k] as usize;
                pos[k] = prefix + k;
                src += self.binom[pos[k]][k + 1];
            }
            let c = &coeffs[src];
            if c.is_zero() {
                return;
            }
            // raising α_i shifts every bar at index ≥ i one place right
            for i in 0..d {
                let mut dst = 0usize;
                for (k, &pk) in pos.iter().enumerate().take(d - 1) {
                    let p = if k >= i { pk + 1 } else { pk };
                    dst += self.binom[p][k + 1];
                }
                out[dst] = out[dst].clone() + c.clone();
            }
        });
        out
    }

    fn to_poly<F: Field>(
        &self,
        f: &Polynomial<F>,
        coeffs: &[F::Int],
        n: u32,
        scale: &F::Int,
    ) -> Polynomial<F> {
        let mut terms = Vec::new();
        let s = F::from_int(scale.clone());
        for_each_composition(n, self.d, |a| {
            let m = Monomial::new(a.to_vec());
            let c = &coeffs[self.rank(&m)];
            if !c.is_zero() {
                terms.push((m, F::from_int(c.clone()) / s.clone()));
            }
        });
        Polynomial::from_terms(f.context(), terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VariableContext;
    use crate::{rat, Poly};

    fn p2(s: &str) -> Poly {
        Poly::parse(&VariableContext::standard(2), s).unwrap()
    }

    #[test]
    fn compositions_are_lexicographic_and_ranked_densely() {
        let mut seen = Vec::new();
        for_each_composition(3, 3, |k| seen.push(k.to_vec()));
        assert_eq!(seen.len(), 10);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert!(seen.iter().all(|k| k.iter().sum::<u32>() == 3));
        let mut r = Ranker::new(3);
        r.ensure(3);
        let mut ranks: Vec<usize> = seen
            .iter()
            .map(|k| r.rank(&Monomial::new(k.clone())))
            .collect();
        ranks.sort();
        assert_eq!(ranks, (0..10).collect::<Vec<_>>());
        let mut one = Vec::new();
        for_each_composition(4, 1, |k| one.push(k.to_vec()));
        assert_eq!(one, vec![vec![4]]);
    }

    #[test]
    fn spec_examples() {
        let r = polya_exponent(&p2("X1^2 - X1*X2 + X2^2"), 10).unwrap();
        assert_eq!(r.exponent, 1);
        assert_eq!(r.expanded, p2("X1^3 + X2^3"));
        assert_eq!(polya_exponent(&p2("X1 + X2"), 10).unwrap().exponent, 0);
        match polya_exponent(&p2("X1^2 - 3*X1*X2 + X2^2"), 50) {
            Err(PolyaError::CapExceeded {
                reached: 0,
                reason: Exhaustion::GridCounterexample { value, point },
                ..
            }) => {
                assert_eq!(value, rat(-1, 4));
                assert_eq!(point, vec![rat(1, 2), rat(1, 2)]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            polya_exponent(&p2("X1^2 + X2"), 3),
            Err(PolyaError::NotHomogeneous)
        );
        assert_eq!(polya_exponent(&p2("0"), 3), Err(PolyaError::Zero));
    }

    #[test]
    fn grid_minimum_examples() {
        assert_eq!(
            simplex_grid_min(&p2("X1^2 - 3*X1*X2 + X2^2"), 2),
            rat(-1, 4)
        );
        assert_eq!(simplex_grid_min(&p2("X1 + X2"), 1), rat(1, 1));
        assert_eq!(simplex_grid_min(&p2("X1*X2"), 2), rat(0, 1));
    }

    #[test]
    fn cap_without_counterexample() {
        // negative inside the simplex, nonnegative at the vertices the coarse grid sees
        let f = p2("X1^2 - X1*X2");
        let opts = PolyaOptions {
            grid_denominator: Some(1),
            ..PolyaOptions::with_cap(6)
        };
        assert!(matches!(
            polya_exponent_with(&f, &opts),
            Err(PolyaError::CapExceeded {
                reached: 6,
                reason: Exhaustion::Cap,
                ..
            })
        ));
    }

    #[test]
    fn term_limit_guard() {
        let f = p2("X1^2 - 19/10*X1*X2 + X2^2");
        let opts = PolyaOptions {
            max_terms: 8,
            ..PolyaOptions::with_cap(60)
        };
        assert!(matches!(
            polya_exponent_with(&f, &opts),
            Err(PolyaError::CapExceeded {
                reason: Exhaustion::TermLimit { terms: 9 },
                reached: 5,
                ..
            })
        ));
    }

    #[test]
    fn rational_coefficients_and_three_variables() {
        let c = VariableContext::standard(3);
        let f = Poly::parse(&c, "1/2*X1^2 + X2^2 + X3^2 - 1/3*X1*X2 - 1/3*X2*X3").unwrap();
        let r = polya_exponent(&f, 20).unwrap();
        assert_eq!(r.expanded, Poly::sum_of_vars(&c).pow(r.exponent) * &f);
        assert!(r.semiring_terms().values().all(|v| *v > rat(0, 1)));
    }
}
