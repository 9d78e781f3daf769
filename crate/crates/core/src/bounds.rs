//! Cheap exact bounds over boxes: termwise interval enclosures and lattice
//! scans. Neither certifies positivity; they seed constants and find
//! counterexamples.

use thiserror::Error;

use crate::poly::{power_table, Polynomial};
use crate::scalar::Field;

/// Default cap on the number of lattice points a grid scan may visit.
pub const DEFAULT_GRID_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("box has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u64 },
    #[error("box coordinate {0} has low > high")]
    InvertedRange(usize),
}

/// Axis-aligned box `Π [low_i, high_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalBox<F> {
    ranges: Vec<(F, F)>,
}

impl<F: Field> IntervalBox<F> {
    pub fn new(ranges: Vec<(F, F)>) -> Result<Self, BoundsError> {
        if let Some(i) = ranges.iter().position(|(l, h)| l > h) {
            return Err(BoundsError::InvertedRange(i));
        }
        Ok(IntervalBox { ranges })
    }

    /// `[low, high]^d`.
    pub fn cube(d: usize, low: F, high: F) -> Result<Self, BoundsError> {
        Self::new(vec![(low, high); d])
    }

    pub fn ranges(&self) -> &[(F, F)] {
        &self.ranges
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn contains(&self, point: &[F]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(&self.ranges)
                .all(|(x, (l, h))| l <= x && x <= h)
    }

    fn split(&self) -> (Self, Self) {
        let two = F::one() + F::one();
        let (axis, _) = self
            .ranges
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| {
                (a.1.clone() - a.0.clone())
                    .cmp(&(b.1.clone() - b.0.clone()))
                    .then(j.cmp(i))
            })
            .expect("nonempty box");
        let (l, h) = self.ranges[axis].clone();
        let mid = (l.clone() + h.clone()) / two;
        let mut a = self.clone();
        let mut b = self.clone();
        a.ranges[axis] = (l, mid.clone());
        b.ranges[axis] = (mid, h);
        (a, b)
    }
}

fn mul_interval<F: Field>(a: (F, F), b: (F, F)) -> (F, F) {
    let cands = [
        a.0.clone() * b.0.clone(),
        a.0.clone() * b.1.clone(),
        a.1.clone() * b.0.clone(),
        a.1 * b.1,
    ];
    let lo = cands.iter().min().cloned().expect("four candidates");
    let hi = cands.iter().max().cloned().expect("four candidates");
    (lo, hi)
}

fn pow_interval<F: Field>(lo: &F, hi: &F, e: u32) -> (F, F) {
    let pl = num_traits::pow(lo.clone(), e as usize);
    let ph = num_traits::pow(hi.clone(), e as usize);
    if e % 2 == 1 || !lo.is_negative() {
        (pl, ph)
    } else if !hi.is_positive() {
        (ph, pl)
    } else {
        (F::zero(), pl.max(ph))
    }
}

/// Termwise enclosure `[low, high]` of the range of `p` over the box.
pub fn interval_eval<F: Field>(
    p: &Polynomial<F>,
    bx: &IntervalBox<F>,
) -> Result<(F, F), BoundsError> {
    if bx.dim() != p.nvars() {
        return Err(BoundsError::DimensionMismatch {
            expected: p.nvars(),
            got: bx.dim(),
        });
    }
    let mut lo = F::zero();
    let mut hi = F::zero();
    for (m, c) in p.terms() {
        let mut acc = (F::one(), F::one());
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                let (l, h) = &bx.ranges[i];
                acc = mul_interval(acc, pow_interval(l, h, e));
            }
        }
        let (tl, th) = if c.is_negative() {
            (c.clone() * acc.1, c.clone() * acc.0)
        } else {
            (c.clone() * acc.0, c.clone() * acc.1)
        };
        lo = lo + tl;
        hi = hi + th;
    }
    Ok((lo, hi))
}

/// [`interval_eval`] tightened by bisecting the widest axis `depth` times.
pub fn interval_eval_refined<F: Field>(
    p: &Polynomial<F>,
    bx: &IntervalBox<F>,
    depth: u32,
) -> Result<(F, F), BoundsError> {
    if depth == 0 || bx.dim() == 0 {
        return interval_eval(p, bx);
    }
    let (a, b) = bx.split();
    let (al, ah) = interval_eval_refined(p, &a, depth - 1)?;
    let (bl, bh) = interval_eval_refined(p, &b, depth - 1)?;
    Ok((al.min(bl), ah.max(bh)))
}

/// Number of points in a `(steps+1)^d` lattice, checked against `limit`.
fn lattice_size(d: usize, steps: u32, limit: u64) -> Result<u64, BoundsError> {
    let points = (steps as u128 + 1)
        .checked_pow(d as u32)
        .unwrap_or(u128::MAX);
    if points > limit as u128 {
        return Err(BoundsError::GridTooLarge { points, limit });
    }
    Ok(points as u64)
}

/// Exact minimum of `p` over the lattice `low + k·(high−low)/steps`, with the
/// lexicographically smallest minimizer.
pub fn grid_min<F: Field>(
    p: &Polynomial<F>,
    bx: &IntervalBox<F>,
    steps: u32,
    limit: u64,
) -> Result<(F, Vec<F>), BoundsError> {
    let d = p.nvars();
    if bx.dim() != d {
        return Err(BoundsError::DimensionMismatch {
            expected: d,
            got: bx.dim(),
        });
    }
    let steps = steps.max(1);
    lattice_size(d, steps, limit)?;
    let s = <F as Field>::from_u64(steps as u64);
    let coords: Vec<Vec<F>> = bx
        .ranges
        .iter()
        .map(|(l, h)| {
            (0..=steps)
                .map(|k| {
                    l.clone()
                        + (h.clone() - l.clone()) * <F as Field>::from_u64(k as u64) / s.clone()
                })
                .collect()
        })
        .collect();
    let maxe = p.max_exponents();
    // powers of every lattice coordinate, per axis
    let powers: Vec<Vec<Vec<F>>> = coords
        .iter()
        .zip(&maxe)
        .map(|(axis, &e)| {
            axis.iter()
                .map(|x| power_table(std::slice::from_ref(x), &[e]).remove(0))
                .collect()
        })
        .collect();
    let terms: Vec<_> = p.terms().collect();
    let mut idx = vec![0usize; d];
    let mut best: Option<(F, Vec<usize>)> = None;
    loop {
        let mut v = F::zero();
        for (m, c) in &terms {
            let mut t = (*c).clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][idx[i]][e as usize].clone();
                }
            }
            v = v + t;
        }
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, idx.clone()));
        }
        // lexicographic odometer, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                let (v, at) = best.expect("lattice is nonempty");
                let point = at
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| coords[i][k].clone())
                    .collect();
                return Ok((v, point));
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] <= steps as usize {
                break;
            }
            idx[axis] = 0;
        }
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::poly::{Monomial, VariableContext};
    use crate::{IntervalBox, Poly, Rational};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..4, 0u32..3), -5i64..6), 0..6).prop_map(|ts| {
            Poly::from_terms(
                &VariableContext::standard(2),
                ts.into_iter()
                    .map(|((a, b), c)| (Monomial::new(vec![a, b]), r(c, 1))),
            )
        })
    }

    fn boxed() -> impl Strategy<Value = (IntervalBox, Vec<Rational>)> {
        proptest::collection::vec((-4i64..4, 0i64..5, 0i64..=8), 2).prop_map(|axes| {
            let ranges: Vec<_> = axes
                .iter()
                .map(|&(l, w, _)| (r(l, 1), r(l + w, 1)))
                .collect();
            let point = axes
                .iter()
                .map(|&(l, w, t)| r(l, 1) + r(w * t, 8))
                .collect();
            (IntervalBox::new(ranges).unwrap(), point)
        })
    }

    /// Reference scan: reversed axis order, keeps the lexicographically
    /// smallest minimizer by explicit comparison.
    fn brute_min(p: &Poly, bx: &IntervalBox, steps: u32) -> (Rational, Vec<Rational>) {
        let s = r(steps as i64, 1);
        let axis = |i: usize| -> Vec<Rational> {
            let (l, h) = &bx.ranges()[i];
            (0..=steps)
                .rev()
                .map(|k| l + (h - l) * r(k as i64, 1) / &s)
                .collect()
        };
        let mut best: Option<(Rational, Vec<Rational>)> = None;
        for y in axis(1) {
            for x in axis(0) {
                let pt = vec![x.clone(), y.clone()];
                let v = p.evaluate(&pt).unwrap();
                let better = match &best {
                    None => true,
                    Some((bv, bp)) => v < *bv || (v == *bv && pt < *bp),
                };
                if better {
                    best = Some((v, pt));
                }
            }
        }
        best.unwrap()
    }

    proptest! {
        #[test]
        fn enclosure_is_sound(p in poly(), (bx, pt) in boxed()) {
            let (lo, hi) = interval_eval(&p, &bx).unwrap();
            let v = p.evaluate(&pt).unwrap();
            prop_assert!(lo <= v && v <= hi);
            let (rl, rh) = interval_eval_refined(&p, &bx, 3).unwrap();
            prop_assert!(rl <= v && v <= rh && rl >= lo && rh <= hi);
        }

        #[test]
        fn grid_matches_reference(p in poly(), (bx, _) in boxed(), steps in 1u32..5) {
            let (v, at) = grid_min(&p, &bx, steps, 10_000).unwrap();
            let (bv, bat) = brute_min(&p, &bx, steps);
            prop_assert_eq!(&v, &bv);
            prop_assert_eq!(at, bat);
            prop_assert!(v >= interval_eval(&p, &bx).unwrap().0);
        }
    }
}
