//! Exact linear programming over polyhedra `{l1 ≥ 0, ..., lk ≥ 0}`: optimum
//! values, bounding boxes and affine Farkas witnesses.

mod simplex;

use thiserror::Error;

use crate::poly::{Ctx, Monomial, Polynomial};
use crate::scalar::Field;
use simplex::{solve_standard, StandardOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint or objective {0} is not linear")]
    NotLinear(String),
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("the polyhedron is empty")]
    EmptyPolyhedron,
    #[error("the polyhedron is unbounded")]
    Unbounded,
    #[error("target is not a nonnegative combination of 1 and the constraints")]
    NotRepresentable,
}

/// The polyhedron `{l1 ≥ 0, ..., lk ≥ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem<F: Field> {
    ctx: Ctx,
    constraints: Vec<Polynomial<F>>,
}

impl<F: Field> LinearSystem<F> {
    pub fn new(ctx: &Ctx, constraints: Vec<Polynomial<F>>) -> Result<Self, LpError> {
        for c in &constraints {
            if c.context() != ctx {
                return Err(LpError::ContextMismatch);
            }
            if !c.is_linear() {
                return Err(LpError::NotLinear(c.to_string()));
            }
        }
        Ok(LinearSystem {
            ctx: ctx.clone(),
            constraints,
        })
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn constraints(&self) -> &[Polynomial<F>] {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.ctx.len()
    }

    pub fn contains(&self, point: &[F]) -> bool {
        self.constraints.iter().all(|c| {
            !c.evaluate(point)
                .expect("point matches context")
                .is_negative()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome<F> {
    Optimal { value: F, point: Vec<F> },
    Unbounded,
    Infeasible,
}

impl<F> LpOutcome<F> {
    pub fn value(&self) -> Option<&F> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Optimizes a linear objective over the polyhedron.
///
/// Free variables are split as `x = x⁺ − x⁻` and each constraint gets a
/// surplus variable, giving a standard-form program for the simplex.
pub fn lp_optimize<F: Field>(
    system: &LinearSystem<F>,
    objective: &Polynomial<F>,
    sense: Sense,
) -> Result<LpOutcome<F>, LpError> {
    if objective.context() != system.context() {
        return Err(LpError::ContextMismatch);
    }
    let (obj, obj0) = objective
        .linear_parts()
        .ok_or_else(|| LpError::NotLinear(objective.to_string()))?;
    let d = system.dim();
    let k = system.constraints.len();
    let n = 2 * d + k;
    let mut a = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(k);
    for (i, con) in system.constraints.iter().enumerate() {
        let (coef, c0) = con.linear_parts().expect("checked at construction");
        let mut row = vec![F::zero(); n];
        for j in 0..d {
            row[j] = coef[j].clone();
            row[d + j] = -coef[j].clone();
        }
        row[2 * d + i] = -F::one();
        a.push(row);
        b.push(-c0);
    }
    let sign = match sense {
        Sense::Min => F::one(),
        Sense::Max => -F::one(),
    };
    let mut c = vec![F::zero(); n];
    for j in 0..d {
        c[j] = sign.clone() * obj[j].clone();
        c[d + j] = -sign.clone() * obj[j].clone();
    }
    Ok(match solve_standard(&a, &b, &c) {
        StandardOutcome::Infeasible => LpOutcome::Infeasible,
        StandardOutcome::Unbounded => LpOutcome::Unbounded,
        StandardOutcome::Optimal { value, x } => {
            let point: Vec<F> = (0..d).map(|j| x[j].clone() - x[d + j].clone()).collect();
            LpOutcome::Optimal {
                value: sign * value + obj0,
                point,
            }
        }
    })
}

pub fn is_empty<F: Field>(system: &LinearSystem<F>) -> bool {
    let zero = Polynomial::zero(system.context());
    matches!(
        lp_optimize(system, &zero, Sense::Min),
        Ok(LpOutcome::Infeasible)
    )
}

/// Nonnegative multipliers `(λ0, λ1, ..., λm)` with `f = λ0 + Σ λi·li`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasWitness<F> {
    pub multipliers: Vec<F>,
}

impl<F: Field> FarkasWitness<F> {
    /// `λ0 + Σ λi·gi`.
    pub fn combine(&self, generators: &[Polynomial<F>], ctx: &Ctx) -> Polynomial<F> {
        let mut out = Polynomial::constant(ctx, self.multipliers[0].clone());
        for (l, g) in self.multipliers[1..].iter().zip(generators) {
            out.add_scaled(g, l);
        }
        out
    }
}

/// Writes `f` as `λ0 + Σ λi·gi` with `λ ≥ 0` by matching coefficients, if
/// possible. Works for polynomials of any degree.
pub fn cone_decompose<F: Field>(
    f: &Polynomial<F>,
    generators: &[Polynomial<F>],
) -> Option<FarkasWitness<F>> {
    let ctx = f.context();
    let mut monomials: Vec<Monomial> = Vec::new();
    monomials.push(Monomial::one(ctx.len()));
    for p in std::iter::once(f).chain(generators) {
        if p.context() != ctx {
            return None;
        }
        monomials.extend(p.terms().map(|(m, _)| m.clone()));
    }
    monomials.sort();
    monomials.dedup();
    let n = generators.len() + 1;
    let a: Vec<Vec<F>> = monomials
        .iter()
        .map(|m| {
            let mut row = Vec::with_capacity(n);
            row.push(if m.is_one() { F::one() } else { F::zero() });
            row.extend(generators.iter().map(|g| g.coeff(m)));
            row
        })
        .collect();
    let b: Vec<F> = monomials.iter().map(|m| f.coeff(m)).collect();
    match solve_standard(&a, &b, &vec![F::zero(); n]) {
        StandardOutcome::Optimal { x, .. } => Some(FarkasWitness { multipliers: x }),
        _ => None,
    }
}

/// Affine Farkas: a witness for `f ∈ cone{1, l1, ..., lm}`.
pub fn farkas_decompose<F: Field>(
    f: &Polynomial<F>,
    system: &LinearSystem<F>,
) -> Result<FarkasWitness<F>, LpError> {
    if f.context() != system.context() {
        return Err(LpError::ContextMismatch);
    }
    if !f.is_linear() {
        return Err(LpError::NotLinear(f.to_string()));
    }
    if is_empty(system) {
        return Err(LpError::EmptyPolyhedron);
    }
    let w = cone_decompose(f, &system.constraints).ok_or(LpError::NotRepresentable)?;
    debug_assert_eq!(&w.combine(&system.constraints, system.context()), f);
    Ok(w)
}

/// Exact per-coordinate `(min, max)` over the polyhedron.
pub fn bounding_box<F: Field>(system: &LinearSystem<F>) -> Result<Vec<(F, F)>, LpError> {
    let ctx = system.context();
    let mut out = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let x = Polynomial::var(ctx, i);
        let lo = lp_optimize(system, &x, Sense::Min)?;
        let hi = lp_optimize(system, &x, Sense::Max)?;
        match (lo, hi) {
            (LpOutcome::Infeasible, _) | (_, LpOutcome::Infeasible) => {
                return Err(LpError::EmptyPolyhedron)
            }
            (LpOutcome::Optimal { value: l, .. }, LpOutcome::Optimal { value: h, .. }) => {
                out.push((l, h))
            }
            _ => return Err(LpError::Unbounded),
        }
    }
    if ctx.is_empty() && is_empty(system) {
        return Err(LpError::EmptyPolyhedron);
    }
    Ok(out)
}

/// Inverse of a square matrix by exact Gauss–Jordan elimination; `None` when
/// singular.
pub fn invert<F: Field>(matrix: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = matrix.len();
    let mut aug: Vec<Vec<F>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, piv);
        let p = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
