//! Dense two-phase primal simplex over an exact field, Bland's rule throughout.

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum StandardOutcome<F> {
    Optimal { value: F, x: Vec<F> },
    Unbounded,
    Infeasible,
}

struct Tableau<F> {
    /// `m` rows of `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<F>>,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<F>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<F: Field> Tableau<F> {
    fn rhs(&self, i: usize) -> &F {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
        }
        if !self.obj[c].is_zero() {
            let factor = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` when
    /// the objective is unbounded below.
    fn run(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[best]) {
                            Some((i, ratio))
                        } else {
                            Some((best, br))
                        }
                    }
                };
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn set_costs(&mut self, costs: &[F]) {
        let mut obj: Vec<F> = costs.to_vec();
        obj.resize(self.ncols, F::zero());
        obj.push(F::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs.get(self.basis[i]).cloned().unwrap_or_else(F::zero);
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                *o = o.clone() - cb.clone() * v.clone();
            }
        }
        self.obj = obj;
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`.
///
/// With `c = 0` the result is the basic feasible solution found by phase one.
pub(crate) fn solve_standard<F: Field>(a: &[Vec<F>], b: &[F], c: &[F]) -> StandardOutcome<F> {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<F> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| if k == i { F::one() } else { F::zero() }));
        r.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: (n..n + m).collect(),
        ncols,
    };

    // phase one: minimize the sum of artificials
    let phase1: Vec<F> = (0..ncols)
        .map(|j| if j >= n { F::one() } else { F::zero() })
        .collect();
    t.set_costs(&phase1);
    t.run(ncols);
    if !t.obj[ncols].is_zero() {
        return StandardOutcome::Infeasible;
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    t.set_costs(c);
    if !t.run(n) {
        return StandardOutcome::Unbounded;
    }
    let mut x = vec![F::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        x[bv] = t.rhs(i).clone();
    }
    let value = -t.obj[ncols].clone();
    StandardOutcome::Optimal { value, x }
}
