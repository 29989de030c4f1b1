//! Dense two-phase simplex over exact rationals.
//!
//! Problems are given in equality standard form
//! `maximize cᵀx  subject to  Ax = b, x ≥ 0`.
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems. Intended for the small
//! systems that arise from edge cones (a handful of rows and columns).

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// No `x ≥ 0` solves `Ax = b`. The witness `w` satisfies `Aᵀw ≥ 0` and
    /// `bᵀw < 0` (Farkas alternative).
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded,
    Optimal {
        x: Vec<Rational>,
        value: Rational,
    },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// original variables, artificial variables follow
    vars: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        self.rows[r].last().unwrap()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        let mut d = cost[col].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[r][col].is_zero() {
                d -= &cost[b] * &self.rows[r][col];
            }
        }
        d
    }

    /// Maximizes `cost` over the current basis, allowing only columns
    /// `< allowed` to enter. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering =
                (0..allowed).filter(|c| !self.basis.contains(c)).find(|&c| self.reduced_cost(cost, c).is_positive());
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leaving {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().enumerate().map(|(r, &b)| &cost[b] * self.rhs(r)).sum()
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.vars {
                x[b] = self.rhs(r).clone();
            }
        }
        x
    }
}

/// Solves `max cᵀx s.t. Ax = b, x ≥ 0` exactly.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    assert!(a.iter().all(|row| row.len() == n));

    // Flip rows so that b >= 0; remember the signs for the Farkas witness.
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    for r in 0..m {
        let flip = |v: &Rational| if signs[r] { -v } else { v.clone() };
        let mut row: Vec<Rational> = a[r].iter().map(flip).collect();
        row.extend((0..m).map(|k| if k == r { Rational::from_integer(1.into()) } else { Rational::zero() }));
        row.push(flip(&b[r]));
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis: (n..n + m).collect(), vars: n };

    // Phase 1: maximize -(sum of artificials).
    let mut phase1 = vec![Rational::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rational::from_integer(1.into());
    }
    tab.optimize(&phase1, n + m);
    if tab.objective(&phase1).is_negative() {
        // Simplex multipliers pi = c_B B^{-1}; B^{-1} sits in the artificial columns.
        let farkas = (0..m)
            .map(|r| {
                let pi: Rational = tab.basis.iter().enumerate().map(|(s, &bv)| &phase1[bv] * &tab.rows[s][n + r]).sum();
                if signs[r] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // that stay artificial are redundant and remain pinned at zero.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&c| !tab.rows[r][c].is_zero() && !tab.basis.contains(&c)) {
                tab.pivot(r, col);
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend((0..m).map(|_| Rational::zero()));
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let value = tab.objective(&phase2);
    LpOutcome::Optimal { x: tab.solution(), value }
}
