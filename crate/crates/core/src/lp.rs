//! Dense two-phase simplex for the small linear programs used here
//! (tens of variables, tens of rows). Bland's rule keeps pivoting finite and
//! the result reproducible.

use crate::error::{Error, Result};

pub const MAX_VARIABLES: usize = 64;
pub const ITERATION_CAP: usize = 10_000;
pub const PIVOT_TOL: f64 = 1e-10;
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// One linear row `coeffs . x (=, <=) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; 0 when infeasible.
    pub objective: f64,
    /// Primal solution; all zeros when infeasible.
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Sum of artificial variables left after phase one.
    pub infeasibility: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Eq,
    Le,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    iterations: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximises `cost . x` over columns allowed by `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<f64> {
        loop {
            // Reduced costs c_j - c_B B^-1 A_j.
            let entering = (0..self.ncols).filter(|&j| allowed(j)).find(|&j| {
                let z: f64 = self
                    .basis
                    .iter()
                    .zip(&self.rows)
                    .map(|(&b, row)| cost[b] * row[j])
                    .sum();
                cost[j] - z > PIVOT_TOL
            });
            let Some(col) = entering else {
                let value = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(r, &b)| cost[b] * self.rhs(r))
                    .sum();
                return Ok(value);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.iterations += 1;
            if self.iterations > ITERATION_CAP {
                return Err(Error::SolverStalled {
                    iterations: self.iterations,
                });
            }
            self.pivot(row, col);
        }
    }
}

/// Maximises `objective . x` subject to `eq` rows, `le` rows and `x >= 0`.
pub fn lp_solve(objective: &[f64], eq: &[Constraint], le: &[Constraint]) -> Result<LpSolution> {
    let n = objective.len();
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::Parse(format!(
            "linear program needs 1..={MAX_VARIABLES} variables, got {n}"
        )));
    }
    if let Some(c) = eq.iter().chain(le).find(|c| c.coeffs.len() != n) {
        return Err(Error::Parse(format!(
            "constraint has {} coefficients, expected {n}",
            c.coeffs.len()
        )));
    }

    let rows_in: Vec<(RowKind, &Constraint)> = eq
        .iter()
        .map(|c| (RowKind::Eq, c))
        .chain(le.iter().map(|c| (RowKind::Le, c)))
        .collect();
    let m = rows_in.len();
    let n_slack = le.len();
    // Columns: originals, one slack per inequality, one artificial per row.
    let slack0 = n;
    let art0 = n + n_slack;
    let ncols = art0 + m;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack_idx = 0;
    for (r, (kind, c)) in rows_in.iter().enumerate() {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(&c.coeffs);
        row[ncols] = c.rhs;
        let mut slack_col = None;
        if *kind == RowKind::Le {
            row[slack0 + slack_idx] = 1.0;
            slack_col = Some(slack0 + slack_idx);
            slack_idx += 1;
        }
        let flipped = c.rhs < 0.0;
        if flipped {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        match slack_col {
            Some(s) if !flipped => basis.push(s),
            _ => {
                row[art0 + r] = 1.0;
                basis.push(art0 + r);
            }
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis,
        ncols,
        iterations: 0,
    };

    // Phase one: drive artificials to zero.
    let mut phase1_cost = vec![0.0; ncols];
    for c in phase1_cost.iter_mut().skip(art0) {
        *c = -1.0;
    }
    let any_artificial = tab.basis.iter().any(|&b| b >= art0);
    let mut infeasibility = 0.0;
    if any_artificial {
        let v = tab.optimize(&phase1_cost, &|_| true)?;
        infeasibility = -v;
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: vec![0.0; n],
                iterations: tab.iterations,
                infeasibility,
            });
        }
        // Pivot remaining artificials out of the basis or drop redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art0 {
                let col = (0..art0).find(|&j| tab.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => {
                        tab.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(objective);
    let objective_value = tab.optimize(&cost, &|j| j < art0)?;

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(r);
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: objective_value,
        x,
        iterations: tab.iterations,
        infeasibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_bounded_variable() {
        let sol = lp_solve(&[1.0], &[], &[Constraint::new(vec![1.0], 1.0)]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 1.0);
        assert_abs_diff_eq!(sol.x[0], 1.0);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let le = [
            Constraint::new(vec![1.0, 0.0], 4.0),
            Constraint::new(vec![0.0, 2.0], 12.0),
            Constraint::new(vec![3.0, 2.0], 18.0),
        ];
        let sol = lp_solve(&[3.0, 5.0], &[], &le).unwrap();
        assert_abs_diff_eq!(sol.objective, 36.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 6.0, epsilon = 1e-12);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // max -x - y with x + y = 2, -x <= -0.5 (x >= 0.5).
        let eq = [Constraint::new(vec![1.0, 1.0], 2.0)];
        let le = [Constraint::new(vec![-1.0, 0.0], -0.5)];
        let sol = lp_solve(&[-1.0, -1.0], &eq, &le).unwrap();
        assert_abs_diff_eq!(sol.objective, -2.0, epsilon = 1e-12);
        assert!(sol.x[0] >= 0.5 - 1e-12);
    }

    #[test]
    fn infeasible_system() {
        let eq = [
            Constraint::new(vec![1.0, 1.0], 1.0),
            Constraint::new(vec![1.0, 1.0], 2.0),
        ];
        let sol = lp_solve(&[0.0, 0.0], &eq, &[]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.infeasibility > 0.5);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let eq = [
            Constraint::new(vec![1.0, 1.0, 0.0], 1.0),
            Constraint::new(vec![2.0, 2.0, 0.0], 2.0),
            Constraint::new(vec![0.0, 0.0, 1.0], 0.25),
        ];
        let sol = lp_solve(&[1.0, 0.0, 1.0], &eq, &[]).unwrap();
        assert_abs_diff_eq!(sol.objective, 1.25, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        let le = [Constraint::new(vec![1.0, -1.0], 1.0)];
        assert!(matches!(
            lp_solve(&[1.0, 1.0], &[], &le),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example; Bland's rule must terminate at 0.05.
        let le = [
            Constraint::new(vec![0.25, -60.0, -0.04, 9.0], 0.0),
            Constraint::new(vec![0.5, -90.0, -0.02, 3.0], 0.0),
            Constraint::new(vec![0.0, 0.0, 1.0, 0.0], 1.0),
        ];
        let sol = lp_solve(&[0.75, -150.0, 0.02, -6.0], &[], &le).unwrap();
        assert_abs_diff_eq!(sol.objective, 0.05, epsilon = 1e-12);
    }

    #[test]
    fn size_limits() {
        assert!(lp_solve(&[], &[], &[]).is_err());
        assert!(lp_solve(&[1.0; 65], &[], &[]).is_err());
        assert!(lp_solve(&[1.0], &[Constraint::new(vec![1.0, 2.0], 1.0)], &[]).is_err());
    }
}
