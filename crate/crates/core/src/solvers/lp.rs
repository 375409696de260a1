//! Dense two-phase simplex for small linear programs.

use crate::MatrixError;

const TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `maximize c^T x` subject to `rows[k] . x (rel) rhs[k]` and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    width: usize,
    cells: Vec<f64>,
    basis: Vec<usize>,
    rows: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn pivot(&mut self, leave: usize, enter: usize) {
        let w = self.width;
        let p = self.at(leave, enter);
        for k in 0..w {
            self.cells[leave * w + k] /= p;
        }
        for r in 0..=self.rows {
            if r == leave {
                continue;
            }
            let f = self.at(r, enter);
            if f != 0.0 {
                for k in 0..w {
                    self.cells[r * w + k] -= f * self.cells[leave * w + k];
                }
            }
        }
        self.basis[leave] = enter;
    }

    /// Maximizes the objective row over columns `< limit` with Bland's rule.
    /// Returns false if unbounded.
    fn optimize(&mut self, limit: usize) -> Result<bool, MatrixError> {
        let rhs = self.width - 1;
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..limit).find(|&j| self.at(self.rows, j) < -TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a > TOL {
                    let ratio = self.at(r, rhs) / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - TOL
                                || (ratio <= best + TOL && self.basis[r] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(MatrixError::PivotLimit(MAX_PIVOTS))
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn constrain(&mut self, row: Vec<f64>, rel: Relation, rhs: f64) {
        self.rows.push((row, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpOutcome, MatrixError> {
        let n = self.objective.len();
        let m = self.rows.len();
        // normalize to nonnegative right-hand sides
        let rows: Vec<(Vec<f64>, Relation, f64)> = self
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let width = n + slacks + artificials + 1;
        let rhs = width - 1;
        let mut t = Tableau {
            width,
            cells: vec![0.0; (m + 1) * width],
            basis: vec![0; m],
            rows: m,
        };
        let (mut s, mut a) = (n, n + slacks);
        for (r, (coef, rel, b)) in rows.iter().enumerate() {
            t.cells[r * width..r * width + n].copy_from_slice(coef);
            t.cells[r * width + rhs] = *b;
            match rel {
                Relation::Le => {
                    t.cells[r * width + s] = 1.0;
                    t.basis[r] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t.cells[r * width + s] = -1.0;
                    s += 1;
                    t.cells[r * width + a] = 1.0;
                    t.basis[r] = a;
                    a += 1;
                }
                Relation::Eq => {
                    t.cells[r * width + a] = 1.0;
                    t.basis[r] = a;
                    a += 1;
                }
            }
        }
        if artificials > 0 {
            // phase one: maximize -sum(artificials), expressed over non-basic columns
            for r in 0..m {
                if t.basis[r] >= n + slacks {
                    for k in 0..width {
                        t.cells[m * width + k] -= t.cells[r * width + k];
                    }
                }
            }
            for k in n + slacks..rhs {
                t.cells[m * width + k] = 0.0;
            }
            t.optimize(n + slacks)?;
            if -t.at(m, rhs) > 1e-9 {
                return Ok(LpOutcome::Infeasible);
            }
            // drive remaining (zero-valued) artificials out of the basis where possible
            for r in 0..m {
                if t.basis[r] >= n + slacks {
                    if let Some(enter) = (0..n + slacks).find(|&j| t.at(r, j).abs() > 1e-9) {
                        t.pivot(r, enter);
                    }
                }
            }
        }
        for k in 0..width {
            t.cells[m * width + k] = 0.0;
        }
        for j in 0..n {
            t.cells[m * width + j] = -self.objective[j];
        }
        for r in 0..m {
            let b = t.basis[r];
            let f = t.at(m, b);
            if f != 0.0 {
                for k in 0..width {
                    t.cells[m * width + k] -= f * t.cells[r * width + k];
                }
            }
        }
        // artificial columns are never re-entered
        for r in 0..=m {
            for k in n + slacks..rhs {
                if t.basis.get(r).copied() != Some(k) {
                    t.cells[r * width + k] = 0.0;
                }
            }
        }
        if !t.optimize(n + slacks)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; n];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.at(r, rhs);
            }
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.constrain(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.constrain(vec![3.0, 2.0], Relation::Le, 18.0);
        let LpOutcome::Optimal { x, value } = lp.solve().unwrap() else {
            panic!()
        };
        assert!((value - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_constraints() {
        // min x + y (max -x - y)  s.t.  x + 2y >= 4, x - y = 1
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.constrain(vec![1.0, 2.0], Relation::Ge, 4.0);
        lp.constrain(vec![1.0, -1.0], Relation::Eq, 1.0);
        let LpOutcome::Optimal { x, value } = lp.solve().unwrap() else {
            panic!()
        };
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
        assert!((value + 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::Le, 1.0);
        lp.constrain(vec![1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.constrain(vec![-1.0, 1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }
}
