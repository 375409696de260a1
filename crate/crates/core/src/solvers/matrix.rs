use super::lp::{LinearProgram, LpOutcome, Relation};
use crate::MatrixError;

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// Zero-sum matrix game; entries are the row player's payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let rows = payoff.len();
        let cols = payoff.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if payoff.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Ragged);
        }
        let data: Vec<f64> = payoff.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(MatrixGame { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, MatrixError> {
        Self::new(
            (0..rows)
                .map(|i| (0..cols).map(|j| f(i, j)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Row player's expected payoff `x^T M y`.
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.rows)
            .map(|i| x[i] * (0..self.cols).map(|j| self.get(i, j) * y[j]).sum::<f64>())
            .sum()
    }

    /// `max_i (M y)_i - min_j (x^T M)_j`: how far `(x, y)` is from a saddle point.
    pub fn exploitability(&self, x: &[f64], y: &[f64]) -> f64 {
        let best_row = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * y[j]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let best_col = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| x[i] * self.get(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        best_row - best_col
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSolution {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
    pub value: f64,
}

fn clean(v: &mut [f64]) {
    v.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
}

/// Exact minimax solution by the simplex method.
///
/// The payoffs are shifted to be positive, the column player's problem
/// `max 1^T u  s.t.  M u <= 1, u >= 0` is solved with Bland's pivoting rule, and the row
/// strategy is read off the optimal duals.
pub fn solve_matrix_lp(m: &MatrixGame) -> Result<MatrixSolution, MatrixError> {
    let (r, c) = (m.rows, m.cols);
    let min = m.data.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let width = c + r + 1;
    let rhs = width - 1;
    let mut t = vec![0.0; (r + 1) * width];
    for i in 0..r {
        for j in 0..c {
            t[i * width + j] = m.get(i, j) + shift;
        }
        t[i * width + c + i] = 1.0;
        t[i * width + rhs] = 1.0;
    }
    for j in 0..c {
        t[r * width + j] = -1.0;
    }
    let mut basis: Vec<usize> = (c..c + r).collect();

    let mut pivots = 0;
    loop {
        let Some(enter) = (0..rhs).find(|&j| t[r * width + j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..r {
            let a = t[i * width + enter];
            if a > PIVOT_TOL {
                let ratio = t[i * width + rhs] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - PIVOT_TOL
                            || (ratio <= best + PIVOT_TOL && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio.min(best);
                    leave = Some(i);
                }
            }
        }
        // the feasible region is bounded (all entries positive), so some row qualifies
        let leave = leave.expect("bounded LP");
        let p = t[leave * width + enter];
        for k in 0..width {
            t[leave * width + k] /= p;
        }
        for i in 0..=r {
            if i == leave {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for k in 0..width {
                    t[i * width + k] -= f * t[leave * width + k];
                }
            }
        }
        basis[leave] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(MatrixError::PivotLimit(MAX_PIVOTS));
        }
    }

    let mut col = vec![0.0; c];
    for (i, &b) in basis.iter().enumerate() {
        if b < c {
            col[b] = t[i * width + rhs];
        }
    }
    let mut row: Vec<f64> = (0..r).map(|i| t[r * width + c + i]).collect();
    clean(&mut col);
    clean(&mut row);
    let value = m.value(&row, &col);
    Ok(MatrixSolution { row, col, value })
}

/// Equilibrium at the analytic center of each player's optimal-strategy set, the
/// point interior-point LP solvers converge to. Unlike [`solve_matrix_lp`], which
/// returns a vertex, every strategy used by some equilibrium gets positive weight,
/// and strategies that are interchangeable get equal weight.
///
/// Optimal sets are relaxed by `1e-9` times the payoff scale for numerical slack.
pub fn solve_matrix_lp_central(m: &MatrixGame) -> Result<MatrixSolution, MatrixError> {
    let vertex = solve_matrix_lp(m)?;
    let scale = m.data.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let relax = 1e-9 * scale;
    // row player: x^T M_j - v >= -relax for every column j
    let rows: Vec<Vec<f64>> = (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m.get(i, j)).collect())
        .collect();
    let row = analytic_center(&rows, vertex.value - relax, &vertex.row, scale)?;
    // column player: v - M_i y >= -relax for every row i
    let cols: Vec<Vec<f64>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| -m.get(i, j)).collect())
        .collect();
    let col = analytic_center(&cols, -vertex.value - relax, &vertex.col, scale)?;
    let value = m.value(&row, &col);
    Ok(MatrixSolution { row, col, value })
}

/// Analytic center of `{x in simplex : a_j . x >= bound for all j}`.
///
/// The face's support and loose constraints are found exactly by repeatedly
/// maximizing, over the set, the sum of coordinates and slacks not yet seen
/// positive. The average of those maximizers is relatively interior; Newton steps
/// within the face then move it to the center.
fn analytic_center(
    constraints: &[Vec<f64>],
    bound: f64,
    start: &[f64],
    scale: f64,
) -> Result<Vec<f64>, MatrixError> {
    let n = start.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let pin = 1e-7;
    let mut lp = LinearProgram::new(vec![0.0; n]);
    for a in constraints {
        lp.constrain(a.clone(), Relation::Ge, bound);
    }
    lp.constrain(vec![1.0; n], Relation::Eq, 1.0);
    let slack = |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bound;

    let mut positive = vec![false; n];
    let mut loose = vec![false; constraints.len()];
    let mut points = vec![start.to_vec()];
    let mark = |x: &[f64], positive: &mut [bool], loose: &mut [bool]| {
        let mut grew = false;
        for i in 0..n {
            if !positive[i] && x[i] > pin {
                positive[i] = true;
                grew = true;
            }
        }
        for (j, a) in constraints.iter().enumerate() {
            if !loose[j] && slack(a, x) > pin * scale {
                loose[j] = true;
                grew = true;
            }
        }
        grew
    };
    mark(start, &mut positive, &mut loose);
    loop {
        let mut objective: Vec<f64> = positive
            .iter()
            .map(|&p| if p { 0.0 } else { 1.0 })
            .collect();
        for (a, _) in constraints.iter().zip(&loose).filter(|(_, &l)| !l) {
            objective
                .iter_mut()
                .zip(a)
                .for_each(|(o, v)| *o += v / scale);
        }
        lp.objective = objective;
        let LpOutcome::Optimal { x, .. } = lp.solve()? else {
            break;
        };
        if !mark(&x, &mut positive, &mut loose) {
            break;
        }
        points.push(x);
    }
    let support: Vec<usize> = (0..n).filter(|&i| positive[i]).collect();
    let mut x0: Vec<f64> = support
        .iter()
        .map(|&i| points.iter().map(|p| p[i]).sum::<f64>() / points.len() as f64)
        .collect();
    let total: f64 = x0.iter().sum();
    x0.iter_mut().for_each(|v| *v /= total);
    let mut eq = vec![vec![1.0; support.len()]];
    let mut ineq = Vec::new();
    for (a, &l) in constraints.iter().zip(&loose) {
        let reduced: Vec<f64> = support.iter().map(|&i| a[i]).collect();
        if l {
            ineq.push((reduced, bound));
        } else {
            eq.push(reduced);
        }
    }
    let idx: Vec<usize> = (0..support.len()).collect();
    let mut out = vec![0.0; n];
    let y = center_on(&idx, &mut eq, &ineq, x0.clone(), 100).unwrap_or(x0);
    support.iter().zip(y).for_each(|(&i, v)| out[i] = v);
    clean(&mut out);
    Ok(out)
}

/// Damped Newton on `-sum log x - sum log(a . x - b)` over `x + null(eq)`.
fn center_on(
    vars: &[usize],
    eq: &mut [Vec<f64>],
    ineq: &[(Vec<f64>, f64)],
    mut x: Vec<f64>,
    max_steps: usize,
) -> Option<Vec<f64>> {
    let n = vars.len();
    let null = null_space(eq, n);
    let k = null.len();
    let slacks = |x: &[f64]| -> Vec<f64> {
        ineq.iter()
            .map(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - b)
            .collect()
    };
    let barrier = |x: &[f64]| -> f64 {
        let s = slacks(x);
        if x.iter().chain(&s).any(|&v| v <= 0.0) {
            return f64::INFINITY;
        }
        -x.iter().chain(&s).map(|v| v.ln()).sum::<f64>()
    };
    if !barrier(&x).is_finite() {
        return None;
    }
    if k == 0 {
        return Some(x);
    }
    for _ in 0..max_steps {
        let s = slacks(&x);
        let mut grad: Vec<f64> = x.iter().map(|v| -1.0 / v).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            hess[i * n + i] = 1.0 / (x[i] * x[i]);
        }
        for ((a, _), &sj) in ineq.iter().zip(&s) {
            let w = 1.0 / (sj * sj);
            for i in 0..n {
                grad[i] -= a[i] / sj;
                if a[i] != 0.0 {
                    for c in 0..n {
                        hess[i * n + c] += w * a[i] * a[c];
                    }
                }
            }
        }
        // reduced system (N^T H N) w = -N^T g
        let hn: Vec<Vec<f64>> = null
            .iter()
            .map(|v| {
                (0..n)
                    .map(|i| (0..n).map(|c| hess[i * n + c] * v[c]).sum())
                    .collect()
            })
            .collect();
        let mut red = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for p in 0..k {
            for q in 0..k {
                red[p * k + q] = null[p].iter().zip(&hn[q]).map(|(a, b)| a * b).sum();
            }
            rhs[p] = -null[p].iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        }
        let w = solve_dense(red, rhs, k)?;
        let d: Vec<f64> = (0..n)
            .map(|i| (0..k).map(|p| w[p] * null[p][i]).sum())
            .collect();
        let decrement: f64 = -d.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        if !(decrement > 1e-16) {
            break;
        }
        let f0 = barrier(&x);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if barrier(&trial) <= f0 - 0.25 * t * decrement {
                x = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-14 {
                return Some(x);
            }
        }
    }
    let _ = vars;
    Some(x)
}

/// Orthonormal basis of the null space of the rows of `eq`.
fn null_space(eq: &mut [Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let project = |v: &mut Vec<f64>, basis: &[Vec<f64>]| {
        for b in basis {
            let dot: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            v.iter_mut().zip(b).for_each(|(p, q)| *p -= dot * q);
        }
        let norm = v.iter().map(|p| p * p).sum::<f64>().sqrt();
        norm
    };
    // row space first, then complete with unit vectors
    let mut rank = 0;
    for row in eq.iter() {
        let mut v = row.clone();
        let before = v.iter().map(|p| p * p).sum::<f64>().sqrt();
        let norm = project(&mut v, &basis);
        if norm > 1e-9 * before.max(1.0) {
            v.iter_mut().for_each(|p| *p /= norm);
            basis.push(v);
            rank += 1;
        }
    }
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let norm = project(&mut v, &basis);
        if norm > 1e-6 {
            v.iter_mut().for_each(|p| *p /= norm);
            basis.push(v);
        }
    }
    basis.split_off(rank)
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Fictitious play: both players repeatedly best-respond (lowest index on ties) to the
/// other's empirical play, starting from the first row and column.
pub fn solve_matrix_fp(m: &MatrixGame, iterations: usize) -> MatrixSolution {
    let (r, c) = (m.rows, m.cols);
    let mut row_counts = vec![0.0; r];
    let mut col_counts = vec![0.0; c];
    // cumulative payoffs of each pure row against the column history, and vice versa
    let mut row_payoff = vec![0.0; r];
    let mut col_payoff = vec![0.0; c];
    let (mut i, mut j) = (0, 0);
    for _ in 0..iterations.max(1) {
        row_counts[i] += 1.0;
        col_counts[j] += 1.0;
        for (k, p) in row_payoff.iter_mut().enumerate() {
            *p += m.get(k, j);
        }
        for (k, p) in col_payoff.iter_mut().enumerate() {
            *p += m.get(i, k);
        }
        i = argbest(&row_payoff, |a, b| a > b);
        j = argbest(&col_payoff, |a, b| a < b);
    }
    let n = iterations.max(1) as f64;
    row_counts.iter_mut().for_each(|x| *x /= n);
    col_counts.iter_mut().for_each(|x| *x /= n);
    let value = m.value(&row_counts, &col_counts);
    MatrixSolution {
        row: row_counts,
        col: col_counts,
        value,
    }
}

fn argbest(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for k in 1..v.len() {
        if better(v[k], v[best]) {
            best = k;
        }
    }
    best
}
