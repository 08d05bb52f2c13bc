//! Dense bounded-variable primal simplex.
//!
//! Solves `max c.x` subject to `var_lower <= x <= var_upper` and
//! `row.lower <= row.coeffs . x <= row.upper` for every row. Bounds may be
//! infinite. Each row gets a slack `s_i = a_i . x` carrying the row bounds
//! and an artificial variable that absorbs the initial residual. Phase one
//! drives the artificials to zero, phase two optimises the real objective.
//! Entering and leaving variables follow Bland's smallest-index rule, so
//! the pivot sequence (and the result) is a pure function of the input.

use thiserror::Error;

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

/// A linear constraint `lower <= coeffs . x <= upper`. Equality rows use
/// `lower == upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl Row {
    pub fn new(coeffs: Vec<f64>, lower: f64, upper: f64) -> Self {
        Row {
            coeffs,
            lower,
            upper,
        }
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Row::new(coeffs, rhs, rhs)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }
}

/// Maximisation problem over box-bounded variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.var_lower[j] - v).max(v - self.var_upper[j]);
        }
        for row in &self.rows {
            let a = row.activity(x);
            worst = worst.max(row.lower - a).max(a - row.upper);
        }
        worst
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return Err(LpError::Dimension(format!(
                "objective has {n} entries, bounds have {} and {}",
                self.var_lower.len(),
                self.var_upper.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed(
                "objective coefficient not finite".into(),
            ));
        }
        for j in 0..n {
            let (lo, hi) = (self.var_lower[j], self.var_upper[j]);
            if lo.is_nan()
                || hi.is_nan()
                || lo > hi
                || lo == f64::INFINITY
                || hi == f64::NEG_INFINITY
            {
                return Err(LpError::Malformed(format!(
                    "variable {j} has bounds [{lo}, {hi}]"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Dimension(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(LpError::Malformed(format!(
                    "row {i} has a non-finite coefficient"
                )));
            }
            let (lo, hi) = (row.lower, row.upper);
            if lo.is_nan()
                || hi.is_nan()
                || lo > hi
                || lo == f64::INFINITY
                || hi == f64::NEG_INFINITY
            {
                return Err(LpError::Malformed(format!(
                    "row {i} has bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal values when `status` is `Optimal`; otherwise the last iterate.
    pub values: Vec<f64>,
    pub objective_value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("pivot limit reached")]
    PivotLimit,
    #[error("numerical breakdown in phase one")]
    Numerical,
}

/// Solves `problem`. Infeasibility and unboundedness are reported through
/// [`LpSolution::status`]; only malformed input is an error.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.check()?;
    let mut tab = Tableau::new(problem);

    let phase_one: Vec<f64> = (0..tab.cols)
        .map(|j| if tab.is_artificial(j) { -1.0 } else { 0.0 })
        .collect();
    if tab.optimise(&phase_one)? == Outcome::Unbounded {
        // The phase-one objective is bounded above by zero.
        return Err(LpError::Numerical);
    }
    tab.refresh_basics();
    let residual: f64 = (0..tab.m).map(|i| tab.x[tab.art(i)]).sum();
    if residual > tab.feas_tol {
        let values = tab.x[..tab.n].to_vec();
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective_value: dot(&problem.objective, &values),
            values,
        });
    }
    tab.pin_artificials();

    let mut phase_two = vec![0.0; tab.cols];
    phase_two[..tab.n].copy_from_slice(&problem.objective);
    let outcome = tab.optimise(&phase_two)?;
    tab.refresh_basics();
    let values = tab.x[..tab.n].to_vec();
    Ok(LpSolution {
        status: match outcome {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Unbounded => LpStatus::Unbounded,
        },
        objective_value: dot(&problem.objective, &values),
        values,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

/// Column layout: `n` structural, then `m` slacks, then `m` artificials.
/// Row `i` reads `a_i . x - s_i + d_i * art_i = 0` with `d_i = +-1`.
struct Tableau {
    n: usize,
    m: usize,
    cols: usize,
    /// Original constraint matrix, `m x cols`, row-major.
    orig: Vec<f64>,
    /// `B^-1 * orig`, row-major.
    t: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    /// Row a basic column sits in, or `usize::MAX` when nonbasic.
    row_of: Vec<usize>,
    feas_tol: f64,
}

impl Tableau {
    fn new(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.rows.len();
        let cols = n + 2 * m;
        let mut lo = Vec::with_capacity(cols);
        let mut hi = Vec::with_capacity(cols);
        lo.extend_from_slice(&p.var_lower);
        hi.extend_from_slice(&p.var_upper);
        for row in &p.rows {
            lo.push(row.lower);
            hi.push(row.upper);
        }
        for _ in 0..m {
            lo.push(0.0);
            hi.push(f64::INFINITY);
        }

        let mut x = vec![0.0; cols];
        for j in 0..n {
            x[j] = start_value(lo[j], hi[j]);
        }

        let mut orig = vec![0.0; m * cols];
        let mut scale: f64 = 1.0;
        for (i, row) in p.rows.iter().enumerate() {
            let activity = row.activity(&x[..n]);
            let slack = activity.clamp(row.lower, row.upper);
            let residual = activity - slack;
            let d = if residual > 0.0 { -1.0 } else { 1.0 };
            x[n + i] = slack;
            x[n + m + i] = residual.abs();
            let r = &mut orig[i * cols..(i + 1) * cols];
            r[..n].copy_from_slice(&row.coeffs);
            r[n + i] = -1.0;
            r[n + m + i] = d;
            for v in [row.lower, row.upper] {
                if v.is_finite() {
                    scale = scale.max(v.abs());
                }
            }
        }
        for j in 0..n {
            for v in [lo[j], hi[j]] {
                if v.is_finite() {
                    scale = scale.max(v.abs());
                }
            }
        }

        // Initial basis is the artificials; B = diag(d) is its own inverse.
        let mut t = orig.clone();
        for i in 0..m {
            let d = orig[i * cols + n + m + i];
            for v in &mut t[i * cols..(i + 1) * cols] {
                *v *= d;
            }
        }
        let basis: Vec<usize> = (0..m).map(|i| n + m + i).collect();
        let mut row_of = vec![usize::MAX; cols];
        for (i, &b) in basis.iter().enumerate() {
            row_of[b] = i;
        }

        Tableau {
            n,
            m,
            cols,
            orig,
            t,
            lo,
            hi,
            x,
            basis,
            row_of,
            feas_tol: 1e-9 * scale,
        }
    }

    fn art(&self, i: usize) -> usize {
        self.n + self.m + i
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn is_basic(&self, j: usize) -> bool {
        self.row_of[j] != usize::MAX
    }

    /// After phase one: artificials may no longer move off zero.
    fn pin_artificials(&mut self) {
        for i in 0..self.m {
            let a = self.art(i);
            self.hi[a] = 0.0;
            if !self.is_basic(a) {
                self.x[a] = 0.0;
            }
        }
        self.refresh_basics();
    }

    fn optimise(&mut self, cost: &[f64]) -> Result<Outcome, LpError> {
        for _ in 0..MAX_PIVOTS {
            let Some((enter, dir)) = self.entering(cost) else {
                return Ok(Outcome::Optimal);
            };
            if !self.step(enter, dir) {
                return Ok(Outcome::Unbounded);
            }
        }
        Err(LpError::PivotLimit)
    }

    /// Smallest-index nonbasic column whose move improves the objective.
    fn entering(&self, cost: &[f64]) -> Option<(usize, f64)> {
        let cols = self.cols;
        for j in 0..cols {
            if self.is_basic(j) {
                continue;
            }
            let mut d = cost[j];
            for (i, &b) in self.basis.iter().enumerate() {
                let cb = cost[b];
                if cb != 0.0 {
                    d -= cb * self.t[i * cols + j];
                }
            }
            if d > COST_TOL && self.x[j] < self.hi[j] {
                return Some((j, 1.0));
            }
            if d < -COST_TOL && self.x[j] > self.lo[j] {
                return Some((j, -1.0));
            }
        }
        None
    }

    /// Moves `enter` in direction `dir` as far as the ratio test allows.
    /// Returns false when nothing blocks the move.
    fn step(&mut self, enter: usize, dir: f64) -> bool {
        let cols = self.cols;
        let own_limit = if dir > 0.0 {
            self.hi[enter] - self.x[enter]
        } else {
            self.x[enter] - self.lo[enter]
        };

        let mut best_t = f64::INFINITY;
        let mut best_row: Option<usize> = None;
        for i in 0..self.m {
            let alpha = self.t[i * cols + enter];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * alpha;
            let limit = if rate < 0.0 {
                if self.lo[b] == f64::NEG_INFINITY {
                    continue;
                }
                ((self.x[b] - self.lo[b]) / -rate).max(0.0)
            } else {
                if self.hi[b] == f64::INFINITY {
                    continue;
                }
                ((self.hi[b] - self.x[b]) / rate).max(0.0)
            };
            let better = match best_row {
                None => true,
                Some(r) => limit < best_t - 1e-12 || (limit <= best_t + 1e-12 && b < self.basis[r]),
            };
            if better {
                best_t = limit;
                best_row = Some(i);
            }
        }

        if own_limit <= best_t {
            if own_limit == f64::INFINITY {
                return false;
            }
            self.advance(enter, dir, own_limit);
            self.x[enter] = if dir > 0.0 {
                self.hi[enter]
            } else {
                self.lo[enter]
            };
            return true;
        }

        let r = best_row.expect("finite ratio implies a blocking row");
        let leaving = self.basis[r];
        let rate = -dir * self.t[r * cols + enter];
        self.advance(enter, dir, best_t);
        self.x[leaving] = if rate < 0.0 {
            self.lo[leaving]
        } else {
            self.hi[leaving]
        };
        self.pivot(r, enter);
        true
    }

    fn advance(&mut self, enter: usize, dir: f64, t: f64) {
        if t == 0.0 {
            return;
        }
        let cols = self.cols;
        self.x[enter] += dir * t;
        for i in 0..self.m {
            let alpha = self.t[i * cols + enter];
            if alpha != 0.0 {
                self.x[self.basis[i]] -= dir * alpha * t;
            }
        }
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + enter];
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        self.t[r * cols + enter] = 1.0;
        let pivot_row: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + enter];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[enter] = 0.0;
        }
        let leaving = self.basis[r];
        self.row_of[leaving] = usize::MAX;
        self.basis[r] = enter;
        self.row_of[enter] = r;
    }

    /// Recomputes basic values from the nonbasic ones by solving
    /// `B x_B = -N x_N` against the original columns.
    fn refresh_basics(&mut self) {
        let m = self.m;
        let cols = self.cols;
        if m == 0 {
            return;
        }
        let mut a = vec![0.0; m * (m + 1)];
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                a[i * (m + 1) + k] = self.orig[i * cols + b];
            }
            let mut rhs = 0.0;
            for j in 0..cols {
                if !self.is_basic(j) {
                    let c = self.orig[i * cols + j];
                    if c != 0.0 {
                        rhs -= c * self.x[j];
                    }
                }
            }
            a[i * (m + 1) + m] = rhs;
        }
        if let Some(sol) = gauss_solve(&mut a, m) {
            for (k, &b) in self.basis.iter().enumerate() {
                self.x[b] = sol[k];
            }
        }
    }
}

fn start_value(lo: f64, hi: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    }
}

/// Solves an `m x m` system stored as an augmented row-major matrix.
fn gauss_solve(a: &mut [f64], m: usize) -> Option<Vec<f64>> {
    let w = m + 1;
    for col in 0..m {
        let piv = (col..m).max_by(|&p, &q| {
            a[p * w + col]
                .abs()
                .partial_cmp(&a[q * w + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv * w + col].abs() < 1e-14 {
            return None;
        }
        if piv != col {
            for k in 0..w {
                a.swap(piv * w + k, col * w + k);
            }
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * w + col] / a[col * w + col];
            if f == 0.0 {
                continue;
            }
            for k in col..w {
                a[r * w + k] -= f * a[col * w + k];
            }
        }
    }
    Some((0..m).map(|i| a[i * w + m] / a[i * w + i]).collect())
}
