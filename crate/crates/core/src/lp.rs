//! Dense two-phase simplex for the small programs used throughout the crate.
//!
//! Callers describe a program with arbitrary variable bounds (including free
//! variables); internally everything is shifted, mirrored or split into
//! nonnegative columns and solved on a full tableau. Pricing is Dantzig's rule
//! with a permanent switch to Bland's rule once a run of degenerate pivots is
//! detected, which rules out cycling.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub const NONNEGATIVE: Bound = Bound {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const FREE: Bound = Bound {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, program has {expected} variables")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite coefficient in {0}")]
    NotFinite(String),
    #[error("variable {var} has empty bound range [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("numerical breakdown: {detail} (max residual {max_residual:e})")]
    NumericalBreakdown { detail: String, max_residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-10,
            feasibility_tol: 1e-8,
            optimality_tol: 1e-8,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective in the caller's sense; `NaN` when infeasible, `±inf` when unbounded.
    pub objective: f64,
    /// Empty unless optimal.
    pub x: Vec<f64>,
    /// Multiplier estimate per constraint row. Empty unless optimal.
    pub duals: Vec<f64>,
    /// `sum(duals * rhs)` plus the contribution of finite variable bounds.
    pub dual_objective: f64,
    /// Largest constraint or bound violation of `x`, recomputed from the input rows.
    pub max_residual: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    /// Nonnegative variables, no constraints.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bound::NONNEGATIVE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = Bound { lower, upper };
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch {
                row: usize::MAX,
                expected: n,
                found: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NotFinite("objective".into()));
        }
        for (row, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != n {
                return Err(LpError::DimensionMismatch {
                    row,
                    expected: n,
                    found: con.coeffs.len(),
                });
            }
            if con.coeffs.iter().any(|v| !v.is_finite()) || !con.rhs.is_finite() {
                return Err(LpError::NotFinite(format!("constraint {row}")));
            }
        }
        for (var, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan()
                || b.upper.is_nan()
                || b.lower > b.upper
                || b.lower == f64::INFINITY
                || b.upper == f64::NEG_INFINITY
            {
                return Err(LpError::InvalidBounds {
                    var,
                    lower: b.lower,
                    upper: b.upper,
                });
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for con in &self.constraints {
            let lhs: f64 = con.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let viol = match con.relation {
                Relation::Le => lhs - con.rhs,
                Relation::Ge => con.rhs - lhs,
                Relation::Eq => (lhs - con.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for (b, v) in self.bounds.iter().zip(x) {
            worst = worst.max(b.lower - v).max(v - b.upper);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Multiplies every row by a positive factor; the optimum is unchanged.
    pub fn scaled_rows(&self, factors: &[f64]) -> Self {
        let mut out = self.clone();
        for (con, &s) in out.constraints.iter_mut().zip(factors) {
            assert!(s > 0.0, "row scale factors must be positive");
            con.coeffs.iter_mut().for_each(|v| *v *= s);
            con.rhs *= s;
        }
        out
    }

    /// CPLEX LP text, for cross-checking against external solvers.
    pub fn to_lp_format(&self) -> String {
        fn term(out: &mut String, coef: f64, var: usize, first: &mut bool) {
            if coef == 0.0 {
                return;
            }
            let sign = if coef < 0.0 { "-" } else if *first { "" } else { "+" };
            let _ = write!(out, " {sign} {:.17e} x{var}", coef.abs());
            *first = false;
        }
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Minimize => "Minimize\n obj:",
            Sense::Maximize => "Maximize\n obj:",
        });
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            term(&mut out, c, j, &mut first);
        }
        if first {
            out.push_str(" 0 x0");
        }
        out.push_str("\nSubject To\n");
        for (i, con) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            let mut first = true;
            for (j, &a) in con.coeffs.iter().enumerate() {
                term(&mut out, a, j, &mut first);
            }
            if first {
                out.push_str(" 0 x0");
            }
            let rel = match con.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {:.17e}", con.rhs);
        }
        out.push_str("Bounds\n");
        for (j, b) in self.bounds.iter().enumerate() {
            match (b.lower.is_finite(), b.upper.is_finite()) {
                (false, false) => {
                    let _ = writeln!(out, " x{j} free");
                }
                (true, false) => {
                    let _ = writeln!(out, " x{j} >= {:.17e}", b.lower);
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= x{j} <= {:.17e}", b.upper);
                }
                (true, true) => {
                    let _ = writeln!(out, " {:.17e} <= x{j} <= {:.17e}", b.lower, b.upper);
                }
            }
        }
        out.push_str("End\n");
        out
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.solve_with(&SolverOptions::default())
    }

    pub fn solve_with(&self, opts: &SolverOptions) -> Result<LpSolution, LpError> {
        self.validate()?;
        let std = StandardForm::build(self);
        let mut tab = Tableau::new(&std);
        let mut iterations = 0;

        // Phase I: drive the artificial columns to zero.
        if tab.num_artificial > 0 {
            let costs: Vec<f64> = (0..tab.cols)
                .map(|j| if tab.is_artificial(j) { 1.0 } else { 0.0 })
                .collect();
            let allowed = vec![true; tab.cols];
            let outcome = tab.optimize(&costs, &allowed, opts, &mut iterations)?;
            debug_assert!(outcome != PhaseOutcome::Unbounded);
            let infeasibility = tab.objective_value(&costs);
            let scale = std.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if infeasibility > opts.feasibility_tol * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    x: Vec::new(),
                    duals: Vec::new(),
                    dual_objective: f64::NAN,
                    max_residual: f64::NAN,
                    iterations,
                });
            }
            tab.evict_artificials(opts);
        }

        // Phase II.
        let mut costs = vec![0.0; tab.cols];
        costs[..std.costs.len()].copy_from_slice(&std.costs);
        let allowed: Vec<bool> = (0..tab.cols).map(|j| !tab.is_artificial(j)).collect();
        if tab.optimize(&costs, &allowed, opts, &mut iterations)? == PhaseOutcome::Unbounded {
            let objective = match self.sense {
                Sense::Minimize => f64::NEG_INFINITY,
                Sense::Maximize => f64::INFINITY,
            };
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective,
                x: Vec::new(),
                duals: Vec::new(),
                dual_objective: f64::NAN,
                max_residual: f64::NAN,
                iterations,
            });
        }

        let z = tab.primal_values(std.costs.len());
        let x = std.recover(&z);
        let max_residual = self.max_violation(&x);
        if max_residual > opts.feasibility_tol {
            return Err(LpError::NumericalBreakdown {
                detail: format!("optimal basis reached after {iterations} pivots is infeasible on the input rows"),
                max_residual,
            });
        }
        let objective = self.objective_at(&x);

        let internal = tab.row_multipliers(&costs);
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut dual_internal = std.constant;
        for (i, y) in internal.iter().enumerate() {
            dual_internal += y * std.rhs[i];
        }
        let duals = internal[..self.constraints.len()]
            .iter()
            .zip(&std.row_sign)
            .map(|(y, s)| sign * y * s)
            .collect();

        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective,
            x,
            duals,
            dual_objective: sign * dual_internal,
            max_residual,
            iterations,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    Shifted { col: usize, lower: f64 },
    Mirrored { col: usize, upper: f64 },
    Split { pos: usize, neg: usize },
}

/// `min costs.z + constant` s.t. rows (with `rhs >= 0`), `z >= 0`.
struct StandardForm {
    costs: Vec<f64>,
    constant: f64,
    rows: Vec<Vec<f64>>,
    relations: Vec<Relation>,
    rhs: Vec<f64>,
    /// -1 where the row was negated to make its right-hand side nonnegative.
    row_sign: Vec<f64>,
    map: Vec<ColumnMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let obj_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut cols = 0;
        for b in &lp.bounds {
            let m = if b.lower.is_finite() {
                ColumnMap::Shifted {
                    col: cols,
                    lower: b.lower,
                }
            } else if b.upper.is_finite() {
                ColumnMap::Mirrored {
                    col: cols,
                    upper: b.upper,
                }
            } else {
                cols += 1;
                ColumnMap::Split {
                    pos: cols - 1,
                    neg: cols,
                }
            };
            cols += 1;
            map.push(m);
        }

        let mut costs = vec![0.0; cols];
        let mut constant = 0.0;
        for (j, &c) in lp.objective.iter().enumerate() {
            let c = obj_sign * c;
            match map[j] {
                ColumnMap::Shifted { col, lower } => {
                    costs[col] += c;
                    constant += c * lower;
                }
                ColumnMap::Mirrored { col, upper } => {
                    costs[col] -= c;
                    constant += c * upper;
                }
                ColumnMap::Split { pos, neg } => {
                    costs[pos] += c;
                    costs[neg] -= c;
                }
            }
        }

        let mut rows = Vec::new();
        let mut relations = Vec::new();
        let mut rhs = Vec::new();
        for con in &lp.constraints {
            let mut row = vec![0.0; cols];
            let mut b = con.rhs;
            for (j, &a) in con.coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match map[j] {
                    ColumnMap::Shifted { col, lower } => {
                        row[col] += a;
                        b -= a * lower;
                    }
                    ColumnMap::Mirrored { col, upper } => {
                        row[col] -= a;
                        b -= a * upper;
                    }
                    ColumnMap::Split { pos, neg } => {
                        row[pos] += a;
                        row[neg] -= a;
                    }
                }
            }
            rows.push(row);
            relations.push(con.relation);
            rhs.push(b);
        }
        for (j, bound) in lp.bounds.iter().enumerate() {
            if let ColumnMap::Shifted { col, lower } = map[j] {
                if bound.upper.is_finite() {
                    let mut row = vec![0.0; cols];
                    row[col] = 1.0;
                    rows.push(row);
                    relations.push(Relation::Le);
                    rhs.push(bound.upper - lower);
                }
            }
        }

        let mut row_sign = vec![1.0; rows.len()];
        for i in 0..rows.len() {
            if rhs[i] < 0.0 {
                rows[i].iter_mut().for_each(|v| *v = -*v);
                rhs[i] = -rhs[i];
                relations[i] = match relations[i] {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                row_sign[i] = -1.0;
            }
        }

        Self {
            costs,
            constant,
            rows,
            relations,
            rhs,
            row_sign,
            map,
        }
    }

    fn recover(&self, z: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .map(|m| match *m {
                ColumnMap::Shifted { col, lower } => lower + z[col],
                ColumnMap::Mirrored { col, upper } => upper - z[col],
                ColumnMap::Split { pos, neg } => z[pos] - z[neg],
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Column holding `e_i` in the original system, per row.
    unit_col: Vec<usize>,
    first_artificial: usize,
    num_artificial: usize,
}

impl Tableau {
    fn new(std: &StandardForm) -> Self {
        let m = std.rows.len();
        let k = std.costs.len();
        let num_slack = std
            .relations
            .iter()
            .filter(|r| **r != Relation::Eq)
            .count();
        let num_artificial = std
            .relations
            .iter()
            .filter(|r| **r != Relation::Le)
            .count();
        let first_artificial = k + num_slack;
        let cols = first_artificial + num_artificial;
        let mut data = vec![0.0; m * cols];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        let mut slack = k;
        let mut artificial = first_artificial;
        for i in 0..m {
            data[i * cols..i * cols + k].copy_from_slice(&std.rows[i]);
            match std.relations[i] {
                Relation::Le => {
                    data[i * cols + slack] = 1.0;
                    basis[i] = slack;
                    unit_col[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    data[i * cols + slack] = -1.0;
                    slack += 1;
                    data[i * cols + artificial] = 1.0;
                    basis[i] = artificial;
                    unit_col[i] = artificial;
                    artificial += 1;
                }
                Relation::Eq => {
                    data[i * cols + artificial] = 1.0;
                    basis[i] = artificial;
                    unit_col[i] = artificial;
                    artificial += 1;
                }
            }
        }
        Self {
            rows: m,
            cols,
            data,
            rhs: std.rhs.clone(),
            basis,
            unit_col,
            first_artificial,
            num_artificial,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn objective_value(&self, costs: &[f64]) -> f64 {
        (0..self.rows).map(|i| costs[self.basis[i]] * self.rhs[i]).sum()
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut d = costs.to_vec();
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (dj, a) in d.iter_mut().zip(row) {
                *dj -= cb * a;
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        d
    }

    fn pivot(&mut self, r: usize, e: usize, reduced: &mut [f64]) {
        let cols = self.cols;
        let p = self.data[r * cols + e];
        for v in &mut self.data[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.data[r * cols + e] = 1.0;
        let pivot_row: Vec<f64> = self.data[r * cols..(r + 1) * cols].to_vec();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let factor = self.data[i * cols + e];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[i * cols..(i + 1) * cols];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            row[e] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -1e-13 {
                self.rhs[i] = 0.0;
            }
        }
        let factor = reduced[e];
        if factor != 0.0 {
            for (d, pv) in reduced.iter_mut().zip(&pivot_row) {
                *d -= factor * pv;
            }
            reduced[e] = 0.0;
        }
        self.basis[r] = e;
    }

    fn optimize(
        &mut self,
        costs: &[f64],
        allowed: &[bool],
        opts: &SolverOptions,
        iterations: &mut usize,
    ) -> Result<PhaseOutcome, LpError> {
        let mut reduced = self.reduced_costs(costs);
        let mut bland = false;
        let mut degenerate_run = 0usize;
        let stall_limit = 50 + self.rows;
        loop {
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && reduced[j] < -opts.optimality_tol)
            } else {
                let mut best = None;
                let mut best_val = -opts.optimality_tol;
                for j in 0..self.cols {
                    if allowed[j] && reduced[j] < best_val {
                        best_val = reduced[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else {
                // Confirm optimality against freshly computed reduced costs.
                let fresh = self.reduced_costs(costs);
                if (0..self.cols).any(|j| allowed[j] && fresh[j] < -opts.optimality_tol) {
                    reduced = fresh;
                    continue;
                }
                return Ok(PhaseOutcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, e);
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie {
                            Some((i, ratio))
                        } else if tie && self.basis[i] < self.basis[r] {
                            Some((i, best.min(ratio)))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };

            *iterations += 1;
            if *iterations > opts.max_iterations {
                return Err(LpError::IterationLimit(opts.max_iterations));
            }
            if step <= 1e-14 {
                degenerate_run += 1;
                if degenerate_run > stall_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, e, &mut reduced);
        }
    }

    /// Pivots basic artificial columns out wherever a structural or slack
    /// column can replace them. Rows with no such column are redundant.
    fn evict_artificials(&mut self, opts: &SolverOptions) {
        let mut scratch = vec![0.0; self.cols];
        for r in 0..self.rows {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|&j| self.at(r, j).abs() > opts.pivot_tol)
                .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()));
            if let Some(e) = replacement {
                self.pivot(r, e, &mut scratch);
            }
        }
    }

    fn primal_values(&self, structural: usize) -> Vec<f64> {
        let mut z = vec![0.0; structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < structural {
                z[b] = self.rhs[i].max(0.0);
            }
        }
        z
    }

    /// `c_B^T B^{-1}` read off the columns that started as the identity.
    fn row_multipliers(&self, costs: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let u = self.unit_col[i];
                (0..self.rows)
                    .map(|k| costs[self.basis[k]] * self.at(k, u))
                    .sum()
            })
            .collect()
    }
}

/// Primal solution together with the objective of the dual program recovered
/// from the simplex multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub primal: LpSolution,
    pub dual_objective: f64,
}

impl DualPair {
    pub fn gap(&self) -> f64 {
        (self.primal.objective - self.dual_objective).abs()
    }
}

pub fn solve_dual_pair(primal: &LinearProgram) -> crate::error::Result<DualPair> {
    let sol = primal.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(crate::error::Error::LpStatus(sol.status));
    }
    let dual_objective = sol.dual_objective;
    Ok(DualPair {
        primal: sol,
        dual_objective,
    })
}
