//! Price-of-anarchy programs.
//!
//! A game with `n` players is summarized by `theta(a, x, b)`: the total value
//! of resources used by `a` players only at equilibrium, `b` players only at
//! the optimum and `x` players in both. Minimizing the optimal cost over all
//! such summaries with unit equilibrium cost gives `C*`, and `PoA = 1/C*`.
//! The two-variable dual of that program (over the boundary triples only) is
//! the reference method; every other route is cross-checked against it.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cost_model::{
    is_dominated_by_mc, is_fc_nondecreasing, weighted_share, CostFunction, DistributionRule,
    PREDICATE_TOL,
};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, Sense};

/// Agreement required between the linear-programming routes.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Largest `n` for which [`cross_validate`] also solves the primal and the
/// dual over the full index set.
pub const FULL_PROGRAM_MAX_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexTriple {
    pub a: usize,
    pub x: usize,
    pub b: usize,
}

impl IndexTriple {
    pub const fn new(a: usize, x: usize, b: usize) -> Self {
        Self { a, x, b }
    }

    pub fn sum(&self) -> usize {
        self.a + self.x + self.b
    }

    /// Load at equilibrium, `a + x`.
    pub fn ne_load(&self) -> usize {
        self.a + self.x
    }

    /// Load at the optimum, `b + x`.
    pub fn opt_load(&self) -> usize {
        self.b + self.x
    }

    pub fn is_boundary(&self, n: usize) -> bool {
        self.a == 0 || self.x == 0 || self.b == 0 || self.sum() == n
    }

    /// `1{b+x >= 1} c(b+x)`.
    pub fn opt_cost(&self, c: &CostFunction) -> f64 {
        if self.opt_load() >= 1 {
            c.value(self.opt_load())
        } else {
            0.0
        }
    }

    /// `1{a+x >= 1} c(a+x)`.
    pub fn ne_cost(&self, c: &CostFunction) -> f64 {
        if self.ne_load() >= 1 {
            c.value(self.ne_load())
        } else {
            0.0
        }
    }

    /// `a f(a+x) c(a+x) - b f(a+x+1) c(a+x+1)`, the equilibrium-condition coefficient.
    pub fn equilibrium_coeff(&self, f: &DistributionRule, c: &CostFunction) -> f64 {
        weighted_share(self.a, f, c, self.ne_load())
            - weighted_share(self.b, f, c, self.ne_load() + 1)
    }
}

/// All triples with `1 <= a + x + b <= n`, lexicographic in `(a, x, b)`.
pub fn index_set(n: usize) -> Vec<IndexTriple> {
    let mut out = Vec::new();
    for a in 0..=n {
        for x in 0..=n - a {
            for b in 0..=n - a - x {
                if a + x + b >= 1 {
                    out.push(IndexTriple::new(a, x, b));
                }
            }
        }
    }
    out
}

/// Triples on the boundary of the index set: `a x b = 0` or `a + x + b = n`.
pub fn boundary_index_set(n: usize) -> Vec<IndexTriple> {
    index_set(n)
        .into_iter()
        .filter(|t| t.is_boundary(n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    #[serde(flatten)]
    pub triple: IndexTriple,
    pub theta: f64,
}

/// Sparse `theta`, sorted by triple.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaParam {
    pub entries: Vec<ThetaEntry>,
}

impl ThetaParam {
    pub fn new(mut entries: Vec<ThetaEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.triple);
        for w in entries.windows(2) {
            if w[0].triple == w[1].triple {
                return Err(Error::InvalidTheta(format!("duplicate triple {:?}", w[0].triple)));
            }
        }
        for e in &entries {
            if !(e.theta.is_finite() && e.theta >= 0.0) {
                return Err(Error::InvalidTheta(format!(
                    "theta{:?} = {} is not a nonnegative number",
                    e.triple, e.theta
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Dense vector in [`index_set`] order.
    pub fn to_dense(&self, n: usize) -> Result<Vec<f64>> {
        let triples = index_set(n);
        let mut dense = vec![0.0; triples.len()];
        for e in &self.entries {
            let pos = triples.binary_search(&e.triple).map_err(|_| {
                Error::InvalidTheta(format!("{:?} is not in the index set for n = {n}", e.triple))
            })?;
            dense[pos] = e.theta;
        }
        Ok(dense)
    }

    pub fn support(&self) -> impl Iterator<Item = &ThetaEntry> {
        self.entries.iter().filter(|e| e.theta > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Primal program over the full index set.
    Primal,
    /// Two-variable dual over the boundary triples (reference).
    Dual,
    /// Two-variable dual over every triple.
    DualFull,
    /// Dual restricted to the `(j, l)` grid for nondecreasing `f c`.
    Reduced,
    /// Direct minimization at the closed-form `lambda*`.
    ExplicitMin,
    /// Reduced program for convex nondecreasing costs, `lambda in [0, 1]`, `l <= j`.
    ConvexReduced,
    /// Printed closed form for the Shapley rule.
    PrintedClosedFormSv,
    /// Printed closed form for the marginal-contribution rule.
    PrintedClosedFormMc,
}

impl Method {
    pub fn is_lp(&self) -> bool {
        matches!(self, Method::Primal | Method::Dual | Method::DualFull | Method::Reduced)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Primal => "primal",
            Method::Dual => "dual",
            Method::DualFull => "dual-full",
            Method::Reduced => "reduced",
            Method::ExplicitMin => "explicit-min",
            Method::ConvexReduced => "convex-reduced",
            Method::PrintedClosedFormSv => "printed-closed-form-sv",
            Method::PrintedClosedFormMc => "printed-closed-form-mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoaResult {
    pub method: Method,
    pub c_star: f64,
    /// `1 / c_star`; absent when `c_star <= 0`, which only the printed
    /// closed forms can produce.
    pub poa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaParam>,
}

impl PoaResult {
    fn from_c_star(method: Method, c_star: f64) -> Self {
        Self {
            method,
            c_star,
            poa: (c_star > 0.0).then(|| 1.0 / c_star),
            lambda_star: None,
            mu_star: None,
            theta: None,
        }
    }
}

fn prepare(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<(CostFunction, DistributionRule)> {
    Ok((c.truncated(n)?, f.truncated(n)?))
}

fn optimal(sol: LpSolution) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        other => Err(Error::LpStatus(other)),
    }
}

/// `min sum 1{b+x>=1} c(b+x) theta` subject to the aggregated equilibrium
/// condition `sum e(a,x,b) theta <= 0` and unit equilibrium cost.
/// Variables follow [`index_set`] order.
pub fn build_primal(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<LinearProgram> {
    let (c, f) = prepare(c, f, n)?;
    let triples = index_set(n);
    let mut lp = LinearProgram::new(
        Sense::Minimize,
        triples.iter().map(|t| t.opt_cost(&c)).collect(),
    );
    lp.add_constraint(
        triples.iter().map(|t| t.equilibrium_coeff(&f, &c)).collect(),
        Relation::Le,
        0.0,
    );
    lp.add_constraint(
        triples.iter().map(|t| t.ne_cost(&c)).collect(),
        Relation::Eq,
        1.0,
    );
    Ok(lp)
}

pub fn compute_poa_primal(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    let lp = build_primal(c, f, n)?;
    let sol = optimal(lp.solve()?)?;
    let entries = index_set(n)
        .into_iter()
        .zip(&sol.x)
        .filter(|(_, &v)| v > 0.0)
        .map(|(triple, &theta)| ThetaEntry { triple, theta })
        .collect();
    let mut out = PoaResult::from_c_star(Method::Primal, sol.objective);
    out.theta = Some(ThetaParam::new(entries)?);
    Ok(out)
}

fn build_dual_over(triples: &[IndexTriple], c: &CostFunction, f: &DistributionRule) -> LinearProgram {
    // variables [lambda >= 0, mu free]
    let mut lp = LinearProgram::new(Sense::Maximize, vec![0.0, 1.0]);
    lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
    for t in triples {
        lp.add_constraint(
            vec![t.equilibrium_coeff(f, c), -t.ne_cost(c)],
            Relation::Ge,
            -t.opt_cost(c),
        );
    }
    lp
}

/// `max mu` over `lambda >= 0`, `mu` free, one row per boundary triple.
pub fn build_dual(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<LinearProgram> {
    let (c, f) = prepare(c, f, n)?;
    Ok(build_dual_over(&boundary_index_set(n), &c, &f))
}

/// Same as [`build_dual`] but with a row for every triple of the index set.
pub fn build_dual_full(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<LinearProgram> {
    let (c, f) = prepare(c, f, n)?;
    Ok(build_dual_over(&index_set(n), &c, &f))
}

fn solve_two_variable(method: Method, lp: &LinearProgram) -> Result<PoaResult> {
    let sol = optimal(lp.solve()?)?;
    let mut out = PoaResult::from_c_star(method, sol.objective);
    out.lambda_star = Some(sol.x[0]);
    out.mu_star = Some(sol.x[1]);
    Ok(out)
}

/// Reference price-of-anarchy computation.
pub fn compute_poa_dual(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    solve_two_variable(Method::Dual, &build_dual(c, f, n)?)
}

pub fn compute_poa_dual_full(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    solve_two_variable(Method::DualFull, &build_dual_full(c, f, n)?)
}

/// Dual on the `(j, l) in [0, n]^2`, `j + l >= 1` grid, valid when `f c` is
/// nondecreasing. Rows are lexicographic in `(j, l)`.
pub fn build_reduced_dual_nondecreasing(
    c: &CostFunction,
    f: &DistributionRule,
    n: usize,
) -> Result<LinearProgram> {
    let (c, f) = prepare(c, f, n)?;
    if !is_fc_nondecreasing(&f, &c)? {
        return Err(Error::Precondition("f(j)c(j) is not nondecreasing".into()));
    }
    let mut lp = LinearProgram::new(Sense::Maximize, vec![0.0, 1.0]);
    lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
    for j in 0..=n {
        for l in 0..=n {
            if j + l == 0 {
                continue;
            }
            let slope = if j + l <= n {
                weighted_share(j, &f, &c, j) - weighted_share(l, &f, &c, j + 1)
            } else {
                weighted_share(n - l, &f, &c, j) - weighted_share(n - j, &f, &c, j + 1)
            };
            lp.add_constraint(vec![slope, -c.value(j)], Relation::Ge, -c.value(l));
        }
    }
    Ok(lp)
}

pub fn compute_poa_reduced(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    solve_two_variable(Method::Reduced, &build_reduced_dual_nondecreasing(c, f, n)?)
}

/// `(1 / f(1)c(1)) min_l c(l)/l`, provided `f(j) <= f(1)c(1) max_l (l/c(l)) / j` for all `j`.
pub fn lambda_star_candidate(c: &CostFunction, f: &DistributionRule) -> Result<f64> {
    if c.n() != f.n() {
        return Err(Error::SizeMismatch {
            expected: c.n(),
            found: f.n(),
        });
    }
    let head = f.at(1) * c.value(1);
    if head <= 0.0 {
        return Err(Error::Precondition("f(1)c(1) must be positive".into()));
    }
    let n = c.n();
    let max_ratio = (1..=n)
        .map(|l| l as f64 / c.value(l))
        .fold(f64::NEG_INFINITY, f64::max);
    for j in 1..=n {
        let cap = head * max_ratio / j as f64;
        if f.at(j) > cap + PREDICATE_TOL {
            return Err(Error::Precondition(format!(
                "f({j}) = {} exceeds f(1)c(1) max_l(l/c(l)) / j = {cap}",
                f.at(j)
            )));
        }
    }
    let min_ratio = (1..=n)
        .map(|l| c.value(l) / l as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(min_ratio / head)
}

/// Evaluates the explicit two-case minimum at `lambda = lambda*` for
/// `j in 1..=n`, `l in 0..=n`, exactly as it is usually printed (the
/// `j + l > n` case keeps the factor `f(j)c(j)` undivided by `c(j)`).
///
/// This is an evaluator only; its value is compared against the dual and
/// never used as the price of anarchy on its own.
pub fn closed_form_explicit_min(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    let (c, f) = prepare(c, f, n)?;
    if !is_fc_nondecreasing(&f, &c)? {
        return Err(Error::Precondition("f(j)c(j) is not nondecreasing".into()));
    }
    let lambda = lambda_star_candidate(&c, &f)?;
    let mut best = f64::INFINITY;
    for j in 1..=n {
        let cj = c.value(j);
        for l in 0..=n {
            let value = if j + l <= n {
                c.value(l) / cj + lambda * (j as f64 * f.at(j) - weighted_share(l, &f, &c, j + 1) / cj)
            } else {
                c.value(l) / cj
                    + lambda * (weighted_share(n - l, &f, &c, j) - weighted_share(n - j, &f, &c, j + 1) / cj)
            };
            best = best.min(value);
        }
    }
    let mut out = PoaResult::from_c_star(Method::ExplicitMin, best);
    out.lambda_star = Some(lambda);
    out.mu_star = Some(best);
    Ok(out)
}

fn check_convex_preconditions(c: &CostFunction, f: &DistributionRule) -> Result<()> {
    if !c.is_convex_nondecreasing() {
        return Err(Error::Precondition("c is not convex nondecreasing".into()));
    }
    if !is_fc_nondecreasing(f, c)? {
        return Err(Error::Precondition("f(j)c(j) is not nondecreasing".into()));
    }
    if !is_dominated_by_mc(f, c)? {
        return Err(Error::Precondition("f exceeds the marginal-contribution rule".into()));
    }
    if (f.at(1) * c.value(1) - 1.0).abs() > PREDICATE_TOL {
        return Err(Error::Precondition("f(1)c(1) must equal 1".into()));
    }
    Ok(())
}

/// `max mu` over `lambda in [0, 1]`, `mu` free, subject to
/// `mu c(j) <= c(l) + lambda [min(j, n-l) f(j)c(j) - min(l, n-j) f(j+1)c(j+1)]`
/// for `1 <= l <= j <= n`.
pub fn build_convex_reduced(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<LinearProgram> {
    let (c, f) = prepare(c, f, n)?;
    check_convex_preconditions(&c, &f)?;
    let mut lp = LinearProgram::new(Sense::Maximize, vec![0.0, 1.0]);
    lp.set_bounds(0, 0.0, 1.0);
    lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
    for j in 1..=n {
        for l in 1..=j {
            let slope = weighted_share(j.min(n - l), &f, &c, j)
                - weighted_share(l.min(n - j), &f, &c, j + 1);
            lp.add_constraint(vec![slope, -c.value(j)], Relation::Ge, -c.value(l));
        }
    }
    Ok(lp)
}

pub fn closed_form_convex(c: &CostFunction, f: &DistributionRule, n: usize) -> Result<PoaResult> {
    solve_two_variable(Method::ConvexReduced, &build_convex_reduced(c, f, n)?)
}

fn check_printed_preconditions(c: &CostFunction) -> Result<()> {
    if !c.is_convex_nondecreasing() {
        return Err(Error::Precondition("c is not convex nondecreasing".into()));
    }
    if !c.is_normalized() {
        return Err(Error::Precondition("c(1) must equal 1".into()));
    }
    Ok(())
}

/// Literal evaluation of the printed Shapley closed form
/// `min_{l<=j} c(l)/c(j) + min(j,n-l)/j - min(l,n-j) c(j+1) / ((j+1) c(j))`.
pub fn closed_form_sv(c: &CostFunction, n: usize) -> Result<PoaResult> {
    let c = c.truncated(n)?;
    check_printed_preconditions(&c)?;
    let mut best = f64::INFINITY;
    for j in 1..=n {
        let cj = c.value(j);
        for l in 1..=j {
            let tail = l.min(n - j);
            let last = if tail == 0 {
                0.0
            } else {
                c.weighted(tail, j + 1) / ((j + 1) as f64 * cj)
            };
            let value = c.value(l) / cj + j.min(n - l) as f64 / j as f64 - last;
            best = best.min(value);
        }
    }
    Ok(PoaResult::from_c_star(Method::PrintedClosedFormSv, best))
}

/// Literal evaluation of the printed marginal-contribution closed form
/// `1 + min_j min(j,n-j)/c(j) [2c(j) - c(j-1) - c(j+1)]`.
pub fn closed_form_mc(c: &CostFunction, n: usize) -> Result<PoaResult> {
    let c = c.truncated(n)?;
    check_printed_preconditions(&c)?;
    let mut best = f64::INFINITY;
    for j in 1..=n {
        let factor = j.min(n - j);
        let value = if factor == 0 {
            0.0
        } else {
            factor as f64 / c.value(j) * (2.0 * c.value(j) - c.value(j - 1) - c.value(j + 1))
        };
        best = best.min(value);
    }
    Ok(PoaResult::from_c_star(Method::PrintedClosedFormMc, 1.0 + best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub method: Method,
    /// `ok`, `skipped` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_to_dual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees_with_dual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDelta {
    pub first: Method,
    pub second: Method,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub reference: Option<f64>,
    pub reference_poa: Option<f64>,
    pub entries: Vec<MethodEntry>,
    pub pairwise: Vec<PairDelta>,
    /// Every linear-programming route that ran agrees with the dual.
    pub lp_consistent: bool,
    /// Methods that ran but disagree with the dual.
    pub flagged: Vec<Method>,
    pub verdict: String,
}

impl ValidationReport {
    pub fn entry(&self, method: Method) -> Option<&MethodEntry> {
        self.entries.iter().find(|e| e.method == method)
    }
}

fn certificate_of(r: &PoaResult) -> Option<serde_json::Value> {
    if let Some(theta) = &r.theta {
        return Some(json!({ "theta": theta }));
    }
    match (r.lambda_star, r.mu_star) {
        (Some(l), Some(m)) => Some(json!({ "lambda": l, "mu": m })),
        (Some(l), None) => Some(json!({ "lambda": l })),
        _ => None,
    }
}

/// Runs every method whose preconditions hold and compares each to the dual.
pub fn cross_validate(c: &CostFunction, f: &DistributionRule, n: usize) -> ValidationReport {
    let mut outcomes: Vec<(Method, Result<PoaResult>)> = Vec::new();
    outcomes.push((Method::Dual, compute_poa_dual(c, f, n)));
    if n <= FULL_PROGRAM_MAX_N {
        outcomes.push((Method::Primal, compute_poa_primal(c, f, n)));
        outcomes.push((Method::DualFull, compute_poa_dual_full(c, f, n)));
    }
    outcomes.push((Method::Reduced, compute_poa_reduced(c, f, n)));
    outcomes.push((Method::ExplicitMin, closed_form_explicit_min(c, f, n)));
    outcomes.push((Method::ConvexReduced, closed_form_convex(c, f, n)));

    let truncated = c.truncated(n).ok();
    let rule = f.truncated(n).ok();
    if let (Some(c_n), Some(f_n)) = (&truncated, &rule) {
        let sv = DistributionRule::shapley(n).expect("n >= 1");
        let mc = DistributionRule::marginal_contribution(c_n);
        if f_n.approx_eq(&sv, 1e-12) {
            outcomes.push((Method::PrintedClosedFormSv, closed_form_sv(c_n, n)));
        }
        if f_n.approx_eq(&mc, 1e-12) {
            outcomes.push((Method::PrintedClosedFormMc, closed_form_mc(c_n, n)));
        }
    }

    let reference = match &outcomes[0].1 {
        Ok(r) => Some(r.c_star),
        Err(_) => None,
    };

    let mut entries = Vec::new();
    let mut values = Vec::new();
    for (method, outcome) in outcomes {
        let entry = match outcome {
            Ok(r) => {
                let delta = reference.map(|v| (r.c_star - v).abs());
                values.push((method, r.c_star));
                MethodEntry {
                    method,
                    status: "ok".into(),
                    value: Some(r.c_star),
                    poa: r.poa,
                    delta_to_dual: delta,
                    agrees_with_dual: delta.map(|d| d <= AGREEMENT_TOL),
                    detail: None,
                    certificate: certificate_of(&r),
                }
            }
            Err(Error::Precondition(why)) => MethodEntry {
                method,
                status: "skipped".into(),
                value: None,
                poa: None,
                delta_to_dual: None,
                agrees_with_dual: None,
                detail: Some(why),
                certificate: None,
            },
            Err(e) => MethodEntry {
                method,
                status: "error".into(),
                value: None,
                poa: None,
                delta_to_dual: None,
                agrees_with_dual: None,
                detail: Some(e.to_string()),
                certificate: None,
            },
        };
        entries.push(entry);
    }

    let mut pairwise = Vec::new();
    for i in 0..values.len() {
        for k in i + 1..values.len() {
            pairwise.push(PairDelta {
                first: values[i].0,
                second: values[k].0,
                delta: (values[i].1 - values[k].1).abs(),
            });
        }
    }

    let lp_consistent = reference.is_some()
        && entries
            .iter()
            .filter(|e| e.method.is_lp())
            .all(|e| e.status != "error" && e.agrees_with_dual != Some(false));
    let flagged: Vec<Method> = entries
        .iter()
        .filter(|e| e.agrees_with_dual == Some(false))
        .map(|e| e.method)
        .collect();

    let verdict = match (reference, lp_consistent, flagged.is_empty()) {
        (None, _, _) => "dual program failed; no reference value".to_string(),
        (Some(_), false, _) => "linear-programming routes disagree".to_string(),
        (Some(_), true, true) => "all methods agree with the dual".to_string(),
        (Some(_), true, false) => format!(
            "linear-programming routes agree; disagreeing with the dual: {}",
            flagged.iter().map(Method::name).collect::<Vec<_>>().join(", ")
        ),
    };

    ValidationReport {
        n,
        reference,
        reference_poa: reference.filter(|v| *v > 0.0).map(|v| 1.0 / v),
        entries,
        pairwise,
        lp_consistent,
        flagged,
        verdict,
    }
}
