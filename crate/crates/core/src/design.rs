//! Distribution rule with the smallest price of anarchy.
//!
//! Scaling a rule by the dual multiplier, `g(j) = lambda f(j)`, turns the
//! bilinear search over `(f, lambda, mu)` into a linear program in `(g, mu)`
//! with the same boundary rows as the dual.

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostFunction, DistributionRule};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense};
use crate::poa::{boundary_index_set, compute_poa_dual};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub n: usize,
    /// Optimal rule rescaled so that `f(1) = 1`.
    pub rule: DistributionRule,
    /// Scaled rule `g = lambda f` as returned by the program.
    pub rule_raw: Vec<f64>,
    pub mu_star: f64,
    pub poa: f64,
}

/// Variables `g(1..=n) >= 0` followed by a free `mu`; maximize `mu`.
pub fn build_design_lp(c: &CostFunction, n: usize) -> Result<LinearProgram> {
    let c = c.truncated(n)?;
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    lp.set_bounds(n, f64::NEG_INFINITY, f64::INFINITY);
    for t in boundary_index_set(n) {
        let mut row = vec![0.0; n + 1];
        let load = t.ne_load();
        if t.a > 0 {
            row[load - 1] += c.weighted(t.a, load);
        }
        if t.b > 0 {
            // b > 0 forces load + 1 <= n, so g(n+1) = g(n) never arises here.
            row[load] -= c.weighted(t.b, load + 1);
        }
        row[n] = -t.ne_cost(&c);
        lp.add_constraint(row, Relation::Ge, -t.opt_cost(&c));
    }
    Ok(lp)
}

pub fn design_optimal_rule(c: &CostFunction, n: usize) -> Result<DesignResult> {
    let lp = build_design_lp(c, n)?;
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpStatus(sol.status));
    }
    let mu_star = sol.x[n];
    if mu_star <= 0.0 {
        return Err(Error::Precondition(format!("design optimum mu* = {mu_star} is not positive")));
    }
    let rule_raw = sol.x[..n].to_vec();
    let rule = DistributionRule::from_values(&rule_raw)?.normalized()?;
    Ok(DesignResult {
        n,
        rule,
        rule_raw,
        mu_star,
        poa: 1.0 / mu_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceEntry {
    pub label: String,
    pub poa: f64,
    /// `PoA(rule) / PoA(designed)`.
    pub ratio: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub designed_poa: f64,
    /// Dual-program price of anarchy of the normalized designed rule.
    pub designed_poa_dual: f64,
    pub entries: Vec<DominanceEntry>,
    pub holds: bool,
}

/// Compares the designed rule against `rules` with the dual program.
pub fn verify_dominance(
    c: &CostFunction,
    n: usize,
    rules: &[(String, DistributionRule)],
) -> Result<DominanceReport> {
    let design = design_optimal_rule(c, n)?;
    let designed_poa_dual = compute_poa_dual(c, &design.rule, n)?
        .poa
        .ok_or_else(|| Error::Precondition("designed rule has no finite price of anarchy".into()))?;
    let mut entries = Vec::new();
    for (label, rule) in rules {
        let poa = compute_poa_dual(c, rule, n)?.poa.unwrap_or(f64::INFINITY);
        entries.push(DominanceEntry {
            label: label.clone(),
            poa,
            ratio: poa / design.poa,
            dominated: design.poa <= poa + 1e-6,
        });
    }
    let holds = entries.iter().all(|e| e.dominated);
    Ok(DominanceReport {
        designed_poa: design.poa,
        designed_poa_dual,
        entries,
        holds,
    })
}
