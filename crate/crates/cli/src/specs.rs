//! `poly:<d>` / `file:<path>` cost specs and `sv | mc | optimal | file:<path>` rule specs.

use std::fs;
use std::path::Path;

use poa_lab::{design_optimal_rule, CostFunction, DistributionRule};
use serde::de::DeserializeOwned;

use crate::error::{usage, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    Poly(f64),
    File(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    Shapley,
    Marginal,
    Optimal,
    File(String),
}

pub fn strip_file_prefix(s: &str) -> &str {
    s.strip_prefix("file:").unwrap_or(s)
}

pub fn read_json<T: DeserializeOwned>(path: &str) -> CliResult<T> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("cannot parse {path}: {e}")))
}

impl CostSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        if let Some(d) = s.strip_prefix("poly:") {
            let d: f64 = d.parse().map_err(|_| format!("bad exponent in cost spec {s:?}"))?;
            if !(d.is_finite() && d >= 0.0) {
                return Err(format!("exponent must be finite and nonnegative in {s:?}"));
            }
            Ok(CostSpec::Poly(d))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(CostSpec::File(p.to_string()))
        } else {
            Err(format!("cost spec must be poly:<d> or file:<path>, got {s:?}"))
        }
    }

    /// Cost on `1..=n`; files may hold more values and are truncated.
    pub fn build(&self, n: usize) -> CliResult<CostFunction> {
        match self {
            CostSpec::Poly(d) => Ok(CostFunction::polynomial(*d, n)?),
            CostSpec::File(p) => {
                let c: CostFunction = read_json(p)?;
                Ok(c.truncated(n)?)
            }
        }
    }
}

impl RuleSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "sv" => Ok(RuleSpec::Shapley),
            "mc" => Ok(RuleSpec::Marginal),
            "optimal" => Ok(RuleSpec::Optimal),
            _ => match s.strip_prefix("file:") {
                Some(p) => Ok(RuleSpec::File(p.to_string())),
                None => Err(format!("rule spec must be sv, mc, optimal or file:<path>, got {s:?}")),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            RuleSpec::Shapley => "sv".into(),
            RuleSpec::Marginal => "mc".into(),
            RuleSpec::Optimal => "optimal".into(),
            RuleSpec::File(p) => format!("file:{p}"),
        }
    }

    pub fn build(&self, c: &CostFunction, n: usize) -> CliResult<DistributionRule> {
        match self {
            RuleSpec::Shapley => Ok(DistributionRule::shapley(n)?),
            RuleSpec::Marginal => Ok(DistributionRule::marginal_contribution(&c.truncated(n)?)),
            RuleSpec::Optimal => Ok(design_optimal_rule(c, n)?.rule),
            RuleSpec::File(p) => {
                let f: DistributionRule = read_json(p)?;
                Ok(f.truncated(n)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `start:step:end` (inclusive) or a comma-separated list.
pub fn parse_grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number {t:?} in grid {s:?}"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if step <= 0.0 || end < start {
                return Err(format!("grid {s:?} needs step > 0 and end >= start"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            // Round away the drift of repeated addition so labels stay clean.
            (0..count)
                .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid must be start:step:end or a list, got {s:?}")),
    };
    if grid.is_empty() {
        return Err("empty d grid".into());
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("1.0:0.05:2.0").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[3], 1.15);
        assert_eq!(g[20], 2.0);
        assert_eq!(parse_grid("1,1.2,2").unwrap(), vec![1.0, 1.2, 2.0]);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert!(parse_grid("2:0.1:1").is_err());
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn specs() {
        assert_eq!(CostSpec::parse("poly:1.2").unwrap(), CostSpec::Poly(1.2));
        assert_eq!(CostSpec::parse("file:c.json").unwrap(), CostSpec::File("c.json".into()));
        assert!(CostSpec::parse("poly:x").is_err());
        assert!(CostSpec::parse("poly:-1").is_err());
        assert!(CostSpec::parse("cubic").is_err());
        assert_eq!(RuleSpec::parse("mc").unwrap(), RuleSpec::Marginal);
        assert_eq!(RuleSpec::parse("file:f.json").unwrap().label(), "file:f.json");
        assert!(RuleSpec::parse("equal").is_err());
    }
}
