use rayon::prelude::*;

use poa_lab::{cross_validate, CostFunction};

use crate::commands::{evaluate, MethodArg};
use crate::error::{failure, usage, CliResult};
use crate::output::fmt9;
use crate::specs::RuleSpec;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub n: usize,
    pub d_grid: Vec<f64>,
    pub rules: Vec<RuleSpec>,
    pub method: MethodArg,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub d: f64,
    pub rule: String,
    pub poa: Option<f64>,
    pub mu_star: Option<f64>,
    pub lambda_star: Option<f64>,
    pub method: &'static str,
    pub status: String,
}

fn point(spec: &SweepSpec, d: f64, rule: &RuleSpec) -> Row {
    let mut row = Row {
        d,
        rule: rule.label(),
        poa: None,
        mu_star: None,
        lambda_star: None,
        method: if spec.method == MethodArg::All { "dual" } else { spec.method.name() },
        status: "ok".into(),
    };
    let outcome = (|| {
        let c = CostFunction::polynomial(d, spec.n)?;
        let f = rule.build(&c, spec.n)?;
        let result = evaluate(spec.method, &c, &f, spec.n)?;
        let mut status = "ok".to_string();
        if spec.method == MethodArg::All {
            let report = cross_validate(&c, &f, spec.n);
            if !report.lp_consistent {
                status = "lp-mismatch".into();
            }
        }
        CliResult::Ok((result, status))
    })();
    match outcome {
        Ok((result, status)) => {
            row.poa = result.poa;
            row.mu_star = Some(result.c_star);
            row.lambda_star = result.lambda_star;
            row.status = status;
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

pub fn run(spec: &SweepSpec, jobs: usize) -> CliResult<Vec<Row>> {
    if spec.n < 1 {
        return Err(usage("--n must be at least 1"));
    }
    if spec.d_grid.is_empty() || spec.rules.is_empty() {
        return Err(usage("sweep needs a nonempty d grid and at least one rule"));
    }
    let tasks: Vec<(f64, &RuleSpec)> = spec
        .d_grid
        .iter()
        .flat_map(|&d| spec.rules.iter().map(move |r| (d, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| failure(format!("cannot start worker pool: {e}")))?;
    // Indexed collect keeps the d-then-rule order whatever the completion order.
    Ok(pool.install(|| tasks.par_iter().map(|(d, r)| point(spec, *d, r)).collect()))
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt9).unwrap_or_default()
}

pub fn write_rows<W: std::io::Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d", "rule", "poa", "mu_star", "lambda_star", "method", "status"])?;
    for r in rows {
        w.write_record([
            fmt9(r.d),
            r.rule.clone(),
            cell(r.poa),
            cell(r.mu_star),
            cell(r.lambda_star),
            r.method.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `PoA(rule) / PoA(optimal)` per grid point, reusing optimal rows when present.
pub fn ratio_rows(spec: &SweepSpec, rows: &[Row], jobs: usize) -> CliResult<Vec<(f64, String, Option<f64>)>> {
    let have_optimal = spec.rules.contains(&RuleSpec::Optimal);
    let optimal: Vec<Option<f64>> = if have_optimal {
        spec.d_grid
            .iter()
            .map(|&d| rows.iter().find(|r| r.d == d && r.rule == "optimal").and_then(|r| r.poa))
            .collect()
    } else {
        let extra = SweepSpec {
            rules: vec![RuleSpec::Optimal],
            method: MethodArg::Dual,
            ..spec.clone()
        };
        run(&extra, jobs)?.into_iter().map(|r| r.poa).collect()
    };
    Ok(rows
        .iter()
        .map(|r| {
            let k = spec.d_grid.iter().position(|&d| d == r.d).expect("row d in grid");
            let ratio = match (r.poa, optimal[k]) {
                (Some(p), Some(o)) => Some(p / o),
                _ => None,
            };
            (r.d, r.rule.clone(), ratio)
        })
        .collect())
}

pub fn write_ratios<W: std::io::Write>(out: W, ratios: &[(f64, String, Option<f64>)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d", "rule", "ratio_to_optimal"])?;
    for (d, rule, ratio) in ratios {
        w.write_record([fmt9(*d), rule.clone(), cell(*ratio)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn failed_rows(rows: &[Row]) -> usize {
    rows.iter().filter(|r| r.status != "ok").count()
}
