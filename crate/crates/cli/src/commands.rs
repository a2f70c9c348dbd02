use poa_lab::poa::{closed_form_convex, compute_poa_reduced};
use poa_lab::worst_case::VerificationReport;
use poa_lab::{
    compute_poa_dual, compute_poa_primal, construct_worst_case_game, cross_validate,
    design_optimal_rule, verify_certificate, CostFunction, DistributionRule, PoaResult,
    WorstCaseCertificate,
};

use crate::error::{failure, usage, CliResult};
use crate::output::{fmt9, to_json, write_file};
use crate::specs::{read_json, strip_file_prefix, CostSpec, RuleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Primal,
    Dual,
    Reduced,
    ClosedForm,
    All,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Primal => "primal",
            MethodArg::Dual => "dual",
            MethodArg::Reduced => "reduced",
            MethodArg::ClosedForm => "closed-form",
            MethodArg::All => "all",
        }
    }
}

/// Single-method evaluation; `All` is handled by the callers.
pub fn evaluate(method: MethodArg, c: &CostFunction, f: &DistributionRule, n: usize) -> CliResult<PoaResult> {
    let result = match method {
        MethodArg::Primal => compute_poa_primal(c, f, n)?,
        MethodArg::Dual | MethodArg::All => compute_poa_dual(c, f, n)?,
        MethodArg::Reduced => compute_poa_reduced(c, f, n)?,
        MethodArg::ClosedForm => closed_form_convex(c, f, n)?,
    };
    if result.poa.is_none() {
        return Err(failure(format!(
            "{} returned C* = {} with no finite price of anarchy",
            result.method.name(),
            result.c_star
        )));
    }
    Ok(result)
}

fn check_n(n: usize) -> CliResult<()> {
    if n < 1 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(())
}

pub fn cmd_poa(cost: &CostSpec, rule: &RuleSpec, n: usize, method: MethodArg, output: Option<&str>) -> CliResult<()> {
    check_n(n)?;
    let c = cost.build(n)?;
    let f = rule.build(&c, n)?;
    if method == MethodArg::All {
        let report = cross_validate(&c, &f, n);
        if let Some(path) = output {
            write_file(path, &to_json(&report, true))?;
        }
        let poa = report
            .reference_poa
            .ok_or_else(|| failure("dual program failed; no reference value"))?;
        println!("{}", fmt9(poa));
        for e in &report.entries {
            let value = e.poa.map(fmt9).unwrap_or_else(|| "-".into());
            let agree = match e.agrees_with_dual {
                Some(true) => "agrees",
                Some(false) => "DISAGREES",
                None => "",
            };
            println!("{:<24} {:<8} {:<14} {agree}", e.method.name(), e.status, value);
        }
        println!("{}", report.verdict);
        if !report.lp_consistent {
            return Err(failure("linear-programming routes disagree"));
        }
        return Ok(());
    }
    let result = evaluate(method, &c, &f, n)?;
    if let Some(path) = output {
        write_file(path, &to_json(&result, true))?;
    }
    println!("{}", fmt9(result.poa.expect("checked in evaluate")));
    Ok(())
}

pub fn cmd_design(cost: &CostSpec, n: usize, output: Option<&str>, rule_output: Option<&str>) -> CliResult<()> {
    check_n(n)?;
    let c = cost.build(n)?;
    let result = design_optimal_rule(&c, n)?;
    if let Some(path) = output {
        write_file(path, &to_json(&result, true))?;
    }
    if let Some(path) = rule_output {
        write_file(path, &to_json(&result.rule, true))?;
    }
    println!("{}", fmt9(result.poa));
    for (j, v) in result.rule.values().iter().enumerate() {
        println!("{}\t{}", j + 1, fmt9(*v));
    }
    Ok(())
}

pub struct WorstCaseArgs<'a> {
    pub cost: Option<&'a CostSpec>,
    pub rule: Option<&'a RuleSpec>,
    pub n: Option<usize>,
    pub max_n: usize,
    pub output: Option<&'a str>,
    pub report: Option<&'a str>,
    pub verify_only: Option<&'a str>,
}

const VERIFY_TOL: f64 = 1e-8;
const DUAL_MATCH_TOL: f64 = 1e-6;

fn finish_report(report: &VerificationReport, extra: Vec<String>, path: Option<&str>) -> CliResult<()> {
    let mut report = report.clone();
    report.failures.extend(extra);
    report.passed = report.failures.is_empty();
    if let Some(path) = path {
        write_file(path, &to_json(&report, true))?;
    }
    println!("ratio {}", fmt9(report.ratio));
    println!("claimed_poa {}", fmt9(report.claimed_poa));
    println!("potential_identity_residual {:e}", report.potential_identity_residual);
    if report.passed {
        println!("verification passed");
        Ok(())
    } else {
        for f in &report.failures {
            println!("failed check: {f}");
        }
        Err(failure(format!("verification failed: {}", report.failures.join("; "))))
    }
}

pub fn cmd_worstcase(args: WorstCaseArgs<'_>) -> CliResult<()> {
    if let Some(path) = args.verify_only {
        let cert: WorstCaseCertificate = read_json(strip_file_prefix(path)).map_err(|e| match e {
            crate::error::CliError::Usage(m) => failure(format!("certificate rejected: {m}")),
            other => other,
        })?;
        let report = verify_certificate(&cert, VERIFY_TOL);
        return finish_report(&report, Vec::new(), args.report);
    }
    let (cost, rule, n) = match (args.cost, args.rule, args.n) {
        (Some(c), Some(r), Some(n)) => (c, r, n),
        _ => return Err(usage("--cost, --rule and --n are required unless --verify-only is given")),
    };
    check_n(n)?;
    if n > args.max_n {
        return Err(usage(format!("n = {n} exceeds --max-n {}", args.max_n)));
    }
    let c = cost.build(n)?;
    let f = rule.build(&c, n)?;
    let primal = compute_poa_primal(&c, &f, n)?;
    let theta = primal.theta.as_ref().expect("primal returns theta");
    let cert = construct_worst_case_game(theta, &c, &f, n)?;
    if let Some(path) = args.output {
        write_file(path, &to_json(&cert, false))?;
    }
    let report = verify_certificate(&cert, VERIFY_TOL);
    let dual = compute_poa_dual(&c, &f, n)?;
    let mut extra = Vec::new();
    if let Some(p) = dual.poa {
        println!("dual_poa {}", fmt9(p));
        if (report.ratio - p).abs() > DUAL_MATCH_TOL {
            extra.push(format!("ratio {} differs from dual PoA {p}", report.ratio));
        }
    }
    finish_report(&report, extra, args.report)
}
