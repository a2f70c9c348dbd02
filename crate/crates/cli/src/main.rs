//! `poa-lab`: price of anarchy, rule design, sweeps and worst-case games.

mod commands;
mod error;
mod output;
mod specs;
mod sweep;

use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{MethodArg, WorstCaseArgs};
use error::{failure, CliResult};
use specs::{parse_grid_arg, CostSpec, Grid, RuleSpec};
use sweep::SweepSpec;

#[derive(Parser)]
#[command(name = "poa-lab", version, about = "Exact price of anarchy for cost-sharing games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price of anarchy of a rule under a cost function
    Poa {
        /// poly:<d> or file:<path>
        #[arg(long, value_parser = CostSpec::parse)]
        cost: CostSpec,
        /// sv, mc, optimal or file:<path>
        #[arg(long, value_parser = RuleSpec::parse)]
        rule: RuleSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "dual")]
        method: MethodArg,
        /// JSON result (a cross-validation report for --method all)
        #[arg(long)]
        output: Option<String>,
    },
    /// Rule with the smallest price of anarchy
    Design {
        #[arg(long, value_parser = CostSpec::parse)]
        cost: CostSpec,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<String>,
        /// Normalized rule alone, readable back through --rule file:<path>
        #[arg(long)]
        rule_output: Option<String>,
    },
    /// Price of anarchy over a grid of exponents for c(j) = j^d
    Sweep {
        #[arg(long)]
        n: usize,
        /// start:step:end (inclusive) or a comma-separated list
        #[arg(long, value_parser = parse_grid_arg)]
        d_grid: Grid,
        #[arg(long, value_delimiter = ',', value_parser = RuleSpec::parse, default_value = "sv,mc,optimal")]
        rules: Vec<RuleSpec>,
        #[arg(long, value_enum, default_value = "dual")]
        method: MethodArg,
        /// Output CSV (standard output when omitted)
        #[arg(long)]
        csv: Option<String>,
        /// CSV of PoA(rule) / PoA(optimal)
        #[arg(long)]
        ratio_csv: Option<String>,
        /// Worker threads; 0 uses every core
        #[arg(long, env = "POA_LAB_JOBS", default_value_t = 0)]
        jobs: usize,
    },
    /// Build and verify the game attaining the price of anarchy
    Worstcase {
        #[arg(long, value_parser = CostSpec::parse)]
        cost: Option<CostSpec>,
        #[arg(long, value_parser = RuleSpec::parse)]
        rule: Option<RuleSpec>,
        #[arg(long)]
        n: Option<usize>,
        /// Certificate JSON
        #[arg(long)]
        output: Option<String>,
        /// Verification report JSON
        #[arg(long)]
        report: Option<String>,
        /// Re-verify a stored certificate instead of building one
        #[arg(long)]
        verify_only: Option<String>,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Poa { cost, rule, n, method, output } => {
            commands::cmd_poa(&cost, &rule, n, method, output.as_deref())
        }
        Command::Design { cost, n, output, rule_output } => {
            commands::cmd_design(&cost, n, output.as_deref(), rule_output.as_deref())
        }
        Command::Sweep { n, d_grid, rules, method, csv, ratio_csv, jobs } => {
            let spec = SweepSpec { n, d_grid: d_grid.0, rules, method };
            let rows = sweep::run(&spec, jobs)?;
            let io_err = |e: csv::Error| failure(format!("cannot write CSV: {e}"));
            match &csv {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| failure(format!("cannot write {path}: {e}")))?;
                    sweep::write_rows(file, &rows).map_err(io_err)?;
                }
                None => sweep::write_rows(io::stdout().lock(), &rows).map_err(io_err)?,
            }
            if let Some(path) = &ratio_csv {
                let ratios = sweep::ratio_rows(&spec, &rows, jobs)?;
                let file = std::fs::File::create(path)
                    .map_err(|e| failure(format!("cannot write {path}: {e}")))?;
                sweep::write_ratios(file, &ratios).map_err(io_err)?;
            }
            match sweep::failed_rows(&rows) {
                0 => Ok(()),
                k => Err(failure(format!("{k} of {} sweep points failed", rows.len()))),
            }
        }
        Command::Worstcase { cost, rule, n, output, report, verify_only, max_n } => {
            commands::cmd_worstcase(WorstCaseArgs {
                cost: cost.as_ref(),
                rule: rule.as_ref(),
                n,
                max_n,
                output: output.as_deref(),
                report: report.as_deref(),
                verify_only: verify_only.as_deref(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("poa-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}
