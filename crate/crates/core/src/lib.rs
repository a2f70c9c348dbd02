//! Exact price of anarchy for cost-sharing games.
//!
//! The price of anarchy of a distribution rule `f` over all games with `n`
//! players and base cost `c` is the optimum of a small linear program. This
//! crate builds those programs (primal over the overlap parametrization,
//! its two-variable dual, reduced variants and closed-form evaluators),
//! designs the rule that minimizes the price of anarchy, and materializes
//! worst-case game instances that attain the bound.

pub mod cost_model;
pub mod design;
pub mod error;
pub mod game;
pub mod lp;
pub mod poa;
pub mod worst_case;

pub use cost_model::{CostFunction, DistributionRule, Extended};
pub use design::{design_optimal_rule, DesignResult};
pub use error::{Error, Result};
pub use game::{Allocation, GameInstance};
pub use lp::{LinearProgram, LpSolution, LpStatus};
pub use poa::{compute_poa_dual, compute_poa_primal, cross_validate, PoaResult};
pub use worst_case::{construct_worst_case_game, verify_certificate, WorstCaseCertificate};
