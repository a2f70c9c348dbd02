//! Worst-case games built from an optimal `theta`.
//!
//! Every support triple `(a, x, b)` becomes `n` resource copies
//! `r(a,x,b,i)`, `i = 0..n`, each worth `theta / n`. Player `p` uses the
//! circular block of `a + x` copies starting at `p` in the equilibrium and
//! the block of `b + x` copies starting at `(p - b) mod n` in the optimum,
//! so the two blocks overlap in exactly `x` copies.

use serde::{Deserialize, Serialize};

use crate::cost_model::{weighted_share, CostFunction, DistributionRule};
use crate::error::{Error, Result};
use crate::game::{Allocation, GameFile, GameInstance, Resource};
use crate::poa::{build_primal, IndexTriple, ThetaEntry, ThetaParam};

pub const PRUNE_THRESHOLD: f64 = 1e-12;
pub const THETA_FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseCertificate {
    pub game: GameInstance,
    pub ne_alloc: Allocation,
    pub opt_alloc: Allocation,
    pub claimed_poa: f64,
    /// Support actually materialized (after pruning).
    pub theta: ThetaParam,
    /// Total `theta` mass dropped by pruning.
    pub pruned_mass: f64,
}

/// Certificate file: the game format plus a sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub game: GameFile,
    pub ne_alloc: Allocation,
    pub opt_alloc: Allocation,
    pub theta: ThetaParam,
    pub claimed_poa: f64,
    #[serde(default)]
    pub pruned_mass: f64,
}

impl From<&WorstCaseCertificate> for CertificateFile {
    fn from(c: &WorstCaseCertificate) -> Self {
        Self {
            game: GameFile::from(&c.game),
            ne_alloc: c.ne_alloc.clone(),
            opt_alloc: c.opt_alloc.clone(),
            theta: c.theta.clone(),
            claimed_poa: c.claimed_poa,
            pruned_mass: c.pruned_mass,
        }
    }
}

impl TryFrom<CertificateFile> for WorstCaseCertificate {
    type Error = Error;

    fn try_from(file: CertificateFile) -> Result<Self> {
        let game = GameInstance::try_from(file.game)?;
        game.check_allocation(&file.ne_alloc)?;
        game.check_allocation(&file.opt_alloc)?;
        Ok(Self {
            game,
            ne_alloc: file.ne_alloc,
            opt_alloc: file.opt_alloc,
            claimed_poa: file.claimed_poa,
            theta: file.theta,
            pruned_mass: file.pruned_mass,
        })
    }
}

impl Serialize for WorstCaseCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WorstCaseCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        WorstCaseCertificate::try_from(CertificateFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn resource_id(t: &IndexTriple, copy: usize) -> String {
    format!("r{}_{}_{}_{}", t.a, t.x, t.b, copy)
}

/// Circular block of `len` copies starting at `start`.
fn block(start: usize, len: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..len).map(move |k| (start + k) % n)
}

pub fn construct_worst_case_game(
    theta: &ThetaParam,
    c: &CostFunction,
    f: &DistributionRule,
    n: usize,
) -> Result<WorstCaseCertificate> {
    let primal = build_primal(c, f, n)?;
    let dense = theta.to_dense(n)?;
    let violation = primal.max_violation(&dense);
    if violation > THETA_FEASIBILITY_TOL {
        return Err(Error::InvalidTheta(format!(
            "theta violates the primal constraints by {violation:e}"
        )));
    }

    let mut kept = Vec::new();
    let mut pruned_mass = 0.0;
    for e in &theta.entries {
        if e.theta < PRUNE_THRESHOLD {
            pruned_mass += e.theta;
        } else {
            kept.push(*e);
        }
    }
    let c_n = c.truncated(n)?;
    let opt_total: f64 = kept.iter().map(|e| e.theta * e.triple.opt_cost(&c_n)).sum();
    if opt_total <= 0.0 {
        return Err(Error::InvalidTheta(
            "the optimal allocation would have zero cost".into(),
        ));
    }

    let mut resources = Vec::with_capacity(kept.len() * n);
    for e in &kept {
        for i in 0..n {
            resources.push(Resource {
                id: resource_id(&e.triple, i),
                value: e.theta / n as f64,
            });
        }
    }
    let mut action_sets = Vec::with_capacity(n);
    for p in 0..n {
        let mut ne = Vec::new();
        let mut opt = Vec::new();
        for e in &kept {
            let t = &e.triple;
            ne.extend(block(p, t.ne_load(), n).map(|i| resource_id(t, i)));
            let start = (p + n - t.b % n) % n;
            opt.extend(block(start, t.opt_load(), n).map(|i| resource_id(t, i)));
        }
        action_sets.push(vec![ne, opt]);
    }
    let game = GameInstance::new(resources, action_sets, c_n, f.truncated(n)?)?;
    let ne_alloc = Allocation(vec![0; n]);
    let opt_alloc = Allocation(vec![1; n]);
    let claimed_poa = game.system_cost(&ne_alloc) / game.system_cost(&opt_alloc);
    Ok(WorstCaseCertificate {
        game,
        ne_alloc,
        opt_alloc,
        claimed_poa,
        theta: ThetaParam::new(kept)?,
        pruned_mass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviatingPlayer {
    pub player: usize,
    pub action: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub nash: bool,
    pub deviating_players: Vec<DeviatingPlayer>,
    /// `(1/n) sum theta [b f(a+x+1)c(a+x+1) - a f(a+x)c(a+x)]`.
    pub potential_formula: f64,
    /// Directly computed `phi(opt_i, ne_-i) - phi(ne)` per player.
    pub potential_direct: Vec<f64>,
    pub potential_residual: f64,
    /// Largest `|J_i difference - phi difference|` over players.
    pub potential_identity_residual: f64,
    pub ratio: f64,
    pub claimed_poa: f64,
    pub symmetric_ne_costs: bool,
    pub overlap_ok: bool,
    pub failures: Vec<String>,
    pub passed: bool,
}

pub fn verify_certificate(cert: &WorstCaseCertificate, tol: f64) -> VerificationReport {
    let game = &cert.game;
    let n = game.players();
    let mut failures = Vec::new();

    let deviating_players: Vec<DeviatingPlayer> = game
        .best_deviations(&cert.ne_alloc)
        .into_iter()
        .filter(|d| d.gain > tol)
        .map(|d| DeviatingPlayer {
            player: d.player,
            action: d.action,
            gain: d.gain,
        })
        .collect();
    let nash = deviating_players.is_empty();
    if !nash {
        let who: Vec<String> = deviating_players.iter().map(|d| d.player.to_string()).collect();
        failures.push(format!("nash: player(s) {} can deviate profitably", who.join(", ")));
    }

    let (f, c) = (game.rule(), game.cost());
    let potential_formula: f64 = cert
        .theta
        .entries
        .iter()
        .map(|e| {
            let t = &e.triple;
            e.theta * (weighted_share(t.b, f, c, t.ne_load() + 1) - weighted_share(t.a, f, c, t.ne_load()))
        })
        .sum::<f64>()
        / n as f64;
    let phi_ne = game.potential(&cert.ne_alloc);
    let mut potential_direct = Vec::with_capacity(n);
    let mut identity_residual = 0.0f64;
    for p in 0..n {
        let mut deviated = cert.ne_alloc.clone();
        deviated.0[p] = cert.opt_alloc.choice(p);
        let dphi = game.potential(&deviated) - phi_ne;
        let dj = game.player_cost(p, &deviated) - game.player_cost(p, &cert.ne_alloc);
        identity_residual = identity_residual.max((dj - dphi).abs());
        potential_direct.push(dphi);
    }
    let potential_residual = potential_direct
        .iter()
        .map(|d| (d - potential_formula).abs())
        .fold(0.0, f64::max);
    if potential_residual > tol {
        failures.push(format!(
            "potential: direct differences deviate from the theta formula by {potential_residual:e}"
        ));
    }
    if potential_formula < -tol {
        failures.push(format!("potential: formula value {potential_formula:e} is negative"));
    }
    if identity_residual > tol {
        failures.push(format!(
            "potential: player-cost and potential differences disagree by {identity_residual:e}"
        ));
    }

    let opt_cost = game.system_cost(&cert.opt_alloc);
    let ratio = if opt_cost > 0.0 {
        game.system_cost(&cert.ne_alloc) / opt_cost
    } else {
        f64::INFINITY
    };
    if !((ratio - cert.claimed_poa).abs() <= tol * cert.claimed_poa.abs().max(1.0)) {
        failures.push(format!(
            "ratio: system cost ratio {ratio} does not match claimed {}",
            cert.claimed_poa
        ));
    }

    let ne_costs: Vec<f64> = (0..n).map(|p| game.player_cost(p, &cert.ne_alloc)).collect();
    let symmetric_ne_costs = ne_costs
        .iter()
        .all(|v| (v - ne_costs[0]).abs() <= tol * ne_costs[0].abs().max(1.0));
    if !symmetric_ne_costs {
        failures.push("symmetry: equilibrium costs differ across players".into());
    }

    let overlap_ok = overlap_matches(cert);
    if !overlap_ok {
        failures.push("overlap: equilibrium and optimal blocks do not intersect in x copies".into());
    }

    VerificationReport {
        nash,
        deviating_players,
        potential_formula,
        potential_direct,
        potential_residual,
        potential_identity_residual: identity_residual,
        ratio,
        claimed_poa: cert.claimed_poa,
        symmetric_ne_costs,
        overlap_ok,
        passed: failures.is_empty(),
        failures,
    }
}

/// Per player and triple, the two blocks share exactly `x` copies.
fn overlap_matches(cert: &WorstCaseCertificate) -> bool {
    let game = &cert.game;
    let n = game.players();
    (0..n).all(|p| {
        let ne = game.action_ids(p, cert.ne_alloc.choice(p));
        let opt = game.action_ids(p, cert.opt_alloc.choice(p));
        cert.theta.entries.iter().all(|e: &ThetaEntry| {
            let prefix = format!("r{}_{}_{}_", e.triple.a, e.triple.x, e.triple.b);
            let ne_here: Vec<&&str> = ne.iter().filter(|id| id.starts_with(&prefix)).collect();
            let shared = opt
                .iter()
                .filter(|id| id.starts_with(&prefix) && ne_here.contains(id))
                .count();
            shared == e.triple.x
        })
    })
}
