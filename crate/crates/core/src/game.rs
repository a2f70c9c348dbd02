//! Explicit finite cost-sharing games.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostFunction, DistributionRule};
use crate::error::{Error, Result};

pub const DEFAULT_NASH_TOL: f64 = 1e-9;
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resource {
    pub id: String,
    pub value: f64,
}

/// Players, resources with values, explicit action sets, base cost and rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    resources: Vec<Resource>,
    index: HashMap<String, usize>,
    /// Per player, per action: sorted resource indices.
    actions: Vec<Vec<Vec<usize>>>,
    cost: CostFunction,
    rule: DistributionRule,
}

/// One action index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<usize>);

impl Allocation {
    pub fn choice(&self, player: usize) -> usize {
        self.0[player]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub player: usize,
    pub action: usize,
    /// Current cost minus deviation cost (positive means the deviation helps).
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPoa {
    pub worst_ne_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    pub worst_ne: Allocation,
    pub opt: Allocation,
    pub equilibria: usize,
}

impl GameInstance {
    /// `action_sets[i][k]` lists resource ids of action `k` of player `i`.
    pub fn new(
        resources: Vec<Resource>,
        action_sets: Vec<Vec<Vec<String>>>,
        cost: CostFunction,
        rule: DistributionRule,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, r) in resources.iter().enumerate() {
            if !(r.value.is_finite() && r.value >= 0.0) {
                return Err(Error::InvalidGame(format!(
                    "resource `{}` has invalid value {}",
                    r.id, r.value
                )));
            }
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::InvalidGame(format!("duplicate resource `{}`", r.id)));
            }
        }
        let players = action_sets.len();
        if players == 0 {
            return Err(Error::EmptyPlayerSet);
        }
        if cost.n() < players || rule.n() < players {
            return Err(Error::InvalidGame(format!(
                "{players} players but cost covers {} and rule covers {}",
                cost.n(),
                rule.n()
            )));
        }
        let mut actions = Vec::with_capacity(players);
        for (p, set) in action_sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidGame(format!("player {p} has no actions")));
            }
            let mut converted = Vec::with_capacity(set.len());
            for action in set {
                let mut ids = Vec::with_capacity(action.len());
                for id in action {
                    let r = *index.get(&id).ok_or(Error::UnknownResource(id))?;
                    ids.push(r);
                }
                ids.sort_unstable();
                ids.dedup();
                converted.push(ids);
            }
            actions.push(converted);
        }
        let game = Self {
            resources,
            index,
            actions,
            cost,
            rule,
        };
        // At least one player whose every action only touches valued resources.
        let anchored = game.actions.iter().any(|set| {
            set.iter()
                .all(|a| a.iter().all(|&r| game.resources[r].value > 0.0))
        });
        if !anchored {
            return Err(Error::InvalidGame(
                "no player has an action set made only of positive-value resources".into(),
            ));
        }
        Ok(game)
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn rule(&self) -> &DistributionRule {
        &self.rule
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    /// Resource ids of action `k` of `player`.
    pub fn action_ids(&self, player: usize, k: usize) -> Vec<&str> {
        self.actions[player][k]
            .iter()
            .map(|&r| self.resources[r].id.as_str())
            .collect()
    }

    pub fn action(&self, player: usize, k: usize) -> &[usize] {
        &self.actions[player][k]
    }

    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.resources.len() {
            return Err(Error::SizeMismatch {
                expected: self.resources.len(),
                found: values.len(),
            });
        }
        let resources = self
            .resources
            .iter()
            .zip(values)
            .map(|(r, &v)| Resource {
                id: r.id.clone(),
                value: v,
            })
            .collect();
        Self::new(resources, self.action_set_ids(), self.cost.clone(), self.rule.clone())
    }

    pub fn with_rule(&self, rule: DistributionRule) -> Result<Self> {
        Self::new(self.resources.clone(), self.action_set_ids(), self.cost.clone(), rule)
    }

    fn action_set_ids(&self) -> Vec<Vec<Vec<String>>> {
        self.actions
            .iter()
            .map(|set| {
                set.iter()
                    .map(|a| a.iter().map(|&r| self.resources[r].id.clone()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn check_allocation(&self, alloc: &Allocation) -> Result<()> {
        if alloc.0.len() != self.players() {
            return Err(Error::InvalidAllocation(format!(
                "{} choices for {} players",
                alloc.0.len(),
                self.players()
            )));
        }
        for (p, &k) in alloc.0.iter().enumerate() {
            if k >= self.actions[p].len() {
                return Err(Error::InvalidAllocation(format!(
                    "player {p} picks action {k} of {}",
                    self.actions[p].len()
                )));
            }
        }
        Ok(())
    }

    pub fn loads(&self, alloc: &Allocation) -> Vec<usize> {
        let mut loads = vec![0; self.resources.len()];
        for (p, &k) in alloc.0.iter().enumerate() {
            for &r in &self.actions[p][k] {
                loads[r] += 1;
            }
        }
        loads
    }

    pub fn load_count(&self, alloc: &Allocation, resource: &str) -> Result<usize> {
        let r = *self
            .index
            .get(resource)
            .ok_or_else(|| Error::UnknownResource(resource.to_string()))?;
        Ok(self.loads(alloc)[r])
    }

    fn cost_of_loads(&self, loads: &[usize]) -> f64 {
        loads
            .iter()
            .zip(&self.resources)
            .filter(|(&l, _)| l > 0)
            .map(|(&l, r)| r.value * self.cost.value(l))
            .sum()
    }

    /// `sum_r v_r c(|a|_r)`.
    pub fn system_cost(&self, alloc: &Allocation) -> f64 {
        self.cost_of_loads(&self.loads(alloc))
    }

    /// System cost with `player` removed from the allocation.
    pub fn system_cost_without(&self, alloc: &Allocation, player: usize) -> f64 {
        let mut loads = self.loads(alloc);
        for &r in &self.actions[player][alloc.choice(player)] {
            loads[r] -= 1;
        }
        self.cost_of_loads(&loads)
    }

    fn charge(&self, r: usize, load: usize) -> f64 {
        self.resources[r].value * self.cost.value(load) * self.rule.at(load)
    }

    /// `sum_{r in a_i} v_r c(|a|_r) f(|a|_r)`.
    pub fn player_cost(&self, player: usize, alloc: &Allocation) -> f64 {
        let loads = self.loads(alloc);
        self.player_cost_with_loads(player, alloc.choice(player), &loads)
    }

    fn player_cost_with_loads(&self, player: usize, k: usize, loads: &[usize]) -> f64 {
        self.actions[player][k]
            .iter()
            .map(|&r| self.charge(r, loads[r]))
            .sum()
    }

    /// Cost to `player` of switching to action `k` while others keep `alloc`.
    fn deviation_cost(&self, player: usize, k: usize, alloc: &Allocation, loads: &[usize]) -> f64 {
        let current = &self.actions[player][alloc.choice(player)];
        self.actions[player][k]
            .iter()
            .map(|&r| {
                let load = if current.binary_search(&r).is_ok() {
                    loads[r]
                } else {
                    loads[r] + 1
                };
                self.charge(r, load)
            })
            .sum()
    }

    /// Best unilateral deviation of every player, in player order.
    pub fn best_deviations(&self, alloc: &Allocation) -> Vec<Deviation> {
        let loads = self.loads(alloc);
        (0..self.players())
            .map(|p| {
                let now = self.player_cost_with_loads(p, alloc.choice(p), &loads);
                let mut best = Deviation {
                    player: p,
                    action: alloc.choice(p),
                    gain: 0.0,
                };
                for k in 0..self.actions[p].len() {
                    if k == alloc.choice(p) {
                        continue;
                    }
                    let gain = now - self.deviation_cost(p, k, alloc, &loads);
                    if gain > best.gain {
                        best = Deviation {
                            player: p,
                            action: k,
                            gain,
                        };
                    }
                }
                best
            })
            .collect()
    }

    pub fn is_nash(&self, alloc: &Allocation, tol: f64) -> bool {
        let loads = self.loads(alloc);
        (0..self.players()).all(|p| {
            let now = self.player_cost_with_loads(p, alloc.choice(p), &loads);
            (0..self.actions[p].len()).all(|k| self.deviation_cost(p, k, alloc, &loads) >= now - tol)
        })
    }

    /// `sum_r sum_{j=1}^{|a|_r} v_r f(j) c(j)`.
    pub fn potential(&self, alloc: &Allocation) -> f64 {
        self.loads(alloc)
            .iter()
            .enumerate()
            .map(|(r, &l)| (1..=l).map(|j| self.charge(r, j)).sum::<f64>())
            .sum()
    }

    pub fn allocation_count(&self) -> u128 {
        self.actions
            .iter()
            .map(|s| s.len() as u128)
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX)
    }

    /// Every allocation in mixed-radix order, player 0 most significant.
    pub fn allocations(&self, cap: u128) -> Result<impl Iterator<Item = Allocation> + '_> {
        let size = self.allocation_count();
        if size > cap {
            return Err(Error::EnumerationCap { size, cap });
        }
        let radices: Vec<usize> = self.actions.iter().map(Vec::len).collect();
        let mut next = Some(vec![0usize; radices.len()]);
        Ok(std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            let mut pos = succ.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                succ[pos] += 1;
                if succ[pos] < radices[pos] {
                    next = Some(succ);
                    break;
                }
                succ[pos] = 0;
            }
            Some(Allocation(current))
        }))
    }

    pub fn enumerate_equilibria(&self, tol: f64, cap: u128) -> Result<Vec<Allocation>> {
        Ok(self.allocations(cap)?.filter(|a| self.is_nash(a, tol)).collect())
    }

    /// Worst equilibrium cost over optimal cost for this instance.
    pub fn empirical_poa(&self, tol: f64, cap: u128) -> Result<EmpiricalPoa> {
        let mut opt: Option<(f64, Allocation)> = None;
        let mut worst: Option<(f64, Allocation)> = None;
        let mut equilibria = 0;
        for alloc in self.allocations(cap)? {
            let cost = self.system_cost(&alloc);
            if opt.as_ref().is_none_or(|(c, _)| cost < *c) {
                opt = Some((cost, alloc.clone()));
            }
            if self.is_nash(&alloc, tol) {
                equilibria += 1;
                if worst.as_ref().is_none_or(|(c, _)| cost > *c) {
                    worst = Some((cost, alloc));
                }
            }
        }
        let (worst_ne_cost, worst_ne) = worst.ok_or(Error::NoEquilibrium { tol })?;
        let (opt_cost, opt) = opt.expect("at least one allocation");
        if opt_cost <= 0.0 {
            return Err(Error::InvalidGame("optimal system cost is zero".into()));
        }
        Ok(EmpiricalPoa {
            worst_ne_cost,
            opt_cost,
            ratio: worst_ne_cost / opt_cost,
            worst_ne,
            opt,
            equilibria,
        })
    }
}

/// On-disk game format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub n: usize,
    pub resources: Vec<Resource>,
    pub action_sets: Vec<Vec<Vec<String>>>,
    pub cost: CostFunction,
    pub rule: DistributionRule,
}

impl From<&GameInstance> for GameFile {
    fn from(g: &GameInstance) -> Self {
        Self {
            n: g.players(),
            resources: g.resources.clone(),
            action_sets: g.action_set_ids(),
            cost: g.cost.clone(),
            rule: g.rule.clone(),
        }
    }
}

impl TryFrom<GameFile> for GameInstance {
    type Error = Error;

    fn try_from(file: GameFile) -> Result<Self> {
        if file.n != file.action_sets.len() {
            return Err(Error::SizeMismatch {
                expected: file.n,
                found: file.action_sets.len(),
            });
        }
        GameInstance::new(file.resources, file.action_sets, file.cost, file.rule)
    }
}

impl Serialize for GameInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GameFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GameInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GameInstance::try_from(GameFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
