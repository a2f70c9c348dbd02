#![allow(dead_code)]

use poa_lab::{CostFunction, DistributionRule, GameInstance};
use poa_lab::game::Resource;
use rand::Rng;

pub fn poly(d: f64, n: usize) -> CostFunction {
    CostFunction::polynomial(d, n).unwrap()
}

/// Independent evaluation of the two-variable dual.
///
/// Every boundary row reads `mu * g <= o + lambda * e`. Rows with `g = 0`
/// cap `lambda`; the rest give lines whose lower envelope is concave. The
/// peak is bracketed by bisection on the active slope, then located exactly
/// by intersecting the lines active near it.
pub fn dual_oracle(cvals: &[f64], fvals: &[f64]) -> (f64, f64) {
    let n = cvals.len();
    let c = |j: usize| if j == 0 { 0.0 } else { cvals[j - 1] };
    let f = |j: usize| if j == 0 { 0.0 } else if j > n { fvals[n - 1] } else { fvals[j - 1] };
    let mut lines: Vec<(f64, f64)> = Vec::new();
    let mut lambda_max = f64::INFINITY;
    for a in 0..=n {
        for x in 0..=n - a {
            for b in 0..=n - a - x {
                let s = a + x + b;
                if s == 0 || !(a == 0 || x == 0 || b == 0 || s == n) {
                    continue;
                }
                let mut e = a as f64 * f(a + x) * c(a + x);
                if b > 0 {
                    e -= b as f64 * f(a + x + 1) * c(a + x + 1);
                }
                let o = c(b + x);
                let g = c(a + x);
                if g == 0.0 {
                    if e < 0.0 {
                        lambda_max = lambda_max.min(o / -e);
                    }
                } else {
                    lines.push((o / g, e / g));
                }
            }
        }
    }
    let envelope = |l: f64| lines.iter().map(|(p, q)| p + q * l).fold(f64::INFINITY, f64::min);
    // Smallest slope among lines active at `l` is a supergradient.
    let slope = |l: f64| {
        let v = envelope(l);
        lines
            .iter()
            .filter(|(p, q)| p + q * l <= v + 1e-12 * (1.0 + v.abs()))
            .map(|(_, q)| *q)
            .fold(f64::INFINITY, f64::min)
    };
    let mut hi = lambda_max;
    if !hi.is_finite() {
        hi = 1.0;
        while slope(hi) > 0.0 {
            hi *= 2.0;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut candidates = vec![0.0, lo, hi];
    if lambda_max.is_finite() {
        candidates.push(lambda_max);
    }
    let v = envelope(lo);
    let near: Vec<&(f64, f64)> = lines
        .iter()
        .filter(|(p, q)| p + q * lo <= v + 1e-6)
        .collect();
    for i in 0..near.len() {
        for k in i + 1..near.len() {
            let dq = near[i].1 - near[k].1;
            if dq.abs() > 1e-14 {
                let l = (near[k].0 - near[i].0) / dq;
                if l >= 0.0 && l <= lambda_max {
                    candidates.push(l);
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|l| (envelope(l), l))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

pub fn shapley_values(n: usize) -> Vec<f64> {
    (1..=n).map(|j| 1.0 / j as f64).collect()
}

pub fn mc_values(d: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| 1.0 - ((j - 1) as f64).powf(d) / (j as f64).powf(d))
        .collect()
}

/// Random game with nonempty actions and values in `(0, 1]`.
pub fn random_game<R: Rng>(
    rng: &mut R,
    players: usize,
    max_resources: usize,
    max_actions: usize,
    cost: CostFunction,
    rule: DistributionRule,
) -> GameInstance {
    let m = rng.gen_range(1..=max_resources);
    let resources: Vec<Resource> = (0..m)
        .map(|i| Resource {
            id: format!("r{i}"),
            value: 1.0 - rng.gen::<f64>(),
        })
        .collect();
    let action_sets = (0..players)
        .map(|_| {
            (0..rng.gen_range(1..=max_actions))
                .map(|_| {
                    let mask = rng.gen_range(1..(1u32 << m));
                    (0..m)
                        .filter(|r| mask >> r & 1 == 1)
                        .map(|r| format!("r{r}"))
                        .collect()
                })
                .collect()
        })
        .collect();
    GameInstance::new(resources, action_sets, cost, rule).unwrap()
}
