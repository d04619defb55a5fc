use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::simulate::round_rng;
use crate::equilibrium::check_opportunity;
use crate::error::{Error, Result};
use crate::market::MarketParams;

/// Time-averaged fictitious-play strategy of the discretized game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub iterations: u64,
    pub trade_probability: f64,
    /// `max_i (A p)_i − pᵀ A p` for the averaged strategy `p`.
    pub regret: f64,
    pub gas_grid: Vec<f64>,
    pub amount_grid: Vec<f64>,
    /// Probability of each gas level, summed over amounts.
    pub gas_level_mass: Vec<f64>,
    /// Probability of each amount level, summed over gas fees.
    pub amount_level_mass: Vec<f64>,
}

impl OracleReport {
    /// Trading mass in `bins` equal-width gas-fee bins spanning the grid.
    pub fn gas_histogram(&self, bins: usize) -> Vec<f64> {
        let mut out = vec![0.0; bins.max(1)];
        let lo = self.gas_grid[0];
        let hi = *self.gas_grid.last().unwrap();
        for (&g, &m) in self.gas_grid.iter().zip(&self.gas_level_mass) {
            let k = if hi > lo {
                (((g - lo) / (hi - lo)) * out.len() as f64) as usize
            } else {
                0
            };
            let last = out.len() - 1;
            out[k.min(last)] += m;
        }
        out
    }
}

struct Game {
    amount_levels: usize,
    gas: Vec<f64>,
    amounts: Vec<f64>,
    /// First-mover profit of every action; index 0 is no-trade.
    first: Vec<f64>,
    /// `V(amounts[i], amounts[j])`.
    advantage: Vec<f64>,
}

impl Game {
    fn len(&self) -> usize {
        self.first.len()
    }

    fn split(&self, action: usize) -> (usize, usize) {
        let k = action - 1;
        (k / self.amount_levels, k % self.amount_levels)
    }

    /// Payoff of `mine` against `theirs`, both trading, ties averaged.
    fn payoff(&self, mine: usize, theirs: (usize, usize)) -> f64 {
        let (gi, ai) = self.split(mine);
        let (gj, aj) = theirs;
        let loss = self.advantage[ai * self.amount_levels + aj];
        match gi.cmp(&gj) {
            std::cmp::Ordering::Greater => self.first[mine],
            std::cmp::Ordering::Less => self.first[mine] - loss,
            std::cmp::Ordering::Equal => self.first[mine] - 0.5 * loss,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Fictitious play on the symmetric finite game whose actions are no-trade
/// plus every pair of `gas_levels` fees in `[ĝ_L, ĝ_H]` and `amount_levels`
/// amounts `k D̂_A / m`, `k = 1..m`. A single gas level means `ĝ_L` only.
///
/// The starting action is drawn from `rng_seed`; best responses break ties
/// toward the lowest action index.
pub fn discretized_game_oracle(
    market: &MarketParams,
    gas_levels: usize,
    amount_levels: usize,
    iterations: u64,
    rng_seed: u64,
) -> Result<OracleReport> {
    check_opportunity(market.opportunity())?;
    if gas_levels == 0 || amount_levels == 0 {
        return Err(Error::invalid("levels", "must be at least 1"));
    }
    if iterations == 0 {
        return Err(Error::invalid("iterations", "must be at least 1"));
    }
    let dq = market.derived();
    if dq.max_gas_fee <= market.base_gas_fee() {
        return Err(Error::NoTrade {
            max_gas_fee: dq.max_gas_fee,
            base_gas_fee: market.base_gas_fee(),
        });
    }
    let gas = linspace(market.base_gas_fee(), dq.max_gas_fee, gas_levels);
    let amounts: Vec<f64> = (1..=amount_levels)
        .map(|k| dq.optimal_amount * k as f64 / amount_levels as f64)
        .collect();
    let mut first = vec![0.0];
    for &g in &gas {
        first.extend(amounts.iter().map(|&d| market.first_mover_profit(g, d)));
    }
    let advantage = amounts
        .iter()
        .flat_map(|&a| amounts.iter().map(move |&b| market.advantage(a, b)))
        .collect();
    let game = Game {
        amount_levels,
        gas,
        amounts,
        first,
        advantage,
    };

    let n = game.len();
    let mut cumulative = vec![0.0; n];
    let mut counts = vec![0u64; n];
    let mut current = (round_rng(rng_seed, 0, 0).next_u64() % n as u64) as usize;
    for _ in 0..iterations {
        counts[current] += 1;
        let mut best = (f64::NEG_INFINITY, 0);
        if current == 0 {
            for i in 1..n {
                cumulative[i] += game.first[i];
            }
        } else {
            let theirs = game.split(current);
            for i in 1..n {
                cumulative[i] += game.payoff(i, theirs);
            }
        }
        for (i, &u) in cumulative.iter().enumerate() {
            if u > best.0 {
                best = (u, i);
            }
        }
        current = best.1;
    }

    let t = iterations as f64;
    let best_reply = cumulative.iter().fold(f64::NEG_INFINITY, |m, &u| m.max(u)) / t;
    let achieved: f64 = counts
        .iter()
        .zip(&cumulative)
        .map(|(&c, &u)| c as f64 * u)
        .sum::<f64>()
        / (t * t);
    let mut gas_level_mass = vec![0.0; gas_levels];
    let mut amount_level_mass = vec![0.0; amount_levels];
    for (i, &c) in counts.iter().enumerate().skip(1) {
        let (g, a) = game.split(i);
        gas_level_mass[g] += c as f64 / t;
        amount_level_mass[a] += c as f64 / t;
    }
    Ok(OracleReport {
        iterations,
        trade_probability: 1.0 - counts[0] as f64 / t,
        regret: best_reply - achieved,
        gas_grid: game.gas,
        amount_grid: game.amounts,
        gas_level_mass,
        amount_level_mass,
    })
}
