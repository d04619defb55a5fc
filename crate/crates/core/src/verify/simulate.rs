use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::payoff::{payoff_unchecked, Action, TieWinner};
use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};

/// Games per batch. Batch boundaries are fixed so the reduction order, and
/// therefore every bit of the report, does not depend on the thread count.
const BATCH: u64 = 4096;

/// Stream used for tie-breaking coin flips; players use streams 0 and 1.
const COIN_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub sample_count: u64,
    pub mean_payoff: f64,
    pub std_error: f64,
    pub tie_count: u64,
    /// Fraction of games in which player 0 traded and executed first.
    pub first_mover_fraction: f64,
}

/// ChaCha8 generator for one player in one round. The master seed keys the
/// generator, the player index selects the stream and the round index sets
/// the word position (four 32-bit words per round).
pub fn round_rng(seed: u64, player: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(player);
    rng.set_word_pos(u128::from(round) * 4);
    rng
}

fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw `(ξ, g, D*(g))` from the equilibrium strategy. Gas fees are sampled
/// by inverting the gas-fee DDF on the solved path.
pub fn sample_action(sol: &EquilibriumSolution, rng_seed: u64) -> Action {
    draw(sol, &mut round_rng(rng_seed, 0, 0))
}

/// `n` draws of player 0's actions in rounds `0..n`, the same draws the
/// Monte Carlo estimate uses for that player.
pub fn sample_actions(sol: &EquilibriumSolution, n: u64, rng_seed: u64) -> Vec<Action> {
    (0..n).map(|round| draw(sol, &mut round_rng(rng_seed, 0, round))).collect()
}

pub(crate) fn draw(sol: &EquilibriumSolution, rng: &mut impl RngCore) -> Action {
    let trade = uniform(rng);
    let quantile = uniform(rng);
    if trade >= sol.alpha_star {
        return Action::NO_TRADE;
    }
    let mass = sol.support_mass();
    let z = sol
        .path
        .z_at_cumulative(quantile * mass)
        .unwrap_or(sol.support_width())
        .min(sol.support_width());
    let g = (sol.g_h - sol.liquidity() * z).max(sol.base_gas_fee());
    let amount = sol.d_star(g).expect("sampled fee lies in the support");
    Action::trade(g, amount)
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
    ties: u64,
    first: u64,
}

impl Moments {
    fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
            ties: self.ties + other.ties,
            first: self.first + other.first,
        }
    }
}

fn batch(sol: &EquilibriumSolution, seed: u64, rounds: std::ops::Range<u64>) -> Moments {
    let mut acc = Moments::default();
    for round in rounds {
        let mine = draw(sol, &mut round_rng(seed, 0, round));
        let theirs = draw(sol, &mut round_rng(seed, 1, round));
        let coin = round_rng(seed, COIN_STREAM, round).next_u64() & 1;
        let winner = if coin == 0 { TieWinner::Me } else { TieWinner::Them };
        let tie = mine.trades && theirs.trades && mine.gas_fee == theirs.gas_fee;
        if tie {
            acc.ties += 1;
        }
        let executes_first = mine.trades
            && (!theirs.trades
                || mine.gas_fee > theirs.gas_fee
                || (tie && winner == TieWinner::Me));
        if executes_first {
            acc.first += 1;
        }
        acc.push(payoff_unchecked(&sol.market, &mine, &theirs, winner));
    }
    acc
}

/// Play `n` independent games between two equilibrium players and report
/// player 0's payoff statistics.
pub fn monte_carlo_payoff(sol: &EquilibriumSolution, n: u64, rng_seed: u64) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let batches: Vec<std::ops::Range<u64>> = (0..n.div_ceil(BATCH))
        .map(|b| b * BATCH..((b + 1) * BATCH).min(n))
        .collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Moments> = {
        use rayon::prelude::*;
        batches
            .into_par_iter()
            .map(|r| batch(sol, rng_seed, r))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Moments> = batches.into_iter().map(|r| batch(sol, rng_seed, r)).collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    Ok(SimulationReport {
        sample_count: total.count,
        mean_payoff: total.mean,
        std_error: (variance / total.count as f64).sqrt(),
        tie_count: total.ties,
        first_mover_fraction: total.first as f64 / total.count as f64,
    })
}
