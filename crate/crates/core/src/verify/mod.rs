//! Checks that a computed solution is an equilibrium: pure-action payoffs,
//! the best-deviation gap, Monte Carlo play and a fictitious-play oracle on
//! a discretized version of the game.

mod deviation;
mod oracle;
mod payoff;
mod simulate;

pub use deviation::{best_deviation_gap, DeviationReport};
pub use oracle::{discretized_game_oracle, OracleReport};
pub use payoff::{pure_payoff, Action, TieWinner};
pub use simulate::{monte_carlo_payoff, round_rng, sample_action, sample_actions, SimulationReport};
