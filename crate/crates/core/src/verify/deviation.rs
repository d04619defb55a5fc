use serde::{Deserialize, Serialize};

use super::payoff::Action;
use crate::equilibrium::{inverse_advantage, EquilibriumSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    /// Best deviation payoff minus the payoff of the strategy against itself,
    /// clamped at zero.
    pub gap: f64,
    pub best_deviation: Action,
    pub best_payoff: f64,
    /// Payoff of the candidate strategy against itself.
    pub self_play_value: f64,
}

/// How much a player gains by switching from the candidate strategy to the
/// best pure action on a `gas × amount` grid over `[ĝ_L, ĝ_H] × [0, D̂_A]`,
/// or to not trading. Gas fees above `g_h` face an empty upper tail.
pub fn best_deviation_gap(
    sol: &EquilibriumSolution,
    gas_grid_size: usize,
    amount_grid_size: usize,
) -> Result<DeviationReport> {
    if gas_grid_size < 2 || amount_grid_size < 2 {
        return Err(Error::invalid("grid size", "must be at least 2"));
    }
    let low = sol.base_gas_fee();
    let high = sol.max_gas_fee;
    let alpha = sol.alpha_star;
    let row = |i: usize| -> (f64, Action) {
        let g = low + (high - low) * i as f64 / (gas_grid_size - 1) as f64;
        let mut best = (f64::NEG_INFINITY, Action::NO_TRADE);
        for j in 0..amount_grid_size {
            let d = sol.optimal_amount * j as f64 / (amount_grid_size - 1) as f64;
            let h = sol.response_with_alpha(g, d, alpha);
            if h > best.0 {
                best = (h, Action::trade(g, d));
            }
        }
        best
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<(f64, Action)> = {
        use rayon::prelude::*;
        (0..gas_grid_size).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(f64, Action)> = (0..gas_grid_size).map(row).collect();

    let mut best = (0.0, Action::NO_TRADE);
    for r in rows {
        if r.0 > best.0 {
            best = r;
        }
    }
    let value = self_play_value(sol);
    Ok(DeviationReport {
        gap: (best.0 - value).max(0.0),
        best_deviation: best.1,
        best_payoff: best.0,
        self_play_value: value,
    })
}

/// `α ∫ h(g, D*(g)) dΦ(g)` with `Φ` the normalized gas-fee distribution,
/// integrated on the solver grid in path coordinates.
fn self_play_value(sol: &EquilibriumSolution) -> f64 {
    let width = sol.support_width();
    let nodes = &sol.path.nodes;
    let h_at = |z: f64, x: f64| {
        let g = sol.g_h - sol.liquidity() * z;
        let d = sol.market.reserve_a() * x;
        sol.response_with_alpha(g, d, sol.alpha_star) * inverse_advantage(x)
    };
    let mut total = 0.0;
    let mut prev = (nodes[0].z, h_at(nodes[0].z, nodes[0].x));
    for node in &nodes[1..] {
        let (z, f) = if node.z >= width {
            let x = sol.path.x_at(width).expect("support lies inside the path");
            (width, h_at(width, x))
        } else {
            (node.z, h_at(node.z, node.x))
        };
        total += 0.5 * (z - prev.0) * (prev.1 + f);
        if z >= width {
            break;
        }
        prev = (z, f);
    }
    sol.alpha_star / sol.support_mass() * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_equilibrium, SolverConfig};
    use crate::market::MarketParams;

    fn solve(g_low_fraction: f64) -> EquilibriumSolution {
        let base = MarketParams::from_liquidity_opportunity(4e6, 2.0, 0.0).unwrap();
        let m = base.with_base_gas_fee(g_low_fraction * base.derived().max_gas_fee).unwrap();
        solve_equilibrium(&m, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn self_play_value_is_expected_profit() {
        for frac in [0.0, 0.5, 0.9] {
            let sol = solve(frac);
            let v = self_play_value(&sol);
            assert!((v - sol.expected_profit).abs() < 1e-5 * sol.max_gas_fee, "{frac} {v}");
        }
    }

    #[test]
    fn gap_small_for_solver_output() {
        for frac in [0.0, 0.9] {
            let sol = solve(frac);
            let r = best_deviation_gap(&sol, 60, 60).unwrap();
            assert!(r.gap >= 0.0);
            assert!(r.gap <= 1e-3 * sol.max_gas_fee, "{frac}: {r:?}");
        }
    }

    #[test]
    fn corrupted_trade_probability_is_detected() {
        let mut sol = solve(0.5);
        assert!(sol.alpha_star > 0.3 && sol.alpha_star < 0.9);
        sol.alpha_star *= 1.1;
        let r = best_deviation_gap(&sol, 60, 60).unwrap();
        assert!(r.gap > 1e-2 * sol.max_gas_fee, "{r:?}");
    }

    #[test]
    fn rejects_tiny_grids() {
        let sol = solve(0.9);
        assert!(best_deviation_gap(&sol, 1, 10).is_err());
    }
}
