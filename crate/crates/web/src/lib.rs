//! WebAssembly bindings for the browser demo in `www/`. Every export takes
//! plain numbers and returns a JSON string; errors come back as
//! `{"error": "..."}`.

use arbgame::equilibrium::{find_z_hat, solve_equilibrium, solve_xhat, CaseTag, EquilibriumSolution, SolverConfig};
use arbgame::statics::linspace;
use arbgame::verify::{monte_carlo_payoff, sample_actions};
use arbgame::MarketParams;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const CURVE_POINTS: usize = 200;

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn case_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::FullParticipation => "full participation",
        CaseTag::PartialParticipation => "partial participation",
    }
}

/// Market with `L_B = liquidity`, opportunity `O` and `ĝ_L` given as a
/// fraction of the highest profitable gas fee.
fn solve(liquidity: f64, opportunity: f64, base_fraction: f64) -> Result<EquilibriumSolution, String> {
    if !(0.0..1.0).contains(&base_fraction) {
        return Err("base gas fee fraction must lie in [0, 1)".into());
    }
    let top = liquidity * (1.0 - opportunity.powf(-0.5)).powi(2);
    let m = MarketParams::from_liquidity_opportunity(liquidity, opportunity, base_fraction * top)
        .map_err(|e| e.to_string())?;
    solve_equilibrium(&m, &SolverConfig::default()).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct Curves {
    pub case: &'static str,
    pub alpha_star: f64,
    pub g_low: f64,
    pub g_h: f64,
    pub max_gas_fee: f64,
    pub optimal_amount: f64,
    pub expected_profit: f64,
    pub z_hat: f64,
    /// `[g, ddf]` pairs on `[0, 1.01 ĝ_H]`.
    pub gas_ddf: Vec<[f64; 2]>,
    /// `[d / y_A, ddf]` pairs.
    pub amount_ddf: Vec<[f64; 2]>,
    /// `[g, d*(g) / y_A]` pairs over the support.
    pub amount_by_fee: Vec<[f64; 2]>,
}

pub fn curves(liquidity: f64, opportunity: f64, base_fraction: f64) -> Result<Curves, String> {
    let sol = solve(liquidity, opportunity, base_fraction)?;
    let y_a = sol.market.reserve_a();
    let gas_ddf = linspace(0.0, 1.01 * sol.max_gas_fee, CURVE_POINTS)
        .into_iter()
        .map(|g| [g, sol.gas_ddf(g)])
        .collect();
    let amount_ddf = linspace(0.0, 1.01 * sol.path.x0(), CURVE_POINTS)
        .into_iter()
        .map(|x| [x, sol.amount_ddf(x)])
        .collect();
    let amount_by_fee = linspace(sol.base_gas_fee(), sol.g_h, CURVE_POINTS)
        .into_iter()
        .map(|g| sol.d_star(g).map(|d| [g, d / y_a]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok(Curves {
        case: case_name(sol.case_tag),
        alpha_star: sol.alpha_star,
        g_low: sol.base_gas_fee(),
        g_h: sol.g_h,
        max_gas_fee: sol.max_gas_fee,
        optimal_amount: sol.optimal_amount,
        expected_profit: sol.expected_profit,
        z_hat: sol.z_hat,
        gas_ddf,
        amount_ddf,
        amount_by_fee,
    })
}

#[derive(Serialize)]
pub struct SweepPoint {
    pub opportunity: f64,
    pub z_hat: f64,
    /// `(1 − O^{−1/2})² − ẑ`.
    pub gap: f64,
    pub alpha_star: Option<f64>,
    pub expected_profit: Option<f64>,
}

pub fn opportunity_sweep(liquidity: f64, base_gas_fee: f64, o_min: f64, o_max: f64, points: usize) -> Result<Vec<SweepPoint>, String> {
    if !(points >= 2 && points <= 60 && o_min < o_max) {
        return Err("need 2 to 60 points and o_min < o_max".into());
    }
    linspace(o_min, o_max, points)
        .into_iter()
        .map(|o| {
            let path = solve_xhat(o, &SolverConfig::default()).map_err(|e| e.to_string())?;
            let z_hat = find_z_hat(&path).map_err(|e| e.to_string())?;
            let m = MarketParams::from_liquidity_opportunity(liquidity, o, base_gas_fee).map_err(|e| e.to_string())?;
            let sol = arbgame::equilibrium::assemble(&m, path).ok();
            Ok(SweepPoint {
                opportunity: o,
                z_hat,
                gap: (1.0 - o.powf(-0.5)).powi(2) - z_hat,
                alpha_star: sol.as_ref().map(|s| s.alpha_star),
                expected_profit: sol.as_ref().map(|s| s.expected_profit),
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct Simulation {
    pub samples: u64,
    pub alpha_star: f64,
    pub trade_fraction: f64,
    pub mean_payoff: f64,
    pub std_error: f64,
    pub expected_profit: f64,
    pub bin_edges: Vec<f64>,
    /// Share of all samples whose gas fee falls in each bin.
    pub bin_shares: Vec<f64>,
}

pub fn simulate(liquidity: f64, opportunity: f64, base_fraction: f64, samples: u64, seed: u64, bins: usize) -> Result<Simulation, String> {
    if !(1..=1_000_000).contains(&samples) || !(1..=200).contains(&bins) {
        return Err("samples must be in 1..=1e6 and bins in 1..=200".into());
    }
    let sol = solve(liquidity, opportunity, base_fraction)?;
    let report = monte_carlo_payoff(&sol, samples, seed).map_err(|e| e.to_string())?;
    let (lo, hi) = (sol.base_gas_fee(), sol.g_h);
    let mut counts = vec![0u64; bins];
    let mut trades = 0u64;
    for a in sample_actions(&sol, samples, seed).iter().filter(|a| a.trades) {
        trades += 1;
        let k = (((a.gas_fee - lo) / (hi - lo)) * bins as f64) as usize;
        counts[k.min(bins - 1)] += 1;
    }
    Ok(Simulation {
        samples,
        alpha_star: sol.alpha_star,
        trade_fraction: trades as f64 / samples as f64,
        mean_payoff: report.mean_payoff,
        std_error: report.std_error,
        expected_profit: sol.expected_profit,
        bin_edges: linspace(lo, hi, bins + 1),
        bin_shares: counts.iter().map(|&c| c as f64 / samples as f64).collect(),
    })
}

/// Equilibrium curves as JSON.
#[wasm_bindgen(js_name = solveCurves)]
pub fn solve_curves(liquidity: f64, opportunity: f64, base_fraction: f64) -> String {
    to_json(curves(liquidity, opportunity, base_fraction))
}

/// `ẑ`, the opportunity gap and the equilibrium on an opportunity grid, as JSON.
#[wasm_bindgen(js_name = sweepOpportunity)]
pub fn sweep_opportunity(liquidity: f64, base_gas_fee: f64, o_min: f64, o_max: f64, points: usize) -> String {
    to_json(opportunity_sweep(liquidity, base_gas_fee, o_min, o_max, points))
}

/// Monte Carlo payoff and sampled gas-fee histogram, as JSON.
#[wasm_bindgen(js_name = simulateGasFees)]
pub fn simulate_gas_fees(liquidity: f64, opportunity: f64, base_fraction: f64, samples: u32, seed: u32, bins: u32) -> String {
    to_json(simulate(liquidity, opportunity, base_fraction, samples.into(), seed.into(), bins as usize))
}
