use std::path::Path;

use arbgame::empirics::{analyze as run_analysis, ClassifyConfig};
use arbgame::equilibrium::{solve_equilibrium, EquilibriumSolution, SolverConfig};
use arbgame::statics::{figure_data, linspace, run_sweep, SweepSpec, Varying, DEFAULT_GRID_POINTS};
use arbgame::tolerance;
use arbgame::verify::{
    best_deviation_gap, discretized_game_oracle, monte_carlo_payoff, DeviationReport, SimulationReport,
};
use arbgame::{MarketConfig, MarketParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::output::{json_bytes, OutDir};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    market: MarketConfig,
    #[serde(default)]
    solver: SolverConfig,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    market: MarketConfig,
    #[serde(default)]
    solver: SolverConfig,
    varying: Varying,
    grid: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiguresConfig {
    market: MarketConfig,
    #[serde(default)]
    solver: SolverConfig,
}

#[derive(Debug, Serialize)]
struct FiguresRun<'a> {
    #[serde(flatten)]
    config: &'a FiguresConfig,
    o_grid: &'a [f64],
}

fn parse<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn market(cfg: &MarketConfig) -> Result<MarketParams, CliError> {
    Ok(MarketParams::from_config(cfg)?)
}

fn finish(out: &OutDir, files: Vec<(&str, Vec<u8>)>, manifest: &RunManifest) -> Result<(), CliError> {
    for (name, bytes) in files {
        out.write(name, &bytes)?;
    }
    out.write_json("manifest.json", manifest)
}

fn ddf_csv(header: [&str; 2], points: impl Iterator<Item = (f64, f64)>) -> Vec<u8> {
    let mut s = format!("{},{}\n", header[0], header[1]);
    for (x, y) in points {
        s.push_str(&format!("{x},{y}\n"));
    }
    s.into_bytes()
}

pub fn solve(config: &Path, out: &Path) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("solve", &())?;
    let bytes = manifest.read("config", config)?;
    let cfg: SolveConfig = parse(config, &bytes)?;
    manifest.config = serde_json::to_value(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let m = market(&cfg.market)?;
    let sol = solve_equilibrium(&m, &cfg.solver)?;

    let gas = linspace(0.0, 1.01 * sol.max_gas_fee, DEFAULT_GRID_POINTS);
    let amounts = linspace(0.0, 1.01 * sol.path.x0(), DEFAULT_GRID_POINTS);
    let out = OutDir::create(out)?;
    finish(
        &out,
        vec![
            ("solution.json", json_bytes(&sol)?),
            ("gas_ddf.csv", ddf_csv(["gas_fee", "ddf"], gas.iter().map(|&g| (g, sol.gas_ddf(g))))),
            (
                "amount_ddf.csv",
                ddf_csv(["relative_amount", "ddf"], amounts.iter().map(|&x| (x, sol.amount_ddf(x)))),
            ),
        ],
        &manifest,
    )
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub gas_grid: usize,
    pub amount_grid: usize,
    pub mc_samples: u64,
    pub oracle_iterations: u64,
}

const ORACLE_GAS_LEVELS: usize = 101;
const ORACLE_AMOUNT_LEVELS: usize = 51;
const FLATNESS_POINTS: usize = 100;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, threshold: f64) -> Self {
        Check {
            name,
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Serialize)]
struct OracleSummary {
    gas_levels: usize,
    amount_levels: usize,
    iterations: u64,
    trade_probability: f64,
    alpha_star: f64,
    regret: f64,
}

#[derive(Debug, Serialize)]
struct VerificationReport {
    pass: bool,
    checks: Vec<Check>,
    flatness_max_deviation: f64,
    best_deviation: DeviationReport,
    monte_carlo: SimulationReport,
    oracle: Option<OracleSummary>,
}

fn flatness(sol: &EquilibriumSolution) -> Result<f64, CliError> {
    let (lo, hi) = (sol.base_gas_fee(), sol.g_h);
    let value = sol.max_gas_fee - sol.g_h;
    let mut worst = 0.0f64;
    for i in 0..FLATNESS_POINTS {
        let g = lo + (hi - lo) * (i as f64 + 0.5) / FLATNESS_POINTS as f64;
        let h = sol.response_h(g, sol.d_star(g)?)?;
        worst = worst.max((h - value).abs());
    }
    Ok(worst)
}

pub fn verify(solution: &Path, out: &Path, opts: VerifyOptions) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("verify", &opts)?;
    manifest.seeds.insert("seed", opts.seed);
    let bytes = manifest.read("solution", solution)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Validation(format!("{}: {e}", solution.display())))?;
    let sol = EquilibriumSolution::from_json(text)?;

    let top = sol.max_gas_fee;
    let flat = flatness(&sol)?;
    let deviation = best_deviation_gap(&sol, opts.gas_grid, opts.amount_grid)?;
    let mc = monte_carlo_payoff(&sol, opts.mc_samples, opts.seed)?;
    let mut checks = vec![
        Check::new(
            "flatness",
            flat,
            tolerance::FLATNESS_REL * top.max(sol.liquidity() * 1e-6),
        ),
        Check::new("best_deviation_gap", deviation.gap, tolerance::DEVIATION_GAP_REL * top),
        Check::new(
            "monte_carlo",
            (mc.mean_payoff - sol.expected_profit).abs(),
            tolerance::MONTE_CARLO_SIGMAS * mc.std_error,
        ),
    ];
    let oracle = if opts.oracle_iterations > 0 {
        let r = discretized_game_oracle(
            &sol.market,
            ORACLE_GAS_LEVELS,
            ORACLE_AMOUNT_LEVELS,
            opts.oracle_iterations,
            opts.seed,
        )?;
        checks.push(Check::new(
            "oracle_trade_probability",
            (r.trade_probability - sol.alpha_star).abs(),
            tolerance::ORACLE_TRADE_PROBABILITY,
        ));
        Some(OracleSummary {
            gas_levels: ORACLE_GAS_LEVELS,
            amount_levels: ORACLE_AMOUNT_LEVELS,
            iterations: r.iterations,
            trade_probability: r.trade_probability,
            alpha_star: sol.alpha_star,
            regret: r.regret,
        })
    } else {
        None
    };
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.to_string()).collect();
    let report = VerificationReport {
        pass: failed.is_empty(),
        checks,
        flatness_max_deviation: flat,
        best_deviation: deviation,
        monte_carlo: mc,
        oracle,
    };
    let out = OutDir::create(out)?;
    finish(&out, vec![("verification.json", json_bytes(&report)?)], &manifest)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}

pub fn sweep(config: &Path, out: &Path) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("sweep", &())?;
    let bytes = manifest.read("config", config)?;
    let cfg: SweepConfig = parse(config, &bytes)?;
    manifest.config = serde_json::to_value(&cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let spec = SweepSpec::new(cfg.varying, cfg.grid.clone(), market(&cfg.market)?)?;
    let table = run_sweep(&spec, &cfg.solver)?;
    let out = OutDir::create(out)?;
    finish(
        &out,
        vec![
            ("sweep_scalars.csv", table.scalars_csv()?),
            ("sweep_ddf.csv", table.ddf_csv()?),
        ],
        &manifest,
    )
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Validation(format!("invalid grid `{text}`: {why}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
                return Err(bad("need start <= stop and a positive step"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > 100_000 {
                return Err(bad("too many points"));
            }
            (0..n)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [list] => list.split(',').map(number).collect::<Result<Vec<f64>, _>>()?,
        _ => return Err(bad("expected start:stop:step or a comma-separated list")),
    };
    if grid.is_empty() {
        return Err(bad("empty"));
    }
    Ok(grid)
}

fn default_figure_market() -> MarketConfig {
    let m = MarketParams::from_liquidity_opportunity(
        arbgame::statics::DEFAULT_LIQUIDITY,
        2.0,
        arbgame::statics::DEFAULT_BASE_GAS_FEE,
    )
    .expect("default market is valid");
    m.to_config()
}

pub fn figures(config: Option<&Path>, o_grid: &str, out: &Path) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("figures", &())?;
    let cfg = match config {
        Some(path) => {
            let bytes = manifest.read("config", path)?;
            parse(path, &bytes)?
        }
        None => FiguresConfig {
            market: default_figure_market(),
            solver: SolverConfig::default(),
        },
    };
    let grid = parse_grid(o_grid)?;
    manifest.config = serde_json::to_value(FiguresRun {
        config: &cfg,
        o_grid: &grid,
    })
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let tables = figure_data(&grid, &market(&cfg.market)?, &cfg.solver)?;
    let out = OutDir::create(out)?;
    finish(
        &out,
        vec![
            ("figure_scalars.csv", tables.scalars),
            ("figure_gas_ddf.csv", tables.gas_ddf),
            ("figure_amount_ddf.csv", tables.amount_ddf),
        ],
        &manifest,
    )
}

pub fn analyze(blocks: &Path, swaps: &Path, config: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("analyze", &())?;
    let cfg: ClassifyConfig = match config {
        Some(path) => {
            let bytes = manifest.read("config", path)?;
            parse(path, &bytes)?
        }
        None => ClassifyConfig::default(),
    };
    manifest.config = serde_json::to_value(cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let block_bytes = manifest.read("blocks", blocks)?;
    let swap_bytes = manifest.read("swaps", swaps)?;
    let report = run_analysis(block_bytes.as_slice(), swap_bytes.as_slice(), &cfg)?;
    let out = OutDir::create(out)?;
    finish(
        &out,
        vec![
            ("tables_2_3_4.json", report.tables_json()?),
            ("regressions.json", report.regressions_json()?),
            ("rejects.csv", report.rejects_csv()?),
        ],
        &manifest,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g = parse_grid("1.1:3.0:0.1").unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 1.1);
        assert_eq!(g[19], 3.0);
        assert_eq!(g[2], 1.3);
        assert_eq!(parse_grid("1.5, 2,2.5").unwrap(), vec![1.5, 2.0, 2.5]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("1:2:0").is_err());
    }

    #[test]
    fn ddf_csv_layout() {
        let bytes = ddf_csv(["x", "ddf"], [(0.0, 1.0), (0.5, 0.25)].into_iter());
        assert_eq!(String::from_utf8(bytes).unwrap(), "x,ddf\n0,1\n0.5,0.25\n");
    }
}
