use serde::{Deserialize, Serialize};

use super::fosd::{ddf_max_difference, fosd_compare, linspace, Dominance, DEFAULT_GRID_POINTS};
use super::sweep::{run_sweep, SweepSpec, SweepTable, Varying};
use crate::equilibrium::{find_z_hat, solve_xhat, CaseTag, SolverConfig};
use crate::error::{Error, Result};
use crate::market::MarketParams;
use crate::tolerance::FOSD_TOLERANCE;

/// Liquidity and base gas fee of the reference market for the `O` sweeps.
pub const DEFAULT_LIQUIDITY: f64 = 48_033_495.0;
pub const DEFAULT_BASE_GAS_FEE: f64 = 5.0;

/// One comparative-statics claim checked on a pair of five-point sweeps,
/// one sweep per participation regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub parameter: String,
    pub quantity: String,
    pub holds: bool,
    pub detail: String,
}

/// Smallest `O` at which the market (with its `L_B` and `ĝ_L`) trades with
/// probability one, located by bisection on the case tag to within `tol`.
pub fn opportunity_threshold(template: &MarketParams, config: &SolverConfig, tol: f64) -> Result<f64> {
    let liquidity = template.liquidity_b();
    let floor = template.base_gas_fee() / liquidity;
    let full = |o: f64| -> Result<bool> {
        let path = solve_xhat(o, config)?;
        Ok(liquidity * ((1.0 - o.powf(-0.5)).powi(2) - find_z_hat(&path)?) >= template.base_gas_fee())
    };
    let mut lo = (1.0 - floor.sqrt()).powi(-2);
    let mut hi = 3.0;
    if !full(hi)? {
        return Err(Error::Unsupported(
            "participation stays partial for every O up to 3".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if full(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

struct Regimes {
    full: SweepTable,
    partial: SweepTable,
}

fn sweep(varying: Varying, grid: Vec<f64>, fixed: MarketParams, config: &SolverConfig) -> Result<SweepTable> {
    let mut spec = SweepSpec::new(varying, grid, fixed)?;
    let x_top = spec
        .grid
        .iter()
        .map(|&p| spec.market_at(p).map(|m| m.derived().optimal_amount / m.reserve_a()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    spec.amount_abscissae = linspace(0.0, 1.01 * x_top, DEFAULT_GRID_POINTS);
    let table = run_sweep(&spec, config)?;
    for (i, row) in table.rows.iter().enumerate() {
        if let Err(e) = &row.result {
            return Err(Error::Unsupported(format!("sweep point {i} failed: {e}")));
        }
    }
    Ok(table)
}

fn scalars(t: &SweepTable, f: impl Fn(&super::sweep::RowSummary) -> f64) -> Vec<f64> {
    (0..t.rows.len()).map(|i| f(t.summary(i).unwrap())).collect()
}

fn all_cases(t: &SweepTable, tag: CaseTag) -> bool {
    (0..t.rows.len()).all(|i| t.summary(i).unwrap().case_tag == tag)
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn fmt(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Clone, Copy)]
enum Expect {
    Increasing,
    Decreasing,
    Equal,
}

fn ddf_claim(t: &SweepTable, amount: bool, expect: Expect) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for i in 1..t.rows.len() {
        let (a, b) = if amount {
            (t.amount_ddf(i - 1).unwrap(), t.amount_ddf(i).unwrap())
        } else {
            (t.gas_ddf(i - 1).unwrap(), t.gas_ddf(i).unwrap())
        };
        match expect {
            Expect::Equal => {
                let d = ddf_max_difference(&a, &b).unwrap();
                ok &= d <= FOSD_TOLERANCE;
                notes.push(format!("{d:.1e}"));
            }
            Expect::Increasing | Expect::Decreasing => {
                let want = match expect {
                    Expect::Increasing => Dominance::Dominates,
                    _ => Dominance::DominatedBy,
                };
                let got = fosd_compare(&a, &b, FOSD_TOLERANCE).unwrap();
                ok &= got == want;
                notes.push(format!("{got:?}"));
            }
        }
    }
    (ok, notes.join(" "))
}

fn check_alpha(r: &Regimes, increasing: bool) -> (bool, String) {
    let full = scalars(&r.full, |s| s.alpha_star);
    let partial = scalars(&r.partial, |s| s.alpha_star);
    let ok = all_cases(&r.full, CaseTag::FullParticipation)
        && all_cases(&r.partial, CaseTag::PartialParticipation)
        && full.iter().all(|&a| a == 1.0)
        && partial.iter().all(|&a| a < 1.0)
        && strictly(&partial, increasing);
    (ok, format!("full {} partial {}", fmt(&full), fmt(&partial)))
}

fn check_profit(r: &Regimes, increasing: bool) -> (bool, String) {
    let full = scalars(&r.full, |s| s.expected_profit);
    let partial = scalars(&r.partial, |s| s.expected_profit);
    let ok = full.iter().all(|&p| p > 0.0)
        && strictly(&full, increasing)
        && partial.iter().all(|&p| p == 0.0);
    (ok, format!("full {} partial {}", fmt(&full), fmt(&partial)))
}

fn check_ddf(r: &Regimes, amount: bool, full: Expect, partial: Expect) -> (bool, String) {
    let (a, da) = ddf_claim(&r.full, amount, full);
    let (b, db) = ddf_claim(&r.partial, amount, partial);
    (a && b, format!("full {da}; partial {db}"))
}

fn cells(parameter: &str, r: &Regimes, up: bool, gas: (Expect, Expect), amount: (Expect, Expect)) -> Vec<PropertyCheck> {
    let make = |quantity: &str, (holds, detail): (bool, String)| PropertyCheck {
        parameter: parameter.into(),
        quantity: quantity.into(),
        holds,
        detail,
    };
    vec![
        make("trading probability", check_alpha(r, up)),
        make("expected profit", check_profit(r, up)),
        make("gas fee paid", check_ddf(r, false, gas.0, gas.1)),
        make("relative trading amount", check_ddf(r, true, amount.0, amount.1)),
    ]
}

fn five(lo: f64, hi: f64, fractions: [f64; 5]) -> Vec<f64> {
    fractions.iter().map(|t| lo + (hi - lo) * t).collect()
}

/// The twelve effect-of-parameter claims (trading probability, profit, gas
/// fee and relative amount, for each of `ĝ_L`, `L_B` and `O`), each checked
/// in both participation regimes.
///
/// `ĝ_L` and `L_B` are varied around `O = 2`, `L_B = 4·10⁶`; `O` is varied
/// at `ĝ_L = 5`, `L_B = 48,033,495`. DDFs are compared on 512-point grids
/// spanning each sweep's own support.
pub fn property_checks(config: &SolverConfig) -> Result<Vec<PropertyCheck>> {
    let interior = [0.1, 0.3, 0.5, 0.7, 0.9];
    let o = 2.0;
    let liquidity = 4e6;
    let z_hat = find_z_hat(&solve_xhat(o, config)?)?;
    let gap = (1.0 - f64::powf(o, -0.5)).powi(2) - z_hat;
    let base = MarketParams::from_liquidity_opportunity(liquidity, o, 0.0)?;
    let top = base.derived().max_gas_fee;

    // Base gas fee: regime boundary at ĝ_H − L_B ẑ.
    let boundary = liquidity * gap;
    let gas_fee = Regimes {
        full: sweep(Varying::BaseGasFee, five(0.0, boundary, [0.0, 0.2, 0.4, 0.6, 0.8]), base, config)?,
        partial: sweep(Varying::BaseGasFee, five(boundary, top, interior), base, config)?,
    };

    // Liquidity: boundary at ĝ_L / ((1 − O^{−1/2})² − ẑ); trading needs ĝ_H > ĝ_L.
    let g_low = 1e4;
    let fixed = base.with_base_gas_fee(g_low)?;
    let l_star = g_low / gap;
    let l_min = g_low / (1.0 - f64::powf(o, -0.5)).powi(2);
    let liq = Regimes {
        full: sweep(Varying::Liquidity, [1.25, 1.5, 2.0, 3.0, 4.0].map(|t| t * l_star).to_vec(), fixed, config)?,
        partial: sweep(Varying::Liquidity, five(l_min, l_star, interior), fixed, config)?,
    };

    // Opportunity at the reference market; boundary located numerically.
    let reference = MarketParams::from_liquidity_opportunity(DEFAULT_LIQUIDITY, 2.0, DEFAULT_BASE_GAS_FEE)?;
    let o_bar = opportunity_threshold(&reference, config, 1e-9)?;
    let o_min = (1.0 - (DEFAULT_BASE_GAS_FEE / DEFAULT_LIQUIDITY).sqrt()).powi(-2);
    let opp = Regimes {
        full: sweep(Varying::Opportunity, five(o_bar, 3.0, [0.01, 0.25, 0.5, 0.75, 1.0]), reference, config)?,
        partial: sweep(Varying::Opportunity, five(o_min, o_bar, interior), reference, config)?,
    };

    use Expect::*;
    let mut out = cells("base gas fee", &gas_fee, false, (Increasing, Decreasing), (Equal, Decreasing));
    out.extend(cells("liquidity", &liq, true, (Increasing, Increasing), (Equal, Increasing)));
    out.extend(cells("opportunity", &opp, true, (Increasing, Increasing), (Increasing, Increasing)));
    Ok(out)
}
