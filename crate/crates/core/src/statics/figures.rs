use serde::{Deserialize, Serialize};

use super::fosd::{linspace, DEFAULT_GRID_POINTS};
use super::sweep::{case_name, finish, solve_markets};
use crate::equilibrium::SolverConfig;
use crate::error::{Error, Result};
use crate::market::MarketParams;

/// CSV bytes for the opportunity figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureTables {
    /// `opportunity, status, z_hat, gap, alpha_star, expected_profit, case_tag`
    /// where `gap = (1 − O^{−1/2})² − ẑ`.
    pub scalars: Vec<u8>,
    /// `opportunity, gas_fee, ddf`
    pub gas_ddf: Vec<u8>,
    /// `opportunity, relative_amount, ddf`
    pub amount_ddf: Vec<u8>,
}

/// Per-`O` scalars and DDF samples for `template` repriced to each `O`.
/// Gas fees span `[0, 1.01 ĝ_H(max O)]` and relative amounts
/// `[0, 1.01 (√O_max − 1)]`, 512 points each.
pub fn figure_data(o_grid: &[f64], template: &MarketParams, config: &SolverConfig) -> Result<FigureTables> {
    if o_grid.is_empty() {
        return Err(Error::invalid("o_grid", "must not be empty"));
    }
    let markets: Vec<MarketParams> = o_grid
        .iter()
        .map(|&o| {
            if !(o > 1.0 && o <= 3.0) {
                return Err(Error::UnsupportedOpportunity(o));
            }
            template.with_opportunity(o)
        })
        .collect::<Result<_>>()?;
    let o_max = o_grid.iter().copied().fold(f64::MIN, f64::max);
    let gas_top = markets.iter().map(|m| m.derived().max_gas_fee).fold(0.0, f64::max);
    let gas = linspace(0.0, 1.01 * gas_top, DEFAULT_GRID_POINTS);
    let amount = linspace(0.0, 1.01 * (o_max.sqrt() - 1.0), DEFAULT_GRID_POINTS);

    let mut scalars = csv::Writer::from_writer(Vec::new());
    scalars.write_record([
        "opportunity",
        "status",
        "z_hat",
        "gap",
        "alpha_star",
        "expected_profit",
        "case_tag",
    ])?;
    let mut gas_w = csv::Writer::from_writer(Vec::new());
    gas_w.write_record(["opportunity", "gas_fee", "ddf"])?;
    let mut amount_w = csv::Writer::from_writer(Vec::new());
    amount_w.write_record(["opportunity", "relative_amount", "ddf"])?;

    for (&o, sol) in o_grid.iter().zip(solve_markets(&markets, config)) {
        let o_text = o.to_string();
        match sol {
            Ok(sol) => {
                let gap = (1.0 - o.powf(-0.5)).powi(2) - sol.z_hat;
                scalars.write_record([
                    o_text.clone(),
                    "ok".into(),
                    sol.z_hat.to_string(),
                    gap.to_string(),
                    sol.alpha_star.to_string(),
                    sol.expected_profit.to_string(),
                    case_name(sol.case_tag).into(),
                ])?;
                for &g in &gas {
                    gas_w.write_record([o_text.as_str(), &g.to_string(), &sol.gas_ddf(g).to_string()])?;
                }
                for &d in &amount {
                    amount_w.write_record([o_text.as_str(), &d.to_string(), &sol.amount_ddf(d).to_string()])?;
                }
            }
            Err(e) => scalars.write_record([
                o_text,
                format!("error: {e}"),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?,
        }
    }
    Ok(FigureTables {
        scalars: finish(scalars)?,
        gas_ddf: finish(gas_w)?,
        amount_ddf: finish(amount_w)?,
    })
}
