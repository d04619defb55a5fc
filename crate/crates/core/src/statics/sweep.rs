use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fosd::{linspace, SampledDdf, DEFAULT_GRID_POINTS};
use crate::equilibrium::{assemble, solve_xhat, CaseTag, EquilibriumSolution, SolverConfig, XhatPath};
use crate::error::{Error, Result};
use crate::market::MarketParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Varying {
    BaseGasFee,
    /// `L_B`, changed by scaling both reserves so that `O` stays fixed.
    Liquidity,
    /// `O`, changed by repricing asset A so that `L_B` stays fixed.
    Opportunity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub varying: Varying,
    pub grid: Vec<f64>,
    pub fixed: MarketParams,
    pub gas_abscissae: Vec<f64>,
    /// Relative trade sizes `d / y_A`.
    pub amount_abscissae: Vec<f64>,
}

impl SweepSpec {
    /// Sweep with the default DDF grids: 512 points on `[0, 1.01 ĝ_H]` with
    /// the largest `ĝ_H` along the sweep, and on `[0, 1.01 (√3 − 1)]`.
    pub fn new(varying: Varying, grid: Vec<f64>, fixed: MarketParams) -> Result<Self> {
        let mut spec = SweepSpec {
            varying,
            grid,
            fixed,
            gas_abscissae: Vec::new(),
            amount_abscissae: linspace(0.0, 1.01 * (3f64.sqrt() - 1.0), DEFAULT_GRID_POINTS),
        };
        let mut top: f64 = 0.0;
        for &p in &spec.grid {
            top = top.max(spec.market_at(p)?.derived().max_gas_fee);
        }
        spec.gas_abscissae = linspace(0.0, 1.01 * top, DEFAULT_GRID_POINTS);
        Ok(spec)
    }

    pub fn market_at(&self, value: f64) -> Result<MarketParams> {
        match self.varying {
            Varying::BaseGasFee => self.fixed.with_base_gas_fee(value),
            Varying::Liquidity => self.fixed.with_scaled_reserves(value / self.fixed.liquidity_b()),
            Varying::Opportunity => self.fixed.with_opportunity(value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must not be empty"));
        }
        if !self.grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        for &p in &self.grid {
            let o = self.market_at(p)?.opportunity();
            if !(o > 1.0 && o <= 3.0) {
                return Err(Error::UnsupportedOpportunity(o));
            }
        }
        Ok(())
    }
}

/// Scalars and DDF samples of one solved grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub case_tag: CaseTag,
    pub alpha_star: f64,
    pub g_h: f64,
    pub z_hat: f64,
    pub expected_profit: f64,
    pub max_gas_fee: f64,
    pub opportunity: f64,
    pub liquidity: f64,
    pub base_gas_fee: f64,
    pub gas_ddf: Vec<f64>,
    pub amount_ddf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    /// Per-row solver failures are recorded here instead of aborting.
    pub result: std::result::Result<RowSummary, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub varying: Varying,
    pub gas_abscissae: Vec<f64>,
    pub amount_abscissae: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl RowSummary {
    pub fn from_solution(sol: &EquilibriumSolution, gas: &[f64], amount: &[f64]) -> Self {
        RowSummary {
            case_tag: sol.case_tag,
            alpha_star: sol.alpha_star,
            g_h: sol.g_h,
            z_hat: sol.z_hat,
            expected_profit: sol.expected_profit,
            max_gas_fee: sol.max_gas_fee,
            opportunity: sol.market.opportunity(),
            liquidity: sol.liquidity(),
            base_gas_fee: sol.base_gas_fee(),
            gas_ddf: gas.iter().map(|&g| sol.gas_ddf(g)).collect(),
            amount_ddf: amount.iter().map(|&d| sol.amount_ddf(d)).collect(),
        }
    }
}

impl SweepTable {
    pub fn summary(&self, i: usize) -> Option<&RowSummary> {
        self.rows.get(i).and_then(|r| r.result.as_ref().ok())
    }

    pub fn gas_ddf(&self, i: usize) -> Option<SampledDdf> {
        self.summary(i).map(|s| SampledDdf {
            abscissae: self.gas_abscissae.clone(),
            values: s.gas_ddf.clone(),
        })
    }

    pub fn amount_ddf(&self, i: usize) -> Option<SampledDdf> {
        self.summary(i).map(|s| SampledDdf {
            abscissae: self.amount_abscissae.clone(),
            values: s.amount_ddf.clone(),
        })
    }

    /// One row per grid value: status and equilibrium scalars.
    pub fn scalars_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "param",
            "status",
            "case_tag",
            "alpha_star",
            "g_h",
            "z_hat",
            "expected_profit",
            "max_gas_fee",
        ])?;
        for row in &self.rows {
            match &row.result {
                Ok(s) => w.write_record([
                    row.param.to_string(),
                    "ok".into(),
                    case_name(s.case_tag).into(),
                    s.alpha_star.to_string(),
                    s.g_h.to_string(),
                    s.z_hat.to_string(),
                    s.expected_profit.to_string(),
                    s.max_gas_fee.to_string(),
                ])?,
                Err(e) => w.write_record([
                    row.param.to_string(),
                    format!("error: {e}"),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ])?,
            }
        }
        finish(w)
    }

    /// Long format `(param, kind, abscissa, value)` with `kind` in
    /// `{gas, amount}`.
    pub fn ddf_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["param", "kind", "abscissa", "value"])?;
        for i in 0..self.rows.len() {
            let Some(s) = self.summary(i) else { continue };
            let param = self.rows[i].param.to_string();
            for (kind, xs, ys) in [
                ("gas", &self.gas_abscissae, &s.gas_ddf),
                ("amount", &self.amount_abscissae, &s.amount_ddf),
            ] {
                for (x, y) in xs.iter().zip(ys) {
                    w.write_record([param.as_str(), kind, &x.to_string(), &y.to_string()])?;
                }
            }
        }
        finish(w)
    }
}

pub(crate) fn case_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::FullParticipation => "full_participation",
        CaseTag::PartialParticipation => "partial_participation",
    }
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Solve the paths of all distinct opportunities, in parallel when enabled.
/// Outputs follow input order.
pub(crate) fn solve_paths(opportunities: &[f64], config: &SolverConfig) -> Vec<Result<XhatPath>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        opportunities.par_iter().map(|&o| solve_xhat(o, config)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        opportunities.iter().map(|&o| solve_xhat(o, config)).collect()
    }
}

/// Solve one equilibrium per grid value. Grid points that share `O` share
/// one solved path.
pub fn run_sweep(spec: &SweepSpec, config: &SolverConfig) -> Result<SweepTable> {
    spec.validate()?;
    config.validate()?;
    let markets: Vec<MarketParams> = spec
        .grid
        .iter()
        .map(|&p| spec.market_at(p))
        .collect::<Result<_>>()?;
    let solutions = solve_markets(&markets, config);
    let rows = spec
        .grid
        .iter()
        .zip(solutions)
        .map(|(&param, sol)| SweepRow {
            param,
            result: sol
                .map(|s| RowSummary::from_solution(&s, &spec.gas_abscissae, &spec.amount_abscissae))
                .map_err(|e| e.to_string()),
        })
        .collect();
    Ok(SweepTable {
        varying: spec.varying,
        gas_abscissae: spec.gas_abscissae.clone(),
        amount_abscissae: spec.amount_abscissae.clone(),
        rows,
    })
}

/// Equilibria of several markets, solving each distinct `O` (to 1e-12
/// relative) once.
pub(crate) fn solve_markets(markets: &[MarketParams], config: &SolverConfig) -> Vec<Result<EquilibriumSolution>> {
    let key = |o: f64| (o * 1e11).round() as i64;
    let mut distinct = BTreeMap::new();
    for m in markets {
        distinct.entry(key(m.opportunity())).or_insert(m.opportunity());
    }
    let keys: Vec<i64> = distinct.keys().copied().collect();
    let opportunities: Vec<f64> = distinct.values().copied().collect();
    let paths: BTreeMap<i64, Result<XhatPath>> = keys.into_iter().zip(solve_paths(&opportunities, config)).collect();
    markets
        .iter()
        .map(|m| match &paths[&key(m.opportunity())] {
            Ok(path) => {
                let mut path = path.clone();
                path.opportunity = m.opportunity();
                assemble(m, path)
            }
            Err(e) => Err(Error::Unsupported(e.to_string())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_equilibrium;

    fn template() -> MarketParams {
        MarketParams::from_liquidity_opportunity(4e6, 2.0, 1e5).unwrap()
    }

    #[test]
    fn single_point_matches_direct_solve() {
        let cfg = SolverConfig::default();
        let spec = SweepSpec::new(Varying::BaseGasFee, vec![1e5], template()).unwrap();
        let table = run_sweep(&spec, &cfg).unwrap();
        let direct = solve_equilibrium(&template(), &cfg).unwrap();
        let row = table.summary(0).unwrap();
        assert_eq!(row.alpha_star, direct.alpha_star);
        assert_eq!(row.g_h, direct.g_h);
        assert_eq!(row.expected_profit, direct.expected_profit);
        assert_eq!(row.case_tag, direct.case_tag);
        assert_eq!(table.gas_abscissae.len(), DEFAULT_GRID_POINTS);
        assert_eq!(table.gas_abscissae[511], 1.01 * direct.max_gas_fee);
    }

    #[test]
    fn failures_stay_in_their_row() {
        let cfg = SolverConfig::default();
        let top = template().derived().max_gas_fee;
        let spec = SweepSpec::new(Varying::BaseGasFee, vec![1e5, top * 1.5], template()).unwrap();
        let table = run_sweep(&spec, &cfg).unwrap();
        assert!(table.rows[0].result.is_ok());
        assert!(table.rows[1].result.as_ref().unwrap_err().contains("no-trade"));
        let csv = String::from_utf8(table.scalars_csv().unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().contains("error: no-trade"));
        let long = String::from_utf8(table.ddf_csv().unwrap()).unwrap();
        assert_eq!(long.lines().count(), 1 + 2 * DEFAULT_GRID_POINTS);
    }

    #[test]
    fn invalid_specs() {
        let cfg = SolverConfig::default();
        let bad = SweepSpec::new(Varying::Opportunity, vec![2.0, 1.5], template()).unwrap();
        assert!(run_sweep(&bad, &cfg).is_err());
        let out = SweepSpec::new(Varying::Opportunity, vec![2.0, 3.5], template()).unwrap();
        assert!(matches!(run_sweep(&out, &cfg), Err(Error::UnsupportedOpportunity(_))));
        let empty = SweepSpec { grid: vec![], ..bad };
        assert!(run_sweep(&empty, &cfg).is_err());
    }

    #[test]
    fn liquidity_sweep_keeps_opportunity() {
        let spec = SweepSpec::new(Varying::Liquidity, vec![1e6, 8e6], template()).unwrap();
        for &p in &spec.grid {
            let m = spec.market_at(p).unwrap();
            assert!((m.liquidity_b() - p).abs() < 1e-9 * p);
            assert!((m.opportunity() - 2.0).abs() < 1e-12);
        }
    }
}
