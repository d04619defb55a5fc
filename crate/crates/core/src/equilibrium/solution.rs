use serde::{Deserialize, Serialize};

use super::kernel::{advantage, inverse_advantage};
use super::path::{check_opportunity, find_z_hat, solve_xhat, SolverConfig, XhatPath};
use crate::error::{finite, Error, Result};
use crate::market::MarketParams;

/// Which branch of the equilibrium characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// `L_B ẑ <= ĝ_H − ĝ_L`: always trade, support `[ĝ_L, ĝ_L + L_B ẑ]`.
    FullParticipation,
    /// `L_B ẑ > ĝ_H − ĝ_L`: trade with probability `α* < 1`, support `[ĝ_L, ĝ_H]`.
    PartialParticipation,
}

/// The symmetric mixed equilibrium `(α*, Φ*, D*)` of the two-arbitrageur
/// gas-fee game, represented through the solved path `x̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub market: MarketParams,
    pub case_tag: CaseTag,
    pub alpha_star: f64,
    /// Upper end of the gas-fee support.
    pub g_h: f64,
    pub z_hat: f64,
    pub expected_profit: f64,
    pub max_gas_fee: f64,
    pub optimal_amount: f64,
    pub path: XhatPath,
}

pub fn solve_equilibrium(market: &MarketParams, config: &SolverConfig) -> Result<EquilibriumSolution> {
    let path = solve_xhat(market.opportunity(), config)?;
    assemble(market, path)
}

/// Build the equilibrium of `market` from an already solved path. The path
/// depends on `O` only, so sweeps over `ĝ_L` or `L_B` can share it.
pub fn assemble(market: &MarketParams, path: XhatPath) -> Result<EquilibriumSolution> {
    let dq = market.derived();
    check_opportunity(dq.opportunity)?;
    if (path.opportunity - dq.opportunity).abs() > 1e-12 * dq.opportunity {
        return Err(Error::invalid(
            "path",
            format!(
                "solved for O = {}, market has O = {}",
                path.opportunity, dq.opportunity
            ),
        ));
    }
    let g_low = market.base_gas_fee();
    if dq.max_gas_fee <= g_low {
        return Err(Error::NoTrade {
            max_gas_fee: dq.max_gas_fee,
            base_gas_fee: g_low,
        });
    }
    let z_hat = find_z_hat(&path)?;
    let liquidity = dq.liquidity_b;
    let (case_tag, alpha_star, g_h) = if liquidity * z_hat <= dq.max_gas_fee - g_low {
        (CaseTag::FullParticipation, 1.0, g_low + liquidity * z_hat)
    } else {
        let width = (dq.max_gas_fee - g_low) / liquidity;
        let alpha = path
            .cumulative_at(width)
            .expect("support width is below ẑ, inside the stored path");
        (CaseTag::PartialParticipation, alpha, dq.max_gas_fee)
    };
    Ok(EquilibriumSolution {
        market: *market,
        case_tag,
        alpha_star,
        g_h,
        z_hat,
        expected_profit: alpha_star * (dq.max_gas_fee - g_h),
        max_gas_fee: dq.max_gas_fee,
        optimal_amount: dq.optimal_amount,
        path,
    })
}

impl EquilibriumSolution {
    pub fn from_json(text: &str) -> Result<Self> {
        let sol: Self = serde_json::from_str(text)?;
        sol.validate()?;
        Ok(sol)
    }

    /// Structural checks for solutions read from disk. Does not re-solve.
    pub fn validate(&self) -> Result<()> {
        self.path.validate()?;
        if !(self.alpha_star > 0.0 && self.alpha_star <= 1.0) {
            return Err(Error::invalid("alpha_star", "must lie in (0, 1]"));
        }
        let g_low = self.market.base_gas_fee();
        if !(self.g_h > g_low) {
            return Err(Error::invalid("g_h", "must exceed the base gas fee"));
        }
        if self.support_width() > self.path.z_max() {
            return Err(Error::invalid("path", "does not cover the gas-fee support"));
        }
        Ok(())
    }

    pub fn liquidity(&self) -> f64 {
        self.market.liquidity_b()
    }

    pub fn base_gas_fee(&self) -> f64 {
        self.market.base_gas_fee()
    }

    /// `(g_h − ĝ_L) / L_B`, the support width in path coordinates.
    pub fn support_width(&self) -> f64 {
        (self.g_h - self.base_gas_fee()) / self.liquidity()
    }

    /// `∫ v` over the support; equals `α*` for a consistent solution.
    pub fn support_mass(&self) -> f64 {
        self.path
            .cumulative_at(self.support_width())
            .unwrap_or(f64::NAN)
    }

    fn z_of(&self, g: f64) -> Result<f64> {
        finite("g", g)?;
        let low = self.base_gas_fee();
        let slack = 1e-12 * self.g_h.abs().max(1.0);
        if g < low - slack || g > self.g_h + slack {
            return Err(Error::OutOfSupport {
                value: g,
                low,
                high: self.g_h,
            });
        }
        Ok(((self.g_h - g) / self.liquidity()).clamp(0.0, self.support_width()))
    }

    fn path_x(&self, z: f64) -> f64 {
        self.path.x_at(z).expect("support lies inside the path")
    }

    /// Equilibrium trade size `D*(g) = y_A x̂((g_h − g) / L_B)`.
    pub fn d_star(&self, g: f64) -> Result<f64> {
        let z = self.z_of(g)?;
        Ok(self.market.reserve_a() * self.path_x(z))
    }

    /// Gas-fee density `φ*(g) = v(x̂) / (α* L_B)`.
    pub fn phi_star(&self, g: f64) -> Result<f64> {
        let z = self.z_of(g)?;
        Ok(inverse_advantage(self.path_x(z)) / (self.alpha_star * self.liquidity()))
    }

    /// `P(g̃ > g)`, counting the no-trade event as `g̃ = 0`.
    pub fn gas_ddf(&self, g: f64) -> f64 {
        if g >= self.g_h {
            return 0.0;
        }
        if g < self.base_gas_fee() {
            return self.alpha_star;
        }
        let z = (self.g_h - g) / self.liquidity();
        self.path
            .cumulative_at(z.min(self.support_width()))
            .map_or(self.alpha_star, |c| c.min(self.alpha_star))
    }

    /// `P(D̃ / y_A > d)` for the relative trade size.
    pub fn amount_ddf(&self, d_rel: f64) -> f64 {
        if d_rel >= self.path.x0() {
            return 0.0;
        }
        match self.path.z_at_x(d_rel) {
            Some(z) => self.gas_ddf(self.g_h - self.liquidity() * z),
            None => self.alpha_star,
        }
    }

    /// Expected profit of playing `(g, d_a)` against the equilibrium opponent.
    pub fn response_h(&self, g: f64, d_a: f64) -> Result<f64> {
        self.z_of(g)?;
        finite("d_a", d_a)?;
        if d_a < 0.0 || d_a > self.optimal_amount * (1.0 + 1e-12) {
            return Err(Error::invalid("d_a", "must lie in [0, D̂_A]"));
        }
        Ok(self.response_with_alpha(g, d_a, self.alpha_star))
    }

    /// Response against an opponent who trades with probability `alpha` and
    /// otherwise follows this solution's normalized gas-fee distribution.
    /// Gas fees above `g_h` face an empty upper tail.
    pub(crate) fn response_with_alpha(&self, g: f64, d_a: f64, alpha: f64) -> f64 {
        let first = self.market.first_mover_profit(g, d_a);
        let z = ((self.g_h - g) / self.liquidity()).clamp(0.0, self.support_width());
        if z == 0.0 {
            return first;
        }
        let x = d_a / self.market.reserve_a();
        let loss = self
            .path
            .integrate_to(z, |x_bar| advantage(x, x_bar) * inverse_advantage(x_bar));
        first - alpha / self.support_mass() * self.liquidity() * loss
    }

    pub fn expected_profit(&self) -> f64 {
        self.alpha_star * (self.max_gas_fee - self.g_h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o2(g_low_fraction: f64) -> (MarketParams, EquilibriumSolution) {
        let base = MarketParams::from_liquidity_opportunity(4e6, 2.0, 0.0).unwrap();
        let g_low = g_low_fraction * base.derived().max_gas_fee;
        let m = base.with_base_gas_fee(g_low).unwrap();
        let sol = solve_equilibrium(&m, &SolverConfig::default()).unwrap();
        (m, sol)
    }

    #[test]
    fn no_trade_when_base_fee_too_high() {
        let (m, _) = o2(0.0);
        let top = m.derived().max_gas_fee;
        let m = m.with_base_gas_fee(top).unwrap();
        assert!(matches!(
            solve_equilibrium(&m, &SolverConfig::default()),
            Err(Error::NoTrade { .. })
        ));
    }

    #[test]
    fn partial_participation_alpha_matches_quadrature() {
        let (m, sol) = o2(0.9);
        assert_eq!(sol.case_tag, CaseTag::PartialParticipation);
        assert_eq!(sol.g_h, sol.max_gas_fee);
        assert_eq!(sol.expected_profit, 0.0);
        // Independent quadrature: Simpson on v(x̂(z)) with 2000 panels.
        let width = 0.1 * m.derived().max_gas_fee / 4e6;
        let n = 2000;
        let h = width / n as f64;
        let f = |z: f64| inverse_advantage(sol.path.x_at(z).unwrap());
        let mut s = f(0.0) + f(width);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let simpson = s * h / 3.0;
        assert!(sol.alpha_star > 0.0 && sol.alpha_star < 1.0);
        assert!((sol.alpha_star - simpson).abs() < 1e-6, "{} {}", sol.alpha_star, simpson);
    }

    #[test]
    fn full_participation_profit() {
        let (m, sol) = o2(0.0);
        assert_eq!(sol.case_tag, CaseTag::FullParticipation);
        assert_eq!(sol.alpha_star, 1.0);
        let dq = m.derived();
        let expected = dq.max_gas_fee - m.base_gas_fee() - dq.liquidity_b * sol.z_hat;
        assert!(expected > 0.0);
        assert!((sol.expected_profit - expected).abs() < 1e-9 * dq.max_gas_fee);
        assert_eq!(sol.expected_profit(), sol.expected_profit);
    }

    #[test]
    fn case_boundary_is_continuous() {
        let (m, sol) = o2(0.0);
        let dq = m.derived();
        let boundary = dq.max_gas_fee - dq.liquidity_b * sol.z_hat;
        let at = assemble(&m.with_base_gas_fee(boundary).unwrap(), sol.path.clone()).unwrap();
        assert_eq!(at.alpha_star, 1.0);
        assert!(at.expected_profit.abs() < 1e-9 * dq.max_gas_fee);
        let below = assemble(&m.with_base_gas_fee(boundary * (1.0 - 1e-9)).unwrap(), sol.path.clone()).unwrap();
        let above = assemble(&m.with_base_gas_fee(boundary * (1.0 + 1e-9)).unwrap(), sol.path.clone()).unwrap();
        assert_eq!(below.case_tag, CaseTag::FullParticipation);
        assert_eq!(above.case_tag, CaseTag::PartialParticipation);
        assert!((below.alpha_star - above.alpha_star).abs() < 1e-6);
    }

    #[test]
    fn d_star_and_phi_star_shapes() {
        for frac in [0.0, 0.9] {
            let (m, sol) = o2(frac);
            let lo = m.base_gas_fee();
            let grid: Vec<f64> = (0..200).map(|i| lo + (sol.g_h - lo) * i as f64 / 199.0).collect();
            let d: Vec<f64> = grid.iter().map(|&g| sol.d_star(g).unwrap()).collect();
            let p: Vec<f64> = grid.iter().map(|&g| sol.phi_star(g).unwrap()).collect();
            assert!(d.windows(2).all(|w| w[1] > w[0]));
            assert!(p.windows(2).all(|w| w[1] < w[0]));
            let top = sol.d_star(sol.g_h).unwrap();
            assert!((top - sol.optimal_amount).abs() <= 1e-8 * sol.optimal_amount);
            for (&g, &phi) in grid.iter().zip(&p).step_by(4) {
                let dd = sol.d_star(g).unwrap();
                let ident = phi * sol.alpha_star * m.advantage(dd, dd);
                assert!((ident - 1.0).abs() < 1e-8);
            }
            assert!(sol.d_star(lo - 1.0).is_err());
            assert!(sol.phi_star(sol.g_h * 1.01).is_err());
        }
        let (_, sol) = o2(0.9);
        assert!(sol.d_star(sol.base_gas_fee()).unwrap() < sol.optimal_amount);
    }

    #[test]
    fn density_integrates_to_one() {
        for frac in [0.0, 0.9] {
            let (m, sol) = o2(frac);
            let lo = m.base_gas_fee();
            let n = 10_000;
            let h = (sol.g_h - lo) / n as f64;
            let total: f64 = (0..n)
                .map(|i| {
                    let a = lo + h * i as f64;
                    let b = (a + h).min(sol.g_h);
                    0.5 * (b - a) * (sol.phi_star(a).unwrap() + sol.phi_star(b).unwrap())
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-4, "{total}");
        }
    }

    #[test]
    fn ddf_edges_and_monotonicity() {
        for frac in [0.0, 0.9] {
            let (_, sol) = o2(frac);
            assert_eq!(sol.gas_ddf(0.0), sol.alpha_star);
            assert_eq!(sol.gas_ddf(sol.g_h), 0.0);
            assert_eq!(sol.amount_ddf(sol.path.x0()), 0.0);
            let gs: Vec<f64> = (0..200).map(|i| sol.g_h * 1.01 * i as f64 / 199.0).collect();
            assert!(gs.windows(2).all(|w| sol.gas_ddf(w[1]) <= sol.gas_ddf(w[0])));
            let ds: Vec<f64> = (1..=200).map(|i| sol.path.x0() * 1.01 * i as f64 / 200.0).collect();
            assert!(ds.windows(2).all(|w| sol.amount_ddf(w[1]) <= sol.amount_ddf(w[0])));
        }
        let (_, sol) = o2(0.9);
        assert!((sol.amount_ddf(1e-9) - sol.alpha_star).abs() < 1e-12);
    }

    #[test]
    fn response_at_top_of_support() {
        for frac in [0.0, 0.9] {
            let (m, sol) = o2(frac);
            let h = sol.response_h(sol.g_h, sol.optimal_amount).unwrap();
            let direct = m.first_mover_profit(sol.g_h, sol.optimal_amount);
            assert_eq!(h, direct);
            assert!((h - (sol.max_gas_fee - sol.g_h)).abs() < 1e-8 * sol.max_gas_fee);
            assert!(sol.response_h(sol.g_h, sol.optimal_amount * 1.1).is_err());
            assert!(sol.response_h(m.base_gas_fee() - 1.0, 1.0).is_err());
        }
    }

    #[test]
    fn response_flat_and_maximal_along_d_star() {
        for frac in [0.0, 0.9] {
            let (m, sol) = o2(frac);
            let lo = m.base_gas_fee();
            let value = sol.max_gas_fee - sol.g_h;
            let tol = 1e-4 * (sol.max_gas_fee - lo).max(m.liquidity_b() * 1e-6);
            for i in 0..100 {
                let g = lo + (sol.g_h - lo) * i as f64 / 99.0;
                let d = sol.d_star(g).unwrap();
                let h = sol.response_h(g, d).unwrap();
                assert!((h - value).abs() <= tol, "g={g} h={h} value={value}");
                if i % 10 == 0 {
                    for j in 0..=20 {
                        let dev = sol.optimal_amount * j as f64 / 20.0;
                        assert!(sol.response_h(g, dev).unwrap() <= h + tol);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip_validates() {
        let (_, sol) = o2(0.9);
        let text = serde_json::to_string(&sol).unwrap();
        let back = EquilibriumSolution::from_json(&text).unwrap();
        assert_eq!(back, sol);
        let mut bad = sol.clone();
        bad.alpha_star = 1.5;
        let text = serde_json::to_string(&bad).unwrap();
        assert!(EquilibriumSolution::from_json(&text).is_err());
    }
}
