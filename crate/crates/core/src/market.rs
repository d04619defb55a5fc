//! Constant-product pool mechanics and single-block arbitrage payoffs.
//!
//! The game fixes the direction "deposit A, withdraw B" (`d_A > 0`,
//! `d_B < 0`). The mirrored direction is handled by swapping asset roles
//! before building a [`MarketParams`].

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};

/// Reserves of a two-asset constant-product pool and its proportional fee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolState {
    reserve_a: f64,
    reserve_b: f64,
    fee_rate: f64,
}

impl PoolState {
    pub fn new(reserve_a: f64, reserve_b: f64, fee_rate: f64) -> Result<Self> {
        finite("reserve_a", reserve_a)?;
        finite("reserve_b", reserve_b)?;
        finite("fee_rate", fee_rate)?;
        if reserve_a <= 0.0 {
            return Err(Error::invalid("reserve_a", "must be positive"));
        }
        if reserve_b <= 0.0 {
            return Err(Error::invalid("reserve_b", "must be positive"));
        }
        if !(0.0..1.0).contains(&fee_rate) {
            return Err(Error::invalid("fee_rate", "must lie in [0, 1)"));
        }
        Ok(Self {
            reserve_a,
            reserve_b,
            fee_rate,
        })
    }

    pub fn reserve_a(&self) -> f64 {
        self.reserve_a
    }

    pub fn reserve_b(&self) -> f64 {
        self.reserve_b
    }

    pub fn fee_rate(&self) -> f64 {
        self.fee_rate
    }

    /// Change in the B reserve when `d_a` units of A are deposited.
    pub fn quote_delta_b(&self, d_a: f64) -> Result<f64> {
        finite("d_a", d_a)?;
        if d_a <= 0.0 {
            return Err(Error::invalid("d_a", "deposit must be positive"));
        }
        Ok(self.delta_b_unchecked(d_a))
    }

    /// `d_B = -y_B d_A / (y_A + d_A)`, valid for any `d_a > -y_A`.
    fn delta_b_unchecked(&self, d_a: f64) -> f64 {
        -self.reserve_b * d_a / (self.reserve_a + d_a)
    }

    /// Pool after a trade of `d_a` units of A (negative withdraws A). The
    /// trading fee is paid to liquidity providers and never enters the pool.
    pub fn apply_trade(&self, d_a: f64) -> Result<PoolState> {
        finite("d_a", d_a)?;
        if d_a <= -self.reserve_a {
            return Err(Error::invalid("d_a", "would drain the A reserve"));
        }
        if d_a == 0.0 {
            return Ok(*self);
        }
        let reserve_a = self.reserve_a + d_a;
        Ok(PoolState {
            reserve_a,
            reserve_b: self.reserve_a * self.reserve_b / reserve_a,
            fee_rate: self.fee_rate,
        })
    }
}

/// Pool plus CEX prices and the base gas fee, all monetary values in USD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketConfig", into = "MarketConfig")]
pub struct MarketParams {
    pool: PoolState,
    price_a: f64,
    price_b: f64,
    base_gas_fee: f64,
}

/// Flat JSON form accepted from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub reserve_a: f64,
    pub reserve_b: f64,
    pub fee_rate: f64,
    pub price_a: f64,
    pub price_b: f64,
    pub base_gas_fee: f64,
}

impl MarketParams {
    pub fn new(pool: PoolState, price_a: f64, price_b: f64, base_gas_fee: f64) -> Result<Self> {
        finite("price_a", price_a)?;
        finite("price_b", price_b)?;
        finite("base_gas_fee", base_gas_fee)?;
        if price_a <= 0.0 {
            return Err(Error::invalid("price_a", "must be positive"));
        }
        if price_b <= 0.0 {
            return Err(Error::invalid("price_b", "must be positive"));
        }
        if base_gas_fee < 0.0 {
            return Err(Error::invalid("base_gas_fee", "must be non-negative"));
        }
        Ok(Self {
            pool,
            price_a,
            price_b,
            base_gas_fee,
        })
    }

    /// Market with `reserve_a = 1`, `price_b = 1` and no fee, parametrized
    /// directly by liquidity `L_B` and opportunity `O`.
    pub fn from_liquidity_opportunity(
        liquidity_b: f64,
        opportunity: f64,
        base_gas_fee: f64,
    ) -> Result<Self> {
        finite("liquidity_b", liquidity_b)?;
        finite("opportunity", opportunity)?;
        if liquidity_b <= 0.0 {
            return Err(Error::invalid("liquidity_b", "must be positive"));
        }
        if opportunity <= 0.0 {
            return Err(Error::invalid("opportunity", "must be positive"));
        }
        let pool = PoolState::new(1.0, liquidity_b, 0.0)?;
        Self::new(pool, liquidity_b / opportunity, 1.0, base_gas_fee)
    }

    pub fn from_config(cfg: &MarketConfig) -> Result<Self> {
        let pool = PoolState::new(cfg.reserve_a, cfg.reserve_b, cfg.fee_rate)?;
        Self::new(pool, cfg.price_a, cfg.price_b, cfg.base_gas_fee)
    }

    pub fn to_config(&self) -> MarketConfig {
        (*self).into()
    }

    pub fn pool(&self) -> &PoolState {
        &self.pool
    }

    pub fn price_a(&self) -> f64 {
        self.price_a
    }

    pub fn price_b(&self) -> f64 {
        self.price_b
    }

    pub fn base_gas_fee(&self) -> f64 {
        self.base_gas_fee
    }

    pub fn reserve_a(&self) -> f64 {
        self.pool.reserve_a
    }

    /// Same market with a different base gas fee.
    pub fn with_base_gas_fee(&self, base_gas_fee: f64) -> Result<Self> {
        Self::new(self.pool, self.price_a, self.price_b, base_gas_fee)
    }

    /// Scale both reserves by `factor`: liquidity scales, `O` is unchanged.
    pub fn with_scaled_reserves(&self, factor: f64) -> Result<Self> {
        let pool = PoolState::new(
            self.pool.reserve_a * factor,
            self.pool.reserve_b * factor,
            self.pool.fee_rate,
        )?;
        Self::new(pool, self.price_a, self.price_b, self.base_gas_fee)
    }

    /// Reprice asset A so that the opportunity becomes `opportunity`, keeping
    /// reserves (and therefore `L_B`) fixed.
    pub fn with_opportunity(&self, opportunity: f64) -> Result<Self> {
        finite("opportunity", opportunity)?;
        if opportunity <= 0.0 {
            return Err(Error::invalid("opportunity", "must be positive"));
        }
        let price_a = self.liquidity_b()
            / (self.pool.reserve_a * (1.0 + self.pool.fee_rate) * opportunity);
        Self::new(self.pool, price_a, self.price_b, self.base_gas_fee)
    }

    /// `L_B = y_B p_B`.
    pub fn liquidity_b(&self) -> f64 {
        self.pool.reserve_b * self.price_b
    }

    /// `O = y_B p_B / (y_A p_A (1 + f))`.
    pub fn opportunity(&self) -> f64 {
        self.liquidity_b() / (self.pool.reserve_a * self.price_a * (1.0 + self.pool.fee_rate))
    }

    /// Signed net profit of an arbitrage round trip with deposit `d_a`
    /// (negative withdraws A) and gas fee `g`. The fee multiplies whichever
    /// leg is deposited into the pool.
    pub fn net_profit(&self, d_a: f64, g: f64) -> Result<f64> {
        finite("d_a", d_a)?;
        finite("g", g)?;
        if d_a <= -self.pool.reserve_a {
            return Err(Error::invalid("d_a", "would drain the A reserve"));
        }
        let d_b = self.pool.delta_b_unchecked(d_a);
        Ok(signed_leg_profit(
            d_a,
            d_b,
            self.price_a,
            self.price_b,
            self.pool.fee_rate,
            g,
        ))
    }

    pub fn derived(&self) -> DerivedQuantities {
        let liquidity_b = self.liquidity_b();
        let opportunity = self.opportunity();
        let (optimal_amount, max_gas_fee) = if opportunity > 1.0 {
            let root = opportunity.sqrt();
            let gap = 1.0 - 1.0 / root;
            (
                (root - 1.0) * self.pool.reserve_a,
                liquidity_b * gap * gap,
            )
        } else {
            (0.0, 0.0)
        };
        DerivedQuantities {
            liquidity_b,
            opportunity,
            optimal_amount,
            max_gas_fee,
        }
    }

    /// `R_F(g, d) = d (y_B p_B / (y_A + d) - (1 + f) p_A) - g`.
    pub fn first_mover_profit(&self, g: f64, d_a: f64) -> f64 {
        let pool = &self.pool;
        d_a * (pool.reserve_b * self.price_b / (pool.reserve_a + d_a)
            - (1.0 + pool.fee_rate) * self.price_a)
            - g
    }

    /// Marginal first-mover profit `dR_F / dd_A`.
    pub fn first_mover_marginal(&self, d_a: f64) -> f64 {
        let pool = &self.pool;
        let denom = pool.reserve_a + d_a;
        pool.reserve_a * pool.reserve_b * self.price_b / (denom * denom)
            - (1.0 + pool.fee_rate) * self.price_a
    }

    /// First-mover advantage `V(d; d_bar)`, the loss from trading `d_a` after
    /// a competitor's `d_bar` rather than before it.
    pub fn first_mover_advantage(&self, d_a: f64, d_bar: f64) -> Result<f64> {
        finite("d_a", d_a)?;
        finite("d_bar", d_bar)?;
        if d_a <= 0.0 {
            return Err(Error::invalid("d_a", "must be positive"));
        }
        if d_bar <= 0.0 {
            return Err(Error::invalid("d_bar", "must be positive"));
        }
        Ok(self.advantage(d_a, d_bar))
    }

    /// Unchecked first-mover advantage; any non-negative arguments.
    pub(crate) fn advantage(&self, d_a: f64, d_bar: f64) -> f64 {
        let y_a = self.pool.reserve_a;
        let shifted = y_a + d_bar;
        (d_a / (y_a + d_a) - d_a * y_a / (shifted * (shifted + d_a))) * self.liquidity_b()
    }

    /// `R_S(g, d; d_bar) = R_F(g, d) - V(d; d_bar)`.
    pub fn second_mover_profit(&self, g: f64, d_a: f64, d_bar: f64) -> Result<f64> {
        finite("d_a", d_a)?;
        finite("d_bar", d_bar)?;
        if d_a < 0.0 {
            return Err(Error::invalid("d_a", "must be non-negative"));
        }
        if d_bar < 0.0 {
            return Err(Error::invalid("d_bar", "must be non-negative"));
        }
        Ok(self.first_mover_profit(g, d_a) - self.advantage(d_a, d_bar))
    }
}

pub(crate) fn signed_leg_profit(
    d_a: f64,
    d_b: f64,
    price_a: f64,
    price_b: f64,
    fee_rate: f64,
    g: f64,
) -> f64 {
    let fee_a = if d_a > 0.0 { fee_rate } else { 0.0 };
    let fee_b = if d_b > 0.0 { fee_rate } else { 0.0 };
    -(1.0 + fee_a) * d_a * price_a - (1.0 + fee_b) * d_b * price_b - g
}

/// Closed-form quantities of a market: liquidity, opportunity, the
/// first-mover optimal amount and the highest profitable gas fee. Both are
/// clamped to zero inside the no-trade band (`O <= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub liquidity_b: f64,
    pub opportunity: f64,
    pub optimal_amount: f64,
    pub max_gas_fee: f64,
}

impl TryFrom<MarketConfig> for MarketParams {
    type Error = Error;

    fn try_from(cfg: MarketConfig) -> Result<Self> {
        Self::from_config(&cfg)
    }
}

impl From<MarketParams> for MarketConfig {
    fn from(m: MarketParams) -> Self {
        MarketConfig {
            reserve_a: m.pool.reserve_a,
            reserve_b: m.pool.reserve_b,
            fee_rate: m.pool.fee_rate,
            price_a: m.price_a,
            price_b: m.price_b,
            base_gas_fee: m.base_gas_fee,
        }
    }
}
