use serde::{Deserialize, Serialize};

use super::records::{BlockRecord, DepositSide, SwapRecord};
use crate::market::signed_leg_profit;
use crate::tolerance::SWAP_QUOTE_DEVIATION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Deposit A into the pool and withdraw B.
    DepositA,
    DepositB,
    None,
}

impl Direction {
    pub fn matches(self, side: DepositSide) -> bool {
        matches!(
            (self, side),
            (Direction::DepositA, DepositSide::A) | (Direction::DepositB, DepositSide::B)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageVerdict {
    pub direction: Direction,
    /// Highest profitable gas fee on the more favorable side.
    pub max_gas_fee_usd: f64,
    pub base_gas_fee_usd: f64,
    /// `max` of the two one-sided opportunities.
    pub opportunity: f64,
    /// Liquidity of the favorable side: `y_B p_B` for deposits of A,
    /// `y_A p_A` for deposits of B.
    pub liquidity_usd: f64,
    /// First-mover optimal deposit on the favorable side, in deposit tokens.
    pub optimal_amount: f64,
}

struct Side {
    opportunity: f64,
    liquidity: f64,
    reserve_in: f64,
}

impl Side {
    fn max_gas_fee(&self) -> f64 {
        if self.opportunity > 1.0 {
            self.liquidity * (1.0 - self.opportunity.powf(-0.5)).powi(2)
        } else {
            0.0
        }
    }

    fn optimal_amount(&self) -> f64 {
        (self.opportunity.sqrt() - 1.0).max(0.0) * self.reserve_in
    }
}

/// Arbitrage direction of a block, if any side clears the estimated base gas
/// fee `base_fee_per_gas · gas_used_estimate · p_A`. The two one-sided
/// opportunities multiply to `(1+f)^{-2} <= 1`, so at most one exceeds 1.
pub fn detect_arbitrage(block: &BlockRecord, gas_used_estimate: f64, fee_rate: f64) -> ArbitrageVerdict {
    let value_a = block.reserve_a_prev * block.cex_price_a;
    let value_b = block.reserve_b_prev * block.cex_price_b;
    let deposit_a = Side {
        opportunity: value_b / (value_a * (1.0 + fee_rate)),
        liquidity: value_b,
        reserve_in: block.reserve_a_prev,
    };
    let deposit_b = Side {
        opportunity: value_a / (value_b * (1.0 + fee_rate)),
        liquidity: value_a,
        reserve_in: block.reserve_b_prev,
    };
    let base = block.base_fee_per_gas * gas_used_estimate * block.cex_price_a;
    let (side, direction) = if deposit_a.opportunity >= deposit_b.opportunity {
        (deposit_a, Direction::DepositA)
    } else {
        (deposit_b, Direction::DepositB)
    };
    let top = side.max_gas_fee();
    ArbitrageVerdict {
        direction: if side.opportunity > 1.0 && top > base {
            direction
        } else {
            Direction::None
        },
        max_gas_fee_usd: top,
        base_gas_fee_usd: base,
        opportunity: side.opportunity,
        liquidity_usd: side.liquidity,
        optimal_amount: side.optimal_amount(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapProfit {
    pub profit_usd: f64,
    pub gas_fee_usd: f64,
    /// `|amount_out − quote| / quote` against the constant-product quote.
    pub quote_deviation: f64,
    /// Set when the quote deviation exceeds the configured tolerance.
    pub warning: Option<String>,
}

/// Signed `(d_A, d_B)` of a swap from the pool's point of view.
pub(crate) fn signed_amounts(swap: &SwapRecord) -> (f64, f64) {
    match swap.deposit_side {
        DepositSide::A => (swap.amount_in, -swap.amount_out),
        DepositSide::B => (-swap.amount_out, swap.amount_in),
    }
}

pub(crate) fn gas_fee_usd(block: &BlockRecord, swap: &SwapRecord) -> f64 {
    swap.gas_used * swap.gas_price * block.cex_price_a
}

/// Net USD profit of a swap, valuing both legs at CEX prices with the
/// proportional fee on the bought leg, less gas converted at `p_A`.
pub fn swap_profit(block: &BlockRecord, swap: &SwapRecord, fee_rate: f64) -> SwapProfit {
    swap_profit_with_tolerance(block, swap, fee_rate, SWAP_QUOTE_DEVIATION)
}

pub(crate) fn swap_profit_with_tolerance(
    block: &BlockRecord,
    swap: &SwapRecord,
    fee_rate: f64,
    tolerance: f64,
) -> SwapProfit {
    let (d_a, d_b) = signed_amounts(swap);
    let gas = gas_fee_usd(block, swap);
    let profit = signed_leg_profit(d_a, d_b, block.cex_price_a, block.cex_price_b, fee_rate, gas);
    let (reserve_in, reserve_out) = match swap.deposit_side {
        DepositSide::A => (block.reserve_a_prev, block.reserve_b_prev),
        DepositSide::B => (block.reserve_b_prev, block.reserve_a_prev),
    };
    let quote = reserve_out * swap.amount_in / (reserve_in + swap.amount_in);
    let deviation = (swap.amount_out - quote).abs() / quote;
    SwapProfit {
        profit_usd: profit,
        gas_fee_usd: gas,
        quote_deviation: deviation,
        warning: (deviation > tolerance).then(|| {
            format!("amount_out deviates {:.2}% from the constant-product quote", 100.0 * deviation)
        }),
    }
}
