use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::detect::{detect_arbitrage, signed_amounts, swap_profit_with_tolerance, ArbitrageVerdict, Direction};
use super::records::{BlockRecord, DepositSide, Reject, SwapRecord};
use crate::error::{Error, Result};
use crate::tolerance::SWAP_QUOTE_DEVIATION;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub fee_rate: f64,
    pub gas_used_estimate: f64,
    /// Gas is paid in asset A, so gas converts to USD at `p_A`.
    pub gas_token_is_a: bool,
    pub quote_tolerance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            fee_rate: 0.003,
            gas_used_estimate: 107_176.0,
            gas_token_is_a: true,
            quote_tolerance: SWAP_QUOTE_DEVIATION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapLabel {
    ArbitrageSwap,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSwap {
    /// Position in the input swap list.
    pub index: usize,
    pub block_number: u64,
    pub deposit_side: DepositSide,
    pub label: SwapLabel,
    pub profit_usd: f64,
    pub gas_fee_usd: f64,
    /// `base_fee_per_gas · gas_used · p_A` with the swap's own gas usage.
    pub base_gas_fee_usd: f64,
    /// `max(|d_A| / y_A, |d_B| / y_B)`.
    pub relative_amount: f64,
    /// `y_B p_B` for deposits of A, `y_A p_A` for deposits of B.
    pub liquidity_usd: f64,
    pub opportunity: f64,
    pub priority_fee_per_gas: f64,
    pub below_optimal_amount: bool,
    pub gas_below_max: bool,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub block_number: u64,
    pub verdict: ArbitrageVerdict,
    pub swap_count: u64,
    pub arbitrage_swap_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub blocks: Vec<BlockSummary>,
    pub swaps: Vec<LabeledSwap>,
    pub rejects: Vec<Reject>,
}

/// Label every swap: an arbitrage swap trades in the detected direction of
/// an arbitrage block. Swaps whose block is missing are rejected.
pub fn classify_swaps(blocks: &[BlockRecord], swaps: &[SwapRecord], cfg: &ClassifyConfig) -> Result<Classification> {
    if !cfg.gas_token_is_a {
        return Err(Error::Unsupported(
            "gas fees convert to USD at the price of asset A; pairs whose asset A is not the gas token are not supported".into(),
        ));
    }
    let mut summaries: Vec<BlockSummary> = blocks
        .iter()
        .map(|b| BlockSummary {
            block_number: b.block_number,
            verdict: detect_arbitrage(b, cfg.gas_used_estimate, cfg.fee_rate),
            swap_count: 0,
            arbitrage_swap_count: 0,
        })
        .collect();
    let index: HashMap<u64, usize> = blocks.iter().enumerate().map(|(i, b)| (b.block_number, i)).collect();
    let mut labeled = Vec::with_capacity(swaps.len());
    let mut rejects = Vec::new();
    for (i, s) in swaps.iter().enumerate() {
        let Some(&bi) = index.get(&s.block_number) else {
            rejects.push(Reject {
                file: "swaps".into(),
                row: i as u64 + 1,
                block_number: Some(s.block_number),
                reason: "orphan swap: block not present".into(),
            });
            continue;
        };
        let block = &blocks[bi];
        let summary = &mut summaries[bi];
        let verdict = summary.verdict;
        let label = if verdict.direction != Direction::None && verdict.direction.matches(s.deposit_side) {
            SwapLabel::ArbitrageSwap
        } else {
            SwapLabel::Other
        };
        summary.swap_count += 1;
        if label == SwapLabel::ArbitrageSwap {
            summary.arbitrage_swap_count += 1;
        }
        let profit = swap_profit_with_tolerance(block, s, cfg.fee_rate, cfg.quote_tolerance);
        let (d_a, d_b) = signed_amounts(s);
        labeled.push(LabeledSwap {
            index: i,
            block_number: s.block_number,
            deposit_side: s.deposit_side,
            label,
            profit_usd: profit.profit_usd,
            gas_fee_usd: profit.gas_fee_usd,
            base_gas_fee_usd: block.base_fee_per_gas * s.gas_used * block.cex_price_a,
            relative_amount: (d_a.abs() / block.reserve_a_prev).max(d_b.abs() / block.reserve_b_prev),
            liquidity_usd: match s.deposit_side {
                DepositSide::A => block.reserve_b_prev * block.cex_price_b,
                DepositSide::B => block.reserve_a_prev * block.cex_price_a,
            },
            opportunity: verdict.opportunity,
            priority_fee_per_gas: s.priority_fee_per_gas,
            below_optimal_amount: s.amount_in < verdict.optimal_amount,
            gas_below_max: profit.gas_fee_usd < verdict.max_gas_fee_usd,
            warning: profit.warning,
        });
    }
    Ok(Classification {
        blocks: summaries,
        swaps: labeled,
        rejects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(n: u64, y_b: f64) -> BlockRecord {
        BlockRecord {
            block_number: n,
            reserve_a_prev: 1000.0,
            reserve_b_prev: y_b,
            base_fee_per_gas: 1e-9,
            cex_price_a: 2000.0,
            cex_price_b: 1.0,
        }
    }

    fn swap(n: u64, side: DepositSide) -> SwapRecord {
        SwapRecord {
            block_number: n,
            deposit_side: side,
            amount_in: 1.0,
            amount_out: 1.0,
            gas_used: 1e5,
            gas_price: 2e-9,
            priority_fee_per_gas: 1e-9,
        }
    }

    #[test]
    fn labels_partition_and_orphans() {
        let blocks = [block(1, 2e6), block(2, 3e6), block(3, 1.4e6)];
        let swaps = [
            swap(1, DepositSide::A),
            swap(2, DepositSide::A),
            swap(2, DepositSide::B),
            swap(3, DepositSide::B),
            swap(9, DepositSide::A),
        ];
        let c = classify_swaps(&blocks, &swaps, &ClassifyConfig::default()).unwrap();
        let labels: Vec<SwapLabel> = c.swaps.iter().map(|s| s.label).collect();
        use SwapLabel::*;
        assert_eq!(labels, vec![Other, ArbitrageSwap, Other, ArbitrageSwap]);
        assert_eq!(c.rejects.len(), 1);
        assert_eq!(c.rejects[0].row, 5);
        assert_eq!(c.swaps.len() + c.rejects.len(), swaps.len());
        assert_eq!(c.blocks[1].swap_count, 2);
        assert_eq!(c.blocks[1].arbitrage_swap_count, 1);
        assert_eq!(c.blocks[0].verdict.direction, Direction::None);
    }

    #[test]
    fn non_gas_token_pairs_fail() {
        let cfg = ClassifyConfig {
            gas_token_is_a: false,
            ..ClassifyConfig::default()
        };
        assert!(matches!(classify_swaps(&[], &[], &cfg), Err(Error::Unsupported(_))));
    }
}
