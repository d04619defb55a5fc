use std::io::Read;

use serde::{Deserialize, Serialize};

use super::classify::{classify_swaps, Classification, ClassifyConfig, LabeledSwap, SwapLabel};
use super::detect::Direction;
use super::duration::{duration_stats, RunStats};
use super::ols::{ols_standardized, OlsFit};
use super::records::{read_blocks, read_swaps, Reject};
use crate::error::{Error, Result};

/// Counts of blocks with 0, 1, 2 and at least 3 swaps of some kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub zero: u64,
    pub one: u64,
    pub two: u64,
    pub three_or_more: u64,
    pub total: u64,
}

impl CountRow {
    fn add(&mut self, count: u64) {
        match count {
            0 => self.zero += 1,
            1 => self.one += 1,
            2 => self.two += 1,
            _ => self.three_or_more += 1,
        }
        self.total += 1;
    }

    fn cells(&self) -> [u64; 4] {
        [self.zero, self.one, self.two, self.three_or_more]
    }
}

fn share(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Blocks by number of arbitrage swaps and by number of swaps, split by
/// whether the block has an arbitrage opportunity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapCountTable {
    pub arbitrage_swaps_in_arbitrage_blocks: CountRow,
    pub arbitrage_swaps_in_non_arbitrage_blocks: CountRow,
    pub swaps_in_arbitrage_blocks: CountRow,
    pub swaps_in_non_arbitrage_blocks: CountRow,
    /// Share of arbitrage blocks among blocks with no arbitrage swap.
    pub arbitrage_share_without_arbitrage_swaps: f64,
    pub arbitrage_share_of_all_blocks: f64,
    /// Share of arbitrage blocks among blocks with 0, 1, 2, 3+ swaps.
    pub arbitrage_share_by_swap_count: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: u64,
    pub mean: f64,
    pub std: f64,
    /// Runs of length 1, 2 and at least 3.
    pub histogram: [u64; 3],
}

impl From<&RunStats> for RunSummary {
    fn from(r: &RunStats) -> Self {
        RunSummary {
            runs: r.runs.len() as u64,
            mean: r.mean,
            std: r.std,
            histogram: r.histogram,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationTable {
    pub non_arbitrage: RunSummary,
    pub arbitrage: RunSummary,
}

/// `[non-arbitrage blocks, arbitrage blocks]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockClassTable {
    pub block_counts: [u64; 2],
    pub swap_counts: [u64; 2],
    pub arbitrage_swap_counts: [u64; 2],
    pub average_non_arbitrage_swaps_per_block: [f64; 2],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfitRow {
    pub profitable: u64,
    pub non_profitable: u64,
    pub profitability: f64,
}

impl ProfitRow {
    fn add(&mut self, profit: f64) {
        if profit > 0.0 {
            self.profitable += 1;
        } else {
            self.non_profitable += 1;
        }
        self.profitability = share(self.profitable, self.profitable + self.non_profitable);
    }
}

/// Profitable swaps; arbitrage swaps are split by how many arbitrage swaps
/// their block holds (1, 2, 3, more than 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitabilityTable {
    pub arbitrage_by_block_count: [ProfitRow; 4],
    pub arbitrage_subtotal: ProfitRow,
    pub non_arbitrage: ProfitRow,
    pub total: ProfitRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMoverBounds {
    pub arbitrage_swaps: u64,
    /// Share of arbitrage swaps depositing less than the first-mover optimum.
    pub below_optimal_amount: f64,
    /// Share of arbitrage swaps paying less gas than the highest profitable fee.
    pub gas_below_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityWarning {
    pub swap_index: usize,
    pub block_number: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub swap_counts: SwapCountTable,
    pub durations: DurationTable,
    pub block_classes: BlockClassTable,
    pub profitability: ProfitabilityTable,
    pub first_mover_bounds: FirstMoverBounds,
    pub data_quality_warnings: Vec<QualityWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub name: String,
    pub sample: String,
    pub response: String,
    pub observations: usize,
    pub fit: Option<OlsFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub classification: Classification,
    pub tables: Tables,
    pub regressions: Vec<RegressionResult>,
    pub rejects: Vec<Reject>,
}

fn build_tables(c: &Classification, durations: DurationTable) -> Tables {
    let mut counts = SwapCountTable {
        arbitrage_swaps_in_arbitrage_blocks: CountRow::default(),
        arbitrage_swaps_in_non_arbitrage_blocks: CountRow::default(),
        swaps_in_arbitrage_blocks: CountRow::default(),
        swaps_in_non_arbitrage_blocks: CountRow::default(),
        arbitrage_share_without_arbitrage_swaps: 0.0,
        arbitrage_share_of_all_blocks: 0.0,
        arbitrage_share_by_swap_count: [0.0; 4],
    };
    let mut classes = BlockClassTable {
        block_counts: [0; 2],
        swap_counts: [0; 2],
        arbitrage_swap_counts: [0; 2],
        average_non_arbitrage_swaps_per_block: [0.0; 2],
    };
    for b in &c.blocks {
        let arb = b.verdict.direction != Direction::None;
        let k = usize::from(arb);
        if arb {
            counts.arbitrage_swaps_in_arbitrage_blocks.add(b.arbitrage_swap_count);
            counts.swaps_in_arbitrage_blocks.add(b.swap_count);
        } else {
            counts.arbitrage_swaps_in_non_arbitrage_blocks.add(b.arbitrage_swap_count);
            counts.swaps_in_non_arbitrage_blocks.add(b.swap_count);
        }
        classes.block_counts[k] += 1;
        classes.swap_counts[k] += b.swap_count;
        classes.arbitrage_swap_counts[k] += b.arbitrage_swap_count;
    }
    let (arb, non) = (
        &counts.arbitrage_swaps_in_arbitrage_blocks,
        &counts.arbitrage_swaps_in_non_arbitrage_blocks,
    );
    counts.arbitrage_share_without_arbitrage_swaps = share(arb.zero, arb.zero + non.zero);
    counts.arbitrage_share_of_all_blocks = share(arb.total, arb.total + non.total);
    let (sa, sn) = (
        counts.swaps_in_arbitrage_blocks.cells(),
        counts.swaps_in_non_arbitrage_blocks.cells(),
    );
    for i in 0..4 {
        counts.arbitrage_share_by_swap_count[i] = share(sa[i], sa[i] + sn[i]);
    }
    for k in 0..2 {
        classes.average_non_arbitrage_swaps_per_block[k] = share(
            classes.swap_counts[k] - classes.arbitrage_swap_counts[k],
            classes.block_counts[k],
        );
    }

    let per_block: std::collections::HashMap<u64, u64> =
        c.blocks.iter().map(|b| (b.block_number, b.arbitrage_swap_count)).collect();
    let mut profitability = ProfitabilityTable {
        arbitrage_by_block_count: [ProfitRow::default(); 4],
        arbitrage_subtotal: ProfitRow::default(),
        non_arbitrage: ProfitRow::default(),
        total: ProfitRow::default(),
    };
    let mut bounds = (0u64, 0u64, 0u64);
    let mut warnings = Vec::new();
    for s in &c.swaps {
        match s.label {
            SwapLabel::ArbitrageSwap => {
                let n = per_block[&s.block_number];
                profitability.arbitrage_by_block_count[(n.min(4) - 1) as usize].add(s.profit_usd);
                profitability.arbitrage_subtotal.add(s.profit_usd);
                bounds.0 += 1;
                bounds.1 += u64::from(s.below_optimal_amount);
                bounds.2 += u64::from(s.gas_below_max);
            }
            SwapLabel::Other => profitability.non_arbitrage.add(s.profit_usd),
        }
        profitability.total.add(s.profit_usd);
        if let Some(message) = &s.warning {
            warnings.push(QualityWarning {
                swap_index: s.index,
                block_number: s.block_number,
                message: message.clone(),
            });
        }
    }
    Tables {
        swap_counts: counts,
        durations,
        block_classes: classes,
        profitability,
        first_mover_bounds: FirstMoverBounds {
            arbitrage_swaps: bounds.0,
            below_optimal_amount: share(bounds.1, bounds.0),
            gas_below_max: share(bounds.2, bounds.0),
        },
        data_quality_warnings: warnings,
    }
}

type Pick = fn(&LabeledSwap) -> f64;

const CONTROLS: [(&str, Pick); 3] = [
    ("base_gas_fee", |s| s.base_gas_fee_usd),
    ("liquidity", |s| s.liquidity_usd),
    ("opportunity", |s| s.opportunity),
];

fn regress(name: &str, sample: &str, swaps: &[&LabeledSwap], response: (&str, Pick), extra: Option<(&str, Pick)>) -> RegressionResult {
    let mut regressors: Vec<(&str, Pick)> = CONTROLS.to_vec();
    regressors.extend(extra);
    let names: Vec<String> = regressors.iter().map(|(n, _)| n.to_string()).collect();
    let columns: Vec<Vec<f64>> = regressors
        .iter()
        .map(|(_, f)| swaps.iter().map(|s| f(s)).collect())
        .collect();
    let y: Vec<f64> = swaps.iter().map(|s| (response.1)(s)).collect();
    let (fit, error) = match ols_standardized(&names, &columns, &y) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    RegressionResult {
        name: name.into(),
        sample: sample.into(),
        response: response.0.into(),
        observations: swaps.len(),
        fit,
        error,
    }
}

fn regressions(c: &Classification) -> Vec<RegressionResult> {
    let per_block: std::collections::HashMap<u64, u64> =
        c.blocks.iter().map(|b| (b.block_number, b.arbitrage_swap_count)).collect();
    let arbitrage = c.swaps.iter().filter(|s| s.label == SwapLabel::ArbitrageSwap);
    let priced: Vec<&LabeledSwap> = arbitrage.clone().filter(|s| s.priority_fee_per_gas > 0.0).collect();
    let crowded: Vec<&LabeledSwap> = arbitrage.filter(|s| per_block[&s.block_number] >= 3).collect();
    let priced_label = "arbitrage swaps with a positive priority fee";
    let crowded_label = "arbitrage swaps in blocks with at least three arbitrage swaps";
    let amount: (&str, Pick) = ("relative_amount", |s| s.relative_amount);
    let gas: (&str, Pick) = ("gas_fee", |s| s.gas_fee_usd);
    vec![
        regress("relative_amount_on_gas_fee", priced_label, &priced, amount, Some(gas)),
        regress("relative_amount_crowded", crowded_label, &crowded, amount, None),
        regress("profit", priced_label, &priced, ("profit", |s| s.profit_usd), None),
        regress("gas_fee_crowded", crowded_label, &crowded, gas, None),
    ]
}

/// Full pipeline on block and swap CSV inputs.
pub fn analyze(blocks_csv: impl Read, swaps_csv: impl Read, cfg: &ClassifyConfig) -> Result<AnalysisReport> {
    let (mut blocks, mut rejects) = read_blocks(blocks_csv)?;
    let (swaps, swap_rejects) = read_swaps(swaps_csv)?;
    blocks.sort_by_key(|b| b.block_number);
    let mut classification = classify_swaps(&blocks, &swaps, cfg)?;
    // Swap indices refer to parsed rows; rejects from parsing come first.
    rejects.extend(swap_rejects);
    rejects.append(&mut classification.rejects);
    let verdicts: Vec<(u64, Direction)> = classification
        .blocks
        .iter()
        .map(|b| (b.block_number, b.verdict.direction))
        .collect();
    let stats = duration_stats(&verdicts)?;
    let durations = DurationTable {
        non_arbitrage: (&stats.non_arbitrage).into(),
        arbitrage: (&stats.arbitrage).into(),
    };
    let tables = build_tables(&classification, durations);
    let regressions = regressions(&classification);
    Ok(AnalysisReport {
        classification,
        tables,
        regressions,
        rejects,
    })
}

fn pretty(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

impl AnalysisReport {
    pub fn tables_json(&self) -> Result<Vec<u8>> {
        pretty(&self.tables)
    }

    pub fn regressions_json(&self) -> Result<Vec<u8>> {
        pretty(&self.regressions)
    }

    pub fn rejects_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["file", "row", "block_number", "reason"])?;
        for r in &self.rejects {
            w.write_record([
                r.file.clone(),
                r.row.to_string(),
                r.block_number.map(|b| b.to_string()).unwrap_or_default(),
                r.reason.clone(),
            ])?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}
