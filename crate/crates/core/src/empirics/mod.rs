//! Offline replay of the arbitrage measurement pipeline: block and swap
//! fixtures, arbitrage detection, swap classification and profit, run
//! durations and standardized regressions.

mod classify;
mod detect;
mod duration;
mod ols;
mod pipeline;
mod records;

pub use classify::{classify_swaps, BlockSummary, Classification, ClassifyConfig, LabeledSwap, SwapLabel};
pub use detect::{detect_arbitrage, swap_profit, ArbitrageVerdict, Direction, SwapProfit};
pub use duration::{duration_stats, DurationStats, RunStats};
pub use ols::{ols_standardized, OlsFit};
pub use pipeline::{analyze, AnalysisReport, RegressionResult, Tables};
pub use records::{read_blocks, read_swaps, BlockRecord, DepositSide, Reject, SwapRecord};
