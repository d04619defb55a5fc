use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BLOCK_HEADER: [&str; 6] = [
    "block_number",
    "reserve_a_prev",
    "reserve_b_prev",
    "base_fee_per_gas",
    "cex_price_a",
    "cex_price_b",
];

pub const SWAP_HEADER: [&str; 7] = [
    "block_number",
    "deposit_side",
    "amount_in",
    "amount_out",
    "gas_used",
    "gas_price",
    "priority_fee_per_gas",
];

/// Pool state after the previous block plus the block's CEX prices. The A
/// price is the one-second extreme most favorable to arbitrage in the block
/// interval, chosen upstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub block_number: u64,
    pub reserve_a_prev: f64,
    pub reserve_b_prev: f64,
    /// ETH per gas.
    pub base_fee_per_gas: f64,
    pub cex_price_a: f64,
    pub cex_price_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DepositSide {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapRecord {
    pub block_number: u64,
    pub deposit_side: DepositSide,
    pub amount_in: f64,
    pub amount_out: f64,
    pub gas_used: f64,
    /// ETH per gas.
    pub gas_price: f64,
    #[serde(default)]
    pub priority_fee_per_gas: f64,
}

/// A fixture row left out of the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reject {
    pub file: String,
    /// 1-based data row, not counting the header.
    pub row: u64,
    pub block_number: Option<u64>,
    pub reason: String,
}

impl BlockRecord {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let positive = [
            ("reserve_a_prev", self.reserve_a_prev),
            ("reserve_b_prev", self.reserve_b_prev),
            ("cex_price_a", self.cex_price_a),
            ("cex_price_b", self.cex_price_b),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.base_fee_per_gas.is_finite() && self.base_fee_per_gas >= 0.0) {
            return Err(format!("base_fee_per_gas must be non-negative, got {}", self.base_fee_per_gas));
        }
        Ok(())
    }
}

impl SwapRecord {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [("amount_in", self.amount_in), ("amount_out", self.amount_out)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("gas_used", self.gas_used),
            ("gas_price", self.gas_price),
            ("priority_fee_per_gas", self.priority_fee_per_gas),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str], file: &'static str) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::invalid(
            file,
            format!("header must be `{}`, got `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

fn read_rows<T, R>(
    input: R,
    expected: &[&str],
    file: &'static str,
    number: impl Fn(&T) -> u64,
    validate: impl Fn(&T) -> std::result::Result<(), String>,
) -> Result<(Vec<T>, Vec<Reject>)>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, expected, file)?;
    let mut rows = Vec::new();
    let mut rejects = Vec::new();
    for (i, rec) in reader.deserialize::<T>().enumerate() {
        let row = i as u64 + 1;
        match rec {
            Ok(r) => match validate(&r) {
                Ok(()) => rows.push(r),
                Err(reason) => rejects.push(Reject {
                    file: file.into(),
                    row,
                    block_number: Some(number(&r)),
                    reason,
                }),
            },
            Err(e) => rejects.push(Reject {
                file: file.into(),
                row,
                block_number: None,
                reason: format!("unparseable row: {e}"),
            }),
        }
    }
    Ok((rows, rejects))
}

/// Blocks CSV rows; malformed or invalid rows, and repeated block numbers,
/// become rejects.
pub fn read_blocks(input: impl Read) -> Result<(Vec<BlockRecord>, Vec<Reject>)> {
    let (rows, mut rejects) = read_rows(input, &BLOCK_HEADER, "blocks", |b: &BlockRecord| b.block_number, BlockRecord::validate)?;
    let mut seen = std::collections::HashSet::new();
    let mut kept = Vec::with_capacity(rows.len());
    for (i, b) in rows.into_iter().enumerate() {
        if seen.insert(b.block_number) {
            kept.push(b);
        } else {
            rejects.push(Reject {
                file: "blocks".into(),
                row: i as u64 + 1,
                block_number: Some(b.block_number),
                reason: "duplicate block number".into(),
            });
        }
    }
    Ok((kept, rejects))
}

pub fn read_swaps(input: impl Read) -> Result<(Vec<SwapRecord>, Vec<Reject>)> {
    read_rows(input, &SWAP_HEADER, "swaps", |s: &SwapRecord| s.block_number, SwapRecord::validate)
}
