use serde::{Deserialize, Serialize};

use super::detect::Direction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub runs: Vec<u64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Runs of length 1, 2 and at least 3.
    pub histogram: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    /// Consecutive blocks sharing the same arbitrage direction.
    pub arbitrage: RunStats,
    /// Consecutive blocks without an arbitrage opportunity.
    pub non_arbitrage: RunStats,
}

impl RunStats {
    fn from_runs(runs: Vec<u64>) -> Self {
        let n = runs.len() as f64;
        let (mean, std) = if runs.is_empty() {
            (0.0, 0.0)
        } else {
            let mean = runs.iter().sum::<u64>() as f64 / n;
            let var = runs.iter().map(|&r| (r as f64 - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        let mut histogram = [0; 3];
        for &r in &runs {
            histogram[(r.min(3) - 1) as usize] += 1;
        }
        RunStats {
            runs,
            mean,
            std,
            histogram,
        }
    }
}

/// Run lengths of a verdict sequence ordered by block number. Block numbers
/// must be consecutive; otherwise the missing ranges are reported.
pub fn duration_stats(blocks: &[(u64, Direction)]) -> Result<DurationStats> {
    let mut missing = Vec::new();
    for w in blocks.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        if b <= a {
            return Err(Error::invalid("blocks", format!("block {b} follows block {a}")));
        }
        if b > a + 1 {
            missing.push((a + 1, b - 1));
        }
    }
    if !missing.is_empty() {
        return Err(Error::BlockGaps { missing });
    }
    let mut arbitrage = Vec::new();
    let mut quiet = Vec::new();
    let mut i = 0;
    while i < blocks.len() {
        let d = blocks[i].1;
        let start = i;
        while i < blocks.len() && blocks[i].1 == d {
            i += 1;
        }
        let len = (i - start) as u64;
        if d == Direction::None {
            quiet.push(len);
        } else {
            arbitrage.push(len);
        }
    }
    Ok(DurationStats {
        arbitrage: RunStats::from_runs(arbitrage),
        non_arbitrage: RunStats::from_runs(quiet),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{DepositA as A, DepositB as B, None as N};

    fn seq(ds: &[Direction]) -> Vec<(u64, Direction)> {
        ds.iter().enumerate().map(|(i, &d)| (100 + i as u64, d)).collect()
    }

    #[test]
    fn hand_counted_sequence() {
        let s = duration_stats(&seq(&[A, A, N, B, N, N])).unwrap();
        assert_eq!(s.arbitrage.runs, vec![2, 1]);
        assert_eq!(s.non_arbitrage.runs, vec![1, 2]);
        assert_eq!(s.arbitrage.mean, 1.5);
        assert_eq!(s.arbitrage.std, 0.5);
        assert_eq!(s.arbitrage.histogram, [1, 1, 0]);
    }

    #[test]
    fn direction_change_splits_runs() {
        let s = duration_stats(&seq(&[A, B, B, B, A])).unwrap();
        assert_eq!(s.arbitrage.runs, vec![1, 3, 1]);
        assert_eq!(s.arbitrage.histogram, [2, 0, 1]);
        assert!(s.non_arbitrage.runs.is_empty());
        assert_eq!(s.non_arbitrage.mean, 0.0);
    }

    #[test]
    fn alternating_sequence_has_unit_runs() {
        let ds: Vec<Direction> = (0..20).map(|i| if i % 2 == 0 { A } else { N }).collect();
        let s = duration_stats(&seq(&ds)).unwrap();
        assert!(s.arbitrage.runs.iter().chain(&s.non_arbitrage.runs).all(|&r| r == 1));
        assert_eq!(s.arbitrage.runs.len() + s.non_arbitrage.runs.len(), 20);
        assert_eq!(s.arbitrage.std, 0.0);
    }

    #[test]
    fn gaps_are_listed() {
        let blocks = vec![(1, A), (2, N), (5, N), (6, A), (9, N)];
        match duration_stats(&blocks) {
            Err(Error::BlockGaps { missing }) => assert_eq!(missing, vec![(3, 4), (7, 8)]),
            other => panic!("{other:?}"),
        }
        assert!(duration_stats(&[(2, A), (1, A)]).is_err());
    }

    #[test]
    fn geometric_run_lengths() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        // Runs alternate between classes; arbitrage runs end with
        // probability 0.4 per block, so their mean length is 2.5.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let mut ds = Vec::new();
        for _ in 0..4000 {
            ds.push(A);
            while u() >= 0.4 {
                ds.push(A);
            }
            ds.push(N);
        }
        let s = duration_stats(&seq(&ds)).unwrap();
        let p: f64 = 0.4;
        let mean = 1.0 / p;
        let se = ((1.0 - p) / (p * p)).sqrt() / (s.arbitrage.runs.len() as f64).sqrt();
        assert_eq!(s.arbitrage.runs.len(), 4000);
        assert!((s.arbitrage.mean - mean).abs() <= 3.0 * se, "{} {}", s.arbitrage.mean, se);
    }
}
