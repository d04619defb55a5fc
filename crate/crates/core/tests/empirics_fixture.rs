use std::collections::HashMap;
use std::fs::{self, File};
use std::path::PathBuf;

use arbgame::empirics::{analyze, AnalysisReport, ClassifyConfig, Direction, SwapLabel};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run() -> AnalysisReport {
    let blocks = File::open(fixture("blocks.csv")).unwrap();
    let swaps = File::open(fixture("swaps.csv")).unwrap();
    analyze(blocks, swaps, &ClassifyConfig::default()).unwrap()
}

fn labels(name: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(fixture(name)).unwrap();
    r.records()
        .map(|row| row.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn planted_labels_recovered() {
    let report = run();
    let c = &report.classification;
    assert_eq!(c.blocks.len(), 20);
    assert_eq!(c.swaps.len(), 60);
    assert!(report.rejects.is_empty());

    let planted: HashMap<u64, String> = labels("block_labels.csv")
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].clone()))
        .collect();
    let mut arbitrage = 0;
    for b in &c.blocks {
        let name = match b.verdict.direction {
            Direction::DepositA => "DepositA",
            Direction::DepositB => "DepositB",
            Direction::None => "None",
        };
        assert_eq!(planted[&b.block_number], name, "block {}", b.block_number);
        arbitrage += usize::from(b.verdict.direction != Direction::None);
    }
    assert_eq!(arbitrage, 8);

    for (s, row) in c.swaps.iter().zip(labels("swap_labels.csv")) {
        assert_eq!(s.index.to_string(), row[0]);
        assert_eq!(s.block_number.to_string(), row[1]);
        let name = match s.label {
            SwapLabel::ArbitrageSwap => "ArbitrageSwap",
            SwapLabel::Other => "Other",
        };
        assert_eq!(name, row[2], "swap {}", s.index);
    }
}

#[test]
fn tables_are_consistent() {
    let t = run().tables;
    let sc = &t.swap_counts;
    assert_eq!(
        sc.arbitrage_swaps_in_arbitrage_blocks.total + sc.arbitrage_swaps_in_non_arbitrage_blocks.total,
        20
    );
    assert_eq!(sc.arbitrage_swaps_in_non_arbitrage_blocks.total, 12);
    assert_eq!(sc.arbitrage_swaps_in_non_arbitrage_blocks.zero, 12);
    assert_eq!(sc.arbitrage_swaps_in_arbitrage_blocks.three_or_more, 6);
    assert_eq!(t.block_classes.block_counts, [12, 8]);
    assert_eq!(t.block_classes.swap_counts, [28, 32]);
    assert_eq!(t.block_classes.arbitrage_swap_counts, [0, 24]);
    assert_eq!(t.durations.arbitrage.histogram, [3, 1, 1]);
    assert_eq!(t.durations.non_arbitrage.histogram, [2, 2, 2]);
    assert_eq!(t.profitability.total.profitable + t.profitability.total.non_profitable, 60);
    assert_eq!(t.first_mover_bounds.arbitrage_swaps, 24);
    assert_eq!(t.data_quality_warnings.len(), 1);
    assert_eq!(t.data_quality_warnings[0].swap_index, 7);
}

#[test]
fn regressions_fit() {
    for r in run().regressions {
        let fit = r.fit.unwrap_or_else(|| panic!("{}: {:?}", r.name, r.error));
        assert_eq!(fit.observations, r.observations);
        assert_eq!(fit.intercept, 0.0);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}

#[test]
fn report_bytes_are_reproducible() {
    let (a, b) = (run(), run());
    assert_eq!(a.tables_json().unwrap(), b.tables_json().unwrap());
    assert_eq!(a.regressions_json().unwrap(), b.regressions_json().unwrap());
    assert_eq!(a.rejects_csv().unwrap(), b.rejects_csv().unwrap());
}

#[test]
fn golden_report() {
    let report = run();
    let outputs = [
        ("tables_2_3_4.json", report.tables_json().unwrap()),
        ("regressions.json", report.regressions_json().unwrap()),
        ("rejects.csv", report.rejects_csv().unwrap()),
    ];
    let dir = fixture("golden");
    for (name, bytes) in outputs {
        let path = dir.join(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::create_dir_all(&dir).unwrap();
            fs::write(&path, &bytes).unwrap();
        }
        let expected = fs::read(&path).unwrap();
        assert!(expected == bytes, "{name} differs from golden");
    }
}
