use arbgame::empirics::{
    classify_swaps, detect_arbitrage, ols_standardized, BlockRecord, ClassifyConfig, DepositSide, Direction,
    SwapRecord,
};
use arbgame::equilibrium::{solve_equilibrium, SolverConfig};
use arbgame::verify::{pure_payoff, Action, TieWinner};
use arbgame::{MarketParams, PoolState};
use proptest::prelude::*;

fn market() -> impl Strategy<Value = MarketParams> {
    (1.0f64..1e4, 1e3f64..1e8, 0.0f64..0.01, 1.0001f64..3.0).prop_map(|(y_a, y_b, f, o)| {
        let pool = PoolState::new(y_a, y_b, f).unwrap();
        let p_a = y_b / (y_a * (1.0 + f) * o);
        MarketParams::new(pool, p_a, 1.0, 0.0).unwrap()
    })
}

proptest! {
    #[test]
    fn trades_conserve_product(y_a in 1e-2f64..1e6, y_b in 1e-2f64..1e9, frac in -0.99f64..10.0) {
        let pool = PoolState::new(y_a, y_b, 0.003).unwrap();
        let after = pool.apply_trade(frac * y_a).unwrap();
        let k = y_a * y_b;
        prop_assert!((after.reserve_a() * after.reserve_b() - k).abs() <= 1e-12 * k);
    }

    #[test]
    fn first_mover_advantage_is_symmetric(m in market(), u in 1e-4f64..2.0, w in 1e-4f64..2.0) {
        let (d, d_bar) = (u * m.reserve_a(), w * m.reserve_a());
        let v = m.first_mover_advantage(d, d_bar).unwrap();
        let v_swapped = m.first_mover_advantage(d_bar, d).unwrap();
        prop_assert!(v > 0.0);
        prop_assert!((v - v_swapped).abs() <= 1e-10 * v);
    }

    #[test]
    fn second_mover_profit_matches_sequential_pool(m in market(), u in 1e-4f64..1.0, w in 1e-4f64..1.0, g in 0.0f64..100.0) {
        let (d, d_bar) = (u * m.reserve_a(), w * m.reserve_a());
        let formula = m.second_mover_profit(g, d, d_bar).unwrap();
        let moved = m.pool().apply_trade(d_bar).unwrap();
        let after = MarketParams::new(moved, m.price_a(), m.price_b(), m.base_gas_fee()).unwrap();
        let direct = after.net_profit(d, g).unwrap();
        prop_assert!((formula - direct).abs() <= 1e-10 * direct.abs().max(m.liquidity_b() * 1e-6));
    }

    #[test]
    fn first_mover_profit_is_concave(m in market(), n in 3usize..40) {
        let top = m.derived().optimal_amount * 1.5;
        let values: Vec<f64> = (0..n).map(|i| m.first_mover_profit(0.0, top * i as f64 / (n - 1) as f64)).collect();
        for w in values.windows(3) {
            prop_assert!(w[2] - w[1] < w[1] - w[0]);
        }
    }

    #[test]
    fn payoff_symmetry_and_first_mover_gap(m in market(), s in 0.0f64..1.0, t in 0.0f64..1.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let dq = m.derived();
        let fee = |x: f64| x * dq.max_gas_fee;
        let mine = Action::trade(fee(s), a * dq.optimal_amount);
        let theirs = Action::trade(fee(t), b * dq.optimal_amount);
        let avg = |x: &Action, y: &Action| {
            0.5 * (pure_payoff(&m, x, y, TieWinner::Me).unwrap() + pure_payoff(&m, x, y, TieWinner::Them).unwrap())
        };
        let tie = avg(&mine, &mine);
        let half_v = 0.5 * m.first_mover_advantage(mine.amount, mine.amount).unwrap();
        prop_assert!((tie - (m.first_mover_profit(mine.gas_fee, mine.amount) - half_v)).abs() <= 1e-9 * half_v.max(1.0));
        let same_fee = Action::trade(fee(s), b * dq.optimal_amount);
        let (p, q) = (avg(&mine, &same_fee), avg(&same_fee, &mine));
        let scale = dq.max_gas_fee.max(1e-9 * m.liquidity_b());
        let expected = m.first_mover_profit(mine.gas_fee, mine.amount) - m.first_mover_profit(same_fee.gas_fee, same_fee.amount);
        prop_assert!((p - q - expected).abs() <= 1e-9 * scale.max(1.0));
        let first = pure_payoff(&m, &mine, &Action::NO_TRADE, TieWinner::Them).unwrap();
        if s != t {
            let (hi, lo) = if s > t { (mine, theirs) } else { (theirs, mine) };
            let wins = pure_payoff(&m, &hi, &lo, TieWinner::Them).unwrap();
            let loses = pure_payoff(&m, &Action { gas_fee: lo.gas_fee, ..hi }, &Action { gas_fee: hi.gas_fee, ..lo }, TieWinner::Me).unwrap();
            let v = m.first_mover_advantage(hi.amount, lo.amount).unwrap();
            let gap = wins - loses + (hi.gas_fee - lo.gas_fee);
            prop_assert!((gap - v).abs() <= 1e-9 * v.max(1.0));
        }
        prop_assert_eq!(first, m.first_mover_profit(mine.gas_fee, mine.amount));
    }

    #[test]
    fn arbitrage_direction_is_exclusive(
        y_a in 1.0f64..1e5,
        ratio in 0.2f64..5.0,
        p_a in 1.0f64..1e4,
        base in 0.0f64..1e-6,
        f in 0.0f64..0.01,
    ) {
        let block = BlockRecord {
            block_number: 1,
            reserve_a_prev: y_a,
            reserve_b_prev: ratio * y_a * p_a,
            base_fee_per_gas: base,
            cex_price_a: p_a,
            cex_price_b: 1.0,
        };
        let v = detect_arbitrage(&block, 107_176.0, f);
        let o_a = block.reserve_b_prev / (y_a * p_a * (1.0 + f));
        let o_b = y_a * p_a / (block.reserve_b_prev * (1.0 + f));
        prop_assert!(!(o_a > 1.0 && o_b > 1.0));
        match v.direction {
            Direction::DepositA => prop_assert!(o_a > 1.0 && v.max_gas_fee_usd > v.base_gas_fee_usd),
            Direction::DepositB => prop_assert!(o_b > 1.0 && v.max_gas_fee_usd > v.base_gas_fee_usd),
            Direction::None => prop_assert!(o_a.max(o_b) <= 1.0 || v.max_gas_fee_usd <= v.base_gas_fee_usd),
        }
    }

    #[test]
    fn classification_partitions_swaps(
        ratios in prop::collection::vec(0.5f64..2.0, 1..12),
        swaps in prop::collection::vec((0u64..15, any::<bool>(), 1e-3f64..10.0), 0..60),
    ) {
        let blocks: Vec<BlockRecord> = ratios.iter().enumerate().map(|(i, r)| BlockRecord {
            block_number: i as u64,
            reserve_a_prev: 100.0,
            reserve_b_prev: 100.0 * 2000.0 * r,
            base_fee_per_gas: 1e-9,
            cex_price_a: 2000.0,
            cex_price_b: 1.0,
        }).collect();
        let records: Vec<SwapRecord> = swaps.iter().map(|&(n, a, amount)| SwapRecord {
            block_number: n,
            deposit_side: if a { DepositSide::A } else { DepositSide::B },
            amount_in: amount,
            amount_out: amount,
            gas_used: 1e5,
            gas_price: 2e-9,
            priority_fee_per_gas: 1e-9,
        }).collect();
        let c = classify_swaps(&blocks, &records, &ClassifyConfig::default()).unwrap();
        prop_assert_eq!(c.swaps.len() + c.rejects.len(), records.len());
        let orphans = records.iter().filter(|s| s.block_number >= blocks.len() as u64).count();
        prop_assert_eq!(c.rejects.len(), orphans);
        let counted: u64 = c.blocks.iter().map(|b| b.swap_count).sum();
        prop_assert_eq!(counted as usize, c.swaps.len());
        let mut seen: Vec<usize> = c.swaps.iter().map(|s| s.index).collect();
        seen.dedup();
        prop_assert_eq!(seen.len(), c.swaps.len());
    }

    #[test]
    fn ols_ignores_row_order(
        rows in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -1.0f64..1.0), 8..40),
        seed in any::<u64>(),
    ) {
        let x1: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let x2: Vec<f64> = rows.iter().map(|r| r.1 + 0.3 * r.0 * r.0).collect();
        let y: Vec<f64> = rows.iter().map(|r| 0.5 * r.0 - 0.25 * r.1 + r.2).collect();
        let names = vec!["x1".to_string(), "x2".to_string()];
        let Ok(fit) = ols_standardized(&names, &[x1.clone(), x2.clone()], &y) else {
            return Ok(());
        };
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut state = seed | 1;
        for i in (1..order.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let pick = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let permuted = ols_standardized(&names, &[pick(&x1), pick(&x2)], &pick(&y)).unwrap();
        for (a, b) in fit.coefficients.iter().zip(&permuted.coefficients) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        prop_assert!((fit.r_squared - permuted.r_squared).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn equilibrium_curves_are_monotone(o in 1.1f64..3.0, low in 0.0f64..0.95) {
        let top = 1e6 * (1.0 - o.powf(-0.5)).powi(2);
        let m = MarketParams::from_liquidity_opportunity(1e6, o, low * top).unwrap();
        let sol = solve_equilibrium(&m, &SolverConfig::default()).unwrap();
        let x = &sol.path.nodes;
        for w in x.windows(2) {
            prop_assert!(w[1].x < w[0].x);
        }
        let (lo, hi) = (sol.base_gas_fee(), sol.g_h);
        let n = 64;
        let mut prev = (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY);
        for i in 0..n {
            let g = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
            let d = sol.d_star(g).unwrap();
            let phi = sol.phi_star(g).unwrap();
            let ddf = sol.gas_ddf(g);
            prop_assert!(d > prev.0);
            prop_assert!(phi < prev.1);
            prop_assert!(ddf <= prev.2);
            prev = (d, phi, ddf);
        }
        let mut last = f64::INFINITY;
        for i in 0..=n {
            let v = sol.amount_ddf((o.sqrt() - 1.0) * 1.01 * i as f64 / n as f64);
            prop_assert!(v <= last);
            last = v;
        }
        prop_assert!((sol.gas_ddf(sol.base_gas_fee()) - sol.alpha_star).abs() <= 1e-12);
    }
}
