use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::market::MarketParams;

/// `(ξ, g, d_A)`: whether to trade, the gas fee bid and the amount of A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub trades: bool,
    pub gas_fee: f64,
    pub amount: f64,
}

impl Action {
    pub const NO_TRADE: Action = Action {
        trades: false,
        gas_fee: 0.0,
        amount: 0.0,
    };

    pub fn trade(gas_fee: f64, amount: f64) -> Self {
        Action {
            trades: true,
            gas_fee,
            amount,
        }
    }

    fn check(&self, market: &MarketParams, field: &'static str) -> Result<()> {
        if !self.trades {
            return Ok(());
        }
        finite(field, self.gas_fee)?;
        finite(field, self.amount)?;
        let dq = market.derived();
        let slack = 1e-12 * dq.max_gas_fee.max(1.0);
        if self.gas_fee < market.base_gas_fee() - slack || self.gas_fee > dq.max_gas_fee + slack {
            return Err(Error::invalid(field, "gas fee outside [ĝ_L, ĝ_H]"));
        }
        if self.amount < 0.0 || self.amount > dq.optimal_amount * (1.0 + 1e-12) {
            return Err(Error::invalid(field, "amount outside [0, D̂_A]"));
        }
        Ok(())
    }
}

/// Who executes first when both gas fees are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieWinner {
    Me,
    Them,
}

/// Payoff of `mine` against `theirs` when the higher gas fee executes first.
pub fn pure_payoff(
    market: &MarketParams,
    mine: &Action,
    theirs: &Action,
    tie_winner: TieWinner,
) -> Result<f64> {
    mine.check(market, "mine")?;
    theirs.check(market, "theirs")?;
    Ok(payoff_unchecked(market, mine, theirs, tie_winner))
}

pub(crate) fn payoff_unchecked(
    market: &MarketParams,
    mine: &Action,
    theirs: &Action,
    tie_winner: TieWinner,
) -> f64 {
    if !mine.trades {
        return 0.0;
    }
    let first = market.first_mover_profit(mine.gas_fee, mine.amount);
    let executes_first = !theirs.trades
        || mine.gas_fee > theirs.gas_fee
        || (mine.gas_fee == theirs.gas_fee && tie_winner == TieWinner::Me);
    if executes_first {
        first
    } else {
        first - market.advantage(mine.amount, theirs.amount)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market() -> MarketParams {
        MarketParams::from_liquidity_opportunity(4e6, 2.0, 1.0).unwrap()
    }

    #[test]
    fn no_trade_pays_zero() {
        let m = market();
        let theirs = Action::trade(5.0, 0.3);
        assert_eq!(pure_payoff(&m, &Action::NO_TRADE, &theirs, TieWinner::Me).unwrap(), 0.0);
    }

    #[test]
    fn higher_fee_is_first_mover() {
        let m = market();
        let mine = Action::trade(10.0, 0.3);
        let theirs = Action::trade(5.0, 0.2);
        let p = pure_payoff(&m, &mine, &theirs, TieWinner::Them).unwrap();
        assert_eq!(p, m.first_mover_profit(10.0, 0.3));
        let q = pure_payoff(&m, &theirs, &mine, TieWinner::Me).unwrap();
        assert_eq!(q, m.second_mover_profit(5.0, 0.2, 0.3).unwrap());
        assert!((m.first_mover_profit(5.0, 0.2) - q - m.first_mover_advantage(0.2, 0.3).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn tie_average_and_symmetry() {
        let m = market();
        let a = Action::trade(7.0, 0.25);
        let b = Action::trade(7.0, 0.35);
        let avg = |x: &Action, y: &Action| {
            0.5 * (pure_payoff(&m, x, y, TieWinner::Me).unwrap()
                + pure_payoff(&m, x, y, TieWinner::Them).unwrap())
        };
        let expected = 0.5 * m.first_mover_profit(7.0, 0.25)
            + 0.5 * m.second_mover_profit(7.0, 0.25, 0.35).unwrap();
        assert!((avg(&a, &b) - expected).abs() < 1e-9);
        // Swapping the two actions swaps the payoffs of a symmetric game.
        let c = Action::trade(7.0, 0.25);
        assert_eq!(avg(&a, &c), avg(&c, &a));
    }

    #[test]
    fn rejects_out_of_range_actions() {
        let m = market();
        let top = m.derived().max_gas_fee;
        let ok = Action::trade(2.0, 0.1);
        assert!(pure_payoff(&m, &Action::trade(top * 2.0, 0.1), &ok, TieWinner::Me).is_err());
        assert!(pure_payoff(&m, &ok, &Action::trade(0.5, 0.1), TieWinner::Me).is_err());
        assert!(pure_payoff(&m, &Action::trade(2.0, 1.0), &ok, TieWinner::Me).is_err());
        assert!(pure_payoff(&m, &Action::trade(f64::NAN, 0.1), &ok, TieWinner::Me).is_err());
    }
}
