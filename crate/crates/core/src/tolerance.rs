//! Numeric tolerances shared by the library, its tests and the CLI checks.

/// Relative tolerance for reserve-product conservation under a trade.
pub const PRODUCT_REL: f64 = 1e-12;

/// Relative tolerance between the second-mover formula and a sequential
/// pool simulation.
pub const SECOND_MOVER_REL: f64 = 1e-10;

/// Relative tolerance for the symmetry of the first-mover advantage.
pub const SYMMETRY_REL: f64 = 1e-10;

/// Break-even of the first mover at the highest profitable gas fee, in units
/// of the liquidity `L_B`.
pub const BREAK_EVEN_PER_LIQUIDITY: f64 = 1e-8;

/// Lower end of the root bracket for the marching solver.
pub const ROOT_FLOOR: f64 = 1e-12;

/// Cap on the increment of the cumulative inverse first-mover advantage per
/// marching step.
pub const MAX_CUMULATIVE_V_STEP: f64 = 0.05;

/// The solver keeps marching until the cumulative integral reaches `1 + margin`.
pub const Z_HAT_MARGIN: f64 = 0.01;

/// Normalization of the gas-fee density.
pub const DENSITY_NORMALIZATION: f64 = 1e-4;

/// Flatness of the response function along the equilibrium amount, relative
/// to `max(g_high_max, L_B * 1e-6)`.
pub const FLATNESS_REL: f64 = 1e-4;

/// Best-deviation gap, relative to the highest profitable gas fee.
pub const DEVIATION_GAP_REL: f64 = 1e-3;

/// Default pointwise tolerance for stochastic dominance comparisons.
pub const FOSD_TOLERANCE: f64 = 1e-6;

/// Trade-probability agreement between fictitious play and the analytic
/// equilibrium.
pub const ORACLE_TRADE_PROBABILITY: f64 = 0.05;

/// Number of standard errors allowed between Monte Carlo and analytic payoffs.
pub const MONTE_CARLO_SIGMAS: f64 = 3.0;

/// Swaps whose output deviates from the constant-product quote by more than
/// this fraction are reported as data-quality warnings.
pub const SWAP_QUOTE_DEVIATION: f64 = 0.05;
