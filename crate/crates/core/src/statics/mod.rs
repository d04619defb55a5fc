//! Comparative statics: parameter sweeps, first-order stochastic dominance
//! of sampled DDFs, figure tables and the property table checks.

mod figures;
mod fosd;
mod properties;
mod sweep;

pub use figures::{figure_data, FigureTables};
pub use fosd::{ddf_max_difference, fosd_compare, linspace, Dominance, SampledDdf, DEFAULT_GRID_POINTS};
pub use properties::{opportunity_threshold, property_checks, PropertyCheck, DEFAULT_BASE_GAS_FEE, DEFAULT_LIQUIDITY};
pub use sweep::{run_sweep, RowSummary, SweepRow, SweepSpec, SweepTable, Varying};
