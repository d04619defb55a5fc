//! Marching solver for the nonlinear Volterra-type equation
//!
//! ```text
//! q_hat(x(z)) = ∫_0^z K(x(z), x(s)) ds,   x(0) = √O − 1,
//! ```
//!
//! whose solution `x̂` is the equilibrium trade size (relative to `y_A`) as a
//! function of the normalized distance `z = (g_H − g) / L_B` below the top of
//! the gas-fee support.

use serde::{Deserialize, Serialize};

use super::kernel::{
    diagonal_kernel_with_dx, inverse_advantage, kernel_with_dx, q_hat, q_hat_dx,
};
use crate::error::{Error, Result};
use crate::tolerance;

/// Step-size and tolerance controls of the marching solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Length of the first step in `z`.
    pub initial_step: f64,
    /// Upper bound on every step.
    pub max_step: f64,
    /// Steps are capped at `step_shrink_coeff * x^2` because `dx/dz ~ -C/x`.
    pub step_shrink_coeff: f64,
    /// Absolute tolerance of the scalar root find at each node.
    pub root_tolerance: f64,
    /// Maximum admissible equation residual at a node.
    pub residual_tolerance: f64,
    pub max_nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            initial_step: 1e-4,
            max_step: 2e-5,
            step_shrink_coeff: 5e-4,
            root_tolerance: 1e-12,
            residual_tolerance: 1e-8,
            max_nodes: 2_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("step_shrink_coeff", self.step_shrink_coeff),
            ("root_tolerance", self.root_tolerance),
            ("residual_tolerance", self.residual_tolerance),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be positive, got {value}")));
            }
        }
        if self.residual_tolerance < self.root_tolerance {
            return Err(Error::invalid(
                "residual_tolerance",
                "must be at least root_tolerance",
            ));
        }
        if self.max_nodes < 2 {
            return Err(Error::invalid("max_nodes", "must be at least 2"));
        }
        Ok(())
    }

    /// Same controls with every step halved.
    pub fn refined(&self) -> Self {
        Self {
            initial_step: self.initial_step / 2.0,
            max_step: self.max_step / 2.0,
            step_shrink_coeff: self.step_shrink_coeff / 2.0,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub z: f64,
    pub x: f64,
    /// `∫_0^z v(x̂(s)) ds` by the trapezoidal rule.
    pub cumulative_v: f64,
}

/// Solved path `x̂(z)`, strictly decreasing in `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XhatPath {
    pub opportunity: f64,
    pub nodes: Vec<PathNode>,
    /// Largest equation residual accepted at any node.
    pub max_residual: f64,
}

/// Accepts `O ∈ (1, 3]`, the regime where the solution is known to be unique.
pub fn check_opportunity(opportunity: f64) -> Result<()> {
    if opportunity.is_finite() && opportunity > 1.0 && opportunity <= 3.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedOpportunity(opportunity))
    }
}

struct Marcher<'a> {
    opportunity: f64,
    config: &'a SolverConfig,
    xs: Vec<f64>,
    /// Trapezoid weights of the stored nodes for the integral up to the last node.
    weights: Vec<f64>,
}

impl Marcher<'_> {
    /// Discrete residual at a candidate `x` for a new node a step `step` past
    /// the last one, with its derivative.
    fn residual(&self, x: f64, step: f64) -> (f64, f64) {
        let half = 0.5 * step;
        let last = self.xs.len() - 1;
        let mut value = 0.0;
        let mut slope = 0.0;
        for (j, (&xj, &wj)) in self.xs.iter().zip(&self.weights).enumerate() {
            let w = if j == last { wj + half } else { wj };
            let (k, dk) = kernel_with_dx(x, xj);
            value += w * k;
            slope += w * dk;
        }
        let (kd, dkd) = diagonal_kernel_with_dx(x);
        value += half * kd - q_hat(x, self.opportunity);
        slope += half * dkd - q_hat_dx(x);
        (value, slope)
    }

    fn next_step(&self, x: f64) -> f64 {
        let cap = self.config.step_shrink_coeff * x * x;
        let v_cap = tolerance::MAX_CUMULATIVE_V_STEP / inverse_advantage(x);
        let base = if self.xs.len() == 1 {
            self.config.initial_step
        } else {
            self.config.max_step
        };
        base.min(self.config.max_step).min(cap).min(v_cap)
    }

    /// Slope estimate `dx/dz` at the last node.
    fn slope_estimate(&self, nodes: &[PathNode]) -> f64 {
        let n = nodes.len();
        if n >= 2 {
            (nodes[n - 1].x - nodes[n - 2].x) / (nodes[n - 1].z - nodes[n - 2].z)
        } else {
            // Implicit-function derivative at z = 0.
            let x0 = nodes[0].x;
            let (kd, _) = diagonal_kernel_with_dx(x0);
            kd / q_hat_dx(x0)
        }
    }

    /// Root of the discrete residual below `x_prev`: bracket by stepping down
    /// from `x_prev` until the residual turns negative, then safeguarded
    /// Newton. The stepping search avoids the spurious root near zero created
    /// by the `K(x, x) ~ 1/x` endpoint term.
    fn solve_node(&self, x_prev: f64, slope: f64, step: f64) -> std::result::Result<(f64, f64), String> {
        let mut hi = x_prev;
        let mut delta = (2.0 * slope.abs() * step).max(1e-3 * x_prev * f64::EPSILON.sqrt());
        let mut lo = x_prev - delta;
        loop {
            if lo <= tolerance::ROOT_FLOOR {
                lo = tolerance::ROOT_FLOOR;
                if self.residual(lo, step).0 >= 0.0 {
                    return Err(format!(
                        "no root bracket below x = {x_prev:e}; path reached its explosion point"
                    ));
                }
                break;
            }
            if self.residual(lo, step).0 < 0.0 {
                break;
            }
            hi = lo;
            delta *= 2.0;
            lo = x_prev - delta;
        }

        let mut x = (x_prev + slope * step).clamp(lo, hi);
        if x <= lo || x >= hi {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..200 {
            let (f, df) = self.residual(x, step);
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - f / df;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= self.config.root_tolerance || hi - lo <= self.config.root_tolerance {
                let (f_next, _) = self.residual(next, step);
                return Ok((next, f_next.abs()));
            }
            x = next;
        }
        Err(format!("root find did not converge below x = {x_prev:e}"))
    }
}

/// March the integral equation from `z = 0` until the cumulative inverse
/// first-mover advantage passes `1 + margin`, so that `ẑ` is bracketed.
pub fn solve_xhat(opportunity: f64, config: &SolverConfig) -> Result<XhatPath> {
    check_opportunity(opportunity)?;
    config.validate()?;

    let x0 = opportunity.sqrt() - 1.0;
    let mut nodes = vec![PathNode {
        z: 0.0,
        x: x0,
        cumulative_v: 0.0,
    }];
    let mut marcher = Marcher {
        opportunity,
        config,
        xs: vec![x0],
        weights: vec![0.0],
    };
    let mut max_residual = 0.0_f64;
    let target = 1.0 + tolerance::Z_HAT_MARGIN;

    while nodes.last().map_or(0.0, |n| n.cumulative_v) < target {
        let partial = |nodes: Vec<PathNode>, max_residual: f64, reason: String| Error::NonConvergence {
            reason,
            partial: Box::new(XhatPath {
                opportunity,
                nodes,
                max_residual,
            }),
        };
        if nodes.len() >= config.max_nodes {
            return Err(partial(
                nodes,
                max_residual,
                format!("max_nodes = {} exceeded", config.max_nodes),
            ));
        }
        let last = *nodes.last().expect("path is never empty");
        let step = marcher.next_step(last.x);
        let slope = marcher.slope_estimate(&nodes);
        let (x, residual) = match marcher.solve_node(last.x, slope, step) {
            Ok(found) => found,
            Err(reason) => return Err(partial(nodes, max_residual, reason)),
        };
        if residual > config.residual_tolerance {
            return Err(partial(
                nodes,
                max_residual,
                format!("node residual {residual:e} exceeds tolerance"),
            ));
        }
        max_residual = max_residual.max(residual);

        let half = 0.5 * step;
        *marcher.weights.last_mut().expect("weights track nodes") += half;
        marcher.weights.push(half);
        marcher.xs.push(x);
        nodes.push(PathNode {
            z: last.z + step,
            x,
            cumulative_v: last.cumulative_v
                + half * (inverse_advantage(last.x) + inverse_advantage(x)),
        });
    }

    Ok(XhatPath {
        opportunity,
        nodes,
        max_residual,
    })
}

/// `ẑ` with `∫_0^ẑ v(x̂) dz = 1`.
pub fn find_z_hat(path: &XhatPath) -> Result<f64> {
    path.z_at_cumulative(1.0).ok_or(Error::BracketMissing {
        reached: path.nodes.last().map_or(0.0, |n| n.cumulative_v),
    })
}

impl XhatPath {
    pub fn x0(&self) -> f64 {
        self.nodes[0].x
    }

    pub fn z_max(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.z)
    }

    /// Index `i` with `nodes[i].z <= z < nodes[i + 1].z`, clamped to the last interval.
    fn segment_by_z(&self, z: f64) -> usize {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|p| p.z <= z);
        i.saturating_sub(1).min(n.saturating_sub(2))
    }

    /// Piecewise-linear `x̂(z)`; `None` beyond the stored path.
    pub fn x_at(&self, z: f64) -> Option<f64> {
        if !(0.0..=self.z_max()).contains(&z) {
            return None;
        }
        if self.nodes.len() == 1 {
            return Some(self.nodes[0].x);
        }
        let i = self.segment_by_z(z);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let t = (z - a.z) / (b.z - a.z);
        Some(a.x + t * (b.x - a.x))
    }

    /// Piecewise-linear cumulative integral at `z`.
    pub fn cumulative_at(&self, z: f64) -> Option<f64> {
        if !(0.0..=self.z_max()).contains(&z) {
            return None;
        }
        if self.nodes.len() == 1 {
            return Some(0.0);
        }
        let i = self.segment_by_z(z);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let t = (z - a.z) / (b.z - a.z);
        Some(a.cumulative_v + t * (b.cumulative_v - a.cumulative_v))
    }

    /// Inverse of [`Self::x_at`]: `0` for `x >= x̂(0)`, `None` below the path.
    pub fn z_at_x(&self, x: f64) -> Option<f64> {
        if x >= self.x0() {
            return Some(0.0);
        }
        let last = self.nodes.last()?;
        if x < last.x {
            return None;
        }
        let i = self.nodes.partition_point(|p| p.x > x);
        let (a, b) = (&self.nodes[i - 1], &self.nodes[i]);
        let t = (a.x - x) / (a.x - b.x);
        Some(a.z + t * (b.z - a.z))
    }

    /// Inverse of [`Self::cumulative_at`].
    pub fn z_at_cumulative(&self, c: f64) -> Option<f64> {
        if c <= 0.0 {
            return Some(0.0);
        }
        let last = self.nodes.last()?;
        if c > last.cumulative_v {
            return None;
        }
        let i = self.nodes.partition_point(|p| p.cumulative_v < c);
        let (a, b) = (&self.nodes[i - 1], &self.nodes[i]);
        let t = (c - a.cumulative_v) / (b.cumulative_v - a.cumulative_v);
        Some(a.z + t * (b.z - a.z))
    }

    /// Trapezoidal `∫_0^z f(x̂(s)) ds` on the solver grid, closing with a
    /// partial interval that ends at the interpolated `x̂(z)`.
    pub fn integrate_to(&self, z: f64, f: impl Fn(f64) -> f64) -> f64 {
        if z <= 0.0 || self.nodes.len() < 2 {
            return 0.0;
        }
        let z = z.min(self.z_max());
        let mut total = 0.0;
        let mut prev = self.nodes[0];
        let mut f_prev = f(prev.x);
        for node in &self.nodes[1..] {
            if node.z >= z {
                let x_end = prev.x + (z - prev.z) / (node.z - prev.z) * (node.x - prev.x);
                total += 0.5 * (z - prev.z) * (f_prev + f(x_end));
                return total;
            }
            let f_node = f(node.x);
            total += 0.5 * (node.z - prev.z) * (f_prev + f_node);
            prev = *node;
            f_prev = f_node;
        }
        total
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_opportunity(self.opportunity)?;
        if self.nodes.len() < 2 {
            return Err(Error::invalid("path", "needs at least two nodes"));
        }
        let expected_x0 = self.opportunity.sqrt() - 1.0;
        if self.nodes[0].z != 0.0 || self.nodes[0].x != expected_x0 {
            return Err(Error::invalid("path", "must start at (0, √O − 1)"));
        }
        for pair in self.nodes.windows(2) {
            if !(pair[1].z > pair[0].z && pair[1].x < pair[0].x && pair[1].x > 0.0) {
                return Err(Error::invalid("path", "z must increase while x decreases"));
            }
            if pair[1].cumulative_v < pair[0].cumulative_v {
                return Err(Error::invalid("path", "cumulative_v must be non-decreasing"));
            }
        }
        Ok(())
    }
}
