//! Normalized ingredients of the equilibrium integral equation. All
//! arguments are trade sizes relative to the A reserve, `x = d_A / y_A`.

use crate::error::{finite, Error, Result};

/// Normalized marginal first-mover profit `1/(1+x)^2 - 1/O`.
pub fn q_hat(x: f64, opportunity: f64) -> f64 {
    let s = 1.0 + x;
    1.0 / (s * s) - 1.0 / opportunity
}

pub(crate) fn q_hat_dx(x: f64) -> f64 {
    let s = 1.0 + x;
    -2.0 / (s * s * s)
}

/// Marginal first-mover advantage of a trade `x` against an opponent trade
/// `x_bar`, normalized by the advantage at `(x_bar, x_bar)`.
pub fn k_kernel(x: f64, x_bar: f64) -> Result<f64> {
    finite("x", x)?;
    finite("x_bar", x_bar)?;
    if x < 0.0 {
        return Err(Error::invalid("x", "must be non-negative"));
    }
    if x_bar <= 0.0 {
        return Err(Error::invalid("x_bar", "must be positive"));
    }
    Ok(kernel(x, x_bar))
}

#[inline]
pub(crate) fn kernel(x: f64, x_bar: f64) -> f64 {
    let sx = 1.0 + x;
    let sb = 1.0 + x_bar;
    let total = sb + x;
    let wb = 1.0 + 2.0 * x_bar;
    (2.0 * sx * sb * wb + x_bar * sb * wb) / (2.0 * x_bar * sx * sx * total * total)
}

/// `(kernel, d kernel / dx)` with the second argument fixed.
#[inline]
pub(crate) fn kernel_with_dx(x: f64, x_bar: f64) -> (f64, f64) {
    let k = kernel(x, x_bar);
    let log_dx = 2.0 / (2.0 * (1.0 + x) + x_bar) - 2.0 / (1.0 + x) - 2.0 / (1.0 + x_bar + x);
    (k, k * log_dx)
}

/// Kernel on the diagonal, `K(x, x)`, and its total derivative in `x`.
#[inline]
pub(crate) fn diagonal_kernel_with_dx(x: f64) -> (f64, f64) {
    let num = 2.0 + 3.0 * x;
    let den = 2.0 * x * (1.0 + x) * (1.0 + 2.0 * x);
    let den_dx = 2.0 + 12.0 * x + 12.0 * x * x;
    (num / den, (3.0 * den - num * den_dx) / (den * den))
}

/// Inverse normalized first-mover advantage at a symmetric profile,
/// `(1+x)(1+2x) / (2x^2)`.
pub fn v_fun(x: f64) -> Result<f64> {
    finite("x", x)?;
    if x <= 0.0 {
        return Err(Error::invalid("x", "must be positive"));
    }
    Ok(inverse_advantage(x))
}

#[inline]
pub(crate) fn inverse_advantage(x: f64) -> f64 {
    (1.0 + x) * (1.0 + 2.0 * x) / (2.0 * x * x)
}

/// Normalized first-mover advantage `V(y_A x, y_A x_bar) / L_B`.
#[inline]
pub(crate) fn advantage(x: f64, x_bar: f64) -> f64 {
    let sb = 1.0 + x_bar;
    x / (1.0 + x) - x / (sb * (sb + x))
}
