use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points in the shared abscissa grids used for dominance comparisons.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// A decumulative distribution function `P(X > t)` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDdf {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominance {
    /// `ddf_high` first-order stochastically dominates `ddf_low`.
    Dominates,
    DominatedBy,
    Incomparable,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_pair(a: &SampledDdf, b: &SampledDdf) -> Result<()> {
    if a.abscissae.len() != a.values.len() || b.abscissae.len() != b.values.len() {
        return Err(Error::invalid("ddf", "abscissae and values differ in length"));
    }
    if a.abscissae != b.abscissae {
        return Err(Error::MismatchedAbscissae(format!(
            "{} vs {} points",
            a.abscissae.len(),
            b.abscissae.len()
        )));
    }
    Ok(())
}

/// Pointwise dominance test: `Dominates` iff `high >= low − tol` everywhere
/// and `high > low + tol` somewhere.
pub fn fosd_compare(ddf_low: &SampledDdf, ddf_high: &SampledDdf, tolerance: f64) -> Result<Dominance> {
    check_pair(ddf_low, ddf_high)?;
    let pairs = || ddf_low.values.iter().zip(&ddf_high.values);
    let above = |x: &f64, y: &f64| y >= &(x - tolerance);
    let strict = |x: &f64, y: &f64| y > &(x + tolerance);
    if pairs().all(|(l, h)| above(l, h)) && pairs().any(|(l, h)| strict(l, h)) {
        return Ok(Dominance::Dominates);
    }
    if pairs().all(|(l, h)| above(h, l)) && pairs().any(|(l, h)| strict(h, l)) {
        return Ok(Dominance::DominatedBy);
    }
    Ok(Dominance::Incomparable)
}

/// Largest pointwise gap between two DDFs on the same grid.
pub fn ddf_max_difference(a: &SampledDdf, b: &SampledDdf) -> Result<f64> {
    check_pair(a, b)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ddf(values: &[f64]) -> SampledDdf {
        SampledDdf {
            abscissae: linspace(0.0, 1.0, values.len()),
            values: values.to_vec(),
        }
    }

    #[test]
    fn identical_is_incomparable() {
        let a = ddf(&[1.0, 0.5, 0.0]);
        assert_eq!(fosd_compare(&a, &a, 1e-6).unwrap(), Dominance::Incomparable);
        assert_eq!(ddf_max_difference(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ordering_and_crossing() {
        let low = ddf(&[1.0, 0.4, 0.0]);
        let high = ddf(&[1.0, 0.6, 0.1]);
        assert_eq!(fosd_compare(&low, &high, 1e-6).unwrap(), Dominance::Dominates);
        assert_eq!(fosd_compare(&high, &low, 1e-6).unwrap(), Dominance::DominatedBy);
        let cross = ddf(&[1.0, 0.3, 0.2]);
        assert_eq!(fosd_compare(&low, &cross, 1e-6).unwrap(), Dominance::Incomparable);
        // Differences inside the tolerance do not count as strict.
        let near = ddf(&[1.0, 0.4 + 1e-7, 0.0]);
        assert_eq!(fosd_compare(&low, &near, 1e-6).unwrap(), Dominance::Incomparable);
    }

    #[test]
    fn mismatched_grids_error() {
        let a = ddf(&[1.0, 0.0]);
        let b = ddf(&[1.0, 0.5, 0.0]);
        assert!(matches!(fosd_compare(&a, &b, 1e-6), Err(Error::MismatchedAbscissae(_))));
        let bad = SampledDdf { abscissae: vec![0.0], values: vec![] };
        assert!(fosd_compare(&bad, &bad, 1e-6).is_err());
    }
}
