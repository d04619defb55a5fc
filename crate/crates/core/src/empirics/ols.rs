use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least squares on standardized variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Homoskedastic standard errors.
    pub standard_errors: Vec<f64>,
    /// Always zero after centering.
    pub intercept: f64,
    pub intercept_standard_error: f64,
    pub r_squared: f64,
    pub observations: usize,
}

fn standardize(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let scale = mean.abs().max(v.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
    if !(var > (1e-12 * scale).powi(2)) {
        return None;
    }
    let sd = var.sqrt();
    Some(v.iter().map(|x| (x - mean) / sd).collect())
}

/// Columns that are (numerically) linear combinations of earlier ones, each
/// listed with the earlier columns it depends on.
fn dependent_columns(x: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let mut kept: Vec<usize> = Vec::new();
    let mut offending = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let (residual, coef) = if kept.is_empty() {
            (col.norm_squared(), DVector::zeros(0))
        } else {
            let basis = x.select_columns(&kept);
            let svd = basis.clone().svd(true, true);
            let coef = svd.solve(&col, 1e-12).unwrap_or_else(|_| DVector::zeros(kept.len()));
            ((col - &basis * &coef).norm_squared(), coef)
        };
        if residual <= 1e-10 * x.nrows() as f64 {
            for (k, &c) in kept.iter().zip(coef.iter()) {
                if c.abs() > 1e-8 && !offending.contains(&names[*k]) {
                    offending.push(names[*k].clone());
                }
            }
            offending.push(names[j].clone());
        } else {
            kept.push(j);
        }
    }
    offending
}

/// Standardize each regressor and the response to zero mean and unit
/// variance, then solve the normal equations by Cholesky factorization.
pub fn ols_standardized(names: &[String], columns: &[Vec<f64>], response: &[f64]) -> Result<OlsFit> {
    let n = response.len();
    let k = columns.len();
    if names.len() != k {
        return Err(Error::invalid("names", "one name per column"));
    }
    if k == 0 {
        return Err(Error::invalid("design", "needs at least one column"));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::invalid("design", "columns differ in length from the response"));
    }
    if n < k + 2 {
        return Err(Error::invalid("design", format!("{n} rows for {k} columns; need at least {}", k + 2)));
    }
    let y = standardize(response).ok_or_else(|| Error::invalid("response", "has zero variance"))?;
    let mut data = Vec::with_capacity(n * k);
    let mut flat = Vec::new();
    for (name, c) in names.iter().zip(columns) {
        match standardize(c) {
            Some(z) => data.extend(z),
            None => flat.push(name.clone()),
        }
    }
    if !flat.is_empty() {
        return Err(Error::SingularDesign { columns: flat });
    }
    let x = DMatrix::from_column_slice(n, k, &data);
    let y = DVector::from_vec(y);
    let xtx = x.transpose() * &x;
    let offending = dependent_columns(&x, names);
    if !offending.is_empty() {
        return Err(Error::SingularDesign { columns: offending });
    }
    let chol = xtx.cholesky().ok_or_else(|| Error::SingularDesign {
        columns: names.to_vec(),
    })?;
    let beta = chol.solve(&(x.transpose() * &y));
    let residual = &y - &x * &beta;
    let ssr = residual.norm_squared();
    let sst = (n - 1) as f64;
    let sigma2 = ssr / (n - k - 1) as f64;
    let inverse = chol.inverse();
    Ok(OlsFit {
        names: names.to_vec(),
        coefficients: beta.iter().copied().collect(),
        standard_errors: (0..k).map(|j| (sigma2 * inverse[(j, j)]).sqrt()).collect(),
        intercept: 0.0,
        intercept_standard_error: (sigma2 / n as f64).sqrt(),
        r_squared: 1.0 - ssr / sst,
        observations: n,
    })
}
