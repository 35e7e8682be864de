//! Least-squares fits of log y = c₀ + c₁·log δ + c₂/δ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Fit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub r_squared: f64,
}

/// Fit with c₁ free when `power` is None, else with c₁ pinned to it.
/// Needs positive y and at least one more point than free parameters.
pub fn fit(deltas: &[f64], values: &[f64], power: Option<f64>) -> Option<Fit> {
    let n = deltas.len();
    let cols = if power.is_some() { 2 } else { 3 };
    if n != values.len() || n <= cols || values.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let target: Vec<f64> =
        deltas.iter().zip(values).map(|(d, y)| y.ln() - power.map_or(0.0, |c1| c1 * d.ln())).collect();
    let a = DMatrix::from_fn(n, cols, |r, c| match (c, cols) {
        (0, _) => 1.0,
        (1, 2) => 1.0 / deltas[r],
        (1, _) => deltas[r].ln(),
        _ => 1.0 / deltas[r],
    });
    let b = DVector::from_vec(target);
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
    let (c0, c1, c2) = match power {
        Some(c1) => (coef[0], c1, coef[1]),
        None => (coef[0], coef[1], coef[2]),
    };
    let logs: Vec<f64> = values.iter().map(|y| y.ln()).collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    let total: f64 = logs.iter().map(|y| (y - mean).powi(2)).sum();
    let resid: f64 =
        deltas.iter().zip(&logs).map(|(d, y)| (y - (c0 + c1 * d.ln() + c2 / d)).powi(2)).sum();
    let r_squared = if total > 0.0 { 1.0 - resid / total } else { 1.0 };
    Some(Fit { c0, c1, c2, r_squared })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalingRow {
    pub quantity: String,
    /// The asymptotic law the fit is compared with.
    pub reference: String,
    /// None when c₁ is fitted.
    pub pinned_power: Option<f64>,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: Option<Fit>,
    pub predicted_c2: f64,
    pub relative_deviation: Option<f64>,
    pub tolerance: f64,
    pub min_r_squared: f64,
    pub pass: bool,
}

impl ScalingRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        quantity: &str,
        reference: &str,
        pinned_power: Option<f64>,
        deltas: Vec<f64>,
        values: Vec<f64>,
        predicted_c2: f64,
        tolerance: f64,
        min_r_squared: f64,
    ) -> Self {
        let f = fit(&deltas, &values, pinned_power);
        let relative_deviation = f.map(|f| (f.c2 - predicted_c2).abs() / predicted_c2.abs());
        let pass = matches!((f, relative_deviation), (Some(f), Some(dev)) if dev <= tolerance && f.r_squared >= min_r_squared);
        ScalingRow {
            quantity: quantity.into(),
            reference: reference.into(),
            pinned_power,
            deltas,
            values,
            fit: f,
            predicted_c2,
            relative_deviation,
            tolerance,
            min_r_squared,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalingReport {
    pub config_hash: String,
    pub rows: Vec<ScalingRow>,
    /// δ values whose solve failed, with the error text.
    pub failures: Vec<(f64, String)>,
}
