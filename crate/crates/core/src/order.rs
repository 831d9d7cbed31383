//! Leading-order power-law fits of error coefficients near zero offset.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precise;
use crate::pulse::BasePulse;
use crate::sequence::SequenceExpr;
use crate::su2::{Component, ErrorCoeffs};

/// Offsets spanned by the fit, log-spaced.
pub const FIT_WINDOW: (f64, f64) = (1e-3, 1e-2);
pub const FIT_POINTS: usize = 12;
/// RMS of log10 residuals above which the window is not a power law.
pub const RESIDUAL_THRESHOLD: f64 = 1e-2;
/// Components whose every sample falls below this are treated as exactly
/// zero (rounding noise of the extended-precision evaluation).
pub const NOISE_FLOOR: f64 = 1e-80;
/// Fitted coefficients below this are reported as vanishing.
pub const VANISHING_COEFFICIENT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub component: Component,
    /// Fitted `q` in `δ ≈ ξ ε^q`.
    pub exponent: f64,
    /// Fitted `ξ`.
    pub coefficient: f64,
    /// RMS log10 residual of the fit.
    pub residual: f64,
    pub vanishing: bool,
}

impl OrderEstimate {
    /// The exponent, or `None` for a vanishing component.
    pub fn order(&self) -> Option<f64> {
        (!self.vanishing).then_some(self.exponent)
    }
}

pub fn fit_offsets() -> Vec<f64> {
    let (lo, hi) = (FIT_WINDOW.0.log10(), FIT_WINDOW.1.log10());
    (0..FIT_POINTS)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (FIT_POINTS - 1) as f64))
        .collect()
}

/// Error coefficients at every fit offset, in extended precision.
pub fn sample_errors(s: &SequenceExpr, base: &BasePulse) -> Vec<(f64, ErrorCoeffs)> {
    fit_offsets()
        .into_par_iter()
        .map(|eps| {
            (
                eps,
                precise::propagate_tokens(s.tokens(), base, eps).error_coeffs(),
            )
        })
        .collect()
}

/// Least-squares fit of `log10 δ = log10 ξ + q log10 ε`.
pub fn fit_power_law(component: Component, samples: &[(f64, f64)]) -> Result<OrderEstimate> {
    if samples.iter().all(|&(_, d)| d < NOISE_FLOOR) {
        return Ok(OrderEstimate {
            component,
            exponent: 0.0,
            coefficient: 0.0,
            residual: 0.0,
            vanishing: true,
        });
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(e, d)| (e.log10(), d.max(f64::MIN_POSITIVE).log10()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let coefficient = 10f64.powf(intercept);
    if residual > RESIDUAL_THRESHOLD {
        return Err(Error::FitFailure {
            component: component.name(),
            residual,
            threshold: RESIDUAL_THRESHOLD,
        });
    }
    Ok(OrderEstimate {
        component,
        exponent: slope,
        coefficient,
        residual,
        vanishing: coefficient < VANISHING_COEFFICIENT,
    })
}

pub fn estimate_order(
    s: &SequenceExpr,
    base: &BasePulse,
    component: Component,
) -> Result<OrderEstimate> {
    let samples: Vec<(f64, f64)> = sample_errors(s, base)
        .into_iter()
        .map(|(e, c)| (e, c.get(component)))
        .collect();
    fit_power_law(component, &samples)
}

/// Fits for all four components from one set of samples.
pub fn estimate_orders(s: &SequenceExpr, base: &BasePulse) -> Vec<Result<OrderEstimate>> {
    let samples = sample_errors(s, base);
    Component::ALL
        .iter()
        .map(|&c| {
            let pts: Vec<(f64, f64)> = samples.iter().map(|(e, x)| (*e, x.get(c))).collect();
            fit_power_law(c, &pts)
        })
        .collect()
}
