//! Power-law fits on log-log data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub x_range: (f64, f64),
    pub points: usize,
}

impl RateFit {
    pub fn loglog(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::param("need at least two paired points"));
        }
        if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::param("log-log fit needs positive finite values"));
        }
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let mut fit = Self::linear(&lx, &ly)?;
        fit.x_range = (
            x.iter().cloned().fold(f64::INFINITY, f64::min),
            x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        Ok(fit)
    }

    /// Ordinary least squares on raw coordinates.
    pub fn linear(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::param("need at least two paired points"));
        }
        let m = x.len() as f64;
        let mx = x.iter().sum::<f64>() / m;
        let my = y.iter().sum::<f64>() / m;
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::param("degenerate abscissae"));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
        Ok(RateFit {
            slope,
            intercept,
            r2,
            x_range: (
                x.iter().cloned().fold(f64::INFINITY, f64::min),
                x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ),
            points: x.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let x: Vec<f64> = (1..20).map(|k| k as f64 * 3.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v.powf(-1.25)).collect();
        let f = RateFit::loglog(&x, &y).unwrap();
        assert!((f.slope + 1.25).abs() < 1e-12);
        assert!((f.intercept - 2.5f64.ln()).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert_eq!(f.x_range, (3.0, 57.0));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(RateFit::loglog(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(RateFit::loglog(&[1.0], &[1.0]).is_err());
        assert!(RateFit::linear(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }
}
