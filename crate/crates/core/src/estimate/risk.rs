use super::Denoiser;
use crate::error::{Error, Result};
use crate::fit::RateFit;
use crate::grid::Image;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Monte Carlo risk at one noise level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub eps: f64,
    pub mse: f64,
    /// Standard error of `mse` from the replicate variance.
    pub se: f64,
    pub lambda: f64,
    pub floored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub estimator: String,
    pub replicates: usize,
    pub seed: u64,
    pub points: Vec<RiskPoint>,
    /// Fit of `log mse` against `log eps^2`; absent with fewer than two levels.
    pub fit: Option<RateFit>,
}

impl RiskReport {
    /// Fitted exponent `r` in `mse ~ (eps^2)^r`.
    pub fn exponent(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }
}

/// Replicate `r` draws the same standard-normal vector at every noise level,
/// so differences between levels are not blurred by independent draws.
pub fn risk_curve(f: &Image, d: &Denoiser, eps: &[f64], replicates: usize, seed: u64) -> Result<RiskReport> {
    if replicates < 2 {
        return Err(Error::param("need at least two replicates for a standard error"));
    }
    if let Some(&e) = eps.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::param(format!("noise level {e} must be positive")));
    }
    let clean = d.transform().analyze(f)?;
    let mut points = Vec::with_capacity(eps.len());
    for &e in eps {
        let mses: Vec<f64> = (0..replicates as u64)
            .into_par_iter()
            .map(|r| d.run(f, &clean, e, seed, r).map(|x| x.1))
            .collect::<Result<_>>()?;
        let m = replicates as f64;
        let mean = mses.iter().sum::<f64>() / m;
        let var = mses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let (lambda, floored) = d.lambda(e);
        points.push(RiskPoint { eps: e, mse: mean, se: (var / m).sqrt(), lambda, floored });
    }
    let fit = if points.len() >= 2 {
        let x: Vec<f64> = points.iter().map(|p| p.eps * p.eps).collect();
        let y: Vec<f64> = points.iter().map(|p| p.mse).collect();
        RateFit::loglog(&x, &y).ok()
    } else {
        None
    };
    Ok(RiskReport { estimator: format!("{}-hard-universal", d.kind()), replicates, seed, points, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::TransformKind;

    #[test]
    fn saturated_pure_noise_scales_like_eps_squared() {
        let n = 32;
        let d = Denoiser::new(TransformKind::Wavelet, n, 0).unwrap();
        let r = risk_curve(&Image::zeros(n).unwrap(), &d, &[1.0, 2.0, 4.0, 8.0], 8, 4).unwrap();
        assert!(r.points.iter().all(|p| p.floored));
        assert!((r.exponent().unwrap() - 1.0).abs() < 0.1, "{:?}", r.exponent());
    }

    #[test]
    fn pure_noise_risk_decreases_with_eps() {
        let n = 64;
        for kind in [TransformKind::Wavelet, TransformKind::Dirframe] {
            let d = Denoiser::new(kind, n, 0).unwrap();
            let eps: Vec<f64> = (2..7).map(|k| (-(k as f64)).exp2()).collect();
            let r = risk_curve(&Image::zeros(n).unwrap(), &d, &eps, 8, 2).unwrap();
            for w in r.points.windows(2) {
                assert!(w[1].mse < w[0].mse, "{kind}: {:?}", r.points);
            }
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let f = crate::curvelet::edge_image(crate::curvelet::EdgeKind::Disk, 32).unwrap();
        let d = Denoiser::new(TransformKind::Wavelet, 32, 0).unwrap();
        let a = risk_curve(&f, &d, &[0.1, 0.05], 4, 11).unwrap();
        let b = risk_curve(&f, &d, &[0.1, 0.05], 4, 11).unwrap();
        assert_eq!(a, b);
        assert!(risk_curve(&f, &d, &[0.1], 1, 0).is_err());
        assert!(risk_curve(&f, &d, &[0.0], 4, 0).is_err());
    }
}
