//! Thresholding estimators in the white-noise model `Y = f dt + eps W(dt)`.
//!
//! Coefficients of the sampled image are `n` times its `L^2([0,1]^2)`
//! coefficients, so white noise of level `eps` becomes noise of standard
//! deviation `eps n sigma_g` on a pixel-unit coefficient of group `g`, where
//! `sigma_g` is the frame-element norm of the group (1 for orthonormal bases).
//! Errors are reported in `L^2([0,1]^2)`, i.e. `||f_hat - f||^2 / n^2`.

mod risk;

pub use risk::{risk_curve, RiskPoint, RiskReport};

use crate::error::{Error, Result};
use crate::frame::{CoeffSet, Transform, TransformKind};
use crate::grid::{derive_seed, gaussian_vec, seeded_gaussian, Image};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::PI;

/// Where the noise is added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDomain {
    /// i.i.d. Gaussians on the coefficients, scaled by the group norms. Exact for
    /// orthonormal bases; for redundant frames it ignores the correlations that
    /// the analysis operator would impose.
    Coefficient,
    /// White noise on the pixels pushed through the analysis operator.
    Pixel,
}

/// Noise level, grid and seed of one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eps: f64,
    pub seed: u64,
    pub n: usize,
    pub domain: NoiseDomain,
}

impl NoiseModel {
    pub fn new(eps: f64, seed: u64, n: usize) -> Result<Self> {
        let m = NoiseModel { eps, seed, n, domain: NoiseDomain::Coefficient };
        m.validate()?;
        Ok(m)
    }

    pub fn with_domain(mut self, domain: NoiseDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::param(format!("noise level {} must be finite and nonnegative", self.eps)));
        }
        crate::grid::check_side(self.n)
    }

    /// Standard deviation of the noise on one pixel-unit coefficient of norm one.
    pub fn coeff_sigma(&self) -> f64 {
        self.eps * self.n as f64
    }

    /// Noisy coefficients for replicate `stream`.
    pub fn observe(&self, t: &dyn Transform, clean: &CoeffSet, levels: &NoiseLevels, stream: u64) -> Result<CoeffSet> {
        let seed = derive_seed(self.seed, stream);
        let s = self.coeff_sigma();
        match self.domain {
            NoiseDomain::Coefficient => {
                let z = gaussian_vec(clean.len(), 1.0, seed);
                let mut v = clean.values.clone();
                for b in &clean.blocks {
                    let sg = s * levels.sigma(b.group);
                    for i in b.start..b.start + b.len {
                        v[i] += sg * z[i];
                    }
                }
                Ok(clean.with_values(v))
            }
            NoiseDomain::Pixel => {
                let w = t.analyze(&seeded_gaussian(self.n, s, seed)?)?;
                Ok(clean.with_values(clean.values.iter().zip(&w.values).map(|(a, b)| a + b).collect()))
            }
        }
    }
}

/// Per-group frame-element norms `sigma_g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseLevels {
    pub per_group: Vec<f64>,
    /// True when the norms are known exactly rather than estimated.
    pub exact: bool,
}

impl NoiseLevels {
    pub fn unit(groups: usize) -> Self {
        NoiseLevels { per_group: vec![1.0; groups], exact: true }
    }

    pub fn sigma(&self, group: usize) -> f64 {
        self.per_group.get(group).copied().unwrap_or(1.0)
    }
}

/// Estimates `sigma_g` as the RMS analysis coefficient of unit white noise.
pub fn calibrate(t: &dyn Transform, seed: u64, draws: usize) -> Result<NoiseLevels> {
    if draws == 0 {
        return Err(Error::param("calibration needs at least one draw"));
    }
    let n = t.n();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for d in 0..draws {
        let c = t.analyze(&seeded_gaussian(n, 1.0, derive_seed(seed, d as u64))?)?;
        if sums.is_empty() {
            sums = vec![(0.0, 0); c.groups()];
        }
        for b in &c.blocks {
            let e: f64 = c.values[b.start..b.start + b.len].iter().map(|v| v * v).sum();
            sums[b.group].0 += e;
            sums[b.group].1 += b.len;
        }
    }
    let per_group = sums.iter().map(|&(e, m)| if m == 0 { 1.0 } else { (e / m as f64).sqrt() }).collect();
    Ok(NoiseLevels { per_group, exact: false })
}

/// `E[z^2; |z| > lambda]` for a standard normal `z`.
pub fn exceedance_mass(lambda: f64) -> f64 {
    let lambda = lambda.max(0.0);
    let phi = (-lambda * lambda / 2.0).exp() / (2.0 * PI).sqrt();
    2.0 * lambda * phi + erfc(lambda / std::f64::consts::SQRT_2)
}

/// Universal threshold multiplier: `sqrt(2 log 1/eps)` for orthonormal bases,
/// `2 sqrt(log 1/eps)` for redundant frames. For `eps >= 1` the logarithm is
/// not positive and the multiplier is floored at 0; the flag reports it.
pub fn universal_lambda(eps: f64, kind: TransformKind) -> (f64, bool) {
    if eps >= 1.0 {
        return (0.0, true);
    }
    if eps <= 0.0 {
        return (f64::INFINITY, false);
    }
    let l = (1.0 / eps).ln();
    (if kind.is_orthonormal() { (2.0 * l).sqrt() } else { 2.0 * l.sqrt() }, false)
}

/// Finest scale kept at noise level `eps`: `c log2(1/eps)`.
pub fn scale_cutoff(eps: f64, c: f64) -> f64 {
    if eps <= 0.0 {
        f64::INFINITY
    } else {
        -c * eps.log2()
    }
}

/// Threshold actually applied, with the floor warning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInfo {
    pub lambda: f64,
    pub floored: bool,
    pub kept: usize,
}

/// How coefficients are thresholded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    /// Multiplier of the per-coefficient noise level.
    pub lambda: f64,
    /// Scales `j > cutoff log2(1/eps)` are zeroed.
    pub cutoff: f64,
    /// Pass the lowpass channel through untouched instead of thresholding it.
    pub keep_coarse: bool,
}

/// Hard thresholding at `lambda eps n sigma_g`, with scales above the cutoff zeroed.
pub fn threshold_estimator(noisy: &CoeffSet, model: &NoiseModel, rule: ThresholdRule, levels: &NoiseLevels) -> (CoeffSet, usize) {
    let cut = scale_cutoff(model.eps, rule.cutoff);
    let s = model.coeff_sigma();
    let mut v = noisy.values.clone();
    let mut kept = 0;
    for b in &noisy.blocks {
        let block = &mut v[b.start..b.start + b.len];
        if b.scale.is_some_and(|j| j as f64 > cut) {
            block.iter_mut().for_each(|x| *x = 0.0);
            continue;
        }
        if b.scale.is_none() && rule.keep_coarse {
            kept += b.len;
            continue;
        }
        let t = if s == 0.0 { 0.0 } else { rule.lambda * s * levels.sigma(b.group) };
        for x in block.iter_mut() {
            if x.abs() <= t && t > 0.0 {
                *x = 0.0;
            } else {
                kept += 1;
            }
        }
    }
    (noisy.with_values(v), kept)
}

/// A transform with its noise calibration and threshold rule.
pub struct Denoiser {
    kind: TransformKind,
    transform: Box<dyn Transform>,
    levels: NoiseLevels,
    domain: NoiseDomain,
    /// Overrides the default multiplier of `sqrt(log 1/eps)` for frames.
    lambda_scale: Option<f64>,
    cutoff: f64,
    keep_coarse: bool,
}

/// In two dimensions `j <= log2(1/eps)` keeps about `eps^-2` coefficients.
pub const DEFAULT_CUTOFF: f64 = 1.0;

/// Calibration draws; the estimated norms are averages over whole groups.
const CALIBRATION_DRAWS: usize = 4;

impl Denoiser {
    pub fn new(kind: TransformKind, n: usize, seed: u64) -> Result<Self> {
        let transform = kind.build(n)?;
        let levels = if kind.is_orthonormal() {
            NoiseLevels::unit(transform.analyze(&Image::zeros(n)?)?.groups())
        } else {
            calibrate(transform.as_ref(), derive_seed(seed, u64::MAX), CALIBRATION_DRAWS)?
        };
        Ok(Denoiser { kind, transform, levels, domain: NoiseDomain::Coefficient, lambda_scale: None, cutoff: DEFAULT_CUTOFF, keep_coarse: false })
    }

    pub fn with_domain(mut self, domain: NoiseDomain) -> Self {
        self.domain = domain;
        self
    }

    /// Threshold multiplier `c sqrt(log 1/eps)` with a custom `c`.
    pub fn with_lambda_scale(mut self, c: f64) -> Self {
        self.lambda_scale = Some(c);
        self
    }

    /// Keeps scales `j <= c log2(1/eps)`.
    pub fn with_cutoff(mut self, c: f64) -> Self {
        self.cutoff = c;
        self
    }

    pub fn with_keep_coarse(mut self, keep: bool) -> Self {
        self.keep_coarse = keep;
        self
    }

    pub fn rule(&self, eps: f64) -> ThresholdRule {
        ThresholdRule { lambda: self.lambda(eps).0, cutoff: self.cutoff, keep_coarse: self.keep_coarse }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn transform(&self) -> &dyn Transform {
        self.transform.as_ref()
    }

    pub fn levels(&self) -> &NoiseLevels {
        &self.levels
    }

    pub fn domain(&self) -> NoiseDomain {
        self.domain
    }

    pub fn lambda(&self, eps: f64) -> (f64, bool) {
        match self.lambda_scale {
            Some(c) if eps < 1.0 && eps > 0.0 => (c * (1.0 / eps).ln().sqrt(), false),
            _ => universal_lambda(eps, self.kind),
        }
    }

    /// Denoises one noisy draw of `f`; returns the estimate, its `L^2` error and the threshold used.
    pub fn run(&self, f: &Image, clean: &CoeffSet, eps: f64, seed: u64, stream: u64) -> Result<(Image, f64, ThresholdInfo)> {
        let model = NoiseModel::new(eps, seed, f.n())?.with_domain(self.domain);
        let noisy = model.observe(self.transform.as_ref(), clean, &self.levels, stream)?;
        let (lambda, floored) = self.lambda(eps);
        let (est, kept) = threshold_estimator(&noisy, &model, self.rule(eps), &self.levels);
        let g = self.transform.synthesize(&est)?;
        let n2 = (f.n() * f.n()) as f64;
        let mse = g.sub(f).norm_sq() / n2;
        Ok((g, mse, ThresholdInfo { lambda, floored, kept }))
    }

    /// One-shot denoising of `f` at noise level `eps`.
    pub fn denoise(&self, f: &Image, eps: f64, seed: u64) -> Result<(Image, f64, ThresholdInfo)> {
        let clean = self.transform.analyze(f)?;
        self.run(f, &clean, eps, seed, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson_tail(lambda: f64) -> f64 {
        // 2 * int_lambda^12 z^2 phi(z) dz
        let (a, b, m) = (lambda, 12.0, 20_000);
        let h = (b - a) / m as f64;
        let g = |z: f64| z * z * (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
        let mut s = g(a) + g(b);
        for i in 1..m {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 * s * h / 3.0
    }

    #[test]
    fn exceedance_mass_matches_quadrature() {
        for l in [0.0, 0.5, 1.0, 2.146, 3.0, 4.5] {
            let (a, b) = (exceedance_mass(l), simpson_tail(l));
            assert!((a - b).abs() < 1e-9, "{l}: {a} vs {b}");
        }
        assert!((exceedance_mass(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thresholds_follow_the_family() {
        let (w, fw) = universal_lambda(0.01, TransformKind::Wavelet);
        let (c, _) = universal_lambda(0.01, TransformKind::Curvelet);
        assert!((w - (2.0 * 100f64.ln()).sqrt()).abs() < 1e-12 && !fw);
        assert!((c - 2.0 * 100f64.ln().sqrt()).abs() < 1e-12);
        assert_eq!(universal_lambda(1.0, TransformKind::Dirframe), (0.0, true));
        assert_eq!(universal_lambda(3.0, TransformKind::Wavelet), (0.0, true));
        assert_eq!(scale_cutoff(0.25, 2.0), 4.0);
    }

    #[test]
    fn noise_model_rejects_bad_levels() {
        assert!(NoiseModel::new(-0.1, 0, 32).is_err());
        assert!(NoiseModel::new(f64::NAN, 0, 32).is_err());
        assert!(NoiseModel::new(0.1, 0, 30).is_err());
    }

    #[test]
    fn zero_noise_is_exact() {
        let f = crate::curvelet::edge_image(crate::curvelet::EdgeKind::Disk, 64).unwrap();
        for kind in [TransformKind::Wavelet, TransformKind::Dirframe] {
            let d = Denoiser::new(kind, 64, 1).unwrap();
            let (_, mse, info) = d.denoise(&f, 0.0, 3).unwrap();
            assert!(mse < 1e-20, "{kind}: {mse}");
            assert!(!info.floored);
        }
    }

    #[test]
    fn large_coefficients_pass_unchanged() {
        let n = 32;
        let model = NoiseModel::new(0.01, 0, n).unwrap();
        let w = TransformKind::Wavelet.build(n).unwrap();
        let c = w.analyze(&seeded_gaussian(n, 1.0, 2).unwrap()).unwrap();
        let big = c.with_values(c.values.iter().map(|v| v.signum() * (1e3 + v.abs())).collect());
        let (est, kept) = threshold_estimator(&big, &model, ThresholdRule { lambda: 3.0, cutoff: DEFAULT_CUTOFF, keep_coarse: false }, &NoiseLevels::unit(c.groups()));
        assert_eq!(est.values, big.values);
        assert_eq!(kept, c.len());
    }

    #[test]
    fn small_noise_limit_recovers_coefficients() {
        let f = crate::curvelet::edge_image(crate::curvelet::EdgeKind::SineCut, 64).unwrap();
        let d = Denoiser::new(TransformKind::Wavelet, 64, 0).unwrap();
        let errs: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&e| d.denoise(&f, e, 5).unwrap().1).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(errs[2] < 1e-8, "{errs:?}");
    }

    #[test]
    fn pure_noise_matches_tail_oracle() {
        let n = 64;
        let eps = 0.1;
        let d = Denoiser::new(TransformKind::Wavelet, n, 0).unwrap();
        let f = Image::zeros(n).unwrap();
        let clean = d.transform().analyze(&f).unwrap();
        let reps = 100;
        let mses: Vec<f64> = (0..reps).map(|r| d.run(&f, &clean, eps, 9, r).unwrap().1).collect();
        let mean = mses.iter().sum::<f64>() / reps as f64;
        let cut = scale_cutoff(eps, DEFAULT_CUTOFF);
        let live = clean.blocks.iter().filter(|b| b.scale.map_or(true, |j| j as f64 <= cut)).map(|b| b.len).sum::<usize>();
        assert!(live < clean.len());
        let (lambda, _) = d.lambda(eps);
        let expected = eps * eps * live as f64 * exceedance_mass(lambda);
        assert!(mean <= 2.0 * expected, "{mean} vs {expected}");
        let sd = (mses.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sd / (reps as f64).sqrt() + 1e-3 * expected, "{mean} vs {expected}");
    }

    #[test]
    fn frame_calibration_is_near_unit_for_tight_frames() {
        let d = Denoiser::new(TransformKind::Dirframe, 64, 0).unwrap();
        let l = d.levels();
        assert!(!l.exact);
        // tight frame: average squared norm over all elements equals n^2 / len
        for &s in &l.per_group {
            assert!(s > 0.05 && s <= 1.05, "{s}");
        }
    }
}
