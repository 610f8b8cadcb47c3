use super::{Filter, WaveletCoeffs1d};
use crate::grid::gaussian_vec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Smoothness `sigma` and integrability indices `p`, `q` (either may be infinite).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(sigma: f64, p: f64, q: f64) -> Result<Self> {
        let b = BesovParams { sigma, p, q };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || !(self.q > 0.0) {
            return Err(Error::param(format!("p = {} and q = {} must be positive", self.p, self.q)));
        }
        if !self.sigma.is_finite() {
            return Err(Error::param("sigma must be finite"));
        }
        Ok(())
    }

    /// Level exponent `s = sigma + 1/2 - 1/p`.
    pub fn s(&self) -> f64 {
        self.sigma - (1.0 / self.p - 0.5)
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values.map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Levels as `(j, coefficients)`, the scaling block counted at `j_coarse`.
fn levels(c: &WaveletCoeffs1d) -> Vec<(usize, &[f64])> {
    let mut out = vec![(c.j_coarse, c.coarse.as_slice())];
    for (i, d) in c.details.iter().enumerate() {
        out.push((c.level(i), d.as_slice()));
    }
    out
}

/// Besov sequence norm `(sum_j 2^{jsq} (sum_k |a_jk|^p)^{q/p})^{1/q}`.
pub fn besov_seqnorm(c: &WaveletCoeffs1d, params: BesovParams) -> Result<f64> {
    params.validate()?;
    let s = params.s();
    let terms = levels(c).into_iter().map(|(j, a)| lp(a.iter().copied(), params.p) * (j as f64 * s).exp2());
    Ok(lp(terms, params.q))
}

/// Triebel sequence norm: the `l^q` sum over scales is taken pointwise in
/// `t` against `L^2`-normalised interval indicators, then the `L^p` norm in `t`.
pub fn triebel_seqnorm(c: &WaveletCoeffs1d, params: BesovParams) -> Result<f64> {
    params.validate()?;
    let lv = levels(c);
    let finest = lv.iter().map(|(j, _)| *j).max().unwrap_or(0);
    let cells = 1usize << finest;
    let inv_p = if params.p.is_infinite() { 0.0 } else { 1.0 / params.p };
    let weights: Vec<f64> = lv.iter().map(|(j, _)| (*j as f64 * (params.s() + inv_p)).exp2()).collect();
    let mut pointwise = Vec::with_capacity(cells);
    for cell in 0..cells {
        let vals = lv.iter().zip(&weights).map(|((j, a), w)| a[cell >> (finest - j)].abs() * w);
        pointwise.push(lp(vals, params.q));
    }
    if params.p.is_infinite() {
        return Ok(pointwise.into_iter().fold(0.0, f64::max));
    }
    let h = 1.0 / cells as f64;
    Ok((pointwise.iter().map(|v| v.powf(params.p) * h).sum::<f64>()).powf(1.0 / params.p))
}

/// Random coefficients on the unit sphere of `b^sigma_{p,infinity}`: every
/// level (the scaling block included) has Gaussian entries rescaled so that
/// `2^{js} ||a_j||_p = 1`. The decreasing rearrangement then decays like
/// `k^{-(sigma + 1/2)}` and N-term errors like `N^{-sigma}`.
pub fn besov_ball_sample(filter: Filter, len: usize, j_coarse: usize, params: BesovParams, seed: u64) -> Result<WaveletCoeffs1d> {
    params.validate()?;
    let mut c = WaveletCoeffs1d::from_flat(filter, j_coarse, &gaussian_vec(len, 1.0, seed))?;
    let s = params.s();
    let rescale = |a: &mut [f64], j: usize| {
        let norm = lp(a.iter().copied(), params.p) * (j as f64 * s).exp2();
        if norm > 0.0 {
            a.iter_mut().for_each(|v| *v /= norm);
        }
    };
    rescale(&mut c.coarse, j_coarse);
    for (i, d) in c.details.iter_mut().enumerate() {
        rescale(d, j_coarse + i);
    }
    Ok(c)
}
