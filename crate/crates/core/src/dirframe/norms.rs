use super::DirFrame;
use crate::error::{Error, Result};
use crate::frame::CoeffSet;
use serde::{Deserialize, Serialize};

/// Directional smoothness `sigma` with integrability indices `p`, `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirBesovParams {
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
}

impl DirBesovParams {
    pub fn new(sigma: f64, p: f64, q: f64) -> Result<Self> {
        let b = DirBesovParams { sigma, p, q };
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

    /// `s = sigma - 3/2 (1/p - 1/2)`: tiles at scale `j` have area `2^{-3j/2}`.
    pub fn s(&self) -> f64 {
        self.sigma - 1.5 * (1.0 / self.p - 0.5)
    }
}

fn lp_acc(acc: f64, v: f64, p: f64) -> f64 {
    if p.is_infinite() {
        acc.max(v)
    } else {
        acc + v.powf(p)
    }
}

fn lp_finish(acc: f64, p: f64) -> f64 {
    if p.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / p)
    }
}

fn level_of(scale: Option<usize>, coarsest: usize) -> usize {
    scale.unwrap_or(coarsest)
}

/// Weighted per-level norms `2^{js} (sum_{k,l} |a_{jkl}|^p)^{1/p}`, coarse block
/// folded into the coarsest scale. Entry `i` is scale `coarsest + i`.
pub fn dir_besov_levels(c: &CoeffSet, params: DirBesovParams) -> Result<Vec<f64>> {
    params.validate()?;
    let coarsest = c.blocks.iter().filter_map(|b| b.scale).min().unwrap_or(0);
    let top = c.blocks.iter().filter_map(|b| b.scale).max().unwrap_or(0);
    let mut per = vec![0.0; top + 1 - coarsest];
    for b in &c.blocks {
        let j = level_of(b.scale, coarsest) - coarsest;
        for v in &c.values[b.start..b.start + b.len] {
            per[j] = lp_acc(per[j], v.abs(), params.p);
        }
    }
    let s = params.s();
    Ok(per.iter().enumerate().map(|(i, &v)| lp_finish(v, params.p) * ((coarsest + i) as f64 * s).exp2()).collect())
}

/// `(sum_j 2^{jsq} (sum_{k,l} |a_{jkl}|^p)^{q/p})^{1/q}`, coarse block at the coarsest scale.
pub fn dir_besov_seqnorm(c: &CoeffSet, params: DirBesovParams) -> Result<f64> {
    let acc = dir_besov_levels(c, params)?.into_iter().fold(0.0, |acc, v| lp_acc(acc, v, params.q));
    Ok(lp_finish(acc, params.q))
}

/// Triebel analogue: `|| (sum_Q (2^{js} |a_Q| |Q|^{-1/p} 1_Q)^q)^{1/q} ||_{L^p}`
/// where `Q` is the location cell of each coefficient. All cells are dyadic
/// rectangles, so the integral is exact on their common refinement.
pub fn dir_triebel_seqnorm(frame: &DirFrame, c: &CoeffSet, params: DirBesovParams) -> Result<f64> {
    params.validate()?;
    if c.len() != frame.len() {
        return Err(Error::size("coefficients do not match the frame"));
    }
    let mc = frame.coarse_side();
    let g1 = frame.wedges().iter().map(|w| w.l1).max().unwrap_or(1).max(mc);
    let g2 = frame.wedges().iter().map(|w| w.l2).max().unwrap_or(1).max(mc);
    let s = params.s();
    let inv_p = if params.p.is_infinite() { 0.0 } else { 1.0 / params.p };
    let mut acc = vec![0.0; g1 * g2];
    let mut add = |l1: usize, l2: usize, j: usize, vals: &[f64]| {
        let area = 1.0 / (l1 * l2) as f64;
        let w = (j as f64 * s).exp2() * area.powf(-inv_p);
        let (f1, f2) = (g1 / l1, g2 / l2);
        for (i, v) in vals.iter().enumerate() {
            let p = i % (l1 * l2);
            let (p1, p2) = (p / l2, p % l2);
            let t = v.abs() * w;
            for r in p1 * f1..(p1 + 1) * f1 {
                for col in p2 * f2..(p2 + 1) * f2 {
                    let cell = &mut acc[r * g2 + col];
                    *cell = lp_acc(*cell, t, params.q);
                }
            }
        }
    };
    let j0 = frame.bank().j_coarse();
    add(mc, mc, j0, &c.values[..mc * mc]);
    let mut at = mc * mc;
    for wdg in frame.wedges() {
        add(wdg.l1, wdg.l2, wdg.j, &c.values[at..at + wdg.len()]);
        at += wdg.len();
    }
    let h = 1.0 / (g1 * g2) as f64;
    if params.p.is_infinite() {
        return Ok(acc.iter().map(|&a| lp_finish(a, params.q)).fold(0.0, f64::max));
    }
    let total: f64 = acc.iter().map(|&a| lp_finish(a, params.q).powf(params.p) * h).sum();
    Ok(total.powf(inv_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Transform;
    use crate::grid::seeded_gaussian;

    #[test]
    fn s_formula() {
        let p = DirBesovParams::new(1.5, 2.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!(p.s().abs() < 1e-15);
        assert!(DirBesovParams::new(1.0, 0.0, 1.0).is_err());
        assert!(DirBesovParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn l2_case_is_euclidean() {
        let f = DirFrame::with_defaults(64).unwrap();
        let c = f.analyze(&seeded_gaussian(64, 1.0, 3).unwrap()).unwrap();
        let l2 = c.energy().sqrt();
        let p = DirBesovParams::new(0.0, 2.0, 2.0).unwrap();
        assert!((dir_besov_seqnorm(&c, p).unwrap() - l2).abs() < 1e-12 * l2);
        assert!((dir_triebel_seqnorm(&f, &c, p).unwrap() - l2).abs() < 1e-12 * l2);
    }

    #[test]
    fn zero_and_homogeneity() {
        let f = DirFrame::with_defaults(32).unwrap();
        let c = f.analyze(&seeded_gaussian(32, 1.0, 4).unwrap()).unwrap();
        let z = c.with_values(vec![0.0; c.len()]);
        let p = DirBesovParams::new(0.5, 1.0, 3.0).unwrap();
        assert_eq!(dir_besov_seqnorm(&z, p).unwrap(), 0.0);
        assert_eq!(dir_triebel_seqnorm(&f, &z, p).unwrap(), 0.0);
        let c3 = c.with_values(c.values.iter().map(|v| -3.0 * v).collect());
        for p in [p, DirBesovParams::new(1.0, 0.5, f64::INFINITY).unwrap()] {
            let (a, b) = (dir_besov_seqnorm(&c, p).unwrap(), dir_besov_seqnorm(&c3, p).unwrap());
            assert!((b - 3.0 * a).abs() < 1e-10 * b);
            let (a, b) = (dir_triebel_seqnorm(&f, &c, p).unwrap(), dir_triebel_seqnorm(&f, &c3, p).unwrap());
            assert!((b - 3.0 * a).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn equal_indices_make_both_norms_agree() {
        let f = DirFrame::with_defaults(64).unwrap();
        let c = f.analyze(&seeded_gaussian(64, 1.0, 5).unwrap()).unwrap();
        let p = DirBesovParams::new(0.7, 1.3, 1.3).unwrap();
        let (a, b) = (dir_besov_seqnorm(&c, p).unwrap(), dir_triebel_seqnorm(&f, &c, p).unwrap());
        assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
    }
}
