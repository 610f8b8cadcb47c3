//! Directional framelets: polar wedges with parabolic scaling.
//!
//! Band `j` of the Meyer bank is split into `L_j = 2^{ceil(j/2)}` angular
//! wedges by squared-partition-of-unity profiles in the polar angle, so the
//! wedge widths shrink like `2^{-j/2}` while the radial extent grows like
//! `2^j`. Each wedge spectrum is wrapped onto a small power-of-two rectangle
//! on which it is injective, and an inverse FFT there yields the coefficients
//! on a sheared location lattice. Only half of the orientations are computed;
//! the antipodal wedge of a real image is the conjugate, so each complex
//! coefficient is stored as `sqrt(2) Re` and `sqrt(2) Im`.

mod norms;
mod probe;

pub use norms::{dir_besov_levels, dir_besov_seqnorm, dir_triebel_seqnorm, DirBesovParams};
pub use probe::{dirac_image, windowed_heaviside, DwProbe, MicrolocalProfile};

use crate::error::{Error, Result};
use crate::frame::{Block, CoeffSet, Transform};
use crate::grid::{
    angular_profile, bin, check_side, fft2_rect_in_place, fft2_unitary, freq, ifft2_unitary, meyer_windows, Image,
    MeyerBank, Spectrum,
};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Tiling parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirFrameSpec {
    pub n: usize,
    pub j_coarse: usize,
    /// Orientations over the full circle for each band `j_coarse..=j_fine`.
    pub angles: Vec<usize>,
    /// Extra sampling factor per axis on top of the smallest injective rectangle.
    pub oversample: usize,
}

/// `2^{ceil(j/2)}` orientations over the full circle.
pub fn default_angles(j: usize) -> usize {
    1 << j.div_ceil(2)
}

impl DirFrameSpec {
    pub fn new(n: usize, j_coarse: usize) -> Result<Self> {
        let bank = meyer_windows(n, j_coarse)?;
        Ok(DirFrameSpec { n, j_coarse, angles: bank.bands().map(default_angles).collect(), oversample: 1 })
    }

    pub fn bank(&self) -> Result<MeyerBank> {
        meyer_windows(self.n, self.j_coarse)
    }

    /// Largest deviation of the summed squared windows from one on the lattice.
    pub fn tiling_deviation(&self) -> Result<f64> {
        let bank = self.bank()?;
        if self.angles.len() != bank.bands().count() {
            return Err(Error::param(format!("expected {} angle counts", bank.bands().count())));
        }
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i1 in 0..n {
            let k1 = freq(i1, n) as f64;
            for i2 in 0..n {
                let k2 = freq(i2, n) as f64;
                let r = k1.hypot(k2);
                let om = k2.atan2(k1);
                let mut s = bank.coarse(r).powi(2);
                for (j, &l) in bank.bands().zip(&self.angles) {
                    let w = bank.band(j, r);
                    if w == 0.0 {
                        continue;
                    }
                    let a: f64 = (0..l).map(|t| angular_weight(om, t, l).powi(2)).sum();
                    s += w * w * a;
                }
                worst = worst.max((s - 1.0).abs());
            }
        }
        Ok(worst)
    }

    /// Rejects angle counts that break the tiling or the conjugate pairing.
    pub fn validate(&self) -> Result<()> {
        check_side(self.n)?;
        if self.oversample == 0 {
            return Err(Error::param("oversample must be at least 1"));
        }
        if let Some(l) = self.angles.iter().find(|&&l| l % 2 == 1) {
            return Err(Error::param(format!("orientation count {l} must be even")));
        }
        let dev = self.tiling_deviation()?;
        if dev > 1e-8 {
            return Err(Error::param(format!("windows do not tile frequency: max deviation {dev:.3e}")));
        }
        Ok(())
    }
}

/// Periodic angular window of orientation `t` out of `l`.
fn angular_weight(om: f64, t: usize, l: usize) -> f64 {
    let width = 2.0 * PI / l as f64;
    let d = (om - t as f64 * width).rem_euclid(2.0 * PI);
    let d = if d > PI { d - 2.0 * PI } else { d };
    angular_profile(d / width)
}

/// One wedge: its lattice support, window weights and wrapping rectangle.
#[derive(Clone, Debug)]
pub struct Wedge {
    pub j: usize,
    /// Orientation index in `0..L_j/2`.
    pub orientation: usize,
    pub theta: f64,
    /// Wrapping rectangle, `l1` rows by `l2` columns.
    pub l1: usize,
    pub l2: usize,
    support: Vec<(u32, f64, u32)>,
}

impl Wedge {
    /// Real coefficients carried by the wedge.
    pub fn len(&self) -> usize {
        2 * self.l1 * self.l2
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Lattice points where the window is nonzero.
    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    /// Centre of the location cell of coefficient `p` (row-major in the rectangle).
    pub fn location(&self, p: usize) -> (f64, f64) {
        let p = p % (self.l1 * self.l2);
        ((p / self.l2) as f64 / self.l1 as f64, (p % self.l2) as f64 / self.l2 as f64)
    }
}

fn wraps_injectively(pts: &[(i64, i64)], l1: usize, l2: usize) -> bool {
    if pts.len() > l1 * l2 {
        return false;
    }
    let mut used = vec![false; l1 * l2];
    for &(k1, k2) in pts {
        let i = bin(k1, l1) * l2 + bin(k2, l2);
        if used[i] {
            return false;
        }
        used[i] = true;
    }
    true
}

/// Smallest power-of-two rectangle on which the support wraps injectively.
fn wrapping_rectangle(pts: &[(i64, i64)]) -> (usize, usize) {
    let ext = |f: &dyn Fn(&(i64, i64)) -> i64| {
        let lo = pts.iter().map(f).min().unwrap_or(0);
        let hi = pts.iter().map(f).max().unwrap_or(0);
        ((hi - lo + 1) as usize).next_power_of_two()
    };
    let (e1, e2) = (ext(&|p| p.0), ext(&|p| p.1));
    let mut best = (e1, e2);
    let mut a = 1;
    while a <= e1 {
        let mut b = 1;
        while b <= e2 {
            let better = a * b < best.0 * best.1
                || (a * b == best.0 * best.1 && a.abs_diff(b) < best.0.abs_diff(best.1));
            if better && wraps_injectively(pts, a, b) {
                best = (a, b);
            }
            b *= 2;
        }
        a *= 2;
    }
    best
}

/// Directional framelet transform on `n x n` images.
#[derive(Clone, Debug)]
pub struct DirFrame {
    spec: DirFrameSpec,
    bank: MeyerBank,
    coarse_side: usize,
    coarse_window: Vec<f64>,
    wedges: Vec<Wedge>,
}

impl DirFrame {
    pub fn new(spec: DirFrameSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let bank = spec.bank()?;
        let coarse_side = ((2.0 * bank.coarse_radius()).floor() as usize + 1).next_power_of_two().min(n);
        let coarse_window = bank.coarse_grid();
        let mut wedges = Vec::new();
        for (j, &l) in bank.bands().zip(&spec.angles) {
            let band = bank.band_grid(j);
            let per: Vec<Wedge> = (0..l / 2)
                .into_par_iter()
                .map(|t| {
                    let mut support = Vec::new();
                    let mut pts = Vec::new();
                    for (b, &w) in band.iter().enumerate() {
                        if w == 0.0 {
                            continue;
                        }
                        let (k1, k2) = (freq(b / n, n), freq(b % n, n));
                        // symmetrised so the conjugate bin sees the antipodal wedge,
                        // which only matters on the Nyquist lines
                        let (c1, c2) = (freq(bin(-k1, n), n), freq(bin(-k2, n), n));
                        let a1 = angular_weight((k2 as f64).atan2(k1 as f64), t, l);
                        let a2 = angular_weight((c2 as f64).atan2(c1 as f64), t + l / 2, l);
                        let a = ((a1 * a1 + a2 * a2) / 2.0).sqrt();
                        if a > 0.0 {
                            support.push((b as u32, w * a, 0u32));
                            pts.push((k1, k2));
                        }
                    }
                    let (r1, r2) = wrapping_rectangle(&pts);
                    let (l1, l2) = (r1 * spec.oversample, r2 * spec.oversample);
                    for (s, &(k1, k2)) in support.iter_mut().zip(&pts) {
                        s.2 = (bin(k1, l1) * l2 + bin(k2, l2)) as u32;
                    }
                    Wedge { j, orientation: t, theta: 2.0 * PI * t as f64 / l as f64, l1, l2, support }
                })
                .collect();
            wedges.extend(per);
        }
        Ok(DirFrame { spec, bank, coarse_side, coarse_window, wedges })
    }

    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(DirFrameSpec::new(n, 2)?)
    }

    pub fn spec(&self) -> &DirFrameSpec {
        &self.spec
    }

    pub fn bank(&self) -> &MeyerBank {
        &self.bank
    }

    pub fn wedges(&self) -> &[Wedge] {
        &self.wedges
    }

    pub fn coarse_side(&self) -> usize {
        self.coarse_side
    }

    pub fn len(&self) -> usize {
        self.coarse_side * self.coarse_side + self.wedges.iter().map(Wedge::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Real frame elements at scale `j`.
    pub fn count_at_scale(&self, j: usize) -> usize {
        self.wedges.iter().filter(|w| w.j == j).map(Wedge::len).sum()
    }

    /// Real frame elements per orientation at scale `j` (both antipodal wedges).
    pub fn count_per_orientation(&self, j: usize) -> usize {
        let ws: Vec<&Wedge> = self.wedges.iter().filter(|w| w.j == j).collect();
        ws.iter().map(|w| w.len()).sum::<usize>() / (2 * ws.len()).max(1)
    }

    fn coarse_analyze(&self, spec: &Spectrum) -> Vec<f64> {
        let (n, m) = (self.spec.n, self.coarse_side);
        let mut small = vec![Complex64::new(0.0, 0.0); m * m];
        let h = (m / 2) as i64;
        for k1 in -h..h {
            for k2 in -h..h {
                let w = self.coarse_window[bin(k1, n) * n + bin(k2, n)];
                small[bin(k1, m) * m + bin(k2, m)] = spec.at(k1, k2) * w;
            }
        }
        ifft2_unitary(&Spectrum::from_vec(m, small).expect("power of two")).into_vec()
    }

    fn coarse_synthesize(&self, coeffs: &[f64], spec: &mut [Complex64]) {
        let (n, m) = (self.spec.n, self.coarse_side);
        let small = fft2_unitary(&Image::from_vec(m, coeffs.to_vec()).expect("power of two"));
        let h = (m / 2) as i64;
        for k1 in -h..h {
            for k2 in -h..h {
                let b = bin(k1, n) * n + bin(k2, n);
                spec[b] += small.at(k1, k2) * self.coarse_window[b];
            }
        }
    }

    fn wedge_analyze(&self, w: &Wedge, spec: &[Complex64]) -> Vec<f64> {
        let area = w.l1 * w.l2;
        let mut buf = vec![Complex64::new(0.0, 0.0); area];
        for &(b, wt, i) in &w.support {
            buf[i as usize] = spec[b as usize] * wt;
        }
        fft2_rect_in_place(&mut buf, w.l1, w.l2, true);
        let mut out = Vec::with_capacity(2 * area);
        out.extend(buf.iter().map(|c| SQRT_2 * c.re));
        out.extend(buf.iter().map(|c| SQRT_2 * c.im));
        out
    }

    /// Adds the adjoint of one wedge to a full spectrum (both antipodal halves).
    fn wedge_synthesize(&self, w: &Wedge, coeffs: &[f64], spec: &mut [Complex64]) {
        let n = self.spec.n;
        let area = w.l1 * w.l2;
        let mut buf: Vec<Complex64> =
            (0..area).map(|i| Complex64::new(coeffs[i], coeffs[area + i])).collect();
        fft2_rect_in_place(&mut buf, w.l1, w.l2, false);
        for &(b, wt, i) in &w.support {
            let v = buf[i as usize] * wt;
            let b = b as usize;
            let (k1, k2) = (freq(b / n, n), freq(b % n, n));
            spec[b] += v;
            spec[bin(-k1, n) * n + bin(-k2, n)] += v.conj();
        }
    }

    fn layout(&self) -> Vec<Block> {
        let c = self.coarse_side * self.coarse_side;
        let mut blocks = vec![Block { start: 0, len: c, scale: None, group: 0, label: "coarse".into() }];
        let mut at = c;
        let first = self.bank.j_coarse();
        for w in &self.wedges {
            blocks.push(Block {
                start: at,
                len: w.len(),
                scale: Some(w.j),
                group: 1 + w.j - first,
                label: format!("band{}/wedge{}", w.j, w.orientation),
            });
            at += w.len();
        }
        blocks
    }
}

impl Transform for DirFrame {
    fn name(&self) -> &'static str {
        "dirframe"
    }

    fn n(&self) -> usize {
        self.spec.n
    }

    fn analyze(&self, img: &Image) -> Result<CoeffSet> {
        if img.n() != self.spec.n {
            return Err(Error::size("image side does not match transform"));
        }
        let spec = fft2_unitary(img);
        let mut values = Vec::with_capacity(self.len());
        values.extend(self.coarse_analyze(&spec));
        let parts: Vec<Vec<f64>> = self.wedges.par_iter().map(|w| self.wedge_analyze(w, spec.data())).collect();
        for p in parts {
            values.extend(p);
        }
        Ok(CoeffSet { n: self.spec.n, values, blocks: self.layout() })
    }

    fn synthesize(&self, coeffs: &CoeffSet) -> Result<Image> {
        if coeffs.values.len() != self.len() {
            return Err(Error::size(format!("expected {} dirframe coefficients, got {}", self.len(), coeffs.len())));
        }
        let n = self.spec.n;
        let v = &coeffs.values;
        let mut spec = Spectrum::zeros(n)?;
        let c = self.coarse_side * self.coarse_side;
        self.coarse_synthesize(&v[..c], spec.data_mut());
        // sqrt(2) Re(g) has spectrum (G(k) + conj G(-k)) / sqrt(2)
        let mut wedge_spec = vec![Complex64::new(0.0, 0.0); n * n];
        let mut at = c;
        for w in &self.wedges {
            self.wedge_synthesize(w, &v[at..at + w.len()], &mut wedge_spec);
            at += w.len();
        }
        for (s, t) in spec.data_mut().iter_mut().zip(&wedge_spec) {
            *s += t / SQRT_2;
        }
        Ok(ifft2_unitary(&spec))
    }
}
